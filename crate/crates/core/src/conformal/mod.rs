//! Conformal rescaling and the vanishing argument for finite-energy
//! Yang–Mills connections on cones.
//!
//! The energy density `λ = Tr(F_A ∧ ⋆F_A)` is taken as a top form on the
//! `(n+1)`-dimensional total space. It has conformal weight `n - 3`, so for a
//! conformal field `X` with `L_X g = 2fg`,
//! `L_X λ = (n-3) f λ + 2 Tr(d_A(i_X F_A) ∧ ⋆F_A)`. Paired with a cutoff
//! `η`, this bounds `(n-3) ∫ η λ` by the energy in the cutoff band, which
//! tends to zero when the total energy is finite.
//!
//! Note the sign: with anti-Hermitian matrices `λ = -|F|² vol`.

mod field;
mod identities;
mod squeeze;

pub use field::ConformalField;
pub use identities::{
    cone_equivalence_check, energy_density_field, ibp_check, lemma41_check, lie_derivative_check, weight_check,
    ConeEquivalence, IbpReport, Lemma41Report, TestFunction,
};
pub use squeeze::{cutoff_squeeze, CutoffProfile, SqueezeReport, SqueezeRow};
