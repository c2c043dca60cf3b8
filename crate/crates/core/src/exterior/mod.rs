//! Exterior algebra over an oriented inner-product space.
//!
//! Forms are sparse maps from [`Blade`]s to coefficients. The coefficient
//! ring is pluggable: [`Form`] carries real scalars, while
//! [`GaugeForm`](crate::gauge::GaugeForm) carries matrices.
//!
//! Orientation: `e^0 ∧ … ∧ e^{N-1}` is positive. On a cylinder `ℝ × M`
//! the `dt` direction sits at position 0, so `vol_Z = dt ∧ vol_M` and
//! `⋆(dt ∧ φ) = ⋆_M φ` holds without extra signs.

mod blade;
mod form;
mod metric;

pub use blade::{wedge_sign, Blade};
pub use form::{Algebra, Coefficient, Form, Multiform};
pub use metric::{conformal_hodge, hodge, hodge_graded, inner, norm_sqr, volume_form, MetricFrame};

/// Largest supported dimension (blades are 16-bit masks in practice).
pub const MAX_DIMENSION: usize = 16;
