//! Numerical toolkit for higher-dimensional instantons on cylinders
//! `ℝ × M` and cones `C(M)` over manifolds carrying a 3-form `P` and a
//! 4-form `Q` with `dP = 4Q` and `d⋆Q = (n-3)⋆P`.
//!
//! The crate is organized bottom-up:
//!
//! * [`exterior`]: exact exterior algebra, Hodge star, interior products.
//! * [`gauge`]: matrix-valued forms, curvature, covariant derivative.
//! * [`fields`]: forms as fields on charts, finite-difference `d`, sphere
//!   frames, pullbacks and quadrature.
//! * [`structures`]: the nearly Kähler and nearly parallel `G₂` forms and
//!   their cylinder and cone versions.
//! * [`instanton`]: the instanton condition as an eigenproblem on `Λ²`.
//! * [`csflow`]: the Chern–Simons functional, reduced gradient flows and
//!   energy-decay diagnostics.
//! * [`conformal`]: conformal rescaling, the energy-density Lie derivative
//!   and the cutoff squeeze behind the vanishing argument.
//!
//! ```
//! use holoflow::structures::{catalog, StructureName};
//! use holoflow::exterior::{hodge, MetricFrame};
//!
//! let nk = catalog(StructureName::Nk6);
//! let star_p = hodge(&nk.p, &MetricFrame::identity(6)).unwrap();
//! assert_eq!(star_p, nk.star_p);
//! ```

mod check;
pub mod conformal;
pub mod csflow;
mod error;
pub mod exterior;
pub mod fields;
pub mod gauge;
pub mod instanton;
pub(crate) mod linalg;
pub mod structures;

pub use check::Check;
pub use error::{Error, Result};
pub use linalg::{symmetric_eigen, SymmetricEigen};
