//! The Chern–Simons functional on the sphere link of a cone, and reduced
//! gradient flows with their energy-decay diagnostics.
//!
//! The functional and its 1-form are integrated over `S⁶` or `S⁷` by
//! quasi-random sampling, with the structure forms realized pointwise in
//! sphere frames. Flows are finite-dimensional: a [`ReducedModel`] supplies
//! a potential `W(φ)` for the Chern–Simons value and a kinetic matrix for
//! the `L²` metric.

mod chern_simons;
mod diagnostics;
mod flow;
mod model;

pub use chern_simons::{
    cs_along_path, cs_evaluate, cs_one_form, cs_one_form_check, cs_path_comparison, cs_scaling_fit, CsEstimate,
    PairedEstimate, PathComparison, PolynomialPath, Sampling, ScalingFit,
};
pub use diagnostics::{decay_diagnostics, log_slope, DecayOptions, DecayReport, LDeltaFit};
pub use flow::{flow_integrate, TailEstimate, Trajectory};
pub use model::{load_model, Monomial, ReducedModel, CALIBRATED_C};
