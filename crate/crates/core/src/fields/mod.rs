//! Forms as fields on charts.
//!
//! A [`FormField`] pairs a [`ChartDomain`] with an evaluator `point → form`.
//! Exterior derivatives are central differences with step `h` taken from
//! the domain; nested derivatives shrink the admissible region so that a
//! stencil never leaves the chart silently.
//!
//! Spheres enter through [`FramedPoint`]: a point of `ℝ^N` with an
//! orthonormal frame of the sphere through it. Pullbacks, the Euler-field
//! split `Φ = r^{w-1} dr ∧ P + r^w Q` and sphere quadrature all work on
//! framed points.

mod chart;
mod quadrature;
mod sphere;

pub use chart::{ChartDomain, ChartKind, FormField, Point};
pub use quadrature::{
    integrate_box, integrate_sphere, integrate_sphere_many, sphere_area, sphere_points, BoxRule, Estimate,
};
pub use sphere::{euler_split, pullback_sphere, reconstruct, sphere_frame, split_form, FramedPoint};

/// Real-valued form field.
pub type ScalarField = FormField<f64>;
