use std::fmt;
use std::sync::Arc;

use crate::exterior::{Coefficient, Multiform};
use crate::{Error, Result};

/// An owned point in chart coordinates.
pub type Point = Vec<f64>;

/// Shape of a chart.
#[derive(Clone, Debug, PartialEq)]
pub enum ChartKind {
    /// Axis-aligned box `[lo, hi]`.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// The shell `inner ≤ |x| ≤ outer` around the removed origin.
    Punctured { inner: f64, outer: f64 },
    /// Periodic box `[0, period_i)`; evaluators must be periodic.
    Torus { periods: Vec<f64> },
    /// Neighbourhood `| |x| - 1 | ≤ width` of the unit sphere.
    Sphere { width: f64 },
}

/// Where a field may be evaluated, and the finite-difference step used to
/// differentiate it.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartDomain {
    kind: ChartKind,
    dim: usize,
    h: f64,
    /// Distance already consumed by enclosing stencils.
    margin: f64,
}

impl ChartDomain {
    fn build(kind: ChartKind, dim: usize, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
        }
        Ok(ChartDomain {
            kind,
            dim,
            h,
            margin: 0.0,
        })
    }

    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>, h: f64) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch(lo.len(), hi.len()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
            return Err(Error::InvalidArgument("box bounds must satisfy lo < hi".into()));
        }
        let dim = lo.len();
        Self::build(ChartKind::Box { lo, hi }, dim, h)
    }

    /// `[lo, hi]^dim`
    pub fn cube(dim: usize, lo: f64, hi: f64, h: f64) -> Result<Self> {
        Self::boxed(vec![lo; dim], vec![hi; dim], h)
    }

    pub fn punctured(dim: usize, inner: f64, outer: f64, h: f64) -> Result<Self> {
        if !(inner > 0.0 && outer > inner) {
            return Err(Error::InvalidArgument("punctured chart needs 0 < inner < outer".into()));
        }
        Self::build(ChartKind::Punctured { inner, outer }, dim, h)
    }

    pub fn torus(periods: Vec<f64>, h: f64) -> Result<Self> {
        if periods.iter().any(|p| *p <= 0.0) {
            return Err(Error::InvalidArgument("torus periods must be positive".into()));
        }
        let dim = periods.len();
        Self::build(ChartKind::Torus { periods }, dim, h)
    }

    /// Shell of half-width `width` around the unit sphere `S^{dim-1}`.
    pub fn sphere(dim: usize, width: f64, h: f64) -> Result<Self> {
        if !(width > 0.0 && width < 1.0) {
            return Err(Error::InvalidArgument("sphere shell width must lie in (0, 1)".into()));
        }
        Self::build(ChartKind::Sphere { width }, dim, h)
    }

    pub fn kind(&self) -> &ChartKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    /// Room at the edges already taken by enclosing stencils.
    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn with_step(&self, h: f64) -> Result<Self> {
        let mut d = self.clone();
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
        }
        d.h = h;
        Ok(d)
    }

    /// The same chart with `reach` less room at its edges.
    pub fn shrunk(&self, reach: f64) -> Self {
        ChartDomain {
            margin: self.margin + reach,
            ..self.clone()
        }
    }

    /// Whether every point within coordinate distance `reach` of `p`
    /// along an axis lies in the chart.
    pub fn admits(&self, p: &[f64], reach: f64) -> bool {
        if p.len() != self.dim || p.iter().any(|x| !x.is_finite()) {
            return false;
        }
        let room = reach + self.margin;
        match &self.kind {
            ChartKind::Box { lo, hi } => p
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(x, (a, b))| *x >= a + room && *x <= b - room),
            ChartKind::Punctured { inner, outer } => {
                let r = norm(p);
                r - room >= *inner && r + room <= *outer
            }
            ChartKind::Torus { .. } => true,
            ChartKind::Sphere { width } => (norm(p) - 1.0).abs() + room <= *width,
        }
    }

    pub(crate) fn check(&self, p: &[f64], reach: f64) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::DimensionMismatch(p.len(), self.dim));
        }
        if !self.admits(p, reach) {
            return Err(Error::StencilOutsideChart {
                point: p.to_vec(),
                reach: reach + self.margin,
            });
        }
        Ok(())
    }
}

pub(crate) fn norm(p: &[f64]) -> f64 {
    p.iter().map(|x| x * x).sum::<f64>().sqrt()
}

type Evaluator<C> = Arc<dyn Fn(&[f64]) -> Multiform<C> + Send + Sync>;

/// A form-valued function on a chart. Cloning shares the evaluator.
pub struct FormField<C> {
    domain: ChartDomain,
    eval: Evaluator<C>,
    richardson: bool,
}

impl<C> Clone for FormField<C> {
    fn clone(&self) -> Self {
        FormField {
            domain: self.domain.clone(),
            eval: Arc::clone(&self.eval),
            richardson: self.richardson,
        }
    }
}

impl<C> fmt::Debug for FormField<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FormField")
            .field("domain", &self.domain)
            .field("richardson", &self.richardson)
            .finish_non_exhaustive()
    }
}

impl<C: Coefficient> FormField<C> {
    pub fn new<F>(domain: ChartDomain, f: F) -> Self
    where
        F: Fn(&[f64]) -> Multiform<C> + Send + Sync + 'static,
    {
        FormField {
            domain,
            eval: Arc::new(f),
            richardson: false,
        }
    }

    pub fn constant(domain: ChartDomain, form: Multiform<C>) -> Self {
        Self::new(domain, move |_| form.clone())
    }

    pub fn domain(&self) -> &ChartDomain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim
    }

    pub fn evaluate(&self, p: &[f64]) -> Multiform<C> {
        (self.eval)(p)
    }

    /// Same evaluator, different finite-difference step.
    pub fn with_step(&self, h: f64) -> Self {
        FormField {
            domain: self.domain.with_step(h).expect("step must be positive"),
            ..self.clone()
        }
    }

    /// Toggles one-step Richardson extrapolation in [`FormField::d_numeric`]:
    /// `(4 D_h - D_{2h}) / 3`, fourth order, twice the reach.
    pub fn with_richardson(&self, on: bool) -> Self {
        FormField {
            richardson: on,
            ..self.clone()
        }
    }

    /// How far the differentiation stencil reaches from the base point.
    pub fn reach(&self) -> f64 {
        if self.richardson {
            2.0 * self.domain.h
        } else {
            self.domain.h
        }
    }

    /// Central-difference exterior derivative at `p`.
    pub fn d_numeric(&self, p: &[f64]) -> Result<Multiform<C>> {
        self.domain.check(p, self.reach())?;
        let h = self.domain.h;
        let dh = self.central(p, h);
        if !self.richardson {
            return Ok(dh);
        }
        let d2h = self.central(p, 2.0 * h);
        Ok(dh.scale(4.0 / 3.0).add_scaled(&d2h, -1.0 / 3.0))
    }

    fn central(&self, p: &[f64], h: f64) -> Multiform<C> {
        let mut q = p.to_vec();
        let mut out = Multiform::zero(self.dim());
        for i in 0..self.dim() {
            q[i] = p[i] + h;
            let plus = self.evaluate(&q);
            q[i] = p[i] - h;
            let minus = self.evaluate(&q);
            q[i] = p[i];
            let diff = plus.add_scaled(&minus, -1.0).left_basis_wedge(i);
            out = out.add_scaled(&diff, 0.5 / h);
        }
        out
    }

    /// The field `p ↦ d_numeric(p)`, valid on a chart shrunk by the
    /// stencil reach. Evaluating it outside that chart panics; use
    /// [`FormField::d_numeric`] on it for checked access.
    pub fn exterior_derivative(&self) -> FormField<C> {
        let inner = self.clone();
        let domain = self.domain.shrunk(self.reach());
        FormField {
            domain,
            eval: Arc::new(move |p| inner.d_numeric(p).expect("point inside the shrunk chart")),
            richardson: self.richardson,
        }
    }

    /// Pointwise transform, keeping domain and differentiation settings.
    pub fn map<D, F>(&self, f: F) -> FormField<D>
    where
        D: Coefficient,
        F: Fn(&[f64], Multiform<C>) -> Multiform<D> + Send + Sync + 'static,
    {
        let inner = self.clone();
        FormField {
            domain: self.domain.clone(),
            eval: Arc::new(move |p| f(p, inner.evaluate(p))),
            richardson: self.richardson,
        }
    }

    /// `i_X` of the field for a vector field `X`.
    pub fn interior<X>(&self, x: X) -> FormField<C>
    where
        X: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        self.map(move |p, form| form.interior(&x(p)).expect("vector field has the chart dimension"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{Blade, Form};

    #[test]
    fn chart_validation() {
        assert!(ChartDomain::cube(3, 1.0, 0.0, 1e-3).is_err());
        assert!(ChartDomain::cube(3, 0.0, 1.0, 0.0).is_err());
        assert!(ChartDomain::punctured(3, 0.0, 1.0, 1e-3).is_err());
        assert!(ChartDomain::sphere(3, 1.5, 1e-3).is_err());
        assert!(ChartDomain::torus(vec![1.0, -1.0], 1e-3).is_err());
    }

    #[test]
    fn admits_respects_shape_and_margin() {
        let b = ChartDomain::cube(2, -1.0, 1.0, 1e-2).unwrap();
        assert!(b.admits(&[0.98, 0.0], 0.01));
        assert!(!b.admits(&[0.995, 0.0], 0.01));
        assert!(!b.shrunk(0.02).admits(&[0.98, 0.0], 0.01));
        let p = ChartDomain::punctured(3, 0.5, 2.0, 1e-2).unwrap();
        assert!(p.admits(&[1.0, 0.0, 0.0], 0.1));
        assert!(!p.admits(&[0.55, 0.0, 0.0], 0.1));
        let s = ChartDomain::sphere(3, 0.1, 1e-2).unwrap();
        assert!(s.admits(&[0.0, 0.0, 1.05], 0.01));
        assert!(!s.admits(&[0.0, 0.0, 1.2], 0.01));
        let t = ChartDomain::torus(vec![1.0; 2], 1e-2).unwrap();
        assert!(t.admits(&[5.0, -3.0], 1.0));
        assert!(!b.admits(&[0.0, 0.0, 0.0], 0.0));
    }

    #[test]
    fn constant_form_is_closed() {
        let dom = ChartDomain::cube(4, -1.0, 1.0, 1e-3).unwrap();
        let f = FormField::constant(dom, Form::from_monomials(4, &[(2.0, &[0, 1]), (1.0, &[2])]));
        assert!(f.d_numeric(&[0.1, 0.2, 0.3, 0.4]).unwrap().is_zero());
    }

    #[test]
    fn linear_field_is_exact() {
        let dom = ChartDomain::cube(2, -1.0, 1.0, 1e-3).unwrap();
        let f = FormField::new(dom, |p: &[f64]| Form::monomial(2, p[0], &[1]));
        let d = f.d_numeric(&[0.3, -0.2]).unwrap();
        assert!((d.get(Blade::from_mask(0b11)) - 1.0).abs() < 1e-12);
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn closed_form_derivative_and_order() {
        // d(ε sin(x²) e^{014}) = ε cos(x²) e^{0124}
        let eps = 0.3;
        let dom = ChartDomain::cube(7, -2.0, 2.0, 1e-4).unwrap();
        let f = FormField::new(dom, move |p: &[f64]| Form::monomial(7, eps * p[2].sin(), &[0, 1, 3]));
        let p = [0.1f64, 0.2, 0.7, -0.3, 0.5, 0.0, 0.2];
        let exact = Form::monomial(7, eps * p[2].cos(), &[0, 1, 2, 3]);
        let err = |h: f64| (&f.with_step(h).d_numeric(&p).unwrap() - &exact).max_abs();
        assert!(err(1e-4) < 1e-9);
        let ratio = err(2e-2) / err(1e-2);
        assert!((3.5..4.5).contains(&ratio), "{ratio}");
        let rich = f.with_step(1e-2).with_richardson(true).d_numeric(&p).unwrap();
        assert!((&rich - &exact).max_abs() < 1e-9);
    }

    #[test]
    fn d_squared_vanishes() {
        let dom = ChartDomain::cube(3, -1.0, 1.0, 1e-3).unwrap();
        let f = FormField::new(dom, |p: &[f64]| {
            Form::from_monomials(
                3,
                &[
                    (p[0] * p[1] * p[2], &[0]),
                    (p[2].powi(3) - p[0], &[1]),
                    (p[1] * p[1], &[2]),
                ],
            )
        });
        let dd = f.exterior_derivative().exterior_derivative();
        assert!(dd.evaluate(&[0.2, 0.1, -0.4]).max_abs() < 1e-8);
    }

    #[test]
    fn stencil_outside_chart_is_rejected() {
        let dom = ChartDomain::cube(2, 0.0, 1.0, 0.1).unwrap();
        let f = FormField::constant(dom, Form::scalar(2, 1.0));
        assert!(matches!(
            f.d_numeric(&[0.05, 0.5]),
            Err(Error::StencilOutsideChart { .. })
        ));
        assert!(f.d_numeric(&[0.15, 0.5]).is_ok());
        assert!(f.with_richardson(true).d_numeric(&[0.15, 0.5]).is_err());
        let df = f.exterior_derivative();
        assert!(df.d_numeric(&[0.15, 0.5]).is_err());
    }

    #[test]
    fn interior_field() {
        let dom = ChartDomain::cube(2, -1.0, 1.0, 1e-3).unwrap();
        let vol = FormField::constant(dom, Form::volume(2));
        let ix = vol.interior(|p: &[f64]| p.to_vec());
        // i_E(dx∧dy) = x dy - y dx, d of it = 2 dx∧dy
        let d = ix.d_numeric(&[0.3, 0.4]).unwrap();
        assert!((d.top_coefficient() - 2.0).abs() < 1e-10);
    }
}
