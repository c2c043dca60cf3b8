use nalgebra::DMatrix;
use rayon::prelude::*;

use super::field::ConformalField;
use crate::exterior::{conformal_hodge, hodge, Blade, Form, MetricFrame};
use crate::fields::{integrate_box, BoxRule, ChartKind, Estimate, Point, ScalarField};
use crate::gauge::{covariant_d, curvature_field, trace_pair, GaugeField, GaugeForm};
use crate::structures::{build_cylinder, GStructureCatalog};
use crate::{Error, Result};

/// Relative residual of `λ(F, e^{2f} g) = e^{(N-4) f} λ(F, g)` for a real
/// 2-form `F` in dimension `N = n + 1`, where `λ = F ∧ ⋆F`.
///
/// The rescaled side is computed twice, once by [`conformal_hodge`] and once
/// from the Gram matrix `e^{2f} g`; the larger of the two residuals is
/// returned.
pub fn weight_check(form: &Form, f: f64, m: &MetricFrame) -> Result<f64> {
    form.expect_grade(2)?;
    let dim = m.dim();
    let lambda = |star: &Form| -> Result<f64> { Ok(form.wedge(star)?.top_coefficient()) };
    let base = lambda(&hodge(form, m)?)?;
    let target = ((dim as f64 - 4.0) * f).exp() * base;
    let by_factor = lambda(&conformal_hodge(form, m, f)?)?;
    let scaled = MetricFrame::with_gram(m.gram() * (2.0 * f).exp())?.with_orientation(m.orientation())?;
    let by_gram = lambda(&hodge(form, &scaled)?)?;
    let scale = target.abs().max(f64::MIN_POSITIVE);
    Ok(((by_factor - target).abs().max((by_gram - target).abs())) / scale)
}

/// `λ = Tr(F_A ∧ ⋆F_A)` for the metric carried by `x`, as a top-form field.
/// `F_A` comes from central differences, so the chart shrinks by one reach.
pub fn energy_density_field(a: &GaugeField, x: &ConformalField) -> ScalarField {
    let x = x.clone();
    curvature_field(a).map(move |p, f| {
        let m = x.metric_at(p).expect("chart metric is positive definite");
        trace_pair(&f, &hodge(&f, &m).expect("curvature is a 2-form")).expect("same dimension")
    })
}

/// Pointwise comparison of the two sides of
/// `L_X λ = (n-3) f λ + 2 Tr(d_A(i_X F_A) ∧ ⋆F_A)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lemma41Report {
    pub h: f64,
    pub points: usize,
    pub max_residual: f64,
    /// `max |L_X λ|`, for scale.
    pub max_lhs: f64,
}

/// Evaluates both sides at every point. `L_X λ = d(i_X λ)` by central
/// differences; `d(i_X F_A)` likewise. `n + 1` is the chart dimension.
pub fn lemma41_check(a: &GaugeField, x: &ConformalField, points: &[Point]) -> Result<Lemma41Report> {
    if a.dim() != x.dim() {
        return Err(Error::DimensionMismatch(a.dim(), x.dim()));
    }
    let weight = a.dim() as f64 - 4.0;
    let curv = curvature_field(a);
    let lambda = energy_density_field(a, x);
    let ix_lambda = lambda.interior(x.vector_fn());
    let ix_f = curv.interior(x.vector_fn());
    let pairs: Vec<(f64, f64)> = points
        .par_iter()
        .map(|p| {
            let lhs = ix_lambda.d_numeric(p)?.top_coefficient();
            let m = x.metric_at(p)?;
            let f = curv.evaluate(p);
            let cov = covariant_d(&a.evaluate(p), &ix_f.evaluate(p), &ix_f.d_numeric(p)?)?;
            let rhs = weight * x.factor(p) * lambda.evaluate(p).top_coefficient()
                + 2.0 * trace_pair(&cov, &hodge(&f, &m)?)?.top_coefficient();
            Ok((lhs, rhs))
        })
        .collect::<Result<_>>()?;
    Ok(Lemma41Report {
        h: a.domain().step(),
        points: points.len(),
        max_residual: pairs.iter().map(|(l, r)| (l - r).abs()).fold(0.0, f64::max),
        max_lhs: pairs.iter().map(|(l, _)| l.abs()).fold(0.0, f64::max),
    })
}

/// `max_p ‖L_X A - i_X F_A - d_A(i_X A)‖`, with `L_X A` from components:
/// `(L_X A)_j = X^k ∂_k A_j + A_k ∂_j X^k`.
pub fn lie_derivative_check(a: &GaugeField, x: &ConformalField, points: &[Point]) -> Result<f64> {
    if a.dim() != x.dim() {
        return Err(Error::DimensionMismatch(a.dim(), x.dim()));
    }
    let dim = a.dim();
    let h = a.domain().step();
    let curv = curvature_field(a);
    let ix_a = a.interior(x.vector_fn());
    let worst = points
        .par_iter()
        .map(|p| {
            a.domain().check(p, 2.0 * h)?;
            let xv = x.vector(p);
            let av = a.evaluate(p);
            // ∂_k A and ∂_j X^k by central differences
            let mut q = p.to_vec();
            let mut lie = GaugeForm::zero(dim);
            let mut dx = DMatrix::zeros(dim, dim);
            for k in 0..dim {
                q[k] = p[k] + h;
                let (ap, xp) = (a.evaluate(&q), x.vector(&q));
                q[k] = p[k] - h;
                let (am, xm) = (a.evaluate(&q), x.vector(&q));
                q[k] = p[k];
                lie = lie.add_scaled(&ap.add_scaled(&am, -1.0), xv[k] / (2.0 * h));
                for i in 0..dim {
                    dx[(i, k)] = (xp[i] - xm[i]) / (2.0 * h);
                }
            }
            for (blade, c) in av.iter() {
                let k = blade.indices().next().expect("1-form blade");
                for j in 0..dim {
                    lie.add_term(Blade::basis(j), c, dx[(k, j)]);
                }
            }
            let ixa = ix_a.evaluate(p);
            let cov = covariant_d(&av, &ixa, &ix_a.d_numeric(p)?)?;
            let ixf = curv.evaluate(p).interior(&xv)?;
            let r = &(&lie - &ixf) - &cov;
            Ok(r.coefficient_norm_sqr().sqrt())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(worst.into_iter().fold(0.0, f64::max))
}

/// Scalar test functions for the integration-by-parts identity.
#[derive(Clone, Debug, PartialEq)]
pub enum TestFunction {
    /// `exp(-|x - c|² / 2σ²)`
    Gaussian {
        center: Vec<f64>,
        sigma: f64,
    },
    Constant(f64),
}

impl TestFunction {
    pub fn value(&self, p: &[f64]) -> f64 {
        match self {
            TestFunction::Gaussian { center, sigma } => {
                let r2: f64 = p.iter().zip(center).map(|(x, c)| (x - c) * (x - c)).sum();
                (-r2 / (2.0 * sigma * sigma)).exp()
            }
            TestFunction::Constant(c) => *c,
        }
    }

    /// `dη` as a 1-form.
    pub fn differential(&self, p: &[f64]) -> Form {
        let mut out = Form::zero(p.len());
        if let TestFunction::Gaussian { center, sigma } = self {
            let v = self.value(p);
            for (i, (x, c)) in p.iter().zip(center).enumerate() {
                out.add_term(Blade::basis(i), &(-(x - c) / (sigma * sigma) * v), 1.0);
            }
        }
        out
    }

    /// Largest value on the boundary of the box `[lo, hi]`.
    pub fn boundary_value(&self, lo: &[f64], hi: &[f64]) -> f64 {
        match self {
            TestFunction::Gaussian { center, sigma } => {
                let inside = center.iter().zip(lo.iter().zip(hi)).all(|(c, (a, b))| c > a && c < b);
                if !inside {
                    return 1.0;
                }
                let d = center
                    .iter()
                    .zip(lo.iter().zip(hi))
                    .map(|(c, (a, b))| (c - a).min(b - c))
                    .fold(f64::INFINITY, f64::min);
                (-d * d / (2.0 * sigma * sigma)).exp()
            }
            TestFunction::Constant(c) => c.abs(),
        }
    }
}

/// Both sides of `∫ η L_X λ = -∫ dη ∧ i_X λ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IbpReport {
    pub h: f64,
    pub nodes: usize,
    pub lhs: Estimate,
    pub rhs: Estimate,
    pub residual: f64,
    /// `|L_h - L_{2h}| / 3` for the left side.
    pub fd_error: f64,
    /// Quadrature error bars of both sides and `fd_error`, in quadrature.
    pub error_bar: f64,
}

impl IbpReport {
    pub fn agrees(&self, k: f64) -> bool {
        self.residual <= k * self.error_bar
    }
}

/// Largest boundary value of `η` tolerated on a box chart.
const LEAKAGE_TOL: f64 = 1e-12;

/// Nodes where `|η|` falls below this are skipped; their contribution is
/// far under the quadrature error bars.
const NEGLIGIBLE: f64 = 1e-20;

/// Integrates both sides of the identity over the chart of `lambda` with
/// `nodes` points per axis: the closed trapezoid rule on a box (shrunk so
/// that every stencil fits; `nodes` odd) or the periodic rule on a torus
/// (`nodes` even). Rejects test functions that do not vanish on the
/// boundary of a box.
pub fn ibp_check(lambda: &ScalarField, x: &ConformalField, eta: &TestFunction, nodes: usize) -> Result<IbpReport> {
    let dim = lambda.dim();
    if x.dim() != dim {
        return Err(Error::DimensionMismatch(x.dim(), dim));
    }
    let domain = lambda.domain();
    let (lo, hi, rule) = match domain.kind() {
        ChartKind::Box { lo, hi } => {
            if nodes % 2 == 0 {
                return Err(Error::InvalidArgument("box rule needs an odd node count".into()));
            }
            let room = (2.0 * lambda.reach() + domain.margin()) * (1.0 + 1e-9);
            let lo: Vec<f64> = lo.iter().map(|a| a + room).collect();
            let hi: Vec<f64> = hi.iter().map(|b| b - room).collect();
            let leak = eta.boundary_value(&lo, &hi);
            if leak > LEAKAGE_TOL {
                return Err(Error::InvalidArgument(format!(
                    "test function reaches {leak:e} on the chart boundary"
                )));
            }
            (lo, hi, BoxRule::Trapezoid)
        }
        ChartKind::Torus { periods } => {
            if nodes % 2 == 1 {
                return Err(Error::InvalidArgument("periodic rule needs an even node count".into()));
            }
            (vec![0.0; dim], periods.clone(), BoxRule::Periodic)
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "integration by parts needs a box or torus chart, got {other:?}"
            )))
        }
    };
    let h = domain.step();
    let ix = lambda.interior(x.vector_fn());
    let ix_coarse = ix.with_step(2.0 * h);
    let lhs_with = |field: &ScalarField| {
        integrate_box(&lo, &hi, nodes, rule, |p| {
            let v = eta.value(p);
            if v.abs() < NEGLIGIBLE {
                return Ok(0.0);
            }
            Ok(v * field.d_numeric(p)?.top_coefficient())
        })
    };
    let lhs = lhs_with(&ix)?;
    let lhs_coarse = lhs_with(&ix_coarse)?;
    let rhs = integrate_box(&lo, &hi, nodes, rule, |p| {
        if eta.value(p).abs() < NEGLIGIBLE {
            return Ok(0.0);
        }
        let de = eta.differential(p);
        if de.is_zero() {
            return Ok(0.0);
        }
        Ok(-de.wedge(&ix.evaluate(p))?.top_coefficient())
    })?;
    let fd_error = (lhs.value - lhs_coarse.value).abs() / 3.0;
    Ok(IbpReport {
        h,
        nodes,
        lhs,
        rhs,
        residual: (lhs.value - rhs.value).abs(),
        fd_error,
        error_bar: (lhs.stderr.powi(2) + rhs.stderr.powi(2) + fd_error.powi(2)).sqrt(),
    })
}

/// Both sides of `⋆̄F + ⋆̄Q_Z̄ ∧ F = e^{(n-3)t}(⋆F + ⋆Q_Z ∧ F)` at cone
/// coordinate `t`, with `Q_Z̄ = e^{4t}(dt ∧ P + Q)` and `⋆̄` the Hodge star
/// of `e^{2t}(dt² + g_M)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeEquivalence {
    pub cone: Form,
    pub cylinder: Form,
    /// `max |cone - e^{(n-3)t} cylinder|` divided by `e^{(n-3)t} max |F|`.
    pub residual: f64,
}

pub fn cone_equivalence_check(form: &Form, t: f64, cat: &GStructureCatalog) -> Result<ConeEquivalence> {
    let cyl = build_cylinder(cat);
    form.expect_grade(2)?;
    if form.dim() != cat.n + 1 {
        return Err(Error::DimensionMismatch(form.dim(), cat.n + 1));
    }
    let dim = cat.n + 1;
    let cone_metric =
        MetricFrame::with_gram(DMatrix::identity(dim, dim) * (2.0 * t).exp())?.with_orientation(cat.orientation)?;
    let q_bar = cyl.q_z.scale((4.0 * t).exp());
    let cone = &hodge(form, &cone_metric)? + &hodge(&q_bar, &cone_metric)?.wedge(form)?;
    let cylinder = &hodge(form, &cyl.metric)? + &cyl.psi_z.wedge(form)?;
    let w = ((cat.n as f64 - 3.0) * t).exp();
    let scale = w * form.max_abs();
    let residual = if scale > 0.0 {
        cone.add_scaled(&cylinder, -w).max_abs() / scale
    } else {
        0.0
    };
    Ok(ConeEquivalence {
        cone,
        cylinder,
        residual,
    })
}
