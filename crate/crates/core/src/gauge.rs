//! Lie-algebra valued forms for matrix structure groups.
//!
//! Coefficients are complex `d × d` matrices. The trace is taken in the
//! defining (fundamental) representation and the pointwise norm is
//! `|F|² = -Tr(F ∧ ⋆F) / vol`, which is nonnegative for anti-Hermitian
//! coefficients.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::exterior::{hodge, wedge_sign, Algebra, Blade, Coefficient, Form, MetricFrame, Multiform};
use crate::fields::{FormField, Point};
use crate::{Error, Result};

/// A complex square matrix, normally anti-Hermitian.
#[derive(Clone, PartialEq)]
pub struct LieElement(DMatrix<Complex64>);

/// Matrix-valued form.
pub type GaugeForm = Multiform<LieElement>;

/// Matrix-valued form field (a connection, a curvature, ...).
pub type GaugeField = FormField<LieElement>;

impl LieElement {
    pub fn new(m: DMatrix<Complex64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "Lie algebra elements are square");
        LieElement(m)
    }

    /// Checked constructor for gauge-algebra elements.
    pub fn anti_hermitian(m: DMatrix<Complex64>) -> Result<Self> {
        let x = LieElement::new(m);
        if !x.is_anti_hermitian(1e-12) {
            return Err(Error::InvalidArgument("matrix is not anti-Hermitian".into()));
        }
        Ok(x)
    }

    pub fn zeros(d: usize) -> Self {
        LieElement(DMatrix::zeros(d, d))
    }

    pub fn identity(d: usize) -> Self {
        LieElement(DMatrix::identity(d, d))
    }

    /// `Σ c_a T_a`
    pub fn combination(coeffs: &[f64], basis: &[LieElement]) -> Self {
        let mut out = LieElement::zeros(basis[0].size());
        for (c, t) in coeffs.iter().zip(basis) {
            out.add_scaled(t, *c);
        }
        out
    }

    pub fn size(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn is_anti_hermitian(&self, tol: f64) -> bool {
        (&self.0 + self.0.adjoint()).iter().all(|z| z.norm() <= tol)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        LieElement(&self.0 * &other.0 - &other.0 * &self.0)
    }

    pub fn adjoint(&self) -> Self {
        LieElement(self.0.adjoint())
    }

    pub fn inverse(&self) -> Option<Self> {
        self.0.clone().try_inverse().map(LieElement)
    }
}

impl fmt::Debug for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

impl Coefficient for LieElement {
    fn is_zero(&self) -> bool {
        self.0.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    fn add_scaled(&mut self, other: &Self, s: f64) {
        if self.size() == 0 {
            self.0 = other.0.map(|z| z * s);
        } else {
            self.0.zip_apply(&other.0, |a, b| *a += b * s);
        }
    }

    fn scaled(&self, s: f64) -> Self {
        LieElement(self.0.map(|z| z * s))
    }

    fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }
}

impl Algebra for LieElement {
    fn product(&self, other: &Self) -> Self {
        LieElement(&self.0 * &other.0)
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.size() != other.size() {
            return Err(Error::MatrixSizeMismatch(self.size(), other.size()));
        }
        Ok(())
    }
}

/// The `u(1)` generator `i`.
pub fn u1_generator() -> LieElement {
    LieElement(DMatrix::from_element(1, 1, Complex64::i()))
}

/// `τ_a = -(i/2) σ_a`, with `[τ_a, τ_b] = ε_abc τ_c`.
pub fn su2_generators() -> [LieElement; 3] {
    let z = Complex64::new(0.0, 0.0);
    let h = Complex64::new(0.0, -0.5);
    let r = Complex64::new(0.5, 0.0);
    [
        LieElement(DMatrix::from_row_slice(2, 2, &[z, h, h, z])),
        LieElement(DMatrix::from_row_slice(2, 2, &[z, -r, r, z])),
        LieElement(DMatrix::from_row_slice(2, 2, &[h, z, z, -h])),
    ]
}

/// `a ∧ b` with matrix products of the coefficients.
pub fn gwedge(a: &GaugeForm, b: &GaugeForm) -> Result<GaugeForm> {
    a.wedge(b)
}

/// `Tr(a ∧ b)` as a real form. For anti-Hermitian inputs the traces that
/// arise here are real; the imaginary part is dropped.
pub fn trace_pair(a: &GaugeForm, b: &GaugeForm) -> Result<Form> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let mut out = Form::zero(a.dim());
    for (ba, ca) in a.iter() {
        for (bb, cb) in b.iter() {
            let s = wedge_sign(ba, bb);
            if s != 0 {
                ca.compatible(cb)?;
                out.add_term(
                    Blade::from_mask(ba.mask() | bb.mask()),
                    &trace_product(ca, cb),
                    s as f64,
                );
            }
        }
    }
    Ok(out)
}

/// `Re Tr(a b)` without forming the product.
fn trace_product(a: &LieElement, b: &LieElement) -> f64 {
    let (x, y) = (a.matrix(), b.matrix());
    let d = x.nrows();
    let mut t = 0.0;
    for i in 0..d {
        for j in 0..d {
            t += (x[(i, j)] * y[(j, i)]).re;
        }
    }
    t
}

/// Coefficient-wise real trace.
pub fn trace(a: &GaugeForm) -> Form {
    a.map_coefficients(|_, c| c.trace().re)
}

/// `F = dA + A ∧ A` given `A` and its exterior derivative.
pub fn curvature(a: &GaugeForm, da: &GaugeForm) -> Result<GaugeForm> {
    a.expect_grade(1)?;
    da.expect_grade(2)?;
    Ok(da + &a.wedge(a)?)
}

/// `d_A β = dβ + A ∧ β - (-1)^{deg β} β ∧ A`.
pub fn covariant_d(a: &GaugeForm, beta: &GaugeForm, dbeta: &GaugeForm) -> Result<GaugeForm> {
    a.expect_grade(1)?;
    let k = beta.homogeneous_grade()?.unwrap_or(0);
    let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
    Ok(&(dbeta + &a.wedge(beta)?) + &beta.wedge(a)?.scale(sign))
}

/// `|F|² = -Tr(F ∧ ⋆F) / vol` in the metric `m`.
pub fn energy_density(f: &GaugeForm, m: &MetricFrame) -> Result<f64> {
    let lambda = trace_pair(f, &hodge(f, m)?)?;
    let vol = crate::exterior::volume_form(m).top_coefficient();
    Ok(-lambda.top_coefficient() / vol)
}

/// Constant gauge rotation `g X g⁻¹` of every coefficient.
pub fn conjugate(f: &GaugeForm, g: &LieElement) -> Result<GaugeForm> {
    let ginv = g
        .inverse()
        .ok_or_else(|| Error::InvalidArgument("gauge transformation is singular".into()))?;
    Ok(f.map_coefficients(|_, c| g.product(c).product(&ginv)))
}

/// Curvature field `F_A = dA + A ∧ A` with `dA` by central differences.
/// The domain shrinks by one stencil reach.
pub fn curvature_field(a: &GaugeField) -> GaugeField {
    let da = a.exterior_derivative();
    let a2 = a.clone();
    da.map(move |p, d| {
        let av = a2.evaluate(p);
        &d + &av.wedge(&av).expect("connection coefficients share one size")
    })
}

/// `max_p ‖d_A F_A‖` over the sample points, with every derivative by
/// central differences. Rejects points whose nested stencil leaves the chart.
pub fn bianchi_residual(a: &GaugeField, points: &[Point]) -> Result<f64> {
    let f = curvature_field(a);
    let mut worst = 0.0f64;
    for p in points {
        let df = f.d_numeric(p)?;
        let av = a.evaluate(p);
        let fv = f.evaluate(p);
        let r = covariant_d(&av, &fv, &df)?;
        worst = worst.max(r.coefficient_norm_sqr().sqrt());
    }
    Ok(worst)
}

/// Pure-gauge connection `g⁻¹ dg` for a group-valued map, with `dg` by
/// central differences of step `h`.
pub fn pure_gauge<G>(domain: crate::fields::ChartDomain, h: f64, g: G) -> GaugeField
where
    G: Fn(&[f64]) -> LieElement + Send + Sync + 'static,
{
    let dim = domain.dim();
    FormField::new(domain, move |p: &[f64]| {
        let gi = g(p).inverse().expect("group element is invertible");
        let mut out = GaugeForm::zero(dim);
        let mut q = p.to_vec();
        for i in 0..dim {
            q[i] = p[i] + h;
            let plus = g(&q);
            q[i] = p[i] - h;
            let minus = g(&q);
            q[i] = p[i];
            let mut dg = plus;
            dg.add_scaled(&minus, -1.0);
            out.add_term(Blade::basis(i), &gi.product(&dg), 0.5 / h);
        }
        out
    })
}

/// `exp(Σ v_a T_a)` for `su(2)` in the `τ` basis:
/// `cos(|v|/2) I - i sin(|v|/2) v̂·σ`.
pub fn su2_exp(v: [f64; 3]) -> LieElement {
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let c = (0.5 * norm).cos();
    let s = if norm > 0.0 { (0.5 * norm).sin() / norm } else { 0.0 };
    let (x, y, z) = (s * v[0], s * v[1], s * v[2]);
    LieElement(DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(c, -z),
            Complex64::new(-y, -x),
            Complex64::new(y, -x),
            Complex64::new(c, z),
        ],
    ))
}
