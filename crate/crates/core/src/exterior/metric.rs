use nalgebra::DMatrix;

use super::blade::{wedge_sign, Blade};
use super::form::{Coefficient, Multiform};
use crate::{Error, Result};

/// An inner product on an `N`-dimensional space together with an orientation
/// and an optional conformal exponent `f`, standing for the metric
/// `e^{2f} g`.
///
/// Forms are expressed in the coordinate coframe `dx^i`; `gram[(i, j)]` is
/// `g(∂_i, ∂_j)`. Everything metric-dependent goes through an orthonormal
/// coframe obtained from the Cholesky factor of `gram`.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricFrame {
    dim: usize,
    gram: Option<Orthonormalizer>,
    orientation: f64,
    conformal: f64,
}

#[derive(Clone, Debug, PartialEq)]
struct Orthonormalizer {
    gram: DMatrix<f64>,
    /// `dx^i = Σ_a to_orthonormal[(i, a)] θ^a`
    to_orthonormal: DMatrix<f64>,
    /// `θ^a = Σ_i from_orthonormal[(a, i)] dx^i`
    from_orthonormal: DMatrix<f64>,
}

impl MetricFrame {
    pub fn identity(dim: usize) -> Self {
        MetricFrame {
            dim,
            gram: None,
            orientation: 1.0,
            conformal: 0.0,
        }
    }

    /// Metric with the given Gram matrix; rejects matrices that are not
    /// symmetric positive definite.
    pub fn with_gram(gram: DMatrix<f64>) -> Result<Self> {
        let dim = gram.nrows();
        if gram.ncols() != dim {
            return Err(Error::DimensionMismatch(gram.nrows(), gram.ncols()));
        }
        let scale = gram.amax().max(1.0);
        if (&gram - gram.transpose()).amax() > 1e-12 * scale {
            return Err(Error::NotPositiveDefinite);
        }
        let chol = gram.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
        // gram = L Lᵀ, so θ = Lᵀ dx is orthonormal.
        let lt = chol.l().transpose();
        let lt_inv = lt.clone().try_inverse().ok_or(Error::NotPositiveDefinite)?;
        Ok(MetricFrame {
            dim,
            gram: Some(Orthonormalizer {
                gram,
                to_orthonormal: lt_inv,
                from_orthonormal: lt,
            }),
            orientation: 1.0,
            conformal: 0.0,
        })
    }

    /// `orientation` must be ±1.
    pub fn with_orientation(mut self, orientation: i32) -> Result<Self> {
        if orientation != 1 && orientation != -1 {
            return Err(Error::InvalidArgument(format!(
                "orientation must be ±1, got {orientation}"
            )));
        }
        self.orientation = orientation as f64;
        Ok(self)
    }

    /// Rescales the metric to `e^{2f} g`.
    pub fn with_conformal_factor(mut self, f: f64) -> Self {
        self.conformal = f;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn orientation(&self) -> i32 {
        self.orientation as i32
    }

    pub fn conformal_factor(&self) -> f64 {
        self.conformal
    }

    pub fn gram(&self) -> DMatrix<f64> {
        let g = match &self.gram {
            Some(o) => o.gram.clone(),
            None => DMatrix::identity(self.dim, self.dim),
        };
        g * (2.0 * self.conformal).exp()
    }

    /// Same metric without the conformal factor.
    pub fn without_conformal(&self) -> Self {
        MetricFrame {
            conformal: 0.0,
            ..self.clone()
        }
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if d != self.dim {
            return Err(Error::DimensionMismatch(d, self.dim));
        }
        Ok(())
    }

    /// Expresses a form in the orthonormal coframe of the underlying metric
    /// (ignoring the conformal factor).
    pub fn to_orthonormal<C: Coefficient>(&self, a: &Multiform<C>) -> Result<Multiform<C>> {
        self.check_dim(a.dim())?;
        match &self.gram {
            Some(o) => a.change_basis(&o.to_orthonormal),
            None => Ok(a.clone()),
        }
    }

    pub fn from_orthonormal<C: Coefficient>(&self, a: &Multiform<C>) -> Result<Multiform<C>> {
        self.check_dim(a.dim())?;
        match &self.gram {
            Some(o) => a.change_basis(&o.from_orthonormal),
            None => Ok(a.clone()),
        }
    }
}

/// Hodge star with respect to `m`. The input must be homogeneous.
///
/// In an oriented orthonormal coframe `⋆e^I = ± e^{Iᶜ}` with the sign fixed
/// by `e^I ∧ ⋆e^I = vol`. A conformal factor `e^{2f}` contributes
/// `e^{(N-2k)f}` on grade `k`.
pub fn hodge<C: Coefficient>(a: &Multiform<C>, m: &MetricFrame) -> Result<Multiform<C>> {
    m.check_dim(a.dim())?;
    let k = match a.homogeneous_grade()? {
        Some(k) => k,
        None => return Ok(Multiform::zero(a.dim())),
    };
    let flat = hodge_orthonormal(&m.to_orthonormal(a)?, m.orientation);
    let out = m.from_orthonormal(&flat)?;
    Ok(out.scale(conformal_weight(m.dim, k, m.conformal)))
}

/// Hodge star applied grade by grade, for mixed-grade input.
pub fn hodge_graded<C: Coefficient>(a: &Multiform<C>, m: &MetricFrame) -> Result<Multiform<C>> {
    let mut out = Multiform::zero(a.dim());
    for k in a.grades() {
        out = &out + &hodge(&a.grade_part(k), m)?;
    }
    Ok(out)
}

/// `⋆_{e^{2f} g} a = e^{(N-2k) f} ⋆_g a` for `a` of grade `k`.
pub fn conformal_hodge<C: Coefficient>(a: &Multiform<C>, m: &MetricFrame, f: f64) -> Result<Multiform<C>> {
    let base = hodge(a, &m.without_conformal())?;
    let k = match a.homogeneous_grade()? {
        Some(k) => k,
        None => return Ok(base),
    };
    Ok(base.scale(conformal_weight(m.dim, k, f + m.conformal)))
}

fn conformal_weight(dim: usize, k: usize, f: f64) -> f64 {
    if f == 0.0 {
        1.0
    } else {
        ((dim as f64 - 2.0 * k as f64) * f).exp()
    }
}

fn hodge_orthonormal<C: Coefficient>(a: &Multiform<C>, orientation: f64) -> Multiform<C> {
    let dim = a.dim();
    let mut out = Multiform::zero(dim);
    for (b, c) in a.iter() {
        let comp = b.complement(dim);
        let s = wedge_sign(b, comp) as f64 * orientation;
        out.add_term(comp, c, s);
    }
    out
}

/// Pointwise inner product `⟨a, b⟩` of real forms (zero across different
/// grades). Satisfies `a ∧ ⋆b = ⟨a, b⟩ vol`.
pub fn inner(a: &Multiform<f64>, b: &Multiform<f64>, m: &MetricFrame) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let oa = m.to_orthonormal(a)?;
    let ob = m.to_orthonormal(b)?;
    let mut sum = 0.0;
    for (blade, ca) in oa.iter() {
        if let Some(cb) = ob.coefficient(blade) {
            sum += ca * cb * conformal_weight(0, blade.grade(), m.conformal);
        }
    }
    Ok(sum)
}

/// `⟨a, a⟩`; for matrix-valued forms the Frobenius size of every
/// coefficient is summed.
pub fn norm_sqr<C: Coefficient>(a: &Multiform<C>, m: &MetricFrame) -> Result<f64> {
    let oa = m.to_orthonormal(a)?;
    Ok(oa
        .iter()
        .map(|(b, c)| c.norm_sqr() * conformal_weight(0, b.grade(), m.conformal))
        .sum())
}

/// Metric volume form `√det(g) e^{1…N}` including orientation and the
/// conformal factor.
pub fn volume_form(m: &MetricFrame) -> Multiform<f64> {
    let dim = m.dim;
    let det = match &m.gram {
        Some(o) => o.gram.determinant().sqrt(),
        None => 1.0,
    };
    let top = Blade::from_mask(super::blade::full_mask(dim));
    Multiform::term(dim, top, det * m.orientation * (dim as f64 * m.conformal).exp())
}
