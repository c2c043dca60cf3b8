//! The instanton condition `⋆F + ⋆Q ∧ F = 0` as an eigenproblem.
//!
//! Applying `⋆` (which squares to `+1` on 2-forms in dimensions 7 and 8)
//! turns the condition into `B(F) = -F` for the symmetric operator
//! `B(F) = ⋆(⋆Q ∧ F)` on `Λ²`. The instanton subspace is the `-1`
//! eigenspace.

use nalgebra::{DMatrix, DVector};

use crate::exterior::{hodge, norm_sqr, Blade, Form, MetricFrame};
use crate::fields::{Point, ScalarField};
use crate::gauge::{bianchi_residual, covariant_d, curvature_field, GaugeField};
use crate::linalg::symmetric_eigen;
use crate::structures::{build_cylinder, GStructureCatalog};
use crate::{Error, Result};

/// `B(F) = ⋆(⋆Q ∧ F)` as a matrix in an orthonormal basis of `Λ²`.
#[derive(Clone, Debug)]
pub struct CurvatureOperator {
    pub dim: usize,
    /// `⋆Q`
    pub psi: Form,
    pub matrix: DMatrix<f64>,
    metric: MetricFrame,
    basis: Vec<Blade>,
}

/// `⋆⋆` on `k`-forms in dimension `dim` for a Riemannian metric.
pub fn star_squared_sign(dim: usize, k: usize) -> f64 {
    if (k * (dim - k)) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn build_operator(q4: &Form, m: &MetricFrame) -> Result<CurvatureOperator> {
    let dim = q4.dim();
    if dim < 5 {
        return Err(Error::InvalidArgument(format!(
            "instanton operator needs dimension ≥ 5, got {dim}"
        )));
    }
    q4.expect_grade(4)?;
    let psi = hodge(q4, m)?;
    // In the orthonormal coframe the conformal factor contributes e^{-4f}.
    let flat = MetricFrame::identity(dim).with_orientation(m.orientation())?;
    let psi_on = m.to_orthonormal(q4).and_then(|q| hodge(&q, &flat))?;
    let scale = (-4.0 * m.conformal_factor()).exp();
    let basis = Blade::all_of_grade(dim, 2);
    let index = |b: Blade| basis.iter().position(|x| *x == b).expect("2-blade");
    let mut matrix = DMatrix::zeros(basis.len(), basis.len());
    for (j, b) in basis.iter().enumerate() {
        let f = Form::term(dim, *b, 1.0);
        let image = hodge(&psi_on.wedge(&f)?, &flat)?;
        for (blade, c) in image.iter() {
            matrix[(index(blade), j)] = c * scale;
        }
    }
    Ok(CurvatureOperator {
        dim,
        psi,
        matrix,
        metric: m.clone(),
        basis,
    })
}

/// One eigenvalue cluster.
#[derive(Clone, Debug)]
pub struct Eigenspace {
    pub eigenvalue: f64,
    pub multiplicity: usize,
    /// Orthonormal columns in the blade basis of the operator.
    pub vectors: DMatrix<f64>,
}

#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Ascending by eigenvalue.
    pub eigenspaces: Vec<Eigenspace>,
    /// `max ‖Bv - λv‖` over all eigenpairs.
    pub max_residual: f64,
}

impl Spectrum {
    pub fn multiplicities(&self) -> Vec<(f64, usize)> {
        self.eigenspaces
            .iter()
            .map(|e| (e.eigenvalue, e.multiplicity))
            .collect()
    }

    /// `Σ λ_i m_i`
    pub fn trace(&self) -> f64 {
        self.eigenspaces
            .iter()
            .map(|e| e.eigenvalue * e.multiplicity as f64)
            .sum()
    }
}

impl CurvatureOperator {
    /// Coordinates of a 2-form in the operator's orthonormal basis.
    pub fn coordinates(&self, f: &Form) -> Result<DVector<f64>> {
        f.expect_grade(2)?;
        let on = self.metric.to_orthonormal(f)?;
        // the orthonormal coframe of e^{2f} g is e^f θ
        let s = (-2.0 * self.metric.conformal_factor()).exp();
        Ok(DVector::from_iterator(
            self.basis.len(),
            self.basis.iter().map(|b| on.get(*b) * s),
        ))
    }

    pub fn form(&self, v: &DVector<f64>) -> Result<Form> {
        let mut on = Form::zero(self.dim);
        for (b, c) in self.basis.iter().zip(v.iter()) {
            on.add_term(*b, c, 1.0);
        }
        let s = (2.0 * self.metric.conformal_factor()).exp();
        Ok(self.metric.from_orthonormal(&on)?.scale(s))
    }

    pub fn apply(&self, f: &Form) -> Result<Form> {
        self.form(&(&self.matrix * self.coordinates(f)?))
    }

    /// Eigenvalues grouped where consecutive values differ by less than
    /// `1e-6`.
    pub fn spectrum(&self) -> Spectrum {
        let eig = symmetric_eigen(&self.matrix);
        let n = eig.eigenvalues.len();
        let mut spaces: Vec<Eigenspace> = Vec::new();
        let mut start = 0;
        for i in 1..=n {
            if i == n || eig.eigenvalues[i] - eig.eigenvalues[i - 1] > 1e-6 {
                let cols = eig.eigenvectors.columns(start, i - start).into_owned();
                let mean = eig.eigenvalues.rows(start, i - start).mean();
                spaces.push(Eigenspace {
                    eigenvalue: mean,
                    multiplicity: i - start,
                    vectors: cols,
                });
                start = i;
            }
        }
        let max_residual = (0..n)
            .map(|i| {
                let v = eig.eigenvectors.column(i);
                (&self.matrix * v - v * eig.eigenvalues[i]).norm()
            })
            .fold(0.0, f64::max);
        Spectrum {
            eigenspaces: spaces,
            max_residual,
        }
    }

    /// Orthogonal projector onto the eigenspace closest to `-1`.
    pub fn instanton_projector(&self) -> Result<DMatrix<f64>> {
        let spec = self.spectrum();
        let best = spec
            .eigenspaces
            .iter()
            .min_by(|a, b| (a.eigenvalue + 1.0).abs().total_cmp(&(b.eigenvalue + 1.0).abs()))
            .ok_or(Error::NoInstantonSubspace {
                closest: f64::NAN,
                tolerance: 1e-6,
            })?;
        if (best.eigenvalue + 1.0).abs() > 1e-6 {
            return Err(Error::NoInstantonSubspace {
                closest: best.eigenvalue,
                tolerance: 1e-6,
            });
        }
        Ok(&best.vectors * best.vectors.transpose())
    }

    /// Orthogonal projection of a 2-form onto the instanton subspace.
    pub fn project_instanton(&self, f: &Form) -> Result<Form> {
        let p = self.instanton_projector()?;
        self.form(&(p * self.coordinates(f)?))
    }

    /// `‖⋆F + ⋆Q ∧ F‖`
    pub fn instanton_residual(&self, f: &Form) -> Result<f64> {
        let r = &hodge(f, &self.metric)? + &self.psi.wedge(f)?;
        Ok(norm_sqr(&r, &self.metric)?.sqrt())
    }
}

/// Residuals of the cylinder split.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitResidual {
    /// `‖⋆_M Ȧ + ⋆_M P ∧ F_M‖`
    pub r1: f64,
    /// `‖⋆_M F_M + Ȧ ∧ ⋆_M P + ⋆_M Q ∧ F_M‖`
    pub r2: f64,
    /// `‖⋆F + ⋆Q_Z ∧ F‖` on the cylinder for `F = F_M + dt ∧ Ȧ`
    pub total: f64,
}

/// `F = F_M + dt ∧ Ȧ` on `ℝ × M`.
pub fn cylinder_curvature(f_m: &Form, a_dot: &Form) -> Form {
    &f_m.shifted(1) + &a_dot.shifted(1).left_basis_wedge(0)
}

/// Inverse of [`cylinder_curvature`].
pub fn split_cylinder_form(f: &Form) -> Result<(Form, Form)> {
    let dim = f.dim();
    let mut e0 = vec![0.0; dim];
    e0[0] = 1.0;
    let a_dot = f.interior(&e0)?;
    let mut f_m = Form::zero(dim - 1);
    let mut ad = Form::zero(dim - 1);
    for (b, c) in f.iter() {
        if !b.contains(0) {
            f_m.add_term(Blade::from_mask(b.mask() >> 1), c, 1.0);
        }
    }
    for (b, c) in a_dot.iter() {
        ad.add_term(Blade::from_mask(b.mask() >> 1), c, 1.0);
    }
    Ok((f_m, ad))
}

pub fn cylinder_split_residual(f_m: &Form, a_dot: &Form, cat: &GStructureCatalog) -> Result<SplitResidual> {
    let n = cat.n;
    if f_m.dim() != n {
        return Err(Error::DimensionMismatch(f_m.dim(), n));
    }
    if a_dot.dim() != n {
        return Err(Error::DimensionMismatch(a_dot.dim(), n));
    }
    f_m.expect_grade(2)?;
    a_dot.expect_grade(1)?;
    let m = cat.metric();
    let star_p = hodge(&cat.p, &m)?;
    let star_q = hodge(&cat.structure_q(), &m)?;
    let e1 = &hodge(a_dot, &m)? + &star_p.wedge(f_m)?;
    let e2 = &(&hodge(f_m, &m)? + &a_dot.wedge(&star_p)?) + &star_q.wedge(f_m)?;
    let cyl = build_cylinder(cat);
    let mz = cyl.metric.clone();
    let f = cylinder_curvature(f_m, a_dot);
    let et = &hodge(&f, &mz)? + &cyl.psi_z.wedge(&f)?;
    Ok(SplitResidual {
        r1: norm_sqr(&e1, &m)?.sqrt(),
        r2: norm_sqr(&e2, &m)?.sqrt(),
        total: norm_sqr(&et, &mz)?.sqrt(),
    })
}

/// The ingredients of "instanton ⇒ Yang–Mills".
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct YmReport {
    /// `max ‖d_A F_A‖`
    pub bianchi: f64,
    /// `max ‖d_A(⋆Q ∧ F) - d(⋆Q) ∧ F - (-1)^{deg ⋆Q} ⋆Q ∧ d_A F‖`
    pub leibniz: f64,
    /// `max ‖d(⋆Q)‖`
    pub d_star_q: f64,
}

/// Evaluates [`YmReport`] at the given points, all derivatives by central
/// differences with the step of each field's chart.
pub fn ym_identity_check(a: &GaugeField, star_q: &ScalarField, points: &[Point]) -> Result<YmReport> {
    let f = curvature_field(a);
    let sq = star_q.clone();
    let f2 = f.clone();
    let product = f.map(move |p, fv| sq.evaluate(p).wedge_into(&fv).expect("same dimension"));
    let bianchi = bianchi_residual(a, points)?;
    let mut leibniz = 0.0f64;
    let mut d_star_q = 0.0f64;
    for p in points {
        let av = a.evaluate(p);
        let fv = f2.evaluate(p);
        let psi = star_q.evaluate(p);
        let deg = psi.homogeneous_grade()?.unwrap_or(0);
        let sign = if deg % 2 == 0 { 1.0 } else { -1.0 };
        let dpsi = star_q.d_numeric(p)?;
        let prod = product.evaluate(p);
        let lhs = covariant_d(&av, &prod, &product.d_numeric(p)?)?;
        let daf = covariant_d(&av, &fv, &f2.d_numeric(p)?)?;
        let rhs = dpsi.wedge_into(&fv)?.add_scaled(&psi.wedge_into(&daf)?, sign);
        leibniz = leibniz.max((&lhs - &rhs).coefficient_norm_sqr().sqrt());
        d_star_q = d_star_q.max(dpsi.coefficient_norm_sqr().sqrt());
    }
    Ok(YmReport {
        bianchi,
        leibniz,
        d_star_q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{catalog, StructureName};

    #[test]
    fn zero_four_form_gives_zero_operator() {
        let op = build_operator(&Form::zero(7), &MetricFrame::identity(7)).unwrap();
        assert_eq!(op.matrix.amax(), 0.0);
        assert!(matches!(
            op.instanton_projector(),
            Err(Error::NoInstantonSubspace { .. })
        ));
    }

    #[test]
    fn operator_rejects_wrong_grade() {
        let f = Form::monomial(7, 1.0, &[0, 1, 2]);
        assert!(matches!(
            build_operator(&f, &MetricFrame::identity(7)),
            Err(Error::GradeMismatch { .. })
        ));
        assert!(build_operator(&Form::zero(4), &MetricFrame::identity(4)).is_err());
    }

    #[test]
    fn star_squared_on_two_forms() {
        assert_eq!(star_squared_sign(7, 2), 1.0);
        assert_eq!(star_squared_sign(8, 2), 1.0);
        assert_eq!(star_squared_sign(6, 3), -1.0);
    }

    #[test]
    fn operator_is_symmetric() {
        let cyl = build_cylinder(&catalog(StructureName::Nk6));
        let op = build_operator(&cyl.q_z, &MetricFrame::identity(7)).unwrap();
        assert!((&op.matrix - op.matrix.transpose()).amax() < 1e-12);
    }

    #[test]
    fn split_round_trip() {
        let f = Form::from_monomials(7, &[(1.0, &[0, 3]), (2.0, &[1, 2]), (-1.0, &[4, 6])]);
        let (fm, ad) = split_cylinder_form(&f).unwrap();
        assert_eq!(cylinder_curvature(&fm, &ad), f);
        assert_eq!(ad, Form::monomial(6, 1.0, &[2]));
    }

    #[test]
    fn zero_split_data() {
        let cat = catalog(StructureName::Nk6);
        let r = cylinder_split_residual(&Form::zero(6), &Form::zero(6), &cat).unwrap();
        assert_eq!((r.r1, r.r2, r.total), (0.0, 0.0, 0.0));
        assert!(cylinder_split_residual(&Form::zero(7), &Form::zero(6), &cat).is_err());
    }
}
