use crate::exterior::Form;
use crate::fields::{integrate_sphere_many, Estimate, FramedPoint};
use crate::gauge::{trace, trace_pair, GaugeField, GaugeForm};
use crate::linalg::gauss_legendre;
use crate::structures::{cone_model, ConeModel, StructureName};
use crate::{Error, Result};

/// Sample count and seed for sphere integrals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sampling {
    pub count: usize,
    pub seed: u64,
    /// Estimates whose standard error exceeds this are flagged.
    pub max_stderr: f64,
}

impl Sampling {
    pub fn new(count: usize, seed: u64) -> Self {
        Sampling {
            count,
            seed,
            max_stderr: f64::INFINITY,
        }
    }

    pub fn with_budget(self, max_stderr: f64) -> Self {
        Sampling { max_stderr, ..self }
    }
}

/// Both expressions of the Chern–Simons functional, from the same samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CsEstimate {
    /// `∫ Tr(A ∧ dA + ⅔ A ∧ A ∧ A) ∧ ⋆P`
    pub value: Estimate,
    /// `(n-3)⁻¹ ∫ Tr(F ∧ F) ∧ ⋆Q`
    pub curvature_form: Estimate,
    /// `value - curvature_form` on the shared samples.
    pub gap: Estimate,
    /// Some standard error exceeded the sampling budget.
    pub flagged: bool,
}

impl CsEstimate {
    /// Whether the two expressions agree within `k` combined standard errors.
    pub fn forms_agree(&self, k: f64) -> bool {
        (self.value.value - self.curvature_form.value).abs() <= k * self.value.combined_stderr(&self.curvature_form)
    }
}

/// `A(s) = Σ_{k≥1} s^k C_k`, a polynomial path from `0` to `Σ C_k`.
#[derive(Clone, Debug)]
pub struct PolynomialPath {
    coeffs: Vec<GaugeField>,
}

impl PolynomialPath {
    /// `coeffs[0]` multiplies `s`, `coeffs[1]` multiplies `s²`, and so on.
    pub fn new(coeffs: Vec<GaugeField>) -> Result<Self> {
        let Some(first) = coeffs.first() else {
            return Err(Error::InvalidArgument("a path needs at least one coefficient".into()));
        };
        let dim = first.dim();
        if let Some(bad) = coeffs.iter().find(|c| c.dim() != dim) {
            return Err(Error::DimensionMismatch(bad.dim(), dim));
        }
        Ok(PolynomialPath { coeffs })
    }

    /// The straight path `s A`.
    pub fn straight(a: GaugeField) -> Self {
        PolynomialPath { coeffs: vec![a] }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    fn dim(&self) -> usize {
        self.coeffs[0].dim()
    }
}

/// Fit of `CS(tA) = a t² + b t³`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingFit {
    pub t: Vec<f64>,
    pub values: Vec<Estimate>,
    pub a: f64,
    pub b: f64,
    /// Largest `|CS(tA) - a t² - b t³|`.
    pub max_residual: f64,
    /// Largest standard error among the values.
    pub max_stderr: f64,
}

struct Sphere {
    model: ConeModel,
    n: usize,
}

impl Sphere {
    fn new(structure: StructureName, dim: usize) -> Result<Self> {
        let n = structure.n();
        if dim != n + 1 {
            return Err(Error::DimensionMismatch(dim, n + 1));
        }
        Ok(Sphere {
            model: cone_model(structure),
            n,
        })
    }

    /// `(⋆P, ⋆Q)` in the sphere frame at `fp`.
    fn forms(&self, fp: &FramedPoint) -> Result<(Form, Form)> {
        let f = self.model.forms_at(fp)?;
        let star_q = f.omega.unwrap_or(f.p);
        Ok((f.star_p, star_q))
    }

    /// Integral density of a top form on the sphere in its own orientation.
    fn density(&self, top: &Form) -> f64 {
        self.model.orientation as f64 * top.top_coefficient()
    }

    fn integrate<F>(&self, sampling: Sampling, f: F) -> Result<Vec<Estimate>>
    where
        F: Fn(&FramedPoint, &Form, &Form) -> Result<Vec<f64>> + Sync,
    {
        integrate_sphere_many(self.n + 1, sampling.count, sampling.seed, |fp| {
            let (star_p, star_q) = self.forms(fp)?;
            f(fp, &star_p, &star_q)
        })
    }
}

/// `A` and `dA` restricted to the sphere at `fp`.
fn restrict(field: &GaugeField, fp: &FramedPoint) -> Result<(GaugeForm, GaugeForm)> {
    let a = fp.pullback(&field.evaluate(&fp.point))?;
    let da = fp.pullback(&field.d_numeric(&fp.point)?)?;
    Ok((a, da))
}

fn cs_three_form(a: &GaugeForm, da: &GaugeForm) -> Result<Form> {
    let cubic = trace(&a.wedge(a)?.wedge(a)?);
    Ok(&trace_pair(a, da)? + &cubic.scale(2.0 / 3.0))
}

fn curvature(a: &GaugeForm, da: &GaugeForm) -> Result<GaugeForm> {
    Ok(da + &a.wedge(a)?)
}

/// Chern–Simons functional of a connection on the unit sphere `M = S^n`
/// carrying the structure `structure`, given as an ambient field on
/// `ℝ^{n+1}` and restricted pointwise. Both expressions are integrated on
/// the same sample points.
pub fn cs_evaluate(a: &GaugeField, structure: StructureName, sampling: Sampling) -> Result<CsEstimate> {
    let sphere = Sphere::new(structure, a.dim())?;
    let inv = 1.0 / (sphere.n as f64 - 3.0);
    let est = sphere.integrate(sampling, |fp, star_p, star_q| {
        let (av, dav) = restrict(a, fp)?;
        let first = cs_density(&sphere, &av, &dav, star_p)?;
        let f = curvature(&av, &dav)?;
        let second = sphere.density(&trace_pair(&f, &f)?.wedge(star_q)?) * inv;
        Ok(vec![first, second, first - second])
    })?;
    Ok(CsEstimate {
        value: est[0],
        curvature_form: est[1],
        gap: est[2],
        flagged: est.iter().any(|e| e.stderr > sampling.max_stderr),
    })
}

/// `Γ_A(β) = 2 ∫ Tr(F_A ∧ β) ∧ ⋆P`
pub fn cs_one_form(
    a: &GaugeField,
    beta: &GaugeField,
    structure: StructureName,
    sampling: Sampling,
) -> Result<Estimate> {
    if beta.dim() != a.dim() {
        return Err(Error::DimensionMismatch(beta.dim(), a.dim()));
    }
    let sphere = Sphere::new(structure, a.dim())?;
    let est = sphere.integrate(sampling, |fp, star_p, _| {
        let (av, dav) = restrict(a, fp)?;
        let b = fp.pullback(&beta.evaluate(&fp.point))?;
        Ok(vec![gamma_density(&sphere, &av, &dav, &b, star_p)?])
    })?;
    Ok(est[0])
}

fn gamma_density(sphere: &Sphere, a: &GaugeForm, da: &GaugeForm, beta: &GaugeForm, star_p: &Form) -> Result<f64> {
    let f = curvature(a, da)?;
    Ok(2.0 * sphere.density(&trace_pair(&f, beta)?.wedge(star_p)?))
}

fn cs_density(sphere: &Sphere, a: &GaugeForm, da: &GaugeForm, star_p: &Form) -> Result<f64> {
    Ok(sphere.density(&cs_three_form(a, da)?.wedge(star_p)?))
}

/// Two estimates from the same samples and the estimate of their
/// difference, whose error bar accounts for the pairing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairedEstimate {
    pub first: Estimate,
    pub second: Estimate,
    /// `first - second`
    pub gap: Estimate,
}

impl PairedEstimate {
    /// Whether `|gap| ≤ k` standard errors of the gap.
    pub fn consistent(&self, k: f64) -> bool {
        self.gap.within(0.0, k)
    }
}

fn paired(e: &[Estimate]) -> PairedEstimate {
    PairedEstimate {
        first: e[0],
        second: e[1],
        gap: e[2],
    }
}

/// `Γ_A(β)` against the central difference `(CS(A+εβ) - CS(A-εβ)) / 2ε`.
pub fn cs_one_form_check(
    a: &GaugeField,
    beta: &GaugeField,
    eps: f64,
    structure: StructureName,
    sampling: Sampling,
) -> Result<PairedEstimate> {
    if beta.dim() != a.dim() {
        return Err(Error::DimensionMismatch(beta.dim(), a.dim()));
    }
    let sphere = Sphere::new(structure, a.dim())?;
    let est = sphere.integrate(sampling, |fp, star_p, _| {
        let (av, dav) = restrict(a, fp)?;
        let (bv, dbv) = restrict(beta, fp)?;
        let gamma = gamma_density(&sphere, &av, &dav, &bv, star_p)?;
        let plus = cs_density(&sphere, &av.add_scaled(&bv, eps), &dav.add_scaled(&dbv, eps), star_p)?;
        let minus = cs_density(&sphere, &av.add_scaled(&bv, -eps), &dav.add_scaled(&dbv, -eps), star_p)?;
        let fd = (plus - minus) / (2.0 * eps);
        Ok(vec![gamma, fd, gamma - fd])
    })?;
    Ok(paired(&est))
}

/// Integral of `Γ` along several paths with a common endpoint `A`, each
/// compared with `CS(A)` on the same samples.
#[derive(Clone, Debug, PartialEq)]
pub struct PathComparison {
    pub cs: Estimate,
    pub along: Vec<Estimate>,
    /// `along[k] - cs`
    pub gaps: Vec<Estimate>,
}

/// `∫₀¹ Γ_{A(s)}(A'(s)) ds` with `nodes` Gauss–Legendre points in `s`.
/// The `s`-integrand is a polynomial of degree `3·deg - 1`, so
/// `nodes ≥ 3·deg / 2` integrates it exactly.
pub fn cs_along_path(
    path: &PolynomialPath,
    structure: StructureName,
    sampling: Sampling,
    nodes: usize,
) -> Result<Estimate> {
    Ok(cs_path_comparison(std::slice::from_ref(path), structure, sampling, nodes)?.along[0])
}

/// See [`PathComparison`]. The endpoints must agree at every sample point.
pub fn cs_path_comparison(
    paths: &[PolynomialPath],
    structure: StructureName,
    sampling: Sampling,
    nodes: usize,
) -> Result<PathComparison> {
    let Some(first) = paths.first() else {
        return Err(Error::InvalidArgument("no paths to compare".into()));
    };
    if let Some(bad) = paths.iter().find(|p| p.dim() != first.dim()) {
        return Err(Error::DimensionMismatch(bad.dim(), first.dim()));
    }
    let sphere = Sphere::new(structure, first.dim())?;
    let (x, w) = gauss_legendre(nodes);
    let est = sphere.integrate(sampling, |fp, star_p, _| {
        let mut along = Vec::with_capacity(paths.len());
        let mut end: Option<(GaugeForm, GaugeForm)> = None;
        for path in paths {
            let local = path
                .coeffs
                .iter()
                .map(|c| restrict(c, fp))
                .collect::<Result<Vec<_>>>()?;
            let at = |s: f64| {
                let mut a = GaugeForm::zero(sphere.n);
                let mut da = GaugeForm::zero(sphere.n);
                let mut a_dot = GaugeForm::zero(sphere.n);
                for (k, (ck, dck)) in local.iter().enumerate() {
                    let p = (k + 1) as i32;
                    a = a.add_scaled(ck, s.powi(p));
                    da = da.add_scaled(dck, s.powi(p));
                    a_dot = a_dot.add_scaled(ck, p as f64 * s.powi(p - 1));
                }
                (a, da, a_dot)
            };
            let mut total = 0.0;
            for (xi, wi) in x.iter().zip(&w) {
                let (a, da, a_dot) = at(0.5 * (xi + 1.0));
                total += 0.5 * wi * gamma_density(&sphere, &a, &da, &a_dot, star_p)?;
            }
            along.push(total);
            let (a1, da1, _) = at(1.0);
            match &end {
                None => end = Some((a1, da1)),
                Some((a0, _)) => {
                    if a0.add_scaled(&a1, -1.0).max_abs() > 1e-12 * (1.0 + a0.max_abs()) {
                        return Err(Error::InvalidArgument("paths do not share an endpoint".into()));
                    }
                }
            }
        }
        let (a1, da1) = end.expect("at least one path");
        let cs = cs_density(&sphere, &a1, &da1, star_p)?;
        let mut out = vec![cs];
        out.extend(along.iter().copied());
        out.extend(along.iter().map(|v| v - cs));
        Ok(out)
    })?;
    let m = paths.len();
    Ok(PathComparison {
        cs: est[0],
        along: est[1..=m].to_vec(),
        gaps: est[m + 1..].to_vec(),
    })
}

/// `CS(tA)` at each `t` on shared samples, fitted by `a t² + b t³`.
pub fn cs_scaling_fit(a: &GaugeField, structure: StructureName, sampling: Sampling, t: &[f64]) -> Result<ScalingFit> {
    if t.len() < 2 {
        return Err(Error::InvalidArgument("need at least two scale factors".into()));
    }
    let sphere = Sphere::new(structure, a.dim())?;
    let values = sphere.integrate(sampling, |fp, star_p, _| {
        let (av, dav) = restrict(a, fp)?;
        let quad = sphere.density(&trace_pair(&av, &dav)?.wedge(star_p)?);
        let cubic = sphere.density(&trace(&av.wedge(&av)?.wedge(&av)?).wedge(star_p)?) * 2.0 / 3.0;
        Ok(t.iter().map(|s| quad * s * s + cubic * s * s * s).collect())
    })?;
    // normal equations for the two monomials
    let (mut s44, mut s45, mut s55, mut r4, mut r5) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (s, v) in t.iter().zip(&values) {
        let (u, w) = (s * s, s * s * s);
        s44 += u * u;
        s45 += u * w;
        s55 += w * w;
        r4 += u * v.value;
        r5 += w * v.value;
    }
    let det = s44 * s55 - s45 * s45;
    if det.abs() < 1e-300 {
        return Err(Error::InvalidArgument("scale factors do not determine the fit".into()));
    }
    let fa = (r4 * s55 - r5 * s45) / det;
    let fb = (s44 * r5 - s45 * r4) / det;
    let max_residual = t
        .iter()
        .zip(&values)
        .map(|(s, v)| (v.value - fa * s * s - fb * s * s * s).abs())
        .fold(0.0, f64::max);
    let max_stderr = values.iter().map(|v| v.stderr).fold(0.0, f64::max);
    Ok(ScalingFit {
        t: t.to_vec(),
        values,
        a: fa,
        b: fb,
        max_residual,
        max_stderr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::ChartDomain;

    #[test]
    fn zero_connection() {
        let dom = ChartDomain::sphere(7, 0.5, 1e-4).unwrap();
        let a = GaugeField::constant(dom, GaugeForm::zero(7));
        let cs = cs_evaluate(&a, StructureName::Nk6, Sampling::new(50, 1)).unwrap();
        assert_eq!(cs.value.value, 0.0);
        assert_eq!(cs.curvature_form.value, 0.0);
        let g = cs_one_form(&a, &a, StructureName::Nk6, Sampling::new(50, 1)).unwrap();
        assert_eq!(g.value, 0.0);
    }

    #[test]
    fn dimension_is_checked() {
        let dom = ChartDomain::sphere(6, 0.5, 1e-4).unwrap();
        let a = GaugeField::constant(dom, GaugeForm::zero(6));
        assert!(cs_evaluate(&a, StructureName::Nk6, Sampling::new(10, 1)).is_err());
        assert!(PolynomialPath::new(vec![]).is_err());
    }
}
