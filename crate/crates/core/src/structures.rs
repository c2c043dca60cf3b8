//! The nearly Kähler 6-sphere and nearly parallel `G₂` 7-sphere structure
//! forms, their cylinder and cone versions, and numerical verification of
//! the structure equations `dP = 4Q`, `d⋆Q = (n-3)⋆P`.
//!
//! The sphere forms are never written down intrinsically. They come from a
//! constant form on the ambient space: on `ℝ⁷` the `G₂` 3-form `φ₀` and
//! `ψ₀ = ⋆φ₀` restrict to the nearly Kähler structure of `S⁶`, and on `ℝ⁸`
//! the `Spin(7)` form `Φ₀ = e⁰ ∧ P + Q` restricts to the nearly parallel
//! `G₂` structure of `S⁷`. For a constant `k`-form `d(i_E Φ) = k Φ`, which is
//! exactly what the structure equations become after the Euler split.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::exterior::{hodge, norm_sqr, volume_form, Blade, Form, MetricFrame};
use crate::fields::{
    reconstruct, sphere_frame, sphere_points, split_form, ChartDomain, FormField, FramedPoint, ScalarField,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StructureName {
    /// Nearly Kähler 6-manifold.
    Nk6,
    /// Nearly parallel `G₂` 7-manifold.
    Npg2,
}

impl StructureName {
    pub const ALL: [StructureName; 2] = [StructureName::Nk6, StructureName::Npg2];

    pub fn as_str(self) -> &'static str {
        match self {
            StructureName::Nk6 => "nk6",
            StructureName::Npg2 => "npg2",
        }
    }

    /// Dimension `n` of `M`.
    pub fn n(self) -> usize {
        match self {
            StructureName::Nk6 => 6,
            StructureName::Npg2 => 7,
        }
    }
}

impl fmt::Display for StructureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StructureName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nk6" => Ok(StructureName::Nk6),
            "npg2" => Ok(StructureName::Npg2),
            _ => Err(Error::UnknownStructure(s.to_string())),
        }
    }
}

/// Constant forms in an adapted orthonormal coframe of `M`, exactly as
/// listed; `star_p` is `⋆P` for the reference orientation `e^{1…n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct GStructureCatalog {
    pub name: StructureName,
    pub n: usize,
    /// Only for the nearly Kähler case.
    pub omega: Option<Form>,
    pub p: Form,
    pub star_p: Form,
    pub q: Form,
    /// Orientation of `M` induced by the structure itself, relative to
    /// `e^{1…n}`. The listed nearly parallel `P` is the standard `G₂` form
    /// reflected in `e⁷`, so it induces `-e^{1…7}`.
    pub orientation: i32,
}

impl GStructureCatalog {
    /// Flat metric on `M` with the structure's orientation.
    pub fn metric(&self) -> MetricFrame {
        MetricFrame::identity(self.n)
            .with_orientation(self.orientation)
            .expect("orientation is ±1")
    }

    /// The 4-form entering `dP = 4Q`: `½ ω ∧ ω` in the nearly Kähler case,
    /// `⋆_M P` in the nearly parallel one.
    pub fn structure_q(&self) -> Form {
        match self.name {
            StructureName::Nk6 => self.q.clone(),
            StructureName::Npg2 => hodge(&self.p, &self.metric()).expect("homogeneous"),
        }
    }
}

/// Form from the usual 1-based labels: `(−1.0, "236")` is `−e^{236}`.
/// Labels are taken in the order written.
pub fn labelled(dim: usize, terms: &[(f64, &str)]) -> Form {
    let mut out = Form::zero(dim);
    for (c, label) in terms {
        let idx: Vec<usize> = label
            .chars()
            .map(|ch| ch.to_digit(10).expect("single-digit labels") as usize - 1)
            .collect();
        out = &out + &Form::monomial(dim, *c, &idx);
    }
    out
}

fn nk6() -> GStructureCatalog {
    let omega = labelled(6, &[(1.0, "12"), (1.0, "34"), (1.0, "56")]);
    let p = labelled(6, &[(1.0, "135"), (1.0, "164"), (-1.0, "236"), (-1.0, "245")]);
    let star_p = labelled(6, &[(1.0, "145"), (1.0, "235"), (1.0, "136"), (-1.0, "246")]);
    let q = labelled(6, &[(1.0, "1234"), (1.0, "1256"), (1.0, "3456")]);
    GStructureCatalog {
        name: StructureName::Nk6,
        n: 6,
        omega: Some(omega),
        p,
        star_p,
        q,
        orientation: 1,
    }
}

fn npg2_p() -> Form {
    labelled(
        7,
        &[
            (1.0, "123"),
            (1.0, "145"),
            (-1.0, "167"),
            (1.0, "246"),
            (1.0, "257"),
            (1.0, "347"),
            (-1.0, "356"),
        ],
    )
}

fn npg2() -> GStructureCatalog {
    let q = labelled(
        7,
        &[
            (1.0, "4567"),
            (1.0, "2367"),
            (-1.0, "2345"),
            (1.0, "1357"),
            (1.0, "1346"),
            (1.0, "1256"),
            (-1.0, "1247"),
        ],
    );
    GStructureCatalog {
        name: StructureName::Npg2,
        n: 7,
        omega: None,
        p: npg2_p(),
        star_p: q.clone(),
        q,
        orientation: -1,
    }
}

pub fn catalog(name: StructureName) -> GStructureCatalog {
    match name {
        StructureName::Nk6 => nk6(),
        StructureName::Npg2 => npg2(),
    }
}

/// Forms on the cylinder `ℝ × M`, `dt` at position 0 and
/// `vol_Z = dt ∧ vol_M`.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderForms {
    pub n: usize,
    pub metric: MetricFrame,
    /// `Q_Z = dt ∧ P + Q`
    pub q_z: Form,
    /// `⋆Q_Z`, an `(n-3)`-form.
    pub psi_z: Form,
}

pub fn build_cylinder(cat: &GStructureCatalog) -> CylinderForms {
    let metric = MetricFrame::identity(cat.n + 1)
        .with_orientation(cat.orientation)
        .expect("orientation is ±1");
    let q_z = &cat.p.shifted(1).left_basis_wedge(0) + &cat.structure_q().shifted(1);
    let psi_z = hodge(&q_z, &metric).expect("Q_Z is a 4-form");
    CylinderForms {
        n: cat.n,
        metric,
        q_z,
        psi_z,
    }
}

/// The constant ambient forms whose restrictions give the sphere structure.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeModel {
    pub name: StructureName,
    /// `n + 1`
    pub dim: usize,
    /// Orientation of the ambient space (and of the spheres, with the
    /// outward normal first).
    pub orientation: i32,
    /// `φ₀` on `ℝ⁷` (nearly Kähler case only).
    pub phi0: Option<Form>,
    /// The 4-form `ψ₀ = ⋆φ₀` on `ℝ⁷`, or `Φ₀ = e⁰ ∧ P + Q` on `ℝ⁸`.
    pub psi0: Form,
}

pub fn cone_model(name: StructureName) -> ConeModel {
    match name {
        StructureName::Nk6 => {
            // The cone over the nearly Kähler S⁶ is flat ℝ⁷ with its G₂ form,
            // which has the same coefficient pattern as the nearly parallel P.
            // That pattern induces -e^{1…7}; its negative is the G₂ form for
            // the standard orientation, and restricts with ω ∧ ω = 2Q.
            let phi0 = npg2_p().scale(-1.0);
            let psi0 = hodge(&phi0, &MetricFrame::identity(7)).expect("homogeneous");
            ConeModel {
                name,
                dim: 7,
                orientation: 1,
                phi0: Some(phi0),
                psi0,
            }
        }
        StructureName::Npg2 => ConeModel {
            name,
            dim: 8,
            orientation: -1,
            phi0: None,
            psi0: build_cylinder(&npg2()).q_z,
        },
    }
}

/// Structure forms of a sphere at one framed point, in its frame.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereForms {
    pub omega: Option<Form>,
    pub p: Form,
    pub star_p: Form,
    pub q: Form,
}

impl ConeModel {
    /// Sphere forms at `fp` (the point is rescaled to the unit sphere by
    /// the Euler weights).
    pub fn forms_at(&self, fp: &FramedPoint) -> Result<SphereForms> {
        let (p, q) = split_form(&self.psi0, fp, 4)?;
        match &self.phi0 {
            Some(phi0) => {
                let (omega, star_p) = split_form(phi0, fp, 3)?;
                Ok(SphereForms {
                    omega: Some(omega),
                    p,
                    star_p,
                    q,
                })
            }
            None => Ok(SphereForms {
                omega: None,
                p,
                star_p: q.clone(),
                q,
            }),
        }
    }
}

/// Cone forms as fields on punctured `ℝ^{n+1}` with `r = e^t`.
#[derive(Clone, Debug)]
pub struct ConeForms {
    pub n: usize,
    /// `Q_Z̄ = r³ dr ∧ P + r⁴ Q`
    pub q_field: ScalarField,
    /// `⋆̄Q_Z̄` for the flat cone metric.
    pub star_q_field: ScalarField,
}

/// Assembles `Q_Z̄` pointwise from the sphere forms at `x/|x|`.
pub fn build_cone(name: StructureName, h: f64) -> Result<ConeForms> {
    let model = cone_model(name);
    let dim = model.dim;
    let domain = ChartDomain::punctured(dim, 0.25, 4.0, h)?;
    let ambient = MetricFrame::identity(dim).with_orientation(model.orientation)?;
    let m = model.clone();
    let q_field = FormField::new(domain.clone(), move |x: &[f64]| {
        let fp = FramedPoint::at(x).expect("punctured chart excludes the origin");
        let forms = m.forms_at(&fp).expect("dimensions agree");
        reconstruct(&forms.p, &forms.q, &fp, 4).expect("dimensions agree")
    });
    let q = q_field.clone();
    let star_q_field = FormField::new(domain, move |x: &[f64]| {
        hodge(&q.evaluate(x), &ambient).expect("homogeneous 4-form")
    });
    Ok(ConeForms {
        n: model.dim - 1,
        q_field,
        star_q_field,
    })
}

/// One line of a residual report.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualRecord {
    pub structure: StructureName,
    pub identity: &'static str,
    pub max_residual: f64,
    pub h: f64,
    pub points: usize,
}

fn max_over<F>(points: &[Vec<f64>], f: F) -> Result<f64>
where
    F: Fn(&FramedPoint) -> Result<f64> + Sync,
{
    let vals: Vec<f64> = points.par_iter().map(|p| f(&sphere_frame(p)?)).collect::<Result<_>>()?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// `‖i*(d(r^{-k} i_E Φ)) - k i*Φ‖` at the sample points, `d` by central
/// differences with step `h`.
fn homogeneity_residual(phi: &Form, degree: i32, h: f64, points: &[Vec<f64>]) -> Result<f64> {
    let dim = phi.dim();
    let base = phi.clone();
    let domain = ChartDomain::sphere(dim, 0.5, h)?;
    let theta = FormField::new(domain, move |x: &[f64]| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        base.interior(x)
            .expect("dimensions agree")
            .scale(r2.powf(-0.5 * degree as f64))
    });
    max_over(points, |fp| {
        let d = fp.pullback(&theta.d_numeric(&fp.point)?)?;
        let target = fp.pullback(phi)?.scale(degree as f64);
        Ok((&d - &target).coefficient_norm_sqr().sqrt())
    })
}

/// Numerical check of the structure equations at `count` sphere points.
pub fn verify_structure(cat: &GStructureCatalog, count: usize, h: f64, seed: u64) -> Result<Vec<ResidualRecord>> {
    let model = cone_model(cat.name);
    let points = sphere_points(model.dim, count, seed)?;
    let record = |identity, max_residual| ResidualRecord {
        structure: cat.name,
        identity,
        max_residual,
        h,
        points: count,
    };
    let sphere = MetricFrame::identity(cat.n).with_orientation(model.orientation)?;
    let mut out = Vec::new();
    match &model.phi0 {
        Some(phi0) => {
            out.push(record("dP = 4Q", homogeneity_residual(&model.psi0, 4, h, &points)?));
            out.push(record("d*Q = (n-3)*P", homogeneity_residual(phi0, 3, h, &points)?));
            let star = max_over(&points, |fp| {
                let f = model.forms_at(fp)?;
                let omega = f.omega.expect("nearly Kähler model");
                let a = &hodge(&f.q, &sphere)? - &omega;
                let b = &hodge(&f.p, &sphere)? - &f.star_p;
                Ok(a.max_abs().max(b.max_abs()))
            })?;
            out.push(record("*Q = omega, *P", star));
        }
        None => {
            out.push(record(
                "dP = 4Q = 4*P",
                homogeneity_residual(&model.psi0, 4, h, &points)?,
            ));
            let star = max_over(&points, |fp| {
                let f = model.forms_at(fp)?;
                Ok((&hodge(&f.p, &sphere)? - &f.q).coefficient_norm_sqr().sqrt())
            })?;
            out.push(record("*P = Q", star));
        }
    }
    Ok(out)
}

/// Outcome of one exact identity.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraicCheck {
    pub identity: &'static str,
    /// Largest coefficient deviation.
    pub deviation: f64,
}

/// Exact wedge/Hodge identities of the catalog.
pub fn algebraic_suite(cat: &GStructureCatalog) -> Result<Vec<AlgebraicCheck>> {
    let m = MetricFrame::identity(cat.n);
    let vol = volume_form(&m);
    let dev = |a: &Form, b: &Form| (a - b).max_abs();
    let mut out = Vec::new();
    let mut push = |identity, deviation| out.push(AlgebraicCheck { identity, deviation });
    push("*P = listed *P", dev(&hodge(&cat.p, &m)?, &cat.star_p));
    match &cat.omega {
        Some(omega) => {
            let w2 = omega.wedge(omega)?;
            push("omega^2 = 2Q", dev(&w2, &cat.q.scale(2.0)));
            push("omega^3 = 6 vol", dev(&w2.wedge(omega)?, &vol.scale(6.0)));
            push("omega ^ P = 0", omega.wedge(&cat.p)?.max_abs());
            push("P ^ *P = 4 vol", dev(&cat.p.wedge(&cat.star_p)?, &vol.scale(4.0)));
            push("*omega = Q", dev(&hodge(omega, &m)?, &cat.q));
        }
        None => {
            push("P ^ Q = 7 vol", dev(&cat.p.wedge(&cat.q)?, &vol.scale(7.0)));
            push("|P|^2 = 7", (norm_sqr(&cat.p, &m)? - 7.0).abs());
        }
    }
    Ok(out)
}

/// Blade list of a form as `(coefficient, 1-based label)`, for reports.
pub fn blade_labels(form: &Form) -> Vec<(f64, String)> {
    form.iter()
        .map(|(b, c): (Blade, &f64)| (*c, b.indices().map(|i| char::from(b'1' + i as u8)).collect()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_parse() {
        assert_eq!("NK6".parse::<StructureName>().unwrap(), StructureName::Nk6);
        assert_eq!("npg2".parse::<StructureName>().unwrap(), StructureName::Npg2);
        assert!(matches!(
            "spin7".parse::<StructureName>(),
            Err(Error::UnknownStructure(_))
        ));
    }

    #[test]
    fn labels_follow_written_order() {
        assert_eq!(labelled(6, &[(1.0, "164")]), Form::monomial(6, -1.0, &[0, 3, 5]));
        assert_eq!(
            blade_labels(&labelled(6, &[(1.0, "164")])),
            vec![(-1.0, "146".to_string())]
        );
    }

    #[test]
    fn cylinder_star_is_g2_form() {
        let cat = catalog(StructureName::Nk6);
        let cyl = build_cylinder(&cat);
        assert_eq!(cyl.q_z.len(), 7);
        let expected = &cat.omega.unwrap().shifted(1).left_basis_wedge(0) + &cat.star_p.shifted(1);
        assert_eq!(cyl.psi_z, expected);
    }

    #[test]
    fn npg2_cone_at_pole_is_cylinder_form() {
        let cone = build_cone(StructureName::Npg2, 1e-4).unwrap();
        let mut pole = vec![0.0; 8];
        pole[0] = 1.0;
        let q = cone.q_field.evaluate(&pole);
        assert!((&q - &build_cylinder(&catalog(StructureName::Npg2)).q_z).max_abs() < 1e-15);
    }

    #[test]
    fn pole_split_recovers_catalog() {
        let model = cone_model(StructureName::Npg2);
        let mut pole = vec![0.0; 8];
        pole[0] = 1.0;
        let f = model.forms_at(&sphere_frame(&pole).unwrap()).unwrap();
        let cat = catalog(StructureName::Npg2);
        assert_eq!(f.p, cat.p);
        assert_eq!(f.q, cat.structure_q());
        assert_eq!(f.q, cat.q.scale(-1.0));
    }

    #[test]
    fn nk6_sphere_forms_satisfy_algebra() {
        let model = cone_model(StructureName::Nk6);
        let pts = sphere_points(7, 20, 4).unwrap();
        let m = MetricFrame::identity(6);
        for p in &pts {
            let f = model.forms_at(&sphere_frame(p).unwrap()).unwrap();
            let omega = f.omega.unwrap();
            assert!((&omega.wedge(&omega).unwrap() - &f.q.scale(2.0)).max_abs() < 1e-12);
            assert!(omega.wedge(&f.p).unwrap().max_abs() < 1e-12);
            assert!((norm_sqr(&f.p, &m).unwrap() - 4.0).abs() < 1e-12);
            assert!((&hodge(&f.p, &m).unwrap() - &f.star_p).max_abs() < 1e-12);
        }
    }
}
