//! Seeded test data shared by the suites.

use holoflow::conformal::TestFunction;
use holoflow::exterior::{Blade, Coefficient, Form};
use holoflow::fields::{ChartDomain, Point};
use holoflow::gauge::{pure_gauge, su2_exp, su2_generators, u1_generator, GaugeField, GaugeForm, LieElement};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Coefficients uniform in `[-1, 1)` on every blade of the grade.
pub fn random_form(rng: &mut ChaCha8Rng, dim: usize, grade: usize) -> Form {
    let mut f = Form::zero(dim);
    for b in Blade::all_of_grade(dim, grade) {
        f.add_term(b, &rng.random_range(-1.0..1.0), 1.0);
    }
    f
}

pub fn random_points(rng: &mut ChaCha8Rng, dim: usize, count: usize, lo: f64, hi: f64) -> Vec<Point> {
    (0..count)
        .map(|_| (0..dim).map(|_| rng.random_range(lo..hi)).collect())
        .collect()
}

/// The spherical shell chart used for Chern–Simons integrals.
pub fn shell(dim: usize, h: f64) -> anyhow::Result<ChartDomain> {
    Ok(ChartDomain::sphere(dim, 0.5, h)?)
}

/// `A = Σ_i (m_i + Σ_j n_ij x^j) dx^i` with random `su(2)` coefficients.
pub fn linear_connection(domain: ChartDomain, seed: u64, scale: f64) -> GaugeField {
    let dim = domain.dim();
    let mut rng = rng(seed);
    let gens = su2_generators();
    let mut draw = || LieElement::combination(&[0, 1, 2].map(|_| scale * rng.random_range(-1.0..1.0)), &gens);
    let m: Vec<LieElement> = (0..dim).map(|_| draw()).collect();
    let n: Vec<Vec<LieElement>> = (0..dim).map(|_| (0..dim).map(|_| draw()).collect()).collect();
    GaugeField::new(domain, move |x: &[f64]| {
        let mut a = GaugeForm::zero(dim);
        for i in 0..dim {
            let mut c = m[i].clone();
            for j in 0..dim {
                c.add_scaled(&n[i][j], x[j]);
            }
            a.add_term(Blade::basis(i), &c, 1.0);
        }
        a
    })
}

/// `g⁻¹dg` for `g(x) = exp(M x)` with a random `3 × dim` matrix `M`.
pub fn pure_gauge_connection(domain: ChartDomain, seed: u64) -> GaugeField {
    let dim = domain.dim();
    let mut rng = rng(seed);
    let m: Vec<Vec<f64>> = (0..3)
        .map(|_| (0..dim).map(|_| rng.random_range(-1.5..1.5)).collect())
        .collect();
    pure_gauge(domain, 1e-5, move |x: &[f64]| {
        let v = [0, 1, 2].map(|a| m[a].iter().zip(x).map(|(m, x)| m * x).sum::<f64>());
        su2_exp(v)
    })
}

/// `A = Σ_i Σ_a amp sin(k_ia · x + φ_ia) τ_a dx^i`
pub fn trig_connection(domain: ChartDomain, seed: u64, amp: f64) -> GaugeField {
    let dim = domain.dim();
    let mut rng = rng(seed);
    let waves: Vec<Vec<(Vec<f64>, f64)>> = (0..dim)
        .map(|_| {
            (0..3)
                .map(|_| {
                    (
                        (0..dim).map(|_| rng.random_range(-1.5..1.5)).collect(),
                        rng.random_range(0.0..6.0),
                    )
                })
                .collect()
        })
        .collect();
    let gens = su2_generators();
    GaugeField::new(domain, move |x: &[f64]| {
        let mut a = GaugeForm::zero(dim);
        for (i, row) in waves.iter().enumerate() {
            let coeffs: Vec<f64> = row
                .iter()
                .map(|(k, ph)| amp * (k.iter().zip(x).map(|(k, x)| k * x).sum::<f64>() + ph).sin())
                .collect();
            a.add_term(Blade::basis(i), &LieElement::combination(&coeffs, &gens), 1.0);
        }
        a
    })
}

/// The abelian connection `A = i x⁰ dx¹`, with `F = i dx⁰ ∧ dx¹`.
pub fn abelian_connection(domain: ChartDomain) -> GaugeField {
    let dim = domain.dim();
    GaugeField::new(domain, move |x: &[f64]| {
        GaugeForm::term(dim, Blade::basis(1), u1_generator().scaled(x[0]))
    })
}

/// A Gaussian bump well inside `[-1, 1]³`.
pub fn bump() -> TestFunction {
    TestFunction::Gaussian {
        center: vec![0.1, -0.05, 0.08],
        sigma: 0.1,
    }
}
