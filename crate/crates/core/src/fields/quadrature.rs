use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::chart::{norm, Point};
use super::sphere::FramedPoint;
use crate::linalg::gauss_legendre;
use crate::{Error, Result};

/// A quadrature value with its error bar.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    /// One standard error for sphere sampling; for box rules, the gap to
    /// the same rule on the half-resolution subgrid (zero when there is
    /// no subgrid).
    pub stderr: f64,
    pub samples: usize,
}

impl Estimate {
    /// Whether `|value - target| ≤ k · stderr`. A zero error bar demands
    /// exact agreement.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.stderr
    }

    /// `sqrt(σ₁² + σ₂²)`
    pub fn combined_stderr(&self, other: &Estimate) -> f64 {
        self.stderr.hypot(other.stderr)
    }
}

/// Area of the unit sphere `S^{dim-1} ⊂ ℝ^dim`.
pub fn sphere_area(dim: usize) -> f64 {
    match dim {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        d => 2.0 * PI / (d as f64 - 2.0) * sphere_area(d - 2),
    }
}

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut out = 0.0;
    while i > 0 {
        out += (i % b) as f64 * f;
        i /= b;
        f *= inv;
    }
    out
}

/// `count` points on the unit sphere `S^{dim-1}`.
///
/// A Halton sequence in `2⌈dim/2⌉` dimensions, shifted modulo 1 by a
/// ChaCha-seeded offset, is mapped to Gaussians by Box–Muller and
/// normalized. The same `(dim, count, seed)` always yields the same points.
pub fn sphere_points(dim: usize, count: usize, seed: u64) -> Result<Vec<Point>> {
    let pairs = dim.div_ceil(2);
    if dim < 2 || 2 * pairs > PRIMES.len() {
        return Err(Error::InvalidArgument(format!(
            "cannot sample S^{} with this generator",
            dim.saturating_sub(1)
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..2 * pairs).map(|_| rng.random::<f64>()).collect();
    let points = (0..count)
        .into_par_iter()
        .map(|k| {
            let mut z = Vec::with_capacity(2 * pairs);
            for j in 0..pairs {
                let u1 = (radical_inverse(k as u64 + 1, PRIMES[2 * j]) + shift[2 * j]).fract();
                let u2 = (radical_inverse(k as u64 + 1, PRIMES[2 * j + 1]) + shift[2 * j + 1]).fract();
                let rho = (-2.0 * (1.0 - u1).ln()).sqrt();
                z.push(rho * (2.0 * PI * u2).cos());
                z.push(rho * (2.0 * PI * u2).sin());
            }
            z.truncate(dim);
            let r = norm(&z);
            if r == 0.0 {
                let mut e = vec![0.0; dim];
                e[0] = 1.0;
                return e;
            }
            z.into_iter().map(|x| x / r).collect()
        })
        .collect();
    Ok(points)
}

/// Area-weighted sample means over the unit sphere for several integrands
/// at once. Evaluation is parallel; the reduction runs in sample order, so
/// the result does not depend on the thread count.
pub fn integrate_sphere_many<F>(dim: usize, count: usize, seed: u64, integrand: F) -> Result<Vec<Estimate>>
where
    F: Fn(&FramedPoint) -> Result<Vec<f64>> + Sync,
{
    if count < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    let pts = sphere_points(dim, count, seed)?;
    let values: Vec<Vec<f64>> = pts
        .par_iter()
        .map(|p| integrand(&FramedPoint::at(p)?))
        .collect::<Result<_>>()?;
    let k = values[0].len();
    let area = sphere_area(dim);
    let n = count as f64;
    Ok((0..k)
        .map(|j| {
            let mean = values.iter().map(|v| v[j]).sum::<f64>() / n;
            let var = values.iter().map(|v| (v[j] - mean).powi(2)).sum::<f64>() / (n - 1.0);
            Estimate {
                value: area * mean,
                stderr: area * (var / n).sqrt(),
                samples: count,
            }
        })
        .collect())
}

/// Single-integrand version of [`integrate_sphere_many`].
pub fn integrate_sphere<F>(dim: usize, count: usize, seed: u64, integrand: F) -> Result<Estimate>
where
    F: Fn(&FramedPoint) -> Result<f64> + Sync,
{
    Ok(integrate_sphere_many(dim, count, seed, |fp| Ok(vec![integrand(fp)?]))?[0])
}

/// One-dimensional rule used on every axis of a box.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoxRule {
    /// Closed trapezoid on `m` equispaced nodes including both ends.
    Trapezoid,
    /// Periodic trapezoid on `m` nodes, right end excluded.
    Periodic,
    GaussLegendre,
}

fn rule_nodes(rule: BoxRule, m: usize, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let len = hi - lo;
    match rule {
        BoxRule::Trapezoid => {
            let step = len / (m - 1) as f64;
            let x = (0..m).map(|i| lo + step * i as f64).collect();
            let w = (0..m)
                .map(|i| if i == 0 || i == m - 1 { 0.5 * step } else { step })
                .collect();
            (x, w)
        }
        BoxRule::Periodic => {
            let step = len / m as f64;
            ((0..m).map(|i| lo + step * i as f64).collect(), vec![step; m])
        }
        BoxRule::GaussLegendre => {
            let (x, w) = gauss_legendre(m);
            (
                x.iter().map(|t| lo + 0.5 * len * (t + 1.0)).collect(),
                w.iter().map(|w| 0.5 * len * w).collect(),
            )
        }
    }
}

/// Tensor-product quadrature of `f` over the box `[lo, hi]` with `m` nodes
/// per axis.
pub fn integrate_box<F>(lo: &[f64], hi: &[f64], m: usize, rule: BoxRule, f: F) -> Result<Estimate>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    if lo.len() != hi.len() {
        return Err(Error::DimensionMismatch(lo.len(), hi.len()));
    }
    if m < 2 {
        return Err(Error::InvalidArgument("need at least two nodes per axis".into()));
    }
    let dim = lo.len();
    let axes: Vec<(Vec<f64>, Vec<f64>)> = (0..dim).map(|i| rule_nodes(rule, m, lo[i], hi[i])).collect();
    let total = m.pow(dim as u32);
    let values: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut idx = flat;
            let mut p = vec![0.0; dim];
            for (i, (x, _)) in axes.iter().enumerate() {
                p[i] = x[idx % m];
                idx /= m;
            }
            f(&p)
        })
        .collect::<Result<_>>()?;
    let multi = |mut flat: usize| {
        let mut out = Vec::with_capacity(dim);
        for _ in 0..dim {
            out.push(flat % m);
            flat /= m;
        }
        out
    };
    let mut fine = 0.0;
    for (flat, v) in values.iter().enumerate() {
        let w: f64 = multi(flat).iter().zip(&axes).map(|(&i, (_, w))| w[i]).product();
        fine += w * v;
    }
    // same rule on every other node
    let coarse = match rule {
        BoxRule::Trapezoid if m % 2 == 1 && m >= 3 => Some((m - 1) / 2 + 1),
        BoxRule::Periodic if m % 2 == 0 => Some(m / 2),
        _ => None,
    };
    let stderr = match coarse {
        Some(mc) => {
            let caxes: Vec<Vec<f64>> = (0..dim).map(|i| rule_nodes(rule, mc, lo[i], hi[i]).1).collect();
            let mut sum = 0.0;
            for (flat, v) in values.iter().enumerate() {
                let idx = multi(flat);
                if idx.iter().all(|i| i % 2 == 0) {
                    let w: f64 = idx.iter().zip(&caxes).map(|(&i, w)| w[i / 2]).product();
                    sum += w * v;
                }
            }
            (fine - sum).abs()
        }
        None => 0.0,
    };
    Ok(Estimate {
        value: fine,
        stderr,
        samples: total,
    })
}
