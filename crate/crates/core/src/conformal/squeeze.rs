use crate::linalg::gauss_legendre;
use crate::{Error, Result};

/// The cutoff `η`: `1` on `|t| ≤ T`, `0` on `|t| ≥ 2T`, and the cubic
/// `1 - 3s² + 2s³` in `s = (|t| - T)/T` in between. It is `C¹` with
/// `max |η'| = 3/(2T) ≤ 2/T`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffProfile {
    scale: f64,
}

impl CutoffProfile {
    pub fn new(scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "cutoff scale must be positive, got {scale}"
            )));
        }
        Ok(CutoffProfile { scale })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn value(&self, t: f64) -> f64 {
        let s = (t.abs() - self.scale) / self.scale;
        if s <= 0.0 {
            1.0
        } else if s >= 1.0 {
            0.0
        } else {
            1.0 - s * s * (3.0 - 2.0 * s)
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let s = (t.abs() - self.scale) / self.scale;
        if s <= 0.0 || s >= 1.0 {
            0.0
        } else {
            -6.0 * s * (1.0 - s) / self.scale * t.signum()
        }
    }

    /// `sup |η'|`
    pub fn max_slope(&self) -> f64 {
        1.5 / self.scale
    }

    /// The admissible bound `2/T`.
    pub fn slope_bound(&self) -> f64 {
        2.0 / self.scale
    }
}

/// Both sides of `∫ η (n-3) λ ≤ (6/T) ∫_{T ≤ |t| ≤ 2T} λ` at one scale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SqueezeRow {
    pub scale: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs / lhs`
    pub ratio: f64,
    /// `lhs - rhs`; positive when a profile contradicts the inequality.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SqueezeReport {
    pub n: usize,
    pub rows: Vec<SqueezeRow>,
    /// `rhs` at the last scale over `rhs` at the first.
    pub rhs_decay: f64,
    /// Whether `ratio` strictly decreases from row to row.
    pub ratio_monotone: bool,
}

const PANELS: usize = 64;
const NODES: usize = 12;

/// Composite Gauss–Legendre on `[a, b]`.
fn integrate(a: f64, b: f64, f: &dyn Fn(f64) -> f64) -> f64 {
    let (x, w) = gauss_legendre(NODES);
    let width = (b - a) / PANELS as f64;
    (0..PANELS)
        .map(|k| {
            let left = a + width * k as f64;
            x.iter()
                .zip(&w)
                .map(|(x, w)| 0.5 * width * w * f(left + 0.5 * width * (x + 1.0)))
                .sum::<f64>()
        })
        .sum()
}

/// Evaluates both sides for the slice-energy profile `λ(t)` at each scale
/// `T`. Intervals are split at `0`, `±T` and `±2T`, so profiles with a kink
/// at the origin integrate accurately.
pub fn cutoff_squeeze(profile: impl Fn(f64) -> f64, n: usize, scales: &[f64]) -> Result<SqueezeReport> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!("need n ≥ 4, got {n}")));
    }
    if scales.is_empty() {
        return Err(Error::InvalidArgument("no cutoff scales".into()));
    }
    let c = n as f64 - 3.0;
    let mut rows = Vec::with_capacity(scales.len());
    for &scale in scales {
        let eta = CutoffProfile::new(scale)?;
        let weighted = |t: f64| eta.value(t) * c * profile(t);
        let lhs = integrate(-2.0 * scale, -scale, &weighted)
            + integrate(-scale, 0.0, &weighted)
            + integrate(0.0, scale, &weighted)
            + integrate(scale, 2.0 * scale, &weighted);
        let band = integrate(-2.0 * scale, -scale, &profile) + integrate(scale, 2.0 * scale, &profile);
        let rhs = 6.0 / scale * band;
        rows.push(SqueezeRow {
            scale,
            lhs,
            rhs,
            ratio: rhs / lhs,
            margin: lhs - rhs,
        });
    }
    let rhs_decay = rows[rows.len() - 1].rhs / rows[0].rhs;
    let ratio_monotone = rows.windows(2).all(|w| w[1].ratio < w[0].ratio);
    Ok(SqueezeReport {
        n,
        rows,
        rhs_decay,
        ratio_monotone,
    })
}
