use super::flow::Trajectory;
use crate::{Check, Error, Result};

/// Settings for [`decay_diagnostics`].
#[derive(Clone, Debug, PartialEq)]
pub struct DecayOptions {
    /// Exponents for `L_δ`, each in `(0, 2n-6)`.
    pub deltas: Vec<f64>,
    /// Tail fits use the steps where `CS` lies in this range.
    pub window: (f64, f64),
    /// Allowance on fitted slopes.
    pub slope_tol: f64,
    /// Allowance on the pointwise identities.
    pub identity_tol: f64,
}

impl Default for DecayOptions {
    fn default() -> Self {
        DecayOptions {
            deltas: vec![1.0, 3.0, 5.0],
            window: (1e-10, 1e-3),
            slope_tol: 0.05,
            identity_tol: 1e-8,
        }
    }
}

/// Tail fit of `L_δ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LDeltaFit {
    pub delta: f64,
    pub slope: f64,
    /// `δ - 2n + 6`
    pub bound_slope: f64,
    /// `sup_T L_δ(T) e^{-(δ-2n+6)T}` over the grid.
    pub constant: f64,
}

/// Every identity, inequality and rate along a converged trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayReport {
    pub n: usize,
    pub dt: f64,
    /// Final `CS` below the lower end of the fit window, without blow-up.
    pub converged: bool,
    /// `max |J' - CS' - (n-3) CS|`, derivatives by 5-point differences.
    pub identity_i: f64,
    /// `max |J' + 2‖F_{A_T}‖² + (n-3) CS|`
    pub identity_ii: f64,
    /// `max |J' + 2‖Ȧ‖² - (n-3) CS|`
    pub identity_iii: f64,
    /// `min_T -(CS' + 2(n-3) CS)`; nonnegative when the inequality holds.
    pub margin_iv: f64,
    /// `min_T -CS'`
    pub margin_v: f64,
    /// `min_T CS`
    pub cs_min: f64,
    /// Log-linear slope of the `CS` tail.
    pub cs_slope: f64,
    /// `-(2n - 6)`
    pub cs_bound_slope: f64,
    /// `sup_T CS(T) e^{(2n-6)T}` over the grid.
    pub cs_constant: f64,
    pub l_delta: Vec<LDeltaFit>,
    /// `max |CS(T) - CS(t₀) + ∫(‖F_{A_T}‖² + ‖Ȧ‖²) + (n-3)∫CS|`
    pub telescoping: f64,
    /// `min_T J(T)`
    pub j_min: f64,
    /// `min_T ‖F_{A_T}‖²`
    pub curvature_energy_min: f64,
    /// Steps inside the fit window.
    pub window_points: usize,
    /// Error bar of `J` coming from the tail beyond the grid.
    pub tail_error: f64,
    pub options: DecayOptions,
}

/// Least-squares slope of `ln y` against `t`; `NaN` with fewer than three
/// points or any nonpositive value.
pub fn log_slope(t: &[f64], y: &[f64]) -> f64 {
    if t.len() < 3 || y.iter().any(|v| !(*v > 0.0)) {
        return f64::NAN;
    }
    let m = t.len() as f64;
    let tm = t.iter().sum::<f64>() / m;
    let lm = y.iter().map(|v| v.ln()).sum::<f64>() / m;
    let (mut num, mut den) = (0.0, 0.0);
    for (ti, yi) in t.iter().zip(y) {
        num += (ti - tm) * (yi.ln() - lm);
        den += (ti - tm) * (ti - tm);
    }
    num / den
}

/// Fourth-order central difference at the interior steps `2..len-2`.
fn derivative(v: &[f64], dt: f64) -> Vec<(usize, f64)> {
    (2..v.len().saturating_sub(2))
        .map(|i| {
            (
                i,
                (-v[i + 2] + 8.0 * v[i + 1] - 8.0 * v[i - 1] + v[i - 2]) / (12.0 * dt),
            )
        })
        .collect()
}

fn max_abs(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, |m, v| if v.is_nan() { f64::NAN } else { m.max(v.abs()) })
}

/// Runs the full decay suite on a trajectory. A trajectory that blew up or
/// stopped short of the fit window yields a report with `converged =
/// false`; its checks are still computed on the available grid.
pub fn decay_diagnostics(traj: &Trajectory, options: &DecayOptions) -> Result<DecayReport> {
    if traj.len() < 8 {
        return Err(Error::InvalidArgument(
            "trajectory too short for 5-point differences".into(),
        ));
    }
    let n = traj.n;
    let c = n as f64 - 3.0;
    let top = 2.0 * n as f64 - 6.0;
    if let Some(d) = options.deltas.iter().find(|d| !(**d > 0.0 && **d < top)) {
        return Err(Error::InvalidArgument(format!("δ = {d} outside (0, {top})")));
    }
    let len = traj.len();
    let dt = traj.dt;
    let dj = derivative(&traj.j, dt);
    let dcs = derivative(&traj.cs, dt);
    let identity_i = max_abs(dj.iter().zip(&dcs).map(|(&(i, j), &(_, s))| j - s - c * traj.cs[i]));
    let identity_ii = max_abs(
        dj.iter()
            .map(|&(i, j)| j + 2.0 * traj.curvature_energy[i] + c * traj.cs[i]),
    );
    let identity_iii = max_abs(dj.iter().map(|&(i, j)| j + 2.0 * traj.kinetic[i] - c * traj.cs[i]));

    let margin_iv = (0..len)
        .map(|i| -(traj.cs_rate[i] + 2.0 * c * traj.cs[i]))
        .fold(f64::INFINITY, f64::min);
    let margin_v = traj.cs_rate.iter().map(|v| -v).fold(f64::INFINITY, f64::min);
    let cs_min = traj.cs.iter().copied().fold(f64::INFINITY, f64::min);

    let (lo, hi) = options.window;
    let window: Vec<usize> = (0..len).filter(|&i| traj.cs[i] >= lo && traj.cs[i] <= hi).collect();
    let wt: Vec<f64> = window.iter().map(|&i| traj.t[i]).collect();
    let pick = |v: &[f64]| -> Vec<f64> { window.iter().map(|&i| v[i]).collect() };
    let cs_slope = log_slope(&wt, &pick(&traj.cs));
    let cs_constant = (0..len)
        .map(|i| traj.cs[i] * (top * traj.t[i]).exp())
        .fold(0.0, f64::max);

    let l_delta = options
        .deltas
        .iter()
        .map(|&delta| {
            let l = traj.l_delta(delta);
            let bound_slope = delta - top;
            LDeltaFit {
                delta,
                slope: log_slope(&wt, &pick(&l)),
                bound_slope,
                constant: (0..len)
                    .map(|i| l[i] * (-bound_slope * traj.t[i]).exp())
                    .fold(0.0, f64::max),
            }
        })
        .collect();

    let telescoping = max_abs((0..len).map(|i| {
        let lhs = traj.cs[i] - traj.cs[0];
        let rhs =
            -(traj.energy_integral[i] - traj.energy_integral[0]) - c * (traj.cs_integral[i] - traj.cs_integral[0]);
        lhs - rhs
    }));

    Ok(DecayReport {
        n,
        dt,
        converged: !traj.truncated && traj.cs[len - 1].abs() < lo,
        identity_i,
        identity_ii,
        identity_iii,
        margin_iv,
        margin_v,
        cs_min,
        cs_slope,
        cs_bound_slope: -top,
        cs_constant,
        l_delta,
        telescoping,
        j_min: traj.j.iter().copied().fold(f64::INFINITY, f64::min),
        curvature_energy_min: traj.curvature_energy.iter().copied().fold(f64::INFINITY, f64::min),
        window_points: window.len(),
        tail_error: traj.tail.error,
        options: options.clone(),
    })
}

impl DecayReport {
    /// Inconclusive reports say nothing about the asymptotic statements.
    pub fn inconclusive(&self) -> bool {
        !self.converged
    }

    /// The report as individual checks.
    pub fn checks(&self) -> Vec<Check> {
        let o = &self.options;
        let mut out = vec![
            Check::at_least(
                "converged",
                "CS(A_inf) = 0",
                if self.converged { 1.0 } else { 0.0 },
                1.0,
            ),
            Check::at_most(
                "identity (i)",
                "dJ/dT = dCS/dT + (n-3) CS",
                self.identity_i,
                o.identity_tol,
            ),
            Check::at_most(
                "identity (ii)",
                "dJ/dT = -2 |F_A|^2 - (n-3) CS",
                self.identity_ii,
                o.identity_tol,
            ),
            Check::at_most(
                "identity (iii)",
                "dJ/dT = -2 |dA/dt|^2 + (n-3) CS",
                self.identity_iii,
                o.identity_tol,
            ),
            Check::at_least("inequality (iv)", "dCS/dT + 2(n-3) CS <= 0", self.margin_iv, 0.0),
            Check::at_least("inequality (v)", "dCS/dT <= 0", self.margin_v, 0.0),
            Check::at_least("CS nonnegative", "0 <= CS(T)", self.cs_min, 0.0),
            Check::at_most(
                "CS tail slope",
                "CS(T) <= C exp(-(2n-6) T)",
                self.cs_slope,
                self.cs_bound_slope + o.slope_tol,
            ),
        ];
        for f in &self.l_delta {
            out.push(Check::at_most(
                format!("L_delta slope, delta = {}", f.delta),
                "L_delta(T) <= C exp((delta - 2n + 6) T)",
                f.slope,
                f.bound_slope + o.slope_tol,
            ));
        }
        out.push(Check::at_most(
            "telescoping identity",
            "CS(T) - CS(T') = -int |F|^2 - (n-3) int CS",
            self.telescoping,
            o.identity_tol,
        ));
        out
    }
}
