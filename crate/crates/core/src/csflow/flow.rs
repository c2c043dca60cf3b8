use nalgebra::DVector;

use super::model::ReducedModel;
use crate::{Error, Result};

/// Coordinates beyond this size count as divergence.
const BLOW_UP: f64 = 1e6;

/// Estimate of the contribution of `[t_end, ∞)` to the tail integrals,
/// from exponential fits to the last stretch of the trajectory.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailEstimate {
    /// Fitted decay rate of `CS`.
    pub cs_rate: f64,
    /// Fitted decay rate of `‖Ȧ‖²`.
    pub kinetic_rate: f64,
    /// `∫_{t_end}^∞ CS`
    pub cs: f64,
    /// `∫_{t_end}^∞ ‖Ȧ‖²`
    pub kinetic: f64,
    /// Spread of the estimate between two fitting windows.
    pub error: f64,
}

impl TailEstimate {
    /// `∫_{t_end}^∞ (2‖Ȧ‖² - (n-3) CS)`
    pub fn energy(&self, n: usize) -> f64 {
        2.0 * self.kinetic - (n as f64 - 3.0) * self.cs
    }
}

/// A reduced gradient-flow trajectory with per-step energy diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub n: usize,
    pub dt: f64,
    pub t: Vec<f64>,
    pub phi: Vec<Vec<f64>>,
    /// `CS = W(φ)`
    pub cs: Vec<f64>,
    /// `dCS/dt = ∇W · φ'` evaluated from the state.
    pub cs_rate: Vec<f64>,
    /// `‖Ȧ‖² = φ'ᵀ G φ'`
    pub kinetic: Vec<f64>,
    /// `‖F_{A_T}‖² = ‖Ȧ‖² - (n-3) CS`
    pub curvature_energy: Vec<f64>,
    /// `∫_{t₀}^t (‖F_{A_T}‖² + ‖Ȧ‖²)`, integrated alongside the state.
    pub energy_integral: Vec<f64>,
    /// `∫_{t₀}^t CS`, integrated alongside the state.
    pub cs_integral: Vec<f64>,
    /// `J(T) = ∫_T^∞ ‖F_𝐀‖²`
    pub j: Vec<f64>,
    pub tail: TailEstimate,
    /// The state left every bounded region and integration stopped early.
    pub truncated: bool,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// `‖F_𝐀‖² = ‖F_{A_T}‖² + ‖Ȧ‖²` at every step.
    pub fn total_energy(&self) -> Vec<f64> {
        self.curvature_energy
            .iter()
            .zip(&self.kinetic)
            .map(|(f, k)| f + k)
            .collect()
    }

    /// `L_δ(T) = ∫_T^∞ e^{δt} ‖F_𝐀‖² dt`: trapezoid sums from the end of
    /// the grid plus the exponential tail. Infinite where the tail does not
    /// decay faster than `e^{-δt}`.
    pub fn l_delta(&self, delta: f64) -> Vec<f64> {
        let len = self.len();
        let g: Vec<f64> = self
            .total_energy()
            .iter()
            .zip(&self.t)
            .map(|(e, t)| (delta * t).exp() * e)
            .collect();
        let t_end = self.t[len - 1];
        let tail = if self.tail.kinetic_rate > delta && self.tail.cs_rate > delta {
            let c = self.n as f64 - 3.0;
            let kin = self.kinetic[len - 1] / (self.tail.kinetic_rate - delta);
            let cs = self.cs[len - 1] / (self.tail.cs_rate - delta);
            (delta * t_end).exp() * (2.0 * kin - c * cs)
        } else if self.kinetic[len - 1] == 0.0 && self.cs[len - 1] == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        let mut out = vec![0.0; len];
        out[len - 1] = tail;
        for i in (0..len - 1).rev() {
            out[i] = out[i + 1] + 0.5 * (self.t[i + 1] - self.t[i]) * (g[i] + g[i + 1]);
        }
        out
    }
}

struct Sample {
    cs: f64,
    rate: f64,
    kinetic: f64,
    velocity: DVector<f64>,
}

fn sample(model: &ReducedModel, phi: &[f64]) -> Sample {
    let velocity = model.velocity(phi);
    Sample {
        cs: model.potential(phi),
        rate: model.gradient(phi).dot(&velocity),
        kinetic: model.kinetic(&velocity),
        velocity,
    }
}

/// Right-hand side on the augmented state `(φ, ∫‖F_𝐀‖², ∫CS)`.
fn rhs(model: &ReducedModel, y: &[f64]) -> Vec<f64> {
    let k = model.k;
    let s = sample(model, &y[..k]);
    let mut out: Vec<f64> = s.velocity.iter().copied().collect();
    out.push(2.0 * s.kinetic - (model.n as f64 - 3.0) * s.cs);
    out.push(s.cs);
    out
}

fn rk4_step(model: &ReducedModel, y: &[f64], dt: f64) -> Vec<f64> {
    let shifted =
        |base: &[f64], k: &[f64], s: f64| -> Vec<f64> { base.iter().zip(k).map(|(a, b)| a + s * b).collect() };
    let k1 = rhs(model, y);
    let k2 = rhs(model, &shifted(y, &k1, 0.5 * dt));
    let k3 = rhs(model, &shifted(y, &k2, 0.5 * dt));
    let k4 = rhs(model, &shifted(y, &k3, dt));
    (0..y.len())
        .map(|i| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// Decay rate of a positive series over its last `fraction` of points.
fn tail_rate(t: &[f64], v: &[f64], fraction: f64) -> Option<f64> {
    let len = v.len();
    let start = ((len as f64) * (1.0 - fraction)) as usize;
    let (a, b) = (v[start.min(len - 2)], v[len - 1]);
    if a > 0.0 && b > 0.0 && a > b {
        Some((a / b).ln() / (t[len - 1] - t[start.min(len - 2)]))
    } else {
        None
    }
}

fn estimate_tail(t: &[f64], cs: &[f64], kinetic: &[f64]) -> TailEstimate {
    let len = t.len();
    let (cs_end, kin_end) = (cs[len - 1], kinetic[len - 1]);
    if len < 3 || (cs_end == 0.0 && kin_end == 0.0) {
        return TailEstimate {
            cs_rate: f64::INFINITY,
            kinetic_rate: f64::INFINITY,
            cs: 0.0,
            kinetic: 0.0,
            error: 0.0,
        };
    }
    let fit = |v: &[f64], end: f64| -> (f64, f64, f64) {
        match (tail_rate(t, v, 0.25), tail_rate(t, v, 0.1)) {
            (Some(a), Some(b)) => (b, end / b, (end / a - end / b).abs()),
            _ => (0.0, f64::INFINITY, f64::INFINITY),
        }
    };
    let (cs_rate, cs_tail, cs_err) = fit(cs, cs_end);
    let (kinetic_rate, kin_tail, kin_err) = fit(kinetic, kin_end);
    TailEstimate {
        cs_rate,
        kinetic_rate,
        cs: cs_tail,
        kinetic: kin_tail,
        error: cs_err + kin_err,
    }
}

/// Integrates `φ' = -c G⁻¹ ∇W(φ)` with classical RK4 from `φ₀` on
/// `[0, t_end]`. The number of steps is `t_end / dt` rounded, so the step
/// actually used may differ slightly from `dt`.
///
/// The energy integrals ride along as extra state components, so `J` is
/// as accurate as the trajectory itself.
pub fn flow_integrate(model: &ReducedModel, phi0: &[f64], t_end: f64, dt: f64) -> Result<Trajectory> {
    if phi0.len() != model.k {
        return Err(Error::DimensionMismatch(phi0.len(), model.k));
    }
    if !(dt > 0.0 && t_end > 0.0 && dt.is_finite() && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need positive finite dt and t_end, got {dt} and {t_end}"
        )));
    }
    let steps = ((t_end / dt).round() as usize).max(4);
    let h = t_end / steps as f64;
    let k = model.k;
    let c = model.n as f64 - 3.0;

    let mut y: Vec<f64> = phi0.to_vec();
    y.extend([0.0, 0.0]);
    let mut traj = Trajectory {
        n: model.n,
        dt: h,
        t: Vec::with_capacity(steps + 1),
        phi: Vec::with_capacity(steps + 1),
        cs: Vec::with_capacity(steps + 1),
        cs_rate: Vec::with_capacity(steps + 1),
        kinetic: Vec::with_capacity(steps + 1),
        curvature_energy: Vec::with_capacity(steps + 1),
        energy_integral: Vec::with_capacity(steps + 1),
        cs_integral: Vec::with_capacity(steps + 1),
        j: Vec::new(),
        tail: estimate_tail(&[0.0], &[0.0], &[0.0]),
        truncated: false,
    };
    for i in 0..=steps {
        let s = sample(model, &y[..k]);
        traj.t.push(i as f64 * h);
        traj.phi.push(y[..k].to_vec());
        traj.cs.push(s.cs);
        traj.cs_rate.push(s.rate);
        traj.kinetic.push(s.kinetic);
        traj.curvature_energy.push(s.kinetic - c * s.cs);
        traj.energy_integral.push(y[k]);
        traj.cs_integral.push(y[k + 1]);
        if i == steps {
            break;
        }
        let next = rk4_step(model, &y, h);
        if next.iter().any(|v| !v.is_finite()) || next[..k].iter().any(|v| v.abs() > BLOW_UP) {
            traj.truncated = true;
            break;
        }
        y = next;
    }
    traj.tail = estimate_tail(&traj.t, &traj.cs, &traj.kinetic);
    let last = traj.len() - 1;
    let total = traj.energy_integral[last] + traj.tail.energy(model.n);
    traj.j = traj.energy_integral.iter().map(|e| total - e).collect();
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csflow::model::Monomial;

    fn double_well(g: f64) -> ReducedModel {
        let w = [(1.0, 2), (-2.0, 3), (1.0, 4)]
            .iter()
            .map(|&(c, e)| Monomial {
                coefficient: c,
                exponents: vec![e],
            })
            .collect();
        ReducedModel::new(6, w, &[g], vec![vec![0.0], vec![1.0]]).unwrap()
    }

    #[test]
    fn endpoint_is_stationary() {
        let m = double_well(1.0 / 6.0);
        for e in [0.0, 1.0] {
            let tr = flow_integrate(&m, &[e], 1.0, 1e-2).unwrap();
            assert!(tr.phi.iter().all(|p| p[0] == e));
            assert!(tr.cs.iter().chain(&tr.kinetic).chain(&tr.j).all(|v| *v == 0.0));
        }
    }

    #[test]
    fn linear_decay_rate() {
        // near 0, W ≈ φ² and φ' ≈ -6φ, so φ(t) ≈ φ₀ e^{-6t}
        let m = double_well(1.0 / 6.0);
        let tr = flow_integrate(&m, &[1e-6], 1.0, 1e-3).unwrap();
        let phi1 = tr.phi.last().unwrap()[0];
        assert!((phi1 / (1e-6 * (-6.0f64).exp()) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn calibration_along_the_flow() {
        let m = double_well(1.0 / 6.0);
        let tr = flow_integrate(&m, &[0.1], 1.0, 1e-3).unwrap();
        for i in 0..tr.len() {
            assert!((tr.cs_rate[i] + 2.0 * tr.kinetic[i]).abs() < 1e-15);
        }
        assert!(tr.cs.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn reversed_constant_climbs() {
        let m = double_well(1.0 / 6.0).with_c(-0.5).unwrap();
        let tr = flow_integrate(&m, &[0.1], 0.2, 1e-3).unwrap();
        assert!(tr.cs.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn divergence_truncates() {
        // W = -φ⁴ blows up in finite time
        let w = vec![Monomial {
            coefficient: -1.0,
            exponents: vec![4],
        }];
        let m = ReducedModel::new(6, w, &[1.0], vec![vec![0.0]]).unwrap();
        let tr = flow_integrate(&m, &[1.0], 10.0, 1e-3).unwrap();
        assert!(tr.truncated);
        assert!(tr.t.last().unwrap() < &10.0);
    }

    #[test]
    fn tail_of_an_exponential() {
        let t: Vec<f64> = (0..=1000).map(|i| i as f64 * 1e-3).collect();
        let v: Vec<f64> = t.iter().map(|t| (-5.0 * t).exp()).collect();
        let tail = estimate_tail(&t, &v, &v);
        assert!((tail.cs_rate - 5.0).abs() < 1e-9);
        assert!((tail.cs - (-5.0f64).exp() / 5.0).abs() < 1e-12);
        assert!(tail.error < 1e-12);
    }
}
