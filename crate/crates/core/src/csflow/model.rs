use std::path::Path;

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::Deserialize;

use crate::{Error, Result};

/// `coefficient · Π φ_i^{exponents_i}`
#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct Monomial {
    pub coefficient: f64,
    pub exponents: Vec<u32>,
}

/// Finite-dimensional stand-in for a connection space: coordinates `φ`,
/// a polynomial potential `W(φ)` playing the role of the Chern–Simons
/// functional and a constant kinetic matrix `G` playing the role of the
/// `L²` metric.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedModel {
    pub n: usize,
    pub k: usize,
    pub w: Vec<Monomial>,
    pub g: DMatrix<f64>,
    /// Flow constant in `φ' = -c G⁻¹ ∇W`.
    pub c: f64,
    pub endpoints: Vec<Vec<f64>>,
    pub initial: Option<Vec<f64>>,
    g_inv: DMatrix<f64>,
}

/// The value of `c` for which `dW/dt = -2 φ'ᵀ G φ'` along every flow line.
///
/// With `φ' = -c G⁻¹∇W` one has `dW/dt = -c ∇Wᵀ G⁻¹ ∇W` and
/// `φ'ᵀ G φ' = c² ∇Wᵀ G⁻¹ ∇W`, so the contract fixes `c = ½`.
pub const CALIBRATED_C: f64 = 0.5;

const CRITICAL_TOL: f64 = 1e-10;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    n: usize,
    k: usize,
    #[serde(rename = "G")]
    g: Vec<f64>,
    #[serde(rename = "W")]
    w: Vec<Monomial>,
    endpoints: Vec<Vec<f64>>,
    initial: Option<Vec<f64>>,
    c: Option<f64>,
}

impl ReducedModel {
    /// Validates and builds a model with the calibrated flow constant.
    ///
    /// `g` is the kinetic matrix in row-major order.
    pub fn new(n: usize, w: Vec<Monomial>, g: &[f64], endpoints: Vec<Vec<f64>>) -> Result<Self> {
        let k = w.first().map(|m| m.exponents.len()).unwrap_or(0);
        Self::build(n, k, w, g, endpoints, None, CALIBRATED_C)
    }

    fn build(
        n: usize,
        k: usize,
        w: Vec<Monomial>,
        g: &[f64],
        endpoints: Vec<Vec<f64>>,
        initial: Option<Vec<f64>>,
        c: f64,
    ) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidModel(msg));
        if n < 4 {
            return bad(format!("base dimension must be at least 4, got {n}"));
        }
        if k == 0 {
            return bad("need at least one coordinate".into());
        }
        if w.is_empty() {
            return bad("potential W has no terms".into());
        }
        if let Some(m) = w.iter().find(|m| m.exponents.len() != k) {
            return bad(format!(
                "monomial {:?} has {} exponents, expected {k}",
                m.exponents,
                m.exponents.len()
            ));
        }
        if w.iter().any(|m| !m.coefficient.is_finite()) {
            return bad("non-finite coefficient in W".into());
        }
        if g.len() != k * k {
            return bad(format!("G has {} entries, expected {}", g.len(), k * k));
        }
        let gm = DMatrix::from_row_slice(k, k, g);
        if (&gm - gm.transpose()).amax() > 1e-12 * gm.amax().max(1.0) {
            return bad("G is not symmetric".into());
        }
        let Some(chol) = Cholesky::new(gm.clone()) else {
            return bad("G is not positive definite".into());
        };
        let g_inv = chol.inverse();
        if !(c.is_finite() && c != 0.0) {
            return bad(format!("flow constant must be finite and nonzero, got {c}"));
        }
        let model = ReducedModel {
            n,
            k,
            w,
            g: gm,
            c,
            endpoints,
            initial,
            g_inv,
        };
        for e in &model.endpoints {
            if e.len() != k {
                return bad(format!("endpoint {e:?} has the wrong length"));
            }
            let value = model.potential(e);
            let grad = model.gradient(e).amax();
            if value.abs() > CRITICAL_TOL || grad > CRITICAL_TOL {
                return bad(format!(
                    "endpoint {e:?} is not a flat critical point (W = {value:e}, |∇W| = {grad:e})"
                ));
            }
        }
        if let Some(x) = &model.initial {
            if x.len() != k {
                return bad(format!("initial state {x:?} has the wrong length"));
            }
        }
        Ok(model)
    }

    /// Parses the TOML model schema.
    pub fn from_toml(text: &str) -> Result<Self> {
        let f: ModelFile = toml::from_str(text).map_err(|e| Error::InvalidModel(e.message().to_string()))?;
        Self::build(f.n, f.k, f.w, &f.g, f.endpoints, f.initial, f.c.unwrap_or(CALIBRATED_C))
    }

    /// Same model with another flow constant.
    pub fn with_c(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c != 0.0) {
            return Err(Error::InvalidModel(format!(
                "flow constant must be finite and nonzero, got {c}"
            )));
        }
        Ok(ReducedModel { c, ..self.clone() })
    }

    /// Same potential and endpoints with another kinetic matrix.
    pub fn with_kinetic(&self, g: &[f64]) -> Result<Self> {
        Self::build(
            self.n,
            self.k,
            self.w.clone(),
            g,
            self.endpoints.clone(),
            self.initial.clone(),
            self.c,
        )
    }

    /// `W(φ)`
    pub fn potential(&self, phi: &[f64]) -> f64 {
        self.w
            .iter()
            .map(|m| {
                m.coefficient
                    * m.exponents
                        .iter()
                        .zip(phi)
                        .map(|(&e, x)| x.powi(e as i32))
                        .product::<f64>()
            })
            .sum()
    }

    /// `∇W(φ)`
    pub fn gradient(&self, phi: &[f64]) -> DVector<f64> {
        let mut out = DVector::zeros(self.k);
        for m in &self.w {
            for i in 0..self.k {
                let e = m.exponents[i];
                if e == 0 {
                    continue;
                }
                let mut term = m.coefficient * e as f64 * phi[i].powi(e as i32 - 1);
                for (j, (&ej, x)) in m.exponents.iter().zip(phi).enumerate() {
                    if j != i {
                        term *= x.powi(ej as i32);
                    }
                }
                out[i] += term;
            }
        }
        out
    }

    /// `φ' = -c G⁻¹ ∇W(φ)`
    pub fn velocity(&self, phi: &[f64]) -> DVector<f64> {
        &self.g_inv * self.gradient(phi) * (-self.c)
    }

    /// `φ'ᵀ G φ'`
    pub fn kinetic(&self, velocity: &DVector<f64>) -> f64 {
        velocity.dot(&(&self.g * velocity))
    }
}

/// Reads and validates a model file.
pub fn load_model(path: impl AsRef<Path>) -> Result<ReducedModel> {
    ReducedModel::from_toml(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOUBLE_WELL: &str = r#"
n = 6
k = 1
G = [0.16666666666666666]
endpoints = [[0.0], [1.0]]
initial = [0.1]

[[W]]
coefficient = 1.0
exponents = [2]

[[W]]
coefficient = -2.0
exponents = [3]

[[W]]
coefficient = 1.0
exponents = [4]
"#;

    #[test]
    fn parses_double_well() {
        let m = ReducedModel::from_toml(DOUBLE_WELL).unwrap();
        assert_eq!((m.n, m.k), (6, 1));
        assert_eq!(m.c, CALIBRATED_C);
        for x in [0.0, 0.3, 0.5, 0.9, 1.4] {
            let w = x * x * (1.0 - x) * (1.0 - x);
            assert!((m.potential(&[x]) - w).abs() < 1e-15);
            let dw = 2.0 * x * (1.0 - x) * (1.0 - 2.0 * x);
            assert!((m.gradient(&[x])[0] - dw).abs() < 1e-14);
        }
    }

    #[test]
    fn calibration_contract() {
        let m = ReducedModel::from_toml(DOUBLE_WELL).unwrap();
        let x = [0.13];
        let v = m.velocity(&x);
        let dw_dt = m.gradient(&x).dot(&v);
        assert!((dw_dt + 2.0 * m.kinetic(&v)).abs() < 1e-15);
    }

    #[test]
    fn rejections() {
        let empty = DOUBLE_WELL.split("[[W]]").next().unwrap();
        assert!(matches!(ReducedModel::from_toml(empty), Err(Error::InvalidModel(_))));
        let neg = DOUBLE_WELL.replace("G = [0.16666666666666666]", "G = [-1.0]");
        assert!(ReducedModel::from_toml(&neg).is_err());
        let off = DOUBLE_WELL.replace("[[0.0], [1.0]]", "[[0.0], [0.5]]");
        let err = ReducedModel::from_toml(&off).unwrap_err().to_string();
        assert!(err.contains("not a flat critical point"), "{err}");
        assert!(ReducedModel::from_toml("n = 6").is_err());
        let m = ReducedModel::from_toml(DOUBLE_WELL).unwrap();
        assert!(m.with_kinetic(&[10.0]).is_ok());
        assert!(m.with_c(0.0).is_err());
    }

    #[test]
    fn two_coordinates() {
        // W = x² y² has every point of both axes critical
        let w = vec![Monomial {
            coefficient: 1.0,
            exponents: vec![2, 2],
        }];
        let m = ReducedModel::new(5, w.clone(), &[2.0, 0.5, 0.5, 1.0], vec![vec![0.0, 3.0]]).unwrap();
        let g = m.gradient(&[1.5, -2.0]);
        assert!((g[0] - 2.0 * 1.5 * 4.0).abs() < 1e-14 && (g[1] - 2.0 * 2.25 * -2.0).abs() < 1e-14);
        assert!(ReducedModel::new(5, w, &[1.0, 2.0, 0.0, 1.0], vec![]).is_err());
    }
}
