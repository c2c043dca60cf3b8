use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::exterior::MetricFrame;
use crate::{Error, Result};

type VectorFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GramFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// A vector field `X` on a chart with metric `g`, together with the factor
/// `f` of `L_X g = 2 f g`.
#[derive(Clone)]
pub struct ConformalField {
    dim: usize,
    x: VectorFn,
    f: ScalarFn,
    gram: GramFn,
    flat: bool,
}

impl fmt::Debug for ConformalField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConformalField")
            .field("dim", &self.dim)
            .field("flat", &self.flat)
            .finish_non_exhaustive()
    }
}

impl ConformalField {
    /// Field, claimed factor and metric Gram matrix as functions of the
    /// chart point. Nothing is checked here; see
    /// [`ConformalField::conformality_residual`].
    pub fn new<X, F, G>(dim: usize, x: X, f: F, gram: G) -> Self
    where
        X: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        G: Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    {
        ConformalField {
            dim,
            x: Arc::new(x),
            f: Arc::new(f),
            gram: Arc::new(gram),
            flat: false,
        }
    }

    /// `X = Σ xⁱ ∂ᵢ` on flat `ℝ^dim`, with `f = 1`.
    pub fn dilation(dim: usize) -> Self {
        ConformalField {
            flat: true,
            ..Self::new(dim, |p| p.to_vec(), |_| 1.0, move |_| DMatrix::identity(dim, dim))
        }
    }

    /// `X = ∂_t` for the cone metric `e^{2t}(dt² + Σ dyᵢ²)` in coordinates
    /// `(t, y)`, with `f = 1`.
    pub fn cone_time(dim: usize) -> Self {
        Self::new(
            dim,
            move |_| {
                let mut v = vec![0.0; dim];
                v[0] = 1.0;
                v
            },
            |_| 1.0,
            move |p| DMatrix::identity(dim, dim) * (2.0 * p[0]).exp(),
        )
    }

    /// A constant field on flat space; `f = 0`.
    pub fn translation(v: Vec<f64>) -> Self {
        let dim = v.len();
        ConformalField {
            flat: true,
            ..Self::new(dim, move |_| v.clone(), |_| 0.0, move |_| DMatrix::identity(dim, dim))
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vector(&self, p: &[f64]) -> Vec<f64> {
        (self.x)(p)
    }

    pub fn factor(&self, p: &[f64]) -> f64 {
        (self.f)(p)
    }

    pub fn gram(&self, p: &[f64]) -> DMatrix<f64> {
        (self.gram)(p)
    }

    /// The chart metric at `p`, standard orientation.
    pub fn metric_at(&self, p: &[f64]) -> Result<MetricFrame> {
        if self.flat {
            Ok(MetricFrame::identity(self.dim))
        } else {
            MetricFrame::with_gram(self.gram(p))
        }
    }

    /// A closure evaluating `X`, for handing to field combinators.
    pub fn vector_fn(&self) -> impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static {
        let x = Arc::clone(&self.x);
        move |p| x(p)
    }

    /// `max_{ij} |(L_X g)_{ij} - 2 f g_{ij}| / max_{ij} |g_{ij}|` at `p`, with
    /// `(L_X g)_{ij} = X^k ∂_k g_{ij} + g_{kj} ∂_i X^k + g_{ik} ∂_j X^k`
    /// and every derivative a central difference of step `h`.
    pub fn conformality_residual(&self, p: &[f64], h: f64) -> Result<f64> {
        if p.len() != self.dim {
            return Err(Error::DimensionMismatch(p.len(), self.dim));
        }
        if !(h > 0.0) {
            return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
        }
        let d = self.dim;
        let x = self.vector(p);
        let g = self.gram(p);
        let mut dg = Vec::with_capacity(d);
        // dx[(k, i)] = ∂_i X^k
        let mut dx = DMatrix::zeros(d, d);
        let mut q = p.to_vec();
        for i in 0..d {
            q[i] = p[i] + h;
            let (gp, xp) = (self.gram(&q), self.vector(&q));
            q[i] = p[i] - h;
            let (gm, xm) = (self.gram(&q), self.vector(&q));
            q[i] = p[i];
            dg.push((gp - gm) / (2.0 * h));
            for k in 0..d {
                dx[(k, i)] = (xp[k] - xm[k]) / (2.0 * h);
            }
        }
        let f = self.factor(p);
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let mut lie = 0.0;
                for k in 0..d {
                    lie += x[k] * dg[k][(i, j)] + g[(k, j)] * dx[(k, i)] + g[(i, k)] * dx[(k, j)];
                }
                worst = worst.max((lie - 2.0 * f * g[(i, j)]).abs());
            }
        }
        Ok(worst / g.amax())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_fields_are_conformal() {
        let p = [0.3, -0.7, 1.1, 0.2, -0.4, 0.9, 0.5];
        assert!(ConformalField::dilation(7).conformality_residual(&p, 1e-5).unwrap() < 1e-9);
        assert!(ConformalField::cone_time(7).conformality_residual(&p, 1e-5).unwrap() < 1e-9);
        let tr = ConformalField::translation(vec![1.0, 2.0, -0.5]);
        assert!(tr.conformality_residual(&p[..3], 1e-4).unwrap() < 1e-12);
    }

    #[test]
    fn wrong_factor_is_caught() {
        let bad = ConformalField::new(3, |p| p.to_vec(), |_| 0.5, |_| DMatrix::identity(3, 3));
        let r = bad.conformality_residual(&[0.1, 0.2, 0.3], 1e-4).unwrap();
        assert!((r - 1.0).abs() < 1e-9, "{r}");
        // a rotation is Killing, a shear is not conformal at all
        let rot = ConformalField::new(2, |p| vec![-p[1], p[0]], |_| 0.0, |_| DMatrix::identity(2, 2));
        assert!(rot.conformality_residual(&[0.4, 0.8], 1e-4).unwrap() < 1e-10);
        let shear = ConformalField::new(2, |p| vec![p[1], 0.0], |_| 0.0, |_| DMatrix::identity(2, 2));
        assert!(shear.conformality_residual(&[0.4, 0.8], 1e-4).unwrap() > 0.5);
    }

    #[test]
    fn metric_at_matches_gram() {
        let c = ConformalField::cone_time(4);
        let m = c.metric_at(&[0.5, 0.0, 0.0, 0.0]).unwrap();
        assert!((m.gram() - DMatrix::identity(4, 4) * 1f64.exp()).amax() < 1e-14);
    }
}
