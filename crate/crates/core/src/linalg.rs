//! Small dense linear algebra: a cyclic Jacobi eigensolver for symmetric
//! matrices and Gauss–Legendre nodes.

use nalgebra::{DMatrix, DVector};

/// Eigen-decomposition `A = V diag(λ) Vᵀ`, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub eigenvalues: DVector<f64>,
    /// Column `i` is the unit eigenvector for `eigenvalues[i]`.
    pub eigenvectors: DMatrix<f64>,
    pub sweeps: usize,
}

/// Cyclic Jacobi rotations until the off-diagonal mass drops below
/// `1e-15 · ‖A‖_F`. Intended for matrices up to a few dozen rows.
pub fn symmetric_eigen(a: &DMatrix<f64>) -> SymmetricEigen {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix must be square");
    let mut m = a.clone();
    // symmetrize so tiny asymmetries from assembly do not stall convergence
    for i in 0..n {
        for j in i + 1..n {
            let s = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = s;
            m[(j, i)] = s;
        }
    }
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = m.norm().max(f64::MIN_POSITIVE);
    let mut sweeps = 0;
    while sweeps < 100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| m[(i, i)]));
    let eigenvectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    SymmetricEigen {
        eigenvalues,
        eigenvectors,
        sweeps,
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub(crate) fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(m, x);
        dp = if d != 0.0 { d } else { dp };
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_matches_nalgebra() {
        let a = DMatrix::from_fn(9, 9, |i, j| ((i * 7 + j * 3) % 5) as f64 + ((j * 7 + i * 3) % 5) as f64);
        let ours = symmetric_eigen(&a);
        let mut theirs: Vec<f64> = a.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        theirs.sort_by(f64::total_cmp);
        for (x, y) in ours.eigenvalues.iter().zip(&theirs) {
            assert!((x - y).abs() < 1e-10, "{x} vs {y}");
        }
        let recon = &ours.eigenvectors * DMatrix::from_diagonal(&ours.eigenvalues) * ours.eigenvectors.transpose();
        assert!((recon - &a).amax() < 1e-11);
        let ortho = ours.eigenvectors.transpose() * &ours.eigenvectors;
        assert!((ortho - DMatrix::identity(9, 9)).amax() < 1e-12);
    }

    #[test]
    fn diagonal_input_needs_no_sweeps() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, -1.0, 2.0]));
        let e = symmetric_eigen(&a);
        assert_eq!(e.sweeps, 0);
        assert_eq!(e.eigenvalues.as_slice(), &[-1.0, 2.0, 3.0]);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(5);
        // exact through degree 9
        let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((integral - 2.0 / 9.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }
}
