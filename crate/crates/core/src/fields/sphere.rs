use nalgebra::DMatrix;

use super::chart::{norm, FormField, Point};
use crate::exterior::{Coefficient, Form, Multiform};
use crate::{Error, Result};

/// A point `x = r·n` together with the outward normal `n` and an
/// orthonormal basis of `T_n S^{N-1}`, oriented so that
/// `det[n, v_1, …, v_{N-1}] = +1`.
#[derive(Clone, Debug, PartialEq)]
pub struct FramedPoint {
    pub point: Point,
    pub radius: f64,
    pub normal: Vec<f64>,
    pub frame: Vec<Vec<f64>>,
}

/// Frame at a point of the unit sphere.
pub fn sphere_frame(p: &[f64]) -> Result<FramedPoint> {
    let r = norm(p);
    if (r - 1.0).abs() > 1e-9 {
        return Err(Error::NotOnSphere(r));
    }
    FramedPoint::at(p)
}

impl FramedPoint {
    /// Frame at an arbitrary nonzero point; the frame belongs to the
    /// sphere of radius `|x|`.
    ///
    /// Gram–Schmidt runs over the coordinate axes in increasing order,
    /// skipping the axis where `|n_i|` is largest. If the result is
    /// negatively oriented the last vector is flipped.
    pub fn at(x: &[f64]) -> Result<Self> {
        let dim = x.len();
        let r = norm(x);
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidArgument("cannot frame the origin".into()));
        }
        if dim < 2 {
            return Err(Error::InvalidArgument("sphere frames need dimension ≥ 2".into()));
        }
        let normal: Vec<f64> = x.iter().map(|v| v / r).collect();
        let skip = (0..dim)
            .max_by(|&a, &b| normal[a].abs().total_cmp(&normal[b].abs()).then(b.cmp(&a)))
            .expect("dimension is positive");
        let mut basis: Vec<Vec<f64>> = vec![normal.clone()];
        for axis in (0..dim).filter(|&i| i != skip) {
            let mut v = vec![0.0; dim];
            v[axis] = 1.0;
            // two passes keep the frame orthonormal to rounding
            for _ in 0..2 {
                for b in &basis {
                    let c: f64 = v.iter().zip(b).map(|(a, b)| a * b).sum();
                    v.iter_mut().zip(b).for_each(|(a, b)| *a -= c * b);
                }
            }
            let len = norm(&v);
            v.iter_mut().for_each(|a| *a /= len);
            basis.push(v);
        }
        let m = DMatrix::from_fn(dim, dim, |i, j| basis[j][i]);
        if m.determinant() < 0.0 {
            basis[dim - 1].iter_mut().for_each(|a| *a = -*a);
        }
        let frame = basis.split_off(1);
        Ok(FramedPoint {
            point: x.to_vec(),
            radius: r,
            normal,
            frame,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.point.len()
    }

    /// `det[n, v_1, …]`
    pub fn orientation(&self) -> f64 {
        let dim = self.ambient_dim();
        DMatrix::from_fn(
            dim,
            dim,
            |i, j| if j == 0 { self.normal[i] } else { self.frame[j - 1][i] },
        )
        .determinant()
    }

    /// Pullback matrix of `ι_r : S^{N-1} → ℝ^N, u ↦ r u`, in the layout of
    /// [`Multiform::change_basis`].
    fn pullback_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.ambient_dim(), self.ambient_dim() - 1, |i, a| {
            self.radius * self.frame[a][i]
        })
    }

    /// Pulls a form at `self.point` back to the sphere; components along
    /// the normal drop out.
    pub fn pullback<C: Coefficient>(&self, form: &Multiform<C>) -> Result<Multiform<C>> {
        form.change_basis(&self.pullback_matrix())
    }

    /// Extends a sphere form radially: the sphere coframe becomes
    /// `θ^a = r^{-1} Σ_i (v_a)_i dx^i`.
    pub fn push_tangential<C: Coefficient>(&self, form: &Multiform<C>) -> Result<Multiform<C>> {
        let m = DMatrix::from_fn(self.ambient_dim() - 1, self.ambient_dim(), |a, i| {
            self.frame[a][i] / self.radius
        });
        form.change_basis(&m)
    }

    /// `dr = Σ n_i dx^i`
    pub fn dr(&self) -> Form {
        let mut out = Form::zero(self.ambient_dim());
        for (i, n) in self.normal.iter().enumerate() {
            out = out.add_scaled(&Form::one_form(self.ambient_dim(), i), *n);
        }
        out
    }
}

/// Tangential restriction `i*F` of an ambient field at `fp`.
pub fn pullback_sphere<C: Coefficient>(field: &FormField<C>, fp: &FramedPoint) -> Result<Multiform<C>> {
    fp.pullback(&field.evaluate(&fp.point))
}

/// Splits `Φ` at `fp` into sphere forms `(P, Q)` with
/// `Φ = r^{w-1} dr ∧ P + r^w Q` there:
/// `P = r^{-w} i*(i_E Φ)`, `Q = r^{-w} i*Φ`, `E = Σ x^i ∂_i`.
pub fn euler_split<C: Coefficient>(
    field: &FormField<C>,
    fp: &FramedPoint,
    weight: i32,
) -> Result<(Multiform<C>, Multiform<C>)> {
    split_form(&field.evaluate(&fp.point), fp, weight)
}

/// [`euler_split`] for a form already evaluated at `fp.point`.
pub fn split_form<C: Coefficient>(
    phi: &Multiform<C>,
    fp: &FramedPoint,
    weight: i32,
) -> Result<(Multiform<C>, Multiform<C>)> {
    if fp.radius == 0.0 {
        return Err(Error::InvalidArgument("euler split at the origin".into()));
    }
    let s = fp.radius.powi(-weight);
    let p = fp.pullback(&phi.interior(&fp.point)?)?.scale(s);
    let q = fp.pullback(phi)?.scale(s);
    Ok((p, q))
}

/// Inverse of [`euler_split`]: `r^{w-1} dr ∧ P + r^w Q` at `fp`.
pub fn reconstruct<C: Coefficient>(
    p: &Multiform<C>,
    q: &Multiform<C>,
    fp: &FramedPoint,
    weight: i32,
) -> Result<Multiform<C>> {
    let r = fp.radius;
    let radial = fp.dr().wedge_into(&fp.push_tangential(p)?)?.scale(r.powi(weight - 1));
    Ok(radial.add_scaled(&fp.push_tangential(q)?, r.powi(weight)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{hodge, Blade, MetricFrame};
    use crate::fields::ChartDomain;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r = norm(&v);
        v.into_iter().map(|x| x / r).collect()
    }

    #[test]
    fn north_pole_frame_is_coordinate_axes() {
        let mut p = vec![0.0; 7];
        p[6] = 1.0;
        let fp = sphere_frame(&p).unwrap();
        for (a, v) in fp.frame.iter().enumerate() {
            let mut e = vec![0.0; 7];
            e[a] = 1.0;
            assert_eq!(v, &e);
        }
        assert!((fp.orientation() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_frames_are_orthonormal_and_oriented() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for dim in 2..=8 {
            for _ in 0..20 {
                let fp = sphere_frame(&random_unit(&mut rng, dim)).unwrap();
                let mut all = fp.frame.clone();
                all.push(fp.normal.clone());
                for (i, a) in all.iter().enumerate() {
                    for (j, b) in all.iter().enumerate() {
                        let g: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                        let want = if i == j { 1.0 } else { 0.0 };
                        assert!((g - want).abs() < 1e-12);
                    }
                }
                assert!((fp.orientation() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn off_sphere_points_are_rejected() {
        assert!(matches!(sphere_frame(&[0.0, 2.0]), Err(Error::NotOnSphere(_))));
        assert!(FramedPoint::at(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn pullback_kills_normal_directions() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let fp = sphere_frame(&random_unit(&mut rng, 5)).unwrap();
        assert!(fp.pullback(&fp.dr()).unwrap().max_abs() < 1e-15);
        assert!(fp.pullback(&Form::volume(5)).unwrap().is_zero());
        // the sphere volume is i_n of the ambient one
        let vs = fp.pullback(&Form::volume(5).interior(&fp.normal).unwrap()).unwrap();
        assert!((vs.top_coefficient() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn split_and_reconstruct_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut phi = Form::zero(6);
        for b in Blade::all_of_grade(6, 3) {
            phi.add_term(b, &rng.random_range(-1.0..1.0), 1.0);
        }
        for _ in 0..10 {
            let u = random_unit(&mut rng, 6);
            let r = rng.random_range(0.5..2.0);
            let x: Vec<f64> = u.iter().map(|v| v * r).collect();
            let fp = FramedPoint::at(&x).unwrap();
            for w in [3, 4, -1] {
                let (p, q) = split_form(&phi, &fp, w).unwrap();
                let back = reconstruct(&p, &q, &fp, w).unwrap();
                assert!((&back - &phi).max_abs() < 1e-13);
                // i_E of the reconstruction gives r^w P again
                let ie = fp.pullback(&back.interior(&x).unwrap()).unwrap();
                assert!((&ie - &p.scale(r.powi(w))).max_abs() < 1e-12);
            }
        }
    }

    #[test]
    fn purely_tangential_form_has_no_p_part() {
        let mut p = vec![0.0; 4];
        p[0] = 1.0;
        let fp = sphere_frame(&p).unwrap();
        let phi = Form::from_monomials(4, &[(1.0, &[1, 2]), (2.0, &[2, 3])]);
        let (pp, qp) = split_form(&phi, &fp, 2).unwrap();
        assert!(pp.is_zero());
        assert_eq!(qp.len(), 2);
    }

    #[test]
    fn euler_split_of_field() {
        let dom = ChartDomain::sphere(3, 0.5, 1e-3).unwrap();
        let vol = FormField::constant(dom, Form::volume(3));
        let fp = sphere_frame(&[0.0, 0.6, 0.8]).unwrap();
        let (p, q) = euler_split(&vol, &fp, 3).unwrap();
        assert!(q.is_zero());
        let star = hodge(&Form::scalar(2, 1.0), &MetricFrame::identity(2)).unwrap();
        assert!((&p - &star).max_abs() < 1e-14);
        assert!(pullback_sphere(&vol, &fp).unwrap().is_zero());
    }
}
