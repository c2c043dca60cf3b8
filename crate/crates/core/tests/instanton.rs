use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use holoflow::exterior::{inner, Blade, Form, MetricFrame};
use holoflow::fields::{ChartDomain, FormField};
use holoflow::gauge::{su2_generators, u1_generator, GaugeForm, LieElement};
use holoflow::instanton::{
    build_operator, cylinder_curvature, cylinder_split_residual, split_cylinder_form, ym_identity_check,
};
use holoflow::structures::{build_cone, build_cylinder, catalog, StructureName};

fn random_two_form(rng: &mut ChaCha8Rng, dim: usize) -> Form {
    let mut f = Form::zero(dim);
    for b in Blade::all_of_grade(dim, 2) {
        f.add_term(b, &rng.random_range(-1.0..1.0), 1.0);
    }
    f
}

fn random_one_form(rng: &mut ChaCha8Rng, dim: usize) -> Form {
    let mut f = Form::zero(dim);
    for i in 0..dim {
        f.add_term(Blade::basis(i), &rng.random_range(-1.0..1.0), 1.0);
    }
    f
}

fn cylinder_operator(name: StructureName) -> holoflow::instanton::CurvatureOperator {
    let cyl = build_cylinder(&catalog(name));
    build_operator(&cyl.q_z, &MetricFrame::identity(cyl.n + 1)).unwrap()
}

#[test]
fn nearly_kahler_cylinder_spectrum() {
    let op = cylinder_operator(StructureName::Nk6);
    let spec = op.spectrum();
    let m = spec.multiplicities();
    assert_eq!(m.len(), 2);
    assert!((m[0].0 + 1.0).abs() < 1e-12 && m[0].1 == 14, "{m:?}");
    assert!((m[1].0 - 2.0).abs() < 1e-12 && m[1].1 == 7, "{m:?}");
    assert!(spec.max_residual < 1e-9);
    assert!(spec.trace().abs() < 1e-12);
    assert!((op.matrix.trace() - spec.trace()).abs() < 1e-12);
}

#[test]
fn nearly_parallel_cylinder_spectrum() {
    let op = cylinder_operator(StructureName::Npg2);
    let spec = op.spectrum();
    let m = spec.multiplicities();
    assert_eq!(m.len(), 2);
    assert!((m[0].0 + 1.0).abs() < 1e-12 && m[0].1 == 21, "{m:?}");
    assert!((m[1].0 - 3.0).abs() < 1e-12 && m[1].1 == 7, "{m:?}");
    assert!(spec.max_residual < 1e-9);
    assert!(spec.trace().abs() < 1e-12);
}

#[test]
fn eigensolver_agrees_with_nalgebra() {
    for name in StructureName::ALL {
        let op = cylinder_operator(name);
        let mut theirs: Vec<f64> = op
            .matrix
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        theirs.sort_by(f64::total_cmp);
        let ours = holoflow::symmetric_eigen(&op.matrix);
        for (a, b) in ours.eigenvalues.iter().zip(&theirs) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}

#[test]
fn operator_is_self_adjoint() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let op = cylinder_operator(StructureName::Nk6);
    let m = MetricFrame::identity(7);
    for _ in 0..50 {
        let f = random_two_form(&mut rng, 7);
        let g = random_two_form(&mut rng, 7);
        let a = inner(&op.apply(&f).unwrap(), &g, &m).unwrap();
        let b = inner(&f, &op.apply(&g).unwrap(), &m).unwrap();
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn projector_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for name in StructureName::ALL {
        let op = cylinder_operator(name);
        let p = op.instanton_projector().unwrap();
        assert!((&p * &p - &p).amax() < 1e-12);
        assert!((p.trace() - if name == StructureName::Nk6 { 14.0 } else { 21.0 }).abs() < 1e-12);
        let dim = op.dim;
        let m = MetricFrame::identity(dim);
        for _ in 0..100 {
            let f = random_two_form(&mut rng, dim);
            let pf = op.project_instanton(&f).unwrap();
            assert!(op.instanton_residual(&pf).unwrap() < 1e-9);
            let rest = &f - &pf;
            assert!(inner(&pf, &rest, &m).unwrap().abs() < 1e-12);
            let again = op.project_instanton(&pf).unwrap();
            assert!((&again - &pf).max_abs() < 1e-12);
        }
    }
}

#[test]
fn multiplicities_survive_random_rotations() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let q = build_cylinder(&catalog(StructureName::Nk6)).q_z;
    for _ in 0..10 {
        let raw = DMatrix::from_fn(7, 7, |_, _| rng.random_range(-1.0..1.0));
        let mut r = raw.qr().q();
        if r.determinant() < 0.0 {
            r.column_mut(0).neg_mut();
        }
        let rotated = q.change_basis(&r).unwrap();
        let op = build_operator(&rotated, &MetricFrame::identity(7)).unwrap();
        let m = op.spectrum().multiplicities();
        assert_eq!(m.iter().map(|x| x.1).collect::<Vec<_>>(), vec![14, 7]);
    }
}

#[test]
fn cylinder_split_is_equivalent_to_the_cylinder_equation() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for name in StructureName::ALL {
        let cat = catalog(name);
        let n = cat.n;
        let op = cylinder_operator(name);
        for k in 0..1000 {
            let f_m = random_two_form(&mut rng, n);
            let a_dot = random_one_form(&mut rng, n);
            let r = cylinder_split_residual(&f_m, &a_dot, &cat).unwrap();
            let both = (r.r1 * r.r1 + r.r2 * r.r2).sqrt();
            assert!((r.total - both).abs() <= 1e-12 * both.max(1.0));
            if k % 10 == 0 {
                let fa = op.project_instanton(&cylinder_curvature(&f_m, &a_dot)).unwrap();
                let (pm, pa) = split_cylinder_form(&fa).unwrap();
                let r = cylinder_split_residual(&pm, &pa, &cat).unwrap();
                assert!(r.r1 < 1e-9 && r.r2 < 1e-9 && r.total < 1e-9, "{r:?}");
            }
        }
    }
}

#[test]
fn base_instantons_solve_the_split_with_zero_velocity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for name in StructureName::ALL {
        let cat = catalog(name);
        let n = cat.n;
        let op_m = build_operator(&cat.structure_q(), &cat.metric()).unwrap();
        let expected = if name == StructureName::Nk6 { 8 } else { 14 };
        let space = op_m
            .spectrum()
            .eigenspaces
            .into_iter()
            .find(|e| (e.eigenvalue + 1.0).abs() < 1e-9)
            .unwrap();
        assert_eq!(space.multiplicity, expected);
        for _ in 0..20 {
            let f = op_m.project_instanton(&random_two_form(&mut rng, n)).unwrap();
            let r = cylinder_split_residual(&f, &Form::zero(n), &cat).unwrap();
            assert!(r.r1 < 1e-12 && r.r2 < 1e-12 && r.total < 1e-12, "{name} {r:?}");
        }
    }
}

#[test]
fn cone_operator_matches_cylinder_spectrum() {
    // on the cone chart the metric is e^{2t} times the cylinder one and
    // Q_Z̄ = e^{4t} Q_Z, so the operator is unchanged
    let cyl = build_cylinder(&catalog(StructureName::Npg2));
    for t in [-0.7, 0.0, 1.3] {
        let m = MetricFrame::with_gram(DMatrix::identity(8, 8) * (2.0 * t as f64).exp()).unwrap();
        let op = build_operator(&cyl.q_z.scale((4.0 * t as f64).exp()), &m).unwrap();
        let mult = op.spectrum().multiplicities();
        assert!((mult[0].0 + 1.0).abs() < 1e-12 && mult[0].1 == 21);
        let f = op.project_instanton(&Form::monomial(8, 1.0, &[0, 1])).unwrap();
        assert!(op.instanton_residual(&f).unwrap() < 1e-9);
        let conformal = MetricFrame::identity(8).with_conformal_factor(t);
        let op2 = build_operator(&cyl.q_z.scale((4.0 * t as f64).exp()), &conformal).unwrap();
        assert!((&op2.matrix - &op.matrix).amax() < 1e-12);
    }
}

#[test]
fn yang_mills_ingredients_on_the_cone() {
    let cone = build_cone(StructureName::Npg2, 1e-4).unwrap();
    let pts: Vec<Vec<f64>> = holoflow::fields::sphere_points(8, 100, 5)
        .unwrap()
        .into_iter()
        .enumerate()
        .map(|(k, p)| p.iter().map(|v| v * (0.8 + 0.004 * k as f64)).collect())
        .collect();
    let gens = su2_generators();
    let dom = cone.star_q_field.domain().clone();
    let a = FormField::new(dom, move |x: &[f64]| {
        let mut a = GaugeForm::zero(8);
        for i in 0..8 {
            let c = [
                x[(i + 1) % 8] * 0.3,
                (x[i] * x[(i + 2) % 8]).sin() * 0.2,
                0.1 * x[(i + 3) % 8].powi(2),
            ];
            a.add_term(Blade::basis(i), &LieElement::combination(&c, &gens), 1.0);
        }
        a
    });
    let report = ym_identity_check(&a.with_step(1e-3), &cone.star_q_field, &pts[..10]).unwrap();
    assert!(report.bianchi < 1e-4, "{report:?}");
    assert!(report.leibniz < 1e-4, "{report:?}");
    assert!(report.d_star_q < 1e-6, "{report:?}");
    let mut worst = 0.0f64;
    for p in &pts {
        worst = worst.max(cone.star_q_field.d_numeric(p).unwrap().max_abs());
    }
    assert!(worst < 1e-6);
}

#[test]
fn yang_mills_ingredients_trivial_cases() {
    let dom = ChartDomain::cube(7, -1.0, 1.0, 1e-3).unwrap();
    let psi = build_cylinder(&catalog(StructureName::Nk6)).psi_z;
    let star_q = FormField::constant(dom.clone(), psi);
    let zero = FormField::constant(dom.clone(), GaugeForm::zero(7));
    let pts = vec![vec![0.1; 7], vec![-0.2, 0.0, 0.3, 0.1, 0.0, 0.0, 0.5]];
    let r = ym_identity_check(&zero, &star_q, &pts).unwrap();
    assert_eq!((r.bianchi, r.leibniz, r.d_star_q), (0.0, 0.0, 0.0));
    let u = u1_generator();
    let abelian = FormField::new(dom, move |x: &[f64]| {
        Form::from_monomials(7, &[(x[1] * x[2], &[0]), (x[0].powi(2), &[3]), (x[6].sin(), &[5])]).tensor(&u)
    });
    let r = ym_identity_check(&abelian, &star_q, &pts).unwrap();
    assert!(r.leibniz < 1e-7 && r.bianchi < 1e-7, "{r:?}");
}
