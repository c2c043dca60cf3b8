use anyhow::{Context, Result};
use holoflow::conformal::{
    cone_equivalence_check, cutoff_squeeze, energy_density_field, ibp_check, lemma41_check, lie_derivative_check,
    weight_check, ConformalField, CutoffProfile, SqueezeReport, TestFunction,
};
use holoflow::csflow::{
    cs_evaluate, decay_diagnostics, flow_integrate, load_model, CsEstimate, DecayOptions, Sampling, Trajectory,
};
use holoflow::exterior::{Blade, Form, MetricFrame};
use holoflow::fields::{ChartDomain, ScalarField};
use holoflow::instanton::{build_operator, cylinder_curvature, cylinder_split_residual, split_cylinder_form};
use holoflow::structures::{
    algebraic_suite, build_cylinder, catalog, verify_structure, GStructureCatalog, StructureName,
};
use holoflow::Check;
use rand::Rng;

use crate::config::{Command, RunConfig};
use crate::fixtures;
use crate::report::{num, Table};

/// Checks and tables produced by one suite.
pub struct Outcome {
    pub checks: Vec<Check>,
    /// `report.csv`; the check table when `None`.
    pub report: Option<Table>,
    /// Further files, by name.
    pub extra: Vec<(String, Table)>,
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.command.context("no command given")? {
        Command::VerifyStructure => structure_suite(cfg),
        Command::Spectrum => spectrum_suite(cfg),
        Command::SplitCheck => split_suite(cfg),
        Command::CsEval => cs_suite(cfg),
        Command::Flow => flow_suite(cfg),
        Command::DecayReport => decay_suite(cfg),
        Command::ConformalCheck => conformal_suite(cfg),
        Command::Squeeze => squeeze_suite(cfg),
    }
}

fn structure(cfg: &RunConfig) -> Result<GStructureCatalog> {
    let name: StructureName = cfg.structure.parse()?;
    Ok(catalog(name))
}

const STRUCTURE_TOL: f64 = 1e-6;
const ORDER_BAND: (f64, f64) = (3.5, 4.5);

fn structure_suite(cfg: &RunConfig) -> Result<Outcome> {
    let cat = structure(cfg)?;
    let s = cat.name.as_str();
    let coarse = verify_structure(&cat, cfg.points, cfg.h, cfg.seed)?;
    let fine = verify_structure(&cat, cfg.points, 0.5 * cfg.h, cfg.seed)?;
    let mut checks = Vec::new();
    let mut t = Table::new(&[
        "structure",
        "identity",
        "paper_anchor",
        "h",
        "points",
        "residual",
        "residual_half_h",
        "ratio",
    ]);
    for (a, b) in coarse.iter().zip(&fine) {
        checks.push(Check::at_most(
            format!("{s}: {}", a.identity),
            a.identity,
            a.max_residual,
            STRUCTURE_TOL,
        ));
        // identities with an exterior derivative carry O(h²) error
        let ratio = a.max_residual / b.max_residual;
        if a.identity.starts_with('d') {
            checks.push(Check::within(
                format!("{s}: {} order", a.identity),
                format!("{}, error O(h^2)", a.identity),
                ratio,
                ORDER_BAND.0,
                ORDER_BAND.1,
            ));
        }
        t.push(vec![
            s.into(),
            a.identity.into(),
            a.identity.into(),
            num(a.h),
            a.points.to_string(),
            num(a.max_residual),
            num(b.max_residual),
            num(ratio),
        ]);
    }
    for c in algebraic_suite(&cat)? {
        checks.push(Check::at_most(
            format!("{s}: {}", c.identity),
            c.identity,
            c.deviation,
            f64::EPSILON,
        ));
        t.push(vec![
            s.into(),
            c.identity.into(),
            c.identity.into(),
            String::new(),
            String::new(),
            num(c.deviation),
            String::new(),
            String::new(),
        ]);
    }
    Ok(Outcome {
        checks,
        report: Some(t),
        extra: Vec::new(),
    })
}

/// Eigenvalues and multiplicities of `B = *(*Q_Z ^ .)` on the cylinder.
pub fn expected_spectrum(name: StructureName) -> &'static [(f64, usize)] {
    match name {
        StructureName::Nk6 => &[(-1.0, 14), (2.0, 7)],
        StructureName::Npg2 => &[(-1.0, 21), (3.0, 7)],
    }
}

const SPECTRUM_ANCHOR: &str = "B(F) = *(*Q_Z ^ F)";

fn spectrum_suite(cfg: &RunConfig) -> Result<Outcome> {
    let cat = structure(cfg)?;
    let cyl = build_cylinder(&cat);
    let op = build_operator(&cyl.q_z, &cyl.metric)?;
    let spec = op.spectrum();
    let expected = expected_spectrum(cat.name);
    let count = expected.len() as f64;
    let mut checks = vec![Check::within(
        "eigenspace count",
        SPECTRUM_ANCHOR,
        spec.eigenspaces.len() as f64,
        count,
        count,
    )];
    let mut t = Table::new(&[
        "dimension",
        "eigenvalue",
        "multiplicity",
        "expected_multiplicity",
        "paper_anchor",
    ]);
    for &(lambda, m) in expected {
        let found = spec.eigenspaces.iter().find(|e| (e.eigenvalue - lambda).abs() < 1e-6);
        let (dev, mult) = match found {
            Some(e) => ((e.eigenvalue - lambda).abs(), e.multiplicity as f64),
            None => (f64::INFINITY, 0.0),
        };
        checks.push(Check::at_most(
            format!("eigenvalue {lambda}"),
            SPECTRUM_ANCHOR,
            dev,
            1e-12,
        ));
        checks.push(Check::within(
            format!("multiplicity of {lambda}"),
            SPECTRUM_ANCHOR,
            mult,
            m as f64,
            m as f64,
        ));
    }
    for e in &spec.eigenspaces {
        let exp = expected
            .iter()
            .find(|x| (x.0 - e.eigenvalue).abs() < 1e-6)
            .map_or(0, |x| x.1);
        t.push(vec![
            (cat.n + 1).to_string(),
            num(e.eigenvalue),
            e.multiplicity.to_string(),
            exp.to_string(),
            SPECTRUM_ANCHOR.into(),
        ]);
    }
    checks.push(Check::at_most(
        "eigen-residual",
        "|B v - lambda v|",
        spec.max_residual,
        1e-9,
    ));
    let tr = op.matrix.trace();
    checks.push(Check::at_most(
        "trace identity",
        "tr B = sum m_i lambda_i",
        (tr - spec.trace()).abs(),
        1e-12,
    ));
    checks.push(Check::at_most("trace vanishes", "tr B = 0", tr.abs(), 1e-12));
    let p = op.instanton_projector()?;
    checks.push(Check::at_most(
        "projector idempotent",
        "P^2 = P",
        (&p * &p - &p).amax(),
        1e-12,
    ));
    checks.push(Check::at_most(
        "projector symmetric",
        "P^T = P",
        (&p - p.transpose()).amax(),
        1e-12,
    ));
    let rank = expected[0].1 as f64;
    checks.push(Check::within(
        "projector rank",
        "tr P = dim ker(B + 1)",
        p.trace(),
        rank - 1e-12,
        rank + 1e-12,
    ));
    Ok(Outcome {
        checks,
        report: Some(t),
        extra: Vec::new(),
    })
}

const SPLIT_ANCHOR: &str = "*F + *Q_Z ^ F = 0 iff r1 = r2 = 0";

fn split_suite(cfg: &RunConfig) -> Result<Outcome> {
    let cat = structure(cfg)?;
    let n = cat.n;
    let cyl = build_cylinder(&cat);
    let op = build_operator(&cyl.q_z, &cyl.metric)?;
    let mut rng = fixtures::rng(cfg.seed);
    let mut t = Table::new(&[
        "draw",
        "r1",
        "r2",
        "total",
        "projected_r1",
        "projected_r2",
        "projected_total",
        "paper_anchor",
    ]);
    let (mut split_gap, mut pr1, mut pr2, mut ptot) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut smallest = f64::INFINITY;
    for k in 0..cfg.draws {
        let f_m = fixtures::random_form(&mut rng, n, 2);
        let a_dot = fixtures::random_form(&mut rng, n, 1);
        let r = cylinder_split_residual(&f_m, &a_dot, &cat)?;
        let both = r.r1.hypot(r.r2);
        split_gap = split_gap.max((r.total - both).abs() / both.max(1.0));
        smallest = smallest.min(r.total);
        let fa = op.project_instanton(&cylinder_curvature(&f_m, &a_dot))?;
        let (pm, pa) = split_cylinder_form(&fa)?;
        let p = cylinder_split_residual(&pm, &pa, &cat)?;
        pr1 = pr1.max(p.r1);
        pr2 = pr2.max(p.r2);
        ptot = ptot.max(p.total);
        t.push(vec![
            k.to_string(),
            num(r.r1),
            num(r.r2),
            num(r.total),
            num(p.r1),
            num(p.r2),
            num(p.total),
            SPLIT_ANCHOR.into(),
        ]);
    }
    let checks = vec![
        Check::at_most(
            "split norm identity",
            "|*F + *Q_Z ^ F|^2 = r1^2 + r2^2",
            split_gap,
            1e-12,
        ),
        Check::at_least("generic data is not instanton", SPLIT_ANCHOR, smallest, 1e-6),
        Check::at_most("projected r1", "*_M dA/dt + *_M P ^ F_M = 0", pr1, 1e-9),
        Check::at_most("projected r2", "*_M F_M + dA/dt ^ *_M P + *_M Q ^ F_M = 0", pr2, 1e-9),
        Check::at_most("projected cylinder residual", "*F + *Q_Z ^ F = 0", ptot, 1e-9),
    ];
    Ok(Outcome {
        checks,
        report: Some(t),
        extra: Vec::new(),
    })
}

const CS_ANCHOR: &str = "CS(A) = int Tr(A ^ dA + 2/3 A^3) ^ *P";
const CS_FORMS_ANCHOR: &str = "CS(A) = (n-3)^-1 int Tr(F ^ F) ^ *Q";

fn cs_row(t: &mut Table, label: &str, cs: &CsEstimate) {
    t.push(vec![
        label.into(),
        num(cs.value.value),
        num(cs.value.stderr),
        num(cs.curvature_form.value),
        num(cs.curvature_form.stderr),
        num(cs.gap.value),
        num(cs.gap.stderr),
        CS_FORMS_ANCHOR.into(),
    ]);
}

fn cs_suite(cfg: &RunConfig) -> Result<Outcome> {
    let cat = structure(cfg)?;
    let dim = cat.n + 1;
    let sampling = Sampling::new(cfg.samples, cfg.seed);
    let pure = fixtures::pure_gauge_connection(fixtures::shell(dim, cfg.h)?, cfg.seed);
    let flat = cs_evaluate(&pure, cat.name, sampling)?;
    let generic = fixtures::linear_connection(fixtures::shell(dim, cfg.h)?, cfg.seed, 0.7);
    let linear = cs_evaluate(&generic, cat.name, sampling)?;
    let mut t = Table::new(&[
        "connection",
        "cs",
        "cs_stderr",
        "curvature_form",
        "curvature_form_stderr",
        "gap",
        "gap_stderr",
        "paper_anchor",
    ]);
    cs_row(&mut t, "pure gauge", &flat);
    cs_row(&mut t, "linear", &linear);
    let agree = |name: &str, cs: &CsEstimate| {
        let gap = (cs.value.value - cs.curvature_form.value).abs();
        Check::at_most(
            name,
            CS_FORMS_ANCHOR,
            gap,
            3.0 * cs.value.combined_stderr(&cs.curvature_form),
        )
    };
    let checks = vec![
        Check::at_most(
            "pure gauge CS vanishes",
            "CS(g^-1 dg) = 0",
            flat.value.value.abs(),
            3.0 * flat.value.stderr,
        ),
        Check::at_most(
            "pure gauge curvature vanishes",
            "F(g^-1 dg) = 0",
            flat.curvature_form.value.abs(),
            1e-6,
        ),
        agree("forms agree (pure gauge)", &flat),
        agree("forms agree (linear)", &linear),
        Check::at_least(
            "linear CS is nonzero",
            CS_ANCHOR,
            linear.value.value.abs() / linear.value.stderr,
            3.0,
        ),
    ];
    Ok(Outcome {
        checks,
        report: Some(t),
        extra: Vec::new(),
    })
}

fn trajectory(cfg: &RunConfig, dt: f64) -> Result<Trajectory> {
    let path = cfg.model_path()?;
    let model = load_model(&path).with_context(|| format!("loading {}", path.display()))?;
    let phi0 = cfg
        .phi0
        .clone()
        .or_else(|| model.initial.clone())
        .context("no initial state: the model has none and phi0 is unset")?;
    Ok(flow_integrate(&model, &phi0, cfg.t_end, dt)?)
}

/// `t, phi_i, CS, dCS/dt, kinetic, curvature_energy, J, L_delta` per step.
fn trajectory_table(tr: &Trajectory, deltas: &[f64]) -> Table {
    let k = tr.phi.first().map_or(0, Vec::len);
    let mut header: Vec<String> = vec!["t".into()];
    header.extend((0..k).map(|i| format!("phi_{i}")));
    for h in ["cs", "cs_rate", "kinetic", "curvature_energy", "j"] {
        header.push(h.into());
    }
    header.extend(deltas.iter().map(|d| format!("l_delta_{d}")));
    let l: Vec<Vec<f64>> = deltas.iter().map(|d| tr.l_delta(*d)).collect();
    let mut t = Table {
        header,
        rows: Vec::with_capacity(tr.len()),
    };
    for i in 0..tr.len() {
        let mut row = vec![num(tr.t[i])];
        row.extend(tr.phi[i].iter().map(|x| num(*x)));
        for v in [tr.cs[i], tr.cs_rate[i], tr.kinetic[i], tr.curvature_energy[i], tr.j[i]] {
            row.push(num(v));
        }
        row.extend(l.iter().map(|l| num(l[i])));
        t.push(row);
    }
    t
}

fn flow_suite(cfg: &RunConfig) -> Result<Outcome> {
    let tr = trajectory(cfg, cfg.dt)?;
    let scale = tr.kinetic.iter().copied().fold(f64::MIN_POSITIVE, f64::max);
    let calibration = tr
        .cs_rate
        .iter()
        .zip(&tr.kinetic)
        .map(|(r, k)| (r + 2.0 * k).abs())
        .fold(0.0, f64::max)
        / scale;
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let rates: Vec<f64> = tr.cs_rate.iter().map(|r| -r).collect();
    let checks = vec![
        Check::at_least("bounded", "sup |phi| < inf", if tr.truncated { 0.0 } else { 1.0 }, 1.0),
        Check::at_most("energy calibration", "dCS/dt = -2 |dA/dt|^2", calibration, 1e-12),
        Check::at_least("CS nonincreasing", "dCS/dT <= 0", min(&rates), 0.0),
        Check::at_least("J nonnegative", "J(T) = int_T^inf |F|^2 >= 0", min(&tr.j), 0.0),
    ];
    Ok(Outcome {
        checks,
        report: None,
        extra: vec![("trajectory.csv".into(), trajectory_table(&tr, &cfg.deltas))],
    })
}

const DT_ORDER_BAND: (f64, f64) = (12.0, 20.0);

fn decay_suite(cfg: &RunConfig) -> Result<Outcome> {
    let tr = trajectory(cfg, cfg.dt)?;
    let half = trajectory(cfg, 0.5 * cfg.dt)?;
    let options = DecayOptions {
        deltas: cfg.deltas.clone(),
        ..DecayOptions::default()
    };
    let rep = decay_diagnostics(&tr, &options)?;
    let rep_half = decay_diagnostics(&half, &options)?;
    let mut checks = rep.checks();
    for (name, anchor, a, b) in [
        (
            "identity (i) order",
            "dJ/dT = dCS/dT + (n-3) CS",
            rep.identity_i,
            rep_half.identity_i,
        ),
        (
            "identity (ii) order",
            "dJ/dT = -2 |F_A|^2 - (n-3) CS",
            rep.identity_ii,
            rep_half.identity_ii,
        ),
        (
            "identity (iii) order",
            "dJ/dT = -2 |dA/dt|^2 + (n-3) CS",
            rep.identity_iii,
            rep_half.identity_iii,
        ),
    ] {
        checks.push(Check::within(name, anchor, a / b, DT_ORDER_BAND.0, DT_ORDER_BAND.1));
    }
    checks.push(cone_lemma_check(&tr)?);
    Ok(Outcome {
        checks,
        report: None,
        extra: vec![("trajectory.csv".into(), trajectory_table(&tr, &cfg.deltas))],
    })
}

/// Fitted tail slope of `L_{n-3}` against the bound `-(n-3)`.
pub fn cone_lemma_check(tr: &Trajectory) -> Result<Check> {
    let c = tr.n as f64 - 3.0;
    let options = DecayOptions {
        deltas: vec![c],
        ..DecayOptions::default()
    };
    let slope = decay_diagnostics(tr, &options)?.l_delta[0].slope;
    Ok(Check::at_most(
        "cone lemma slope",
        "L_{n-3}(T) <= C exp(-(n-3) T)",
        slope,
        -c,
    ))
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn conformal_suite(cfg: &RunConfig) -> Result<Outcome> {
    let mut rng = fixtures::rng(cfg.seed);
    let mut checks = Vec::new();

    for name in StructureName::ALL {
        let cat = catalog(name);
        let dim = cat.n + 1;
        let mut worst = 0.0f64;
        for _ in 0..cfg.draws {
            let f = fixtures::random_form(&mut rng, dim, 2);
            let t = rng.random_range(-2.0..2.0);
            worst = worst.max(cone_equivalence_check(&f, t, &cat)?.residual);
        }
        checks.push(Check::at_most(
            format!("cone identity ({name})"),
            "*F + *Q ^ F = e^{(n-3)t} (*_Z F + *_Z Q_Z ^ F)",
            worst,
            1e-12,
        ));
        let cyl = build_cylinder(&cat);
        let op = build_operator(&cyl.q_z, &cyl.metric)?;
        let mut inst = 0.0f64;
        for _ in 0..10 {
            let f = op.project_instanton(&fixtures::random_form(&mut rng, dim, 2))?;
            let t = rng.random_range(-2.0..2.0);
            let r = cone_equivalence_check(&f, t, &cat)?;
            let size = f.max_abs();
            let lifted = ((cat.n as f64 - 3.0) * t).exp() * size;
            inst = inst.max(r.cone.max_abs() / lifted).max(r.cylinder.max_abs() / size);
        }
        checks.push(Check::at_most(
            format!("cone identity on instantons ({name})"),
            "cylinder instanton = cone instanton",
            inst,
            1e-12,
        ));
    }

    let mut weight = 0.0f64;
    for dim in 5..=8 {
        for _ in 0..50 {
            let f = fixtures::random_form(&mut rng, dim, 2);
            weight = weight.max(weight_check(
                &f,
                rng.random_range(-2.0..2.0),
                &MetricFrame::identity(dim),
            )?);
        }
        let b = nalgebra::DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-0.4..0.4));
        let curved = MetricFrame::with_gram(&b * b.transpose() + nalgebra::DMatrix::identity(dim, dim))?;
        for _ in 0..20 {
            let f = fixtures::random_form(&mut rng, dim, 2);
            weight = weight.max(weight_check(&f, rng.random_range(-1.0..1.0), &curved)?);
        }
    }
    checks.push(Check::at_most(
        "conformal weight",
        "Tr(F ^ *F) has weight n-3 under g -> e^{2f} g",
        weight,
        1e-12,
    ));

    let points = fixtures::random_points(&mut rng, 7, 50, -2.0, 2.0);
    let mut conformal = 0.0f64;
    for p in &points {
        conformal = conformal.max(ConformalField::dilation(7).conformality_residual(p, 1e-5)?);
        conformal = conformal.max(ConformalField::cone_time(7).conformality_residual(p, 1e-5)?);
    }
    checks.push(Check::at_most("conformality of X", "L_X g = 2 f g", conformal, 1e-9));

    // abelian closed form: both sides equal -7 vol everywhere
    let points = fixtures::random_points(&mut rng, 7, 100, -1.0, 1.0);
    let a = fixtures::abelian_connection(ChartDomain::cube(7, -2.0, 2.0, cfg.h)?);
    let r = lemma41_check(&a, &ConformalField::dilation(7), &points)?;
    checks.push(Check::at_most(
        "lemma identity (abelian)",
        LEMMA_ANCHOR,
        r.max_residual,
        1e-6,
    ));

    let points = fixtures::random_points(&mut rng, 5, 12, -0.6, 0.6);
    let ratio = order_ratio(0.04, |h| {
        let a = fixtures::trig_connection(ChartDomain::cube(5, -1.0, 1.0, h)?, cfg.seed, 0.8);
        Ok(lemma41_check(&a, &ConformalField::dilation(5), &points)?.max_residual)
    })?;
    checks.push(order_check("lemma identity order (dilation)", LEMMA_ANCHOR, ratio));

    let points = fixtures::random_points(&mut rng, 7, 8, -0.5, 0.5);
    let ratio = order_ratio(0.04, |h| {
        let a = fixtures::trig_connection(ChartDomain::cube(7, -1.0, 1.0, h)?, cfg.seed + 1, 0.6);
        Ok(lemma41_check(&a, &ConformalField::cone_time(7), &points)?.max_residual)
    })?;
    checks.push(order_check("lemma identity order (cone)", LEMMA_ANCHOR, ratio));

    let points = fixtures::random_points(&mut rng, 4, 20, -0.5, 0.5);
    let ratio = order_ratio(0.02, |h| {
        let a = fixtures::trig_connection(ChartDomain::cube(4, -1.0, 1.0, h)?, cfg.seed + 2, 1.0);
        Ok(lie_derivative_check(&a, &ConformalField::dilation(4), &points)?)
    })?;
    checks.push(order_check("Lie derivative order", "L_X A = i_X F + d_A(i_X A)", ratio));

    let x = ConformalField::dilation(3);
    let lambda_at = |h: f64| -> Result<ScalarField> {
        let a = fixtures::trig_connection(ChartDomain::cube(3, -1.0, 1.0, h)?, cfg.seed + 3, 0.9);
        Ok(energy_density_field(&a, &x))
    };
    let coarse = ibp_check(&lambda_at(0.02)?, &x, &fixtures::bump(), 41)?;
    let fine = ibp_check(&lambda_at(0.01)?, &x, &fixtures::bump(), 41)?;
    for (label, r) in [("coarse", &coarse), ("fine", &fine)] {
        checks.push(Check::at_most(
            format!("integration by parts ({label})"),
            IBP_ANCHOR,
            r.residual / r.error_bar,
            3.0,
        ));
    }
    checks.push(order_check(
        "integration by parts order",
        IBP_ANCHOR,
        coarse.residual / fine.residual,
    ));

    let tau = std::f64::consts::TAU;
    let torus = ChartDomain::torus(vec![tau; 3], 0.01)?;
    let periodic = ScalarField::new(torus, |p: &[f64]| {
        Form::term(
            3,
            Blade::from_mask(0b111),
            -(1.0 + 0.5 * (p[0] + 2.0 * p[2]).sin() * p[1].cos().powi(2)),
        )
    });
    let shift = ConformalField::translation(vec![1.0, -0.5, 2.0]);
    let r = ibp_check(&periodic, &shift, &TestFunction::Constant(1.0), 32)?;
    checks.push(Check::at_most(
        "integration by parts (torus)",
        "int L_X lambda = 0",
        r.lhs.value.abs(),
        1e-12,
    ));

    Ok(Outcome {
        checks,
        report: None,
        extra: Vec::new(),
    })
}

const LEMMA_ANCHOR: &str = "L_X lambda = (n-3) f lambda + 2 Tr(d_A(i_X F) ^ *F)";
const IBP_ANCHOR: &str = "int eta L_X lambda = -int d eta ^ i_X lambda";

/// Residual at step `h` over residual at `h/2`.
fn order_ratio(h: f64, residual: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    Ok(residual(h)? / residual(0.5 * h)?)
}

fn order_check(name: &str, anchor: &str, ratio: f64) -> Check {
    Check::within(
        name,
        format!("{anchor}, error O(h^2)"),
        ratio,
        ORDER_BAND.0,
        ORDER_BAND.1,
    )
}

const SQUEEZE_ANCHOR: &str = "(n-3) int eta lambda <= (6/T) int_{T<=|t|<=2T} lambda";

fn squeeze_rows(t: &mut Table, label: &str, r: &SqueezeReport) {
    for row in &r.rows {
        t.push(vec![
            label.into(),
            num(row.scale),
            num(row.lhs),
            num(row.rhs),
            num(row.ratio),
            num(row.margin),
            SQUEEZE_ANCHOR.into(),
        ]);
    }
}

fn squeeze_suite(cfg: &RunConfig) -> Result<Outcome> {
    let rate = 2.0 * cfg.n as f64 - 6.0;
    let tail = cutoff_squeeze(|t: f64| (-rate * t.abs()).exp(), cfg.n, &cfg.scales)?;
    let control = cutoff_squeeze(|_| 1.0, cfg.n, &cfg.scales)?;
    let mut t = Table::new(&["profile", "scale", "lhs", "rhs", "ratio", "margin", "paper_anchor"]);
    squeeze_rows(&mut t, &format!("exp(-{rate}|t|)"), &tail);
    squeeze_rows(&mut t, "constant", &control);
    let last = tail.rows.last().context("no scales")?;
    let slope = max_of(cfg.scales.iter().map(|s| {
        let eta = CutoffProfile::new(*s).map(|e| e.max_slope() / e.slope_bound());
        eta.unwrap_or(f64::INFINITY)
    }));
    let flag = |b: bool| if b { 1.0 } else { 0.0 };
    let checks = vec![
        Check::at_most("cutoff slope", "|eta'| <= 2/T", slope, 1.0),
        Check::at_least("ratio decreases", SQUEEZE_ANCHOR, flag(tail.ratio_monotone), 1.0),
        Check::at_most("ratio at largest scale", "RHS/LHS -> 0 as T -> inf", last.ratio, 1e-6),
        Check::at_most(
            "band energy decays",
            "int_{T<=|t|<=2T} lambda -> 0",
            tail.rhs_decay,
            1e-6,
        ),
        Check::at_least(
            "control band energy persists",
            "lambda = 1: RHS = 12 for every T",
            control.rhs_decay,
            0.5,
        ),
    ];
    Ok(Outcome {
        checks,
        report: Some(t),
        extra: Vec::new(),
    })
}
