//! Acceptance gate: one line per criterion, nonzero exit if any fails.
//! Each criterion also has a wall-clock budget.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{ensure, Context, Result};
use holoflow::structures::{algebraic_suite, catalog, StructureName};
use holoflow_cli::report::CheckRow;
use holoflow_cli::{dispatch, Command, RunConfig, Summary};

struct Criterion {
    id: u32,
    title: &'static str,
    budget: Option<Duration>,
    run: fn(&Path) -> Result<String>,
}

fn config(command: Command, out: &Path) -> RunConfig {
    RunConfig {
        output: out.join(command.as_str()),
        ..RunConfig::for_command(command)
    }
}

fn model(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models").join(name)
}

fn check<'a>(s: &'a Summary, name: &str) -> Result<&'a CheckRow> {
    s.checks
        .iter()
        .find(|c| c.name == name)
        .with_context(|| format!("no check named {name:?}"))
}

/// Every check passed; otherwise names the failures.
fn all_pass(s: &Summary) -> Result<()> {
    let failed: Vec<String> = s
        .checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{} = {:e} (tolerance {:e})", c.name, c.value, c.tolerance))
        .collect();
    ensure!(failed.is_empty(), "{}: {}", s.command, failed.join("; "));
    Ok(())
}

fn structure_equations(out: &Path) -> Result<String> {
    let mut notes = Vec::new();
    for s in ["nk6", "npg2"] {
        let cfg = RunConfig {
            structure: s.into(),
            h: 1e-4,
            points: 200,
            seed: 7,
            ..config(Command::VerifyStructure, &out.join(s))
        };
        let sum = dispatch(&cfg)?;
        all_pass(&sum)?;
        let worst = sum
            .checks
            .iter()
            .filter(|c| c.tolerance == 1e-6)
            .map(|c| c.value)
            .fold(0.0, f64::max);
        let ratios: Vec<String> = sum
            .checks
            .iter()
            .filter(|c| c.name.ends_with("order"))
            .map(|c| format!("{:.3}", c.value))
            .collect();
        notes.push(format!("{s}: max residual {worst:.2e}, ratios {}", ratios.join("/")));
    }
    Ok(notes.join("; "))
}

fn catalog_algebra(_: &Path) -> Result<String> {
    let mut count = 0;
    for name in StructureName::ALL {
        for c in algebraic_suite(&catalog(name))? {
            ensure!(
                c.deviation == 0.0,
                "{name}: {} deviates by {:e}",
                c.identity,
                c.deviation
            );
            count += 1;
        }
    }
    let npg2 = catalog(StructureName::Npg2);
    ensure!(npg2.star_p == npg2.q, "NPG2 listed *P differs from Q");
    Ok(format!("{count} identities exact"))
}

fn spectra(out: &Path) -> Result<String> {
    let mut notes = Vec::new();
    for s in ["nk6", "npg2"] {
        let cfg = RunConfig {
            structure: s.into(),
            ..config(Command::Spectrum, &out.join(s))
        };
        let sum = dispatch(&cfg)?;
        all_pass(&sum)?;
        let lambda = if s == "nk6" { 2 } else { 3 };
        let big = check(&sum, &format!("multiplicity of {lambda}"))?.value;
        let minus = check(&sum, "multiplicity of -1")?.value;
        notes.push(format!("{s}: {{{lambda} x{big}, -1 x{minus}}}"));
    }
    Ok(notes.join("; "))
}

fn cylinder_split(out: &Path) -> Result<String> {
    let mut notes = Vec::new();
    for s in ["nk6", "npg2"] {
        let cfg = RunConfig {
            structure: s.into(),
            draws: 1000,
            ..config(Command::SplitCheck, &out.join(s))
        };
        let sum = dispatch(&cfg)?;
        all_pass(&sum)?;
        notes.push(format!(
            "{s}: projected total {:.1e}",
            check(&sum, "projected cylinder residual")?.value
        ));
    }
    Ok(notes.join("; "))
}

fn chern_simons(out: &Path) -> Result<String> {
    let cfg = RunConfig {
        structure: "nk6".into(),
        samples: 100_000,
        ..config(Command::CsEval, out)
    };
    let sum = dispatch(&cfg)?;
    all_pass(&sum)?;
    let pure = check(&sum, "pure gauge CS vanishes")?;
    Ok(format!("|CS| = {:.2e} <= 3 sigma = {:.2e}", pure.value, pure.tolerance))
}

fn decay_suite(out: &Path) -> Result<String> {
    let cfg = RunConfig {
        model: model("doublewell-n6.model"),
        deltas: vec![1.0, 3.0, 5.0],
        dt: 1e-3,
        ..config(Command::DecayReport, &out.join("fast"))
    };
    let sum = dispatch(&cfg)?;
    all_pass(&sum)?;
    let slow = RunConfig {
        model: model("doublewell-n6-slow.model"),
        ..config(Command::DecayReport, &out.join("slow"))
    };
    let control = dispatch(&slow)?;
    let iv = check(&control, "inequality (iv)")?;
    ensure!(!iv.pass && !control.pass, "negative control passed inequality (iv)");
    Ok(format!(
        "CS slope {:.2}, order ratio {:.1}; control margin (iv) {:.2e}",
        check(&sum, "CS tail slope")?.value,
        check(&sum, "identity (i) order")?.value,
        iv.value
    ))
}

fn cone_lemma(out: &Path) -> Result<String> {
    let cfg = RunConfig {
        model: model("doublewell-n6.model"),
        deltas: vec![3.0],
        ..config(Command::DecayReport, out)
    };
    let sum = dispatch(&cfg)?;
    let c = check(&sum, "cone lemma slope")?;
    ensure!(c.pass, "L_3 slope {:e} above {:e}", c.value, c.tolerance);
    Ok(format!("L_3 slope {:.2}", c.value))
}

fn conformal_suite(out: &Path) -> Result<String> {
    let sum = dispatch(&config(Command::ConformalCheck, out))?;
    all_pass(&sum)?;
    Ok(format!(
        "lemma order {:.3}, ibp order {:.3}",
        check(&sum, "lemma identity order (dilation)")?.value,
        check(&sum, "integration by parts order")?.value
    ))
}

fn squeeze(out: &Path) -> Result<String> {
    let cfg = RunConfig {
        n: 6,
        scales: vec![1.0, 2.0, 4.0, 8.0],
        ..config(Command::Squeeze, out)
    };
    let sum = dispatch(&cfg)?;
    all_pass(&sum)?;
    Ok(format!(
        "ratio at T = 8: {:.1e}; control RHS ratio {}",
        check(&sum, "ratio at largest scale")?.value,
        check(&sum, "control band energy persists")?.value
    ))
}

fn determinism(out: &Path) -> Result<String> {
    for command in Command::ALL {
        let mut cfg = config(command, out);
        cfg.model = model("doublewell-n6.model");
        cfg.samples = 5_000;
        cfg.points = 50;
        cfg.seed = 11;
        let mut runs = Vec::new();
        for _ in 0..2 {
            dispatch(&cfg)?;
            let summary = std::fs::read(cfg.output.join("summary.json"))?;
            let report = std::fs::read(cfg.output.join("report.csv"))?;
            runs.push((summary, report));
        }
        ensure!(runs[0].0 == runs[1].0, "{command}: summary.json differs between runs");
        ensure!(runs[0].1 == runs[1].1, "{command}: report.csv differs between runs");
    }
    Ok(format!("{} commands byte-identical", Command::ALL.len()))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            title: "structure equations",
            budget: Some(Duration::from_secs(10)),
            run: structure_equations,
        },
        Criterion {
            id: 2,
            title: "catalog algebra",
            budget: Some(Duration::from_secs(1)),
            run: catalog_algebra,
        },
        Criterion {
            id: 3,
            title: "instanton spectra",
            budget: Some(Duration::from_secs(1)),
            run: spectra,
        },
        Criterion {
            id: 4,
            title: "cylinder split",
            budget: Some(Duration::from_secs(5)),
            run: cylinder_split,
        },
        Criterion {
            id: 5,
            title: "Chern-Simons gauge invariance",
            budget: Some(Duration::from_secs(60)),
            run: chern_simons,
        },
        Criterion {
            id: 6,
            title: "decay suite",
            budget: Some(Duration::from_secs(5)),
            run: decay_suite,
        },
        Criterion {
            id: 7,
            title: "cone lemma",
            budget: Some(Duration::from_secs(1)),
            run: cone_lemma,
        },
        Criterion {
            id: 8,
            title: "conformal suite",
            budget: Some(Duration::from_secs(30)),
            run: conformal_suite,
        },
        Criterion {
            id: 9,
            title: "vanishing mechanism",
            budget: Some(Duration::from_secs(1)),
            run: squeeze,
        },
        Criterion {
            id: 10,
            title: "determinism",
            budget: None,
            run: determinism,
        },
    ];
    let dir = tempfile::tempdir().expect("temporary directory");
    let mut failures = 0;
    for c in &criteria {
        let out = dir.path().join(format!("criterion-{}", c.id));
        let start = Instant::now();
        let result = (c.run)(&out);
        let elapsed = start.elapsed();
        let over = c.budget.is_some_and(|b| elapsed > b);
        let budget = c.budget.map_or(String::new(), |b| format!(" / {}s", b.as_secs()));
        let (ok, detail) = match result {
            Ok(_) if over => (false, "over time budget".to_string()),
            Ok(d) => (true, d),
            Err(e) => (false, format!("{e:#}")),
        };
        failures += usize::from(!ok);
        println!(
            "{} [{:>2}] {:<30} {:>7.2}s{budget}  {detail}",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            elapsed.as_secs_f64()
        );
    }
    if failures == 0 {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
