//! Batch front end for the holoflow suites.
//!
//! Each run executes one suite and writes `summary.json` and `report.csv`
//! into the output directory, plus data files for some commands.
//! [`dispatch`] is the whole pipeline; the `holoflow` binary only parses
//! flags and sets the exit status.
//!
//! `report.csv` columns by command:
//!
//! | command | columns |
//! |---|---|
//! | `verify-structure` | structure, identity, paper_anchor, h, points, residual, residual_half_h, ratio |
//! | `spectrum` | dimension, eigenvalue, multiplicity, expected_multiplicity, paper_anchor |
//! | `split-check` | draw, r1, r2, total, projected_r1, projected_r2, projected_total, paper_anchor |
//! | `cs-eval` | connection, cs, cs_stderr, curvature_form, curvature_form_stderr, gap, gap_stderr, paper_anchor |
//! | `squeeze` | profile, scale, lhs, rhs, ratio, margin, paper_anchor |
//! | others | name, paper_anchor, value, tolerance, pass |
//!
//! `flow` and `decay-report` also write `trajectory.csv` with columns
//! t, phi_i, cs, cs_rate, kinetic, curvature_energy, j and one `l_delta_δ`
//! per requested exponent.

pub mod config;
pub mod fixtures;
pub mod report;
pub mod suites;

use anyhow::{bail, Result};

pub use config::{Cli, Command, RunConfig};
pub use report::{Summary, Table, SCHEMA_VERSION};

/// Validates `config`, runs its suite, applies tolerance overrides and
/// writes the reports. Check failures are reported in the summary, not as
/// errors.
pub fn dispatch(config: &RunConfig) -> Result<Summary> {
    config.validate()?;
    let mut outcome = suites::run(config)?;
    for (name, tol) in &config.tolerances {
        let mut hit = false;
        for c in outcome.checks.iter_mut().filter(|c| &c.name == name) {
            *c = c.with_tolerance(*tol);
            hit = true;
        }
        if !hit {
            bail!(
                "tolerance override {name:?} matches no check of {}",
                config.command.expect("validated")
            );
        }
    }
    let summary = Summary::new(config, &outcome.checks);
    let report = outcome.report.unwrap_or_else(|| Table::of_checks(&outcome.checks));
    report::write_outputs(&config.output, &summary, &report, &outcome.extra)?;
    Ok(summary)
}
