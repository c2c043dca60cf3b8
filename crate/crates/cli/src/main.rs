use std::process::ExitCode;

use clap::Parser;
use holoflow_cli::{dispatch, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let summary = match cli.into_config().and_then(|c| dispatch(&c)) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    for c in &summary.checks {
        let mark = if c.pass { "ok  " } else { "FAIL" };
        println!(
            "{mark} {:<40} value {:<12.4e} tolerance {:.4e}  [{}]",
            c.name, c.value, c.tolerance, c.paper_anchor
        );
    }
    let failed = summary.checks.iter().filter(|c| !c.pass).count();
    if failed == 0 {
        println!("{}: all {} checks passed", summary.command, summary.checks.len());
        ExitCode::SUCCESS
    } else {
        println!(
            "{}: {failed} of {} checks failed",
            summary.command,
            summary.checks.len()
        );
        ExitCode::FAILURE
    }
}
