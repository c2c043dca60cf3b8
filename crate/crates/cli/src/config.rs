use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

/// The suites `holoflow` can run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifyStructure,
    Spectrum,
    SplitCheck,
    CsEval,
    Flow,
    DecayReport,
    ConformalCheck,
    Squeeze,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::VerifyStructure,
        Command::Spectrum,
        Command::SplitCheck,
        Command::CsEval,
        Command::Flow,
        Command::DecayReport,
        Command::ConformalCheck,
        Command::Squeeze,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Command::VerifyStructure => "verify-structure",
            Command::Spectrum => "spectrum",
            Command::SplitCheck => "split-check",
            Command::CsEval => "cs-eval",
            Command::Flow => "flow",
            Command::DecayReport => "decay-report",
            Command::ConformalCheck => "conformal-check",
            Command::Squeeze => "squeeze",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Everything a run depends on. Serialized verbatim into `summary.json`.
///
/// Unset fields take the defaults below; the seed always has a value, so
/// every summary records the one it ran with.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    /// `nk6` or `npg2`.
    pub structure: String,
    /// Finite-difference step.
    pub h: f64,
    /// Sphere points for `verify-structure`.
    pub points: usize,
    /// Random draws for `split-check` and the cone identity.
    pub draws: usize,
    /// Monte Carlo samples for `cs-eval`.
    pub samples: usize,
    pub seed: u64,
    pub deltas: Vec<f64>,
    pub dt: f64,
    pub t_end: f64,
    pub model: PathBuf,
    /// Initial state of the flow; the model's own when unset.
    pub phi0: Option<Vec<f64>>,
    /// Base dimension of the `squeeze` profiles.
    pub n: usize,
    pub scales: Vec<f64>,
    pub output: PathBuf,
    /// Per-check tolerance overrides, keyed by check name.
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: None,
            structure: "nk6".into(),
            h: 1e-4,
            points: 200,
            draws: 1000,
            samples: 100_000,
            seed: 7,
            deltas: vec![1.0, 3.0, 5.0],
            dt: 1e-3,
            t_end: 3.0,
            model: PathBuf::from("doublewell-n6.model"),
            phi0: None,
            n: 6,
            scales: vec![1.0, 2.0, 4.0, 8.0],
            output: PathBuf::from("holoflow-out"),
            tolerances: BTreeMap::new(),
        }
    }
}

impl RunConfig {
    pub fn for_command(command: Command) -> Self {
        RunConfig {
            command: Some(command),
            ..Self::default()
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).context("invalid config file")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    /// Schema checks that do not depend on the command.
    pub fn validate(&self) -> Result<()> {
        if self.command.is_none() {
            bail!("no command given");
        }
        for (name, tol) in &self.tolerances {
            if !(tol.is_finite() && *tol >= f64::EPSILON) {
                bail!("tolerance for {name:?} must be finite and at least machine epsilon, got {tol}");
            }
        }
        let positive = [("h", self.h), ("dt", self.dt), ("t_end", self.t_end)];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                bail!("{name} must be positive, got {v}");
            }
        }
        for (name, v) in [
            ("points", self.points),
            ("draws", self.draws),
            ("samples", self.samples),
        ] {
            if v == 0 {
                bail!("{name} must be positive");
            }
        }
        Ok(())
    }

    /// The model file: as given, else under `models/`, else in the models
    /// shipped with the source tree.
    pub fn model_path(&self) -> Result<PathBuf> {
        let given = &self.model;
        let shipped = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models");
        let candidates = [given.clone(), Path::new("models").join(given), shipped.join(given)];
        candidates
            .into_iter()
            .find(|p| p.is_file())
            .with_context(|| format!("model file {} not found", given.display()))
    }
}

/// Command-line flags. Any flag given replaces the config file's value.
#[derive(Debug, Parser)]
#[command(
    name = "holoflow",
    version,
    about = "Numerical checks for instantons and Chern-Simons flow on cylinders and cones"
)]
pub struct Cli {
    /// Suite to run; may instead come from the config file.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// TOML file with any `RunConfig` fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub structure: Option<String>,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub draws: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated exponents for `L_delta`.
    #[arg(long = "delta", value_delimiter = ',')]
    pub deltas: Option<Vec<f64>>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub phi0: Option<Vec<f64>>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub scales: Option<Vec<f64>>,
    /// Output directory.
    #[arg(long = "out")]
    pub output: Option<PathBuf>,
    /// `NAME=VALUE`, repeatable.
    #[arg(long = "tol", value_parser = parse_override)]
    pub tolerances: Vec<(String, f64)>,
}

fn parse_override(s: &str) -> std::result::Result<(String, f64), String> {
    let (name, value) = s
        .rsplit_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got {s:?}"))?;
    let value = value.trim().parse::<f64>().map_err(|e| format!("{value:?}: {e}"))?;
    Ok((name.trim().to_string(), value))
}

impl Cli {
    pub fn into_config(self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        macro_rules! take {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field {
                    c.$field = v;
                }
            )*};
        }
        take!(structure, h, points, draws, samples, seed, deltas, dt, t_end, model, n, scales, output);
        if self.command.is_some() {
            c.command = self.command;
        }
        if self.phi0.is_some() {
            c.phi0 = self.phi0;
        }
        c.tolerances.extend(self.tolerances);
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("holoflow-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.toml");
        std::fs::write(
            &path,
            "command = \"spectrum\"\nseed = 3\nh = 0.01\n[tolerances]\n\"a\" = 0.5\n",
        )
        .unwrap();
        let cli = Cli::parse_from([
            "holoflow",
            "--config",
            path.to_str().unwrap(),
            "--seed",
            "9",
            "--tol",
            "b=1e-3",
        ]);
        let c = cli.into_config().unwrap();
        assert_eq!(c.command, Some(Command::Spectrum));
        assert_eq!((c.seed, c.h), (9, 0.01));
        assert_eq!(c.tolerances.len(), 2);
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn list_flags() {
        let c = Cli::parse_from(["holoflow", "flow", "--delta", "1,3", "--phi0", "-0.1,0.2"])
            .into_config()
            .unwrap();
        assert_eq!(c.deltas, vec![1.0, 3.0]);
        assert_eq!(c.phi0, Some(vec![-0.1, 0.2]));
    }

    #[test]
    fn validation() {
        assert!(RunConfig::default().validate().is_err());
        let mut c = RunConfig::for_command(Command::Squeeze);
        c.validate().unwrap();
        c.tolerances.insert("x".into(), 1e-17);
        assert!(c.validate().is_err());
        assert!(RunConfig::from_toml("sed = 1").is_err());
        assert!(RunConfig::from_toml("command = \"bogus\"").is_err());
    }

    #[test]
    fn names_round_trip() {
        for c in Command::ALL {
            assert_eq!(Command::from_str(c.as_str(), false).unwrap(), c);
        }
    }
}
