//! Experiment configuration and command-line parsing.

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GaussianGrid, MAX_DIM, MAX_NODES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Isoperimetry,
    Symmetrize,
    RelaxDemo,
    DualityGap,
    GammaSweep,
    Curvature,
    BernsteinProbe,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Self::Isoperimetry,
        Self::Symmetrize,
        Self::RelaxDemo,
        Self::DualityGap,
        Self::GammaSweep,
        Self::Curvature,
        Self::BernsteinProbe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Isoperimetry => "isoperimetry",
            Self::Symmetrize => "symmetrize",
            Self::RelaxDemo => "relax-demo",
            Self::DualityGap => "duality-gap",
            Self::GammaSweep => "gamma-sweep",
            Self::Curvature => "curvature",
            Self::BernsteinProbe => "bernstein-probe",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub dim: usize,
    pub grid_n: usize,
    pub half_width: f64,
    pub eps_list: Vec<f64>,
    pub mass: f64,
    pub delta: f64,
    pub n_levels: usize,
    pub seed: u64,
    pub out_path: Option<PathBuf>,
    pub format: OutputFormat,
}

impl ExperimentConfig {
    /// Documented defaults for everything but the experiment.
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            dim: 1,
            grid_n: 2048,
            half_width: 6.0,
            eps_list: vec![0.4, 0.2, 0.1, 0.05],
            mass: 0.5,
            delta: 0.02,
            n_levels: 64,
            seed: 0,
            out_path: None,
            format: OutputFormat::Csv,
        }
    }

    /// Field-level range checks. Experiment pipelines may reject further
    /// combinations once they know the grid they need.
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: String| Err(Error::InvalidArgument(format!("--{field}: {msg}")));
        if !(1..=MAX_DIM).contains(&self.dim) {
            return bad("dim", format!("must be in 1..={MAX_DIM}, got {}", self.dim));
        }
        if self.grid_n < 16 {
            return bad("grid-n", format!("must be at least 16, got {}", self.grid_n));
        }
        let nodes = (self.grid_n as u128).pow(self.dim as u32);
        if nodes > MAX_NODES as u128 {
            return bad(
                "grid-n",
                format!(
                    "{}^{} nodes exceed the limit of {MAX_NODES}",
                    self.grid_n, self.dim
                ),
            );
        }
        if !(self.half_width >= 4.0 && self.half_width.is_finite()) {
            return bad(
                "half-width",
                format!("must be finite and at least 4, got {}", self.half_width),
            );
        }
        if self.eps_list.is_empty() {
            return bad("eps-list", "must not be empty".into());
        }
        if let Some(e) = self.eps_list.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return bad(
                "eps-list",
                format!("entries must be positive and finite, got {e}"),
            );
        }
        if !self.eps_list.windows(2).all(|p| p[1] < p[0]) {
            return bad("eps-list", "entries must be strictly decreasing".into());
        }
        if !(self.mass > 0.0 && self.mass < 1.0) {
            return bad("mass", format!("must lie in (0, 1), got {}", self.mass));
        }
        if !(self.delta > 0.0 && self.delta < 0.25) {
            return bad("delta", format!("must lie in (0, 0.25), got {}", self.delta));
        }
        if self.n_levels < 32 {
            return bad("levels", format!("must be at least 32, got {}", self.n_levels));
        }
        Ok(())
    }

    pub(crate) fn grid(&self) -> Result<std::sync::Arc<GaussianGrid>> {
        crate::grid::build_grid(self.dim, self.half_width, self.grid_n)
    }
}

/// Run a numerical experiment and write its report.
#[derive(Debug, Parser)]
#[command(name = "gperim", version, about)]
struct Args {
    #[arg(long, value_enum)]
    experiment: Experiment,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long, default_value_t = 2048)]
    grid_n: usize,
    #[arg(long, default_value_t = 6.0)]
    half_width: f64,
    /// Comma-separated, strictly decreasing.
    #[arg(long, value_delimiter = ',', default_value = "0.4,0.2,0.1,0.05")]
    eps_list: Vec<f64>,
    #[arg(long, default_value_t = 0.5)]
    mass: f64,
    #[arg(long, default_value_t = 0.02)]
    delta: f64,
    /// Level count for function symmetrization.
    #[arg(long = "levels", default_value_t = 64)]
    n_levels: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report file; without it the report goes to standard output.
    #[arg(long = "out")]
    out_path: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

/// Why the command line was not turned into a config.
#[derive(Debug)]
pub enum ArgsError {
    /// Rejected by the parser, or a help/version request.
    Usage(clap::Error),
    /// Parsed but out of range.
    Invalid(Error),
}

impl fmt::Display for ArgsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(e) => write!(f, "{e}"),
            Self::Invalid(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ArgsError {}

/// Parse `argv` (program name first) into a validated config.
pub fn parse_args<I, T>(argv: I) -> std::result::Result<ExperimentConfig, ArgsError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let a = Args::try_parse_from(argv).map_err(ArgsError::Usage)?;
    let config = ExperimentConfig {
        experiment: a.experiment,
        dim: a.dim,
        grid_n: a.grid_n,
        half_width: a.half_width,
        eps_list: a.eps_list,
        mass: a.mass,
        delta: a.delta,
        n_levels: a.n_levels,
        seed: a.seed,
        out_path: a.out_path,
        format: a.format,
    };
    config.validate().map_err(ArgsError::Invalid)?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> std::result::Result<ExperimentConfig, ArgsError> {
        parse_args(std::iter::once("gperim").chain(args.iter().copied()))
    }

    #[test]
    fn defaults() {
        let c = parse(&["--experiment", "isoperimetry"]).unwrap();
        assert_eq!(c, ExperimentConfig::new(Experiment::Isoperimetry));
    }

    #[test]
    fn every_flag_maps_to_a_field() {
        let c = parse(&[
            "--experiment",
            "gamma-sweep",
            "--dim",
            "2",
            "--grid-n",
            "128",
            "--half-width",
            "5",
            "--eps-list",
            "0.4,0.2,0.1",
            "--mass",
            "0.3",
            "--delta",
            "0.05",
            "--levels",
            "40",
            "--seed",
            "7",
            "--out",
            "r.json",
            "--format",
            "json",
        ])
        .unwrap();
        assert_eq!(c.experiment, Experiment::GammaSweep);
        assert_eq!((c.dim, c.grid_n, c.half_width), (2, 128, 5.0));
        assert_eq!(c.eps_list, vec![0.4, 0.2, 0.1]);
        assert_eq!((c.mass, c.delta, c.n_levels, c.seed), (0.3, 0.05, 40, 7));
        assert_eq!(c.out_path, Some(PathBuf::from("r.json")));
        assert_eq!(c.format, OutputFormat::Json);
    }

    #[test]
    fn rejections() {
        assert!(matches!(parse(&[]), Err(ArgsError::Usage(_))));
        assert!(matches!(
            parse(&["--experiment", "nope"]),
            Err(ArgsError::Usage(_))
        ));
        assert!(matches!(
            parse(&["--experiment", "curvature", "--bogus"]),
            Err(ArgsError::Usage(_))
        ));
        assert!(matches!(
            parse(&["--experiment", "curvature", "--dim", "two"]),
            Err(ArgsError::Usage(_))
        ));
        for bad in [
            vec!["--mass", "1.5"],
            vec!["--dim", "4"],
            vec!["--grid-n", "8"],
            vec!["--dim", "3", "--grid-n", "512"],
            vec!["--eps-list", "0.1,0.2"],
            vec!["--eps-list", "0.1,-0.2"],
            vec!["--delta", "0.3"],
            vec!["--levels", "8"],
            vec!["--half-width", "2"],
        ] {
            let mut args = vec!["--experiment", "curvature"];
            args.extend(bad.iter().copied());
            assert!(matches!(parse(&args), Err(ArgsError::Invalid(_))), "{bad:?}");
        }
        let e = parse(&["--experiment", "curvature", "--mass", "1.5"]).unwrap_err();
        assert!(e.to_string().contains("--mass"));
    }

    #[test]
    fn experiment_names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(Experiment::from_str(e.name(), false).unwrap(), e);
            assert_eq!(serde_json::to_string(&e).unwrap(), format!("\"{e}\""));
        }
    }
}
