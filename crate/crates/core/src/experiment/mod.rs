//! Experiment driver behind the `gperim` binary.
//!
//! Each experiment turns an [`ExperimentConfig`] into an
//! [`ExperimentReport`] whose column set is fixed per experiment. Reports are
//! a pure function of the config except for the duration in the provenance.

mod config;
mod pipelines;
mod report;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::time::Instant;

pub use config::{parse_args, ArgsError, Experiment, ExperimentConfig, OutputFormat};
pub use pipelines::{
    columns, BERNSTEIN_PROBES, CURVATURE_STEPS, DUALITY_ITERATIONS, RANDOM_FUNCTIONS, RANDOM_SETS,
};
pub use report::{Cell, ExperimentReport, Provenance};

use crate::error::Result;

/// Validate `config` and run its pipeline.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let start = Instant::now();
    let table = pipelines::dispatch(config)?;
    Ok(ExperimentReport {
        config: config.clone(),
        columns: columns(config.experiment).iter().map(|c| c.to_string()).collect(),
        rows: table.rows,
        summary: table.summary,
        provenance: Provenance {
            library: "gperim".into(),
            version: crate::VERSION.into(),
            duration_seconds: start.elapsed().as_secs_f64(),
        },
    })
}

/// Serialize `report` in the configured format.
pub fn write_report<W: Write>(report: &ExperimentReport, out: W) -> Result<()> {
    match report.config.format {
        OutputFormat::Csv => report.write_csv(out),
        OutputFormat::Json => {
            let mut out = out;
            out.write_all(report.to_json_string().as_bytes())?;
            Ok(())
        }
    }
}

/// Write the report to the configured path, or to standard output when no
/// path is set.
pub fn emit(report: &ExperimentReport) -> Result<()> {
    match &report.config.out_path {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write_report(report, &mut w)?;
            w.flush()?;
        }
        None => write_report(report, std::io::stdout().lock())?,
    }
    Ok(())
}
