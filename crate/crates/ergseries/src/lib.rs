//! Experiment runner for `ergseries-core`: coefficient-table IO, JSON
//! experiment configs, CSV and SVG outputs, and run manifests.

pub mod coeffs;
pub mod error;
pub mod experiments;
pub mod output;
pub mod parse;
pub mod plot;
pub mod tolerances;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use error::{AppError, ErrorClass};
pub use experiments::{Context, Experiment};
use output::{resolve, write_atomic, Manifest};
use tolerances::Tolerances;

pub const SCHEMA_VERSION: u32 = 1;

/// On-disk experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub experiment: String,
    /// Overridden by `--seed`.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub params: Value,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, AppError> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(AppError::schema(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }

    pub fn experiment(&self) -> Result<Experiment, AppError> {
        Experiment::from_params(&self.experiment, self.params.clone())
    }
}

pub const DEFAULT_SEED: u64 = 0;

pub struct Run<'a> {
    pub experiment: &'a Experiment,
    pub seed: u64,
    pub out_dir: &'a Path,
    pub base_dir: &'a Path,
    pub tolerances: &'a Tolerances,
}

/// Run one experiment and write its CSV, any extra files, and `manifest.json`
/// into the output directory.
pub fn execute(run: &Run) -> Result<Manifest, AppError> {
    let ctx = Context { seed: run.seed, base_dir: run.base_dir, tolerances: run.tolerances };
    let result = experiments::run(run.experiment, &ctx)?;
    let csv_path = resolve(run.out_dir, &run.experiment.csv_name());
    write_atomic(&csv_path, result.table.to_csv().as_bytes())?;
    let mut outputs = vec![display(&csv_path, run.out_dir)];
    for (name, contents) in &result.extra {
        let p = resolve(run.out_dir, name);
        write_atomic(&p, contents.as_bytes())?;
        outputs.push(display(&p, run.out_dir));
    }
    let manifest = Manifest {
        tool: "ergseries",
        version: env!("CARGO_PKG_VERSION"),
        schema_version: SCHEMA_VERSION,
        experiment: run.experiment.name().to_string(),
        seed: run.seed,
        params: run.experiment.params_json(),
        tolerances: serde_json::to_value(&run.tolerances.values)?,
        inputs: result.inputs,
        outputs,
        summary: result.summary,
    };
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    write_atomic(&run.out_dir.join("manifest.json"), text.as_bytes())?;
    Ok(manifest)
}

fn display(p: &Path, out_dir: &Path) -> String {
    p.strip_prefix(out_dir).map(PathBuf::from).unwrap_or_else(|_| p.to_path_buf()).display().to_string()
}
