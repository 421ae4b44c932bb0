//! Experiment driver around [`hypo_core`]: configuration, output files and
//! the `certify`, `parametrix`, `solve`, `bootstrap` and `demo` commands.

use std::path::Path;

pub mod commands;
pub mod config;
pub mod demo;
pub mod output;
pub mod record;
pub mod rhs;

pub use config::ExperimentConfig;
pub use output::OutputDir;

#[derive(Debug, thiserror::Error)]
pub enum HypoError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Symbol(#[from] hypo_core::symbols::SymbolError),
    #[error(transparent)]
    Weight(#[from] hypo_core::weights::WeightError),
    #[error(transparent)]
    Certify(#[from] hypo_core::certify::CertifyError),
    #[error(transparent)]
    Calculus(#[from] hypo_core::calculus::CalculusError),
    #[error(transparent)]
    Spectral(#[from] hypo_core::spectral::SpectralError),
    #[error("hypothesis failure: {0}")]
    Bootstrap(#[from] hypo_core::bootstrap::BootstrapError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Exit status for errors (parse errors, bad configs, failed hypotheses).
pub const EXIT_ERROR: i32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub lines: Vec<String>,
    pub exit_code: i32,
}

impl Report {
    pub fn new(lines: Vec<String>, exit_code: i32) -> Self {
        Report { lines, exit_code }
    }
}

/// Fills command-dependent defaults so the digest covers them.
pub fn resolve(cfg: &mut ExperimentConfig) -> Result<(), HypoError> {
    match cfg.require("command")? {
        "certify" | "parametrix" | "solve" => {
            cfg.require("symbol")?;
        }
        "bootstrap" => {}
        "demo" => {
            let name = cfg.require("demo")?.to_string();
            demo::defaults(&name, cfg)?;
        }
        other => return Err(HypoError::Config(format!("unknown command `{}`", other))),
    }
    Ok(())
}

/// Resolves the config, writes all outputs under `out_dir` and returns the
/// printed lines with the exit status.
pub fn run(mut cfg: ExperimentConfig, out_dir: &Path) -> Result<Report, HypoError> {
    resolve(&mut cfg)?;
    let mut out = OutputDir::create(out_dir, &cfg)?;
    let mut report = match cfg.require("command")? {
        "certify" => commands::run_certify(&cfg, &mut out)?,
        "parametrix" => commands::run_parametrix(&cfg, &mut out)?,
        "solve" => commands::run_solve(&cfg, &mut out)?,
        "bootstrap" => commands::run_bootstrap(&cfg, &mut out)?,
        "demo" => {
            let name = cfg.require("demo")?.to_string();
            demo::run(&name, &cfg, &mut out)?
        }
        other => return Err(HypoError::Config(format!("unknown command `{}`", other))),
    };
    report.lines.insert(0, format!("CONFIG-DIGEST: {}", out.digest()));
    Ok(report)
}
