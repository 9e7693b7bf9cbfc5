//! Batch runner for the gaugelab experiments.
//!
//! Each subcommand reads one section of the TOML configuration, runs the
//! matching library operation and writes a single CSV report whose first
//! line is a `#`-prefixed JSON provenance record.
//!
//! Exit codes: 0 when the run is clean (and, with `--assert`, every
//! assertion held); 1 when an assertion failed under `--assert`; 2 when a
//! row was flagged or the numerics failed; 3 for configuration errors.
//! A report is written in every case, including configuration errors.

pub mod config;
pub mod experiments;
pub mod report;

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::report::{Provenance, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_FLAGGED: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("config error: {0}")]
pub struct ConfigError(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    CurvatureScan,
    WeylScan,
    Spectrum,
    TailScan,
    GaugeFix,
    KatoCheck,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::CurvatureScan,
        Experiment::WeylScan,
        Experiment::Spectrum,
        Experiment::TailScan,
        Experiment::GaugeFix,
        Experiment::KatoCheck,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::CurvatureScan => "curvature-scan",
            Experiment::WeylScan => "weyl-scan",
            Experiment::Spectrum => "spectrum",
            Experiment::TailScan => "tail-scan",
            Experiment::GaugeFix => "gauge-fix",
            Experiment::KatoCheck => "kato-check",
        }
    }

    pub fn run(&self, cfg: &Config) -> Result<Report, ConfigError> {
        match self {
            Experiment::CurvatureScan => experiments::curvature_scan(cfg),
            Experiment::WeylScan => experiments::weyl_scan(cfg),
            Experiment::Spectrum => experiments::spectrum(cfg),
            Experiment::TailScan => experiments::tail_scan(cfg),
            Experiment::GaugeFix => experiments::gauge_fix(cfg),
            Experiment::KatoCheck => experiments::kato_check(cfg),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub config: Option<PathBuf>,
    /// Defaults to `<experiment>.csv` in the working directory.
    pub out: Option<PathBuf>,
    /// Overrides the configured seed.
    pub seed: Option<u64>,
    /// Turn failed assertions into a nonzero exit code.
    pub assert: bool,
}

#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub path: PathBuf,
    pub exit_code: i32,
}

/// SHA-256 of the effective configuration as JSON.
pub fn config_hash(cfg: &Config) -> String {
    let json = serde_json::to_vec(cfg).expect("config serializes");
    hex::encode(Sha256::digest(json))
}

pub fn exit_code(report: &Report, config_failed: bool, assert: bool) -> i32 {
    if config_failed {
        EXIT_CONFIG
    } else if report.error.is_some() || report.flagged_rows() > 0 {
        EXIT_FLAGGED
    } else if assert && !report.assertions_pass() {
        EXIT_ASSERTION
    } else {
        EXIT_OK
    }
}

/// Loads the configuration, runs `experiment` and writes its report.
pub fn run(experiment: Experiment, opts: &RunOptions) -> std::io::Result<Outcome> {
    let path = opts
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", experiment.name())));
    let loaded = Config::load(opts.config.as_deref()).map(|mut c| {
        if let Some(s) = opts.seed {
            c.seed = s;
        }
        c
    });
    let (report, hash, seed, failed) = match loaded {
        Ok(cfg) => {
            let hash = config_hash(&cfg);
            match experiment.run(&cfg) {
                Ok(r) => (r, hash, cfg.seed, false),
                Err(e) => (config_failure(experiment, &e), hash, cfg.seed, true),
            }
        }
        Err(e) => (config_failure(experiment, &e), String::new(), opts.seed.unwrap_or(0), true),
    };
    let prov = Provenance {
        config_hash: hash,
        seed,
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
    };
    write(&path, &report, &prov)?;
    Ok(Outcome {
        exit_code: exit_code(&report, failed, opts.assert),
        report,
        path,
    })
}

fn config_failure(experiment: Experiment, e: &ConfigError) -> Report {
    let mut r = Report::new(experiment.name(), &[]);
    r.error = Some(e.to_string());
    r
}

fn write(path: &Path, report: &Report, prov: &Provenance) -> std::io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    report::write_report(path, report, prov)
}
