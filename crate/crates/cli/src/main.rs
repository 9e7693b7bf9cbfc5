use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gaugelab_cli::{run, Experiment, RunOptions};

#[derive(Parser)]
#[command(name = "gaugelab", version, about = "Numerical experiments on SU(2) connections over R^3")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML configuration; every key has a default
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Report path (default: <subcommand>.csv)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Overrides the configured seed
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Exit with status 1 when a configured assertion fails
    #[arg(long, global = true)]
    assert: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Decay exponents of |A|, |F|, |grad A| and |[A, A]|
    CurvatureScan,
    /// Term norms of the covariant Laplacian on shell packets
    WeylScan,
    /// Lowest eigenvalues of the lattice operator per box
    Spectrum,
    /// Exterior L3 tail norms
    TailScan,
    /// Lattice Coulomb gauge fixing
    GaugeFix,
    /// Constant of the curvature-adjusted Kato inequality
    KatoCheck,
}

impl From<Command> for Experiment {
    fn from(c: Command) -> Self {
        match c {
            Command::CurvatureScan => Experiment::CurvatureScan,
            Command::WeylScan => Experiment::WeylScan,
            Command::Spectrum => Experiment::Spectrum,
            Command::TailScan => Experiment::TailScan,
            Command::GaugeFix => Experiment::GaugeFix,
            Command::KatoCheck => Experiment::KatoCheck,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("gaugelab: cannot set up {n} threads: {e}");
            return ExitCode::from(gaugelab_cli::EXIT_CONFIG as u8);
        }
    }
    let opts = RunOptions {
        config: cli.config,
        out: cli.out,
        seed: cli.seed,
        assert: cli.assert,
    };
    let outcome = match run(cli.command.into(), &opts) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("gaugelab: writing report: {e}");
            return ExitCode::from(gaugelab_cli::EXIT_FLAGGED as u8);
        }
    };
    let r = &outcome.report;
    let passed = r.assertions.iter().filter(|a| a.passed).count();
    eprintln!(
        "{}: {} rows, {} flagged, assertions {passed}/{} -> {}",
        r.experiment,
        r.rows.len(),
        r.flagged_rows(),
        r.assertions.len(),
        outcome.path.display()
    );
    for a in r.assertions.iter().filter(|a| !a.passed) {
        eprintln!("  failed: {} ({})", a.name, a.detail);
    }
    if let Some(e) = &r.error {
        eprintln!("  error: {e}");
    }
    ExitCode::from(outcome.exit_code as u8)
}
