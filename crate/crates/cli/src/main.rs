//! `dmbm` — experiment runner for the DMBM link-level simulation toolkit.
//!
//! Every subcommand consumes a JSON spec file (see `recipes/`) and writes one
//! result file. Exit codes: 0 success, 2 validation error, 3 resource-cap
//! error, 4 i/o error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dmbm_cli::error::CliError;
use dmbm_cli::run::{run_spec_file, validate_spec_file, Overrides};
use dmbm_cli::spec::{ExperimentKind, Format};
use dmbm_core::montecarlo::{NoProgress, Progress};

#[derive(Parser)]
#[command(
    name = "dmbm",
    about = "Link-level simulation and analysis for DMBM and benchmark index-modulation schemes",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Master seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Result file path override.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Result format override.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for the Monte Carlo engine (0 = auto).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Suppress progress lines on stderr.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo BER curves for the listed systems.
    Simulate {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Union-bound theoretical ABER curves.
    Theory {
        #[arg(long)]
        spec: PathBuf,
    },
    /// BER versus rotation angle at fixed SNR points.
    AngleSweep {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Ergodic capacity estimates over common channel draws.
    Capacity {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Detection-cost table in real multiplications.
    Complexity {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Energy saving, spectral efficiency, and throughput table.
    Efficiency {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Multi-system BER comparison at equal spectral efficiency.
    Compare {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Parse and validate a spec file, printing the resolved experiment.
    Validate {
        #[arg(long)]
        spec: PathBuf,
    },
}

/// Machine-readable progress lines on stderr.
struct StderrProgress;

impl Progress for StderrProgress {
    fn on_progress(&self, point_index: usize, trials: u64, bit_errors: u64) {
        eprintln!("progress point={point_index} trials={trials} errors={bit_errors}");
    }
}

fn real_main(cli: Cli) -> Result<(), CliError> {
    if cli.threads > 0 {
        // Results do not depend on the pool size; this only bounds CPU use.
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| {
                CliError::Validation(format!("cannot configure {} threads: {e}", cli.threads))
            })?;
    }
    let ov = Overrides {
        seed: cli.seed,
        out: cli.out.clone(),
        format: cli.format,
    };
    let progress: &dyn Progress = if cli.quiet { &NoProgress } else { &StderrProgress };

    let (kind, spec_path) = match &cli.command {
        Command::Simulate { spec } => (ExperimentKind::Ber, spec),
        Command::Theory { spec } => (ExperimentKind::Theory, spec),
        Command::AngleSweep { spec } => (ExperimentKind::AngleSweep, spec),
        Command::Capacity { spec } => (ExperimentKind::Capacity, spec),
        Command::Complexity { spec } => (ExperimentKind::Complexity, spec),
        Command::Efficiency { spec } => (ExperimentKind::Efficiency, spec),
        Command::Compare { spec } => (ExperimentKind::Compare, spec),
        Command::Validate { spec } => {
            let resolved = validate_spec_file(spec, &ov)?;
            println!("{}", resolved.to_json());
            return Ok(());
        }
    };
    let out = run_spec_file(spec_path, kind, &ov, progress)?;
    println!("{}", out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
