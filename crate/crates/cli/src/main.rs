use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rabi_cli::{execute, CliError, RunConfig};

/// Phase diagrams, fluctuation exponents, mean-field trajectories and
/// quantum steady states of the anisotropic open Rabi model.
///
/// Exit codes: 0 success, 2 configuration error, 3 degenerate fit,
/// 4 quantum solver failure.
#[derive(Parser)]
#[command(name = "rabi-dpt", version)]
struct Cli {
    /// JSON parameter block for the command; defaults are used when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Seed for sampled initial conditions.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Phase labels over a (g_r, g_cr) grid, boundary points and tricritical points.
    PhaseDiagram,
    /// Order parameter, fluctuation eigenvalues and excitation numbers along a line.
    LineScan,
    /// Log-log fits of the decay-rate and excitation exponents.
    Exponents,
    /// Mean-field trajectories and their attractors.
    Trajectory,
    /// Attractor map over initial cavity coherences.
    Basin,
    /// Quantum steady state, diagnostics and Wigner function.
    Quantum,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::PhaseDiagram => "phase-diagram",
            Command::LineScan => "line-scan",
            Command::Exponents => "exponents",
            Command::Trajectory => "trajectory",
            Command::Basin => "basin",
            Command::Quantum => "quantum",
        }
    }
}

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let name = cli.command.name();
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::from_json(name, &text)?
        }
        None => RunConfig::default_for(name)?,
    };
    if let Some(seed) = cli.seed {
        if !cfg.apply_seed(seed) {
            eprintln!("warning: --seed has no effect on {name}");
        }
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("config error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: {e}");
        }
    }
    let result = load(&cli).and_then(|cfg| execute(&cfg, &cli.out));
    match result {
        Ok(report) => {
            for f in &report.files {
                println!("{}", f.display());
            }
            if report.unresolved > 0 {
                eprintln!("{} trajectories unresolved", report.unresolved);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
