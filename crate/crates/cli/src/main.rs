use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};

mod commands;
mod config;
mod error;
mod io;
mod model;
mod report;

use commands::PerturbFlags;
use config::LoadedConfig;
use error::{EXIT_IO, EXIT_PARAMS, EXIT_PASS};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    /// Closed-form levels against the eigensolver.
    Spectrum,
    /// Write closed-form states and their lifts.
    Modes,
    /// Write the 4x4 potential of a configured reduction.
    Assemble,
    /// Recover the reduction of a stored potential.
    Detect,
    /// Run every identity and residual check for a model.
    Verify,
    /// Lift a perturbation with vanishing first-order shift.
    Perturb,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Modes => "modes",
            Command::Assemble => "assemble",
            Command::Detect => "detect",
            Command::Verify => "verify",
            Command::Perturb => "perturb",
        }
    }
}

/// Reduce 4x4 Dirac Hamiltonians to pairs of 2x2 problems and check the
/// solvable models built that way.
#[derive(Debug, Parser)]
#[command(name = "dirac-reduce", version)]
struct Cli {
    command: Command,
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: out/<command>).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the command's primary tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// perturb: fixed spin-orbit reduction (tau = pi/4, phi = pi/2, epsilon = 1).
    #[arg(long, conflicts_with = "bilayer")]
    spin_orbit: bool,
    /// perturb: bilayer reduction (phi = 0).
    #[arg(long)]
    bilayer: bool,
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("DIRAC_REDUCE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("DIRAC_REDUCE_THREADS must be a positive integer, got '{v}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_IO } else { EXIT_PASS };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return EXIT_IO;
    }
    if let Some(t) = cli.tol {
        if !(t.is_finite() && t > 0.0) {
            eprintln!("error: --tol must be a positive number, got {t}");
            return EXIT_PARAMS;
        }
    }
    if (cli.spin_orbit || cli.bilayer) && !matches!(cli.command, Command::Perturb) {
        eprintln!("error: --spin-orbit and --bilayer apply to perturb only");
        return EXIT_PARAMS;
    }
    let start = Instant::now();
    let cfg = match LoadedConfig::load(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let out = cli.out.unwrap_or_else(|| PathBuf::from("out").join(cli.command.name()));
    let flags = PerturbFlags {
        spin_orbit: cli.spin_orbit,
        bilayer: cli.bilayer,
    };
    let report = commands::run(cli.command.name(), &cfg, &out, cli.tol, flags)
        .and_then(|r| r.emit(&out, start.elapsed().as_secs_f64()).map(|()| r));
    match report {
        Ok(r) => commands::status(&r),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run() as u8)
}
