use std::process::ExitCode;

use clap::{Parser, Subcommand};
use coexact_cli::report::write_output;
use coexact_cli::{run, Args, CliError, CommandKind, ExperimentConfig};

#[derive(Parser)]
#[command(name = "coexact", version, about = "Coexact spectra, filling areas and flow curves on 3-manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Smallest coexact 1-form eigenvalues.
    Spectrum(Args),
    /// Betti numbers, torsion and the cycle/cocycle bases.
    Homology(Args),
    /// Minimal filling area of a cycle.
    Filling(Args),
    /// Upper bound for the discrete Cheeger constant.
    Cheeger(Args),
    /// Flow-curve estimates along random trajectories.
    Montecarlo(Args),
    /// Berger sphere closed forms and meshed checks.
    Berger(Args),
    /// Cusp-like warped product: Dirichlet value and mesh.
    Cusp(Args),
    /// Runs the acceptance suite.
    VerifyAll(Args),
}

impl Command {
    fn split(self) -> (CommandKind, Args) {
        match self {
            Command::Spectrum(a) => (CommandKind::Spectrum, a),
            Command::Homology(a) => (CommandKind::Homology, a),
            Command::Filling(a) => (CommandKind::Filling, a),
            Command::Cheeger(a) => (CommandKind::Cheeger, a),
            Command::Montecarlo(a) => (CommandKind::Montecarlo, a),
            Command::Berger(a) => (CommandKind::Berger, a),
            Command::Cusp(a) => (CommandKind::Cusp, a),
            Command::VerifyAll(a) => (CommandKind::VerifyAll, a),
        }
    }
}

fn execute(kind: CommandKind, args: &Args) -> Result<(), CliError> {
    let cfg = ExperimentConfig::resolve(kind, args)?;
    if let Some(t) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let out = run(&cfg)?;
    write_output(&out, cfg.out.as_deref())?;
    match out.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(2);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let (kind, args) = cli.command.split();
    match execute(kind, &args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
