use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use feller_symbol::config::{ExperimentConfig, Task};
use feller_symbol::experiment::run;
use feller_symbol::Error;

#[derive(Parser)]
#[command(version, about = "Symbols of Feller generators on the torus and SU(2)")]
struct Cli {
    #[command(subcommand)]
    task: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transform a random band-limited function and invert it
    FourierRoundtrip(Common),
    /// Generator symbol of the selected family
    Symbol(Common),
    /// Semigroup symbol and the semigroup-law defect
    Evolve(Common),
    /// Resolvent symbol by Laplace quadrature
    Resolvent(Common),
    /// Monte Carlo path ensemble and empirical symbol
    Simulate(Common),
    /// Adjoint, symmetry and Dirichlet form checks
    Dirichlet(Common),
    /// The full property suite
    Verify(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment file with [group], [process] and [run] sections
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
}

impl Command {
    fn split(self) -> (Task, Common) {
        match self {
            Command::FourierRoundtrip(c) => (Task::FourierRoundtrip, c),
            Command::Symbol(c) => (Task::Symbol, c),
            Command::Evolve(c) => (Task::Evolve, c),
            Command::Resolvent(c) => (Task::Resolvent, c),
            Command::Simulate(c) => (Task::Simulate, c),
            Command::Dirichlet(c) => (Task::Dirichlet, c),
            Command::Verify(c) => (Task::Verify, c),
        }
    }
}

fn load(c: &Common) -> feller_symbol::Result<ExperimentConfig> {
    let mut cfg = match &c.config {
        Some(path) => ExperimentConfig::parse(&std::fs::read_to_string(path)?)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(o) = &c.out {
        cfg.out = o.clone();
    }
    if let Some(t) = c.tol {
        cfg.tol = Some(t);
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (task, common) = cli.task.split();
    let result = load(&common).and_then(|cfg| run(&cfg, task));
    match result {
        Ok(outcome) => {
            for line in &outcome.summary {
                println!("{line}");
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("{task}: tolerance check failed");
                ExitCode::from(1)
            }
        }
        Err(e @ (Error::Config(_) | Error::Io(_))) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
