use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pauliprop_bench::{
    output_dir, run_sweep, run_validation, run_weights, BenchError, CellFailure, ExperimentConfig, OUTPUT_ENV,
};

#[derive(Parser)]
#[command(name = "pauliprop", version, about = "Low-weight Pauli propagation experiments")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every configured estimator over the depth × k grid.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Leave runtime_ms empty so reruns are byte-identical.
        #[arg(long)]
        no_timings: bool,
    },
    /// Weight histogram of the propagated observable per depth.
    Weights {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Oracle self-checks on random instances.
    Validate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn report(failures: &[CellFailure]) {
    for f in failures {
        let k = f.k.map_or_else(|| "-".to_string(), |k| k.to_string());
        eprintln!(
            "failed cell depth={} k={k} estimator={}: {}",
            f.depth, f.estimator, f.message
        );
    }
}

fn run(cli: Cli) -> Result<bool, BenchError> {
    let env = std::env::var(OUTPUT_ENV).ok();
    match cli.command {
        Command::Sweep {
            config,
            out,
            no_timings,
        } => {
            let mut exp = ExperimentConfig::load(&config)?;
            if no_timings {
                exp.config.record_timings = false;
            }
            let outcome = run_sweep(&exp);
            let dir = output_dir(out.as_deref(), env.as_deref(), &exp);
            let (csv, json) = outcome
                .table
                .write(&dir, &format!("{}_sweep", exp.config.name), &outcome.provenance)?;
            println!("wrote {} and {}", csv.display(), json.display());
            report(&outcome.failures);
            Ok(outcome.success())
        }
        Command::Weights { config, out } => {
            let exp = ExperimentConfig::load(&config)?;
            let outcome = run_weights(&exp);
            let dir = output_dir(out.as_deref(), env.as_deref(), &exp);
            let (csv, json) =
                outcome
                    .table
                    .write(&dir, &format!("{}_weights", exp.config.name), &outcome.provenance)?;
            println!("wrote {} and {}", csv.display(), json.display());
            report(&outcome.failures);
            Ok(outcome.failures.is_empty())
        }
        Command::Validate { n, trials, seed } => {
            let r = run_validation(n, trials, seed)?;
            println!("{r}");
            Ok(r.passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
