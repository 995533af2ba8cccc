use std::fs::File;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use risnet::harness::{load_config, point_summary, run_experiment, summarize};
use risnet::Error;

#[derive(Parser)]
#[command(
    name = "risnet",
    version,
    about = "RIS configuration search experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep and write the per-trial CSV.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the master seed of the config.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check a config without running it.
    Validate { config: PathBuf },
    /// Group rows of a result file and print metric statistics as CSV.
    Summarize {
        results: PathBuf,
        #[arg(long, value_delimiter = ',')]
        group_by: Vec<String>,
        #[arg(long, default_value = "obj_true")]
        metric: String,
    },
}

const EXIT_VALIDATION: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

fn exit_code(e: &Error) -> ExitCode {
    match e {
        Error::Validation(_) | Error::Parse { .. } | Error::Config(_) | Error::UnknownColumn(_) => {
            ExitCode::from(EXIT_VALIDATION)
        }
        _ => ExitCode::from(EXIT_RUNTIME),
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run {
            config,
            out,
            seed,
            threads,
        } => {
            let mut cfg = load_config(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let out = out
                .or_else(|| cfg.output.clone())
                .unwrap_or_else(|| PathBuf::from("results.csv"));
            let validated = cfg.validate()?;
            let records = run_experiment(&validated, &out, threads)?;
            print!("{}", point_summary(&records));
            eprintln!("wrote {} rows to {}", records.len(), out.display());
        }
        Command::Validate { config } => {
            let v = load_config(&config)?.validate()?;
            println!(
                "ok: {} points x {} trials x {} architectures x {} methods = {} rows",
                v.points.len(),
                v.config.trials,
                v.architectures.len(),
                v.methods.len(),
                v.row_count()
            );
        }
        Command::Summarize {
            results,
            group_by,
            metric,
        } => {
            let table = summarize(File::open(&results)?, &group_by, &metric)?;
            table.write_csv(std::io::stdout().lock())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
