use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dynmap::commands::{self, EXIT_OK, EXIT_VIOLATION};
use dynmap::output::write_atomic;
use dynmap::{plot, CliResult};

/// Spectral analysis and non-Markovianity witnesses for time-dependent
/// quantum dynamical maps.
#[derive(Parser)]
#[command(name = "dynmap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate a scenario and write trajectory CSV, report JSON and plot.
    /// Exits 3 if any witness reports a violation.
    Run {
        config: PathBuf,
        /// Directory that relative output paths resolve against.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Run a scenario once per parameter value and write a summary CSV.
    Sweep {
        config: PathBuf,
        /// Dotted path into the config, e.g. `model.bath.gamma_m`.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        /// Summary CSV path (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write each run's CSV and report here.
        #[arg(long)]
        runs_dir: Option<PathBuf>,
    },
    /// Plot trajectory CSV columns against t as SVG.
    Plot {
        csv: PathBuf,
        /// Comma-separated column names.
        #[arg(long, value_delimiter = ',', required = true)]
        cols: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// List the built-in model families.
    ListModels {
        #[arg(long)]
        json: bool,
    },
}

fn execute(command: Command) -> CliResult<i32> {
    match command {
        Command::Run { config, out_dir } => {
            let artifacts = commands::run(&config, &out_dir)?;
            println!("{}", artifacts.summary);
            println!("csv: {}", artifacts.csv.display());
            println!("report: {}", artifacts.report.display());
            if let Some(p) = &artifacts.plot {
                println!("plot: {}", p.display());
            }
            Ok(if artifacts.violated { EXIT_VIOLATION } else { EXIT_OK })
        }
        Command::Sweep { config, param, values, out, runs_dir } => {
            let values: Vec<String> =
                values.split(',').map(str::trim).filter(|v| !v.is_empty()).map(String::from).collect();
            let summary = commands::sweep(&config, &param, &values, runs_dir.as_deref())?;
            match out {
                Some(path) => write_atomic(&path, &summary)?,
                None => {
                    let _ = std::io::stdout().write_all(&summary);
                }
            }
            Ok(EXIT_OK)
        }
        Command::Plot { csv, cols, out } => {
            plot::plot(&csv, &cols, &out)?;
            Ok(EXIT_OK)
        }
        Command::ListModels { json } => {
            print!("{}", commands::list_models(json)?);
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("dynmap: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
