use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nmep::cli;

#[derive(Parser)]
#[command(name = "nmep", version, about = "Signed-ensemble unraveling of time-local master equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the simulation described by a config file and write a CSV series.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `[output] path` from the config.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Compare columns of two CSV series on an identical time grid.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        columns: Vec<String>,
        #[arg(long)]
        tol: f64,
    },
    /// Write the closed-form solution of a model on a time grid.
    ExportAnalytic {
        #[arg(long)]
        model: String,
        #[arg(long)]
        params: PathBuf,
        /// `t0:t_max:n`
        #[arg(long)]
        grid: String,
        #[arg(long)]
        output: PathBuf,
    },
}

fn configure_threads() {
    let Ok(value) = std::env::var("NMEP_THREADS") else {
        return;
    };
    match value.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("warning: NMEP_THREADS ignored: {e}");
            }
        }
        _ => eprintln!("warning: NMEP_THREADS must be a positive integer, ignoring `{value}`"),
    }
}

fn main() -> ExitCode {
    let args = match Cli::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let code = if e.use_stderr() { cli::EXIT_INPUT } else { cli::EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    configure_threads();
    let code = match args.command {
        Command::Simulate { config, output } => cli::simulate(&config, output.as_deref()),
        Command::Compare { a, b, columns, tol } => cli::compare(&a, &b, &columns, tol),
        Command::ExportAnalytic { model, params, grid, output } => cli::export_analytic(&model, &params, &grid, &output),
    };
    ExitCode::from(code as u8)
}
