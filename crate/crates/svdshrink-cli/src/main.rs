//! `svdshrink` — shrinkage regression and unbiased risk estimates in the
//! singular-value basis.
//!
//! Exit codes: 0 success, 2 I/O failure, 3 parse/validation failure,
//! 4 numerical failure. Output files are pure functions of the inputs,
//! flags and seed: reruns reproduce them byte for byte.

mod commands;
mod cv;
mod dataset;
mod error;
mod model;
mod output;

use std::process::ExitCode;

use clap::Parser;

#[derive(Debug, Parser)]
#[command(
    name = "svdshrink",
    version,
    about = "Shrinkage regression (ridge, PCR, g-prior, horseshoe, lasso) \
             with unbiased risk estimates in the singular-value basis"
)]
struct Cli {
    /// Worker threads for parallel sections (0 or absent: all cores).
    /// Results never depend on the thread count.
    #[arg(long, global = true, value_name = "COUNT")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: commands::Command,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // --help/--version are successful outcomes; anything else is a
            // command-line validation failure.
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    if let Some(threads) = cli.threads {
        if threads > 0 {
            if let Err(e) = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global()
            {
                eprintln!("error: could not configure {threads} worker threads: {e}");
                return ExitCode::from(3);
            }
        }
    }
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
