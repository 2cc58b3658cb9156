//! `freewick`: command-line driver for the freewick library.

mod commands;
mod output;
mod parse;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use output::Format;

#[derive(Parser, Debug)]
#[command(
    name = "freewick",
    version,
    about = "Free semicircular traces, Wick decompositions and GUE experiments"
)]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Worker threads (FREEWICK_THREADS takes precedence).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact GUE moments from the pairing expansion, with optional Monte Carlo.
    Moments(commands::MomentsArgs),
    /// Enumerate chord configurations and check their bounds.
    Configs(commands::ConfigsArgs),
    /// Compare a correlated semicircular trace with its configuration decomposition.
    WickVerify(commands::WickArgs),
    /// Check the permuted-product norm inequality.
    Masterineq(commands::MasterArgs),
    /// Monte Carlo L^{2k} norms (or moments) of P(X^N).
    Mc(commands::McArgs),
    /// Random matrix norms against the free-side norm with deterministic matrices.
    Strongconv(commands::StrongArgs),
    /// Exceedance frequencies of the GUE norm above the spectral edge.
    Tail(commands::TailArgs),
}

fn threads(flag: Option<usize>) -> Result<Option<usize>, String> {
    match std::env::var("FREEWICK_THREADS") {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|e| format!("FREEWICK_THREADS={v:?}: {e}")),
        _ => Ok(flag),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match threads(cli.threads) {
        Ok(Some(n)) if n > 0 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
            {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
        Ok(_) => {}
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = match cli.command {
        Command::Moments(a) => commands::moments(&a),
        Command::Configs(a) => commands::configs(&a),
        Command::WickVerify(a) => commands::wick_verify(&a),
        Command::Masterineq(a) => commands::masterineq(&a),
        Command::Mc(a) => commands::mc(&a),
        Command::Strongconv(a) => commands::strongconv(&a),
        Command::Tail(a) => commands::tail(&a),
    };
    match outcome {
        Ok(out) => {
            print!("{}", output::render(&out.report, cli.format));
            if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let code = commands::exit_code(&e);
            if code == 1 {
                let witness = serde_json::json!({ "error": e.to_string(), "pass": false });
                print!("{}", output::render(&witness, cli.format));
            }
            eprintln!("error: {e}");
            ExitCode::from(code)
        }
    }
}
