use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod bench;
mod convert;
mod failure;
mod input;
mod json;
mod solve;
mod spectrum;

use failure::{Failure, EXIT_USAGE};

/// Matrix-free PageRank: power, extrapolated power, refined Arnoldi and
/// refined Hessenberg solvers.
#[derive(Parser, Debug)]
#[command(name = "prnk", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a graph and write the binary cache
    Convert(convert::ConvertArgs),
    /// Compute a PageRank vector
    Solve(solve::SolveArgs),
    /// Sweep methods and parameters, emit a CSV table
    Bench(bench::BenchArgs),
    /// Dump Ritz values and decomposition diagnostics
    Spectrum(spectrum::SpectrumArgs),
}

fn configure_threads() -> Result<usize, Failure> {
    let Ok(raw) = std::env::var("PRNK_THREADS") else {
        return Ok(rayon::current_num_threads());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        Failure::usage(format!(
            "PRNK_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    // a second initialization only fails if a pool already exists
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(threads)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let outcome = configure_threads().and_then(|threads| match cli.command {
        Command::Convert(args) => convert::run(args),
        Command::Solve(args) => solve::run(args, threads),
        Command::Bench(args) => bench::run(args),
        Command::Spectrum(args) => spectrum::run(args),
    });
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
