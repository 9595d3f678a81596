use std::path::PathBuf;

use clap::Args;
use prnk_core::graph_io::{graph_stats, write_cache};

use crate::failure::{Context, Failure};
use crate::input;

#[derive(Args, Debug)]
pub struct ConvertArgs {
    /// Graph file: SNAP edge list, Matrix Market or cache
    #[arg(long)]
    pub input: PathBuf,

    /// Input format (snap, mtx, cache); guessed from the extension by default
    #[arg(long)]
    pub format: Option<String>,

    /// Cache file to write
    #[arg(long)]
    pub output: PathBuf,
}

pub fn run(args: ConvertArgs) -> Result<u8, Failure> {
    let graph = input::load(&args.input, args.format.as_deref())?;
    let stats = graph_stats(&graph)?;
    write_cache(&graph, &args.output).context(format!("writing {}", args.output.display()))?;
    let line = serde_json::to_string(&stats).map_err(|e| Failure {
        code: crate::failure::EXIT_DATA,
        error: e.into(),
    })?;
    println!("{line}");
    Ok(0)
}
