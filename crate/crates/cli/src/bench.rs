use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::sync::Arc;

use clap::Args;
use serde::Deserialize;

use prnk_core::bench::{run_bench, write_bench_csv, BenchSpec};
use prnk_core::graph_io::build_transition;
use prnk_core::solvers::Method;

use crate::failure::{Context, Failure, EXIT_USAGE};
use crate::input;

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// TOML sweep description; flags override its entries
    #[arg(long)]
    pub spec: Option<PathBuf>,

    /// Dataset files
    #[arg(long, value_delimiter = ',')]
    pub input: Vec<PathBuf>,

    /// Input format for every dataset; guessed per file by default
    #[arg(long)]
    pub format: Option<String>,

    #[arg(long, value_delimiter = ',')]
    pub alpha: Vec<f64>,

    #[arg(long, value_delimiter = ',')]
    pub m: Vec<usize>,

    #[arg(long, value_delimiter = ',')]
    pub tol: Vec<f64>,

    #[arg(long, value_delimiter = ',')]
    pub methods: Vec<String>,

    #[arg(long)]
    pub max_mvp: Option<u64>,

    /// CSV output; stdout when absent
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    datasets: Option<Vec<PathBuf>>,
    alphas: Option<Vec<f64>>,
    ms: Option<Vec<usize>>,
    tols: Option<Vec<f64>>,
    methods: Option<Vec<String>>,
    max_mvp: Option<u64>,
}

fn methods(names: &[String]) -> Result<Vec<Method>, Failure> {
    names
        .iter()
        .map(|s| s.parse::<Method>().map_err(Failure::from))
        .collect()
}

pub fn build_spec(args: &BenchArgs) -> Result<BenchSpec, Failure> {
    let file: SpecFile = match &args.spec {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).context(format!("reading {}", path.display()))?;
            toml::from_str(&text).map_err(|e| Failure {
                code: EXIT_USAGE,
                error: anyhow::anyhow!("{}: {e}", path.display()),
            })?
        }
        None => SpecFile::default(),
    };
    // relative dataset paths in a spec file resolve against its directory
    let base = args
        .spec
        .as_ref()
        .and_then(|p| p.parent().map(|d| d.to_path_buf()))
        .unwrap_or_default();

    let mut spec = BenchSpec::default();
    if let Some(d) = file.datasets {
        spec.datasets = d
            .into_iter()
            .map(|p| if p.is_absolute() { p } else { base.join(p) })
            .collect();
    }
    if let Some(v) = file.alphas {
        spec.alphas = v;
    }
    if let Some(v) = file.ms {
        spec.ms = v;
    }
    if let Some(v) = file.tols {
        spec.tols = v;
    }
    if let Some(v) = file.methods {
        spec.methods = methods(&v)?;
    }
    if let Some(v) = file.max_mvp {
        spec.max_mvp = v;
    }

    if !args.input.is_empty() {
        spec.datasets = args.input.clone();
    }
    if !args.alpha.is_empty() {
        spec.alphas = args.alpha.clone();
    }
    if !args.m.is_empty() {
        spec.ms = args.m.clone();
    }
    if !args.tol.is_empty() {
        spec.tols = args.tol.clone();
    }
    if !args.methods.is_empty() {
        spec.methods = methods(&args.methods)?;
    }
    if let Some(v) = args.max_mvp {
        spec.max_mvp = v;
    }
    spec.validate()?;
    Ok(spec)
}

pub fn run(args: BenchArgs) -> Result<u8, Failure> {
    let spec = build_spec(&args)?;
    let mut graphs = Vec::with_capacity(spec.datasets.len());
    for path in &spec.datasets {
        let graph = input::load(path, args.format.as_deref())?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        graphs.push((name, Arc::new(build_transition(&graph))));
    }
    let rows = run_bench(&spec, &graphs)?;
    match &args.output {
        Some(path) => {
            let file = File::create(path).context(format!("creating {}", path.display()))?;
            write_bench_csv(&rows, BufWriter::new(file))?;
        }
        None => {
            let stdout = io::stdout();
            write_bench_csv(&rows, stdout.lock())?;
            stdout.lock().flush()?;
        }
    }
    Ok(0)
}
