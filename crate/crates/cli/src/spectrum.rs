use std::path::PathBuf;
use std::sync::Arc;

use clap::Args;
use serde::Serialize;
use serde_json::value::RawValue;

use prnk_core::diagnostics::{basis_condition, decomposition_error, spectrum_dump};
use prnk_core::graph_io::{build_transition, read_matrix_market_operator, GraphFormat};
use prnk_core::krylov::{arnoldi_process, hessenberg_process, KrylovDecomposition, ProcessKind};
use prnk_core::operator::{CsrMatrix, GoogleOperator, LinearOperator};

use crate::failure::{Context, Failure, EXIT_DATA};
use crate::input;
use crate::json::num;

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    /// Graph or matrix file
    #[arg(long)]
    pub input: PathBuf,

    /// Input format (snap, mtx, cache); guessed from the extension by default
    #[arg(long)]
    pub format: Option<String>,

    /// arnoldi or hessenberg
    #[arg(long, default_value = "hessenberg")]
    pub process: String,

    /// Number of process steps (capped at the dimension)
    #[arg(long, default_value_t = 10)]
    pub m: usize,

    /// Starting vector: uniform, e1, or a file with one value per line
    #[arg(long, default_value = "uniform")]
    pub q0: String,

    /// google: the damped PageRank operator; raw: the stored matrix values
    /// (Matrix Market) or the transition matrix
    #[arg(long, default_value = "google")]
    pub operator: String,

    #[arg(long, default_value_t = 0.85)]
    pub alpha: f64,

    /// Ritz value CSV
    #[arg(long)]
    pub output: PathBuf,

    /// Diagnostics JSON; defaults to the CSV path with a .json extension
    #[arg(long)]
    pub diagnostics: Option<PathBuf>,
}

#[derive(Serialize)]
struct DiagnosticsJson {
    process: ProcessKind,
    operator: String,
    n: usize,
    m_requested: usize,
    steps: usize,
    breakdown_at: Option<usize>,
    decomposition_error_abs: Box<RawValue>,
    decomposition_error_normalized: Box<RawValue>,
    basis_condition: Box<RawValue>,
    warning: Option<String>,
}

fn transition_operator(t: &prnk_core::graph_io::TransitionMatrix) -> Result<CsrMatrix, Failure> {
    let n = t.n();
    let triplets = (0..n).flat_map(|i| t.row(i).map(move |(j, v)| (i, j, v)));
    Ok(CsrMatrix::from_triplets(n, n, triplets)?)
}

fn start_vector(spec: &str, n: usize) -> Result<Vec<f64>, Failure> {
    match spec {
        "uniform" => Ok(vec![1.0 / n as f64; n]),
        "e1" => {
            let mut v = vec![0.0; n];
            v[0] = 1.0;
            Ok(v)
        }
        path => input::read_vector(&PathBuf::from(path), n),
    }
}

fn decompose<O: LinearOperator>(
    op: &O,
    kind: ProcessKind,
    q0: &[f64],
    m: usize,
) -> Result<KrylovDecomposition, Failure> {
    Ok(match kind {
        ProcessKind::Hessenberg => hessenberg_process(op, q0, m)?,
        ProcessKind::Arnoldi => arnoldi_process(op, q0, m, false)?,
    })
}

pub fn run(args: SpectrumArgs) -> Result<u8, Failure> {
    let kind: ProcessKind = args.process.parse()?;
    if args.m == 0 {
        return Err(Failure::usage("--m must be at least 1"));
    }
    let raw = match args.operator.as_str() {
        "google" => false,
        "raw" => true,
        other => return Err(Failure::usage(format!("unknown operator '{other}'"))),
    };
    let format = input::parse_format(args.format.as_deref())?
        .unwrap_or_else(|| GraphFormat::detect(&args.input));

    let (decomp, n) = if raw && format == GraphFormat::MatrixMarket {
        let a = read_matrix_market_operator(&args.input)
            .context(format!("reading {}", args.input.display()))?;
        let n = a.dim();
        let q0 = start_vector(&args.q0, n)?;
        let m = args.m.min(n);
        let d = decompose(&a, kind, &q0, m)?;
        let e = decomposition_error(&a, &d)?;
        ((d, e), n)
    } else {
        let graph = input::load(&args.input, args.format.as_deref())?;
        let transition = Arc::new(build_transition(&graph));
        let n = graph.n();
        let q0 = start_vector(&args.q0, n)?;
        let m = args.m.min(n);
        if raw {
            let a = transition_operator(&transition)?;
            let d = decompose(&a, kind, &q0, m)?;
            let e = decomposition_error(&a, &d)?;
            ((d, e), n)
        } else {
            let a = GoogleOperator::new(transition, args.alpha)?;
            let d = decompose(&a, kind, &q0, m)?;
            let e = decomposition_error(&a, &d)?;
            ((d, e), n)
        }
    };
    let (decomp, err) = decomp;

    spectrum_dump(&decomp, &args.output).context(format!("writing {}", args.output.display()))?;

    let m_eff = args.m.min(n);
    let warning = match decomp.breakdown_at {
        Some(step) if step < m_eff => Some(format!("breakdown at step {step} before m = {m_eff}")),
        _ => None,
    }
    .or_else(|| (args.m > n).then(|| format!("m = {} capped at the dimension {n}", args.m)));
    if let Some(w) = &warning {
        eprintln!("warning: {w}");
    }

    let doc = DiagnosticsJson {
        process: kind,
        operator: args.operator.clone(),
        n,
        m_requested: args.m,
        steps: decomp.steps,
        breakdown_at: decomp.breakdown_at,
        decomposition_error_abs: num(err.absolute),
        decomposition_error_normalized: num(err.normalized),
        basis_condition: num(basis_condition(&decomp)),
        warning,
    };
    let path = args
        .diagnostics
        .clone()
        .unwrap_or_else(|| args.output.with_extension("json"));
    let text = serde_json::to_string_pretty(&doc).map_err(|e| Failure {
        code: EXIT_DATA,
        error: e.into(),
    })?;
    std::fs::write(&path, text + "\n").context(format!("writing {}", path.display()))?;
    Ok(0)
}
