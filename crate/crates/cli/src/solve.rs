use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::sync::Arc;

use clap::Args;
use serde::Serialize;
use serde_json::value::RawValue;

use prnk_core::graph_io::{build_transition, Graph};
use prnk_core::operator::GoogleOperator;
use prnk_core::solvers::{solve, verify_report, InitialVector, Method, SolveConfig, SolveReport};

use crate::failure::{Context, Failure, EXIT_DATA, EXIT_NOT_CONVERGED};
use crate::input;
use crate::json::{num, nums, sci};

pub const SCHEMA: &str = "prnk-report/1";

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Graph file: SNAP edge list, Matrix Market or cache
    #[arg(long)]
    pub input: PathBuf,

    /// Input format (snap, mtx, cache); guessed from the extension by default
    #[arg(long)]
    pub format: Option<String>,

    /// power, power-tan, qe-power, arnoldi or hessenberg
    #[arg(long, default_value = "hessenberg")]
    pub method: String,

    #[arg(long, default_value_t = 0.85)]
    pub alpha: f64,

    /// Subspace dimension (Krylov methods only)
    #[arg(long)]
    pub m: Option<usize>,

    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,

    #[arg(long, default_value_t = 100_000)]
    pub max_mvp: u64,

    /// Extrapolation period (power-tan, qe-power)
    #[arg(long)]
    pub period: Option<usize>,

    /// Teleport distribution, one value per line
    #[arg(long)]
    pub teleport_file: Option<PathBuf>,

    /// Number of ranks to write; all nodes by default
    #[arg(long)]
    pub top_k: Option<usize>,

    /// JSON report path; printed to stdout when absent
    #[arg(long)]
    pub report: Option<PathBuf>,

    /// TSV of (original id, score), highest first
    #[arg(long)]
    pub ranks: Option<PathBuf>,

    /// Restart from the extracted vector without rescaling
    #[arg(long)]
    pub raw_restart: bool,

    /// Check the cheap residual against A q - q on every cycle
    #[arg(long)]
    pub verify_cycles: bool,
}

#[derive(Serialize)]
struct Breakdown {
    cycle: usize,
    step: usize,
}

#[derive(Serialize)]
struct CycleCheckJson {
    cycle: usize,
    sigma: Box<RawValue>,
    formula_residual: Box<RawValue>,
    identity_error: Box<RawValue>,
    r_norm2: Box<RawValue>,
    basis_u_norm2: Box<RawValue>,
}

#[derive(Serialize)]
struct Rank {
    id: u64,
    score: Box<RawValue>,
}

#[derive(Serialize)]
struct ReportJson {
    schema: &'static str,
    input: String,
    n: usize,
    nnz: usize,
    method: Method,
    alpha: Box<RawValue>,
    m: Option<usize>,
    tol: Box<RawValue>,
    max_mvp: u64,
    period: Option<usize>,
    converged: bool,
    cycles: usize,
    mvp: u64,
    verification_mvp: u64,
    final_residual: Box<RawValue>,
    residual_history: Vec<Box<RawValue>>,
    identity_check: Option<Box<RawValue>>,
    min_entry_before_clamp: Box<RawValue>,
    wall_time_s: Box<RawValue>,
    breakdowns: Vec<Breakdown>,
    cycle_checks: Vec<CycleCheckJson>,
    top: Vec<Rank>,
    x: Vec<Box<RawValue>>,
}

/// Node indices ordered by descending score, ties by ascending original id.
pub fn ranking(graph: &Graph, x: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| {
        x[b].total_cmp(&x[a])
            .then_with(|| graph.original_id(a).cmp(&graph.original_id(b)))
    });
    order
}

fn config(args: &SolveArgs) -> Result<SolveConfig, Failure> {
    let method: Method = args.method.parse()?;
    if args.period.is_some() && method.default_period().is_none() {
        return Err(Failure::usage(format!(
            "--period does not apply to {method}"
        )));
    }
    if args.m.is_some() && !method.is_krylov() {
        return Err(Failure::usage(format!("--m does not apply to {method}")));
    }
    if (args.raw_restart || args.verify_cycles) && !method.is_krylov() {
        return Err(Failure::usage(format!(
            "--raw-restart and --verify-cycles need a Krylov method, got {method}"
        )));
    }
    let mut cfg = SolveConfig::new(method, args.alpha)
        .with_tol(args.tol)
        .with_max_mvp(args.max_mvp)
        .with_verify_cycles(args.verify_cycles);
    if let Some(m) = args.m {
        cfg = cfg.with_m(m);
    }
    if let Some(p) = args.period {
        cfg = cfg.with_period(p);
    }
    cfg.raw_restart = args.raw_restart;
    cfg.initial = InitialVector::Uniform;
    cfg.validate()?;
    Ok(cfg)
}

fn report_json(
    args: &SolveArgs,
    graph: &Graph,
    cfg: &SolveConfig,
    report: &SolveReport,
    identity: Option<f64>,
    order: &[usize],
) -> ReportJson {
    ReportJson {
        schema: SCHEMA,
        input: args.input.display().to_string(),
        n: graph.n(),
        nnz: graph.nnz(),
        method: report.method,
        alpha: num(report.alpha),
        m: report.m,
        tol: num(report.tol),
        max_mvp: cfg.max_mvp,
        period: if report.method.is_krylov() {
            None
        } else {
            cfg.period()
        },
        converged: report.converged,
        cycles: report.cycles,
        mvp: report.mvp,
        verification_mvp: report.verification_mvp,
        final_residual: num(report.final_residual),
        residual_history: nums(&report.residual_history),
        identity_check: identity.map(num),
        min_entry_before_clamp: num(report.min_entry_before_clamp),
        wall_time_s: num(report.wall_time.as_secs_f64()),
        breakdowns: report
            .breakdowns
            .iter()
            .map(|b| Breakdown {
                cycle: b.cycle,
                step: b.step,
            })
            .collect(),
        cycle_checks: report
            .cycle_checks
            .iter()
            .map(|c| CycleCheckJson {
                cycle: c.cycle,
                sigma: num(c.sigma),
                formula_residual: num(c.formula_residual),
                identity_error: num(c.identity_error),
                r_norm2: num(c.r_norm2),
                basis_u_norm2: num(c.basis_u_norm2),
            })
            .collect(),
        top: order
            .iter()
            .map(|&i| Rank {
                id: graph.original_id(i),
                score: num(report.x[i]),
            })
            .collect(),
        x: nums(&report.x),
    }
}

fn write_ranks(path: &PathBuf, graph: &Graph, x: &[f64], order: &[usize]) -> Result<(), Failure> {
    let file = File::create(path).context(format!("creating {}", path.display()))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "id\tscore")?;
    for &i in order {
        writeln!(out, "{}\t{}", graph.original_id(i), sci(x[i]))?;
    }
    out.flush()?;
    Ok(())
}

pub fn run(args: SolveArgs, threads: usize) -> Result<u8, Failure> {
    let cfg = config(&args)?;
    let graph = input::load(&args.input, args.format.as_deref())?;
    let transition = Arc::new(build_transition(&graph));
    let op = match &args.teleport_file {
        Some(path) => {
            let v = input::read_vector(path, graph.n())?;
            GoogleOperator::with_teleport(transition, cfg.alpha, v)?
        }
        None => GoogleOperator::new(transition, cfg.alpha)?,
    }
    .with_partitions(threads);

    let report = solve(&op, &cfg)?;
    let identity = if report.last_cycle.is_some() {
        Some(verify_report(&op, &report)?)
    } else {
        None
    };

    let order = ranking(&graph, &report.x);
    let k = args.top_k.unwrap_or(graph.n()).min(graph.n());
    let top = &order[..k];

    let doc = report_json(&args, &graph, &cfg, &report, identity, top);
    let text = serde_json::to_string_pretty(&doc).map_err(|e| Failure {
        code: EXIT_DATA,
        error: e.into(),
    })?;
    match &args.report {
        Some(path) => {
            std::fs::write(path, text + "\n").context(format!("writing {}", path.display()))?
        }
        None => println!("{text}"),
    }
    if let Some(path) = &args.ranks {
        write_ranks(path, &graph, &report.x, top)?;
    }

    log::info!(
        "{} converged={} cycles={} mvp={} residual={:e}",
        report.method,
        report.converged,
        report.cycles,
        report.mvp,
        report.final_residual
    );
    if report.converged {
        Ok(0)
    } else {
        eprintln!(
            "warning: {} did not converge within {} operator applications",
            report.method, cfg.max_mvp
        );
        Ok(EXIT_NOT_CONVERGED)
    }
}
