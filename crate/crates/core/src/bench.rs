//! Parameter sweeps over datasets, methods, damping factors, subspace sizes
//! and tolerances.

use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph_io::TransitionMatrix;
use crate::operator::GoogleOperator;
use crate::solvers::{solve, Method, SolveConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSpec {
    pub datasets: Vec<PathBuf>,
    pub alphas: Vec<f64>,
    /// Subspace sizes; ignored by the power variants.
    pub ms: Vec<usize>,
    pub tols: Vec<f64>,
    pub methods: Vec<Method>,
    pub max_mvp: u64,
}

impl Default for BenchSpec {
    fn default() -> Self {
        Self {
            datasets: Vec::new(),
            alphas: vec![0.85, 0.90, 0.95, 0.99],
            ms: (6..=10).collect(),
            tols: vec![1e-7, 1e-8],
            methods: Method::ALL.to_vec(),
            max_mvp: 100_000,
        }
    }
}

/// One point of the sweep; `dataset` indexes the dataset list.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchCell {
    pub dataset: usize,
    pub method: Method,
    pub alpha: f64,
    pub m: Option<usize>,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub dataset: String,
    pub method: Method,
    pub alpha: f64,
    pub m: Option<usize>,
    pub tol: f64,
    pub cycles: Option<usize>,
    pub mvp: u64,
    pub wall_time_s: f64,
    pub converged: bool,
}

impl BenchSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        if self.datasets.is_empty() {
            return bad("bench needs at least one dataset");
        }
        if self.alphas.is_empty() || self.tols.is_empty() || self.methods.is_empty() {
            return bad("alpha, tol and method lists must be non-empty");
        }
        if self.ms.is_empty() && self.methods.iter().any(|m| m.is_krylov()) {
            return bad("m list must be non-empty for Krylov methods");
        }
        if self.alphas.iter().any(|&a| !(a > 0.0 && a < 1.0)) {
            return bad("every alpha must lie in (0, 1)");
        }
        if self.tols.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return bad("every tol must be positive");
        }
        if self.ms.iter().any(|&m| m < 2) {
            return bad("every m must be at least 2");
        }
        if self.max_mvp == 0 {
            return bad("max_mvp must be at least 1");
        }
        Ok(())
    }

    /// Cross product in row order: dataset, method, alpha, m, tol. The power
    /// variants contribute one cell per (alpha, tol).
    pub fn cells(&self) -> Vec<BenchCell> {
        let mut cells = Vec::new();
        for dataset in 0..self.datasets.len() {
            for &method in &self.methods {
                for &alpha in &self.alphas {
                    let ms: Vec<Option<usize>> = if method.is_krylov() {
                        self.ms.iter().map(|&m| Some(m)).collect()
                    } else {
                        vec![None]
                    };
                    for m in ms {
                        for &tol in &self.tols {
                            cells.push(BenchCell {
                                dataset,
                                method,
                                alpha,
                                m,
                                tol,
                            });
                        }
                    }
                }
            }
        }
        cells
    }
}

fn run_cell(
    cell: &BenchCell,
    name: &str,
    transition: &Arc<TransitionMatrix>,
    max_mvp: u64,
) -> BenchRow {
    let mut row = BenchRow {
        dataset: name.to_string(),
        method: cell.method,
        alpha: cell.alpha,
        m: cell.m,
        tol: cell.tol,
        cycles: None,
        mvp: 0,
        wall_time_s: 0.0,
        converged: false,
    };
    let mut cfg = SolveConfig::new(cell.method, cell.alpha)
        .with_tol(cell.tol)
        .with_max_mvp(max_mvp);
    if let Some(m) = cell.m {
        cfg = cfg.with_m(m);
    }
    let outcome =
        GoogleOperator::new(Arc::clone(transition), cell.alpha).and_then(|op| solve(&op, &cfg));
    match outcome {
        Ok(report) => {
            row.cycles = cell.method.is_krylov().then_some(report.cycles);
            row.mvp = report.mvp;
            row.wall_time_s = report.wall_time.as_secs_f64();
            row.converged = report.converged;
        }
        Err(e) => log::warn!("{name} {} alpha={}: {e}", cell.method, cell.alpha),
    }
    row
}

/// Runs every cell; rows come back in [`BenchSpec::cells`] order regardless
/// of how the worker pool schedules them. `graphs[i]` belongs to
/// `spec.datasets[i]`.
pub fn run_bench(
    spec: &BenchSpec,
    graphs: &[(String, Arc<TransitionMatrix>)],
) -> Result<Vec<BenchRow>> {
    spec.validate()?;
    if graphs.len() != spec.datasets.len() {
        return Err(Error::DimensionMismatch {
            expected: spec.datasets.len(),
            got: graphs.len(),
        });
    }
    Ok(spec
        .cells()
        .par_iter()
        .map(|cell| {
            let (name, transition) = &graphs[cell.dataset];
            run_cell(cell, name, transition, spec.max_mvp)
        })
        .collect())
}

pub const BENCH_HEADER: &str = "dataset,method,alpha,m,tol,cycles,mvp,wall_time_s,converged";

pub fn write_bench_csv<W: Write>(rows: &[BenchRow], mut out: W) -> Result<()> {
    writeln!(out, "{BENCH_HEADER}")?;
    let dash = |v: Option<usize>| v.map_or_else(|| "-".to_string(), |x| x.to_string());
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{:e},{},{},{:.6},{}",
            r.dataset,
            r.method,
            r.alpha,
            dash(r.m),
            r.tol,
            dash(r.cycles),
            r.mvp,
            r.wall_time_s,
            r.converged
        )?;
    }
    out.flush()?;
    Ok(())
}
