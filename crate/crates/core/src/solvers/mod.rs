//! PageRank drivers: power iteration (plain, linear and quadratic
//! extrapolation) and refined restarted Krylov solvers.

mod power;
mod refined;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::krylov::ProcessKind;
use crate::operator::kernels::norm1;
use crate::operator::LinearOperator;

pub use power::{power, power_linear_extrapolation, power_quadratic_extrapolation};
pub use refined::{refined_krylov_pagerank, verify_report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Power,
    PowerTan,
    QePower,
    Arnoldi,
    Hessenberg,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Power,
        Method::PowerTan,
        Method::QePower,
        Method::Arnoldi,
        Method::Hessenberg,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Power => "power",
            Method::PowerTan => "power-tan",
            Method::QePower => "qe-power",
            Method::Arnoldi => "arnoldi",
            Method::Hessenberg => "hessenberg",
        }
    }

    pub fn is_krylov(self) -> bool {
        matches!(self, Method::Arnoldi | Method::Hessenberg)
    }

    pub fn process(self) -> Option<ProcessKind> {
        match self {
            Method::Arnoldi => Some(ProcessKind::Arnoldi),
            Method::Hessenberg => Some(ProcessKind::Hessenberg),
            _ => None,
        }
    }

    /// Default extrapolation period, if the method extrapolates.
    pub fn default_period(self) -> Option<usize> {
        match self {
            Method::PowerTan => Some(10),
            Method::QePower => Some(5),
            _ => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum InitialVector {
    /// `e / n`.
    #[default]
    Uniform,
    Given(Vec<f64>),
}

impl InitialVector {
    pub fn materialize(&self, n: usize) -> Result<Vec<f64>> {
        match self {
            InitialVector::Uniform => Ok(vec![1.0 / n as f64; n]),
            InitialVector::Given(v) => {
                if v.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: v.len(),
                    });
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::NonFinite);
                }
                if norm1(v) == 0.0 {
                    return Err(Error::ZeroVector);
                }
                Ok(v.clone())
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub method: Method,
    /// Damping factor. Only the linear extrapolation reads it; the operator
    /// carries its own copy.
    pub alpha: f64,
    /// Subspace dimension for the Krylov methods.
    pub m: usize,
    pub tol: f64,
    /// Budget of counted operator applications.
    pub max_mvp: u64,
    /// Extrapolation period; `None` picks the method default.
    pub period: Option<usize>,
    pub initial: InitialVector,
    /// Restart from `q` as is instead of rescaling by its largest entry.
    pub raw_restart: bool,
    /// Recompute `A q - q` directly on every cycle and record the comparison.
    pub verify_cycles: bool,
}

impl SolveConfig {
    pub fn new(method: Method, alpha: f64) -> Self {
        Self {
            method,
            alpha,
            m: 8,
            tol: 1e-8,
            max_mvp: 100_000,
            period: None,
            initial: InitialVector::Uniform,
            raw_restart: false,
            verify_cycles: false,
        }
    }

    pub fn with_m(mut self, m: usize) -> Self {
        self.m = m;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_mvp(mut self, max_mvp: u64) -> Self {
        self.max_mvp = max_mvp;
        self
    }

    pub fn with_period(mut self, period: usize) -> Self {
        self.period = Some(period);
        self
    }

    pub fn with_initial(mut self, initial: InitialVector) -> Self {
        self.initial = initial;
        self
    }

    pub fn with_verify_cycles(mut self, on: bool) -> Self {
        self.verify_cycles = on;
        self
    }

    pub fn period(&self) -> Option<usize> {
        self.period.or(self.method.default_period())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if self.max_mvp == 0 {
            return bad("max_mvp must be at least 1".into());
        }
        if self.method.is_krylov() && self.m < 2 {
            return bad(format!("m must be at least 2, got {}", self.m));
        }
        match (self.method, self.period()) {
            (Method::PowerTan, Some(0)) => return bad("period must be at least 1".into()),
            (Method::QePower, Some(p)) if p < 4 => {
                return bad(format!(
                    "quadratic extrapolation needs period >= 4, got {p}"
                ))
            }
            _ => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BreakdownEvent {
    pub cycle: usize,
    pub step: usize,
}

/// Per-cycle comparison of the cheap residual against a direct one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CycleCheck {
    pub cycle: usize,
    pub sigma: f64,
    /// `||r||_1 / ||q||_1` with `r = sigma L_{k+1} u`.
    pub formula_residual: f64,
    /// `||(A q - q) - r||_1 / ||q||_1`.
    pub identity_error: f64,
    pub r_norm2: f64,
    /// `||L_{k+1} u||_2`; equals one for an orthonormal basis.
    pub basis_u_norm2: f64,
}

/// State of the last Krylov cycle, kept for [`verify_report`].
#[derive(Debug, Clone)]
pub struct CycleSnapshot {
    pub q: Vec<f64>,
    pub sigma: f64,
    pub r: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub method: Method,
    pub alpha: f64,
    /// Subspace dimension; `None` for the power variants.
    pub m: Option<usize>,
    pub tol: f64,
    /// 1-norm normalized, nonnegative.
    pub x: Vec<f64>,
    /// Restart cycles (Krylov) or iterations (power variants).
    pub cycles: usize,
    /// Counted operator applications of the iteration itself.
    pub mvp: u64,
    /// Applications spent on direct residual checks.
    pub verification_mvp: u64,
    /// Convergence measure recorded per cycle or iteration.
    pub residual_history: Vec<f64>,
    /// `||A x - x||_1 / ||x||_1` of the returned `x`.
    pub final_residual: f64,
    pub converged: bool,
    pub wall_time: Duration,
    pub breakdowns: Vec<BreakdownEvent>,
    /// Smallest entry of the 1-norm normalized candidate before clamping.
    pub min_entry_before_clamp: f64,
    pub cycle_checks: Vec<CycleCheck>,
    pub last_cycle: Option<CycleSnapshot>,
}

impl SolveReport {
    fn empty(cfg: &SolveConfig) -> Self {
        Self {
            method: cfg.method,
            alpha: cfg.alpha,
            m: cfg.method.is_krylov().then_some(cfg.m),
            tol: cfg.tol,
            x: Vec::new(),
            cycles: 0,
            mvp: 0,
            verification_mvp: 0,
            residual_history: Vec::new(),
            final_residual: f64::NAN,
            converged: false,
            wall_time: Duration::ZERO,
            breakdowns: Vec::new(),
            min_entry_before_clamp: 0.0,
            cycle_checks: Vec::new(),
            last_cycle: None,
        }
    }
}

/// Runs the method selected in `cfg`.
pub fn solve<O: LinearOperator + ?Sized>(op: &O, cfg: &SolveConfig) -> Result<SolveReport> {
    match cfg.method {
        Method::Power => power(op, cfg),
        Method::PowerTan => power_linear_extrapolation(op, cfg),
        Method::QePower => power_quadratic_extrapolation(op, cfg),
        Method::Arnoldi => refined_krylov_pagerank(op, cfg, ProcessKind::Arnoldi),
        Method::Hessenberg => refined_krylov_pagerank(op, cfg, ProcessKind::Hessenberg),
    }
}

/// `||A q - q||_1 / ||q||_1` for any operator.
pub(crate) fn direct_residual<O: LinearOperator + ?Sized>(
    op: &O,
    q: &[f64],
) -> Result<(Vec<f64>, f64)> {
    let qn = norm1(q);
    if qn == 0.0 {
        return Err(Error::ZeroVector);
    }
    let mut r = op.apply(q);
    for (ri, qi) in r.iter_mut().zip(q) {
        *ri -= qi;
    }
    let ratio = norm1(&r) / qn;
    Ok((r, ratio))
}

/// Sign-fixes so that the sum is positive, normalizes in the 1-norm and
/// clamps negative entries. Returns the minimum entry seen before clamping.
pub(crate) fn finalize_vector(x: &mut [f64]) -> Result<f64> {
    let s: f64 = x.iter().sum();
    if s < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    let n1 = norm1(x);
    if n1 == 0.0 || !n1.is_finite() {
        return Err(Error::ZeroVector);
    }
    x.iter_mut().for_each(|v| *v /= n1);
    let min = x.iter().copied().fold(f64::INFINITY, f64::min);
    if min < 0.0 {
        x.iter_mut().for_each(|v| *v = v.max(0.0));
        let n1 = norm1(x);
        x.iter_mut().for_each(|v| *v /= n1);
    }
    Ok(min)
}
