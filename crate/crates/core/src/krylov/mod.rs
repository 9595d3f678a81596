//! Krylov decompositions `A L_k = L_{k+1} Hbar_k`: the pivoted Hessenberg
//! process, Arnoldi with modified Gram–Schmidt, and Ritz pairs.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::dense_small::{hessenberg_eig, DenseMatrix};
use crate::error::{Error, Result};
use crate::operator::kernels::{axpy, dot, norm2, norm_inf_with_argmax};
use crate::operator::LinearOperator;

/// Relative size of the residual at which a process step is treated as a
/// breakdown.
pub const BREAKDOWN_RTOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProcessKind {
    Hessenberg,
    Arnoldi,
}

impl ProcessKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProcessKind::Hessenberg => "hessenberg",
            ProcessKind::Arnoldi => "arnoldi",
        }
    }
}

impl fmt::Display for ProcessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProcessKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hessenberg" => Ok(ProcessKind::Hessenberg),
            "arnoldi" => Ok(ProcessKind::Arnoldi),
            other => Err(Error::InvalidParameter(format!(
                "unknown process '{other}'"
            ))),
        }
    }
}

/// Result of `k` steps of a Krylov process.
#[derive(Debug, Clone)]
pub struct KrylovDecomposition {
    pub kind: ProcessKind,
    /// `n x (k+1)`. After a breakdown the last column is zero.
    pub basis: DenseMatrix,
    /// `(k+1) x k` upper Hessenberg.
    pub hbar: DenseMatrix,
    /// Row permutation of the Hessenberg process: `basis[pivots[i], i] == 1`.
    pub pivots: Option<Vec<usize>>,
    /// 1-based step at which the process broke down, if it did.
    pub breakdown_at: Option<usize>,
    pub steps: usize,
}

impl KrylovDecomposition {
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Square `H_k`: `hbar` without its last row.
    pub fn h_square(&self) -> DenseMatrix {
        self.hbar.submatrix(self.steps, self.steps)
    }

    /// `h_{k+1,k}`.
    pub fn subdiagonal(&self) -> f64 {
        self.hbar[(self.steps, self.steps - 1)]
    }

    /// `L_k`: the first `k` basis columns.
    pub fn basis_k(&self) -> DenseMatrix {
        self.basis.submatrix(self.basis.rows(), self.steps)
    }

    /// `l_{k+1}`.
    pub fn next_vector(&self) -> &[f64] {
        self.basis.col(self.steps)
    }
}

fn check_start<O: LinearOperator + ?Sized>(op: &O, q0: &[f64], m: usize) -> Result<usize> {
    let n = op.dim();
    if q0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: q0.len(),
        });
    }
    if q0.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    if q0.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroVector);
    }
    if m == 0 || m > n {
        return Err(Error::InvalidParameter(format!(
            "step budget m = {m} outside 1..={n}"
        )));
    }
    Ok(n)
}

fn truncate(
    kind: ProcessKind,
    basis: DenseMatrix,
    hbar: DenseMatrix,
    pivots: Option<Vec<usize>>,
    steps: usize,
    breakdown: bool,
) -> KrylovDecomposition {
    let n = basis.rows();
    let (basis, hbar) = if steps + 1 == basis.cols() {
        (basis, hbar)
    } else {
        (
            basis.submatrix(n, steps + 1),
            hbar.submatrix(steps + 1, steps),
        )
    };
    KrylovDecomposition {
        kind,
        basis,
        hbar,
        pivots,
        breakdown_at: breakdown.then_some(steps),
        steps,
    }
}

/// Pivoted Hessenberg process for at most `m` steps.
///
/// Each basis vector is scaled so that its entry at the pivot row is exactly
/// one and every other entry is at most one in magnitude.
pub fn hessenberg_process<O: LinearOperator + ?Sized>(
    op: &O,
    q0: &[f64],
    m: usize,
) -> Result<KrylovDecomposition> {
    let n = check_start(op, q0, m)?;
    let mut p: Vec<usize> = (0..n).collect();
    let mut basis = DenseMatrix::zeros(n, m + 1);
    let mut hbar = DenseMatrix::zeros(m + 1, m);

    let (i0, beta) = norm_inf_with_argmax(q0)?;
    for (l, &q) in basis.col_mut(0).iter_mut().zip(q0) {
        *l = q / beta;
    }
    p.swap(0, i0);

    let mut u = vec![0.0; n];
    for j in 0..m {
        op.apply_into(basis.col(j), &mut u);
        let scale = u.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        for i in 0..=j {
            let h = u[p[i]];
            hbar[(i, j)] = h;
            axpy(-h, basis.col(i), &mut u);
        }

        let mut best = j + 1;
        let mut pivot = 0.0f64;
        for (k, &row) in p.iter().enumerate().skip(j + 1) {
            if u[row].abs() > pivot.abs() {
                pivot = u[row];
                best = k;
            }
        }
        if j + 1 == n || pivot.abs() <= BREAKDOWN_RTOL * scale {
            return Ok(truncate(
                ProcessKind::Hessenberg,
                basis,
                hbar,
                Some(p),
                j + 1,
                true,
            ));
        }
        hbar[(j + 1, j)] = pivot;
        for (l, &x) in basis.col_mut(j + 1).iter_mut().zip(&u) {
            *l = x / pivot;
        }
        p.swap(j + 1, best);
    }
    Ok(truncate(
        ProcessKind::Hessenberg,
        basis,
        hbar,
        Some(p),
        m,
        false,
    ))
}

/// Arnoldi with modified Gram–Schmidt for at most `m` steps.
///
/// `reorthogonalize` adds a second Gram–Schmidt pass; it is meant for
/// diagnostics and is off in the solvers.
pub fn arnoldi_process<O: LinearOperator + ?Sized>(
    op: &O,
    q0: &[f64],
    m: usize,
    reorthogonalize: bool,
) -> Result<KrylovDecomposition> {
    let n = check_start(op, q0, m)?;
    let mut basis = DenseMatrix::zeros(n, m + 1);
    let mut hbar = DenseMatrix::zeros(m + 1, m);

    let beta = norm2(q0);
    for (v, &q) in basis.col_mut(0).iter_mut().zip(q0) {
        *v = q / beta;
    }

    let mut u = vec![0.0; n];
    for j in 0..m {
        op.apply_into(basis.col(j), &mut u);
        let scale = norm2(&u);
        for i in 0..=j {
            let h = dot(&u, basis.col(i));
            hbar[(i, j)] = h;
            axpy(-h, basis.col(i), &mut u);
        }
        if reorthogonalize {
            for i in 0..=j {
                let h = dot(&u, basis.col(i));
                hbar[(i, j)] += h;
                axpy(-h, basis.col(i), &mut u);
            }
        }
        let h = norm2(&u);
        if j + 1 == n || h <= BREAKDOWN_RTOL * scale {
            return Ok(truncate(
                ProcessKind::Arnoldi,
                basis,
                hbar,
                None,
                j + 1,
                true,
            ));
        }
        hbar[(j + 1, j)] = h;
        for (v, &x) in basis.col_mut(j + 1).iter_mut().zip(&u) {
            *v = x / h;
        }
    }
    Ok(truncate(ProcessKind::Arnoldi, basis, hbar, None, m, false))
}

/// Eigenpair of `H_k` lifted to the full space.
#[derive(Debug, Clone)]
pub struct RitzPair {
    pub theta: Complex64,
    /// Eigenvector of `H_k`, unit 2-norm.
    pub y: Vec<Complex64>,
    /// Real and imaginary parts of `x = L_k y`.
    pub x_re: Vec<f64>,
    pub x_im: Vec<f64>,
    /// `[y]_k`.
    pub last_component: Complex64,
    /// `|h_{k+1,k}| |[y]_k| ||l_{k+1}||_2`.
    pub residual_bound: f64,
}

pub fn ritz_pairs(decomp: &KrylovDecomposition) -> Result<Vec<RitzPair>> {
    let k = decomp.steps;
    if k == 0 {
        return Err(Error::InvalidParameter("decomposition has no steps".into()));
    }
    let n = decomp.basis.rows();
    let next_norm = norm2(decomp.next_vector());
    let h = decomp.subdiagonal().abs();
    let pairs = hessenberg_eig(&decomp.h_square())?;
    Ok(pairs
        .into_iter()
        .map(|pair| {
            let mut x_re = vec![0.0; n];
            let mut x_im = vec![0.0; n];
            for (j, yj) in pair.vector.iter().enumerate() {
                axpy(yj.re, decomp.basis.col(j), &mut x_re);
                axpy(yj.im, decomp.basis.col(j), &mut x_im);
            }
            let last = pair.vector[k - 1];
            RitzPair {
                theta: pair.value,
                residual_bound: h * last.norm() * next_norm,
                last_component: last,
                y: pair.vector,
                x_re,
                x_im,
            }
        })
        .collect())
}
