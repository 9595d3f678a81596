//! Checks on Krylov decompositions and data emitters for spectra.

mod matching;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::dense_small::{hessenberg_eig, qr_reduced, svd, DenseMatrix};
use crate::error::{Error, Result};
use crate::krylov::{arnoldi_process, hessenberg_process, ritz_pairs, KrylovDecomposition};
use crate::operator::kernels::dot;
use crate::operator::LinearOperator;

pub use matching::min_cost_assignment;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecompositionError {
    /// `||A L_k - L_{k+1} Hbar_k||_F`.
    pub absolute: f64,
    /// `absolute / (||A||_F ||L_k||_F)`.
    pub normalized: f64,
}

/// Residual of `A L_k = L_{k+1} Hbar_k`. Costs `k` operator applications.
pub fn decomposition_error<O: LinearOperator + ?Sized>(
    op: &O,
    decomp: &KrylovDecomposition,
) -> Result<DecompositionError> {
    let n = op.dim();
    if decomp.basis.rows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: decomp.basis.rows(),
        });
    }
    let k = decomp.steps;
    let lh = decomp.basis.matmul(&decomp.hbar);
    let mut sq = 0.0;
    let mut lk_sq = 0.0;
    let mut al = vec![0.0; n];
    for j in 0..k {
        let col = decomp.basis.col(j);
        op.apply_into(col, &mut al);
        sq += al
            .iter()
            .zip(lh.col(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>();
        lk_sq += dot(col, col);
    }
    let absolute = sq.sqrt();
    let denom = op.frobenius_norm() * lk_sq.sqrt();
    let normalized = if denom > 0.0 {
        absolute / denom
    } else {
        absolute
    };
    Ok(DecompositionError {
        absolute,
        normalized,
    })
}

/// 2-norm condition number of the basis, via QR and the SVD of `R`.
///
/// After a breakdown the zero trailing column is left out. A rank-deficient
/// basis yields `+inf`.
pub fn basis_condition(decomp: &KrylovDecomposition) -> f64 {
    let cols = if decomp.breakdown_at.is_some() {
        decomp.steps
    } else {
        decomp.steps + 1
    };
    let basis = decomp.basis.submatrix(decomp.basis.rows(), cols);
    matrix_condition(&basis)
}

/// 2-norm condition number of a tall matrix; `+inf` when rank deficient.
pub fn matrix_condition(m: &DenseMatrix) -> f64 {
    let r = match qr_reduced(m) {
        Ok((_, r)) => r,
        Err(Error::RankDeficient { column }) => {
            log::warn!("basis is rank deficient at column {column}");
            return f64::INFINITY;
        }
        Err(e) => {
            log::warn!("basis condition unavailable: {e}");
            return f64::INFINITY;
        }
    };
    match svd(&r) {
        Ok(d) => {
            let (hi, lo) = (d.sigma[0], d.sigma[d.sigma.len() - 1]);
            if lo > 0.0 {
                hi / lo
            } else {
                f64::INFINITY
            }
        }
        Err(e) => {
            log::warn!("basis condition unavailable: {e}");
            f64::INFINITY
        }
    }
}

/// Largest pairwise gap under the minimum-total-distance matching of two
/// eigenvalue multisets.
pub fn eig_distance(a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let cost: Vec<Vec<f64>> = a
        .iter()
        .map(|x| b.iter().map(|y| (x - y).norm()).collect())
        .collect();
    let assignment = min_cost_assignment(&cost);
    Ok(assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i][j])
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop21Report {
    pub m: usize,
    /// `h^(h)_{m+1,m} / r_{m,m}`.
    pub ratio_lhs: f64,
    /// `h_{m+1,m} / r_{m+1,m+1}`.
    pub ratio_rhs: f64,
    /// `||H_m - (R_m H^(h)_m R_m^-1 + ratio_lhs r~ e_m^T)||_F`.
    pub identity_residual: f64,
    /// Distance between the spectra of `H_m` and of the reconstruction.
    pub eig_distance: f64,
    /// `||H_m||_F` of the Arnoldi matrix.
    pub h_norm: f64,
    /// 2-norm condition number of `L_{m+1}`.
    pub basis_condition: f64,
    /// Diagonal signs folded into `R` to align the two bases.
    pub signs: Vec<f64>,
}

/// Runs both processes from `q0` and checks the QR relation between them.
///
/// `L_{m+1} = Q R` with `R` having a positive diagonal matches the Arnoldi
/// basis only up to column signs `D`; the report uses `R' = D R`.
pub fn verify_prop21<O: LinearOperator + ?Sized>(
    op: &O,
    q0: &[f64],
    m: usize,
) -> Result<Prop21Report> {
    let hess = hessenberg_process(op, q0, m)?;
    let arn = arnoldi_process(op, q0, m, false)?;
    for d in [&hess, &arn] {
        if let Some(step) = d.breakdown_at {
            return Err(Error::Breakdown { step });
        }
    }

    let (qf, r) = qr_reduced(&hess.basis)?;
    let signs: Vec<f64> = (0..=m)
        .map(|j| {
            if dot(qf.col(j), arn.basis.col(j)) < 0.0 {
                -1.0
            } else {
                1.0
            }
        })
        .collect();
    let mut rs = r.clone();
    for i in 0..=m {
        for j in 0..=m {
            rs[(i, j)] *= signs[i];
        }
    }

    let hh = hess.h_square();
    let h_sub = hess.subdiagonal();
    let ratio_lhs = h_sub / rs[(m - 1, m - 1)];
    let ratio_rhs = arn.subdiagonal() / rs[(m, m)];

    // R_m H^(h)_m R_m^-1 by right triangular solve
    let rm = rs.submatrix(m, m);
    let x = rm.matmul(&hh);
    let mut recon = DenseMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let mut acc = x[(i, j)];
            for k in 0..j {
                acc -= recon[(i, k)] * rm[(k, j)];
            }
            recon[(i, j)] = acc / rm[(j, j)];
        }
    }
    for i in 0..m {
        recon[(i, m - 1)] += ratio_lhs * rs[(i, m)];
    }
    let ha = arn.h_square();
    let identity_residual = ha.sub(&recon).frobenius();

    // the reconstruction is Hessenberg up to rounding
    for j in 0..m {
        for i in j + 2..m {
            recon[(i, j)] = 0.0;
        }
    }
    let ea: Vec<Complex64> = hessenberg_eig(&ha)?.into_iter().map(|p| p.value).collect();
    let eb: Vec<Complex64> = hessenberg_eig(&recon)?
        .into_iter()
        .map(|p| p.value)
        .collect();

    Ok(Prop21Report {
        m,
        ratio_lhs,
        ratio_rhs,
        identity_residual,
        eig_distance: eig_distance(&ea, &eb)?,
        h_norm: ha.frobenius(),
        basis_condition: matrix_condition(&hess.basis),
        signs,
    })
}

fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV of `re,im,residual_bound` per Ritz pair.
pub fn write_spectrum_csv<W: Write>(decomp: &KrylovDecomposition, mut out: W) -> Result<()> {
    writeln!(out, "re,im,residual_bound")?;
    for pair in ritz_pairs(decomp)? {
        writeln!(
            out,
            "{},{},{}",
            sci(pair.theta.re),
            sci(pair.theta.im),
            sci(pair.residual_bound)
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn spectrum_dump(decomp: &KrylovDecomposition, path: &Path) -> Result<()> {
    let file = File::create(path)?;
    write_spectrum_csv(decomp, BufWriter::new(file))
}
