//! Householder QR with a positive diagonal in `R`.

use super::DenseMatrix;
use crate::error::{Error, Result};

const RANK_RTOL: f64 = 1e-12;

/// Reduced QR of a `rows x cols` matrix, `rows >= cols`.
///
/// Fails with [`Error::RankDeficient`] when `|R[j][j]| <= 1e-12 * ||L||_F`.
pub fn qr_reduced(l: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    l.check_finite()?;
    let (m, n) = (l.rows(), l.cols());
    if m < n {
        return Err(Error::InvalidParameter(format!(
            "qr needs rows >= cols, got {m}x{n}"
        )));
    }
    let scale = l.frobenius();
    let mut a = l.clone();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut r = DenseMatrix::zeros(n, n);

    for j in 0..n {
        let x = &a.col(j)[j..];
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= RANK_RTOL * scale || norm == 0.0 {
            return Err(Error::RankDeficient { column: j });
        }
        let alpha = if x[0] > 0.0 { -norm } else { norm };
        let mut w = x.to_vec();
        w[0] -= alpha;
        let wn = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if wn > 0.0 {
            w.iter_mut().for_each(|v| *v /= wn);
        }
        for k in j..n {
            let col = &mut a.col_mut(k)[j..];
            let dot: f64 = w.iter().zip(col.iter()).map(|(p, q)| p * q).sum();
            for (c, wi) in col.iter_mut().zip(&w) {
                *c -= 2.0 * dot * wi;
            }
        }
        reflectors.push(w);
        for i in 0..=j {
            r[(i, j)] = a[(i, j)];
        }
    }

    let mut q = DenseMatrix::eye(m, n);
    for (j, w) in reflectors.iter().enumerate().rev() {
        for k in 0..n {
            let col = &mut q.col_mut(k)[j..];
            let dot: f64 = w.iter().zip(col.iter()).map(|(p, c)| p * c).sum();
            for (c, wi) in col.iter_mut().zip(w) {
                *c -= 2.0 * dot * wi;
            }
        }
    }

    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for k in j..n {
                r[(j, k)] = -r[(j, k)];
            }
            q.col_mut(j).iter_mut().for_each(|v| *v = -*v);
        }
    }
    Ok((q, r))
}
