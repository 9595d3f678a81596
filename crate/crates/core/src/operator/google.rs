use std::io::BufRead;
use std::sync::Arc;

use rayon::prelude::*;

use super::kernels::norm1;
use super::LinearOperator;
use crate::error::{Error, Result};
use crate::graph_io::TransitionMatrix;

/// The Google matrix `A = alpha (P + v d^T) + (1 - alpha) v e^T`, applied
/// without ever forming the rank-one terms.
#[derive(Debug, Clone)]
pub struct GoogleOperator {
    alpha: f64,
    teleport: Vec<f64>,
    transition: Arc<TransitionMatrix>,
    partitions: usize,
}

impl GoogleOperator {
    /// Operator with the uniform teleport vector `e / n`.
    pub fn new(transition: Arc<TransitionMatrix>, alpha: f64) -> Result<Self> {
        let n = transition.n();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        Self::with_teleport(transition, alpha, vec![1.0 / n as f64; n])
    }

    /// Operator with a caller-supplied teleport vector. The vector must be
    /// nonnegative with unit 1-norm to within `1e-10`; it is then rescaled
    /// by its exact sum.
    pub fn with_teleport(
        transition: Arc<TransitionMatrix>,
        alpha: f64,
        mut teleport: Vec<f64>,
    ) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "damping factor must lie in (0, 1), got {alpha}"
            )));
        }
        if teleport.len() != transition.n() {
            return Err(Error::DimensionMismatch {
                expected: transition.n(),
                got: teleport.len(),
            });
        }
        if teleport.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidParameter(
                "teleport vector must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = teleport.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "teleport vector sums to {total}, expected 1"
            )));
        }
        for v in &mut teleport {
            *v /= total;
        }
        Ok(Self {
            alpha,
            teleport,
            transition,
            partitions: 1,
        })
    }

    /// Splits each application into `partitions` row blocks evaluated on the
    /// current rayon pool. Output is bitwise identical for every partition
    /// count since each row is reduced sequentially.
    pub fn with_partitions(mut self, partitions: usize) -> Self {
        self.partitions = partitions.max(1);
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn teleport(&self) -> &[f64] {
        &self.teleport
    }

    pub fn transition(&self) -> &TransitionMatrix {
        &self.transition
    }

    /// `A x` with a dimension check.
    pub fn apply_checked(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x.len())?;
        Ok(self.apply(x))
    }

    /// Direct residual `A q - q` and its relative 1-norm `||A q - q||_1 / ||q||_1`.
    pub fn residual_direct(&self, q: &[f64]) -> Result<(Vec<f64>, f64)> {
        self.check_dim(q.len())?;
        let qn = norm1(q);
        if qn == 0.0 {
            return Err(Error::ZeroVector);
        }
        let mut r = self.apply(q);
        for (ri, qi) in r.iter_mut().zip(q) {
            *ri -= qi;
        }
        let ratio = norm1(&r) / qn;
        Ok((r, ratio))
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: len,
            });
        }
        Ok(())
    }

    /// Coefficient of `v` in `A x`: `alpha d^T x + (1 - alpha) e^T x`.
    fn teleport_weight(&self, x: &[f64]) -> f64 {
        let mut dangling_mass = 0.0;
        let mut total = 0.0;
        for (&xi, &is_dangling) in x.iter().zip(self.transition.dangling()) {
            total += xi;
            if is_dangling {
                dangling_mass += xi;
            }
        }
        self.alpha * dangling_mass + (1.0 - self.alpha) * total
    }

    fn fill_rows(&self, x: &[f64], y: &mut [f64], first_row: usize, weight: f64) {
        self.transition.mul_rows(x, y, first_row);
        let v = &self.teleport[first_row..first_row + y.len()];
        for (yi, vi) in y.iter_mut().zip(v) {
            *yi = self.alpha * *yi + weight * vi;
        }
    }
}

impl LinearOperator for GoogleOperator {
    fn dim(&self) -> usize {
        self.transition.n()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim());
        assert_eq!(y.len(), self.dim());
        let weight = self.teleport_weight(x);
        if self.partitions == 1 {
            self.fill_rows(x, y, 0, weight);
        } else {
            let chunk = self.dim().div_ceil(self.partitions).max(1);
            y.par_chunks_mut(chunk)
                .enumerate()
                .for_each(|(k, ys)| self.fill_rows(x, ys, k * chunk, weight));
        }
    }

    fn frobenius_norm(&self) -> f64 {
        // ||alpha P + v w^T||_F^2 with w = alpha d + (1 - alpha) e.
        let a = self.alpha;
        let w: Vec<f64> = self
            .transition
            .dangling()
            .iter()
            .map(|&d| if d { 1.0 } else { 1.0 - a })
            .collect();
        let mut pw = vec![0.0; self.dim()];
        self.transition.mul_rows(&w, &mut pw, 0);
        let cross: f64 = self.teleport.iter().zip(&pw).map(|(v, p)| v * p).sum();
        let vv: f64 = self.teleport.iter().map(|v| v * v).sum();
        let ww: f64 = w.iter().map(|x| x * x).sum();
        (a * a * self.transition.frobenius_sq() + 2.0 * a * cross + vv * ww)
            .max(0.0)
            .sqrt()
    }

    fn nnz(&self) -> usize {
        self.transition.nnz()
    }
}

/// Reads a teleport vector: one float per line, `n` lines.
pub fn read_teleport<R: BufRead>(reader: R, n: usize) -> Result<Vec<f64>> {
    let mut v = Vec::with_capacity(n);
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let value: f64 = t.parse().map_err(|_| Error::Parse {
            line: idx + 1,
            message: format!("invalid teleport entry {t:?}"),
        })?;
        v.push(value);
    }
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: v.len(),
        });
    }
    Ok(v)
}
