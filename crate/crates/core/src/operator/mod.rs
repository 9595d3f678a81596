//! Matrix-free operators and vector kernels.

mod csr;
mod google;
pub mod kernels;

use std::cell::Cell;

pub use csr::CsrMatrix;
pub use google::{read_teleport, GoogleOperator};

/// A square linear map applied matrix-free.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    /// `y = A x`. Both slices have length [`dim`](Self::dim).
    fn apply_into(&self, x: &[f64], y: &mut [f64]);

    /// Frobenius norm of the matrix represented by the operator.
    fn frobenius_norm(&self) -> f64;

    /// Stored nonzeros, for the `2 * nnz` flop model of one application.
    fn nnz(&self) -> usize {
        self.dim() * self.dim()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.apply_into(x, &mut y);
        y
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        (**self).apply_into(x, y)
    }
    fn frobenius_norm(&self) -> f64 {
        (**self).frobenius_norm()
    }
    fn nnz(&self) -> usize {
        (**self).nnz()
    }
}

/// Operator-application accounting. Counts never decrease.
#[derive(Debug, Default, Clone)]
pub struct WorkCounter {
    mvp: Cell<u64>,
    flops: Cell<u64>,
}

impl WorkCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn mvp(&self) -> u64 {
        self.mvp.get()
    }

    /// Flops under the `2 * nnz` per application model.
    pub fn flops(&self) -> u64 {
        self.flops.get()
    }

    fn record(&self, nnz: usize) {
        self.mvp.set(self.mvp.get() + 1);
        self.flops.set(self.flops.get() + 2 * nnz as u64);
    }
}

/// Wraps an operator and counts every application.
pub struct Counted<'a, O: ?Sized> {
    inner: &'a O,
    counter: &'a WorkCounter,
}

impl<'a, O: LinearOperator + ?Sized> Counted<'a, O> {
    pub fn new(inner: &'a O, counter: &'a WorkCounter) -> Self {
        Self { inner, counter }
    }
}

impl<O: LinearOperator + ?Sized> LinearOperator for Counted<'_, O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        self.counter.record(self.inner.nnz());
        self.inner.apply_into(x, y);
    }

    fn frobenius_norm(&self) -> f64 {
        self.inner.frobenius_norm()
    }

    fn nnz(&self) -> usize {
        self.inner.nnz()
    }
}
