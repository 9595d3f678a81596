//! Dense vector kernels.

use crate::error::{Error, Result};

pub fn sum(x: &[f64]) -> f64 {
    x.iter().sum()
}

pub fn norm1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

pub fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Index and signed value of the entry of largest magnitude. Ties go to the
/// smallest index.
pub fn norm_inf_with_argmax(x: &[f64]) -> Result<(usize, f64)> {
    let mut it = x.iter().enumerate();
    let (mut best, mut value) = match it.next() {
        Some((i, &v)) => (i, v),
        None => return Err(Error::EmptyVector),
    };
    for (i, &v) in it {
        if v.abs() > value.abs() {
            best = i;
            value = v;
        }
    }
    Ok((best, value))
}

/// `y += a * x`
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// `x *= a`
pub fn scale(a: f64, x: &mut [f64]) {
    for xi in x {
        *xi *= a;
    }
}

/// `x /= d`, entrywise division (exact when `x[i] == d`).
pub fn divide(x: &mut [f64], d: f64) {
    for xi in x {
        *xi /= d;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_ties_and_sign() {
        assert_eq!(norm_inf_with_argmax(&[1.0, -2.0, 2.0]).unwrap(), (1, -2.0));
        assert!(matches!(norm_inf_with_argmax(&[]), Err(Error::EmptyVector)));
    }

    #[test]
    fn one_norm() {
        assert_eq!(norm1(&[0.3, -0.7]), 1.0);
    }

    #[test]
    fn axpy_hand_trace() {
        let mut u = [1.0, 0.5];
        axpy(-0.5, &[0.5, 1.0], &mut u);
        assert_eq!(u, [0.75, 0.0]);
    }

    #[test]
    fn scale_and_divide() {
        let mut x = [2.0, -4.0];
        scale(0.5, &mut x);
        assert_eq!(x, [1.0, -2.0]);
        divide(&mut x, -2.0);
        assert_eq!(x, [-0.5, 1.0]);
        assert_eq!(sum(&x), 0.5);
        assert_eq!(dot(&x, &x), 1.25);
    }
}
