//! Eigen-decomposition of a real upper-Hessenberg matrix by shifted QR
//! (Francis double shift) with back-substitution for the eigenvectors.

use num_complex::Complex64;

use super::DenseMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: Complex64,
    /// Unit 2-norm.
    pub vector: Vec<Complex64>,
}

const SWEEPS_PER_DIM: usize = 100;

fn cdiv(xr: f64, xi: f64, yr: f64, yi: f64) -> (f64, f64) {
    if yr.abs() > yi.abs() {
        let r = yi / yr;
        let d = yr + r * yi;
        ((xr + r * xi) / d, (xi - r * xr) / d)
    } else {
        let r = yr / yi;
        let d = yi + r * yr;
        ((r * xr + xi) / d, (r * xi - xr) / d)
    }
}

/// All eigenpairs of an upper-Hessenberg `h`, in Schur order.
///
/// For a complex conjugate pair both members are returned, the one with
/// positive imaginary part first.
pub fn hessenberg_eig(h: &DenseMatrix) -> Result<Vec<EigenPair>> {
    let n = h.rows();
    if h.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: h.cols(),
        });
    }
    h.check_finite()?;
    for j in 0..n {
        for i in j + 2..n {
            if h[(i, j)] != 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "matrix is not upper Hessenberg at ({i}, {j})"
                )));
            }
        }
    }
    if n == 0 {
        return Ok(Vec::new());
    }

    let mut work = h.clone();
    let mut v = DenseMatrix::identity(n);
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    hqr2(&mut work, &mut v, &mut d, &mut e)?;

    let mut pairs = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        if e[i] == 0.0 {
            let vec: Vec<Complex64> = v.col(i).iter().map(|&x| Complex64::new(x, 0.0)).collect();
            pairs.push(EigenPair {
                value: Complex64::new(d[i], 0.0),
                vector: normalized(vec),
            });
            i += 1;
        } else {
            let re = v.col(i);
            let im = v.col(i + 1);
            let vec: Vec<Complex64> = re
                .iter()
                .zip(im)
                .map(|(&a, &b)| Complex64::new(a, b))
                .collect();
            let vec = normalized(vec);
            let conj: Vec<Complex64> = vec.iter().map(|z| z.conj()).collect();
            pairs.push(EigenPair {
                value: Complex64::new(d[i], e[i]),
                vector: vec,
            });
            pairs.push(EigenPair {
                value: Complex64::new(d[i + 1], e[i + 1]),
                vector: conj,
            });
            i += 2;
        }
    }
    Ok(pairs)
}

fn normalized(mut x: Vec<Complex64>) -> Vec<Complex64> {
    let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|z| *z /= norm);
    }
    x
}

/// Reduces `h` to real Schur form, accumulating into `v`, then overwrites
/// `v` with the eigenvectors. Complex pairs occupy two adjacent columns
/// (real part, imaginary part) with `e[i] > 0` at the first.
fn hqr2(h: &mut DenseMatrix, v: &mut DenseMatrix, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let nn = h.rows() as isize;
    let max_sweeps = SWEEPS_PER_DIM * h.rows();
    macro_rules! hh {
        ($i:expr, $j:expr) => {
            h[(($i) as usize, ($j) as usize)]
        };
    }
    macro_rules! vv {
        ($i:expr, $j:expr) => {
            v[(($i) as usize, ($j) as usize)]
        };
    }
    let idx = |i: isize| i as usize;

    let low = 0isize;
    let high = nn - 1;
    let eps = f64::EPSILON;
    let mut n = nn - 1;
    let mut exshift = 0.0;
    let (mut p, mut q, mut r, mut s, mut z) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (mut t, mut w, mut x, mut y);

    let mut norm = 0.0;
    for i in 0..nn {
        for j in (i - 1).max(0)..nn {
            norm += hh!(i, j).abs();
        }
    }

    let mut iter = 0;
    let mut sweeps = 0usize;
    while n >= low {
        // Look for a single small subdiagonal element.
        let mut l = n;
        while l > low {
            s = hh!(l - 1, l - 1).abs() + hh!(l, l).abs();
            if s == 0.0 {
                s = norm;
            }
            if hh!(l, l - 1) == 0.0 || hh!(l, l - 1).abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == n {
            // One root found.
            hh!(n, n) += exshift;
            d[idx(n)] = hh!(n, n);
            e[idx(n)] = 0.0;
            n -= 1;
            iter = 0;
        } else if l == n - 1 {
            // Two roots found.
            w = hh!(n, n - 1) * hh!(n - 1, n);
            p = (hh!(n - 1, n - 1) - hh!(n, n)) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            hh!(n, n) += exshift;
            hh!(n - 1, n - 1) += exshift;
            x = hh!(n, n);

            if q >= 0.0 {
                z = if p >= 0.0 { p + z } else { p - z };
                d[idx(n - 1)] = x + z;
                d[idx(n)] = d[idx(n - 1)];
                if z != 0.0 {
                    d[idx(n)] = x - w / z;
                }
                e[idx(n - 1)] = 0.0;
                e[idx(n)] = 0.0;
                x = hh!(n, n - 1);
                s = x.abs() + z.abs();
                p = x / s;
                q = z / s;
                r = (p * p + q * q).sqrt();
                p /= r;
                q /= r;
                for j in n - 1..nn {
                    z = hh!(n - 1, j);
                    hh!(n - 1, j) = q * z + p * hh!(n, j);
                    hh!(n, j) = q * hh!(n, j) - p * z;
                }
                for i in 0..=n {
                    z = hh!(i, n - 1);
                    hh!(i, n - 1) = q * z + p * hh!(i, n);
                    hh!(i, n) = q * hh!(i, n) - p * z;
                }
                for i in low..=high {
                    z = vv!(i, n - 1);
                    vv!(i, n - 1) = q * z + p * vv!(i, n);
                    vv!(i, n) = q * vv!(i, n) - p * z;
                }
            } else {
                d[idx(n - 1)] = x + p;
                d[idx(n)] = x + p;
                e[idx(n - 1)] = z;
                e[idx(n)] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            x = hh!(n, n);
            y = 0.0;
            w = 0.0;
            if l < n {
                y = hh!(n - 1, n - 1);
                w = hh!(n, n - 1) * hh!(n - 1, n);
            }

            // Exceptional shifts.
            if iter == 10 {
                exshift += x;
                for i in low..=n {
                    hh!(i, i) -= x;
                }
                s = hh!(n, n - 1).abs() + hh!(n - 1, n - 2).abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in low..=n {
                        hh!(i, i) -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }

            iter += 1;
            sweeps += 1;
            if sweeps > max_sweeps {
                return Err(Error::NoConvergence {
                    sweeps,
                    dim: h.rows(),
                });
            }

            // Look for two consecutive small subdiagonal elements.
            let mut m = n - 2;
            while m >= l {
                z = hh!(m, m);
                r = x - z;
                s = y - z;
                p = (r * s - w) / hh!(m + 1, m) + hh!(m, m + 1);
                q = hh!(m + 1, m + 1) - z - r - s;
                r = hh!(m + 2, m + 1);
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if hh!(m, m - 1).abs() * (q.abs() + r.abs())
                    < eps
                        * (p.abs() * (hh!(m - 1, m - 1).abs() + z.abs() + hh!(m + 1, m + 1).abs()))
                {
                    break;
                }
                m -= 1;
            }

            for i in m + 2..=n {
                hh!(i, i - 2) = 0.0;
                if i > m + 2 {
                    hh!(i, i - 3) = 0.0;
                }
            }

            // Double QR step on rows l..n, columns m..n.
            for k in m..n {
                let notlast = k != n - 1;
                if k != m {
                    p = hh!(k, k - 1);
                    q = hh!(k + 1, k - 1);
                    r = if notlast { hh!(k + 2, k - 1) } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != m {
                        hh!(k, k - 1) = -s * x;
                    } else if l != m {
                        hh!(k, k - 1) = -hh!(k, k - 1);
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    for j in k..nn {
                        p = hh!(k, j) + q * hh!(k + 1, j);
                        if notlast {
                            p += r * hh!(k + 2, j);
                            hh!(k + 2, j) -= p * z;
                        }
                        hh!(k, j) -= p * x;
                        hh!(k + 1, j) -= p * y;
                    }
                    for i in 0..=n.min(k + 3) {
                        p = x * hh!(i, k) + y * hh!(i, k + 1);
                        if notlast {
                            p += z * hh!(i, k + 2);
                            hh!(i, k + 2) -= p * r;
                        }
                        hh!(i, k) -= p;
                        hh!(i, k + 1) -= p * q;
                    }
                    for i in low..=high {
                        p = x * vv!(i, k) + y * vv!(i, k + 1);
                        if notlast {
                            p += z * vv!(i, k + 2);
                            vv!(i, k + 2) -= p * r;
                        }
                        vv!(i, k) -= p;
                        vv!(i, k + 1) -= p * q;
                    }
                }
            }
        }
    }

    if norm == 0.0 {
        return Ok(());
    }

    // Back-substitute to find vectors of the upper triangular form.
    for n in (0..nn).rev() {
        p = d[idx(n)];
        q = e[idx(n)];

        if q == 0.0 {
            let mut l = n;
            hh!(n, n) = 1.0;
            for i in (0..n).rev() {
                w = hh!(i, i) - p;
                r = 0.0;
                for j in l..=n {
                    r += hh!(i, j) * hh!(j, n);
                }
                if e[idx(i)] < 0.0 {
                    z = w;
                    s = r;
                } else {
                    l = i;
                    if e[idx(i)] == 0.0 {
                        hh!(i, n) = if w != 0.0 { -r / w } else { -r / (eps * norm) };
                    } else {
                        x = hh!(i, i + 1);
                        y = hh!(i + 1, i);
                        q = (d[idx(i)] - p) * (d[idx(i)] - p) + e[idx(i)] * e[idx(i)];
                        t = (x * s - z * r) / q;
                        hh!(i, n) = t;
                        hh!(i + 1, n) = if x.abs() > z.abs() {
                            (-r - w * t) / x
                        } else {
                            (-s - y * t) / z
                        };
                    }
                    t = hh!(i, n).abs();
                    if (eps * t) * t > 1.0 {
                        for j in i..=n {
                            hh!(j, n) /= t;
                        }
                    }
                }
            }
        } else if q < 0.0 {
            let mut l = n - 1;
            if hh!(n, n - 1).abs() > hh!(n - 1, n).abs() {
                hh!(n - 1, n - 1) = q / hh!(n, n - 1);
                hh!(n - 1, n) = -(hh!(n, n) - p) / hh!(n, n - 1);
            } else {
                let (a, b) = cdiv(0.0, -hh!(n - 1, n), hh!(n - 1, n - 1) - p, q);
                hh!(n - 1, n - 1) = a;
                hh!(n - 1, n) = b;
            }
            hh!(n, n - 1) = 0.0;
            hh!(n, n) = 1.0;
            for i in (0..n - 1).rev() {
                let mut ra = 0.0;
                let mut sa = 0.0;
                for j in l..=n {
                    ra += hh!(i, j) * hh!(j, n - 1);
                    sa += hh!(i, j) * hh!(j, n);
                }
                w = hh!(i, i) - p;

                if e[idx(i)] < 0.0 {
                    z = w;
                    r = ra;
                    s = sa;
                } else {
                    l = i;
                    if e[idx(i)] == 0.0 {
                        let (a, b) = cdiv(-ra, -sa, w, q);
                        hh!(i, n - 1) = a;
                        hh!(i, n) = b;
                    } else {
                        x = hh!(i, i + 1);
                        y = hh!(i + 1, i);
                        let di = d[idx(i)] - p;
                        let mut vr = di * di + e[idx(i)] * e[idx(i)] - q * q;
                        let vi = di * 2.0 * q;
                        if vr == 0.0 && vi == 0.0 {
                            vr = eps * norm * (w.abs() + q.abs() + x.abs() + y.abs() + z.abs());
                        }
                        let (a, b) = cdiv(x * r - z * ra + q * sa, x * s - z * sa - q * ra, vr, vi);
                        hh!(i, n - 1) = a;
                        hh!(i, n) = b;
                        if x.abs() > z.abs() + q.abs() {
                            hh!(i + 1, n - 1) = (-ra - w * hh!(i, n - 1) + q * hh!(i, n)) / x;
                            hh!(i + 1, n) = (-sa - w * hh!(i, n) - q * hh!(i, n - 1)) / x;
                        } else {
                            let (a, b) = cdiv(-r - y * hh!(i, n - 1), -s - y * hh!(i, n), z, q);
                            hh!(i + 1, n - 1) = a;
                            hh!(i + 1, n) = b;
                        }
                    }
                    t = hh!(i, n - 1).abs().max(hh!(i, n).abs());
                    if (eps * t) * t > 1.0 {
                        for j in i..=n {
                            hh!(j, n - 1) /= t;
                            hh!(j, n) /= t;
                        }
                    }
                }
            }
        }
    }

    // Back transformation to eigenvectors of the original matrix.
    for j in (low..nn).rev() {
        for i in low..=high {
            z = 0.0;
            for k in low..=j.min(high) {
                z += vv!(i, k) * hh!(k, j);
            }
            vv!(i, j) = z;
        }
    }
    Ok(())
}
