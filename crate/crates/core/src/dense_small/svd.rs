//! Golub–Reinsch SVD: Householder bidiagonalization followed by implicitly
//! shifted QR sweeps on the bidiagonal.

use super::DenseMatrix;
use crate::error::{Error, Result};

/// Thin SVD `M = U diag(sigma) V^T` of a `rows x cols` matrix, `rows >= cols`.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `rows x cols`, orthonormal columns.
    pub u: DenseMatrix,
    /// Descending, nonnegative.
    pub sigma: Vec<f64>,
    /// `cols x cols`, orthogonal.
    pub v: DenseMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularTriplet {
    pub sigma: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

/// Relative threshold under which a singular value is reported as zero.
const ZERO_SIGMA_RTOL: f64 = 1e-14;

fn rotation(f: f64, g: f64) -> (f64, f64, f64) {
    let t = f.hypot(g);
    if t == 0.0 {
        (1.0, 0.0, 0.0)
    } else {
        (f / t, g / t, t)
    }
}

pub fn svd(matrix: &DenseMatrix) -> Result<Svd> {
    matrix.check_finite()?;
    let (m, n) = (matrix.rows(), matrix.cols());
    if m < n {
        return Err(Error::InvalidParameter(format!(
            "svd needs rows >= cols, got {m}x{n}"
        )));
    }
    if n == 0 {
        return Ok(Svd {
            u: DenseMatrix::zeros(m, 0),
            sigma: Vec::new(),
            v: DenseMatrix::zeros(0, 0),
        });
    }

    let mut a = matrix.clone();
    let mut s = vec![0.0f64; n];
    let mut e = vec![0.0f64; n];
    let mut u = DenseMatrix::zeros(m, n);
    let mut v = DenseMatrix::zeros(n, n);
    let mut work = vec![0.0; m];

    // Reduce to bidiagonal form: diagonal in s, superdiagonal in e.
    let nct = (m - 1).min(n);
    let nrt = n.saturating_sub(2).min(m);
    for k in 0..nct.max(nrt) {
        if k < nct {
            s[k] = 0.0;
            for i in k..m {
                s[k] = s[k].hypot(a[(i, k)]);
            }
            if s[k] != 0.0 {
                if a[(k, k)] < 0.0 {
                    s[k] = -s[k];
                }
                for i in k..m {
                    a[(i, k)] /= s[k];
                }
                a[(k, k)] += 1.0;
            }
            s[k] = -s[k];
        }
        for j in k + 1..n {
            if k < nct && s[k] != 0.0 {
                let mut t = 0.0;
                for i in k..m {
                    t += a[(i, k)] * a[(i, j)];
                }
                t = -t / a[(k, k)];
                for i in k..m {
                    a[(i, j)] += t * a[(i, k)];
                }
            }
            e[j] = a[(k, j)];
        }
        if k < nct {
            for i in k..m {
                u[(i, k)] = a[(i, k)];
            }
        }
        if k < nrt {
            e[k] = 0.0;
            for i in k + 1..n {
                e[k] = e[k].hypot(e[i]);
            }
            if e[k] != 0.0 {
                if e[k + 1] < 0.0 {
                    e[k] = -e[k];
                }
                for i in k + 1..n {
                    e[i] /= e[k];
                }
                e[k + 1] += 1.0;
            }
            e[k] = -e[k];
            if k + 1 < m && e[k] != 0.0 {
                for w in &mut work[k + 1..m] {
                    *w = 0.0;
                }
                for j in k + 1..n {
                    for i in k + 1..m {
                        work[i] += e[j] * a[(i, j)];
                    }
                }
                for j in k + 1..n {
                    let t = -e[j] / e[k + 1];
                    for i in k + 1..m {
                        a[(i, j)] += t * work[i];
                    }
                }
            }
            for i in k + 1..n {
                v[(i, k)] = e[i];
            }
        }
    }

    let mut p = n;
    if nct < n {
        s[nct] = a[(nct, nct)];
    }
    if nrt + 1 < p {
        e[nrt] = a[(nrt, p - 1)];
    }
    e[p - 1] = 0.0;

    // Accumulate U.
    for j in nct..n {
        for i in 0..m {
            u[(i, j)] = 0.0;
        }
        u[(j, j)] = 1.0;
    }
    for k in (0..nct).rev() {
        if s[k] != 0.0 {
            for j in k + 1..n {
                let mut t = 0.0;
                for i in k..m {
                    t += u[(i, k)] * u[(i, j)];
                }
                t = -t / u[(k, k)];
                for i in k..m {
                    u[(i, j)] += t * u[(i, k)];
                }
            }
            for i in k..m {
                u[(i, k)] = -u[(i, k)];
            }
            u[(k, k)] += 1.0;
            for i in 0..k {
                u[(i, k)] = 0.0;
            }
        } else {
            for i in 0..m {
                u[(i, k)] = 0.0;
            }
            u[(k, k)] = 1.0;
        }
    }

    // Accumulate V.
    for k in (0..n).rev() {
        if k < nrt && e[k] != 0.0 {
            for j in k + 1..n {
                let mut t = 0.0;
                for i in k + 1..n {
                    t += v[(i, k)] * v[(i, j)];
                }
                t = -t / v[(k + 1, k)];
                for i in k + 1..n {
                    v[(i, j)] += t * v[(i, k)];
                }
            }
        }
        for i in 0..n {
            v[(i, k)] = 0.0;
        }
        v[(k, k)] = 1.0;
    }

    // Diagonalize the bidiagonal.
    let pp = p - 1;
    let eps = f64::EPSILON;
    let tiny = 2f64.powi(-966);
    let max_steps = 75 * n * n + 100;
    let mut steps = 0usize;
    while p > 0 {
        // Find the largest k such that e[k] is negligible.
        let mut k = p as isize - 2;
        while k >= 0 {
            let ku = k as usize;
            if e[ku].abs() <= tiny + eps * (s[ku].abs() + s[ku + 1].abs()) {
                e[ku] = 0.0;
                break;
            }
            k -= 1;
        }
        let kase;
        if k == p as isize - 2 {
            // s[p-1] converged
            kase = 4;
        } else {
            let mut ks = p as isize - 1;
            while ks > k {
                let ksu = ks as usize;
                let t = (if ks != p as isize { e[ksu].abs() } else { 0.0 })
                    + (if ks != k + 1 { e[ksu - 1].abs() } else { 0.0 });
                if s[ksu].abs() <= tiny + eps * t {
                    s[ksu] = 0.0;
                    break;
                }
                ks -= 1;
            }
            if ks == k {
                kase = 3;
            } else if ks == p as isize - 1 {
                kase = 1;
            } else {
                kase = 2;
                k = ks;
            }
        }
        let mut k = (k + 1) as usize;

        match kase {
            // Deflate negligible s[p-1].
            1 => {
                let mut f = e[p - 2];
                e[p - 2] = 0.0;
                for j in (k..=p - 2).rev() {
                    let (cs, sn, t) = rotation(s[j], f);
                    s[j] = t;
                    if j != k {
                        f = -sn * e[j - 1];
                        e[j - 1] *= cs;
                    }
                    for i in 0..n {
                        let t = cs * v[(i, j)] + sn * v[(i, p - 1)];
                        v[(i, p - 1)] = -sn * v[(i, j)] + cs * v[(i, p - 1)];
                        v[(i, j)] = t;
                    }
                }
            }
            // Split at negligible s[k-1].
            2 => {
                let mut f = e[k - 1];
                e[k - 1] = 0.0;
                for j in k..p {
                    let (cs, sn, t) = rotation(s[j], f);
                    s[j] = t;
                    f = -sn * e[j];
                    e[j] *= cs;
                    for i in 0..m {
                        let t = cs * u[(i, j)] + sn * u[(i, k - 1)];
                        u[(i, k - 1)] = -sn * u[(i, j)] + cs * u[(i, k - 1)];
                        u[(i, j)] = t;
                    }
                }
            }
            // One implicit-shift QR step.
            3 => {
                steps += 1;
                if steps > max_steps {
                    return Err(Error::NoConvergence {
                        sweeps: steps,
                        dim: n,
                    });
                }
                let scale = s[p - 1]
                    .abs()
                    .max(s[p - 2].abs())
                    .max(e[p - 2].abs())
                    .max(s[k].abs())
                    .max(e[k].abs());
                let sp = s[p - 1] / scale;
                let spm1 = s[p - 2] / scale;
                let epm1 = e[p - 2] / scale;
                let sk = s[k] / scale;
                let ek = e[k] / scale;
                let b = ((spm1 + sp) * (spm1 - sp) + epm1 * epm1) / 2.0;
                let c = (sp * epm1) * (sp * epm1);
                let mut shift = 0.0;
                if b != 0.0 || c != 0.0 {
                    shift = (b * b + c).sqrt();
                    if b < 0.0 {
                        shift = -shift;
                    }
                    shift = c / (b + shift);
                }
                let mut f = (sk + sp) * (sk - sp) + shift;
                let mut g = sk * ek;

                for j in k..p - 1 {
                    let (cs, sn, t) = rotation(f, g);
                    if j != k {
                        e[j - 1] = t;
                    }
                    f = cs * s[j] + sn * e[j];
                    e[j] = cs * e[j] - sn * s[j];
                    g = sn * s[j + 1];
                    s[j + 1] *= cs;
                    for i in 0..n {
                        let t = cs * v[(i, j)] + sn * v[(i, j + 1)];
                        v[(i, j + 1)] = -sn * v[(i, j)] + cs * v[(i, j + 1)];
                        v[(i, j)] = t;
                    }
                    let (cs, sn, t) = rotation(f, g);
                    s[j] = t;
                    f = cs * e[j] + sn * s[j + 1];
                    s[j + 1] = -sn * e[j] + cs * s[j + 1];
                    g = sn * e[j + 1];
                    e[j + 1] *= cs;
                    if j < m - 1 {
                        for i in 0..m {
                            let t = cs * u[(i, j)] + sn * u[(i, j + 1)];
                            u[(i, j + 1)] = -sn * u[(i, j)] + cs * u[(i, j + 1)];
                            u[(i, j)] = t;
                        }
                    }
                }
                e[p - 2] = f;
            }
            // Convergence: make s[k] nonnegative and restore ordering.
            _ => {
                if s[k] <= 0.0 {
                    s[k] = if s[k] < 0.0 { -s[k] } else { 0.0 };
                    for i in 0..=pp {
                        v[(i, k)] = -v[(i, k)];
                    }
                }
                while k < pp {
                    if s[k] >= s[k + 1] {
                        break;
                    }
                    s.swap(k, k + 1);
                    if k < n - 1 {
                        for i in 0..n {
                            let t = v[(i, k + 1)];
                            v[(i, k + 1)] = v[(i, k)];
                            v[(i, k)] = t;
                        }
                    }
                    if k < m - 1 {
                        for i in 0..m {
                            let t = u[(i, k + 1)];
                            u[(i, k + 1)] = u[(i, k)];
                            u[(i, k)] = t;
                        }
                    }
                    k += 1;
                }
                p -= 1;
            }
        }
    }

    Ok(Svd { u, sigma: s, v })
}

/// Smallest singular value with its singular vectors.
///
/// Among numerically equal minima the one with the largest index is taken.
/// The pair `(u, v)` is flipped so that `sum(v) >= 0`. Values below
/// `1e-14 * sigma_max` are reported as exactly zero.
pub fn smallest_singular_triplet(matrix: &DenseMatrix) -> Result<SingularTriplet> {
    let dec = svd(matrix)?;
    let k = dec.sigma.len();
    if k == 0 {
        return Err(Error::InvalidParameter("matrix has no columns".into()));
    }
    let last = k - 1;
    let mut sigma = dec.sigma[last];
    if sigma <= ZERO_SIGMA_RTOL * dec.sigma[0] {
        sigma = 0.0;
    }
    let mut u = dec.u.col(last).to_vec();
    let mut v = dec.v.col(last).to_vec();
    if v.iter().sum::<f64>() < 0.0 {
        u.iter_mut().for_each(|x| *x = -*x);
        v.iter_mut().for_each(|x| *x = -*x);
    }
    Ok(SingularTriplet { sigma, u, v })
}
