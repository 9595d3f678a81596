//! Acceptance checks, one line per criterion.
//!
//! Dataset-backed criteria (7, 8) look for soc-Slashdot0902 in
//! `PRNK_DATA_DIR` (default `data/`) and report SKIP when it is missing.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use common::*;
use prnk_core::bench::{run_bench, BenchSpec};
use prnk_core::dense_small::{hessenberg_eig, svd, DenseMatrix};
use prnk_core::diagnostics::{decomposition_error, eig_distance, verify_prop21};
use prnk_core::graph_io::{build_transition, load_graph};
use prnk_core::krylov::{arnoldi_process, hessenberg_process, ritz_pairs, KrylovDecomposition};
use prnk_core::operator::{GoogleOperator, LinearOperator};
use prnk_core::solvers::{solve, verify_report, Method, SolveConfig};

type Criterion = (u32, &'static str, fn() -> Verdict);

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        let ok: bool = $cond;
        if !ok {
            return Verdict::Fail(format!($($msg)*));
        }
    };
}

// ---------------------------------------------------------------- 1

fn oracle_equivalence() -> Verdict {
    let alpha = 0.85;
    let tol = 1e-8;
    let mut worst_res = 0.0f64;
    let mut worst_err = 0.0f64;
    for seed in 0..50u64 {
        let mut rng = rng(1000 + seed);
        let n = rng.gen_range(5..=200);
        let g = random_graph(&mut rng, n, 5, 0.1);
        let dense = dense_google(&g, alpha);
        let xstar = dense_power_oracle(&dense, 1e-13);
        let op = google(&g, alpha);
        for method in Method::ALL {
            let cfg = SolveConfig::new(method, alpha).with_tol(tol);
            let r = match solve(&op, &cfg) {
                Ok(r) => r,
                Err(e) => return Verdict::Fail(format!("seed {seed} n={n} {method}: {e}")),
            };
            ensure!(r.converged, "seed {seed} n={n} {method}: not converged");
            let res = dense_residual(&dense, &r.x);
            let err: f64 = r.x.iter().zip(&xstar).map(|(a, b)| (a - b).abs()).sum();
            ensure!(res < tol, "seed {seed} n={n} {method}: residual {res:e}");
            ensure!(err < 1e-6, "seed {seed} n={n} {method}: error {err:e}");
            worst_res = worst_res.max(res);
            worst_err = worst_err.max(err);
        }
    }
    Verdict::Pass(format!(
        "50 graphs x 5 methods, worst residual {worst_res:.1e}, worst error {worst_err:.1e}"
    ))
}

// ---------------------------------------------------------------- 2, 3

enum Instance {
    Sparse(prnk_core::operator::CsrMatrix),
    Google(GoogleOperator),
}

impl Instance {
    fn op(&self) -> &dyn LinearOperator {
        match self {
            Instance::Sparse(a) => a,
            Instance::Google(a) => a,
        }
    }
}

/// Random operators with n <= 500 and step budgets m <= 30, including
/// full-dimension runs on small instances.
fn decomposition_instances() -> Vec<(Instance, Vec<f64>, usize)> {
    let mut out = Vec::new();
    for seed in 0..60u64 {
        let mut rng = rng(2000 + seed);
        let full = seed % 6 == 5;
        let n = if full {
            rng.gen_range(2..=30)
        } else {
            rng.gen_range(10..=500)
        };
        let m = if full {
            n
        } else {
            rng.gen_range(1..=30.min(n))
        };
        let inst = if seed % 2 == 0 {
            Instance::Sparse(random_sparse(&mut rng, n, 4))
        } else {
            let g = random_graph(&mut rng, n, 5, 0.1);
            Instance::Google(google(&g, [0.85, 0.99][(seed / 2 % 2) as usize]))
        };
        let q0 = if seed % 3 == 0 {
            vec![1.0 / n as f64; n]
        } else {
            random_vector(&mut rng, n)
        };
        out.push((inst, q0, m));
    }
    out
}

fn frob(d: &DenseMatrix) -> f64 {
    d.frobenius()
}

fn decomposition_identity() -> Verdict {
    let mut worst = 0.0f64;
    let mut count = 0;
    for (i, (inst, q0, m)) in decomposition_instances().iter().enumerate() {
        let op = inst.op();
        for d in [
            hessenberg_process(op, q0, *m).unwrap(),
            arnoldi_process(op, q0, *m, false).unwrap(),
        ] {
            let e = decomposition_error(op, &d).unwrap();
            let type_norm = e.absolute / (frob(&d.hbar) * frob(&d.basis));
            ensure!(
                e.normalized <= 1e-12 && type_norm <= 1e-12,
                "instance {i} {}: normalized {:e}, by |H||L| {type_norm:e}",
                d.kind,
                e.normalized
            );
            worst = worst.max(e.normalized).max(type_norm);
            count += 1;
        }
    }
    Verdict::Pass(format!(
        "{count} decompositions, worst normalized error {worst:.1e}"
    ))
}

fn check_pivots(d: &KrylovDecomposition) -> Result<usize, String> {
    let p = d.pivots.as_ref().ok_or("missing pivots")?;
    let mut checked = 0;
    for j in 0..=d.steps {
        let col = d.basis.col(j);
        if j == d.steps && d.breakdown_at.is_some() {
            if col.iter().any(|&x| x != 0.0) {
                return Err("breakdown column not zero".into());
            }
            continue;
        }
        for i in 0..j {
            if col[p[i]] != 0.0 {
                return Err(format!("basis[p({i}), {j}] = {:e}", col[p[i]]));
            }
            checked += 1;
        }
        if col[p[j]] != 1.0 {
            return Err(format!("basis[p({j}), {j}] = {}", col[p[j]]));
        }
        let inf = col.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        if inf != 1.0 {
            return Err(format!("||l_{j}||_inf = {inf}"));
        }
        checked += 1;
    }
    Ok(checked)
}

fn pivot_structure() -> Verdict {
    let mut positions = 0;
    let mut decomps = 0;
    for (i, (inst, q0, m)) in decomposition_instances().iter().enumerate() {
        let d = hessenberg_process(inst.op(), q0, *m).unwrap();
        match check_pivots(&d) {
            Ok(k) => positions += k,
            Err(e) => return Verdict::Fail(format!("instance {i}: {e}")),
        }
        decomps += 1;
    }
    Verdict::Pass(format!(
        "{decomps} Hessenberg bases, {positions} positions exact"
    ))
}

// ---------------------------------------------------------------- 4

fn residual_identity() -> Verdict {
    let mut cycles = 0;
    let mut worst_id = 0.0f64;
    let mut worst_norm = 0.0f64;
    for seed in 0..30u64 {
        let mut rng = rng(4000 + seed);
        let n = rng.gen_range(5..=200);
        let g = random_graph(&mut rng, n, 5, 0.1);
        for alpha in [0.85, 0.99] {
            let op = google(&g, alpha);
            for method in [Method::Arnoldi, Method::Hessenberg] {
                for m in [2, 4, 8] {
                    let cfg = SolveConfig::new(method, alpha)
                        .with_m(m)
                        .with_tol(1e-10)
                        .with_verify_cycles(true);
                    let r = solve(&op, &cfg).unwrap();
                    for c in &r.cycle_checks {
                        ensure!(
                            c.identity_error <= 1e-12,
                            "seed {seed} {method} m={m} cycle {}: {:e}",
                            c.cycle,
                            c.identity_error
                        );
                        worst_id = worst_id.max(c.identity_error);
                        if method == Method::Arnoldi {
                            let gap = (c.r_norm2 - c.sigma).abs();
                            ensure!(
                                gap <= 1e-12,
                                "seed {seed} arnoldi m={m}: | ||r|| - sigma | = {gap:e}"
                            );
                            worst_norm = worst_norm.max(gap);
                        }
                        cycles += 1;
                    }
                    if r.last_cycle.is_some() {
                        let v = verify_report(&op, &r).unwrap();
                        ensure!(
                            v <= 1e-12,
                            "seed {seed} {method} m={m}: verify_report {v:e}"
                        );
                    }
                }
            }
        }
    }
    Verdict::Pass(format!(
        "{cycles} cycles, worst identity error {worst_id:.1e}, worst Arnoldi norm gap {worst_norm:.1e}"
    ))
}

// ---------------------------------------------------------------- 5

fn proposition_21() -> Verdict {
    let mut included = 0;
    let mut excluded = 0;
    let mut broke = 0;
    let mut worst_ratio = 0.0f64;
    let mut worst_identity = 0.0f64;
    let mut worst_eig = 0.0f64;
    let mut seed = 0u64;
    while included < 100 {
        if seed >= 1000 {
            return Verdict::Fail(format!(
                "only {included} well-conditioned instances in 1000 draws"
            ));
        }
        let mut rng = rng(5000 + seed);
        seed += 1;
        let n = rng.gen_range(11..=100);
        let m = rng.gen_range(2..=10);
        let a = random_dense(&mut rng, n, n);
        let q0 = random_vector(&mut rng, n);
        let rep = match verify_prop21(&a, &q0, m) {
            Ok(r) => r,
            Err(_) => {
                broke += 1;
                continue;
            }
        };
        if rep.basis_condition > 1e6 {
            excluded += 1;
            continue;
        }
        included += 1;
        let rel = (rep.ratio_lhs - rep.ratio_rhs).abs() / rep.ratio_lhs.abs();
        let id = rep.identity_residual / rep.h_norm;
        ensure!(rel <= 1e-10, "seed {} ratio mismatch {rel:e}", seed - 1);
        ensure!(id <= 1e-10, "seed {} identity residual {id:e}", seed - 1);
        ensure!(
            rep.eig_distance <= 1e-8,
            "seed {} eig distance {:e}",
            seed - 1,
            rep.eig_distance
        );
        worst_ratio = worst_ratio.max(rel);
        worst_identity = worst_identity.max(id);
        worst_eig = worst_eig.max(rep.eig_distance);
    }
    Verdict::Pass(format!(
        "{included} instances ({excluded} ill-conditioned, {broke} breakdowns skipped), \
         worst ratio {worst_ratio:.1e}, identity {worst_identity:.1e}, eig {worst_eig:.1e}"
    ))
}

// ---------------------------------------------------------------- 6

fn ritz_identity_error(op: &dyn LinearOperator, d: &KrylovDecomposition) -> f64 {
    let h = d.subdiagonal();
    let l = d.next_vector();
    let mut worst = 0.0f64;
    for p in ritz_pairs(d).unwrap() {
        let ar = op.apply(&p.x_re);
        let ai = op.apply(&p.x_im);
        let (tr, ti) = (p.theta.re, p.theta.im);
        let (yr, yi) = (p.last_component.re, p.last_component.im);
        let mut sq = 0.0;
        for k in 0..l.len() {
            let re = ar[k] - (tr * p.x_re[k] - ti * p.x_im[k]) - h * yr * l[k];
            let im = ai[k] - (tr * p.x_im[k] + ti * p.x_re[k]) - h * yi * l[k];
            sq += re * re + im * im;
        }
        worst = worst.max(sq.sqrt());
    }
    worst
}

fn ritz_identity() -> Verdict {
    let mut pairs = 0;
    let mut worst = 0.0f64;
    for seed in 0..40u64 {
        let mut rng = rng(6000 + seed);
        let n = rng.gen_range(10..=200);
        let m = rng.gen_range(1..=30.min(n - 1));
        let inst = if seed % 2 == 0 {
            Instance::Sparse(random_sparse(&mut rng, n, 4))
        } else {
            Instance::Google(google(&random_graph(&mut rng, n, 5, 0.1), 0.9))
        };
        let op = inst.op();
        let q0 = random_vector(&mut rng, n);
        for d in [
            hessenberg_process(op, &q0, m).unwrap(),
            arnoldi_process(op, &q0, m, false).unwrap(),
        ] {
            let e = ritz_identity_error(op, &d) / op.frobenius_norm();
            ensure!(e <= 1e-11, "seed {seed} {}: {e:e}", d.kind);
            worst = worst.max(e);
            pairs += d.steps;
        }
    }

    let mut worst_full = 0.0f64;
    for seed in 0..40u64 {
        let mut rng = rng(6500 + seed);
        let n = rng.gen_range(2..=30);
        let a = random_dense(&mut rng, n, n);
        let q0 = random_vector(&mut rng, n);
        let oracle: Vec<Complex64> = DMatrix::from_fn(n, n, |i, j| a[(i, j)])
            .complex_eigenvalues()
            .iter()
            .map(|z| Complex64::new(z.re, z.im))
            .collect();
        for d in [
            hessenberg_process(&a, &q0, n).unwrap(),
            arnoldi_process(&a, &q0, n, false).unwrap(),
        ] {
            ensure!(
                d.steps == n,
                "seed {seed} {}: early breakdown at {}",
                d.kind,
                d.steps
            );
            let theta: Vec<Complex64> = hessenberg_eig(&d.h_square())
                .unwrap()
                .iter()
                .map(|p| p.value)
                .collect();
            let dist = eig_distance(&theta, &oracle).unwrap();
            ensure!(
                dist <= 1e-8,
                "seed {seed} n={n} {}: eigenvalue distance {dist:e}",
                d.kind
            );
            worst_full = worst_full.max(dist);
        }
    }
    Verdict::Pass(format!(
        "{pairs} Ritz pairs, worst residual/|A|_F {worst:.1e}; full runs worst eigenvalue gap {worst_full:.1e}"
    ))
}

// ---------------------------------------------------------------- 7, 8

fn slashdot_operator_source() -> Option<Arc<prnk_core::graph_io::TransitionMatrix>> {
    let path = slashdot()?;
    let g = load_graph(&path, None).expect("dataset loads");
    Some(Arc::new(build_transition(&g)))
}

fn run(
    t: &Arc<prnk_core::graph_io::TransitionMatrix>,
    method: Method,
    alpha: f64,
    m: usize,
    tol: f64,
) -> (usize, u64, bool) {
    let op = GoogleOperator::new(Arc::clone(t), alpha).unwrap();
    let cfg = SolveConfig::new(method, alpha).with_m(m).with_tol(tol);
    let r = solve(&op, &cfg).unwrap();
    (r.cycles, r.mvp, r.converged)
}

fn paper_counts() -> Verdict {
    let Some(t) = slashdot_operator_source() else {
        return Verdict::Skip(format!(
            "soc-Slashdot0902 not found in {}",
            data_dir().display()
        ));
    };
    let bands = [(0.85, 4, 2), (0.90, 4, 2), (0.95, 6, 2), (0.99, 11, 4)];
    let mut seen = Vec::new();
    for tol in [1e-7, 1e-8] {
        for (alpha, center, width) in bands {
            let (cycles, _, ok) = run(&t, Method::Hessenberg, alpha, 8, tol);
            seen.push(format!("{alpha}/{tol:e}:{cycles}"));
            ensure!(ok, "hessenberg alpha={alpha} tol={tol:e} did not converge");
            ensure!(
                cycles.abs_diff(center) <= width,
                "hessenberg alpha={alpha} tol={tol:e}: {cycles} cycles, expected {center}+-{width}"
            );
        }
    }
    let (_, mvp, ok) = run(&t, Method::Power, 0.85, 8, 1e-8);
    ensure!(
        ok && mvp.abs_diff(82) <= 5,
        "power alpha=0.85: {mvp} mvps, expected 82+-5"
    );
    Verdict::Pass(format!("cycles {}; power {mvp} mvps", seen.join(" ")))
}

fn trends() -> Verdict {
    let Some(t) = slashdot_operator_source() else {
        return Verdict::Skip(format!(
            "soc-Slashdot0902 not found in {}",
            data_dir().display()
        ));
    };
    let (_, power, _) = run(&t, Method::Power, 0.99, 8, 1e-8);
    let (_, qe, _) = run(&t, Method::QePower, 0.99, 8, 1e-8);
    let (_, hess, _) = run(&t, Method::Hessenberg, 0.99, 10, 1e-8);
    ensure!(
        (qe as f64) < 0.4 * power as f64,
        "qe-power {qe} vs power {power}"
    );
    ensure!(
        (hess as f64) < 0.15 * power as f64,
        "hessenberg {hess} vs power {power}"
    );

    let spec = BenchSpec {
        datasets: vec![slashdot().unwrap()],
        methods: vec![Method::Power],
        tols: vec![1e-8],
        ..BenchSpec::default()
    };
    let rows = run_bench(&spec, &[("soc-Slashdot0902".to_string(), t)]).unwrap();
    let mvps: Vec<u64> = rows.iter().map(|r| r.mvp).collect();
    ensure!(
        mvps.windows(2).all(|w| w[0] < w[1]),
        "power mvps not increasing in alpha: {mvps:?}"
    );
    Verdict::Pass(format!(
        "power {power}, qe-power {qe}, hessenberg(m=10) {hess}; power sweep {mvps:?}"
    ))
}

// ---------------------------------------------------------------- 9

fn quadratic_roots(h: &DenseMatrix) -> Vec<Complex64> {
    let tr = h[(0, 0)] + h[(1, 1)];
    let det = h[(0, 0)] * h[(1, 1)] - h[(0, 1)] * h[(1, 0)];
    let disc = Complex64::new(tr * tr / 4.0 - det, 0.0).sqrt();
    vec![tr / 2.0 + disc, tr / 2.0 - disc]
}

/// Roots of the monic cubic `x^3 + c2 x^2 + c1 x + c0` by Weierstrass
/// iteration followed by Newton polishing.
fn cubic_roots(c2: f64, c1: f64, c0: f64) -> Vec<Complex64> {
    let p = |z: Complex64| ((z + c2) * z + c1) * z + c0;
    let dp = |z: Complex64| (z * 3.0 + 2.0 * c2) * z + c1;
    let radius = 1.0 + c2.abs().max(c1.abs()).max(c0.abs());
    let w = Complex64::new(0.4, 0.9);
    let mut r: Vec<Complex64> = (0..3).map(|k| w.powu(k as u32 + 1) * radius).collect();
    for _ in 0..500 {
        for i in 0..3 {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..3 {
                if i != j {
                    den *= r[i] - r[j];
                }
            }
            let step = p(r[i]) / den;
            r[i] -= step;
        }
    }
    for z in &mut r {
        for _ in 0..3 {
            let d = dp(*z);
            if d.norm() > 0.0 {
                *z -= p(*z) / d;
            }
        }
    }
    r
}

fn small_kernels() -> Verdict {
    let mut rng = rng(9000);
    let mut worst_svd = 0.0f64;
    for _ in 0..1000 {
        let cols = rng.gen_range(1..=32);
        let rows = rng.gen_range(cols..=33);
        let m = random_dense(&mut rng, rows, cols);
        let d = svd(&m).unwrap();
        let mut us = d.u.clone();
        for (j, &s) in d.sigma.iter().enumerate() {
            us.col_mut(j).iter_mut().for_each(|x| *x *= s);
        }
        let e = us.matmul(&d.v.transpose()).sub(&m).frobenius() / m.frobenius();
        ensure!(
            e <= 1e-12,
            "svd {rows}x{cols}: relative reconstruction {e:e}"
        );
        worst_svd = worst_svd.max(e);
    }

    let mut worst_eig = 0.0f64;
    for k in 0..1000 {
        let (h, roots) = if k % 2 == 0 {
            let h = random_dense(&mut rng, 2, 2);
            let r = quadratic_roots(&h);
            (h, r)
        } else {
            let mut h = random_dense(&mut rng, 3, 3);
            h[(2, 0)] = 0.0;
            let g = |i, j| h[(i, j)];
            let tr = g(0, 0) + g(1, 1) + g(2, 2);
            let minors = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0) + g(0, 0) * g(2, 2)
                - g(0, 2) * g(2, 0)
                + g(1, 1) * g(2, 2)
                - g(1, 2) * g(2, 1);
            let det = g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1))
                - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
                + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0));
            let r = cubic_roots(-tr, minors, -det);
            (h, r)
        };
        let values: Vec<Complex64> = hessenberg_eig(&h)
            .unwrap()
            .iter()
            .map(|p| p.value)
            .collect();
        let dist = eig_distance(&values, &roots).unwrap();
        ensure!(dist <= 1e-10, "case {k}: eigenvalue gap {dist:e} for {h:?}");
        worst_eig = worst_eig.max(dist);
    }
    Verdict::Pass(format!(
        "1000 svds worst {worst_svd:.1e}; 1000 2x2/3x3 eigenproblems worst {worst_eig:.1e}"
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "oracle equivalence", oracle_equivalence),
        (2, "decomposition identity", decomposition_identity),
        (3, "pivot structure", pivot_structure),
        (4, "cycle residual identity", residual_identity),
        (5, "Arnoldi/Hessenberg QR relation", proposition_21),
        (6, "Ritz residual identity", ritz_identity),
        (7, "iteration counts on soc-Slashdot0902", paper_counts),
        (8, "mvp trends on soc-Slashdot0902", trends),
        (9, "small dense kernels", small_kernels),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for (id, name, check) in criteria {
        let start = Instant::now();
        let verdict = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Verdict::Fail(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match verdict {
            Verdict::Pass(d) => ("PASS", d),
            Verdict::Skip(d) => ("SKIP", d),
            Verdict::Fail(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {id} [{name}]: {tag} ({detail}) [{secs:.1}s]");
    }
    if failures > 0 {
        println!("acceptance: {failures} criteria failed");
        std::process::exit(1);
    }
}
