use std::time::Instant;

use super::{
    direct_residual, finalize_vector, BreakdownEvent, CycleCheck, CycleSnapshot, Method,
    SolveConfig, SolveReport,
};
use crate::dense_small::{smallest_singular_triplet, DenseMatrix};
use crate::error::{Error, Result};
use crate::krylov::{arnoldi_process, hessenberg_process, KrylovDecomposition, ProcessKind};
use crate::operator::kernels::{axpy, norm1, norm2, norm_inf_with_argmax};
use crate::operator::{Counted, LinearOperator, WorkCounter};

fn scale_by_max(q: &mut [f64]) -> Result<()> {
    let (_, peak) = norm_inf_with_argmax(q)?;
    if peak == 0.0 {
        return Err(Error::ZeroVector);
    }
    q.iter_mut().for_each(|v| *v /= peak);
    Ok(())
}

fn combine(basis: &DenseMatrix, coeffs: &[f64], scale: f64) -> Vec<f64> {
    let mut out = vec![0.0; basis.rows()];
    for (j, &c) in coeffs.iter().enumerate() {
        axpy(scale * c, basis.col(j), &mut out);
    }
    out
}

/// Refined restarted Krylov PageRank.
///
/// Each cycle builds a `k`-step decomposition from `q0`, takes the smallest
/// singular triplet `(sigma, u, v)` of `Hbar_k - [I; 0]` and forms
/// `q = L_k v`, `r = sigma L_{k+1} u`; `r` equals `A q - q`, so the cycle stops
/// once `||r||_1 / ||q||_1 < tol`.
pub fn refined_krylov_pagerank<O: LinearOperator + ?Sized>(
    op: &O,
    cfg: &SolveConfig,
    process: ProcessKind,
) -> Result<SolveReport> {
    cfg.validate()?;
    if cfg.m < 2 {
        return Err(Error::InvalidParameter(format!(
            "m must be at least 2, got {}",
            cfg.m
        )));
    }
    let n = op.dim();
    let m = cfg.m.min(n);
    let mut report = SolveReport::empty(cfg);
    report.method = match process {
        ProcessKind::Hessenberg => Method::Hessenberg,
        ProcessKind::Arnoldi => Method::Arnoldi,
    };
    report.m = Some(cfg.m);

    let counter = WorkCounter::new();
    let counted = Counted::new(op, &counter);
    let start = Instant::now();

    let mut q0 = cfg.initial.materialize(n)?;
    scale_by_max(&mut q0)?;
    let mut result: Option<Vec<f64>> = None;

    while counter.mvp() + m as u64 <= cfg.max_mvp {
        report.cycles += 1;
        let cycle = report.cycles;
        let decomp: KrylovDecomposition = match process {
            ProcessKind::Hessenberg => hessenberg_process(&counted, &q0, m)?,
            ProcessKind::Arnoldi => arnoldi_process(&counted, &q0, m, false)?,
        };

        if let Some(step) = decomp.breakdown_at {
            if step < n {
                report.breakdowns.push(BreakdownEvent { cycle, step });
                let (_, res) = direct_residual(op, &q0)?;
                report.verification_mvp += 1;
                if res < cfg.tol {
                    report.residual_history.push(res);
                    report.converged = true;
                    result = Some(q0.clone());
                    break;
                }
                if step == 1 {
                    return Err(Error::DegenerateStart { residual: res });
                }
            }
        }

        let k = decomp.steps;
        let shifted = decomp.hbar.sub(&DenseMatrix::eye(k + 1, k));
        let triplet = smallest_singular_triplet(&shifted)?;
        let q = combine(&decomp.basis, &triplet.v, 1.0);
        let r = combine(&decomp.basis, &triplet.u, triplet.sigma);
        let qn = norm1(&q);
        let res = norm1(&r) / qn;
        report.residual_history.push(res);

        if cfg.verify_cycles {
            let (direct, _) = direct_residual(op, &q)?;
            report.verification_mvp += 1;
            let gap: f64 = direct.iter().zip(&r).map(|(a, b)| (a - b).abs()).sum();
            let lu = combine(&decomp.basis, &triplet.u, 1.0);
            report.cycle_checks.push(CycleCheck {
                cycle,
                sigma: triplet.sigma,
                formula_residual: res,
                identity_error: gap / qn,
                r_norm2: norm2(&r),
                basis_u_norm2: norm2(&lu),
            });
        }
        report.last_cycle = Some(CycleSnapshot {
            q: q.clone(),
            sigma: triplet.sigma,
            r,
        });

        if res < cfg.tol {
            report.converged = true;
            result = Some(q);
            break;
        }
        q0 = q;
        if !cfg.raw_restart {
            scale_by_max(&mut q0)?;
        }
    }

    report.mvp = counter.mvp();
    report.wall_time = start.elapsed();
    let mut x = result.unwrap_or(q0);
    report.min_entry_before_clamp = finalize_vector(&mut x)?;
    let (_, res) = direct_residual(op, &x)?;
    report.verification_mvp += 1;
    report.final_residual = res;
    report.x = x;
    Ok(report)
}

/// `||(A q - q) - r||_1 / ||q||_1` for the last cycle of a Krylov report.
pub fn verify_report<O: LinearOperator + ?Sized>(op: &O, report: &SolveReport) -> Result<f64> {
    let snap = report
        .last_cycle
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("report carries no Krylov cycle".into()))?;
    let (direct, _) = direct_residual(op, &snap.q)?;
    let gap: f64 = direct.iter().zip(&snap.r).map(|(a, b)| (a - b).abs()).sum();
    Ok(gap / norm1(&snap.q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_io::{build_transition, Graph};
    use crate::operator::GoogleOperator;
    use std::sync::Arc;

    fn google(n: usize, edges: &[(u32, u32)], alpha: f64) -> GoogleOperator {
        let g = Graph::from_edges(n, edges.to_vec(), None).unwrap();
        GoogleOperator::new(Arc::new(build_transition(&g)), alpha).unwrap()
    }

    #[test]
    fn three_cycle_breaks_down_on_uniform_start() {
        let op = google(3, &[(0, 1), (1, 2), (2, 0)], 0.85);
        for process in [ProcessKind::Hessenberg, ProcessKind::Arnoldi] {
            let cfg = SolveConfig::new(Method::Hessenberg, 0.85).with_m(4);
            let r = refined_krylov_pagerank(&op, &cfg, process).unwrap();
            assert!(r.converged);
            assert_eq!(r.cycles, 1);
            assert_eq!(r.breakdowns, vec![BreakdownEvent { cycle: 1, step: 1 }]);
            assert!(r.x.iter().all(|&v| (v - 1.0 / 3.0).abs() < 1e-15));
            assert_eq!(r.final_residual, 0.0);
        }
    }

    #[test]
    fn dangling_pair_in_one_cycle() {
        let op = google(2, &[(0, 1)], 0.85);
        for process in [ProcessKind::Hessenberg, ProcessKind::Arnoldi] {
            let cfg = SolveConfig::new(Method::Hessenberg, 0.85)
                .with_m(2)
                .with_verify_cycles(true);
            let r = refined_krylov_pagerank(&op, &cfg, process).unwrap();
            assert!(r.converged, "{process}");
            assert_eq!(r.cycles, 1);
            assert_eq!(r.mvp, 2);
            assert!((r.x[0] - 1.0 / 2.85).abs() < 1e-14);
            assert!((r.x[1] - 1.85 / 2.85).abs() < 1e-14);
            assert!(verify_report(&op, &r).unwrap() <= 1e-12);
            assert!(r.cycle_checks[0].identity_error <= 1e-12);
        }
    }

    #[test]
    fn mvp_is_cycles_times_m() {
        let edges: Vec<(u32, u32)> = (0..40u32)
            .flat_map(|i| [(i, (i * 7 + 3) % 40), (i, (i * 13 + 1) % 40)])
            .chain([(5, 5)])
            .filter(|&(s, _)| s % 9 != 4)
            .collect();
        let op = google(40, &edges, 0.95);
        for process in [ProcessKind::Hessenberg, ProcessKind::Arnoldi] {
            let cfg = SolveConfig::new(Method::Hessenberg, 0.95)
                .with_m(4)
                .with_tol(1e-10)
                .with_verify_cycles(true);
            let r = refined_krylov_pagerank(&op, &cfg, process).unwrap();
            assert!(r.converged);
            assert!(r.breakdowns.is_empty());
            assert_eq!(r.mvp, 4 * r.cycles as u64);
            assert_eq!(r.verification_mvp, r.cycles as u64 + 1);
            assert!(r.final_residual < 1e-10);
            for c in &r.cycle_checks {
                assert!(c.identity_error <= 1e-12, "{process}: {c:?}");
            }
        }
    }

    #[test]
    fn budget_exhaustion() {
        let op = google(3, &[(0, 1), (1, 2), (2, 0), (0, 2)], 0.85);
        let cfg = SolveConfig::new(Method::Hessenberg, 0.85)
            .with_m(2)
            .with_tol(1e-300)
            .with_max_mvp(5);
        let r = refined_krylov_pagerank(&op, &cfg, ProcessKind::Hessenberg).unwrap();
        assert!(!r.converged);
        assert_eq!(r.mvp, 4);
        assert!((r.x.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eigenvector_of_other_eigenvalue_is_degenerate() {
        // [1, -1] spans the eigenspace of -0.425
        let op = google(2, &[(0, 1)], 0.85);
        let cfg = SolveConfig::new(Method::Hessenberg, 0.85)
            .with_m(2)
            .with_initial(super::super::InitialVector::Given(vec![1.0, -1.0]));
        let err = refined_krylov_pagerank(&op, &cfg, ProcessKind::Hessenberg).unwrap_err();
        match err {
            Error::DegenerateStart { residual } => assert!((residual - 1.425).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }
}
