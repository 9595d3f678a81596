use std::collections::VecDeque;
use std::time::Instant;

use super::{direct_residual, finalize_vector, Method, SolveConfig, SolveReport};
use crate::error::{Error, Result};
use crate::operator::kernels::{dot, norm1, norm2};
use crate::operator::{Counted, LinearOperator, WorkCounter};

/// Rank test for the two-column least-squares problem.
const QE_RANK_RTOL: f64 = 1e-12;

enum Extrapolation {
    None,
    Linear { period: usize, coefficient: f64 },
    Quadratic { period: usize },
}

pub fn power<O: LinearOperator + ?Sized>(op: &O, cfg: &SolveConfig) -> Result<SolveReport> {
    run(op, cfg, Method::Power, Extrapolation::None)
}

/// Power iteration with `x <- x_k + alpha/(1-alpha) (x_k - x_{k-1})` applied
/// every `period` steps.
pub fn power_linear_extrapolation<O: LinearOperator + ?Sized>(
    op: &O,
    cfg: &SolveConfig,
) -> Result<SolveReport> {
    cfg.validate()?;
    let period = cfg.period.unwrap_or(10);
    let coefficient = cfg.alpha / (1.0 - cfg.alpha);
    run(
        op,
        cfg,
        Method::PowerTan,
        Extrapolation::Linear {
            period,
            coefficient,
        },
    )
}

/// Power iteration with quadratic extrapolation over the last four iterates
/// every `period` steps.
pub fn power_quadratic_extrapolation<O: LinearOperator + ?Sized>(
    op: &O,
    cfg: &SolveConfig,
) -> Result<SolveReport> {
    cfg.validate()?;
    let period = cfg.period.unwrap_or(5);
    if period < 4 {
        return Err(Error::InvalidParameter(format!(
            "quadratic extrapolation needs period >= 4, got {period}"
        )));
    }
    run(
        op,
        cfg,
        Method::QePower,
        Extrapolation::Quadratic { period },
    )
}

fn normalize_nonneg(x: &mut [f64]) -> Result<()> {
    for v in x.iter_mut() {
        *v = v.max(0.0);
    }
    let s = norm1(x);
    if s == 0.0 {
        return Err(Error::ZeroVector);
    }
    x.iter_mut().for_each(|v| *v /= s);
    Ok(())
}

fn run<O: LinearOperator + ?Sized>(
    op: &O,
    cfg: &SolveConfig,
    method: Method,
    extrapolation: Extrapolation,
) -> Result<SolveReport> {
    cfg.validate()?;
    let n = op.dim();
    let mut report = SolveReport::empty(cfg);
    report.method = method;
    report.m = None;

    let counter = WorkCounter::new();
    let counted = Counted::new(op, &counter);
    let start = Instant::now();

    let mut x = cfg.initial.materialize(n)?;
    let s = norm1(&x);
    x.iter_mut().for_each(|v| *v /= s);

    // Consecutive plain iterates, oldest first.
    let mut window: VecDeque<Vec<f64>> = VecDeque::with_capacity(4);
    window.push_back(x.clone());
    let mut y = vec![0.0; n];
    let mut last_check = f64::NAN;

    while counter.mvp() < cfg.max_mvp {
        counted.apply_into(&x, &mut y);
        let s = norm1(&y);
        if s == 0.0 || !s.is_finite() {
            return Err(Error::ZeroVector);
        }
        y.iter_mut().for_each(|v| *v /= s);
        let diff: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).sum::<f64>() / norm1(&y);
        report.residual_history.push(diff);
        std::mem::swap(&mut x, &mut y);
        report.cycles += 1;

        if window.len() == 4 {
            window.pop_front();
        }
        window.push_back(x.clone());

        if diff < cfg.tol {
            let (_, res) = direct_residual(op, &x)?;
            report.verification_mvp += 1;
            last_check = res;
            if res < cfg.tol {
                report.converged = true;
                break;
            }
        }

        let k = report.cycles;
        let extrapolated = match extrapolation {
            Extrapolation::None => false,
            Extrapolation::Linear {
                period,
                coefficient,
            } if k.is_multiple_of(period) => {
                // y holds x_{k-1} after the swap
                linear_step(&mut x, &y, coefficient)?;
                true
            }
            Extrapolation::Quadratic { period }
                if k.is_multiple_of(period) && window.len() == 4 =>
            {
                quadratic_step(&window, cfg.tol).map(|z| x = z).is_some()
            }
            _ => false,
        };
        if extrapolated {
            window.clear();
            window.push_back(x.clone());
        }
    }

    report.mvp = counter.mvp();
    report.wall_time = start.elapsed();
    if !report.converged {
        let (_, res) = direct_residual(op, &x)?;
        report.verification_mvp += 1;
        last_check = res;
    }
    report.min_entry_before_clamp = finalize_vector(&mut x)?;
    report.final_residual = last_check;
    report.x = x;
    Ok(report)
}

fn linear_step(x: &mut [f64], prev: &[f64], coefficient: f64) -> Result<()> {
    for (xi, &p) in x.iter_mut().zip(prev) {
        *xi += coefficient * (*xi - p);
    }
    normalize_nonneg(x)
}

/// Quadratic extrapolation from `x_{k-3}, ..., x_k`; `None` when skipped.
fn quadratic_step(window: &VecDeque<Vec<f64>>, tol: f64) -> Option<Vec<f64>> {
    let base = &window[0];
    let diff = |j: usize| -> Vec<f64> { window[j].iter().zip(base).map(|(a, b)| a - b).collect() };
    let (y1, y2, y3) = (diff(1), diff(2), diff(3));
    if norm1(&y3) < tol {
        return None;
    }

    // Modified Gram–Schmidt QR of [y1 y2], then solve R gamma = -Q^T y3.
    let r11 = norm2(&y1);
    if r11 == 0.0 {
        return None;
    }
    let q1: Vec<f64> = y1.iter().map(|v| v / r11).collect();
    let r12 = dot(&q1, &y2);
    let w: Vec<f64> = y2.iter().zip(&q1).map(|(a, b)| a - r12 * b).collect();
    let r22 = norm2(&w);
    let (g1, g2) = if r22 <= QE_RANK_RTOL * norm2(&y2) {
        (-dot(&q1, &y3) / r11, 0.0)
    } else {
        let q2: Vec<f64> = w.iter().map(|v| v / r22).collect();
        let c1 = -dot(&q1, &y3);
        let c2 = -dot(&q2, &y3);
        let g2 = c2 / r22;
        ((c1 - r12 * g2) / r11, g2)
    };

    let b0 = g1 + g2 + 1.0;
    let b1 = g2 + 1.0;
    let b2 = 1.0;
    let mut x: Vec<f64> = (0..base.len())
        .map(|i| b0 * window[1][i] + b1 * window[2][i] + b2 * window[3][i])
        .collect();
    normalize_nonneg(&mut x).ok()?;
    Some(x)
}
