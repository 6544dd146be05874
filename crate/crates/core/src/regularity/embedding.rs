use alloc::format;
use alloc::vec::Vec;

use crate::diffops::{delta_h, discrete_gradient, heat_hessian_norm, heat_time_derivative, Translation};
use crate::error::{param, Result};
use crate::fit::{log_log, LineFit};
use crate::grid::{Grid, GridFunction, TestFunction};
use crate::math;
use crate::report::{ReportRow, VerificationReport};
use crate::seminorms::{besov2_sup, dyadic_h_grid};

/// The quantities of the `B^{α,p}_∞ ↪ W^{1,p}` estimate for one function.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTerms {
    pub alpha: f64,
    /// `‖∇ψ‖_{L^p}`.
    pub gradient: f64,
    /// `‖ψ‖_{L^p}`.
    pub lp: f64,
    /// `[ψ]_{B^{α,p}_∞}`.
    pub besov: f64,
    /// `sup_h ‖δ_h∇ψ / |h|^{α-1}‖_{L^p}`.
    pub gradient_difference: f64,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return param(format!("embedding order must lie in (1,2), got {alpha}"));
    }
    Ok(())
}

fn norm_p(values: &[f64], p: f64, w: f64) -> f64 {
    math::pow(values.iter().map(|v| math::abs_pow(*v, p)).sum::<f64>() * w, 1.0 / p)
}

fn steps(grid: &Grid) -> Vec<Translation> {
    dyadic_h_grid(grid, 0.5)
}

pub fn embedding_terms(psi: &TestFunction, alpha: f64, p: f64, grid: &Grid) -> Result<EmbeddingTerms> {
    check_alpha(alpha)?;
    let u = GridFunction::exact(psi, grid)?;
    let all: Vec<usize> = (0..grid.len()).collect();
    let grad = discrete_gradient(&u);
    let hs = steps(grid);
    let besov = besov2_sup(&u, alpha, p, &hs)?.value;
    let mut gd: f64 = 0.0;
    for h in &hs {
        let mut acc = vec_zeros(grid.len());
        for axis in 0..grid.dim() {
            let d = delta_h(&grad.component(axis)?, *h)?;
            for (a, v) in acc.iter_mut().zip(d.values()) {
                *a += v * v;
            }
        }
        let n: Vec<f64> = acc.iter().map(|v| math::sqrt(*v)).collect();
        gd = gd.max(norm_p(&n, p, grid.cell_weight()) / math::pow(h.magnitude(), alpha - 1.0));
    }
    Ok(EmbeddingTerms {
        alpha,
        gradient: math::pow(grad.lp_pow(&all, p), 1.0 / p),
        lp: math::pow(u.lp_pow(&all, p), 1.0 / p),
        besov,
        gradient_difference: gd,
    })
}

fn vec_zeros(n: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(n);
    v.resize(n, 0.0);
    v
}

/// Measured decay of `‖D²ψ_t‖_{L^p}` in `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatDecay {
    pub alpha: f64,
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub fit: LineFit,
    /// `(α - 2)/2`.
    pub target: f64,
    pub relative_error: f64,
}

pub fn heat_decay(psi: &TestFunction, alpha: f64, p: f64, grid: &Grid, times: &[f64]) -> Result<HeatDecay> {
    check_alpha(alpha)?;
    if times.len() < 2 {
        return param("heat decay fit needs at least two times");
    }
    let u = GridFunction::exact(psi, grid)?;
    let mut norms = Vec::with_capacity(times.len());
    for &t in times {
        norms.push(norm_p(&heat_hessian_norm(&u, t)?, p, grid.cell_weight()));
    }
    let fit = log_log(times, &norms)?;
    let target = 0.5 * (alpha - 2.0);
    Ok(HeatDecay {
        alpha,
        times: times.to_vec(),
        norms,
        relative_error: math::abs(fit.slope - target) / math::abs(target),
        fit,
        target,
    })
}

/// `[ψ]_{B^{2-ε,p}_∞}` for each `ε`.
pub fn besov_trend(psi: &TestFunction, p: f64, grid: &Grid, eps: &[f64]) -> Result<Vec<(f64, f64)>> {
    let u = GridFunction::exact(psi, grid)?;
    let hs = steps(grid);
    let mut out = Vec::with_capacity(eps.len());
    for &e in eps {
        out.push((e, besov2_sup(&u, 2.0 - e, p, &hs)?.value));
    }
    Ok(out)
}

/// Fits one constant per `α` in `‖∇ψ‖ ≤ C(‖ψ‖ + [ψ]_B/(α-1))` over the
/// corpus and requires the spread across `α` below 3; the first-difference
/// bound on `∇ψ` and the time-derivative bound are reported as ratios; the
/// Hessian decay exponent is fitted on each `(α, ψ)` in `matched`, whose
/// sharp Besov order should be `α`, and must lie within 15% of `(α-2)/2`.
pub fn verify_besov_embedding(
    corpus: &[TestFunction],
    alphas: &[f64],
    p: f64,
    grid: &Grid,
    matched: &[(f64, TestFunction)],
    times: &[f64],
) -> Result<VerificationReport> {
    if corpus.is_empty() || alphas.is_empty() {
        return param("embedding check needs a corpus and at least one order");
    }
    let mut report = VerificationReport::new("embedding");
    let mut fitted = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let mut c: f64 = 0.0;
        for psi in corpus {
            let e = embedding_terms(psi, alpha, p, grid)?;
            let rhs = e.lp + e.besov / (alpha - 1.0);
            report.push(ReportRow::new(format!("embedding:alpha={alpha}:{}", psi.tag()), 0.0, e.gradient, rhs));
            c = c.max(e.gradient / rhs);
            report.push(ReportRow::new(
                format!("gradient_difference:alpha={alpha}:{}", psi.tag()),
                0.0,
                e.gradient_difference,
                e.besov / ((2.0 - alpha) * (alpha - 1.0)),
            ));
            let u = GridFunction::exact(psi, grid)?;
            for &t in times {
                let dt = norm_p(&heat_time_derivative(&u, 0.5 * t)?, p, grid.cell_weight());
                report.push(ReportRow::new(
                    format!("time_derivative:alpha={alpha}:{}:t={t}", psi.tag()),
                    t,
                    dt,
                    e.besov * math::pow(t, 0.5 * alpha - 1.0),
                ));
            }
        }
        report.fit(format!("C_alpha={alpha}"), c);
        fitted.push(c);
    }
    let hi = fitted.iter().fold(0.0f64, |m, c| m.max(*c));
    let lo = fitted.iter().fold(f64::INFINITY, |m, c| m.min(*c));
    let spread = hi / lo;
    report.fit("C_shared", hi);
    report.fit("spread", spread);
    report.push(ReportRow::new("spread", 0.0, spread, 3.0).with_pass(spread < 3.0));
    if !(spread < 3.0) {
        report.fail(format!("fitted constant spread {spread} ≥ 3"));
    }
    for (alpha, psi) in matched {
        let d = heat_decay(psi, *alpha, p, grid, times)?;
        report.fit(format!("decay_slope:alpha={alpha}"), d.fit.slope);
        let ok = d.relative_error <= 0.15;
        report.push(
            ReportRow::new(format!("heat_decay:alpha={alpha}:{}", psi.tag()), 0.0, d.relative_error, 0.15)
                .with_pass(ok),
        );
        if !ok {
            report.fail(format!("decay slope {} vs target {} at α={alpha}", d.fit.slope, d.target));
        }
    }
    report.set_worst("spread", spread);
    Ok(report)
}
