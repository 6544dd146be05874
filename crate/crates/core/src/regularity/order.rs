use alloc::format;
use alloc::vec::Vec;

use crate::diffops::{delta_h, discrete_gradient, Translation};
use crate::error::{param, Error, Result};
use crate::fit::{log_log, LineFit};
use crate::grid::{Ball, GridFunction};
use crate::math;

/// Measured Nikol'skii order on one ball.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport {
    pub ball: Ball,
    pub h: Vec<f64>,
    /// `‖δ_h u‖_{L^p(ball)}` per step.
    pub norms: Vec<f64>,
    pub fit: LineFit,
    /// `min(slope, 1)`.
    pub tau_hat: f64,
    /// True when the raw slope reached the first-difference ceiling.
    pub capped: bool,
    /// Slope of the same fit applied to `|∇u|`.
    pub gradient_fit: Option<LineFit>,
    pub predicted: Option<f64>,
    pub verdict: Option<bool>,
}

impl RegularityReport {
    /// Compares `τ̂` with `min(prediction, ceiling)`.
    pub fn judge(&mut self, prediction: f64, ceiling: f64, tol: f64) -> bool {
        let target = prediction.min(ceiling);
        let ok = math::abs(self.tau_hat - target) <= tol;
        self.predicted = Some(prediction);
        self.verdict = Some(ok);
        ok
    }
}

fn slope_of(values: &[f64], hs: &[f64]) -> Result<LineFit> {
    if values.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::Domain(format!("difference norms must be positive for a log fit, got {values:?}")));
    }
    log_log(hs, values)
}

/// Least-squares slope of `log ‖δ_h u‖_{L^p(ball)}` against `log |h|`, with a
/// second pass on the discrete gradient.
pub fn estimate_order(
    u: &GridFunction,
    ball: &Ball,
    p: f64,
    h_set: &[Translation],
) -> Result<RegularityReport> {
    if h_set.len() < 4 {
        return param(format!("order estimation needs at least 4 step sizes, got {}", h_set.len()));
    }
    let g = *u.grid();
    let mut dist = f64::INFINITY;
    for j in 0..g.dim() {
        dist = dist.min(g.half_width() - math::abs(ball.center[j]) - ball.radius);
    }
    if !(dist > 0.0) {
        return Err(Error::Domain(alloc::string::String::from("ball leaves the box")));
    }
    if let Some(h) = h_set.iter().find(|h| !(h.magnitude() < 0.5 * dist)) {
        return param(format!(
            "step |h| = {} must stay below half the distance to the box boundary ({})",
            h.magnitude(),
            0.5 * dist
        ));
    }
    let nodes = g.restrict(ball);
    let hs: Vec<f64> = h_set.iter().map(|h| h.magnitude()).collect();
    let mut norms = Vec::with_capacity(hs.len());
    for h in h_set {
        norms.push(math::pow(delta_h(u, *h)?.lp_pow(&nodes, p), 1.0 / p));
    }
    let fit = slope_of(&norms, &hs)?;
    let grad = discrete_gradient(u);
    let mut gnorms = Vec::with_capacity(hs.len());
    for h in h_set {
        let mut shifted = Vec::new();
        for axis in 0..g.dim() {
            shifted.push(delta_h(&grad.component(axis)?, *h)?);
        }
        let s: f64 = nodes
            .iter()
            .map(|&i| {
                let v: f64 = shifted.iter().map(|c| c.values()[i] * c.values()[i]).sum();
                math::abs_pow(math::sqrt(v), p)
            })
            .sum::<f64>()
            * g.cell_weight();
        gnorms.push(math::pow(s, 1.0 / p));
    }
    let gradient_fit = if gnorms.iter().all(|v| *v > 0.0) { Some(log_log(&hs, &gnorms)?) } else { None };
    Ok(RegularityReport {
        ball: *ball,
        h: hs,
        norms,
        tau_hat: fit.slope.min(1.0),
        capped: fit.slope >= 1.0 - 1e-9,
        fit,
        gradient_fit,
        predicted: None,
        verdict: None,
    })
}
