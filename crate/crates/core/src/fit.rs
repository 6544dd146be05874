//! Ordinary least squares for log-log slope estimation.

use crate::error::{param, Result};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
}

pub fn least_squares(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() || x.len() < 2 {
        return param("least squares needs at least two paired samples");
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
    }
    if sxx == 0.0 {
        return param("least squares abscissae are all equal");
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss = 0.0;
    for (a, b) in x.iter().zip(y) {
        let r = b - (intercept + slope * a);
        ss += r * r;
    }
    Ok(LineFit {
        slope,
        intercept,
        residual: math::sqrt(ss / n),
    })
}

/// Fit `log y = slope · log x + c`; all inputs must be positive.
pub fn log_log(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.iter().chain(y).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return param("log-log fit needs positive finite data");
    }
    let lx: alloc::vec::Vec<f64> = x.iter().map(|v| math::ln(*v)).collect();
    let ly: alloc::vec::Vec<f64> = y.iter().map(|v| math::ln(*v)).collect();
    least_squares(&lx, &ly)
}
