use alloc::format;
use alloc::vec::Vec;

use crate::error::{param, Result};
use crate::kernel::FractionalParams;
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `t + sp ≤ p - 1`: fractional orders `τ < κ` for `u`.
    CaseI,
    /// `t + sp > p - 1`: `u ∈ W^{1,p}_loc` and `∇u` has orders `τ < Γ - 1`.
    CaseII,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::CaseI => "case_i",
            Regime::CaseII => "case_ii",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityScheme {
    pub params: FractionalParams,
    /// `(t + sp)/(p - 1)`, the limit of the γ sequence.
    pub kappa: f64,
    /// `(1 + t + sp)/p`.
    pub gamma_big: f64,
    pub regime: Regime,
    /// `γ_0 = s, γ_{i+1} = (γ_i + t + sp)/p`, `i0 + 2` terms.
    pub gammas: Vec<f64>,
    pub i0: usize,
    pub tau: f64,
    /// Case ii with `γ_{i0} = 1` exactly (within `1e-12` in the index test).
    pub borderline: bool,
    /// Order of the extra stage used in the borderline case.
    pub rectified_beta: Option<f64>,
}

impl RegularityScheme {
    /// Upper end of the admissible target range: `κ` in case i, `Γ - 1`
    /// (gradient order) in case ii.
    pub fn tau_limit(&self) -> f64 {
        match self.regime {
            Regime::CaseI => self.kappa,
            Regime::CaseII => self.gamma_big - 1.0,
        }
    }
}

/// `γ_i = s/p^i + κ(1 - 1/p^i)`.
pub fn gamma_closed_form(params: &FractionalParams, i: usize) -> f64 {
    let kappa = (params.t + params.sp()) / (params.p - 1.0);
    let q = math::powi(params.p, -(i as i32));
    params.s * q + kappa * (1.0 - q)
}

/// Builds the exponent scheme. `tau` is the target order: in case i it must
/// lie in `[s, κ)` (default `(s + κ)/2`); in case ii it is the gradient order
/// in `(0, Γ - 1)` (default `(Γ - 1)/2`) and does not affect `i0`.
pub fn classify_regime(params: &FractionalParams, tau: Option<f64>) -> Result<RegularityScheme> {
    let (s, p, t) = (params.s, params.p, params.t);
    let sp = params.sp();
    let kappa = (t + sp) / (p - 1.0);
    let gamma_big = (1.0 + t + sp) / p;
    let regime = if t + sp <= p - 1.0 { Regime::CaseI } else { Regime::CaseII };
    let lnp = math::ln(p);
    let (i0, tau, borderline) = match regime {
        Regime::CaseI => {
            let tau = tau.unwrap_or(0.5 * (s + kappa));
            if !(tau >= s && tau < kappa) {
                return param(format!("τ must lie in [s, κ) = [{s}, {kappa}), got {tau}"));
            }
            let x = (math::ln(kappa - s) - math::ln(kappa - tau)) / lnp;
            // smallest integer strictly above x
            let mut i = math::ceil(x) as usize;
            if (i as f64) <= x {
                i += 1;
            }
            (i.max(1), tau, false)
        }
        Regime::CaseII => {
            let tau = tau.unwrap_or(0.5 * (gamma_big - 1.0));
            if !(tau > 0.0 && tau < gamma_big - 1.0) {
                return param(format!(
                    "gradient order τ must lie in (0, Γ-1) = (0, {}), got {tau}",
                    gamma_big - 1.0
                ));
            }
            let x = (math::ln(kappa - s) - math::ln(kappa - 1.0)) / lnp;
            let near = math::round(x);
            if math::abs(x - near) <= 1e-12 {
                (near.max(1.0) as usize, tau, true)
            } else {
                ((math::ceil(x) as usize).max(1), tau, false)
            }
        }
    };
    let mut gammas = Vec::with_capacity(i0 + 2);
    gammas.push(s);
    for _ in 0..i0 + 1 {
        let last = *gammas.last().unwrap();
        gammas.push((last + t + sp) / p);
    }
    let rectified_beta = if borderline {
        // any β in (p - t - sp, 1) lifts the next order strictly above one
        Some(0.5 * (p - t - sp + 1.0))
    } else {
        None
    };
    Ok(RegularityScheme {
        params: *params,
        kappa,
        gamma_big,
        regime,
        gammas,
        i0,
        tau,
        borderline,
        rectified_beta,
    })
}

/// One-step regime `t + s(p+1) ≥ ℓ₀` with `ℓ₀ > p`.
pub fn robust_constant_regime(params: &FractionalParams, ell0: f64) -> Result<bool> {
    if !(ell0 > params.p) {
        return param(format!("ℓ₀ must exceed p = {}, got {ell0}", params.p));
    }
    Ok(params.t + params.s * (params.p + 1.0) >= ell0)
}
