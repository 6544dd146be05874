use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::diffops::{delta_h, discrete_gradient, Cutoff, Translation};
use crate::error::{param, Error, Result};
use crate::grid::{Ball, GridFunction, Point};
use crate::kernel::{conjugate, FractionalParams};
use crate::math;
use crate::report::{ReportRow, VerificationReport};
use crate::seminorms::{
    besov2_sup, dyadic_steps, gagliardo, lp_norm, nikolskii_sup, x_bracket, y_bracket, y_h_grid,
};

use super::scheme::{classify_regime, RegularityScheme};

/// Concentric balls `B_r ⋐ B_R ⋐ Ω` for the local estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalSetup {
    pub omega: Ball,
    pub r: f64,
    pub big_r: f64,
}

impl LocalSetup {
    pub fn new(omega: Ball, r: f64, big_r: f64) -> Result<Self> {
        if !(r > 0.0 && r < big_r && big_r < omega.radius) {
            return param(format!("need 0 < r < R < radius of Ω, got r={r}, R={big_r}"));
        }
        Ok(LocalSetup { omega, r, big_r })
    }

    pub fn center(&self) -> Point {
        self.omega.center
    }

    pub fn ball(&self, radius: f64) -> Ball {
        Ball { center: self.omega.center, radius }
    }

    /// `¼ min{dist(B_R, ∂Ω), R - r, 1}`; admissible steps satisfy `|h| < h₀`.
    pub fn h0_cap(&self) -> f64 {
        0.25 * (self.omega.radius - self.big_r).min(self.big_r - self.r).min(1.0)
    }

    fn cutoff(&self, dim: usize) -> Result<Cutoff> {
        Cutoff::new(self.omega.center, self.r, self.big_r, dim)
    }
}

fn check_steps(h_set: &[Translation], h0: f64) -> Result<()> {
    if h_set.is_empty() {
        return param("need at least one step size");
    }
    if let Some(h) = h_set.iter().find(|h| !(h.magnitude() > 0.0 && h.magnitude() < h0)) {
        return param(format!("step |h| = {} violates 0 < |h| < h₀ = {h0}", h.magnitude()));
    }
    Ok(())
}

fn check_gamma(gamma: f64, s: f64) -> Result<()> {
    if !(gamma >= s && gamma <= 1.0) {
        return param(format!("γ must lie in [s, 1] = [{s}, 1], got {gamma}"));
    }
    Ok(())
}

/// `[δ_h(uη)/|h|^{(γ+t)/p}]^p_{W^{s,p}(B)}`.
fn cutoff_difference(
    ueta: &GridFunction,
    ball: &Ball,
    h: Translation,
    gamma: f64,
    params: &FractionalParams,
) -> Result<f64> {
    let d = delta_h(ueta, h)?;
    Ok(gagliardo(&d, ball, params.s, params.p)?.raised / math::pow(h.magnitude(), gamma + params.t))
}

/// `ℳ_γ = sup_h [δ_h(uη)/|h|^{(γ+t)/p}]^p_{W^{s,p}(B_R)}` over `h_set`.
pub fn m_gamma(
    u: &GridFunction,
    setup: &LocalSetup,
    gamma: f64,
    params: &FractionalParams,
    h_set: &[Translation],
) -> Result<f64> {
    let eta = setup.cutoff(u.dim())?.sample(u.grid())?;
    let ueta = u.times_compact(&eta)?;
    let ball = setup.ball(setup.big_r);
    let mut best: f64 = 0.0;
    for h in h_set {
        best = best.max(cutoff_difference(&ueta, &ball, *h, gamma, params)?);
    }
    Ok(best)
}

/// Ratio check of the Caccioppoli-type scheme: per step `h`, the cut-off
/// difference quotient seminorm against the five data terms with the
/// constant removed. `f` enters through `δ_h f`.
pub fn verify_caccioppoli(
    u: &GridFunction,
    f: &GridFunction,
    setup: &LocalSetup,
    gamma: f64,
    params: &FractionalParams,
    h_set: &[Translation],
) -> Result<VerificationReport> {
    let (s, p, t) = (params.s, params.p, params.t);
    check_gamma(gamma, s)?;
    let h0 = setup.h0_cap();
    check_steps(h_set, h0)?;
    let (r, big_r) = (setup.r, setup.big_r);
    let n = u.dim() as f64;
    let sp = params.sp();
    let pp = conjugate(p);
    let gap = big_r - r;
    let mid = 0.5 * (big_r + r);
    let b_big = setup.ball(big_r);
    let b_plus = setup.ball(big_r + h0);
    let eta = setup.cutoff(u.dim())?.sample(u.grid())?;
    let ueta = u.times_compact(&eta)?;

    let lead = math::pow(big_r / gap, p);
    let t2 = lead
        * math::pow(h0, -gamma - t)
        * (gagliardo(u, &b_plus, s, p)?.raised
            + lp_norm(u, &b_plus, p)?.raised / (s * (1.0 - s) * math::pow(big_r, sp)));
    let t3 = math::pow((big_r + r) / gap, n) * math::pow((big_r + 1.0) / gap, sp) * math::pow(gap, -sp) / s
        * x_bracket(u, &setup.ball(mid + h0), &b_plus, params)?.raised;
    let f_ball = setup.ball(mid);
    let hy = y_h_grid(u.grid(), &f_ball, &b_big)?;
    let t4 = if hy.is_empty() {
        return Err(Error::Resolution {
            spacing: u.grid().spacing(),
            h0: 0.25 * gap,
            required_n: (8.0 * u.grid().half_width() / gap) as usize + 2,
        });
    } else {
        math::pow(big_r, -sp) * y_bracket(u, &f_ball, &b_big, params, &hy)?.raised
    };

    let mut report = VerificationReport::new("caccioppoli");
    for h in h_set {
        let hm = h.magnitude();
        let lhs = cutoff_difference(&ueta, &b_big, *h, gamma, params)?;
        let t1 = lead / ((1.0 - s) * s * math::pow(gap, sp))
            * lp_norm(&delta_h(u, *h)?, &b_big, p)?.raised
            / math::pow(hm, gamma * p);
        let t5 = math::pow(1.0 - s, 1.0 / (p - 1.0))
            * math::pow(big_r, s * pp)
            * lp_norm(&delta_h(f, *h)?, &b_big, pp)?.raised
            / math::pow(hm, s * pp);
        let rhs = t1 + t2 + t3 + t4 + t5;
        report.push(ReportRow::new("scheme", hm, lhs, rhs));
    }
    report.note(format!("h0={h0} gamma={gamma} terms: T2={t2} T3={t3} T4={t4}"));
    finish(&mut report, "scheme");
    Ok(report)
}

fn finish(report: &mut VerificationReport, prefix: &str) {
    let m = report.max_ratio(prefix);
    report.fit(format!("C_{prefix}"), m);
    report.set_worst(format!("max_ratio_{prefix}"), m);
    if !m.is_finite() {
        report.fail(format!("{prefix} ratio is not finite"));
    }
}

/// Ratio checks of the Besov-Nikol'skii improvement: the `B^{Γ,p}_∞` bound
/// of `uη` with `Γ = (γ + t + sp)/p`, then the branch selected by `Γ`.
pub fn verify_improvement(
    u: &GridFunction,
    setup: &LocalSetup,
    gamma: f64,
    params: &FractionalParams,
    h0: Option<f64>,
) -> Result<VerificationReport> {
    let (s, p, t) = (params.s, params.p, params.t);
    check_gamma(gamma, s)?;
    let cap = setup.h0_cap();
    let h0 = h0.unwrap_or(cap);
    if !(h0 > 0.0 && h0 <= cap) {
        return param(format!("h₀ must lie in (0, {cap}], got {h0}"));
    }
    let g = *u.grid();
    let steps = dyadic_steps(&g, h0);
    if steps.is_empty() {
        return Err(Error::Resolution { spacing: g.spacing(), h0, required_n: (2.0 * g.half_width() / h0) as usize + 2 });
    }
    let big_gamma = (gamma + t + params.sp()) / p;
    if !(big_gamma < 2.0) {
        return Err(Error::Param(format!("Γ = {big_gamma} must stay below 2")));
    }
    let (r, big_r) = (setup.r, setup.big_r);
    let n = u.dim() as f64;
    let m = m_gamma(u, setup, gamma, params, &steps)?;
    let norm_plus = lp_norm(u, &setup.ball(big_r + h0), p)?.raised;
    let geometry = math::pow(big_r / r, n) * math::pow(big_r / h0, 1.0 + p);
    let bracket = |exponent: f64| (1.0 - s) * m + math::pow(h0, -exponent * p) * norm_plus;
    let eta = setup.cutoff(u.dim())?.sample(&g)?;
    let ueta = u.times_compact(&eta)?;
    let inner = setup.ball(r);

    let mut report = VerificationReport::new("improvement");
    report.fit("M_gamma", m);
    report.fit("Gamma", big_gamma);
    let besov = besov2_sup(&ueta, big_gamma, p, &steps)?.raised;
    report.push(ReportRow::new("besov_bound", h0, besov, geometry * bracket(big_gamma) / s));
    let branch;
    if math::abs(big_gamma - 1.0) <= 1e-12 {
        branch = "difference_bound_tau";
        for tau in [0.5, 0.9] {
            let lhs = nikolskii_sup(u, &inner, tau, p, &steps)?.raised;
            let rhs = geometry * bracket(1.0) / math::pow(1.0 - tau, p);
            report.push(ReportRow::new(format!("{branch}:tau={tau}"), h0, lhs, rhs));
        }
    } else if big_gamma < 1.0 {
        branch = "difference_bound";
        let lhs = nikolskii_sup(u, &inner, big_gamma, p, &steps)?.raised;
        let rhs = geometry * bracket(big_gamma) / (s * math::pow(1.0 - big_gamma, p));
        report.push(ReportRow::new(branch, h0, lhs, rhs));
    } else {
        branch = "gradient_bound";
        let grad = discrete_gradient(u);
        let lhs = grad.lp_pow(&g.restrict(&inner), p);
        let rhs = geometry * bracket(big_gamma) / math::pow(big_gamma - 1.0, p);
        report.push(ReportRow::new(branch, h0, lhs, rhs));
        let tau = 0.5 * (big_gamma - 1.0);
        let mut lhs2 = 0.0;
        for axis in 0..g.dim() {
            lhs2 += gagliardo(&grad.component(axis)?, &inner, tau, p)?.raised;
        }
        let rhs2 = math::pow(big_r / r, n) / ((big_gamma - 1.0 - tau) * tau)
            * math::pow(big_r / h0, 1.0 + p)
            * math::pow(math::pow(h0, -tau) / ((2.0 - big_gamma) * (big_gamma - 1.0)), p)
            * bracket(big_gamma);
        report.push(ReportRow::new(format!("gradient_fractional_bound:tau={tau}"), h0, lhs2, rhs2));
    }
    report.note(format!("branch={branch}"));
    let worst = report.max_ratio("");
    report.set_worst("max_ratio", worst);
    if !worst.is_finite() {
        report.fail("improvement ratio is not finite");
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceStage {
    pub index: usize,
    pub gamma: f64,
    pub outer: f64,
    pub inner: f64,
    pub m_gamma: f64,
    pub rectified: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub scheme: RegularityScheme,
    pub h0: f64,
    pub radii: Vec<f64>,
    pub stages: Vec<TraceStage>,
    /// `(1/s² · i0^{4(N+p)} / (1 - γ_{i0-1})^p)^{i0}`.
    pub envelope: f64,
    /// `max_i ℳ_{γ_i} / envelope`.
    pub fitted_constant: f64,
    pub report: VerificationReport,
}

/// Runs the bootstrap on a solution on the unit ball: radii
/// `r_i = 3/4 - i/(4 i0)`, `h₀ = 1/(100 i0)`, and `ℳ_{γ_i}` per stage.
pub fn iteration_trace(u: &GridFunction, params: &FractionalParams, tau: Option<f64>) -> Result<Trace> {
    let scheme = classify_regime(params, tau)?;
    let i0 = scheme.i0;
    let g = *u.grid();
    let h0 = 1.0 / (100.0 * i0 as f64);
    if g.spacing() > h0 {
        return Err(Error::Resolution {
            spacing: g.spacing(),
            h0,
            required_n: math::ceil(2.0 * g.half_width() / h0) as usize + 1,
        });
    }
    let radii: Vec<f64> = (0..=i0).map(|i| 0.75 - i as f64 / (4.0 * i0 as f64)).collect();
    // steps up to and including h₀, so that spacing = h₀ still has one
    let steps = dyadic_steps(&g, h0 * (1.0 + 1e-9));
    let unit = Ball { center: [0.0, 0.0], radius: 1.0 };
    let mut stages = Vec::new();
    let mut report = VerificationReport::new("trace");
    let mut stage = |index: usize, gamma: f64, outer: f64, inner: f64, rectified: bool| -> Result<()> {
        let setup = LocalSetup::new(unit, inner, outer)?;
        let m = m_gamma(u, &setup, gamma, params, &steps)?;
        let mut row = ReportRow::new(format!("stage{index}"), h0, m, 1.0);
        if !m.is_finite() {
            row = row.with_pass(false);
        }
        report.push(row);
        stages.push(TraceStage { index, gamma, outer, inner, m_gamma: m, rectified });
        Ok(())
    };
    for i in 0..i0 {
        let gamma = scheme.gammas[i].min(1.0);
        stage(i, gamma, radii[i], radii[i + 1], false)?;
    }
    if let Some(beta) = scheme.rectified_beta {
        let outer = radii[i0 - 1];
        stage(i0, beta.max(params.s), outer, 0.5 * (outer + radii[i0]), true)?;
    }
    let n = g.dim() as f64;
    let p = params.p;
    let last = scheme.gammas[i0 - 1];
    let one_stage = math::powi(params.s, -2) * math::pow(i0 as f64, 4.0 * (n + p)) / math::pow(1.0 - last, p);
    let envelope = math::pow(one_stage, i0 as f64);
    let worst = stages.iter().fold(0.0f64, |m, s| m.max(s.m_gamma));
    let fitted_constant = worst / envelope;
    report.fit("envelope", envelope);
    report.fit("fitted_constant", fitted_constant);
    report.set_worst("max_M_gamma", worst);
    if !worst.is_finite() {
        report.fail("ℳ_γ not finite");
    }
    report.note(String::from("rows: lhs = ℳ_γ at each stage; rhs column unused"));
    Ok(Trace { scheme, h0, radii, stages, envelope, fitted_constant, report })
}
