//! Gagliardo, Nikol'skii and Besov seminorms, the weighted norm `X^p_s`,
//! snail tails, the `X`/`Y` brackets and the composite quantity `𝒜_R`.
//!
//! Box contributions are node-cell quadratures. Contributions from outside
//! the cell box `[-L - h/2, L + h/2]^N` are integrated along rays: closed
//! form when the exterior rule is constant there, Gauss panels otherwise
//! (up to the rule's truncation radius, with the far-field constant
//! integrated analytically beyond it).

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::diffops::{delta2_h, delta_h, Translation};
use crate::error::{param, Error, Result};
use crate::grid::{norm, sub, Ball, ExteriorRule, Grid, GridFunction, Point, TestFunction};
use crate::report::{ReportRow, VerificationReport};
use crate::kernel::{conjugate, FractionalParams};
use crate::math;
use crate::par;
use crate::quad::Rule;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeminormKind {
    Gagliardo,
    Nikolskii,
    Besov2,
    Xps,
    SnailBracketX,
    SnailBracketY,
    Lp,
}

impl SeminormKind {
    pub fn name(self) -> &'static str {
        match self {
            SeminormKind::Gagliardo => "gagliardo",
            SeminormKind::Nikolskii => "nikolskii",
            SeminormKind::Besov2 => "besov2",
            SeminormKind::Xps => "xps",
            SeminormKind::SnailBracketX => "snail_bracket_X",
            SeminormKind::SnailBracketY => "snail_bracket_Y",
            SeminormKind::Lp => "lp",
        }
    }
}

/// A computed seminorm with its quadrature metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct SeminormResult {
    pub kind: SeminormKind,
    pub value: f64,
    /// `value^p`, accumulated directly (no root/power round trip).
    pub raised: f64,
    pub exponent: f64,
    pub p: f64,
    pub nodes: usize,
    pub tail_radius: f64,
    /// Maximizing translation for suprema.
    pub argmax_h: Option<Point>,
}

impl SeminormResult {
    fn new(kind: SeminormKind, raised: f64, exponent: f64, p: f64, nodes: usize) -> Self {
        SeminormResult {
            kind,
            value: math::pow(raised.max(0.0), 1.0 / p),
            raised,
            exponent,
            p,
            nodes,
            tail_radius: 0.0,
            argmax_h: None,
        }
    }
}

/// Grid-aligned translations `±k·spacing·e_j` (`k = 1..4`) and
/// `±2^m·spacing·e_j`, keeping `|h| < cap`.
pub fn dyadic_h_grid(grid: &Grid, cap: f64) -> Vec<Translation> {
    let mut ks: Vec<i64> = (1..=4).collect();
    let mut m = 8;
    while (m as f64) * grid.spacing() < cap {
        ks.push(m);
        m *= 2;
    }
    let mut out = Vec::new();
    for axis in 0..grid.dim() {
        for &k in &ks {
            if (k as f64) * grid.spacing() < cap {
                out.push(Translation::along(grid, axis, k));
                out.push(Translation::along(grid, axis, -k));
            }
        }
    }
    out
}

/// Positive dyadic translations `2^m·spacing·e_0` below `cap`.
pub fn dyadic_steps(grid: &Grid, cap: f64) -> Vec<Translation> {
    let mut out = Vec::new();
    let mut k = 1;
    while (k as f64) * grid.spacing() < cap {
        out.push(Translation::along(grid, 0, k));
        k *= 2;
    }
    out
}

fn check_lp_exponent(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return param(format!("integrability exponent must be ≥ 1, got {p}"));
    }
    Ok(())
}

/// `‖u‖^p_{L^p(E)}` by node quadrature.
pub fn lp_norm(u: &GridFunction, e: &Ball, p: f64) -> Result<SeminormResult> {
    check_lp_exponent(p)?;
    let nodes = u.grid().restrict(e);
    Ok(SeminormResult::new(SeminormKind::Lp, u.lp_pow(&nodes, p), 0.0, p, nodes.len()))
}

/// Exact cell-pair weights `∫_{cell_i}∫_{cell_j} |x-y|^a` for `|i-j| = k`,
/// on unit spacing: the second difference of `|z|^{a+2}/((a+1)(a+2))`.
pub(crate) fn pair_weights_1d(a: f64, kmax: usize) -> Vec<f64> {
    let c = 1.0 / ((a + 1.0) * (a + 2.0));
    let f = |z: f64| c * math::pow(math::abs(z), a + 2.0);
    (0..=kmax)
        .map(|k| {
            let k = k as f64;
            f(k + 1.0) - 2.0 * f(k) + f(k - 1.0)
        })
        .collect()
}

/// `[u]_{W^{α,p}(E)} = (∬_{E×E} |u(x)-u(y)|^p / |x-y|^{N+αp})^{1/p}`.
///
/// In one dimension the pair weight `|x-y|^{p-1-αp}` is integrated exactly
/// over each pair of node cells and multiplied by the difference quotient
/// `|u_i - u_j|/|x_i - x_j|` to the `p` (the self-cell uses the central
/// difference gradient). In two dimensions the midpoint rule is used with
/// the diagonal `x = y` excluded.
pub fn gagliardo(u: &GridFunction, e: &Ball, alpha: f64, p: f64) -> Result<SeminormResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return param(format!("Gagliardo order must lie in (0,1), got {alpha}"));
    }
    check_lp_exponent(p)?;
    let nodes = u.grid().restrict(e);
    let raised = gagliardo_pow_on(u, &nodes, alpha, p);
    Ok(SeminormResult::new(SeminormKind::Gagliardo, raised, alpha, p, nodes.len()))
}

fn gagliardo_pow_on(u: &GridFunction, nodes: &[usize], alpha: f64, p: f64) -> f64 {
    let g = u.grid();
    let h = g.spacing();
    let v = u.values();
    if nodes.is_empty() {
        return 0.0;
    }
    if g.dim() == 1 {
        let a = p - 1.0 - alpha * p;
        let kmax = nodes.last().unwrap() - nodes[0];
        let unit = pair_weights_1d(a, kmax.max(1));
        let scale = math::pow(h, a + 2.0);
        // weights for |u_i - u_j|^p: W_k / (k h)^p
        let coef: Vec<f64> = (0..=kmax.max(1))
            .map(|k| if k == 0 { 0.0 } else { unit[k] * scale / math::pow(k as f64 * h, p) })
            .collect();
        let self_w = unit[0] * scale;
        let rows = par::map(nodes.len(), |a_i| {
            let i = nodes[a_i];
            let mut acc = 0.0;
            for &j in &nodes[a_i + 1..] {
                acc += math::abs_pow(v[i] - v[j], p) * coef[j - i];
            }
            let grad = (u.at_offset(i, [1, 0]) - u.at_offset(i, [-1, 0])) / (2.0 * h);
            2.0 * acc + self_w * math::abs_pow(grad, p)
        });
        par::ordered_sum(&rows)
    } else {
        let w2 = g.cell_weight() * g.cell_weight();
        let order = 2.0 + alpha * p;
        let rows = par::map(nodes.len(), |a_i| {
            let i = nodes[a_i];
            let xi = g.point(i);
            let mut acc = 0.0;
            for &j in &nodes[a_i + 1..] {
                let d = math::abs_pow(v[i] - v[j], p);
                if d != 0.0 {
                    acc += d / math::pow(norm(sub(xi, g.point(j))), order);
                }
            }
            2.0 * acc * w2
        });
        par::ordered_sum(&rows)
    }
}

/// `[u]_{W^{α,p}(ℝ^N)}` for functions equal to a constant outside the box:
/// the box double sum plus twice `Σ_x |u(x) - c|^p ∫_{ℝ^N∖box} |x-y|^{-N-αp}`.
pub fn gagliardo_global(u: &GridFunction, alpha: f64, p: f64) -> Result<SeminormResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return param(format!("Gagliardo order must lie in (0,1), got {alpha}"));
    }
    check_lp_exponent(p)?;
    let g = *u.grid();
    let c = constant_outside_box(u.exterior(), &g)?;
    let all: Vec<usize> = (0..g.len()).collect();
    let inner = gagliardo_pow_on(u, &all, alpha, p);
    let sigma = alpha * p;
    let w = g.cell_weight();
    let tails = par::map(g.len(), |i| {
        let d = math::abs_pow(u.values()[i] - c, p);
        if d == 0.0 {
            0.0
        } else {
            d * power_tail_outside_box(&g, g.point(i), sigma)
        }
    });
    let raised = inner + 2.0 * w * par::ordered_sum(&tails);
    let mut r = SeminormResult::new(SeminormKind::Gagliardo, raised, alpha, p, g.len());
    r.tail_radius = f64::INFINITY;
    Ok(r)
}

fn constant_outside_box(rule: &ExteriorRule, g: &Grid) -> Result<f64> {
    let ff = rule.far_field();
    match ff.compact_radius {
        Some(rho) if ff.growth == 0.0 && rho <= g.half_width() + 0.5 * g.spacing() => Ok(ff.constant),
        _ => Err(Error::Domain(format!(
            "exterior rule `{}` is not constant outside the box",
            rule.describe()
        ))),
    }
}

/// Half-width of the region covered by node cells.
fn cell_box(g: &Grid) -> f64 {
    g.half_width() + 0.5 * g.spacing()
}

/// Distance from `x` (inside the square) to its boundary along angle `theta`.
fn ray_to_square(x: Point, half: f64, theta: f64) -> f64 {
    let (c, s) = (math::cos(theta), math::sin(theta));
    let mut t = f64::INFINITY;
    if c > 1e-300 {
        t = t.min((half - x[0]) / c);
    } else if c < -1e-300 {
        t = t.min((-half - x[0]) / c);
    }
    if s > 1e-300 {
        t = t.min((half - x[1]) / s);
    } else if s < -1e-300 {
        t = t.min((-half - x[1]) / s);
    }
    t
}

/// `∫_0^{2π} f(θ, ρ(θ)) dθ` with `ρ` the distance to the square boundary;
/// the circle is split at the four corner directions.
fn around_square(x: Point, half: f64, mut f: impl FnMut(f64, f64) -> f64) -> f64 {
    let rule = Rule::new(24);
    let mut corners: Vec<f64> = [[half, half], [-half, half], [-half, -half], [half, -half]]
        .iter()
        .map(|c| {
            let a = math::atan2(c[1] - x[1], c[0] - x[0]);
            if a < 0.0 {
                a + 2.0 * math::PI
            } else {
                a
            }
        })
        .collect();
    corners.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut total = 0.0;
    for k in 0..4 {
        let lo = corners[k];
        let hi = if k == 3 { corners[0] + 2.0 * math::PI } else { corners[k + 1] };
        total += rule.integrate(lo, hi, |th| f(th, ray_to_square(x, half, th)));
    }
    total
}

/// `∫_{ℝ^N ∖ cellbox} |x - y|^{-N-σ} dy`.
fn power_tail_outside_box(g: &Grid, x: Point, sigma: f64) -> f64 {
    let half = cell_box(g);
    if g.dim() == 1 {
        (math::pow(half - x[0], -sigma) + math::pow(half + x[0], -sigma)) / sigma
    } else {
        around_square(x, half, |_, rho| math::pow(rho, -sigma) / sigma)
    }
}

/// Radial profile of an exterior weight centred at some point.
#[derive(Clone, Copy)]
enum Weight {
    /// `r^{-N-σ}` centred at the evaluation point.
    Singular(f64),
    /// `(1 + r)^{-N-σ}` centred at the origin.
    Shifted(f64),
}

impl Weight {
    fn density(self, r: f64, dim: usize) -> f64 {
        match self {
            Weight::Singular(s) => math::pow(r, -(dim as f64) - s),
            Weight::Shifted(s) => math::pow(1.0 + r, -(dim as f64) - s),
        }
    }

    /// `∫_ρ^∞ density(r) r^{N-1} dr`.
    fn radial_tail(self, rho: f64, dim: usize) -> f64 {
        match (self, dim) {
            (Weight::Singular(s), _) => math::pow(rho, -s) / s,
            (Weight::Shifted(s), 1) => math::pow(1.0 + rho, -s) / s,
            (Weight::Shifted(s), _) => {
                math::pow(1.0 + rho, -s) / s - math::pow(1.0 + rho, -1.0 - s) / (1.0 + s)
            }
        }
    }

    fn sigma(self) -> f64 {
        match self {
            Weight::Singular(s) | Weight::Shifted(s) => s,
        }
    }
}

/// `∫_{ℝ^N ∖ cellbox} |G(y)|^p w(|y - centre|) dy` for the exterior rule `G`.
fn exterior_integral(
    rule: &ExteriorRule,
    g: &Grid,
    centre: Point,
    p: f64,
    weight: Weight,
) -> Result<f64> {
    let ff = rule.far_field();
    let dim = g.dim();
    if ff.growth > 0.0 && ff.growth * p >= weight.sigma() {
        return Err(Error::Divergence(rule.describe()));
    }
    let half = cell_box(g);
    if rule.is_constant() {
        let c = math::abs_pow(ff.constant, p);
        if c == 0.0 {
            return Ok(0.0);
        }
        return Ok(c * if dim == 1 {
            weight.radial_tail(half - centre[0], 1) + weight.radial_tail(half + centre[0], 1)
        } else {
            around_square(centre, half, |_, rho| weight.radial_tail(rho, 2))
        });
    }
    let rule_q = Rule::new(16);
    let trunc = rule.truncation_radius.max(2.0 * half + norm(centre));
    let far_c = math::abs_pow(ff.constant, p);
    let mut failed = false;
    let mut ray = |dir: Point, rho: f64| -> f64 {
        let integrand = |r: f64| {
            let y = [centre[0] + r * dir[0], centre[1] + r * dir[1]];
            math::abs_pow(rule.eval(y, dim), p) * weight.density(r, dim) * math::powi(r, dim as i32 - 1)
        };
        if ff.growth > 0.0 {
            match rule_q.radial_tail(rho, f64::INFINITY, 1e-10, integrand) {
                Some(v) => v,
                None => {
                    failed = true;
                    0.0
                }
            }
        } else {
            let end = match ff.compact_radius {
                Some(c) if far_c == 0.0 => (c + norm(centre)).min(trunc),
                _ => trunc,
            };
            let near = if end > rho {
                rule_q.radial_tail(rho, end, 0.0, integrand).unwrap_or(0.0)
            } else {
                0.0
            };
            near + far_c * weight.radial_tail(end.max(rho), dim)
        }
    };
    let total = if dim == 1 {
        ray([1.0, 0.0], half - centre[0]) + ray([-1.0, 0.0], half + centre[0])
    } else {
        around_square(centre, half, |th, rho| ray([math::cos(th), math::sin(th)], rho))
    };
    if failed {
        return Err(Error::Divergence(rule.describe()));
    }
    Ok(total)
}

/// `‖u‖^p_{X^p_s} = ∫ |u|^p (1 + |x|)^{-N-sp}`.
pub fn xps_norm(u: &GridFunction, params: &FractionalParams) -> Result<SeminormResult> {
    let g = *u.grid();
    let p = params.p;
    let sp = params.sp();
    let w = g.cell_weight();
    let dim = g.dim() as f64;
    let mut boxed = 0.0;
    for i in 0..g.len() {
        boxed += math::abs_pow(u.values()[i], p) * math::pow(1.0 + norm(g.point(i)), -dim - sp);
    }
    let tail = exterior_integral(u.exterior(), &g, [0.0, 0.0], p, Weight::Shifted(sp))?;
    let mut r = SeminormResult::new(SeminormKind::Xps, boxed * w + tail, params.s, p, g.len());
    r.tail_radius = u.exterior().truncation_radius;
    Ok(r)
}

fn check_inside_box(g: &Grid, e: &Ball) -> Result<()> {
    let half = cell_box(g);
    for j in 0..g.dim() {
        if math::abs(e.center[j]) + e.radius > half {
            return Err(Error::Domain(format!(
                "ball of radius {} at ({}, {}) is not inside the box",
                e.radius, e.center[0], e.center[1]
            )));
        }
    }
    Ok(())
}

/// `∫_{[a,b]} |x - y|^{-1-σ} dy` for an interval not containing `x`.
fn interval_power(x: f64, a: f64, b: f64, sigma: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    if a >= x {
        (math::pow(a - x, -sigma) - math::pow(b - x, -sigma)) / sigma
    } else {
        (math::pow(x - b, -sigma) - math::pow(x - a, -sigma)) / sigma
    }
}

/// Node weights `∫_{cell_j ∖ E} |x - y|^{-N-sp} dy` (one dimension: exact;
/// two dimensions: midpoint on nodes outside `E`).
fn snail_weights(g: &Grid, x: Point, e: &Ball, sp: f64) -> Vec<(usize, f64)> {
    let h = g.spacing();
    let mut out = Vec::new();
    if g.dim() == 1 {
        let (lo, hi) = (e.center[0] - e.radius, e.center[0] + e.radius);
        for j in 0..g.len() {
            let y = g.point(j)[0];
            let (a, b) = (y - 0.5 * h, y + 0.5 * h);
            let left = interval_power(x[0], a, b.min(lo), sp);
            let right = interval_power(x[0], a.max(hi), b, sp);
            if left + right > 0.0 {
                out.push((j, left + right));
            }
        }
    } else {
        let w = g.cell_weight();
        for j in 0..g.len() {
            let y = g.point(j);
            if !e.contains(y) {
                out.push((j, w * math::pow(norm(sub(x, y)), -2.0 - sp)));
            }
        }
    }
    out
}

/// `Snail(u; x, E) = (|E|^{sp/N} ∫_{ℝ^N ∖ E} |u(y)|^p |x - y|^{-N-sp} dy)^{1/p}`.
pub fn snail(u: &GridFunction, x: Point, e: &Ball, params: &FractionalParams) -> Result<f64> {
    Ok(math::pow(snail_pow(u, x, e, params)?, 1.0 / params.p))
}

/// `Snail(u; x, E)^p`.
pub fn snail_pow(u: &GridFunction, x: Point, e: &Ball, params: &FractionalParams) -> Result<f64> {
    if !e.contains(x) {
        return Err(Error::Domain(String::from("snail point must lie inside E")));
    }
    let g = *u.grid();
    check_inside_box(&g, e)?;
    let sp = params.sp();
    let p = params.p;
    let weights = snail_weights(&g, x, e, sp);
    Ok(snail_pow_with(u, x, e, &weights, sp, p)?)
}

fn snail_pow_with(
    u: &GridFunction,
    x: Point,
    e: &Ball,
    weights: &[(usize, f64)],
    sp: f64,
    p: f64,
) -> Result<f64> {
    let g = u.grid();
    let mut boxed = 0.0;
    for &(j, w) in weights {
        boxed += math::abs_pow(u.values()[j], p) * w;
    }
    let tail = exterior_integral(u.exterior(), g, x, p, Weight::Singular(sp))?;
    let n = g.dim() as f64;
    Ok(math::pow(e.measure(g.dim()), sp / n) * (boxed + tail))
}

/// `∫_F Snail(u; x, E)^p dx` by node quadrature over `F`.
pub fn snail_integral(
    u: &GridFunction,
    f: &Ball,
    e: &Ball,
    params: &FractionalParams,
) -> Result<f64> {
    f.gap_to(e)?;
    let g = *u.grid();
    check_inside_box(&g, e)?;
    let nodes = g.restrict(f);
    let sp = params.sp();
    let vals = par::map(nodes.len(), |k| {
        let x = g.point(nodes[k]);
        let w = snail_weights(&g, x, e, sp);
        snail_pow_with(u, x, e, &w, sp, params.p)
    });
    let mut acc = Vec::with_capacity(vals.len());
    for v in vals {
        acc.push(v?);
    }
    Ok(par::ordered_sum(&acc) * g.cell_weight())
}

/// `⟨u⟩_{X^p_s(F;E)} = (∫_E |u|^p + ∫_F Snail(u;x,E)^p dx)^{1/p}`.
pub fn x_bracket(
    u: &GridFunction,
    f: &Ball,
    e: &Ball,
    params: &FractionalParams,
) -> Result<SeminormResult> {
    let local = u.lp_pow(&u.grid().restrict(e), params.p);
    let tail = snail_integral(u, f, e, params)?;
    let mut r = SeminormResult::new(
        SeminormKind::SnailBracketX,
        local + tail,
        params.s,
        params.p,
        u.grid().restrict(f).len(),
    );
    r.tail_radius = u.exterior().truncation_radius;
    Ok(r)
}

/// Default admissible translations for the `Y` bracket: `|h| < d(F,E)/2`.
pub fn y_h_grid(grid: &Grid, f: &Ball, e: &Ball) -> Result<Vec<Translation>> {
    Ok(dyadic_h_grid(grid, 0.5 * f.gap_to(e)?))
}

/// `⟨u⟩_{Y^{t,p}_s(F;E)} = sup_h (∫_F Snail(δ_h u/|h|^t; x, E)^p dx)^{1/p}`
/// over `h_grid`, each `0 < |h| < d(F,E)/2`.
pub fn y_bracket(
    u: &GridFunction,
    f: &Ball,
    e: &Ball,
    params: &FractionalParams,
    h_grid: &[Translation],
) -> Result<SeminormResult> {
    let cap = 0.5 * f.gap_to(e)?;
    if h_grid.is_empty() {
        return param("Y bracket needs at least one translation");
    }
    if let Some(h) = h_grid.iter().find(|h| !(h.magnitude() > 0.0 && h.magnitude() < cap)) {
        return param(format!(
            "translation |h| = {} violates 0 < |h| < d(F,E)/2 = {cap}",
            h.magnitude()
        ));
    }
    let mut best = (0.0, None);
    for h in h_grid {
        let d = delta_h(u, *h)?.scaled(math::pow(h.magnitude(), -params.t));
        let v = snail_integral(&d, f, e, params)?;
        if best.1.is_none() || v > best.0 {
            best = (v, Some(h.0));
        }
    }
    let mut r = SeminormResult::new(
        SeminormKind::SnailBracketY,
        best.0,
        params.t,
        params.p,
        u.grid().restrict(f).len(),
    );
    r.argmax_h = best.1;
    r.tail_radius = u.exterior().truncation_radius;
    Ok(r)
}

/// `sup_h ‖δ_h u / |h|^α‖_{L^p(E)}` over `h_grid`.
pub fn nikolskii_sup(
    u: &GridFunction,
    e: &Ball,
    alpha: f64,
    p: f64,
    h_grid: &[Translation],
) -> Result<SeminormResult> {
    check_lp_exponent(p)?;
    if h_grid.is_empty() {
        return param("Nikol'skii supremum needs a nonempty translation set");
    }
    let nodes = u.grid().restrict(e);
    let mut best = (0.0, None);
    for h in h_grid {
        let d = delta_h(u, *h)?;
        let v = d.lp_pow(&nodes, p) / math::pow(h.magnitude(), alpha * p);
        if best.1.is_none() || v > best.0 {
            best = (v, Some(h.0));
        }
    }
    let mut r = SeminormResult::new(SeminormKind::Nikolskii, best.0, alpha, p, nodes.len());
    r.argmax_h = best.1;
    Ok(r)
}

/// `sup_h ‖δ²_h u / |h|^α‖_{L^p(box)}` over `h_grid`, `0 < α < 2`.
pub fn besov2_sup(
    u: &GridFunction,
    alpha: f64,
    p: f64,
    h_grid: &[Translation],
) -> Result<SeminormResult> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return param(format!("Besov order must lie in (0,2), got {alpha}"));
    }
    check_lp_exponent(p)?;
    if h_grid.is_empty() {
        return param("Besov supremum needs a nonempty translation set");
    }
    let g = u.grid();
    let all: Vec<usize> = (0..g.len()).collect();
    let mut best = (0.0, None);
    for h in h_grid {
        let d = delta2_h(u, *h)?;
        let v = d.lp_pow(&all, p) / math::pow(h.magnitude(), alpha * p);
        if best.1.is_none() || v > best.0 {
            best = (v, Some(h.0));
        }
    }
    let mut r = SeminormResult::new(SeminormKind::Besov2, best.0, alpha, p, all.len());
    r.argmax_h = best.1;
    Ok(r)
}

/// The six summands of `𝒜_R(u, f)` and their sum.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeAr {
    pub total: f64,
    /// `R^{sp}[u]^p`, `‖u‖^p/(s(1-s))`, `⟨u⟩^p_X/s`, `R^{tp}⟨u⟩^p_Y`,
    /// `R^{spp'}R^{sp'}[(1-s)f]^{p'}`, `R^{spp'}‖(1-s)f‖^{p'}/(s(1-s))`.
    pub summands: [f64; 6],
}

/// `𝒜_R(u, f)` on the ball `B_R = ball`.
pub fn composite_ar(
    u: &GridFunction,
    f: &GridFunction,
    ball: &Ball,
    params: &FractionalParams,
) -> Result<CompositeAr> {
    let g = *u.grid();
    check_inside_box(&g, ball)?;
    if ball.radius + norm(ball.center) > g.half_width() - g.spacing() && g.dim() == 1 {
        return Err(Error::Domain(String::from("ball needs a one-cell margin inside the box")));
    }
    let (s, p, t) = (params.s, params.p, params.t);
    let r = ball.radius;
    let pp = conjugate(p);
    let sp = params.sp();
    let f_s = f.scaled(1.0 - s);
    let b34 = ball.with_radius(0.75 * r)?;
    let b78 = ball.with_radius(0.875 * r)?;
    let hy = y_h_grid(&g, &b34, &b78)?;
    let y = if hy.is_empty() {
        return Err(Error::Resolution {
            spacing: g.spacing(),
            h0: r / 16.0,
            required_n: (2.0 * g.half_width() * 16.0 / r) as usize + 2,
        });
    } else {
        y_bracket(u, &b34, &b78, params, &hy)?.raised
    };
    let summands = [
        math::pow(r, sp) * gagliardo(u, ball, s, p)?.raised,
        lp_norm(u, ball, p)?.raised / (s * (1.0 - s)),
        x_bracket(u, &b34, ball, params)?.raised / s,
        math::pow(r, t * p) * y,
        math::pow(r, sp * pp) * math::pow(r, s * pp) * gagliardo(&f_s, ball, s, pp)?.raised,
        math::pow(r, sp * pp) * lp_norm(&f_s, ball, pp)?.raised / (s * (1.0 - s)),
    ];
    Ok(CompositeAr { total: summands.iter().sum(), summands })
}

/// Shares one fitted constant per order: `C_α = max` over the corpus of
/// the ratio, and the spread `max_α C_α / min_α C_α` must stay below 3.
fn fit_spread(report: &mut VerificationReport, name: &str, fitted: &[(f64, f64)]) -> f64 {
    let hi = fitted.iter().fold(0.0f64, |m, c| m.max(c.1));
    let lo = fitted.iter().fold(f64::INFINITY, |m, c| m.min(c.1));
    for (alpha, c) in fitted {
        report.fit(format!("C_{name}_alpha={alpha}"), *c);
    }
    let spread = hi / lo;
    report.fit(format!("spread_{name}"), spread);
    let ok = spread < 3.0;
    report.push(ReportRow::new(format!("spread_{name}"), 0.0, spread, 3.0).with_pass(ok));
    if !ok {
        report.fail(format!("{name}: fitted constant spread {spread} ≥ 3"));
    }
    spread
}

/// The three comparisons between first differences, second differences
/// and Gagliardo seminorms on compactly supported functions extended by
/// zero:
///
/// - `nikolskii`: `sup_h ‖δ_h ψ/|h|^α‖^p ≤ C(1-α)[ψ]^p_{W^{α,p}(ℝ^N)}`;
/// - `converse`: `[ψ]^p_{W^{α,p}} ≤ C(h₀^{(β-α)p}/(β-α) N_β^p + h₀^{-αp}/α ‖ψ‖^p)`
///   with `β = (1+α)/2` and `N_β` the first-difference supremum below `h₀`;
/// - `reduction`: `sup_h ‖δ_h ψ/|h|^α‖ ≤ C/(1-α)([ψ]_{B^{α,p}_∞} + ‖ψ‖)`.
///
/// Suprema run over the dyadic translations below `h₀`, which is the
/// largest value keeping every translate of the corpus inside the box.
pub fn verify_seminorm_structure(
    corpus: &[TestFunction],
    grid: &Grid,
    p: f64,
    alphas: &[f64],
    reduction_alphas: &[f64],
) -> Result<VerificationReport> {
    if corpus.is_empty() || alphas.is_empty() || reduction_alphas.is_empty() {
        return param("seminorm structure check needs a corpus and orders");
    }
    check_lp_exponent(p)?;
    let mut support: f64 = 0.0;
    for psi in corpus {
        psi.validate()?;
        match psi.support_radius() {
            Some(r) => support = support.max(r),
            None => return Err(Error::InvalidTest(format!("{} is not compactly supported", psi.tag()))),
        }
    }
    let h0 = (grid.half_width() - support).min(2.0 * support);
    if !(h0 > 4.0 * grid.spacing()) {
        return Err(Error::Domain(format!("support radius {support} leaves no room for translations")));
    }
    let hs = dyadic_h_grid(grid, h0);
    let whole = Ball::centered(grid.half_width() + 0.5 * grid.spacing())?;
    let sampled: Vec<GridFunction> =
        corpus.iter().map(|psi| GridFunction::exact(psi, grid)).collect::<Result<_>>()?;
    let lp: Vec<f64> = sampled.iter().map(|u| lp_norm(u, &whole, p).map(|r| r.raised)).collect::<Result<_>>()?;
    let mut report = VerificationReport::new("seminorm_structure");
    report.fit("h0", h0);

    let mut nik_fit = Vec::new();
    let mut conv_fit = Vec::new();
    for &alpha in alphas {
        let beta = 0.5 * (1.0 + alpha);
        let (mut c1, mut c2) = (0.0f64, 0.0f64);
        for (psi, (u, lpp)) in corpus.iter().zip(sampled.iter().zip(&lp)) {
            let gag = gagliardo_global(u, alpha, p)?.raised;
            let nik = nikolskii_sup(u, &whole, alpha, p, &hs)?.raised;
            let row = ReportRow::new(format!("nikolskii:alpha={alpha}:{}", psi.tag()), alpha, nik, (1.0 - alpha) * gag);
            c1 = c1.max(row.ratio);
            report.push(row);
            let nb = nikolskii_sup(u, &whole, beta, p, &hs)?.raised;
            let rhs = math::pow(h0, (beta - alpha) * p) / (beta - alpha) * nb + math::pow(h0, -alpha * p) / alpha * lpp;
            let row = ReportRow::new(format!("converse:alpha={alpha}:beta={beta}:{}", psi.tag()), alpha, gag, rhs);
            c2 = c2.max(row.ratio);
            report.push(row);
        }
        nik_fit.push((alpha, c1));
        conv_fit.push((alpha, c2));
    }
    let mut red_fit = Vec::new();
    for &alpha in reduction_alphas {
        let mut c = 0.0f64;
        for (psi, (u, lpp)) in corpus.iter().zip(sampled.iter().zip(&lp)) {
            let first = nikolskii_sup(u, &whole, alpha, p, &hs)?.value;
            let second = besov2_sup(u, alpha, p, &hs)?.value;
            let row = ReportRow::new(
                format!("reduction:alpha={alpha}:{}", psi.tag()),
                alpha,
                first,
                (second + math::pow(*lpp, 1.0 / p)) / (1.0 - alpha),
            );
            c = c.max(row.ratio);
            report.push(row);
        }
        red_fit.push((alpha, c));
    }
    let spreads = [
        fit_spread(&mut report, "nikolskii", &nik_fit),
        fit_spread(&mut report, "converse", &conv_fit),
        fit_spread(&mut report, "reduction", &red_fit),
    ];
    let worst = spreads.iter().fold(0.0f64, |m, s| m.max(*s));
    report.set_worst("max_spread", worst);
    Ok(report)
}
