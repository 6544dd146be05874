use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::diffops::discrete_gradient;
use crate::error::{param, Result};
use crate::grid::{Ball, ExteriorRule, Grid, GridFunction, TestFunction};
use crate::kernel::{FractionalParams, Kernel};
use crate::math;
use crate::seminorms::gagliardo;
use crate::solver::{solve_dirichlet, DirichletProblem, SolverConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct BbmRow {
    pub s: f64,
    /// `(1 - s)[u]^p_{W^{s,p}(B)}`.
    pub scaled: f64,
    /// `∫_B |∇u|^p`.
    pub gradient: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BbmTable {
    pub rows: Vec<BbmRow>,
    /// Last ratio, the estimate of `C_{N,p}`.
    pub limit: f64,
    /// Last two ratios within 10% of each other.
    pub converged: bool,
    pub warnings: Vec<String>,
}

/// `(1 - s) ∬_{(0,1)²} |x - y|^{1-2s}` for `u(x) = x`, `N = 1`, `p = 2`.
pub fn bbm_closed_form(s: f64) -> f64 {
    2.0 * (1.0 - s) / ((2.0 - 2.0 * s) * (3.0 - 2.0 * s))
}

/// Tabulates `(1 - s)[u]^p_{W^{s,p}(ball)}` along an increasing `s_list`.
pub fn bbm_limit(u: &TestFunction, ball: &Ball, p: f64, s_list: &[f64], grid: &Grid) -> Result<BbmTable> {
    if s_list.len() < 2 || s_list.windows(2).any(|w| !(w[0] < w[1])) {
        return param("s_list must be increasing with at least two entries");
    }
    let v = GridFunction::exact(u, grid)?;
    let nodes = grid.restrict(ball);
    let gradient = discrete_gradient(&v).lp_pow(&nodes, p);
    let mut rows = Vec::with_capacity(s_list.len());
    let mut warnings = Vec::new();
    for &s in s_list {
        let scaled = (1.0 - s) * gagliardo(&v, ball, s, p)?.raised;
        // the midpoint rule in 2D omits the diagonal cell, whose share of the
        // integral is about (h/R)^{p(1-s)}
        if grid.dim() == 2 {
            let share = math::pow(grid.spacing() / ball.radius, p * (1.0 - s));
            if share > 0.1 {
                warnings.push(format!("s={s}: grid too coarse, diagonal share ≈ {share:.3}"));
            }
        }
        let ratio = if gradient > 0.0 { scaled / gradient } else { 0.0 };
        rows.push(BbmRow { s, scaled, gradient, ratio });
    }
    let k = rows.len();
    let (a, b) = (rows[k - 2].ratio, rows[k - 1].ratio);
    let converged = if b == 0.0 { a == 0.0 } else { math::abs(a - b) / math::abs(b) < 0.1 };
    Ok(BbmTable { limit: b, converged, rows, warnings })
}

/// Closed-form families for the `s ↗ 1` sweep on `Ω = (-1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepFamily {
    /// `f ≡ force`, `g ≡ 0`.
    ConstantForce { force: f64 },
    /// `f ≡ 0`, `g(x) = a x + b`.
    Affine { a: f64, b: f64 },
}

/// Solution of `-(2/p) Δ_p u = f` on `(-1, 1)` with zero boundary values for
/// constant `f`; `2/p` is the one-dimensional limit constant of the energy.
pub fn p_laplace_reference(x: f64, force: f64, p: f64) -> (f64, f64) {
    let c = 0.5 * p * force;
    let pp = p / (p - 1.0);
    let k = math::pow(math::abs(c), 1.0 / (p - 1.0)) * if c < 0.0 { -1.0 } else { 1.0 };
    let ax = math::abs(x);
    let u = k / pp * (1.0 - math::pow(ax, pp));
    let du = -k * math::pow(ax, pp - 1.0) * if x < 0.0 { -1.0 } else { 1.0 };
    (u, du)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub s: f64,
    /// `‖u_s - u_ref‖_{L^p(Ω)}`.
    pub error: f64,
    /// `‖∇u_s - ∇u_ref‖_{L^p(B_{1/2})}`.
    pub gradient_error: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub family: SweepFamily,
    pub p: f64,
    pub rows: Vec<SweepRow>,
    /// Both error columns nonincreasing along `s_list` (affine: all below 1e-6).
    pub monotone: bool,
}

/// Solves `(-Δ_p)^s u_s = f/(1 - s)` on `(-1, 1)` in a box of half-width 2
/// for each `s` and compares with the local limit.
pub fn s_sweep_to_plaplacian(
    family: SweepFamily,
    p: f64,
    s_list: &[f64],
    n: usize,
    config: &SolverConfig,
) -> Result<SweepTable> {
    if s_list.is_empty() {
        return param("s_list must not be empty");
    }
    let grid = Grid::new(1, 2.0, n)?;
    let omega = Ball::centered(1.0)?;
    let half = Ball::centered(0.5)?;
    let (force, rule) = match family {
        SweepFamily::ConstantForce { force } => (force, ExteriorRule::zero()),
        SweepFamily::Affine { a, b } => (0.0, ExteriorRule::affine([a, 0.0], b)),
    };
    let base_f = GridFunction::new(grid, alloc::vec![force; grid.len()], ExteriorRule::zero())?;
    let vals = (0..grid.len()).map(|i| rule.eval(grid.point(i), 1)).collect();
    let g = GridFunction::new(grid, vals, rule)?;
    let omega_nodes = grid.restrict(&omega);
    let half_nodes = grid.restrict(&half);
    let w = grid.cell_weight();
    let mut rows = Vec::with_capacity(s_list.len());
    for &s in s_list {
        let params = FractionalParams::new(1, s, p, 0.0, 1.0)?;
        let f_s = base_f.scaled(1.0 / (1.0 - s));
        let problem = DirichletProblem::new(omega, f_s, g.clone(), Kernel::standard(params))?;
        let sol = solve_dirichlet(&problem, config)?;
        let reference = |x: f64| match family {
            SweepFamily::ConstantForce { force } => p_laplace_reference(x, force, p),
            SweepFamily::Affine { a, b } => (a * x + b, a),
        };
        let grad = discrete_gradient(&sol.u);
        let mut e = 0.0;
        for &i in &omega_nodes {
            e += math::abs_pow(sol.u.values()[i] - reference(grid.point(i)[0]).0, p);
        }
        let mut ge = 0.0;
        for &i in &half_nodes {
            ge += math::abs_pow(grad.components[0][i] - reference(grid.point(i)[0]).1, p);
        }
        rows.push(SweepRow {
            s,
            error: math::pow(e * w, 1.0 / p),
            gradient_error: math::pow(ge * w, 1.0 / p),
            iterations: sol.iterations,
        });
    }
    let monotone = match family {
        SweepFamily::Affine { .. } => rows.iter().all(|r| r.error < 1e-6 && r.gradient_error < 1e-6),
        SweepFamily::ConstantForce { .. } => rows
            .windows(2)
            .all(|w| w[1].error <= w[0].error && w[1].gradient_error <= w[0].gradient_error),
    };
    Ok(SweepTable { family, p, rows, monotone })
}
