//! Discrete Dirichlet problems for `(-Δ_{p,K})^s u = f (+ Φ(u))` in `Ω`
//! with `u = g` outside `Ω`, solved by minimizing the convex energy
//!
//! ```text
//! E(u) = 1/p Σ_{x≠y} |u(x)-u(y)|^p / K(x-y) w² + tail - Σ_Ω f u w
//! ```
//!
//! Pairs are enumerated through a symmetric offset stencil `|z| < R` with
//! `R` the diameter of the box, so that every free node sees `±z` together
//! and odd integrands cancel pairwise. Interactions beyond `R` enter
//! through the kernel's analytic tail mass against the exterior rule's
//! far-field value. The gradient is the exact derivative of the discrete
//! energy, so the weak residual and the gradient coincide.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{param, Error, Result};
use crate::grid::{norm, Ball, GridFunction};
use crate::kernel::{FractionalParams, Kernel};
use crate::math;
use crate::nonlinear::jp;
use crate::par;
use crate::seminorms::pair_weights_1d;
use crate::rng::Rng;

/// `Φ(u) = λ |u|^{q-2} u` on the right-hand side, with `|u| ≤ M` assumed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerOrder {
    pub lambda: f64,
    pub q: f64,
    pub bound_m: f64,
}

impl LowerOrder {
    pub fn new(lambda: f64, q: f64, bound_m: f64) -> Result<Self> {
        if !(q >= 2.0) || !(bound_m > 0.0) || !lambda.is_finite() {
            return param("lower-order term needs q ≥ 2, M > 0 and finite λ");
        }
        Ok(LowerOrder { lambda, q, bound_m })
    }

    /// `λ |u|^{q-2} u`.
    pub fn phi(&self, u: f64) -> f64 {
        self.lambda * jp(u, self.q)
    }

    /// Lipschitz constant of `Φ` on `[-M, M]`: `|λ| (q-1) M^{q-2}`.
    pub fn lipschitz(&self) -> f64 {
        math::abs(self.lambda) * (self.q - 1.0) * math::pow(self.bound_m, self.q - 2.0)
    }
}

/// `𝒜 + L^{p/(p-2)} R^N`, the enlarged data quantity when a lower-order
/// term with Lipschitz constant `L` is present (`p > 2`).
pub fn augmented_ar(ar: f64, lipschitz: f64, radius: f64, dim: usize, p: f64) -> Result<f64> {
    if !(p > 2.0) {
        return param("the lower-order enlargement needs p > 2");
    }
    Ok(ar + math::pow(lipschitz, p / (p - 2.0)) * math::powi(radius, dim as i32))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirichletProblem {
    pub omega: Ball,
    pub f: GridFunction,
    /// Exterior datum: node values outside `Ω` plus its rule beyond the box.
    pub g: GridFunction,
    pub kernel: Kernel,
    pub lower_order: Option<LowerOrder>,
}

impl DirichletProblem {
    pub fn new(omega: Ball, f: GridFunction, g: GridFunction, kernel: Kernel) -> Result<Self> {
        if f.grid() != g.grid() {
            return param("f and g must share a grid");
        }
        if kernel.params().dim != f.dim() {
            return param("kernel dimension differs from the grid dimension");
        }
        let gr = f.grid();
        let half = gr.half_width() - 2.0 * gr.spacing();
        for j in 0..gr.dim() {
            if math::abs(omega.center[j]) + omega.radius > half {
                return Err(Error::Domain(String::from("Ω must lie inside the box with a two-cell margin")));
            }
        }
        if gr.restrict(&omega).is_empty() {
            return Err(Error::Domain(String::from("Ω contains no grid nodes")));
        }
        Ok(DirichletProblem { omega, f, g, kernel, lower_order: None })
    }

    pub fn with_lower_order(mut self, lo: LowerOrder) -> Self {
        self.lower_order = Some(lo);
        self
    }

    pub fn params(&self) -> &FractionalParams {
        self.kernel.params()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    /// Free values start from `g`'s node values.
    Exterior,
    Zero,
    /// Uniform in `[-1, 1]`, seeded.
    Random(u64),
    Values(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Stationarity tolerance on `max_x |∂E/∂u(x)| / w`.
    pub gradient_tolerance: f64,
    /// Backtracking factor in `(0, 1)`.
    pub shrink: f64,
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
    pub init: Init,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iterations: 20_000,
            gradient_tolerance: 1e-10,
            shrink: 0.5,
            armijo: 1e-4,
            init: Init::Exterior,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gradient_tolerance > 0.0) {
            return param("gradient tolerance must be positive");
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return param("backtracking shrink factor must lie in (0,1)");
        }
        if !(self.armijo > 0.0 && self.armijo < 0.5) {
            return param("Armijo constant must lie in (0, 1/2)");
        }
        if self.max_iterations == 0 {
            return param("need at least one iteration");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub u: GridFunction,
    /// Energies after accepted steps. A step whose decrease is below the
    /// resolution of the stored value adds no entry, so the sequence is
    /// strictly decreasing.
    pub energy_history: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub warnings: Vec<String>,
}

/// How interactions beyond the box are represented.
#[derive(Debug, Clone, Copy, PartialEq)]
enum FarModel {
    /// Exterior equals `c` outside the box: one aggregated weight per node.
    Constant(f64),
    /// `p = 2` affine exterior: tail term `2 (u(x) - g(x)) τ`.
    AffineQuadratic,
    /// Far field tends to `c`; stencil points are evaluated, beyond `R` the
    /// tail is taken against `c`.
    Limit(f64),
    /// Growing exterior with `p > 2`: interactions beyond `R` are dropped.
    Truncated,
}

/// The precomputed stencil of a problem.
#[derive(Debug, Clone)]
pub struct Discretization {
    n: usize,
    dim: usize,
    p: f64,
    w: f64,
    radius: f64,
    /// Half-lattice offsets and their weights `w/K(z)`.
    offsets: Vec<([i64; 2], f64)>,
    /// Extended lattice margin on each side of the box.
    margin: i64,
    /// Values on the extended lattice; free entries are rewritten per call.
    base: Vec<f64>,
    free: Vec<usize>,
    free_ext: Vec<usize>,
    is_free_ext: Vec<bool>,
    /// Per free node, `∫` of `1/K` over pairs not covered by the stencil sum.
    tail: Vec<f64>,
    /// Per free node, the far value the tail couples to.
    tail_value: Vec<f64>,
    far: FarModel,
    f: Vec<f64>,
    lower: Option<LowerOrder>,
    skip_outside: bool,
    /// 1D self-cell weight `∬_{cell²} |x-y|^{p-1-sp}` applied to `|∇u|^p`.
    self_weight: f64,
    /// Extended indices whose central difference involves a free node.
    local: Vec<usize>,
    spacing: f64,
}

impl Discretization {
    pub fn new(problem: &DirichletProblem) -> Result<Self> {
        let g = *problem.g.grid();
        let params = problem.params();
        let dim = g.dim();
        let n = g.n_per_axis();
        let h = g.spacing();
        let w = g.cell_weight();
        let p = params.p;
        let radius = 2.0 * g.half_width() * math::sqrt(dim as f64) + 0.5 * h;
        let kmax = math::ceil(radius / h) as i64;
        let rule = problem.g.exterior();
        let ff = rule.far_field();
        let outside_constant = match ff.compact_radius {
            Some(r) => ff.growth == 0.0 && r <= g.half_width() + 0.5 * h,
            None => false,
        };
        let far = if outside_constant {
            FarModel::Constant(ff.constant)
        } else if ff.growth > 0.0 {
            let affine_only = rule.terms().iter().all(|t| {
                matches!(
                    t.function,
                    crate::grid::TestFunction::Affine { .. } | crate::grid::TestFunction::Constant(_)
                )
            });
            if p == 2.0 && affine_only {
                FarModel::AffineQuadratic
            } else {
                FarModel::Truncated
            }
        } else {
            FarModel::Limit(ff.constant)
        };
        let skip_outside = matches!(far, FarModel::Constant(_));
        let margin = if skip_outside { 0 } else { kmax };
        // 1D: exact cell-pair integrals of |x-y|^{p-1-sp} against the
        // difference quotient; 2D: midpoint rule
        let a = p - 1.0 - params.sp();
        let pair = if dim == 1 { pair_weights_1d(a, kmax as usize + 1) } else { Vec::new() };
        let scale = math::pow(h, a + 2.0);
        let mut offsets = Vec::new();
        let k1_range = if dim == 2 { kmax } else { 0 };
        for k1 in -k1_range..=k1_range {
            for k0 in -kmax..=kmax {
                let positive = k1 > 0 || (k1 == 0 && k0 > 0);
                if !positive {
                    continue;
                }
                let z = [k0 as f64 * h, k1 as f64 * h];
                if norm(z) < radius {
                    let wk = if dim == 1 {
                        let k = k0 as f64;
                        scale * pair[k0 as usize] / (math::abs_pow(k * h, p) * w)
                            / problem.kernel.modulation_at(z)
                    } else {
                        w * problem.kernel.weight(z)
                    };
                    offsets.push(([k0, k1], wk));
                }
            }
        }
        let ext_n = n as i64 + 2 * margin;
        let ext_len = if dim == 1 { ext_n } else { ext_n * ext_n } as usize;
        let ext_index = |m: [i64; 2]| -> usize {
            let a = (m[0] + margin) as usize;
            if dim == 1 {
                a
            } else {
                (m[1] + margin) as usize * ext_n as usize + a
            }
        };
        let mut base = vec![0.0; ext_len];
        for (e, slot) in base.iter_mut().enumerate() {
            let (a, b) = if dim == 1 { (e as i64, margin) } else { (e as i64 % ext_n, e as i64 / ext_n) };
            let m = [a - margin, if dim == 1 { 0 } else { b - margin }];
            *slot = problem.g.at_multi(m);
        }
        let free = g.restrict(&problem.omega);
        let free_ext: Vec<usize> = free.iter().map(|&i| ext_index(g.multi(i))).collect();
        let mut is_free_ext = vec![false; ext_len];
        for &e in &free_ext {
            is_free_ext[e] = true;
        }
        let tail_mass = problem.kernel.tail_mass(radius);
        let tails: Vec<(f64, f64)> = par::map(free.len(), |k| {
            let i = free[k];
            match far {
                FarModel::Constant(c) => {
                    let mut out = 0.0;
                    for (off, wk) in &offsets {
                        for sgn in [1i64, -1] {
                            if g.offset(i, [sgn * off[0], sgn * off[1]]).is_none() {
                                out += wk;
                            }
                        }
                    }
                    (out + tail_mass, c)
                }
                FarModel::AffineQuadratic => (tail_mass, rule.eval(g.point(i), dim)),
                FarModel::Limit(c) => (tail_mass, c),
                FarModel::Truncated => (0.0, 0.0),
            }
        });
        let f: Vec<f64> = free.iter().map(|&i| problem.f.values()[i]).collect();
        let (self_weight, local) = if dim == 1 {
            let mut local: Vec<usize> = Vec::new();
            for &e in &free_ext {
                for c in [e - 1, e, e + 1] {
                    if local.last().map_or(true, |&l| l < c) {
                        local.push(c);
                    }
                }
            }
            (scale * pair[0] / problem.kernel.modulation_at([0.5 * h, 0.0]), local)
        } else {
            (0.0, Vec::new())
        };
        Ok(Discretization {
            n,
            dim,
            p,
            w,
            radius,
            offsets,
            margin,
            base,
            free,
            free_ext,
            is_free_ext,
            tail: tails.iter().map(|t| t.0).collect(),
            tail_value: tails.iter().map(|t| t.1).collect(),
            far,
            f,
            lower: problem.lower_order,
            skip_outside,
            self_weight,
            local,
            spacing: h,
        })
    }

    /// Radius of the offset stencil.
    pub fn stencil_radius(&self) -> f64 {
        self.radius
    }

    /// Free (interior) node indices in grid order.
    pub fn free_nodes(&self) -> &[usize] {
        &self.free
    }

    /// Aggregated tail weight of the `k`-th free node.
    pub fn tail_weight(&self, k: usize) -> f64 {
        self.tail[k]
    }

    pub fn is_truncated(&self) -> bool {
        matches!(self.far, FarModel::Truncated)
    }

    fn ext_n(&self) -> i64 {
        self.n as i64 + 2 * self.margin
    }

    #[inline]
    fn central(&self, ext: &[f64], i: usize) -> f64 {
        (ext[i + 1] - ext[i - 1]) / (2.0 * self.spacing)
    }

    /// `(1/p) W₀ Σ |∇u|^p` over the self cells.
    fn local_energy(&self, ext: &[f64]) -> f64 {
        if self.local.is_empty() {
            return 0.0;
        }
        let terms: Vec<f64> = self.local.iter().map(|&i| math::abs_pow(self.central(ext, i), self.p)).collect();
        par::ordered_sum(&terms) * self.self_weight / self.p
    }

    fn lift(&self, v: &[f64]) -> Vec<f64> {
        let mut e = self.base.clone();
        for (k, &idx) in self.free_ext.iter().enumerate() {
            e[idx] = v[k];
        }
        e
    }

    #[inline]
    fn neighbour(&self, e: usize, off: [i64; 2], sign: i64) -> Option<usize> {
        let en = self.ext_n();
        let (a, b) = if self.dim == 1 { (e as i64, 0) } else { (e as i64 % en, e as i64 / en) };
        let a2 = a + sign * off[0];
        let b2 = b + sign * off[1];
        if a2 < 0 || a2 >= en || (self.dim == 2 && (b2 < 0 || b2 >= en)) {
            return None;
        }
        Some(if self.dim == 1 { a2 as usize } else { (b2 * en + a2) as usize })
    }

    /// Calls `visit(value_y, weight, y_is_free)` for every stencil partner
    /// of the free node at extended index `e`, in `±z` paired order.
    #[inline]
    fn for_partners(&self, ext: &[f64], e: usize, mut visit: impl FnMut(f64, f64, bool, f64, bool)) {
        for (off, wk) in &self.offsets {
            let up = self.neighbour(e, *off, 1);
            let dn = self.neighbour(e, *off, -1);
            let (vu, fu) = match up {
                Some(j) => (ext[j], self.is_free_ext[j]),
                None => {
                    debug_assert!(self.skip_outside);
                    (f64::NAN, false)
                }
            };
            let (vd, fd) = match dn {
                Some(j) => (ext[j], self.is_free_ext[j]),
                None => (f64::NAN, false),
            };
            if up.is_none() && dn.is_none() {
                continue;
            }
            visit(vu, *wk, fu, vd, fd);
        }
    }

    /// Gradient entries `(1/w) ∂E/∂u(x)` at the free nodes, i.e. the discrete
    /// `(-Δ_{p,K})^s u - f (- Φ(u))`.
    pub fn gradient(&self, v: &[f64]) -> Vec<f64> {
        let ext = self.lift(v);
        let p = self.p;
        par::map(self.free.len(), |k| {
            let e = self.free_ext[k];
            let x = v[k];
            let mut acc = 0.0;
            self.for_partners(&ext, e, |vu, wk, _, vd, _| {
                let mut pair = 0.0;
                if !vu.is_nan() {
                    pair += jp(x - vu, p);
                }
                if !vd.is_nan() {
                    pair += jp(x - vd, p);
                }
                acc += pair * wk;
            });
            let mut out = 2.0 * acc + 2.0 * jp(x - self.tail_value[k], p) * self.tail[k] - self.f[k];
            if self.self_weight > 0.0 {
                let left = jp(self.central(&ext, e - 1), p);
                let right = jp(self.central(&ext, e + 1), p);
                out += self.self_weight / (2.0 * self.spacing * self.w) * (left - right);
            }
            if let Some(lo) = &self.lower {
                out -= lo.phi(x);
            }
            out
        })
    }

    /// Discrete energy (up to a constant from pairs of fixed nodes).
    pub fn energy(&self, v: &[f64]) -> f64 {
        let ext = self.lift(v);
        let p = self.p;
        let rows = par::map(self.free.len(), |k| {
            let e = self.free_ext[k];
            let x = v[k];
            let mut acc = 0.0;
            self.for_partners(&ext, e, |vu, wk, fu, vd, fd| {
                if !vu.is_nan() {
                    acc += math::abs_pow(x - vu, p) * wk * if fu { 1.0 } else { 2.0 };
                }
                if !vd.is_nan() {
                    acc += math::abs_pow(x - vd, p) * wk * if fd { 1.0 } else { 2.0 };
                }
            });
            let mut row = acc / p + 2.0 / p * math::abs_pow(x - self.tail_value[k], p) * self.tail[k]
                - self.f[k] * x;
            if let Some(lo) = &self.lower {
                row -= lo.lambda / lo.q * math::abs_pow(x, lo.q);
            }
            row * self.w
        });
        par::ordered_sum(&rows) + self.local_energy(&ext)
    }

    /// `E(v + αd) - E(v)`, evaluated term by term from the increments so
    /// that decreases far below the energy's own rounding stay visible.
    pub fn energy_change(&self, v: &[f64], d: &[f64], alpha: f64) -> f64 {
        let ext = self.lift(v);
        let mut step = vec![0.0; self.base.len()];
        for (k, &idx) in self.free_ext.iter().enumerate() {
            step[idx] = alpha * d[k];
        }
        let p = self.p;
        let rows = par::map(self.free.len(), |k| {
            let e = self.free_ext[k];
            let x = v[k];
            let dx = step[e];
            let mut acc = 0.0;
            for (off, wk) in &self.offsets {
                for sign in [1i64, -1] {
                    if let Some(j) = self.neighbour(e, *off, sign) {
                        let c = if self.is_free_ext[j] { 1.0 } else { 2.0 };
                        acc += c * wk * pow_increment(x - ext[j], dx - step[j], p);
                    }
                }
            }
            let tv = self.tail_value[k];
            let mut row = acc / p + 2.0 / p * pow_increment(x - tv, dx, p) * self.tail[k] - self.f[k] * dx;
            if let Some(lo) = &self.lower {
                row -= lo.lambda / lo.q * pow_increment(x, dx, lo.q);
            }
            row * self.w
        });
        let local: Vec<f64> = self
            .local
            .iter()
            .map(|&i| pow_increment(self.central(&ext, i), self.central(&step, i), p))
            .collect();
        par::ordered_sum(&rows) + par::ordered_sum(&local) * self.self_weight / p
    }

    /// Second derivative of `α ↦ E(v + αd)` at `α = 0`.
    pub fn curvature(&self, v: &[f64], d: &[f64]) -> f64 {
        let ext = self.lift(v);
        let dext = self.lift(d);
        let p = self.p;
        let c2 = |t: f64| if p == 2.0 { 1.0 } else { (p - 1.0) * math::abs_pow(t, p - 2.0) };
        let rows = par::map(self.free.len(), |k| {
            let e = self.free_ext[k];
            let x = v[k];
            let dx = d[k];
            let mut acc = 0.0;
            for (off, wk) in &self.offsets {
                for sign in [1i64, -1] {
                    if let Some(j) = self.neighbour(e, *off, sign) {
                        let dd = if self.is_free_ext[j] { dx - dext[j] } else { dx };
                        let c = if self.is_free_ext[j] { 1.0 } else { 2.0 };
                        acc += c * wk * c2(x - ext[j]) * dd * dd;
                    }
                }
            }
            let mut row = acc + 2.0 * c2(x - self.tail_value[k]) * self.tail[k] * dx * dx;
            if let Some(lo) = &self.lower {
                row -= lo.lambda * (lo.q - 1.0) * math::abs_pow(x, lo.q - 2.0) * dx * dx;
            }
            row * self.w
        });
        let mut dz = vec![0.0; self.base.len()];
        for (k, &idx) in self.free_ext.iter().enumerate() {
            dz[idx] = d[k];
        }
        let local: Vec<f64> = self
            .local
            .iter()
            .map(|&i| {
                let dg = self.central(&dz, i);
                c2(self.central(&ext, i)) * dg * dg
            })
            .collect();
        par::ordered_sum(&rows) + par::ordered_sum(&local) * self.self_weight
    }

    /// Self-cell weight of the one-dimensional energy (zero in 2D).
    pub fn self_weight(&self) -> f64 {
        self.self_weight
    }

    /// Lower bound on the smallest curvature of the `p = 2` energy per unit
    /// mass: `min_x 2 (Σ_{fixed} w/K + tail)`.
    pub fn curvature_floor(&self) -> f64 {
        let ext = &self.base;
        let mut best = f64::INFINITY;
        for k in 0..self.free.len() {
            let e = self.free_ext[k];
            let mut fixed = 0.0;
            self.for_partners(ext, e, |vu, wk, fu, vd, fd| {
                if !vu.is_nan() && !fu {
                    fixed += wk;
                }
                if !vd.is_nan() && !fd {
                    fixed += wk;
                }
            });
            best = best.min(2.0 * (fixed + self.tail[k]));
        }
        best
    }

    fn assemble(&self, problem: &DirichletProblem, v: &[f64]) -> Result<GridFunction> {
        let mut vals = problem.g.values().to_vec();
        for (k, &i) in self.free.iter().enumerate() {
            vals[i] = v[k];
        }
        GridFunction::new(*problem.g.grid(), vals, problem.g.exterior().clone())
    }

    fn initial(&self, problem: &DirichletProblem, init: &Init) -> Result<Vec<f64>> {
        Ok(match init {
            Init::Exterior => self.free.iter().map(|&i| problem.g.values()[i]).collect(),
            Init::Zero => vec![0.0; self.free.len()],
            Init::Random(seed) => {
                let mut r = Rng::seeded(*seed);
                (0..self.free.len()).map(|_| r.uniform(-1.0, 1.0)).collect()
            }
            Init::Values(v) => {
                if v.len() != self.free.len() {
                    return param(format!(
                        "initial guess has {} values, Ω has {} nodes",
                        v.len(),
                        self.free.len()
                    ));
                }
                v.clone()
            }
        })
    }
}

/// `|e + δ|^p - |e|^p` without cancellation for small `δ`.
fn pow_increment(e: f64, delta: f64, p: f64) -> f64 {
    if delta == 0.0 {
        return 0.0;
    }
    if p == 2.0 {
        return delta * (2.0 * e + delta);
    }
    if e == 0.0 {
        return math::abs_pow(delta, p);
    }
    let r = delta / e;
    if r > -1.0 {
        math::abs_pow(e, p) * libm::expm1(p * libm::log1p(r))
    } else {
        math::abs_pow(e + delta, p) - math::abs_pow(e, p)
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(math::abs(*x)))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        s += x * y;
    }
    s
}

/// `E(u)` for a grid function agreeing with `g` outside `Ω`.
pub fn energy(u: &GridFunction, problem: &DirichletProblem) -> Result<f64> {
    let d = Discretization::new(problem)?;
    let v: Vec<f64> = d.free.iter().map(|&i| u.values()[i]).collect();
    Ok(d.energy(&v))
}

/// Gradient entries on `Ω` as a grid function (zero elsewhere).
pub fn energy_gradient(u: &GridFunction, problem: &DirichletProblem) -> Result<GridFunction> {
    let d = Discretization::new(problem)?;
    let v: Vec<f64> = d.free.iter().map(|&i| u.values()[i]).collect();
    let gr = d.gradient(&v);
    let mut vals = vec![0.0; u.grid().len()];
    for (k, &i) in d.free.iter().enumerate() {
        vals[i] = gr[k];
    }
    GridFunction::new(*u.grid(), vals, crate::grid::ExteriorRule::zero())
}

/// Minimizes the energy by Polak-Ribière nonlinear conjugate gradients with
/// a curvature-predicted first trial step and Armijo backtracking. Every
/// accepted step strictly lowers the energy, so the history is decreasing.
pub fn solve_dirichlet(problem: &DirichletProblem, config: &SolverConfig) -> Result<Solution> {
    config.validate()?;
    let d = Discretization::new(problem)?;
    let mut warnings = Vec::new();
    if d.is_truncated() {
        warnings.push(String::from(
            "growing exterior with p > 2: interactions beyond the stencil radius are dropped",
        ));
    }
    if let Some(lo) = problem.lower_order {
        let convex = lo.lambda <= 0.0
            || (problem.params().p == 2.0 && lo.lipschitz() < d.curvature_floor());
        if !convex {
            warnings.push(format!(
                "lower-order term with Lipschitz bound {} may break convexity; using fixed-point splitting",
                lo.lipschitz()
            ));
            return solve_split(problem, config, lo, warnings);
        }
    }
    let v0 = d.initial(problem, &config.init)?;
    let (v, history, residual, iterations) = descend(&d, v0, config)?;
    Ok(Solution { u: d.assemble(problem, &v)?, energy_history: history, residual, iterations, warnings })
}

fn descend(
    d: &Discretization,
    mut v: Vec<f64>,
    config: &SolverConfig,
) -> Result<(Vec<f64>, Vec<f64>, f64, usize)> {
    let mut e = d.energy(&v);
    let mut history = vec![e];
    let mut g = d.gradient(&v);
    let mut res = max_abs(&g);
    let mut dir: Vec<f64> = g.iter().map(|x| -x).collect();
    let mut last_alpha = 1.0;
    for it in 0..config.max_iterations {
        if res <= config.gradient_tolerance {
            return Ok((v, history, res, it));
        }
        let mut slope = dot(&g, &dir);
        if !(slope < 0.0) {
            dir = g.iter().map(|x| -x).collect();
            slope = dot(&g, &dir);
        }
        // energy gradient is w·g; the step search works with it directly
        let wslope = slope * d.w;
        let curv = d.curvature(&v, &dir);
        let mut alpha = if curv > 0.0 && curv.is_finite() { -wslope / curv } else { 2.0 * last_alpha };
        let mut accepted = None;
        for _ in 0..80 {
            let change = d.energy_change(&v, &dir, alpha);
            if change < 0.0 && change <= config.armijo * alpha * wslope {
                accepted = Some(change);
                break;
            }
            alpha *= config.shrink;
        }
        let Some(change) = accepted else {
            return Err(Error::IterationLimit { iterations: it, residual: res, history });
        };
        last_alpha = alpha;
        for (x, y) in v.iter_mut().zip(&dir) {
            *x += alpha * y;
        }
        let next = e + change;
        if next < e {
            history.push(next);
        }
        e = next;
        let g_new = d.gradient(&v);
        let mut num = 0.0;
        for (a, b) in g_new.iter().zip(&g) {
            num += a * (a - b);
        }
        let den = dot(&g, &g);
        let beta = if den > 0.0 { (num / den).max(0.0) } else { 0.0 };
        for (x, gn) in dir.iter_mut().zip(&g_new) {
            *x = -gn + beta * *x;
        }
        g = g_new;
        res = max_abs(&g);
    }
    if res <= config.gradient_tolerance {
        return Ok((v, history, res, config.max_iterations));
    }
    Err(Error::IterationLimit { iterations: config.max_iterations, residual: res, history })
}

/// Fixed-point splitting `u_{k+1} = argmin E₀(u) - Σ (f + Φ(u_k)) u w`.
fn solve_split(
    problem: &DirichletProblem,
    config: &SolverConfig,
    lo: LowerOrder,
    mut warnings: Vec<String>,
) -> Result<Solution> {
    let mut base = problem.clone();
    base.lower_order = None;
    let mut d = Discretization::new(&base)?;
    let f0 = d.f.clone();
    let mut v = d.initial(problem, &config.init)?;
    let mut history = Vec::new();
    let mut iterations = 0;
    for outer in 0..200 {
        for (k, fk) in d.f.iter_mut().enumerate() {
            *fk = f0[k] + lo.phi(v[k]);
        }
        let (v_new, h, _, its) = descend(&d, v.clone(), config)?;
        iterations += its;
        let change = v_new.iter().zip(&v).fold(0.0f64, |m, (a, b)| m.max(math::abs(a - b)));
        history.extend(h);
        v = v_new;
        if change <= 10.0 * config.gradient_tolerance {
            let mut full = Discretization::new(problem)?;
            full.f = f0.clone();
            let residual = max_abs(&full.gradient(&v));
            return Ok(Solution { u: d.assemble(problem, &v)?, energy_history: history, residual, iterations, warnings });
        }
        if outer == 199 {
            warnings.push(String::from("fixed-point splitting did not settle"));
        }
    }
    Err(Error::IterationLimit { iterations, residual: f64::NAN, history })
}

/// Test functions for the weak form, supported in `Ω' ⋐ Ω`.
#[derive(Debug, Clone)]
pub struct TestBank {
    pub omega_prime: Ball,
    pub functions: Vec<GridFunction>,
}

impl TestBank {
    /// Indicators of the nodes of `Ω'` plus the given extra functions.
    pub fn standard(u: &GridFunction, omega_prime: Ball, extra: Vec<GridFunction>) -> Result<Self> {
        let g = *u.grid();
        let mut functions = Vec::new();
        for i in g.restrict(&omega_prime) {
            let mut vals = vec![0.0; g.len()];
            vals[i] = 1.0;
            functions.push(GridFunction::new(g, vals, crate::grid::ExteriorRule::zero())?);
        }
        functions.extend(extra);
        Ok(TestBank { omega_prime, functions })
    }
}

/// `max_φ |Σ_{x,y} J_p(u(x)-u(y))/K(x-y) (φ(x)-φ(y)) w² - Σ f φ w|`.
pub fn weak_residual(u: &GridFunction, problem: &DirichletProblem, bank: &TestBank) -> Result<f64> {
    bank.omega_prime.gap_to(&problem.omega)?;
    let d = Discretization::new(problem)?;
    let v: Vec<f64> = d.free.iter().map(|&i| u.values()[i]).collect();
    let grad = d.gradient(&v);
    let g = u.grid();
    let mut worst: f64 = 0.0;
    for phi in &bank.functions {
        if phi.grid() != g {
            return Err(Error::InvalidTest(String::from("test function on a different grid")));
        }
        for i in 0..g.len() {
            if phi.values()[i] != 0.0 && !bank.omega_prime.contains(g.point(i)) {
                return Err(Error::InvalidTest(String::from("test function does not vanish outside Ω'")));
            }
        }
        let mut s = 0.0;
        for (k, &i) in d.free.iter().enumerate() {
            s += grad[k] * phi.values()[i];
        }
        worst = worst.max(math::abs(s * d.w));
    }
    Ok(worst)
}
