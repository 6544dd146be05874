//! Grid-aligned translations and differences, C² cut-offs, discrete
//! gradients and heat-kernel smoothing.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{param, Error, Result};
use crate::grid::{norm, sub, Ball, ExteriorRule, Grid, GridFunction, Point};
use crate::math;
use crate::par;

/// A translation vector `h`; applied to grid functions it must be an exact
/// multiple of the spacing along each axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Translation(pub Point);

impl Translation {
    pub fn new(h: Point) -> Self {
        Translation(h)
    }

    /// `k · spacing · e_axis`.
    pub fn along(grid: &Grid, axis: usize, k: i64) -> Self {
        let mut h = [0.0, 0.0];
        h[axis] = k as f64 * grid.spacing();
        Translation(h)
    }

    pub fn magnitude(&self) -> f64 {
        norm(self.0)
    }
}

/// `x ↦ u(x + h)`; nodes whose shift leaves the box read the exterior rule.
pub fn translate(u: &GridFunction, h: Translation) -> Result<GridFunction> {
    let g = *u.grid();
    let k = g.aligned_offset(h.0)?;
    let values = (0..g.len()).map(|i| u.at_offset(i, k)).collect();
    GridFunction::new(g, values, u.exterior().shifted(h.0))
}

/// `δ_h u = u(· + h) - u`.
pub fn delta_h(u: &GridFunction, h: Translation) -> Result<GridFunction> {
    let g = *u.grid();
    let k = g.aligned_offset(h.0)?;
    let vals = u.values();
    let values = (0..g.len()).map(|i| u.at_offset(i, k) - vals[i]).collect();
    GridFunction::new(g, values, u.exterior().shifted(h.0).plus(-1.0, u.exterior()))
}

/// `δ²_h u = δ_h(δ_h u)`, i.e. `u(·+2h) - 2u(·+h) + u`.
pub fn delta2_h(u: &GridFunction, h: Translation) -> Result<GridFunction> {
    delta_h(&delta_h(u, h)?, h)
}

/// Quintic smoothstep `10ξ³ - 15ξ⁴ + 6ξ⁵` and its first two derivatives.
fn smoothstep(xi: f64) -> (f64, f64, f64) {
    if xi <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    if xi >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let x2 = xi * xi;
    let v = x2 * xi * (10.0 + xi * (-15.0 + 6.0 * xi));
    let d1 = 30.0 * x2 * (1.0 - xi) * (1.0 - xi);
    let d2 = 60.0 * xi * (1.0 - xi) * (1.0 - 2.0 * xi);
    (v, d1, d2)
}

/// Radial C² cut-off: `η = 1` on `B_r`, `η = 0` outside `B_{(R+r)/2}`, with
/// the quintic smoothstep in between.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoff {
    pub center: Point,
    pub inner: f64,
    pub outer: f64,
    /// The `R` of the pair `B_r ⋐ B_R`; the support ends at `(R + r)/2`.
    pub big_r: f64,
    dim: usize,
}

/// `max |P'|` of the smoothstep, attained at `ξ = 1/2`.
const STEP_D1: f64 = 1.875;
/// `max |P''|`, attained at `ξ = (3 - √3)/6`.
const STEP_D2: f64 = 5.773_502_691_896_258;

impl Cutoff {
    pub fn new(center: Point, r: f64, big_r: f64, dim: usize) -> Result<Self> {
        if !(r > 0.0 && r < big_r) {
            return param(format!("cut-off needs 0 < r < R, got r={r}, R={big_r}"));
        }
        Ok(Cutoff { center, inner: r, outer: 0.5 * (r + big_r), big_r, dim })
    }

    fn width(&self) -> f64 {
        self.outer - self.inner
    }

    /// `(η, η', η'')` in the radial variable.
    pub fn profile(&self, rho: f64) -> (f64, f64, f64) {
        let w = self.width();
        let (v, d1, d2) = smoothstep((rho - self.inner) / w);
        (1.0 - v, -d1 / w, -d2 / (w * w))
    }

    pub fn eval(&self, x: Point) -> f64 {
        self.profile(norm(sub(x, self.center))).0
    }

    pub fn gradient_norm(&self, x: Point) -> f64 {
        math::abs(self.profile(norm(sub(x, self.center))).1)
    }

    /// Operator norm of the Hessian: `max(|η''|, |η'|/ρ)` in two dimensions.
    pub fn hessian_norm(&self, x: Point) -> f64 {
        let rho = norm(sub(x, self.center));
        let (_, d1, d2) = self.profile(rho);
        if self.dim == 1 || rho == 0.0 {
            math::abs(d2)
        } else {
            math::abs(d2).max(math::abs(d1) / rho)
        }
    }

    /// `c_N` with `|∇η| ≤ c_N/(R - r)`.
    pub fn gradient_constant(&self) -> f64 {
        STEP_D1 * (self.big_r - self.inner) / self.width()
    }

    /// `c'_N` with `|D²η| ≤ c'_N/(R - r)²`.
    pub fn hessian_constant(&self) -> f64 {
        let d = self.big_r - self.inner;
        let radial = STEP_D2 * d * d / (self.width() * self.width());
        if self.dim == 1 {
            radial
        } else {
            radial.max(STEP_D1 / self.width() / self.inner * d * d)
        }
    }

    /// Support ball `B_{(R+r)/2}`.
    pub fn support(&self) -> Ball {
        Ball { center: self.center, radius: self.outer }
    }

    /// Samples `η` on the grid; the support must stay off the box rim.
    pub fn sample(&self, grid: &Grid) -> Result<GridFunction> {
        let e = grid.half_width() - grid.spacing();
        for j in 0..grid.dim() {
            if math::abs(self.center[j]) + self.outer > e {
                return Err(Error::Domain(format!(
                    "cut-off support radius {} leaves the box",
                    self.outer
                )));
            }
        }
        let values = (0..grid.len()).map(|i| self.eval(grid.point(i))).collect();
        GridFunction::new(*grid, values, ExteriorRule::zero())
    }

    /// `max |∇_h η| · (R - r)` with central differences on the grid.
    pub fn measured_gradient_constant(&self, grid: &Grid) -> Result<f64> {
        let g = discrete_gradient(&self.sample(grid)?);
        Ok(g.max_norm() * (self.big_r - self.inner))
    }
}

/// Cut-off for the pair `B_r ⋐ B_R` centred at the origin.
pub fn make_cutoff(r: f64, big_r: f64, grid: &Grid) -> Result<Cutoff> {
    Cutoff::new([0.0, 0.0], r, big_r, grid.dim())
}

/// Vector-valued grid function, one component per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub grid: Grid,
    pub components: Vec<Vec<f64>>,
}

impl VectorField {
    pub fn norm_at(&self, i: usize) -> f64 {
        let mut s = 0.0;
        for c in &self.components {
            s += c[i] * c[i];
        }
        math::sqrt(s)
    }

    pub fn max_norm(&self) -> f64 {
        (0..self.grid.len()).fold(0.0, |m, i| m.max(self.norm_at(i)))
    }

    /// `Σ |∇u|^p w` over the node set.
    pub fn lp_pow(&self, nodes: &[usize], p: f64) -> f64 {
        let w = self.grid.cell_weight();
        nodes.iter().map(|&i| math::abs_pow(self.norm_at(i), p)).sum::<f64>() * w
    }

    pub fn component(&self, axis: usize) -> Result<GridFunction> {
        GridFunction::new(self.grid, self.components[axis].clone(), ExteriorRule::zero())
    }
}

/// Central differences inside, one-sided differences on the box faces.
pub fn discrete_gradient(u: &GridFunction) -> VectorField {
    let g = *u.grid();
    let h = g.spacing();
    let n = g.n_per_axis() as i64;
    let v = u.values();
    let components = (0..g.dim())
        .map(|axis| {
            (0..g.len())
                .map(|i| {
                    let m = g.multi(i);
                    let mut k = [0i64; 2];
                    k[axis] = 1;
                    if m[axis] == 0 {
                        (v[g.offset(i, k).unwrap()] - v[i]) / h
                    } else if m[axis] == n - 1 {
                        k[axis] = -1;
                        (v[i] - v[g.offset(i, k).unwrap()]) / h
                    } else {
                        let up = v[g.offset(i, k).unwrap()];
                        k[axis] = -1;
                        (up - v[g.offset(i, k).unwrap()]) / (2.0 * h)
                    }
                })
                .collect()
        })
        .collect();
    VectorField { grid: g, components }
}

/// 1D heat kernel `(4πt)^{-1/2} exp(-x²/4t)` and its first two derivatives.
fn heat_1d(x: f64, t: f64, order: u8) -> f64 {
    let g = math::exp(-x * x / (4.0 * t)) / math::sqrt(4.0 * math::PI * t);
    match order {
        0 => g,
        1 => -x / (2.0 * t) * g,
        _ => (x * x / (4.0 * t * t) - 1.0 / (2.0 * t)) * g,
    }
}

/// `𝒦_t ∗ ψ` by the separable lattice sum with the given derivative order
/// per axis. The lattice is extended beyond the box with the exterior rule
/// until the Gaussian falls below `e^{-40}`; the order-zero stencil is
/// normalized to unit discrete mass so constants are reproduced exactly.
pub fn heat_convolve(u: &GridFunction, t: f64, orders: [u8; 2]) -> Result<GridFunction> {
    if !(t > 0.0) {
        return param("heat smoothing time must be positive");
    }
    let g = *u.grid();
    let h = g.spacing();
    let n = g.n_per_axis();
    let m = math::ceil(math::sqrt(160.0 * t) / h) as usize + 1;
    let stencil = |order: u8| -> Vec<f64> {
        let mut s: Vec<f64> = (0..=2 * m)
            .map(|k| heat_1d((k as f64 - m as f64) * h, t, order) * h)
            .collect();
        if order == 0 {
            let mass: f64 = s.iter().sum();
            for v in &mut s {
                *v /= mass;
            }
        }
        s
    };
    let ext = n + 2 * m;
    let at = |a: usize, b: usize| -> f64 {
        u.at_multi([a as i64 - m as i64, if g.dim() == 1 { 0 } else { b as i64 - m as i64 }])
    };
    let sx = stencil(orders[0]);
    let values = if g.dim() == 1 {
        let row: Vec<f64> = (0..ext).map(|a| at(a, 0)).collect();
        par::map(n, |i| {
            let mut acc = 0.0;
            for (k, w) in sx.iter().enumerate() {
                acc += w * row[i + k];
            }
            acc
        })
    } else {
        let sy = stencil(orders[1]);
        // pass along x for every extended row, then along y
        let rows: Vec<Vec<f64>> = par::map(ext, |b| {
            let line: Vec<f64> = (0..ext).map(|a| at(a, b)).collect();
            (0..n)
                .map(|i| {
                    let mut acc = 0.0;
                    for (k, w) in sx.iter().enumerate() {
                        acc += w * line[i + k];
                    }
                    acc
                })
                .collect()
        });
        par::map(n * n, |idx| {
            let (i, j) = (idx % n, idx / n);
            let mut acc = 0.0;
            for (k, w) in sy.iter().enumerate() {
                acc += w * rows[j + k][i];
            }
            acc
        })
    };
    GridFunction::new(g, values, ExteriorRule::zero())
}

/// `ψ_t = 𝒦_t ∗ ψ`.
pub fn heat_smooth(u: &GridFunction, t: f64) -> Result<GridFunction> {
    let mut out = heat_convolve(u, t, [0, 0])?;
    if u.exterior().is_constant() {
        let c = u.exterior().far_field().constant;
        out = out.replace_exterior(ExteriorRule::constant(c));
    }
    Ok(out)
}

/// Pointwise Frobenius norm of `D²ψ_t`.
pub fn heat_hessian_norm(u: &GridFunction, t: f64) -> Result<Vec<f64>> {
    if u.dim() == 1 {
        let d2 = heat_convolve(u, t, [2, 0])?;
        return Ok(d2.values().iter().map(|v| math::abs(*v)).collect());
    }
    let a = heat_convolve(u, t, [2, 0])?;
    let b = heat_convolve(u, t, [1, 1])?;
    let c = heat_convolve(u, t, [0, 2])?;
    Ok((0..u.grid().len())
        .map(|i| {
            let (x, y, z) = (a.values()[i], b.values()[i], c.values()[i]);
            math::sqrt(x * x + 2.0 * y * y + z * z)
        })
        .collect())
}

/// `∂_t ψ_t = Δψ_t`, pointwise.
pub fn heat_time_derivative(u: &GridFunction, t: f64) -> Result<Vec<f64>> {
    let a = heat_convolve(u, t, [2, 0])?;
    if u.dim() == 1 {
        return Ok(a.into_values());
    }
    let c = heat_convolve(u, t, [0, 2])?;
    Ok(a.values().iter().zip(c.values()).map(|(x, y)| x + y).collect())
}

/// `Σ |∇𝒦_t(y)| w` over the grid nodes (kernel centred at the origin).
pub fn heat_kernel_gradient_l1(grid: &Grid, t: f64) -> f64 {
    let n = grid.dim() as f64;
    let w = grid.cell_weight();
    let c = math::pow(4.0 * math::PI * t, -n / 2.0);
    (0..grid.len())
        .map(|i| {
            let r = norm(grid.point(i));
            c * math::exp(-r * r / (4.0 * t)) * r / (2.0 * t)
        })
        .sum::<f64>()
        * w
}
