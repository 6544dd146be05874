//! Uniform grids on `[-L, L]^N`, grid functions with symbolic exterior
//! data, balls, and closed-form test functions.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{param, Error, Result};
use crate::math;

/// A point of `ℝ^N`; in one dimension the second coordinate is zero.
pub type Point = [f64; 2];

#[inline]
pub fn norm(x: Point) -> f64 {
    math::sqrt(x[0] * x[0] + x[1] * x[1])
}

#[inline]
pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn add(a: Point, b: Point) -> Point {
    [a[0] + b[0], a[1] + b[1]]
}

#[inline]
fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    half_width: f64,
    n: usize,
    spacing: f64,
}

impl Grid {
    pub fn new(dim: usize, half_width: f64, n_per_axis: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return param(format!("dimension must be 1 or 2, got {dim}"));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return param("box half-width must be positive");
        }
        if n_per_axis < 8 {
            return param(format!("need at least 8 nodes per axis, got {n_per_axis}"));
        }
        Ok(Grid {
            dim,
            half_width,
            n: n_per_axis,
            spacing: 2.0 * half_width / (n_per_axis - 1) as f64,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n_per_axis(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Total number of nodes `n^N`.
    pub fn len(&self) -> usize {
        if self.dim == 1 {
            self.n
        } else {
            self.n * self.n
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight of one node cell, `spacing^N`.
    pub fn cell_weight(&self) -> f64 {
        math::powi(self.spacing, self.dim as i32)
    }

    #[inline]
    pub fn coord(&self, i: i64) -> f64 {
        -self.half_width + i as f64 * self.spacing
    }

    /// Axis indices of node `idx` (`x` varies fastest).
    #[inline]
    pub fn multi(&self, idx: usize) -> [i64; 2] {
        if self.dim == 1 {
            [idx as i64, 0]
        } else {
            [(idx % self.n) as i64, (idx / self.n) as i64]
        }
    }

    #[inline]
    pub fn flat(&self, m: [i64; 2]) -> Option<usize> {
        let n = self.n as i64;
        if m[0] < 0 || m[0] >= n {
            return None;
        }
        if self.dim == 1 {
            return Some(m[0] as usize);
        }
        if m[1] < 0 || m[1] >= n {
            return None;
        }
        Some((m[1] * n + m[0]) as usize)
    }

    #[inline]
    pub fn point_of(&self, m: [i64; 2]) -> Point {
        if self.dim == 1 {
            [self.coord(m[0]), 0.0]
        } else {
            [self.coord(m[0]), self.coord(m[1])]
        }
    }

    #[inline]
    pub fn point(&self, idx: usize) -> Point {
        self.point_of(self.multi(idx))
    }

    /// Node reached from `idx` by the integer offset `k`, if inside the box.
    #[inline]
    pub fn offset(&self, idx: usize, k: [i64; 2]) -> Option<usize> {
        let m = self.multi(idx);
        self.flat([m[0] + k[0], m[1] + k[1]])
    }

    /// Nearest axis indices of an arbitrary point (may lie outside the box).
    pub fn nearest(&self, x: Point) -> [i64; 2] {
        let f = |c: f64| math::round((c + self.half_width) / self.spacing) as i64;
        if self.dim == 1 {
            [f(x[0]), 0]
        } else {
            [f(x[0]), f(x[1])]
        }
    }

    /// Whether `x` lies in the closed cell box `[-L - h/2, L + h/2]^N`
    /// covered by the node cells.
    pub fn covers(&self, x: Point) -> bool {
        let e = self.half_width + 0.5 * self.spacing;
        (0..self.dim).all(|j| math::abs(x[j]) <= e)
    }

    /// Converts a translation vector into an exact integer node offset.
    pub fn aligned_offset(&self, h: Point) -> Result<[i64; 2]> {
        let mut k = [0i64; 2];
        for j in 0..2 {
            if j >= self.dim {
                if h[j] != 0.0 {
                    return Err(Error::Alignment { h: h[j], spacing: self.spacing });
                }
                continue;
            }
            let q = h[j] / self.spacing;
            let r = math::round(q);
            if math::abs(q - r) > 1e-9 * (1.0 + math::abs(q)) {
                return Err(Error::Alignment { h: h[j], spacing: self.spacing });
            }
            k[j] = r as i64;
        }
        Ok(k)
    }

    /// Physical translation of an integer offset.
    pub fn offset_vector(&self, k: [i64; 2]) -> Point {
        [k[0] as f64 * self.spacing, k[1] as f64 * self.spacing]
    }

    /// Nodes with `|x - center| < radius`, in increasing flat order.
    pub fn restrict(&self, ball: &Ball) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| ball.contains(self.point(i)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return param("ball radius must be positive");
        }
        Ok(Ball { center, radius })
    }

    pub fn centered(radius: f64) -> Result<Self> {
        Ball::new([0.0, 0.0], radius)
    }

    #[inline]
    pub fn contains(&self, x: Point) -> bool {
        norm(sub(x, self.center)) < self.radius
    }

    /// Lebesgue measure of the ball in `ℝ^dim`.
    pub fn measure(&self, dim: usize) -> f64 {
        if dim == 1 {
            2.0 * self.radius
        } else {
            math::PI * self.radius * self.radius
        }
    }

    pub fn with_radius(&self, radius: f64) -> Result<Ball> {
        Ball::new(self.center, radius)
    }

    /// `d(self, outer)` for concentric-or-not balls; requires `self ⋐ outer`.
    pub fn gap_to(&self, outer: &Ball) -> Result<f64> {
        let d = outer.radius - self.radius - norm(sub(self.center, outer.center));
        if d > 0.0 {
            Ok(d)
        } else {
            Err(Error::Domain(format!(
                "ball of radius {} is not compactly inside ball of radius {}",
                self.radius, outer.radius
            )))
        }
    }
}

/// Closed-form functions used as oracle inputs. Radial profiles use `|x|`.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    Constant(f64),
    Affine { a: Point, b: f64 },
    /// `|x|^beta`.
    Power { beta: f64 },
    /// `exp(1 - 1/(1 - |x|²/r²))` inside `B_r`, zero outside.
    Bump { radius: f64 },
    /// Normalized Gaussian density with standard deviation `sigma`.
    Gaussian { sigma: f64 },
    /// `(1 - |x|²)_+^exponent`.
    TruncatedParabola { exponent: f64 },
    /// Cardinal B-spline of the given degree rescaled to support `[-w, w]`,
    /// normalized to peak value one; degree 1 is the hat function.
    Spline { degree: u32, width: f64 },
    /// `x ↦ x_1^2`; central differences reproduce its gradient exactly.
    Square,
}

impl TestFunction {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            TestFunction::Constant(c) => c.is_finite(),
            TestFunction::Affine { a, b } => a.iter().all(|v| v.is_finite()) && b.is_finite(),
            TestFunction::Power { beta } => *beta > 0.0,
            TestFunction::Bump { radius } => *radius > 0.0,
            TestFunction::Gaussian { sigma } => *sigma > 0.0,
            TestFunction::TruncatedParabola { exponent } => *exponent > 0.0,
            TestFunction::Spline { degree, width } => *degree >= 1 && *degree <= 7 && *width > 0.0,
            TestFunction::Square => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidTest(format!("{self:?}")))
        }
    }

    pub fn eval(&self, x: Point, dim: usize) -> f64 {
        let r = norm(x);
        match self {
            TestFunction::Constant(c) => *c,
            TestFunction::Affine { a, b } => dot(*a, x) + b,
            TestFunction::Power { beta } => math::abs_pow(r, *beta),
            TestFunction::Bump { radius } => {
                let q = r / radius;
                if q >= 1.0 {
                    0.0
                } else {
                    math::exp(1.0 - 1.0 / (1.0 - q * q))
                }
            }
            TestFunction::Gaussian { sigma } => {
                let s2 = sigma * sigma;
                let norm_c = math::pow(2.0 * math::PI * s2, -(dim as f64) / 2.0);
                norm_c * math::exp(-r * r / (2.0 * s2))
            }
            TestFunction::TruncatedParabola { exponent } => {
                let b = 1.0 - r * r;
                if b <= 0.0 {
                    0.0
                } else {
                    math::pow(b, *exponent)
                }
            }
            TestFunction::Spline { degree, width } => {
                let d = *degree;
                let half = (d + 1) as f64 / 2.0;
                cardinal_bspline(d, r * half / width) / cardinal_bspline(d, 0.0)
            }
            TestFunction::Square => x[0] * x[0],
        }
    }

    /// Radius outside which the function vanishes, if compactly supported
    /// around the origin.
    pub fn support_radius(&self) -> Option<f64> {
        match self {
            TestFunction::Bump { radius } => Some(*radius),
            TestFunction::TruncatedParabola { .. } => Some(1.0),
            TestFunction::Spline { width, .. } => Some(*width),
            TestFunction::Constant(c) if *c == 0.0 => Some(0.0),
            _ => None,
        }
    }

    pub fn tag(&self) -> String {
        match self {
            TestFunction::Constant(c) => format!("constant({c})"),
            TestFunction::Affine { a, b } => format!("affine({};{};{b})", a[0], a[1]),
            TestFunction::Power { beta } => format!("power({beta})"),
            TestFunction::Bump { radius } => format!("bump({radius})"),
            TestFunction::Gaussian { sigma } => format!("gaussian({sigma})"),
            TestFunction::TruncatedParabola { exponent } => format!("truncated_parabola({exponent})"),
            TestFunction::Spline { degree, width } => format!("spline({degree};{width})"),
            TestFunction::Square => String::from("square"),
        }
    }
}

/// Centered cardinal B-spline of degree `d`, supported on `[-(d+1)/2, (d+1)/2]`.
pub fn cardinal_bspline(d: u32, x: f64) -> f64 {
    let half = (d + 1) as f64 / 2.0;
    if math::abs(x) >= half {
        return 0.0;
    }
    let mut fact = 1.0;
    for k in 2..=d {
        fact *= k as f64;
    }
    let mut sum = 0.0;
    let mut binom = 1.0;
    for k in 0..=(d + 1) {
        let t = x + half - k as f64;
        if t > 0.0 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * binom * math::powi(t, d as i32);
        }
        binom = binom * (d + 1 - k) as f64 / (k + 1) as f64;
    }
    sum / fact
}

/// One summand of an exterior rule: `coeff · g(x + shift)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExteriorTerm {
    pub coeff: f64,
    pub shift: Point,
    pub function: TestFunction,
}

/// How a function defined outside the computational box is evaluated.
///
/// A rule is a finite linear combination of shifted closed-form functions;
/// the empty combination is the zero rule. Translations and differences of
/// grid functions stay representable without resampling.
#[derive(Debug, Clone, PartialEq)]
pub struct ExteriorRule {
    terms: Vec<ExteriorTerm>,
    pub truncation_radius: f64,
}

/// Large-`|x|` behaviour of an exterior rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FarField {
    /// Limit value at infinity of the non-growing part.
    pub constant: f64,
    /// Largest power growth among the terms (`0` when bounded).
    pub growth: f64,
    /// `Some(ρ)` when everything except `constant` vanishes outside `B_ρ`.
    pub compact_radius: Option<f64>,
}

pub const DEFAULT_TRUNCATION: f64 = 64.0;

impl ExteriorRule {
    pub fn zero() -> Self {
        ExteriorRule { terms: Vec::new(), truncation_radius: DEFAULT_TRUNCATION }
    }

    pub fn affine(a: Point, b: f64) -> Self {
        Self::closed_form(TestFunction::Affine { a, b })
    }

    pub fn constant(c: f64) -> Self {
        Self::closed_form(TestFunction::Constant(c))
    }

    pub fn closed_form(function: TestFunction) -> Self {
        ExteriorRule {
            terms: alloc::vec![ExteriorTerm { coeff: 1.0, shift: [0.0, 0.0], function }],
            truncation_radius: DEFAULT_TRUNCATION,
        }
    }

    pub fn with_truncation(mut self, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return param("truncation radius must be positive");
        }
        self.truncation_radius = radius;
        Ok(self)
    }

    pub fn terms(&self) -> &[ExteriorTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coeff == 0.0 || t.function == TestFunction::Constant(0.0))
    }

    pub fn eval(&self, x: Point, dim: usize) -> f64 {
        let mut v = 0.0;
        for t in &self.terms {
            v += t.coeff * t.function.eval(add(x, t.shift), dim);
        }
        v
    }

    /// Rule of `x ↦ g(x + h)`.
    pub fn shifted(&self, h: Point) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.shift = add(t.shift, h);
        }
        out
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coeff *= c;
        }
        out
    }

    /// Rule of `g₁ + c·g₂`.
    pub fn plus(&self, c: f64, other: &ExteriorRule) -> Self {
        let mut out = self.clone();
        out.terms.extend(other.scaled(c).terms);
        out
    }

    /// Combined affine part `a·x + b` of the terms, ignoring other tags.
    fn affine_part(&self) -> (Point, f64) {
        let (mut a, mut b) = ([0.0, 0.0], 0.0);
        for t in &self.terms {
            match &t.function {
                TestFunction::Affine { a: ta, b: tb } => {
                    a[0] += t.coeff * ta[0];
                    a[1] += t.coeff * ta[1];
                    b += t.coeff * (dot(*ta, t.shift) + tb);
                }
                TestFunction::Constant(c) => b += t.coeff * c,
                _ => {}
            }
        }
        (a, b)
    }

    pub fn far_field(&self) -> FarField {
        let (a, b) = self.affine_part();
        let mut growth: f64 = if norm(a) > 1e-14 * (1.0 + math::abs(b)) { 1.0 } else { 0.0 };
        let mut compact: Option<f64> = Some(0.0);
        for t in &self.terms {
            if t.coeff == 0.0 {
                continue;
            }
            match &t.function {
                TestFunction::Constant(_) | TestFunction::Affine { .. } => {}
                TestFunction::Power { beta } => {
                    growth = growth.max(*beta);
                    compact = None;
                }
                TestFunction::Square => {
                    growth = growth.max(2.0);
                    compact = None;
                }
                TestFunction::Gaussian { .. } => compact = None,
                other => {
                    let rho = other.support_radius().unwrap_or(f64::INFINITY) + norm(t.shift);
                    compact = compact.map(|c| c.max(rho));
                }
            }
        }
        if growth > 0.0 {
            compact = None;
        }
        FarField { constant: if growth > 0.0 { 0.0 } else { b }, growth, compact_radius: compact }
    }

    /// Whether the rule equals the constant `far_field().constant` everywhere.
    pub fn is_constant(&self) -> bool {
        let f = self.far_field();
        f.growth == 0.0 && f.compact_radius == Some(0.0)
    }

    pub fn kind(&self) -> &'static str {
        if self.is_zero() {
            "zero"
        } else if self.terms.iter().all(|t| {
            matches!(t.function, TestFunction::Affine { .. } | TestFunction::Constant(_))
        }) {
            "affine"
        } else if self.terms.len() == 1 {
            "closed_form"
        } else {
            "composite"
        }
    }

    pub fn describe(&self) -> String {
        let mut s = String::from(self.kind());
        for t in &self.terms {
            s.push_str(&format!(
                " {}*{}@({};{})",
                t.coeff,
                t.function.tag(),
                t.shift[0],
                t.shift[1]
            ));
        }
        s.push_str(&format!(" trunc={}", self.truncation_radius));
        s
    }
}

/// Node values on a grid plus the rule used everywhere off the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
    exterior: ExteriorRule,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>, exterior: ExteriorRule) -> Result<Self> {
        if values.len() != grid.len() {
            return param(format!(
                "expected {} node values, got {}",
                grid.len(),
                values.len()
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            let x = grid.point(i);
            return Err(Error::Sampling { index: i, x: x[0], y: x[1] });
        }
        Ok(GridFunction { grid, values, exterior })
    }

    /// Samples `f` on the nodes; the exterior rule is stored, not sampled.
    pub fn sample(f: &TestFunction, grid: &Grid, exterior: ExteriorRule) -> Result<Self> {
        f.validate()?;
        let values = (0..grid.len()).map(|i| f.eval(grid.point(i), grid.dim())).collect();
        GridFunction::new(*grid, values, exterior)
    }

    /// Samples `f` and uses `f` itself as the exterior rule.
    pub fn exact(f: &TestFunction, grid: &Grid) -> Result<Self> {
        Self::sample(f, grid, ExteriorRule::closed_form(f.clone()))
    }

    pub fn zeros(grid: &Grid) -> Self {
        GridFunction { grid: *grid, values: alloc::vec![0.0; grid.len()], exterior: ExteriorRule::zero() }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn exterior(&self) -> &ExteriorRule {
        &self.exterior
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Value at the point reached from node `idx` by the offset `k`.
    #[inline]
    pub fn at_offset(&self, idx: usize, k: [i64; 2]) -> f64 {
        let m = self.grid.multi(idx);
        self.at_multi([m[0] + k[0], m[1] + k[1]])
    }

    /// Value at lattice position `m` (node value inside the box, rule outside).
    #[inline]
    pub fn at_multi(&self, m: [i64; 2]) -> f64 {
        match self.grid.flat(m) {
            Some(j) => self.values[j],
            None => self.exterior.eval(self.grid.point_of(m), self.grid.dim()),
        }
    }

    /// Evaluation anywhere in `ℝ^N`: nearest node inside the cell box,
    /// exterior rule outside.
    pub fn eval(&self, x: Point) -> f64 {
        if self.grid.covers(x) {
            let m = self.grid.nearest(x);
            let n = self.grid.n_per_axis() as i64 - 1;
            let c = [m[0].clamp(0, n), m[1].clamp(0, n)];
            self.values[self.grid.flat(c).unwrap_or(0)]
        } else {
            self.exterior.eval(x, self.grid.dim())
        }
    }

    pub fn map_values(&self, mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        GridFunction::new(self.grid, self.values.iter().map(|v| f(*v)).collect(), self.exterior.clone())
    }

    /// `c · u`.
    pub fn scaled(&self, c: f64) -> Self {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().map(|v| c * v).collect(),
            exterior: self.exterior.scaled(c),
        }
    }

    /// `u + c · v` on the same grid.
    pub fn plus(&self, c: f64, other: &GridFunction) -> Result<Self> {
        if self.grid != other.grid {
            return param("grid functions live on different grids");
        }
        Ok(GridFunction {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + c * b).collect(),
            exterior: self.exterior.plus(c, &other.exterior),
        })
    }

    /// Nodewise product with a function that vanishes on and outside the
    /// rim of the box; the product has zero exterior.
    pub fn times_compact(&self, other: &GridFunction) -> Result<Self> {
        if self.grid != other.grid {
            return param("grid functions live on different grids");
        }
        if !other.exterior.is_zero() || !vanishes_on_rim(other) {
            return Err(Error::Domain(String::from(
                "multiplier must vanish near the box boundary",
            )));
        }
        Ok(GridFunction {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
            exterior: ExteriorRule::zero(),
        })
    }

    pub fn replace_exterior(mut self, exterior: ExteriorRule) -> Self {
        self.exterior = exterior;
        self
    }

    /// Discrete `L^p` norm over the given node set (`p`-th power).
    pub fn lp_pow(&self, nodes: &[usize], p: f64) -> f64 {
        let w = self.grid.cell_weight();
        let mut s = 0.0;
        for &i in nodes {
            s += math::abs_pow(self.values[i], p);
        }
        s * w
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(math::abs(*v)))
    }
}

fn vanishes_on_rim(u: &GridFunction) -> bool {
    let g = u.grid();
    let last = g.n_per_axis() as i64 - 1;
    (0..g.len()).all(|i| {
        let m = g.multi(i);
        let rim = m[0] == 0 || m[0] == last || (g.dim() == 2 && (m[1] == 0 || m[1] == last));
        !rim || u.values()[i] == 0.0
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_node_grid() {
        let g = Grid::new(1, 1.0, 9).unwrap();
        assert_eq!(g.spacing(), 0.25);
        let nodes: Vec<f64> = (0..9).map(|i| g.point(i)[0]).collect();
        assert_eq!(nodes, [-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn two_d_grid_size() {
        let g = Grid::new(2, 2.0, 16).unwrap();
        assert_eq!(g.len(), 256);
        assert!((g.spacing() - 4.0 / 15.0).abs() < 1e-15);
        assert!(Grid::new(3, 1.0, 8).is_err());
        assert!(Grid::new(1, 1.0, 7).is_err());
    }

    #[test]
    fn restrict_examples() {
        let g = Grid::new(1, 1.0, 9).unwrap();
        let pts = |b: Ball| -> Vec<f64> { g.restrict(&b).iter().map(|&i| g.point(i)[0]).collect() };
        assert_eq!(pts(Ball::centered(0.5).unwrap()), [-0.25, 0.0, 0.25]);
        assert_eq!(pts(Ball::centered(10.0).unwrap()).len(), 9);
        assert!(pts(Ball::new([5.0, 0.0], 0.1).unwrap()).is_empty());
    }

    #[test]
    fn sampling_examples() {
        let g = Grid::new(1, 1.0, 9).unwrap();
        let c = GridFunction::sample(&TestFunction::Constant(1.0), &g, ExteriorRule::zero()).unwrap();
        assert!(c.values().iter().all(|v| *v == 1.0));
        let a = GridFunction::exact(&TestFunction::Affine { a: [1.0, 0.0], b: 0.0 }, &g).unwrap();
        for i in 0..9 {
            assert_eq!(a.values()[i], g.point(i)[0]);
        }
        let p = GridFunction::exact(&TestFunction::Power { beta: 0.5 }, &g).unwrap();
        assert_eq!(p.values()[4], 0.0);
        assert!((p.values()[8] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exterior_rule_algebra() {
        let r = ExteriorRule::affine([2.0, 0.0], 1.0);
        let d = r.shifted([0.5, 0.0]).plus(-1.0, &r);
        assert!((d.eval([7.0, 0.0], 1) - 1.0).abs() < 1e-12);
        let ff = d.far_field();
        assert_eq!(ff.growth, 0.0);
        assert!((ff.constant - 1.0).abs() < 1e-12);
        assert!(d.is_constant());
        assert_eq!(r.far_field().growth, 1.0);
        let b = ExteriorRule::closed_form(TestFunction::Bump { radius: 0.5 }).shifted([1.0, 0.0]);
        assert_eq!(b.far_field().compact_radius, Some(1.5));
    }

    #[test]
    fn bspline_is_a_partition_of_unity() {
        for d in 1..5u32 {
            let s: f64 = (-10..=10).map(|k| cardinal_bspline(d, 0.3 + k as f64)).sum();
            assert!((s - 1.0).abs() < 1e-12, "degree {d}: {s}");
        }
    }
}
