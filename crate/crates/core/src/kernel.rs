//! Parameters `(N, s, p, t, Λ)` and kernels `K(z) = a(z) |z|^{N+sp}` with
//! `1/Λ ≤ a ≤ Λ`. Nonlocal sums weight pairs by `1/K(x - y)`.

use alloc::format;

use crate::error::{param, Error, Result};
use crate::grid::{norm, Point};
use crate::math;
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalParams {
    pub dim: usize,
    pub s: f64,
    pub p: f64,
    pub t: f64,
    pub lambda: f64,
}

impl FractionalParams {
    pub fn new(dim: usize, s: f64, p: f64, t: f64, lambda: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return param(format!("dimension must be 1 or 2, got {dim}"));
        }
        if !(s > 0.0 && s < 1.0) {
            return param(format!("s must lie in (0,1), got {s}"));
        }
        if !(p >= 2.0) || !p.is_finite() {
            return param(format!("p must satisfy p ≥ 2, got {p}"));
        }
        if !(t >= 0.0 && t <= s) {
            return param(format!("t must satisfy 0 ≤ t ≤ s, got t={t}, s={s}"));
        }
        if !(lambda >= 1.0) || !lambda.is_finite() {
            return param(format!("Λ must satisfy Λ ≥ 1, got {lambda}"));
        }
        Ok(FractionalParams { dim, s, p, t, lambda })
    }

    pub fn sp(&self) -> f64 {
        self.s * self.p
    }

    /// Conjugate exponent `p' = p/(p-1)`.
    pub fn p_prime(&self) -> f64 {
        conjugate(self.p)
    }

    /// Kernel homogeneity `N + sp`.
    pub fn order(&self) -> f64 {
        self.dim as f64 + self.sp()
    }
}

/// `p/(p-1)`.
pub fn conjugate(p: f64) -> f64 {
    p / (p - 1.0)
}

/// Measure of the unit sphere `|S^{N-1}|` for `N ∈ {1, 2}`.
pub fn sphere_measure(dim: usize) -> f64 {
    if dim == 1 {
        2.0
    } else {
        2.0 * math::PI
    }
}

/// Bounded even modulation `a(z)` of the standard kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Modulation {
    /// `a ≡ c`; `c = 1` is the standard kernel.
    Constant(f64),
    /// `a(z) = 1 + (Λ-1)/(Λ+1) cos(2θ(z))` (two dimensions only).
    Angular,
    /// `a = inner` on `|z| < radius`, `a = outer` elsewhere.
    RadialStep { inner: f64, outer: f64, radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    params: FractionalParams,
    modulation: Modulation,
}

impl Kernel {
    /// `K(z) = |z|^{N+sp}`.
    pub fn standard(params: FractionalParams) -> Self {
        Kernel { params, modulation: Modulation::Constant(1.0) }
    }

    /// Builds a modulated kernel and certifies the ellipticity sandwich on
    /// deterministic probes.
    pub fn modulated(params: FractionalParams, modulation: Modulation) -> Result<Self> {
        if let Modulation::Angular = modulation {
            if params.dim == 1 && params.lambda != 1.0 {
                return param("angular modulation needs two dimensions (or Λ = 1)");
            }
        }
        if let Modulation::RadialStep { radius, .. } = modulation {
            if !(radius > 0.0) {
                return param("radial step radius must be positive");
            }
        }
        let k = Kernel { params, modulation };
        let (ok, worst) = k.bounds_check(4096);
        if !ok {
            return Err(Error::Param(format!(
                "modulation leaves the ellipticity band: worst ratio {worst} > Λ = {}",
                params.lambda
            )));
        }
        Ok(k)
    }

    /// The default radial step for a given `Λ`: `Λ` inside the unit ball,
    /// `1/Λ` outside.
    pub fn radial_step(params: FractionalParams) -> Result<Self> {
        let l = params.lambda;
        Self::modulated(params, Modulation::RadialStep { inner: l, outer: 1.0 / l, radius: 1.0 })
    }

    pub fn params(&self) -> &FractionalParams {
        &self.params
    }

    pub fn modulation(&self) -> Modulation {
        self.modulation
    }

    pub fn is_standard(&self) -> bool {
        self.modulation == Modulation::Constant(1.0)
    }

    /// Whether `a` depends on `|z|` only.
    pub fn is_radial(&self) -> bool {
        !matches!(self.modulation, Modulation::Angular) || self.params.lambda == 1.0
    }

    pub fn modulation_at(&self, z: Point) -> f64 {
        match self.modulation {
            Modulation::Constant(c) => c,
            Modulation::Angular => {
                let c = (self.params.lambda - 1.0) / (self.params.lambda + 1.0);
                let r2 = z[0] * z[0] + z[1] * z[1];
                // cos 2θ = (x² - y²)/|z|², exactly even in z
                1.0 + c * (z[0] * z[0] - z[1] * z[1]) / r2
            }
            Modulation::RadialStep { inner, outer, radius } => {
                if norm(z) < radius {
                    inner
                } else {
                    outer
                }
            }
        }
    }

    pub fn eval(&self, z: Point) -> f64 {
        self.modulation_at(z) * math::pow(norm(z), self.params.order())
    }

    /// `1/K(z)`, the pair weight of nonlocal sums.
    pub fn weight(&self, z: Point) -> f64 {
        1.0 / self.eval(z)
    }

    /// `∫_ρ^∞ r^{N-1} / K(r e_θ) dr` along the direction of angle `theta`.
    pub fn directional_tail(&self, theta: f64, rho: f64) -> f64 {
        let sp = self.params.sp();
        let base = |r: f64| math::pow(r, -sp) / sp;
        match self.modulation {
            Modulation::Constant(c) => base(rho) / c,
            Modulation::Angular => {
                let dir = [math::cos(theta), math::sin(theta)];
                base(rho) / self.modulation_at(dir)
            }
            Modulation::RadialStep { inner, outer, radius } => {
                if rho >= radius {
                    base(rho) / outer
                } else {
                    (base(rho) - base(radius)) / inner + base(radius) / outer
                }
            }
        }
    }

    /// `∫_{|z| ≥ ρ} 1/K(z) dz`.
    pub fn tail_mass(&self, rho: f64) -> f64 {
        match self.modulation {
            Modulation::Angular if self.params.dim == 2 => {
                let c = (self.params.lambda - 1.0) / (self.params.lambda + 1.0);
                let sp = self.params.sp();
                2.0 * math::PI / math::sqrt(1.0 - c * c) * math::pow(rho, -sp) / sp
            }
            _ => sphere_measure(self.params.dim) * self.directional_tail(0.0, rho),
        }
    }

    /// Samples `probe_count` points with log-uniform radii in `[1e-3, 1e3]`
    /// and uniform angles; returns the sandwich verdict and the worst of
    /// `K/|z|^{N+sp}` and its reciprocal.
    pub fn bounds_check(&self, probe_count: usize) -> (bool, f64) {
        let mut rng = Rng::seeded(0x6b65_726e_656c);
        let mut worst: f64 = 1.0;
        let order = self.params.order();
        for _ in 0..probe_count.max(1) {
            let r = math::exp(rng.uniform(math::ln(1e-3), math::ln(1e3)));
            let th = if self.params.dim == 2 { rng.uniform(0.0, 2.0 * math::PI) } else if rng.unit() < 0.5 { 0.0 } else { math::PI };
            let z = [r * math::cos(th), if self.params.dim == 2 { r * math::sin(th) } else { 0.0 }];
            let ratio = self.eval(z) / math::pow(norm(z), order);
            let sym = self.eval([-z[0], -z[1]]) / math::pow(norm(z), order);
            if !(ratio > 0.0) || ratio != sym {
                return (false, f64::INFINITY);
            }
            worst = worst.max(ratio).max(1.0 / ratio);
        }
        (worst <= self.params.lambda * (1.0 + 1e-12), worst)
    }
}
