//! Gauss-Legendre rules and the semi-infinite radial integrals used for
//! exterior tails.

use alloc::vec::Vec;

use crate::math;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = math::cos(math::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if math::abs(dz) < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// A Gauss-Legendre rule reused across many panels.
#[derive(Debug, Clone)]
pub struct Rule {
    x: Vec<f64>,
    w: Vec<f64>,
}

impl Rule {
    pub fn new(n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        Rule { x, w }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let c = 0.5 * (a + b);
        let r = 0.5 * (b - a);
        let mut s = 0.0;
        for (xi, wi) in self.x.iter().zip(&self.w) {
            s += wi * f(c + r * xi);
        }
        s * r
    }

    /// `∫_a^b f` over `panels` equal panels.
    pub fn composite<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, panels: usize, mut f: F) -> f64 {
        let h = (b - a) / panels as f64;
        let mut s = 0.0;
        for k in 0..panels {
            let lo = a + k as f64 * h;
            s += self.integrate(lo, lo + h, &mut f);
        }
        s
    }

    /// `∫_a^end f` over geometrically growing panels `[a·2^k, a·2^{k+1}]`;
    /// `end = ∞` stops once a panel falls below `rel_tol` of the running sum.
    /// Returns `None` when the panels fail to decay (divergent integrand).
    pub fn radial_tail<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        end: f64,
        rel_tol: f64,
        mut f: F,
    ) -> Option<f64> {
        debug_assert!(a > 0.0);
        let mut total = 0.0;
        let mut lo = a;
        let mut prev = f64::INFINITY;
        for _ in 0..400 {
            let hi = (2.0 * lo).min(end);
            let piece = self.integrate(lo, hi, &mut f);
            total += piece;
            if hi >= end {
                return Some(total);
            }
            let mag = math::abs(piece);
            if mag <= rel_tol * math::abs(total) && mag <= prev {
                return Some(total);
            }
            prev = mag;
            lo = hi;
        }
        if end.is_finite() {
            Some(total)
        } else {
            None
        }
    }
}
