//! The maps `J_p(t) = |t|^{p-2} t` and `V_p(t) = |t|^{(p-2)/2} t` and the
//! four pointwise inequalities relating them.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{param, Result};
use crate::math;
use crate::report::{ReportRow, VerificationReport};
use crate::rng::Rng;

/// `|x|^{p-2} x`, zero at zero.
#[inline]
pub fn jp(x: f64, p: f64) -> f64 {
    signed_pow(x, p - 1.0)
}

/// `|x|^{(p-2)/2} x`, zero at zero.
#[inline]
pub fn vp(x: f64, p: f64) -> f64 {
    signed_pow(x, p / 2.0)
}

#[inline]
fn signed_pow(x: f64, q: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if q == 1.0 {
        x
    } else {
        let m = math::pow(math::abs(x), q);
        if x < 0.0 {
            -m
        } else {
            m
        }
    }
}

/// `sgn(a)|a|^q - sgn(b)|b|^q` without cancellation for nearby arguments.
pub fn signed_pow_diff(a: f64, b: f64, q: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    if q == 1.0 {
        return a - b;
    }
    if a == 0.0 || b == 0.0 || (a < 0.0) != (b < 0.0) {
        return signed_pow(a, q) - signed_pow(b, q);
    }
    let sign = if a < 0.0 { -1.0 } else { 1.0 };
    let (x, y) = (math::abs(a), math::abs(b));
    // x^q - y^q = y^q expm1(q log1p((x - y)/y)), exact enough near x = y
    sign * math::pow(y, q) * libm::expm1(q * libm::log1p((x - y) / y))
}

/// `J_p(a) - J_p(b)`, accurate near the diagonal.
#[inline]
pub fn jp_diff(a: f64, b: f64, p: f64) -> f64 {
    signed_pow_diff(a, b, p - 1.0)
}

/// `V_p(a) - V_p(b)`, accurate near the diagonal.
#[inline]
pub fn vp_diff(a: f64, b: f64, p: f64) -> f64 {
    signed_pow_diff(a, b, p / 2.0)
}

/// The four inequalities, each as `(lhs, rhs)` for a claim `lhs ≥ rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inequality {
    /// `(J(a)-J(b))(a-b) ≥ (p-1)(2/p)² |V(a)-V(b)|²`.
    Monotone,
    /// `2(p-1)/p (|a|^{(p-2)/2} + |b|^{(p-2)/2}) |V(a)-V(b)| ≥ |J(a)-J(b)|`.
    Lipschitz,
    /// `|V(a)-V(b)|² ≥ |a-b|^p`.
    Holder,
    /// `(J(a)-J(b))(a-b) ≥ (p-1)(2/p)² |a-b|^p`.
    Down,
}

impl Inequality {
    pub const ALL: [Inequality; 4] =
        [Inequality::Monotone, Inequality::Lipschitz, Inequality::Holder, Inequality::Down];

    pub fn name(self) -> &'static str {
        match self {
            Inequality::Monotone => "monotone",
            Inequality::Lipschitz => "lipschitz",
            Inequality::Holder => "holder",
            Inequality::Down => "down",
        }
    }

    /// Both sides of the claim `lhs ≥ rhs` at `(a, b)`.
    pub fn sides(self, a: f64, b: f64, p: f64) -> (f64, f64) {
        let c = (p - 1.0) * (2.0 / p) * (2.0 / p);
        let d = a - b;
        match self {
            Inequality::Monotone => {
                let v = vp_diff(a, b, p);
                (jp_diff(a, b, p) * d, c * v * v)
            }
            Inequality::Lipschitz => {
                let q = (p - 2.0) / 2.0;
                let w = math::abs_pow(a, q) + math::abs_pow(b, q);
                let w = if p == 2.0 { 2.0 } else { w };
                (
                    2.0 * (p - 1.0) / p * w * math::abs(vp_diff(a, b, p)),
                    math::abs(jp_diff(a, b, p)),
                )
            }
            Inequality::Holder => {
                let v = vp_diff(a, b, p);
                (v * v, math::abs_pow(d, p))
            }
            Inequality::Down => (jp_diff(a, b, p) * d, c * math::abs_pow(d, p)),
        }
    }

    /// Whether `lhs ≥ rhs` up to relative slack `rel`.
    pub fn holds(self, a: f64, b: f64, p: f64, rel: f64) -> bool {
        let (l, r) = self.sides(a, b, p);
        l >= r - rel * math::abs(l).max(math::abs(r))
    }
}

/// Deterministic sample of pairs in `[-10, 10]²`: every tenth pair is
/// moved to within `10^{-8}` of the diagonal to probe cancellation.
pub fn sample_pairs(count: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = Rng::seeded(seed);
    (0..count)
        .map(|k| {
            let a = rng.uniform(-10.0, 10.0);
            if k % 10 == 9 {
                let mag = math::exp(rng.uniform(math::ln(1e-12), math::ln(1e-8)));
                let d = if rng.unit() < 0.5 { -mag } else { mag };
                (a, a + d)
            } else {
                (a, rng.uniform(-10.0, 10.0))
            }
        })
        .collect()
}

/// Checks the four inequalities on `sample_count` random pairs per `p`
/// (relative slack `1e-12`). Rows carry the worst relative slack
/// `(lhs - rhs)/max(|lhs|, |rhs|)`; at `p = 2` the equality cases
/// (`monotone`, `down`) are also confirmed to `1e-12`. Any violation is
/// recorded verbatim in the notes.
pub fn verify_pointwise_inequalities(
    p_list: &[f64],
    sample_count: usize,
    rng_seed: u64,
) -> Result<VerificationReport> {
    if sample_count == 0 {
        return param("sample_count must be at least 1");
    }
    if let Some(p) = p_list.iter().find(|p| !(**p >= 2.0)) {
        return param(format!("p must satisfy p ≥ 2, got {p}"));
    }
    const SLACK: f64 = 1e-12;
    let mut rep = VerificationReport::new("pointwise");
    let pairs = sample_pairs(sample_count, rng_seed);
    let mut worst_overall = f64::INFINITY;
    for &p in p_list {
        for ineq in Inequality::ALL {
            let mut worst = f64::INFINITY;
            let mut worst_pair = (0.0, 0.0, 0.0, 0.0);
            let mut violations = 0usize;
            let mut max_gap: f64 = 0.0;
            for &(a, b) in &pairs {
                let (l, r) = ineq.sides(a, b, p);
                let scale = math::abs(l).max(math::abs(r));
                let slack = if scale == 0.0 { 0.0 } else { (l - r) / scale };
                max_gap = max_gap.max(math::abs(slack));
                if slack < worst {
                    worst = slack;
                    worst_pair = (a, b, l, r);
                }
                if slack < -SLACK {
                    violations += 1;
                }
            }
            let pass = violations == 0;
            let (a, b, l, r) = worst_pair;
            rep.push(
                ReportRow::new(format!("{}:p={p}", ineq.name()), p, l, r).with_pass(pass),
            );
            if !pass {
                rep.note(format!(
                    "{} violated on {violations}/{} pairs at p={p}; worst pair a={a:e}, b={b:e}: lhs={l:e} < rhs={r:e}",
                    ineq.name(),
                    pairs.len()
                ));
            }
            if p == 2.0 && matches!(ineq, Inequality::Monotone | Inequality::Down) {
                let eq = max_gap <= SLACK;
                rep.push(
                    ReportRow::new(format!("{}-equality:p=2", ineq.name()), p, max_gap, SLACK)
                        .with_pass(eq),
                );
                if !eq {
                    rep.note(format!("{} is not an equality at p=2: gap {max_gap:e}", ineq.name()));
                }
            }
            worst_overall = worst_overall.min(worst);
        }
    }
    rep.set_worst("min_relative_slack", worst_overall);
    Ok(rep)
}

/// Largest constant `c` such that `|V(a)-V(b)|² ≥ c |a-b|^p` for all pairs,
/// attained at `a = -b`: `c = 2^{2-p}`.
pub fn sharp_holder_constant(p: f64) -> f64 {
    math::pow(2.0, 2.0 - p)
}
