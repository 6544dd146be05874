//! Continuum reference for the order check: `‖δ_h |x|^β‖_{L^p(-ρ, ρ)}` by
//! Gauss panels graded toward the kinks at `-h` and `0`, independent of the
//! grid difference operators it is compared against.

use fraclab_core::quad::Rule;

/// Integral over `[a, b]` with geometric grading toward both endpoints.
fn graded(rule: &Rule, a: f64, b: f64, f: &dyn Fn(f64) -> f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let mut total = 0.0;
    for (end, other) in [(a, m), (b, m)] {
        let mut far = other;
        for _ in 0..40 {
            let near = end + 0.15 * (far - end);
            total += rule.integrate(near.min(far), near.max(far), f);
            far = near;
        }
        total += rule.integrate(end.min(far), end.max(far), f);
    }
    total
}

pub fn power_difference_norm(beta: f64, h: f64, rho: f64, p: f64) -> f64 {
    let rule = Rule::new(20);
    let f = |x: f64| ((x + h).abs().powf(beta) - x.abs().powf(beta)).abs().powf(p);
    let v = graded(&rule, -rho, -h, &f) + graded(&rule, -h, 0.0, &f) + graded(&rule, 0.0, rho, &f);
    v.powf(1.0 / p)
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    num / den
}
