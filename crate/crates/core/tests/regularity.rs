use fraclab_core::diffops::Translation;
use fraclab_core::grid::{Ball, ExteriorRule, Grid, GridFunction, TestFunction};
use fraclab_core::kernel::{FractionalParams, Kernel};
use fraclab_core::regularity::{
    bbm_closed_form, bbm_limit, classify_regime, estimate_order, gamma_closed_form, iteration_trace,
    robust_constant_regime, s_sweep_to_plaplacian, verify_besov_embedding, verify_caccioppoli,
    verify_improvement, LocalSetup, Regime, SweepFamily,
};
use fraclab_core::seminorms::dyadic_steps;
use fraclab_core::solver::{solve_dirichlet, DirichletProblem, SolverConfig};
use fraclab_core::Error;
use proptest::prelude::*;

fn params(dim: usize, s: f64, p: f64, t: f64) -> FractionalParams {
    FractionalParams::new(dim, s, p, t, 1.0).unwrap()
}

#[test]
fn scheme_case_ii_example() {
    let sc = classify_regime(&params(1, 0.6, 2.0, 0.0), None).unwrap();
    assert_eq!(sc.regime, Regime::CaseII);
    assert!((sc.kappa - 1.2).abs() < 1e-15);
    assert_eq!(sc.i0, 2);
    assert!((sc.gammas[1] - 0.9).abs() < 1e-15);
    assert!((sc.gammas[2] - 1.05).abs() < 1e-15);
    assert!((sc.gamma_big - 1.1).abs() < 1e-15);
    assert!(sc.gammas[sc.i0 - 1] < 1.0 && sc.gammas[sc.i0] >= 1.0);
    assert!((sc.tau_limit() - 0.1).abs() < 1e-15);
}

#[test]
fn scheme_boundary_routes_to_case_i() {
    let sc = classify_regime(&params(1, 0.5, 2.0, 0.0), Some(0.9)).unwrap();
    assert_eq!(sc.regime, Regime::CaseI);
    assert_eq!(sc.kappa, 1.0);
    assert_eq!(&sc.gammas[..4], &[0.5, 0.75, 0.875, 0.9375]);
    // (ln 0.5 - ln 0.1)/ln 2 ≈ 2.32 → i0 = 3
    assert_eq!(sc.i0, 3);
    assert!(classify_regime(&params(1, 0.5, 2.0, 0.0), Some(1.0)).is_err());
    assert!(classify_regime(&params(1, 0.5, 2.0, 0.0), Some(0.4)).is_err());
}

#[test]
fn scheme_borderline_detected() {
    // p=2, t=0: κ = 2s, γ_{i0} = 1 when (2s - s)/(2s - 1) = 2^k; s = 2/3 gives k = 1
    let sc = classify_regime(&params(1, 2.0 / 3.0, 2.0, 0.0), None).unwrap();
    assert!(sc.borderline);
    assert_eq!(sc.i0, 1);
    let beta = sc.rectified_beta.unwrap();
    let p = 2.0;
    assert!(beta < 1.0 && (beta + sc.params.sp()) / p > 1.0);
}

#[test]
fn robust_regime_examples() {
    let a = params(1, 0.9, 2.0, 0.9);
    assert!(robust_constant_regime(&a, 2.5).unwrap());
    let sc = classify_regime(&a, None).unwrap();
    assert_eq!(sc.i0, 1);
    assert!((sc.gammas[1] - 1.8).abs() < 1e-14);
    assert!(!robust_constant_regime(&params(1, 0.5, 2.0, 0.0), 2.5).unwrap());
    assert!(robust_constant_regime(&a, 2.0).is_err());
}

proptest! {
    #[test]
    fn gamma_recursion_matches_closed_form(s in 0.01f64..0.99, p in 2.0f64..6.0, frac in 0.0f64..1.0) {
        let pr = params(1, s, p, frac * s);
        let sc = classify_regime(&pr, None).unwrap();
        for (i, g) in sc.gammas.iter().enumerate() {
            prop_assert!((g - gamma_closed_form(&pr, i)).abs() <= 1e-14);
        }
        for w in sc.gammas.windows(2) {
            prop_assert!(w[1] > w[0] && w[1] < sc.kappa);
        }
    }

    #[test]
    fn robust_implies_one_step(s in 0.01f64..0.99, p in 2.0f64..4.0, frac in 0.0f64..1.0, over in 0.0f64..1.0) {
        let pr = params(1, s, p, frac * s);
        let ell0 = p + over * 0.5 + 1e-9;
        if robust_constant_regime(&pr, ell0).unwrap() {
            let sc = classify_regime(&pr, None).unwrap();
            prop_assert_eq!(sc.i0, 1);
            prop_assert!(sc.gammas[1] > 1.0);
        }
    }
}

/// Adaptive Simpson on `[a, b]`.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 40)
}

/// `‖δ_h |x|^β‖_{L²(-ρ, ρ)}` by quadrature split at the kinks `-h` and `0`.
fn power_difference_norm(beta: f64, h: f64, rho: f64) -> f64 {
    let f = |x: f64| {
        let d = (x + h).abs().powf(beta) - x.abs().powf(beta);
        d * d
    };
    let v = simpson(&f, -rho, -h, 1e-14) + simpson(&f, -h, 0.0, 1e-14) + simpson(&f, 0.0, rho, 1e-14);
    v.sqrt()
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    num / den
}

#[test]
fn order_matches_brute_force_oracle() {
    // even n puts the singular point between nodes
    let grid = Grid::new(1, 1.0, 1026).unwrap();
    let ball = Ball::centered(0.5).unwrap();
    // the one-cell step under-resolves the kink of δ_h u
    let hs = dyadic_steps(&grid, 0.24)[1..].to_vec();
    assert!(hs.len() >= 4);
    for beta in [0.25, 0.5, 0.75] {
        let u = GridFunction::exact(&TestFunction::Power { beta }, &grid).unwrap();
        let rep = estimate_order(&u, &ball, 2.0, &hs).unwrap();
        let norms: Vec<f64> = rep.h.iter().map(|&h| power_difference_norm(beta, h, 0.5)).collect();
        let expected = slope(&rep.h, &norms).min(1.0);
        println!("beta={beta} measured={} oracle={expected}", rep.tau_hat);
        assert!((rep.tau_hat - expected).abs() < 0.05, "beta={beta}: {} vs {expected}", rep.tau_hat);
    }
}

#[test]
fn order_of_affine_is_one() {
    let grid = Grid::new(1, 1.0, 257).unwrap();
    let u = GridFunction::exact(&TestFunction::Affine { a: [2.0, 0.0], b: 1.0 }, &grid).unwrap();
    let rep = estimate_order(&u, &Ball::centered(0.4).unwrap(), 2.0, &dyadic_steps(&grid, 0.29)).unwrap();
    assert!((rep.fit.slope - 1.0).abs() < 1e-9);
    assert!(rep.capped);
    assert!(estimate_order(&u, &Ball::centered(0.4).unwrap(), 2.0, &dyadic_steps(&grid, 0.02)).is_err());
}

fn benchmark(n: usize, s: f64, scale: f64) -> (GridFunction, GridFunction, FractionalParams) {
    let grid = Grid::new(1, 2.0, n).unwrap();
    let pr = params(1, s, 2.0, 0.0);
    let f = GridFunction::new(grid, vec![scale; grid.len()], ExteriorRule::zero()).unwrap();
    let g = GridFunction::zeros(&grid);
    let prob = DirichletProblem::new(Ball::centered(1.0).unwrap(), f.clone(), g, Kernel::standard(pr)).unwrap();
    let sol = solve_dirichlet(&prob, &SolverConfig::default()).unwrap();
    (sol.u, f, pr)
}

#[test]
fn caccioppoli_ratios_bounded_and_stable() {
    let setup = LocalSetup::new(Ball::centered(1.0).unwrap(), 0.25, 0.5).unwrap();
    for s in [0.5, 0.8] {
        let (u, f, pr) = benchmark(129, s, 1.0);
        let (u2, f2, _) = benchmark(257, s, 1.0);
        let hs: Vec<Translation> = dyadic_steps(u.grid(), setup.h0_cap());
        let hs2: Vec<Translation> = dyadic_steps(u2.grid(), setup.h0_cap());
        let a = verify_caccioppoli(&u, &f, &setup, s, &pr, &hs).unwrap();
        let b = verify_caccioppoli(&u2, &f2, &setup, s, &pr, &hs2).unwrap();
        let ratios: Vec<f64> = a.rows.iter().map(|r| r.ratio).collect();
        println!("s={s} ratios n={:?} 2n={:?}", ratios, b.rows.iter().map(|r| r.ratio).collect::<Vec<_>>());
        let hi = ratios.iter().cloned().fold(0.0, f64::max);
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(hi.is_finite() && hi / lo < 2.0);
        let drift = a.worst / b.worst;
        assert!(drift < 2.0 && drift > 0.5, "drift {drift}");
        let lam = 3.0;
        let (u3, f3, _) = benchmark(129, s, lam);
        let c = verify_caccioppoli(&u3, &f3, &setup, s, &pr, &hs).unwrap();
        for (x, y) in a.rows.iter().zip(&c.rows) {
            assert!((x.ratio - y.ratio).abs() <= 1e-10 * x.ratio);
        }
    }
}

#[test]
fn caccioppoli_zero_solution_and_bad_inputs() {
    let grid = Grid::new(1, 2.0, 129).unwrap();
    let z = GridFunction::zeros(&grid);
    let pr = params(1, 0.5, 2.0, 0.0);
    let setup = LocalSetup::new(Ball::centered(1.0).unwrap(), 0.25, 0.5).unwrap();
    let hs = dyadic_steps(&grid, setup.h0_cap());
    let rep = verify_caccioppoli(&z, &z, &setup, 0.5, &pr, &hs).unwrap();
    assert!(rep.rows.iter().all(|r| r.lhs == 0.0 && r.ratio == 0.0));
    assert!(verify_caccioppoli(&z, &z, &setup, 0.4, &pr, &hs).is_err());
    let big = vec![Translation::along(&grid, 0, 8)];
    assert!(verify_caccioppoli(&z, &z, &setup, 0.5, &pr, &big).is_err());
}

#[test]
fn improvement_branches() {
    let setup = LocalSetup::new(Ball::centered(1.0).unwrap(), 0.25, 0.5).unwrap();
    let (u, _, pr) = benchmark(257, 0.5, 1.0);
    let rep = verify_improvement(&u, &setup, 0.5, &pr, None).unwrap();
    assert!(rep.notes.iter().any(|n| n == "branch=difference_bound"));
    assert!(rep.pass, "{:?}", rep.rows);
    println!("improvement s=0.5: {:?}", rep.rows.iter().map(|r| r.ratio).collect::<Vec<_>>());

    let grid = Grid::new(1, 2.0, 257).unwrap();
    let pr2 = params(1, 0.8, 2.0, 0.8);
    let f = GridFunction::new(grid, vec![1.0; grid.len()], ExteriorRule::zero()).unwrap();
    let prob = DirichletProblem::new(Ball::centered(1.0).unwrap(), f, GridFunction::zeros(&grid), Kernel::standard(pr2)).unwrap();
    let sol = solve_dirichlet(&prob, &SolverConfig::default()).unwrap();
    let rep = verify_improvement(&sol.u, &setup, 0.8, &pr2, None).unwrap();
    assert!(rep.notes.iter().any(|n| n == "branch=gradient_bound"));
    assert!(rep.pass && rep.worst.is_finite());
    println!("improvement case ii: {:?}", rep.rows.iter().map(|r| r.ratio).collect::<Vec<_>>());

    let z = GridFunction::zeros(&grid);
    let rep = verify_improvement(&z, &setup, 0.5, &pr, None).unwrap();
    assert!(rep.rows.iter().all(|r| r.lhs == 0.0));
}

#[test]
fn trace_resolution_and_stages() {
    let pr = params(1, 0.6, 2.0, 0.0);
    let coarse = Grid::new(1, 1.0, 201).unwrap();
    match iteration_trace(&GridFunction::zeros(&coarse), &pr, None) {
        Err(Error::Resolution { required_n, .. }) => assert_eq!(required_n, 401),
        other => panic!("{other:?}"),
    }
    let grid = Grid::new(1, 1.0, 401).unwrap();
    let tr = iteration_trace(&GridFunction::zeros(&grid), &pr, None).unwrap();
    assert_eq!(tr.radii, vec![0.75, 0.625, 0.5]);
    assert!((tr.h0 - 0.005).abs() < 1e-15);
    assert_eq!(tr.stages.len(), 2);
    assert!(tr.stages.iter().all(|s| s.m_gamma == 0.0));

    let robust = params(1, 0.9, 2.0, 0.9);
    let tr = iteration_trace(&GridFunction::zeros(&Grid::new(1, 1.0, 201).unwrap()), &robust, None).unwrap();
    assert_eq!(tr.stages.len(), 1);
}

#[test]
fn trace_on_solution_is_finite() {
    let grid = Grid::new(1, 1.25, 501).unwrap();
    let pr = params(1, 0.6, 2.0, 0.0);
    let f = GridFunction::new(grid, vec![1.0; grid.len()], ExteriorRule::zero()).unwrap();
    let prob = DirichletProblem::new(Ball::centered(1.0).unwrap(), f, GridFunction::zeros(&grid), Kernel::standard(pr)).unwrap();
    let sol = solve_dirichlet(&prob, &SolverConfig::default()).unwrap();
    let tr = iteration_trace(&sol.u, &pr, None).unwrap();
    println!("trace {:?} fitted {}", tr.stages.iter().map(|s| s.m_gamma).collect::<Vec<_>>(), tr.fitted_constant);
    assert!(tr.report.pass);
    assert!(tr.stages.iter().all(|s| s.m_gamma.is_finite() && s.m_gamma > 0.0));
}

#[test]
fn bbm_table_matches_closed_form() {
    let grid = Grid::new(1, 1.0, 257).unwrap();
    let ball = Ball::new([0.5, 0.0], 0.5).unwrap();
    let s_list = [0.5, 0.7, 0.8, 0.9, 0.95];
    let u = TestFunction::Affine { a: [1.0, 0.0], b: 0.0 };
    let t = bbm_limit(&u, &ball, 2.0, &s_list, &grid).unwrap();
    for row in &t.rows {
        let exact = bbm_closed_form(row.s);
        println!("s={} scaled={} exact={}", row.s, row.scaled, exact);
        assert!((row.scaled - exact).abs() / exact < 0.03);
    }
    assert!(t.converged);
    let t2 = bbm_limit(&TestFunction::Affine { a: [2.0, 0.0], b: 0.0 }, &ball, 2.0, &s_list, &grid).unwrap();
    assert!((t2.rows[4].scaled / t.rows[4].scaled - 4.0).abs() < 1e-12);
    let sq = bbm_limit(&TestFunction::Square, &ball, 2.0, &s_list, &grid).unwrap();
    assert!((sq.limit - t.limit).abs() / t.limit < 0.1, "{} vs {}", sq.limit, t.limit);
    let c = bbm_limit(&TestFunction::Constant(1.0), &ball, 2.0, &s_list, &grid).unwrap();
    assert!(c.rows.iter().all(|r| r.scaled == 0.0));
}

#[test]
fn sweep_errors_decrease() {
    let cfg = SolverConfig::default();
    let t = s_sweep_to_plaplacian(SweepFamily::ConstantForce { force: 1.0 }, 2.0, &[0.6, 0.75, 0.9], 257, &cfg).unwrap();
    for r in &t.rows {
        println!("s={} err={} grad_err={}", r.s, r.error, r.gradient_error);
    }
    assert!(t.monotone);
    let a = s_sweep_to_plaplacian(SweepFamily::Affine { a: 1.0, b: 0.0 }, 2.0, &[0.6, 0.75, 0.9], 129, &cfg).unwrap();
    assert!(a.monotone, "{:?}", a.rows);
}

#[test]
fn embedding_constant_shared() {
    let grid = Grid::new(1, 4.0, 1025).unwrap();
    let corpus = [
        TestFunction::Spline { degree: 2, width: 1.0 },
        TestFunction::Spline { degree: 3, width: 1.0 },
        TestFunction::Spline { degree: 3, width: 1.5 },
        TestFunction::Spline { degree: 4, width: 1.2 },
    ];
    let matched = [(1.5, TestFunction::Spline { degree: 1, width: 1.5 })];
    let rep = verify_besov_embedding(&corpus, &[1.25, 1.5, 1.75], 2.0, &grid, &matched, &[0.02, 0.01, 0.005]).unwrap();
    println!("{:?}", rep.fitted);
    println!("{:?}", rep.notes);
    assert!(rep.pass);
}
