//! The eleven acceptance criteria, one PASS/FAIL line each. Runs without the
//! libtest harness so the lines are always printed.

use std::fs;
use std::process::ExitCode;

use fraclab_cli::bench::measure;
use fraclab_cli::config::{CommandKind, RunConfig};
use fraclab_cli::oracle::{log_slope, power_difference_norm};
use fraclab_core::diffops::Translation;
use fraclab_core::grid::norm;
use fraclab_core::nonlinear::{sample_pairs, verify_pointwise_inequalities};
use fraclab_core::regularity::{
    bbm_closed_form, bbm_limit, classify_regime, estimate_order, gamma_closed_form, s_sweep_to_plaplacian,
    verify_besov_embedding, verify_caccioppoli, verify_improvement, LocalSetup, Regime, SweepFamily,
};
use fraclab_core::rng::Rng;
use fraclab_core::seminorms::{dyadic_steps, gagliardo, snail, verify_seminorm_structure};
use fraclab_core::solver::{energy, energy_gradient, solve_dirichlet, Discretization, DirichletProblem, Init, SolverConfig};
use fraclab_core::{Ball, ExteriorRule, FractionalParams, Grid, GridFunction, Kernel, TestFunction, VerificationReport};
use nalgebra::{DMatrix, DVector};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn params(dim: usize, s: f64, p: f64, t: f64) -> FractionalParams {
    FractionalParams::new(dim, s, p, t, 1.0).unwrap()
}

// ---------------------------------------------------------------- 1

fn jp(x: f64, p: f64) -> f64 {
    x.abs().powf(p - 2.0) * x
}

fn vp(x: f64, p: f64) -> f64 {
    x.abs().powf((p - 2.0) / 2.0) * x
}

/// Returns the verdict and whether the failure is exactly the known one:
/// only `holder` and `down` fail, only for `p > 2`, never on same-sign pairs.
fn criterion_1() -> (Verdict, bool) {
    let p_list = [2.0, 2.5, 3.0, 4.0];
    let rep = verify_pointwise_inequalities(&p_list, 100_000, 0).unwrap();
    let mut pattern = true;
    for r in &rep.rows {
        let name = r.label.split(':').next().unwrap();
        let should_fail = r.h > 2.0 && (name == "holder" || name == "down");
        pattern &= r.pass != should_fail;
    }
    // same-sign pairs away from the diagonal, from the scalar formulas
    let mut same_sign_ok = true;
    for &p in &p_list[1..] {
        let c = (p - 1.0) * (2.0 / p) * (2.0 / p);
        for (a, b) in sample_pairs(20_000, 1) {
            if a * b <= 0.0 || (a - b).abs() < 1e-3 {
                continue;
            }
            let d = (a - b).abs().powf(p);
            let v = (vp(a, p) - vp(b, p)).powi(2);
            let down = (jp(a, p) - jp(b, p)) * (a - b);
            same_sign_ok &= v >= d * (1.0 - 1e-12) && down >= c * d * (1.0 - 1e-12);
        }
    }
    // a = -b attains |V(a)-V(b)|²/|a-b|^p = 2^{2-p}
    let holder_min_ok = p_list[1..].iter().all(|&p| {
        let row = rep.rows.iter().find(|r| r.label == format!("holder:p={p}")).unwrap();
        (row.ratio - 2f64.powf(2.0 - p)).abs() < 1e-6
    });
    let known = pattern && same_sign_ok && holder_min_ok;
    let detail = format!(
        "monotone/lipschitz hold for p in {{2,2.5,3,4}} at slack 1e-12, equality at p=2 to 1e-12; holder/down \
         violated for p>2 on opposite-sign pairs (min ratio 2^(2-p)), hold on same-sign pairs; {}",
        rep.verdict_line()
    );
    (verdict(rep.pass, detail), known)
}

// ---------------------------------------------------------------- 2

fn criterion_2() -> Verdict {
    let mut rng = Rng::seeded(2);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let s = rng.uniform(0.01, 0.99);
        let p = rng.uniform(2.0, 6.0);
        let t = rng.uniform(0.0, 1.0) * s;
        let pr = params(1, s, p, t);
        let sc = classify_regime(&pr, None).unwrap();
        let kappa = (t + s * p) / (p - 1.0);
        let mut g = s;
        for (i, lib) in sc.gammas.iter().enumerate() {
            let closed = s / p.powi(i as i32) + kappa * (1.0 - 1.0 / p.powi(i as i32));
            worst = worst.max((lib - closed).abs()).max((g - closed).abs());
            worst = worst.max((gamma_closed_form(&pr, i) - closed).abs());
            g = (g + t + s * p) / p;
        }
    }
    let sc = classify_regime(&params(1, 0.6, 2.0, 0.0), None).unwrap();
    // 0.9, 1.05 and 1.1 are not binary fractions; exact means to rounding
    let near = |x: f64, y: f64| (x - y).abs() <= 4.0 * f64::EPSILON * y;
    let example = near(sc.kappa, 1.2)
        && sc.i0 == 2
        && near(sc.gammas[1], 0.9)
        && near(sc.gammas[2], 1.05)
        && near(sc.gamma_big, 1.1)
        && sc.regime == Regime::CaseII;
    verdict(
        worst <= 1e-14 && example,
        format!(
            "max |recursion - closed form| = {worst:.1e} (tol 1e-14) over 1000 draws; p=2 s=0.6 (to 4 ulp): \
             kappa={} i0={} gamma1={} gamma2={} Gamma={} {}",
            sc.kappa,
            sc.i0,
            sc.gammas[1],
            sc.gammas[2],
            sc.gamma_big,
            sc.regime.name()
        ),
    )
}

// ---------------------------------------------------------------- 3

fn problem_1d(n: usize, s: f64, p: f64, f: f64, g: ExteriorRule) -> DirichletProblem {
    let grid = Grid::new(1, 2.0, n).unwrap();
    let fv = GridFunction::new(grid, vec![f; grid.len()], ExteriorRule::zero()).unwrap();
    let gv = GridFunction::new(grid, (0..grid.len()).map(|i| g.eval(grid.point(i), 1)).collect(), g).unwrap();
    DirichletProblem::new(Ball::centered(1.0).unwrap(), fv, gv, Kernel::standard(params(1, s, p, 0.0))).unwrap()
}

/// Dense p = 2 system from the kernel: product-integrated cell weights and
/// the central-difference self-cell term.
fn dense_oracle(problem: &DirichletProblem) -> Vec<f64> {
    let d = Discretization::new(problem).unwrap();
    let grid = *problem.g.grid();
    let h = grid.spacing();
    let w = grid.cell_weight();
    let r = d.stencil_radius();
    let free = d.free_nodes();
    let m = free.len();
    let kmax = (r / h).ceil() as i64;
    let ex = 1.0 - problem.kernel.params().sp();
    let big_f = |z: f64| z.abs().powf(ex + 2.0) / ((ex + 1.0) * (ex + 2.0));
    let cell = |k: f64| h.powf(ex + 2.0) * (big_f(k + 1.0) - 2.0 * big_f(k) + big_f(k - 1.0));
    let c_self = cell(0.0) / (4.0 * h * h * w);
    let tau = problem.kernel.tail_mass(r);
    let mut a = DMatrix::<f64>::zeros(m, m);
    let mut b = DVector::<f64>::zeros(m);
    let couple = |row: usize, yj: i64, c: f64, a: &mut DMatrix<f64>, b: &mut DVector<f64>| match grid.flat([yj, 0]) {
        Some(j) => match free.iter().position(|&q| q == j) {
            Some(col) => a[(row, col)] -= c,
            None => b[row] += c * problem.g.values()[j],
        },
        None => b[row] += c * problem.g.at_multi([yj, 0]),
    };
    for (row, &i) in free.iter().enumerate() {
        let xi = grid.multi(i)[0];
        b[row] = problem.f.values()[i] + 2.0 * tau * problem.g.exterior().eval(grid.point(i), 1);
        a[(row, row)] += 2.0 * tau;
        for k in -kmax..=kmax {
            if k == 0 || norm([k as f64 * h, 0.0]) >= r {
                continue;
            }
            let wk = cell(k as f64) / ((k as f64 * h).powi(2) * w);
            a[(row, row)] += 2.0 * wk;
            couple(row, xi + k, 2.0 * wk, &mut a, &mut b);
        }
        a[(row, row)] += 2.0 * c_self;
        couple(row, xi - 2, c_self, &mut a, &mut b);
        couple(row, xi + 2, c_self, &mut a, &mut b);
    }
    a.lu().solve(&b).unwrap().iter().copied().collect()
}

fn criterion_3() -> Verdict {
    // (a) affine exterior data
    let mut affine_err: f64 = 0.0;
    for p in [2.0, 3.0] {
        let rule = ExteriorRule::affine([0.5, 0.0], 0.25);
        let prob = problem_1d(97, 0.5, p, 0.0, rule.clone());
        let mut cfg = SolverConfig::default();
        cfg.init = Init::Zero;
        cfg.gradient_tolerance = 1e-9;
        let sol = solve_dirichlet(&prob, &cfg).unwrap();
        let grid = *prob.g.grid();
        for i in 0..grid.len() {
            affine_err = affine_err.max((sol.u.values()[i] - rule.eval(grid.point(i), 1)).abs());
        }
    }
    // (b) dense p = 2 solve, (c) strictly decreasing energy
    let mut dense_err: f64 = 0.0;
    let mut decreasing = true;
    for (n, s) in [(65, 0.5), (129, 0.3), (257, 0.75)] {
        let prob = problem_1d(n, s, 2.0, 1.0, ExteriorRule::zero());
        let sol = solve_dirichlet(&prob, &SolverConfig::default()).unwrap();
        let oracle = dense_oracle(&prob);
        let d = Discretization::new(&prob).unwrap();
        for (k, &i) in d.free_nodes().iter().enumerate() {
            dense_err = dense_err.max((sol.u.values()[i] - oracle[k]).abs());
        }
        decreasing &= sol.energy_history.windows(2).all(|w| w[1] < w[0]);
    }
    let p3 = solve_dirichlet(&problem_1d(129, 0.6, 3.0, 1.0, ExteriorRule::zero()), &SolverConfig::default()).unwrap();
    decreasing &= p3.energy_history.windows(2).all(|w| w[1] < w[0]);
    // (d) gradient against central differences of the energy
    let prob = problem_1d(65, 0.6, 3.0, 1.0, ExteriorRule::zero());
    let d = Discretization::new(&prob).unwrap();
    let mut rng = Rng::seeded(11);
    let free = d.free_nodes();
    let with = |v: &[f64]| {
        let mut vals = prob.g.values().to_vec();
        for (k, &i) in free.iter().enumerate() {
            vals[i] = v[k];
        }
        GridFunction::new(*prob.g.grid(), vals, prob.g.exterior().clone()).unwrap()
    };
    let v: Vec<f64> = (0..free.len()).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let phi: Vec<f64> = (0..free.len()).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let grad = energy_gradient(&with(&v), &prob).unwrap();
    let w = prob.g.grid().cell_weight();
    let pairing: f64 = free.iter().zip(&phi).map(|(&i, f)| grad.values()[i] * f * w).sum();
    let eps = 1e-4;
    let up: Vec<f64> = v.iter().zip(&phi).map(|(a, b)| a + eps * b).collect();
    let dn: Vec<f64> = v.iter().zip(&phi).map(|(a, b)| a - eps * b).collect();
    let fd = (energy(&with(&up), &prob).unwrap() - energy(&with(&dn), &prob).unwrap()) / (2.0 * eps);
    let fd_rel = (fd - pairing).abs() / pairing.abs();
    verdict(
        affine_err < 1e-6 && dense_err < 1e-8 && decreasing && fd_rel < 1e-6,
        format!(
            "(a) affine L^inf {affine_err:.1e} (tol 1e-6); (b) dense p=2 {dense_err:.1e} (tol 1e-8, n<=257); \
             (c) strictly decreasing={decreasing}; (d) gradient vs central FD rel {fd_rel:.1e} (tol 1e-6)"
        ),
    )
}

// ---------------------------------------------------------------- 4

fn unit_square(n: usize, s: f64) -> f64 {
    let grid = Grid::new(1, 0.5, n).unwrap();
    let u = GridFunction::exact(&TestFunction::Affine { a: [1.0, 0.0], b: 0.0 }, &grid).unwrap();
    gagliardo(&u, &Ball::centered(0.5).unwrap(), s, 2.0).unwrap().raised
}

fn criterion_4() -> Verdict {
    let errs: Vec<f64> = [65, 129, 257, 513].iter().map(|&n| (unit_square(n, 0.5) - 1.0).abs()).collect();
    let halving = errs.windows(2).all(|w| (1.8..2.2).contains(&(w[0] / w[1])));
    let quarter_exact = (8.0f64 / 15.0).sqrt();
    let quarter = (unit_square(257, 0.25).sqrt() - quarter_exact).abs() / quarter_exact;
    let mut snail_err: f64 = 0.0;
    for (s, r) in [(0.5, 0.5), (0.3, 1.0), (0.8, 0.25)] {
        let pr = params(1, s, 2.0, 0.0);
        let grid = Grid::new(1, 2.0, 257).unwrap();
        let one = GridFunction::sample(&TestFunction::Constant(1.0), &grid, ExteriorRule::constant(1.0)).unwrap();
        let exact = 2f64.powf(1.0 + pr.sp()) / pr.sp();
        let got = snail(&one, [0.0, 0.0], &Ball::centered(r).unwrap(), &pr).unwrap().powi(2);
        snail_err = snail_err.max((got - exact).abs() / exact);
    }
    verdict(
        errs[2] < 0.02 && halving && quarter < 0.02 && snail_err < 1e-4,
        format!(
            "s=1/2 n=257 rel {:.2e} (tol 2%), refinement errors {:?} halving={halving}; s=1/4 rel {quarter:.2e} \
             (tol 2%); snail rel {snail_err:.1e} (tol 1e-4)",
            errs[2],
            errs.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>()
        ),
    )
}

// ---------------------------------------------------------------- 5

fn criterion_5() -> Verdict {
    let corpus = [
        TestFunction::Bump { radius: 0.5 },
        TestFunction::Bump { radius: 0.9 },
        TestFunction::Spline { degree: 2, width: 0.7 },
        TestFunction::Spline { degree: 3, width: 0.6 },
        TestFunction::Spline { degree: 4, width: 0.9 },
        TestFunction::TruncatedParabola { exponent: 2.0 },
    ];
    let grid = Grid::new(1, 3.0, 385).unwrap();
    let alphas = [0.3, 0.5, 0.7];
    let rep = verify_seminorm_structure(&corpus, &grid, 2.0, &alphas, &alphas).unwrap();
    let spreads: Vec<String> = ["nikolskii", "converse", "reduction"]
        .iter()
        .filter_map(|n| rep.fitted_value(&format!("spread_{n}")).map(|v| format!("{n}={v:.3}")))
        .collect();
    verdict(rep.pass && rep.worst < 3.0, format!("6 functions, alpha in {{0.3,0.5,0.7}}, spreads {} (tol < 3)", spreads.join(" ")))
}

// ---------------------------------------------------------------- 6

fn criterion_6() -> Verdict {
    let grid = Grid::new(1, 4.0, 1025).unwrap();
    let corpus = [
        TestFunction::Spline { degree: 2, width: 1.0 },
        TestFunction::Spline { degree: 3, width: 1.0 },
        TestFunction::Spline { degree: 3, width: 1.5 },
        TestFunction::Spline { degree: 4, width: 1.2 },
    ];
    let matched = [(1.5, TestFunction::Spline { degree: 1, width: 1.5 })];
    let rep = verify_besov_embedding(&corpus, &[1.25, 1.5, 1.75], 2.0, &grid, &matched, &[0.02, 0.01, 0.005]).unwrap();
    let fitted: Vec<String> = rep.fitted.iter().map(|(k, v)| format!("{k}={v:.4}")).collect();
    verdict(rep.pass, format!("spline corpus, alpha in {{1.25,1.5,1.75}}, spread tol 3, decay tol 15%: {}", fitted.join(" ")))
}

// ---------------------------------------------------------------- 7

fn criterion_7() -> Verdict {
    let grid = Grid::new(1, 1.0, 257).unwrap();
    let ball = Ball::new([0.5, 0.0], 0.5).unwrap();
    let s_list = [0.5, 0.7, 0.8, 0.9, 0.95];
    let t = bbm_limit(&TestFunction::Affine { a: [1.0, 0.0], b: 0.0 }, &ball, 2.0, &s_list, &grid).unwrap();
    let rel: Vec<f64> = t.rows.iter().map(|r| (r.scaled - bbm_closed_form(r.s)).abs() / bbm_closed_form(r.s)).collect();
    let dist: Vec<f64> = t.rows.iter().map(|r| (r.ratio - 1.0).abs()).collect();
    let trend = dist.windows(2).all(|w| w[1] < w[0]);
    let worst = rel.iter().cloned().fold(0.0, f64::max);
    verdict(
        worst < 0.03 && trend,
        format!(
            "max rel error {worst:.2e} (tol 3%); ratio to gradient energy {:?} trends to 1={trend}",
            t.rows.iter().map(|r| format!("{:.3}", r.ratio)).collect::<Vec<_>>()
        ),
    )
}

// ---------------------------------------------------------------- 8

fn benchmark(n: usize, s: f64, scale: f64) -> (GridFunction, GridFunction, FractionalParams) {
    let grid = Grid::new(1, 2.0, n).unwrap();
    let pr = params(1, s, 2.0, 0.0);
    let f = GridFunction::new(grid, vec![scale; grid.len()], ExteriorRule::zero()).unwrap();
    let prob = DirichletProblem::new(Ball::centered(1.0).unwrap(), f.clone(), GridFunction::zeros(&grid), Kernel::standard(pr))
        .unwrap();
    (solve_dirichlet(&prob, &SolverConfig::default()).unwrap().u, f, pr)
}

fn rescale_gap(a: &VerificationReport, b: &VerificationReport) -> f64 {
    a.rows.iter().zip(&b.rows).map(|(x, y)| (x.ratio - y.ratio).abs() / x.ratio).fold(0.0, f64::max)
}

fn max_over_min(v: &[f64]) -> f64 {
    v.iter().cloned().fold(0.0, f64::max) / v.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Ratio of rows with the same label and step across two reports.
fn matched_drift(a: &VerificationReport, b: &VerificationReport) -> f64 {
    let mut worst: f64 = 1.0;
    for x in &a.rows {
        if let Some(y) = b.rows.iter().find(|y| y.label == x.label && y.h == x.h) {
            worst = worst.max(x.ratio / y.ratio).max(y.ratio / x.ratio);
        }
    }
    worst
}

fn criterion_8() -> Verdict {
    let setup = LocalSetup::new(Ball::centered(1.0).unwrap(), 0.25, 0.5).unwrap();
    let lam = 3.0;
    let mut ok = true;
    let mut detail = Vec::new();
    for s in [0.5, 0.8] {
        // each doubling of n adds the next finer dyadic step below h₀
        let ladder: Vec<_> = [257, 513, 1025].iter().map(|&n| benchmark(n, s, 1.0)).collect();
        // p = 2, so λ^{p-1} = λ
        let (u3, f3, pr) = benchmark(257, s, lam);
        let cac = |u: &GridFunction, f: &GridFunction| {
            verify_caccioppoli(u, f, &setup, s, &pr, &dyadic_steps(u.grid(), setup.h0_cap())).unwrap()
        };
        let imp = |u: &GridFunction| verify_improvement(u, &setup, s, &pr, None).unwrap();
        let cs: Vec<_> = ladder.iter().map(|(u, f, _)| cac(u, f)).collect();
        let is: Vec<_> = ladder.iter().map(|(u, _, _)| imp(u)).collect();
        let scaled = [cac(&u3, &f3), imp(&u3)];
        for (k, (name, reps)) in [("caccioppoli", &cs), ("improvement", &is)].into_iter().enumerate() {
            let finite = reps.iter().all(|r| r.rows.iter().all(|x| x.ratio.is_finite() && x.ratio > 0.0));
            let maxima: Vec<f64> = reps.iter().map(|r| r.worst).collect();
            let over_h = max_over_min(&maxima);
            let over_n = reps.windows(2).map(|w| matched_drift(&w[0], &w[1])).fold(1.0, f64::max);
            let gap = rescale_gap(&reps[0], &scaled[k]);
            ok &= finite && over_h < 2.0 && over_n < 2.0 && gap <= 1e-10;
            let mut line = format!(
                "s={s} {name}: max {:.3e}, max-ratio drift as finer dyadic h enter {over_h:.3}, same-h n vs 2n \
                 {over_n:.3}, rescale {gap:.1e}",
                reps[0].worst
            );
            if name == "caccioppoli" {
                let per_h = max_over_min(&reps[2].rows.iter().map(|r| r.ratio).collect::<Vec<_>>());
                line += &format!(" (per-h spread at n=1025 {per_h:.2}, logged)");
            }
            detail.push(line);
        }
    }
    verdict(ok, format!("{} (tol drift < 2, rescale 1e-10)", detail.join("; ")))
}

// ---------------------------------------------------------------- 9

fn criterion_9() -> Verdict {
    let cfg = SolverConfig::default();
    let s_list = [0.6, 0.75, 0.9];
    let t = s_sweep_to_plaplacian(SweepFamily::ConstantForce { force: 1.0 }, 2.0, &s_list, 257, &cfg).unwrap();
    let errs: Vec<f64> = t.rows.iter().map(|r| r.error).collect();
    let grads: Vec<f64> = t.rows.iter().map(|r| r.gradient_error).collect();
    let mono = errs.windows(2).all(|w| w[1] <= w[0]) && grads.windows(2).all(|w| w[1] <= w[0]);
    let a = s_sweep_to_plaplacian(SweepFamily::Affine { a: 1.0, b: 0.0 }, 2.0, &s_list, 257, &cfg).unwrap();
    let affine = a.rows.iter().map(|r| r.error.max(r.gradient_error)).fold(0.0, f64::max);
    let fmt = |v: &[f64]| v.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>().join(",");
    verdict(
        mono && affine < 1e-6,
        format!("L2 errors [{}], gradient errors [{}] nonincreasing={mono}; affine max {affine:.1e} (tol 1e-6)", fmt(&errs), fmt(&grads)),
    )
}

// ---------------------------------------------------------------- 10

fn criterion_10() -> Verdict {
    let grid = Grid::new(1, 1.0, 1026).unwrap();
    let ball = Ball::centered(0.5).unwrap();
    let hs: Vec<Translation> = dyadic_steps(&grid, 0.24).into_iter().skip(1).collect();
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for beta in [0.25, 0.5, 0.75] {
        let u = GridFunction::exact(&TestFunction::Power { beta }, &grid).unwrap();
        let r = estimate_order(&u, &ball, 2.0, &hs).unwrap();
        let oracle: Vec<f64> = r.h.iter().map(|&h| power_difference_norm(beta, h, 0.5, 2.0)).collect();
        let expected = log_slope(&r.h, &oracle).min(1.0);
        worst = worst.max((r.tau_hat - expected).abs());
        detail.push(format!("beta={beta}: {:.4} vs {:.4}", r.tau_hat, expected));
    }
    verdict(worst <= 0.05, format!("{}; max gap {worst:.4} (tol 0.05)", detail.join(", ")))
}

// ---------------------------------------------------------------- 11

fn run_solve(workers: usize, dir: &std::path::Path) {
    let mut cfg = RunConfig::default();
    cfg.command = Some(CommandKind::Solve);
    cfg.out = dir.to_path_buf();
    cfg.workers = Some(workers);
    cfg.problem.dim = 2;
    cfg.problem.n = 33;
    cfg.problem.half_width = 1.5;
    fraclab_cli::run(&cfg).unwrap();
}

fn criterion_11() -> Verdict {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_solve(1, a.path());
    run_solve(4, b.path());
    let identical = ["solution.csv", "energy.csv", "summary.csv"]
        .iter()
        .all(|f| fs::read(a.path().join(f)).unwrap() == fs::read(b.path().join(f)).unwrap());
    let mut ok = identical;
    let mut detail = vec![format!("2D solve outputs identical at 1 vs 4 workers={identical}")];
    for (dim, ladder) in [(1usize, vec![128, 256, 512]), (2, vec![16, 32, 64])] {
        let mut cfg = RunConfig::default();
        cfg.bench.dim = dim;
        cfg.bench.ladder = ladder;
        cfg.bench.repeats = 3;
        let res = measure(&cfg).unwrap();
        let target = 2.0 * dim as f64;
        let bits = res.rows.iter().all(|r| r.identical);
        ok &= (res.exponent - target).abs() <= 0.5 && bits;
        detail.push(format!("{dim}D exponent {:.3} (target {target} ± 0.5), single-worker bits equal={bits}", res.exponent));
    }
    verdict(ok, detail.join("; "))
}

fn main() -> ExitCode {
    let (c1, c1_known) = criterion_1();
    let checks: Vec<(&str, Verdict)> = vec![
        ("pointwise inequalities", c1),
        ("exponent arithmetic", criterion_2()),
        ("solver oracles", criterion_3()),
        ("seminorm oracles", criterion_4()),
        ("seminorm structure", criterion_5()),
        ("Besov embedding", criterion_6()),
        ("BBM limit", criterion_7()),
        ("Caccioppoli/improvement ratios", criterion_8()),
        ("s-sweep", criterion_9()),
        ("order estimation", criterion_10()),
        ("determinism and scaling", criterion_11()),
    ];
    let mut unexpected = 0;
    for (k, (name, v)) in checks.iter().enumerate() {
        println!("{} criterion {:>2} {name}: {}", if v.pass { "PASS" } else { "FAIL" }, k + 1, v.detail);
        let documented = k == 0 && c1_known;
        if !v.pass && !documented {
            unexpected += 1;
        }
    }
    let passed = checks.iter().filter(|(_, v)| v.pass).count();
    println!(
        "acceptance: {passed}/{} PASS; criterion 1 failure matches the documented holder/down pattern: {c1_known}",
        checks.len()
    );
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {unexpected} unexpected failure(s)");
        ExitCode::FAILURE
    }
}
