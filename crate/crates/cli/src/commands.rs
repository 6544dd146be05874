//! One function per subcommand and verify target. Each writes its tables
//! into the output directory and reports success, PASS or FAIL.

use fraclab_core::diffops::Translation;
use fraclab_core::nonlinear::verify_pointwise_inequalities;
use fraclab_core::regularity::{
    bbm_closed_form, bbm_limit, classify_regime, estimate_order, gamma_closed_form, iteration_trace,
    s_sweep_to_plaplacian, verify_besov_embedding, verify_caccioppoli, verify_improvement, LocalSetup, SweepFamily,
    SweepTable,
};
use fraclab_core::report::ReportRow;
use fraclab_core::seminorms::{
    besov2_sup, composite_ar, dyadic_h_grid, dyadic_steps, gagliardo, gagliardo_global, lp_norm, nikolskii_sup,
    x_bracket, xps_norm, y_bracket, y_h_grid, SeminormResult,
};
use fraclab_core::solver::{solve_dirichlet, weak_residual, Solution, TestBank};
use fraclab_core::{Ball, Error, ExteriorRule, FractionalParams, Grid, GridFunction, TestFunction, VerificationReport};

use crate::bench::run_bench;
use crate::config::{CommandKind, ExteriorSpec, FamilySpec, RunConfig, SeminormKindSpec, Target};
use crate::error::{CliError, Result};
use crate::oracle::{log_slope, power_difference_norm};
use crate::output::{emit_report, num, OutDir, Table};
use crate::svg::LogLogPlot;

/// How a run ended when no error occurred.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Pass,
    Fail,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Success | Outcome::Pass => 0,
            Outcome::Fail => 1,
        }
    }

    fn of(pass: bool) -> Self {
        if pass {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

/// Runs the configured command, inside a pool of `workers` threads when set.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    let command = cfg.command.ok_or_else(|| CliError::Config("no command given".into()))?;
    let mut out = OutDir::create(&cfg.out)?;
    out.run_json(cfg)?;
    match cfg.workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
            pool.install(|| dispatch(command, cfg, &mut out))
        }
        None => dispatch(command, cfg, &mut out),
    }
}

fn dispatch(command: CommandKind, cfg: &RunConfig, out: &mut OutDir) -> Result<Outcome> {
    match command {
        CommandKind::Solve => solve(cfg, out),
        CommandKind::Seminorm => seminorm(cfg, out),
        CommandKind::Estimate => estimate(cfg, out),
        CommandKind::Verify => {
            let target = cfg.verify.target.ok_or_else(|| CliError::Config("verify needs a target".into()))?;
            let rep = verify(target, cfg, out)?;
            emit_report(out, &format!("{}_report", target.name()), &rep)?;
            out.text("verdict.txt", &(rep.verdict_line() + "\n"))?;
            println!("{}", rep.verdict_line());
            Ok(Outcome::of(rep.pass))
        }
        CommandKind::Sweep => sweep(cfg, out),
        CommandKind::Bench => {
            run_bench(cfg, out)?;
            Ok(Outcome::Success)
        }
    }
}

fn energy_table(history: &[f64]) -> Table {
    let mut t = Table::new(&[("iteration", "accepted step"), ("energy", "energy")]);
    for (k, e) in history.iter().enumerate() {
        t.row(vec![k.to_string(), num(*e)]);
    }
    t
}

fn solution_table(u: &GridFunction, omega: &Ball) -> Table {
    let g = u.grid();
    let mut t = Table::new(&[("index", "-"), ("x", "length"), ("y", "length"), ("u", "-"), ("free", "bool")]);
    for i in 0..g.len() {
        let x = g.point(i);
        t.row(vec![i.to_string(), num(x[0]), num(x[1]), num(u.values()[i]), omega.contains(x).to_string()]);
    }
    t
}

fn solve_problem(cfg: &RunConfig, grid: &Grid) -> Result<(Solution, fraclab_core::solver::DirichletProblem)> {
    let problem = cfg.problem.build_on(grid)?;
    let sol = solve_dirichlet(&problem, &cfg.solver.to_core(cfg.seed))?;
    Ok((sol, problem))
}

fn solve(cfg: &RunConfig, out: &mut OutDir) -> Result<Outcome> {
    let problem = cfg.problem.build()?;
    let sol = match solve_dirichlet(&problem, &cfg.solver.to_core(cfg.seed)) {
        Ok(s) => s,
        Err(e) => {
            if let Error::IterationLimit { history, .. } = &e {
                out.table("energy.csv", &energy_table(history))?;
            }
            return Err(e.into());
        }
    };
    out.table("solution.csv", &solution_table(&sol.u, &problem.omega))?;
    out.table("energy.csv", &energy_table(&sol.energy_history))?;
    let inner = problem.omega.with_radius(0.75 * problem.omega.radius)?;
    let bank = TestBank::standard(&sol.u, inner, Vec::new())?;
    let weak = weak_residual(&sol.u, &problem, &bank)?;
    let mut t = Table::new(&[
        ("iterations", "-"),
        ("gradient_residual", "-"),
        ("final_energy", "energy"),
        ("weak_residual", "-"),
        ("warnings", "count"),
    ]);
    t.row(vec![
        sol.iterations.to_string(),
        num(sol.residual),
        num(sol.energy_history.last().copied().unwrap_or(f64::NAN)),
        num(weak),
        sol.warnings.len().to_string(),
    ]);
    out.table("summary.csv", &t)?;
    if !sol.warnings.is_empty() {
        out.text("warnings.txt", &(sol.warnings.join("\n") + "\n"))?;
    }
    if cfg.svg && sol.energy_history.len() > 1 {
        let last = *sol.energy_history.last().unwrap();
        let gap: Vec<(f64, f64)> =
            sol.energy_history.iter().enumerate().map(|(k, e)| ((k + 1) as f64, e - last)).collect();
        let mut plot = LogLogPlot::new("energy gap", "accepted step", "E_k - E_final");
        plot.add("gap", gap);
        out.text("energy.svg", &plot.render())?;
    }
    Ok(Outcome::Success)
}

fn seminorm(cfg: &RunConfig, out: &mut OutDir) -> Result<Outcome> {
    let sm = &cfg.seminorm;
    let grid = cfg.problem.grid()?;
    let psi = sm.function.clone().unwrap_or_else(|| cfg.problem.g.clone()).to_core();
    let u = match sm.exterior {
        ExteriorSpec::ClosedForm => GridFunction::exact(&psi, &grid)?,
        ExteriorSpec::Zero => GridFunction::sample(&psi, &grid, ExteriorRule::zero())?,
    };
    let p = sm.p.unwrap_or(cfg.problem.p);
    let ball = sm.ball.to_core()?;
    let inner = match sm.inner {
        Some(b) => b.to_core()?,
        None => ball.with_radius(0.75 * ball.radius)?,
    };
    let cap = sm.h_cap.unwrap_or(0.5 * ball.radius);
    let orders = if sm.alphas.is_empty() { vec![sm.alpha] } else { sm.alphas.clone() };
    let pr = &cfg.problem;
    let params_at = |s: f64| FractionalParams::new(pr.dim, s, p, pr.t.min(s), pr.lambda);
    let mut t = Table::new(&[
        ("kind", "-"),
        ("alpha", "order"),
        ("p", "-"),
        ("value", "seminorm"),
        ("raised", "seminorm^p"),
        ("nodes", "count"),
        ("tail_radius", "length"),
        ("argmax_h", "length"),
    ]);
    let mut composite = Table::new(&[("alpha", "order"), ("summand", "index"), ("value", "-")]);
    for alpha in orders {
        let r: SeminormResult = match sm.kind {
            SeminormKindSpec::Gagliardo => gagliardo(&u, &ball, alpha, p)?,
            SeminormKindSpec::GagliardoGlobal => gagliardo_global(&u, alpha, p)?,
            SeminormKindSpec::Nikolskii => nikolskii_sup(&u, &ball, alpha, p, &dyadic_h_grid(&grid, cap))?,
            SeminormKindSpec::Besov2 => besov2_sup(&u, alpha, p, &dyadic_h_grid(&grid, cap))?,
            SeminormKindSpec::Xps => xps_norm(&u, &params_at(alpha)?)?,
            SeminormKindSpec::SnailBracketX => x_bracket(&u, &inner, &ball, &params_at(alpha)?)?,
            SeminormKindSpec::SnailBracketY => {
                y_bracket(&u, &inner, &ball, &params_at(alpha)?, &y_h_grid(&grid, &inner, &ball)?)?
            }
            SeminormKindSpec::Lp => lp_norm(&u, &ball, p)?,
            SeminormKindSpec::CompositeAr => {
                let f = GridFunction::sample(&pr.f.to_core(), &grid, ExteriorRule::zero())?;
                let c = composite_ar(&u, &f, &ball, &params_at(alpha)?)?;
                for (k, v) in c.summands.iter().enumerate() {
                    composite.row(vec![num(alpha), (k + 1).to_string(), num(*v)]);
                }
                t.row(vec![
                    "composite_ar".into(),
                    num(alpha),
                    num(p),
                    num(c.total),
                    num(c.total),
                    grid.restrict(&ball).len().to_string(),
                    String::new(),
                    String::new(),
                ]);
                continue;
            }
        };
        t.row(vec![
            kind_name(sm.kind).into(),
            num(alpha),
            num(p),
            num(r.value),
            num(r.raised),
            r.nodes.to_string(),
            num(r.tail_radius),
            r.argmax_h.map(|h| num(h[0].hypot(h[1]))).unwrap_or_default(),
        ]);
    }
    out.table("seminorm.csv", &t)?;
    if !composite.is_empty() {
        out.table("composite_ar.csv", &composite)?;
    }
    Ok(Outcome::Success)
}

fn kind_name(k: SeminormKindSpec) -> &'static str {
    match k {
        SeminormKindSpec::Gagliardo => "gagliardo",
        SeminormKindSpec::GagliardoGlobal => "gagliardo_global",
        SeminormKindSpec::Nikolskii => "nikolskii",
        SeminormKindSpec::Besov2 => "besov2",
        SeminormKindSpec::Xps => "xps",
        SeminormKindSpec::SnailBracketX => "snail_bracket_X",
        SeminormKindSpec::SnailBracketY => "snail_bracket_Y",
        SeminormKindSpec::Lp => "lp",
        SeminormKindSpec::CompositeAr => "composite_ar",
    }
}

fn estimate(cfg: &RunConfig, out: &mut OutDir) -> Result<Outcome> {
    let params = cfg.problem.params()?;
    let scheme = classify_regime(&params, cfg.estimate.tau)?;
    let mut t = Table::new(&[("quantity", "-"), ("value", "-")]);
    let rectified = scheme.rectified_beta.map(num).unwrap_or_default();
    for (k, v) in [
        ("kappa", num(scheme.kappa)),
        ("Gamma", num(scheme.gamma_big)),
        ("regime", scheme.regime.name().to_string()),
        ("i0", scheme.i0.to_string()),
        ("tau", num(scheme.tau)),
        ("borderline", scheme.borderline.to_string()),
        ("rectified_beta", rectified),
    ] {
        t.row(vec![k.into(), v]);
    }
    out.table("scheme.csv", &t)?;
    let mut gt = Table::new(&[("i", "-"), ("gamma", "order"), ("closed_form", "order")]);
    for (i, g) in scheme.gammas.iter().enumerate() {
        gt.row(vec![i.to_string(), num(*g), num(gamma_closed_form(&params, i))]);
    }
    out.table("gammas.csv", &gt)?;

    let grid = cfg.problem.grid()?;
    let u = match &cfg.estimate.function {
        Some(f) => GridFunction::exact(&f.to_core(), &grid)?,
        None => solve_problem(cfg, &grid)?.0.u,
    };
    let first = if cfg.estimate.skip_first { 2 } else { 1 };
    let last = (cfg.estimate.h_cap / grid.spacing() + 1e-9).floor() as i64;
    let hs: Vec<Translation> = (first..=last).map(|k| Translation::along(&grid, 0, k)).collect();
    let rep = estimate_order(&u, &cfg.estimate.ball.to_core()?, cfg.problem.p, &hs)?;
    let mut ot = Table::new(&[("h", "length"), ("difference_norm", "L^p")]);
    for (h, v) in rep.h.iter().zip(&rep.norms) {
        ot.row(vec![num(*h), num(*v)]);
    }
    out.table("order.csv", &ot)?;
    let mut ft = Table::new(&[
        ("slope", "-"),
        ("intercept", "-"),
        ("residual", "-"),
        ("tau_hat", "order"),
        ("capped", "bool"),
        ("gradient_slope", "-"),
    ]);
    ft.row(vec![
        num(rep.fit.slope),
        num(rep.fit.intercept),
        num(rep.fit.residual),
        num(rep.tau_hat),
        rep.capped.to_string(),
        rep.gradient_fit.as_ref().map(|f| num(f.slope)).unwrap_or_default(),
    ]);
    out.table("order_fit.csv", &ft)?;
    if cfg.svg {
        let mut plot = LogLogPlot::new("difference norms", "|h|", "||δ_h u||");
        plot.add("measured", rep.h.iter().copied().zip(rep.norms.iter().copied()).collect());
        out.text("order.svg", &plot.render())?;
    }
    Ok(Outcome::Success)
}

fn verify(target: Target, cfg: &RunConfig, out: &mut OutDir) -> Result<VerificationReport> {
    let v = &cfg.verify;
    let pr = &cfg.problem;
    match target {
        Target::Pointwise => {
            let rep = verify_pointwise_inequalities(&v.p_list, v.samples, cfg.seed)?;
            let mut t = Table::new(&[
                ("p", "-"),
                ("inequality", "-"),
                ("samples", "count"),
                ("worst_slack", "relative"),
                ("verdict", "PASS|FAIL"),
            ]);
            for r in &rep.rows {
                let name = r.label.split(':').next().unwrap_or_default();
                let slack = if name.ends_with("-equality") {
                    r.lhs
                } else {
                    let scale = r.lhs.abs().max(r.rhs.abs());
                    if scale == 0.0 {
                        0.0
                    } else {
                        (r.lhs - r.rhs) / scale
                    }
                };
                t.row(vec![
                    num(r.h),
                    name.into(),
                    v.samples.to_string(),
                    num(slack),
                    if r.pass { "PASS" } else { "FAIL" }.into(),
                ]);
            }
            out.table("pointwise.csv", &t)?;
            Ok(rep)
        }
        Target::Caccioppoli | Target::Improvement => {
            let grid = pr.grid_with(v.half_width.unwrap_or(pr.half_width), v.n.unwrap_or(pr.n))?;
            let (sol, problem) = solve_problem(cfg, &grid)?;
            let params = *problem.params();
            let setup = LocalSetup::new(problem.omega, v.r, v.big_r)?;
            let gamma = v.gamma.unwrap_or(params.s);
            if target == Target::Caccioppoli {
                let hs = dyadic_steps(&grid, setup.h0_cap());
                Ok(verify_caccioppoli(&sol.u, &problem.f, &setup, gamma, &params, &hs)?)
            } else {
                Ok(verify_improvement(&sol.u, &setup, gamma, &params, v.h0)?)
            }
        }
        Target::Embedding => {
            let grid = Grid::new(1, v.half_width.unwrap_or(4.0), v.n.unwrap_or(1025))?;
            let corpus = [
                TestFunction::Spline { degree: 2, width: 1.0 },
                TestFunction::Spline { degree: 3, width: 1.0 },
                TestFunction::Spline { degree: 3, width: 1.5 },
                TestFunction::Spline { degree: 4, width: 1.2 },
            ];
            let alphas = v.alphas.clone().unwrap_or_else(|| vec![1.25, 1.5, 1.75]);
            // kinks of the hat give the sharp order 1 + 1/p
            let matched = [(1.0 + 1.0 / pr.p, TestFunction::Spline { degree: 1, width: 1.5 })];
            Ok(verify_besov_embedding(&corpus, &alphas, pr.p, &grid, &matched, &v.times)?)
        }
        Target::Bbm => verify_bbm(cfg, out),
        Target::Sweep => {
            let n = v.n.unwrap_or(257);
            let s_list = v.s_list.clone().unwrap_or_else(|| vec![0.6, 0.75, 0.9]);
            let solver = cfg.solver.to_core(cfg.seed);
            let force = s_sweep_to_plaplacian(SweepFamily::ConstantForce { force: 1.0 }, pr.p, &s_list, n, &solver)?;
            let affine = s_sweep_to_plaplacian(SweepFamily::Affine { a: 1.0, b: 0.0 }, pr.p, &s_list, n, &solver)?;
            write_sweep(out, &[&force, &affine])?;
            let mut rep = VerificationReport::new("sweep");
            for (name, t) in [("constant_force", &force), ("affine", &affine)] {
                for r in &t.rows {
                    rep.push(ReportRow::new(format!("{name}:error:s={}", r.s), r.s, r.error, 1.0));
                    rep.push(ReportRow::new(format!("{name}:gradient_error:s={}", r.s), r.s, r.gradient_error, 1.0));
                }
                let label = if name == "affine" { "affine:exact" } else { "constant_force:monotone" };
                rep.push(ReportRow::new(label, 0.0, t.monotone as u8 as f64, 1.0).with_pass(t.monotone));
            }
            let last = force.rows.last().map(|r| r.error).unwrap_or(f64::NAN);
            let label = format!("error_at_s={}", s_list.last().copied().unwrap_or(f64::NAN));
            rep.set_worst(label, last);
            Ok(rep)
        }
        Target::Trace => {
            let grid = pr.grid_with(v.half_width.unwrap_or(1.25), v.n.unwrap_or(501))?;
            let (sol, problem) = solve_problem(cfg, &grid)?;
            let tr = iteration_trace(&sol.u, problem.params(), v.tau)?;
            let mut t = Table::new(&[
                ("stage", "-"),
                ("gamma", "order"),
                ("outer", "length"),
                ("inner", "length"),
                ("m_gamma", "-"),
                ("rectified", "bool"),
            ]);
            for st in &tr.stages {
                t.row(vec![
                    st.index.to_string(),
                    num(st.gamma),
                    num(st.outer),
                    num(st.inner),
                    num(st.m_gamma),
                    st.rectified.to_string(),
                ]);
            }
            out.table("trace.csv", &t)?;
            let mut rep = tr.report.clone();
            rep.fit("envelope", tr.envelope);
            rep.fit("h0", tr.h0);
            Ok(rep)
        }
        Target::Order => {
            let grid = Grid::new(1, v.half_width.unwrap_or(1.0), v.n.unwrap_or(1026))?;
            let ball = Ball::centered(0.5)?;
            let hs: Vec<Translation> = dyadic_steps(&grid, 0.24).into_iter().skip(1).collect();
            let mut rep = VerificationReport::new("order");
            let mut worst: f64 = 0.0;
            let mut t = Table::new(&[("beta", "-"), ("h", "length"), ("measured_norm", "L^p"), ("oracle_norm", "L^p")]);
            for &beta in &v.betas {
                let u = GridFunction::exact(&TestFunction::Power { beta }, &grid)?;
                let r = estimate_order(&u, &ball, pr.p, &hs)?;
                let oracle: Vec<f64> =
                    r.h.iter().map(|&h| power_difference_norm(beta, h, ball.radius, pr.p)).collect();
                for ((h, m), o) in r.h.iter().zip(&r.norms).zip(&oracle) {
                    t.row(vec![num(beta), num(*h), num(*m), num(*o)]);
                }
                let expected = log_slope(&r.h, &oracle).min(1.0);
                let gap = (r.tau_hat - expected).abs();
                worst = worst.max(gap);
                rep.push(
                    ReportRow::new(format!("order:beta={beta}"), beta, r.tau_hat, expected)
                        .with_pass(gap <= v.tolerance),
                );
            }
            out.table("order_norms.csv", &t)?;
            rep.pass = rep.rows.iter().all(|r| r.pass);
            rep.set_worst("max_slope_gap", worst);
            Ok(rep)
        }
    }
}

fn verify_bbm(cfg: &RunConfig, out: &mut OutDir) -> Result<VerificationReport> {
    let v = &cfg.verify;
    let p = cfg.problem.p;
    let grid = Grid::new(1, v.half_width.unwrap_or(1.0), v.n.unwrap_or(257))?;
    let ball = Ball::new([0.5, 0.0], 0.5)?;
    let s_list = v.s_list.clone().unwrap_or_else(|| vec![0.5, 0.7, 0.8, 0.9, 0.95]);
    let u = TestFunction::Affine { a: [1.0, 0.0], b: 0.0 };
    let table = bbm_limit(&u, &ball, p, &s_list, &grid)?;
    let closed = p == 2.0;
    let mut t = Table::new(&[
        ("s", "-"),
        ("scaled", "(1-s)[u]^p"),
        ("gradient", "int |grad u|^p"),
        ("ratio", "-"),
        ("closed_form", "(1-s)[u]^p"),
    ]);
    let mut rep = VerificationReport::new("bbm");
    let mut worst: f64 = 0.0;
    for r in &table.rows {
        let exact = if closed { bbm_closed_form(r.s) } else { f64::NAN };
        t.row(vec![num(r.s), num(r.scaled), num(r.gradient), num(r.ratio), num(exact)]);
        if closed {
            let rel = (r.scaled - exact).abs() / exact;
            worst = worst.max(rel);
            rep.push(ReportRow::new(format!("bbm:s={}", r.s), r.s, r.scaled, exact).with_pass(rel < 0.03));
        }
    }
    let dist: Vec<f64> = table.rows.iter().map(|r| (r.ratio - 1.0).abs()).collect();
    let trend = dist.windows(2).all(|w| w[1] <= w[0]);
    rep.push(
        ReportRow::new("trend_to_one", 0.0, *dist.last().unwrap_or(&f64::NAN), dist[0]).with_pass(trend),
    );
    rep.push(ReportRow::new("converged", 0.0, table.limit, 1.0).with_pass(table.converged));
    for w in &table.warnings {
        rep.note(w.clone());
    }
    rep.fit("limit", table.limit);
    rep.set_worst(if closed { "max_relative_error" } else { "limit" }, if closed { worst } else { table.limit });
    out.table("bbm_table.csv", &t)?;
    let mut plot = LogLogPlot::new("BBM limit", "1 - s", "(1-s)[u]^p");
    plot.add("measured", table.rows.iter().map(|r| (1.0 - r.s, r.scaled)).collect());
    if closed {
        plot.add("closed form", table.rows.iter().map(|r| (1.0 - r.s, bbm_closed_form(r.s))).collect());
    }
    out.text("bbm.svg", &plot.render())?;
    Ok(rep)
}

fn family_name(f: &SweepFamily) -> &'static str {
    match f {
        SweepFamily::ConstantForce { .. } => "constant_force",
        SweepFamily::Affine { .. } => "affine",
    }
}

fn write_sweep(out: &mut OutDir, tables: &[&SweepTable]) -> Result<()> {
    let mut t = Table::new(&[
        ("family", "-"),
        ("s", "-"),
        ("error", "L^p(Omega)"),
        ("gradient_error", "L^p(B_1/2)"),
        ("iterations", "count"),
    ]);
    let mut plot = LogLogPlot::new("s-sweep errors", "1 - s", "error");
    for table in tables {
        let name = family_name(&table.family);
        for r in &table.rows {
            t.row(vec![name.into(), num(r.s), num(r.error), num(r.gradient_error), r.iterations.to_string()]);
        }
        plot.add(&format!("{name} L^p"), table.rows.iter().map(|r| (1.0 - r.s, r.error)).collect());
        plot.add(&format!("{name} gradient"), table.rows.iter().map(|r| (1.0 - r.s, r.gradient_error)).collect());
    }
    out.table("sweep.csv", &t)?;
    out.text("sweep.svg", &plot.render())
}

fn sweep(cfg: &RunConfig, out: &mut OutDir) -> Result<Outcome> {
    let sw = &cfg.sweep;
    let family = match sw.family {
        FamilySpec::ConstantForce { force } => SweepFamily::ConstantForce { force },
        FamilySpec::Affine { a, b } => SweepFamily::Affine { a, b },
    };
    let p = sw.p.unwrap_or(cfg.problem.p);
    let table = s_sweep_to_plaplacian(family, p, &sw.s_list, sw.n, &cfg.solver.to_core(cfg.seed))?;
    write_sweep(out, &[&table])?;
    let line = format!("{} sweep {} monotone={}", if table.monotone { "PASS" } else { "FAIL" }, family_name(&family), table.monotone);
    out.text("verdict.txt", &(line.clone() + "\n"))?;
    println!("{line}");
    Ok(Outcome::of(table.monotone))
}
