//! Wall-clock scaling of the dense workloads over a ladder of grid sizes.

use std::time::Instant;

use fraclab_core::seminorms::gagliardo;
use fraclab_core::solver::{solve_dirichlet, DirichletProblem};
use fraclab_core::{Ball, Grid, GridFunction, TestFunction};

use crate::config::{RunConfig, Workload};
use crate::error::Result;
use crate::oracle::log_slope;
use crate::output::{num, OutDir, Table};

const MIN_SAMPLE: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub nodes: usize,
    /// Fastest of the repeats.
    pub seconds: f64,
    pub value: f64,
    /// The value computed on one worker has the same bits.
    pub identical: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub rows: Vec<BenchRow>,
    /// Log-log slope of time against nodes per axis.
    pub exponent: f64,
}

/// Untimed inputs of one ladder step.
enum Prepared {
    Gagliardo(GridFunction, Ball),
    Solve(DirichletProblem),
}

fn prepare(cfg: &RunConfig, n: usize) -> Result<Prepared> {
    let b = &cfg.bench;
    Ok(match b.workload {
        Workload::Gagliardo => {
            let grid = Grid::new(b.dim, 1.0, n)?;
            let u = GridFunction::exact(&TestFunction::Bump { radius: 0.8 }, &grid)?;
            Prepared::Gagliardo(u, Ball::centered(0.9)?)
        }
        Workload::Solve => {
            let grid = cfg.problem.grid_with(cfg.problem.half_width, n)?;
            Prepared::Solve(cfg.problem.build_on(&grid)?)
        }
    })
}

fn workload(cfg: &RunConfig, input: &Prepared) -> Result<(usize, f64)> {
    match input {
        Prepared::Gagliardo(u, ball) => {
            let r = gagliardo(u, ball, cfg.bench.alpha, cfg.bench.p)?;
            Ok((r.nodes, r.raised))
        }
        Prepared::Solve(problem) => {
            let sol = solve_dirichlet(problem, &cfg.solver.to_core(cfg.seed))?;
            Ok((sol.u.grid().len(), sol.energy_history.last().copied().unwrap_or(f64::NAN)))
        }
    }
}

/// Runs the ladder in the current thread pool and repeats each size once
/// on a single worker to compare values bit for bit.
pub fn measure(cfg: &RunConfig) -> Result<BenchResult> {
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build()?;
    let mut rows = Vec::new();
    for &n in &cfg.bench.ladder {
        let input = prepare(cfg, n)?;
        let mut best = f64::INFINITY;
        let mut last = (0, f64::NAN);
        for _ in 0..cfg.bench.repeats.max(1) {
            // short workloads are batched so the clock resolves them
            let t0 = Instant::now();
            let mut calls = 0u32;
            while calls == 0 || t0.elapsed().as_secs_f64() < MIN_SAMPLE {
                last = workload(cfg, &input)?;
                calls += 1;
            }
            best = best.min(t0.elapsed().as_secs_f64() / calls as f64);
        }
        let (_, serial) = single.install(|| workload(cfg, &input))?;
        rows.push(BenchRow { n, nodes: last.0, seconds: best, value: last.1, identical: serial.to_bits() == last.1.to_bits() });
    }
    let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let ts: Vec<f64> = rows.iter().map(|r| r.seconds).collect();
    let exponent = if rows.len() >= 2 { log_slope(&ns, &ts) } else { f64::NAN };
    Ok(BenchResult { rows, exponent })
}

pub fn run_bench(cfg: &RunConfig, out: &mut OutDir) -> Result<BenchResult> {
    let res = measure(cfg)?;
    let name = match cfg.bench.workload {
        Workload::Gagliardo => "gagliardo",
        Workload::Solve => "solve",
    };
    let mut t = Table::new(&[
        ("workload", "-"),
        ("dim", "-"),
        ("n", "nodes per axis"),
        ("nodes", "count"),
        ("seconds", "s"),
        ("value", "-"),
        ("identical_single_worker", "bool"),
    ]);
    for r in &res.rows {
        t.row(vec![
            name.into(),
            cfg.bench.dim.to_string(),
            r.n.to_string(),
            r.nodes.to_string(),
            num(r.seconds),
            num(r.value),
            r.identical.to_string(),
        ]);
    }
    out.table("bench.csv", &t)?;
    let mut f = Table::new(&[("exponent", "d log t / d log n"), ("expected", "d log t / d log n")]);
    let expected = match cfg.bench.workload {
        Workload::Gagliardo => 2.0 * cfg.bench.dim as f64,
        Workload::Solve => f64::NAN,
    };
    f.row(vec![num(res.exponent), num(expected)]);
    out.table("bench_fit.csv", &f)?;
    Ok(res)
}
