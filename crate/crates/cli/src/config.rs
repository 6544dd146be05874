//! Run configuration: strict JSON with per-section defaults, overridable by
//! command-line flags, validated before anything runs.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use fraclab_core::kernel::Modulation;
use fraclab_core::solver::{DirichletProblem, Init, SolverConfig};
use fraclab_core::{Ball, FractionalParams, Grid, GridFunction, Kernel, TestFunction};
use fraclab_core::ExteriorRule;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Solve,
    Seminorm,
    Estimate,
    Verify,
    Sweep,
    Bench,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Pointwise,
    Caccioppoli,
    Improvement,
    Embedding,
    Bbm,
    Sweep,
    Trace,
    Order,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::Pointwise => "pointwise",
            Target::Caccioppoli => "caccioppoli",
            Target::Improvement => "improvement",
            Target::Embedding => "embedding",
            Target::Bbm => "bbm",
            Target::Sweep => "sweep",
            Target::Trace => "trace",
            Target::Order => "order",
        }
    }
}

/// Closed-form function tags, mirroring [`TestFunction`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Constant { value: f64 },
    Affine { a: [f64; 2], b: f64 },
    Power { beta: f64 },
    Bump { radius: f64 },
    Gaussian { sigma: f64 },
    TruncatedParabola { exponent: f64 },
    Spline { degree: u32, width: f64 },
    Square,
}

impl FunctionSpec {
    pub fn to_core(&self) -> TestFunction {
        match *self {
            FunctionSpec::Constant { value } => TestFunction::Constant(value),
            FunctionSpec::Affine { a, b } => TestFunction::Affine { a, b },
            FunctionSpec::Power { beta } => TestFunction::Power { beta },
            FunctionSpec::Bump { radius } => TestFunction::Bump { radius },
            FunctionSpec::Gaussian { sigma } => TestFunction::Gaussian { sigma },
            FunctionSpec::TruncatedParabola { exponent } => TestFunction::TruncatedParabola { exponent },
            FunctionSpec::Spline { degree, width } => TestFunction::Spline { degree, width },
            FunctionSpec::Square => TestFunction::Square,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    Standard,
    Constant { value: f64 },
    /// Angular modulation with contrast set by `Λ` (2D).
    Angular,
    /// `Λ` inside the unit ball, `1/Λ` outside, unless given explicitly.
    RadialStep {
        #[serde(default)]
        inner: Option<f64>,
        #[serde(default)]
        outer: Option<f64>,
        #[serde(default)]
        radius: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallSpec {
    #[serde(default)]
    pub center: [f64; 2],
    pub radius: f64,
}

impl BallSpec {
    pub fn centered(radius: f64) -> Self {
        BallSpec { center: [0.0, 0.0], radius }
    }

    pub fn to_core(&self) -> Result<Ball> {
        Ok(Ball::new(self.center, self.radius)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExteriorSpec {
    /// The function's own closed form outside the box.
    ClosedForm,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProblemSpec {
    pub dim: usize,
    pub half_width: f64,
    pub n: usize,
    pub s: f64,
    pub p: f64,
    pub t: f64,
    pub lambda: f64,
    pub kernel: KernelSpec,
    pub omega: BallSpec,
    pub f: FunctionSpec,
    pub g: FunctionSpec,
}

impl Default for ProblemSpec {
    fn default() -> Self {
        ProblemSpec {
            dim: 1,
            half_width: 2.0,
            n: 129,
            s: 0.5,
            p: 2.0,
            t: 0.0,
            lambda: 1.0,
            kernel: KernelSpec::Standard,
            omega: BallSpec::centered(1.0),
            f: FunctionSpec::Constant { value: 1.0 },
            g: FunctionSpec::Constant { value: 0.0 },
        }
    }
}

impl ProblemSpec {
    pub fn params(&self) -> Result<FractionalParams> {
        Ok(FractionalParams::new(self.dim, self.s, self.p, self.t, self.lambda)?)
    }

    pub fn grid(&self) -> Result<Grid> {
        self.grid_with(self.half_width, self.n)
    }

    pub fn grid_with(&self, half_width: f64, n: usize) -> Result<Grid> {
        Ok(Grid::new(self.dim, half_width, n)?)
    }

    pub fn kernel(&self, params: FractionalParams) -> Result<Kernel> {
        let k = match &self.kernel {
            KernelSpec::Standard => Kernel::standard(params),
            KernelSpec::Constant { value } => Kernel::modulated(params, Modulation::Constant(*value))?,
            KernelSpec::Angular => Kernel::modulated(params, Modulation::Angular)?,
            KernelSpec::RadialStep { inner, outer, radius } => Kernel::modulated(
                params,
                Modulation::RadialStep {
                    inner: inner.unwrap_or(params.lambda),
                    outer: outer.unwrap_or(1.0 / params.lambda),
                    radius: radius.unwrap_or(1.0),
                },
            )?,
        };
        Ok(k)
    }

    /// The Dirichlet problem on the configured grid.
    pub fn build(&self) -> Result<DirichletProblem> {
        self.build_on(&self.grid()?)
    }

    pub fn build_on(&self, grid: &Grid) -> Result<DirichletProblem> {
        let params = self.params()?;
        let f = GridFunction::sample(&self.f.to_core(), grid, ExteriorRule::zero())?;
        let g = GridFunction::exact(&self.g.to_core(), grid)?;
        Ok(DirichletProblem::new(self.omega.to_core()?, f, g, self.kernel(params)?)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitSpec {
    Exterior,
    Zero,
    /// Seeded from the run seed.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSpec {
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub init: InitSpec,
}

impl Default for SolverSpec {
    fn default() -> Self {
        let d = SolverConfig::default();
        SolverSpec { max_iterations: d.max_iterations, gradient_tolerance: d.gradient_tolerance, init: InitSpec::Exterior }
    }
}

impl SolverSpec {
    pub fn to_core(&self, seed: u64) -> SolverConfig {
        SolverConfig {
            max_iterations: self.max_iterations,
            gradient_tolerance: self.gradient_tolerance,
            init: match self.init {
                InitSpec::Exterior => Init::Exterior,
                InitSpec::Zero => Init::Zero,
                InitSpec::Random => Init::Random(seed),
            },
            ..SolverConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeminormKindSpec {
    Gagliardo,
    GagliardoGlobal,
    Nikolskii,
    Besov2,
    Xps,
    SnailBracketX,
    SnailBracketY,
    Lp,
    CompositeAr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeminormSpec {
    pub kind: SeminormKindSpec,
    /// Defaults to the problem's `g`.
    pub function: Option<FunctionSpec>,
    pub exterior: ExteriorSpec,
    /// Differentiability order (`s` for the weighted and bracket kinds).
    pub alpha: f64,
    /// When nonempty, one row per order instead of `alpha`.
    pub alphas: Vec<f64>,
    /// Integrability; defaults to the problem's `p`.
    pub p: Option<f64>,
    pub ball: BallSpec,
    /// Inner set `F` of the brackets; defaults to `3/4` of `ball`.
    pub inner: Option<BallSpec>,
    /// Largest translation of the suprema; defaults to half the ball radius.
    pub h_cap: Option<f64>,
}

impl Default for SeminormSpec {
    fn default() -> Self {
        SeminormSpec {
            kind: SeminormKindSpec::Gagliardo,
            function: None,
            exterior: ExteriorSpec::ClosedForm,
            alpha: 0.5,
            alphas: Vec::new(),
            p: None,
            ball: BallSpec::centered(1.0),
            inner: None,
            h_cap: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimateSpec {
    /// Function to measure; the problem's solution when absent.
    pub function: Option<FunctionSpec>,
    pub ball: BallSpec,
    pub h_cap: f64,
    /// Drop the one-cell step from the fit.
    pub skip_first: bool,
    /// Step order of the regime classification.
    pub tau: Option<f64>,
}

impl Default for EstimateSpec {
    fn default() -> Self {
        EstimateSpec { function: None, ball: BallSpec::centered(0.5), h_cap: 0.24, skip_first: true, tau: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySpec {
    pub target: Option<Target>,
    pub p_list: Vec<f64>,
    pub samples: usize,
    /// Order of the Caccioppoli and improvement checks; defaults to `s`.
    pub gamma: Option<f64>,
    pub r: f64,
    pub big_r: f64,
    pub h0: Option<f64>,
    /// Per-target grid overrides.
    pub n: Option<usize>,
    pub half_width: Option<f64>,
    pub alphas: Option<Vec<f64>>,
    pub s_list: Option<Vec<f64>>,
    pub betas: Vec<f64>,
    pub tolerance: f64,
    pub times: Vec<f64>,
    pub tau: Option<f64>,
}

impl Default for VerifySpec {
    fn default() -> Self {
        VerifySpec {
            target: None,
            p_list: vec![2.0, 2.5, 3.0, 4.0],
            samples: 100_000,
            gamma: None,
            r: 0.25,
            big_r: 0.5,
            h0: None,
            n: None,
            half_width: None,
            alphas: None,
            s_list: None,
            betas: vec![0.25, 0.5, 0.75],
            tolerance: 0.05,
            times: vec![0.02, 0.01, 0.005],
            tau: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    ConstantForce { force: f64 },
    Affine { a: f64, b: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSpec {
    pub family: FamilySpec,
    pub s_list: Vec<f64>,
    pub n: usize,
    /// Defaults to the problem's `p`.
    pub p: Option<f64>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec { family: FamilySpec::ConstantForce { force: 1.0 }, s_list: vec![0.6, 0.75, 0.9], n: 257, p: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Workload {
    Gagliardo,
    Solve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchSpec {
    pub workload: Workload,
    pub dim: usize,
    /// Nodes per axis.
    pub ladder: Vec<usize>,
    pub repeats: usize,
    pub alpha: f64,
    /// Exponent of the Gagliardo workload.
    pub p: f64,
}

impl Default for BenchSpec {
    fn default() -> Self {
        BenchSpec { workload: Workload::Gagliardo, dim: 1, ladder: vec![128, 256, 512], repeats: 5, alpha: 0.5, p: 2.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub command: Option<CommandKind>,
    pub seed: u64,
    /// Worker threads; all outputs except timings are independent of it.
    pub workers: Option<usize>,
    pub out: PathBuf,
    pub svg: bool,
    pub problem: ProblemSpec,
    pub solver: SolverSpec,
    pub seminorm: SeminormSpec,
    pub estimate: EstimateSpec,
    pub verify: VerifySpec,
    pub sweep: SweepSpec,
    pub bench: BenchSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: None,
            seed: 0,
            workers: None,
            out: PathBuf::from("out"),
            svg: false,
            problem: ProblemSpec::default(),
            solver: SolverSpec::default(),
            seminorm: SeminormSpec::default(),
            estimate: EstimateSpec::default(),
            verify: VerifySpec::default(),
            sweep: SweepSpec::default(),
            bench: BenchSpec::default(),
        }
    }
}

/// Flag values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub command: Option<CommandKind>,
    pub target: Option<Target>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub svg: bool,
    pub dim: Option<usize>,
    pub n: Option<usize>,
    pub s: Option<f64>,
    pub p: Option<f64>,
    pub t: Option<f64>,
    pub lambda: Option<f64>,
    pub max_iterations: Option<usize>,
}

/// Reads `path` (if any), applies `overrides` and validates the result.
pub fn parse_config(path: Option<&Path>, overrides: &Overrides) -> Result<RunConfig> {
    let mut cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            parse_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
        }
        None => RunConfig::default(),
    };
    let o = overrides;
    if o.command.is_some() {
        cfg.command = o.command;
    }
    if o.target.is_some() {
        cfg.verify.target = o.target;
    }
    if let Some(v) = &o.out {
        cfg.out = v.clone();
    }
    if let Some(v) = o.seed {
        cfg.seed = v;
    }
    if o.workers.is_some() {
        cfg.workers = o.workers;
    }
    cfg.svg |= o.svg;
    let pr = &mut cfg.problem;
    if let Some(v) = o.dim {
        pr.dim = v;
    }
    if let Some(v) = o.n {
        pr.n = v;
    }
    if let Some(v) = o.s {
        pr.s = v;
    }
    if let Some(v) = o.p {
        pr.p = v;
    }
    if let Some(v) = o.t {
        pr.t = v;
    }
    if let Some(v) = o.lambda {
        pr.lambda = v;
    }
    if let Some(v) = o.max_iterations {
        cfg.solver.max_iterations = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Strict JSON parse; serde reports the offending key with line and column.
pub fn parse_str(text: &str) -> std::result::Result<RunConfig, serde_json::Error> {
    serde_json::from_str(text)
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn check_orders(name: &str, list: &[f64], lo: f64, hi: f64) -> Result<()> {
    if let Some(v) = list.iter().find(|v| !(**v > lo && **v < hi)) {
        return Err(bad(format!("{name} entries must lie in ({lo},{hi}), got {v}")));
    }
    Ok(())
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let params = self.problem.params().map_err(|e| bad(format!("problem: {}", e)))?;
        self.problem.kernel(params).map_err(|e| bad(format!("problem.kernel: {}", e)))?;
        self.problem.grid().map_err(|e| bad(format!("problem: {}", e)))?;
        self.problem.omega.to_core().map_err(|e| bad(format!("problem.omega: {}", e)))?;
        for (name, f) in [("problem.f", &self.problem.f), ("problem.g", &self.problem.g)] {
            f.to_core().validate().map_err(|e| bad(format!("{name}: {e}")))?;
        }
        self.solver.to_core(self.seed).validate().map_err(|e| bad(format!("solver: {e}")))?;
        if self.workers == Some(0) {
            return Err(bad("workers must be at least 1"));
        }
        let sm = &self.seminorm;
        if let Some(f) = &sm.function {
            f.to_core().validate().map_err(|e| bad(format!("seminorm.function: {e}")))?;
        }
        if !(sm.ball.radius > 0.0) {
            return Err(bad("seminorm.ball radius must be positive"));
        }
        if let Some(p) = sm.p {
            if !(p >= 1.0) {
                return Err(bad(format!("seminorm.p must satisfy p ≥ 1, got {p}")));
            }
        }
        let v = &self.verify;
        if let Some(p) = v.p_list.iter().find(|p| !(**p >= 2.0)) {
            return Err(bad(format!("verify.p_list: p must satisfy p ≥ 2, got {p}")));
        }
        if v.samples == 0 {
            return Err(bad("verify.samples must be at least 1"));
        }
        if !(v.r > 0.0 && v.r < v.big_r) {
            return Err(bad(format!("verify: need 0 < r < big_r, got r={}, big_r={}", v.r, v.big_r)));
        }
        if let Some(s) = &v.s_list {
            check_orders("verify.s_list", s, 0.0, 1.0)?;
        }
        check_orders("verify.betas", &v.betas, 0.0, 1.0)?;
        if v.times.iter().any(|t| !(*t > 0.0)) {
            return Err(bad("verify.times must be positive"));
        }
        check_orders("sweep.s_list", &self.sweep.s_list, 0.0, 1.0)?;
        if self.sweep.s_list.is_empty() {
            return Err(bad("sweep.s_list must not be empty"));
        }
        let b = &self.bench;
        if b.dim != 1 && b.dim != 2 {
            return Err(bad(format!("bench.dim must be 1 or 2, got {}", b.dim)));
        }
        if b.ladder.len() < 2 || b.ladder.iter().any(|n| *n < 3) {
            return Err(bad("bench.ladder needs at least two sizes, each ≥ 3"));
        }
        if b.repeats == 0 {
            return Err(bad("bench.repeats must be at least 1"));
        }
        check_orders("bench.alpha", &[b.alpha], 0.0, 1.0)?;
        if !(b.p >= 2.0 && b.p.is_finite()) {
            return Err(bad(format!("bench.p must satisfy p ≥ 2, got {}", b.p)));
        }
        if self.command == Some(CommandKind::Verify) && v.target.is_none() {
            return Err(bad("verify needs a target"));
        }
        Ok(())
    }
}
