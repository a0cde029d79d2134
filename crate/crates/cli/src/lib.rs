//! Benchmark harness behind the `pdnm` binary.
//!
//! The library half holds everything the binary does apart from argument
//! parsing, so integration tests can drive experiments in-process: instance
//! construction from a [`RunConfig`], parallel solver sweeps, batch best-value
//! back-fill, and CSV emission. Numeric CSV cells use scientific notation with
//! 17 significant digits so every `f64` round-trips exactly; the wall-clock
//! column is the only field that varies between identically-seeded runs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use pdnm_core::datagen::{
    gen_blend_quadratic, gen_logistic_data, gen_regression_data, load_dataset, BlendSpec,
    DatagenError, DatasetSpec, RegChoice, SyntheticDataSpec,
};
use pdnm_core::objectives::{LeastSquaresObjective, LogisticRidgeObjective, Scaling};
use pdnm_core::oracle::{
    oracle_capped_l1_value, oracle_l1_value, oracle_trimmed_l1_value, prox_objective,
    TRIMMED_ORACLE_MAX_DIM,
};
use pdnm_core::prox::{
    prox_capped_l1_diag, prox_l1_diag, prox_trimmed_l1_diag, CappedL1, TrimmedL1, L1,
};
use pdnm_core::solvers::{
    fista_run, npdnm_run, pdnm_run, pgm_bb_run, pgm_dbb_run, sparsa_run, FistaConfig, NpdnmConfig,
    PdnmConfig, PgmBbConfig, PgmDbbConfig, SparsaConfig,
};
use pdnm_core::datagen::CounterRng;
use pdnm_core::{
    DiagonalMetric, ProblemInstance, Regularizer, SolveResult, SolveStatus, SolverKind, TiePolicy,
    Vector,
};

/// Environment variable capping the worker-thread count of a batch.
pub const BENCH_THREADS_VAR: &str = "BENCH_THREADS";

/// Header shared by every per-run trace CSV.
pub const TRACE_HEADER: &str = "run_id,solver,iter,time_ms,obj,obj_gap,step_norm,backtracks,residual";

/// Header of the batch summary CSV.
pub const SUMMARY_HEADER: &str = "run_id,solver,status,iterations,final_obj,final_gap,time_ms";

/// Harness failure split by exit-code class: configuration problems exit 2,
/// everything else (I/O, malformed data files) exits 1.
#[derive(Debug)]
pub enum HarnessError {
    InvalidConfig(String),
    Other(anyhow::Error),
}

impl std::fmt::Display for HarnessError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HarnessError::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            HarnessError::Other(e) => write!(f, "{e:#}"),
        }
    }
}

impl std::error::Error for HarnessError {}

impl HarnessError {
    /// Process exit code for this failure class.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::InvalidConfig(_) => 2,
            HarnessError::Other(_) => 1,
        }
    }
}

fn invalid(msg: impl Into<String>) -> HarnessError {
    HarnessError::InvalidConfig(msg.into())
}

impl From<DatagenError> for HarnessError {
    fn from(e: DatagenError) -> Self {
        match e {
            // Parameter-validation failures are usage errors; file problems
            // (I/O, malformed content) are environment errors.
            DatagenError::InvalidSpec(_)
            | DatagenError::TooLarge { .. }
            | DatagenError::Objective(_)
            | DatagenError::Problem(_)
            | DatagenError::Prox(_) => invalid(e.to_string()),
            other => HarnessError::Other(anyhow::Error::new(other)),
        }
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Other(anyhow::Error::new(e))
    }
}

/// Which composite family an experiment solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    /// Blended random quadratic `½xᵀQx + lᵀx`.
    Quadratic,
    /// Least squares `1/(2m)‖Ax − b‖²` on synthetic or loaded data.
    Regression,
    /// ℓ2-regularized logistic loss on synthetic or loaded data.
    Logistic,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Quadratic => "quadratic",
            ExperimentKind::Regression => "regression",
            ExperimentKind::Logistic => "logistic",
        }
    }
}

/// Full description of one benchmark batch: the instance recipe, the solver
/// list, and the shared solver parameters. Defaults mirror the library-wide
/// solver defaults (`ε = 1e-12`, `η = 2`, `α = 1e-2`, window `M = 5`,
/// ridge `γ = 1e-2`).
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    pub solvers: Vec<SolverKind>,
    pub g_choice: RegChoice,
    /// Blend weight toward the random diagonal (quadratic experiment).
    pub lambda_blend: f64,
    /// Regularizer weight λ.
    pub lambda_reg: f64,
    /// Capped-ℓ1 slope `a`.
    pub cap_a: f64,
    /// Trimmed-ℓ1 exempt-coordinate count `K`.
    pub trim_k: usize,
    /// Ridge weight γ of the logistic experiment.
    pub gamma: f64,
    /// Problem dimension (features).
    pub n: usize,
    /// Row count (quadratic blend) or sample count (data experiments).
    pub m: usize,
    /// Ground-truth density of synthetic regression/classification data.
    pub density: f64,
    /// Noise level of synthetic regression/classification data.
    pub noise: f64,
    pub seed: u64,
    pub t_max: usize,
    pub eps: f64,
    /// Backtracking growth factor shared by all solvers.
    pub eta: f64,
    /// Monotone sufficient-decrease damping (PDNM, PGM-BB).
    pub beta: f64,
    /// Nonmonotone decrease fraction (NPDNM, SpaRSA, PGM-DBB).
    pub alpha: f64,
    /// Nonmonotone look-back window length.
    pub window: usize,
    /// Dataset file; when set, the data experiments load it instead of
    /// generating synthetic data and `n`/`m`/`density`/`noise` are ignored.
    pub data: Option<PathBuf>,
    /// Output directory for `<run_id>.csv` files and `summary.csv`.
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            experiment: ExperimentKind::Quadratic,
            solvers: SolverKind::ALL.to_vec(),
            g_choice: RegChoice::L1,
            lambda_blend: 0.5,
            lambda_reg: 1.0,
            cap_a: 1.0,
            trim_k: 50,
            gamma: 1e-2,
            n: 500,
            m: 500,
            density: 0.1,
            noise: 0.01,
            seed: 0,
            t_max: 1000,
            eps: 1e-12,
            eta: 2.0,
            beta: 1.0,
            alpha: 1e-2,
            window: 5,
            data: None,
            out: PathBuf::from("bench-out"),
        }
    }
}

impl RunConfig {
    /// Rejects configurations before any compute. Violations map to exit
    /// code 2 at the binary boundary.
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.solvers.is_empty() {
            return Err(invalid("solver list is empty"));
        }
        for (i, a) in self.solvers.iter().enumerate() {
            if self.solvers[..i].contains(a) {
                return Err(invalid(format!(
                    "solver {a} listed twice; each run id must be unique"
                )));
            }
        }
        if self.n == 0 || self.m == 0 {
            return Err(invalid("n and m must be positive"));
        }
        if !(0.0..=1.0).contains(&self.lambda_blend) || !self.lambda_blend.is_finite() {
            return Err(invalid(format!(
                "lambda_blend must lie in [0, 1], got {}",
                self.lambda_blend
            )));
        }
        if !self.lambda_reg.is_finite() || self.lambda_reg < 0.0 {
            return Err(invalid(format!(
                "lambda_reg must be nonnegative, got {}",
                self.lambda_reg
            )));
        }
        if !self.cap_a.is_finite() || self.cap_a <= 0.0 {
            return Err(invalid(format!("a must be positive, got {}", self.cap_a)));
        }
        if !self.gamma.is_finite() || self.gamma < 0.0 {
            return Err(invalid(format!(
                "gamma must be nonnegative, got {}",
                self.gamma
            )));
        }
        if !(0.0..=1.0).contains(&self.density) {
            return Err(invalid(format!(
                "density must lie in [0, 1], got {}",
                self.density
            )));
        }
        if !self.noise.is_finite() || self.noise < 0.0 {
            return Err(invalid(format!(
                "noise must be nonnegative, got {}",
                self.noise
            )));
        }
        if !self.eta.is_finite() || self.eta <= 1.0 {
            return Err(invalid(format!("eta must exceed 1, got {}", self.eta)));
        }
        if !self.beta.is_finite() || self.beta <= 0.0 || self.beta >= 2.0 {
            return Err(invalid(format!(
                "beta must lie in (0, 2), got {}",
                self.beta
            )));
        }
        if !self.alpha.is_finite() || self.alpha <= 0.0 || self.alpha >= 1.0 {
            return Err(invalid(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.window == 0 {
            return Err(invalid("window must be at least 1"));
        }
        if !self.eps.is_finite() || self.eps < 0.0 {
            return Err(invalid(format!(
                "eps must be nonnegative, got {}",
                self.eps
            )));
        }
        if self.experiment == ExperimentKind::Quadratic && self.data.is_some() {
            return Err(invalid(
                "--data applies to the regression and logistic experiments only",
            ));
        }
        Ok(())
    }
}

fn sanitize_stem(path: &Path) -> String {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("dataset");
    stem.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '_' || c == '-' { c } else { '-' })
        .collect()
}

fn make_regularizer(
    cfg: &RunConfig,
    n: usize,
) -> Result<Box<dyn Regularizer + Send + Sync>, HarnessError> {
    let reg: Box<dyn Regularizer + Send + Sync> = match cfg.g_choice {
        RegChoice::L1 => Box::new(L1::new(cfg.lambda_reg).map_err(|e| invalid(e.to_string()))?),
        RegChoice::CappedL1 => Box::new(
            CappedL1::new(cfg.lambda_reg, cfg.cap_a).map_err(|e| invalid(e.to_string()))?,
        ),
        RegChoice::TrimmedL1 => {
            if cfg.trim_k > n {
                return Err(invalid(format!(
                    "K = {} exceeds the problem dimension {}",
                    cfg.trim_k, n
                )));
            }
            Box::new(TrimmedL1::new(cfg.lambda_reg, cfg.trim_k).map_err(|e| invalid(e.to_string()))?)
        }
    };
    Ok(reg)
}

/// Builds the `ProblemInstance` a [`RunConfig`] describes. Synthetic
/// instances are fully determined by the seed; dataset-backed instances are
/// determined by the file contents.
pub fn build_instance(cfg: &RunConfig) -> Result<ProblemInstance, HarnessError> {
    cfg.validate()?;
    match cfg.experiment {
        ExperimentKind::Quadratic => {
            let spec = BlendSpec {
                n: cfg.n,
                m: cfg.m,
                lambda_blend: cfg.lambda_blend,
                seed: cfg.seed,
                reg: cfg.g_choice,
                lambda_reg: cfg.lambda_reg,
                cap_a: cfg.cap_a,
                trim_k: cfg.trim_k,
                ..BlendSpec::default()
            };
            Ok(gen_blend_quadratic(&spec)?)
        }
        ExperimentKind::Regression | ExperimentKind::Logistic => {
            let logistic = cfg.experiment == ExperimentKind::Logistic;
            let (a, b, tag) = match &cfg.data {
                Some(path) => {
                    let ds = load_dataset(&DatasetSpec::new(path))?;
                    if !ds.dropped_columns.is_empty() {
                        log::info!(
                            "{}: dropped {} all-zero feature column(s)",
                            path.display(),
                            ds.dropped_columns.len()
                        );
                    }
                    let tag = sanitize_stem(path);
                    (ds.a, ds.b, tag)
                }
                None => {
                    let spec = SyntheticDataSpec {
                        m: cfg.m,
                        n: cfg.n,
                        density: cfg.density,
                        noise: cfg.noise,
                        seed: cfg.seed,
                        ..SyntheticDataSpec::default()
                    };
                    let (a, b) = if logistic {
                        gen_logistic_data(&spec)?
                    } else {
                        gen_regression_data(&spec)?
                    };
                    (a, b, format!("m{}-n{}-seed{}", cfg.m, cfg.n, cfg.seed))
                }
            };
            let (rows, cols) = (a.nrows(), a.ncols());
            let name = format!(
                "{}-{}-{}",
                if logistic { "logit" } else { "ls" },
                tag,
                cfg.g_choice.tag()
            );
            let regularizer = make_regularizer(cfg, cols)?;
            let objective: Box<dyn pdnm_core::SmoothObjective + Send + Sync> = if logistic {
                for (i, v) in b.iter().enumerate() {
                    if *v != 1.0 && *v != -1.0 {
                        return Err(invalid(format!(
                            "logistic labels must be +1/-1, sample {} has {}",
                            i + 1,
                            v
                        )));
                    }
                }
                Box::new(
                    LogisticRidgeObjective::new(a, b, cfg.gamma)
                        .map_err(|e| invalid(e.to_string()))?,
                )
            } else {
                Box::new(
                    LeastSquaresObjective::new(a, b, Scaling::InverseM)
                        .map_err(|e| invalid(e.to_string()))?,
                )
            };
            log::info!("{name}: {rows} samples, {cols} features");
            Ok(ProblemInstance::new(name, cfg.seed, objective, regularizer)
                .map_err(|e| invalid(e.to_string()))?)
        }
    }
}

/// Runs one solver on `p` from `x0` with the shared parameters of `cfg`.
pub fn solve_with(
    kind: SolverKind,
    p: &ProblemInstance,
    x0: &Vector,
    cfg: &RunConfig,
) -> SolveResult {
    match kind {
        SolverKind::Pdnm => pdnm_run(
            p,
            x0,
            &PdnmConfig {
                eta: cfg.eta,
                beta: cfg.beta,
                eps: cfg.eps,
                t_max: cfg.t_max,
                ..PdnmConfig::default()
            },
        ),
        SolverKind::Npdnm => npdnm_run(
            p,
            x0,
            &NpdnmConfig {
                eta: cfg.eta,
                alpha: cfg.alpha,
                window: cfg.window,
                eps: cfg.eps,
                t_max: cfg.t_max,
                ..NpdnmConfig::default()
            },
        ),
        SolverKind::PgmBb => pgm_bb_run(
            p,
            x0,
            &PgmBbConfig {
                eta: cfg.eta,
                beta: cfg.beta,
                eps: cfg.eps,
                t_max: cfg.t_max,
                ..PgmBbConfig::default()
            },
        ),
        SolverKind::Sparsa => sparsa_run(
            p,
            x0,
            &SparsaConfig {
                eta: cfg.eta,
                alpha: cfg.alpha,
                window: cfg.window,
                eps: cfg.eps,
                t_max: cfg.t_max,
                ..SparsaConfig::default()
            },
        ),
        SolverKind::Fista => fista_run(
            p,
            x0,
            &FistaConfig {
                eta: cfg.eta,
                eps: cfg.eps,
                t_max: cfg.t_max,
                ..FistaConfig::default()
            },
        ),
        SolverKind::PgmDbb => pgm_dbb_run(
            p,
            x0,
            &PgmDbbConfig {
                eta: cfg.eta,
                alpha: cfg.alpha,
                window: cfg.window,
                eps: cfg.eps,
                t_max: cfg.t_max,
                ..PgmDbbConfig::default()
            },
        ),
    }
}

/// One line of `summary.csv`.
#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub run_id: String,
    pub solver: SolverKind,
    pub status: SolveStatus,
    pub iterations: usize,
    pub final_obj: f64,
    pub final_gap: f64,
    pub time_ms: f64,
}

/// Everything a finished batch produced, for callers that want the numbers
/// without re-parsing the CSV files.
#[derive(Debug, Clone)]
pub struct BatchSummary {
    pub instance: String,
    /// Best composite value seen across every run of the batch (trace points
    /// and final iterates alike); the `obj_gap` baseline.
    pub f_star: f64,
    pub rows: Vec<SummaryRow>,
    /// Solvers dropped before running, with the reason (currently only the
    /// convex-only accelerated method on a nonconvex regularizer).
    pub excluded: Vec<(SolverKind, String)>,
    pub csv_paths: Vec<PathBuf>,
    pub summary_path: PathBuf,
}

/// Formats a float with 17 significant digits in scientific notation: enough
/// for exact `f64` round-trips, so identically-seeded batches emit identical
/// bytes.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn build_pool() -> Result<rayon::ThreadPool, HarnessError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(BENCH_THREADS_VAR) {
        let threads: usize = raw
            .parse()
            .map_err(|_| invalid(format!("{BENCH_THREADS_VAR}={raw:?} is not a thread count")))?;
        builder = builder.num_threads(threads);
    }
    builder
        .build()
        .map_err(|e| HarnessError::Other(anyhow::Error::new(e)))
}

fn write_trace_csv(
    path: &Path,
    run_id: &str,
    solver: SolverKind,
    res: &SolveResult,
    f_star: f64,
) -> Result<(), HarnessError> {
    let mut buf = String::with_capacity(128 * (res.trace.len() + 1));
    buf.push_str(TRACE_HEADER);
    buf.push('\n');
    for r in &res.trace {
        let _ = writeln!(
            buf,
            "{run_id},{},{},{:.3},{},{},{},{},{}",
            solver.name(),
            r.t,
            r.elapsed * 1e3,
            fmt_f64(r.obj),
            fmt_f64(r.obj - f_star),
            fmt_f64(r.step_norm),
            r.backtracks,
            fmt_f64(r.residual),
        );
    }
    std::fs::write(path, buf)?;
    Ok(())
}

fn write_summary_csv(path: &Path, rows: &[SummaryRow]) -> Result<(), HarnessError> {
    let mut buf = String::with_capacity(128 * (rows.len() + 1));
    buf.push_str(SUMMARY_HEADER);
    buf.push('\n');
    for row in rows {
        let _ = writeln!(
            buf,
            "{},{},{},{},{},{},{:.3}",
            row.run_id,
            row.solver.name(),
            row.status.name(),
            row.iterations,
            fmt_f64(row.final_obj),
            fmt_f64(row.final_gap),
            row.time_ms,
        );
    }
    std::fs::write(path, buf)?;
    Ok(())
}

/// Runs the configured batch: every selected solver on the same instance from
/// `x⁰ = 0`, in parallel (capped by `BENCH_THREADS`), then writes one trace
/// CSV per run plus `summary.csv` into `cfg.out`.
///
/// The `obj_gap` column is back-filled after the whole batch finishes, against
/// the best composite value any run attained. Solvers whose guarantees need a
/// convex regularizer are excluded up front on nonconvex instances (logged,
/// listed in [`BatchSummary::excluded`]). A solver that stops on its iteration
/// cap or a failed line search still produces its files; failure is data, not
/// an error.
pub fn run_experiment(cfg: &RunConfig) -> Result<BatchSummary, HarnessError> {
    cfg.validate()?;
    let instance = build_instance(cfg)?;
    let convex_g = instance.regularizer().convex();

    let mut selected = Vec::new();
    let mut excluded = Vec::new();
    for &solver in &cfg.solvers {
        if solver.requires_convex() && !convex_g {
            let reason = format!(
                "{solver} requires a convex regularizer; {} is nonconvex",
                cfg.g_choice.tag()
            );
            log::warn!("excluding {reason}");
            excluded.push((solver, reason));
        } else {
            selected.push(solver);
        }
    }

    let pool = build_pool()?;
    let x0 = Vector::zeros(instance.dim());
    let results: Vec<(SolverKind, SolveResult, f64)> = pool.install(|| {
        use rayon::prelude::*;
        selected
            .par_iter()
            .map(|&solver| {
                let started = Instant::now();
                let res = solve_with(solver, &instance, &x0, cfg);
                (solver, res, started.elapsed().as_secs_f64())
            })
            .collect()
    });

    let f_star = results
        .iter()
        .flat_map(|(_, res, _)| res.objective_path())
        .fold(f64::INFINITY, f64::min);

    std::fs::create_dir_all(&cfg.out)?;
    let mut rows = Vec::with_capacity(results.len());
    let mut csv_paths = Vec::with_capacity(results.len());
    for (solver, res, wall_secs) in &results {
        let run_id = format!("{}-{}", instance.name(), solver.name());
        let path = cfg.out.join(format!("{run_id}.csv"));
        write_trace_csv(&path, &run_id, *solver, res, f_star)?;
        csv_paths.push(path);
        rows.push(SummaryRow {
            run_id,
            solver: *solver,
            status: res.status,
            iterations: res.trace.len(),
            final_obj: res.final_obj,
            final_gap: res.final_obj - f_star,
            time_ms: wall_secs * 1e3,
        });
    }
    let summary_path = cfg.out.join("summary.csv");
    write_summary_csv(&summary_path, &rows)?;

    Ok(BatchSummary {
        instance: instance.name().to_string(),
        f_star,
        rows,
        excluded,
        csv_paths,
        summary_path,
    })
}

/// Result of checking one prox family against its brute-force oracle.
#[derive(Debug, Clone)]
pub struct FamilyCheck {
    pub family: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub max_abs_err: f64,
}

/// Outcome of [`prox_check`].
#[derive(Debug, Clone)]
pub struct ProxCheckReport {
    pub families: Vec<FamilyCheck>,
    pub tol: f64,
}

impl ProxCheckReport {
    pub fn pass(&self) -> bool {
        self.families.iter().all(|f| f.failures == 0)
    }
}

/// Compares the closed-form prox operators against the grid-refinement /
/// subset-enumeration oracles on `cases` random instances per family and
/// reports the largest deviation of the attained prox objective from the
/// oracle minimum.
pub fn prox_check(
    cases: usize,
    max_dim: usize,
    seed: u64,
    tol: f64,
) -> Result<ProxCheckReport, HarnessError> {
    if cases == 0 {
        return Err(invalid("case count must be positive"));
    }
    if max_dim == 0 || max_dim > TRIMMED_ORACLE_MAX_DIM {
        return Err(invalid(format!(
            "max dimension must lie in 1..={TRIMMED_ORACLE_MAX_DIM}"
        )));
    }
    if !tol.is_finite() || tol <= 0.0 {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }

    let mut families = Vec::new();
    for (stream, family) in [(0u64, "l1"), (1u64, "capped-l1"), (2u64, "trimmed-l1")] {
        let mut rng = CounterRng::stream(seed, stream);
        let mut failures = 0usize;
        let mut max_abs_err = 0.0f64;
        for _ in 0..cases {
            let n = 1 + (rng.next_u64() as usize) % max_dim;
            let d = DiagonalMetric::new(Vector::from_fn(n, |_, _| rng.uniform_range(0.1, 5.0)))
                .expect("entries drawn positive");
            let z = Vector::from_fn(n, |_, _| rng.uniform_range(-4.0, 4.0));
            let lambda = rng.uniform_range(0.1, 3.0);
            let (attained, oracle) = match family {
                "l1" => {
                    let y = prox_l1_diag(lambda, &d, &z);
                    let g = L1::new(lambda).expect("lambda drawn positive");
                    (prox_objective(&g, &d, &z, &y), oracle_l1_value(lambda, &d, &z))
                }
                "capped-l1" => {
                    let a = rng.uniform_range(0.25, 2.0);
                    let g = CappedL1::new(lambda, a).expect("parameters drawn positive");
                    let y = prox_capped_l1_diag(lambda, a, &d, &z, TiePolicy::default());
                    (
                        prox_objective(&g, &d, &z, &y),
                        oracle_capped_l1_value(lambda, a, &d, &z),
                    )
                }
                _ => {
                    let k = (rng.next_u64() as usize) % (n + 1);
                    let g = TrimmedL1::new(lambda, k).expect("parameters drawn valid");
                    let y = prox_trimmed_l1_diag(lambda, k, &d, &z, TiePolicy::default());
                    (
                        prox_objective(&g, &d, &z, &y),
                        oracle_trimmed_l1_value(lambda, k, &d, &z),
                    )
                }
            };
            let err = (attained - oracle).abs();
            max_abs_err = max_abs_err.max(err);
            if !(err <= tol) {
                failures += 1;
            }
        }
        families.push(FamilyCheck {
            family,
            cases,
            failures,
            max_abs_err,
        });
    }
    Ok(ProxCheckReport { families, tol })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt_f64_round_trips_exactly() {
        for v in [
            0.0,
            1.0,
            -1.5,
            std::f64::consts::PI,
            1e-300,
            -3.254e17,
            f64::MIN_POSITIVE,
        ] {
            let s = fmt_f64(v);
            let back: f64 = s.parse().expect("formatted float parses");
            assert_eq!(back.to_bits(), v.to_bits(), "{v} -> {s} -> {back}");
        }
    }

    #[test]
    fn validate_rejects_out_of_range_parameters() {
        let ok = RunConfig::default();
        assert!(ok.validate().is_ok());

        let mut bad = RunConfig::default();
        bad.lambda_blend = 1.5;
        assert_eq!(bad.validate().unwrap_err().exit_code(), 2);

        let mut bad = RunConfig::default();
        bad.solvers = vec![SolverKind::Pdnm, SolverKind::Pdnm];
        assert_eq!(bad.validate().unwrap_err().exit_code(), 2);

        let mut bad = RunConfig::default();
        bad.eta = 1.0;
        assert_eq!(bad.validate().unwrap_err().exit_code(), 2);

        let mut bad = RunConfig::default();
        bad.data = Some(PathBuf::from("x.svm"));
        assert_eq!(bad.validate().unwrap_err().exit_code(), 2);
    }

    #[test]
    fn trimmed_k_larger_than_dimension_is_a_config_error() {
        let cfg = RunConfig {
            g_choice: RegChoice::TrimmedL1,
            trim_k: 100,
            n: 10,
            m: 10,
            ..RunConfig::default()
        };
        match build_instance(&cfg) {
            Err(err) => assert_eq!(err.exit_code(), 2),
            Ok(_) => panic!("oversized K accepted"),
        }
    }

    #[test]
    fn prox_check_small_batch_passes() {
        let report = prox_check(25, 4, 123, 1e-10).expect("valid arguments");
        assert!(report.pass(), "{:?}", report.families);
        for fam in &report.families {
            assert_eq!(fam.cases, 25);
            assert!(fam.max_abs_err <= 1e-10);
        }
    }

    #[test]
    fn prox_check_rejects_oversized_dimension() {
        let err = prox_check(10, TRIMMED_ORACLE_MAX_DIM + 1, 0, 1e-10).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
