//! `pdnm` — benchmark harness for the composite-optimization solver library.
//!
//! Subcommands:
//! - `bench quadratic|regression|logistic`: run a solver sweep on one
//!   instance and emit per-run trace CSVs plus `summary.csv`.
//! - `prox check`: compare the closed-form prox operators against their
//!   brute-force oracles.
//! - `diag sigma-tau`: report the extreme generalized eigenvalues of a
//!   generated quadratic against its diagonal, with the derived rate bounds.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pdnm_cli::{fmt_f64, prox_check, run_experiment, ExperimentKind, HarnessError, RunConfig};
use pdnm_core::datagen::{gen_blend_matrices, BlendSpec, RegChoice};
use pdnm_core::diagnostics::sigma_tau_quadratic;
use pdnm_core::SolverKind;

#[derive(Parser)]
#[command(
    name = "pdnm",
    version,
    about = "Benchmark harness for diagonal proximal Newton and proximal gradient solvers"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a solver sweep and write trace/summary CSVs.
    #[command(subcommand)]
    Bench(BenchCmd),
    /// Self-checks of the closed-form operators.
    #[command(subcommand)]
    Prox(ProxCmd),
    /// Instance diagnostics.
    #[command(subcommand)]
    Diag(DiagCmd),
}

#[derive(Subcommand)]
enum BenchCmd {
    /// Blended random quadratic: ½xᵀQx + lᵀx + g(x).
    Quadratic(BenchArgs),
    /// Least squares 1/(2m)‖Ax − b‖² + g(x) on synthetic or loaded data.
    Regression(BenchArgs),
    /// Logistic loss with ridge term γ/2‖x‖² + g(x) on synthetic or loaded data.
    Logistic(BenchArgs),
}

#[derive(Subcommand)]
enum ProxCmd {
    /// Compare closed-form prox results against brute-force oracles.
    Check(ProxCheckArgs),
}

#[derive(Subcommand)]
enum DiagCmd {
    /// Extreme generalized eigenvalues of Q against diag(Q) and the derived
    /// rate bounds for a generated quadratic instance.
    SigmaTau(SigmaTauArgs),
}

#[derive(Args)]
struct BenchArgs {
    /// Problem dimension (feature count).
    #[arg(long, default_value_t = 500)]
    n: usize,

    /// Row count of the quadratic blend / sample count of data experiments.
    #[arg(long, default_value_t = 500)]
    m: usize,

    /// Blend weight in [0, 1] toward the random diagonal (quadratic only);
    /// larger values make the Hessian more diagonal but worse conditioned.
    #[arg(long = "lambda-blend", default_value_t = 0.5)]
    lambda_blend: f64,

    /// Regularizer: l1, capped-l1, or trimmed-l1.
    #[arg(long = "g", default_value = "l1")]
    g: RegChoice,

    /// Regularizer weight λ.
    #[arg(long = "lambda-reg", default_value_t = 1.0)]
    lambda_reg: f64,

    /// Capped-l1 slope a.
    #[arg(long = "a", default_value_t = 1.0)]
    a: f64,

    /// Trimmed-l1 exempt-coordinate count K.
    #[arg(long = "K", default_value_t = 50)]
    k: usize,

    /// Ridge weight γ (logistic only).
    #[arg(long, default_value_t = 1e-2)]
    gamma: f64,

    /// Comma-separated solver list.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "pdnm,npdnm,pgm-bb,sparsa,fista,pgm-dbb"
    )]
    solvers: Vec<SolverKind>,

    /// Seed for instance generation.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Ground-truth density of synthetic data (regression/logistic).
    #[arg(long, default_value_t = 0.1)]
    density: f64,

    /// Noise level of synthetic data (regression/logistic).
    #[arg(long, default_value_t = 0.01)]
    noise: f64,

    /// Dataset file (regression/logistic); replaces synthetic generation.
    /// `.csv` is read as dense label-first CSV, anything else as sparse
    /// `label index:value` text with 1-based indices.
    #[arg(long)]
    data: Option<PathBuf>,

    /// Backtracking growth factor η.
    #[arg(long, default_value_t = 2.0)]
    eta: f64,

    /// Monotone sufficient-decrease damping β (pdnm, pgm-bb).
    #[arg(long, default_value_t = 1.0)]
    beta: f64,

    /// Nonmonotone decrease fraction α (npdnm, sparsa, pgm-dbb).
    #[arg(long, default_value_t = 1e-2)]
    alpha: f64,

    /// Nonmonotone look-back window M.
    #[arg(long, default_value_t = 5)]
    window: usize,

    /// Termination threshold ε on the stationarity residual.
    #[arg(long, default_value_t = 1e-12)]
    eps: f64,

    /// Iteration cap per solver.
    #[arg(long = "t-max", default_value_t = 1000)]
    t_max: usize,

    /// Output directory for <run_id>.csv files and summary.csv.
    #[arg(long, default_value = "bench-out")]
    out: PathBuf,
}

impl BenchArgs {
    fn into_config(self, experiment: ExperimentKind) -> RunConfig {
        RunConfig {
            experiment,
            solvers: self.solvers,
            g_choice: self.g,
            lambda_blend: self.lambda_blend,
            lambda_reg: self.lambda_reg,
            cap_a: self.a,
            trim_k: self.k,
            gamma: self.gamma,
            n: self.n,
            m: self.m,
            density: self.density,
            noise: self.noise,
            seed: self.seed,
            t_max: self.t_max,
            eps: self.eps,
            eta: self.eta,
            beta: self.beta,
            alpha: self.alpha,
            window: self.window,
            data: self.data,
            out: self.out,
        }
    }
}

#[derive(Args)]
struct ProxCheckArgs {
    /// Random cases per prox family.
    #[arg(long, default_value_t = 200)]
    cases: usize,

    /// Largest problem dimension to draw (1..=12).
    #[arg(long = "max-dim", default_value_t = 5)]
    max_dim: usize,

    /// Seed for case generation.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Pass tolerance on |attained − oracle| prox objective values.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args)]
struct SigmaTauArgs {
    /// Problem dimension.
    #[arg(long, default_value_t = 100)]
    n: usize,

    /// Row count of the blend matrix (defaults to n).
    #[arg(long)]
    m: Option<usize>,

    /// Blend weight in [0, 1] toward the random diagonal.
    #[arg(long = "lambda-blend", default_value_t = 0.5)]
    lambda_blend: f64,

    /// Seed for instance generation.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Backtracking growth factor η entering the η̄ and scale bounds.
    #[arg(long, default_value_t = 2.0)]
    eta: f64,

    /// Sufficient-decrease damping β entering the η̄ and scale bounds.
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
}

fn bench(cfg: RunConfig) -> Result<(), HarnessError> {
    let summary = run_experiment(&cfg)?;
    println!("instance: {}", summary.instance);
    println!("batch F*: {}", fmt_f64(summary.f_star));
    for (solver, reason) in &summary.excluded {
        println!("excluded: {solver} ({reason})");
    }
    println!("{:<10} {:<18} {:>8} {:>13} {:>13} {:>10}", "solver", "status", "iters", "final_obj", "final_gap", "time_ms");
    for row in &summary.rows {
        println!(
            "{:<10} {:<18} {:>8} {:>13.6e} {:>13.6e} {:>10.3}",
            row.solver.name(),
            row.status.name(),
            row.iterations,
            row.final_obj,
            row.final_gap,
            row.time_ms
        );
    }
    println!("wrote {}", summary.summary_path.display());
    Ok(())
}

fn prox_cmd(args: ProxCheckArgs) -> Result<bool, HarnessError> {
    let report = prox_check(args.cases, args.max_dim, args.seed, args.tol)?;
    for fam in &report.families {
        println!(
            "{:<12} cases={:<5} failures={:<3} max_abs_err={:.3e}",
            fam.family, fam.cases, fam.failures, fam.max_abs_err
        );
    }
    let pass = report.pass();
    println!(
        "prox check: {} (tolerance {:.1e})",
        if pass { "PASS" } else { "FAIL" },
        report.tol
    );
    Ok(pass)
}

fn sigma_tau_cmd(args: SigmaTauArgs) -> Result<(), HarnessError> {
    let spec = BlendSpec {
        n: args.n,
        m: args.m.unwrap_or(args.n),
        lambda_blend: args.lambda_blend,
        seed: args.seed,
        ..BlendSpec::default()
    };
    let (q, _) = gen_blend_matrices(&spec)?;
    let st = sigma_tau_quadratic(&q, args.eta, args.beta)
        .map_err(|e| HarnessError::InvalidConfig(e.to_string()))?;
    println!("instance = {}", spec.instance_name());
    println!("sigma = {}", fmt_f64(st.sigma));
    println!("tau = {}", fmt_f64(st.tau));
    println!("eta_bar = {}", fmt_f64(st.eta_bar));
    println!("qlinear_factor = {}", fmt_f64(st.qlinear_factor()));
    println!(
        "scale_bound = {}",
        fmt_f64(st.scale_bound(args.eta, args.beta))
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Bench(BenchCmd::Quadratic(args)) => {
            bench(args.into_config(ExperimentKind::Quadratic)).map(|()| true)
        }
        Cmd::Bench(BenchCmd::Regression(args)) => {
            bench(args.into_config(ExperimentKind::Regression)).map(|()| true)
        }
        Cmd::Bench(BenchCmd::Logistic(args)) => {
            bench(args.into_config(ExperimentKind::Logistic)).map(|()| true)
        }
        Cmd::Prox(ProxCmd::Check(args)) => prox_cmd(args),
        Cmd::Diag(DiagCmd::SigmaTau(args)) => sigma_tau_cmd(args).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
