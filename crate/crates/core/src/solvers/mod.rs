//! Iterative solvers for `min F(x) = f(x) + g(x)`.
//!
//! All methods share one engine: at the current point, build a diagonal base
//! metric, take a scaled prox step, and grow the metric by a factor `eta`
//! until a line-search criterion accepts the candidate. They differ only in
//! where the base metric comes from (Hessian diagonal, scalar Barzilai-Borwein
//! step, or a diagonal secant) and whether acceptance is monotone in the
//! smooth model or nonmonotone over a window of composite values.

mod first_order;
mod fista;
mod pdnm;

pub use first_order::{
    pgm_bb_run, pgm_dbb_run, sparsa_run, PgmBbConfig, PgmDbbConfig, SparsaConfig, BB_ALPHA_MAX,
    BB_ALPHA_MIN, DBB_U_MAX, DBB_U_MIN,
};
pub use fista::{fista_run, FistaConfig};
pub use pdnm::{npdnm_run, pdnm_run, pdnm_step, NpdnmConfig, PdnmConfig, PdnmStep};

use std::collections::VecDeque;
use std::time::Instant;

use crate::problem::{DiagonalMetric, ProblemInstance, SmoothObjective, Vector};

/// The solver family a run belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverKind {
    Pdnm,
    Npdnm,
    PgmBb,
    Sparsa,
    Fista,
    PgmDbb,
}

impl SolverKind {
    pub const ALL: [SolverKind; 6] = [
        SolverKind::Pdnm,
        SolverKind::Npdnm,
        SolverKind::PgmBb,
        SolverKind::Sparsa,
        SolverKind::Fista,
        SolverKind::PgmDbb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Pdnm => "pdnm",
            SolverKind::Npdnm => "npdnm",
            SolverKind::PgmBb => "pgm-bb",
            SolverKind::Sparsa => "sparsa",
            SolverKind::Fista => "fista",
            SolverKind::PgmDbb => "pgm-dbb",
        }
    }

    /// Whether the method's guarantees require a convex regularizer.
    pub fn requires_convex(self) -> bool {
        matches!(self, SolverKind::Fista)
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        SolverKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                format!(
                    "unknown solver {s:?}; expected one of {}",
                    SolverKind::ALL.map(|k| k.name()).join(", ")
                )
            })
    }
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Termination residual dropped to `eps`.
    Converged,
    /// Iteration cap hit first.
    IterCapReached,
    /// No candidate was accepted within `max_backtracks` metric growths.
    LineSearchFailed,
}

impl SolveStatus {
    pub fn name(self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::IterCapReached => "iter-cap",
            SolveStatus::LineSearchFailed => "line-search-failed",
        }
    }
}

/// One accepted iteration `x^t -> x^{t+1}`.
///
/// `obj` is the composite value at the step's start point `x^t`;
/// `residual` is the termination residual certifying the step's end point
/// (it uses the accepted metric `eta^{k_t} D_t`). `elapsed` is wall-clock
/// seconds since the run started and is the only nondeterministic field.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub t: usize,
    pub obj: f64,
    pub step_norm: f64,
    pub backtracks: u32,
    pub metric_scale: f64,
    pub residual: f64,
    pub elapsed: f64,
}

/// Outcome of a solver run. `trace` holds one record per accepted iteration;
/// a line-search failure keeps the partial trace up to the failing iteration.
/// `iterates`, when recording was requested, holds `x^0, ..., x_final`.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub x_final: Vector,
    pub final_obj: f64,
    pub status: SolveStatus,
    pub trace: Vec<IterationRecord>,
    pub iterates: Option<Vec<Vector>>,
}

impl SolveResult {
    /// Composite values along the run: `F(x^0), ..., F(x_final)`.
    pub fn objective_path(&self) -> Vec<f64> {
        let mut objs: Vec<f64> = self.trace.iter().map(|r| r.obj).collect();
        objs.push(self.final_obj);
        objs
    }
}

fn residual_from_grads(
    grad_curr: &Vector,
    grad_prev: &Vector,
    x_prev: &Vector,
    x_curr: &Vector,
    h_prev: &DiagonalMetric,
) -> f64 {
    (grad_curr - grad_prev + h_prev.mul(&(x_prev - x_curr))).norm()
}

/// Stationarity residual of the step `x_prev -> x_curr` taken with accepted
/// metric `h_prev`:
/// `|| grad f(x_curr) - grad f(x_prev) + H_prev (x_prev - x_curr) ||_2`.
/// A small residual certifies that `x_curr` is an approximately stationary
/// point of `F`; it is exactly zero at prox fixed points.
pub fn termination_residual(
    obj: &dyn SmoothObjective,
    x_prev: &Vector,
    x_curr: &Vector,
    h_prev: &DiagonalMetric,
) -> f64 {
    residual_from_grads(
        &obj.gradient(x_curr),
        &obj.gradient(x_prev),
        x_prev,
        x_curr,
        h_prev,
    )
}

/// Residual plus the `residual <= eps` decision, as used by every solver.
pub fn check_termination(
    p: &ProblemInstance,
    x_prev: &Vector,
    x_curr: &Vector,
    h_prev: &DiagonalMetric,
    eps: f64,
) -> (f64, bool) {
    let r = termination_residual(p.objective(), x_prev, x_curr, h_prev);
    (r, r <= eps)
}

/// Line-search acceptance criterion.
pub(crate) enum AcceptRule {
    /// `f(x^+) <= f(x) + <grad, dx> + beta/2 ||dx||_H^2`
    Monotone { beta: f64 },
    /// `F(x^+) <= max of the last `window` composite values - alpha/2 ||dx||_H^2`
    Nonmonotone { alpha: f64, window: usize },
}

/// Relative rounding slack applied to every line-search acceptance
/// comparison: a candidate may miss its bound by up to
/// `ACCEPT_SLACK_REL * (1 + |lhs| + |rhs|)`. The same allowance is the
/// guarantee on recorded objectives: a monotone run's objective path is
/// non-increasing up to this slack (per-value, not cumulative), as are
/// nonmonotone window maxima.
pub const ACCEPT_SLACK_REL: f64 = 16.0 * f64::EPSILON;

/// Fuzz for comparing two objective-scale values in an acceptance test.
///
/// Near a solution the two sides of the test agree to within rounding of the
/// objective evaluations while the true margin shrinks like the squared step
/// norm, so an exact `<=` rejects on noise; each rejection then grows the
/// metric, which shrinks the next true margin further, and the search stalls
/// at an enormous scale (the tight case is a single-coordinate step, where a
/// diagonal metric matches the true curvature exactly and the margin is zero
/// in exact arithmetic). Admitting deficits below evaluation noise keeps the
/// accepted scale honest without weakening the test at any decisive margin.
pub(crate) fn accept_slack(lhs: f64, rhs_anchor: f64) -> f64 {
    ACCEPT_SLACK_REL * (1.0 + lhs.abs() + rhs_anchor.abs())
}

/// Where the base metric `D_t` comes from.
pub(crate) trait MetricRule {
    fn base(&mut self, t: usize, p: &ProblemInstance, x: &Vector, grad: &Vector) -> DiagonalMetric;

    /// Secant feedback `(s, y) = (x^{t+1} - x^t, grad^{t+1} - grad^t)` after
    /// each accepted step.
    fn observe(&mut self, _s: &Vector, _y: &Vector) {}
}

pub(crate) struct EngineParams {
    pub eta: f64,
    pub eps: f64,
    pub t_max: usize,
    pub max_backtracks: u32,
    pub record_iterates: bool,
}

impl EngineParams {
    fn validate(&self) {
        assert!(
            self.eta.is_finite() && self.eta > 1.0,
            "eta must be finite and > 1, got {}",
            self.eta
        );
        assert!(self.eps >= 0.0, "eps must be nonnegative, got {}", self.eps);
    }
}

/// Shared driver for every prox-descent solver.
pub(crate) fn run_prox_descent(
    p: &ProblemInstance,
    x0: &Vector,
    params: &EngineParams,
    accept: &AcceptRule,
    metric: &mut dyn MetricRule,
) -> SolveResult {
    params.validate();
    match accept {
        AcceptRule::Monotone { beta } => {
            assert!(
                beta.is_finite() && *beta > 0.0,
                "beta must be finite and positive, got {beta}"
            );
        }
        AcceptRule::Nonmonotone { alpha, window } => {
            assert!(
                alpha.is_finite() && *alpha > 0.0 && *alpha < 1.0,
                "alpha must lie in (0, 1), got {alpha}"
            );
            assert!(*window >= 1, "nonmonotone window must be at least 1");
        }
    }
    assert_eq!(x0.len(), p.dim(), "x0/instance dimension mismatch");
    assert!(x0.iter().all(|v| v.is_finite()), "x0 must be finite");

    let start = Instant::now();
    let mut x = x0.clone();
    let mut f_x = p.objective().value(&x);
    let mut g_x = p.regularizer().value(&x);
    assert!(
        (f_x + g_x).is_finite(),
        "F(x0) must be finite (x0 in dom g), got {}",
        f_x + g_x
    );
    let mut grad = p.objective().gradient(&x);

    let mut window_vals: VecDeque<f64> = VecDeque::new();
    if let AcceptRule::Nonmonotone { .. } = accept {
        window_vals.push_back(f_x + g_x);
    }

    let mut trace = Vec::new();
    let mut iterates = params.record_iterates.then(|| vec![x.clone()]);
    let mut status = SolveStatus::IterCapReached;

    for t in 0..params.t_max {
        let d = metric.base(t, p, &x, &grad);
        let window_max = window_vals
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);

        let mut scale = 1.0;
        let mut k: u32 = 0;
        let accepted = loop {
            let h = d.scaled(scale);
            let z = &x - h.inv_mul(&grad);
            let cand = p.regularizer().scaled_prox(&h, &z);
            let delta = &cand - &x;
            let f_cand = p.objective().value(&cand);
            let ok = match accept {
                AcceptRule::Monotone { beta } => {
                    f_cand
                        <= f_x
                            + grad.dot(&delta)
                            + 0.5 * beta * h.weighted_norm_sq(&delta)
                            + accept_slack(f_cand, f_x)
                }
                AcceptRule::Nonmonotone { alpha, .. } => {
                    let obj_cand = f_cand + p.regularizer().value(&cand);
                    obj_cand
                        <= window_max - 0.5 * alpha * h.weighted_norm_sq(&delta)
                            + accept_slack(obj_cand, window_max)
                }
            };
            if ok {
                break Some((cand, delta, f_cand, h));
            }
            if k >= params.max_backtracks {
                break None;
            }
            k += 1;
            scale *= params.eta;
        };

        let Some((cand, delta, f_cand, h)) = accepted else {
            status = SolveStatus::LineSearchFailed;
            break;
        };

        let grad_cand = p.objective().gradient(&cand);
        let residual = residual_from_grads(&grad_cand, &grad, &x, &cand, &h);
        trace.push(IterationRecord {
            t,
            obj: f_x + g_x,
            step_norm: delta.norm(),
            backtracks: k,
            metric_scale: scale,
            residual,
            elapsed: start.elapsed().as_secs_f64(),
        });

        let y = &grad_cand - &grad;
        metric.observe(&delta, &y);

        x = cand;
        f_x = f_cand;
        g_x = p.regularizer().value(&x);
        grad = grad_cand;
        if let Some(iters) = iterates.as_mut() {
            iters.push(x.clone());
        }
        if let AcceptRule::Nonmonotone { window, .. } = accept {
            window_vals.push_back(f_x + g_x);
            if window_vals.len() > *window {
                window_vals.pop_front();
            }
        }

        if residual <= params.eps {
            status = SolveStatus::Converged;
            break;
        }
    }

    SolveResult {
        x_final: x,
        final_obj: f_x + g_x,
        status,
        trace,
        iterates,
    }
}
