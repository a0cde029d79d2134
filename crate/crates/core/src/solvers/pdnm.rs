//! Proximal diagonal Newton methods: the base metric at each iteration is the
//! diagonal of the smooth term's Hessian, grown by line search.

use crate::problem::{DiagonalMetric, ProblemInstance, Vector, DEFAULT_METRIC_FLOOR};
use crate::solvers::{run_prox_descent, AcceptRule, EngineParams, MetricRule, SolveResult};

/// Monotone variant: a candidate is accepted when the smooth term is bounded
/// by its `beta`-damped quadratic model in the scaled metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdnmConfig {
    /// Metric growth factor per backtrack, > 1.
    pub eta: f64,
    /// Model damping in (0, 2); values in (0, 1] give the strongest
    /// decrease guarantees, values in (1, 2) admit full Newton-like steps.
    pub beta: f64,
    /// Termination threshold on the stationarity residual.
    pub eps: f64,
    pub t_max: usize,
    pub max_backtracks: u32,
    /// Lower clamp applied to Hessian diagonal entries.
    pub metric_floor: f64,
    /// Keep every iterate in the result (memory-heavy; off by default).
    pub record_iterates: bool,
}

impl Default for PdnmConfig {
    fn default() -> Self {
        PdnmConfig {
            eta: 2.0,
            beta: 1.0,
            eps: 1e-12,
            t_max: 1000,
            max_backtracks: 100,
            metric_floor: DEFAULT_METRIC_FLOOR,
            record_iterates: false,
        }
    }
}

/// Nonmonotone variant: a candidate passes when the composite value sits
/// sufficiently below the worst of the last `window` composite values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NpdnmConfig {
    pub eta: f64,
    /// Decrease fraction in (0, 1).
    pub alpha: f64,
    /// Number of trailing composite values the acceptance test looks back
    /// over; 1 recovers a monotone method.
    pub window: usize,
    pub eps: f64,
    pub t_max: usize,
    pub max_backtracks: u32,
    pub metric_floor: f64,
    pub record_iterates: bool,
}

impl Default for NpdnmConfig {
    fn default() -> Self {
        NpdnmConfig {
            eta: 2.0,
            alpha: 1e-2,
            window: 5,
            eps: 1e-12,
            t_max: 1000,
            max_backtracks: 100,
            metric_floor: DEFAULT_METRIC_FLOOR,
            record_iterates: false,
        }
    }
}

pub(crate) struct HessianRule {
    pub floor: f64,
}

impl MetricRule for HessianRule {
    fn base(
        &mut self,
        _t: usize,
        p: &ProblemInstance,
        x: &Vector,
        _grad: &Vector,
    ) -> DiagonalMetric {
        let d = p.objective().hessian_diagonal(x);
        if d.min_entry() >= self.floor {
            d
        } else {
            DiagonalMetric::floored(d.entries().clone(), self.floor)
                .expect("hessian diagonal entries are positive by construction")
        }
    }
}

pub fn pdnm_run(p: &ProblemInstance, x0: &Vector, cfg: &PdnmConfig) -> SolveResult {
    assert!(
        cfg.metric_floor.is_finite() && cfg.metric_floor > 0.0,
        "metric_floor must be finite and positive"
    );
    run_prox_descent(
        p,
        x0,
        &EngineParams {
            eta: cfg.eta,
            eps: cfg.eps,
            t_max: cfg.t_max,
            max_backtracks: cfg.max_backtracks,
            record_iterates: cfg.record_iterates,
        },
        &AcceptRule::Monotone { beta: cfg.beta },
        &mut HessianRule {
            floor: cfg.metric_floor,
        },
    )
}

pub fn npdnm_run(p: &ProblemInstance, x0: &Vector, cfg: &NpdnmConfig) -> SolveResult {
    assert!(
        cfg.metric_floor.is_finite() && cfg.metric_floor > 0.0,
        "metric_floor must be finite and positive"
    );
    run_prox_descent(
        p,
        x0,
        &EngineParams {
            eta: cfg.eta,
            eps: cfg.eps,
            t_max: cfg.t_max,
            max_backtracks: cfg.max_backtracks,
            record_iterates: cfg.record_iterates,
        },
        &AcceptRule::Nonmonotone {
            alpha: cfg.alpha,
            window: cfg.window,
        },
        &mut HessianRule {
            floor: cfg.metric_floor,
        },
    )
}

/// One accepted monotone step, with the metric that produced it.
#[derive(Debug, Clone)]
pub struct PdnmStep {
    pub x_next: Vector,
    pub backtracks: u32,
    pub metric_scale: f64,
    /// The accepted metric `eta^k D`, as needed for the termination residual.
    pub h_used: DiagonalMetric,
}

/// Single monotone step from `x`; `None` when no candidate passes within
/// `cfg.max_backtracks` growths.
pub fn pdnm_step(p: &ProblemInstance, x: &Vector, cfg: &PdnmConfig) -> Option<PdnmStep> {
    assert!(
        cfg.eta.is_finite() && cfg.eta > 1.0,
        "eta must be finite and > 1"
    );
    assert!(
        cfg.beta.is_finite() && cfg.beta > 0.0,
        "beta must be finite and positive"
    );
    assert_eq!(x.len(), p.dim(), "x/instance dimension mismatch");

    let f_x = p.objective().value(x);
    let grad = p.objective().gradient(x);
    let mut rule = HessianRule {
        floor: cfg.metric_floor,
    };
    let d = rule.base(0, p, x, &grad);

    let mut scale = 1.0;
    for k in 0..=cfg.max_backtracks {
        let h = d.scaled(scale);
        let z = x - h.inv_mul(&grad);
        let cand = p.regularizer().scaled_prox(&h, &z);
        let delta = &cand - x;
        let f_cand = p.objective().value(&cand);
        if f_cand
            <= f_x
                + grad.dot(&delta)
                + 0.5 * cfg.beta * h.weighted_norm_sq(&delta)
                + crate::solvers::accept_slack(f_cand, f_x)
        {
            return Some(PdnmStep {
                x_next: cand,
                backtracks: k,
                metric_scale: scale,
                h_used: h,
            });
        }
        scale *= cfg.eta;
    }
    None
}
