//! Accelerated proximal gradient with Nesterov momentum and a monotonically
//! growing Lipschitz estimate. Requires a convex regularizer; the momentum
//! extrapolation has no descent safeguard, so nonconvex penalties can diverge.

use crate::problem::{DiagonalMetric, ProblemInstance, Vector};
use crate::solvers::{
    residual_from_grads, IterationRecord, SolveResult, SolveStatus,
};
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FistaConfig {
    /// Growth factor for the Lipschitz estimate, > 1.
    pub eta: f64,
    /// Initial Lipschitz estimate.
    pub l0: f64,
    pub eps: f64,
    pub t_max: usize,
    pub max_backtracks: u32,
    pub record_iterates: bool,
}

impl Default for FistaConfig {
    fn default() -> Self {
        FistaConfig {
            eta: 2.0,
            l0: 1.0,
            eps: 1e-12,
            t_max: 1000,
            max_backtracks: 100,
            record_iterates: false,
        }
    }
}

fn next_momentum(t: f64) -> f64 {
    0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt())
}

/// The residual certifies the new main iterate as an approximate stationary
/// point of the step taken from the extrapolated point:
/// `|| grad f(x^{t+1}) - grad f(y^t) + L_t (y^t - x^{t+1}) ||_2`.
pub fn fista_run(p: &ProblemInstance, x0: &Vector, cfg: &FistaConfig) -> SolveResult {
    assert!(
        cfg.eta.is_finite() && cfg.eta > 1.0,
        "eta must be finite and > 1, got {}",
        cfg.eta
    );
    assert!(
        cfg.l0.is_finite() && cfg.l0 > 0.0,
        "l0 must be finite and positive, got {}",
        cfg.l0
    );
    assert!(cfg.eps >= 0.0, "eps must be nonnegative");
    assert!(
        p.regularizer().convex(),
        "fista requires a convex regularizer"
    );
    assert_eq!(x0.len(), p.dim(), "x0/instance dimension mismatch");
    assert!(x0.iter().all(|v| v.is_finite()), "x0 must be finite");

    let start = Instant::now();
    let mut x = x0.clone();
    let mut obj_x = p.composite_value(&x);
    assert!(obj_x.is_finite(), "F(x0) must be finite, got {obj_x}");
    let mut y = x.clone();
    let mut t_mom = 1.0;
    let mut lip = cfg.l0;

    let mut trace = Vec::new();
    let mut iterates = cfg.record_iterates.then(|| vec![x.clone()]);
    let mut status = SolveStatus::IterCapReached;

    for t in 0..cfg.t_max {
        let f_y = p.objective().value(&y);
        let grad_y = p.objective().gradient(&y);

        let mut k: u32 = 0;
        let accepted = loop {
            let h = DiagonalMetric::uniform(p.dim(), lip).expect("positive Lipschitz estimate");
            let z = &y - h.inv_mul(&grad_y);
            let cand = p.regularizer().scaled_prox(&h, &z);
            let delta = &cand - &y;
            let f_cand = p.objective().value(&cand);
            if f_cand
                <= f_y
                    + grad_y.dot(&delta)
                    + 0.5 * lip * delta.norm_squared()
                    + crate::solvers::accept_slack(f_cand, f_y)
            {
                break Some((cand, h));
            }
            if k >= cfg.max_backtracks {
                break None;
            }
            k += 1;
            lip *= cfg.eta;
        };

        let Some((cand, h)) = accepted else {
            status = SolveStatus::LineSearchFailed;
            break;
        };

        let grad_cand = p.objective().gradient(&cand);
        let residual = residual_from_grads(&grad_cand, &grad_y, &y, &cand, &h);
        trace.push(IterationRecord {
            t,
            obj: obj_x,
            step_norm: (&cand - &x).norm(),
            backtracks: k,
            metric_scale: cfg.eta.powi(k as i32),
            residual,
            elapsed: start.elapsed().as_secs_f64(),
        });

        let t_next = next_momentum(t_mom);
        y = &cand + (&cand - &x) * ((t_mom - 1.0) / t_next);
        t_mom = t_next;
        x = cand;
        obj_x = p.composite_value(&x);
        if let Some(iters) = iterates.as_mut() {
            iters.push(x.clone());
        }

        if residual <= cfg.eps {
            status = SolveStatus::Converged;
            break;
        }
    }

    SolveResult {
        x_final: x,
        final_obj: obj_x,
        status,
        trace,
        iterates,
    }
}
