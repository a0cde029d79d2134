//! First-order proximal gradient baselines whose metrics come from secant
//! information instead of the Hessian diagonal: a scalar Barzilai-Borwein
//! step (monotone or nonmonotone acceptance) and a per-coordinate diagonal
//! secant.

use crate::problem::{DiagonalMetric, ProblemInstance, Vector};
use crate::solvers::{run_prox_descent, AcceptRule, EngineParams, MetricRule, SolveResult};

pub const BB_ALPHA_MIN: f64 = 1e-10;
pub const BB_ALPHA_MAX: f64 = 1e10;
pub const DBB_U_MIN: f64 = 1e-8;
pub const DBB_U_MAX: f64 = 1e8;

/// Barzilai-Borwein step size `s's / s'y`, clamped; nonpositive curvature
/// falls back to the longest admissible step.
fn bb_step_size(s: &Vector, y: &Vector, alpha_min: f64, alpha_max: f64) -> f64 {
    let sy = s.dot(y);
    if sy <= 0.0 {
        return alpha_max;
    }
    (s.dot(s) / sy).clamp(alpha_min, alpha_max)
}

/// Per-coordinate secant ratio `y_i / s_i`, clamped; coordinates that did not
/// move keep their previous entry.
fn dbb_entries(prev: &Vector, s: &Vector, y: &Vector, u_min: f64, u_max: f64) -> Vector {
    let mut u = prev.clone();
    for i in 0..s.len() {
        if s[i] != 0.0 {
            u[i] = ((s[i] * y[i]) / (s[i] * s[i])).clamp(u_min, u_max);
        }
    }
    u
}

struct BbScalarRule {
    alpha: f64,
    alpha_min: f64,
    alpha_max: f64,
}

impl MetricRule for BbScalarRule {
    fn base(
        &mut self,
        _t: usize,
        p: &ProblemInstance,
        _x: &Vector,
        _grad: &Vector,
    ) -> DiagonalMetric {
        DiagonalMetric::uniform(p.dim(), 1.0 / self.alpha)
            .expect("clamped step size yields a valid metric")
    }

    fn observe(&mut self, s: &Vector, y: &Vector) {
        self.alpha = bb_step_size(s, y, self.alpha_min, self.alpha_max);
    }
}

struct DbbRule {
    u: Option<Vector>,
    u_min: f64,
    u_max: f64,
}

impl MetricRule for DbbRule {
    fn base(
        &mut self,
        _t: usize,
        p: &ProblemInstance,
        _x: &Vector,
        _grad: &Vector,
    ) -> DiagonalMetric {
        match &self.u {
            None => DiagonalMetric::uniform(p.dim(), 1.0),
            Some(u) => DiagonalMetric::new(u.clone()),
        }
        .expect("clamped secant entries yield a valid metric")
    }

    fn observe(&mut self, s: &Vector, y: &Vector) {
        let prev = self
            .u
            .take()
            .unwrap_or_else(|| Vector::from_element(s.len(), 1.0));
        self.u = Some(dbb_entries(&prev, s, y, self.u_min, self.u_max));
    }
}

fn assert_clamps(min: f64, max: f64, what: &str) {
    assert!(
        min.is_finite() && max.is_finite() && min > 0.0 && min <= max,
        "{what} clamps must satisfy 0 < min <= max, got [{min}, {max}]"
    );
}

/// Proximal gradient with a scalar Barzilai-Borwein metric and monotone
/// line search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PgmBbConfig {
    pub eta: f64,
    pub beta: f64,
    pub eps: f64,
    pub t_max: usize,
    pub max_backtracks: u32,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub record_iterates: bool,
}

impl Default for PgmBbConfig {
    fn default() -> Self {
        PgmBbConfig {
            eta: 2.0,
            beta: 1.0,
            eps: 1e-12,
            t_max: 1000,
            max_backtracks: 100,
            alpha_min: BB_ALPHA_MIN,
            alpha_max: BB_ALPHA_MAX,
            record_iterates: false,
        }
    }
}

pub fn pgm_bb_run(p: &ProblemInstance, x0: &Vector, cfg: &PgmBbConfig) -> SolveResult {
    assert_clamps(cfg.alpha_min, cfg.alpha_max, "step-size");
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
        &mut BbScalarRule {
            alpha: 1.0,
            alpha_min: cfg.alpha_min,
            alpha_max: cfg.alpha_max,
        },
    )
}

/// Proximal gradient with a scalar Barzilai-Borwein metric and a nonmonotone
/// window acceptance test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparsaConfig {
    pub eta: f64,
    pub alpha: f64,
    pub window: usize,
    pub eps: f64,
    pub t_max: usize,
    pub max_backtracks: u32,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub record_iterates: bool,
}

impl Default for SparsaConfig {
    fn default() -> Self {
        SparsaConfig {
            eta: 2.0,
            alpha: 1e-2,
            window: 5,
            eps: 1e-12,
            t_max: 1000,
            max_backtracks: 100,
            alpha_min: BB_ALPHA_MIN,
            alpha_max: BB_ALPHA_MAX,
            record_iterates: false,
        }
    }
}

pub fn sparsa_run(p: &ProblemInstance, x0: &Vector, cfg: &SparsaConfig) -> SolveResult {
    assert_clamps(cfg.alpha_min, cfg.alpha_max, "step-size");
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
        &mut BbScalarRule {
            alpha: 1.0,
            alpha_min: cfg.alpha_min,
            alpha_max: cfg.alpha_max,
        },
    )
}

/// Proximal gradient with a per-coordinate diagonal secant metric and a
/// nonmonotone window acceptance test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PgmDbbConfig {
    pub eta: f64,
    pub alpha: f64,
    pub window: usize,
    pub eps: f64,
    pub t_max: usize,
    pub max_backtracks: u32,
    pub u_min: f64,
    pub u_max: f64,
    pub record_iterates: bool,
}

impl Default for PgmDbbConfig {
    fn default() -> Self {
        PgmDbbConfig {
            eta: 2.0,
            alpha: 1e-2,
            window: 5,
            eps: 1e-12,
            t_max: 1000,
            max_backtracks: 100,
            u_min: DBB_U_MIN,
            u_max: DBB_U_MAX,
            record_iterates: false,
        }
    }
}

pub fn pgm_dbb_run(p: &ProblemInstance, x0: &Vector, cfg: &PgmDbbConfig) -> SolveResult {
    assert_clamps(cfg.u_min, cfg.u_max, "secant");
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
        &mut DbbRule {
            u: None,
            u_min: cfg.u_min,
            u_max: cfg.u_max,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::QuadraticObjective;
    use crate::prox::L1;
    use crate::solvers::SolveStatus;
    use nalgebra::DMatrix;

    #[test]
    fn bb_step_size_matches_hand_values() {
        let s = Vector::from_vec(vec![1.0, 1.0]);
        let y = Vector::from_vec(vec![2.0, 2.0]);
        assert_eq!(bb_step_size(&s, &y, BB_ALPHA_MIN, BB_ALPHA_MAX), 0.5);

        let y_neg = Vector::from_vec(vec![-1.0, -1.0]);
        assert_eq!(
            bb_step_size(&s, &y_neg, BB_ALPHA_MIN, BB_ALPHA_MAX),
            BB_ALPHA_MAX
        );

        let y_zero = Vector::zeros(2);
        assert_eq!(
            bb_step_size(&s, &y_zero, BB_ALPHA_MIN, BB_ALPHA_MAX),
            BB_ALPHA_MAX
        );

        let y_huge = Vector::from_vec(vec![1e30, 1e30]);
        assert_eq!(
            bb_step_size(&s, &y_huge, BB_ALPHA_MIN, BB_ALPHA_MAX),
            BB_ALPHA_MIN
        );
    }

    #[test]
    fn dbb_entries_take_ratios_and_carry_stalled_coordinates() {
        let prev = Vector::from_vec(vec![7.0, 7.0]);
        let s = Vector::from_vec(vec![1.0, 2.0]);
        let y = Vector::from_vec(vec![3.0, 8.0]);
        assert_eq!(
            dbb_entries(&prev, &s, &y, DBB_U_MIN, DBB_U_MAX),
            Vector::from_vec(vec![3.0, 4.0])
        );

        let s_stall = Vector::from_vec(vec![0.0, 2.0]);
        assert_eq!(
            dbb_entries(&prev, &s_stall, &y, DBB_U_MIN, DBB_U_MAX),
            Vector::from_vec(vec![7.0, 4.0])
        );

        let y_neg = Vector::from_vec(vec![-3.0, 8.0]);
        assert_eq!(
            dbb_entries(&prev, &s, &y_neg, DBB_U_MIN, DBB_U_MAX),
            Vector::from_vec(vec![DBB_U_MIN, 4.0])
        );
    }

    fn diag_quad_l1() -> ProblemInstance {
        let q = DMatrix::from_diagonal(&Vector::from_vec(vec![2.0, 4.0]));
        let l = Vector::from_vec(vec![-2.0, -4.0]);
        ProblemInstance::new(
            "diag-quad-l1",
            0,
            Box::new(QuadraticObjective::new(q, l).unwrap()),
            Box::new(L1::new(1.0).unwrap()),
        )
        .unwrap()
    }

    #[test]
    fn pgm_bb_converges_on_diagonal_quadratic_lasso() {
        let p = diag_quad_l1();
        let cfg = PgmBbConfig {
            eps: 1e-10,
            ..PgmBbConfig::default()
        };
        let res = pgm_bb_run(&p, &Vector::zeros(2), &cfg);
        assert_eq!(res.status, SolveStatus::Converged);
        let target = Vector::from_vec(vec![0.5, 0.75]);
        assert!((&res.x_final - target).norm() <= 1e-8);
        for r in &res.trace {
            assert!(r.metric_scale >= 1.0);
            assert!(r.backtracks <= cfg.max_backtracks);
        }
        let objs = res.objective_path();
        for w in objs.windows(2) {
            let tol = crate::solvers::ACCEPT_SLACK_REL * (1.0 + 2.0 * w[0].abs());
            assert!(w[1] <= w[0] + tol);
        }
    }

    #[test]
    fn sparsa_matches_pgm_bb_on_isotropic_quadratic() {
        // With Q = c I, c < 1, and dyadic data, both rules accept every step
        // unscaled (the t = 0 identity step strictly, the exact-secant step
        // with bitwise equality), so the trajectories coincide and the second
        // step lands on the minimizer (0.5, 1.5) with a zero residual.
        let q = DMatrix::from_diagonal(&Vector::from_vec(vec![0.5, 0.5]));
        let l = Vector::from_vec(vec![-0.5, -1.0]);
        let p = ProblemInstance::new(
            "iso-quad-l1",
            0,
            Box::new(QuadraticObjective::new(q, l).unwrap()),
            Box::new(L1::new(0.25).unwrap()),
        )
        .unwrap();
        let x0 = Vector::from_vec(vec![4.0, -3.0]);
        let mono = pgm_bb_run(&p, &x0, &PgmBbConfig::default());
        let nonmono = sparsa_run(&p, &x0, &SparsaConfig::default());
        assert_eq!(mono.status, SolveStatus::Converged);
        assert_eq!(nonmono.status, SolveStatus::Converged);
        assert_eq!(mono.x_final, Vector::from_vec(vec![0.5, 1.5]));
        assert_eq!(mono.x_final, nonmono.x_final);
        assert_eq!(mono.trace.len(), 2);
        assert_eq!(mono.trace.len(), nonmono.trace.len());
        for (a, b) in mono.trace.iter().zip(&nonmono.trace) {
            assert_eq!(a.obj, b.obj);
            assert_eq!(a.step_norm, b.step_norm);
            assert_eq!(a.backtracks, b.backtracks);
            assert_eq!(a.metric_scale, b.metric_scale);
            assert_eq!(a.residual, b.residual);
        }
    }

    #[test]
    fn pgm_dbb_recovers_diagonal_metric_exactly() {
        // After one move in every coordinate the secant entries equal the true
        // Hessian diagonal, so the next step lands on the minimizer with a
        // bitwise-zero residual.
        let p = diag_quad_l1();
        let res = pgm_dbb_run(&p, &Vector::zeros(2), &PgmDbbConfig::default());
        assert_eq!(res.status, SolveStatus::Converged);
        assert_eq!(res.trace.len(), 2);
        assert_eq!(res.x_final, Vector::from_vec(vec![0.5, 0.75]));
        assert_eq!(res.trace[0].backtracks, 1);
        assert_eq!(res.trace[1].backtracks, 0);
        assert_eq!(res.trace[1].residual, 0.0);
    }

    #[test]
    fn traces_are_deterministic_across_runs() {
        let p = diag_quad_l1();
        let a = pgm_dbb_run(&p, &Vector::from_vec(vec![2.0, -3.0]), &PgmDbbConfig::default());
        let b = pgm_dbb_run(&p, &Vector::from_vec(vec![2.0, -3.0]), &PgmDbbConfig::default());
        assert_eq!(a.x_final, b.x_final);
        assert_eq!(a.final_obj, b.final_obj);
        assert_eq!(a.trace.len(), b.trace.len());
        for (ra, rb) in a.trace.iter().zip(&b.trace) {
            assert_eq!(ra.obj, rb.obj);
            assert_eq!(ra.residual, rb.residual);
            assert_eq!(ra.step_norm, rb.step_norm);
        }
    }
}
