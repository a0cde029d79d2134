//! Analysis quantities computed from problem data and completed traces:
//! generalized curvature extremes of a quadratic relative to its diagonal,
//! and envelope checks that certify observed convergence rates.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::problem::{DiagonalMetric, Vector};
use crate::solvers::SolverKind;

/// Largest dimension accepted by the dense eigensolve.
pub const SIGMA_TAU_MAX_DIM: usize = 2000;
/// Absolute slack added to rate-envelope ratio comparisons.
pub const ENVELOPE_SLACK: f64 = 1e-9;
/// Squared distances below this are skipped as floating-point noise.
pub const DIST_SQ_FLOOR: f64 = 1e-20;
/// Default cap on the second-order ratio `e_{t+1} / e_t^2`.
pub const QUADRATIC_RATE_CAP: f64 = 10.0;
/// Errors must lie in this band for a second-order ratio to be trusted.
pub const QUADRATIC_RATE_WINDOW: (f64, f64) = (1e-13, 1e-2);

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is empty")]
    Empty,
    #[error("dimension {n} exceeds dense eigensolve cap {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("matrix is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("diagonal entry {i} is {value:e}, must be positive and finite")]
    BadDiagonal { i: usize, value: f64 },
    #[error("{what} must be finite and positive, got {value:e}")]
    BadParameter { what: &'static str, value: f64 },
}

/// Extreme generalized eigenvalues of a quadratic's curvature against its own
/// diagonal, with the derived line-search scale bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaTau {
    /// Smallest eigenvalue of `D^{-1/2} Q D^{-1/2}`, `D = diag(Q)`.
    pub sigma: f64,
    /// Largest eigenvalue of the same pencil.
    pub tau: f64,
    /// `max(1/tau, eta/beta)`.
    pub eta_bar: f64,
}

impl SigmaTau {
    /// Contraction factor `1 - sigma / (eta_bar * tau)` of the per-step
    /// distance envelope.
    pub fn qlinear_factor(&self) -> f64 {
        1.0 - self.sigma / (self.eta_bar * self.tau)
    }

    /// Upper bound `max(1, eta * tau / beta)` on the accepted metric scale
    /// of a monotone run over the quadratic.
    pub fn scale_bound(&self, eta: f64, beta: f64) -> f64 {
        (eta * self.tau / beta).max(1.0)
    }
}

pub fn sigma_tau_quadratic(q: &DMatrix<f64>, eta: f64, beta: f64) -> Result<SigmaTau, DiagnosticsError> {
    let n = q.nrows();
    if n != q.ncols() {
        return Err(DiagnosticsError::NotSquare {
            rows: n,
            cols: q.ncols(),
        });
    }
    if n == 0 {
        return Err(DiagnosticsError::Empty);
    }
    if n > SIGMA_TAU_MAX_DIM {
        return Err(DiagnosticsError::TooLarge {
            n,
            cap: SIGMA_TAU_MAX_DIM,
        });
    }
    if !(eta.is_finite() && eta > 0.0) {
        return Err(DiagnosticsError::BadParameter {
            what: "eta",
            value: eta,
        });
    }
    if !(beta.is_finite() && beta > 0.0) {
        return Err(DiagnosticsError::BadParameter {
            what: "beta",
            value: beta,
        });
    }
    for i in 0..n {
        let v = q[(i, i)];
        if !(v.is_finite() && v > 0.0) {
            return Err(DiagnosticsError::BadDiagonal { i, value: v });
        }
        for j in 0..i {
            if q[(i, j)] != q[(j, i)] {
                return Err(DiagnosticsError::NotSymmetric { i, j });
            }
        }
    }

    let s: Vec<f64> = (0..n).map(|i| 1.0 / q[(i, i)].sqrt()).collect();
    let mut b = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = q[(i, j)] * s[i] * s[j];
            b[(i, j)] = v;
            b[(j, i)] = v;
        }
    }
    let eig = b.symmetric_eigenvalues();
    let sigma = eig.min();
    let tau = eig.max();
    Ok(SigmaTau {
        sigma,
        tau,
        eta_bar: (1.0 / tau).max(eta / beta),
    })
}

/// Outcome of an envelope check over a trace. `ratios` holds one entry per
/// usable step; a step violates when its ratio exceeds `bound` plus the
/// stated slack. `fitted` is the geometric mean of the usable ratios.
#[derive(Debug, Clone)]
pub struct RateReport {
    pub applicable: bool,
    pub bound: f64,
    pub ratios: Vec<f64>,
    pub checked: usize,
    pub violations: usize,
    pub fitted: Option<f64>,
}

impl RateReport {
    fn not_applicable() -> Self {
        RateReport {
            applicable: false,
            bound: f64::NAN,
            ratios: Vec::new(),
            checked: 0,
            violations: 0,
            fitted: None,
        }
    }

    pub fn clean(&self) -> bool {
        self.applicable && self.violations == 0
    }
}

fn geometric_mean(vals: &[f64]) -> Option<f64> {
    if vals.is_empty() || vals.iter().any(|&r| r <= 0.0) {
        return None;
    }
    Some((vals.iter().map(|r| r.ln()).sum::<f64>() / vals.len() as f64).exp())
}

/// Per-step contraction of `||x^t - x*||_D^2` against the factor
/// `1 - sigma/(eta_bar tau)`. Steps whose starting squared distance is below
/// `DIST_SQ_FLOOR` are skipped.
pub fn qlinear_envelope_check(
    points: &[Vector],
    x_star: &Vector,
    d: &DiagonalMetric,
    st: &SigmaTau,
) -> RateReport {
    let bound = st.qlinear_factor();
    let dist_sq: Vec<f64> = points
        .iter()
        .map(|x| d.weighted_norm_sq(&(x - x_star)))
        .collect();
    let mut ratios = Vec::new();
    let mut checked = 0;
    let mut violations = 0;
    for w in dist_sq.windows(2) {
        if w[0] < DIST_SQ_FLOOR {
            continue;
        }
        checked += 1;
        let r = w[1] / w[0];
        if r > bound + ENVELOPE_SLACK {
            violations += 1;
        }
        ratios.push(r);
    }
    let fitted = geometric_mean(&ratios);
    RateReport {
        applicable: true,
        bound,
        ratios,
        checked,
        violations,
        fitted,
    }
}

/// Objective-gap envelope `F(x^t) - F* <= M ||x^0 - x*||_{D'}^2 / (2t)` with
/// `M = max(1, eta tau / beta) L1` and `D'` the start metric divided by its
/// largest entry. Only meaningful for the monotone Hessian-metric method on a
/// convex quadratic; other solvers report not-applicable. `objs[t]` must be
/// the composite value at iterate `t`, starting from `x^0`.
#[allow(clippy::too_many_arguments)]
pub fn sublinear_envelope_check(
    solver: SolverKind,
    objs: &[f64],
    f_star: f64,
    x0: &Vector,
    x_star: &Vector,
    d0: &DiagonalMetric,
    st: &SigmaTau,
    eta: f64,
    beta: f64,
    l1_est: f64,
) -> RateReport {
    if solver != SolverKind::Pdnm {
        return RateReport::not_applicable();
    }
    assert!(
        l1_est.is_finite() && l1_est > 0.0,
        "L1 estimate must be finite and positive"
    );
    let m_const = (eta * st.tau / beta).max(1.0) * l1_est;
    let r0 = d0.weighted_norm_sq(&(x0 - x_star)) / d0.max_entry();
    let mut ratios = Vec::new();
    let mut checked = 0;
    let mut violations = 0;
    for (t, &obj) in objs.iter().enumerate().skip(1) {
        let rhs = m_const * r0 / (2.0 * t as f64);
        let gap = obj - f_star;
        checked += 1;
        if gap > rhs * (1.0 + ENVELOPE_SLACK) {
            violations += 1;
        }
        if rhs > 0.0 {
            ratios.push(gap / rhs);
        }
    }
    RateReport {
        applicable: true,
        bound: m_const * r0,
        ratios,
        checked,
        violations,
        fitted: None,
    }
}

/// Second-order tail diagnostics: ratios `e_{t+1} / e_t^2` over steps whose
/// starting error lies in `QUADRATIC_RATE_WINDOW`.
#[derive(Debug, Clone)]
pub struct QuadraticRateReport {
    pub ratios: Vec<f64>,
    pub bounded: bool,
    /// False when fewer than 2 usable tail steps exist.
    pub conclusive: bool,
    pub cap: f64,
}

pub fn quadratic_rate_check(errors: &[f64], cap: f64) -> QuadraticRateReport {
    assert!(cap.is_finite() && cap > 0.0, "cap must be finite and positive");
    let (lo, hi) = QUADRATIC_RATE_WINDOW;
    let mut ratios = Vec::new();
    for w in errors.windows(2) {
        if w[0] >= lo && w[0] <= hi {
            ratios.push(w[1] / (w[0] * w[0]));
        }
    }
    let bounded = !ratios.is_empty() && ratios.iter().all(|&r| r <= cap);
    let conclusive = ratios.len() >= 2;
    QuadraticRateReport {
        ratios,
        bounded,
        conclusive,
        cap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::QuadraticObjective;
    use crate::problem::ProblemInstance;
    use crate::prox::L1;
    use crate::solvers::{fista_run, pdnm_run, FistaConfig, PdnmConfig, SolveStatus};

    fn coupled_q() -> DMatrix<f64> {
        DMatrix::from_vec(2, 2, vec![2.0, 1.0, 1.0, 2.0])
    }

    #[test]
    fn diagonal_matrix_has_unit_spectrum() {
        let q = DMatrix::from_diagonal(&Vector::from_vec(vec![3.0, 7.0, 0.25]));
        let st = sigma_tau_quadratic(&q, 2.0, 1.0).unwrap();
        assert!((st.sigma - 1.0).abs() <= 1e-12);
        assert!((st.tau - 1.0).abs() <= 1e-12);
        assert_eq!(st.eta_bar, 2.0);
    }

    #[test]
    fn coupled_two_by_two_splits_to_half_and_three_halves() {
        let st = sigma_tau_quadratic(&coupled_q(), 2.0, 1.0).unwrap();
        assert!((st.sigma - 0.5).abs() <= 1e-12);
        assert!((st.tau - 1.5).abs() <= 1e-12);
        assert_eq!(st.eta_bar, 2.0);
        assert!((st.qlinear_factor() - (1.0 - 0.5 / 3.0)).abs() <= 1e-12);
        assert!((st.scale_bound(2.0, 1.0) - 3.0).abs() <= 1e-12);
    }

    #[test]
    fn near_rank_deficient_correlation_drives_sigma_to_zero() {
        let rho = 0.999;
        let q = DMatrix::from_vec(2, 2, vec![1.0, rho, rho, 1.0]);
        let st = sigma_tau_quadratic(&q, 2.0, 1.0).unwrap();
        assert!((st.sigma - (1.0 - rho)).abs() <= 1e-9);
        assert!((st.tau - (1.0 + rho)).abs() <= 1e-9);
        assert!(st.sigma / st.tau < 1e-3);
    }

    #[test]
    fn spectrum_is_invariant_under_symmetric_permutation() {
        let q = DMatrix::from_vec(
            3,
            3,
            vec![4.0, 1.0, 0.5, 1.0, 3.0, -0.25, 0.5, -0.25, 5.0],
        );
        let perm = [2usize, 0, 1];
        let mut qp = DMatrix::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                qp[(i, j)] = q[(perm[i], perm[j])];
            }
        }
        let a = sigma_tau_quadratic(&q, 2.0, 1.0).unwrap();
        let b = sigma_tau_quadratic(&qp, 2.0, 1.0).unwrap();
        assert!((a.sigma - b.sigma).abs() <= 1e-12);
        assert!((a.tau - b.tau).abs() <= 1e-12);
    }

    #[test]
    fn ratio_one_characterizes_diagonal_matrices() {
        let diag = DMatrix::from_diagonal(&Vector::from_vec(vec![2.0, 5.0]));
        let st = sigma_tau_quadratic(&diag, 2.0, 1.0).unwrap();
        assert!((st.tau / st.sigma - 1.0).abs() <= 1e-12);
        let st2 = sigma_tau_quadratic(&coupled_q(), 2.0, 1.0).unwrap();
        assert!(st2.tau / st2.sigma > 1.0 + 1e-12);
    }

    #[test]
    fn bad_inputs_are_rejected() {
        let q = DMatrix::from_vec(2, 2, vec![2.0, 1.0, 0.9, 2.0]);
        assert!(matches!(
            sigma_tau_quadratic(&q, 2.0, 1.0),
            Err(DiagnosticsError::NotSymmetric { .. })
        ));
        let q = DMatrix::from_vec(2, 2, vec![0.0, 0.0, 0.0, 2.0]);
        assert!(matches!(
            sigma_tau_quadratic(&q, 2.0, 1.0),
            Err(DiagnosticsError::BadDiagonal { i: 0, .. })
        ));
        let q = DMatrix::<f64>::zeros(2, 3);
        assert!(matches!(
            sigma_tau_quadratic(&q, 2.0, 1.0),
            Err(DiagnosticsError::NotSquare { .. })
        ));
    }

    fn coupled_lasso() -> ProblemInstance {
        ProblemInstance::new(
            "coupled-lasso",
            0,
            Box::new(QuadraticObjective::new(coupled_q(), Vector::from_vec(vec![-3.0, 1.0])).unwrap()),
            Box::new(L1::new(0.5).unwrap()),
        )
        .unwrap()
    }

    #[test]
    fn pdnm_trace_respects_qlinear_envelope() {
        let p = coupled_lasso();
        let x0 = Vector::from_vec(vec![4.0, -4.0]);
        let reference = pdnm_run(
            &p,
            &x0,
            &PdnmConfig {
                eps: 1e-15,
                t_max: 100_000,
                ..PdnmConfig::default()
            },
        );
        let run = pdnm_run(
            &p,
            &x0,
            &PdnmConfig {
                record_iterates: true,
                ..PdnmConfig::default()
            },
        );
        assert_eq!(run.status, SolveStatus::Converged);
        let d = p.objective().hessian_diagonal(&x0);
        let st = sigma_tau_quadratic(&coupled_q(), 2.0, 1.0).unwrap();
        let points = run.iterates.unwrap();
        let report = qlinear_envelope_check(&points, &reference.x_final, &d, &st);
        assert!(report.clean(), "violations: {}", report.violations);
        assert!(report.checked > 0);
        if let Some(f) = report.fitted {
            assert!(f <= report.bound + ENVELOPE_SLACK);
        }

        let mut corrupted = points.clone();
        let mid = corrupted.len() / 2;
        corrupted[mid][0] += 1.0;
        let bad = qlinear_envelope_check(&corrupted, &reference.x_final, &d, &st);
        assert!(bad.violations >= 1);
    }

    #[test]
    fn constant_trace_at_solution_checks_nothing() {
        let x_star = Vector::from_vec(vec![1.0, 2.0]);
        let d = DiagonalMetric::uniform(2, 1.0).unwrap();
        let st = SigmaTau {
            sigma: 0.5,
            tau: 1.5,
            eta_bar: 2.0,
        };
        let report = qlinear_envelope_check(
            &[x_star.clone(), x_star.clone(), x_star.clone()],
            &x_star,
            &d,
            &st,
        );
        assert_eq!(report.checked, 0);
        assert_eq!(report.violations, 0);
        assert!(report.ratios.is_empty());
    }

    #[test]
    fn sublinear_envelope_holds_for_pdnm_and_skips_fista() {
        let p = coupled_lasso();
        let x0 = Vector::zeros(2);
        let reference = pdnm_run(
            &p,
            &x0,
            &PdnmConfig {
                eps: 1e-15,
                t_max: 100_000,
                ..PdnmConfig::default()
            },
        );
        let run = pdnm_run(&p, &x0, &PdnmConfig::default());
        let st = sigma_tau_quadratic(&coupled_q(), 2.0, 1.0).unwrap();
        let d0 = p.objective().hessian_diagonal(&x0);
        // L1 estimate: largest eigenvalue of [[2,1],[1,2]] is 3.
        let report = sublinear_envelope_check(
            SolverKind::Pdnm,
            &run.objective_path(),
            reference.final_obj,
            &x0,
            &reference.x_final,
            &d0,
            &st,
            2.0,
            1.0,
            3.0,
        );
        assert!(report.applicable);
        assert_eq!(report.violations, 0, "ratios: {:?}", report.ratios);
        assert!(report.checked > 0);

        let fista = fista_run(&p, &x0, &FistaConfig::default());
        let skipped = sublinear_envelope_check(
            SolverKind::Fista,
            &fista.objective_path(),
            reference.final_obj,
            &x0,
            &reference.x_final,
            &d0,
            &st,
            2.0,
            1.0,
            3.0,
        );
        assert!(!skipped.applicable);
        assert_eq!(skipped.checked, 0);
    }

    #[test]
    fn degenerate_start_at_solution_is_clean() {
        let st = SigmaTau {
            sigma: 1.0,
            tau: 1.0,
            eta_bar: 2.0,
        };
        let x = Vector::from_vec(vec![1.0, -1.0]);
        let d = DiagonalMetric::uniform(2, 2.0).unwrap();
        let report = sublinear_envelope_check(
            SolverKind::Pdnm,
            &[5.0, 5.0],
            5.0,
            &x,
            &x,
            &d,
            &st,
            2.0,
            1.0,
            1.0,
        );
        assert!(report.applicable);
        assert_eq!(report.violations, 0);
    }

    #[test]
    fn quadratic_rate_detects_doubling_exponents() {
        let report = quadratic_rate_check(&[1e-2, 1e-4, 1e-8], QUADRATIC_RATE_CAP);
        assert_eq!(report.ratios.len(), 2);
        assert!((report.ratios[0] - 1.0).abs() <= 1e-9);
        assert!((report.ratios[1] - 1.0).abs() <= 1e-9);
        assert!(report.bounded);
        assert!(report.conclusive);
    }

    #[test]
    fn quadratic_rate_rejects_linear_decay() {
        let report = quadratic_rate_check(&[1e-2, 5e-3, 2.5e-3], QUADRATIC_RATE_CAP);
        assert_eq!(report.ratios.len(), 2);
        assert!((report.ratios[0] - 50.0).abs() <= 1e-9);
        assert!((report.ratios[1] - 100.0).abs() <= 1e-9);
        assert!(!report.bounded);
    }

    #[test]
    fn quadratic_rate_needs_two_usable_points() {
        let report = quadratic_rate_check(&[1.0, 1e-3, 1e-6], QUADRATIC_RATE_CAP);
        assert_eq!(report.ratios.len(), 1);
        assert!(!report.conclusive);
    }
}
