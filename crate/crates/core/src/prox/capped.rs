//! Capped (clipped) l1 penalty and its scaled prox.

use super::{soft_threshold, ProxError, TiePolicy};
use crate::problem::{DiagonalMetric, Regularizer, Vector};

/// Capped l1 penalty `g(x) = lambda * sum_i min(a |x_i|, 1)` with
/// `lambda > 0`, `a > 0`. Nonconvex: the penalty saturates at `lambda` once
/// `|x_i| >= 1/a`, so large coordinates are not shrunk at all.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CappedL1 {
    lambda: f64,
    a: f64,
    tie: TiePolicy,
}

impl CappedL1 {
    pub fn new(lambda: f64, a: f64) -> Result<Self, ProxError> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(ProxError::NonPositiveWeight { value: lambda });
        }
        if !a.is_finite() || a <= 0.0 {
            return Err(ProxError::BadCapSlope { value: a });
        }
        Ok(Self {
            lambda,
            a,
            tie: TiePolicy::default(),
        })
    }

    pub fn with_tie_policy(mut self, tie: TiePolicy) -> Self {
        self.tie = tie;
        self
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn a(&self) -> f64 {
        self.a
    }
}

impl Regularizer for CappedL1 {
    fn value(&self, x: &Vector) -> f64 {
        self.lambda
            * x.iter()
                .map(|v| (self.a * v.abs()).min(1.0))
                .sum::<f64>()
    }

    fn scaled_prox(&self, metric: &DiagonalMetric, z: &Vector) -> Vector {
        prox_capped_l1_diag(self.lambda, self.a, metric, z, self.tie)
    }

    fn convex(&self) -> bool {
        false
    }
}

/// Scaled prox of the capped l1 penalty, coordinate by coordinate.
///
/// Each 1-D subproblem is the pointwise minimum of two branches: the linear
/// branch `lambda*a*|y| + d/2 (y - z)^2`, minimized by the soft threshold
/// `S_{lambda*a/d}(z)`, and the saturated branch `lambda + d/2 (y - z)^2`,
/// minimized by `y = z`. The branch with the smaller attained value wins;
/// exactly equal attained values (bitwise) are a genuine two-point optimum
/// `{z, S_{lambda*a/d}(z)}` resolved by `tie`.
pub fn prox_capped_l1_diag(
    lambda: f64,
    a: f64,
    metric: &DiagonalMetric,
    z: &Vector,
    tie: TiePolicy,
) -> Vector {
    assert!(
        lambda.is_finite() && lambda > 0.0,
        "capped l1 weight must be finite and positive, got {lambda}"
    );
    assert!(
        a.is_finite() && a > 0.0,
        "capped l1 slope must be finite and positive, got {a}"
    );
    assert_eq!(metric.dim(), z.len(), "metric/point dimension mismatch");
    Vector::from_iterator(
        z.len(),
        z.iter()
            .zip(metric.entries().iter())
            .map(|(&zi, &di)| prox_capped_scalar(lambda, a, di, zi, tie)),
    )
}

fn prox_capped_scalar(lambda: f64, a: f64, d: f64, z: f64, tie: TiePolicy) -> f64 {
    let la = lambda * a;
    let shift = la / d;
    // Attained minimum of the linear branch in closed form.
    let linear_min = if z.abs() <= shift {
        0.5 * d * z * z
    } else {
        la * z.abs() - la * la / (2.0 * d)
    };
    let saturated_min = lambda;
    if linear_min < saturated_min {
        soft_threshold(z, shift)
    } else if linear_min > saturated_min {
        z
    } else {
        match tie {
            TiePolicy::PreferIdentity => z,
            TiePolicy::PreferShrunk | TiePolicy::LowestIndexSet => soft_threshold(z, shift),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn metric(d: &[f64]) -> DiagonalMetric {
        DiagonalMetric::new(Vector::from_vec(d.to_vec())).unwrap()
    }

    fn prox1(lambda: f64, a: f64, d: f64, z: f64, tie: TiePolicy) -> f64 {
        prox_capped_l1_diag(
            lambda,
            a,
            &metric(&[d]),
            &Vector::from_vec(vec![z]),
            tie,
        )[0]
    }

    #[test]
    fn unit_parameter_branches() {
        // lambda = a = d = 1: shrink below the boundary, identity above.
        let tie = TiePolicy::default();
        assert_eq!(prox1(1.0, 1.0, 1.0, 0.5, tie), 0.0);
        assert_eq!(prox1(1.0, 1.0, 1.0, 1.25, tie), 0.25);
        assert_eq!(prox1(1.0, 1.0, 1.0, 2.0, tie), 2.0);
        assert_eq!(prox1(1.0, 1.0, 1.0, -2.0, tie), -2.0);
        assert_eq!(prox1(1.0, 1.0, 1.0, -1.25, tie), -0.25);
    }

    #[test]
    fn boundary_tie_respects_policy() {
        // At z = lambda*a/(2d) + 1/a = 1.5 both branches attain value 1.
        assert_eq!(prox1(1.0, 1.0, 1.0, 1.5, TiePolicy::PreferShrunk), 0.5);
        assert_eq!(prox1(1.0, 1.0, 1.0, 1.5, TiePolicy::PreferIdentity), 1.5);
        assert_eq!(prox1(1.0, 1.0, 1.0, 1.5, TiePolicy::LowestIndexSet), 0.5);
        assert_eq!(prox1(1.0, 1.0, 1.0, -1.5, TiePolicy::PreferShrunk), -0.5);
    }

    #[test]
    fn tie_candidates_share_the_objective_value() {
        let g = CappedL1::new(1.0, 1.0).unwrap();
        let d = metric(&[1.0]);
        let z = Vector::from_vec(vec![1.5]);
        let shrunk = Vector::from_vec(vec![0.5]);
        let obj = |y: &Vector| g.value(y) + 0.5 * d.weighted_norm_sq(&(y - &z));
        assert_eq!(obj(&shrunk), obj(&z));
    }

    #[test]
    fn value_saturates_at_lambda_per_coordinate() {
        let g = CappedL1::new(2.0, 0.5).unwrap();
        // a|x| = 1.5 saturates; a|x| = 0.25 does not.
        let x = Vector::from_vec(vec![3.0, 0.5]);
        assert_eq!(g.value(&x), 2.0 * (1.0 + 0.25));
        assert!(!g.convex());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(CappedL1::new(0.0, 1.0).is_err());
        assert!(CappedL1::new(1.0, 0.0).is_err());
        assert!(CappedL1::new(f64::INFINITY, 1.0).is_err());
        assert!(CappedL1::new(1.0, f64::NAN).is_err());
    }

    #[test]
    fn separable_across_coordinates() {
        let lambda = 0.7;
        let a = 1.3;
        let d = [0.5, 2.0, 4.0];
        let z = [0.3, -1.1, 2.5];
        let joint = prox_capped_l1_diag(
            lambda,
            a,
            &metric(&d),
            &Vector::from_vec(z.to_vec()),
            TiePolicy::default(),
        );
        for i in 0..3 {
            assert_eq!(joint[i], prox1(lambda, a, d[i], z[i], TiePolicy::default()));
        }
    }
}
