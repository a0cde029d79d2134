//! Closed-form diagonally scaled proximal operators.
//!
//! Every operator here solves `min_y g(y) + 1/2 ||y - z||_A^2` exactly for a
//! diagonal positive metric `A`, coordinate by coordinate. The subproblems of
//! the nonconvex regularizers can have two global minimizers at branch
//! boundaries; [`TiePolicy`] decides which one is returned.

mod capped;
mod trimmed;

pub use capped::{prox_capped_l1_diag, CappedL1};
pub use trimmed::{prox_trimmed_l1_diag, TrimmedL1};

use thiserror::Error;

use crate::problem::{DiagonalMetric, Regularizer, Vector};

#[derive(Debug, Error)]
pub enum ProxError {
    #[error("regularizer weight must be finite and nonnegative, got {value}")]
    BadWeight { value: f64 },
    #[error("regularizer weight must be finite and strictly positive, got {value}")]
    NonPositiveWeight { value: f64 },
    #[error("cap slope must be finite and strictly positive, got {value}")]
    BadCapSlope { value: f64 },
}

/// Which minimizer to report when a prox subproblem has a tied optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TiePolicy {
    /// Return the shrunk candidate. For the trimmed penalty, resolve value
    /// ties so the smaller index enters the penalized (shrunk) set.
    #[default]
    PreferShrunk,
    /// Return the untouched candidate. For the trimmed penalty, resolve value
    /// ties so the smaller index stays out of the penalized set.
    PreferIdentity,
    /// Index-ordered resolution of the trimmed penalty's set tie: the
    /// lexicographically smallest index set is penalized. Coordinate-wise
    /// operators have no index to compare, so this behaves like
    /// [`TiePolicy::PreferShrunk`] there.
    LowestIndexSet,
}

/// Scalar soft threshold `S_c(v) = sign(v) * max(|v| - c, 0)` for `c >= 0`.
pub fn soft_threshold(v: f64, c: f64) -> f64 {
    debug_assert!(c >= 0.0, "soft threshold shift must be nonnegative");
    if v > c {
        v - c
    } else if v < -c {
        v + c
    } else {
        0.0
    }
}

/// Scaled prox of `lambda * ||.||_1`: coordinate-wise soft threshold with
/// shift `lambda / d_i`. Panics on dimension mismatch.
pub fn prox_l1_diag(lambda: f64, metric: &DiagonalMetric, z: &Vector) -> Vector {
    assert!(
        lambda.is_finite() && lambda >= 0.0,
        "l1 weight must be finite and nonnegative, got {lambda}"
    );
    assert_eq!(metric.dim(), z.len(), "metric/point dimension mismatch");
    Vector::from_iterator(
        z.len(),
        z.iter()
            .zip(metric.entries().iter())
            .map(|(&zi, &di)| soft_threshold(zi, lambda / di)),
    )
}

/// Weighted l1 norm `g(x) = lambda * ||x||_1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L1 {
    lambda: f64,
}

impl L1 {
    pub fn new(lambda: f64) -> Result<Self, ProxError> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(ProxError::BadWeight { value: lambda });
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

impl Regularizer for L1 {
    fn value(&self, x: &Vector) -> f64 {
        self.lambda * x.iter().map(|v| v.abs()).sum::<f64>()
    }

    fn scaled_prox(&self, metric: &DiagonalMetric, z: &Vector) -> Vector {
        prox_l1_diag(self.lambda, metric, z)
    }

    fn convex(&self) -> bool {
        true
    }
}

/// The zero regularizer `g = 0`; its scaled prox is the identity, so solvers
/// collapse to their smooth (diagonal Newton / gradient) variants.
#[derive(Debug, Clone, Copy, Default)]
pub struct Zero;

impl Regularizer for Zero {
    fn value(&self, _x: &Vector) -> f64 {
        0.0
    }

    fn scaled_prox(&self, metric: &DiagonalMetric, z: &Vector) -> Vector {
        assert_eq!(metric.dim(), z.len(), "metric/point dimension mismatch");
        z.clone()
    }

    fn convex(&self) -> bool {
        true
    }
}
