//! Trimmed (largest-K exempt) l1 penalty and its scaled prox.

use super::{soft_threshold, ProxError, TiePolicy};
use crate::problem::{DiagonalMetric, ProblemError, Regularizer, Vector};

/// Trimmed l1 penalty: `g(x) = lambda * min_{|S| = n-K} sum_{i in S} |x_i|`,
/// the l1 norm of everything except the `K` largest-magnitude coordinates.
/// Nonconvex for `K >= 1`; `K = 0` recovers the plain l1 norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrimmedL1 {
    lambda: f64,
    k: usize,
    tie: TiePolicy,
}

impl TrimmedL1 {
    pub fn new(lambda: f64, k: usize) -> Result<Self, ProxError> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(ProxError::NonPositiveWeight { value: lambda });
        }
        Ok(Self {
            lambda,
            k,
            tie: TiePolicy::LowestIndexSet,
        })
    }

    pub fn with_tie_policy(mut self, tie: TiePolicy) -> Self {
        self.tie = tie;
        self
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

impl Regularizer for TrimmedL1 {
    fn value(&self, x: &Vector) -> f64 {
        let n = x.len();
        if self.k >= n {
            return 0.0;
        }
        let keep = n - self.k;
        let mut abs: Vec<f64> = x.iter().map(|v| v.abs()).collect();
        abs.select_nth_unstable_by(keep - 1, f64::total_cmp);
        self.lambda * abs[..keep].iter().sum::<f64>()
    }

    fn scaled_prox(&self, metric: &DiagonalMetric, z: &Vector) -> Vector {
        prox_trimmed_l1_diag(self.lambda, self.k, metric, z, self.tie)
    }

    fn convex(&self) -> bool {
        self.k == 0
    }

    fn validate_dim(&self, n: usize) -> Result<(), ProblemError> {
        if self.k > n {
            return Err(ProblemError::IncompatibleRegularizer {
                n,
                reason: format!("trimmed l1 exempts k = {} > n coordinates", self.k),
            });
        }
        Ok(())
    }
}

/// Per-coordinate cost of penalizing coordinate `i`: the attained minimum of
/// `lambda |y| + d/2 (y - z)^2`, versus zero cost if the coordinate is exempt.
fn penalized_cost(lambda: f64, d: f64, z: f64) -> f64 {
    if z.abs() <= lambda / d {
        0.5 * d * z * z
    } else {
        lambda * z.abs() - lambda * lambda / (2.0 * d)
    }
}

/// Scaled prox of the trimmed l1 penalty.
///
/// Exempting a coordinate saves exactly its penalized cost, so the optimal
/// exempt set is the `k` coordinates with the largest cost; the remaining
/// `n - k` are soft thresholded with their own shifts `lambda / d_i`. Cost
/// ties (bitwise equality) are resolved by index according to `tie`, making
/// the selection deterministic. Panics if `k > z.len()` or on dimension
/// mismatch.
pub fn prox_trimmed_l1_diag(
    lambda: f64,
    k: usize,
    metric: &DiagonalMetric,
    z: &Vector,
    tie: TiePolicy,
) -> Vector {
    assert!(
        lambda.is_finite() && lambda > 0.0,
        "trimmed l1 weight must be finite and positive, got {lambda}"
    );
    assert_eq!(metric.dim(), z.len(), "metric/point dimension mismatch");
    let n = z.len();
    assert!(k <= n, "trimmed l1 exempts k = {k} > n = {n} coordinates");

    let keep = n - k;
    let mut out = z.clone();
    if keep == 0 {
        return out;
    }

    let mut costs: Vec<(f64, usize)> = (0..n)
        .map(|i| (penalized_cost(lambda, metric.entries()[i], z[i]), i))
        .collect();
    // Total order: cost ascending, equal costs broken by index so the
    // partition is unique. The expected-linear selection then yields exactly
    // the first `keep` elements of the full sorted order.
    let by_index_ascending = !matches!(tie, TiePolicy::PreferIdentity);
    let cmp = |x: &(f64, usize), y: &(f64, usize)| {
        f64::total_cmp(&x.0, &y.0).then_with(|| {
            if by_index_ascending {
                x.1.cmp(&y.1)
            } else {
                y.1.cmp(&x.1)
            }
        })
    };
    if keep < n {
        costs.select_nth_unstable_by(keep - 1, cmp);
    }
    for &(_, i) in &costs[..keep] {
        out[i] = soft_threshold(z[i], lambda / metric.entries()[i]);
    }
    out
}
