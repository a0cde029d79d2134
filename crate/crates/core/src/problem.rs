//! Problem abstractions shared by every solver: smooth objectives, possibly
//! nonsmooth regularizers, diagonal metrics, and the composite instance that
//! bundles them.

use nalgebra::DVector;
use thiserror::Error;

/// Dense column vector of `f64`. All public entry points expect finite entries.
pub type Vector = DVector<f64>;

/// Default lower bound applied to Hessian diagonals coming from custom
/// objectives, so the scaled prox subproblem stays well posed.
pub const DEFAULT_METRIC_FLOOR: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("metric entry {index} is {value}; entries must be finite and strictly positive")]
    BadMetricEntry { index: usize, value: f64 },
    #[error("metric floor {floor} must be finite and strictly positive")]
    BadMetricFloor { floor: f64 },
    #[error("metric must have at least one entry")]
    EmptyMetric,
    #[error("regularizer expects dimension compatible with n = {n}: {reason}")]
    IncompatibleRegularizer { n: usize, reason: String },
}

/// Diagonal positive-definite metric `A = diag(d)`, used both as the scaled
/// prox weight and as the curvature model inside the solvers.
///
/// Construction enforces the invariant that every entry is finite and
/// strictly positive, so downstream code can divide by entries freely.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalMetric {
    diag: Vector,
}

impl DiagonalMetric {
    /// Wraps a diagonal, rejecting empty, non-finite, or non-positive entries.
    pub fn new(diag: Vector) -> Result<Self, ProblemError> {
        if diag.is_empty() {
            return Err(ProblemError::EmptyMetric);
        }
        for (index, &value) in diag.iter().enumerate() {
            if !value.is_finite() || value <= 0.0 {
                return Err(ProblemError::BadMetricEntry { index, value });
            }
        }
        Ok(Self { diag })
    }

    /// Like [`DiagonalMetric::new`] but clamps entries up to `floor` first.
    /// Guards objectives whose Hessian diagonal may degenerate to zero.
    pub fn floored(mut diag: Vector, floor: f64) -> Result<Self, ProblemError> {
        if !floor.is_finite() || floor <= 0.0 {
            return Err(ProblemError::BadMetricFloor { floor });
        }
        for (index, value) in diag.iter_mut().enumerate() {
            if value.is_nan() {
                return Err(ProblemError::BadMetricEntry {
                    index,
                    value: *value,
                });
            }
            if *value < floor {
                *value = floor;
            }
        }
        Self::new(diag)
    }

    /// Uniform metric `value * I`, the scalar-step special case.
    pub fn uniform(n: usize, value: f64) -> Result<Self, ProblemError> {
        Self::new(Vector::from_element(n, value))
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn entries(&self) -> &Vector {
        &self.diag
    }

    pub fn min_entry(&self) -> f64 {
        self.diag.min()
    }

    pub fn max_entry(&self) -> f64 {
        self.diag.max()
    }

    /// Returns `factor * A`. Panics if `factor` is not finite and positive;
    /// backtracking only ever grows the metric by powers of eta > 1.
    pub fn scaled(&self, factor: f64) -> Self {
        assert!(
            factor.is_finite() && factor > 0.0,
            "metric scale factor must be finite and positive, got {factor}"
        );
        Self {
            diag: &self.diag * factor,
        }
    }

    /// Entry-wise product `A v`.
    pub fn mul(&self, v: &Vector) -> Vector {
        assert_eq!(self.dim(), v.len(), "metric/vector dimension mismatch");
        self.diag.component_mul(v)
    }

    /// Entry-wise division `A^{-1} v`.
    pub fn inv_mul(&self, v: &Vector) -> Vector {
        assert_eq!(self.dim(), v.len(), "metric/vector dimension mismatch");
        v.component_div(&self.diag)
    }

    /// Weighted squared norm `||v||_A^2 = sum_i d_i v_i^2`.
    pub fn weighted_norm_sq(&self, v: &Vector) -> f64 {
        assert_eq!(self.dim(), v.len(), "metric/vector dimension mismatch");
        self.diag
            .iter()
            .zip(v.iter())
            .map(|(&d, &vi)| d * vi * vi)
            .sum()
    }
}

/// Twice continuously differentiable term `f` of the composite objective.
///
/// Implementations must keep `value`, `gradient`, and `hessian_diagonal`
/// mutually consistent; the test suite cross-checks shipped objectives
/// against central finite differences.
pub trait SmoothObjective {
    fn dim(&self) -> usize;

    fn value(&self, x: &Vector) -> f64;

    fn gradient(&self, x: &Vector) -> Vector;

    /// Diagonal of the Hessian at `x`, packaged as a metric. Must be strictly
    /// positive; use [`DiagonalMetric::floored`] when curvature can vanish.
    fn hessian_diagonal(&self, x: &Vector) -> DiagonalMetric;
}

/// Proper, closed, directionally differentiable regularizer `g` with a
/// computable diagonally scaled proximal operator.
pub trait Regularizer {
    /// Extended-real value of `g` at `x`; `f64::INFINITY` encodes points
    /// outside the domain. Must never return NaN.
    fn value(&self, x: &Vector) -> f64;

    /// A global minimizer of `g(y) + 1/2 ||y - z||_A^2` for the diagonal
    /// metric `A`. When the minimizer set has several points, the
    /// implementation's tie policy picks one.
    fn scaled_prox(&self, metric: &DiagonalMetric, z: &Vector) -> Vector;

    /// Whether `g` is convex. Gates solvers whose guarantees need convexity.
    fn convex(&self) -> bool;

    /// Hook for regularizers with dimension-dependent shape constraints.
    fn validate_dim(&self, _n: usize) -> Result<(), ProblemError> {
        Ok(())
    }
}

/// A composite instance `F = f + g` with identifying metadata.
pub struct ProblemInstance {
    name: String,
    seed: u64,
    objective: Box<dyn SmoothObjective + Send + Sync>,
    regularizer: Box<dyn Regularizer + Send + Sync>,
}

impl ProblemInstance {
    pub fn new(
        name: impl Into<String>,
        seed: u64,
        objective: Box<dyn SmoothObjective + Send + Sync>,
        regularizer: Box<dyn Regularizer + Send + Sync>,
    ) -> Result<Self, ProblemError> {
        regularizer.validate_dim(objective.dim())?;
        Ok(Self {
            name: name.into(),
            seed,
            objective,
            regularizer,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    pub fn objective(&self) -> &(dyn SmoothObjective + Send + Sync) {
        self.objective.as_ref()
    }

    pub fn regularizer(&self) -> &(dyn Regularizer + Send + Sync) {
        self.regularizer.as_ref()
    }

    /// `F(x) = f(x) + g(x)`. Returns `+inf` exactly when `g(x) = +inf`,
    /// never NaN. Panics on dimension mismatch.
    pub fn composite_value(&self, x: &Vector) -> f64 {
        assert_eq!(self.dim(), x.len(), "point/instance dimension mismatch");
        let v = self.objective.value(x) + self.regularizer.value(x);
        debug_assert!(!v.is_nan(), "composite value is NaN");
        v
    }
}

/// Gap between `f(y)` and its first-order model around `x`:
/// `f(y) - f(x) - <grad f(x), y - x>`. Nonnegative whenever `f` is convex.
pub fn linearization_gap(obj: &dyn SmoothObjective, y: &Vector, x: &Vector) -> f64 {
    assert_eq!(y.len(), x.len(), "point dimension mismatch");
    obj.value(y) - obj.value(x) - obj.gradient(x).dot(&(y - x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_rejects_nonpositive_entries() {
        let err = DiagonalMetric::new(Vector::from_vec(vec![1.0, 0.0])).unwrap_err();
        match err {
            ProblemError::BadMetricEntry { index, value } => {
                assert_eq!(index, 1);
                assert_eq!(value, 0.0);
            }
            other => panic!("unexpected error {other:?}"),
        }
        assert!(DiagonalMetric::new(Vector::from_vec(vec![-1.0])).is_err());
        assert!(DiagonalMetric::new(Vector::from_vec(vec![f64::NAN])).is_err());
        assert!(DiagonalMetric::new(Vector::from_vec(vec![f64::INFINITY])).is_err());
        assert!(DiagonalMetric::new(Vector::zeros(0)).is_err());
    }

    #[test]
    fn metric_floor_clamps_small_entries() {
        let m = DiagonalMetric::floored(Vector::from_vec(vec![0.0, 5.0, -3.0]), 1e-12).unwrap();
        assert_eq!(m.entries()[0], 1e-12);
        assert_eq!(m.entries()[1], 5.0);
        assert_eq!(m.entries()[2], 1e-12);
        assert!(DiagonalMetric::floored(Vector::from_vec(vec![1.0]), 0.0).is_err());
        assert!(DiagonalMetric::floored(Vector::from_vec(vec![f64::NAN]), 1e-12).is_err());
    }

    #[test]
    fn metric_algebra_matches_definitions() {
        let m = DiagonalMetric::new(Vector::from_vec(vec![2.0, 4.0])).unwrap();
        let v = Vector::from_vec(vec![3.0, -1.0]);
        assert_eq!(m.mul(&v), Vector::from_vec(vec![6.0, -4.0]));
        assert_eq!(m.inv_mul(&v), Vector::from_vec(vec![1.5, -0.25]));
        assert_eq!(m.weighted_norm_sq(&v), 2.0 * 9.0 + 4.0 * 1.0);
        assert_eq!(m.scaled(2.0).entries(), &Vector::from_vec(vec![4.0, 8.0]));
        assert_eq!(m.min_entry(), 2.0);
        assert_eq!(m.max_entry(), 4.0);
    }
}
