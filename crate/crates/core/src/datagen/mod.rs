//! Seeded synthetic instance generation and dataset ingestion.

mod dataset;
mod rng;

pub use dataset::{load_dataset, Dataset, DatasetFormat, DatasetSpec};
pub use rng::CounterRng;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::objectives::{ObjectiveError, QuadraticObjective};
use crate::problem::{ProblemError, ProblemInstance, Vector};
use crate::prox::{CappedL1, L1, ProxError, TrimmedL1};

/// Cap on the total number of dense matrix elements a generator or loader
/// will materialize (~0.5 GiB of f64).
pub const DEFAULT_MAX_ELEMENTS: usize = 1 << 26;

#[derive(Debug, Error)]
pub enum DatagenError {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("instance needs {elements} matrix elements, above the cap {cap}")]
    TooLarge { elements: usize, cap: usize },
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Prox(#[from] ProxError),
    #[error("failed to read {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: std::path::PathBuf,
        line: usize,
        msg: String,
    },
    #[error("{path}: no data rows")]
    EmptyDataset { path: std::path::PathBuf },
    #[error("{path}: every feature column is zero")]
    NoFeatures { path: std::path::PathBuf },
}

/// Which regularizer a generated instance carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RegChoice {
    #[default]
    L1,
    CappedL1,
    TrimmedL1,
}

impl RegChoice {
    pub fn tag(self) -> &'static str {
        match self {
            RegChoice::L1 => "l1",
            RegChoice::CappedL1 => "capped-l1",
            RegChoice::TrimmedL1 => "trimmed-l1",
        }
    }
}

impl std::str::FromStr for RegChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "l1" => Ok(RegChoice::L1),
            "capped-l1" => Ok(RegChoice::CappedL1),
            "trimmed-l1" => Ok(RegChoice::TrimmedL1),
            other => Err(format!(
                "unknown regularizer {other:?}; expected l1, capped-l1, or trimmed-l1"
            )),
        }
    }
}

/// Recipe for a blended random quadratic
/// `Q = lambda_blend * Q1 + (1 - lambda_blend) * A^T A / m`
/// with `Q1` diagonal with uniform entries in `[diag_low, diag_high)`,
/// `A` an `m x n` standard normal matrix, and `l = Q e` for standard normal
/// `e`. Larger `lambda_blend` makes `Q` more diagonal, so the Hessian's
/// diagonal becomes a better curvature model while `cond(Q)` degrades.
#[derive(Debug, Clone)]
pub struct BlendSpec {
    pub n: usize,
    pub m: usize,
    pub lambda_blend: f64,
    pub seed: u64,
    pub diag_low: f64,
    pub diag_high: f64,
    pub reg: RegChoice,
    /// Weight of the regularizer.
    pub lambda_reg: f64,
    /// Slope of the capped l1 penalty.
    pub cap_a: f64,
    /// Exempt-coordinate count of the trimmed l1 penalty.
    pub trim_k: usize,
    pub max_elements: usize,
}

impl Default for BlendSpec {
    fn default() -> Self {
        Self {
            n: 500,
            m: 500,
            lambda_blend: 0.5,
            seed: 0,
            diag_low: 0.0,
            diag_high: 10.0,
            reg: RegChoice::L1,
            lambda_reg: 1.0,
            cap_a: 1.0,
            trim_k: 50,
            max_elements: DEFAULT_MAX_ELEMENTS,
        }
    }
}

impl BlendSpec {
    fn validate(&self) -> Result<(), DatagenError> {
        if self.n == 0 || self.m == 0 {
            return Err(DatagenError::InvalidSpec("n and m must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.lambda_blend) || !self.lambda_blend.is_finite() {
            return Err(DatagenError::InvalidSpec(format!(
                "lambda_blend must lie in [0, 1], got {}",
                self.lambda_blend
            )));
        }
        if !(self.diag_low.is_finite() && self.diag_high.is_finite())
            || self.diag_low < 0.0
            || self.diag_low >= self.diag_high
        {
            return Err(DatagenError::InvalidSpec(format!(
                "diagonal range [{}, {}) must be nonnegative and nonempty",
                self.diag_low, self.diag_high
            )));
        }
        let elements = self
            .n
            .saturating_mul(self.n)
            .saturating_add(self.n.saturating_mul(self.m));
        if elements > self.max_elements {
            return Err(DatagenError::TooLarge {
                elements,
                cap: self.max_elements,
            });
        }
        Ok(())
    }

    pub fn instance_name(&self) -> String {
        format!(
            "blend-n{}-m{}-lb{:.2}-{}-seed{}",
            self.n,
            self.m,
            self.lambda_blend,
            self.reg.tag(),
            self.seed
        )
    }
}

/// Generates the `(Q, l)` pair of a [`BlendSpec`]. Draw order is frozen:
/// stream 0 fills `A` row by row, stream 1 draws the `Q1` diagonal, stream 2
/// draws `e`. The same seed therefore shares `A`, `Q1`, and `e` across
/// different blend weights.
pub fn gen_blend_matrices(spec: &BlendSpec) -> Result<(DMatrix<f64>, Vector), DatagenError> {
    spec.validate()?;
    let (n, m) = (spec.n, spec.m);

    let mut a_rng = CounterRng::stream(spec.seed, 0);
    let mut a = DMatrix::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            a[(i, j)] = a_rng.normal();
        }
    }

    let mut d_rng = CounterRng::stream(spec.seed, 1);
    let mut q = a.tr_mul(&a) * ((1.0 - spec.lambda_blend) / m as f64);
    for i in 0..n {
        q[(i, i)] += spec.lambda_blend * d_rng.uniform_range(spec.diag_low, spec.diag_high);
    }

    let mut e_rng = CounterRng::stream(spec.seed, 2);
    let e = Vector::from_fn(n, |_, _| e_rng.normal());
    let l = &q * e;
    Ok((q, l))
}

/// Generates the full composite instance of a [`BlendSpec`].
pub fn gen_blend_quadratic(spec: &BlendSpec) -> Result<ProblemInstance, DatagenError> {
    let (q, l) = gen_blend_matrices(spec)?;
    let objective = Box::new(QuadraticObjective::new(q, l)?);
    let regularizer: Box<dyn crate::problem::Regularizer + Send + Sync> = match spec.reg {
        RegChoice::L1 => Box::new(L1::new(spec.lambda_reg)?),
        RegChoice::CappedL1 => Box::new(CappedL1::new(spec.lambda_reg, spec.cap_a)?),
        RegChoice::TrimmedL1 => Box::new(TrimmedL1::new(spec.lambda_reg, spec.trim_k)?),
    };
    Ok(ProblemInstance::new(
        spec.instance_name(),
        spec.seed,
        objective,
        regularizer,
    )?)
}

/// Recipe for synthetic regression / classification data: standard normal
/// design, a sparse ground-truth coefficient vector, and Gaussian noise.
#[derive(Debug, Clone)]
pub struct SyntheticDataSpec {
    pub m: usize,
    pub n: usize,
    /// Expected fraction of nonzero ground-truth coefficients.
    pub density: f64,
    /// Noise standard deviation added to the linear responses.
    pub noise: f64,
    pub seed: u64,
    pub max_elements: usize,
}

impl Default for SyntheticDataSpec {
    fn default() -> Self {
        Self {
            m: 500,
            n: 500,
            density: 0.1,
            noise: 0.01,
            seed: 0,
            max_elements: DEFAULT_MAX_ELEMENTS,
        }
    }
}

impl SyntheticDataSpec {
    fn validate(&self) -> Result<(), DatagenError> {
        if self.m == 0 || self.n == 0 {
            return Err(DatagenError::InvalidSpec("m and n must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.density) {
            return Err(DatagenError::InvalidSpec(format!(
                "density must lie in [0, 1], got {}",
                self.density
            )));
        }
        if !self.noise.is_finite() || self.noise < 0.0 {
            return Err(DatagenError::InvalidSpec(format!(
                "noise must be nonnegative, got {}",
                self.noise
            )));
        }
        let elements = self.m.saturating_mul(self.n);
        if elements > self.max_elements {
            return Err(DatagenError::TooLarge {
                elements,
                cap: self.max_elements,
            });
        }
        Ok(())
    }
}

fn gen_linear_responses(spec: &SyntheticDataSpec) -> Result<(DMatrix<f64>, Vector), DatagenError> {
    spec.validate()?;
    let (m, n) = (spec.m, spec.n);
    let mut a_rng = CounterRng::stream(spec.seed, 10);
    let mut a = DMatrix::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            a[(i, j)] = a_rng.normal();
        }
    }
    let mut support_rng = CounterRng::stream(spec.seed, 11);
    let mut coef_rng = CounterRng::stream(spec.seed, 12);
    let x_true = Vector::from_fn(n, |_, _| {
        let u = support_rng.uniform();
        let c = coef_rng.normal();
        if u < spec.density {
            c
        } else {
            0.0
        }
    });
    let mut noise_rng = CounterRng::stream(spec.seed, 13);
    let mut responses = &a * x_true;
    for v in responses.iter_mut() {
        *v += spec.noise * noise_rng.normal();
    }
    Ok((a, responses))
}

/// Synthetic regression data `(A, b)` with `b = A x_true + noise`.
pub fn gen_regression_data(spec: &SyntheticDataSpec) -> Result<(DMatrix<f64>, Vector), DatagenError> {
    gen_linear_responses(spec)
}

/// Synthetic binary classification data `(A, b)` with labels
/// `b_i = sign(a_i^T x_true + noise)` in {+1, -1} (ties go to +1).
pub fn gen_logistic_data(spec: &SyntheticDataSpec) -> Result<(DMatrix<f64>, Vector), DatagenError> {
    let (a, responses) = gen_linear_responses(spec)?;
    let labels = responses.map(|v| if v < 0.0 { -1.0 } else { 1.0 });
    Ok((a, labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::SmoothObjective;

    #[test]
    fn blend_extremes_are_diagonal_and_dense() {
        let spec = BlendSpec {
            n: 12,
            m: 16,
            lambda_blend: 1.0,
            seed: 3,
            ..BlendSpec::default()
        };
        let (q, _) = gen_blend_matrices(&spec).unwrap();
        for i in 0..12 {
            for j in 0..12 {
                if i != j {
                    assert_eq!(q[(i, j)], 0.0, "off-diagonal at ({i}, {j})");
                } else {
                    assert!(q[(i, i)] > 0.0 && q[(i, i)] < 10.0);
                }
            }
        }

        let dense = BlendSpec {
            lambda_blend: 0.0,
            ..spec
        };
        let (q, _) = gen_blend_matrices(&dense).unwrap();
        let off = (0..12)
            .flat_map(|i| (0..12).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && q[(i, j)] != 0.0)
            .count();
        assert!(off > 100, "A^T A / m should be dense, {off} nonzeros");
    }

    #[test]
    fn generation_is_deterministic_and_seed_sensitive() {
        let spec = BlendSpec {
            n: 10,
            m: 10,
            seed: 42,
            ..BlendSpec::default()
        };
        let (q1, l1) = gen_blend_matrices(&spec).unwrap();
        let (q2, l2) = gen_blend_matrices(&spec).unwrap();
        assert_eq!(q1, q2);
        assert_eq!(l1, l2);
        let other = BlendSpec { seed: 43, ..spec };
        let (q3, _) = gen_blend_matrices(&other).unwrap();
        assert_ne!(q1, q3);
    }

    #[test]
    fn blend_matrix_is_exactly_symmetric_and_psd() {
        let spec = BlendSpec {
            n: 40,
            m: 60,
            lambda_blend: 0.5,
            seed: 9,
            ..BlendSpec::default()
        };
        let (q, _) = gen_blend_matrices(&spec).unwrap();
        for i in 0..40 {
            for j in 0..40 {
                assert_eq!(q[(i, j)], q[(j, i)]);
            }
        }
        let eig = nalgebra::SymmetricEigen::new(q.clone());
        let min = eig.eigenvalues.min();
        let max = eig.eigenvalues.max();
        assert!(min > -1e-10 * max.abs(), "min eigenvalue {min}");
    }

    #[test]
    fn instance_carries_requested_regularizer() {
        let spec = BlendSpec {
            n: 6,
            m: 6,
            reg: RegChoice::TrimmedL1,
            trim_k: 2,
            lambda_reg: 0.5,
            seed: 1,
            ..BlendSpec::default()
        };
        let p = gen_blend_quadratic(&spec).unwrap();
        assert_eq!(p.dim(), 6);
        assert!(!p.regularizer().convex());
        assert_eq!(p.seed(), 1);
        assert!(p.name().contains("trimmed-l1"));

        let bad = BlendSpec { trim_k: 7, ..spec };
        assert!(gen_blend_quadratic(&bad).is_err());
    }

    #[test]
    fn rejects_invalid_specs() {
        let base = BlendSpec::default();
        assert!(gen_blend_matrices(&BlendSpec { n: 0, ..base.clone() }).is_err());
        assert!(gen_blend_matrices(&BlendSpec {
            lambda_blend: 1.5,
            ..base.clone()
        })
        .is_err());
        assert!(gen_blend_matrices(&BlendSpec {
            diag_low: 5.0,
            diag_high: 5.0,
            ..base.clone()
        })
        .is_err());
        let spec = BlendSpec {
            n: 10_000,
            m: 10_000,
            ..base
        };
        assert!(matches!(
            gen_blend_matrices(&spec),
            Err(DatagenError::TooLarge { .. })
        ));
    }

    #[test]
    fn synthetic_data_shapes_and_labels() {
        let spec = SyntheticDataSpec {
            m: 30,
            n: 8,
            seed: 5,
            ..SyntheticDataSpec::default()
        };
        let (a, b) = gen_regression_data(&spec).unwrap();
        assert_eq!((a.nrows(), a.ncols()), (30, 8));
        assert_eq!(b.len(), 30);
        assert!(b.iter().all(|v| v.is_finite()));

        let (a2, labels) = gen_logistic_data(&spec).unwrap();
        assert_eq!(a, a2, "shared design stream");
        assert!(labels.iter().all(|&v| v == 1.0 || v == -1.0));
        assert!(labels.iter().any(|&v| v == 1.0));
        assert!(labels.iter().any(|&v| v == -1.0));
    }

    #[test]
    fn quadratic_hessian_diagonal_matches_matrix_diagonal() {
        let spec = BlendSpec {
            n: 8,
            m: 10,
            seed: 2,
            ..BlendSpec::default()
        };
        let (q, l) = gen_blend_matrices(&spec).unwrap();
        let obj = QuadraticObjective::new(q.clone(), l).unwrap();
        let d = obj.hessian_diagonal(&Vector::zeros(8));
        for i in 0..8 {
            assert_eq!(d.entries()[i], q[(i, i)]);
        }
    }
}
