//! Shipped smooth objectives: dense quadratics, linear least squares, and
//! l2-regularized logistic loss.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::problem::{DiagonalMetric, SmoothObjective, Vector};

#[derive(Debug, Error)]
pub enum ObjectiveError {
    #[error("matrix must be square, got {rows} x {cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric at ({i}, {j}): {upper} != {lower}")]
    NotSymmetric { i: usize, j: usize, upper: f64, lower: f64 },
    #[error("diagonal entry {index} is {value}; must be finite and strictly positive")]
    BadDiagonal { index: usize, value: f64 },
    #[error("dimension mismatch: matrix is {rows} x {cols}, vector has length {len}")]
    DimensionMismatch { rows: usize, cols: usize, len: usize },
    #[error("matrix must be nonempty")]
    Empty,
    #[error("entry ({i}, {j}) is not finite")]
    NonFiniteEntry { i: usize, j: usize },
    #[error("vector entry {index} is not finite")]
    NonFiniteVectorEntry { index: usize },
    #[error("column {col} of the design matrix is identically zero")]
    ZeroColumn { col: usize },
    #[error("label {index} is {value}; logistic labels must be exactly +1 or -1")]
    BadLabel { index: usize, value: f64 },
    #[error("ridge weight must be finite and strictly positive, got {value}")]
    BadRidgeWeight { value: f64 },
}

fn check_matrix_finite(a: &DMatrix<f64>) -> Result<(), ObjectiveError> {
    if a.is_empty() {
        return Err(ObjectiveError::Empty);
    }
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            if !a[(i, j)].is_finite() {
                return Err(ObjectiveError::NonFiniteEntry { i, j });
            }
        }
    }
    Ok(())
}

fn check_vector_finite(v: &Vector) -> Result<(), ObjectiveError> {
    for (index, &value) in v.iter().enumerate() {
        if !value.is_finite() {
            return Err(ObjectiveError::NonFiniteVectorEntry { index });
        }
    }
    Ok(())
}

/// `f(x) = 1/2 x^T Q x + l^T x` for symmetric `Q` with strictly positive
/// diagonal. The Hessian is constant, so its diagonal is precomputed.
pub struct QuadraticObjective {
    q: DMatrix<f64>,
    l: Vector,
    diag: DiagonalMetric,
}

impl QuadraticObjective {
    pub fn new(q: DMatrix<f64>, l: Vector) -> Result<Self, ObjectiveError> {
        if q.nrows() != q.ncols() {
            return Err(ObjectiveError::NotSquare {
                rows: q.nrows(),
                cols: q.ncols(),
            });
        }
        check_matrix_finite(&q)?;
        check_vector_finite(&l)?;
        if l.len() != q.nrows() {
            return Err(ObjectiveError::DimensionMismatch {
                rows: q.nrows(),
                cols: q.ncols(),
                len: l.len(),
            });
        }
        for i in 0..q.nrows() {
            for j in (i + 1)..q.ncols() {
                if q[(i, j)] != q[(j, i)] {
                    return Err(ObjectiveError::NotSymmetric {
                        i,
                        j,
                        upper: q[(i, j)],
                        lower: q[(j, i)],
                    });
                }
            }
        }
        let mut diag = Vector::zeros(q.nrows());
        for i in 0..q.nrows() {
            let v = q[(i, i)];
            if !v.is_finite() || v <= 0.0 {
                return Err(ObjectiveError::BadDiagonal { index: i, value: v });
            }
            diag[i] = v;
        }
        let diag = DiagonalMetric::new(diag).expect("validated above");
        Ok(Self { q, l, diag })
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn l(&self) -> &Vector {
        &self.l
    }
}

impl SmoothObjective for QuadraticObjective {
    fn dim(&self) -> usize {
        self.q.nrows()
    }

    fn value(&self, x: &Vector) -> f64 {
        assert_eq!(x.len(), self.dim(), "point dimension mismatch");
        0.5 * x.dot(&(&self.q * x)) + self.l.dot(x)
    }

    fn gradient(&self, x: &Vector) -> Vector {
        assert_eq!(x.len(), self.dim(), "point dimension mismatch");
        &self.q * x + &self.l
    }

    fn hessian_diagonal(&self, _x: &Vector) -> DiagonalMetric {
        self.diag.clone()
    }
}

/// How the residual sum of squares is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scaling {
    /// `f(x) = 1/2 ||b - A x||^2`
    Half,
    /// `f(x) = 1/(2m) ||b - A x||^2` for `m` rows
    InverseM,
}

/// Linear least squares with a dense design matrix. Every column must carry
/// at least one nonzero entry so the Hessian diagonal stays positive.
pub struct LeastSquaresObjective {
    a: DMatrix<f64>,
    b: Vector,
    scale: f64,
    diag: DiagonalMetric,
}

impl LeastSquaresObjective {
    pub fn new(a: DMatrix<f64>, b: Vector, scaling: Scaling) -> Result<Self, ObjectiveError> {
        check_matrix_finite(&a)?;
        check_vector_finite(&b)?;
        if b.len() != a.nrows() {
            return Err(ObjectiveError::DimensionMismatch {
                rows: a.nrows(),
                cols: a.ncols(),
                len: b.len(),
            });
        }
        let m = a.nrows() as f64;
        // scale * ||b - Ax||^2 with scale = 1/2 or 1/(2m); the gradient and
        // Hessian then carry the factor 2 * scale.
        let scale = match scaling {
            Scaling::Half => 0.5,
            Scaling::InverseM => 0.5 / m,
        };
        let mut diag = Vector::zeros(a.ncols());
        for j in 0..a.ncols() {
            let col_sq: f64 = a.column(j).iter().map(|v| v * v).sum();
            if col_sq == 0.0 {
                return Err(ObjectiveError::ZeroColumn { col: j });
            }
            diag[j] = 2.0 * scale * col_sq;
        }
        let diag = DiagonalMetric::new(diag).expect("zero columns rejected above");
        Ok(Self { a, b, scale, diag })
    }

    pub fn design(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn rhs(&self) -> &Vector {
        &self.b
    }
}

impl SmoothObjective for LeastSquaresObjective {
    fn dim(&self) -> usize {
        self.a.ncols()
    }

    fn value(&self, x: &Vector) -> f64 {
        assert_eq!(x.len(), self.dim(), "point dimension mismatch");
        let r = &self.b - &self.a * x;
        self.scale * r.norm_squared()
    }

    fn gradient(&self, x: &Vector) -> Vector {
        assert_eq!(x.len(), self.dim(), "point dimension mismatch");
        let r = &self.a * x - &self.b;
        self.a.tr_mul(&r) * (2.0 * self.scale)
    }

    fn hessian_diagonal(&self, _x: &Vector) -> DiagonalMetric {
        self.diag.clone()
    }
}

/// Binary logistic loss with an l2 ridge term:
/// `f(x) = sum_i log(1 + exp(-b_i a_i^T x)) + gamma/2 ||x||^2`,
/// labels `b_i` in {+1, -1}, `gamma > 0` so curvature is bounded away from 0.
pub struct LogisticRidgeObjective {
    a: DMatrix<f64>,
    b: Vector,
    gamma: f64,
}

/// `log(1 + e^u)` without overflow for large `|u|`.
fn log1p_exp(u: f64) -> f64 {
    u.max(0.0) + (-u.abs()).exp().ln_1p()
}

impl LogisticRidgeObjective {
    pub fn new(a: DMatrix<f64>, b: Vector, gamma: f64) -> Result<Self, ObjectiveError> {
        check_matrix_finite(&a)?;
        if b.len() != a.nrows() {
            return Err(ObjectiveError::DimensionMismatch {
                rows: a.nrows(),
                cols: a.ncols(),
                len: b.len(),
            });
        }
        for (index, &value) in b.iter().enumerate() {
            if value != 1.0 && value != -1.0 {
                return Err(ObjectiveError::BadLabel { index, value });
            }
        }
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(ObjectiveError::BadRidgeWeight { value: gamma });
        }
        Ok(Self { a, b, gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Margins `b_i * a_i^T x`.
    fn margins(&self, x: &Vector) -> Vector {
        (&self.a * x).component_mul(&self.b)
    }
}

impl SmoothObjective for LogisticRidgeObjective {
    fn dim(&self) -> usize {
        self.a.ncols()
    }

    fn value(&self, x: &Vector) -> f64 {
        assert_eq!(x.len(), self.dim(), "point dimension mismatch");
        let loss: f64 = self.margins(x).iter().map(|&u| log1p_exp(-u)).sum();
        loss + 0.5 * self.gamma * x.norm_squared()
    }

    fn gradient(&self, x: &Vector) -> Vector {
        assert_eq!(x.len(), self.dim(), "point dimension mismatch");
        // d/du log(1+e^{-u}) = -1/(1+e^u); chain through u_i = b_i a_i^T x.
        let w = self.margins(x).map(|u| 1.0 / (1.0 + u.exp()));
        self.a.tr_mul(&w.component_mul(&self.b)) * -1.0 + x * self.gamma
    }

    fn hessian_diagonal(&self, x: &Vector) -> DiagonalMetric {
        assert_eq!(x.len(), self.dim(), "point dimension mismatch");
        // p(1-p) at margin u equals e^{-|u|} / (1 + e^{-|u|})^2.
        let curv = self.margins(x).map(|u| {
            let t = (-u.abs()).exp();
            t / ((1.0 + t) * (1.0 + t))
        });
        let mut diag = Vector::from_element(self.dim(), self.gamma);
        for j in 0..self.dim() {
            diag[j] += self
                .a
                .column(j)
                .iter()
                .zip(curv.iter())
                .map(|(&aij, &c)| aij * aij * c)
                .sum::<f64>();
        }
        DiagonalMetric::new(diag).expect("gamma > 0 keeps the diagonal positive")
    }
}
