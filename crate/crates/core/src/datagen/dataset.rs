//! Loading labeled datasets from disk.
//!
//! Two formats are supported:
//!
//! * sparse text: one sample per line, `label index:value index:value ...`
//!   with 1-based feature indices (the common SVM-light layout);
//! * dense CSV: one sample per line, label first, then every feature value,
//!   with an optional header row.
//!
//! Feature columns that are zero in every sample carry no information and
//! break positive-curvature assumptions, so they are dropped with a warning.

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;

use super::{DatagenError, DEFAULT_MAX_ELEMENTS};
use crate::problem::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetFormat {
    SparseText,
    DenseCsv,
}

#[derive(Debug, Clone)]
pub struct DatasetSpec {
    pub path: PathBuf,
    /// Explicit format; `None` picks by extension (`.csv` means dense CSV,
    /// anything else sparse text).
    pub format: Option<DatasetFormat>,
    /// Whether a dense CSV file starts with a header row.
    pub has_header: bool,
    pub max_elements: usize,
}

impl DatasetSpec {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self {
            path: path.into(),
            format: None,
            has_header: false,
            max_elements: DEFAULT_MAX_ELEMENTS,
        }
    }

    fn resolved_format(&self) -> DatasetFormat {
        self.format.unwrap_or_else(|| {
            match self.path.extension().and_then(|e| e.to_str()) {
                Some(ext) if ext.eq_ignore_ascii_case("csv") => DatasetFormat::DenseCsv,
                _ => DatasetFormat::SparseText,
            }
        })
    }
}

/// A loaded dataset: dense design matrix, per-sample labels, and the 1-based
/// original indices of dropped all-zero feature columns.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub a: DMatrix<f64>,
    pub b: Vector,
    pub dropped_columns: Vec<usize>,
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> DatagenError {
    DatagenError::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

fn parse_float(path: &Path, line: usize, token: &str, what: &str) -> Result<f64, DatagenError> {
    let v: f64 = token
        .parse()
        .map_err(|_| parse_err(path, line, format!("invalid {what} {token:?}")))?;
    if !v.is_finite() {
        return Err(parse_err(path, line, format!("{what} {token:?} is not finite")));
    }
    Ok(v)
}

/// Reads the dataset described by `spec`, densifies it, and drops all-zero
/// feature columns (logged as a warning). Errors carry the path and, for
/// malformed content, the 1-based line number.
pub fn load_dataset(spec: &DatasetSpec) -> Result<Dataset, DatagenError> {
    let path = spec.path.as_path();
    let text = std::fs::read_to_string(path).map_err(|source| DatagenError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let (a, b) = match spec.resolved_format() {
        DatasetFormat::SparseText => parse_sparse_text(path, &text, spec.max_elements)?,
        DatasetFormat::DenseCsv => parse_dense_csv(path, &text, spec)?,
    };
    drop_zero_columns(path, a, b)
}

fn parse_sparse_text(
    path: &Path,
    text: &str,
    max_elements: usize,
) -> Result<(DMatrix<f64>, Vector), DatagenError> {
    let mut labels = Vec::new();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut n = 0usize;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let mut tokens = line.split_whitespace();
        let Some(first) = tokens.next() else {
            continue; // blank line
        };
        labels.push(parse_float(path, lineno, first, "label")?);
        let mut row = Vec::new();
        for token in tokens {
            let (idx_str, val_str) = token.split_once(':').ok_or_else(|| {
                parse_err(path, lineno, format!("expected index:value, got {token:?}"))
            })?;
            let index: usize = idx_str.parse().map_err(|_| {
                parse_err(path, lineno, format!("invalid feature index {idx_str:?}"))
            })?;
            if index == 0 {
                return Err(parse_err(path, lineno, "feature indices are 1-based"));
            }
            let value = parse_float(path, lineno, val_str, "feature value")?;
            if row.iter().any(|&(i, _)| i == index) {
                return Err(parse_err(
                    path,
                    lineno,
                    format!("duplicate feature index {index}"),
                ));
            }
            n = n.max(index);
            row.push((index, value));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(DatagenError::EmptyDataset {
            path: path.to_path_buf(),
        });
    }
    if n == 0 {
        return Err(DatagenError::NoFeatures {
            path: path.to_path_buf(),
        });
    }
    let m = rows.len();
    check_size(m, n, max_elements)?;
    let mut a = DMatrix::zeros(m, n);
    for (i, row) in rows.iter().enumerate() {
        for &(index, value) in row {
            a[(i, index - 1)] = value;
        }
    }
    Ok((a, Vector::from_vec(labels)))
}

fn parse_dense_csv(
    path: &Path,
    text: &str,
    spec: &DatasetSpec,
) -> Result<(DMatrix<f64>, Vector), DatagenError> {
    let mut labels = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if spec.has_header && lineno == 1 {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let label = parse_float(path, lineno, fields.next().unwrap().trim(), "label")?;
        let row: Vec<f64> = fields
            .map(|f| parse_float(path, lineno, f.trim(), "feature value"))
            .collect::<Result<_, _>>()?;
        match width {
            None => {
                if row.is_empty() {
                    return Err(parse_err(path, lineno, "row has a label but no features"));
                }
                width = Some(row.len());
            }
            Some(expected) if expected != row.len() => {
                return Err(parse_err(
                    path,
                    lineno,
                    format!("expected {} feature columns, got {}", expected, row.len()),
                ));
            }
            _ => {}
        }
        labels.push(label);
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(DatagenError::EmptyDataset {
            path: path.to_path_buf(),
        });
    }
    let m = rows.len();
    let n = width.expect("nonempty rows imply a width");
    check_size(m, n, spec.max_elements)?;
    let a = DMatrix::from_fn(m, n, |i, j| rows[i][j]);
    Ok((a, Vector::from_vec(labels)))
}

fn check_size(m: usize, n: usize, cap: usize) -> Result<(), DatagenError> {
    let elements = m.saturating_mul(n);
    if elements > cap {
        return Err(DatagenError::TooLarge { elements, cap });
    }
    Ok(())
}

fn drop_zero_columns(
    path: &Path,
    a: DMatrix<f64>,
    b: Vector,
) -> Result<Dataset, DatagenError> {
    let nonzero: Vec<usize> = (0..a.ncols())
        .filter(|&j| a.column(j).iter().any(|&v| v != 0.0))
        .collect();
    if nonzero.is_empty() {
        return Err(DatagenError::NoFeatures {
            path: path.to_path_buf(),
        });
    }
    if nonzero.len() == a.ncols() {
        return Ok(Dataset {
            a,
            b,
            dropped_columns: Vec::new(),
        });
    }
    let dropped: Vec<usize> = (0..a.ncols())
        .filter(|j| !nonzero.contains(j))
        .map(|j| j + 1)
        .collect();
    log::warn!(
        "{}: dropping {} all-zero feature column(s) (1-based): {:?}",
        path.display(),
        dropped.len(),
        dropped
    );
    let kept = DMatrix::from_fn(a.nrows(), nonzero.len(), |i, j| a[(i, nonzero[j])]);
    Ok(Dataset {
        a: kept,
        b,
        dropped_columns: dropped,
    })
}
