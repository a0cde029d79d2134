//! Brute-force reference computations used to validate the closed-form
//! operators: 1-D grid refinement for prox minima (with subset enumeration
//! for the trimmed penalty) and finite differences for derivatives. Slow by
//! design and deliberately independent of the closed-form branch logic.

use crate::problem::{DiagonalMetric, Regularizer, SmoothObjective, Vector};

/// Largest dimension accepted by the subset-enumeration oracle.
pub const TRIMMED_ORACLE_MAX_DIM: usize = 12;

/// Minimize a scalar function over `[lo, hi]` by repeated 513-point grid
/// scans, re-bracketing two cells around the incumbent, until the bracket
/// narrows below 1e-13. Returns `(argmin, min)`. The min value is accurate
/// to roughly machine precision; the argmin only to the width of the
/// function's flat region at the bottom (about 1e-8 for a smooth minimum).
pub fn grid_min_1d(phi: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    assert!(lo < hi, "empty bracket [{lo}, {hi}]");
    const POINTS: usize = 513;
    let mut lo = lo;
    let mut hi = hi;
    let mut best_y = lo;
    let mut best_v = f64::INFINITY;
    for _ in 0..60 {
        let step = (hi - lo) / (POINTS - 1) as f64;
        let mut round_i = 0;
        let mut round_v = f64::INFINITY;
        for i in 0..POINTS {
            let v = phi(lo + step * i as f64);
            if v < round_v {
                round_v = v;
                round_i = i;
            }
        }
        if round_v < best_v {
            best_v = round_v;
            best_y = lo + step * round_i as f64;
        }
        let new_lo = lo + step * round_i.saturating_sub(2) as f64;
        let new_hi = (lo + step * (round_i + 2) as f64).min(hi);
        lo = new_lo;
        hi = new_hi;
        if hi - lo <= 1e-13 {
            break;
        }
    }
    (best_y, best_v)
}

fn coordinate_bracket(z: f64) -> (f64, f64) {
    (z.min(0.0) - 1.0, z.max(0.0) + 1.0)
}

/// Reference minimum of `lambda |y| + d/2 (y - z)^2` by grid search.
pub fn oracle_l1_coordinate_min(lambda: f64, d: f64, z: f64) -> f64 {
    let (lo, hi) = coordinate_bracket(z);
    grid_min_1d(|y| lambda * y.abs() + 0.5 * d * (y - z) * (y - z), lo, hi).1
}

/// Reference minimum of `sum_i lambda |y_i| + 1/2 ||y - z||_D^2`.
pub fn oracle_l1_value(lambda: f64, d: &DiagonalMetric, z: &Vector) -> f64 {
    assert_eq!(d.dim(), z.len());
    z.iter()
        .zip(d.entries().iter())
        .map(|(&zi, &di)| oracle_l1_coordinate_min(lambda, di, zi))
        .sum()
}

/// Reference minimum of `sum_i lambda min(a |y_i|, 1) + 1/2 ||y - z||_D^2`.
pub fn oracle_capped_l1_value(lambda: f64, a: f64, d: &DiagonalMetric, z: &Vector) -> f64 {
    assert_eq!(d.dim(), z.len());
    z.iter()
        .zip(d.entries().iter())
        .map(|(&zi, &di)| {
            let (lo, hi) = coordinate_bracket(zi);
            grid_min_1d(
                |y| lambda * (a * y.abs()).min(1.0) + 0.5 * di * (y - zi) * (y - zi),
                lo,
                hi,
            )
            .1
        })
        .sum()
}

/// Reference minimum of the trimmed prox objective by enumerating every
/// penalized index set of size `n - k` and summing per-coordinate grid minima.
/// Exponential in `n`; capped at `TRIMMED_ORACLE_MAX_DIM`.
pub fn oracle_trimmed_l1_value(lambda: f64, k: usize, d: &DiagonalMetric, z: &Vector) -> f64 {
    let n = z.len();
    assert_eq!(d.dim(), n);
    assert!(k <= n, "cannot exempt {k} of {n} coordinates");
    assert!(
        n <= TRIMMED_ORACLE_MAX_DIM,
        "subset enumeration is limited to n <= {TRIMMED_ORACLE_MAX_DIM}"
    );
    let penalized: Vec<f64> = (0..n)
        .map(|i| oracle_l1_coordinate_min(lambda, d.entries()[i], z[i]))
        .collect();
    // Unpenalized coordinates sit exactly at z_i with zero cost.
    let keep = n - k;
    let mut best = f64::INFINITY;
    // Iterate bitmasks with exactly `keep` bits set.
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != keep {
            continue;
        }
        let mut total = 0.0;
        for (i, cost) in penalized.iter().enumerate() {
            if mask & (1 << i) != 0 {
                total += cost;
            }
        }
        if total < best {
            best = total;
        }
    }
    best
}

/// Value of the prox objective `g(y) + 1/2 ||y - z||_D^2` attained at `y`.
pub fn prox_objective(g: &dyn Regularizer, d: &DiagonalMetric, z: &Vector, y: &Vector) -> f64 {
    g.value(y) + 0.5 * d.weighted_norm_sq(&(y - z))
}

/// Central-difference gradient with per-coordinate steps `h max(1, |x_i|)`.
pub fn fd_gradient(obj: &dyn SmoothObjective, x: &Vector, h: f64) -> Vector {
    assert!(h > 0.0);
    let mut g = Vector::zeros(x.len());
    for i in 0..x.len() {
        let hi = h * x[i].abs().max(1.0);
        let mut xp = x.clone();
        xp[i] += hi;
        let mut xm = x.clone();
        xm[i] -= hi;
        g[i] = (obj.value(&xp) - obj.value(&xm)) / (2.0 * hi);
    }
    g
}

/// Central differences of the analytic gradient's own coordinates.
pub fn fd_hessian_diagonal(obj: &dyn SmoothObjective, x: &Vector, h: f64) -> Vector {
    assert!(h > 0.0);
    let mut diag = Vector::zeros(x.len());
    for i in 0..x.len() {
        let hi = h * x[i].abs().max(1.0);
        let mut xp = x.clone();
        xp[i] += hi;
        let mut xm = x.clone();
        xm[i] -= hi;
        diag[i] = (obj.gradient(&xp)[i] - obj.gradient(&xm)[i]) / (2.0 * hi);
    }
    diag
}
