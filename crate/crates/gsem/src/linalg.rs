//! Dense linear-algebra helpers that ndarray does not provide.

use nalgebra::DMatrix;
use ndarray::Array2;

/// Numerical rank: the number of singular values above
/// `max(n, m) * eps * sigma_max`, the conventional tolerance that treats
/// values explainable by rounding as zero.
///
/// The zero matrix has rank 0.
pub fn numerical_rank(matrix: &Array2<f64>) -> usize {
    let (rows, cols) = matrix.dim();
    if rows == 0 || cols == 0 {
        return 0;
    }
    let flat: Vec<f64> = matrix.iter().cloned().collect();
    let m = DMatrix::from_row_iterator(rows, cols, flat);
    let singular_values = m.singular_values();
    let sigma_max = singular_values.max();
    if sigma_max == 0.0 {
        return 0;
    }
    let tol = rows.max(cols) as f64 * f64::EPSILON * sigma_max;
    singular_values.iter().filter(|&&s| s > tol).count()
}
