//! Small dense helpers on top of nalgebra. Every marginal dimension we care
//! about is tiny (d <= 8), so everything here is direct.

use nalgebra::{DMatrix, DVector};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Counterclockwise rotation of the plane by `theta`.
pub fn rotation(theta: f64) -> Matrix {
    let (s, c) = theta.sin_cos();
    Matrix::from_row_slice(2, 2, &[c, -s, s, c])
}

pub fn vector(entries: &[f64]) -> Vector {
    Vector::from_column_slice(entries)
}

pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Option<Matrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return None;
    }
    Some(Matrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

pub fn matrix_to_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Largest absolute entry of `m - mᵀ`.
pub fn asymmetry(m: &Matrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    (&(m - m.transpose())).amax()
}

/// Smallest eigenvalue of the symmetric part of `m`.
pub fn min_sym_eigenvalue(m: &Matrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let sym = (m + m.transpose()) * 0.5;
    sym.symmetric_eigenvalues().min()
}

/// (smallest, largest) singular values.
pub fn singular_range(m: &Matrix) -> (f64, f64) {
    if m.nrows() == 0 || m.ncols() == 0 {
        return (0.0, 0.0);
    }
    let sv = m.singular_values();
    (sv.min(), sv.max())
}

/// Scale-free invertibility test: smallest singular value above `rel_tol`
/// times the largest one.
pub fn is_invertible(m: &Matrix, rel_tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let (lo, hi) = singular_range(m);
    hi > 0.0 && lo > rel_tol * hi
}

pub fn all_finite(m: &Matrix) -> bool {
    m.iter().all(|v| v.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rotation_quarter_turn() {
        let r = rotation(PI / 2.0);
        let v = &r * vector(&[1.0, 0.0]);
        assert!((v[0]).abs() < 1e-15);
        assert!((v[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn singular_values_of_scaled_rotation() {
        let m = rotation(0.3) * 2.5;
        let (lo, hi) = singular_range(&m);
        assert!((lo - 2.5).abs() < 1e-12 && (hi - 2.5).abs() < 1e-12);
        assert!(is_invertible(&m, 1e-9));
        assert!(!is_invertible(&Matrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]), 1e-9));
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(matrix_from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_none());
    }
}
