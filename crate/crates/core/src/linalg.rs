//! Small dense matrix helpers shared by the cocycle layers.
//!
//! Dimensions are tiny (d ≤ 8), so everything goes through `nalgebra`'s
//! dynamically sized matrices.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;

/// Invertibility floor for generator entries.
pub const DET_FLOOR: f64 = 1e-8;

pub fn identity(dim: usize) -> Matrix {
    Matrix::identity(dim, dim)
}

/// Operator norm induced by the Euclidean norm (largest singular value).
pub fn op_norm(m: &Matrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// `‖M‖·‖M⁻¹‖`, computed from the singular values in one pass.
pub fn condition_number(m: &Matrix) -> f64 {
    let sv = m.singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub fn inverse(m: &Matrix) -> Result<Matrix> {
    let det = m.determinant();
    if !det.is_finite() || det.abs() < DET_FLOOR {
        return Err(Error::InvalidGenerator(format!(
            "matrix is not invertible (|det| = {:e})",
            det.abs()
        )));
    }
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidGenerator("matrix inversion failed".into()))
}

/// Operator norm of `a - b`.
pub fn distance(a: &Matrix, b: &Matrix) -> f64 {
    op_norm(&(a - b))
}

/// `‖a - b‖ / ‖a‖`, falling back to the absolute gap when `a` vanishes.
pub fn relative_distance(a: &Matrix, b: &Matrix) -> f64 {
    let scale = op_norm(a);
    let gap = distance(a, b);
    if scale > 0.0 {
        gap / scale
    } else {
        gap
    }
}

/// Spectral radius from the complex eigenvalues.
pub fn spectral_radius(m: &Matrix) -> f64 {
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Smallest eigenvalue modulus.
pub fn smallest_eigen_modulus(m: &Matrix) -> f64 {
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(f64::INFINITY, f64::min)
}

pub fn max_abs_entry(m: &Matrix) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}
