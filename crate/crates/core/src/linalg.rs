//! Small dense complex matrix helpers.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::{CMatrix, Error, Result, C64};

pub fn identity(d: usize) -> CMatrix {
    DMatrix::identity(d, d)
}

pub fn diag_phases(chi: &[f64]) -> CMatrix {
    let d = chi.len();
    let mut m = CMatrix::zeros(d, d);
    for (n, &c) in chi.iter().enumerate() {
        m[(n, n)] = C64::from_polar(1.0, c);
    }
    m
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// `Tr[a b]` without forming the product.
pub fn trace_of_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Frobenius norm of `U^dagger U - 1`.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    let d = u.nrows();
    frobenius(&(u.adjoint() * u - identity(d)))
}

pub fn ensure_unitary(u: &CMatrix, tolerance: f64) -> Result<()> {
    if !u.is_square() {
        return Err(Error::DimensionMismatch {
            expected: u.nrows(),
            got: u.ncols(),
            context: "unitary must be square",
        });
    }
    let residual = unitarity_residual(u);
    if residual > tolerance {
        return Err(Error::NotUnitary {
            residual,
            tolerance,
        });
    }
    Ok(())
}

/// Frobenius distance from Hermitian and traceless.
pub fn traceless_hermitian_residual(g: &CMatrix) -> f64 {
    let d = g.nrows();
    frobenius(&(g - g.adjoint())) + (trace(g) / d as f64).norm()
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..h.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(h.nrows(), h.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Largest absolute eigenvalue of a Hermitian matrix.
pub fn spectral_radius_hermitian(h: &CMatrix) -> f64 {
    if is_diagonal(h, 0.0) {
        return h.diagonal().iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    }
    let eig = SymmetricEigen::new(h.clone());
    eig.eigenvalues.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

pub fn is_diagonal(m: &CMatrix, tol: f64) -> bool {
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if r != c && m[(r, c)].norm() > tol {
                return false;
            }
        }
    }
    true
}

/// `exp(i tau G)` for Hermitian `G`, through its spectral decomposition.
pub fn exp_i_hermitian(values: &[f64], vectors: &CMatrix, tau: f64) -> CMatrix {
    let phases: Vec<f64> = values.iter().map(|v| v * tau).collect();
    vectors * diag_phases(&phases) * vectors.adjoint()
}

/// Wrap an angle into `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut y = x.rem_euclid(TAU);
    if y > PI {
        y -= TAU;
    }
    y
}
