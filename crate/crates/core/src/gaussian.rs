//! Gaussian-state primitives on 6x6 covariance matrices in `(x_L, x_C, x_R, p_L, p_C, p_R)` order.

use nalgebra::Matrix6;
use num_complex::Complex64;

use crate::covariance::CovarianceMatrix;
use crate::eigen;
use crate::error::{Error, Result};

/// Physical states satisfy `min eig(sigma + iK/2) >= -PHYSICALITY_TOL`.
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// `K = [[0, I], [-I, 0]]`.
pub fn symplectic_form() -> Matrix6<f64> {
    let mut k = Matrix6::zeros();
    for i in 0..3 {
        k[(i, i + 3)] = 1.0;
        k[(i + 3, i)] = -1.0;
    }
    k
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Physicality {
    pub valid: bool,
    /// Smallest eigenvalue of `sigma + iK/2`.
    pub margin: f64,
}

fn hermitian_eigenvalues(h: Matrix6<Complex64>) -> [f64; 6] {
    eigen::hermitian_eigenvalues6(&h)
}

/// Uncertainty-principle check: smallest eigenvalue of `sigma + iK/2`.
pub fn physicality(sigma: &CovarianceMatrix) -> Physicality {
    physicality_of(sigma.matrix())
}

pub(crate) fn physicality_of(m: &Matrix6<f64>) -> Physicality {
    let k = symplectic_form();
    let h = Matrix6::from_fn(|i, j| Complex64::new(m[(i, j)], 0.5 * k[(i, j)]));
    let margin = hermitian_eigenvalues(h)[0];
    Physicality {
        valid: margin >= -PHYSICALITY_TOL,
        margin,
    }
}

/// Flips the sign of the momentum of `mode` (row and column `3 + mode`).
pub fn partial_transpose(sigma: &Matrix6<f64>, mode: usize) -> Matrix6<f64> {
    assert!(mode < 3, "mode index out of range");
    let mut m = *sigma;
    let p = mode + 3;
    for j in 0..6 {
        if j != p {
            m[(p, j)] = -m[(p, j)];
            m[(j, p)] = -m[(j, p)];
        }
    }
    m
}

/// Symplectic eigenvalues (ascending) of a symmetric positive-definite matrix,
/// the moduli of the eigenvalues of `iK sigma`.
pub fn symplectic_eigenvalues(sigma: &Matrix6<f64>) -> Result<[f64; 3]> {
    let (values, vectors) = eigen::symmetric_eigen(sigma);
    let min = values.min();
    if !(min > 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    // sigma^{1/2} (iK) sigma^{1/2} is Hermitian with spectrum {+-nu_j}
    let sqrt = vectors * Matrix6::from_diagonal(&values.map(f64::sqrt)) * vectors.transpose();
    let k = symplectic_form();
    let s = sqrt * k * sqrt;
    let h = s.map(|x| Complex64::new(0.0, x));
    let ev = hermitian_eigenvalues(h);
    Ok([ev[3], ev[4], ev[5]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix2;

    fn two_mode_squeezed_plus_vacuum(r: f64) -> Matrix6<f64> {
        // modes L and C squeezed together, R in vacuum
        let (c, s) = ((2.0 * r).cosh() / 2.0, (2.0 * r).sinh() / 2.0);
        let mut m = Matrix6::identity() * 0.5;
        m[(0, 0)] = c;
        m[(1, 1)] = c;
        m[(3, 3)] = c;
        m[(4, 4)] = c;
        m[(0, 1)] = s;
        m[(1, 0)] = s;
        m[(3, 4)] = -s;
        m[(4, 3)] = -s;
        m
    }

    #[test]
    fn vacuum_is_physical_with_zero_margin() {
        let p = physicality(&CovarianceMatrix::vacuum());
        assert!(p.valid);
        assert!(p.margin.abs() < 1e-14);
    }

    #[test]
    fn subvacuum_is_unphysical() {
        let s = CovarianceMatrix::from_matrix(Matrix6::identity() * 0.25).unwrap();
        assert!(!physicality(&s).valid);
    }

    #[test]
    fn partial_transpose_properties() {
        let m = two_mode_squeezed_plus_vacuum(0.4);
        for mode in 0..3 {
            let t = partial_transpose(&m, mode);
            assert_eq!(partial_transpose(&t, mode), m);
            assert!((t.determinant() - m.determinant()).abs() < 1e-14);
        }
        let d = Matrix6::from_diagonal(&nalgebra::Vector6::new(1.0, 2.0, 3.0, 4.0, 5.0, 6.0));
        assert_eq!(partial_transpose(&d, 1), d);
    }

    #[test]
    fn vacuum_symplectic_spectrum() {
        let nu = symplectic_eigenvalues(&(Matrix6::identity() * 0.5)).unwrap();
        for v in nu {
            assert!((v - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn thermal_mode_symplectic_eigenvalue() {
        // diagonal oracle: <x^2> = <p^2> = n + 1/2 gives nu = n + 1/2
        let n = 1.7;
        let th = Matrix2::identity() * (n + 0.5);
        let vac = Matrix2::identity() * 0.5;
        let s = CovarianceMatrix::product([vac, th, vac]);
        let nu = symplectic_eigenvalues(s.matrix()).unwrap();
        assert!((nu[0] - 0.5).abs() < 1e-13);
        assert!((nu[1] - 0.5).abs() < 1e-13);
        assert!((nu[2] - (n + 0.5)).abs() < 1e-13);
        // squeezed single mode keeps nu = sqrt(det)
        let sq = Matrix2::new(3.0, 0.5, 0.5, 0.4);
        let s = CovarianceMatrix::product([sq, vac, vac]);
        let nu = symplectic_eigenvalues(s.matrix()).unwrap();
        assert!((nu[2] - sq.determinant().sqrt()).abs() < 1e-13);
    }

    #[test]
    fn two_mode_squeezed_partial_transpose() {
        // analytic oracle: PT eigenvalues e^{-2r}/2, e^{2r}/2, 1/2
        let r = 0.8;
        let m = two_mode_squeezed_plus_vacuum(r);
        let nu = symplectic_eigenvalues(&partial_transpose(&m, 0)).unwrap();
        assert!((nu[0] - (-2.0 * r).exp() / 2.0).abs() < 1e-12);
        assert!((nu[1] - 0.5).abs() < 1e-12);
        assert!((nu[2] - (2.0 * r).exp() / 2.0).abs() < 1e-12);
        let nu = symplectic_eigenvalues(&partial_transpose(&m, 2)).unwrap();
        assert!((nu[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_indefinite() {
        let mut m = Matrix6::identity();
        m[(2, 2)] = -1.0;
        assert_eq!(symplectic_eigenvalues(&m), Err(Error::NotPositiveDefinite));
    }
}
