//! Symmetric eigendecompositions accurate to rounding.
//!
//! nalgebra's `SymmetricEigen` can leave `V diag(l) V^T - A` around `1e-10 |A|`
//! when eigenvalues cluster; a few cyclic Jacobi sweeps on `V^T A V` remove that.

use nalgebra::{Complex, DMatrix, SMatrix, SVector, SymmetricEigen};

/// Eigenvalues (ascending) and matching orthonormal eigenvectors as columns.
pub fn symmetric_eigen<const N: usize>(a: &SMatrix<f64, N, N>) -> (SVector<f64, N>, SMatrix<f64, N, N>) {
    let a = (a + a.transpose()) * 0.5;
    let dense = DMatrix::from_fn(N, N, |i, j| a[(i, j)]);
    let start = SymmetricEigen::new(dense).eigenvectors;
    let mut v = SMatrix::<f64, N, N>::from_fn(|i, j| start[(i, j)]);
    let mut b = v.transpose() * a * v;
    let norm = b.amax();
    for _ in 0..10 {
        let mut off: f64 = 0.0;
        for p in 0..N {
            for q in p + 1..N {
                off = off.max(b[(p, q)].abs());
            }
        }
        if off <= 1e-3 * f64::EPSILON * norm {
            break;
        }
        for p in 0..N {
            for q in p + 1..N {
                let apq = b[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (b[(q, q)] - b[(p, p)]) / (2.0 * apq);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // B <- J^T B J, V <- V J with J = [[c, s], [-s, c]] on (p, q)
                for k in 0..N {
                    let (bkp, bkq) = (b[(k, p)], b[(k, q)]);
                    b[(k, p)] = c * bkp - s * bkq;
                    b[(k, q)] = s * bkp + c * bkq;
                }
                for k in 0..N {
                    let (bpk, bqk) = (b[(p, k)], b[(q, k)]);
                    b[(p, k)] = c * bpk - s * bqk;
                    b[(q, k)] = s * bpk + c * bqk;
                }
                for k in 0..N {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..N).collect();
    idx.sort_by(|&i, &j| b[(i, i)].total_cmp(&b[(j, j)]));
    let values = SVector::<f64, N>::from_fn(|i, _| b[(idx[i], idx[i])]);
    let vectors = SMatrix::<f64, N, N>::from_fn(|r, col| v[(r, idx[col])]);
    (values, vectors)
}

pub fn symmetric_eigenvalues<const N: usize>(a: &SMatrix<f64, N, N>) -> SVector<f64, N> {
    symmetric_eigen(a).0
}

/// Eigenvalues (ascending) of a 6x6 Hermitian matrix through its real 12x12
/// embedding `[[Re, -Im], [Im, Re]]`, which repeats each eigenvalue twice.
pub fn hermitian_eigenvalues6(h: &SMatrix<Complex<f64>, 6, 6>) -> [f64; 6] {
    let e = SMatrix::<f64, 12, 12>::from_fn(|i, j| {
        let z = h[(i % 6, j % 6)];
        match (i < 6, j < 6) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let ev = symmetric_eigenvalues(&e);
    std::array::from_fn(|k| 0.5 * (ev[2 * k] + ev[2 * k + 1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix3;

    #[test]
    fn reconstructs_clustered_spectrum() {
        let a = Matrix3::new(13.59, -0.032, 0.0, -0.032, 15.93, -0.032, 0.0, -0.032, 15.929_999);
        let (l, v) = symmetric_eigen(&a);
        let r = v * Matrix3::from_diagonal(&l) * v.transpose() - a;
        assert!(r.amax() < 1e-14 * a.amax());
        assert!((v.transpose() * v - Matrix3::identity()).amax() < 1e-15);
        assert!(l[0] <= l[1] && l[1] <= l[2]);
    }

    #[test]
    fn hermitian_embedding() {
        let mut h = SMatrix::<Complex<f64>, 6, 6>::identity();
        h[(0, 3)] = Complex::new(0.0, 0.5);
        h[(3, 0)] = Complex::new(0.0, -0.5);
        let ev = hermitian_eigenvalues6(&h);
        assert!((ev[0] - 0.5).abs() < 1e-15 && (ev[5] - 1.5).abs() < 1e-15);
        assert!(ev[1..5].iter().all(|x| (x - 1.0).abs() < 1e-15));
    }
}
