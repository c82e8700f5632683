use nalgebra::{Matrix2, Matrix3, Matrix6};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian;

/// Stationary second moments in block layout `[[C_XX, C_XP], [C_PX, C_PP]]`:
/// rows/columns `0..3` are `x_L, x_C, x_R`, `3..6` are `p_L, p_C, p_R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "CovarianceRows", try_from = "CovarianceRows")]
pub struct CovarianceMatrix {
    matrix: Matrix6<f64>,
}

impl CovarianceMatrix {
    /// Assembles `sigma` with `C_PX = C_XP^T`; `xx` and `pp` are symmetrised.
    pub fn from_blocks(xx: Matrix3<f64>, xp: Matrix3<f64>, pp: Matrix3<f64>) -> Self {
        let mut m = Matrix6::zeros();
        let xx = 0.5 * (xx + xx.transpose());
        let pp = 0.5 * (pp + pp.transpose());
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&xx);
        m.fixed_view_mut::<3, 3>(0, 3).copy_from(&xp);
        m.fixed_view_mut::<3, 3>(3, 0).copy_from(&xp.transpose());
        m.fixed_view_mut::<3, 3>(3, 3).copy_from(&pp);
        Self { matrix: m }
    }

    /// Accepts a symmetric 6x6 matrix (asymmetry up to `1e-12` relative is averaged out).
    pub fn from_matrix(m: Matrix6<f64>) -> Result<Self> {
        let scale = m.amax().max(f64::MIN_POSITIVE);
        if (m - m.transpose()).amax() > 1e-12 * scale || m.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(
                "covariance matrix must be finite and symmetric".into(),
            ));
        }
        Ok(Self {
            matrix: 0.5 * (m + m.transpose()),
        })
    }

    /// Product of three vacua, `I/2`.
    pub fn vacuum() -> Self {
        Self {
            matrix: Matrix6::identity() * 0.5,
        }
    }

    /// Product of single-mode covariance matrices given in `(x, p)` order.
    pub fn product(modes: [Matrix2<f64>; 3]) -> Self {
        let mut m = Matrix6::zeros();
        for (a, g) in modes.iter().enumerate() {
            m[(a, a)] = g[(0, 0)];
            m[(a, a + 3)] = g[(0, 1)];
            m[(a + 3, a)] = g[(1, 0)];
            m[(a + 3, a + 3)] = g[(1, 1)];
        }
        Self { matrix: m }
    }

    pub fn matrix(&self) -> &Matrix6<f64> {
        &self.matrix
    }

    pub fn xx(&self) -> Matrix3<f64> {
        self.matrix.fixed_view::<3, 3>(0, 0).into_owned()
    }

    pub fn xp(&self) -> Matrix3<f64> {
        self.matrix.fixed_view::<3, 3>(0, 3).into_owned()
    }

    pub fn px(&self) -> Matrix3<f64> {
        self.matrix.fixed_view::<3, 3>(3, 0).into_owned()
    }

    pub fn pp(&self) -> Matrix3<f64> {
        self.matrix.fixed_view::<3, 3>(3, 3).into_owned()
    }

    /// Reduced `(x_a, p_a)` covariance of a single mode.
    pub fn mode(&self, a: usize) -> Matrix2<f64> {
        let m = &self.matrix;
        Matrix2::new(m[(a, a)], m[(a, a + 3)], m[(a + 3, a)], m[(a + 3, a + 3)])
    }

    /// Relabels modes: mode `a` of the result is mode `perm[a]` of `self`.
    pub fn permuted(&self, perm: [usize; 3]) -> Self {
        let idx = |i: usize| if i < 3 { perm[i] } else { perm[i - 3] + 3 };
        Self {
            matrix: Matrix6::from_fn(|i, j| self.matrix[(idx(i), idx(j))]),
        }
    }

    /// Exchanges the left and right modes.
    pub fn mirrored(&self) -> Self {
        self.permuted([2, 1, 0])
    }

    /// Largest entrywise deviation, each entry normalised by `max(abs, rel * |other|)`.
    /// Values `<= 1` mean agreement within the combined tolerance.
    pub fn deviation(&self, other: &CovarianceMatrix, abs: f64, rel: f64) -> f64 {
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).abs() / abs.max(rel * b.abs()))
            .fold(0.0, f64::max)
    }

    /// Largest relative entrywise difference `|a - b| / max(|b|, floor)`.
    pub fn max_relative_difference(&self, other: &CovarianceMatrix, floor: f64) -> f64 {
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).abs() / b.abs().max(floor))
            .fold(0.0, f64::max)
    }

    /// Checks every invariant a stationary covariance matrix must satisfy:
    /// symmetry, `sigma + iK/2 >= 0` down to `-1e-9`, and a vanishing diagonal of `C_XP`.
    pub fn check_invariants(&self) -> Result<()> {
        let phys = gaussian::physicality(self);
        if !phys.valid {
            return Err(Error::Unphysical {
                margin: phys.margin,
            });
        }
        let scale = self.matrix.amax().max(1.0);
        let xp = self.xp();
        for a in 0..3 {
            if xp[(a, a)].abs() >= 1e-8 * scale {
                return Err(Error::Precondition(format!(
                    "diagonal of C_XP does not vanish: {:e}",
                    xp[(a, a)]
                )));
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CovarianceRows {
    rows: Vec<Vec<f64>>,
}

impl From<CovarianceMatrix> for CovarianceRows {
    fn from(c: CovarianceMatrix) -> Self {
        Self {
            rows: (0..6)
                .map(|i| (0..6).map(|j| c.matrix[(i, j)]).collect())
                .collect(),
        }
    }
}

impl TryFrom<CovarianceRows> for CovarianceMatrix {
    type Error = Error;
    fn try_from(r: CovarianceRows) -> Result<Self> {
        if r.rows.len() != 6 || r.rows.iter().any(|row| row.len() != 6) {
            return Err(Error::InvalidParameter("covariance must be 6x6".into()));
        }
        CovarianceMatrix::from_matrix(Matrix6::from_fn(|i, j| r.rows[i][j]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_roundtrip() {
        let xx = Matrix3::new(1.0, 0.1, 0.0, 0.1, 2.0, 0.2, 0.0, 0.2, 3.0);
        let pp = Matrix3::identity() * 4.0;
        let xp = Matrix3::new(0.0, 0.3, 0.0, -0.3, 0.0, 0.1, 0.0, -0.1, 0.0);
        let c = CovarianceMatrix::from_blocks(xx, xp, pp);
        assert_eq!(c.xx(), xx);
        assert_eq!(c.pp(), pp);
        assert_eq!(c.xp(), xp);
        assert_eq!(c.px(), xp.transpose());
        assert_eq!(c.matrix(), &c.matrix().transpose());
        assert_eq!(c.mode(1), Matrix2::new(2.0, 0.0, 0.0, 4.0));
    }

    #[test]
    fn mirror_is_involution() {
        let c = CovarianceMatrix::from_matrix(Matrix6::from_fn(|i, j| 1.0 / (1.0 + i as f64 + j as f64))).unwrap();
        assert_eq!(c.mirrored().mirrored(), c);
        assert_eq!(c.mirrored().matrix()[(0, 0)], c.matrix()[(2, 2)]);
        assert_eq!(c.mirrored().matrix()[(3, 4)], c.matrix()[(5, 4)]);
    }

    #[test]
    fn rejects_asymmetric() {
        let mut m = Matrix6::identity();
        m[(0, 1)] = 0.3;
        assert!(CovarianceMatrix::from_matrix(m).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let c = CovarianceMatrix::vacuum();
        let s = serde_json::to_string(&c).unwrap();
        let back: CovarianceMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn invariants_of_vacuum_and_subvacuum() {
        assert!(CovarianceMatrix::vacuum().check_invariants().is_ok());
        let sub = CovarianceMatrix::from_matrix(Matrix6::identity() * 0.25).unwrap();
        assert!(matches!(sub.check_invariants(), Err(Error::Unphysical { .. })));
    }
}
