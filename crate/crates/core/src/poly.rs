//! Dense complex polynomials in one variable, coefficients in ascending order.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    /// Trailing exact zeros are dropped; the zero polynomial has no coefficients.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, c)| c * n as f64)
                .collect(),
        )
    }

    /// `p^#(z) = conj(p(conj z))`: the polynomial with conjugated coefficients.
    pub fn conj_coeffs(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Roots from the eigenvalues of the balanced companion matrix,
    /// each refined by Newton iteration on the original polynomial.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        let n = self.degree();
        if self.is_zero() || n == 0 {
            return Ok(Vec::new());
        }
        let lead = self.leading();
        let raw: Vec<Complex64> = if n == 1 {
            vec![-self.coeffs[0] / lead]
        } else {
            let mut c = DMatrix::<Complex64>::zeros(n, n);
            for i in 1..n {
                c[(i, i - 1)] = Complex64::new(1.0, 0.0);
            }
            for i in 0..n {
                c[(i, n - 1)] = -self.coeffs[i] / lead;
            }
            balance(&mut c);
            let ev = c.eigenvalues().ok_or_else(|| {
                Error::RootFinding("companion matrix eigensolver did not converge".into())
            })?;
            ev.iter().copied().collect()
        };
        Ok(raw.into_iter().map(|z| self.polish(z)).collect())
    }

    /// Newton refinement; keeps the best iterate by residual.
    pub fn polish(&self, z0: Complex64) -> Complex64 {
        let d = self.derivative();
        let mut best = z0;
        let mut best_res = self.eval(z0).norm();
        let mut z = z0;
        for _ in 0..8 {
            let dp = d.eval(z);
            if dp.norm() == 0.0 {
                break;
            }
            z -= self.eval(z) / dp;
            let r = self.eval(z).norm();
            if !(r < best_res) {
                break;
            }
            best = z;
            best_res = r;
        }
        best
    }
}

/// Parlett-Reinsch diagonal similarity scaling by powers of two.
fn balance(m: &mut DMatrix<Complex64>) {
    let n = m.nrows();
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..n {
                if j != i {
                    col += m[(j, i)].l1_norm();
                    row += m[(i, j)].l1_norm();
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let mut f = 1.0;
            let s = col + row;
            let (mut c, mut r) = (col, row);
            while c < r / 2.0 {
                c *= 2.0;
                r /= 2.0;
                f *= 2.0;
            }
            while c >= r * 2.0 {
                c /= 2.0;
                r *= 2.0;
                f /= 2.0;
            }
            if (c + r) < 0.95 * s {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn arithmetic() {
        let p = Poly::from_real(&[1.0, 2.0]);
        let q = Poly::new(vec![c(0.0, 1.0), c(0.0, 0.0), c(3.0, 0.0)]);
        let pq = &p * &q;
        let z = c(0.3, -1.2);
        assert!((pq.eval(z) - p.eval(z) * q.eval(z)).norm() < 1e-14);
        assert!(((&p + &q).eval(z) - p.eval(z) - q.eval(z)).norm() < 1e-14);
        assert!(((&p - &p).is_zero()));
        assert_eq!(q.derivative(), Poly::new(vec![c(0.0, 0.0), c(6.0, 0.0)]));
        assert!((q.conj_coeffs().eval(z) - q.eval(z.conj()).conj()).norm() < 1e-14);
    }

    #[test]
    fn roots_of_known_product() {
        let want = [c(1.0, -0.5), c(-2.0, 0.1), c(0.0, -50.0), c(0.3, 0.0)];
        let mut p = Poly::constant(c(0.0, -1.0));
        for r in want {
            p = &p * &Poly::new(vec![-r, c(1.0, 0.0)]);
        }
        let got = p.roots().unwrap();
        assert_eq!(got.len(), 4);
        for r in want {
            let d = got.iter().map(|g| (g - r).norm()).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-12 * r.norm().max(1.0), "{r}: {d}");
        }
    }

    #[test]
    fn linear_and_constant() {
        assert!(Poly::constant(c(2.0, 0.0)).roots().unwrap().is_empty());
        let r = Poly::from_real(&[3.0, 2.0]).roots().unwrap();
        assert_eq!(r, vec![c(-1.5, 0.0)]);
    }
}
