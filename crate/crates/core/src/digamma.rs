//! Complex digamma function.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// B_{2k} / (2k) for k = 1..8.
const ASYMPTOTIC: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
];

/// Below this modulus the argument is shifted up by the recurrence.
const SHIFT_RADIUS: f64 = 16.0;

/// `psi(z) = d ln Gamma(z) / dz`.
///
/// Reflection for `Re z < 1/2`, upward recurrence `psi(z) = psi(z + 1) - 1/z`
/// until `|z| >= 16`, then the Stirling series through `B_16`.
pub fn digamma(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::InvalidParameter(format!("digamma of non-finite {z}")));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(Error::DigammaPole { re: z.re, im: z.im });
    }
    if z.re < 0.5 {
        // psi(z) = psi(1 - z) - pi cot(pi z)
        let pz = PI * z;
        let cot = pz.cos() / pz.sin();
        return Ok(digamma(Complex64::new(1.0, 0.0) - z)? - PI * cot);
    }
    let mut w = z;
    let mut acc = Complex64::new(0.0, 0.0);
    while w.norm() < SHIFT_RADIUS {
        acc += w.inv();
        w += 1.0;
    }
    Ok(asymptotic(w) - acc)
}

/// Stirling series, accurate to double precision for `|z| >= 16`, `Re z > 0`.
pub(crate) fn asymptotic(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv2;
    for c in ASYMPTOTIC {
        series += c * p;
        p *= inv2;
    }
    z.ln() - 0.5 * inv - series
}

/// `coth x` through `1/x + (1/(i pi)) [psi(1 + ix/pi) - psi(1 - ix/pi)]`.
pub fn coth_via_digamma(x: f64) -> Result<f64> {
    let w = Complex64::new(1.0, x / PI);
    let diff = digamma(w)? - digamma(w.conj())?;
    let v = diff / Complex64::new(0.0, PI);
    Ok(1.0 / x + v.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082;

    #[test]
    fn psi_one_is_minus_euler_gamma() {
        let v = digamma(Complex64::new(1.0, 0.0)).unwrap();
        assert!((v.re + EULER_GAMMA).abs() < 1e-15);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn known_values() {
        // psi(1/2) = -gamma - 2 ln 2 ; Im psi(1 + i y) = -1/(2y) + (pi/2) coth(pi y)
        let half = digamma(Complex64::new(0.5, 0.0)).unwrap();
        assert!((half.re - (-EULER_GAMMA - 2.0 * 2f64.ln())).abs() < 1e-14);
        for y in [0.1, 1.0, 3.7, 40.0] {
            let v = digamma(Complex64::new(1.0, y)).unwrap();
            let im = -0.5 / y + 0.5 * PI / (PI * y).tanh();
            assert!((v.im - im).abs() < 1e-13 * im.abs());
        }
    }

    #[test]
    fn recurrence_identity() {
        for (re, im) in [(0.3, 0.2), (1.0, 5.0), (2.5, -7.1), (20.0, 0.4), (-3.5, 1.0)] {
            let z = Complex64::new(re, im);
            let lhs = digamma(z + 1.0).unwrap() - digamma(z).unwrap();
            assert!((lhs - z.inv()).norm() < 1e-13 * z.inv().norm().max(1.0));
        }
    }

    #[test]
    fn poles_rejected() {
        for n in [0.0, -1.0, -7.0] {
            assert!(matches!(
                digamma(Complex64::new(n, 0.0)),
                Err(Error::DigammaPole { .. })
            ));
        }
        assert!(digamma(Complex64::new(-1.0, 1e-3)).is_ok());
    }

    #[test]
    fn coth_identity() {
        for x in [1e-3, 0.1, 0.5, 1.0, 2.0, 7.5, 30.0, 200.0] {
            let c = coth_via_digamma(x).unwrap();
            let exact = 1.0 / x.tanh();
            assert!((c - exact).abs() <= 1e-12 * exact, "x={x}: {c} vs {exact}");
        }
    }
}
