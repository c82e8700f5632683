//! Physical parameters of the three-oscillator chain and its baths, together
//! with the frequency-domain building blocks shared by both covariance
//! engines.
//!
//! Everything is expressed in natural units `hbar = k_B = m = 1` with the
//! reference frequency `Omega` as the unit of frequency. The public
//! constructors take the dimensionless ratios used on the phase-diagram
//! axes: `k/(m Omega^2)`, `gamma/Omega`, `omega_c/Omega`,
//! `2 k_B T/(hbar Omega)` and `delta/Omega`.
//!
//! # Susceptibility sign
//!
//! The Drude memory kernel `chi(t) = Theta(t) hbar m gamma omega_c^2 exp(-omega_c t)`
//! has the Fourier transform (convention `f(omega) = int dt e^{i omega t} f(t)`)
//!
//! ```text
//! chi(omega) = m hbar gamma omega_c^2 / (omega_c - i omega)
//! ```
//!
//! which is analytic in the upper half plane, satisfies
//! `Im chi(omega) / hbar = J(omega)` for `omega > 0`, and whose static value
//! `Re chi(0) / hbar = gamma omega_c = 2 m DeltaOmega` exactly cancels the
//! counter-term in the effective potential. This is the default
//! ([`SusceptibilityConvention::Causal`]). The opposite overall sign,
//! `m hbar gamma omega_c^2 / (i omega - omega_c)`, is kept as
//! [`SusceptibilityConvention::Reversed`] only so that its consequences can be
//! demonstrated: it doubles the static renormalisation instead of cancelling
//! it and moves the poles of the response function into the upper half plane.

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen;
use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};

/// Natural units used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitsConvention {
    /// Reference frequency `Omega`; sets the unit of frequency.
    pub omega_ref: f64,
}

impl UnitsConvention {
    pub const HBAR: f64 = 1.0;
    pub const K_B: f64 = 1.0;
    pub const MASS: f64 = 1.0;

    pub fn natural() -> Self {
        Self { omega_ref: 1.0 }
    }

    pub fn frequency(&self, ratio: f64) -> f64 {
        ratio * self.omega_ref
    }

    pub fn coupling(&self, ratio: f64) -> f64 {
        ratio * Self::MASS * self.omega_ref * self.omega_ref
    }

    /// Temperature from `2 k_B T / (hbar Omega)`.
    pub fn temperature(&self, ratio: f64) -> f64 {
        ratio * Self::HBAR * self.omega_ref / (2.0 * Self::K_B)
    }

    /// Inverse of [`UnitsConvention::temperature`].
    pub fn temperature_ratio(&self, temperature: f64) -> f64 {
        2.0 * Self::K_B * temperature / (Self::HBAR * self.omega_ref)
    }
}

impl Default for UnitsConvention {
    fn default() -> Self {
        Self::natural()
    }
}

/// Open-chain nearest-neighbour interaction matrix.
pub fn interaction_matrix(k: f64) -> Result<Matrix3<f64>> {
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "coupling must be finite and non-negative, got {k}"
        )));
    }
    Ok(Matrix3::new(k, -k, 0.0, -k, 2.0 * k, -k, 0.0, -k, k))
}

/// Ohmic spectral density with Lorentz-Drude cutoff, `m gamma omega / (1 + omega^2/omega_c^2)`.
pub fn spectral_density(omega: f64, gamma: f64, cutoff: f64) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "spectral density is defined for omega >= 0, got {omega}"
        )));
    }
    Ok(drude(omega, gamma, cutoff))
}

#[inline]
fn drude(omega: f64, gamma: f64, cutoff: f64) -> f64 {
    UnitsConvention::MASS * gamma * omega / (1.0 + omega * omega / (cutoff * cutoff))
}

/// Renormalisation shift `DeltaOmega = gamma omega_c / 2` (units of frequency squared).
pub fn frequency_shift(gamma: f64, cutoff: f64) -> f64 {
    0.5 * gamma * cutoff
}

/// `DeltaOmega` by direct quadrature of `(1/(pi m)) int_0^inf J(omega)/omega d omega`.
pub fn frequency_shift_numeric(gamma: f64, cutoff: f64, tol: Tolerance) -> Result<f64> {
    let f = |w: f64| gamma / (1.0 + w * w / (cutoff * cutoff));
    let v = quadrature::integrate_to_infinity(f, 0.0, &[cutoff], tol, 2000)?;
    Ok(v / std::f64::consts::PI)
}

/// Sign convention of the Fourier-transformed susceptibility.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SusceptibilityConvention {
    /// `m hbar gamma omega_c^2 / (omega_c - i omega)`.
    #[default]
    Causal,
    /// `m hbar gamma omega_c^2 / (i omega - omega_c)`.
    Reversed,
}

impl SusceptibilityConvention {
    pub fn evaluate(self, omega: f64, gamma: f64, cutoff: f64) -> Complex64 {
        let chi = susceptibility_ft(omega, gamma, cutoff);
        match self {
            SusceptibilityConvention::Causal => chi,
            SusceptibilityConvention::Reversed => -chi,
        }
    }
}

/// Fourier transform of the Drude memory kernel, `m hbar gamma omega_c^2 / (omega_c - i omega)`.
pub fn susceptibility_ft(omega: f64, gamma: f64, cutoff: f64) -> Complex64 {
    let num = UnitsConvention::MASS * UnitsConvention::HBAR * gamma * cutoff * cutoff;
    num / Complex64::new(cutoff, -omega)
}

/// `x coth x`, finite at the origin.
#[inline]
pub(crate) fn x_coth_x(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1e-5 {
        1.0 + ax * ax / 3.0
    } else if ax > 20.0 {
        ax
    } else {
        ax / ax.tanh()
    }
}

/// Symmetrised noise power spectrum `J(|omega|) coth(hbar |omega| / 2 k_B T)`.
///
/// Even in `omega`. At `T = 0` it reduces to `J(|omega|)`; at `omega = 0` it
/// takes the finite limit `2 k_B T m gamma / hbar`.
pub fn power_spectrum(omega: f64, temperature: f64, gamma: f64, cutoff: f64) -> f64 {
    let w = omega.abs();
    if temperature <= 0.0 {
        return drude(w, gamma, cutoff);
    }
    // J(w) coth(w/2T) = m gamma / (1 + w^2/wc^2) * (2T) * x coth x,  x = w/2T
    let x = UnitsConvention::HBAR * w / (2.0 * UnitsConvention::K_B * temperature);
    let lorentz = 1.0 / (1.0 + w * w / (cutoff * cutoff));
    UnitsConvention::MASS * gamma * lorentz * (2.0 * UnitsConvention::K_B * temperature / UnitsConvention::HBAR)
        * x_coth_x(x)
}

/// Bare frequencies, coupling and interaction matrix of the chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    /// `omega_L, omega_C, omega_R`.
    pub frequencies: [f64; 3],
    pub coupling: f64,
    pub interaction: Matrix3<f64>,
}

impl ChainParams {
    pub fn new(frequencies: [f64; 3], coupling: f64) -> Result<Self> {
        for (i, w) in frequencies.iter().enumerate() {
            if !(*w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "frequency {} must be positive, got {w}",
                    crate::MODE_LABELS[i]
                )));
            }
        }
        let interaction = interaction_matrix(coupling)?;
        Ok(Self {
            frequencies,
            coupling,
            interaction,
        })
    }

    /// All three modes at `Omega = 1`.
    pub fn resonant(coupling: f64) -> Result<Self> {
        Self::new([1.0; 3], coupling)
    }

    /// Outer modes at `Omega`, central mode at `Omega + delta`.
    pub fn center_detuned(coupling: f64, delta: f64) -> Result<Self> {
        Self::new([1.0, 1.0 + delta, 1.0], coupling)
    }

    /// `m omega_alpha^2 delta_ab + V_ab`: the stiffness seen by the bare chain.
    pub fn bare_stiffness(&self) -> Matrix3<f64> {
        let mut s = self.interaction;
        for i in 0..3 {
            s[(i, i)] += UnitsConvention::MASS * self.frequencies[i].powi(2);
        }
        s
    }

    /// Normal-mode frequencies of the isolated chain, ascending.
    pub fn normal_mode_frequencies(&self) -> [f64; 3] {
        let ev = eigen::symmetric_eigenvalues(&(self.bare_stiffness() / UnitsConvention::MASS));
        let mut w: Vec<f64> = ev.iter().map(|l| l.max(0.0).sqrt()).collect();
        w.sort_by(|a, b| a.total_cmp(b));
        [w[0], w[1], w[2]]
    }

    /// Chain with left and right modes exchanged.
    pub fn mirrored(&self) -> Self {
        let f = self.frequencies;
        Self {
            frequencies: [f[2], f[1], f[0]],
            coupling: self.coupling,
            interaction: self.interaction,
        }
    }
}

/// Temperatures, dissipation rate and cutoff of the three local baths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BathParams {
    /// `T_L, T_C, T_R`.
    pub temperatures: [f64; 3],
    pub gamma: f64,
    pub cutoff: f64,
    #[serde(default)]
    pub convention: SusceptibilityConvention,
}

impl BathParams {
    pub fn new(temperatures: [f64; 3], gamma: f64, cutoff: f64) -> Result<Self> {
        for (i, t) in temperatures.iter().enumerate() {
            if !(*t >= 0.0) || !t.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "temperature {} must be finite and non-negative, got {t}",
                    crate::MODE_LABELS[i]
                )));
            }
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "dissipation rate must be positive, got {gamma}"
            )));
        }
        if !(cutoff > 0.0) || !cutoff.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "cutoff must be positive, got {cutoff}"
            )));
        }
        Ok(Self {
            temperatures,
            gamma,
            cutoff,
            convention: SusceptibilityConvention::Causal,
        })
    }

    /// `T_C = T`, `T_L = T + dT/2`, `T_R = T - dT/2`; requires `|dT| < 2T`.
    pub fn with_gradient(temperature: f64, delta_t: f64, gamma: f64, cutoff: f64) -> Result<Self> {
        if !(temperature > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mean temperature must be positive, got {temperature}"
            )));
        }
        if !(delta_t.abs() < 2.0 * temperature) {
            return Err(Error::InvalidParameter(format!(
                "temperature difference must satisfy |dT| < 2T, got dT = {delta_t}, T = {temperature}"
            )));
        }
        Self::new(
            [
                temperature + 0.5 * delta_t,
                temperature,
                temperature - 0.5 * delta_t,
            ],
            gamma,
            cutoff,
        )
    }

    pub fn equal(temperature: f64, gamma: f64, cutoff: f64) -> Result<Self> {
        Self::new([temperature; 3], gamma, cutoff)
    }

    pub fn with_convention(mut self, convention: SusceptibilityConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn mirrored(&self) -> Self {
        let t = self.temperatures;
        Self {
            temperatures: [t[2], t[1], t[0]],
            ..self.clone()
        }
    }

    pub fn frequency_shift(&self) -> f64 {
        frequency_shift(self.gamma, self.cutoff)
    }

    pub fn susceptibility(&self, omega: f64) -> Complex64 {
        self.convention.evaluate(omega, self.gamma, self.cutoff)
    }

    /// `Gamma_alpha(omega)` for the three baths.
    pub fn power_spectra(&self, omega: f64) -> [f64; 3] {
        self.temperatures
            .map(|t| power_spectrum(omega, t, self.gamma, self.cutoff))
    }

    pub fn spectral_density(&self, omega: f64) -> f64 {
        drude(omega.abs(), self.gamma, self.cutoff)
    }
}

/// `phi_ab = m omega_a^2 delta_ab + V_ab + 2 m DeltaOmega delta_ab`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectivePotential {
    pub matrix: Matrix3<f64>,
    pub shift: f64,
}

impl EffectivePotential {
    pub fn new(chain: &ChainParams, bath: &BathParams) -> Result<Self> {
        let shift = bath.frequency_shift();
        let mut matrix = chain.bare_stiffness();
        for i in 0..3 {
            matrix[(i, i)] += 2.0 * UnitsConvention::MASS * shift;
        }
        let min_eigenvalue = eigen::symmetric_eigenvalues(&matrix).min();
        if !(min_eigenvalue > 0.0) {
            return Err(Error::NonConfiningPotential { min_eigenvalue });
        }
        Ok(Self { matrix, shift })
    }
}

/// Chain, baths and the derived effective potential, validated together.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub chain: ChainParams,
    pub bath: BathParams,
    pub potential: EffectivePotential,
}

impl Model {
    pub fn new(chain: ChainParams, bath: BathParams) -> Result<Self> {
        let potential = EffectivePotential::new(&chain, &bath)?;
        Ok(Self {
            chain,
            bath,
            potential,
        })
    }

    /// Builds a model from the dimensionless figure-axis ratios.
    pub fn from_ratios(r: &RatioParams) -> Result<Self> {
        let u = UnitsConvention::natural();
        let chain = ChainParams::new(r.frequencies.map(|w| u.frequency(w)), u.coupling(r.coupling))?;
        let bath = BathParams::with_gradient(
            u.temperature(r.temperature),
            u.temperature(r.delta_temperature),
            u.frequency(r.gamma),
            u.frequency(r.cutoff),
        )?;
        Self::new(chain, bath)
    }

    /// Inverse response function `alpha^{-1}(omega) = -(omega^2 M - phi + chi(omega)/hbar)`.
    pub fn inverse_response(&self, omega: f64) -> Matrix3<Complex64> {
        let chi = self.bath.susceptibility(omega) / UnitsConvention::HBAR;
        let diag = Complex64::new(UnitsConvention::MASS * omega * omega, 0.0) + chi;
        let mut m = self.potential.matrix.map(|x| Complex64::new(x, 0.0));
        for i in 0..3 {
            m[(i, i)] -= diag;
        }
        m
    }

    /// `alpha(omega)`.
    pub fn response_matrix(&self, omega: f64) -> Result<Matrix3<Complex64>> {
        let inv = self.inverse_response(omega);
        let scale = inv.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let det = inv.determinant();
        if !(det.norm() > 1e-14 * scale.powi(3)) {
            return Err(Error::SingularResponse { omega });
        }
        inv.try_inverse().ok_or(Error::SingularResponse { omega })
    }

    pub fn mirrored(&self) -> Result<Self> {
        Self::new(self.chain.mirrored(), self.bath.mirrored())
    }
}

/// `alpha(omega)` for the given parameters.
pub fn response_matrix(omega: f64, chain: &ChainParams, bath: &BathParams) -> Result<Matrix3<Complex64>> {
    Model::new(chain.clone(), bath.clone())?.response_matrix(omega)
}

/// Dimensionless parameters as they appear on the phase-diagram axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RatioParams {
    /// `omega_alpha / Omega`.
    pub frequencies: [f64; 3],
    /// `k / (m Omega^2)`.
    pub coupling: f64,
    /// `2 k_B T / (hbar Omega)` (mean, central bath).
    pub temperature: f64,
    /// `2 k_B dT / (hbar Omega)`.
    pub delta_temperature: f64,
    /// `gamma / Omega`.
    pub gamma: f64,
    /// `omega_c / Omega`.
    pub cutoff: f64,
}

impl Default for RatioParams {
    fn default() -> Self {
        Self {
            frequencies: [1.0; 3],
            coupling: 0.05,
            temperature: 0.05,
            delta_temperature: 0.0,
            gamma: 0.01,
            cutoff: 50.0,
        }
    }
}

/// Real part of the susceptibility reconstructed from its imaginary part by
/// the principal-value dispersion integral
/// `Re chi(w) = (1/pi) P int dw' Im chi(w') / (w' - w)`.
///
/// Uses the odd symmetry of `Im chi` to fold onto `(0, inf)` and subtracts
/// the singularity, which leaves a regular integrand because
/// `P int_0^inf dw' / (w'^2 - w^2) = 0`.
pub fn kramers_kronig_real_part(omega: f64, gamma: f64, cutoff: f64, tol: Tolerance) -> Result<f64> {
    let im = |w: f64| susceptibility_ft(w, gamma, cutoff).im;
    let w0 = omega.abs();
    let g0 = 2.0 * w0 * im(w0);
    let f = |u: f64| {
        let d = u * u - w0 * w0;
        if d.abs() < 1e-12 * (w0 * w0).max(1e-300) {
            // removable point: derivative of 2u Im chi(u) divided by 2u
            let h = 1e-6 * w0.max(1e-6);
            let g = |x: f64| 2.0 * x * im(x);
            (g(u + h) - g(u - h)) / (2.0 * h) / (2.0 * w0)
        } else {
            (2.0 * u * im(u) - g0) / d
        }
    };
    let mut breaks = vec![cutoff];
    if w0 > 0.0 {
        breaks.push(w0);
    }
    breaks.sort_by(|a, b| a.total_cmp(b));
    let v = quadrature::integrate_to_infinity(f, 0.0, &breaks, tol, 4000)?;
    // Re chi is even in omega
    Ok(v / std::f64::consts::PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn interaction_matrix_unit_coupling() {
        let v = interaction_matrix(1.0).unwrap();
        assert_eq!(v, Matrix3::new(1.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 1.0));
        assert_eq!(interaction_matrix(0.0).unwrap(), Matrix3::zeros());
        assert!(interaction_matrix(-0.1).is_err());
    }

    #[test]
    fn interaction_rows_sum_to_zero() {
        for k in [0.0, 0.013, 0.5, 7.0] {
            let v = interaction_matrix(k).unwrap();
            for r in 0..3 {
                assert_eq!(v.row(r).sum(), 0.0);
            }
            assert_eq!(v, v.transpose());
        }
    }

    #[test]
    fn spectral_density_values() {
        assert_eq!(spectral_density(0.0, 0.01, 50.0).unwrap(), 0.0);
        assert_relative_eq!(spectral_density(50.0, 0.01, 50.0).unwrap(), 0.25, epsilon = 1e-15);
        assert!(spectral_density(-1.0, 0.01, 50.0).is_err());
    }

    #[test]
    fn spectral_density_peaks_at_cutoff() {
        // grid search oracle
        let (gamma, wc) = (0.3, 7.0);
        let mut best = (0.0, f64::MIN);
        for i in 1..=200_000 {
            let w = i as f64 * 1e-4;
            let j = spectral_density(w, gamma, wc).unwrap();
            if j > best.1 {
                best = (w, j);
            }
        }
        assert!((best.0 - wc).abs() < 2e-4);
    }

    #[test]
    fn frequency_shift_closed_form_and_quadrature() {
        assert_relative_eq!(frequency_shift(0.01, 50.0), 0.25);
        assert_eq!(frequency_shift(0.0, 50.0), 0.0);
        let tol = Tolerance::new(1e-13, 1e-12);
        let numeric = frequency_shift_numeric(0.1, 10.0, tol).unwrap();
        assert!((numeric - frequency_shift(0.1, 10.0)).abs() < 1e-8);
    }

    #[test]
    fn susceptibility_limits() {
        let (g, wc) = (0.02, 30.0);
        let chi0 = susceptibility_ft(0.0, g, wc);
        assert_relative_eq!(chi0.re, g * wc, epsilon = 1e-15);
        assert_eq!(chi0.im, 0.0);
        for w in [0.1, 1.0, 3.3, 29.0, 400.0] {
            let chi = susceptibility_ft(w, g, wc);
            assert_relative_eq!(chi.im, spectral_density(w, g, wc).unwrap(), max_relative = 1e-13);
        }
        assert!(susceptibility_ft(1e9, g, wc).norm() < 1e-5);
        assert!(susceptibility_ft(1e6, g, wc).norm() > susceptibility_ft(1e7, g, wc).norm());
    }

    #[test]
    fn power_spectrum_zero_frequency_limit() {
        // series: w coth(w/2T) -> 2T, so Gamma(0) = 2 T m gamma / hbar
        let (g, wc) = (0.01, 50.0);
        let t = UnitsConvention::natural().temperature(0.35);
        let limit = 2.0 * t * g;
        assert_relative_eq!(power_spectrum(0.0, t, g, wc), limit, epsilon = 1e-16);
        for w in [1e-9, 1e-7, 1e-5] {
            assert_relative_eq!(power_spectrum(w, t, g, wc), limit, max_relative = 1e-8);
        }
    }

    #[test]
    fn power_spectrum_even_and_nonnegative() {
        let (g, wc) = (0.05, 20.0);
        for t in [0.0, 1e-3, 0.175, 2.0, 50.0] {
            for i in 0..2000 {
                let w = -100.0 + 0.1 * i as f64;
                let p = power_spectrum(w, t, g, wc);
                assert!(p >= 0.0);
                assert_eq!(p, power_spectrum(-w, t, g, wc));
            }
        }
    }

    #[test]
    fn power_spectrum_zero_temperature_is_spectral_density() {
        for w in [0.0, 0.2, 1.0, 40.0] {
            assert_eq!(power_spectrum(w, 0.0, 0.01, 50.0), spectral_density(w, 0.01, 50.0).unwrap());
            assert_eq!(power_spectrum(-w, 0.0, 0.01, 50.0), spectral_density(w, 0.01, 50.0).unwrap());
        }
    }

    #[test]
    fn temperature_ratio_roundtrip() {
        let u = UnitsConvention::natural();
        assert_eq!(u.temperature(0.05), 0.025);
        assert_eq!(u.temperature_ratio(u.temperature(0.35)), 0.35);
    }

    #[test]
    fn gradient_constructor() {
        let b = BathParams::with_gradient(0.2, 0.1, 0.01, 50.0).unwrap();
        for (t, e) in b.temperatures.iter().zip([0.25, 0.2, 0.15]) {
            assert_relative_eq!(*t, e, max_relative = 1e-15);
        }
        assert!(BathParams::with_gradient(0.2, 0.4, 0.01, 50.0).is_err());
        assert!(BathParams::with_gradient(0.2, -0.4, 0.01, 50.0).is_err());
        assert!(BathParams::new([0.1, -0.1, 0.1], 0.01, 50.0).is_err());
        assert!(BathParams::new([0.1; 3], 0.0, 50.0).is_err());
        assert!(BathParams::new([0.1; 3], 0.01, 0.0).is_err());
    }

    #[test]
    fn static_response_is_inverse_bare_stiffness() {
        // counter-term cancels Re chi(0): alpha(0) = diag(1/(m w^2)) at k = 0
        let chain = ChainParams::new([0.7, 1.3, 2.1], 0.0).unwrap();
        let bath = BathParams::equal(0.1, 0.2, 5.0).unwrap();
        let a = response_matrix(0.0, &chain, &bath).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 / chain.frequencies[i].powi(2) } else { 0.0 };
                assert!((a[(i, j)] - Complex64::new(expect, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn response_reflection_symmetry() {
        let model = Model::new(
            ChainParams::new([1.0, 1.4, 0.8], 0.07).unwrap(),
            BathParams::new([0.1, 0.2, 0.3], 0.05, 30.0).unwrap(),
        )
        .unwrap();
        for w in [0.01, 0.5, 0.99, 1.3, 7.0, 120.0] {
            let a = model.response_matrix(w).unwrap();
            let b = model.response_matrix(-w).unwrap();
            assert!((b.transpose() - a.conjugate()).norm() < 1e-12 * a.norm());
            assert!((a - a.transpose()).norm() < 1e-13 * a.norm());
        }
    }

    #[test]
    fn response_peaks_at_normal_modes_for_weak_damping() {
        // eigen-decomposition oracle: peaks of ||alpha|| sit at sqrt(eig(phi/m)) when gamma -> 0
        let chain = ChainParams::new([1.0, 1.5, 2.0], 0.1).unwrap();
        let bath = BathParams::equal(0.1, 1e-6, 50.0).unwrap();
        let model = Model::new(chain.clone(), bath).unwrap();
        for w0 in chain.normal_mode_frequencies() {
            let norm = |w: f64| model.response_matrix(w).unwrap().norm();
            let mut best = (w0, 0.0);
            for i in -2000..=2000 {
                let w = w0 + i as f64 * 1e-6;
                let n = norm(w);
                if n > best.1 {
                    best = (w, n);
                }
            }
            assert!((best.0 - w0).abs() < 5e-6, "peak {} vs mode {}", best.0, w0);
            assert!(norm(w0 + 0.05) < 1e-2 * best.1);
        }
    }

    #[test]
    fn effective_potential_includes_shift() {
        let chain = ChainParams::resonant(0.05).unwrap();
        let bath = BathParams::equal(0.025, 0.01, 50.0).unwrap();
        let p = EffectivePotential::new(&chain, &bath).unwrap();
        assert_relative_eq!(p.shift, 0.25);
        assert_relative_eq!(p.matrix[(1, 1)], 1.0 + 0.1 + 0.5);
        assert_relative_eq!(p.matrix[(0, 1)], -0.05);
    }

    #[test]
    fn kramers_kronig_recovers_real_part() {
        let (g, wc) = (0.1, 10.0);
        let tol = Tolerance::new(1e-12, 1e-10);
        for w in [0.0, 0.3, 1.0, 9.5, 10.0, 33.0] {
            let re = kramers_kronig_real_part(w, g, wc, tol).unwrap();
            let exact = susceptibility_ft(w, g, wc).re;
            assert!((re - exact).abs() < 1e-6 * exact, "w={w}: {re} vs {exact}");
        }
    }
}
