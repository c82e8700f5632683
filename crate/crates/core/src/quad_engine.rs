//! Stationary covariance by direct frequency integration of the spectral
//! densities `alpha(w) Gamma(w) alpha(w)^dagger`.
//!
//! With `A(w) = alpha(w) diag(Gamma(w)) alpha(w)^dagger` (Hermitian) and
//! `alpha(-w) = alpha(w)^*`, the two-sided integrals fold onto `w >= 0`:
//!
//! ```text
//! C_XX = (hbar/pi)       int_0^inf Re A(w) dw
//! C_PP = (hbar m^2/pi)   int_0^inf w^2 Re A(w) dw
//! C_XP = -(hbar m/pi)    int_0^inf w Im A(w) dw
//! ```
//!
//! `C_XP` is therefore antisymmetric with an identically zero diagonal.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::eigen;
use crate::covariance::CovarianceMatrix;
use crate::error::{Error, Result};
use crate::model::{BathParams, ChainParams, Model, UnitsConvention};
use crate::quadrature::{self, Tolerance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Finite panels end at `ceiling_multiplier * max(omega_c, highest mode)`;
    /// the rest is integrated on a mapped tail.
    pub ceiling_multiplier: f64,
    /// Extra panel boundaries (frequency units), added to the automatic ones.
    pub breakpoints: Vec<f64>,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 20_000,
            ceiling_multiplier: 8.0,
            breakpoints: Vec::new(),
        }
    }
}

impl QuadratureSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter("quadrature tolerances must be positive".into()));
        }
        if !(self.ceiling_multiplier >= 4.0) {
            return Err(Error::InvalidParameter(format!(
                "ceiling multiplier must be >= 4, got {}",
                self.ceiling_multiplier
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidParameter("max_subdivisions must be positive".into()));
        }
        Ok(())
    }
}

/// Folded spectral densities at one frequency; `C = int_0^inf` of each block.
#[derive(Debug, Clone, PartialEq)]
pub struct Integrand {
    pub xx: Matrix3<f64>,
    pub pp: Matrix3<f64>,
    pub xp: Matrix3<f64>,
}

/// Spectral densities of the three covariance blocks at `|omega|`.
pub fn integrand(omega: f64, model: &Model) -> Result<Integrand> {
    let w = omega.abs();
    let alpha = model.response_matrix(w)?;
    let gamma = model.bath.power_spectra(w);
    let mut re = Matrix3::zeros();
    let mut im = Matrix3::zeros();
    for a in 0..3 {
        re[(a, a)] = (0..3).map(|b| gamma[b] * alpha[(a, b)].norm_sqr()).sum();
        for d in a + 1..3 {
            let v: num_complex::Complex64 = (0..3)
                .map(|b| gamma[b] * alpha[(a, b)] * alpha[(d, b)].conj())
                .sum();
            re[(a, d)] = v.re;
            re[(d, a)] = v.re;
            im[(a, d)] = v.im;
            im[(d, a)] = -v.im;
        }
    }
    let h = UnitsConvention::HBAR / PI;
    let m = UnitsConvention::MASS;
    Ok(Integrand {
        xx: re * h,
        pp: re * (h * m * m * w * w),
        xp: im * (-h * m * w),
    })
}

/// Result of a quadrature solve with its diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureCovariance {
    pub covariance: CovarianceMatrix,
    /// Largest per-entry error estimate.
    pub error_estimate: f64,
    pub subdivisions: usize,
    pub evaluations: usize,
}

const UPPER: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
const STRICT_UPPER: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// Frequencies of the response peaks: eigenvalues of `(phi - Re chi(0)/hbar) / m`.
pub fn resonance_frequencies(model: &Model) -> [f64; 3] {
    let mut s = model.potential.matrix;
    let chi0 = model.bath.susceptibility(0.0).re / UnitsConvention::HBAR;
    for i in 0..3 {
        s[(i, i)] -= chi0;
    }
    let ev = eigen::symmetric_eigenvalues(&(s / UnitsConvention::MASS));
    let mut w: Vec<f64> = ev.iter().map(|l| l.max(0.0).sqrt()).collect();
    w.sort_by(|a, b| a.total_cmp(b));
    [w[0], w[1], w[2]]
}

fn panel_points(model: &Model, settings: &QuadratureSettings) -> Vec<f64> {
    let modes = resonance_frequencies(model);
    let cutoff = model.bath.cutoff;
    let top = modes[2].max(cutoff);
    let ceiling = settings.ceiling_multiplier * top;
    let half_width = 0.5 * model.bath.gamma;
    let mut pts = vec![0.0, cutoff, ceiling];
    for w in modes {
        pts.push(w);
        for s in [1.0, 4.0, 16.0, 64.0] {
            pts.push(w - s * half_width);
            pts.push(w + s * half_width);
        }
    }
    for t in model.bath.temperatures {
        if t > 0.0 {
            let scale = 2.0 * UnitsConvention::K_B * t / UnitsConvention::HBAR;
            pts.push(scale);
            pts.push(8.0 * scale);
        }
    }
    pts.extend(settings.breakpoints.iter().copied());
    pts.retain(|p| p.is_finite() && *p >= 0.0 && *p <= ceiling);
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1e-300));
    pts
}

/// Solves for the stationary covariance with diagnostics.
pub fn solve(model: &Model, settings: &QuadratureSettings) -> Result<QuadratureCovariance> {
    settings.validate()?;
    let points = panel_points(model, settings);
    let mut failure = None;
    let f = |w: f64, out: &mut [f64]| match integrand(w, model) {
        Ok(ig) => {
            for (n, (a, b)) in UPPER.iter().enumerate() {
                out[n] = ig.xx[(*a, *b)];
                out[6 + n] = ig.pp[(*a, *b)];
            }
            for (n, (a, b)) in STRICT_UPPER.iter().enumerate() {
                out[12 + n] = ig.xp[(*a, *b)];
            }
        }
        Err(e) => {
            failure.get_or_insert(e);
            out.iter_mut().for_each(|v| *v = 0.0);
        }
    };
    let tol = Tolerance::new(settings.abs_tol, settings.rel_tol);
    let r = quadrature::integrate_vector_to_infinity(f, 15, &points, tol, settings.max_subdivisions)?;
    if let Some(e) = failure {
        return Err(e);
    }
    let mut xx = Matrix3::zeros();
    let mut pp = Matrix3::zeros();
    let mut xp = Matrix3::zeros();
    for (n, (a, b)) in UPPER.iter().enumerate() {
        xx[(*a, *b)] = r.value[n];
        xx[(*b, *a)] = r.value[n];
        pp[(*a, *b)] = r.value[6 + n];
        pp[(*b, *a)] = r.value[6 + n];
    }
    for (n, (a, b)) in STRICT_UPPER.iter().enumerate() {
        xp[(*a, *b)] = r.value[12 + n];
        xp[(*b, *a)] = -r.value[12 + n];
    }
    let covariance = CovarianceMatrix::from_blocks(xx, xp, pp);
    covariance.check_invariants()?;
    Ok(QuadratureCovariance {
        covariance,
        error_estimate: r.error.iter().copied().fold(0.0, f64::max),
        subdivisions: r.subdivisions,
        evaluations: r.evaluations,
    })
}

/// Stationary covariance matrix by adaptive quadrature.
pub fn steady_covariance_quadrature(
    chain: &ChainParams,
    bath: &BathParams,
    settings: &QuadratureSettings,
) -> Result<CovarianceMatrix> {
    let model = Model::new(chain.clone(), bath.clone())?;
    Ok(solve(&model, settings)?.covariance)
}
