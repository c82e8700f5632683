//! Independent oracles and the validation suites built on them.

use nalgebra::Matrix3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::covariance::CovarianceMatrix;
use crate::digamma::{coth_via_digamma, digamma};
use crate::eigen;
use crate::error::{Error, Result};
use crate::gaussian::{physicality, symplectic_eigenvalues};
use crate::model::{
    kramers_kronig_real_part, susceptibility_ft, BathParams, ChainParams, Model, RatioParams,
    SusceptibilityConvention, UnitsConvention,
};
use crate::quad_engine::{self, QuadratureSettings};
use crate::quadrature::{self, Tolerance};
use crate::residue;
use crate::sweep::{self, ENGINE_ABS_TOL, ENGINE_REL_TOL};

/// Binet's second integral:
/// `psi(z) = ln z - 1/2z - 2 int_0^inf t / ((t^2 + z^2)(e^{2 pi t} - 1)) dt`, `Re z > 0`.
pub fn binet_digamma(z: Complex64) -> Result<Complex64> {
    if !(z.re > 0.0) {
        return Err(Error::InvalidParameter("Binet integral needs Re z > 0".into()));
    }
    let z2 = z * z;
    let f = |t: f64, out: &mut [f64]| {
        let w = if t == 0.0 { 1.0 / (2.0 * PI) } else { t / (2.0 * PI * t).exp_m1() };
        let v = w / (Complex64::new(t * t, 0.0) + z2);
        out[0] = v.re;
        out[1] = v.im;
    };
    let y = z.im.abs();
    let mut pts = vec![0.0, 1.0];
    if y > 0.0 {
        pts.extend([0.5 * y, y, 1.5 * y]);
    }
    pts.push(2.0 * y.max(1.0) + 8.0);
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup();
    let r = quadrature::integrate_vector_to_infinity(f, 2, &pts, Tolerance::new(1e-16, 1e-13), 20000)?;
    let integral = Complex64::new(r.value[0], r.value[1]);
    Ok(z.ln() - 0.5 / z - 2.0 * integral)
}

/// Covariance of the ground state of the isolated chain:
/// `C_XX = (hbar/2) (m Phi)^{-1/2}`, `C_PP = (hbar/2) (m Phi)^{1/2}`, `C_XP = 0`.
pub fn ground_state_covariance(chain: &ChainParams) -> CovarianceMatrix {
    let m = UnitsConvention::MASS;
    let (l, v) = eigen::symmetric_eigen(&(chain.bare_stiffness() * m));
    let f = |p: f64| v * Matrix3::from_diagonal(&l.map(|x| x.powf(p))) * v.transpose();
    let h = 0.5 * UnitsConvention::HBAR;
    CovarianceMatrix::from_blocks(f(-0.5) * h, Matrix3::zeros(), f(0.5) * h)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl SuiteResult {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self { name: name.to_string(), passed, detail }
    }

    fn error(name: &str, e: &Error) -> Self {
        Self::new(name, false, format!("error: {e}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidateOptions {
    pub samples: usize,
    pub seed: u64,
    /// Susceptibility sign used by the physical-limit suites.
    pub convention: SusceptibilityConvention,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self { samples: 200, seed: 20_240_917, convention: SusceptibilityConvention::Causal }
    }
}

/// A random point spanning the figure ranges.
pub fn random_figure_point(rng: &mut impl Rng) -> RatioParams {
    let t: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
    RatioParams {
        frequencies: [1.0, 1.0 + rng.gen_range(0.0..=3.0), 1.0],
        coupling: rng.gen_range(0.0..=0.1),
        temperature: t,
        delta_temperature: rng.gen_range(-1.0..1.0) * 2.0 * t * 0.999,
        gamma: (rng.gen_range(1e-3f64.ln()..=0.3f64.ln())).exp(),
        cutoff: 50.0,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossEngineSample {
    pub params: RatioParams,
    pub residue: CovarianceMatrix,
    pub quadrature: CovarianceMatrix,
    /// Worst entry in units of `max(1e-8, 1e-6 |x|)`.
    pub deviation: f64,
}

pub fn cross_engine_samples(n: usize, seed: u64) -> Result<Vec<CrossEngineSample>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let settings = QuadratureSettings::default();
    (0..n)
        .map(|_| {
            let params = random_figure_point(&mut rng);
            let model = Model::from_ratios(&params)?;
            let q = quad_engine::solve(&model, &settings)?.covariance;
            let r = residue::steady_covariance_residue(&model.chain, &model.bath)?;
            let deviation = r.deviation(&q, ENGINE_ABS_TOL, ENGINE_REL_TOL);
            Ok(CrossEngineSample { params, residue: r, quadrature: q, deviation })
        })
        .collect()
}

/// Worst relative error of `diag C_XX` against `k_B T / m w^2` and of `diag C_PP` against `m k_B T`.
pub fn equipartition_error(sigma: &CovarianceMatrix, chain: &ChainParams, temperature: f64) -> f64 {
    let m = UnitsConvention::MASS;
    let kt = UnitsConvention::K_B * temperature;
    (0..3)
        .map(|a| {
            let x = kt / (m * chain.frequencies[a].powi(2));
            let ex = (sigma.xx()[(a, a)] / x - 1.0).abs();
            let ep = (sigma.pp()[(a, a)] / (m * kt) - 1.0).abs();
            ex.max(ep)
        })
        .fold(0.0, f64::max)
}

fn suite_cross_engine(opts: &ValidateOptions) -> SuiteResult {
    let name = "cross-engine";
    match cross_engine_samples(opts.samples, opts.seed) {
        Ok(s) => {
            let worst = s.iter().map(|x| x.deviation).fold(0.0, f64::max);
            let phys = s
                .iter()
                .flat_map(|x| [&x.residue, &x.quadrature])
                .map(|c| physicality(c).margin)
                .fold(f64::INFINITY, f64::min);
            SuiteResult::new(
                name,
                worst <= 1.0 && phys >= -1e-9,
                format!("{} points, worst deviation {worst:.3e} of tolerance, min physicality margin {phys:.3e}", s.len()),
            )
        }
        Err(e) => SuiteResult::error(name, &e),
    }
}

fn suite_equipartition(opts: &ValidateOptions) -> SuiteResult {
    let name = "equipartition";
    let run = || -> Result<f64> {
        let t = UnitsConvention::natural().temperature(20.0);
        let mut worst: f64 = 0.0;
        for freq in [[1.0; 3], [1.0, 2.0, 3.0]] {
            let chain = ChainParams::new(freq, 0.0)?;
            let bath = BathParams::equal(t, 0.01, 50.0)?.with_convention(opts.convention);
            let model = Model::new(chain.clone(), bath)?;
            let q = quad_engine::solve(&model, &QuadratureSettings::default())?.covariance;
            worst = worst.max(equipartition_error(&q, &chain, t));
        }
        Ok(worst)
    };
    match run() {
        Ok(w) => SuiteResult::new(name, w <= 0.02, format!("worst relative error {w:.3e} (limit 2e-2)")),
        Err(e) => SuiteResult::error(name, &e),
    }
}

fn suite_ground_state(opts: &ValidateOptions) -> SuiteResult {
    let name = "ground-state";
    let run = || -> Result<(f64, f64)> {
        let chain = ChainParams::resonant(0.05)?;
        let t = UnitsConvention::natural().temperature(1e-3);
        let bath = BathParams::equal(t, 1e-4, 50.0)?.with_convention(opts.convention);
        let model = Model::new(chain.clone(), bath)?;
        let q = quad_engine::solve(&model, &QuadratureSettings::default())?.covariance;
        let gs = ground_state_covariance(&chain);
        let rel = q.deviation(&gs, 1e-6, 1e-3);
        let nu = symplectic_eigenvalues(q.matrix())?;
        let dnu = nu.iter().map(|v| (v - 0.5).abs()).fold(0.0, f64::max);
        Ok((rel, dnu))
    };
    match run() {
        Ok((rel, dnu)) => SuiteResult::new(
            name,
            rel <= 1.0 && dnu <= 1e-3,
            format!("deviation {rel:.3e} of 1e-3 relative, max |nu - 1/2| = {dnu:.3e}"),
        ),
        Err(e) => SuiteResult::error(name, &e),
    }
}

fn suite_mirror() -> SuiteResult {
    let name = "dT-mirror";
    let run = || -> Result<(usize, usize)> {
        let mut mismatches = 0;
        let mut cells = 0;
        for p in ["fig3a", "fig3b"] {
            let g = sweep::run_sweep(&sweep::preset(p).expect("preset"))?;
            let n2 = g.axis2_values.len();
            for i in 0..g.axis1_values.len() {
                for j in 0..n2 {
                    cells += 1;
                    let (a, b) = (g.cell(i, j), g.cell(i, n2 - 1 - j));
                    if a.class.is_none() || a.class != b.class {
                        mismatches += 1;
                    }
                }
            }
        }
        Ok((mismatches, cells))
    };
    match run() {
        Ok((m, n)) => SuiteResult::new(name, m == 0, format!("{m} mismatched of {n} cells (fig3a, fig3b)")),
        Err(e) => SuiteResult::error(name, &e),
    }
}

/// Deterministic sample of digamma arguments covering the residue-sum domain `Re z >= 1`.
pub fn digamma_samples(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let re = 10f64.powf(rng.gen_range(0.0..4.0));
            let im = rng.gen_range(-1.0..1.0) * 10f64.powf(rng.gen_range(-2.0..3.0));
            Complex64::new(re, im)
        })
        .collect()
}

pub fn digamma_max_error(samples: &[Complex64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for z in samples {
        let a = digamma(*z)?;
        let b = binet_digamma(*z)?;
        worst = worst.max((a - b).norm() / b.norm());
    }
    Ok(worst)
}

pub fn coth_identity_max_error(n: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let x = 10f64.powf(-3.0 + 6.0 * i as f64 / (n - 1) as f64);
        let want = 1.0 / x.tanh();
        worst = worst.max((coth_via_digamma(x)? - want).abs() / want);
    }
    Ok(worst)
}

fn suite_special_functions(opts: &ValidateOptions) -> SuiteResult {
    let name = "special-functions";
    let run = || -> Result<(f64, f64)> {
        Ok((digamma_max_error(&digamma_samples(1000, opts.seed))?, coth_identity_max_error(200)?))
    };
    match run() {
        Ok((d, c)) => SuiteResult::new(
            name,
            d <= 1e-12 && c <= 1e-12,
            format!("digamma vs Binet integral {d:.3e}, coth identity {c:.3e} (limit 1e-12)"),
        ),
        Err(e) => SuiteResult::error(name, &e),
    }
}

/// Worst relative error of the dispersion reconstruction at `n` log-spaced frequencies.
pub fn kramers_kronig_max_error(n: usize, gamma: f64, cutoff: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let w = 10f64.powf(-2.0 + 5.0 * i as f64 / (n - 1) as f64);
        let got = kramers_kronig_real_part(w, gamma, cutoff, Tolerance::new(1e-14, 1e-10))?;
        let want = susceptibility_ft(w, gamma, cutoff).re;
        worst = worst.max((got - want).abs() / want.abs());
    }
    Ok(worst)
}

fn suite_kramers_kronig() -> SuiteResult {
    let name = "kramers-kronig";
    match kramers_kronig_max_error(50, 0.01, 50.0) {
        Ok(w) => SuiteResult::new(name, w <= 1e-4, format!("50 frequencies, worst relative error {w:.3e} (limit 1e-4)")),
        Err(e) => SuiteResult::error(name, &e),
    }
}

/// Runs every validation suite.
pub fn run_all(opts: &ValidateOptions) -> Vec<SuiteResult> {
    vec![
        suite_cross_engine(opts),
        suite_equipartition(opts),
        suite_ground_state(opts),
        suite_mirror(),
        suite_special_functions(opts),
        suite_kramers_kronig(),
    ]
}
