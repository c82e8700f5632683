//! Tripartite entanglement classes of three-mode Gaussian states.
//!
//! The PPT test is necessary and sufficient for `1 x 2` Gaussian bipartitions,
//! which fixes classes C1-C3. When all three bipartitions are PPT the state is
//! either fully separable (C5) or bound entangled (C4); the two are told apart
//! by searching for single-mode covariance matrices `gamma_a` with
//! `sigma >= gamma_L (+) gamma_C (+) gamma_R`.

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;
use nalgebra::{Matrix2, Matrix6, SymmetricEigen};

use crate::eigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::cell::Cell;
use std::fmt;

use crate::covariance::CovarianceMatrix;
use crate::error::{Error, Result};
use crate::gaussian::{self, partial_transpose, symplectic_eigenvalues};

/// Vacuum symplectic eigenvalue, `hbar / 2`.
const HALF: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Bipartition {
    /// `L|(CR)`
    L,
    /// `C|(LR)`
    C,
    /// `R|(LC)`
    R,
}

impl Bipartition {
    pub const ALL: [Bipartition; 3] = [Bipartition::L, Bipartition::C, Bipartition::R];

    /// Index of the single mode split off.
    pub fn mode(self) -> usize {
        match self {
            Bipartition::L => 0,
            Bipartition::C => 1,
            Bipartition::R => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Bipartition::L => "L|(CR)",
            Bipartition::C => "C|(LR)",
            Bipartition::R => "R|(LC)",
        }
    }

    /// The bipartition after exchanging the left and right modes.
    pub fn mirrored(self) -> Self {
        match self {
            Bipartition::L => Bipartition::R,
            Bipartition::C => Bipartition::C,
            Bipartition::R => Bipartition::L,
        }
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EntanglementClass {
    /// Fully inseparable.
    C1,
    /// One-mode biseparable.
    C2,
    /// Two-mode biseparable.
    C3,
    /// Bound entangled: PPT in every bipartition, yet not fully separable.
    C4,
    /// Fully separable.
    C5,
}

impl EntanglementClass {
    pub const ALL: [EntanglementClass; 5] = [
        EntanglementClass::C1,
        EntanglementClass::C2,
        EntanglementClass::C3,
        EntanglementClass::C4,
        EntanglementClass::C5,
    ];

    pub fn label(self) -> &'static str {
        match self {
            EntanglementClass::C1 => "C1",
            EntanglementClass::C2 => "C2",
            EntanglementClass::C3 => "C3",
            EntanglementClass::C4 => "C4",
            EntanglementClass::C5 => "C5",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            EntanglementClass::C1 => "fully inseparable",
            EntanglementClass::C2 => "one-mode biseparable",
            EntanglementClass::C3 => "two-mode biseparable",
            EntanglementClass::C4 => "bound entangled",
            EntanglementClass::C5 => "fully separable",
        }
    }

    /// Number of PPT-separable bipartitions the class requires.
    pub fn separable_count(self) -> usize {
        match self {
            EntanglementClass::C1 => 0,
            EntanglementClass::C2 => 1,
            EntanglementClass::C3 => 2,
            EntanglementClass::C4 | EntanglementClass::C5 => 3,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.label() == s)
    }
}

impl fmt::Display for EntanglementClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Separable iff `nu_min >= 1/2 - ppt`.
    pub ppt: f64,
    /// `|nu_min - 1/2|` below this marks a cell as lying on a class boundary.
    pub boundary_band: f64,
    /// A certificate is accepted when both semidefinite conditions hold to this level.
    pub certificate: f64,
    /// Bound entanglement is declared only when the best certificate margin is below `-bound_entangled`.
    pub bound_entangled: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            ppt: 1e-12,
            boundary_band: 1e-7,
            certificate: 1e-9,
            bound_entangled: 1e-7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CertificateBudget {
    pub restarts: usize,
    pub iterations: u64,
    pub seed: u64,
    /// Stop as soon as a margin `>= 0` is reached instead of maximising it.
    pub early_stop: bool,
}

impl Default for CertificateBudget {
    fn default() -> Self {
        Self {
            restarts: 64,
            iterations: 500,
            seed: 0x5eed,
            early_stop: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PptVerdict {
    pub separable: bool,
    pub nu_min: f64,
}

/// PPT test of one bipartition.
pub fn ppt_separable(sigma: &CovarianceMatrix, bipartition: Bipartition, tol: f64) -> Result<PptVerdict> {
    let nu = symplectic_eigenvalues(&partial_transpose(sigma.matrix(), bipartition.mode()))?;
    Ok(PptVerdict {
        separable: nu[0] >= HALF - tol,
        nu_min: nu[0],
    })
}

/// `E_N = sum_j max(0, -ln(2 nu_j / hbar))` over the partially transposed spectrum.
pub fn log_negativity(sigma: &CovarianceMatrix, bipartition: Bipartition) -> Result<f64> {
    let nu = symplectic_eigenvalues(&partial_transpose(sigma.matrix(), bipartition.mode()))?;
    Ok(nu.iter().map(|v| (-(v / HALF).ln()).max(0.0)).sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// `gamma_L, gamma_C, gamma_R` in `(x, p)` order.
    pub modes: [Matrix2<f64>; 3],
    /// `min eig(sigma - (+) gamma_a)`.
    pub margin: f64,
}

impl Certificate {
    /// Independent check of both semidefinite conditions to `tol`.
    pub fn verify(&self, sigma: &CovarianceMatrix, tol: f64) -> bool {
        let single_ok = self.modes.iter().all(|g| {
            // g + iK/2 >= 0  <=>  g >= 0 and det g >= 1/4
            let ev = eigen::symmetric_eigenvalues(g);
            ev.min() >= -tol && g.determinant() >= HALF * HALF - tol
        });
        single_ok && product_margin(sigma.matrix(), &self.modes) >= -tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateSearch {
    pub certificate: Option<Certificate>,
    /// Best `min eig(sigma - (+) gamma_a)` reached.
    pub best_margin: f64,
    pub restarts: usize,
    pub evaluations: u64,
    /// Exact optimum, computed when the local search found no certificate.
    pub convex_margin: Option<f64>,
}

fn product_margin(sigma: &Matrix6<f64>, modes: &[Matrix2<f64>; 3]) -> f64 {
    let d = sigma - CovarianceMatrix::product(*modes).matrix();
    eigen::symmetric_eigenvalues(&d).min()
}

/// `gamma = (1/2 + s^2) R(theta) diag(e^{2r}, e^{-2r}) R(theta)^T`, physical for every `(s, r, theta)`.
fn single_mode(p: &[f64]) -> Matrix2<f64> {
    let (s, r, th) = (p[0], p[1], p[2]);
    let nu = HALF + s * s;
    let (c, sn) = (th.cos(), th.sin());
    let rot = Matrix2::new(c, -sn, sn, c);
    rot * Matrix2::new(nu * (2.0 * r).exp(), 0.0, 0.0, nu * (-2.0 * r).exp()) * rot.transpose()
}

fn modes_of(p: &[f64]) -> [Matrix2<f64>; 3] {
    [single_mode(&p[0..3]), single_mode(&p[3..6]), single_mode(&p[6..9])]
}

/// Pure state with the marginal's shape: `(s, r, theta) = (0, ., .)`.
fn marginal_start(g: &Matrix2<f64>) -> [f64; 3] {
    let e = SymmetricEigen::new(*g);
    let (i, j) = if e.eigenvalues[0] >= e.eigenvalues[1] { (0, 1) } else { (1, 0) };
    let r = 0.25 * (e.eigenvalues[i] / e.eigenvalues[j]).ln();
    let v = e.eigenvectors.column(i);
    [0.0, r, v[1].atan2(v[0])]
}

struct Objective<'a> {
    sigma: &'a Matrix6<f64>,
    calls: &'a Cell<u64>,
}

impl CostFunction for Objective<'_> {
    type Param = Vec<f64>;
    type Output = f64;
    fn cost(&self, p: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        self.calls.set(self.calls.get() + 1);
        Ok(-product_margin(self.sigma, &modes_of(p)))
    }
}

/// Multi-start Nelder-Mead maximisation of `min eig(sigma - (+) gamma_a)`.
/// Returns a certificate once the margin reaches `-tol`; stops early at margin `>= 0`.
pub fn full_separability_certificate(
    sigma: &CovarianceMatrix,
    budget: &CertificateBudget,
    tol: f64,
) -> Result<CertificateSearch> {
    if !gaussian::physicality(sigma).valid {
        return Err(Error::Precondition("certificate search needs a physical state".into()));
    }
    let m = sigma.matrix();
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut start: Vec<f64> = (0..3).flat_map(|a| marginal_start(&sigma.mode(a))).collect();
    let origin = start.clone();
    let mut best_p = start.clone();
    let mut best = f64::NEG_INFINITY;
    let calls = Cell::new(0);
    let mut restarts = 0;
    for attempt in 0..budget.restarts.max(1) {
        restarts = attempt + 1;
        if attempt > 0 {
            // alternate between refining the incumbent and exploring around the marginals
            let (base, h) = if attempt % 2 == 1 {
                (&best_p, 0.3 * 0.5f64.powi(((attempt / 2) % 6) as i32))
            } else {
                (&origin, 1.0)
            };
            start = base.iter().map(|x| x + rng.gen_range(-h..h)).collect();
        }
        let step = if attempt == 0 { 0.2 } else { 0.1 };
        let mut simplex = vec![start.clone()];
        for i in 0..9 {
            let mut v = start.clone();
            v[i] += step;
            simplex.push(v);
        }
        let solver = NelderMead::new(simplex)
            .with_sd_tolerance(1e-15)
            .map_err(|e| Error::Precondition(e.to_string()))?;
        let target = if budget.early_stop { 0.0 } else { f64::NEG_INFINITY };
        let res = Executor::new(Objective { sigma: m, calls: &calls }, solver)
            .configure(|s| s.max_iters(budget.iterations).target_cost(target))
            .run()
            .map_err(|e| Error::Precondition(e.to_string()))?;
        let state = res.state();
        let margin = -state.get_best_cost();
        if margin > best {
            best = margin;
            best_p = state
                .get_best_param()
                .cloned()
                .ok_or_else(|| Error::Precondition("optimizer returned no parameters".into()))?;
        }
        if budget.early_stop && best >= 0.0 {
            break;
        }
    }
    let mut modes = modes_of(&best_p);
    let mut convex_margin = None;
    if best < -tol {
        // the local search can stall short of the optimum; settle it exactly
        let (m_opt, g_opt) = maximize_certificate_margin(sigma)?;
        convex_margin = Some(m_opt);
        if m_opt > best {
            best = m_opt;
            modes = g_opt;
        }
    }
    let certificate = (best >= -tol).then_some(Certificate { modes, margin: best });
    Ok(CertificateSearch {
        certificate,
        best_margin: best,
        restarts,
        evaluations: calls.get(),
        convex_margin,
    })
}

/// Barrier parameter of the constraint set: a 6x6 LMI plus three 2x2 Hermitian LMIs.
const BARRIER_DEGREE: f64 = 12.0;

struct BarrierPoint {
    value: f64,
    grad: [f64; 10],
    hess: [[f64; 10]; 10],
}

/// Derivative of `(+) gamma_a` with respect to variable `i < 9`
/// (`gamma_a = [[x_3a, x_3a+1], [x_3a+1, x_3a+2]]`).
fn basis_matrix(i: usize) -> Matrix6<f64> {
    let a = i / 3;
    let mut e = Matrix6::zeros();
    match i % 3 {
        0 => e[(a, a)] = 1.0,
        1 => {
            e[(a, a + 3)] = 1.0;
            e[(a + 3, a)] = 1.0;
        }
        _ => e[(a + 3, a + 3)] = 1.0,
    }
    e
}

fn gammas(x: &[f64; 10]) -> [Matrix2<f64>; 3] {
    std::array::from_fn(|a| Matrix2::new(x[3 * a], x[3 * a + 1], x[3 * a + 1], x[3 * a + 2]))
}

/// `-s t - ln det(sigma - (+)gamma - tI) - sum_a ln(det gamma_a - 1/4)`,
/// or `None` outside the domain.
fn barrier(sigma: &Matrix6<f64>, x: &[f64; 10], s: f64, derivatives: bool) -> Option<BarrierPoint> {
    let g = gammas(x);
    let slack = sigma - CovarianceMatrix::product(g).matrix() - Matrix6::identity() * x[9];
    let chol = slack.cholesky()?;
    let mut value = -s * x[9] - 2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
    let mut h = [0.0; 3];
    for a in 0..3 {
        h[a] = g[a].determinant() - HALF * HALF;
        if !(g[a][(0, 0)] > 0.0 && h[a] > 0.0) {
            return None;
        }
        value -= h[a].ln();
    }
    let mut grad = [0.0; 10];
    let mut hess = [[0.0; 10]; 10];
    if derivatives {
        let inv = chol.inverse();
        // d slack / dx_i = -E_i, with E_9 = I
        let w: Vec<Matrix6<f64>> = (0..10)
            .map(|i| if i < 9 { inv * basis_matrix(i) } else { inv })
            .collect();
        for i in 0..10 {
            grad[i] = w[i].trace();
            for j in 0..=i {
                let v = (w[i] * w[j]).trace();
                hess[i][j] = v;
                hess[j][i] = v;
            }
        }
        grad[9] -= s;
        for a in 0..3 {
            let (p, q, r) = (x[3 * a], x[3 * a + 1], x[3 * a + 2]);
            let dh = [r, -2.0 * q, p];
            let d2h = [[0.0, 0.0, 1.0], [0.0, -2.0, 0.0], [1.0, 0.0, 0.0]];
            for i in 0..3 {
                grad[3 * a + i] -= dh[i] / h[a];
                for j in 0..3 {
                    hess[3 * a + i][3 * a + j] += dh[i] * dh[j] / (h[a] * h[a]) - d2h[i][j] / h[a];
                }
            }
        }
    }
    Some(BarrierPoint { value, grad, hess })
}

/// Global maximum of `min eig(sigma - (+) gamma_a)` over physical `gamma_a`,
/// by a log-barrier Newton method on the equivalent linear matrix inequality.
/// Converges to within `1e-11` of the optimum.
pub fn maximize_certificate_margin(sigma: &CovarianceMatrix) -> Result<(f64, [Matrix2<f64>; 3])> {
    let m = sigma.matrix();
    let mut x = [0.0; 10];
    for a in 0..3 {
        // marginal shape, slightly outside the pure-state boundary
        let g = sigma.mode(a);
        let g = g * (0.5 * 1.01 / g.determinant().max(f64::MIN_POSITIVE).sqrt());
        x[3 * a] = g[(0, 0)];
        x[3 * a + 1] = g[(0, 1)];
        x[3 * a + 2] = g[(1, 1)];
    }
    x[9] = product_margin(m, &gammas(&x)) - 1.0;
    let scale = m.amax().max(1.0);
    let mut s = 1.0 / scale;
    while BARRIER_DEGREE / s > 1e-11 {
        for _ in 0..200 {
            let bp = barrier(m, &x, s, true)
                .ok_or_else(|| Error::Precondition("barrier iterate left the domain".into()))?;
            let hm = nalgebra::SMatrix::<f64, 10, 10>::from_fn(|i, j| bp.hess[i][j]);
            let gv = nalgebra::SVector::<f64, 10>::from_fn(|i, _| bp.grad[i]);
            let step = match hm.cholesky() {
                Some(c) => -c.solve(&gv),
                None => -gv,
            };
            let decrement = -gv.dot(&step);
            if decrement < 1e-14 {
                break;
            }
            let mut alpha = 1.0;
            let mut moved = false;
            while alpha > 1e-12 {
                let trial: [f64; 10] = std::array::from_fn(|i| x[i] + alpha * step[i]);
                if let Some(tp) = barrier(m, &trial, s, false) {
                    if tp.value <= bp.value - 0.25 * alpha * decrement {
                        x = trial;
                        moved = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !moved {
                break;
            }
        }
        s *= 8.0;
    }
    let g = gammas(&x);
    Ok((product_margin(m, &g), g))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BipartiteResult {
    pub bipartition: Bipartition,
    pub nu_min: f64,
    pub separable: bool,
    pub log_negativity: f64,
    /// `|nu_min - 1/2|` inside the boundary band.
    pub boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    pub class: EntanglementClass,
    pub bipartitions: [BipartiteResult; 3],
    pub physicality_margin: f64,
    /// Present only when every bipartition is PPT.
    pub certificate_search: Option<CertificateSearch>,
    /// Some verdict sits inside a tolerance band.
    pub boundary: bool,
    pub tolerances: Tolerances,
}

impl EntanglementReport {
    pub fn result(&self, b: Bipartition) -> &BipartiteResult {
        &self.bipartitions[b.mode()]
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        self.certificate_search.as_ref().and_then(|s| s.certificate.as_ref())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifyOptions {
    pub tolerances: Tolerances,
    pub budget: CertificateBudget,
}

/// Counts PPT-separable bipartitions (0 -> C1, 1 -> C2, 2 -> C3); with all
/// three separable, a certificate decides between C5 and C4.
pub fn classify(sigma: &CovarianceMatrix, options: &ClassifyOptions) -> Result<EntanglementReport> {
    let tol = options.tolerances;
    let phys = gaussian::physicality(sigma);
    if !phys.valid {
        return Err(Error::Unphysical { margin: phys.margin });
    }
    let mut results = Vec::with_capacity(3);
    for b in Bipartition::ALL {
        let v = ppt_separable(sigma, b, tol.ppt)?;
        results.push(BipartiteResult {
            bipartition: b,
            nu_min: v.nu_min,
            separable: v.separable,
            log_negativity: log_negativity(sigma, b)?,
            boundary: (v.nu_min - HALF).abs() < tol.boundary_band,
        });
    }
    let bipartitions = [results[0], results[1], results[2]];
    let mut boundary = bipartitions.iter().any(|r| r.boundary);
    let (class, search) = match bipartitions.iter().filter(|r| r.separable).count() {
        0 => (EntanglementClass::C1, None),
        1 => (EntanglementClass::C2, None),
        2 => (EntanglementClass::C3, None),
        _ => {
            let s = full_separability_certificate(sigma, &options.budget, tol.certificate)?;
            let class = if s.best_margin < -tol.bound_entangled {
                EntanglementClass::C4
            } else {
                boundary |= s.certificate.is_none();
                EntanglementClass::C5
            };
            (class, Some(s))
        }
    };
    Ok(EntanglementReport {
        class,
        bipartitions,
        physicality_margin: phys.margin,
        certificate_search: search,
        boundary,
        tolerances: tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_mode_squeezed(r: f64) -> CovarianceMatrix {
        let (c, s) = ((2.0 * r).cosh() / 2.0, (2.0 * r).sinh() / 2.0);
        let mut m = Matrix6::identity() * 0.5;
        for i in [0, 1, 3, 4] {
            m[(i, i)] = c;
        }
        m[(0, 1)] = s;
        m[(1, 0)] = s;
        m[(3, 4)] = -s;
        m[(4, 3)] = -s;
        CovarianceMatrix::from_matrix(m).unwrap()
    }

    #[test]
    fn squeezed_pair_log_negativity() {
        let s = two_mode_squeezed(1.0);
        assert!((log_negativity(&s, Bipartition::L).unwrap() - 2.0).abs() < 1e-12);
        assert!((log_negativity(&s, Bipartition::C).unwrap() - 2.0).abs() < 1e-12);
        assert!(log_negativity(&s, Bipartition::R).unwrap() < 1e-12);
        let v = ppt_separable(&s, Bipartition::L, 1e-12).unwrap();
        assert!(!v.separable);
        assert!((v.nu_min - (-2.0f64).exp() / 2.0).abs() < 1e-12);
        assert!(ppt_separable(&s, Bipartition::R, 1e-12).unwrap().separable);
        // L and C entangled with each other, R in a product: R|(LC) separable only
        let r = classify(&s, &ClassifyOptions::default()).unwrap();
        assert_eq!(r.class, EntanglementClass::C2);
    }

    #[test]
    fn product_of_thermal_states() {
        let th = |n: f64| Matrix2::identity() * (n + 0.5);
        let s = CovarianceMatrix::product([th(0.3), th(1.2), th(0.0)]);
        for b in Bipartition::ALL {
            assert!(ppt_separable(&s, b, 1e-12).unwrap().separable);
            assert_eq!(log_negativity(&s, b).unwrap(), 0.0);
        }
        let r = classify(&s, &ClassifyOptions::default()).unwrap();
        assert_eq!(r.class, EntanglementClass::C5);
        assert!(r.certificate().unwrap().verify(&s, 1e-9));
    }

    #[test]
    fn product_state_certificate_is_its_marginals() {
        let modes = [
            Matrix2::new(2.0, 0.3, 0.3, 0.5),
            Matrix2::new(0.5, 0.0, 0.0, 0.5),
            Matrix2::new(1.0, -0.2, -0.2, 0.4),
        ];
        let s = CovarianceMatrix::product(modes);
        let cert = Certificate { modes, margin: 0.0 };
        assert!(cert.verify(&s, 1e-12));
        let found = full_separability_certificate(&s, &CertificateBudget::default(), 1e-9).unwrap();
        assert!(found.certificate.unwrap().verify(&s, 1e-9));
    }

    #[test]
    fn noisy_product_has_certificate() {
        let modes = [Matrix2::new(1.5, 0.4, 0.4, 0.3), Matrix2::identity() * 0.5, Matrix2::identity() * 0.7];
        let noisy = CovarianceMatrix::from_matrix(CovarianceMatrix::product(modes).matrix() + Matrix6::identity() * 0.1).unwrap();
        let s = full_separability_certificate(&noisy, &CertificateBudget::default(), 1e-9).unwrap();
        assert!(s.best_margin >= 0.0);
        assert!(s.certificate.unwrap().verify(&noisy, 1e-9));
    }

    #[test]
    fn unphysical_rejected() {
        let s = CovarianceMatrix::from_matrix(Matrix6::identity() * 0.25).unwrap();
        assert!(matches!(classify(&s, &ClassifyOptions::default()), Err(Error::Unphysical { .. })));
        assert!(full_separability_certificate(&s, &CertificateBudget::default(), 1e-9).is_err());
    }

    #[test]
    fn single_mode_parameterisation_is_physical() {
        for p in [[0.0, 0.0, 0.0], [1.3, -2.0, 0.7], [-0.2, 3.0, 10.0]] {
            let g = single_mode(&p);
            assert!(g.determinant() >= 0.25 - 1e-12);
            assert!(SymmetricEigen::new(g).eigenvalues.min() > 0.0);
        }
        let g = Matrix2::new(2.0, 0.6, 0.6, 0.5);
        let back = single_mode(&marginal_start(&g));
        // same shape, rescaled to a pure state
        assert!((back * (g.determinant().sqrt() / 0.5) - g).amax() < 1e-12);
    }

    #[test]
    fn class_labels_roundtrip() {
        for c in EntanglementClass::ALL {
            assert_eq!(EntanglementClass::parse(c.label()), Some(c));
        }
        assert_eq!(EntanglementClass::parse("C9"), None);
    }
}
