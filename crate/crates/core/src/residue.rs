//! Closed-form stationary covariance from partial fractions and digamma sums.
//!
//! `F(w) = (w_c - i w) alpha^{-1}(w)` is a polynomial matrix, so the spectral
//! densities are rational in `w` apart from the thermal factor
//! `w coth(w / 2T)`. Each rational term
//!
//! ```text
//! g(w) = sum_j a_j / (w - r_j) + sum_j b_j / (w - s_j),   Im r_j < 0 < Im s_j
//! ```
//!
//! integrates against the thermal factor to
//!
//! ```text
//! (1/2pi) int w coth(w/2T) g(w) dw
//!   = -2iT sum_j a_j - (1/pi) sum_j [a_j r_j psi(1 + i r_j/2piT) + b_j s_j psi(1 - i s_j/2piT)]
//! ```
//!
//! (units hbar = k_B = m = 1). Two evaluation routes are provided: the modal
//! route factors `det F` into three cubics through the eigenbasis of the
//! potential and is the production path; the adjugate route works directly
//! with the nine roots of `det F` and needs them well separated.

use nalgebra::Matrix3;
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::covariance::CovarianceMatrix;
use crate::digamma::digamma;
use crate::eigen;
use crate::error::{Error, Result};
use crate::model::{BathParams, ChainParams, Model, SusceptibilityConvention, UnitsConvention};
use crate::poly::Poly;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Roots closer than this (relative to the largest root) are treated as degenerate.
pub const SEPARATION_THRESHOLD: f64 = 1e-8;
/// Largest relative imaginary part tolerated in the assembled sums.
pub const IMAGINARY_TOLERANCE: f64 = 1e-10;
/// Above this `|z| / 2 pi T` the digamma bracket switches to its logarithmic asymptote.
pub const LOW_TEMPERATURE_GUARD: f64 = 1e12;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `F(w)` as a 3x3 array of polynomials in `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialMatrix {
    entries: [[Poly; 3]; 3],
}

impl PolynomialMatrix {
    pub fn entry(&self, a: usize, b: usize) -> &Poly {
        &self.entries[a][b]
    }

    pub fn eval(&self, z: Complex64) -> Matrix3<Complex64> {
        Matrix3::from_fn(|a, b| self.entries[a][b].eval(z))
    }

    /// Matrix of the `w^n` coefficients.
    pub fn coefficient(&self, n: usize) -> Matrix3<Complex64> {
        Matrix3::from_fn(|a, b| self.entries[a][b].coeff(n))
    }

    pub fn determinant(&self) -> Poly {
        let e = &self.entries;
        let minor = |r1: usize, r2: usize, c1: usize, c2: usize| {
            &(&e[r1][c1] * &e[r2][c2]) - &(&e[r1][c2] * &e[r2][c1])
        };
        let t0 = &e[0][0] * &minor(1, 2, 1, 2);
        let t1 = &e[0][1] * &minor(1, 2, 0, 2);
        let t2 = &e[0][2] * &minor(1, 2, 0, 1);
        &(&t0 - &t1) + &t2
    }

    /// `det F(w) * conj(det F(conj w))`, whose coefficients are real.
    pub fn determinant_product(&self) -> Poly {
        let d = self.determinant();
        &d * &d.conj_coeffs()
    }

    /// Diagonalises `F` in the eigenbasis of its linear coefficient. Every
    /// coefficient matrix of `F` is a combination of `I` and the potential, so
    /// one real orthogonal `U` makes `U^T F U = diag(f_0, f_1, f_2)`.
    pub fn modal_factors(&self) -> Result<ModalFactors> {
        // linear coefficient is -i phi
        let phi = self.coefficient(1).map(|z| (I * z).re);
        let u = eigen::symmetric_eigen(&phi).1;
        let mut cubic: [Vec<Complex64>; 3] = Default::default();
        for n in 0..4 {
            let cn = self.coefficient(n);
            let d = u.transpose().map(c) * cn * u.map(c);
            let scale = cn.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
            for a in 0..3 {
                for b in 0..3 {
                    if a != b && d[(a, b)].norm() > 1e-12 * scale {
                        return Err(Error::Precondition(format!(
                            "polynomial matrix is not diagonal in the potential eigenbasis (w^{n} off-diagonal {:.2e} of {:.2e})",
                            d[(a, b)].norm(),
                            scale
                        )));
                    }
                }
                cubic[a].push(d[(a, a)]);
            }
        }
        Ok(ModalFactors {
            basis: u,
            cubics: cubic.map(Poly::new),
        })
    }
}

/// `F = U diag(f_k) U^T` with real orthogonal `U` (columns are modes).
#[derive(Debug, Clone, PartialEq)]
pub struct ModalFactors {
    pub basis: Matrix3<f64>,
    pub cubics: [Poly; 3],
}

/// `F(w) = -(w_c - i w)(w^2 m - phi + chi(w)/hbar)` with the susceptibility
/// denominator cancelled.
pub fn build_f(chain: &ChainParams, bath: &BathParams) -> Result<PolynomialMatrix> {
    let model = Model::new(chain.clone(), bath.clone())?;
    Ok(build_f_model(&model))
}

pub(crate) fn build_f_model(model: &Model) -> PolynomialMatrix {
    let wc = model.bath.cutoff;
    let m = UnitsConvention::MASS;
    let phi = model.potential.matrix;
    // chi(w) (w_c - i w) = +- gamma w_c^2 / hbar
    let sign = match model.bath.convention {
        SusceptibilityConvention::Causal => 1.0,
        SusceptibilityConvention::Reversed => -1.0,
    };
    let chi_num = sign * model.bath.gamma * wc * wc / UnitsConvention::HBAR;
    let entries = std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            let p = phi[(a, b)];
            if a == b {
                Poly::new(vec![c(wc * p - chi_num), -I * p, c(-wc * m), I * m])
            } else {
                Poly::new(vec![c(wc * p), -I * p])
            }
        })
    });
    PolynomialMatrix { entries }
}

/// Nine roots of `det F`, grouped in threes by modal factor when obtained
/// from [`find_roots`].
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    /// `|det F(z)| / sum_n |c_n| |z|^n` after polishing.
    pub residuals: Vec<f64>,
    /// Smallest distance between roots that share a partial-fraction denominator.
    pub min_separation: f64,
    /// Smallest distance between any two of the nine roots.
    pub global_separation: f64,
}

impl RootSet {
    pub fn max_modulus(&self) -> f64 {
        self.roots.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// The full degree-18 root set: the roots and their conjugates.
    pub fn with_conjugates(&self) -> Vec<Complex64> {
        self.roots
            .iter()
            .copied()
            .chain(self.roots.iter().map(|z| z.conj()))
            .collect()
    }
}

fn scaled_residual(p: &Poly, z: Complex64) -> f64 {
    let scale: f64 = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, cn)| cn.norm() * z.norm().powi(n as i32))
        .sum();
    p.eval(z).norm() / scale.max(f64::MIN_POSITIVE)
}

fn min_pair_distance(z: &[Complex64]) -> f64 {
    let mut d = f64::INFINITY;
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            d = d.min((z[i] - z[j]).norm());
        }
    }
    d
}

fn check_stable(roots: &[Complex64]) -> Result<()> {
    if let Some(z) = roots.iter().find(|z| !(z.im < 0.0)) {
        return Err(Error::UnstableParameters { re: z.re, im: z.im });
    }
    Ok(())
}

fn check_separation(separation: f64, roots: &[Complex64]) -> Result<()> {
    let threshold = SEPARATION_THRESHOLD * roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !(separation > threshold) {
        return Err(Error::RootMultiplicity {
            separation,
            threshold,
        });
    }
    Ok(())
}

/// Roots of `det F` through its modal factorisation: three cubics, each
/// solved by companion eigenvalues and Newton polish.
pub fn find_roots(f: &PolynomialMatrix) -> Result<RootSet> {
    let modal = f.modal_factors()?;
    let det = f.determinant();
    let mut roots = Vec::with_capacity(9);
    let mut min_sep = f64::INFINITY;
    for cubic in &modal.cubics {
        let r = cubic.roots()?;
        if r.len() != 3 {
            return Err(Error::RootFinding(format!("modal factor has {} roots", r.len())));
        }
        min_sep = min_sep.min(min_pair_distance(&r));
        roots.extend(r);
    }
    finish_root_set(&det, roots, min_sep)
}

/// Roots of `det F` taken directly from its degree-9 companion matrix. Every
/// pair of roots enters the partial fractions, so all nine must be simple.
pub fn find_roots_literal(f: &PolynomialMatrix) -> Result<RootSet> {
    let det = f.determinant();
    if det.degree() != 9 {
        return Err(Error::RootFinding(format!("det F has degree {}", det.degree())));
    }
    let roots = det.roots()?;
    let sep = min_pair_distance(&roots);
    // a separation below the forward-error level of the roots is not resolved
    let dprime = det.derivative();
    let forward = roots
        .iter()
        .map(|z| {
            let scale: f64 = det
                .coeffs()
                .iter()
                .enumerate()
                .map(|(n, cn)| cn.norm() * z.norm().powi(n as i32))
                .sum();
            9.0 * f64::EPSILON * scale / dprime.eval(*z).norm()
        })
        .fold(0.0, f64::max);
    if !(forward < 1e-3 * sep) {
        let threshold = (SEPARATION_THRESHOLD * roots.iter().map(|z| z.norm()).fold(0.0, f64::max))
            .max(1e3 * forward);
        return Err(Error::RootMultiplicity {
            separation: sep,
            threshold,
        });
    }
    finish_root_set(&det, roots, sep)
}

fn finish_root_set(det: &Poly, roots: Vec<Complex64>, min_separation: f64) -> Result<RootSet> {
    check_stable(&roots)?;
    check_separation(min_separation, &roots)?;
    let residuals: Vec<f64> = roots.iter().map(|z| scaled_residual(det, *z)).collect();
    if let Some(r) = residuals.iter().find(|r| !(**r <= 1e-10)) {
        return Err(Error::RootFinding(format!("root residual {r:e} after polishing")));
    }
    Ok(RootSet {
        global_separation: min_pair_distance(&roots),
        roots,
        residuals,
        min_separation,
    })
}

/// `psi(1 + i z / 2 pi T)`, switching to `ln w - 1/2w` far out.
fn bracket_psi(z: Complex64, temperature: f64) -> Result<Complex64> {
    let x = z * (UnitsConvention::HBAR / (2.0 * PI * UnitsConvention::K_B * temperature));
    let w = c(1.0) + I * x;
    if x.norm() > LOW_TEMPERATURE_GUARD {
        Ok(w.ln() - 0.5 / w)
    } else {
        digamma(w)
    }
}

/// The three moment weights `p(w)`: `1` (XX), `m^2 w^2` (PP), `i m w` (XP).
fn weights(z: Complex64) -> [Complex64; 3] {
    let m = UnitsConvention::MASS;
    [c(1.0), z * z * (m * m), I * z * m]
}

/// One thermal integral `(1/2pi) int w coth(w/2T) g(w) dw` given the
/// partial-fraction data of `g`.
fn thermal_sum(
    t: f64,
    a: &[Complex64],
    r: &[Complex64],
    psi_r: &[Complex64],
    b: &[Complex64],
    s: &[Complex64],
    psi_s: &[Complex64],
) -> Complex64 {
    let kt = UnitsConvention::K_B * t / UnitsConvention::HBAR;
    let sum_a: Complex64 = a.iter().sum();
    let mut dig = c(0.0);
    for j in 0..a.len() {
        dig += a[j] * r[j] * psi_r[j];
    }
    for j in 0..b.len() {
        dig += b[j] * s[j] * psi_s[j];
    }
    -2.0 * I * kt * sum_a - dig / PI
}

fn validate_temperatures(bath: &BathParams) -> Result<()> {
    if bath.temperatures.contains(&0.0) {
        return Err(Error::ZeroTemperature);
    }
    Ok(())
}

fn assemble(blocks: [Matrix3<Complex64>; 3], prefactor: f64) -> Result<CovarianceMatrix> {
    let [xx, pp, xp] = blocks.map(|m| m * c(prefactor));
    let scale = xx
        .iter()
        .chain(pp.iter())
        .chain(xp.iter())
        .map(|z| z.re.abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let worst = xx
        .iter()
        .chain(pp.iter())
        .chain(xp.iter())
        .map(|z| z.im.abs())
        .fold(0.0, f64::max);
    let relative = worst / scale;
    if !(relative <= IMAGINARY_TOLERANCE) {
        return Err(Error::ComplexResidueSum { relative });
    }
    let xp = xp.map(|z| z.re);
    // the diagonal of C_XP is zero by stationarity; only rounding is removed
    let cov = CovarianceMatrix::from_blocks(xx.map(|z| z.re), xp, pp.map(|z| z.re));
    cov.check_invariants()?;
    Ok(cov)
}

/// Stationary covariance from the modal residue sums. Requires every bath
/// temperature strictly positive.
pub fn steady_covariance_residue(chain: &ChainParams, bath: &BathParams) -> Result<CovarianceMatrix> {
    validate_temperatures(bath)?;
    let model = Model::new(chain.clone(), bath.clone())?;
    let f = build_f_model(&model);
    let modal = f.modal_factors()?;
    let roots = find_roots(&f)?;
    let u = modal.basis;
    let temps = bath.temperatures;

    let r: Vec<[Complex64; 3]> = (0..3)
        .map(|k| [roots.roots[3 * k], roots.roots[3 * k + 1], roots.roots[3 * k + 2]])
        .collect();
    let fprime: Vec<Poly> = modal.cubics.iter().map(|p| p.derivative()).collect();
    let fsharp: Vec<Poly> = modal.cubics.iter().map(|p| p.conj_coeffs()).collect();
    let dr: Vec<[Complex64; 3]> = (0..3).map(|k| r[k].map(|z| fprime[k].eval(z))).collect();

    let mut psi = [[[c(0.0); 3]; 3]; 3]; // [beta][k][j]
    for (beta, t) in temps.iter().enumerate() {
        for k in 0..3 {
            for j in 0..3 {
                psi[beta][k][j] = bracket_psi(r[k][j], *t)?;
            }
        }
    }

    // modal integrals I[beta][k][l][moment]
    let mut modal_int = [[[[c(0.0); 3]; 3]; 3]; 3];
    for k in 0..3 {
        for l in 0..3 {
            let s = r[l].map(|z| z.conj());
            let mut a = [[c(0.0); 3]; 3]; // [moment][j]
            let mut b = [[c(0.0); 3]; 3];
            for j in 0..3 {
                let wa = weights(r[k][j]);
                let da = dr[k][j] * fsharp[l].eval(r[k][j]);
                let wb = weights(s[j]);
                let db = modal.cubics[k].eval(s[j]) * dr[l][j].conj();
                for q in 0..3 {
                    a[q][j] = wa[q] / da;
                    b[q][j] = wb[q] / db;
                }
            }
            for (beta, t) in temps.iter().enumerate() {
                let psi_s = psi[beta][l].map(|z| z.conj());
                for q in 0..3 {
                    modal_int[beta][k][l][q] =
                        thermal_sum(*t, &a[q], &r[k], &psi[beta][k], &b[q], &s, &psi_s);
                }
            }
        }
    }

    let mut blocks = [Matrix3::<Complex64>::zeros(); 3];
    for (q, block) in blocks.iter_mut().enumerate() {
        for al in 0..3 {
            for de in 0..3 {
                let mut acc = c(0.0);
                for beta in 0..3 {
                    for k in 0..3 {
                        for l in 0..3 {
                            let w = u[(al, k)] * u[(beta, k)] * u[(beta, l)] * u[(de, l)];
                            acc += w * modal_int[beta][k][l][q];
                        }
                    }
                }
                block[(al, de)] = acc;
            }
        }
    }
    assemble(blocks, prefactor(bath))
}

fn prefactor(bath: &BathParams) -> f64 {
    // hbar gamma w_c^2 from |w_c - i w|^2 J(w) = gamma w_c^2 w
    UnitsConvention::HBAR * bath.gamma * bath.cutoff * bath.cutoff
}

fn adjugate(m: &Matrix3<Complex64>) -> Matrix3<Complex64> {
    Matrix3::from_fn(|i, j| {
        // adj[i][j] = cofactor(j, i)
        let rows: Vec<usize> = (0..3).filter(|&r| r != j).collect();
        let cols: Vec<usize> = (0..3).filter(|&q| q != i).collect();
        let minor = m[(rows[0], cols[0])] * m[(rows[1], cols[1])]
            - m[(rows[0], cols[1])] * m[(rows[1], cols[0])];
        if (i + j) % 2 == 0 {
            minor
        } else {
            -minor
        }
    })
}

/// Stationary covariance from the nine roots of `det F` and the adjugate of
/// `F` at those roots. Numerically reliable only when the nine roots are well
/// separated; near-degenerate sets are refused with a root-multiplicity error.
pub fn steady_covariance_adjugate(chain: &ChainParams, bath: &BathParams) -> Result<CovarianceMatrix> {
    validate_temperatures(bath)?;
    let model = Model::new(chain.clone(), bath.clone())?;
    let f = build_f_model(&model);
    let det = f.determinant();
    let lead = det.leading();
    let rs = find_roots_literal(&f)?;
    let z = &rs.roots;
    let n = z.len();
    let s: Vec<Complex64> = z.iter().map(|v| v.conj()).collect();

    // D'(z_j), D^#(z_j), D(s_j), D^#'(s_j) from root products
    let dprime: Vec<Complex64> = (0..n)
        .map(|j| lead * (0..n).filter(|&i| i != j).map(|i| z[j] - z[i]).product::<Complex64>())
        .collect();
    let dsharp: Vec<Complex64> = (0..n)
        .map(|j| lead.conj() * (0..n).map(|i| z[j] - s[i]).product::<Complex64>())
        .collect();
    let d_at_s: Vec<Complex64> = dsharp.iter().map(|v| v.conj()).collect();
    let dsharp_prime_at_s: Vec<Complex64> = dprime.iter().map(|v| v.conj()).collect();

    // adj F(z_j) and adj F^#(z_j) = conj(adj F(conj z_j))
    let adj_z: Vec<Matrix3<Complex64>> = z.iter().map(|v| adjugate(&f.eval(*v))).collect();
    let adj_s: Vec<Matrix3<Complex64>> = s.iter().map(|v| adjugate(&f.eval(*v))).collect();
    let adj_sharp_z: Vec<Matrix3<Complex64>> = s.iter().map(|v| adjugate(&f.eval(*v)).map(|x| x.conj())).collect();
    let adj_sharp_s: Vec<Matrix3<Complex64>> = adj_z.iter().map(|m| m.map(|x| x.conj())).collect();

    let mut blocks = [Matrix3::<Complex64>::zeros(); 3];
    for (beta, t) in bath.temperatures.iter().enumerate() {
        let psi_r: Vec<Complex64> = z.iter().map(|v| bracket_psi(*v, *t)).collect::<Result<_>>()?;
        let psi_s: Vec<Complex64> = psi_r.iter().map(|v| v.conj()).collect();
        for al in 0..3 {
            for de in 0..3 {
                let mut a = [vec![c(0.0); n], vec![c(0.0); n], vec![c(0.0); n]];
                let mut b = a.clone();
                for j in 0..n {
                    let na = adj_z[j][(al, beta)] * adj_sharp_z[j][(de, beta)];
                    let nb = adj_s[j][(al, beta)] * adj_sharp_s[j][(de, beta)];
                    let wa = weights(z[j]);
                    let wb = weights(s[j]);
                    for q in 0..3 {
                        a[q][j] = wa[q] * na / (dprime[j] * dsharp[j]);
                        b[q][j] = wb[q] * nb / (d_at_s[j] * dsharp_prime_at_s[j]);
                    }
                }
                for q in 0..3 {
                    blocks[q][(al, de)] += thermal_sum(*t, &a[q], z, &psi_r, &b[q], &s, &psi_s);
                }
            }
        }
    }
    assemble(blocks, prefactor(bath))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2_bath(t_ratio: f64) -> BathParams {
        BathParams::equal(UnitsConvention::natural().temperature(t_ratio), 0.01, 50.0).unwrap()
    }

    #[test]
    fn determinant_leading_coefficient_has_unit_modulus() {
        let f = build_f(&ChainParams::new([1.0, 1.3, 0.8], 0.07).unwrap(), &fig2_bath(0.4)).unwrap();
        let d = f.determinant();
        assert_eq!(d.degree(), 9);
        // (i m)^3
        assert!((d.leading() - Complex64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn static_value_is_cutoff_times_bare_stiffness() {
        let chain = ChainParams::new([1.0, 1.3, 0.8], 0.07).unwrap();
        let f = build_f(&chain, &fig2_bath(0.4)).unwrap();
        let f0 = f.eval(c(0.0));
        let want = chain.bare_stiffness() * 50.0;
        for (g, w) in f0.iter().zip(want.iter()) {
            assert!(g.im == 0.0);
            assert!((g.re - w).abs() < 1e-12 * w.abs().max(1.0));
        }
    }

    #[test]
    fn matrix_matches_inverse_response() {
        let chain = ChainParams::new([1.0, 2.0, 3.0], 0.09).unwrap();
        let bath = BathParams::new([0.3, 0.2, 0.1], 0.05, 20.0).unwrap();
        let model = Model::new(chain, bath).unwrap();
        let f = build_f_model(&model);
        for w in [0.0, 0.4, 1.7, 33.0] {
            let want = model.inverse_response(w) * Complex64::new(20.0, -w);
            assert!((f.eval(c(w)) - want).norm() < 1e-11 * want.norm());
        }
    }

    #[test]
    fn product_polynomial_has_real_coefficients() {
        let f = build_f(&ChainParams::new([1.0, 1.5, 2.0], 0.1).unwrap(), &fig2_bath(0.3)).unwrap();
        let p = f.determinant_product();
        assert_eq!(p.degree(), 18);
        let scale = p.max_coeff();
        assert!(p.coeffs().iter().all(|z| z.im.abs() <= 1e-14 * scale));
    }

    #[test]
    fn uncoupled_determinant_is_product_of_cubics() {
        let chain = ChainParams::new([1.0, 1.5, 2.0], 0.0).unwrap();
        let bath = BathParams::equal(0.15, 0.3, 2.0).unwrap();
        let f = build_f(&chain, &bath).unwrap();
        let literal = find_roots_literal(&f);
        let modal = find_roots(&f).unwrap();
        let mut diag_roots = Vec::new();
        for a in 0..3 {
            diag_roots.extend(f.entry(a, a).roots().unwrap());
        }
        for z in &modal.roots {
            let d = diag_roots.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-10 * z.norm());
        }
        // well separated here, so the literal route must agree as well
        let literal = literal.unwrap();
        for z in &literal.roots {
            let d = diag_roots.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-8 * z.norm(), "{z}: {d}");
        }
    }

    #[test]
    fn cubic_roots_have_small_residual() {
        let f = build_f(&ChainParams::resonant(0.0).unwrap(), &fig2_bath(0.3)).unwrap();
        let p = f.entry(0, 0);
        for z in p.roots().unwrap() {
            assert!(p.eval(z).norm() < 1e-12 * p.max_coeff(), "{}", p.eval(z).norm());
        }
    }

    #[test]
    fn fig2_roots_in_lower_half_plane() {
        let f = build_f(&ChainParams::resonant(0.05).unwrap(), &fig2_bath(0.4)).unwrap();
        let rs = find_roots(&f).unwrap();
        assert_eq!(rs.roots.len(), 9);
        assert!(rs.roots.iter().all(|z| z.im < 0.0));
        assert!(rs.residuals.iter().all(|r| *r <= 1e-10));
        let all = rs.with_conjugates();
        let p = f.determinant_product();
        for z in &all {
            assert!(scaled_residual(&p, *z) < 1e-10);
        }
        // the near-cutoff roots of different modes nearly coincide here
        assert!(rs.global_separation < SEPARATION_THRESHOLD * rs.max_modulus());
        assert!(matches!(find_roots_literal(&f), Err(Error::RootMultiplicity { .. })));
    }

    #[test]
    fn zero_temperature_refused() {
        let bath = BathParams::new([0.1, 0.0, 0.1], 0.01, 50.0).unwrap();
        assert_eq!(
            steady_covariance_residue(&ChainParams::resonant(0.05).unwrap(), &bath),
            Err(Error::ZeroTemperature)
        );
    }

    #[test]
    fn reversed_sign_is_unstable_or_distinct() {
        let chain = ChainParams::resonant(0.05).unwrap();
        let bath = fig2_bath(0.4);
        let a = steady_covariance_residue(&chain, &bath).unwrap();
        let rev = steady_covariance_residue(
            &chain,
            &bath.clone().with_convention(SusceptibilityConvention::Reversed),
        );
        if let Ok(b) = rev {
            assert!(b.max_relative_difference(&a, 1e-3) > 1e-3);
        }
    }

    #[test]
    fn modal_and_adjugate_routes_agree_when_separated() {
        let chain = ChainParams::new([1.0, 1.5, 2.2], 0.1).unwrap();
        let bath = BathParams::new([0.4, 0.25, 0.1], 0.3, 2.0).unwrap();
        let m = steady_covariance_residue(&chain, &bath).unwrap();
        let a = steady_covariance_adjugate(&chain, &bath).unwrap();
        assert!(a.deviation(&m, 1e-10, 1e-8) <= 1.0, "{}", a.deviation(&m, 1e-10, 1e-8));
    }
}
