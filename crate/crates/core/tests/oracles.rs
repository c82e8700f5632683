//! Fixed reference values and limiting cases.

use num_complex::Complex64;
use tripartite::entanglement::{classify, maximize_certificate_margin, ClassifyOptions, EntanglementClass};
use tripartite::gaussian::symplectic_eigenvalues;
use tripartite::model::{BathParams, ChainParams, Model, RatioParams, UnitsConvention};
use tripartite::quad_engine::{self, QuadratureSettings};
use tripartite::residue;
use tripartite::sweep::{self, Engine};
use tripartite::validate;

fn residue_sigma(p: &RatioParams) -> tripartite::covariance::CovarianceMatrix {
    let m = Model::from_ratios(p).unwrap();
    residue::steady_covariance_residue(&m.chain, &m.bath).unwrap()
}

/// Optimal full-separability margins from an external SDP solver (interior point, 1e-11).
#[test]
fn certificate_optimum_matches_sdp_solver() {
    let d = RatioParams::default();
    let cases = [
        (RatioParams { coupling: 0.05, temperature: 0.47, ..d }, 0.0006450334181108353),
        (RatioParams { coupling: 0.05, temperature: 0.6, ..d }, 0.020362523060038922),
        (RatioParams { coupling: 0.05, temperature: 1.0, ..d }, 0.1275102364154782),
        (RatioParams { coupling: 0.1, temperature: 0.9, ..d }, 0.07098377642456058),
        (
            RatioParams { frequencies: [1.0, 2.0, 3.0], coupling: 0.08, temperature: 0.35, delta_temperature: 0.5, ..d },
            -0.0019881795182610743,
        ),
        (
            RatioParams { frequencies: [1.0, 2.5, 1.0], coupling: 0.1, temperature: 0.35, delta_temperature: -0.6, ..d },
            -0.005035878475728712,
        ),
        (RatioParams { coupling: 0.01, temperature: 0.05, gamma: 0.01, ..d }, 0.0011915773337358743),
    ];
    for (p, want) in cases {
        let (got, _) = maximize_certificate_margin(&residue_sigma(&p)).unwrap();
        assert!((got - want).abs() < 1e-9, "{p:?}: {got} vs {want}");
    }
}

#[test]
fn fig2_ground_state_sample_is_c1() {
    let p = RatioParams { coupling: 0.05, temperature: 0.05, gamma: 0.01, cutoff: 50.0, ..RatioParams::default() };
    for engine in [Engine::Residue, Engine::Quadrature] {
        let (_, rep) = sweep::evaluate_cell(&p, engine, &QuadratureSettings::default(), &ClassifyOptions::default()).unwrap();
        assert_eq!(rep.class, EntanglementClass::C1);
    }
}

#[test]
fn uncoupled_equal_temperature_is_c5() {
    for t in [0.02, 0.35, 1.0] {
        let p = RatioParams { coupling: 0.0, temperature: t, ..RatioParams::default() };
        let rep = classify(&residue_sigma(&p), &ClassifyOptions::default()).unwrap();
        assert_eq!(rep.class, EntanglementClass::C5, "T = {t}");
        assert!(rep.certificate().is_some());
    }
}

#[test]
fn weakly_damped_cold_chain_is_near_its_ground_state() {
    let chain = ChainParams::resonant(0.05).unwrap();
    let t = UnitsConvention::natural().temperature(1e-3);
    let model = Model::new(chain.clone(), BathParams::equal(t, 1e-4, 50.0).unwrap()).unwrap();
    let s = residue::steady_covariance_residue(&model.chain, &model.bath).unwrap();
    assert!(s.max_relative_difference(&validate::ground_state_covariance(&chain), 1e-6) < 1e-3);
    for nu in symplectic_eigenvalues(s.matrix()).unwrap() {
        assert!((nu - 0.5).abs() < 1e-3, "{nu}");
    }
}

#[test]
fn hot_uncoupled_chain_obeys_equipartition() {
    let chain = ChainParams::new([1.0, 2.0, 3.0], 0.0).unwrap();
    let t = UnitsConvention::natural().temperature(20.0);
    let model = Model::new(chain.clone(), BathParams::equal(t, 0.01, 50.0).unwrap()).unwrap();
    let q = quad_engine::solve(&model, &QuadratureSettings::default()).unwrap().covariance;
    assert!(validate::equipartition_error(&q, &chain, t) < 0.02);
}

#[test]
fn digamma_agrees_with_binet_integral() {
    let z = validate::digamma_samples(100, 3);
    assert!(validate::digamma_max_error(&z).unwrap() < 1e-12);
    let psi = validate::binet_digamma(Complex64::new(2.0, 0.0)).unwrap();
    assert!((psi.re - (1.0 - 0.577_215_664_901_532_9)).abs() < 1e-14);
}

#[test]
fn dispersion_relation_recovers_real_part() {
    assert!(validate::kramers_kronig_max_error(20, 0.01, 50.0).unwrap() < 1e-4);
}
