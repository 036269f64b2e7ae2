mod common;

use approx::assert_relative_eq;
use gausscap::channel_models::{
    capacity_single_mode, chi_capacity_multimode, chi_objective, CMatrix, MultimodeChannel, MultimodeOptions,
    SingleModeChannel, SingleModeModel,
};
use gausscap::waterfill::{waterfill_discrete, ModeSpec};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use common::{entropy, golden_max};

const GAUGE_MODELS: [SingleModeModel; 3] =
    [SingleModeModel::Attenuator, SingleModeModel::Amplifier, SingleModeModel::ClassicalNoise];

fn gain_for(model: SingleModeModel, u: f64) -> f64 {
    match model {
        SingleModeModel::Attenuator => 0.05 + 0.95 * u,
        SingleModeModel::Amplifier => 1.0 + 3.0 * u,
        SingleModeModel::ClassicalNoise => 1.0,
        _ => 0.2 + 2.0 * u,
    }
}

fn random_psd(entries: &[f64], s: usize, scale: f64) -> CMatrix {
    let a = CMatrix::from_fn(s, s, |i, j| Complex64::new(entries[2 * (i * s + j)], entries[2 * (i * s + j) + 1]));
    (&a * a.adjoint()) * Complex64::new(scale, 0.0)
}

#[test]
fn block_diagonal_is_additive() {
    let ch = MultimodeChannel::diagonal(&[(0.9, 0.3), (1.3, 0.0)], &[1.0, 2.5]).unwrap();
    let r = chi_capacity_multimode(&ch, 2.0, &MultimodeOptions::default()).unwrap();
    let block = |k: f64, n: f64, eps: f64, x: f64| entropy(k * k * x / eps + n) - entropy(n);
    let (_, oracle) = golden_max(|x| block(0.9, 0.3, 1.0, x) + block(1.3, 0.0, 2.5, 2.0 - x), 0.0, 2.0, 300);
    assert!((r.value - oracle).abs() <= 1e-6);
    let off = r.nu[(0, 1)].norm().max(r.nu[(1, 0)].norm());
    assert!(off <= 1e-6, "off-diagonal {off}");
}

#[test]
fn photon_energy_weights_reproduce_waterfilling() {
    let (w1, w2, e) = (1.0, 2.5, 1.5);
    let ch = MultimodeChannel::diagonal(&[(1.0, 0.2), (0.8, 0.0)], &[w1, w2]).unwrap();
    let r = chi_capacity_multimode(&ch, e, &MultimodeOptions::default()).unwrap();
    let modes = [ModeSpec::new(w1, 1.0, 0.2, 1.0).unwrap(), ModeSpec::new(w2, 0.8, 0.0, 1.0).unwrap()];
    let wf = waterfill_discrete(&modes, e, 1.0).unwrap();
    assert_relative_eq!(r.value, wf.capacity, epsilon = 1e-6);
}

#[test]
fn invalid_noise_matrix_is_rejected() {
    let k = CMatrix::from_element(1, 1, Complex64::new(2.0, 0.0));
    let mu = CMatrix::from_element(1, 1, Complex64::new(-2.0, 0.0));
    let eps = CMatrix::identity(1, 1);
    assert!(MultimodeChannel::new(k, mu, eps).is_err());
}

#[test]
fn optimiser_is_deterministic_for_a_seed() {
    let ch = MultimodeChannel::diagonal(&[(0.7, 0.1), (1.1, 0.4), (0.9, 0.0)], &[1.0, 1.5, 2.0]).unwrap();
    let opts = MultimodeOptions { seed: 42, ..Default::default() };
    let a = chi_capacity_multimode(&ch, 1.0, &opts).unwrap();
    let b = chi_capacity_multimode(&ch, 1.0, &opts).unwrap();
    assert_eq!(a, b);
    let _: &DMatrix<Complex64> = &a.nu;
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn single_mode_monotone(model_ix in 0usize..3, u in 0.0..1.0f64, n in 0.0..3.0f64, e in 0.0..5.0f64, de in 0.0..2.0f64, dn in 0.0..2.0f64) {
        let model = GAUGE_MODELS[model_ix];
        let k = gain_for(model, u);
        let ch = SingleModeChannel::new(model, k, n).unwrap();
        let c = capacity_single_mode(&ch, e).unwrap();
        prop_assert!(capacity_single_mode(&ch, e + de).unwrap() >= c - 1e-12);
        let noisier = SingleModeChannel::new(model, k, n + dn).unwrap();
        prop_assert!(capacity_single_mode(&noisier, e).unwrap() <= c + 1e-12);
    }

    #[test]
    fn attenuator_matches_classical_quantum_formula(u in 0.0..1.0f64, n in 0.0..3.0f64, e in 0.0..5.0f64) {
        let ch = SingleModeChannel::new(SingleModeModel::Attenuator, gain_for(SingleModeModel::Attenuator, u), n).unwrap();
        let c = capacity_single_mode(&ch, e).unwrap();
        prop_assert!((c - (entropy(e + n) - entropy(n))).abs() <= 1e-10 * c.max(1.0));
    }

    #[test]
    fn objective_is_midpoint_concave(
        a in prop::collection::vec(-1.0..1.0f64, 8),
        b in prop::collection::vec(-1.0..1.0f64, 8),
        k in 0.3..1.5f64,
        n in 0.0..1.0f64,
    ) {
        let ch = MultimodeChannel::diagonal(&[(k, n), (1.0, 0.5 * n)], &[1.0, 1.0]).unwrap();
        let (x, y) = (random_psd(&a, 2, 0.7), random_psd(&b, 2, 0.7));
        let mid = (&x + &y) * Complex64::new(0.5, 0.0);
        let lhs = chi_objective(&ch, &mid).unwrap();
        let rhs = 0.5 * (chi_objective(&ch, &x).unwrap() + chi_objective(&ch, &y).unwrap());
        prop_assert!(lhs >= rhs - 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn diagonal_channels_have_diagonal_optimisers(
        k1 in 0.3..1.5f64, k2 in 0.3..1.5f64, n1 in 0.0..1.0f64, n2 in 0.0..1.0f64,
        e1 in 0.5..2.0f64, e2 in 0.5..2.0f64, e in 0.1..3.0f64,
    ) {
        let ch = MultimodeChannel::diagonal(&[(k1, n1), (k2, n2)], &[e1, e2]).unwrap();
        let r = chi_capacity_multimode(&ch, e, &MultimodeOptions::default()).unwrap();
        prop_assert!(r.nu[(0, 1)].norm() <= 1e-6);
        let block = |k: f64, n: f64, eps: f64, x: f64| entropy(k * k * x / eps + n) - entropy(n);
        let (_, oracle) = golden_max(|x| block(k1, n1, e1, x) + block(k2, n2, e2, e - x), 0.0, e, 200);
        prop_assert!((r.value - oracle).abs() <= 1e-6);
    }
}
