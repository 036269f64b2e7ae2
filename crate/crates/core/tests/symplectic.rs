mod common;

use std::f64::consts::PI;

use gausscap::symplectic::{
    kernel_symplectic_spectrum, standard_form, vacuum_form_frequency, vacuum_form_slobodeckij, williamson_eigenvalues,
    CovarianceForm, Ordering, SampledFunction, StationaryKernel, VACUUM_FLOOR,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

use common::{bump, derivative, plateau, simpson};

/// `exp(H Delta)` for symmetric `H` preserves `Delta` by congruence.
fn symplectic_from(h: &DMatrix<f64>, delta: &DMatrix<f64>) -> DMatrix<f64> {
    (h * delta).exp()
}

fn symmetric(entries: &[f64], n: usize, scale: f64) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |i, j| entries[i * n + j]);
    (&a + a.transpose()) * (0.5 * scale)
}

#[test]
fn vacuum_and_thermal_states() {
    let vac = CovarianceForm::standard(DMatrix::identity(4, 4) * 0.5, Ordering::Xxpp).unwrap();
    let s = williamson_eigenvalues(&vac).unwrap();
    assert!(s.lambdas.iter().all(|l| (l - 0.5).abs() < 1e-12));
    let bad = CovarianceForm::standard(DMatrix::identity(2, 2) * 0.3, Ordering::Xpxp).unwrap();
    assert!(!bad.satisfies_state_condition());
}

#[test]
fn symplectic_form_agrees_with_time_derivative() {
    let (a, b, n) = (-3.0, 3.0, 2001);
    let fb = bump(0.0, 1.2);
    let gb = bump(0.4, 1.0);
    let f = SampledFunction::sample(&fb, a, b, n).unwrap();
    let g = SampledFunction::sample(&gb, a, b, n).unwrap();
    let forms = vacuum_form_frequency(&f, &g).unwrap();
    let oracle = simpson(|t| fb(t) * derivative(&gb, t, 1e-3), -1.2, 1.4, 4000);
    assert!((forms.delta - oracle).abs() <= 1e-5 * oracle.abs().max(1e-3), "{} vs {oracle}", forms.delta);
}

#[test]
fn plateau_pair_agrees_across_forms() {
    let p = plateau(0.0, 1.0, 2.0);
    let f = SampledFunction::sample(&p, -3.0, 3.0, 3001).unwrap();
    let j = vacuum_form_frequency(&f, &f).unwrap().j;
    let s = vacuum_form_slobodeckij(&f, &f).unwrap();
    assert!((s - j).abs() <= 1e-4 * j);
}

#[test]
fn longer_horizon_doubles_the_cluster() {
    let count = |t: f64| {
        let k = StationaryKernel::flat_band(2.0, PI, t, 256).unwrap();
        kernel_symplectic_spectrum(&k).unwrap().count_near(2.5, 0.1)
    };
    let (a, b) = (count(10.0), count(20.0));
    assert!((b as f64 / a as f64 - 2.0).abs() < 0.4, "{a} -> {b}");
}

#[test]
fn larger_noise_dominates_eigenvalue_wise() {
    let lo = kernel_symplectic_spectrum(&StationaryKernel::flat_band(0.5, 2.0, 15.0, 200).unwrap()).unwrap();
    let hi = kernel_symplectic_spectrum(&StationaryKernel::flat_band(1.5, 2.0, 15.0, 200).unwrap()).unwrap();
    for (a, b) in lo.lambdas.iter().zip(&hi.lambdas) {
        assert!(b >= &(a - 1e-10));
    }
    assert!(lo.lambdas.iter().all(|&l| l >= VACUUM_FLOOR - 1e-10));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn spectrum_is_symplectic_invariant(
        lambdas in prop::collection::vec(0.5..4.0f64, 2),
        h in prop::collection::vec(-1.0..1.0f64, 16),
        ordering_ix in 0usize..2,
    ) {
        let ordering = [Ordering::Xpxp, Ordering::Xxpp][ordering_ix];
        let delta = standard_form(2, ordering);
        let diag = match ordering {
            Ordering::Xpxp => vec![lambdas[0], lambdas[0], lambdas[1], lambdas[1]],
            Ordering::Xxpp => vec![lambdas[0], lambdas[1], lambdas[0], lambdas[1]],
        };
        let base = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
        let s = symplectic_from(&symmetric(&h, 4, 0.6), &delta);
        prop_assert!((s.transpose() * &delta * &s - &delta).abs().max() < 1e-10);
        let alpha = s.transpose() * &base * &s;
        let alpha = (&alpha + alpha.transpose()) * 0.5;
        let spec = williamson_eigenvalues(&CovarianceForm::new(alpha, delta).unwrap()).unwrap();
        let mut expect = lambdas.clone();
        expect.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (got, want) in spec.lambdas.iter().zip(&expect) {
            prop_assert!((got - want).abs() <= 1e-8 * want.max(1.0), "{:?} vs {:?}", spec.lambdas, expect);
        }
        prop_assert!(spec.state_condition);
    }

    #[test]
    fn self_pairing_has_no_symplectic_part(c in -0.5..0.5f64, w in 0.6..1.8f64) {
        let f = SampledFunction::sample(bump(c, w), -3.0, 3.0, 1201).unwrap();
        let forms = vacuum_form_frequency(&f, &f).unwrap();
        prop_assert_eq!(forms.delta, 0.0);
        prop_assert!(forms.j > 0.0);
    }
}
