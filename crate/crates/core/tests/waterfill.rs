mod common;

use approx::assert_relative_eq;
use gausscap::waterfill::{total_energy, waterfill_discrete, ModeSpec};
use proptest::prelude::*;

use common::{brute_force_allocation, entropy, BruteMode};

fn arb_modes() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((0.1..4.0f64, 0.2..2.0f64, 0.0..3.0f64), 1..5)
}

fn build(raw: &[(f64, f64, f64)], hbar: f64) -> Vec<ModeSpec<f64>> {
    raw.iter().map(|&(w, k, n)| ModeSpec::new(w, k, n, hbar).unwrap()).collect()
}

#[test]
fn two_modes_against_hand_sum() {
    let modes = build(&[(1.0, 1.0, 0.0), (2.0, 0.8, 0.5)], 1.0);
    let sol = waterfill_discrete(&modes, 2.0, 1.0).unwrap();
    let hand: f64 = modes
        .iter()
        .zip(&sol.allocations)
        .map(|(m, &a)| entropy(m.k_abs * m.k_abs * a + m.noise_n) - entropy(m.noise_n))
        .sum();
    assert_relative_eq!(sol.capacity, hand, max_relative = 1e-12);
}

#[test]
fn three_heterogeneous_modes_match_grid_search() {
    let raw = [(0.5, 1.2, 0.1), (1.5, 0.7, 0.0), (3.0, 1.0, 2.0)];
    let modes = build(&raw, 1.0);
    let sol = waterfill_discrete(&modes, 3.0, 1.0).unwrap();
    let brute: Vec<BruteMode> = raw
        .iter()
        .map(|&(w, k, n)| BruteMode { quantum: w, gain2: k * k, noise: n })
        .collect();
    let (oracle, _) = brute_force_allocation(&brute, 3.0, 1000);
    assert!((sol.capacity - oracle).abs() <= 1e-5);
    assert_relative_eq!(total_energy(&modes, sol.theta, 1.0), 3.0, max_relative = 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kt_certificate_and_water_level(raw in arb_modes(), e in 0.01..10.0f64) {
        let modes = build(&raw, 1.0);
        let sol = waterfill_discrete(&modes, e, 1.0).unwrap();
        prop_assert!(sol.kt_violation(&modes) <= 1e-8);
        prop_assert!((sol.energy_used - e).abs() <= 1e-8 * e);
        for (m, (&a, &on)) in modes.iter().zip(sol.allocations.iter().zip(&sol.active)) {
            prop_assert_eq!(on, a > 0.0);
            if on {
                let level = 1.0 / (sol.theta * m.hbar * m.omega / (m.k_abs * m.k_abs)).exp_m1();
                prop_assert!((m.k_abs * m.k_abs * a + m.noise_n - level).abs() <= 1e-10 * level.max(1.0));
            }
        }
    }

    #[test]
    fn energy_decreases_in_theta(raw in arb_modes(), a in 0.01..5.0f64, b in 0.01..5.0f64) {
        let modes = build(&raw, 1.0);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(hi - lo > 1e-6);
        let (el, eh) = (total_energy(&modes, lo, 1.0), total_energy(&modes, hi, 1.0));
        prop_assert!(el >= eh);
        if eh > 0.0 {
            prop_assert!(el > eh);
        }
    }

    #[test]
    fn rescaling_quanta_and_budget(raw in arb_modes(), e in 0.05..5.0f64, s in 0.1..10.0f64) {
        let base = waterfill_discrete(&build(&raw, 1.0), e, 1.0).unwrap();
        let scaled = waterfill_discrete(&build(&raw, s), e * s, 1.0).unwrap();
        prop_assert!((base.capacity - scaled.capacity).abs() <= 1e-8 * base.capacity.max(1.0));
        prop_assert!((base.theta - scaled.theta * s).abs() <= 1e-7 * base.theta);
        for (a, b) in base.allocations.iter().zip(&scaled.allocations) {
            prop_assert!((a - b).abs() <= 1e-7 * a.max(1.0));
        }
    }

    #[test]
    fn brute_force_equivalence(raw in arb_modes(), e in 0.05..3.0f64) {
        let modes = build(&raw, 1.0);
        let sol = waterfill_discrete(&modes, e, 1.0).unwrap();
        let brute: Vec<BruteMode> = raw
            .iter()
            .map(|&(w, k, n)| BruteMode { quantum: w, gain2: k * k, noise: n })
            .collect();
        let (oracle, _) = brute_force_allocation(&brute, e, 400);
        prop_assert!((sol.capacity - oracle).abs() <= 1e-5);
    }
}
