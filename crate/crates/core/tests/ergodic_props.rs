mod common;

use std::f64::consts::TAU;

use kahlerq::dynamics::{evolve_exact, hsym_value, split_hamiltonian};
use kahlerq::ergodic::{
    check_rational_independence, normal_modes, time_average, to_action_angle, torus_average, Monomial, Polynomial,
    DEFAULT_BUDGET,
};
use kahlerq::operator::{compose, gamma_lift, is_k_unitary, k_adjoint, ComplexOperator};
use kahlerq::sampling::{random_hermitian, random_unit_state, task_rng};
use kahlerq::KahlerState;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn frame_diagonalizes(n in 1usize..=16, s in any::<u64>()) {
        let h = random_hermitian(&mut task_rng(s, 0), n);
        let frame = normal_modes(&h).unwrap();
        prop_assert!(frame.lambdas.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(is_k_unitary(&frame.transform, 1e-10));
        let t = &frame.transform;
        let conj = compose(&compose(t, &gamma_lift(&h)).unwrap(), &k_adjoint(t)).unwrap();
        let diag = gamma_lift(&ComplexOperator::diagonal(&frame.lambdas));
        prop_assert!(conj.max_abs_diff(&diag) <= 1e-10);
    }

    #[test]
    fn actions_sum_to_norm_and_diagonalize_hsym(n in 1usize..=16, s in any::<u64>()) {
        let mut rng = task_rng(s, 0);
        let h = random_hermitian(&mut rng, n);
        let u = random_unit_state(&mut rng, n);
        let frame = normal_modes(&h).unwrap();
        let aa = to_action_angle(&frame, &u).unwrap();
        prop_assert!(aa.actions.iter().all(|&f| f >= 0.0));
        prop_assert!((aa.actions.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(aa.angles.iter().all(|&a| (0.0..TAU).contains(&a)));
        let hs = split_hamiltonian(&h, 1e-12).unwrap();
        let diag: f64 = 0.5 * frame.lambdas.iter().zip(&aa.actions).map(|(l, f)| l * f).sum::<f64>();
        prop_assert!((hsym_value(&hs, &u).unwrap() - diag).abs() <= 1e-10);
    }

    #[test]
    fn flow_is_linear_on_the_torus(n in 1usize..=6, s in any::<u64>(), t in 0.0f64..1000.0) {
        let mut rng = task_rng(s, 0);
        let h = random_hermitian(&mut rng, n);
        let u0 = random_unit_state(&mut rng, n);
        let frame = normal_modes(&h).unwrap();
        let a0 = to_action_angle(&frame, &u0).unwrap();
        let at = to_action_angle(&frame, &evolve_exact(&h, &u0, t).unwrap()).unwrap();
        for a in 0..n {
            prop_assert!((at.actions[a] - a0.actions[a]).abs() <= 1e-10);
            if a0.actions[a] > 1e-6 {
                let drift = (at.angles[a] - a0.angles[a] - frame.lambdas[a] * t).rem_euclid(TAU);
                let wrapped = drift.min(TAU - drift);
                prop_assert!(wrapped <= 1e-8, "mode {}: {}", a, wrapped);
            }
        }
    }

    #[test]
    fn relations_are_genuine(l1 in -3i64..=3, l2 in -3i64..=3, scale in 0.1f64..3.0) {
        prop_assume!(l1 != 0 || l2 != 0);
        let lambdas = [l1 as f64 * scale, l2 as f64 * scale];
        let v = check_rational_independence(&lambdas, 4, 1e-9, DEFAULT_BUDGET).unwrap();
        prop_assert!(!v.independent);
        let k = v.relation.unwrap();
        prop_assert!(k.iter().any(|&x| x != 0) && k.iter().all(|x| x.abs() <= 4));
        prop_assert!(k.iter().find(|&&x| x != 0).unwrap() > &0);
        let dot: f64 = k.iter().zip(&lambdas).map(|(&a, b)| a as f64 * b).sum();
        prop_assert!(dot.abs() < 1e-9);
    }

    #[test]
    fn torus_quadrature_matches_closed_form(
        exps in proptest::collection::vec((0u32..=4, 0u32..=4, 0u32..=4, 0u32..=4, -2.0f64..2.0), 1..5),
        f1 in 0.0f64..3.0,
        f2 in 0.0f64..3.0,
    ) {
        let poly = Polynomial {
            terms: exps.iter().map(|&(a, b, c, d, coeff)| Monomial { coeff, q: vec![a, b], p: vec![c, d] }).collect(),
        };
        let quad = torus_average(&poly, &[f1, f2], 16, DEFAULT_BUDGET).unwrap();
        let exact = poly.torus_average_exact(&[f1, f2]);
        prop_assert!((quad - exact).abs() <= 1e-11 * (1.0 + exact.abs()), "{} vs {}", quad, exact);
    }
}

#[test]
fn time_averages_of_single_mode_moments() {
    let h = ComplexOperator::diagonal(&[1.0, std::f64::consts::SQRT_2]);
    let hs = split_hamiltonian(&h, 1e-12).unwrap();
    let u0 = KahlerState::new(vec![1.0, 1.0], vec![0.0, 0.0]).unwrap();
    let q1sq = Polynomial::monomial(1.0, vec![2], vec![]);
    assert!((time_average(&hs, &u0, &q1sq, 1e4, 1_000_000).unwrap() - 0.5).abs() <= 1e-2);
    let both = Polynomial::q_squared_product(&[0, 1]);
    assert!((time_average(&hs, &u0, &both, 1e4, 1_000_000).unwrap() - 0.25).abs() <= 1e-2);
}

#[test]
fn gap_shrinks_with_time_for_independent_frequencies() {
    let h = ComplexOperator::diagonal(&[1.0, std::f64::consts::SQRT_2]);
    let hs = split_hamiltonian(&h, 1e-12).unwrap();
    let u0 = KahlerState::new(vec![1.0, 1.0], vec![0.0, 0.0]).unwrap();
    let f = Polynomial::q_squared_product(&[0, 1]);
    let gap = |t: f64| (time_average(&hs, &u0, &f, t, (t * 100.0) as usize).unwrap() - 0.25).abs();
    assert!(gap(1e4) < gap(1e2));
}

#[test]
fn resonant_average_matches_closed_form() {
    // ⟨cos²t cos²(t + Δ)⟩ = 1/4 + cos(2Δ)/8 for equal frequencies.
    let h = ComplexOperator::diagonal(&[1.0, 1.0]);
    let hs = split_hamiltonian(&h, 1e-12).unwrap();
    let f = Polynomial::q_squared_product(&[0, 1]);
    for delta in [0.0, std::f64::consts::FRAC_PI_4, 1.0] {
        let modes = kahlerq::ergodic::modes_from_action_angle(&[1.0, 1.0], &[0.0, delta]).unwrap();
        let avg = time_average(&hs, &modes, &f, 1000.0 * std::f64::consts::PI, 200_000).unwrap();
        assert!((avg - (0.25 + (2.0 * delta).cos() / 8.0)).abs() <= 1e-6, "Δ = {delta}: {avg}");
    }
}
