use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use proptest::prelude::*;

use tripartite::bell::{
    bell_operators, correlation_tensor, decompose_b, ghz_branch_values, smax_ghz_closed,
    svetlichny_expectation, w_reduced_value, MeasurementSettings, SVETLICHNY_CEILING,
};
use tripartite::cli::fmt_sig;
use tripartite::entanglement::{entanglement_profile, ghz_profile_closed, w_profile_closed};
use tripartite::montecarlo::outcome_distribution;
use tripartite::qcore::random::{random_su2, seeded_rng};
use tripartite::qcore::{
    expectation, make_state, GhzClassParams, ThreeQubitPureState, UnitVector, WClassParams,
};

fn unit_vector() -> impl Strategy<Value = UnitVector> {
    (0.0..=PI, 0.0..2.0 * PI).prop_map(|(p, a)| UnitVector::new(p, a).unwrap())
}

fn settings() -> impl Strategy<Value = MeasurementSettings> {
    proptest::array::uniform6(unit_vector()).prop_map(MeasurementSettings::from_array)
}

fn state() -> impl Strategy<Value = ThreeQubitPureState> {
    proptest::array::uniform16(-1.0..1.0f64)
        .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
        .prop_map(|v| {
            let amps = std::array::from_fn(|k| Complex64::new(v[2 * k], v[2 * k + 1]));
            make_state(amps, true).unwrap()
        })
}

fn w_params() -> impl Strategy<Value = WClassParams> {
    (0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64)
        .prop_filter("nonzero", |(a, b, c)| a + b + c > 1e-3)
        .prop_map(|(a, b, c)| WClassParams::normalized(a, b, c).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn tensor_value_matches_operator(s in state(), ms in settings()) {
        let via_tensor = svetlichny_expectation(&correlation_tensor(&s), &ms);
        let via_operator = expectation(&s, &bell_operators(&ms).s).unwrap();
        prop_assert!((via_tensor - via_operator).abs() < 1e-10);
        prop_assert!(via_tensor.abs() <= SVETLICHNY_CEILING + 1e-9);
    }

    #[test]
    fn b_pair_round_trip(b in unit_vector(), bp in unit_vector()) {
        let d = decompose_b(&b, &bp);
        let (rb, rbp) = d.recompose();
        for k in 0..3 {
            prop_assert!((rb[k] - b.cartesian()[k]).abs() < 1e-9);
            prop_assert!((rbp[k] - bp.cartesian()[k]).abs() < 1e-9);
        }
        prop_assert!(d.d.dot(&d.d_prime).abs() < 1e-9);
    }

    #[test]
    fn monogamy_and_local_unitary_invariance(s in state(), seed in any::<u64>()) {
        let p = entanglement_profile(&s).unwrap();
        prop_assert!(p.monogamy_residual >= -1e-9);
        prop_assert!((p.monogamy_residual - p.tau).abs() < 1e-8);
        let mut rng = seeded_rng(seed);
        let u = [random_su2(&mut rng), random_su2(&mut rng), random_su2(&mut rng)];
        let q = entanglement_profile(&s.apply_local(&u)).unwrap();
        prop_assert!(p.max_abs_diff(&q) < 1e-8);
    }

    #[test]
    fn ghz_closed_form_is_bounded(theta in 0.0..=FRAC_PI_2, theta3 in 0.0..=FRAC_PI_2) {
        let p = GhzClassParams::new(theta, theta3).unwrap();
        let m = smax_ghz_closed(&ghz_profile_closed(&p)).unwrap();
        prop_assert!(m.value >= 0.0);
        prop_assert!(m.value <= SVETLICHNY_CEILING + 1e-12);
        let profile = ghz_profile_closed(&p);
        let (low, high) = ghz_branch_values(profile.tau, profile.c12 * profile.c12);
        prop_assert!((m.value - low.max(high)).abs() < 1e-12);
    }

    #[test]
    fn reduced_w_form_symmetries(
        w in w_params(),
        t in proptest::array::uniform3(-PI..PI),
        pair in 0usize..3,
    ) {
        let p = w_profile_closed(&w);
        let f = |t: [f64; 3]| w_reduced_value(&p, t[0], t[1], t[2]);
        let v = f(t);
        prop_assert!((f(t.map(|x| -x)) + v).abs() < 1e-12);
        prop_assert!((f(t.map(|x| PI - x)) - v).abs() < 1e-12);
        let mut shifted = t;
        shifted[pair] += PI;
        shifted[(pair + 1) % 3] += PI;
        prop_assert!((f(shifted) - v).abs() < 1e-12);
    }

    #[test]
    fn outcome_distribution_is_normalized(
        s in state(),
        v in proptest::array::uniform3(unit_vector()),
    ) {
        let p = outcome_distribution(&s, &v[0], &v[1], &v[2]).unwrap();
        prop_assert!(p.iter().all(|&x| x >= 0.0));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn csv_numbers_keep_nine_digits(x in -1e6..1e6f64) {
        let back: f64 = fmt_sig(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 5e-9 * x.abs());
    }
}
