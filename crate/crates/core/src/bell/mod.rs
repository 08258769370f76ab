//! Svetlichny and Mermin operators, the Pauli correlation tensor, and the
//! closed-form correlators and maxima of the GHZ-class and W-class families.
//!
//! With `D = B + B'` and `D' = B - B'` the Svetlichny operator splits as
//! `S = A (D C + D' C') + A' (D' C - D C') = M + M'`. Expanded, it is the
//! signed sum of eight triple correlators listed in [`SVETLICHNY_TERMS`].
//!
//! Optimization loops evaluate `<S>` by contracting the 3x3x3 correlation
//! tensor; the 8x8 operator route in [`bell_operators`] is kept as the
//! independent check.

mod ghz;
mod settings;
mod tensor;
mod wclass;

use std::f64::consts::SQRT_2;

pub use ghz::{
    ghz_branch_values, ghz_correlator_closed, ghz_smax_report, optimal_settings_ghz,
    quoted_settings_ghz, smax_ghz_closed, GhzClosedMax, GhzClosedTerms, QuotedSet,
};
pub use settings::{decompose_b, DecomposedB, MeasurementSettings, Party};
pub use tensor::{correlation_tensor, CorrelationTensor};
pub use wclass::{
    optimal_settings_w_symmetric, smax_w, smax_w_with, w_correlator_closed, w_reduced_value,
    w_settings_from_tilde, w_smax_report, WMax, WReducedTerms, SYMMETRIC_W_TILDE, W_MULTISTARTS,
};

use crate::error::Result;
use crate::qcore::{expectation, spin_observable, tensor3, ThreeQubitOperator, ThreeQubitPureState};

/// Local-realistic (hybrid) bound on `|<S>|`.
pub const SVETLICHNY_BOUND: f64 = 4.0;
/// Algebraic maximum of the Svetlichny operator spectrum, `4 sqrt 2`.
pub const SVETLICHNY_CEILING: f64 = 4.0 * SQRT_2;

/// One signed triple correlator of the expansion: `(a primed, b primed,
/// c primed, sign)`.
pub type Term = (bool, bool, bool, f64);

/// `ABC + AB'C + ABC' - AB'C' + A'BC - A'B'C - A'BC' - A'B'C'`; the first four
/// terms form `M`, the last four `M'`.
pub const SVETLICHNY_TERMS: [Term; 8] = [
    (false, false, false, 1.0),
    (false, true, false, 1.0),
    (false, false, true, 1.0),
    (false, true, true, -1.0),
    (true, false, false, 1.0),
    (true, true, false, -1.0),
    (true, false, true, -1.0),
    (true, true, true, -1.0),
];

/// Closed-form branch of the GHZ-class maximum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// `3 tau + C12^2 <= 1`, value `4 sqrt(1 - tau)`.
    Low,
    /// `3 tau + C12^2 >= 1`, value `4 sqrt(C12^2 + 2 tau)`.
    High,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Low => "low",
            Branch::High => "high",
        }
    }
}

/// A closed-form maximum together with settings that reach it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmaxReport {
    pub closed_value: f64,
    pub branch: Option<Branch>,
    pub achieving_settings: MeasurementSettings,
    /// `|<S>|` at `achieving_settings`, from the 8x8 operator.
    pub operator_value_at_settings: f64,
}

impl SmaxReport {
    pub fn violates(&self) -> bool {
        self.closed_value > SVETLICHNY_BOUND
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BellOperators {
    pub s: ThreeQubitOperator,
    pub m: ThreeQubitOperator,
    pub m_prime: ThreeQubitOperator,
}

/// Build `S`, `M = A (D C + D' C')` and `M' = A' (D' C - D C')` as 8x8
/// matrices.
pub fn bell_operators(ms: &MeasurementSettings) -> BellOperators {
    let a = spin_observable(&ms.a);
    let ap = spin_observable(&ms.a_prime);
    let b = spin_observable(&ms.b);
    let bp = spin_observable(&ms.b_prime);
    let c = spin_observable(&ms.c);
    let cp = spin_observable(&ms.c_prime);
    let d = crate::qcore::SingleQubitObservable(b.0 + bp.0);
    let dp = crate::qcore::SingleQubitObservable(b.0 - bp.0);

    let m = tensor3(&a, &d, &c) + tensor3(&a, &dp, &cp);
    let m_prime = tensor3(&ap, &dp, &c) - tensor3(&ap, &d, &cp);
    BellOperators {
        s: m + m_prime,
        m,
        m_prime,
    }
}

/// Signed `<S>` from the correlation tensor.
pub fn svetlichny_expectation(t: &CorrelationTensor, ms: &MeasurementSettings) -> f64 {
    let (m, mp) = mermin_expectations(t, ms);
    m + mp
}

/// `(<M>, <M'>)` from the correlation tensor.
pub fn mermin_expectations(t: &CorrelationTensor, ms: &MeasurementSettings) -> (f64, f64) {
    let mut m = 0.0;
    let mut mp = 0.0;
    for (k, &(pa, pb, pc, sign)) in SVETLICHNY_TERMS.iter().enumerate() {
        let v = sign
            * t.correlator(
                &ms.pick(Party::A, pa),
                &ms.pick(Party::B, pb),
                &ms.pick(Party::C, pc),
            );
        if k < 4 {
            m += v;
        } else {
            mp += v;
        }
    }
    (m, mp)
}

/// Coefficient vector `v` of the direction in slot `(party, primed)`: the
/// terms of `<S>` containing that direction sum to `v . n`, and the remaining
/// terms do not depend on it.
pub fn svetlichny_coefficients(
    t: &CorrelationTensor,
    ms: &MeasurementSettings,
    party: Party,
    primed: bool,
) -> [f64; 3] {
    let mut v = [0.0; 3];
    for &(pa, pb, pc, sign) in SVETLICHNY_TERMS.iter() {
        let flags = [pa, pb, pc];
        let idx = party as usize;
        if flags[idx] != primed {
            continue;
        }
        let w = match party {
            Party::A => t.contract_except(party, &ms.pick(Party::B, pb), &ms.pick(Party::C, pc)),
            Party::B => t.contract_except(party, &ms.pick(Party::A, pa), &ms.pick(Party::C, pc)),
            Party::C => t.contract_except(party, &ms.pick(Party::A, pa), &ms.pick(Party::B, pb)),
        };
        for k in 0..3 {
            v[k] += sign * w[k];
        }
    }
    v
}

/// `|<psi| S |psi>|` by tensor contraction.
pub fn svetlichny_value(s: &ThreeQubitPureState, ms: &MeasurementSettings) -> f64 {
    svetlichny_expectation(&correlation_tensor(s), ms).abs()
}

/// `|<psi| S |psi>|` from the explicit 8x8 operator.
pub fn svetlichny_value_direct(s: &ThreeQubitPureState, ms: &MeasurementSettings) -> Result<f64> {
    Ok(expectation(s, &bell_operators(ms).s)?.abs())
}

/// `(<M>, <M'>)` from the explicit 8x8 operators.
pub fn mermin_values_direct(
    s: &ThreeQubitPureState,
    ms: &MeasurementSettings,
) -> Result<(f64, f64)> {
    let ops = bell_operators(ms);
    Ok((expectation(s, &ops.m)?, expectation(s, &ops.m_prime)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::random::{haar_random_state, seeded_rng};
    use crate::qcore::{ghz_state, herm_eigenvalues, make_state, GhzClassParams, UnitVector, HERMITIAN_TOL};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn product() -> ThreeQubitPureState {
        let mut v = [Complex64::new(0.0, 0.0); 8];
        v[0] = 1.0.into();
        make_state(v, false).unwrap()
    }

    #[test]
    fn operator_split_is_consistent() {
        let mut rng = seeded_rng(31);
        for _ in 0..50 {
            let ms = MeasurementSettings::random(&mut rng);
            let ops = bell_operators(&ms);
            assert!(ops.s.is_hermitian(HERMITIAN_TOL));
            assert!(ops.m.is_hermitian(HERMITIAN_TOL));
            assert!(ops.m_prime.is_hermitian(HERMITIAN_TOL));
            assert!((ops.m + ops.m_prime).0.max_abs_diff(&ops.s.0) < 1e-12);
        }
    }

    #[test]
    fn spectrum_respects_ceiling() {
        let mut rng = seeded_rng(32);
        for _ in 0..1000 {
            let ops = bell_operators(&MeasurementSettings::random(&mut rng));
            let ev = herm_eigenvalues(&ops.s.0, HERMITIAN_TOL).unwrap();
            assert!(ev[0].abs().max(ev[7].abs()) <= SVETLICHNY_CEILING + 1e-9);
        }
    }

    #[test]
    fn degenerate_settings_stay_hermitian() {
        let ms = MeasurementSettings::new(
            UnitVector::X,
            UnitVector::X,
            UnitVector::Y,
            UnitVector::Y,
            UnitVector::Z,
            UnitVector::X,
        );
        assert!(bell_operators(&ms).s.is_hermitian(HERMITIAN_TOL));
    }

    #[test]
    fn product_state_with_all_z_cancels() {
        let z = UnitVector::Z;
        let ms = MeasurementSettings::new(z, z, z, z, z, z);
        assert_abs_diff_eq!(svetlichny_value(&product(), &ms), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(svetlichny_value_direct(&product(), &ms).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn ghz_reaches_ceiling_at_known_settings() {
        let ghz = ghz_state(&GhzClassParams::new(FRAC_PI_4, FRAC_PI_2).unwrap());
        let ms = optimal_settings_ghz(&GhzClassParams::new(FRAC_PI_4, FRAC_PI_2).unwrap());
        assert_abs_diff_eq!(svetlichny_value(&ghz, &ms), SVETLICHNY_CEILING, epsilon = 1e-12);
        assert_abs_diff_eq!(svetlichny_value_direct(&ghz, &ms).unwrap(), SVETLICHNY_CEILING, epsilon = 1e-12);
    }

    #[test]
    fn coefficients_split_the_expectation() {
        let mut rng = seeded_rng(34);
        for _ in 0..200 {
            let t = correlation_tensor(&haar_random_state(&mut rng));
            let ms = MeasurementSettings::random(&mut rng);
            let full = svetlichny_expectation(&t, &ms);
            for party in [Party::A, Party::B, Party::C] {
                for primed in [false, true] {
                    let v = svetlichny_coefficients(&t, &ms, party, primed);
                    let n = ms.pick(party, primed).cartesian();
                    let mut flipped = ms.to_array();
                    flipped[MeasurementSettings::slot(party, primed)] = -ms.pick(party, primed);
                    let other = svetlichny_expectation(&t, &MeasurementSettings::from_array(flipped));
                    // S is affine in n: S(n) - S(-n) = 2 v . n
                    let vn = v[0] * n[0] + v[1] * n[1] + v[2] * n[2];
                    assert_abs_diff_eq!(full - other, 2.0 * vn, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn tensor_and_operator_routes_agree() {
        let mut rng = seeded_rng(33);
        for _ in 0..1000 {
            let s = haar_random_state(&mut rng);
            let ms = MeasurementSettings::random(&mut rng);
            let fast = svetlichny_value(&s, &ms);
            let slow = svetlichny_value_direct(&s, &ms).unwrap();
            assert!((fast - slow).abs() < 1e-10);
            assert!(fast <= SVETLICHNY_CEILING + 1e-9);
            let (m, mp) = mermin_expectations(&correlation_tensor(&s), &ms);
            let (dm, dmp) = mermin_values_direct(&s, &ms).unwrap();
            assert!((m - dm).abs() < 1e-10 && (mp - dmp).abs() < 1e-10);
        }
    }
}
