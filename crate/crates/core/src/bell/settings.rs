use rand::Rng;

use crate::qcore::random::random_unit_vector;
use crate::qcore::UnitVector;

/// Below this length a sum or difference of two unit vectors is treated as
/// zero in [`decompose_b`].
const DEGENERATE_LEN: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Party {
    A,
    B,
    C,
}

/// The six local measurement directions of a Svetlichny experiment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementSettings {
    pub a: UnitVector,
    pub a_prime: UnitVector,
    pub b: UnitVector,
    pub b_prime: UnitVector,
    pub c: UnitVector,
    pub c_prime: UnitVector,
}

impl MeasurementSettings {
    pub fn new(
        a: UnitVector,
        a_prime: UnitVector,
        b: UnitVector,
        b_prime: UnitVector,
        c: UnitVector,
        c_prime: UnitVector,
    ) -> Self {
        Self {
            a,
            a_prime,
            b,
            b_prime,
            c,
            c_prime,
        }
    }

    /// Order: a, a', b, b', c, c'.
    pub fn from_array(v: [UnitVector; 6]) -> Self {
        let [a, a_prime, b, b_prime, c, c_prime] = v;
        Self::new(a, a_prime, b, b_prime, c, c_prime)
    }

    pub fn to_array(&self) -> [UnitVector; 6] {
        [
            self.a,
            self.a_prime,
            self.b,
            self.b_prime,
            self.c,
            self.c_prime,
        ]
    }

    /// Six independent directions, each uniform on the sphere.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::from_array(std::array::from_fn(|_| random_unit_vector(rng)))
    }

    pub fn pick(&self, party: Party, primed: bool) -> UnitVector {
        match (party, primed) {
            (Party::A, false) => self.a,
            (Party::A, true) => self.a_prime,
            (Party::B, false) => self.b,
            (Party::B, true) => self.b_prime,
            (Party::C, false) => self.c,
            (Party::C, true) => self.c_prime,
        }
    }

    /// Index into [`to_array`](Self::to_array) order.
    pub fn slot(party: Party, primed: bool) -> usize {
        let base = match party {
            Party::A => 0,
            Party::B => 2,
            Party::C => 4,
        };
        base + usize::from(primed)
    }
}

/// `b + b' = 2 d cos t`, `b - b' = 2 d' sin t` with `d . d' = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecomposedB {
    pub d: UnitVector,
    pub d_prime: UnitVector,
    pub t: f64,
}

impl DecomposedB {
    /// `(b, b')` rebuilt from `d`, `d'` and `t`.
    pub fn recompose(&self) -> ([f64; 3], [f64; 3]) {
        let (s, c) = self.t.sin_cos();
        let d = self.d.cartesian();
        let dp = self.d_prime.cartesian();
        (
            std::array::from_fn(|k| d[k] * c + dp[k] * s),
            std::array::from_fn(|k| d[k] * c - dp[k] * s),
        )
    }
}

/// Unit vector orthogonal to `v`: `z` projected onto the plane normal to `v`,
/// or `x` when `v` is along `z`.
fn companion(v: &UnitVector) -> UnitVector {
    let n = v.cartesian();
    let project = |e: [f64; 3]| {
        let k = e[0] * n[0] + e[1] * n[1] + e[2] * n[2];
        [e[0] - k * n[0], e[1] - k * n[1], e[2] - k * n[2]]
    };
    let pz = project([0.0, 0.0, 1.0]);
    if pz.iter().map(|c| c * c).sum::<f64>().sqrt() > 1e-8 {
        UnitVector::from_cartesian(pz).expect("nonzero projection")
    } else {
        UnitVector::from_cartesian(project([1.0, 0.0, 0.0])).expect("nonzero projection")
    }
}

pub fn decompose_b(b: &UnitVector, b_prime: &UnitVector) -> DecomposedB {
    let (u, v) = (b.cartesian(), b_prime.cartesian());
    let sum: [f64; 3] = std::array::from_fn(|k| u[k] + v[k]);
    let diff: [f64; 3] = std::array::from_fn(|k| u[k] - v[k]);
    let len = |w: &[f64; 3]| w.iter().map(|c| c * c).sum::<f64>().sqrt();
    let (ls, ld) = (len(&sum), len(&diff));

    if ld < DEGENERATE_LEN {
        return DecomposedB {
            d: *b,
            d_prime: companion(b),
            t: 0.0,
        };
    }
    if ls < DEGENERATE_LEN {
        return DecomposedB {
            d: companion(b),
            d_prime: *b,
            t: std::f64::consts::FRAC_PI_2,
        };
    }
    DecomposedB {
        d: UnitVector::from_cartesian(sum).expect("nonzero sum"),
        d_prime: UnitVector::from_cartesian(diff).expect("nonzero difference"),
        t: (ls / 2.0).clamp(-1.0, 1.0).acos(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::random::seeded_rng;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

    #[test]
    fn orthogonal_pair() {
        let r = decompose_b(&UnitVector::X, &UnitVector::Y);
        assert_abs_diff_eq!(r.t, FRAC_PI_4, epsilon = 1e-15);
        let d = r.d.cartesian();
        let dp = r.d_prime.cartesian();
        assert_abs_diff_eq!(d[0], 1.0 / SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(d[1], 1.0 / SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(dp[0], 1.0 / SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(dp[1], -1.0 / SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn coincident_and_antipodal() {
        let r = decompose_b(&UnitVector::Z, &UnitVector::Z);
        assert_eq!(r.t, 0.0);
        assert_eq!(r.d, UnitVector::Z);
        assert_eq!(r.d_prime.cartesian(), [1.0, 0.0, 0.0]);

        let r = decompose_b(&UnitVector::X, &-UnitVector::X);
        assert_eq!(r.t, FRAC_PI_2);
        assert_eq!(r.d_prime, UnitVector::X);
        assert_eq!(r.d.cartesian(), [0.0, 0.0, 1.0]);
        assert_abs_diff_eq!(r.d.dot(&r.d_prime), 0.0);
    }

    #[test]
    fn random_pairs_round_trip() {
        let mut rng = seeded_rng(21);
        for _ in 0..1000 {
            let b = random_unit_vector(&mut rng);
            let bp = random_unit_vector(&mut rng);
            let r = decompose_b(&b, &bp);
            assert!(r.d.dot(&r.d_prime).abs() < 1e-10);
            let (rb, rbp) = r.recompose();
            for k in 0..3 {
                assert_abs_diff_eq!(rb[k], b.cartesian()[k], epsilon = 1e-10);
                assert_abs_diff_eq!(rbp[k], bp.cartesian()[k], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn slots_match_array_order() {
        let mut rng = seeded_rng(22);
        let ms = MeasurementSettings::random(&mut rng);
        let arr = ms.to_array();
        for party in [Party::A, Party::B, Party::C] {
            for primed in [false, true] {
                assert_eq!(arr[MeasurementSettings::slot(party, primed)], ms.pick(party, primed));
            }
        }
        assert_eq!(MeasurementSettings::from_array(arr), ms);
    }
}
