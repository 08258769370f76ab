//! Concurrences, three-tangle and the monogamy residual.

use std::fmt;

use crate::error::{Error, Result};
use crate::qcore::{
    herm_eigen, herm_eigenvalues, kron_2_2, partial_trace, reduced_single, GhzClassParams, Mat4,
    Qubit, QubitPair, ThreeQubitPureState, TwoQubitDensity, WClassParams, PAULI_Y,
};

/// Negative values of tau or of a squared concurrence above this are
/// roundoff and clamp to zero; anything below is an error.
pub const CLAMP_TOL: f64 = 1e-9;
/// Maximum disagreement between the three bipartition formulas for tau.
pub const TANGLE_SPREAD_TOL: f64 = 1e-8;
/// Tangle above this marks a state as GHZ-class.
pub const GHZ_TANGLE_THRESHOLD: f64 = 1e-9;

/// Relative size below which an eigenvalue is indistinguishable from zero.
const SPECTRAL_FLOOR: f64 = 1e-14;

/// Entanglement content of a three-qubit pure state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntanglementProfile {
    pub tau: f64,
    pub c12: f64,
    pub c23: f64,
    pub c31: f64,
    /// Concurrence of qubit 1 against the pair (2, 3).
    pub c1_23: f64,
    pub c2_13: f64,
    pub c3_12: f64,
    /// `c1_23^2 - c12^2 - c31^2`
    pub monogamy_residual: f64,
}

impl EntanglementProfile {
    pub fn family(&self) -> Family {
        const ZERO: f64 = 1e-9;
        if self.tau > GHZ_TANGLE_THRESHOLD {
            Family::GhzClass
        } else if [self.c1_23, self.c2_13, self.c3_12].iter().all(|&c| c > ZERO) {
            Family::WClass
        } else if [self.c1_23, self.c2_13, self.c3_12].iter().any(|&c| c > ZERO) {
            Family::Biseparable
        } else {
            Family::Product
        }
    }

    pub fn concurrence_sum(&self) -> f64 {
        self.c12 + self.c23 + self.c31
    }

    /// Largest componentwise difference to another profile.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            self.tau - other.tau,
            self.c12 - other.c12,
            self.c23 - other.c23,
            self.c31 - other.c31,
            self.c1_23 - other.c1_23,
            self.c2_13 - other.c2_13,
            self.c3_12 - other.c3_12,
            self.monogamy_residual - other.monogamy_residual,
        ]
        .iter()
        .fold(0.0_f64, |m, d| m.max(d.abs()))
    }
}

/// Coarse entanglement class of a pure state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Product,
    Biseparable,
    WClass,
    GhzClass,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Product => "product",
            Family::Biseparable => "bi-separable",
            Family::WClass => "W-class",
            Family::GhzClass => "GHZ-class",
        })
    }
}

fn floor_sqrt(x: f64, scale: f64) -> f64 {
    if x <= SPECTRAL_FLOOR * scale.max(1.0) {
        0.0
    } else {
        x.sqrt()
    }
}

/// Wootters concurrence `max(0, l1 - l2 - l3 - l4)`, the `li` being the
/// descending square roots of the spectrum of `sqrt(rho) rho~ sqrt(rho)` with
/// `rho~ = (Y (x) Y) rho* (Y (x) Y)`.
pub fn concurrence_two_qubit(rho: &TwoQubitDensity) -> Result<f64> {
    let m = rho.matrix();
    let eig = herm_eigen(m, TwoQubitDensity::HERMITIAN_TOL)?;
    let top = eig.values[0];
    let sqrt_rho = eig.map_spectrum(|x| floor_sqrt(x, top));

    let yy = kron_2_2(&PAULI_Y, &PAULI_Y);
    let flipped = yy * m.conj() * yy;
    let r = sqrt_rho * flipped * sqrt_rho;
    let mu = herm_eigenvalues(&symmetrize(&r), 1e-10)?;

    let mu_top = mu[0];
    let l = mu.map(|x| floor_sqrt(x, mu_top));
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
}

fn symmetrize(m: &Mat4) -> Mat4 {
    Mat4::from_fn(|i, j| (m.0[i][j] + m.0[j][i].conj()) * 0.5)
}

/// `sqrt(2 (1 - tr rho_solo^2))` for the one-versus-two split.
pub fn concurrence_bipartition(s: &ThreeQubitPureState, solo: Qubit) -> f64 {
    let rho = reduced_single(s, solo);
    let purity: f64 = rho.0.iter().flatten().map(|z| z.norm_sqr()).sum();
    (2.0 * (1.0 - purity)).max(0.0).sqrt()
}

fn pair_concurrence(s: &ThreeQubitPureState, pair: QubitPair) -> Result<f64> {
    concurrence_two_qubit(&partial_trace(s, pair)?)
}

fn clamp_small_negative(quantity: &'static str, value: f64) -> Result<f64> {
    if value < -CLAMP_TOL {
        Err(Error::NegativeBeyondClamp { quantity, value })
    } else {
        Ok(value.max(0.0))
    }
}

/// `C_1(23)^2 - C_12^2 - C_13^2`.
pub fn three_tangle(s: &ThreeQubitPureState) -> Result<f64> {
    let c1 = concurrence_bipartition(s, Qubit::One);
    let c12 = pair_concurrence(s, QubitPair::Q12)?;
    let c13 = pair_concurrence(s, QubitPair::Q13)?;
    clamp_small_negative("three-tangle", c1 * c1 - c12 * c12 - c13 * c13)
}

/// Every measure of the state, with tau cross-checked over the three
/// bipartitions.
pub fn entanglement_profile(s: &ThreeQubitPureState) -> Result<EntanglementProfile> {
    let c12 = pair_concurrence(s, QubitPair::Q12)?;
    let c23 = pair_concurrence(s, QubitPair::Q23)?;
    let c31 = pair_concurrence(s, QubitPair::Q13)?;
    let c1_23 = concurrence_bipartition(s, Qubit::One);
    let c2_13 = concurrence_bipartition(s, Qubit::Two);
    let c3_12 = concurrence_bipartition(s, Qubit::Three);

    let residual = c1_23 * c1_23 - c12 * c12 - c31 * c31;
    let tau2 = c2_13 * c2_13 - c12 * c12 - c23 * c23;
    let tau3 = c3_12 * c3_12 - c31 * c31 - c23 * c23;
    let hi = residual.max(tau2).max(tau3);
    let lo = residual.min(tau2).min(tau3);
    if hi - lo > TANGLE_SPREAD_TOL {
        return Err(Error::TangleSpread(hi - lo));
    }
    let tau = clamp_small_negative("monogamy residual", residual)?;

    Ok(EntanglementProfile {
        tau,
        c12,
        c23,
        c31,
        c1_23,
        c2_13,
        c3_12,
        monogamy_residual: residual,
    })
}

/// Closed-form profile of the GHZ-class family.
pub fn ghz_profile_closed(p: &GhzClassParams) -> EntanglementProfile {
    let k = (2.0 * p.theta()).sin();
    let (s3, c3) = p.theta3().sin_cos();
    let tau = k * k * s3 * s3;
    EntanglementProfile {
        tau,
        c12: k * c3.abs(),
        c23: 0.0,
        c31: 0.0,
        c1_23: k,
        c2_13: k,
        c3_12: k * s3,
        monogamy_residual: tau,
    }
}

/// Closed-form profile of `alpha |001> + beta |010> + gamma |100>`.
///
/// Labels follow the reduced states: qubit 1 carries `gamma`, qubit 3 carries
/// `alpha`, so `C12 = 2 beta gamma`, `C23 = 2 alpha beta`, `C31 = 2 gamma alpha`.
pub fn w_profile_closed(p: &WClassParams) -> EntanglementProfile {
    let (a, b, g) = (p.alpha(), p.beta(), p.gamma());
    let c12 = 2.0 * b * g;
    let c23 = 2.0 * a * b;
    let c31 = 2.0 * g * a;
    let c1_23 = 2.0 * g * (a * a + b * b).sqrt();
    EntanglementProfile {
        tau: 0.0,
        c12,
        c23,
        c31,
        c1_23,
        c2_13: 2.0 * b * (a * a + g * g).sqrt(),
        c3_12: 2.0 * a * (b * b + g * g).sqrt(),
        monogamy_residual: c1_23 * c1_23 - c12 * c12 - c31 * c31,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::random::{haar_random_state, random_su2, seeded_rng};
    use crate::qcore::{ghz_state, make_state, w_state};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn product() -> ThreeQubitPureState {
        let mut v = [Complex64::new(0.0, 0.0); 8];
        v[0] = 1.0.into();
        make_state(v, false).unwrap()
    }

    fn ghz() -> ThreeQubitPureState {
        ghz_state(&GhzClassParams::new(FRAC_PI_4, FRAC_PI_2).unwrap())
    }

    /// Independent route: for a reduced state `sum_k |phi_k><phi_k|` of a
    /// three-qubit pure state, the Wootters roots are the singular values of
    /// the 2x2 matrix `t_jk = phi_j^T (Y (x) Y) phi_k`, so
    /// `C = sqrt(|t|_F^2 - 2 |det t|)`.
    fn concurrence_from_pure_decomposition(s: &ThreeQubitPureState, pair: QubitPair) -> f64 {
        let (hi, lo, tr) = pair.parts();
        let shift = |q: Qubit| 3 - q.label() as usize;
        let phi: [[Complex64; 4]; 2] = std::array::from_fn(|bt| {
            std::array::from_fn(|i| {
                s.amplitudes()[((i >> 1) << shift(hi)) | ((i & 1) << shift(lo)) | (bt << shift(tr))]
            })
        });
        // (Y (x) Y) maps |00> -> -|11>, |11> -> -|00>, |01> -> |10>, |10> -> |01>
        let flip = |v: &[Complex64; 4]| [-v[3], v[2], v[1], -v[0]];
        let t: [[Complex64; 2]; 2] = std::array::from_fn(|j| {
            std::array::from_fn(|k| {
                let f = flip(&phi[k]);
                (0..4).map(|i| phi[j][i] * f[i]).sum()
            })
        });
        let frob: f64 = t.iter().flatten().map(|z| z.norm_sqr()).sum();
        let det = (t[0][0] * t[1][1] - t[0][1] * t[1][0]).norm();
        (frob - 2.0 * det).max(0.0).sqrt()
    }

    fn random_w(rng: &mut crate::qcore::random::SeededRng) -> WClassParams {
        use rand::Rng;
        let a: f64 = rng.random_range(0.0..1.0);
        let b: f64 = rng.random_range(0.0..1.0);
        let g: f64 = rng.random_range(0.0..1.0);
        WClassParams::normalized(a, b, g).unwrap()
    }

    #[test]
    fn concurrence_examples() {
        let c = |s: &ThreeQubitPureState| pair_concurrence(s, QubitPair::Q12).unwrap();
        assert_eq!(c(&product()), 0.0);
        assert_abs_diff_eq!(c(&ghz()), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c(&w_state(&WClassParams::symmetric())), 2.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn concurrence_of_bell_pair() {
        let mut v = [Complex64::new(0.0, 0.0); 8];
        v[0] = FRAC_1_SQRT_2.into();
        v[6] = FRAC_1_SQRT_2.into();
        let s = make_state(v, false).unwrap();
        assert_abs_diff_eq!(pair_concurrence(&s, QubitPair::Q12).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(pair_concurrence(&s, QubitPair::Q13).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn bipartition_examples() {
        assert_eq!(concurrence_bipartition(&product(), Qubit::One), 0.0);
        assert_abs_diff_eq!(concurrence_bipartition(&ghz(), Qubit::One), 1.0, epsilon = 1e-15);
        let w = w_state(&WClassParams::symmetric());
        assert_abs_diff_eq!(concurrence_bipartition(&w, Qubit::One), 8f64.sqrt() / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn tangle_examples() {
        assert_abs_diff_eq!(three_tangle(&ghz()).unwrap(), 1.0, epsilon = 1e-14);
        assert_eq!(three_tangle(&product()).unwrap(), 0.0);
        let mut rng = seeded_rng(3);
        for _ in 0..50 {
            let w = w_state(&random_w(&mut rng));
            assert!(three_tangle(&w).unwrap() < 1e-9);
        }
    }

    #[test]
    fn profile_examples() {
        let g = entanglement_profile(&ghz()).unwrap();
        assert_abs_diff_eq!(g.tau, 1.0, epsilon = 1e-14);
        assert!(g.c12 < 1e-14 && g.c23 < 1e-14 && g.c31 < 1e-14);
        assert_eq!(g.family(), Family::GhzClass);

        let w = entanglement_profile(&w_state(&WClassParams::symmetric())).unwrap();
        assert!(w.tau < 1e-12);
        for c in [w.c12, w.c23, w.c31] {
            assert_abs_diff_eq!(c, 2.0 / 3.0, epsilon = 1e-14);
        }
        assert!(w.monogamy_residual.abs() < 1e-12);
        assert_eq!(w.family(), Family::WClass);

        let p = entanglement_profile(&product()).unwrap();
        assert_eq!(p.max_abs_diff(&ghz_profile_closed(&GhzClassParams::new(0.0, 0.0).unwrap())), 0.0);
        assert_eq!(p.family(), Family::Product);
    }

    #[test]
    fn ghz_closed_examples() {
        let p = ghz_profile_closed(&GhzClassParams::new(FRAC_PI_4, FRAC_PI_2).unwrap());
        assert_abs_diff_eq!(p.tau, 1.0);
        assert_abs_diff_eq!(p.c12, 0.0, epsilon = 1e-16);
        let p = ghz_profile_closed(&GhzClassParams::new(FRAC_PI_4, 0.0).unwrap());
        assert_eq!(p.tau, 0.0);
        assert_abs_diff_eq!(p.c12, 1.0);
        let p = ghz_profile_closed(&GhzClassParams::new(0.0, 1.0).unwrap());
        assert_eq!(p.max_abs_diff(&entanglement_profile(&product()).unwrap()), 0.0);
    }

    #[test]
    fn w_closed_examples() {
        let p = w_profile_closed(&WClassParams::symmetric());
        for c in [p.c12, p.c23, p.c31] {
            assert_abs_diff_eq!(c, 2.0 / 3.0, epsilon = 1e-15);
        }
        let p = w_profile_closed(&WClassParams::new(1.0, 0.0, 0.0).unwrap());
        assert_eq!(p.concurrence_sum(), 0.0);
        // (|001> + |010>)/sqrt2 = |0> (x) Bell pair on qubits 2 and 3
        let p = w_profile_closed(&WClassParams::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0).unwrap());
        assert_abs_diff_eq!(p.c23, 1.0, epsilon = 1e-15);
        assert_eq!((p.c12, p.c31), (0.0, 0.0));
        assert_eq!(entanglement_profile(&w_state(&WClassParams::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0).unwrap())).unwrap().family(), Family::Biseparable);
    }

    #[test]
    fn closed_forms_match_numeric_profiles() {
        use rand::Rng;
        let mut rng = seeded_rng(21);
        for _ in 0..1000 {
            let p = GhzClassParams::new(
                rng.random_range(0.0..FRAC_PI_2),
                rng.random_range(0.0..FRAC_PI_2),
            )
            .unwrap();
            let numeric = entanglement_profile(&ghz_state(&p)).unwrap();
            assert!(numeric.max_abs_diff(&ghz_profile_closed(&p)) < 1e-8, "{p:?}");

            let w = random_w(&mut rng);
            let numeric = entanglement_profile(&w_state(&w)).unwrap();
            assert!(numeric.max_abs_diff(&w_profile_closed(&w)) < 1e-8, "{w:?}");
        }
    }

    #[test]
    fn sandwich_matches_pure_decomposition_route() {
        let mut rng = seeded_rng(22);
        for _ in 0..2000 {
            let s = haar_random_state(&mut rng);
            for pair in QubitPair::ALL {
                let a = pair_concurrence(&s, pair).unwrap();
                let b = concurrence_from_pure_decomposition(&s, pair);
                assert!((a - b).abs() < 1e-10, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn tangle_is_permutation_invariant() {
        let mut rng = seeded_rng(23);
        for _ in 0..500 {
            let s = haar_random_state(&mut rng);
            let p = entanglement_profile(&s).unwrap();
            let t2 = p.c2_13.powi(2) - p.c12.powi(2) - p.c23.powi(2);
            let t3 = p.c3_12.powi(2) - p.c31.powi(2) - p.c23.powi(2);
            assert!((p.monogamy_residual - t2).abs() < 1e-8);
            assert!((p.monogamy_residual - t3).abs() < 1e-8);
        }
    }

    #[test]
    fn concurrence_is_local_unitary_invariant() {
        let mut rng = seeded_rng(24);
        for _ in 0..200 {
            let s = haar_random_state(&mut rng);
            let rho = partial_trace(&s, QubitPair::Q12).unwrap();
            let u = kron_2_2(&random_su2(&mut rng), &random_su2(&mut rng));
            let rotated = TwoQubitDensity::new(u * *rho.matrix() * u.adjoint()).unwrap();
            let a = concurrence_two_qubit(&rho).unwrap();
            let b = concurrence_two_qubit(&rotated).unwrap();
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn rejects_non_density_input() {
        let m = Mat4::from_real_diagonal(&[0.5, 0.5, 0.5, -0.5]);
        assert!(TwoQubitDensity::new(m).is_err());
        let m = Mat4::from_real_diagonal(&[1.5, -0.5, 0.0, 0.0]);
        assert!(matches!(TwoQubitDensity::new(m), Err(Error::NotDensity(_))));
    }
}
