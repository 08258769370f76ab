use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::matrix::{Mat2, Mat4, Mat8};
use crate::error::{Error, Result};

pub type ComplexScalar = Complex64;

/// Squared-norm tolerance for a state to count as normalized.
pub const NORM_TOL: f64 = 1e-9;

/// Slack allowed on parameter ranges before rejecting an input.
const RANGE_SLACK: f64 = 1e-12;

/// Pure state of three qubits. Amplitude index is `4*b1 + 2*b2 + b3`, with
/// qubit 1 the leftmost bit of the ket label.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThreeQubitPureState {
    amps: [Complex64; 8],
}

impl ThreeQubitPureState {
    pub fn amplitudes(&self) -> &[Complex64; 8] {
        &self.amps
    }

    pub fn amplitude(&self, b1: u8, b2: u8, b3: u8) -> Complex64 {
        self.amps[basis_index(b1, b2, b3)]
    }

    /// `|<self|other>|^2`
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm_sqr()
    }

    /// Apply `u1 (x) u2 (x) u3`. Unitaries are assumed, not checked.
    pub fn apply_local(&self, u: &[Mat2; 3]) -> Self {
        let mut amps = self.amps;
        for (q, uq) in u.iter().enumerate() {
            let shift = 2 - q;
            let mut next = [Complex64::new(0.0, 0.0); 8];
            for (idx, slot) in next.iter_mut().enumerate() {
                let bit = (idx >> shift) & 1;
                let base = idx & !(1 << shift);
                *slot = uq.0[bit][0] * amps[base] + uq.0[bit][1] * amps[base | (1 << shift)];
            }
            amps = next;
        }
        Self { amps }
    }

    pub fn density(&self) -> Mat8 {
        Mat8::from_fn(|i, j| self.amps[i] * self.amps[j].conj())
    }
}

pub fn basis_index(b1: u8, b2: u8, b3: u8) -> usize {
    4 * (b1 as usize & 1) + 2 * (b2 as usize & 1) + (b3 as usize & 1)
}

/// Validate (and optionally normalize) eight amplitudes into a state.
pub fn make_state(amplitudes: [Complex64; 8], normalize: bool) -> Result<ThreeQubitPureState> {
    if let Some(index) = amplitudes
        .iter()
        .position(|z| !(z.re.is_finite() && z.im.is_finite()))
    {
        return Err(Error::NonFinite { index });
    }
    let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
    if norm_sq == 0.0 {
        return Err(Error::ZeroState);
    }
    if normalize {
        let n = norm_sq.sqrt();
        return Ok(ThreeQubitPureState {
            amps: amplitudes.map(|z| z / n),
        });
    }
    if (norm_sq - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized {
            norm_sq,
            tol: NORM_TOL,
        });
    }
    Ok(ThreeQubitPureState { amps: amplitudes })
}

/// Parameters of `cos t |000> + sin t |11>(cos t3 |0> + sin t3 |1>)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GhzClassParams {
    theta: f64,
    theta3: f64,
}

impl GhzClassParams {
    pub fn new(theta: f64, theta3: f64) -> Result<Self> {
        Ok(Self {
            theta: check_quadrant("theta", theta)?,
            theta3: check_quadrant("theta3", theta3)?,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn theta3(&self) -> f64 {
        self.theta3
    }
}

fn check_quadrant(name: &str, x: f64) -> Result<f64> {
    if !x.is_finite() || !(-RANGE_SLACK..=FRAC_PI_2 + RANGE_SLACK).contains(&x) {
        return Err(Error::InvalidParameter(format!(
            "{name} = {x} outside [0, pi/2]"
        )));
    }
    Ok(x.clamp(0.0, FRAC_PI_2))
}

/// Real non-negative amplitudes of `alpha |001> + beta |010> + gamma |100>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WClassParams {
    alpha: f64,
    beta: f64,
    gamma: f64,
}

impl WClassParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {v} must be finite and non-negative"
                )));
            }
        }
        let norm_sq = alpha * alpha + beta * beta + gamma * gamma;
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized {
                norm_sq,
                tol: NORM_TOL,
            });
        }
        Ok(Self { alpha, beta, gamma })
    }

    /// Rescale arbitrary non-negative weights onto the unit sphere.
    pub fn normalized(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let n = (alpha * alpha + beta * beta + gamma * gamma).sqrt();
        if !(n > 0.0) {
            return Err(Error::ZeroState);
        }
        Self::new(alpha / n, beta / n, gamma / n)
    }

    pub fn symmetric() -> Self {
        let s = 1.0 / 3f64.sqrt();
        Self {
            alpha: s,
            beta: s,
            gamma: s,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

pub fn ghz_state(p: &GhzClassParams) -> ThreeQubitPureState {
    let (s, c) = p.theta.sin_cos();
    let (s3, c3) = p.theta3.sin_cos();
    let mut amps = [Complex64::new(0.0, 0.0); 8];
    amps[basis_index(0, 0, 0)] = c.into();
    amps[basis_index(1, 1, 0)] = (s * c3).into();
    amps[basis_index(1, 1, 1)] = (s * s3).into();
    ThreeQubitPureState { amps }
}

pub fn w_state(p: &WClassParams) -> ThreeQubitPureState {
    let mut amps = [Complex64::new(0.0, 0.0); 8];
    amps[basis_index(0, 0, 1)] = p.alpha.into();
    amps[basis_index(0, 1, 0)] = p.beta.into();
    amps[basis_index(1, 0, 0)] = p.gamma.into();
    ThreeQubitPureState { amps }
}

/// One of the three parties.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Qubit {
    One,
    Two,
    Three,
}

impl Qubit {
    pub const ALL: [Qubit; 3] = [Qubit::One, Qubit::Two, Qubit::Three];

    /// Bit position inside the basis index.
    fn shift(self) -> usize {
        match self {
            Qubit::One => 2,
            Qubit::Two => 1,
            Qubit::Three => 0,
        }
    }

    pub fn label(self) -> u8 {
        match self {
            Qubit::One => 1,
            Qubit::Two => 2,
            Qubit::Three => 3,
        }
    }
}

impl TryFrom<u8> for Qubit {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(Qubit::One),
            2 => Ok(Qubit::Two),
            3 => Ok(Qubit::Three),
            _ => Err(Error::InvalidQubit(v.to_string())),
        }
    }
}

/// An unordered pair of parties; the reduced state is indexed in ascending
/// label order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QubitPair {
    Q12,
    Q13,
    Q23,
}

impl QubitPair {
    pub const ALL: [QubitPair; 3] = [QubitPair::Q12, QubitPair::Q13, QubitPair::Q23];

    /// (lower, upper, traced-out)
    pub fn parts(self) -> (Qubit, Qubit, Qubit) {
        match self {
            QubitPair::Q12 => (Qubit::One, Qubit::Two, Qubit::Three),
            QubitPair::Q13 => (Qubit::One, Qubit::Three, Qubit::Two),
            QubitPair::Q23 => (Qubit::Two, Qubit::Three, Qubit::One),
        }
    }
}

impl FromStr for QubitPair {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "12" | "21" => Ok(QubitPair::Q12),
            "13" | "31" => Ok(QubitPair::Q13),
            "23" | "32" => Ok(QubitPair::Q23),
            other => Err(Error::InvalidQubit(other.to_string())),
        }
    }
}

impl fmt::Display for QubitPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b, _) = self.parts();
        write!(f, "{}{}", a.label(), b.label())
    }
}

/// Two-qubit density matrix; validated on construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitDensity(Mat4);

impl TwoQubitDensity {
    pub const HERMITIAN_TOL: f64 = 1e-12;
    pub const TRACE_TOL: f64 = 1e-10;
    pub const POSITIVITY_TOL: f64 = 1e-10;

    pub fn new(m: Mat4) -> Result<Self> {
        let defect = m.hermitian_defect();
        if defect > Self::HERMITIAN_TOL {
            return Err(Error::NotDensity(format!("Hermitian defect {defect:e}")));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > Self::TRACE_TOL || tr.im.abs() > Self::TRACE_TOL {
            return Err(Error::NotDensity(format!("trace {tr}")));
        }
        let ev = super::eigen::herm_eigenvalues(&m, Self::HERMITIAN_TOL)?;
        if ev[3] < -Self::POSITIVITY_TOL {
            return Err(Error::NotDensity(format!("eigenvalue {:e}", ev[3])));
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }
}

fn reduced_pair_matrix(s: &ThreeQubitPureState, keep: QubitPair) -> Mat4 {
    let (hi, lo, traced) = keep.parts();
    let amp = |bh: usize, bl: usize, bt: usize| {
        s.amps[(bh << hi.shift()) | (bl << lo.shift()) | (bt << traced.shift())]
    };
    Mat4::from_fn(|i, j| {
        (0..2)
            .map(|bt| amp(i >> 1, i & 1, bt) * amp(j >> 1, j & 1, bt).conj())
            .sum()
    })
}

/// Reduced density matrix of the two retained qubits.
pub fn partial_trace(s: &ThreeQubitPureState, keep: QubitPair) -> Result<TwoQubitDensity> {
    TwoQubitDensity::new(reduced_pair_matrix(s, keep))
}

/// Reduced single-qubit density matrix.
pub fn reduced_single(s: &ThreeQubitPureState, q: Qubit) -> Mat2 {
    let shift = q.shift();
    Mat2::from_fn(|i, j| {
        let mut acc = Complex64::new(0.0, 0.0);
        for rest in 0..8usize {
            if rest & (1 << shift) != 0 {
                continue;
            }
            acc += s.amps[rest | (i << shift)] * s.amps[rest | (j << shift)].conj();
        }
        acc
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::eigen::herm_eigenvalues;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    fn real(v: [f64; 8]) -> [Complex64; 8] {
        v.map(Complex64::from)
    }

    #[test]
    fn make_state_accepts_basis_state() {
        let s = make_state(real([1., 0., 0., 0., 0., 0., 0., 0.]), false).unwrap();
        assert_eq!(s.amplitude(0, 0, 0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn make_state_normalizes_on_request() {
        let s = make_state(real([2., 0., 0., 0., 0., 0., 0., 0.]), true).unwrap();
        assert_eq!(s.amplitude(0, 0, 0), Complex64::new(1.0, 0.0));
        assert!(matches!(
            make_state(real([2., 0., 0., 0., 0., 0., 0., 0.]), false),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn make_state_rejects_zero_and_nan() {
        assert_eq!(make_state(real([0.0; 8]), true), Err(Error::ZeroState));
        let mut v = real([1., 0., 0., 0., 0., 0., 0., 0.]);
        v[5].im = f64::NAN;
        assert_eq!(make_state(v, true), Err(Error::NonFinite { index: 5 }));
    }

    #[test]
    fn ghz_family_limits() {
        let ghz = ghz_state(&GhzClassParams::new(FRAC_PI_4, FRAC_PI_2).unwrap());
        assert_abs_diff_eq!(ghz.amplitude(0, 0, 0).re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(ghz.amplitude(1, 1, 1).re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(ghz.amplitude(1, 1, 0).re, 0.0, epsilon = 1e-15);

        let product = ghz_state(&GhzClassParams::new(0.0, 0.7).unwrap());
        assert_eq!(product.amplitude(0, 0, 0).re, 1.0);
        assert!(product.amplitudes()[1..].iter().all(|z| z.norm() == 0.0));

        let bisep = ghz_state(&GhzClassParams::new(FRAC_PI_4, 0.0).unwrap());
        assert_abs_diff_eq!(bisep.amplitude(1, 1, 0).re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_eq!(bisep.amplitude(1, 1, 1).re, 0.0);
    }

    #[test]
    fn ghz_params_range_is_enforced() {
        assert!(GhzClassParams::new(-0.1, 0.0).is_err());
        assert!(GhzClassParams::new(0.0, 2.0).is_err());
        assert!(GhzClassParams::new(FRAC_PI_2 + 1e-13, 0.0).is_ok());
    }

    #[test]
    fn w_family_layout() {
        let p = WClassParams::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(w_state(&p).amplitude(0, 0, 1).re, 1.0);
        let sym = w_state(&WClassParams::symmetric());
        for (b1, b2, b3) in [(0, 0, 1), (0, 1, 0), (1, 0, 0)] {
            assert_abs_diff_eq!(sym.amplitude(b1, b2, b3).re, 1.0 / 3f64.sqrt());
        }
        assert!(WClassParams::new(-0.5, 0.5, 0.5f64.sqrt()).is_err());
        assert!(WClassParams::new(0.5, 0.5, 0.5).is_err());
    }

    #[test]
    fn partial_trace_of_product_is_pure() {
        let s = make_state(real([1., 0., 0., 0., 0., 0., 0., 0.]), false).unwrap();
        let rho = partial_trace(&s, QubitPair::Q12).unwrap();
        let mut expected = Mat4::zeros();
        expected.0[0][0] = 1.0.into();
        assert_eq!(*rho.matrix(), expected);
    }

    #[test]
    fn partial_trace_of_ghz() {
        let ghz = ghz_state(&GhzClassParams::new(FRAC_PI_4, FRAC_PI_2).unwrap());
        let rho = partial_trace(&ghz, QubitPair::Q12).unwrap();
        let expected = Mat4::from_real_diagonal(&[0.5, 0.0, 0.0, 0.5]);
        assert!(rho.matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn partial_trace_of_symmetric_w_has_rank_two() {
        let sym = w_state(&WClassParams::symmetric());
        for pair in QubitPair::ALL {
            let rho = partial_trace(&sym, pair).unwrap();
            assert_abs_diff_eq!(rho.matrix().trace().re, 1.0, epsilon = 1e-14);
            let ev = herm_eigenvalues(rho.matrix(), 1e-12).unwrap();
            assert_abs_diff_eq!(ev[0], 2.0 / 3.0, epsilon = 1e-14);
            assert_abs_diff_eq!(ev[1], 1.0 / 3.0, epsilon = 1e-14);
            assert_abs_diff_eq!(ev[2], 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn pair_ordering_follows_labels() {
        // |0> on qubit 1, |1> on qubit 2, |0> on qubit 3 -> index 2
        let mut v = real([0.0; 8]);
        v[basis_index(0, 1, 0)] = 1.0.into();
        let s = make_state(v, false).unwrap();
        // pair 12 sees |01>, pair 23 sees |10>, pair 13 sees |00>
        assert_eq!(partial_trace(&s, QubitPair::Q12).unwrap().matrix()[(1, 1)].re, 1.0);
        assert_eq!(partial_trace(&s, QubitPair::Q23).unwrap().matrix()[(2, 2)].re, 1.0);
        assert_eq!(partial_trace(&s, QubitPair::Q13).unwrap().matrix()[(0, 0)].re, 1.0);
    }

    #[test]
    fn pair_labels_parse() {
        assert_eq!("31".parse::<QubitPair>().unwrap(), QubitPair::Q13);
        assert!("14".parse::<QubitPair>().is_err());
        assert!(Qubit::try_from(4).is_err());
    }
}
