use std::f64::consts::{PI, TAU};
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;

use super::matrix::{kron_2_2, kron_2_4, Mat2, Mat8, SquareMatrix};
use super::state::ThreeQubitPureState;
use crate::error::{Error, Result};

/// Imaginary residue above which an expectation value is rejected.
pub const IMAG_RESIDUE_TOL: f64 = 1e-10;
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Direction on the Bloch sphere, kept both as angles and as its Cartesian
/// image.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitVector {
    polar: f64,
    azimuth: f64,
    xyz: [f64; 3],
}

impl UnitVector {
    pub const X: UnitVector = UnitVector {
        polar: PI / 2.0,
        azimuth: 0.0,
        xyz: [1.0, 0.0, 0.0],
    };
    pub const Y: UnitVector = UnitVector {
        polar: PI / 2.0,
        azimuth: PI / 2.0,
        xyz: [0.0, 1.0, 0.0],
    };
    pub const Z: UnitVector = UnitVector {
        polar: 0.0,
        azimuth: 0.0,
        xyz: [0.0, 0.0, 1.0],
    };

    /// Polar angle must lie in `[0, pi]`; the azimuth is reduced mod `2 pi`.
    pub fn new(polar: f64, azimuth: f64) -> Result<Self> {
        if !polar.is_finite() || !azimuth.is_finite() {
            return Err(Error::InvalidParameter("non-finite angle".into()));
        }
        if !(-1e-12..=PI + 1e-12).contains(&polar) {
            return Err(Error::InvalidParameter(format!(
                "polar angle {polar} outside [0, pi]"
            )));
        }
        let polar = polar.clamp(0.0, PI);
        let azimuth = azimuth.rem_euclid(TAU);
        let (st, ct) = polar.sin_cos();
        let (sp, cp) = azimuth.sin_cos();
        Ok(Self {
            polar,
            azimuth,
            xyz: [st * cp, st * sp, ct],
        })
    }

    /// Normalize a nonzero Cartesian vector.
    pub fn from_cartesian(v: [f64; 3]) -> Result<Self> {
        let n = norm3(&v);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "cannot normalize vector {v:?}"
            )));
        }
        let xyz = v.map(|c| c / n);
        let polar = xyz[2].clamp(-1.0, 1.0).acos();
        let azimuth = xyz[1].atan2(xyz[0]).rem_euclid(TAU);
        Ok(Self {
            polar,
            azimuth,
            xyz,
        })
    }

    pub fn polar(&self) -> f64 {
        self.polar
    }
    pub fn azimuth(&self) -> f64 {
        self.azimuth
    }
    pub fn cartesian(&self) -> [f64; 3] {
        self.xyz
    }

    pub fn dot(&self, other: &UnitVector) -> f64 {
        dot3(&self.xyz, &other.xyz)
    }
}

impl Neg for UnitVector {
    type Output = UnitVector;
    fn neg(self) -> UnitVector {
        UnitVector::from_cartesian(self.xyz.map(|c| -c)).expect("unit vector")
    }
}

pub(crate) fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm3(a: &[f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub const PAULI_X: Mat2 = super::matrix::SquareMatrix([[c0(), c1()], [c1(), c0()]]);
pub const PAULI_Y: Mat2 = super::matrix::SquareMatrix([[c0(), cmi()], [ci(), c0()]]);
pub const PAULI_Z: Mat2 = super::matrix::SquareMatrix([[c1(), c0()], [c0(), cm1()]]);

const fn c0() -> Complex64 {
    Complex64::new(0.0, 0.0)
}
const fn c1() -> Complex64 {
    Complex64::new(1.0, 0.0)
}
const fn cm1() -> Complex64 {
    Complex64::new(-1.0, 0.0)
}
const fn ci() -> Complex64 {
    Complex64::new(0.0, 1.0)
}
const fn cmi() -> Complex64 {
    Complex64::new(0.0, -1.0)
}

pub const PAULIS: [Mat2; 3] = [PAULI_X, PAULI_Y, PAULI_Z];

/// A 2x2 Hermitian observable on one qubit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingleQubitObservable(pub Mat2);

impl SingleQubitObservable {
    pub fn identity() -> Self {
        Self(Mat2::identity())
    }

    /// `sigma_x`, `sigma_y`, `sigma_z` for `axis` 0, 1, 2.
    pub fn pauli(axis: usize) -> Self {
        Self(PAULIS[axis])
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }
}

/// `n . sigma`
pub fn spin_observable(n: &UnitVector) -> SingleQubitObservable {
    let [x, y, z] = n.cartesian();
    SingleQubitObservable(SquareMatrix([[c(z, 0.0), c(x, -y)], [c(x, y), c(-z, 0.0)]]))
}

/// 8x8 operator on the three-qubit space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThreeQubitOperator(pub Mat8);

impl ThreeQubitOperator {
    pub fn matrix(&self) -> &Mat8 {
        &self.0
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.0.is_hermitian(tol)
    }
}

impl Add for ThreeQubitOperator {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl Sub for ThreeQubitOperator {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

/// `o1 (x) o2 (x) o3`, qubit 1 most significant.
pub fn tensor3(
    o1: &SingleQubitObservable,
    o2: &SingleQubitObservable,
    o3: &SingleQubitObservable,
) -> ThreeQubitOperator {
    ThreeQubitOperator(kron_2_4(&o1.0, &kron_2_2(&o2.0, &o3.0)))
}

/// `<psi| o |psi>` for a Hermitian `o`.
pub fn expectation(s: &ThreeQubitPureState, o: &ThreeQubitOperator) -> Result<f64> {
    let amps = s.amplitudes();
    let z = o.0.sandwich(amps, amps);
    if z.im.abs() > IMAG_RESIDUE_TOL {
        return Err(Error::ImaginaryResidue(z.im.abs()));
    }
    Ok(z.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::eigen::herm_eigenvalues;
    use crate::qcore::state::{ghz_state, make_state, GhzClassParams};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn basis000() -> ThreeQubitPureState {
        let mut v = [Complex64::new(0.0, 0.0); 8];
        v[0] = 1.0.into();
        make_state(v, false).unwrap()
    }

    fn ghz() -> ThreeQubitPureState {
        ghz_state(&GhzClassParams::new(FRAC_PI_4, FRAC_PI_2).unwrap())
    }

    #[test]
    fn spin_observable_reproduces_paulis() {
        assert_eq!(spin_observable(&UnitVector::new(0.0, 0.0).unwrap()).0, PAULI_Z);
        let x = spin_observable(&UnitVector::X).0;
        assert!(x.max_abs_diff(&PAULI_X) < 1e-16);
        let y = spin_observable(&UnitVector::new(FRAC_PI_2, FRAC_PI_2).unwrap()).0;
        assert!(y.max_abs_diff(&PAULI_Y) < 1e-16);
    }

    #[test]
    fn spin_observable_has_unit_spectrum() {
        let n = UnitVector::new(1.1, 4.0).unwrap();
        let o = spin_observable(&n);
        assert!(o.0.is_hermitian(HERMITIAN_TOL));
        let ev = herm_eigenvalues(&o.0, HERMITIAN_TOL).unwrap();
        assert_abs_diff_eq!(ev[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ev[1], -1.0, epsilon = 1e-12);
    }

    #[test]
    fn unit_vector_round_trip_and_range() {
        let v = UnitVector::from_cartesian([0.3, -0.4, -1.2]).unwrap();
        let w = UnitVector::new(v.polar(), v.azimuth()).unwrap();
        for k in 0..3 {
            assert_abs_diff_eq!(v.cartesian()[k], w.cartesian()[k], epsilon = 1e-15);
        }
        assert!((0.0..std::f64::consts::TAU).contains(&v.azimuth()));
        assert!(UnitVector::new(-0.5, 0.0).is_err());
        assert!(UnitVector::from_cartesian([0.0; 3]).is_err());
        assert_abs_diff_eq!(UnitVector::new(0.0, -1.0).unwrap().azimuth(), std::f64::consts::TAU - 1.0);
    }

    #[test]
    fn tensor_of_identities_is_identity() {
        let i = SingleQubitObservable::identity();
        assert_eq!(tensor3(&i, &i, &i).0, Mat8::identity());
    }

    #[test]
    fn basic_expectations() {
        let i = SingleQubitObservable::identity();
        let z = SingleQubitObservable::pauli(2);
        let x = SingleQubitObservable::pauli(0);
        assert_eq!(expectation(&basis000(), &tensor3(&i, &i, &i)).unwrap(), 1.0);
        assert_eq!(expectation(&basis000(), &tensor3(&z, &i, &i)).unwrap(), 1.0);
        assert_abs_diff_eq!(expectation(&ghz(), &tensor3(&z, &z, &z)).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(expectation(&ghz(), &tensor3(&x, &x, &x)).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn non_hermitian_operator_is_flagged() {
        let mut m = Mat8::zeros();
        m.0[0][0] = Complex64::new(0.0, 1.0);
        let err = expectation(&basis000(), &ThreeQubitOperator(m)).unwrap_err();
        assert!(matches!(err, Error::ImaginaryResidue(_)));
    }
}
