//! Seeded sampling helpers. All randomness in the crate flows through
//! [`seeded_rng`], a ChaCha8 stream, so results are reproducible from one
//! 64-bit seed.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::matrix::{Mat2, SquareMatrix};
use super::observable::UnitVector;
use super::state::{make_state, ThreeQubitPureState};

pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer applied to `seed` mixed with `index`; used to give
/// every task (grid row, correlator, start) its own stream.
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform direction: azimuth uniform on `[0, 2 pi)`, cosine of the polar
/// angle uniform on `[-1, 1]`.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> UnitVector {
    let cos_polar: f64 = rng.random_range(-1.0..=1.0);
    let azimuth: f64 = rng.random_range(0.0..TAU);
    UnitVector::new(cos_polar.acos(), azimuth).expect("sampled angles are in range")
}

/// Haar-random pure state from 16 independent standard normals.
pub fn haar_random_state<R: Rng + ?Sized>(rng: &mut R) -> ThreeQubitPureState {
    let amps: [Complex64; 8] = std::array::from_fn(|_| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    });
    make_state(amps, true).expect("gaussian vector is nonzero")
}

/// Haar-random element of SU(2) from a uniformly random unit quaternion.
pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    let mut q = [0.0f64; 4];
    for v in q.iter_mut() {
        *v = rng.sample(StandardNormal);
    }
    let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    let [a, b, c, d] = q.map(|v| v / n);
    let u = Complex64::new(a, b);
    let v = Complex64::new(c, d);
    SquareMatrix([[u, -v.conj()], [v, u.conj()]])
}
