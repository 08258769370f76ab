//! Finite-shot simulation of local projective spin measurements.
//!
//! Outcomes are indexed `4 o1 + 2 o2 + o3` with `o = 0` for the `+1`
//! result and `o = 1` for `-1`. Each shot draws one uniform variate and
//! inverts the cumulative distribution of the eight outcomes.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::bell::{MeasurementSettings, Party, SVETLICHNY_TERMS};
use crate::error::{Error, Result};
use crate::qcore::random::{seeded_rng, sub_seed};
use crate::qcore::{kron_2_2, kron_2_4, Mat2, SquareMatrix, ThreeQubitPureState, UnitVector};

/// Negative probabilities down to this are treated as roundoff and set to 0.
pub const PROBABILITY_CLAMP: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShotEstimate {
    pub mean: f64,
    pub stderr: f64,
    /// Shots per correlator.
    pub shots: u64,
    pub seed: u64,
}

impl ShotEstimate {
    /// `(mean - exact) / stderr`; infinite if the estimate has no spread but
    /// misses `exact`.
    pub fn z_score(&self, exact: f64) -> f64 {
        let d = self.mean - exact;
        if self.stderr > 0.0 {
            d / self.stderr
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(d)
        }
    }
}

/// `(I + r n.sigma) / 2`
pub fn spin_projector(n: &UnitVector, r: f64) -> Mat2 {
    let [x, y, z] = n.cartesian();
    let h = 0.5 * r;
    SquareMatrix([
        [Complex64::new(0.5 + h * z, 0.0), Complex64::new(h * x, -h * y)],
        [Complex64::new(h * x, h * y), Complex64::new(0.5 - h * z, 0.0)],
    ])
}

fn sign_of(bit: usize) -> f64 {
    if bit == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Born-rule probabilities of the eight joint outcomes.
pub fn outcome_distribution(
    s: &ThreeQubitPureState,
    a: &UnitVector,
    b: &UnitVector,
    c: &UnitVector,
) -> Result<[f64; 8]> {
    let pa = [spin_projector(a, 1.0), spin_projector(a, -1.0)];
    let pb = [spin_projector(b, 1.0), spin_projector(b, -1.0)];
    let pc = [spin_projector(c, 1.0), spin_projector(c, -1.0)];
    let psi = s.amplitudes();
    let mut out = [0.0; 8];
    for (k, slot) in out.iter_mut().enumerate() {
        let proj = kron_2_4(&pa[k >> 2], &kron_2_2(&pb[(k >> 1) & 1], &pc[k & 1]));
        let p = proj.sandwich(psi, psi).re;
        if p < -PROBABILITY_CLAMP {
            return Err(Error::NegativeBeyondClamp {
                quantity: "outcome probability",
                value: p,
            });
        }
        *slot = p.max(0.0);
    }
    Ok(out)
}

/// `r1 r2 r3` for outcome index `k`.
pub fn outcome_parity(k: usize) -> f64 {
    sign_of((k.count_ones() & 1) as usize)
}

/// Sample `r1 r2 r3` over `shots` independent shots. The standard error is
/// the sample standard deviation over `sqrt(shots)`; for a single shot the
/// deviation is undefined and its upper bound 1 is used.
pub fn estimate_correlator(
    s: &ThreeQubitPureState,
    a: &UnitVector,
    b: &UnitVector,
    c: &UnitVector,
    shots: u64,
    seed: u64,
) -> Result<ShotEstimate> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be at least 1".into()));
    }
    let probs = outcome_distribution(s, a, b, c)?;
    let mut cdf = [0.0; 8];
    let mut acc = 0.0;
    for k in 0..8 {
        acc += probs[k];
        cdf[k] = acc;
    }
    let total = acc;

    let mut rng = seeded_rng(seed);
    let mut plus: u64 = 0;
    for _ in 0..shots {
        let u = rng.random::<f64>() * total;
        let k = cdf.iter().position(|&x| u < x).unwrap_or(7);
        if outcome_parity(k) > 0.0 {
            plus += 1;
        }
    }
    let n = shots as f64;
    let mean = (2.0 * plus as f64 - n) / n;
    let sd = if shots > 1 {
        (n / (n - 1.0) * (1.0 - mean * mean)).max(0.0).sqrt()
    } else {
        1.0
    };
    Ok(ShotEstimate {
        mean,
        stderr: sd / n.sqrt(),
        shots,
        seed,
    })
}

/// The eight correlators of `S`, each from its own `shots` and sub-seed
/// `sub_seed(seed, term)`, combined with their signs; standard errors add in
/// quadrature.
pub fn estimate_svetlichny(
    s: &ThreeQubitPureState,
    ms: &MeasurementSettings,
    shots_per_correlator: u64,
    seed: u64,
) -> Result<ShotEstimate> {
    let terms = SVETLICHNY_TERMS
        .par_iter()
        .enumerate()
        .map(|(k, &(pa, pb, pc, sign))| {
            let e = estimate_correlator(
                s,
                &ms.pick(Party::A, pa),
                &ms.pick(Party::B, pb),
                &ms.pick(Party::C, pc),
                shots_per_correlator,
                sub_seed(seed, k as u64),
            )?;
            Ok((sign * e.mean, e.stderr * e.stderr))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ShotEstimate {
        mean: terms.iter().map(|t| t.0).sum(),
        stderr: terms.iter().map(|t| t.1).sum::<f64>().sqrt(),
        shots: shots_per_correlator,
        seed,
    })
}
