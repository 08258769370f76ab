use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::Rng;

use super::{svetlichny_value_direct, MeasurementSettings, SmaxReport};
use crate::ascent::newton_ascent;
use crate::entanglement::{w_profile_closed, EntanglementProfile, GHZ_TANGLE_THRESHOLD};
use crate::error::{Error, Result};
use crate::qcore::random::seeded_rng;
use crate::qcore::{w_state, UnitVector, WClassParams};

pub const W_MULTISTARTS: usize = 20;
const W_SEED: u64 = 0x5745_414e_474c_4553;
const ASCENT_TOL: f64 = 1e-12;
const MAX_CYCLES: usize = 100_000;
const POLISH_STEPS: usize = 100;

/// Rows `L_k` of the reduced form `sum_k w_k sin(L_k . tilde)`, for `Sigma`,
/// `Sigma_a`, `Sigma_b`, `Sigma_c`.
const LINES: [[f64; 3]; 4] = [
    [1.0, 1.0, 1.0],
    [-1.0, 1.0, 1.0],
    [1.0, -1.0, 1.0],
    [1.0, 1.0, -1.0],
];

/// `arccos(1/sqrt 3)`, the common half-angle of the symmetric W optimum.
pub const SYMMETRIC_W_TILDE: f64 = 0.955_316_618_124_509_2;

/// `<A B C>` on a W-class state, in terms of its pair concurrences:
/// `cos b (-cos a cos c + c31 sin a sin c cos(phi_a - phi_c))
///  + sin b (c23 cos a sin c cos(phi_b - phi_c) + c12 sin a cos c cos(phi_a - phi_b))`.
pub fn w_correlator_closed(
    profile: &EntanglementProfile,
    a: &UnitVector,
    b: &UnitVector,
    c: &UnitVector,
) -> f64 {
    let (sa, ca) = a.polar().sin_cos();
    let (sb, cb) = b.polar().sin_cos();
    let (sc, cc) = c.polar().sin_cos();
    let (pa, pb, pc) = (a.azimuth(), b.azimuth(), c.azimuth());
    cb * (-ca * cc + profile.c31 * sa * sc * (pa - pc).cos())
        + sb * (profile.c23 * ca * sc * (pb - pc).cos() + profile.c12 * sa * cc * (pa - pb).cos())
}

/// Angle bookkeeping of the reduced W form with all azimuths zero and
/// `theta_bar = pi/2`, so that `theta_g = pi/2 - tilde_g` and
/// `theta_g' = pi/2 + tilde_g`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WReducedTerms {
    pub theta_bar_a: f64,
    pub theta_bar_b: f64,
    pub theta_bar_c: f64,
    pub theta_tilde_a: f64,
    pub theta_tilde_b: f64,
    pub theta_tilde_c: f64,
    pub sigma: f64,
    pub sigma_a: f64,
    pub sigma_b: f64,
    pub sigma_c: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p4: f64,
    pub g: f64,
}

impl WReducedTerms {
    pub fn new(tilde: [f64; 3]) -> Self {
        let [ta, tb, tc] = tilde;
        let sigma = ta + tb + tc;
        let (sigma_a, sigma_b, sigma_c) = (sigma - 2.0 * ta, sigma - 2.0 * tb, sigma - 2.0 * tc);
        let (s, sa, sb, sc) = (sigma.sin(), sigma_a.sin(), sigma_b.sin(), sigma_c.sin());
        Self {
            theta_bar_a: FRAC_PI_2,
            theta_bar_b: FRAC_PI_2,
            theta_bar_c: FRAC_PI_2,
            theta_tilde_a: ta,
            theta_tilde_b: tb,
            theta_tilde_c: tc,
            sigma,
            sigma_a,
            sigma_b,
            sigma_c,
            p1: (-s + sa + sb + sc) / 4.0,
            p2: (s + sa - sb + sc) / 4.0,
            p3: (s - sa + sb + sc) / 4.0,
            p4: (s + sa + sb - sc) / 4.0,
            g: (ta + tb + tc).sin() + (ta + tb - tc).sin() + (ta - tb + tc).sin() + (ta - tb - tc).sin(),
        }
    }

    /// `p1 + p2 c31 + p3 c23 + p4 c12`; `<S>` is four times this.
    pub fn weighted_sum(&self, profile: &EntanglementProfile) -> f64 {
        self.p1 + self.p2 * profile.c31 + self.p3 * profile.c23 + self.p4 * profile.c12
    }
}

/// Signed `<S>` of the reduced form.
pub fn w_reduced_value(
    profile: &EntanglementProfile,
    tilde_a: f64,
    tilde_b: f64,
    tilde_c: f64,
) -> f64 {
    4.0 * WReducedTerms::new([tilde_a, tilde_b, tilde_c]).weighted_sum(profile)
}

/// `g = x cos tilde_g + z sin tilde_g`, `g' = x cos tilde_g - z sin tilde_g`.
pub fn w_settings_from_tilde(tilde: [f64; 3]) -> MeasurementSettings {
    let pair = |t: f64| {
        let (s, c) = t.sin_cos();
        (
            UnitVector::from_cartesian([c, 0.0, s]).expect("unit"),
            UnitVector::from_cartesian([c, 0.0, -s]).expect("unit"),
        )
    };
    let (a, ap) = pair(tilde[0]);
    let (b, bp) = pair(tilde[1]);
    let (c, cp) = pair(tilde[2]);
    MeasurementSettings::new(a, ap, b, bp, c, cp)
}

pub fn optimal_settings_w_symmetric() -> MeasurementSettings {
    w_settings_from_tilde([SYMMETRIC_W_TILDE; 3])
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WMax {
    pub value: f64,
    /// Maximizing half-angles, each reduced to `[0, 2 pi)`.
    pub tilde: [f64; 3],
    pub settings: MeasurementSettings,
    /// `p1 + p2 c31 + p3 c23 + p4 c12` at the maximum.
    pub weighted_sum: f64,
    pub converged_starts: usize,
}

impl WMax {
    pub fn violates(&self) -> bool {
        self.weighted_sum > 1.0
    }
}

/// Bring each angle into `[0, 2 pi)` and use the invariance of the reduced
/// form under shifting two angles by `pi`, and under mapping all three to
/// `pi - tilde`, to pick the representative with the smallest angle sum.
fn canonical_tilde(t: [f64; 3]) -> [f64; 3] {
    let fold = |t: [f64; 3]| {
        let mut t = t.map(|x| x.rem_euclid(TAU));
        let mut high: Vec<usize> = (0..3).filter(|&k| t[k] >= PI).collect();
        while high.len() >= 2 {
            for k in high.drain(..2) {
                t[k] -= PI;
            }
        }
        t
    };
    let direct = fold(t);
    let mirrored = fold(t.map(|x| PI - x));
    let sum = |t: &[f64; 3]| t.iter().sum::<f64>();
    if sum(&mirrored) < sum(&direct) {
        mirrored
    } else {
        direct
    }
}

fn line_weights(p: &EntanglementProfile) -> [f64; 4] {
    let (c12, c23, c31) = (p.c12, p.c23, p.c31);
    [
        -1.0 + c31 + c23 + c12,
        1.0 + c31 - c23 + c12,
        1.0 - c31 + c23 + c12,
        1.0 + c31 + c23 - c12,
    ]
}

/// Gradient and Hessian of the reduced form.
fn reduced_model(w: &[f64; 4], t: &[f64; 3]) -> ([f64; 3], [[f64; 3]; 3]) {
    let mut g = [0.0; 3];
    let mut h = [[0.0; 3]; 3];
    for (wk, l) in w.iter().zip(&LINES) {
        let arg = l[0] * t[0] + l[1] * t[1] + l[2] * t[2];
        let (s, c) = arg.sin_cos();
        for i in 0..3 {
            g[i] += wk * c * l[i];
            for j in 0..3 {
                h[i][j] -= wk * s * l[i] * l[j];
            }
        }
    }
    (g, h)
}

/// Coordinate ascent where each step maximizes the objective exactly over one
/// angle: along any single angle it has the form `A sin x + B cos x + C`.
fn ascend(profile: &EntanglementProfile, start: [f64; 3]) -> ([f64; 3], f64, bool) {
    let f = |t: &[f64; 3]| w_reduced_value(profile, t[0], t[1], t[2]);
    let mut t = start;
    let mut value = f(&t);
    for _ in 0..MAX_CYCLES {
        let before = value;
        for k in 0..3 {
            let at = |x: f64| {
                let mut u = t;
                u[k] = x;
                f(&u)
            };
            let (f0, f1, f2) = (at(0.0), at(FRAC_PI_2), at(PI));
            let c = (f0 + f2) / 2.0;
            let (a, b) = (f1 - c, (f0 - f2) / 2.0);
            let x = a.atan2(b);
            let fx = at(x);
            if fx >= value {
                t[k] = x;
                value = fx;
            }
        }
        if value - before < ASCENT_TOL {
            break;
        }
    }
    let w = line_weights(profile);
    let polish = newton_ascent(
        t,
        value,
        |t| reduced_model(&w, t),
        |t, d| std::array::from_fn(|k| t[k] + d[k]),
        f,
        ASCENT_TOL,
        POLISH_STEPS,
        |_| {},
    );
    (polish.point, polish.value, polish.converged)
}

/// Maximum of `|<S>|` over the reduced W form from the fixed default seed.
pub fn smax_w(profile: &EntanglementProfile) -> Result<WMax> {
    smax_w_with(profile, W_MULTISTARTS, W_SEED)
}

/// Multistart ascent from `starts` half-angle triples uniform in `[0, pi]^3`.
/// The form is odd under `tilde -> -tilde`, so maximizing the signed value
/// maximizes its modulus.
pub fn smax_w_with(profile: &EntanglementProfile, starts: usize, seed: u64) -> Result<WMax> {
    if profile.tau > GHZ_TANGLE_THRESHOLD {
        return Err(Error::WrongFamily("W-class form needs tau = 0"));
    }
    if starts == 0 {
        return Err(Error::InvalidParameter("at least one start".into()));
    }
    let mut rng = seeded_rng(seed);
    let mut best: Option<([f64; 3], f64)> = None;
    let mut converged_starts = 0;
    for _ in 0..starts {
        let start: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.0..=PI));
        let (t, v, ok) = ascend(profile, start);
        if !ok {
            continue;
        }
        converged_starts += 1;
        if best.is_none_or(|(_, bv)| v > bv) {
            best = Some((t, v));
        }
    }
    let (t, value) = best.ok_or(Error::NotConverged)?;
    let tilde = canonical_tilde(t);
    Ok(WMax {
        value,
        tilde,
        settings: w_settings_from_tilde(tilde),
        weighted_sum: value / 4.0,
        converged_starts,
    })
}

/// Numeric maximum over the reduced form, with the operator value at the
/// maximizing settings.
pub fn w_smax_report(params: &WClassParams) -> Result<SmaxReport> {
    let m = smax_w(&w_profile_closed(params))?;
    Ok(SmaxReport {
        closed_value: m.value,
        branch: None,
        achieving_settings: m.settings,
        operator_value_at_settings: svetlichny_value_direct(&w_state(params), &m.settings)?,
    })
}
