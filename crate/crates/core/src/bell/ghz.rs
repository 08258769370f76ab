use super::{svetlichny_value_direct, Branch, MeasurementSettings, SmaxReport};
use crate::entanglement::{ghz_profile_closed, EntanglementProfile};
use crate::error::{Error, Result};
use crate::qcore::{ghz_state, GhzClassParams, UnitVector};

/// Largest pair concurrence `c23` or `c31` accepted as zero by
/// [`smax_ghz_closed`].
const OFF_PAIR_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GhzClosedTerms {
    pub p: f64,
    pub q: f64,
}

impl GhzClosedTerms {
    /// `P = 1 - 2 sin^2(theta) sin^2(theta3)`, `Q = sin^2(theta) sin(2 theta3)`.
    pub fn new(params: &GhzClassParams) -> Self {
        let s = params.theta().sin();
        let s3 = params.theta3().sin();
        Self {
            p: 1.0 - 2.0 * s * s * s3 * s3,
            q: s * s * (2.0 * params.theta3()).sin(),
        }
    }
}

/// `<A D C>` on the GHZ-class state:
/// `cos a cos d (P cos c + Q cos phi_c sin c)
///  + sin 2theta sin a sin d (cos theta3 cos phi_ad cos c + sin theta3 cos phi_adc sin c)`
/// with polar angles `a, d, c`, `phi_ad = phi_a + phi_d` and
/// `phi_adc = phi_a + phi_d + phi_c`.
pub fn ghz_correlator_closed(
    params: &GhzClassParams,
    a: &UnitVector,
    d: &UnitVector,
    c: &UnitVector,
) -> f64 {
    let GhzClosedTerms { p, q } = GhzClosedTerms::new(params);
    let (sa, ca) = a.polar().sin_cos();
    let (sd, cd) = d.polar().sin_cos();
    let (sc, cc) = c.polar().sin_cos();
    let (s3, c3) = params.theta3().sin_cos();
    let phi_ad = a.azimuth() + d.azimuth();
    let phi_adc = phi_ad + c.azimuth();
    ca * cd * (p * cc + q * c.azimuth().cos() * sc)
        + (2.0 * params.theta()).sin() * sa * sd * (c3 * phi_ad.cos() * cc + s3 * phi_adc.cos() * sc)
}

/// `(4 sqrt(1 - tau), 4 sqrt(c12^2 + 2 tau))`.
pub fn ghz_branch_values(tau: f64, c12_sq: f64) -> (f64, f64) {
    (
        4.0 * (1.0 - tau).max(0.0).sqrt(),
        4.0 * (c12_sq + 2.0 * tau).max(0.0).sqrt(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GhzClosedMax {
    pub value: f64,
    pub branch: Branch,
}

/// Closed-form maximum from the profile of a GHZ-class state.
pub fn smax_ghz_closed(profile: &EntanglementProfile) -> Result<GhzClosedMax> {
    if profile.c23 > OFF_PAIR_TOL || profile.c31 > OFF_PAIR_TOL {
        return Err(Error::WrongFamily(
            "GHZ-class closed form needs c23 = c31 = 0",
        ));
    }
    let c12_sq = profile.c12 * profile.c12;
    let (low, high) = ghz_branch_values(profile.tau, c12_sq);
    Ok(if 3.0 * profile.tau + c12_sq <= 1.0 {
        GhzClosedMax {
            value: low,
            branch: Branch::Low,
        }
    } else {
        GhzClosedMax {
            value: high,
            branch: Branch::High,
        }
    })
}

fn unit(v: [f64; 3]) -> UnitVector {
    UnitVector::from_cartesian(v).expect("nonzero direction")
}

/// Settings reaching the closed-form maximum on the branch selected by the
/// state's profile. Both sets satisfy `<S> = 2 <M>`.
///
/// Low branch: `a = a' = z`, `b = -b' = z`, `c = c' ∝ Q x + P z`.
/// High branch: `a = b = x`, `a' = b' = y`, `c, c' = cos t n -/+ sin t y` with
/// `n = (sin theta3, 0, cos theta3)` and `tan t = sin theta3`.
pub fn optimal_settings_ghz(params: &GhzClassParams) -> MeasurementSettings {
    let profile = ghz_profile_closed(params);
    let low = 3.0 * profile.tau + profile.c12 * profile.c12 <= 1.0;
    let (x, y, z) = (UnitVector::X, UnitVector::Y, UnitVector::Z);
    if low {
        let GhzClosedTerms { p, q } = GhzClosedTerms::new(params);
        let c = if p.hypot(q) > 1e-14 { unit([q, 0.0, p]) } else { z };
        MeasurementSettings::new(z, z, z, -z, c, c)
    } else {
        let (s3, c3) = params.theta3().sin_cos();
        let (st, ct) = s3.atan().sin_cos();
        let c = unit([ct * s3, -st, ct * c3]);
        let cp = unit([ct * s3, st, ct * c3]);
        MeasurementSettings::new(x, y, x, y, c, cp)
    }
}

/// The two explicit vector sets quoted with the closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuotedSet {
    /// `a = x, a' = y, b = x cos t - y sin t, b' = x cos t + y sin t,
    /// c = z cos theta3 + x sin theta3, c' = y`.
    First,
    /// `a = a' = z, b = x cos t + z sin t, b' = x cos t - z sin t, c = c' = x`.
    Second,
}

/// The quoted vector sets, with `tan t = sin theta3`. These reach the closed
/// form only at special points; see [`optimal_settings_ghz`] for settings
/// that reach it everywhere.
pub fn quoted_settings_ghz(params: &GhzClassParams, set: QuotedSet) -> MeasurementSettings {
    let (s3, c3) = params.theta3().sin_cos();
    let (st, ct) = s3.atan().sin_cos();
    let (x, y, z) = (UnitVector::X, UnitVector::Y, UnitVector::Z);
    match set {
        QuotedSet::First => MeasurementSettings::new(
            x,
            y,
            unit([ct, -st, 0.0]),
            unit([ct, st, 0.0]),
            unit([s3, 0.0, c3]),
            y,
        ),
        QuotedSet::Second => MeasurementSettings::new(
            z,
            z,
            unit([ct, 0.0, st]),
            unit([ct, 0.0, -st]),
            x,
            x,
        ),
    }
}

/// Closed-form maximum, branch, achieving settings and the operator value
/// there.
pub fn ghz_smax_report(params: &GhzClassParams) -> Result<SmaxReport> {
    let closed = smax_ghz_closed(&ghz_profile_closed(params))?;
    let settings = optimal_settings_ghz(params);
    Ok(SmaxReport {
        closed_value: closed.value,
        branch: Some(closed.branch),
        achieving_settings: settings,
        operator_value_at_settings: svetlichny_value_direct(&ghz_state(params), &settings)?,
    })
}
