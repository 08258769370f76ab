//! Numeric maximization of `|<S>|` over all six measurement directions, and
//! grid harnesses comparing it with the closed forms.
//!
//! The see-saw update exploits that `<S>` is affine in each direction: with the
//! other five fixed, the terms containing `n` sum to `v . n`, so `n = v / |v|`
//! is the exact maximizer. Each multistart draws its initial settings from a
//! generator seeded by `sub_seed(seed, start)`; each grid row uses
//! `sub_seed(seed, row)` as its base seed. Results are therefore identical for
//! serial and parallel runs.

use std::f64::consts::FRAC_PI_2;

use log::{info, warn};
use rayon::prelude::*;

use crate::ascent::newton_ascent;
use crate::bell::{
    correlation_tensor, smax_ghz_closed, smax_w, svetlichny_coefficients, svetlichny_expectation,
    Branch, CorrelationTensor, MeasurementSettings, Party, SVETLICHNY_TERMS,
};
use crate::entanglement::{
    entanglement_profile, ghz_profile_closed, w_profile_closed, EntanglementProfile,
};
use crate::error::{Error, Result};
use crate::qcore::random::{seeded_rng, sub_seed};
use crate::qcore::{ghz_state, w_state, GhzClassParams, ThreeQubitPureState, UnitVector, WClassParams};

/// Coefficient vectors shorter than this leave the direction unchanged.
pub const DEGENERATE_NORM: f64 = 1e-14;
/// Start count used when a grid row first comes out numeric-below.
pub const ESCALATED_STARTS: usize = 200;
/// Newton steps allowed after the see-saw cycles.
pub const POLISH_STEPS: usize = 100;

const PARTIES: [Party; 3] = [Party::A, Party::B, Party::C];

const SLOTS: [(Party, bool); 6] = [
    (Party::A, false),
    (Party::A, true),
    (Party::B, false),
    (Party::B, true),
    (Party::C, false),
    (Party::C, true),
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizationConfig {
    pub n_starts: usize,
    /// Maximum number of full six-vector cycles per start.
    pub max_iterations: usize,
    pub convergence_tol: f64,
    pub seed: u64,
}

impl Default for OptimizationConfig {
    fn default() -> Self {
        Self {
            n_starts: 50,
            max_iterations: 500,
            convergence_tol: 1e-12,
            seed: 0,
        }
    }
}

impl OptimizationConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_starts == 0 {
            return Err(Error::InvalidParameter("n_starts must be at least 1".into()));
        }
        if !(self.convergence_tol > 0.0) {
            return Err(Error::InvalidParameter("convergence_tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizationResult {
    pub best_value: f64,
    pub best_settings: MeasurementSettings,
    /// Cycles used by the single run, or summed over all starts.
    pub iterations_used: usize,
    /// Whether the run that produced `best_value` met the tolerance.
    pub converged: bool,
    /// Final value of each start, in start order.
    pub start_values: Vec<f64>,
    /// `|<S>|` after each cycle of the winning run, starting with its initial
    /// value.
    pub cycle_trace: Vec<f64>,
    /// Cycles in which some coefficient vector was degenerate.
    pub degenerate_cycles: usize,
}

fn negate(v: &UnitVector) -> UnitVector {
    -*v
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Orthonormal tangent pair at `n`, a deterministic function of `n`.
fn tangent_basis(n: &[f64; 3]) -> [[f64; 3]; 2] {
    let k = (0..3)
        .min_by(|&i, &j| n[i].abs().total_cmp(&n[j].abs()))
        .expect("three axes");
    let mut axis = [0.0; 3];
    axis[k] = 1.0;
    let e1 = cross(n, &axis);
    let len = dot(&e1, &e1).sqrt();
    let e1 = e1.map(|c| c / len);
    [e1, cross(n, &e1)]
}

/// `d^2 <S> / dn1 dn2` for two slots of different parties.
fn cross_block(
    t: &CorrelationTensor,
    ms: &MeasurementSettings,
    (p1, f1): (Party, bool),
    (p2, f2): (Party, bool),
) -> [[f64; 3]; 3] {
    let (i1, i2) = (p1 as usize, p2 as usize);
    let i3 = 3 - i1 - i2;
    let mut b = [[0.0; 3]; 3];
    for &(pa, pb, pc, sign) in &SVETLICHNY_TERMS {
        let flags = [pa, pb, pc];
        if flags[i1] != f1 || flags[i2] != f2 {
            continue;
        }
        let w = ms.pick(PARTIES[i3], flags[i3]).cartesian();
        for (x, row) in b.iter_mut().enumerate() {
            for (y, entry) in row.iter_mut().enumerate() {
                for (z, wz) in w.iter().enumerate() {
                    let mut idx = [0; 3];
                    idx[i1] = x;
                    idx[i2] = y;
                    idx[i3] = z;
                    *entry += sign * wz * t.entries[idx[0]][idx[1]][idx[2]];
                }
            }
        }
    }
    b
}

/// Riemannian gradient and Hessian of `<S>` on the product of six spheres,
/// in the tangent coordinates of [`tangent_basis`].
fn sphere_model(t: &CorrelationTensor, ms: &MeasurementSettings) -> ([f64; 12], [[f64; 12]; 12]) {
    let n: [[f64; 3]; 6] = ms.to_array().map(|u| u.cartesian());
    let e: [[[f64; 3]; 2]; 6] = std::array::from_fn(|m| tangent_basis(&n[m]));
    let v: [[f64; 3]; 6] = std::array::from_fn(|m| {
        let (party, primed) = SLOTS[m];
        svetlichny_coefficients(t, ms, party, primed)
    });
    let mut g = [0.0; 12];
    let mut h = [[0.0; 12]; 12];
    for m in 0..6 {
        let radial = dot(&v[m], &n[m]);
        for a in 0..2 {
            g[2 * m + a] = dot(&v[m], &e[m][a]);
            h[2 * m + a][2 * m + a] = -radial;
        }
        for m2 in (m + 1)..6 {
            if SLOTS[m].0 == SLOTS[m2].0 {
                continue;
            }
            let b = cross_block(t, ms, SLOTS[m], SLOTS[m2]);
            for a in 0..2 {
                for c in 0..2 {
                    let mut s = 0.0;
                    for x in 0..3 {
                        for y in 0..3 {
                            s += e[m][a][x] * b[x][y] * e[m2][c][y];
                        }
                    }
                    h[2 * m + a][2 * m2 + c] = s;
                    h[2 * m2 + c][2 * m + a] = s;
                }
            }
        }
    }
    (g, h)
}

/// Move each direction along its great circle by the tangent step.
fn sphere_retract(ms: &MeasurementSettings, delta: &[f64; 12]) -> MeasurementSettings {
    let arr = ms.to_array();
    MeasurementSettings::from_array(std::array::from_fn(|m| {
        let n = arr[m].cartesian();
        let e = tangent_basis(&n);
        let w: [f64; 3] = std::array::from_fn(|k| delta[2 * m] * e[0][k] + delta[2 * m + 1] * e[1][k]);
        let r = dot(&w, &w).sqrt();
        if r == 0.0 {
            return arr[m];
        }
        let (sr, cr) = r.sin_cos();
        UnitVector::from_cartesian(std::array::from_fn(|k| cr * n[k] + sr * w[k] / r))
            .expect("unit step")
    }))
}

/// Alternating ascent from `init`. The sign of `<S>` is fixed at the start by
/// flipping `a` and `a'` if needed; afterwards the signed value, and hence its
/// modulus, never decreases. The cycles are followed by up to
/// [`POLISH_STEPS`] damped Newton steps on the six spheres, each accepted only
/// if it raises the value, which finishes flat maxima that the cycles
/// approach slowly.
pub fn seesaw_maximize(
    s: &ThreeQubitPureState,
    init: &MeasurementSettings,
    cfg: &OptimizationConfig,
) -> Result<OptimizationResult> {
    cfg.validate()?;
    let t = correlation_tensor(s);
    let mut ms = *init;
    let mut value = svetlichny_expectation(&t, &ms);
    if value < 0.0 {
        ms.a = negate(&ms.a);
        ms.a_prime = negate(&ms.a_prime);
        value = -value;
    }

    let mut trace = vec![value];
    let mut degenerate_cycles = 0;
    let mut cycles = 0;
    while cycles < cfg.max_iterations {
        cycles += 1;
        let before = value;
        let mut degenerate = false;
        for &(party, primed) in &SLOTS {
            let v = svetlichny_coefficients(&t, &ms, party, primed);
            let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if norm < DEGENERATE_NORM {
                degenerate = true;
                continue;
            }
            let mut arr = ms.to_array();
            arr[MeasurementSettings::slot(party, primed)] =
                UnitVector::from_cartesian(v).expect("nonzero coefficient vector");
            ms = MeasurementSettings::from_array(arr);
        }
        degenerate_cycles += usize::from(degenerate);
        value = svetlichny_expectation(&t, &ms);
        trace.push(value);
        if value - before < cfg.convergence_tol {
            break;
        }
    }

    let polish = newton_ascent(
        ms,
        value,
        |p| sphere_model(&t, p),
        sphere_retract,
        |p| svetlichny_expectation(&t, p),
        cfg.convergence_tol,
        POLISH_STEPS,
        |v| trace.push(v),
    );
    let (ms, value, converged) = (polish.point, polish.value, polish.converged);

    Ok(OptimizationResult {
        best_value: value.abs(),
        best_settings: ms,
        iterations_used: cycles,
        converged,
        start_values: vec![value.abs()],
        cycle_trace: trace,
        degenerate_cycles,
    })
}

/// Best of `cfg.n_starts` see-saw runs from uniformly random settings.
/// Ties keep the earliest start.
pub fn multistart_maximize(
    s: &ThreeQubitPureState,
    cfg: &OptimizationConfig,
) -> Result<OptimizationResult> {
    cfg.validate()?;
    let mut best: Option<OptimizationResult> = None;
    let mut start_values = Vec::with_capacity(cfg.n_starts);
    let mut iterations = 0;
    let mut degenerate = 0;
    for k in 0..cfg.n_starts {
        let mut rng = seeded_rng(sub_seed(cfg.seed, k as u64));
        let init = MeasurementSettings::random(&mut rng);
        let run = seesaw_maximize(s, &init, cfg)?;
        start_values.push(run.best_value);
        iterations += run.iterations_used;
        degenerate += run.degenerate_cycles;
        if best.as_ref().is_none_or(|b| run.best_value > b.best_value) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one start");
    Ok(OptimizationResult {
        iterations_used: iterations,
        start_values,
        degenerate_cycles: degenerate,
        ..best
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowFlag {
    Match,
    NumericBelow,
    NumericAbove,
}

impl RowFlag {
    pub fn classify(gap: f64, tol: f64) -> Self {
        if gap.abs() <= tol {
            RowFlag::Match
        } else if gap < 0.0 {
            RowFlag::NumericBelow
        } else {
            RowFlag::NumericAbove
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RowFlag::Match => "match",
            RowFlag::NumericBelow => "numeric-below",
            RowFlag::NumericAbove => "numeric-above",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FamilyParams {
    Ghz(GhzClassParams),
    W(WClassParams),
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationRow {
    pub params: FamilyParams,
    pub profile: EntanglementProfile,
    pub branch: Option<Branch>,
    pub closed_value: f64,
    pub numeric_value: f64,
    /// `numeric - closed`
    pub gap: f64,
    pub flag: RowFlag,
    pub starts_used: usize,
}

/// A requested grid point that no state of the family realizes.
#[derive(Clone, Debug, PartialEq)]
pub struct SkippedRow {
    pub c12: f64,
    pub sum: f64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct GridReport {
    pub rows: Vec<VerificationRow>,
    pub skipped: Vec<SkippedRow>,
}

impl GridReport {
    pub fn count(&self, flag: RowFlag) -> usize {
        self.rows.iter().filter(|r| r.flag == flag).count()
    }
}

fn compare(
    state: &ThreeQubitPureState,
    closed: f64,
    cfg: &OptimizationConfig,
    tol: f64,
    row_seed: u64,
) -> Result<(f64, RowFlag, usize)> {
    let mut row_cfg = OptimizationConfig {
        seed: row_seed,
        ..*cfg
    };
    let mut numeric = multistart_maximize(state, &row_cfg)?.best_value;
    let mut flag = RowFlag::classify(numeric - closed, tol);
    if flag == RowFlag::NumericBelow && row_cfg.n_starts < ESCALATED_STARTS {
        row_cfg.n_starts = ESCALATED_STARTS;
        numeric = multistart_maximize(state, &row_cfg)?.best_value;
        flag = RowFlag::classify(numeric - closed, tol);
    }
    Ok((numeric, flag, row_cfg.n_starts))
}

/// `steps` evenly spaced points on `[0, pi/2]`.
pub fn quarter_turn_grid(steps: usize) -> Vec<f64> {
    match steps {
        0 => vec![],
        1 => vec![0.0],
        n => (0..n).map(|i| FRAC_PI_2 * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Numeric against closed-form maxima on `theta_steps` values of `theta` in
/// `[0, pi/2]` for each `theta3`. Rows are ordered by `theta3` then `theta`.
pub fn verify_grid_ghz(
    theta_steps: usize,
    theta3_values: &[f64],
    cfg: &OptimizationConfig,
    report_tol: f64,
) -> Result<GridReport> {
    if theta_steps < 2 {
        return Err(Error::InvalidParameter("theta_steps must be at least 2".into()));
    }
    cfg.validate()?;
    let thetas = quarter_turn_grid(theta_steps);
    let points: Vec<GhzClassParams> = theta3_values
        .iter()
        .flat_map(|&t3| thetas.iter().map(move |&t| GhzClassParams::new(t, t3)))
        .collect::<Result<_>>()?;

    let rows = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let profile = ghz_profile_closed(p);
            let closed = smax_ghz_closed(&profile)?;
            let (numeric, flag, starts) =
                compare(&ghz_state(p), closed.value, cfg, report_tol, sub_seed(cfg.seed, i as u64))?;
            if flag == RowFlag::NumericAbove {
                warn!(
                    "finding: theta={} theta3={} numeric {numeric} above closed {}",
                    p.theta(),
                    p.theta3(),
                    closed.value
                );
            }
            Ok(VerificationRow {
                params: FamilyParams::Ghz(*p),
                profile,
                branch: Some(closed.branch),
                closed_value: closed.value,
                numeric_value: numeric,
                gap: numeric - closed.value,
                flag,
                starts_used: starts,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GridReport {
        rows,
        skipped: vec![],
    })
}

/// Realizable range of `c12 + c23 + c31` for W-class states with the given
/// `c12`.
pub fn w_sum_range(c12: f64) -> Option<(f64, f64)> {
    if !(0.0..=1.0).contains(&c12) {
        return None;
    }
    let rest = if c12 <= 1.0 / 3.0 {
        1.0 + c12
    } else {
        2.0 * (2.0 * c12 * (1.0 - c12)).sqrt()
    };
    Some((c12, c12 + rest))
}

/// A W-class state with `c12 = 2 beta gamma` and the given concurrence sum,
/// taking the smaller `alpha` when two exist.
pub fn realize_w(c12: f64, sum: f64) -> std::result::Result<WClassParams, String> {
    let (lo, hi) = w_sum_range(c12).ok_or_else(|| format!("c12 = {c12} outside [0, 1]"))?;
    let slack = 1e-12;
    if sum < lo - slack || sum > hi + slack {
        return Err(format!(
            "sum {sum} outside realizable range [{lo}, {hi}] for c12 = {c12}"
        ));
    }
    // c23 + c31 = 2 alpha (beta + gamma), (beta + gamma)^2 = 1 - alpha^2 + c12
    let r = (sum - c12).max(0.0);
    let disc = ((1.0 + c12).powi(2) - r * r).max(0.0);
    let u = ((1.0 + c12 - disc.sqrt()) / 2.0).clamp(0.0, 1.0 - c12);
    let plus = (1.0 - u + c12).max(0.0).sqrt();
    let minus = (1.0 - u - c12).max(0.0).sqrt();
    WClassParams::normalized(u.sqrt(), (plus + minus) / 2.0, (plus - minus) / 2.0)
        .map_err(|e| e.to_string())
}

/// Concurrence sums for one curve: `sum_steps` evenly spaced values on
/// `[0, 2]` that are realizable for `c12`, plus both ends of the realizable
/// range, ascending.
pub fn w_curve_sums(c12: f64, sum_steps: usize) -> (Vec<f64>, Vec<SkippedRow>) {
    let mut sums = Vec::new();
    let mut skipped = Vec::new();
    let Some((lo, hi)) = w_sum_range(c12) else {
        skipped.push(SkippedRow {
            c12,
            sum: f64::NAN,
            reason: format!("c12 = {c12} outside [0, 1]"),
        });
        return (sums, skipped);
    };
    for i in 0..sum_steps {
        let s = if sum_steps == 1 { 0.0 } else { 2.0 * i as f64 / (sum_steps - 1) as f64 };
        if s < lo || s > hi {
            let reason = format!("sum {s} outside realizable range [{lo:.9}, {hi:.9}]");
            info!("skip c12={c12} sum={s}: {reason}");
            skipped.push(SkippedRow { c12, sum: s, reason });
        } else {
            sums.push(s);
        }
    }
    sums.push(lo);
    sums.push(hi.min(2.0));
    sums.sort_by(f64::total_cmp);
    sums.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    (sums, skipped)
}

/// Numeric against reduced-form maxima along curves of fixed `c12`. Rows are
/// ordered by curve then ascending sum.
pub fn verify_grid_w(
    c12_values: &[f64],
    sum_steps: usize,
    cfg: &OptimizationConfig,
    report_tol: f64,
) -> Result<GridReport> {
    cfg.validate()?;
    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for &c12 in c12_values {
        let (sums, skip) = w_curve_sums(c12, sum_steps);
        skipped.extend(skip);
        for s in sums {
            match realize_w(c12, s) {
                Ok(p) => points.push(p),
                Err(reason) => {
                    info!("skip c12={c12} sum={s}: {reason}");
                    skipped.push(SkippedRow { c12, sum: s, reason });
                }
            }
        }
    }

    let rows = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let profile = w_profile_closed(p);
            let closed = smax_w(&profile)?.value;
            let (numeric, flag, starts) =
                compare(&w_state(p), closed, cfg, report_tol, sub_seed(cfg.seed, i as u64))?;
            if flag == RowFlag::NumericAbove {
                warn!("finding: W {p:?} numeric {numeric} above closed {closed}");
            }
            Ok(VerificationRow {
                params: FamilyParams::W(*p),
                profile,
                branch: None,
                closed_value: closed,
                numeric_value: numeric,
                gap: numeric - closed,
                flag,
                starts_used: starts,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GridReport { rows, skipped })
}

/// Numeric profile and multistart maximum for an arbitrary state.
pub fn analyze_state(
    s: &ThreeQubitPureState,
    cfg: &OptimizationConfig,
) -> Result<(EntanglementProfile, OptimizationResult)> {
    Ok((entanglement_profile(s)?, multistart_maximize(s, cfg)?))
}
