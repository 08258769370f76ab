//! Invariant battery behind `verify`.
//!
//! Each sampled case draws its inputs from `seeded_rng(sub_seed(suite_seed,
//! case))` with `suite_seed = sub_seed(seed, suite)`, so a failure is
//! replayed from its suite, case and seed alone.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};
use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::CliError;
use crate::bell::{
    bell_operators, correlation_tensor, ghz_branch_values, ghz_correlator_closed,
    ghz_smax_report, mermin_values_direct, svetlichny_expectation, w_correlator_closed,
    w_reduced_value, w_settings_from_tilde, MeasurementSettings, SVETLICHNY_CEILING,
};
use crate::entanglement::{entanglement_profile, w_profile_closed, EntanglementProfile};
use crate::optimize::{
    multistart_maximize, verify_grid_ghz, verify_grid_w, GridReport, OptimizationConfig, RowFlag,
};
use crate::qcore::random::{haar_random_state, random_unit_vector, seeded_rng, sub_seed, SeededRng};
use crate::qcore::{
    expectation, ghz_state, herm_eigenvalues, spin_observable, tensor3, w_state, GhzClassParams,
    UnitVector, WClassParams, HERMITIAN_TOL,
};

/// `<A B C>` on a W-class state from its profile.
pub type WCorrelator = fn(&EntanglementProfile, &UnitVector, &UnitVector, &UnitVector) -> f64;

/// `<A D C>` on a GHZ-class state.
pub type GhzCorrelator = fn(&GhzClassParams, &UnitVector, &UnitVector, &UnitVector) -> f64;

/// Failures kept per suite for replay; all are counted.
const KEPT_FAILURES: usize = 5;

#[derive(Clone, Copy, Debug)]
pub struct BatteryConfig {
    pub tol: f64,
    pub samples: usize,
    pub seed: u64,
    pub ghz_correlator: GhzCorrelator,
    pub w_correlator: WCorrelator,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            samples: 1000,
            seed: 0,
            ghz_correlator: ghz_correlator_closed,
            w_correlator: w_correlator_closed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub suite: &'static str,
    pub case: usize,
    pub seed: u64,
    pub inputs: String,
    pub expected: f64,
    pub got: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// Non-fatal observations, such as numeric maxima above a closed form.
    pub findings: usize,
    pub kept: Vec<Failure>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BatteryReport {
    pub suites: Vec<SuiteResult>,
}

impl BatteryReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.failures == 0)
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.name == name)
    }
}

#[derive(Serialize)]
struct Replay<'a> {
    failure: Vec<&'a Failure>,
}

impl fmt::Display for BatteryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<24} {:>7} {:>9} {:>9}", "suite", "cases", "failures", "findings")?;
        for s in &self.suites {
            writeln!(f, "{:<24} {:>7} {:>9} {:>9}", s.name, s.cases, s.failures, s.findings)?;
        }
        let failed = self.suites.iter().filter(|s| s.failures > 0).count();
        if failed == 0 {
            writeln!(f, "result: PASS ({} suites)", self.suites.len())
        } else {
            writeln!(f, "result: FAIL ({failed} of {} suites)", self.suites.len())?;
            let replay = Replay {
                failure: self.suites.iter().flat_map(|s| &s.kept).collect(),
            };
            match toml::to_string(&replay) {
                Ok(text) => write!(f, "\n{text}"),
                Err(e) => writeln!(f, "cannot serialize failures: {e}"),
            }
        }
    }
}

struct Case {
    inputs: String,
    expected: f64,
    got: f64,
    ok: bool,
}

fn within(inputs: String, expected: f64, got: f64, tol: f64) -> Case {
    Case {
        inputs,
        expected,
        got,
        ok: (expected - got).abs() <= tol,
    }
}

fn sampled(
    name: &'static str,
    index: u64,
    cfg: &BatteryConfig,
    cases: usize,
    check: impl Fn(&mut SeededRng) -> Case + Sync,
) -> SuiteResult {
    let suite_seed = sub_seed(cfg.seed, index);
    let failed: Vec<Failure> = (0..cases)
        .into_par_iter()
        .filter_map(|case| {
            let c = check(&mut seeded_rng(sub_seed(suite_seed, case as u64)));
            (!c.ok).then_some(Failure {
                suite: name,
                case,
                seed: cfg.seed,
                inputs: c.inputs,
                expected: c.expected,
                got: c.got,
            })
        })
        .collect();
    SuiteResult {
        name,
        cases,
        failures: failed.len(),
        findings: 0,
        kept: failed.into_iter().take(KEPT_FAILURES).collect(),
    }
}

fn random_ghz(rng: &mut SeededRng) -> GhzClassParams {
    GhzClassParams::new(rng.random_range(0.0..=FRAC_PI_2), rng.random_range(0.0..=FRAC_PI_2))
        .expect("in range")
}

fn random_w(rng: &mut SeededRng) -> WClassParams {
    WClassParams::normalized(rng.random(), rng.random(), rng.random()).expect("nonzero weights")
}

fn vectors(rng: &mut SeededRng) -> [UnitVector; 3] {
    std::array::from_fn(|_| random_unit_vector(rng))
}

fn fmt_vectors(v: &[UnitVector]) -> String {
    v.iter()
        .map(|u| format!("[{:e}, {:e}]", u.polar(), u.azimuth()))
        .collect::<Vec<_>>()
        .join(", ")
}

fn operator_correlator(s: &crate::qcore::ThreeQubitPureState, v: &[UnitVector; 3]) -> f64 {
    let op = tensor3(&spin_observable(&v[0]), &spin_observable(&v[1]), &spin_observable(&v[2]));
    expectation(s, &op).unwrap_or(f64::NAN)
}

fn grid_suite(name: &'static str, seed: u64, report: &GridReport) -> SuiteResult {
    let kept = report
        .rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.flag == RowFlag::NumericBelow)
        .take(KEPT_FAILURES)
        .map(|(case, r)| Failure {
            suite: name,
            case,
            seed,
            inputs: format!("{:?}", r.params),
            expected: r.closed_value,
            got: r.numeric_value,
        })
        .collect();
    SuiteResult {
        name,
        cases: report.rows.len(),
        failures: report.count(RowFlag::NumericBelow),
        findings: report.count(RowFlag::NumericAbove),
        kept,
    }
}

pub fn run_battery(cfg: &BatteryConfig) -> Result<BatteryReport, CliError> {
    if !(cfg.tol > 0.0) || cfg.samples == 0 {
        return Err(CliError::Input("battery needs tol > 0 and samples >= 1".into()));
    }
    let tol = cfg.tol;
    let n = cfg.samples;
    let mut suites = Vec::new();

    suites.push(sampled("ghz-correlator", 0, cfg, n, |rng| {
        let p = random_ghz(rng);
        let v = vectors(rng);
        within(
            format!("theta={:e} theta3={:e} vectors={}", p.theta(), p.theta3(), fmt_vectors(&v)),
            operator_correlator(&ghz_state(&p), &v),
            (cfg.ghz_correlator)(&p, &v[0], &v[1], &v[2]),
            tol,
        )
    }));

    suites.push(sampled("w-correlator", 1, cfg, n, |rng| {
        let p = random_w(rng);
        let v = vectors(rng);
        within(
            format!("w={:?} vectors={}", [p.alpha(), p.beta(), p.gamma()], fmt_vectors(&v)),
            operator_correlator(&w_state(&p), &v),
            (cfg.w_correlator)(&w_profile_closed(&p), &v[0], &v[1], &v[2]),
            tol,
        )
    }));

    suites.push(sampled("w-reduced-form", 2, cfg, n, |rng| {
        let p = random_w(rng);
        let t: [f64; 3] = std::array::from_fn(|_| rng.random_range(-PI..PI));
        let ms = w_settings_from_tilde(t);
        within(
            format!("w={:?} tilde={t:?}", [p.alpha(), p.beta(), p.gamma()]),
            expectation(&w_state(&p), &bell_operators(&ms).s).unwrap_or(f64::NAN),
            w_reduced_value(&w_profile_closed(&p), t[0], t[1], t[2]),
            tol,
        )
    }));

    suites.push(sampled("tensor-contraction", 3, cfg, n, |rng| {
        let s = haar_random_state(rng);
        let ms = MeasurementSettings::random(rng);
        within(
            format!("settings={}", fmt_vectors(&ms.to_array())),
            expectation(&s, &bell_operators(&ms).s).unwrap_or(f64::NAN),
            svetlichny_expectation(&correlation_tensor(&s), &ms),
            tol,
        )
    }));

    suites.push(sampled("monogamy-haar", 4, cfg, n, |rng| {
        let s = haar_random_state(rng);
        let r = entanglement_profile(&s).map_or(f64::NAN, |p| p.monogamy_residual);
        Case {
            inputs: format!("amplitudes={:?}", s.amplitudes()),
            expected: 0.0,
            got: r,
            ok: r >= -tol,
        }
    }));

    suites.push(sampled("monogamy-w", 5, cfg, n, |rng| {
        let p = random_w(rng);
        let r = entanglement_profile(&w_state(&p)).map_or(f64::NAN, |q| q.monogamy_residual);
        within(format!("w={:?}", [p.alpha(), p.beta(), p.gamma()]), 0.0, r, tol)
    }));

    suites.push(sampled("branch-continuity", 6, cfg, 101, |rng| {
        let tau = rng.random_range(0.0..=1.0 / 3.0);
        let (low, high) = ghz_branch_values(tau, 1.0 - 3.0 * tau);
        within(format!("tau={tau:e} c12_sq=1-3tau"), low, high, tol)
    }));

    let grid: Vec<GhzClassParams> = (0..10)
        .flat_map(|i| {
            (0..10).map(move |j| {
                GhzClassParams::new(FRAC_PI_2 * i as f64 / 9.0, FRAC_PI_2 * j as f64 / 9.0)
                    .expect("in range")
            })
        })
        .collect();
    let failed: Vec<Failure> = grid
        .par_iter()
        .enumerate()
        .filter_map(|(case, p)| {
            let report = ghz_smax_report(p).ok()?;
            let s = ghz_state(p);
            let (m, mp) = mermin_values_direct(&s, &report.achieving_settings).ok()?;
            let sv = m + mp;
            let bad = (sv - 2.0 * m).abs() > tol
                || (report.operator_value_at_settings - report.closed_value).abs() > tol.max(1e-9);
            bad.then(|| Failure {
                suite: "mermin-factor",
                case,
                seed: cfg.seed,
                inputs: format!("theta={:e} theta3={:e}", p.theta(), p.theta3()),
                expected: 2.0 * m,
                got: sv,
            })
        })
        .collect();
    suites.push(SuiteResult {
        name: "mermin-factor",
        cases: grid.len(),
        failures: failed.len(),
        findings: 0,
        kept: failed.into_iter().take(KEPT_FAILURES).collect(),
    });

    suites.push(sampled("ceiling-spectrum", 8, cfg, n, |rng| {
        let ms = MeasurementSettings::random(rng);
        let ev = herm_eigenvalues(&bell_operators(&ms).s.0, HERMITIAN_TOL)
            .map_or(f64::NAN, |e| e[0].abs().max(e[7].abs()));
        Case {
            inputs: format!("settings={}", fmt_vectors(&ms.to_array())),
            expected: SVETLICHNY_CEILING,
            got: ev,
            ok: ev <= SVETLICHNY_CEILING + tol,
        }
    }));

    let opt_cases = (n / 10).max(1);
    suites.push(sampled("ceiling-optimizer", 9, cfg, opt_cases, |rng| {
        let s = haar_random_state(rng);
        let run_cfg = OptimizationConfig {
            n_starts: 3,
            ..OptimizationConfig::with_seed(rng.random())
        };
        let v = multistart_maximize(&s, &run_cfg).map_or(f64::NAN, |r| r.best_value);
        Case {
            inputs: format!("amplitudes={:?}", s.amplitudes()),
            expected: SVETLICHNY_CEILING,
            got: v,
            ok: v <= SVETLICHNY_CEILING + tol,
        }
    }));

    let grid_cfg = OptimizationConfig {
        n_starts: 10,
        ..OptimizationConfig::with_seed(sub_seed(cfg.seed, 10))
    };
    let ghz_grid = verify_grid_ghz(6, &[FRAC_PI_8, FRAC_PI_4, FRAC_PI_2], &grid_cfg, 1e-3)?;
    suites.push(grid_suite("ghz-grid", cfg.seed, &ghz_grid));
    let w_grid = verify_grid_w(&[0.35, 2.0 / 3.0], 6, &grid_cfg, 1e-3)?;
    suites.push(grid_suite("w-grid", cfg.seed, &w_grid));

    Ok(BatteryReport { suites })
}
