use std::fmt;

use log::warn;

use super::{fmt_sig, CliError, Outcome, StateSpec};
use crate::bell::{
    correlation_tensor, optimal_settings_ghz, smax_ghz_closed, smax_w, svetlichny_expectation,
    Branch, MeasurementSettings, SVETLICHNY_BOUND,
};
use crate::entanglement::{ghz_profile_closed, w_profile_closed, EntanglementProfile, Family};
use crate::montecarlo::{estimate_svetlichny, ShotEstimate};
use crate::optimize::{
    analyze_state, multistart_maximize, verify_grid_ghz, verify_grid_w, FamilyParams,
    GridReport, OptimizationConfig, RowFlag,
};

/// Values within this of the local bound are reported as no violation.
pub const VERDICT_MARGIN: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedSummary {
    pub value: f64,
    pub branch: Option<Branch>,
    /// Maximizing half-angles of the reduced W form, in radians.
    pub tilde: Option<[f64; 3]>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalyzeReport {
    pub profile: EntanglementProfile,
    pub family: Family,
    /// Present for states given by family parameters.
    pub closed: Option<ClosedSummary>,
    pub numeric: f64,
    pub numeric_settings: MeasurementSettings,
    pub numeric_converged: bool,
    pub violates: bool,
}

pub fn analyze(spec: &StateSpec, starts: usize, seed: u64) -> Result<AnalyzeReport, CliError> {
    let cfg = OptimizationConfig {
        n_starts: starts,
        ..OptimizationConfig::with_seed(seed)
    };
    let (numeric_profile, result) = analyze_state(&spec.state(), &cfg)?;
    let (profile, closed) = match spec {
        StateSpec::Ghz(p) => {
            let profile = ghz_profile_closed(p);
            let c = smax_ghz_closed(&profile)?;
            let summary = ClosedSummary {
                value: c.value,
                branch: Some(c.branch),
                tilde: None,
            };
            (profile, Some(summary))
        }
        StateSpec::W(p) => {
            let profile = w_profile_closed(p);
            let m = smax_w(&profile)?;
            let summary = ClosedSummary {
                value: m.value,
                branch: None,
                tilde: Some(m.tilde),
            };
            (profile, Some(summary))
        }
        StateSpec::Raw(_) => (numeric_profile, None),
    };
    let best = closed.map_or(result.best_value, |c| c.value.max(result.best_value));
    Ok(AnalyzeReport {
        profile,
        family: profile.family(),
        closed,
        numeric: result.best_value,
        numeric_settings: result.best_settings,
        numeric_converged: result.converged,
        violates: best > SVETLICHNY_BOUND + VERDICT_MARGIN,
    })
}

impl fmt::Display for AnalyzeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.profile;
        writeln!(f, "family             {}", self.family)?;
        for (name, v) in [
            ("tau", p.tau),
            ("c12", p.c12),
            ("c23", p.c23),
            ("c31", p.c31),
            ("c1_23", p.c1_23),
            ("c2_13", p.c2_13),
            ("c3_12", p.c3_12),
            ("monogamy_residual", p.monogamy_residual),
        ] {
            writeln!(f, "{name:<18} {}", fmt_sig(v))?;
        }
        match &self.closed {
            Some(c) => {
                write!(f, "smax_closed        {}", fmt_sig(c.value))?;
                if let Some(b) = c.branch {
                    write!(f, " ({} branch)", b.as_str())?;
                }
                writeln!(f)?;
                if let Some(t) = c.tilde {
                    let deg = t.map(|x| fmt_sig(x.to_degrees()));
                    writeln!(f, "theta_tilde_deg    {}", deg.join(" "))?;
                }
            }
            None => writeln!(f, "smax_closed        n/a")?,
        }
        writeln!(f, "smax_numeric       {}", fmt_sig(self.numeric))?;
        let arr = self.numeric_settings.to_array();
        let names = ["a", "a'", "b", "b'", "c", "c'"];
        for (name, v) in names.iter().zip(arr) {
            writeln!(
                f,
                "setting {name:<10} polar {} azimuth {}",
                fmt_sig(v.polar()),
                fmt_sig(v.azimuth())
            )?;
        }
        if !self.numeric_converged {
            writeln!(f, "note               numeric search hit its iteration limit")?;
        }
        writeln!(
            f,
            "verdict            {}",
            if self.violates { "violates" } else { "no violation" }
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SweepFamily {
    /// Curves of fixed `theta3`, `theta` on `[0, pi/2]`.
    Ghz { theta3: Vec<f64> },
    /// Curves of fixed `c12`, concurrence sum on `[0, 2]`.
    W { c12: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub family: SweepFamily,
    /// Grid points along each curve.
    pub steps: usize,
    pub starts: usize,
    pub tol: f64,
}

fn sweep_config(spec: &SweepSpec, seed: u64) -> Result<OptimizationConfig, CliError> {
    if spec.steps < 2 {
        return Err(CliError::Input("steps must be at least 2".into()));
    }
    let cfg = OptimizationConfig {
        n_starts: spec.starts,
        ..OptimizationConfig::with_seed(seed)
    };
    cfg.validate()?;
    Ok(cfg)
}

fn csv_body(header: &[&str], rows: Vec<Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

fn report_failures(report: &GridReport) -> bool {
    let below = report.count(RowFlag::NumericBelow);
    let above = report.count(RowFlag::NumericAbove);
    if above > 0 {
        warn!("{above} rows with numeric above closed form");
    }
    if below > 0 {
        warn!("{below} rows with numeric below closed form after escalation");
    }
    below > 0
}

pub const GHZ_HEADER: [&str; 8] = [
    "theta",
    "theta3",
    "tau",
    "c12_sq",
    "smax_closed",
    "smax_numeric",
    "branch",
    "gap",
];

pub const W_HEADER: [&str; 7] = [
    "c12",
    "c23",
    "c31",
    "sum_c",
    "smax_closed",
    "smax_numeric",
    "gap",
];

/// GHZ-class sweep as CSV; fails if any row stays below the closed form
/// after escalation.
pub fn sweep_ghz(spec: &SweepSpec, seed: u64) -> Result<Outcome, CliError> {
    let SweepFamily::Ghz { theta3 } = &spec.family else {
        return Err(CliError::Input("sweep-ghz needs a GHZ sweep".into()));
    };
    let report = verify_grid_ghz(spec.steps, theta3, &sweep_config(spec, seed)?, spec.tol)?;
    let rows = report
        .rows
        .iter()
        .map(|r| {
            let FamilyParams::Ghz(p) = r.params else {
                unreachable!("GHZ grid rows carry GHZ parameters")
            };
            vec![
                fmt_sig(p.theta()),
                fmt_sig(p.theta3()),
                fmt_sig(r.profile.tau),
                fmt_sig(r.profile.c12 * r.profile.c12),
                fmt_sig(r.closed_value),
                fmt_sig(r.numeric_value),
                r.branch.map_or("", Branch::as_str).to_string(),
                fmt_sig(r.gap),
            ]
        })
        .collect();
    Ok(Outcome {
        body: csv_body(&GHZ_HEADER, rows)?,
        failed: report_failures(&report),
    })
}

/// W-class sweep as CSV; unrealizable points are logged and omitted.
pub fn sweep_w(spec: &SweepSpec, seed: u64) -> Result<Outcome, CliError> {
    let SweepFamily::W { c12 } = &spec.family else {
        return Err(CliError::Input("sweep-w needs a W sweep".into()));
    };
    let report = verify_grid_w(c12, spec.steps, &sweep_config(spec, seed)?, spec.tol)?;
    for s in &report.skipped {
        warn!("omitted c12={} sum={}: {}", s.c12, s.sum, s.reason);
    }
    let rows = report
        .rows
        .iter()
        .map(|r| {
            let p = &r.profile;
            vec![
                fmt_sig(p.c12),
                fmt_sig(p.c23),
                fmt_sig(p.c31),
                fmt_sig(p.concurrence_sum()),
                fmt_sig(r.closed_value),
                fmt_sig(r.numeric_value),
                fmt_sig(r.gap),
            ]
        })
        .collect();
    Ok(Outcome {
        body: csv_body(&W_HEADER, rows)?,
        failed: report_failures(&report),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum SettingsSource {
    /// Closed-form maximizing settings for family states, numeric ones for
    /// raw amplitudes.
    Optimal { starts: usize },
    Given(Box<MeasurementSettings>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulateReport {
    pub settings: MeasurementSettings,
    pub estimate: ShotEstimate,
    /// Signed `<S>` at the settings.
    pub exact: f64,
    pub z_score: f64,
}

pub fn simulate(
    spec: &StateSpec,
    source: &SettingsSource,
    shots: u64,
    seed: u64,
) -> Result<SimulateReport, CliError> {
    let s = spec.state();
    let settings = match (source, spec) {
        (SettingsSource::Given(ms), _) => **ms,
        (SettingsSource::Optimal { .. }, StateSpec::Ghz(p)) => optimal_settings_ghz(p),
        (SettingsSource::Optimal { .. }, StateSpec::W(p)) => smax_w(&w_profile_closed(p))?.settings,
        (SettingsSource::Optimal { starts }, StateSpec::Raw(_)) => {
            let cfg = OptimizationConfig {
                n_starts: *starts,
                ..OptimizationConfig::with_seed(seed)
            };
            multistart_maximize(&s, &cfg)?.best_settings
        }
    };
    let exact = svetlichny_expectation(&correlation_tensor(&s), &settings);
    let estimate = estimate_svetlichny(&s, &settings, shots, seed)?;
    Ok(SimulateReport {
        settings,
        estimate,
        exact,
        z_score: estimate.z_score(exact),
    })
}

impl fmt::Display for SimulateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = &self.estimate;
        writeln!(f, "shots_per_correlator {}", e.shots)?;
        writeln!(f, "seed                 {}", e.seed)?;
        writeln!(f, "estimate             {}", fmt_sig(e.mean))?;
        writeln!(f, "stderr               {}", fmt_sig(e.stderr))?;
        writeln!(f, "exact                {}", fmt_sig(self.exact))?;
        writeln!(f, "z_score              {}", fmt_sig(self.z_score))
    }
}
