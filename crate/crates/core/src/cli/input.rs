//! State and settings documents.
//!
//! A state document holds exactly one of
//!
//! ```toml
//! [ghz]
//! theta = "pi/4"
//! theta3 = "pi/2"
//! ```
//!
//! ```toml
//! [w]
//! alpha = "1/sqrt(3)"
//! beta = "1/sqrt(3)"
//! gamma = "1/sqrt(3)"
//! ```
//!
//! ```toml
//! # amplitudes of |000>, |001>, ..., |111> as [re, im]
//! raw = [[1, 0], [0, 0], [0, 0], [0, 0], [0, 0], [0, 0], [0, 0], [0, 0]]
//! normalize = false
//! ```
//!
//! Numbers may be written as literals or as expressions such as `"pi/4"` or
//! `"2/3"`. Angles are in radians.
//!
//! A settings document lists the six vectors as `[polar, azimuth]` pairs
//! under the keys `a`, `a_prime`, `b`, `b_prime`, `c`, `c_prime`.

use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use super::CliError;
use crate::bell::MeasurementSettings;
use crate::qcore::{
    ghz_state, make_state, w_state, GhzClassParams, ThreeQubitPureState, UnitVector, WClassParams,
};

/// A number or an arithmetic expression in `pi`, `sqrt`, and the usual
/// operators.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Scalar {
    Number(f64),
    Expr(String),
}

impl Scalar {
    pub fn value(&self) -> Result<f64, CliError> {
        let v = match self {
            Scalar::Number(x) => *x,
            Scalar::Expr(s) => parse_scalar(s)?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(CliError::Input(format!("{self} is not finite")))
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Number(x) => write!(f, "{x}"),
            Scalar::Expr(s) => write!(f, "`{s}`"),
        }
    }
}

pub fn parse_scalar(s: &str) -> Result<f64, CliError> {
    meval::eval_str(s.trim()).map_err(|e| CliError::Input(format!("cannot parse `{s}`: {e}")))
}

/// Comma-separated list of scalars, as taken by list flags.
pub fn parse_scalar_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',').map(parse_scalar).collect()
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct GhzSpec {
    theta: Scalar,
    theta3: Scalar,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct WSpec {
    alpha: Scalar,
    beta: Scalar,
    gamma: Scalar,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct StateDocument {
    ghz: Option<GhzSpec>,
    w: Option<WSpec>,
    raw: Option<Vec<[Scalar; 2]>>,
    #[serde(default)]
    normalize: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StateSpec {
    Ghz(GhzClassParams),
    W(WClassParams),
    Raw(ThreeQubitPureState),
}

impl StateSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let doc: StateDocument =
            toml::from_str(text).map_err(|e| CliError::Input(format!("state document: {e}")))?;
        let present = doc.ghz.is_some() as u8 + doc.w.is_some() as u8 + doc.raw.is_some() as u8;
        if present != 1 {
            return Err(CliError::Input(
                "state document needs exactly one of [ghz], [w], raw".into(),
            ));
        }
        if doc.normalize && doc.raw.is_none() {
            return Err(CliError::Input("normalize applies to raw amplitudes only".into()));
        }
        if let Some(g) = doc.ghz {
            let p = GhzClassParams::new(g.theta.value()?, g.theta3.value()?)?;
            return Ok(StateSpec::Ghz(p));
        }
        if let Some(w) = doc.w {
            let p = WClassParams::new(w.alpha.value()?, w.beta.value()?, w.gamma.value()?)?;
            return Ok(StateSpec::W(p));
        }
        let raw = doc.raw.unwrap_or_default();
        if raw.len() != 8 {
            return Err(CliError::Input(format!(
                "raw needs 8 amplitudes, found {}",
                raw.len()
            )));
        }
        let mut amps = [Complex64::new(0.0, 0.0); 8];
        for (slot, [re, im]) in amps.iter_mut().zip(&raw) {
            *slot = Complex64::new(re.value()?, im.value()?);
        }
        Ok(StateSpec::Raw(make_state(amps, doc.normalize)?))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        Self::parse(&read(path)?)
    }

    pub fn state(&self) -> ThreeQubitPureState {
        match self {
            StateSpec::Ghz(p) => ghz_state(p),
            StateSpec::W(p) => w_state(p),
            StateSpec::Raw(s) => *s,
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct SettingsDocument {
    a: [Scalar; 2],
    a_prime: [Scalar; 2],
    b: [Scalar; 2],
    b_prime: [Scalar; 2],
    c: [Scalar; 2],
    c_prime: [Scalar; 2],
}

pub fn parse_settings(text: &str) -> Result<MeasurementSettings, CliError> {
    let doc: SettingsDocument =
        toml::from_str(text).map_err(|e| CliError::Input(format!("settings document: {e}")))?;
    let v = |[p, a]: &[Scalar; 2]| -> Result<UnitVector, CliError> {
        Ok(UnitVector::new(p.value()?, a.value()?)?)
    };
    Ok(MeasurementSettings::new(
        v(&doc.a)?,
        v(&doc.a_prime)?,
        v(&doc.b)?,
        v(&doc.b_prime)?,
        v(&doc.c)?,
        v(&doc.c_prime)?,
    ))
}

pub fn load_settings(path: &Path) -> Result<MeasurementSettings, CliError> {
    parse_settings(&read(path)?)
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}
