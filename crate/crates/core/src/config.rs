//! Run configuration: a small `key = value` format with optional
//! `[params]`, `[geometry]`, `[time]` and `[analysis]` sections.
//!
//! ```text
//! # comments run to end of line
//! scenario = fig3
//!
//! [params]
//! field = 2.0
//!
//! [geometry]
//! R = 1.5
//! ```
//!
//! Keys may also be written fully qualified (`geometry.R = 1.5`), which is
//! the form `--set` overrides use. Key names are case-insensitive.
//! Real values accept `pi`, `tau`, `2pi` and `0.5*pi` style multiples.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::angular::DEFAULT_CLASSIFY_TOL;
use crate::dynamics::{Method, PhysicalParams};
use crate::ensemble::{build_vortex, PhaseMode, VortexEnsemble};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    /// Three single orbits, one per canonical angular momentum sign.
    Fig1,
    /// Three uniformly populated vortices, one per sign.
    Fig2,
    Fig2Positive,
    Fig2Zero,
    Fig2Negative,
    /// Aligned one-electron-per-orbit vortex with oscillating radius.
    Fig3,
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fig1" => Ok(Scenario::Fig1),
            "fig2" => Ok(Scenario::Fig2),
            "fig2-positive" => Ok(Scenario::Fig2Positive),
            "fig2-zero" => Ok(Scenario::Fig2Zero),
            "fig2-negative" => Ok(Scenario::Fig2Negative),
            "fig3" => Ok(Scenario::Fig3),
            other => Err(format!(
                "unknown scenario `{other}` (expected fig1, fig2, fig2-positive, fig2-zero, fig2-negative or fig3)"
            )),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::Fig1 => "fig1",
            Scenario::Fig2 => "fig2",
            Scenario::Fig2Positive => "fig2-positive",
            Scenario::Fig2Zero => "fig2-zero",
            Scenario::Fig2Negative => "fig2-negative",
            Scenario::Fig3 => "fig3",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseModeKind {
    Uniform,
    Aligned,
    Explicit,
    Random,
}

impl FromStr for PhaseModeKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uniform" => Ok(PhaseModeKind::Uniform),
            "aligned" => Ok(PhaseModeKind::Aligned),
            "explicit" => Ok(PhaseModeKind::Explicit),
            "random" => Ok(PhaseModeKind::Random),
            other => Err(format!(
                "unknown phase mode `{other}` (expected uniform, aligned, explicit or random)"
            )),
        }
    }
}

/// Vortex geometry for one case of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub radius: f64,
    pub r_cen: f64,
    pub n_orbits: usize,
    pub phase_mode: PhaseMode,
    pub global_phase: f64,
}

impl Geometry {
    pub fn build(&self, params: PhysicalParams) -> Result<VortexEnsemble> {
        build_vortex(
            params,
            self.radius,
            self.r_cen,
            self.n_orbits,
            self.phase_mode.clone(),
            self.global_phase,
        )
    }
}

/// A labelled geometry; scenarios may expand to several.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub label: String,
    pub geometry: Geometry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeConfig {
    pub t_max: f64,
    pub n_steps: usize,
    pub method: Method,
}

impl TimeConfig {
    pub fn dt(&self) -> f64 {
        self.t_max / self.n_steps as f64
    }

    /// `t_k = k * t_max / n_steps` for `k = 0..=n_steps`.
    pub fn grid(&self) -> Vec<f64> {
        (0..=self.n_steps)
            .map(|k| self.t_max * k as f64 / self.n_steps as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub n_bins: usize,
    /// Snapshots per period averaged into a current profile.
    pub t_samples: usize,
    pub fd_step: f64,
    pub seed: u64,
    /// Samples per period for winding analysis.
    pub n_samples: usize,
    /// rk4 steps per cyclotron period in the accuracy check.
    pub rk4_steps_per_period: usize,
    pub classify_tol: f64,
    pub random_checks: usize,
    pub landau_n_max: u32,
    pub landau_l_max: u32,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            n_bins: 20,
            t_samples: 32,
            fd_step: 1e-4,
            seed: 42,
            n_samples: 4096,
            rk4_steps_per_period: 1024,
            classify_tol: DEFAULT_CLASSIFY_TOL,
            random_checks: 1000,
            landau_n_max: 1,
            landau_l_max: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub params: PhysicalParams,
    /// Geometry of the first case.
    pub geometry: Geometry,
    pub time: TimeConfig,
    pub analysis: AnalysisConfig,
    pub scenario: Option<Scenario>,
    pub cases: Vec<Case>,
}

impl Default for RunConfig {
    fn default() -> Self {
        parse_config("").expect("defaults are valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Top,
    Params,
    Geometry,
    Time,
    Analysis,
}

impl Section {
    fn parse(name: &str) -> Option<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "params" => Some(Section::Params),
            "geometry" => Some(Section::Geometry),
            "time" => Some(Section::Time),
            "analysis" => Some(Section::Analysis),
            _ => None,
        }
    }
}

const KEYS: &[(Section, &str)] = &[
    (Section::Top, "scenario"),
    (Section::Params, "mass"),
    (Section::Params, "charge"),
    (Section::Params, "field"),
    (Section::Params, "hbar"),
    (Section::Geometry, "r"),
    (Section::Geometry, "r_cen"),
    (Section::Geometry, "n_orbits"),
    (Section::Geometry, "phase_mode"),
    (Section::Geometry, "n_per_orbit"),
    (Section::Geometry, "global_phase"),
    (Section::Geometry, "phases"),
    (Section::Time, "t_max"),
    (Section::Time, "n_steps"),
    (Section::Time, "method"),
    (Section::Analysis, "n_bins"),
    (Section::Analysis, "t_samples"),
    (Section::Analysis, "fd_step"),
    (Section::Analysis, "seed"),
    (Section::Analysis, "n_samples"),
    (Section::Analysis, "rk4_steps_per_period"),
    (Section::Analysis, "classify_tol"),
    (Section::Analysis, "random_checks"),
    (Section::Analysis, "landau_n_max"),
    (Section::Analysis, "landau_l_max"),
];

#[derive(Debug, Clone)]
struct Entry {
    key: &'static str,
    value: String,
    line: usize,
}

fn resolve_key(section: Section, raw: &str, line: usize) -> Result<&'static str> {
    let lowered = raw.trim().to_ascii_lowercase();
    let (section, name) = match lowered.split_once('.') {
        Some((sec, name)) => {
            let sec = Section::parse(sec).ok_or_else(|| Error::Parse {
                line,
                key: raw.trim().to_string(),
                message: format!("unknown section `{sec}`"),
            })?;
            (Some(sec), name.to_string())
        }
        None if section == Section::Top => (None, lowered),
        None => (Some(section), lowered),
    };
    let found = KEYS
        .iter()
        .find(|(sec, k)| *k == name && section.is_none_or(|s| s == *sec));
    match found {
        Some((_, k)) => Ok(k),
        None => Err(Error::Parse {
            line,
            key: raw.trim().to_string(),
            message: match section {
                Some(_) if KEYS.iter().any(|(_, k)| *k == name) => {
                    "key does not belong to this section".into()
                }
                _ => "unknown key".into(),
            },
        }),
    }
}

fn tokenize(text: &str) -> Result<Vec<Entry>> {
    let mut entries = Vec::new();
    let mut section = Section::Top;
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| Error::Parse {
                line,
                key: content.to_string(),
                message: "unterminated section header".into(),
            })?;
            section = Section::parse(name).ok_or_else(|| Error::Parse {
                line,
                key: name.to_string(),
                message: "unknown section".into(),
            })?;
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
            line,
            key: content.to_string(),
            message: "expected `key = value`".into(),
        })?;
        let key = resolve_key(section, key, line)?;
        let value = value.trim().trim_matches('"').to_string();
        if value.is_empty() {
            return Err(Error::Parse {
                line,
                key: key.to_string(),
                message: "missing value".into(),
            });
        }
        entries.push(Entry { key, value, line });
    }
    Ok(entries)
}

fn parse_err(e: &Entry, message: impl Into<String>) -> Error {
    Error::Parse {
        line: e.line,
        key: e.key.to_string(),
        message: message.into(),
    }
}

/// Parse a real, allowing `pi`/`tau` and multiples such as `2pi` or `0.5*pi`.
pub fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim().to_ascii_lowercase();
    if let Ok(v) = s.parse::<f64>() {
        return Some(v);
    }
    for (name, value) in [("pi", PI), ("tau", TAU)] {
        if let Some(coef) = s.strip_suffix(name) {
            let coef = coef.trim().trim_end_matches('*').trim();
            return match coef {
                "" | "+" => Some(value),
                "-" => Some(-value),
                c => c.parse::<f64>().ok().map(|c| c * value),
            };
        }
    }
    None
}

fn real(e: &Entry) -> Result<f64> {
    match parse_real(&e.value) {
        Some(v) if v.is_finite() => Ok(v),
        _ => Err(parse_err(e, format!("expected a real number, got `{}`", e.value))),
    }
}

fn integer<T: FromStr>(e: &Entry) -> Result<T> {
    e.value
        .parse::<T>()
        .map_err(|_| parse_err(e, format!("expected a nonnegative integer, got `{}`", e.value)))
}

fn phase_lists(e: &Entry) -> Result<Vec<Vec<f64>>> {
    // Orbits separated by `;`, phases within an orbit by `,`.
    e.value
        .split(';')
        .map(|orbit| {
            orbit
                .split(',')
                .map(|p| p.trim())
                .filter(|p| !p.is_empty())
                .map(|p| {
                    parse_real(p)
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| parse_err(e, format!("bad phase `{p}`")))
                })
                .collect()
        })
        .collect()
}

/// Geometry fields before the phase mode is resolved.
#[derive(Debug, Clone)]
struct GeometryDraft {
    radius: f64,
    r_cen: f64,
    n_orbits: usize,
    kind: PhaseModeKind,
    n_per_orbit: usize,
    global_phase: f64,
    phases: Option<Vec<Vec<f64>>>,
}

impl Default for GeometryDraft {
    fn default() -> Self {
        Self {
            radius: 1.0,
            r_cen: 2.0,
            n_orbits: 8,
            kind: PhaseModeKind::Uniform,
            n_per_orbit: 16,
            global_phase: 0.0,
            phases: None,
        }
    }
}

impl GeometryDraft {
    fn with(radius: f64, r_cen: f64, n_orbits: usize, kind: PhaseModeKind) -> Self {
        Self {
            radius,
            r_cen,
            n_orbits,
            kind,
            ..Self::default()
        }
    }

    fn apply(&mut self, e: &Entry) -> Result<()> {
        match e.key {
            "r" => self.radius = real(e)?,
            "r_cen" => self.r_cen = real(e)?,
            "n_orbits" => self.n_orbits = integer(e)?,
            "phase_mode" => self.kind = e.value.parse().map_err(|m: String| parse_err(e, m))?,
            "n_per_orbit" => self.n_per_orbit = integer(e)?,
            "global_phase" => self.global_phase = real(e)?,
            "phases" => self.phases = Some(phase_lists(e)?),
            _ => {}
        }
        Ok(())
    }

    fn resolve(self, seed: u64) -> Result<Geometry> {
        if !(self.radius > 0.0) {
            return Err(Error::Validation("R must be positive".into()));
        }
        if self.r_cen < 0.0 {
            return Err(Error::Validation("R_cen must be nonnegative".into()));
        }
        if self.n_orbits == 0 {
            return Err(Error::Validation("n_orbits must be at least 1".into()));
        }
        let phase_mode = match self.kind {
            PhaseModeKind::Uniform => {
                if self.n_per_orbit < 2 {
                    return Err(Error::Validation(
                        "n_per_orbit must be at least 2 in uniform mode".into(),
                    ));
                }
                PhaseMode::Uniform {
                    n_per_orbit: self.n_per_orbit,
                }
            }
            PhaseModeKind::Aligned => PhaseMode::Aligned,
            PhaseModeKind::Random => {
                if self.n_per_orbit == 0 {
                    return Err(Error::Validation("n_per_orbit must be at least 1".into()));
                }
                PhaseMode::Random {
                    n_per_orbit: self.n_per_orbit,
                    seed,
                }
            }
            PhaseModeKind::Explicit => PhaseMode::Explicit {
                phases: self.phases.ok_or_else(|| {
                    Error::Validation("explicit phase mode requires `phases`".into())
                })?,
            },
        };
        Ok(Geometry {
            radius: self.radius,
            r_cen: self.r_cen,
            n_orbits: self.n_orbits,
            phase_mode,
            global_phase: self.global_phase,
        })
    }
}

/// Preset geometries before field-by-field overrides.
fn preset_cases(scenario: Option<Scenario>) -> Vec<(String, GeometryDraft)> {
    use PhaseModeKind::{Aligned, Uniform};
    let fig2 = |label: &str, r, r_cen| (label.to_string(), GeometryDraft::with(r, r_cen, 8, Uniform));
    match scenario {
        None => vec![("custom".into(), GeometryDraft::default())],
        Some(Scenario::Fig1) => [("positive", 2.0, 1.0), ("zero", 1.0, 1.0), ("negative", 1.0, 2.0)]
            .into_iter()
            .map(|(l, r, c)| (l.to_string(), GeometryDraft::with(r, c, 1, Aligned)))
            .collect(),
        Some(Scenario::Fig2) => vec![
            fig2("positive", 2.0, 1.0),
            fig2("zero", 1.0, 1.0),
            fig2("negative", 1.0, 2.0),
        ],
        Some(Scenario::Fig2Positive) => vec![fig2("positive", 2.0, 1.0)],
        Some(Scenario::Fig2Zero) => vec![fig2("zero", 1.0, 1.0)],
        Some(Scenario::Fig2Negative) => vec![fig2("negative", 1.0, 2.0)],
        Some(Scenario::Fig3) => vec![("fig3".into(), GeometryDraft::with(1.0, 2.0, 12, Aligned))],
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_with_overrides(text, &[])
}

/// Parse `text`, then apply `key=value` overrides in order.
pub fn parse_config_with_overrides(text: &str, overrides: &[String]) -> Result<RunConfig> {
    let mut entries = tokenize(text)?;
    for (i, o) in overrides.iter().enumerate() {
        let (key, value) = o.split_once('=').ok_or_else(|| Error::Parse {
            line: 0,
            key: o.clone(),
            message: format!("override #{} must look like key=value", i + 1),
        })?;
        let key = resolve_key(Section::Top, key, 0)?;
        entries.push(Entry {
            key,
            value: value.trim().trim_matches('"').to_string(),
            line: 0,
        });
    }

    let mut scenario = None;
    let (mut mass, mut charge, mut field, mut hbar) = (1.0, -1.0, 1.0, 1.0);
    let mut time = TimeConfig {
        t_max: TAU,
        n_steps: 256,
        method: Method::Analytic,
    };
    let mut analysis = AnalysisConfig::default();
    for e in &entries {
        match e.key {
            "scenario" => scenario = Some(e.value.parse().map_err(|m: String| parse_err(e, m))?),
            "mass" => mass = real(e)?,
            "charge" => charge = real(e)?,
            "field" => field = real(e)?,
            "hbar" => hbar = real(e)?,
            "t_max" => time.t_max = real(e)?,
            "n_steps" => time.n_steps = integer(e)?,
            "method" => time.method = e.value.parse().map_err(|m: String| parse_err(e, m))?,
            "n_bins" => analysis.n_bins = integer(e)?,
            "t_samples" => analysis.t_samples = integer(e)?,
            "fd_step" => analysis.fd_step = real(e)?,
            "seed" => analysis.seed = integer(e)?,
            "n_samples" => analysis.n_samples = integer(e)?,
            "rk4_steps_per_period" => analysis.rk4_steps_per_period = integer(e)?,
            "classify_tol" => analysis.classify_tol = real(e)?,
            "random_checks" => analysis.random_checks = integer(e)?,
            "landau_n_max" => analysis.landau_n_max = integer(e)?,
            "landau_l_max" => analysis.landau_l_max = integer(e)?,
            _ => {}
        }
    }

    if !(mass > 0.0) {
        return Err(Error::Validation("mass must be positive".into()));
    }
    if !(hbar > 0.0) {
        return Err(Error::Validation("hbar must be positive".into()));
    }
    let params = PhysicalParams::new(mass, charge, field, hbar)
        .map_err(|e| Error::Validation(e.to_string()))?;
    validate_time(&time)?;
    validate_analysis(&analysis)?;

    let mut cases = Vec::new();
    for (label, mut draft) in preset_cases(scenario) {
        for e in entries.iter().filter(|e| is_geometry_key(e.key)) {
            draft.apply(e)?;
        }
        let geometry = draft.resolve(analysis.seed)?;
        geometry.build(params).map_err(|e| match e {
            Error::Validation(m) => Error::Validation(m),
            other => Error::Validation(other.to_string()),
        })?;
        cases.push(Case { label, geometry });
    }

    Ok(RunConfig {
        params,
        geometry: cases[0].geometry.clone(),
        time,
        analysis,
        scenario,
        cases,
    })
}

fn is_geometry_key(key: &str) -> bool {
    KEYS.iter().any(|(s, k)| *s == Section::Geometry && *k == key)
}

fn validate_time(time: &TimeConfig) -> Result<()> {
    if !(time.t_max > 0.0) {
        return Err(Error::Validation("t_max must be positive".into()));
    }
    if time.n_steps == 0 {
        return Err(Error::Validation("n_steps must be at least 1".into()));
    }
    Ok(())
}

fn validate_analysis(a: &AnalysisConfig) -> Result<()> {
    if a.n_bins < 4 {
        return Err(Error::Validation("n_bins must be at least 4".into()));
    }
    if a.t_samples == 0 {
        return Err(Error::Validation("t_samples must be at least 1".into()));
    }
    if !(a.fd_step > 0.0) {
        return Err(Error::Validation("fd_step must be positive".into()));
    }
    if a.n_samples < 8 {
        return Err(Error::Validation("n_samples must be at least 8".into()));
    }
    if a.rk4_steps_per_period == 0 {
        return Err(Error::Validation("rk4_steps_per_period must be at least 1".into()));
    }
    if !(a.classify_tol > 0.0) {
        return Err(Error::Validation("classify_tol must be positive".into()));
    }
    if a.random_checks == 0 {
        return Err(Error::Validation("random_checks must be at least 1".into()));
    }
    Ok(())
}
