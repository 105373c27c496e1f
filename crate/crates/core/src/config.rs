//! Run configuration: a flat `key=value` file with dotted section
//! prefixes, e.g. `schedule.epsilon=0.04`. Blank lines and `#` comments
//! are ignored; unknown or repeated keys are rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fastforward::{BasisNormalization, SeriesOptions, ThetaExponent};
use crate::integrator::{DEFAULT_INTERVALS, DEFAULT_STEPS_PER_WINDOW, MIN_INTERVALS};
use crate::schedule::{AlphaShape, Clock, ScheduleConfig};
use crate::spectral::{
    DecayModel, GaussianProfile, DEFAULT_N_MAX, DEFAULT_QUAD_POINTS, DEFAULT_TAIL_TOL,
    QUAD_POINTS_PER_MODE,
};

/// Every accepted key, in manifest order.
pub const KEYS: &[&str] = &[
    "physics.kappa",
    "schedule.L0",
    "schedule.epsilon",
    "schedule.alpha_bar",
    "schedule.T",
    "schedule.shape",
    "profile.x0",
    "profile.sigma",
    "numerics.n_max",
    "numerics.quad_points",
    "numerics.tail_tol",
    "numerics.M",
    "numerics.dt",
    "numerics.decay_model",
    "numerics.theta_exponent",
    "numerics.basis_normalization",
    "output.n_samples",
    "output.sample_times",
    "output.nx",
    "output.dir",
    "mode",
    "solver",
];

const DEFAULT_N_SAMPLES: usize = 11;
const DEFAULT_NX: usize = 201;

/// Where a resolved value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Default,
    File,
    Preset,
    /// Preset value the source model leaves unstated.
    Assumed,
    Cli,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Origin::Default => "default",
            Origin::File => "file",
            Origin::Preset => "preset",
            Origin::Assumed => "assumed",
            Origin::Cli => "cli",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModeSelection {
    Standard,
    FastForward,
    #[default]
    Both,
}

impl ModeSelection {
    pub fn clocks(self) -> Vec<Clock> {
        match self {
            ModeSelection::Standard => vec![Clock::Standard],
            ModeSelection::FastForward => vec![Clock::FastForward],
            ModeSelection::Both => vec![Clock::Standard, Clock::FastForward],
        }
    }
}

impl fmt::Display for ModeSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModeSelection::Standard => "standard",
            ModeSelection::FastForward => "fast_forward",
            ModeSelection::Both => "both",
        })
    }
}

impl FromStr for ModeSelection {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "standard" => Ok(ModeSelection::Standard),
            "fast_forward" => Ok(ModeSelection::FastForward),
            "both" => Ok(ModeSelection::Both),
            other => Err(format!("expected standard|fast_forward|both, got `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    Series,
    Grid,
}

impl Solver {
    pub fn label(self) -> &'static str {
        match self {
            Solver::Series => "series",
            Solver::Grid => "grid",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverSelection {
    Series,
    Grid,
    #[default]
    Both,
}

impl SolverSelection {
    pub fn solvers(self) -> Vec<Solver> {
        match self {
            SolverSelection::Series => vec![Solver::Series],
            SolverSelection::Grid => vec![Solver::Grid],
            SolverSelection::Both => vec![Solver::Series, Solver::Grid],
        }
    }
}

impl fmt::Display for SolverSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverSelection::Series => "series",
            SolverSelection::Grid => "grid",
            SolverSelection::Both => "both",
        })
    }
}

impl FromStr for SolverSelection {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "series" => Ok(SolverSelection::Series),
            "grid" => Ok(SolverSelection::Grid),
            "both" => Ok(SolverSelection::Both),
            other => Err(format!("expected series|grid|both, got `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Numerics {
    pub n_max: usize,
    pub quad_points: usize,
    pub tail_tol: f64,
    /// Grid intervals of the mapped coordinate.
    pub m: usize,
    pub dt: f64,
    pub decay: DecayModel,
    pub theta_exponent: ThetaExponent,
    pub basis: BasisNormalization,
}

impl Numerics {
    pub fn series_options(&self) -> SeriesOptions {
        SeriesOptions {
            decay: self.decay,
            theta_exponent: self.theta_exponent,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub sample_times: Vec<f64>,
    /// Points across the initial box; sets the physical x spacing.
    pub nx: usize,
    pub dir: Option<PathBuf>,
}

impl OutputConfig {
    pub fn dx(&self, l0: f64) -> f64 {
        l0 / (self.nx - 1) as f64
    }
}

/// A fully resolved, validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub kappa: f64,
    pub schedule: ScheduleConfig,
    pub profile: GaussianProfile,
    pub numerics: Numerics,
    pub output: OutputConfig,
    pub mode: ModeSelection,
    pub solver: SolverSelection,
    origins: BTreeMap<&'static str, Origin>,
}

struct RawValue {
    value: String,
    origin: Origin,
}

type RawMap = BTreeMap<&'static str, RawValue>;

fn known_key(key: &str) -> Option<&'static str> {
    KEYS.iter().copied().find(|k| *k == key)
}

fn parse_into(text: &str, origin: Origin, assumed: &[&str], raw: &mut RawMap) -> Result<()> {
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected key=value, got `{content}`"),
            });
        };
        let key = key.trim();
        let Some(key) = known_key(key) else {
            return Err(Error::Parse {
                line: line_no,
                message: format!("unknown key `{key}`"),
            });
        };
        let origin = if assumed.contains(&key) { Origin::Assumed } else { origin };
        let entry = RawValue {
            value: value.trim().to_string(),
            origin,
        };
        if raw.insert(key, entry).is_some() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("duplicate key `{key}`"),
            });
        }
    }
    Ok(())
}

/// Builder that records the origin of every resolved key.
struct Resolver {
    raw: RawMap,
    origins: BTreeMap<&'static str, Origin>,
}

impl Resolver {
    fn get<T: FromStr>(&mut self, key: &'static str, default: impl FnOnce() -> T) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        match self.raw.get(key) {
            Some(raw) => {
                self.origins.insert(key, raw.origin);
                raw.value
                    .parse::<T>()
                    .map_err(|e| Error::config(key, format!("cannot parse `{}`: {e}", raw.value)))
            }
            None => {
                self.origins.insert(key, Origin::Default);
                Ok(default())
            }
        }
    }

    fn get_raw(&mut self, key: &'static str) -> Option<String> {
        let raw = self.raw.get(key)?;
        self.origins.insert(key, raw.origin);
        Some(raw.value.clone())
    }
}

fn even_times(t_end: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| if i + 1 == n { t_end } else { t_end * i as f64 / (n - 1) as f64 })
        .collect()
}

fn parse_times(key: &'static str, text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::config(key, format!("cannot parse `{}`: {e}", s.trim())))
        })
        .collect()
}

fn resolve(raw: RawMap) -> Result<RunConfig> {
    let mut r = Resolver {
        raw,
        origins: BTreeMap::new(),
    };

    let kappa: f64 = r.get("physics.kappa", || 0.5)?;
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::config("physics.kappa", "kappa > 0"));
    }
    let l0: f64 = r.get("schedule.L0", || 10.0)?;
    let epsilon: f64 = r.get("schedule.epsilon", || 0.04)?;
    let alpha_bar: f64 = r.get("schedule.alpha_bar", || 100.0)?;
    let t_standard: f64 = r.get("schedule.T", || 100.0)?;
    let shape: AlphaShape = r.get("schedule.shape", AlphaShape::default)?;
    let schedule = ScheduleConfig::new(l0, epsilon, alpha_bar, t_standard, shape)?;
    let t_ff = schedule.t_ff();

    let x0: f64 = r.get("profile.x0", || 0.5 * l0)?;
    let sigma: f64 = r.get("profile.sigma", || 1.0)?;
    let profile = GaussianProfile::new(x0, sigma, l0).map_err(|e| match e {
        Error::Domain(_) => Error::config("profile.x0", format!("0 < x0 < L0 = {l0}")),
        other => other,
    })?;

    let n_max: usize = r.get("numerics.n_max", || DEFAULT_N_MAX)?;
    if n_max == 0 {
        return Err(Error::config("numerics.n_max", "n_max ≥ 1"));
    }
    let quad_points: usize = r.get("numerics.quad_points", || {
        DEFAULT_QUAD_POINTS.max(QUAD_POINTS_PER_MODE * n_max)
    })?;
    if quad_points < QUAD_POINTS_PER_MODE * n_max {
        return Err(Error::config(
            "numerics.quad_points",
            format!("quad_points ≥ {QUAD_POINTS_PER_MODE}·n_max"),
        ));
    }
    let tail_tol: f64 = r.get("numerics.tail_tol", || DEFAULT_TAIL_TOL)?;
    if !(tail_tol.is_finite() && tail_tol > 0.0) {
        return Err(Error::config("numerics.tail_tol", "tail_tol > 0"));
    }
    let m: usize = r.get("numerics.M", || DEFAULT_INTERVALS)?;
    if m < MIN_INTERVALS || m % 2 != 0 {
        return Err(Error::config("numerics.M", format!("even M ≥ {MIN_INTERVALS}")));
    }
    let dt: f64 = r.get("numerics.dt", || t_ff / DEFAULT_STEPS_PER_WINDOW as f64)?;
    if !(dt.is_finite() && dt > 0.0 && dt <= t_ff) {
        return Err(Error::config("numerics.dt", format!("0 < dt ≤ T_FF = {t_ff}")));
    }
    let decay: DecayModel = r.get("numerics.decay_model", DecayModel::default)?;
    let theta_exponent: ThetaExponent = r.get("numerics.theta_exponent", ThetaExponent::default)?;
    let basis: BasisNormalization =
        r.get("numerics.basis_normalization", BasisNormalization::default)?;
    if basis == BasisNormalization::Raw {
        return Err(Error::config(
            "numerics.basis_normalization",
            "raw modes make theta singular at interior nodes; only `normalized` can drive a run",
        ));
    }

    let n_samples: usize = r.get("output.n_samples", || DEFAULT_N_SAMPLES)?;
    let sample_times = match r.get_raw("output.sample_times") {
        Some(text) => parse_times("output.sample_times", &text)?,
        None => {
            r.origins.insert("output.sample_times", Origin::Default);
            if n_samples < 2 {
                return Err(Error::config("output.n_samples", "n_samples ≥ 2"));
            }
            even_times(t_ff, n_samples)
        }
    };
    if sample_times.is_empty() {
        return Err(Error::config("output.sample_times", "at least one time"));
    }
    if sample_times.iter().any(|&t| !(t >= 0.0 && t <= t_ff)) {
        return Err(Error::config("output.sample_times", format!("times within [0, T_FF = {t_ff}]")));
    }
    if sample_times.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::config("output.sample_times", "strictly increasing"));
    }
    let nx: usize = r.get("output.nx", || DEFAULT_NX)?;
    if nx < 2 {
        return Err(Error::config("output.nx", "nx ≥ 2"));
    }
    let dir = r.get_raw("output.dir").map(PathBuf::from);
    if dir.is_none() {
        r.origins.insert("output.dir", Origin::Default);
    }
    let mode: ModeSelection = r.get("mode", ModeSelection::default)?;
    let solver: SolverSelection = r.get("solver", SolverSelection::default)?;

    Ok(RunConfig {
        kappa,
        schedule,
        profile,
        numerics: Numerics {
            n_max,
            quad_points,
            tail_tol,
            m,
            dt,
            decay,
            theta_exponent,
            basis,
        },
        output: OutputConfig {
            sample_times,
            nx,
            dir,
        },
        mode,
        solver,
        origins: r.origins,
    })
}

/// Parses config text; `assumed` keys are tagged as assumptions.
fn parse_with(text: &str, origin: Origin, assumed: &[&str]) -> Result<RunConfig> {
    let mut raw = RawMap::new();
    parse_into(text, origin, assumed, &mut raw)?;
    resolve(raw)
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_with(text, Origin::File, &[])
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

/// Keys that presets pin without support from the source model.
pub const PRESET_ASSUMED: &[&str] = &["schedule.T", "profile.x0", "profile.sigma"];

const PRESET_COMMON: &str = "\
physics.kappa=0.5
schedule.L0=10
schedule.epsilon=0.04
schedule.alpha_bar=100
schedule.T=100
profile.x0=5
profile.sigma=1
mode=both
solver=both
";

/// Config text of a named preset.
pub fn preset_text(name: &str) -> Option<String> {
    let extra = match name {
        // temperature profiles at a handful of times
        "fig1" => "output.n_samples=5\noutput.nx=201\n",
        // flux time series
        "fig2" => "output.n_samples=21\noutput.nx=201\n",
        // dense (x, t) flux table for contour plots
        "fig3" => "output.n_samples=81\noutput.nx=281\n",
        _ => return None,
    };
    Some(format!("{PRESET_COMMON}{extra}"))
}

pub fn preset(name: &str) -> Result<RunConfig> {
    let text = preset_text(name)
        .ok_or_else(|| Error::config("preset", format!("unknown preset `{name}` (fig1|fig2|fig3)")))?;
    parse_with(&text, Origin::Preset, PRESET_ASSUMED)
}

impl RunConfig {
    pub fn origin(&self, key: &str) -> Option<Origin> {
        self.origins.get(key).copied()
    }

    pub fn set_mode(&mut self, mode: ModeSelection) {
        self.mode = mode;
        self.origins.insert("mode", Origin::Cli);
    }

    pub fn set_solver(&mut self, solver: SolverSelection) {
        self.solver = solver;
        self.origins.insert("solver", Origin::Cli);
    }

    pub fn set_output_dir(&mut self, dir: PathBuf) {
        self.output.dir = Some(dir);
        self.origins.insert("output.dir", Origin::Cli);
    }

    /// Grid steps across the fast-forward window implied by `numerics.dt`.
    pub fn steps(&self) -> usize {
        (self.schedule.t_ff() / self.numerics.dt - 1e-9).ceil().max(1.0) as usize
    }

    fn value_text(&self, key: &str) -> String {
        let s = &self.schedule;
        let n = &self.numerics;
        match key {
            "physics.kappa" => self.kappa.to_string(),
            "schedule.L0" => s.l0().to_string(),
            "schedule.epsilon" => s.epsilon().to_string(),
            "schedule.alpha_bar" => s.alpha_bar().to_string(),
            "schedule.T" => s.t_standard().to_string(),
            "schedule.shape" => s.shape().to_string(),
            "profile.x0" => self.profile.x0().to_string(),
            "profile.sigma" => self.profile.sigma().to_string(),
            "numerics.n_max" => n.n_max.to_string(),
            "numerics.quad_points" => n.quad_points.to_string(),
            "numerics.tail_tol" => format!("{:e}", n.tail_tol),
            "numerics.M" => n.m.to_string(),
            "numerics.dt" => n.dt.to_string(),
            "numerics.decay_model" => n.decay.to_string(),
            "numerics.theta_exponent" => n.theta_exponent.to_string(),
            "numerics.basis_normalization" => n.basis.to_string(),
            "output.n_samples" => self.output.sample_times.len().to_string(),
            "output.sample_times" => self
                .output
                .sample_times
                .iter()
                .map(|t| t.to_string())
                .collect::<Vec<_>>()
                .join(","),
            "output.nx" => self.output.nx.to_string(),
            "output.dir" => self
                .output
                .dir
                .as_ref()
                .map(|d| d.display().to_string())
                .unwrap_or_default(),
            "mode" => self.mode.to_string(),
            "solver" => self.solver.to_string(),
            _ => String::new(),
        }
    }

    /// Resolved config as `key=value  source=<origin>` lines, in key order.
    pub fn resolved_lines(&self) -> Vec<String> {
        KEYS.iter()
            .map(|&k| {
                let origin = self.origin(k).unwrap_or(Origin::Default);
                let tag = if origin == Origin::Assumed {
                    "assumed=preset-choice".to_string()
                } else {
                    format!("source={origin}")
                };
                format!("{k}={}  {tag}", self.value_text(k))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_documented_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg.mode, ModeSelection::Both);
        assert_eq!(cfg.solver, SolverSelection::Both);
        assert_eq!(cfg.kappa, 0.5);
        assert_eq!(cfg.schedule.l0(), 10.0);
        assert_eq!(cfg.profile.x0(), 5.0);
        assert_eq!(cfg.numerics.n_max, 64);
        assert_eq!(cfg.numerics.m, 512);
        assert_eq!(cfg.numerics.dt, 1.0 / 4096.0);
        assert_eq!(cfg.steps(), 4096);
        assert_eq!(cfg.output.sample_times.len(), 11);
        assert_eq!(*cfg.output.sample_times.last().unwrap(), 1.0);
        for k in KEYS {
            assert_eq!(cfg.origin(k), Some(Origin::Default), "{k}");
        }
    }

    #[test]
    fn fig1_preset_carries_caption_parameters() {
        let cfg = preset("fig1").unwrap();
        assert_eq!(cfg.kappa, 0.5);
        assert_eq!(cfg.schedule.l0(), 10.0);
        assert_eq!(cfg.schedule.epsilon(), 0.04);
        assert_eq!(cfg.schedule.alpha_bar(), 100.0);
        assert_eq!(cfg.origin("schedule.T"), Some(Origin::Assumed));
        assert_eq!(cfg.origin("schedule.epsilon"), Some(Origin::Preset));
        assert!(cfg
            .resolved_lines()
            .contains(&"profile.sigma=1  assumed=preset-choice".to_string()));
        assert!(preset("fig9").is_err());
    }

    #[test]
    fn alpha_bar_below_one_is_rejected() {
        let err = parse_config("schedule.alpha_bar=0.5").unwrap_err();
        assert_eq!(err.to_string(), "invalid config: schedule.alpha_bar: alpha_bar ≥ 1");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_config("# comment\n\nschedule.L0=10\nschedule.epsilon 0.1\n").unwrap_err();
        assert_eq!(err, Error::Parse { line: 4, message: "expected key=value, got `schedule.epsilon 0.1`".into() });
        let err = parse_config("schedule.epsilom=0.1").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = parse_config("mode=both\nmode=standard").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn value_errors_name_the_key() {
        let err = parse_config("numerics.M=lots").unwrap_err();
        assert!(matches!(err, Error::Config { ref key, .. } if key == "numerics.M"));
        assert!(parse_config("numerics.M=8").is_err());
        assert!(parse_config("numerics.M=101").is_err());
        assert!(parse_config("numerics.n_max=64\nnumerics.quad_points=100").is_err());
        assert!(parse_config("profile.x0=12").is_err());
        assert!(parse_config("numerics.basis_normalization=raw").is_err());
        assert!(parse_config("output.sample_times=0.5,0.2").is_err());
        assert!(parse_config("output.sample_times=0,2").is_err());
        assert!(parse_config("mode=sideways").is_err());
        assert!(parse_config("physics.kappa=-1").is_err());
    }

    #[test]
    fn explicit_values_and_inline_comments() {
        let cfg = parse_config(
            "schedule.epsilon = 0  # static wall\nmode=standard\noutput.sample_times=0, 0.5,1\nnumerics.decay_model=integrated\n",
        )
        .unwrap();
        assert_eq!(cfg.schedule.epsilon(), 0.0);
        assert_eq!(cfg.mode, ModeSelection::Standard);
        assert_eq!(cfg.output.sample_times, vec![0.0, 0.5, 1.0]);
        assert_eq!(cfg.numerics.decay, DecayModel::Integrated);
        assert_eq!(cfg.origin("schedule.epsilon"), Some(Origin::File));
        assert_eq!(cfg.origin("schedule.L0"), Some(Origin::Default));
    }

    #[test]
    fn resolved_lines_cover_every_key() {
        let cfg = parse_config("").unwrap();
        let lines = cfg.resolved_lines();
        assert_eq!(lines.len(), KEYS.len());
        for (line, key) in lines.iter().zip(KEYS) {
            assert!(line.starts_with(&format!("{key}=")));
            assert!(line.ends_with("source=default"));
        }
    }
}
