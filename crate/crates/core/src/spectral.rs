//! Sine-eigenmode machinery for the Dirichlet box.
//!
//! A [`ModalDecomposition`] holds `C_n = (2/L) ∫₀ᴸ f(x) sin(nπx/L) dx` for
//! `n = 1..=N`, projected on the initial box `L_ref`. Evaluation produces a
//! [`SineSeries`] snapshot `Σ C_n D_n(t) sin(nπx/L(t))` where `D_n` is the
//! mode decay factor and `L(t)` the current wall.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::FieldSnapshot;
use crate::quadrature::{GaussLegendre, PANEL_ORDER};
use crate::schedule::{Clock, ScheduleConfig};

pub const DEFAULT_N_MAX: usize = 64;
pub const DEFAULT_QUAD_POINTS: usize = 2048;
pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

/// Minimum quadrature points per retained mode.
pub const QUAD_POINTS_PER_MODE: usize = 10;

/// Panels used when integrating the instantaneous decay rate in time.
const DECAY_PANELS: usize = 32;

/// Initial profile `f(x) = exp(−(x−x0)²/σ²) / (√(2π) σ)`.
///
/// Normalization and exponent follow the source model verbatim, so the
/// total mass is `1/√2` rather than 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianProfile {
    x0: f64,
    sigma: f64,
}

impl GaussianProfile {
    /// Builds the profile, checking it sits strictly inside `[0, domain]`.
    pub fn new(x0: f64, sigma: f64, domain: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::config("profile.sigma", "sigma > 0"));
        }
        if !(x0.is_finite() && x0 > 0.0 && x0 < domain) {
            return Err(Error::domain(format!(
                "profile center x0 = {x0} outside (0, {domain})"
            )));
        }
        Ok(Self { x0, sigma })
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn value(&self, x: f64) -> f64 {
        let d = (x - self.x0) / self.sigma;
        (-d * d).exp() / ((2.0 * PI).sqrt() * self.sigma)
    }
}

/// How the per-mode decay factor treats a moving wall.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DecayModel {
    /// `exp(−π²n²κ² t / L(t)²)`: the instantaneous rate times wall-clock t.
    #[default]
    Literal,
    /// `exp(−π²n²κ² ∫₀ᵗ dt′/L(t′)²)`: the time-integrated rate.
    Integrated,
}

impl fmt::Display for DecayModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecayModel::Literal => "literal",
            DecayModel::Integrated => "integrated",
        })
    }
}

impl FromStr for DecayModel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "literal" => Ok(DecayModel::Literal),
            "integrated" => Ok(DecayModel::Integrated),
            other => Err(format!("expected literal|integrated, got `{other}`")),
        }
    }
}

/// Truncated sine-series coefficients of an initial profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalDecomposition {
    coeffs: Vec<f64>,
    l_ref: f64,
    kappa: f64,
    tail_bound: f64,
}

impl ModalDecomposition {
    /// Wraps precomputed coefficients. `tail_bound` is taken as the sum of
    /// the upper half of `|C_n|`.
    pub fn from_coefficients(coeffs: Vec<f64>, l_ref: f64, kappa: f64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::config("numerics.n_max", "n_max ≥ 1"));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::domain("non-finite modal coefficient"));
        }
        check_length_and_kappa(l_ref, kappa)?;
        let tail_bound = upper_half_sum(&coeffs);
        Ok(Self {
            coeffs,
            l_ref,
            kappa,
            tail_bound,
        })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len()
    }

    pub fn l_ref(&self) -> f64 {
        self.l_ref
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Estimated sup-norm truncation error of the series at t = 0: the
    /// profile's mismatch with the wall zeros plus `Σ_{n>N/2} |C_n|`.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Snapshot of the fixed-box solution on `[0, L_ref]` at time `t`.
    pub fn snapshot_fixed(&self, t: f64) -> Result<SineSeries> {
        check_time(t)?;
        let exponent = t / (self.l_ref * self.l_ref);
        Ok(self.snapshot_with(t, self.l_ref, exponent))
    }

    /// Snapshot of the standard adiabatic solution: modes stretched to the
    /// standard wall `L0 + εt`, decay per `decay`.
    pub fn snapshot_adiabatic(
        &self,
        sched: &ScheduleConfig,
        t: f64,
        decay: DecayModel,
    ) -> Result<SineSeries> {
        self.check_reference(sched)?;
        let wall = sched.wall_position(t, Clock::Standard)?;
        let exponent = decay_exponent(sched, t, Clock::Standard, decay)?;
        Ok(self.snapshot_with(t, wall, exponent))
    }

    /// Snapshot on an arbitrary wall with a precomputed decay exponent
    /// `E` (so that `D_n = exp(−π²κ²n² E)`).
    pub fn snapshot_with(&self, t: f64, wall: f64, exponent: f64) -> SineSeries {
        let rate = PI * PI * self.kappa * self.kappa * exponent;
        let weights = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let n = (i + 1) as f64;
                c * (-rate * n * n).exp()
            })
            .collect();
        SineSeries { t, wall, weights }
    }

    pub(crate) fn check_reference(&self, sched: &ScheduleConfig) -> Result<()> {
        if (self.l_ref - sched.l0()).abs() > 1e-12 * sched.l0() {
            return Err(Error::Usage(format!(
                "decomposition projected on L = {} but schedule starts at L0 = {}",
                self.l_ref,
                sched.l0()
            )));
        }
        Ok(())
    }
}

fn check_length_and_kappa(l: f64, kappa: f64) -> Result<()> {
    if !(l.is_finite() && l > 0.0) {
        return Err(Error::domain(format!("domain length {l} must be > 0")));
    }
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::config("physics.kappa", "kappa > 0"));
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::domain(format!("time t = {t} must be ≥ 0")));
    }
    Ok(())
}

fn upper_half_sum(coeffs: &[f64]) -> f64 {
    coeffs[coeffs.len() / 2..].iter().map(|c| c.abs()).sum()
}

/// Projects `f` onto the first `n_max` sine modes of `[0, l]`.
///
/// Uses `⌈quad_points/16⌉` panels of 16-point Gauss–Legendre. Fails when
/// `quad_points < 10·n_max`, or when the last two coefficients exceed
/// `tail_tol · max|C_n|` (the series is truncated too early).
pub fn project_function<F: Fn(f64) -> f64>(
    f: F,
    l: f64,
    kappa: f64,
    n_max: usize,
    quad_points: usize,
    tail_tol: f64,
) -> Result<ModalDecomposition> {
    check_length_and_kappa(l, kappa)?;
    if n_max == 0 {
        return Err(Error::config("numerics.n_max", "n_max ≥ 1"));
    }
    if quad_points < QUAD_POINTS_PER_MODE * n_max {
        return Err(Error::config(
            "numerics.quad_points",
            format!("quad_points ≥ {QUAD_POINTS_PER_MODE}·n_max = {}", QUAD_POINTS_PER_MODE * n_max),
        ));
    }
    let rule = GaussLegendre::new(PANEL_ORDER);
    let panels = quad_points.div_ceil(PANEL_ORDER);
    let points = rule.composite_points(0.0, l, panels);
    let samples: Vec<(f64, f64, f64)> = points.iter().map(|&(x, w)| (x, w, f(x))).collect();

    let coeffs: Vec<f64> = (1..=n_max)
        .map(|n| {
            let k = n as f64 * PI / l;
            let s: f64 = samples.iter().map(|&(x, w, fx)| w * fx * (k * x).sin()).sum();
            2.0 / l * s
        })
        .collect();

    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::domain("profile produced a non-finite coefficient"));
    }
    let peak = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let last = coeffs[n_max.saturating_sub(2)..]
        .iter()
        .fold(0.0f64, |m, c| m.max(c.abs()));
    if last > tail_tol * peak {
        return Err(Error::config(
            "numerics.n_max",
            format!("truncation tail {:e} exceeds tail_tol·max|C_n| = {:e}", last, tail_tol * peak),
        ));
    }
    let edge = f(0.0).abs().max(f(l).abs());
    Ok(ModalDecomposition {
        tail_bound: edge + upper_half_sum(&coeffs),
        coeffs,
        l_ref: l,
        kappa,
    })
}

/// Projects the Gaussian initial profile onto the box `[0, l]`.
pub fn project_profile(
    profile: &GaussianProfile,
    l: f64,
    kappa: f64,
    n_max: usize,
    quad_points: usize,
) -> Result<ModalDecomposition> {
    project_profile_with_tol(profile, l, kappa, n_max, quad_points, DEFAULT_TAIL_TOL)
}

pub fn project_profile_with_tol(
    profile: &GaussianProfile,
    l: f64,
    kappa: f64,
    n_max: usize,
    quad_points: usize,
    tail_tol: f64,
) -> Result<ModalDecomposition> {
    if !(profile.x0() > 0.0 && profile.x0() < l) {
        return Err(Error::domain(format!(
            "profile center x0 = {} outside (0, {l})",
            profile.x0()
        )));
    }
    project_function(|x| profile.value(x), l, kappa, n_max, quad_points, tail_tol)
}

/// Decay exponent `E(t)` such that `D_n(t) = exp(−π²κ²n² E(t))` for a wall
/// driven by `clock`.
pub fn decay_exponent(
    sched: &ScheduleConfig,
    t: f64,
    clock: Clock,
    model: DecayModel,
) -> Result<f64> {
    let wall = sched.wall_position(t, clock)?;
    match model {
        DecayModel::Literal => Ok(t / (wall * wall)),
        DecayModel::Integrated => {
            let l0 = sched.l0();
            if sched.epsilon() == 0.0 {
                return Ok(t / (l0 * l0));
            }
            match clock {
                // ∫₀ᵗ dt′/(L0 + εt′)² = t / (L0 (L0 + εt))
                Clock::Standard => Ok(t / (l0 * wall)),
                Clock::FastForward => {
                    let rule = GaussLegendre::new(PANEL_ORDER);
                    let mut err = None;
                    let integral = rule.integrate(0.0, t, DECAY_PANELS, |s| {
                        match sched.wall_position(s, Clock::FastForward) {
                            Ok(l) => 1.0 / (l * l),
                            Err(e) => {
                                err = Some(e);
                                0.0
                            }
                        }
                    });
                    match err {
                        Some(e) => Err(e),
                        None => Ok(integral),
                    }
                }
            }
        }
    }
}

/// Fixed-box solution `Σ C_n exp(−π²κ²n²t/L²) sin(nπx/L)`.
pub fn eval_standard_fixed(md: &ModalDecomposition, x: f64, t: f64) -> Result<f64> {
    md.snapshot_fixed(t)?.value(x)
}

/// Standard solution on the expanding box `[0, L0 + εt]`.
pub fn eval_standard_adiabatic(
    md: &ModalDecomposition,
    sched: &ScheduleConfig,
    x: f64,
    t: f64,
    decay: DecayModel,
) -> Result<f64> {
    md.snapshot_adiabatic(sched, t, decay)?.value(x)
}

/// `Σ w_n sin(nπx/L)` with the decay already folded into `w_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SineSeries {
    t: f64,
    wall: f64,
    weights: Vec<f64>,
}

impl SineSeries {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Maps `x` into `[0, wall]`; `None` marks a wall point (exact zero).
    pub(crate) fn locate(&self, x: f64) -> Result<Option<f64>> {
        let slack = 1e-12 * self.wall;
        if x.is_nan() || x < -slack || x > self.wall + slack {
            return Err(Error::domain(format!(
                "x = {x} outside the box [0, {}]",
                self.wall
            )));
        }
        if x <= 0.0 || x >= self.wall {
            Ok(None)
        } else {
            Ok(Some(x))
        }
    }

    fn sum_sin(&self, x: f64) -> f64 {
        let base = PI / self.wall;
        self.weights
            .iter()
            .enumerate()
            .map(|(i, w)| w * ((i + 1) as f64 * base * x).sin())
            .sum()
    }

    fn sum_cos(&self, x: f64) -> f64 {
        let base = PI / self.wall;
        self.weights
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let k = (i + 1) as f64 * base;
                w * k * (k * x).cos()
            })
            .sum()
    }

    /// Series value without the wall short-cut; `x` must be inside the box.
    pub(crate) fn raw_value(&self, x: f64) -> f64 {
        self.sum_sin(x)
    }

    pub(crate) fn raw_gradient(&self, x: f64) -> f64 {
        self.sum_cos(x)
    }
}

impl FieldSnapshot for SineSeries {
    fn time(&self) -> f64 {
        self.t
    }

    fn wall(&self) -> f64 {
        self.wall
    }

    fn value(&self, x: f64) -> Result<f64> {
        Ok(match self.locate(x)? {
            Some(x) => self.sum_sin(x),
            None => 0.0,
        })
    }

    fn gradient(&self, x: f64) -> Result<f64> {
        self.locate(x)?;
        Ok(self.sum_cos(x.clamp(0.0, self.wall)))
    }
}
