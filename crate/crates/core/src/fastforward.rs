//! Fast-forward protocol for the expanding box.
//!
//! The regularization phase θ solves `∂_xθ = −(1/u²) ∂_L ∫₀ˣ u² dx′` for a
//! box mode `u`. With L-normalized modes `√(2/L) sin(nπx/L)` the node
//! singularities cancel and `∂_xθ = x/L` for every `n`, so `θ = x²/(2L)`
//! (gauge `θ(0, L) = 0`). The fast-forwarded field is the standard series
//! read on the advanced wall `L0 + εΛ(t)` and multiplied by `e^{sθ}`,
//! and it is driven by
//!
//! `V_FF = −(dα/dt) ε θ − α²ε² ∂θ/∂L − ½ α²ε² (∂_xθ)²`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::FieldSnapshot;
use crate::schedule::{Clock, ScheduleConfig};
use crate::spectral::{decay_exponent, DecayModel, ModalDecomposition, SineSeries};

/// `sin²(nπx/L)` below which the raw-basis quotient is reported singular.
const RAW_NODE_TOL: f64 = 1e-12;

/// Normalization of the box mode used in the θ equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BasisNormalization {
    /// `√(2/L) sin(nπx/L)`; θ is mode independent and regular.
    #[default]
    Normalized,
    /// `sin(nπx/L)`; θ is singular at interior nodes.
    Raw,
}

impl fmt::Display for BasisNormalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasisNormalization::Normalized => "normalized",
            BasisNormalization::Raw => "raw",
        })
    }
}

impl FromStr for BasisNormalization {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "normalized" => Ok(BasisNormalization::Normalized),
            "raw" => Ok(BasisNormalization::Raw),
            other => Err(format!("expected normalized|raw, got `{other}`")),
        }
    }
}

/// Rate multiplying θ in the `e^{sθ}` factor of the fast-forwarded field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThetaExponent {
    /// `s = ε`.
    #[default]
    Epsilon,
    /// `s = v(t) = ε α(t)`.
    Velocity,
}

impl fmt::Display for ThetaExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThetaExponent::Epsilon => "epsilon",
            ThetaExponent::Velocity => "velocity",
        })
    }
}

impl FromStr for ThetaExponent {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "epsilon" => Ok(ThetaExponent::Epsilon),
            "velocity" => Ok(ThetaExponent::Velocity),
            other => Err(format!("expected epsilon|velocity, got `{other}`")),
        }
    }
}

fn check_closed(x: f64, l: f64) -> Result<()> {
    if !(l.is_finite() && l > 0.0) {
        return Err(Error::domain(format!("box length {l} must be > 0")));
    }
    if x.is_nan() || x < 0.0 || x > l * (1.0 + 1e-12) {
        return Err(Error::domain(format!("x = {x} outside [0, {l}]")));
    }
    Ok(())
}

/// `∂_xθ` for box mode `mode_n` on `(0, l)`.
pub fn theta_gradient(x: f64, l: f64, mode_n: u32, basis: BasisNormalization) -> Result<f64> {
    if !(l.is_finite() && l > 0.0) {
        return Err(Error::domain(format!("box length {l} must be > 0")));
    }
    if !(x > 0.0 && x < l) {
        return Err(Error::domain(format!("x = {x} outside the open box (0, {l})")));
    }
    if mode_n == 0 {
        return Err(Error::domain("mode index must be ≥ 1"));
    }
    let phase = mode_n as f64 * PI * x / l;
    match basis {
        // ∂_L ∫₀ˣ u² = −(2x/L²) sin²φ and u² = (2/L) sin²φ; sin²φ cancels.
        BasisNormalization::Normalized => Ok(x / l),
        BasisNormalization::Raw => {
            // ∂_L ∫₀ˣ sin²(nπx′/L) dx′ = −sin 2φ/(4nπ) + (x/2L) cos 2φ
            let s = phase.sin();
            if s * s < RAW_NODE_TOL {
                return Err(Error::Singularity { x });
            }
            let d_l = -(2.0 * phase).sin() / (4.0 * mode_n as f64 * PI)
                + x / (2.0 * l) * (2.0 * phase).cos();
            Ok(-d_l / (s * s))
        }
    }
}

/// `θ(x, L) = x²/(2L)`.
pub fn theta(x: f64, l: f64) -> Result<f64> {
    check_closed(x, l)?;
    Ok(0.5 * x * (x / l))
}

/// `∂θ/∂L = −x²/(2L²)`.
pub fn theta_dl(x: f64, l: f64) -> Result<f64> {
    check_closed(x, l)?;
    let g = x / l;
    Ok(-0.5 * (g * g))
}

/// Regular `∂_xθ = x/L` on the closed box.
fn theta_dx(x: f64, l: f64) -> Result<f64> {
    check_closed(x, l)?;
    Ok(x / l)
}

/// The three terms of `V_FF`, kept apart for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialTerms {
    /// `−(dα/dt) ε θ`
    pub drive: f64,
    /// `−α²ε² ∂θ/∂L`
    pub stretch: f64,
    /// `−½ α²ε² (∂_xθ)²`
    pub gradient: f64,
}

impl PotentialTerms {
    pub fn total(&self) -> f64 {
        self.drive + self.stretch + self.gradient
    }
}

/// Evaluates the three `V_FF` terms at `(x, t)` on the fast-forward wall.
pub fn ff_potential_terms(x: f64, t: f64, sched: &ScheduleConfig) -> Result<PotentialTerms> {
    let l = sched.wall_position(t, Clock::FastForward)?;
    let alpha = sched.alpha(t)?;
    let rate = sched.alpha_rate(t)?;
    let eps = sched.epsilon();
    let th = theta(x, l)?;
    let th_l = theta_dl(x, l)?;
    let th_x = theta_dx(x, l)?;
    let a2e2 = alpha * alpha * eps * eps;
    Ok(PotentialTerms {
        drive: -rate * eps * th,
        stretch: -a2e2 * th_l,
        gradient: -0.5 * a2e2 * (th_x * th_x),
    })
}

/// Fast-forward potential `V_FF(x, t)`.
pub fn ff_potential(x: f64, t: f64, sched: &ScheduleConfig) -> Result<f64> {
    Ok(ff_potential_terms(x, t, sched)?.total())
}

/// Options controlling the series form of the fast-forwarded field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SeriesOptions {
    pub decay: DecayModel,
    pub theta_exponent: ThetaExponent,
}

/// θ and its derivatives plus `V_FF`, bound to a schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolFields {
    sched: ScheduleConfig,
    basis: BasisNormalization,
}

impl ProtocolFields {
    pub fn new(sched: ScheduleConfig, basis: BasisNormalization) -> Self {
        Self { sched, basis }
    }

    pub fn schedule(&self) -> &ScheduleConfig {
        &self.sched
    }

    pub fn basis(&self) -> BasisNormalization {
        self.basis
    }

    pub fn theta(&self, x: f64, l: f64) -> Result<f64> {
        theta(x, l)
    }

    /// `∂_xθ` for mode `n`; regular at the walls in the normalized basis.
    pub fn dtheta_dx(&self, x: f64, l: f64, n: u32) -> Result<f64> {
        match self.basis {
            BasisNormalization::Normalized => theta_dx(x, l),
            BasisNormalization::Raw => theta_gradient(x, l, n, self.basis),
        }
    }

    pub fn dtheta_dl(&self, x: f64, l: f64) -> Result<f64> {
        theta_dl(x, l)
    }

    pub fn v_ff(&self, x: f64, t: f64) -> Result<f64> {
        ff_potential(x, t, &self.sched)
    }
}

/// Fast-forwarded field at one instant: `e^{sθ(x,L)} Σ w_n sin(nπx/L)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FfSeries {
    base: SineSeries,
    theta_rate: f64,
}

impl FfSeries {
    /// Builds the snapshot at time `t ∈ [0, T_FF]`.
    pub fn new(
        md: &ModalDecomposition,
        sched: &ScheduleConfig,
        t: f64,
        opts: SeriesOptions,
    ) -> Result<Self> {
        md.check_reference(sched)?;
        let wall = sched.wall_position(t, Clock::FastForward)?;
        let exponent = decay_exponent(sched, t, Clock::FastForward, opts.decay)?;
        let theta_rate = match opts.theta_exponent {
            ThetaExponent::Epsilon => sched.epsilon(),
            ThetaExponent::Velocity => sched.wall_velocity(t)?,
        };
        Ok(Self {
            base: md.snapshot_with(t, wall, exponent),
            theta_rate,
        })
    }

    /// The sine sum without the θ factor.
    pub fn base(&self) -> &SineSeries {
        &self.base
    }

    /// `s` in `e^{sθ}`.
    pub fn theta_rate(&self) -> f64 {
        self.theta_rate
    }

    /// Same snapshot with θ shifted by a constant (a gauge change).
    pub fn with_theta_offset(&self, offset: f64) -> GaugeShifted<'_> {
        GaugeShifted { inner: self, offset }
    }

    fn factor(&self, x: f64) -> f64 {
        (self.theta_rate * (0.5 * x * (x / self.base.wall()))).exp()
    }
}

impl FieldSnapshot for FfSeries {
    fn time(&self) -> f64 {
        self.base.time()
    }

    fn wall(&self) -> f64 {
        self.base.wall()
    }

    fn value(&self, x: f64) -> Result<f64> {
        Ok(match self.base.locate(x)? {
            Some(x) => self.factor(x) * self.base.raw_value(x),
            None => 0.0,
        })
    }

    fn gradient(&self, x: f64) -> Result<f64> {
        self.base.locate(x)?;
        let x = x.clamp(0.0, self.wall());
        let s = if x <= 0.0 || x >= self.wall() { 0.0 } else { self.base.raw_value(x) };
        let g = x / self.wall();
        Ok(self.factor(x) * (self.theta_rate * g * s + self.base.raw_gradient(x)))
    }
}

/// An [`FfSeries`] whose θ carries an additive constant.
#[derive(Debug, Clone, Copy)]
pub struct GaugeShifted<'a> {
    inner: &'a FfSeries,
    offset: f64,
}

impl GaugeShifted<'_> {
    fn scale(&self) -> f64 {
        (self.inner.theta_rate * self.offset).exp()
    }
}

impl FieldSnapshot for GaugeShifted<'_> {
    fn time(&self) -> f64 {
        self.inner.time()
    }

    fn wall(&self) -> f64 {
        self.inner.wall()
    }

    fn value(&self, x: f64) -> Result<f64> {
        Ok(self.scale() * self.inner.value(x)?)
    }

    fn gradient(&self, x: f64) -> Result<f64> {
        Ok(self.scale() * self.inner.gradient(x)?)
    }
}

/// Fast-forwarded field `u^FF(x, t)`.
pub fn eval_ff_solution(
    md: &ModalDecomposition,
    sched: &ScheduleConfig,
    x: f64,
    t: f64,
    opts: SeriesOptions,
) -> Result<f64> {
    FfSeries::new(md, sched, t, opts)?.value(x)
}
