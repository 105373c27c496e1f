//! Time-magnification schedule: the magnification factor α(t), the
//! advanced clock Λ(t) = ∫₀ᵗ α, and the wall trajectory of the box.
//!
//! The standard system moves its wall as `L0 + ε t`. The fast-forwarded
//! system reads the same trajectory at the advanced time, `L0 + ε Λ(t)`,
//! and reaches the standard end state at `T_FF = T / ᾱ` instead of `T`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Relative slack accepted when a time lands a rounding error past `T_FF`.
const END_SLACK: f64 = 1e-12;

/// Profile of the magnification factor on `[0, T_FF]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlphaShape {
    /// `ᾱ − (ᾱ − 1) cos(2π t / T_FF)`; starts and ends at 1.
    #[default]
    Cosine,
    /// `α ≡ ᾱ`, used for analytic checks.
    Constant,
}

impl fmt::Display for AlphaShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlphaShape::Cosine => "cosine",
            AlphaShape::Constant => "constant",
        })
    }
}

impl FromStr for AlphaShape {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "cosine" => Ok(AlphaShape::Cosine),
            "constant" => Ok(AlphaShape::Constant),
            other => Err(format!("expected cosine|constant, got `{other}`")),
        }
    }
}

/// Which clock drives the wall.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clock {
    Standard,
    FastForward,
}

impl Clock {
    pub fn label(self) -> &'static str {
        match self {
            Clock::Standard => "standard",
            Clock::FastForward => "fast_forward",
        }
    }
}

/// Validated schedule parameters. `T_FF` is always derived from `T / ᾱ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleConfig {
    l0: f64,
    epsilon: f64,
    alpha_bar: f64,
    t_standard: f64,
    shape: AlphaShape,
}

impl ScheduleConfig {
    pub fn new(
        l0: f64,
        epsilon: f64,
        alpha_bar: f64,
        t_standard: f64,
        shape: AlphaShape,
    ) -> Result<Self> {
        if !(l0.is_finite() && l0 > 0.0) {
            return Err(Error::config("schedule.L0", "L0 > 0"));
        }
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::config("schedule.epsilon", "epsilon ≥ 0"));
        }
        if !(alpha_bar.is_finite() && alpha_bar >= 1.0) {
            return Err(Error::config("schedule.alpha_bar", "alpha_bar ≥ 1"));
        }
        if !(t_standard.is_finite() && t_standard > 0.0) {
            return Err(Error::config("schedule.T", "T > 0"));
        }
        Ok(Self {
            l0,
            epsilon,
            alpha_bar,
            t_standard,
            shape,
        })
    }

    pub fn l0(&self) -> f64 {
        self.l0
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn alpha_bar(&self) -> f64 {
        self.alpha_bar
    }

    pub fn t_standard(&self) -> f64 {
        self.t_standard
    }

    pub fn shape(&self) -> AlphaShape {
        self.shape
    }

    /// Fast-forward duration `T / ᾱ`.
    pub fn t_ff(&self) -> f64 {
        self.t_standard / self.alpha_bar
    }

    /// Copy with a different growth rate (the same validation applies).
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(self.l0, epsilon, self.alpha_bar, self.t_standard, self.shape)
    }

    /// Copy with a different mean magnification.
    pub fn with_alpha_bar(&self, alpha_bar: f64) -> Result<Self> {
        Self::new(self.l0, self.epsilon, alpha_bar, self.t_standard, self.shape)
    }

    fn check_nonnegative(&self, t: f64) -> Result<()> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::domain(format!("time t = {t} must be ≥ 0")));
        }
        Ok(())
    }

    /// Validates `t ∈ [0, T_FF]` and clamps a last-ulp overshoot onto `T_FF`.
    fn check_ff_range(&self, t: f64) -> Result<f64> {
        self.check_nonnegative(t)?;
        let t_ff = self.t_ff();
        if t <= t_ff {
            Ok(t)
        } else if t <= t_ff * (1.0 + END_SLACK) {
            Ok(t_ff)
        } else {
            Err(Error::domain(format!(
                "time t = {t} outside fast-forward range [0, {t_ff}]"
            )))
        }
    }

    /// Phase `2π t / T_FF` of the cosine schedule.
    fn phase(&self, t: f64) -> f64 {
        2.0 * PI * t / self.t_ff()
    }

    /// Magnification factor α(t). Equal to 1 once `t > T_FF`.
    pub fn alpha(&self, t: f64) -> Result<f64> {
        self.check_nonnegative(t)?;
        if t > self.t_ff() {
            return Ok(1.0);
        }
        Ok(match self.shape {
            AlphaShape::Cosine => {
                self.alpha_bar - (self.alpha_bar - 1.0) * self.phase(t).cos()
            }
            AlphaShape::Constant => self.alpha_bar,
        })
    }

    /// Analytic dα/dt. Zero past `T_FF` and for the constant shape.
    pub fn alpha_rate(&self, t: f64) -> Result<f64> {
        self.check_nonnegative(t)?;
        if t > self.t_ff() {
            return Ok(0.0);
        }
        Ok(match self.shape {
            AlphaShape::Cosine => {
                (self.alpha_bar - 1.0) * (2.0 * PI / self.t_ff()) * self.phase(t).sin()
            }
            AlphaShape::Constant => 0.0,
        })
    }

    /// Advanced time Λ(t) on `[0, T_FF]`, in closed form.
    pub fn advanced_time(&self, t: f64) -> Result<f64> {
        let t = self.check_ff_range(t)?;
        Ok(match self.shape {
            AlphaShape::Cosine => {
                self.alpha_bar * t
                    - (self.alpha_bar - 1.0) * (self.t_ff() / (2.0 * PI)) * self.phase(t).sin()
            }
            AlphaShape::Constant => self.alpha_bar * t,
        })
    }

    /// Wall position `L0 + ε t` (standard) or `L0 + ε Λ(t)` (fast-forward).
    pub fn wall_position(&self, t: f64, clock: Clock) -> Result<f64> {
        let clock_time = match clock {
            Clock::Standard => {
                self.check_nonnegative(t)?;
                t
            }
            Clock::FastForward => self.advanced_time(t)?,
        };
        Ok(self.l0 + self.epsilon * clock_time)
    }

    /// Fast-forward wall velocity `v(t) = ε α(t)` on `[0, T_FF]`.
    pub fn wall_velocity(&self, t: f64) -> Result<f64> {
        let t = self.check_ff_range(t)?;
        Ok(self.epsilon * self.alpha(t)?)
    }

    /// Wall velocity for either clock; the standard wall moves at ε.
    pub fn wall_velocity_on(&self, t: f64, clock: Clock) -> Result<f64> {
        match clock {
            Clock::Standard => {
                self.check_nonnegative(t)?;
                Ok(self.epsilon)
            }
            Clock::FastForward => self.wall_velocity(t),
        }
    }

    /// Latest time at which `clock` is defined, or `None` if unbounded.
    pub fn horizon(&self, clock: Clock) -> Option<f64> {
        match clock {
            Clock::Standard => None,
            Clock::FastForward => Some(self.t_ff()),
        }
    }
}
