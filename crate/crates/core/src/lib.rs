//! Heat transport on a fixed and an adiabatically expanding box, with a
//! fast-forward (shortcut-to-adiabaticity) driving protocol.
//!
//! - [`schedule`]: magnification factor, advanced time and wall motion.
//! - [`spectral`]: sine-mode projection and standard series solutions.
//! - [`fastforward`]: regularization phase θ, potential `V_FF`, and the
//!   fast-forwarded series field.
//! - [`integrator`]: Crank–Nicolson grid solver on the mapped moving box.
//! - [`observables`]: heat flux, profile width and field comparisons.
//! - [`config`] and [`experiment`]: run configuration, presets and dataset
//!   emission behind the `ffheat` binary.

pub mod config;
pub mod error;
pub mod experiment;
pub mod fastforward;
pub mod field;
pub mod integrator;
pub mod observables;
pub mod quadrature;
pub mod schedule;
pub mod spectral;

pub use error::{Error, Result};
pub use field::FieldSnapshot;
