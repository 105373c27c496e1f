//! C interface to `ffheat-core`.
//!
//! Every fallible function returns an [`FfheatStatus`] and writes results
//! through out-pointers. On failure the message is available from
//! [`ffheat_last_error_message`] on the same thread. Handles are opaque and
//! must be released with their `_free` function.
//!
//! Enumerated arguments (`clock`, `shape`, ...) are passed as `uint32_t`
//! using the values of the matching `Ffheat*` enum; anything else is
//! rejected with `FFHEAT_STATUS_INVALID_ARGUMENT`.
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use ffheat_core::config::{self, ModeSelection, RunConfig, SolverSelection};
use ffheat_core::experiment::run_experiment;
use ffheat_core::fastforward::{
    ff_potential, theta, theta_gradient, BasisNormalization, FfSeries, SeriesOptions, ThetaExponent,
};
use ffheat_core::integrator::{self, GridField, GridSystem, RunOptions};
use ffheat_core::observables::profile_width;
use ffheat_core::schedule::{AlphaShape, Clock, ScheduleConfig};
use ffheat_core::spectral::{project_profile, DecayModel, GaussianProfile, ModalDecomposition};
use ffheat_core::{Error, FieldSnapshot};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FfheatStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    Config = 4,
    Parse = 5,
    Singularity = 6,
    StepSize = 7,
    Blowup = 8,
    Usage = 9,
    UndefinedWidth = 10,
    Io = 11,
    BufferTooSmall = 12,
    Panic = 13,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FfheatClock {
    Standard = 0,
    FastForward = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FfheatShape {
    Cosine = 0,
    Constant = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FfheatBasis {
    Normalized = 0,
    Raw = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FfheatDecayModel {
    Literal = 0,
    Integrated = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FfheatThetaExponent {
    Epsilon = 0,
    Velocity = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FfheatMode {
    Standard = 0,
    FastForward = 1,
    Both = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FfheatSolver {
    Series = 0,
    Grid = 1,
    Both = 2,
}

/// Validated wall schedule.
pub struct FfheatSchedule {
    inner: ScheduleConfig,
}

/// Initial profile projected onto the sine modes of the initial box, bound
/// to a schedule and series options.
pub struct FfheatModel {
    md: ModalDecomposition,
    sched: ScheduleConfig,
    opts: SeriesOptions,
}

/// Resolved run configuration.
pub struct FfheatConfig {
    inner: RunConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

enum Failure {
    Core(Error),
    Null(&'static str),
    Argument(String),
    Buffer { needed: usize, got: usize },
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn status(&self) -> FfheatStatus {
        match self {
            Failure::Null(_) => FfheatStatus::NullPointer,
            Failure::Argument(_) => FfheatStatus::InvalidArgument,
            Failure::Buffer { .. } => FfheatStatus::BufferTooSmall,
            Failure::Core(e) => match e {
                Error::Domain(_) => FfheatStatus::Domain,
                Error::Config { .. } => FfheatStatus::Config,
                Error::Parse { .. } => FfheatStatus::Parse,
                Error::Singularity { .. } => FfheatStatus::Singularity,
                Error::StepSize(_) => FfheatStatus::StepSize,
                Error::Blowup { .. } => FfheatStatus::Blowup,
                Error::Usage(_) => FfheatStatus::Usage,
                Error::UndefinedWidth => FfheatStatus::UndefinedWidth,
                Error::Io(_) => FfheatStatus::Io,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Null(what) => format!("null pointer: {what}"),
            Failure::Argument(msg) => format!("invalid argument: {msg}"),
            Failure::Buffer { needed, got } => {
                format!("output buffer holds {got} values, {needed} needed")
            }
        }
    }
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> FfheatStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            FfheatStatus::Ok
        }
        Ok(Err(failure)) => {
            set_last_error(failure.message());
            failure.status()
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            FfheatStatus::Panic
        }
    }
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    out.write(value);
    Ok(())
}

unsafe fn borrow<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn c_str<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Argument(format!("{what} is not valid UTF-8")))
}

fn clock_from(v: u32) -> Result<Clock, Failure> {
    match v {
        x if x == FfheatClock::Standard as u32 => Ok(Clock::Standard),
        x if x == FfheatClock::FastForward as u32 => Ok(Clock::FastForward),
        _ => Err(Failure::Argument(format!("clock {v}"))),
    }
}

fn shape_from(v: u32) -> Result<AlphaShape, Failure> {
    match v {
        x if x == FfheatShape::Cosine as u32 => Ok(AlphaShape::Cosine),
        x if x == FfheatShape::Constant as u32 => Ok(AlphaShape::Constant),
        _ => Err(Failure::Argument(format!("shape {v}"))),
    }
}

fn basis_from(v: u32) -> Result<BasisNormalization, Failure> {
    match v {
        x if x == FfheatBasis::Normalized as u32 => Ok(BasisNormalization::Normalized),
        x if x == FfheatBasis::Raw as u32 => Ok(BasisNormalization::Raw),
        _ => Err(Failure::Argument(format!("basis {v}"))),
    }
}

fn decay_from(v: u32) -> Result<DecayModel, Failure> {
    match v {
        x if x == FfheatDecayModel::Literal as u32 => Ok(DecayModel::Literal),
        x if x == FfheatDecayModel::Integrated as u32 => Ok(DecayModel::Integrated),
        _ => Err(Failure::Argument(format!("decay model {v}"))),
    }
}

fn exponent_from(v: u32) -> Result<ThetaExponent, Failure> {
    match v {
        x if x == FfheatThetaExponent::Epsilon as u32 => Ok(ThetaExponent::Epsilon),
        x if x == FfheatThetaExponent::Velocity as u32 => Ok(ThetaExponent::Velocity),
        _ => Err(Failure::Argument(format!("theta exponent {v}"))),
    }
}

fn mode_from(v: u32) -> Result<ModeSelection, Failure> {
    match v {
        x if x == FfheatMode::Standard as u32 => Ok(ModeSelection::Standard),
        x if x == FfheatMode::FastForward as u32 => Ok(ModeSelection::FastForward),
        x if x == FfheatMode::Both as u32 => Ok(ModeSelection::Both),
        _ => Err(Failure::Argument(format!("mode {v}"))),
    }
}

fn solver_from(v: u32) -> Result<SolverSelection, Failure> {
    match v {
        x if x == FfheatSolver::Series as u32 => Ok(SolverSelection::Series),
        x if x == FfheatSolver::Grid as u32 => Ok(SolverSelection::Grid),
        x if x == FfheatSolver::Both as u32 => Ok(SolverSelection::Both),
        _ => Err(Failure::Argument(format!("solver {v}"))),
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ffheat_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL after a
/// successful call. Valid until the next call into the library.
#[no_mangle]
pub extern "C" fn ffheat_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

// ---- schedule ----

#[no_mangle]
pub unsafe extern "C" fn ffheat_schedule_new(
    l0: f64,
    epsilon: f64,
    alpha_bar: f64,
    t_standard: f64,
    shape: u32,
    out: *mut *mut FfheatSchedule,
) -> FfheatStatus {
    guard(|| {
        let inner = ScheduleConfig::new(l0, epsilon, alpha_bar, t_standard, shape_from(shape)?)?;
        put(out, Box::into_raw(Box::new(FfheatSchedule { inner })))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ffheat_schedule_free(schedule: *mut FfheatSchedule) {
    if !schedule.is_null() {
        drop(Box::from_raw(schedule));
    }
}

#[no_mangle]
pub unsafe extern "C" fn ffheat_schedule_t_ff(
    schedule: *const FfheatSchedule,
    out: *mut f64,
) -> FfheatStatus {
    guard(|| put(out, borrow(schedule, "schedule")?.inner.t_ff()))
}

#[no_mangle]
pub unsafe extern "C" fn ffheat_schedule_alpha(
    schedule: *const FfheatSchedule,
    t: f64,
    out: *mut f64,
) -> FfheatStatus {
    guard(|| put(out, borrow(schedule, "schedule")?.inner.alpha(t)?))
}

#[no_mangle]
pub unsafe extern "C" fn ffheat_schedule_alpha_rate(
    schedule: *const FfheatSchedule,
    t: f64,
    out: *mut f64,
) -> FfheatStatus {
    guard(|| put(out, borrow(schedule, "schedule")?.inner.alpha_rate(t)?))
}

#[no_mangle]
pub unsafe extern "C" fn ffheat_schedule_advanced_time(
    schedule: *const FfheatSchedule,
    t: f64,
    out: *mut f64,
) -> FfheatStatus {
    guard(|| put(out, borrow(schedule, "schedule")?.inner.advanced_time(t)?))
}

#[no_mangle]
pub unsafe extern "C" fn ffheat_schedule_wall_position(
    schedule: *const FfheatSchedule,
    t: f64,
    clock: u32,
    out: *mut f64,
) -> FfheatStatus {
    guard(|| {
        let s = &borrow(schedule, "schedule")?.inner;
        put(out, s.wall_position(t, clock_from(clock)?)?)
    })
}

#[no_mangle]
pub unsafe extern "C" fn ffheat_schedule_wall_velocity(
    schedule: *const FfheatSchedule,
    t: f64,
    clock: u32,
    out: *mut f64,
) -> FfheatStatus {
    guard(|| {
        let s = &borrow(schedule, "schedule")?.inner;
        put(out, s.wall_velocity_on(t, clock_from(clock)?)?)
    })
}

// ---- fast-forward protocol ----

/// `∂θ/∂x` for mode `n` on a box of length `l`; `x` must be interior.
#[no_mangle]
pub unsafe extern "C" fn ffheat_theta_gradient(
    x: f64,
    l: f64,
    mode_n: u32,
    basis: u32,
    out: *mut f64,
) -> FfheatStatus {
    guard(|| put(out, theta_gradient(x, l, mode_n, basis_from(basis)?)?))
}

#[no_mangle]
pub unsafe extern "C" fn ffheat_theta(x: f64, l: f64, out: *mut f64) -> FfheatStatus {
    guard(|| put(out, theta(x, l)?))
}

#[no_mangle]
pub unsafe extern "C" fn ffheat_ff_potential(
    schedule: *const FfheatSchedule,
    x: f64,
    t: f64,
    out: *mut f64,
) -> FfheatStatus {
    guard(|| put(out, ff_potential(x, t, &borrow(schedule, "schedule")?.inner)?))
}

// ---- series model ----

/// Projects the Gaussian `exp(−(x−x0)²/σ²)/(√(2π)σ)` onto `n_max` sine
/// modes of `[0, L0]`.
#[no_mangle]
pub unsafe extern "C" fn ffheat_model_new(
    schedule: *const FfheatSchedule,
    kappa: f64,
    x0: f64,
    sigma: f64,
    n_max: usize,
    quad_points: usize,
    out: *mut *mut FfheatModel,
) -> FfheatStatus {
    guard(|| {
        let sched = borrow(schedule, "schedule")?.inner;
        let profile = GaussianProfile::new(x0, sigma, sched.l0())?;
        let md = project_profile(&profile, sched.l0(), kappa, n_max, quad_points)?;
        let model = FfheatModel {
            md,
            sched,
            opts: SeriesOptions::default(),
        };
        put(out, Box::into_raw(Box::new(model)))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ffheat_model_free(model: *mut FfheatModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

#[no_mangle]
pub unsafe extern "C" fn ffheat_model_set_decay_model(
    model: *mut FfheatModel,
    decay: u32,
) -> FfheatStatus {
    guard(|| {
        let m = model.as_mut().ok_or(Failure::Null("model"))?;
        m.opts.decay = decay_from(decay)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ffheat_model_set_theta_exponent(
    model: *mut FfheatModel,
    exponent: u32,
) -> FfheatStatus {
    guard(|| {
        let m = model.as_mut().ok_or(Failure::Null("model"))?;
        m.opts.theta_exponent = exponent_from(exponent)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ffheat_model_n_max(
    model: *const FfheatModel,
    out: *mut usize,
) -> FfheatStatus {
    guard(|| put(out, borrow(model, "model")?.md.n_max()))
}

/// Copies the sine coefficients into `coeffs[0..n_max]`.
#[no_mangle]
pub unsafe extern "C" fn ffheat_model_coefficients(
    model: *const FfheatModel,
    coeffs: *mut f64,
    len: usize,
) -> FfheatStatus {
    guard(|| {
        let c = borrow(model, "model")?.md.coeffs();
        if coeffs.is_null() {
            return Err(Failure::Null("coeffs"));
        }
        if len < c.len() {
            return Err(Failure::Buffer {
                needed: c.len(),
                got: len,
            });
        }
        ptr::copy_nonoverlapping(c.as_ptr(), coeffs, c.len());
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ffheat_model_tail_bound(
    model: *const FfheatModel,
    out: *mut f64,
) -> FfheatStatus {
    guard(|| put(out, borrow(model, "model")?.md.tail_bound()))
}

fn with_snapshot<R>(
    m: &FfheatModel,
    clock: u32,
    t: f64,
    f: impl FnOnce(&dyn FieldSnapshot) -> ffheat_core::Result<R>,
) -> Result<R, Failure> {
    Ok(match clock_from(clock)? {
        Clock::Standard => f(&m.md.snapshot_adiabatic(&m.sched, t, m.opts.decay)?)?,
        Clock::FastForward => f(&FfSeries::new(&m.md, &m.sched, t, m.opts)?)?,
    })
}

/// Field on the fixed initial box.
#[no_mangle]
pub unsafe extern "C" fn ffheat_model_eval_fixed(
    model: *const FfheatModel,
    x: f64,
    t: f64,
    out: *mut f64,
) -> FfheatStatus {
    guard(|| put(out, borrow(model, "model")?.md.snapshot_fixed(t)?.value(x)?))
}

/// Standard (`clock = 0`) or fast-forwarded (`clock = 1`) field.
#[no_mangle]
pub unsafe extern "C" fn ffheat_model_eval(
    model: *const FfheatModel,
    clock: u32,
    x: f64,
    t: f64,
    out: *mut f64,
) -> FfheatStatus {
    guard(|| {
        let m = borrow(model, "model")?;
        put(out, with_snapshot(m, clock, t, |f| f.value(x))?)
    })
}

/// Heat flux `−κ² ∂u/∂x`.
#[no_mangle]
pub unsafe extern "C" fn ffheat_model_flux(
    model: *const FfheatModel,
    clock: u32,
    x: f64,
    t: f64,
    out: *mut f64,
) -> FfheatStatus {
    guard(|| {
        let m = borrow(model, "model")?;
        let k2 = m.md.kappa() * m.md.kappa();
        put(out, with_snapshot(m, clock, t, |f| Ok(-k2 * f.gradient(x)?))?)
    })
}

/// Second central moment width of the positive part of the field.
#[no_mangle]
pub unsafe extern "C" fn ffheat_model_width(
    model: *const FfheatModel,
    clock: u32,
    t: f64,
    out: *mut f64,
) -> FfheatStatus {
    guard(|| {
        let m = borrow(model, "model")?;
        put(out, with_snapshot(m, clock, t, |f| profile_width(f))?)
    })
}

// ---- grid integrator ----

/// Integrates nodal values `initial[0..len]` (`len = M + 1`, ends forced to
/// zero) from t = 0 to `t_end` in `steps` Crank–Nicolson steps and writes
/// the final nodal values to `out[0..len]`. The fast-forward clock includes
/// the driving potential.
#[no_mangle]
pub unsafe extern "C" fn ffheat_grid_run(
    schedule: *const FfheatSchedule,
    kappa: f64,
    clock: u32,
    initial: *const f64,
    len: usize,
    t_end: f64,
    steps: usize,
    out: *mut f64,
    out_len: usize,
) -> FfheatStatus {
    guard(|| {
        let sched = borrow(schedule, "schedule")?.inner;
        if initial.is_null() {
            return Err(Failure::Null("initial"));
        }
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        if out_len < len {
            return Err(Failure::Buffer {
                needed: len,
                got: out_len,
            });
        }
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Failure::Argument(format!("kappa = {kappa} must be > 0")));
        }
        let system = match clock_from(clock)? {
            Clock::Standard => GridSystem::standard(sched, kappa),
            Clock::FastForward => GridSystem::fast_forward(sched, kappa),
        };
        let values = std::slice::from_raw_parts(initial, len).to_vec();
        let start = GridField::new(values, sched.l0(), 0.0)?;
        let opts = RunOptions {
            steps,
            sample_times: vec![t_end],
        };
        let traj = integrator::run(&system, start, &opts)?;
        let last = traj.last().expect("run returns the initial state");
        ptr::copy_nonoverlapping(last.values().as_ptr(), out, len);
        Ok(())
    })
}

// ---- configuration and experiments ----

#[no_mangle]
pub unsafe extern "C" fn ffheat_config_load(
    path: *const c_char,
    out: *mut *mut FfheatConfig,
) -> FfheatStatus {
    guard(|| {
        let inner = config::load_config(c_str(path, "path")?.as_ref())?;
        put(out, Box::into_raw(Box::new(FfheatConfig { inner })))
    })
}

/// Parses config text in the `key=value` format.
#[no_mangle]
pub unsafe extern "C" fn ffheat_config_parse(
    text: *const c_char,
    out: *mut *mut FfheatConfig,
) -> FfheatStatus {
    guard(|| {
        let inner = config::parse_config(c_str(text, "text")?)?;
        put(out, Box::into_raw(Box::new(FfheatConfig { inner })))
    })
}

/// Built-in preset `fig1`, `fig2` or `fig3`.
#[no_mangle]
pub unsafe extern "C" fn ffheat_config_preset(
    name: *const c_char,
    out: *mut *mut FfheatConfig,
) -> FfheatStatus {
    guard(|| {
        let inner = config::preset(c_str(name, "name")?)?;
        put(out, Box::into_raw(Box::new(FfheatConfig { inner })))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ffheat_config_free(cfg: *mut FfheatConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

#[no_mangle]
pub unsafe extern "C" fn ffheat_config_set_mode(cfg: *mut FfheatConfig, mode: u32) -> FfheatStatus {
    guard(|| {
        let c = cfg.as_mut().ok_or(Failure::Null("cfg"))?;
        c.inner.set_mode(mode_from(mode)?);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ffheat_config_set_solver(
    cfg: *mut FfheatConfig,
    solver: u32,
) -> FfheatStatus {
    guard(|| {
        let c = cfg.as_mut().ok_or(Failure::Null("cfg"))?;
        c.inner.set_solver(solver_from(solver)?);
        Ok(())
    })
}

/// Runs the experiment and writes its CSV files and `manifest.txt` into
/// `out_dir`. The manifest is written on failure as well.
#[no_mangle]
pub unsafe extern "C" fn ffheat_run_experiment(
    cfg: *const FfheatConfig,
    out_dir: *const c_char,
) -> FfheatStatus {
    guard(|| {
        let mut run = borrow(cfg, "cfg")?.inner.clone();
        let dir = PathBuf::from(c_str(out_dir, "out_dir")?);
        run.set_output_dir(dir.clone());
        run_experiment(&run, &dir)?;
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn message() -> String {
        unsafe { CStr::from_ptr(ffheat_last_error_message()) }
            .to_string_lossy()
            .into_owned()
    }

    #[test]
    fn panics_become_status_codes() {
        let st = guard(|| panic!("boom"));
        assert_eq!(st, FfheatStatus::Panic);
        assert_eq!(message(), "panic: boom");
        assert_eq!(guard(|| Ok(())), FfheatStatus::Ok);
        assert!(ffheat_last_error_message().is_null());
    }

    #[test]
    fn core_errors_keep_their_kind() {
        let cases = [
            (Error::Blowup { step: 3, t: 0.5 }, FfheatStatus::Blowup),
            (Error::UndefinedWidth, FfheatStatus::UndefinedWidth),
            (Error::Singularity { x: 5.0 }, FfheatStatus::Singularity),
            (Error::Usage("x".into()), FfheatStatus::Usage),
        ];
        for (err, status) in cases {
            let text = err.to_string();
            assert_eq!(guard(|| Err(err.into())), status);
            assert_eq!(message(), text);
        }
    }

    #[test]
    fn interior_nul_is_replaced() {
        guard(|| Err(Failure::Argument("a\0b".into())));
        assert_eq!(message(), "invalid argument: a b");
    }

    #[test]
    fn enum_values_round_trip() {
        assert_eq!(clock_from(FfheatClock::FastForward as u32).ok(), Some(Clock::FastForward));
        assert_eq!(mode_from(FfheatMode::Both as u32).ok(), Some(ModeSelection::Both));
        assert!(solver_from(3).is_err());
        assert!(decay_from(2).is_err());
    }
}
