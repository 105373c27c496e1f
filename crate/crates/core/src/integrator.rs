//! Direct grid integration of the (fast-forwarded) heat equation on the
//! moving box, independent of the series construction.
//!
//! The box `[0, L(t)]` is mapped to `ξ = x/L ∈ [0, 1]`. For
//! `w(ξ, t) = u(ξL, t)` the equation `∂u/∂t = κ²∂²u/∂x² + V u` becomes
//!
//! `∂w/∂t = (κ²/L²) ∂²w/∂ξ² + ξ (L̇/L) ∂w/∂ξ + V(ξL, t) w`,
//!
//! advanced by Crank–Nicolson with coefficients frozen at the half step.

use crate::error::{Error, Result};
use crate::fastforward::ff_potential;
use crate::field::FieldSnapshot;
use crate::schedule::{Clock, ScheduleConfig};

pub const MIN_INTERVALS: usize = 16;
pub const DEFAULT_INTERVALS: usize = 512;
/// Default steps per fast-forward window.
pub const DEFAULT_STEPS_PER_WINDOW: usize = 4096;

/// Centered advection stays oscillation-free below this cell Péclet number.
const MAX_CELL_PECLET: f64 = 2.0;

/// Temperature on `M + 1` uniform nodes of the mapped coordinate ξ.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    values: Vec<f64>,
    wall: f64,
    t: f64,
    step_index: usize,
}

impl GridField {
    /// Wraps nodal values; the end values are forced to zero.
    pub fn new(mut values: Vec<f64>, wall: f64, t: f64) -> Result<Self> {
        if values.len() < MIN_INTERVALS + 1 {
            return Err(Error::config("numerics.M", format!("M ≥ {MIN_INTERVALS}")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("grid values must be finite"));
        }
        if !(wall.is_finite() && wall > 0.0) {
            return Err(Error::domain(format!("wall {wall} must be > 0")));
        }
        let m = values.len() - 1;
        values[0] = 0.0;
        values[m] = 0.0;
        Ok(Self {
            values,
            wall,
            t,
            step_index: 0,
        })
    }

    /// Samples `field` at the `M + 1` mapped nodes.
    pub fn sample<F: FieldSnapshot + ?Sized>(field: &F, m: usize) -> Result<Self> {
        let wall = field.wall();
        let values = (0..=m)
            .map(|j| field.value(wall * j as f64 / m as f64))
            .collect::<Result<Vec<_>>>()?;
        Self::new(values, wall, field.time())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn m(&self) -> usize {
        self.values.len() - 1
    }

    pub fn wall(&self) -> f64 {
        self.wall
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    /// Number of steps taken to reach this state.
    pub fn step_index(&self) -> usize {
        self.step_index
    }

    pub fn xi(&self, j: usize) -> f64 {
        j as f64 / self.m() as f64
    }

    /// Physical node positions `ξ_j L`.
    pub fn positions(&self) -> Vec<f64> {
        (0..=self.m()).map(|j| self.xi(j) * self.wall).collect()
    }
}

/// The equation being integrated: which wall trajectory drives the box
/// and whether the fast-forward potential is switched on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSystem {
    pub sched: ScheduleConfig,
    pub kappa: f64,
    pub clock: Clock,
    pub with_potential: bool,
}

impl GridSystem {
    /// Fast-forwarded equation: advanced wall plus `V_FF`.
    pub fn fast_forward(sched: ScheduleConfig, kappa: f64) -> Self {
        Self {
            sched,
            kappa,
            clock: Clock::FastForward,
            with_potential: true,
        }
    }

    /// Plain heat equation on the standard wall `L0 + εt`.
    pub fn standard(sched: ScheduleConfig, kappa: f64) -> Self {
        Self {
            sched,
            kappa,
            clock: Clock::Standard,
            with_potential: false,
        }
    }

    pub fn wall(&self, t: f64) -> Result<f64> {
        self.sched.wall_position(t, self.clock)
    }
}

/// Coefficients of the mapped equation at one instant, on an `M`-interval grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PdeCoefficients {
    /// `κ²/L²`
    pub diffusion: f64,
    /// `L̇/L`; the advection coefficient at node ξ is `ξ · advection_slope`.
    pub advection_slope: f64,
    /// `V(ξ_j L, t)` at each node.
    pub reaction: Vec<f64>,
}

impl PdeCoefficients {
    pub fn advection(&self, xi: f64) -> f64 {
        xi * self.advection_slope
    }
}

pub fn transform_pde_coefficients(system: &GridSystem, t: f64, m: usize) -> Result<PdeCoefficients> {
    let l = system.wall(t)?;
    let l_dot = system.sched.wall_velocity_on(t, system.clock)?;
    let reaction = if system.with_potential {
        (0..=m)
            .map(|j| ff_potential(l * j as f64 / m as f64, t, &system.sched))
            .collect::<Result<Vec<_>>>()?
    } else {
        vec![0.0; m + 1]
    };
    Ok(PdeCoefficients {
        diffusion: system.kappa * system.kappa / (l * l),
        advection_slope: l_dot / l,
        reaction,
    })
}

/// Advances `state` by `dt`.
pub fn step(state: &GridField, dt: f64, system: &GridSystem) -> Result<GridField> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::StepSize(format!("dt = {dt} must be > 0")));
    }
    step_to(state, state.t + dt, system)
}

/// Advances `state` to exactly `t_next`.
pub fn step_to(state: &GridField, t_next: f64, system: &GridSystem) -> Result<GridField> {
    let dt = t_next - state.t;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::StepSize(format!("dt = {dt} must be > 0")));
    }
    let m = state.m();
    let h = 1.0 / m as f64;
    let coef = transform_pde_coefficients(system, state.t + 0.5 * dt, m)?;
    let half = 0.5 * dt;
    let d = coef.diffusion / (h * h);

    let n = m - 1;
    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let w = &state.values;
    for j in 1..m {
        let a = coef.advection(j as f64 * h) / (2.0 * h);
        let lo = d - a;
        let di = -2.0 * d + coef.reaction[j];
        let up = d + a;
        let i = j - 1;
        sub[i] = -half * lo;
        diag[i] = 1.0 - half * di;
        sup[i] = -half * up;
        rhs[i] = w[j] + half * (lo * w[j - 1] + di * w[j] + up * w[j + 1]);
        if diag[i].abs() < sub[i].abs() + sup[i].abs() {
            return Err(Error::StepSize(format!(
                "dt = {dt} makes the implicit system lose diagonal dominance at node {j}"
            )));
        }
    }
    let interior = solve_tridiagonal(&sub, &diag, &sup, &rhs)?;

    let mut values = Vec::with_capacity(m + 1);
    values.push(0.0);
    values.extend_from_slice(&interior);
    values.push(0.0);
    let step_index = state.step_index + 1;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Blowup { step: step_index, t: t_next });
    }
    Ok(GridField {
        values,
        wall: system.wall(t_next)?,
        t: t_next,
        step_index,
    })
}

/// Thomas algorithm; `sub[0]` and `sup[n-1]` are ignored.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if sub.len() != n || sup.len() != n || rhs.len() != n {
        return Err(Error::Usage("tridiagonal bands of unequal length".into()));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut pivot = diag[0];
    for i in 0..n {
        if i > 0 {
            pivot = diag[i] - sub[i] * c[i - 1];
        }
        if pivot.abs() <= f64::MIN_POSITIVE || !pivot.is_finite() {
            return Err(Error::StepSize(format!("zero pivot in tridiagonal solve at row {i}")));
        }
        c[i] = sup[i] / pivot;
        let prev = if i > 0 { sub[i] * x[i - 1] } else { 0.0 };
        x[i] = (rhs[i] - prev) / pivot;
    }
    for i in (0..n.saturating_sub(1)).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

/// Options for [`run`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// Number of steps the window `[0, last sample]` is split into; the
    /// step is shortened between samples so each sample time is hit exactly.
    pub steps: usize,
    /// Increasing snapshot times. Zero is allowed and maps to the initial field.
    pub sample_times: Vec<f64>,
}

/// Largest cell Péclet number `|ξ L̇/L| h / (κ²/L²)` over the window.
pub fn max_cell_peclet(system: &GridSystem, m: usize, t_end: f64) -> Result<f64> {
    let probes = 256;
    let h = 1.0 / m as f64;
    let mut worst = 0.0f64;
    for i in 0..=probes {
        let t = t_end * i as f64 / probes as f64;
        let l = system.wall(t)?;
        let l_dot = system.sched.wall_velocity_on(t, system.clock)?;
        worst = worst.max((l_dot * l).abs() * h / (system.kappa * system.kappa));
    }
    Ok(worst)
}

/// Integrates from `initial`, returning the initial field followed by one
/// snapshot per positive sample time.
pub fn run(system: &GridSystem, initial: GridField, opts: &RunOptions) -> Result<Vec<GridField>> {
    let mut trajectory = vec![initial];
    if opts.steps == 0 || opts.sample_times.is_empty() {
        return Ok(trajectory);
    }
    let t0 = trajectory[0].t;
    let mut prev = t0;
    for &t in &opts.sample_times {
        if !(t.is_finite() && t >= prev) {
            return Err(Error::Usage(format!("sample times must increase from t0 = {t0}")));
        }
        prev = t;
    }
    let t_end = prev;
    if let Some(h) = system.sched.horizon(system.clock) {
        if t_end > h * (1.0 + 1e-12) {
            return Err(Error::domain(format!("sample time {t_end} beyond horizon {h}")));
        }
    }
    if t_end <= t0 {
        return Ok(trajectory);
    }
    let m = trajectory[0].m();
    let peclet = max_cell_peclet(system, m, t_end)?;
    if peclet > MAX_CELL_PECLET {
        return Err(Error::config(
            "numerics.M",
            format!("cell Péclet number {peclet:.3} exceeds {MAX_CELL_PECLET}; refine the grid"),
        ));
    }
    let dt_nominal = (t_end - t0) / opts.steps as f64;
    let mut state = trajectory[0].clone();
    for &target in &opts.sample_times {
        if target <= state.t {
            continue;
        }
        let start = state.t;
        let substeps = (((target - start) / dt_nominal) - 1e-9).ceil().max(1.0) as usize;
        let dt = (target - start) / substeps as f64;
        for k in 1..=substeps {
            let t_next = if k == substeps { target } else { start + dt * k as f64 };
            state = step_to(&state, t_next, system)?;
        }
        trajectory.push(state.clone());
    }
    Ok(trajectory)
}
