//! Experiment driver: runs the configured systems and solvers, writes the
//! profile and flux CSV files and the run manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::config::{RunConfig, Solver};
use crate::error::{Error, Result};
use crate::fastforward::{FfSeries, SeriesOptions};
use crate::field::FieldSnapshot;
use crate::integrator::{self, GridField, GridSystem, RunOptions, MIN_INTERVALS};
use crate::observables::{
    compare_fields, grid_flux, heat_flux, peak_flux_position, physical_grid, profile_width,
    profile_width_samples, sign_change_count, FluxField, FluxSource, Samples,
};
use crate::schedule::Clock;
use crate::spectral::{project_profile_with_tol, DecayModel, ModalDecomposition, SineSeries};

/// Fluxes below this fraction of the run's peak are ignored when counting
/// sign changes.
pub const SIGN_THRESHOLD: f64 = 1e-6;

pub const TOOL_VERSION: &str = concat!("ffheat ", env!("CARGO_PKG_VERSION"));

/// Per-(system, solver) results.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemReport {
    pub clock: Clock,
    pub solver: Solver,
    pub times: Vec<f64>,
    pub walls: Vec<f64>,
    pub widths: Vec<f64>,
    pub sign_changes: usize,
    pub peak_flux_positions: Vec<f64>,
}

/// Series-vs-grid consistency at the final sample time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Consistency {
    pub clock: Clock,
    pub t: f64,
    pub series_grid_l2: f64,
    pub series_grid_linf: f64,
    pub series_grid_rel_l2: f64,
    /// Relative L2 gap between the grid run and a half-resolution run.
    pub discretization: f64,
    /// Relative L2 gap between the literal and integrated decay models.
    pub decay_discrepancy: f64,
}

impl Consistency {
    pub fn budget(&self) -> f64 {
        self.discretization + self.decay_discrepancy
    }

    pub fn within_budget(&self) -> bool {
        self.series_grid_rel_l2 <= self.budget()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    pub tail_bound: f64,
    pub reports: Vec<SystemReport>,
    pub consistency: Vec<Consistency>,
    pub files: Vec<PathBuf>,
}

impl RunSummary {
    pub fn report(&self, clock: Clock, solver: Solver) -> Option<&SystemReport> {
        self.reports.iter().find(|r| r.clock == clock && r.solver == solver)
    }
}

/// Series snapshot of one system, boxed behind the common field trait.
pub enum SeriesSnapshot {
    Standard(SineSeries),
    FastForward(FfSeries),
}

impl SeriesSnapshot {
    pub fn new(
        md: &ModalDecomposition,
        cfg: &RunConfig,
        clock: Clock,
        t: f64,
        opts: SeriesOptions,
    ) -> Result<Self> {
        Ok(match clock {
            Clock::Standard => {
                SeriesSnapshot::Standard(md.snapshot_adiabatic(&cfg.schedule, t, opts.decay)?)
            }
            Clock::FastForward => {
                SeriesSnapshot::FastForward(FfSeries::new(md, &cfg.schedule, t, opts)?)
            }
        })
    }

    pub fn field(&self) -> &dyn FieldSnapshot {
        match self {
            SeriesSnapshot::Standard(s) => s,
            SeriesSnapshot::FastForward(s) => s,
        }
    }

    fn source(&self) -> FluxSource {
        match self {
            SeriesSnapshot::Standard(_) => FluxSource::SeriesStandard,
            SeriesSnapshot::FastForward(_) => FluxSource::SeriesFf,
        }
    }
}

pub fn project(cfg: &RunConfig) -> Result<ModalDecomposition> {
    project_profile_with_tol(
        &cfg.profile,
        cfg.schedule.l0(),
        cfg.kappa,
        cfg.numerics.n_max,
        cfg.numerics.quad_points,
        cfg.numerics.tail_tol,
    )
}

fn grid_system(cfg: &RunConfig, clock: Clock) -> GridSystem {
    match clock {
        Clock::Standard => GridSystem::standard(cfg.schedule, cfg.kappa),
        Clock::FastForward => GridSystem::fast_forward(cfg.schedule, cfg.kappa),
    }
}

/// Grid trajectory of `clock` on `m` intervals with `steps` steps, started
/// from the series field at t = 0.
pub fn grid_trajectory(
    md: &ModalDecomposition,
    cfg: &RunConfig,
    clock: Clock,
    m: usize,
    steps: usize,
) -> Result<Vec<GridField>> {
    let start = SeriesSnapshot::new(md, cfg, clock, 0.0, cfg.numerics.series_options())?;
    let initial = GridField::sample(start.field(), m)?;
    let opts = RunOptions {
        steps,
        sample_times: cfg.output.sample_times.clone(),
    };
    let mut traj = integrator::run(&grid_system(cfg, clock), initial, &opts)?;
    // the initial state is only reported when t = 0 was requested
    if cfg.output.sample_times.first() != Some(&0.0) {
        traj.remove(0);
    }
    Ok(traj)
}

/// Series snapshots at every sample time.
pub fn series_trajectory(
    md: &ModalDecomposition,
    cfg: &RunConfig,
    clock: Clock,
) -> Result<Vec<SeriesSnapshot>> {
    cfg.output
        .sample_times
        .iter()
        .map(|&t| SeriesSnapshot::new(md, cfg, clock, t, cfg.numerics.series_options()))
        .collect()
}

struct Tables {
    profile: String,
    flux: String,
}

impl Tables {
    fn new() -> Self {
        Self {
            profile: "t,x,u\n".into(),
            flux: "t,x,J\n".into(),
        }
    }

    fn push(&mut self, t: f64, xs: &[f64], us: &[f64], js: &[f64]) {
        for ((x, u), j) in xs.iter().zip(us).zip(js) {
            let _ = writeln!(self.profile, "{t},{x},{u:e}");
            let _ = writeln!(self.flux, "{t},{x},{j:e}");
        }
    }
}

fn run_series(
    md: &ModalDecomposition,
    cfg: &RunConfig,
    clock: Clock,
    tables: &mut Tables,
) -> Result<SystemReport> {
    let dx = cfg.output.dx(cfg.schedule.l0());
    let mut report = empty_report(clock, Solver::Series);
    let mut fluxes = Vec::new();
    for snap in series_trajectory(md, cfg, clock)? {
        let field = snap.field();
        let xs = physical_grid(dx, field.wall());
        let samples = Samples::from_field(field, &xs)?;
        let flux = heat_flux(field, &xs, cfg.kappa, snap.source())?;
        tables.push(field.time(), &xs, &samples.values, &flux.values);
        report.times.push(field.time());
        report.walls.push(field.wall());
        report.widths.push(profile_width(field)?);
        report.peak_flux_positions.push(peak_flux_position(&flux).unwrap_or(0.0));
        fluxes.push(flux);
    }
    report.sign_changes = sign_change_count(&fluxes, SIGN_THRESHOLD);
    Ok(report)
}

fn run_grid(
    md: &ModalDecomposition,
    cfg: &RunConfig,
    clock: Clock,
    tables: &mut Tables,
) -> Result<(SystemReport, Vec<GridField>)> {
    let traj = grid_trajectory(md, cfg, clock, cfg.numerics.m, cfg.steps())?;
    let mut report = empty_report(clock, Solver::Grid);
    let mut fluxes: Vec<FluxField> = Vec::new();
    for g in &traj {
        let flux = grid_flux(g, cfg.kappa)?;
        let xs = g.positions();
        tables.push(g.time(), &xs, g.values(), &flux.values);
        report.times.push(g.time());
        report.walls.push(g.wall());
        report.widths.push(profile_width_samples(&xs, g.values())?);
        report.peak_flux_positions.push(peak_flux_position(&flux).unwrap_or(0.0));
        fluxes.push(flux);
    }
    report.sign_changes = sign_change_count(&fluxes, SIGN_THRESHOLD);
    Ok((report, traj))
}

fn empty_report(clock: Clock, solver: Solver) -> SystemReport {
    SystemReport {
        clock,
        solver,
        times: Vec::new(),
        walls: Vec::new(),
        widths: Vec::new(),
        sign_changes: 0,
        peak_flux_positions: Vec::new(),
    }
}

/// Series-vs-grid discrepancy at the last sample time, with the budget
/// terms it is judged against.
pub fn consistency(
    md: &ModalDecomposition,
    cfg: &RunConfig,
    clock: Clock,
    fine: &GridField,
) -> Result<Consistency> {
    let t = fine.time();
    let opts = cfg.numerics.series_options();
    let xs = fine.positions();
    let grid = Samples::from_grid(fine);
    let series = Samples::from_field(SeriesSnapshot::new(md, cfg, clock, t, opts)?.field(), &xs)?;
    let sg = compare_fields(&series, &grid)?;

    let other = match opts.decay {
        DecayModel::Literal => DecayModel::Integrated,
        DecayModel::Integrated => DecayModel::Literal,
    };
    let alt = SeriesSnapshot::new(md, cfg, clock, t, SeriesOptions { decay: other, ..opts })?;
    let decay = compare_fields(&series, &Samples::from_field(alt.field(), &xs)?)?;

    let coarse_m = cfg.numerics.m / 2;
    if coarse_m < MIN_INTERVALS {
        return Err(Error::config(
            "numerics.M",
            format!("M ≥ {} when series and grid are compared", 2 * MIN_INTERVALS),
        ));
    }
    let coarse_steps = cfg.steps().div_ceil(2);
    let coarse = grid_trajectory(md, cfg, clock, coarse_m, coarse_steps)?;
    let coarse = coarse.last().ok_or_else(|| Error::Usage("empty grid trajectory".into()))?;
    let disc = compare_fields(&grid.every(2), &Samples::from_grid(coarse))?;

    Ok(Consistency {
        clock,
        t,
        series_grid_l2: sg.l2,
        series_grid_linf: sg.linf,
        series_grid_rel_l2: sg.rel_l2,
        discretization: disc.rel_l2,
        decay_discrepancy: decay.rel_l2,
    })
}

/// Runs every configured system without touching the filesystem.
pub fn compute(cfg: &RunConfig) -> Result<(RunSummary, Vec<(String, String)>)> {
    let md = project(cfg)?;
    let mut reports = Vec::new();
    let mut checks = Vec::new();
    let mut files = Vec::new();
    for clock in cfg.mode.clocks() {
        let mut fine_grid = None;
        for solver in cfg.solver.solvers() {
            let mut tables = Tables::new();
            match solver {
                Solver::Series => reports.push(run_series(&md, cfg, clock, &mut tables)?),
                Solver::Grid => {
                    let (report, traj) = run_grid(&md, cfg, clock, &mut tables)?;
                    reports.push(report);
                    fine_grid = traj.last().cloned();
                }
            }
            let tag = format!("{}_{}", clock.label(), solver.label());
            files.push((format!("profile_{tag}.csv"), tables.profile));
            files.push((format!("flux_{tag}.csv"), tables.flux));
        }
        if cfg.solver.solvers().len() == 2 {
            if let Some(fine) = fine_grid {
                checks.push(consistency(&md, cfg, clock, &fine)?);
            }
        }
    }
    Ok((
        RunSummary {
            output_dir: PathBuf::new(),
            tail_bound: md.tail_bound(),
            reports,
            consistency: checks,
            files: Vec::new(),
        },
        files,
    ))
}

fn manifest_text(
    cfg: &RunConfig,
    outcome: std::result::Result<&RunSummary, &Error>,
    seconds: f64,
) -> String {
    let mut m = String::new();
    let _ = writeln!(m, "tool={TOOL_VERSION}");
    match outcome {
        Ok(_) => {
            let _ = writeln!(m, "status=ok");
        }
        Err(e) => {
            let _ = writeln!(m, "status=error");
            let _ = writeln!(m, "error={e}");
        }
    }
    let _ = writeln!(m, "\n[config]");
    for line in cfg.resolved_lines() {
        let _ = writeln!(m, "{line}");
    }
    let _ = writeln!(m, "\n[derived]");
    let _ = writeln!(m, "T_FF={}", cfg.schedule.t_ff());
    let _ = writeln!(m, "grid.steps={}", cfg.steps());
    let _ = writeln!(m, "output.dx={}", cfg.output.dx(cfg.schedule.l0()));
    if let Ok(summary) = outcome {
        let _ = writeln!(m, "truncation_tail_bound={:e}", summary.tail_bound);
        let _ = writeln!(m, "\n[observables]");
        for r in &summary.reports {
            let tag = format!("{}.{}", r.clock.label(), r.solver.label());
            let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
            let _ = writeln!(m, "{tag}.times={}", join(&r.times));
            let _ = writeln!(m, "{tag}.walls={}", join(&r.walls));
            let _ = writeln!(m, "{tag}.widths={}", join(&r.widths));
            let _ = writeln!(m, "{tag}.peak_flux_positions={}", join(&r.peak_flux_positions));
            let _ = writeln!(m, "{tag}.flux_sign_changes={}", r.sign_changes);
        }
        if !summary.consistency.is_empty() {
            let _ = writeln!(m, "\n[consistency]");
        }
        for c in &summary.consistency {
            let tag = c.clock.label();
            let _ = writeln!(m, "{tag}.t={}", c.t);
            let _ = writeln!(m, "{tag}.series_grid.l2={:e}", c.series_grid_l2);
            let _ = writeln!(m, "{tag}.series_grid.linf={:e}", c.series_grid_linf);
            let _ = writeln!(m, "{tag}.series_grid.rel_l2={:e}", c.series_grid_rel_l2);
            let _ = writeln!(m, "{tag}.discretization_estimate.rel_l2={:e}", c.discretization);
            let _ = writeln!(m, "{tag}.decay_model_discrepancy.rel_l2={:e}", c.decay_discrepancy);
            let _ = writeln!(m, "{tag}.combined_budget={:e}", c.budget());
            let _ = writeln!(m, "{tag}.within_budget={}", c.within_budget());
        }
    }
    let _ = writeln!(m, "\n[run]");
    let _ = writeln!(m, "wall_clock_seconds={seconds:.3}");
    m
}

/// Runs the experiment and writes CSV files plus `manifest.txt` into
/// `out_dir`. The manifest is written on failure too.
pub fn run_experiment(cfg: &RunConfig, out_dir: &Path) -> Result<RunSummary> {
    let started = Instant::now();
    fs::create_dir_all(out_dir).map_err(|e| Error::Io(format!("{}: {e}", out_dir.display())))?;
    let result = compute(cfg).and_then(|(mut summary, files)| {
        for (name, body) in files {
            let path = out_dir.join(name);
            fs::write(&path, body).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            summary.files.push(path);
        }
        summary.output_dir = out_dir.to_path_buf();
        Ok(summary)
    });
    let manifest = manifest_text(cfg, result.as_ref(), started.elapsed().as_secs_f64());
    fs::write(out_dir.join("manifest.txt"), manifest)?;
    result
}
