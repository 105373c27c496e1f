//! Heat flux, profile width and field-comparison diagnostics.
//!
//! Heat flux follows Fourier's law with the κ² diffusion convention,
//! `J = −κ² ∂u/∂x`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::FieldSnapshot;
use crate::integrator::GridField;
use crate::quadrature::{GaussLegendre, PANEL_ORDER};

const WIDTH_PANELS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxSource {
    SeriesStandard,
    SeriesFf,
    Grid,
}

impl fmt::Display for FluxSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FluxSource::SeriesStandard => "series_standard",
            FluxSource::SeriesFf => "series_ff",
            FluxSource::Grid => "grid",
        })
    }
}

/// Flux samples at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxField {
    pub positions: Vec<f64>,
    pub values: Vec<f64>,
    pub t: f64,
    pub source: FluxSource,
}

fn check_positions(xs: &[f64], wall: f64) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::domain("empty x-grid"));
    }
    if xs.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::domain("x-grid must be strictly increasing"));
    }
    let slack = 1e-12 * wall;
    if xs[0] < -slack || xs[xs.len() - 1] > wall + slack {
        return Err(Error::domain(format!("x-grid leaves the box [0, {wall}]")));
    }
    Ok(())
}

/// Flux of a series field, differentiated term by term.
pub fn heat_flux<F: FieldSnapshot + ?Sized>(
    field: &F,
    xs: &[f64],
    kappa: f64,
    source: FluxSource,
) -> Result<FluxField> {
    check_positions(xs, field.wall())?;
    let k2 = kappa * kappa;
    let values = xs
        .iter()
        .map(|&x| Ok(-k2 * field.gradient(x)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(FluxField {
        positions: xs.to_vec(),
        values,
        t: field.time(),
        source,
    })
}

/// Flux of a grid field: fourth-order differences, centered in the
/// interior and one-sided in the two node layers next to each wall.
pub fn grid_flux(grid: &GridField, kappa: f64) -> Result<FluxField> {
    let w = grid.values();
    let m = grid.m();
    if m < 4 {
        return Err(Error::domain("grid too small for fourth-order differences"));
    }
    let dx = grid.wall() / m as f64;
    let c = -kappa * kappa / (12.0 * dx);
    let mut values = vec![0.0; m + 1];
    values[0] = c * (-25.0 * w[0] + 48.0 * w[1] - 36.0 * w[2] + 16.0 * w[3] - 3.0 * w[4]);
    values[1] = c * (-3.0 * w[0] - 10.0 * w[1] + 18.0 * w[2] - 6.0 * w[3] + w[4]);
    for j in 2..m - 1 {
        values[j] = c * (-w[j + 2] + 8.0 * w[j + 1] - 8.0 * w[j - 1] + w[j - 2]);
    }
    values[m - 1] = c * (3.0 * w[m] + 10.0 * w[m - 1] - 18.0 * w[m - 2] + 6.0 * w[m - 3] - w[m - 4]);
    values[m] = c * (25.0 * w[m] - 48.0 * w[m - 1] + 36.0 * w[m - 2] - 16.0 * w[m - 3] + 3.0 * w[m - 4]);
    Ok(FluxField {
        positions: grid.positions(),
        values,
        t: grid.time(),
        source: FluxSource::Grid,
    })
}

fn width_from_moments(mass: f64, second: f64) -> Result<f64> {
    if !(mass > 0.0) || !mass.is_finite() {
        return Err(Error::UndefinedWidth);
    }
    Ok((second / mass).max(0.0).sqrt())
}

/// Root second central moment of `max(u, 0)` over the current box.
pub fn profile_width<F: FieldSnapshot + ?Sized>(field: &F) -> Result<f64> {
    let rule = GaussLegendre::new(PANEL_ORDER);
    let pts = rule.composite_points(0.0, field.wall(), WIDTH_PANELS);
    let samples = pts
        .into_iter()
        .map(|(x, w)| Ok((x, w * field.value(x)?.max(0.0))))
        .collect::<Result<Vec<_>>>()?;
    let mass: f64 = samples.iter().map(|(_, wu)| wu).sum();
    if !(mass > 0.0) {
        return Err(Error::UndefinedWidth);
    }
    let mean = samples.iter().map(|(x, wu)| x * wu).sum::<f64>() / mass;
    let second: f64 = samples.iter().map(|(x, wu)| (x - mean).powi(2) * wu).sum();
    width_from_moments(mass, second)
}

/// Trapezoidal version of [`profile_width`] for nodal samples.
pub fn profile_width_samples(xs: &[f64], us: &[f64]) -> Result<f64> {
    if xs.len() != us.len() || xs.len() < 2 {
        return Err(Error::Usage("width needs ≥ 2 matching samples".into()));
    }
    let trap = |g: &dyn Fn(usize) -> f64| -> f64 {
        xs.windows(2)
            .enumerate()
            .map(|(i, w)| 0.5 * (w[1] - w[0]) * (g(i) + g(i + 1)))
            .sum()
    };
    let clip = |i: usize| us[i].max(0.0);
    let mass = trap(&clip);
    if !(mass > 0.0) {
        return Err(Error::UndefinedWidth);
    }
    let mean = trap(&|i| xs[i] * clip(i)) / mass;
    let second = trap(&|i| (xs[i] - mean).powi(2) * clip(i));
    width_from_moments(mass, second)
}

/// Field values on a sample grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    pub positions: Vec<f64>,
    pub values: Vec<f64>,
}

impl Samples {
    pub fn from_grid(grid: &GridField) -> Self {
        Self {
            positions: grid.positions(),
            values: grid.values().to_vec(),
        }
    }

    pub fn from_field<F: FieldSnapshot + ?Sized>(field: &F, xs: &[f64]) -> Result<Self> {
        Ok(Self {
            positions: xs.to_vec(),
            values: xs.iter().map(|&x| field.value(x)).collect::<Result<_>>()?,
        })
    }

    /// Every `stride`-th sample.
    pub fn every(&self, stride: usize) -> Self {
        Self {
            positions: self.positions.iter().step_by(stride).copied().collect(),
            values: self.values.iter().step_by(stride).copied().collect(),
        }
    }
}

/// Discrete norms of `a − b`; `l2 = sqrt(Δx Σ e²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub l2: f64,
    pub linf: f64,
    /// `l2 / ‖a‖₂`, or `l2` itself when `a` vanishes.
    pub rel_l2: f64,
    pub nodes: usize,
    pub dx: f64,
}

pub fn compare_fields(a: &Samples, b: &Samples) -> Result<ErrorReport> {
    let n = a.positions.len();
    if n == 0 || a.values.len() != n || b.values.len() != b.positions.len() {
        return Err(Error::Usage("malformed samples".into()));
    }
    if b.positions.len() != n {
        return Err(Error::Usage(format!("grid sizes differ: {} vs {}", n, b.positions.len())));
    }
    let span = a.positions[n - 1] - a.positions[0];
    let tol = 1e-12 * span.abs().max(1.0);
    if a.positions.iter().zip(&b.positions).any(|(p, q)| (p - q).abs() > tol) {
        return Err(Error::Usage("sample positions differ".into()));
    }
    let dx = if n > 1 { span / (n - 1) as f64 } else { 1.0 };
    let mut sq = 0.0;
    let mut ref_sq = 0.0;
    let mut linf = 0.0f64;
    for (u, v) in a.values.iter().zip(&b.values) {
        let e = u - v;
        sq += e * e;
        ref_sq += u * u;
        linf = linf.max(e.abs());
    }
    let l2 = (dx * sq).sqrt();
    let ref_l2 = (dx * ref_sq).sqrt();
    Ok(ErrorReport {
        l2,
        linf,
        rel_l2: if ref_l2 > 0.0 { l2 / ref_l2 } else { l2 },
        nodes: n,
        dx,
    })
}

/// Uniform physical positions `j·dx` inside `[0, wall]`, closed by the wall.
pub fn physical_grid(dx: f64, wall: f64) -> Vec<f64> {
    let mut xs = Vec::new();
    let mut j = 0usize;
    loop {
        let x = j as f64 * dx;
        if x >= wall * (1.0 - 1e-12) {
            break;
        }
        xs.push(x);
        j += 1;
    }
    xs.push(wall);
    xs
}

/// Sign changes of the flux over a run: along x within each snapshot and
/// along t at each position shared between snapshots. Values below
/// `rel_threshold · max|J|` are treated as zero and skipped.
pub fn sign_change_count(fields: &[FluxField], rel_threshold: f64) -> usize {
    let peak = fields
        .iter()
        .flat_map(|f| f.values.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = rel_threshold * peak;
    let count = |vals: &mut dyn Iterator<Item = f64>| -> usize {
        let mut last = 0.0f64;
        let mut n = 0;
        for v in vals {
            if v.abs() <= floor {
                continue;
            }
            if last != 0.0 && (v > 0.0) != (last > 0.0) {
                n += 1;
            }
            last = v;
        }
        n
    };
    let mut total = 0;
    let mut columns: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for f in fields {
        total += count(&mut f.values.iter().copied());
        for (x, v) in f.positions.iter().zip(&f.values) {
            columns.entry(x.to_bits()).or_default().push(*v);
        }
    }
    for col in columns.values() {
        total += count(&mut col.iter().copied());
    }
    total
}

/// Position of the largest `|J|`.
pub fn peak_flux_position(flux: &FluxField) -> Option<f64> {
    flux.positions
        .iter()
        .zip(&flux.values)
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(x, _)| *x)
}
