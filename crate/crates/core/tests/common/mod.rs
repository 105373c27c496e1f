//! Reference computations for integration tests. Nothing here calls into the
//! crate's own quadrature or closed forms.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Adaptive Simpson with Richardson correction.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Gauss–Legendre nodes and weights on [-1, 1], Newton on the three-term
/// recurrence from Chebyshev guesses.
pub fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Composite Gauss–Legendre for a complex integrand of a real variable.
pub fn integrate_complex<F: Fn(f64) -> Complex64>(
    rule: &(Vec<f64>, Vec<f64>),
    a: f64,
    b: f64,
    panels: usize,
    f: F,
) -> Complex64 {
    let h = (b - a) / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let lo = a + h * p as f64;
        for (x, w) in rule.0.iter().zip(&rule.1) {
            acc += f(lo + 0.5 * h * (x + 1.0)) * (0.5 * h * w);
        }
    }
    acc
}

/// `−(1/u²) ∂_L ∫₀ˣ u² dx′` for the mode `u = √(2/L) sin(nπx/L)`, by
/// quadrature in x and a complex step in L.
pub fn theta_gradient_oracle(rule: &(Vec<f64>, Vec<f64>), x: f64, l: f64, n: u32) -> f64 {
    let k = n as f64 * PI;
    let u2 = |xp: f64, l: Complex64| {
        let s = (Complex64::new(k * xp, 0.0) / l).sin();
        Complex64::new(2.0, 0.0) / l * s * s
    };
    let h = 1e-30;
    let lc = Complex64::new(l, h);
    let panels = n as usize / 2 + 2;
    let d_l = integrate_complex(rule, 0.0, x, panels, |xp| u2(xp, lc)).im / h;
    -d_l / u2(x, Complex64::new(l, 0.0)).re
}

/// Cosine magnification schedule written out directly.
pub fn alpha_cosine(alpha_bar: f64, t_ff: f64, t: f64) -> f64 {
    alpha_bar - (alpha_bar - 1.0) * (2.0 * PI * t / t_ff).cos()
}

pub fn alpha_cosine_rate(alpha_bar: f64, t_ff: f64, t: f64) -> f64 {
    (alpha_bar - 1.0) * (2.0 * PI / t_ff) * (2.0 * PI * t / t_ff).sin()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
