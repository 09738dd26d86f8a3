//! Sampling along families of parallel lines.

use rayon::prelude::*;

use crate::annihilator::{build_annihilator_1d, lift_to_2d, Annihilator1D, AnnihilatorOptions, Lift2D};
use crate::error::{invalid, Error, Result};
use crate::frame::{bound_trend_with, TrendTable};
use crate::geometry::{Rect, Window};
use crate::points::{Direction, LineFamily, Segment};
use crate::series::GaussSeriesFunction;

pub const DEFAULT_LINE_STEP: f64 = 0.05;
const REFINE_TOL: f64 = 1e-6;
const STEP_FLOOR: f64 = 1e-3;

/// A line family restricted to a rectangle.
#[derive(Debug, Clone)]
pub struct TrajectoryWindowed {
    pub family: LineFamily,
    pub window: Rect,
    pub step: f64,
    segments: Vec<Segment>,
}

impl TrajectoryWindowed {
    pub fn new(family: LineFamily, window: Rect) -> Result<Self> {
        Self::with_step(family, window, DEFAULT_LINE_STEP)
    }

    pub fn with_step(family: LineFamily, window: Rect, step: f64) -> Result<Self> {
        if window.is_empty() || !window.x.len().is_finite() || !window.y.len().is_finite() {
            return invalid("trajectory window must be a finite nonempty box");
        }
        if !(step > 0.0) {
            return invalid("quadrature step must be positive");
        }
        let segments = family.segments(&window);
        Ok(TrajectoryWindowed { family, window, step, segments })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Total arc length inside the window.
    pub fn length(&self) -> f64 {
        self.segments.iter().map(|s| s.t1 - s.t0).sum()
    }
}

fn simpson<F: Fn(f64) -> f64>(f: &F, t0: f64, t1: f64, h: f64) -> f64 {
    let mut n = ((t1 - t0) / h).ceil() as usize;
    n = n.max(2);
    if n % 2 == 1 {
        n += 1;
    }
    let dt = (t1 - t0) / n as f64;
    let mut s = f(t0) + f(t1);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(t0 + i as f64 * dt);
    }
    s * dt / 3.0
}

fn integral_at_step(f: &GaussSeriesFunction, t: &TrajectoryWindowed, p: f64, h: f64) -> f64 {
    t.segments
        .par_iter()
        .map(|seg| {
            let g = |s: f64| {
                let x = t.family.point(seg.gamma, s);
                f.at2(x[0], x[1]).norm().powf(p)
            };
            simpson(&g, seg.t0, seg.t1, h)
        })
        .sum()
}

/// `int |f|^p ds` over the trajectory, by composite Simpson quadrature with step halving.
pub fn line_integral_p(f: &GaussSeriesFunction, t: &TrajectoryWindowed, p: f64) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return invalid("p must lie in [1, inf)");
    }
    if f.dim() != 2 {
        return invalid("line integrals need a function of two variables");
    }
    let mut h = t.step;
    let mut prev = integral_at_step(f, t, p, h);
    loop {
        let h2 = h / 2.0;
        if h2 < STEP_FLOOR {
            return Err(Error::Accuracy(format!("step floor reached: integral {prev:e} at step {h}, refinement did not settle")));
        }
        let cur = integral_at_step(f, t, p, h2);
        if (cur - prev).abs() <= REFINE_TOL * cur.abs() {
            return Ok(cur);
        }
        if h2 / 2.0 < STEP_FLOOR {
            return Err(Error::Accuracy(format!("step floor reached: {prev:e} at step {h}, {cur:e} at step {h2}")));
        }
        prev = cur;
        h = h2;
    }
}

/// Default cube size `min(0.25, 0.3 sep)` for offsets with separation `sep`.
pub fn default_delta(t: &TrajectoryWindowed) -> f64 {
    let sep = t.family.offsets().separation_constant();
    (0.9 * sep / 3.0).min(0.25)
}

/// One point per slanted cube of side `delta` met by the trajectory.
///
/// Cubes are `{gamma v + t v_perp}` with `gamma` in `[delta i, delta (i+1))` and `t` in
/// `[delta k, delta (k+1))`; the chosen point is the one nearest the cube center,
/// `gamma v + delta (k + 1/2) v_perp`. Since `delta < sep/3`, no cube meets two lines and
/// the output is `delta`-separated without dropping cubes.
pub fn discretize(t: &TrajectoryWindowed, delta: f64) -> Result<Vec<[f64; 2]>> {
    let sep = t.family.offsets().separation_constant();
    if !(delta > 0.0 && delta < sep / 3.0) {
        return invalid(format!("delta = {delta} must satisfy 0 < delta < sep/3 = {}", sep / 3.0));
    }
    let mut out = Vec::new();
    for seg in &t.segments {
        let k0 = (seg.t0 / delta - 0.5).ceil() as i64;
        let k1 = (seg.t1 / delta - 0.5).floor() as i64;
        for k in k0..=k1 {
            let x = t.family.point(seg.gamma, delta * (k as f64 + 0.5));
            if t.window.contains(x) {
                out.push(x);
            }
        }
    }
    Ok(out)
}

/// Bounds of the discretized trajectory for windows `[-N, N]^2`, samples taken in
/// `[-N-margin, N+margin]^2`.
pub fn st_bound_trend(family: &LineFamily, a: f64, windows: &[i64], delta: Option<f64>, margin: i64) -> Result<TrendTable> {
    if windows.is_empty() || windows.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition("window sizes must be increasing".into()));
    }
    let mut samples = Vec::new();
    for &n in windows {
        let t = TrajectoryWindowed::new(family.clone(), Rect::square((n + margin) as f64))?;
        let d = delta.unwrap_or_else(|| default_delta(&t));
        samples.push(discretize(&t, d)?);
    }
    bound_trend_with(2, a, 1.0, windows, margin, |n| {
        let i = windows.iter().position(|&m| m == n).expect("known window");
        samples[i].clone()
    })
}

/// A lifted annihilator for a rational-slope family.
#[derive(Debug, Clone)]
pub struct TrajectoryAnnihilator {
    pub base: Annihilator1D,
    pub lift: Lift2D,
    pub d_plus: f64,
    pub sigma: f64,
    pub window: Rect,
    pub sup: f64,
    pub residual_max: f64,
    pub samples: usize,
}

impl TrajectoryAnnihilator {
    pub fn residual_relative(&self) -> f64 {
        self.residual_max / self.sup
    }
}

/// Nonzero `f` vanishing on `{x : x . v in Gamma}` for `v = (p, q)/sigma`, scanned on
/// `window` at arc-length step 0.01.
pub fn annihilator_on_trajectory(family: &LineFamily, a: f64, window: Rect) -> Result<TrajectoryAnnihilator> {
    let (p, q) = match family.direction() {
        Direction::Rational { p, q } => (p, q),
        Direction::Irrational { .. } => return invalid("annihilators exist only for rational slopes"),
    };
    let sigma = ((p * p + q * q) as f64).sqrt();
    let dens = family.offsets().beurling_density(&[200.0], None, None)?;
    let d_plus = dens.upper;
    if d_plus * sigma >= 1.0 {
        return Err(Error::InfeasibleDensity(format!("D+ * sigma = {:.6} is not below 1", d_plus * sigma)));
    }
    // the lift vanishes where (p z + q w) / sigma^2 lies in the zero set of g
    let target = family.offsets().affine(1.0 / sigma, 0.0)?;
    let reach = (window.x.lo.abs().max(window.x.hi.abs()) * p.abs() as f64 + window.y.lo.abs().max(window.y.hi.abs()) * q.abs() as f64) / (sigma * sigma);
    let k = ((1.5 * reach).ceil() as i64 + 2).max(12);
    let base = build_annihilator_1d(&target, a, (-k, k), AnnihilatorOptions { scale: sigma, ..Default::default() })?;
    let lift = lift_to_2d(&base.function, p, q, a)?;
    let sup = lift.series.sup_norm_estimate(&Window::D2(window), 0.05)?;
    let scan = TrajectoryWindowed::with_step(family.clone(), window, 0.01)?;
    let mut residual_max = 0.0f64;
    let mut samples = 0;
    for seg in scan.segments() {
        let n = ((seg.t1 - seg.t0) / scan.step).ceil().max(1.0) as usize;
        for i in 0..=n {
            let x = family.point(seg.gamma, seg.t0 + (seg.t1 - seg.t0) * i as f64 / n as f64);
            residual_max = residual_max.max(lift.series.at2(x[0], x[1]).norm());
            samples += 1;
        }
    }
    Ok(TrajectoryAnnihilator { base, lift, d_plus, sigma, window, sup, residual_max, samples })
}
