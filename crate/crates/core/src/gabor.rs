//! Gabor frames with Gaussian windows on rational lattices, checked through
//! sampling of translated point sets: `G(g_a, Lambda x Z^2)` is a frame iff every
//! translate `-Lambda + (u, v)` with `(u, v)` in `[0, 1)^2` samples `V^2_a`.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::frame::{csv_float, estimate_bounds, FrameBoundsEstimate, SamplingMatrix};
use crate::geometry::{IndexBox, Rect};
use crate::points::{gcd, PointSet1D, SlantedConfig};

pub const DEFAULT_TRANSLATE_STEP: f64 = 0.1;

/// Which lattice a Gabor system uses.
#[derive(Debug, Clone, PartialEq)]
pub enum GaborMode {
    /// Time plane `M (c/sigma Z x d sigma Z)` with
    /// `M = [[p/(a sigma), -q/(a sigma)], [q/(b sigma), p/(b sigma)]]`, modulations `aZ x bZ`.
    DeltaAbcd { p: i64, q: i64, a: f64, b: f64, c: f64, d: f64 },
    /// `Lambda x Z^2`.
    Product(SlantedConfig),
}

/// Lattice plus window `exp(-(alpha x^2 + beta y^2))`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaborLatticeSpec {
    pub mode: GaborMode,
    pub alpha: f64,
    pub beta: f64,
}

impl GaborLatticeSpec {
    /// `beta` is set to `alpha b^2 / a^2`.
    pub fn delta_abcd(p: i64, q: i64, a: f64, b: f64, c: f64, d: f64, alpha: f64) -> Result<Self> {
        if (p == 0 && q == 0) || gcd(p, q) != 1 {
            return invalid(format!("({p},{q}) must be a coprime pair"));
        }
        for (name, v) in [("a", a), ("b", b), ("c", c), ("d", d), ("alpha", alpha)] {
            if !(v > 0.0 && v.is_finite()) {
                return invalid(format!("{name} must be positive, got {v}"));
            }
        }
        let spec = GaborLatticeSpec { mode: GaborMode::DeltaAbcd { p, q, a, b, c, d }, alpha, beta: alpha * b * b / (a * a) };
        let vol = spec.volume();
        if (vol - c * d).abs() > 1e-12 * (c * d) {
            return invalid(format!("generator volume {vol} differs from c d = {}", c * d));
        }
        Ok(spec)
    }

    /// Isotropic window `exp(-alpha |x|^2)` on `Lambda x Z^2`.
    pub fn product(config: SlantedConfig, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return invalid("alpha must be positive");
        }
        Ok(GaborLatticeSpec { mode: GaborMode::Product(config), alpha, beta: alpha })
    }

    /// Columns are the lattice generators in `(x, y, xi, eta)` coordinates; stored row-major.
    pub fn generator(&self) -> [[f64; 4]; 4] {
        let (p, q, a, b, c, d, m_a, m_b) = match &self.mode {
            GaborMode::DeltaAbcd { p, q, a, b, c, d } => (*p, *q, *a, *b, *c, *d, *a, *b),
            GaborMode::Product(cfg) => (cfg.p(), cfg.q(), 1.0, 1.0, f64::NAN, f64::NAN, 1.0, 1.0),
        };
        let s = ((p * p + q * q) as f64).sqrt();
        let (pf, qf) = (p as f64, q as f64);
        let m = [[pf / (a * s), -qf / (a * s)], [qf / (b * s), pf / (b * s)]];
        let (e1, e2) = (c / s, d * s);
        [
            [m[0][0] * e1, m[0][1] * e2, 0.0, 0.0],
            [m[1][0] * e1, m[1][1] * e2, 0.0, 0.0],
            [0.0, 0.0, m_a, 0.0],
            [0.0, 0.0, 0.0, m_b],
        ]
    }

    /// `|det|` of the generator matrix (`NaN` for non-lattice product configurations).
    pub fn volume(&self) -> f64 {
        let g = self.generator();
        let m = nalgebra::Matrix4::from_fn(|i, j| g[i][j]);
        m.determinant().abs()
    }

    pub fn generator_text(&self) -> String {
        let mut s = String::new();
        for row in self.generator() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.15e}")).collect();
            let _ = writeln!(s, "{}", cells.join(" "));
        }
        s
    }

    /// The isotropic sampling problem equivalent to this system: a configuration
    /// `Lambda` and the shape of `V^2`.
    pub fn isotropic_reduction(&self) -> Result<(SlantedConfig, f64)> {
        match &self.mode {
            GaborMode::DeltaAbcd { p, q, a, c, d, .. } => {
                let cfg = SlantedConfig::new(*p, *q, PointSet1D::progression(*c, 0.0)?, PointSet1D::progression(*d, 0.0)?)?;
                Ok((cfg, self.alpha / (a * a)))
            }
            GaborMode::Product(cfg) => {
                if (self.alpha - self.beta).abs() > 1e-15 * self.alpha {
                    return invalid("product mode needs an isotropic window");
                }
                Ok((cfg.clone(), self.alpha))
            }
        }
    }
}

/// Lattice points with all four coordinates in `[-r, r]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaLattice {
    pub points: Vec<[f64; 4]>,
    pub generator: [[f64; 4]; 4],
    pub volume: f64,
}

pub fn build_delta_lattice(spec: &GaborLatticeSpec, r: f64) -> Result<DeltaLattice> {
    if !(r > 0.0 && r.is_finite()) {
        return invalid("window half-width must be positive");
    }
    let (tp, ma, mb) = match &spec.mode {
        GaborMode::DeltaAbcd { a, b, .. } => {
            let g = spec.generator();
            let m = nalgebra::Matrix2::new(g[0][0], g[0][1], g[1][0], g[1][1]);
            let inv = m.try_inverse().expect("nonsingular generator");
            let mut lo = [f64::INFINITY; 2];
            let mut hi = [f64::NEG_INFINITY; 2];
            for cx in [-r, r] {
                for cy in [-r, r] {
                    let j = inv * nalgebra::Vector2::new(cx, cy);
                    for k in 0..2 {
                        lo[k] = lo[k].min(j[k]);
                        hi[k] = hi[k].max(j[k]);
                    }
                }
            }
            let mut tp = Vec::new();
            for j1 in lo[0].floor() as i64..=hi[0].ceil() as i64 {
                for j2 in lo[1].floor() as i64..=hi[1].ceil() as i64 {
                    let x = m * nalgebra::Vector2::new(j1 as f64, j2 as f64);
                    if x[0].abs() <= r && x[1].abs() <= r {
                        tp.push([x[0], x[1]]);
                    }
                }
            }
            (tp, *a, *b)
        }
        GaborMode::Product(cfg) => (cfg.build(&Rect::square(r)), 1.0, 1.0),
    };
    let mods = |step: f64| -> Vec<f64> {
        let k = (r / step).floor() as i64;
        (-k..=k).map(|i| i as f64 * step).collect()
    };
    let (xi, eta) = (mods(ma), mods(mb));
    let mut points = Vec::with_capacity(tp.len() * xi.len() * eta.len());
    for t in &tp {
        for &u in &xi {
            for &v in &eta {
                points.push([t[0], t[1], u, v]);
            }
        }
    }
    let volume = spec.volume();
    Ok(DeltaLattice { points, generator: spec.generator(), volume })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TranslateEntry {
    pub u: f64,
    pub v: f64,
    pub estimate: FrameBoundsEstimate,
}

/// Lower bounds of `-Lambda + (u, v)` over a grid of translates.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslateSweepReport {
    pub grid_step: f64,
    pub n: i64,
    pub margin: i64,
    pub entries: Vec<TranslateEntry>,
    pub min: f64,
    pub argmin: (f64, f64),
    /// Set when the sweep stopped at a translate with zero lower bound.
    pub stopped_early: bool,
}

impl TranslateSweepReport {
    pub fn verdict(&self) -> String {
        if self.min > 0.0 {
            format!("no failing translate found at step {}", self.grid_step)
        } else {
            format!("translate ({}, {}) has a zero lower bound estimate", self.argmin.0, self.argmin.1)
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("u,v,A_est\n");
        for e in &self.entries {
            let _ = writeln!(s, "{},{},{}", e.u, e.v, csv_float(e.estimate.a_est));
        }
        let _ = writeln!(s, "min,{},{},{}", self.argmin.0, self.argmin.1, csv_float(self.min));
        s
    }
}

/// Grid `0, h, ..., 1` in each coordinate (both endpoints included).
pub fn translate_grid(h: f64) -> Vec<(f64, f64)> {
    let n = (1.0 / h + 1e-9).floor() as i64;
    let mut ts: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    if (1.0 - ts[ts.len() - 1]).abs() > 1e-12 {
        ts.push(1.0);
    }
    let mut out = Vec::new();
    for &u in &ts {
        for &v in &ts {
            out.push((u, v));
        }
    }
    out
}

fn translate_estimate(neg: &SlantedConfig, a: f64, u: f64, v: f64, n: i64, margin: i64) -> Result<FrameBoundsEstimate> {
    let shifted = neg.translate([u, v])?;
    let pts = shifted.build(&Rect::square((n + margin) as f64));
    let m = SamplingMatrix::assemble(a, 1.0, 2, &pts, IndexBox::centered(2, n))?.with_sample_margin(margin as f64);
    estimate_bounds(&m, margin)
}

/// Lower bound estimates of `-Lambda + (u, v)` for `V^2_a` on a translate grid of step
/// `grid_step`. Translates are processed in grid order; the sweep stops at the first
/// translate whose estimate is 0.
pub fn translate_sweep(lambda: &SlantedConfig, a: f64, grid_step: f64, n: i64, margin: i64) -> Result<TranslateSweepReport> {
    if !(grid_step > 0.0 && grid_step <= 0.25) {
        return invalid("translate grid step must lie in (0, 0.25]");
    }
    let neg = lambda.negate()?;
    let grid = translate_grid(grid_step);
    let batch = rayon::current_num_threads().max(1);
    let mut entries = Vec::new();
    let mut stopped_early = false;
    for chunk in grid.chunks(batch) {
        let res: Vec<Result<FrameBoundsEstimate>> = chunk.par_iter().map(|&(u, v)| translate_estimate(&neg, a, u, v, n, margin)).collect();
        for (&(u, v), r) in chunk.iter().zip(res) {
            let estimate = r?;
            let zero = estimate.a_est <= 0.0;
            entries.push(TranslateEntry { u, v, estimate });
            if zero {
                stopped_early = true;
                break;
            }
        }
        if stopped_early {
            break;
        }
    }
    let (mut min, mut argmin) = (f64::INFINITY, (0.0, 0.0));
    for e in &entries {
        if e.estimate.a_est < min {
            min = e.estimate.a_est;
            argmin = (e.u, e.v);
        }
    }
    Ok(TranslateSweepReport { grid_step, n, margin, entries, min, argmin, stopped_early })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaborTrendRow {
    pub n: i64,
    pub min_a: f64,
    pub sweep: TranslateSweepReport,
}

/// Minimum translate bound across windows.
#[derive(Debug, Clone, PartialEq)]
pub struct GaborTrend {
    pub rows: Vec<GaborTrendRow>,
}

impl GaborTrend {
    pub fn min_values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.min_a).collect()
    }

    /// `max / min` of the per-window minima (infinite if one is 0).
    pub fn spread(&self) -> f64 {
        let v = self.min_values();
        let mx = v.iter().cloned().fold(0.0, f64::max);
        let mn = v.iter().cloned().fold(f64::INFINITY, f64::min);
        if mn > 0.0 {
            mx / mn
        } else if mx > 0.0 {
            f64::INFINITY
        } else {
            f64::NAN
        }
    }

    /// First over last minimum.
    pub fn decay_factor(&self) -> f64 {
        let v = self.min_values();
        let (f, l) = (v[0], *v.last().unwrap());
        if l > 0.0 {
            f / l
        } else if f > 0.0 {
            f64::INFINITY
        } else {
            f64::NAN
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("N,minA\n");
        for r in &self.rows {
            let _ = writeln!(s, "{},{}", r.n, csv_float(r.min_a));
        }
        s
    }
}

/// Translate sweeps of the reduced isotropic problem for each window size.
pub fn frame_verdict_trend(spec: &GaborLatticeSpec, n_list: &[i64], grid_step: f64, margin: i64) -> Result<GaborTrend> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return invalid("window sizes must be increasing");
    }
    let (cfg, shape) = spec.isotropic_reduction()?;
    let mut rows = Vec::new();
    for &n in n_list {
        let sweep = translate_sweep(&cfg, shape, grid_step, n, margin)?;
        rows.push(GaborTrendRow { n, min_a: sweep.min, sweep });
    }
    Ok(GaborTrend { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_aligned_lattice() {
        let spec = GaborLatticeSpec::delta_abcd(1, 0, 1.0, 1.0, 0.9, 0.9, std::f64::consts::PI).unwrap();
        let lat = build_delta_lattice(&spec, 1.0).unwrap();
        assert_eq!(lat.points.len(), 3 * 3 * 3 * 3);
        for p in &lat.points {
            assert!(((p[0] / 0.9) - (p[0] / 0.9).round()).abs() < 1e-12);
            assert!(((p[1] / 0.9) - (p[1] / 0.9).round()).abs() < 1e-12);
        }
        assert!((lat.volume - 0.81).abs() < 1e-12);
    }

    #[test]
    fn sigma_enters_generator() {
        let spec = GaborLatticeSpec::delta_abcd(3, 4, 2.0, 0.5, 1.0, 1.0, 1.0).unwrap();
        let g = spec.generator();
        assert!((g[0][0] - 3.0 / (2.0 * 5.0) / 5.0).abs() < 1e-15);
        assert!((g[1][1] - 3.0 / (0.5 * 5.0) * 5.0).abs() < 1e-15);
        assert!((spec.beta - 1.0 / 16.0).abs() < 1e-15);
        assert!(GaborLatticeSpec::delta_abcd(2, 4, 1.0, 1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn grid_includes_endpoints() {
        assert_eq!(translate_grid(0.1).len(), 121);
        assert_eq!(translate_grid(0.25).len(), 25);
    }
}
