//! Gaussian series `f(x) = sum_n c_n exp(-a s^2 |x - n|^2)` in one and two variables.
//!
//! Evaluation keeps every term with `a s^2 dist^2 <= -ln(tol) + 5` and returns a
//! bound on the omitted tail alongside the value.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::geometry::{IndexBox, Window};

/// Largest admissible `|Im z|` for complex evaluation.
pub const IMAG_LIMIT: f64 = 10.0;
/// Default relative truncation tolerance.
pub const DEFAULT_TRUNC_TOL: f64 = 1e-14;
const TRUNC_MARGIN: f64 = 5.0;

/// Norm exponent in `[1, inf]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Exponent::Finite(p) if !(p >= 1.0 && p.is_finite()) => invalid(format!("exponent {p} not in [1, inf]")),
            _ => Ok(()),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(Exponent::Infinity);
        }
        let p: f64 = t.parse().map_err(|_| Error::InvalidParameter(format!("bad exponent '{t}'")))?;
        let e = Exponent::Finite(p);
        e.validate()?;
        Ok(e)
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

/// Finitely supported coefficients on an integer interval or rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffGrid {
    support: IndexBox,
    values: Vec<Complex64>,
    declared_p: Exponent,
}

impl CoeffGrid {
    pub fn new(support: IndexBox, values: Vec<Complex64>, declared_p: Exponent) -> Result<Self> {
        if support.is_empty() {
            return invalid("coefficient support is empty");
        }
        if values.len() != support.len() {
            return invalid(format!("{} values for a support of size {}", values.len(), support.len()));
        }
        declared_p.validate()?;
        Ok(CoeffGrid { support, values, declared_p })
    }

    pub fn zeros(support: IndexBox) -> Result<Self> {
        Self::new(support, vec![Complex64::new(0.0, 0.0); support.len()], Exponent::Finite(2.0))
    }

    /// 1D grid with real values starting at index `lo`.
    pub fn from_real_1d(lo: i64, values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return invalid("coefficient support is empty");
        }
        let support = IndexBox::d1(lo, lo + values.len() as i64 - 1);
        Self::new(support, values.iter().map(|&v| Complex64::new(v, 0.0)).collect(), Exponent::Finite(2.0))
    }

    /// Single unit coefficient at `idx`.
    pub fn unit(dim: usize, idx: [i64; 2]) -> Self {
        let support = if dim == 1 { IndexBox::d1(idx[0], idx[0]) } else { IndexBox::d2(idx[0], idx[0], idx[1], idx[1]) };
        CoeffGrid { support, values: vec![Complex64::new(1.0, 0.0)], declared_p: Exponent::Finite(2.0) }
    }

    pub fn dim(&self) -> usize {
        self.support.dim
    }

    pub fn support(&self) -> IndexBox {
        self.support
    }

    pub fn declared_p(&self) -> Exponent {
        self.declared_p
    }

    pub fn with_declared_p(mut self, p: Exponent) -> Result<Self> {
        p.validate()?;
        self.declared_p = p;
        Ok(self)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, idx: [i64; 2]) -> Complex64 {
        self.support.position(idx).map(|i| self.values[i]).unwrap_or_default()
    }

    pub fn set(&mut self, idx: [i64; 2], v: Complex64) -> Result<()> {
        match self.support.position(idx) {
            Some(i) => {
                self.values[i] = v;
                Ok(())
            }
            None => invalid(format!("index {idx:?} outside support")),
        }
    }

    /// `(index, value)` pairs in lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = ([i64; 2], Complex64)> + '_ {
        self.support.indices().into_iter().zip(self.values.iter().copied())
    }

    pub fn lp_norm(&self, p: Exponent) -> f64 {
        match p {
            Exponent::Infinity => self.values.iter().map(|v| v.norm()).fold(0.0, f64::max),
            Exponent::Finite(p) => {
                let s: f64 = self.values.iter().map(|v| v.norm().powf(p)).sum();
                s.powf(1.0 / p)
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.lp_norm(Exponent::Infinity)
    }

    /// Same values with support enlarged to `to` (zeros elsewhere).
    pub fn enlarged(&self, to: IndexBox) -> Result<Self> {
        if to.dim != self.dim() || !to.contains(self.support.lo) || !to.contains(self.support.hi) {
            return invalid("enlarged support must contain the current one");
        }
        let mut g = CoeffGrid::zeros(to)?;
        g.declared_p = self.declared_p;
        for (idx, v) in self.entries() {
            g.set(idx, v)?;
        }
        Ok(g)
    }

    /// Same values with every index shifted by `by`.
    pub fn shifted(&self, by: [i64; 2]) -> Self {
        let mut s = self.support;
        s.lo[0] += by[0];
        s.hi[0] += by[0];
        if s.dim == 2 {
            s.lo[1] += by[1];
            s.hi[1] += by[1];
        }
        CoeffGrid { support: s, values: self.values.clone(), declared_p: self.declared_p }
    }

    pub fn scaled(&self, alpha: Complex64) -> Self {
        CoeffGrid { support: self.support, values: self.values.iter().map(|v| v * alpha).collect(), declared_p: self.declared_p }
    }
}

/// A function `sum c_k exp(-a s^2 |x-k|^2)` with coefficients on a finite grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussSeriesFunction {
    a: f64,
    scale: f64,
    coeffs: CoeffGrid,
    trunc_tol: f64,
}

/// A value together with a bound on the omitted series tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifiedValue {
    pub value: Complex64,
    pub tail_bound: f64,
    /// Sum of magnitudes of the included terms.
    pub included_mass: f64,
}

impl GaussSeriesFunction {
    pub fn new(a: f64, scale: f64, coeffs: CoeffGrid) -> Result<Self> {
        Self::with_tol(a, scale, coeffs, DEFAULT_TRUNC_TOL)
    }

    pub fn with_tol(a: f64, scale: f64, coeffs: CoeffGrid, trunc_tol: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return invalid(format!("shape parameter a must be positive, got {a}"));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return invalid(format!("scale must be positive, got {scale}"));
        }
        if !(trunc_tol > 0.0 && trunc_tol < 1.0) {
            return invalid(format!("truncation tolerance must lie in (0,1), got {trunc_tol}"));
        }
        Ok(GaussSeriesFunction { a, scale, coeffs, trunc_tol })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Effective Gaussian rate `a * scale^2`.
    pub fn rate(&self) -> f64 {
        self.a * self.scale * self.scale
    }

    pub fn dim(&self) -> usize {
        self.coeffs.dim()
    }

    pub fn coeffs(&self) -> &CoeffGrid {
        &self.coeffs
    }

    pub fn trunc_tol(&self) -> f64 {
        self.trunc_tol
    }

    /// Radius beyond which terms are dropped.
    pub fn truncation_radius(&self) -> f64 {
        ((-self.trunc_tol.ln() + TRUNC_MARGIN) / self.rate()).sqrt()
    }

    /// Evaluate at real points; each point has `dim` coordinates.
    pub fn eval_real(&self, points: &[Vec<f64>]) -> Result<Vec<Complex64>> {
        points.iter().map(|p| self.eval_point(p, &[0.0; 2][..p.len()]).map(|c| c.value)).collect()
    }

    /// Evaluate at complex points.
    pub fn eval(&self, points: &[Vec<Complex64>]) -> Result<Vec<Complex64>> {
        points
            .iter()
            .map(|p| {
                let re: Vec<f64> = p.iter().map(|z| z.re).collect();
                let im: Vec<f64> = p.iter().map(|z| z.im).collect();
                self.eval_point(&re, &im).map(|c| c.value)
            })
            .collect()
    }

    /// Value at a real point, 1D.
    pub fn at(&self, x: f64) -> Complex64 {
        self.eval_point(&[x], &[0.0]).map(|c| c.value).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    }

    /// Value at a real point, 2D.
    pub fn at2(&self, x: f64, y: f64) -> Complex64 {
        self.eval_point(&[x, y], &[0.0, 0.0]).map(|c| c.value).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    }

    /// Evaluate at `re + i*im` and report the truncation bound.
    pub fn eval_point(&self, re: &[f64], im: &[f64]) -> Result<CertifiedValue> {
        let dim = self.dim();
        if re.len() != dim || im.len() != dim {
            return invalid(format!("point has {} coordinates, function is {dim}-dimensional", re.len()));
        }
        if re.iter().chain(im).any(|v| !v.is_finite()) {
            return invalid("non-finite evaluation point");
        }
        if im.iter().any(|y| y.abs() > IMAG_LIMIT) {
            return Err(Error::UnsupportedDomain(format!("|Im z| exceeds {IMAG_LIMIT}")));
        }
        let beta = self.rate();
        let r = self.truncation_radius();
        let r2 = r * r;
        let sup = self.coeffs.support;
        let mut terms: Vec<(f64, [i64; 2])> = Vec::new();
        let n_lo = ((re[0] - r).ceil() as i64).max(sup.lo[0]);
        let n_hi = ((re[0] + r).floor() as i64).min(sup.hi[0]);
        for n in n_lo..=n_hi {
            let dx = re[0] - n as f64;
            if dim == 1 {
                if dx * dx <= r2 {
                    terms.push((dx * dx, [n, 0]));
                }
            } else {
                let rem = (r2 - dx * dx).max(0.0).sqrt();
                let m_lo = ((re[1] - rem).ceil() as i64).max(sup.lo[1]);
                let m_hi = ((re[1] + rem).floor() as i64).min(sup.hi[1]);
                for m in m_lo..=m_hi {
                    let dy = re[1] - m as f64;
                    let d2 = dx * dx + dy * dy;
                    if d2 <= r2 {
                        terms.push((d2, [n, m]));
                    }
                }
            }
        }
        terms.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let imag2: f64 = im.iter().map(|y| y * y).sum();
        let complex = imag2 > 0.0;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut mass = 0.0;
        for &(d2, idx) in &terms {
            let c = self.coeffs.get(idx);
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let t = if complex {
                // (z - n)^2 summed over coordinates
                let mut arg = Complex64::new(0.0, 0.0);
                for k in 0..dim {
                    let d = Complex64::new(re[k] - idx[k] as f64, im[k]);
                    arg += d * d;
                }
                (-beta * arg).exp()
            } else {
                Complex64::new((-beta * d2).exp(), 0.0)
            };
            let term = c * t;
            mass += term.norm();
            acc += term;
        }
        let n_support = sup.len();
        let tail_bound = if terms.len() >= n_support {
            0.0
        } else {
            let growth = (beta * imag2).exp();
            let cmax = self.coeffs.max_abs();
            let tail = if dim == 1 {
                2.0 * (-beta * r2).exp() / (1.0 - (-2.0 * beta * r).exp())
            } else {
                let theta = 0.98;
                let s = 1.0 + (std::f64::consts::PI / ((1.0 - theta) * beta)).sqrt();
                (-theta * beta * r2).exp() * s * s
            };
            cmax * tail * growth
        };
        Ok(CertifiedValue { value: acc, tail_bound, included_mass: mass })
    }

    /// Maximum of `|f|` over a grid in `window`; a lower bound for the true sup there.
    pub fn sup_norm_estimate(&self, window: &Window, grid_step: f64) -> Result<f64> {
        if window.dim() != self.dim() {
            return invalid("window dimension does not match function");
        }
        if !(grid_step > 0.0 && grid_step <= 0.1) {
            return invalid(format!("grid step must lie in (0, 0.1], got {grid_step}"));
        }
        let pts = window.grid(grid_step)?;
        let vals: Vec<f64> = pts.par_iter().map(|p| self.eval_point(p, &[0.0; 2][..p.len()]).map(|c| c.value.norm()).unwrap_or(0.0)).collect();
        Ok(vals.into_iter().fold(0.0, f64::max))
    }

    /// Compare a quadrature estimate of `||f||_p` on `window` with `||c||_p`.
    pub fn lp_norm_equivalence_check(&self, p: Exponent, window: &Window) -> Result<NormRatioReport> {
        p.validate()?;
        if window.dim() != self.dim() {
            return invalid("window dimension does not match function");
        }
        if window.is_empty() {
            return invalid("empty quadrature window");
        }
        let beta = self.rate();
        let need = 5.0 / beta.sqrt();
        let sup = self.coeffs.support;
        let s = |v: i64| v as f64;
        let have = match window {
            Window::D1(i) => (s(sup.lo[0]) - i.lo).min(i.hi - s(sup.hi[0])),
            Window::D2(r) => (s(sup.lo[0]) - r.x.lo).min(r.x.hi - s(sup.hi[0])).min(s(sup.lo[1]) - r.y.lo).min(r.y.hi - s(sup.hi[1])),
        };
        if have < need {
            return Err(Error::Precondition(format!(
                "quadrature window must contain the coefficient support inflated by {need:.6}; available inflation {have:.6}"
            )));
        }
        let c_norm = self.coeffs.lp_norm(p);
        if c_norm == 0.0 {
            return Ok(NormRatioReport { ratio: None, f_norm: 0.0, c_norm: 0.0, degenerate: true });
        }
        let f_norm = match p {
            Exponent::Infinity => self.sup_norm_estimate(window, (0.01 / beta.sqrt()).min(0.1))?,
            Exponent::Finite(pp) => {
                let h = (std::f64::consts::PI / (40.0 * pp * beta).sqrt()).min(0.1);
                let pts = window.grid(h)?;
                let sum: f64 = pts
                    .par_iter()
                    .map(|x| self.eval_point(x, &[0.0; 2][..x.len()]).map(|c| c.value.norm().powf(pp)).unwrap_or(0.0))
                    .collect::<Vec<_>>()
                    .into_iter()
                    .sum();
                (sum * h.powi(self.dim() as i32)).powf(1.0 / pp)
            }
        };
        Ok(NormRatioReport { ratio: Some(f_norm / c_norm), f_norm, c_norm, degenerate: false })
    }

    /// Serialize as `dim a scale p` followed by `n [m] re im` rows.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {} {} {}", self.dim(), self.a, self.scale, self.coeffs.declared_p);
        for (idx, v) in self.coeffs.entries() {
            if self.dim() == 1 {
                let _ = writeln!(s, "{} {} {}", idx[0], v.re, v.im);
            } else {
                let _ = writeln!(s, "{} {} {} {}", idx[0], idx[1], v.re, v.im);
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (hl, header) = lines.next().ok_or_else(|| parse_err(1, 1, "missing header"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 4 {
            return Err(parse_err(hl + 1, 1, "header must be 'dim a scale p'"));
        }
        let dim: usize = h[0].parse().map_err(|_| parse_err(hl + 1, 1, "bad dim"))?;
        if dim != 1 && dim != 2 {
            return Err(parse_err(hl + 1, 1, "dim must be 1 or 2"));
        }
        let a: f64 = h[1].parse().map_err(|_| parse_err(hl + 1, 2, "bad a"))?;
        let scale: f64 = h[2].parse().map_err(|_| parse_err(hl + 1, 3, "bad scale"))?;
        let p = Exponent::parse(h[3]).map_err(|_| parse_err(hl + 1, 4, "bad exponent"))?;
        let mut rows: Vec<([i64; 2], Complex64)> = Vec::new();
        for (ln, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != dim + 2 {
                return Err(parse_err(ln + 1, 1, &format!("expected {} fields", dim + 2)));
            }
            let mut idx = [0i64; 2];
            for k in 0..dim {
                idx[k] = f[k].parse().map_err(|_| parse_err(ln + 1, k + 1, "bad index"))?;
            }
            let re: f64 = f[dim].parse().map_err(|_| parse_err(ln + 1, dim + 1, "bad real part"))?;
            let im: f64 = f[dim + 1].parse().map_err(|_| parse_err(ln + 1, dim + 2, "bad imaginary part"))?;
            rows.push((idx, Complex64::new(re, im)));
        }
        if rows.is_empty() {
            return Err(parse_err(hl + 2, 1, "no coefficient rows"));
        }
        let mut lo = [i64::MAX, if dim == 1 { 0 } else { i64::MAX }];
        let mut hi = [i64::MIN, if dim == 1 { 0 } else { i64::MIN }];
        for (idx, _) in &rows {
            for k in 0..dim {
                lo[k] = lo[k].min(idx[k]);
                hi[k] = hi[k].max(idx[k]);
            }
        }
        let support = IndexBox { dim, lo, hi };
        let mut g = CoeffGrid::zeros(support)?.with_declared_p(p)?;
        for (idx, v) in rows {
            g.set(idx, v)?;
        }
        GaussSeriesFunction::new(a, scale, g)
    }
}

fn parse_err(line: usize, column: usize, msg: &str) -> Error {
    Error::Parse { line, column, message: msg.to_string() }
}

/// Result of [`GaussSeriesFunction::lp_norm_equivalence_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormRatioReport {
    /// `||f||_p / ||c||_p`; `None` for zero coefficients.
    pub ratio: Option<f64>,
    pub f_norm: f64,
    pub c_norm: f64,
    pub degenerate: bool,
}

/// `||exp(-rate |x|^2)||_p` over `R^dim`.
pub fn gaussian_lp_norm(rate: f64, p: Exponent, dim: usize) -> f64 {
    match p {
        Exponent::Infinity => 1.0,
        Exponent::Finite(p) => (std::f64::consts::PI / (rate * p)).powf(dim as f64 / (2.0 * p)),
    }
}
