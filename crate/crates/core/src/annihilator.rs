//! Nonzero Gaussian series vanishing on prescribed sets.
//!
//! * the alternating theta series, which vanishes on `Z + 1/2`;
//! * the product `g(z) = prod (1 - e^{2a(z-gamma)}) prod (1 - e^{-2a(z-gamma)})` over
//!   `gamma >= 0` and `gamma < 0`, expanded in `w = e^{2az}` as `h(w) = sum b_k w^k`,
//!   which yields `f = e^{-az^2} g = sum b_k e^{ak^2} e^{-a(z-k)^2}`;
//! * lifts of one-variable series to functions of two variables that vanish on
//!   lines `(p z + q w) / sigma in Gamma`.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::geometry::{IndexBox, Interval, Window};
use crate::points::{gcd, PointSet1D};
use crate::series::{CoeffGrid, Exponent, GaussSeriesFunction};

/// Largest `|Re z|` accepted by [`product_g`].
pub const PRODUCT_RE_LIMIT: f64 = 200.0;
const QUAD_REL_TOL: f64 = 1e-10;
const QUAD_FAIL_TOL: f64 = 1e-8;
const QUAD_MAX_NODES: usize = 1 << 18;
const COUNTING_RADIUS: f64 = 200.0;

/// `sum (-1)^n exp(-a s^2 (x-n)^2)` with enough terms for `|x| <= radius`.
pub fn alternating_theta_on(a: f64, scale: f64, radius: f64) -> Result<GaussSeriesFunction> {
    let rate = a * scale * scale;
    if !(rate > 0.0 && rate.is_finite()) {
        return invalid("a * scale^2 must be positive");
    }
    let tail = ((1e15f64).ln() + 5.0) / rate;
    let k = (radius.abs() + tail.sqrt()).ceil() as i64 + 1;
    let vals: Vec<f64> = (-k..=k).map(|n| if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 }).collect();
    GaussSeriesFunction::new(a, scale, CoeffGrid::from_real_1d(-k, &vals)?)
}

/// Alternating theta series accurate on `|x| <= 10`.
pub fn alternating_theta(a: f64, scale: f64) -> Result<GaussSeriesFunction> {
    alternating_theta_on(a, scale, 10.0)
}

/// `ln(1 - e^u)` on the principal branch.
fn log1m_exp(u: Complex64) -> Complex64 {
    if u.re > 0.0 {
        u + expm1(-u).ln()
    } else {
        (-expm1(u)).ln()
    }
}

fn expm1(u: Complex64) -> Complex64 {
    if u.norm() < 0.5 {
        let mut term = u;
        let mut s = u;
        for i in 2..30 {
            term = term * u / i as f64;
            s += term;
            if term.norm() < 1e-17 * s.norm() {
                break;
            }
        }
        s
    } else {
        u.exp() - 1.0
    }
}

/// `ln g(z)` using the supplied sorted points of the set. The imaginary part is
/// only defined modulo `2 pi`.
fn log_product(pts: &[f64], a: f64, z: Complex64) -> Complex64 {
    let reach = z.re.abs() + 40.0 / a;
    let lo = pts.partition_point(|&g| g < -reach);
    let hi = pts.partition_point(|&g| g <= reach);
    let mut acc = Complex64::new(0.0, 0.0);
    for &g in &pts[lo..hi] {
        let u = if g >= 0.0 { 2.0 * a * (z - g) } else { -2.0 * a * (z - g) };
        acc += log1m_exp(u);
    }
    acc
}

fn product_points(gamma: &PointSet1D, a: f64, re_max: f64) -> Vec<f64> {
    gamma.points(Interval::symmetric(re_max + 40.0 / a + 1.0))
}

/// `ln g(z)`; see [`product_g`].
pub fn log_product_g(gamma: &PointSet1D, a: f64, z: Complex64) -> Result<Complex64> {
    if !(a > 0.0) {
        return invalid("a must be positive");
    }
    if !(z.re.abs() <= PRODUCT_RE_LIMIT) || !z.im.is_finite() {
        return Err(Error::UnsupportedDomain(format!("|Re z| must not exceed {PRODUCT_RE_LIMIT}")));
    }
    Ok(log_product(&product_points(gamma, a, z.re.abs()), a, z))
}

/// The product over `gamma` in the set with `|gamma| <= |Re z| + 40/a`, accumulated
/// in log space. Omitted factors differ from 1 by less than `e^{-80}`.
pub fn product_g(gamma: &PointSet1D, a: f64, z: Complex64) -> Result<Complex64> {
    Ok(log_product_g(gamma, a, z)?.exp())
}

/// Laurent coefficients of `h(w) = g(ln(w) / 2a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentCoeffTable {
    pub a: f64,
    pub eps: f64,
    pub k_lo: i64,
    pub b: Vec<Complex64>,
    /// `ln R_k = 2 a k / (1 - eps)`.
    pub log_radius: Vec<f64>,
    pub nodes: Vec<usize>,
    /// Change of the estimate under the last node doubling.
    pub quad_error: Vec<f64>,
    /// Roundoff level of the contour average: `64 eps_mach` times the mean integrand magnitude.
    pub floor: Vec<f64>,
}

impl LaurentCoeffTable {
    pub fn k_values(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.b.len()).map(move |i| self.k_lo + i as i64)
    }

    pub fn get(&self, k: i64) -> Option<Complex64> {
        let i = k - self.k_lo;
        (i >= 0 && (i as usize) < self.b.len()).then(|| self.b[i as usize])
    }

    /// `|b_k| exp(a k^2 / (1 - eps))` for each stored `k`.
    pub fn normalized(&self) -> Vec<f64> {
        self.k_values().zip(&self.b).map(|(k, b)| (b.norm().ln() + self.a * (k * k) as f64 / (1.0 - self.eps)).exp()).collect()
    }

    /// Least-squares fit `ln|b_k| = s k^2 + t k + c` over entries well above the roundoff floor.
    pub fn decay_fit(&self) -> DecayFit {
        let mut rows = Vec::new();
        for (((k, b), e), f) in self.k_values().zip(&self.b).zip(&self.quad_error).zip(&self.floor) {
            let m = b.norm();
            if m > 0.0 && m.is_finite() && *e < 0.5 * m && m > 100.0 * f {
                rows.push((k as f64, m.ln()));
            }
        }
        fit_quadratic(&rows)
    }
}

/// Coefficients of `ln|b_k| ~ slope k^2 + linear k + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub slope: f64,
    pub linear: f64,
    pub intercept: f64,
    pub points: usize,
}

fn fit_quadratic(rows: &[(f64, f64)]) -> DecayFit {
    if rows.len() < 3 {
        return DecayFit { slope: f64::NAN, linear: f64::NAN, intercept: f64::NAN, points: rows.len() };
    }
    let a = nalgebra::DMatrix::from_fn(rows.len(), 3, |i, j| rows[i].0.powi(2 - j as i32));
    let y = nalgebra::DVector::from_iterator(rows.len(), rows.iter().map(|r| r.1));
    let sol = a.svd(true, true).solve(&y, 1e-14).expect("svd solve");
    DecayFit { slope: sol[0], linear: sol[1], intercept: sol[2], points: rows.len() }
}

fn contour_average(pts: &[f64], a: f64, k: i64, log_r: f64, n: usize, offset: usize, stride: usize) -> (Complex64, f64) {
    // trapezoid sum over nodes offset, offset + stride, ... of n equispaced nodes
    let logs: Vec<Complex64> = (offset..n)
        .step_by(stride)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            let ell = Complex64::new(log_r, theta);
            log_product(pts, a, ell / (2.0 * a)) - ell * k as f64
        })
        .collect();
    let m = logs.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return (Complex64::new(0.0, 0.0), 0.0);
    }
    let mut s = Complex64::new(0.0, 0.0);
    let mut mag = 0.0;
    for l in &logs {
        let e = (l - m).exp();
        s += e;
        mag += e.norm();
    }
    let f = m.exp();
    (s * f, mag * f)
}

/// Contour-average Laurent coefficients on circles `|w| = exp(2 a k / (1 - eps))`.
///
/// Node counts double from `nodes_per_circle` until the estimate changes by less
/// than `1e-10 |b_k|` or than the roundoff floor of the average (`64 eps_mach`
/// times the mean integrand magnitude), whichever is larger.
pub fn laurent_coeffs(gamma: &PointSet1D, a: f64, k_range: (i64, i64), eps: f64, nodes_per_circle: usize) -> Result<LaurentCoeffTable> {
    if !(a > 0.0) {
        return invalid("a must be positive");
    }
    if k_range.1 < k_range.0 {
        return invalid("empty k range");
    }
    if nodes_per_circle < 256 {
        return invalid("at least 256 nodes per circle are required");
    }
    let (rho, _) = gamma.counting_slope(COUNTING_RADIUS);
    if !(eps > 0.0 && eps < 1.0 - rho) {
        return invalid(format!("eps = {eps} must lie in (0, 1 - rho) with measured rho = {rho:.6}"));
    }
    let kmax = k_range.0.abs().max(k_range.1.abs()) as f64;
    let re_max = kmax / (1.0 - eps);
    if re_max > PRODUCT_RE_LIMIT {
        return invalid("k range too large for the contour radii");
    }
    let pts = product_points(gamma, a, re_max);
    let ks: Vec<i64> = (k_range.0..=k_range.1).collect();
    let res: Vec<Result<(Complex64, f64, usize, f64, f64)>> = ks
        .par_iter()
        .map(|&k| {
            let log_r = 2.0 * a * k as f64 / (1.0 - eps);
            let mut n = nodes_per_circle;
            let (mut sum, mut mag) = contour_average(&pts, a, k, log_r, n, 0, 1);
            let mut b = sum / n as f64;
            loop {
                let (s_odd, m_odd) = contour_average(&pts, a, k, log_r, 2 * n, 1, 2);
                sum += s_odd;
                mag += m_odd;
                n *= 2;
                let b2 = sum / n as f64;
                let floor = 64.0 * f64::EPSILON * mag / n as f64;
                let change = (b2 - b).norm();
                b = b2;
                if change <= (QUAD_REL_TOL * b.norm()).max(floor) {
                    return Ok((b, log_r, n, change, floor));
                }
                if n >= QUAD_MAX_NODES {
                    if change <= (QUAD_FAIL_TOL * b.norm()).max(floor) {
                        return Ok((b, log_r, n, change, floor));
                    }
                    return Err(Error::Accuracy(format!("contour average for k = {k} changed by {change:e} (|b_k| = {:e}) at {n} nodes", b.norm())));
                }
            }
        })
        .collect();
    let mut t = LaurentCoeffTable { a, eps, k_lo: k_range.0, b: vec![], log_radius: vec![], nodes: vec![], quad_error: vec![], floor: vec![] };
    for r in res {
        let (b, lr, n, e, f) = r?;
        t.floor.push(f);
        t.b.push(b);
        t.log_radius.push(lr);
        t.nodes.push(n);
        t.quad_error.push(e);
    }
    Ok(t)
}

/// Diagnostics of a constructed annihilator.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnihilatorReport {
    pub target: String,
    /// Effective rate `a s^2`.
    pub rate: f64,
    pub rho: f64,
    pub k_const: f64,
    pub eps: f64,
    pub k_range: (i64, i64),
    pub window: Interval,
    pub sup: f64,
    pub max_coeff: f64,
    pub residual_max: f64,
    pub residual_points: usize,
    /// `max |series - e^{-a x^2} g(x)|` over the check grid.
    pub identity_discrepancy: f64,
    pub decay: DecayFit,
}

impl AnnihilatorReport {
    pub fn residual_relative(&self) -> f64 {
        if self.sup > 0.0 {
            self.residual_max / self.sup
        } else {
            f64::INFINITY
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "target: {}", self.target);
        let _ = writeln!(s, "eps: {}", self.eps);
        let _ = writeln!(s, "rho: {}", self.rho);
        let _ = writeln!(s, "counting_constant: {}", self.k_const);
        let _ = writeln!(s, "k_range: {} {}", self.k_range.0, self.k_range.1);
        let _ = writeln!(s, "window: {} {}", self.window.lo, self.window.hi);
        let _ = writeln!(s, "sup_norm: {:e}", self.sup);
        let _ = writeln!(s, "max_abs_coefficient: {:e}", self.max_coeff);
        let _ = writeln!(s, "residual_points: {}", self.residual_points);
        let _ = writeln!(s, "residual_max: {:e}", self.residual_max);
        let _ = writeln!(s, "residual_relative: {:e}", self.residual_relative());
        let _ = writeln!(s, "identity_discrepancy: {:e}", self.identity_discrepancy);
        let _ = writeln!(s, "decay_fit_slope: {}", self.decay.slope);
        let _ = writeln!(s, "decay_fit_linear: {}", self.decay.linear);
        let _ = writeln!(s, "decay_fit_intercept: {}", self.decay.intercept);
        let _ = writeln!(s, "decay_bound_slope: {}", self.bound_slope());
        s
    }

    /// `-r / (1 - eps)`, the guaranteed quadratic decay rate of `ln|b_k|`.
    pub fn bound_slope(&self) -> f64 {
        -self.rate / (1.0 - self.eps)
    }
}

/// A series vanishing on a target set.
#[derive(Debug, Clone)]
pub struct Annihilator1D {
    pub function: GaussSeriesFunction,
    pub target: PointSet1D,
    pub table: LaurentCoeffTable,
    pub report: AnnihilatorReport,
}

/// Options for [`build_annihilator_1d`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnihilatorOptions {
    /// Generator scale `s`; the effective rate is `a s^2`.
    pub scale: f64,
    /// Defaults to `(1 - rho) / 2`.
    pub eps: Option<f64>,
    /// Defaults to two thirds of the k range.
    pub window: Option<Interval>,
}

impl Default for AnnihilatorOptions {
    fn default() -> Self {
        AnnihilatorOptions { scale: 1.0, eps: None, window: None }
    }
}

/// Build `f = sum b_k e^{r k^2} e^{-r (x-k)^2}` (`r = a s^2`) vanishing on `gamma`.
pub fn build_annihilator_1d(gamma: &PointSet1D, a: f64, k_range: (i64, i64), opts: AnnihilatorOptions) -> Result<Annihilator1D> {
    let rate = a * opts.scale * opts.scale;
    if !(rate > 0.0 && rate.is_finite()) {
        return invalid("a * scale^2 must be positive");
    }
    let (rho, k_const) = gamma.counting_slope(COUNTING_RADIUS);
    if rho >= 1.0 {
        return Err(Error::InfeasibleDensity(format!("measured counting slope {rho:.6} is not below 1")));
    }
    let eps = opts.eps.unwrap_or((1.0 - rho) / 2.0);
    if !(eps > 0.0 && eps < 1.0 - rho) {
        return invalid(format!("eps = {eps} must lie in (0, {:.6})", 1.0 - rho));
    }
    let table = laurent_coeffs(gamma, rate, k_range, eps, 256)?;
    let coeffs: Vec<Complex64> = table.k_values().zip(&table.b).map(|(k, b)| b * (rate * (k * k) as f64).exp()).collect();
    let total: f64 = coeffs.iter().map(|c| c.norm()).sum();
    let len = coeffs.len();
    let outer = ((len as f64) * 0.2).ceil() as usize;
    let mid = (k_range.0 + k_range.1) as f64 / 2.0;
    let mut order: Vec<usize> = (0..len).collect();
    order.sort_by(|&i, &j| {
        let di = ((k_range.0 + i as i64) as f64 - mid).abs();
        let dj = ((k_range.0 + j as i64) as f64 - mid).abs();
        dj.total_cmp(&di).then(j.cmp(&i))
    });
    let tail: f64 = order[..outer.min(len)].iter().map(|&i| coeffs[i].norm()).sum();
    if len > 1 && tail >= 0.01 * total {
        return Err(Error::RangeTooSmall(format!(
            "outer coefficients carry {:.3}% of the l1 mass; enlarge the k range",
            100.0 * tail / total
        )));
    }
    let grid = CoeffGrid::new(IndexBox::d1(k_range.0, k_range.1), coeffs, Exponent::Finite(1.0))?;
    let function = GaussSeriesFunction::new(a, opts.scale, grid)?;
    let window = opts.window.unwrap_or(Interval::new(2.0 * k_range.0 as f64 / 3.0, 2.0 * k_range.1 as f64 / 3.0));
    let sup = function.sup_norm_estimate(&Window::D1(window), 0.01)?;
    let targets = gamma.points(window);
    let residual_max = targets.iter().map(|&x| function.at(x).norm()).fold(0.0, f64::max);
    let pts = product_points(gamma, rate, window.lo.abs().max(window.hi.abs()));
    let mut disc = 0.0f64;
    for x in window.grid(0.01) {
        let direct = (log_product(&pts, rate, Complex64::new(x, 0.0)) - rate * x * x).exp();
        disc = disc.max((function.at(x) - direct).norm());
    }
    if disc > 1e-8 * sup.max(f64::MIN_POSITIVE) {
        return Err(Error::Accuracy(format!("series and product forms differ by {disc:e} (sup {sup:e})")));
    }
    let report = AnnihilatorReport {
        target: gamma.to_string(),
        rate,
        rho,
        k_const,
        eps,
        k_range,
        window,
        sup,
        max_coeff: function.coeffs().max_abs(),
        residual_max,
        residual_points: targets.len(),
        identity_discrepancy: disc,
        decay: table.decay_fit(),
    };
    Ok(Annihilator1D { function, target: gamma.clone(), table, report })
}

/// `f(z, w) = exp(a ((p z + q w)/sigma)^2 - a z^2 - a w^2) g((p z + q w) / sigma^2)`.
#[derive(Debug, Clone)]
pub struct ClosedFormLift {
    pub g: GaussSeriesFunction,
    pub p: i64,
    pub q: i64,
    pub a: f64,
}

impl ClosedFormLift {
    pub fn sigma(&self) -> f64 {
        ((self.p * self.p + self.q * self.q) as f64).sqrt()
    }

    pub fn at(&self, z: f64, w: f64) -> Complex64 {
        let s = self.sigma();
        let t = self.p as f64 * z + self.q as f64 * w;
        let pre = (self.a * (t / s).powi(2) - self.a * z * z - self.a * w * w).exp();
        self.g.at(t / (s * s)) * pre
    }
}

/// Coefficient-grid and closed-form versions of a lifted function.
#[derive(Debug, Clone)]
pub struct Lift2D {
    pub series: GaussSeriesFunction,
    pub closed: ClosedFormLift,
}

/// Place `c_n` at `(p n, q n)`; `g` must have shape `a` and scale `sqrt(p^2 + q^2)`.
pub fn lift_to_2d(g: &GaussSeriesFunction, p: i64, q: i64, a: f64) -> Result<Lift2D> {
    if (p == 0 && q == 0) || gcd(p, q) != 1 {
        return invalid(format!("({p},{q}) must be a coprime pair"));
    }
    if g.dim() != 1 {
        return invalid("lift needs a one-variable series");
    }
    let sigma = ((p * p + q * q) as f64).sqrt();
    if (g.a() - a).abs() > 1e-12 * a || (g.scale() - sigma).abs() > 1e-12 * sigma {
        return invalid(format!("series must have a = {a} and scale sigma = {sigma}, found a = {} and scale = {}", g.a(), g.scale()));
    }
    let sup = g.coeffs().support();
    let (n0, n1) = (sup.lo[0], sup.hi[0]);
    let xs = [p * n0, p * n1];
    let ys = [q * n0, q * n1];
    let boxx = IndexBox::d2(xs[0].min(xs[1]), xs[0].max(xs[1]), ys[0].min(ys[1]), ys[0].max(ys[1]));
    let mut grid = CoeffGrid::zeros(boxx)?.with_declared_p(g.coeffs().declared_p())?;
    for n in n0..=n1 {
        grid.set([p * n, q * n], g.coeffs().get([n, 0]))?;
    }
    let series = GaussSeriesFunction::new(a, 1.0, grid)?;
    Ok(Lift2D { series, closed: ClosedFormLift { g: g.clone(), p, q, a } })
}

/// The pair `(f1, f2)` built from the alternating theta series of scale `sigma`:
/// `f1` uses `p z + q w`, `f2` uses `p w - q z`. `radius` bounds the planar
/// evaluation window `[-radius, radius]^2`.
pub fn critical_counterexamples(p: i64, q: i64, a: f64, radius: f64) -> Result<(Lift2D, Lift2D)> {
    if (p == 0 && q == 0) || gcd(p, q) != 1 {
        return invalid(format!("({p},{q}) must be a coprime pair"));
    }
    let sigma = ((p * p + q * q) as f64).sqrt();
    let reach = radius.abs() * ((p.abs() + q.abs()) as f64) / (sigma * sigma);
    let g = alternating_theta_on(a, sigma, reach + 1.0)?;
    Ok((lift_to_2d(&g, p, q, a)?, lift_to_2d(&g, -q, p, a)?))
}
