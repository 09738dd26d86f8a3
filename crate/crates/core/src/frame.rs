//! Finite-section sampling bounds and least-squares reconstruction.
//!
//! Bounds use the squared convention `A ||c||^2 <= sum |f(lambda)|^2 <= B ||c||^2`:
//! `A_est` is the squared smallest singular value of the sampling matrix restricted
//! to interior coefficients, `B_est` the squared largest singular value of the full
//! matrix. Values of `A_est` below the numerical resolution of the method used are
//! reported as `0` with `resolved = false`.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::geometry::{IndexBox, Interval, Rect};
use crate::linalg::banded::SymBand;
use crate::linalg::dd::Dd;
use crate::linalg::jacobi::singular_values_dd;
use crate::linalg::lanczos::largest_eigenvalue;
use crate::points::{PointSet1D, SlantedConfig};
use crate::series::{CoeffGrid, Exponent};

/// Column count up to which the lower bound uses a dense SVD.
pub const DENSE_COLUMN_LIMIT: usize = 400;
/// Column count up to which unresolved dense results are recomputed in double-double.
pub const EXTENDED_COLUMN_LIMIT: usize = 100;
/// Entries with `a s^2 d^2` above this are omitted from sparse storage.
const SPARSE_EXPONENT_CUTOFF: f64 = 50.0;
const EPS: f64 = f64::EPSILON / 2.0;
const DD_EPS: f64 = 4.93e-32;

/// Sampling matrix `M[i, k] = exp(-a s^2 |lambda_i - k|^2)` over an integer coefficient box.
#[derive(Debug, Clone)]
pub struct SamplingMatrix {
    a: f64,
    scale: f64,
    dim: usize,
    samples: Vec<[f64; 2]>,
    window: IndexBox,
    sample_margin: Option<f64>,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

fn entry_value(rate: f64, dim: usize, x: [f64; 2], idx: [i64; 2]) -> f64 {
    let dx = x[0] - idx[0] as f64;
    let d2 = if dim == 1 { dx * dx } else { dx * dx + (x[1] - idx[1] as f64).powi(2) };
    (-rate * d2).exp()
}

fn entry_dd(a: f64, scale: f64, dim: usize, x: [f64; 2], idx: [i64; 2]) -> Dd {
    let dx = Dd::diff(x[0], idx[0] as f64);
    let mut d2 = dx * dx;
    if dim == 2 {
        let dy = Dd::diff(x[1], idx[1] as f64);
        d2 = d2 + dy * dy;
    }
    let rate = Dd::new(a) * Dd::new(scale) * Dd::new(scale);
    (-(rate * d2)).exp()
}

impl SamplingMatrix {
    /// Assemble for `samples` (1D points use the first coordinate only).
    pub fn assemble(a: f64, scale: f64, dim: usize, samples: &[[f64; 2]], window: IndexBox) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return invalid(format!("shape parameter a must be positive, got {a}"));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return invalid(format!("scale must be positive, got {scale}"));
        }
        if dim != window.dim {
            return invalid("sample dimension does not match coefficient window");
        }
        if samples.is_empty() {
            return Err(Error::Precondition("no sample points".into()));
        }
        if window.is_empty() {
            return Err(Error::Precondition("empty coefficient window".into()));
        }
        let rate = a * scale * scale;
        let r = (SPARSE_EXPONENT_CUTOFF / rate).sqrt();
        let rows: Vec<Vec<(u32, f64)>> = samples
            .par_iter()
            .map(|x| {
                let mut row = Vec::new();
                let n_lo = ((x[0] - r).ceil() as i64).max(window.lo[0]);
                let n_hi = ((x[0] + r).floor() as i64).min(window.hi[0]);
                for n in n_lo..=n_hi {
                    if dim == 1 {
                        let pos = window.position([n, 0]).unwrap();
                        row.push((pos as u32, entry_value(rate, 1, *x, [n, 0])));
                    } else {
                        let dx = x[0] - n as f64;
                        let rem = (r * r - dx * dx).max(0.0).sqrt();
                        let m_lo = ((x[1] - rem).ceil() as i64).max(window.lo[1]);
                        let m_hi = ((x[1] + rem).floor() as i64).min(window.hi[1]);
                        for m in m_lo..=m_hi {
                            let pos = window.position([n, m]).unwrap();
                            row.push((pos as u32, entry_value(rate, 2, *x, [n, m])));
                        }
                    }
                }
                row
            })
            .collect();
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        row_ptr.push(0);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for row in rows {
            for (c, v) in row {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Ok(SamplingMatrix { a, scale, dim, samples: samples.to_vec(), window, sample_margin: None, row_ptr, cols, vals })
    }

    /// 1D convenience wrapper.
    pub fn assemble_1d(a: f64, scale: f64, samples: &[f64], window: IndexBox) -> Result<Self> {
        let s: Vec<[f64; 2]> = samples.iter().map(|&x| [x, 0.0]).collect();
        Self::assemble(a, scale, 1, &s, window)
    }

    pub fn with_sample_margin(mut self, m: f64) -> Self {
        self.sample_margin = Some(m);
        self
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> usize {
        self.samples.len()
    }

    pub fn cols(&self) -> usize {
        self.window.len()
    }

    pub fn window(&self) -> IndexBox {
        self.window
    }

    pub fn samples(&self) -> &[[f64; 2]] {
        &self.samples
    }

    pub fn sample_margin(&self) -> Option<f64> {
        self.sample_margin
    }

    /// Entry by row and coefficient index, from the defining formula.
    pub fn entry(&self, row: usize, idx: [i64; 2]) -> f64 {
        entry_value(self.a * self.scale * self.scale, self.dim, self.samples[row], idx)
    }

    /// Stored sparse entries of a row as `(column position, value)`.
    pub fn row_entries(&self, row: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[row]..self.row_ptr[row + 1];
        self.cols[r.clone()].iter().map(|&c| c as usize).zip(self.vals[r].iter().copied())
    }

    /// Dense matrix on a subset of column positions (all columns if `None`).
    pub fn dense(&self, cols: Option<&[usize]>) -> DMatrix<f64> {
        let idx = self.window.indices();
        let sel: Vec<[i64; 2]> = match cols {
            Some(c) => c.iter().map(|&k| idx[k]).collect(),
            None => idx,
        };
        let rate = self.a * self.scale * self.scale;
        DMatrix::from_fn(self.rows(), sel.len(), |i, j| entry_value(rate, self.dim, self.samples[i], sel[j]))
    }

    /// `y = M x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, out) in y.iter_mut().enumerate() {
            *out = self.row_entries(i).map(|(c, v)| v * x[c]).sum();
        }
    }

    /// `y = M^T x`.
    pub fn rmatvec(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (i, &xi) in x.iter().enumerate() {
            for (c, v) in self.row_entries(i) {
                y[c] += v * xi;
            }
        }
    }

    /// Dense text export: header `rows cols`, then one row per line.
    pub fn to_dense_text(&self) -> String {
        let d = self.dense(None);
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", d.nrows(), d.ncols());
        for i in 0..d.nrows() {
            let row: Vec<String> = (0..d.ncols()).map(|j| format!("{:e}", d[(i, j)])).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        s
    }

    /// Banded Gram matrix `M_S^T M_S` for the column positions `sel` (in that order).
    fn banded_gram(&self, sel: &[usize]) -> SymBand {
        let mut map = vec![usize::MAX; self.cols()];
        for (k, &c) in sel.iter().enumerate() {
            map[c] = k;
        }
        let mut bw = 0;
        let mut row_buf: Vec<(usize, f64)> = Vec::new();
        for i in 0..self.rows() {
            let mut lo = usize::MAX;
            let mut hi = 0;
            for (c, _) in self.row_entries(i) {
                let k = map[c];
                if k != usize::MAX {
                    lo = lo.min(k);
                    hi = hi.max(k);
                }
            }
            if lo != usize::MAX {
                bw = bw.max(hi - lo);
            }
        }
        let mut g = SymBand::zeros(sel.len(), bw);
        for i in 0..self.rows() {
            row_buf.clear();
            row_buf.extend(self.row_entries(i).filter_map(|(c, v)| (map[c] != usize::MAX).then(|| (map[c], v))));
            for (ia, &(ka, va)) in row_buf.iter().enumerate() {
                for &(kb, vb) in &row_buf[..=ia] {
                    g.add(ka, kb, va * vb);
                }
            }
        }
        g
    }
}

/// How the lower bound was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowerBoundMethod {
    DenseSvd,
    ExtendedJacobi,
    BandedGram,
}

impl std::fmt::Display for LowerBoundMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LowerBoundMethod::DenseSvd => "dense-svd",
            LowerBoundMethod::ExtendedJacobi => "extended-jacobi",
            LowerBoundMethod::BandedGram => "banded-gram",
        })
    }
}

/// Finite-section sampling constants.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameBoundsEstimate {
    pub a_est: f64,
    pub b_est: f64,
    pub interior: IndexBox,
    pub window: IndexBox,
    pub rows: usize,
    pub method: LowerBoundMethod,
    /// Smallest positive `A_est` the method can distinguish from zero.
    pub resolution: f64,
    /// `false` when the true value lies below `resolution` and `a_est` was set to 0.
    pub resolved: bool,
}

impl FrameBoundsEstimate {
    /// `B_est / A_est` (infinite when `A_est = 0`).
    pub fn condition(&self) -> f64 {
        if self.a_est > 0.0 {
            self.b_est / self.a_est
        } else {
            f64::INFINITY
        }
    }
}

fn extended_smin(m: &SamplingMatrix, sel: &[usize]) -> f64 {
    let idx = m.window.indices();
    let cols: Vec<Vec<Dd>> = sel
        .iter()
        .map(|&k| m.samples.iter().map(|x| entry_dd(m.a, m.scale, m.dim, *x, idx[k])).collect())
        .collect();
    let sv = singular_values_dd(cols);
    sv.last().map(|s| s.to_f64()).unwrap_or(0.0)
}

/// Largest eigenvalue of `M^T M`.
fn gram_top(m: &SamplingMatrix) -> f64 {
    if m.cols() <= EXTENDED_COLUMN_LIMIT {
        let d = m.dense(None);
        return d.svd(false, false).singular_values.iter().cloned().fold(0.0, f64::max).powi(2);
    }
    let r = largest_eigenvalue(
        m.cols(),
        |x, y| {
            let mut t = vec![0.0; m.rows()];
            m.matvec(x, &mut t);
            m.rmatvec(&t, y);
        },
        1e-10,
        300,
    );
    r.value
}

/// Estimate `(A, B)` with the lower bound taken over coefficients at least
/// `interior_margin` steps inside the coefficient window.
pub fn estimate_bounds(m: &SamplingMatrix, interior_margin: i64) -> Result<FrameBoundsEstimate> {
    if interior_margin < 0 {
        return invalid("interior margin must be nonnegative");
    }
    let interior = m.window.shrink(interior_margin);
    if interior.is_empty() {
        return Err(Error::Precondition(format!("interior window empty after shrinking by {interior_margin}")));
    }
    let sel: Vec<usize> = interior.indices().into_iter().map(|i| m.window.position(i).unwrap()).collect();
    let b_est = gram_top(m);
    let k = sel.len();
    let rows = m.rows();
    let (a_est, method, resolution, resolved) = if k <= DENSE_COLUMN_LIMIT {
        let d = m.dense(Some(&sel));
        let sv = d.svd(false, false).singular_values;
        let smax = sv.iter().cloned().fold(0.0, f64::max);
        let smin = if rows < k { 0.0 } else { sv.iter().cloned().fold(f64::INFINITY, f64::min) };
        let tol = rows.max(k) as f64 * EPS * smax;
        if smin > tol {
            (smin * smin, LowerBoundMethod::DenseSvd, tol * tol, true)
        } else if k <= EXTENDED_COLUMN_LIMIT && rows >= k {
            let s = extended_smin(m, &sel);
            let tol_dd = rows.max(k) as f64 * DD_EPS * smax;
            if s > tol_dd {
                (s * s, LowerBoundMethod::ExtendedJacobi, tol_dd * tol_dd, true)
            } else {
                (0.0, LowerBoundMethod::ExtendedJacobi, tol_dd * tol_dd, false)
            }
        } else {
            (0.0, LowerBoundMethod::DenseSvd, tol * tol, false)
        }
    } else {
        let g = m.banded_gram(&sel);
        let top = largest_eigenvalue(k, |x, y| g.matvec(x, y), 1e-10, 300).value;
        let tol = k as f64 * EPS * top;
        match g.cholesky() {
            None => (0.0, LowerBoundMethod::BandedGram, tol, false),
            Some(ch) => {
                let inv = largest_eigenvalue(
                    k,
                    |x, y| {
                        y.copy_from_slice(x);
                        ch.solve(y);
                    },
                    1e-10,
                    300,
                );
                let lam = 1.0 / inv.value;
                if lam > tol {
                    (lam, LowerBoundMethod::BandedGram, tol, true)
                } else {
                    (0.0, LowerBoundMethod::BandedGram, tol, false)
                }
            }
        }
    };
    Ok(FrameBoundsEstimate { a_est, b_est, interior, window: m.window, rows, method, resolution, resolved })
}

/// Sample locations for a growing sequence of windows.
#[derive(Debug, Clone)]
pub enum PointSource {
    Line(PointSet1D),
    Slanted(SlantedConfig),
}

impl PointSource {
    pub fn dim(&self) -> usize {
        match self {
            PointSource::Line(_) => 1,
            PointSource::Slanted(_) => 2,
        }
    }

    /// Points in `[-r, r]^dim`.
    pub fn points(&self, r: f64) -> Vec<[f64; 2]> {
        match self {
            PointSource::Line(s) => s.points(Interval::symmetric(r)).into_iter().map(|x| [x, 0.0]).collect(),
            PointSource::Slanted(c) => c.build(&Rect::square(r)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendRow {
    pub n: i64,
    pub estimate: FrameBoundsEstimate,
    /// `A_est(N) / A_est(previous N)`.
    pub ratio_prev: Option<f64>,
}

/// Bounds across growing windows.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendTable {
    pub rows: Vec<TrendRow>,
}

fn ratio(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        if a == 0.0 {
            f64::NAN
        } else {
            f64::INFINITY
        }
    } else {
        a / b
    }
}

/// Format a float for CSV output.
pub fn csv_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:e}")
    }
}

impl TrendTable {
    pub fn from_estimates(list: Vec<(i64, FrameBoundsEstimate)>) -> Self {
        let mut rows: Vec<TrendRow> = Vec::new();
        for (n, e) in list {
            let ratio_prev = rows.last().map(|r| ratio(e.a_est, r.estimate.a_est));
            rows.push(TrendRow { n, estimate: e, ratio_prev });
        }
        TrendTable { rows }
    }

    pub fn a_values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.estimate.a_est).collect()
    }

    /// Largest consecutive ratio `max(A_i/A_{i-1}, A_{i-1}/A_i)`.
    pub fn max_consecutive_ratio(&self) -> f64 {
        self.rows
            .iter()
            .filter_map(|r| r.ratio_prev)
            .map(|q| if q.is_nan() { f64::NAN } else { q.max(1.0 / q) })
            .fold(1.0, |m: f64, q| if q.is_nan() || m.is_nan() { f64::NAN } else { m.max(q) })
    }

    /// `max A / min A` over the table (infinite if some `A` is 0).
    pub fn spread(&self) -> f64 {
        let a = self.a_values();
        let mx = a.iter().cloned().fold(0.0, f64::max);
        let mn = a.iter().cloned().fold(f64::INFINITY, f64::min);
        ratio(mx, mn)
    }

    /// `A_first / A_last`.
    pub fn decay_factor(&self) -> f64 {
        let a = self.a_values();
        ratio(a[0], *a.last().unwrap())
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.a_values().windows(2).all(|w| w[1] < w[0])
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("N,A_est,B_est,ratio_prev\n");
        for r in &self.rows {
            let rp = r.ratio_prev.map(csv_float).unwrap_or_default();
            let _ = writeln!(s, "{},{},{},{}", r.n, csv_float(r.estimate.a_est), csv_float(r.estimate.b_est), rp);
        }
        s
    }
}

/// Bounds for windows `[-N, N]^dim` with samples in `[-N-margin, N+margin]^dim`.
pub fn bound_trend(source: &PointSource, a: f64, n_list: &[i64], margin: i64) -> Result<TrendTable> {
    if n_list.len() < 3 {
        return Err(Error::Precondition("bound trend needs at least three window sizes".into()));
    }
    bound_trend_with(source.dim(), a, 1.0, n_list, margin, |n| source.points((n + margin) as f64))
}

/// Same as [`bound_trend`] with a caller-supplied sample generator.
pub fn bound_trend_with<F>(dim: usize, a: f64, scale: f64, n_list: &[i64], margin: i64, samples: F) -> Result<TrendTable>
where
    F: Fn(i64) -> Vec<[f64; 2]>,
{
    if n_list.is_empty() || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition("window sizes must be increasing".into()));
    }
    let mut out = Vec::new();
    for &n in n_list {
        let pts = samples(n);
        let m = SamplingMatrix::assemble(a, scale, dim, &pts, IndexBox::centered(dim, n))?.with_sample_margin(margin as f64);
        out.push((n, estimate_bounds(&m, margin)?));
    }
    Ok(TrendTable::from_estimates(out))
}

/// Least-squares coefficients and residual.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub coeffs: CoeffGrid,
    pub residual: f64,
}

/// Minimize `||M c - values||_2`.
pub fn reconstruct(m: &SamplingMatrix, values: &[f64]) -> Result<Reconstruction> {
    if values.len() != m.rows() {
        return invalid(format!("{} sample values for {} rows", values.len(), m.rows()));
    }
    if m.vals.iter().all(|v| *v == 0.0) {
        return Err(Error::Rank("sampling matrix is zero".into()));
    }
    let n = m.cols();
    let c: Vec<f64> = if n <= DENSE_COLUMN_LIMIT {
        let d = m.dense(None);
        let svd = d.svd(true, true);
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let b = DVector::from_column_slice(values);
        let x = svd.solve(&b, m.rows().max(n) as f64 * EPS * smax).map_err(|e| Error::Rank(e.to_string()))?;
        x.iter().copied().collect()
    } else {
        let all: Vec<usize> = (0..n).collect();
        let g = m.banded_gram(&all);
        let ch = g.cholesky().ok_or_else(|| Error::Rank("normal equations are not positive definite".into()))?;
        let mut rhs = vec![0.0; n];
        m.rmatvec(values, &mut rhs);
        ch.solve(&mut rhs);
        let mut x = rhs;
        for _ in 0..2 {
            let mut r = vec![0.0; m.rows()];
            m.matvec(&x, &mut r);
            r.iter_mut().zip(values).for_each(|(ri, v)| *ri = v - *ri);
            let mut d = vec![0.0; n];
            m.rmatvec(&r, &mut d);
            ch.solve(&mut d);
            x.iter_mut().zip(&d).for_each(|(a, b)| *a += b);
        }
        x
    };
    let mut r = vec![0.0; m.rows()];
    m.matvec(&c, &mut r);
    let residual = r.iter().zip(values).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let coeffs = CoeffGrid::new(m.window, c.into_iter().map(|v| Complex64::new(v, 0.0)).collect(), Exponent::Finite(2.0))?;
    Ok(Reconstruction { coeffs, residual })
}
