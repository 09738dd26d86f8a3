//! Closed intervals and axis-aligned rectangles used as query windows.

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn symmetric(r: f64) -> Self {
        Interval { lo: -r, hi: r }
    }

    pub fn is_empty(&self) -> bool {
        !(self.lo <= self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn inflate(&self, d: f64) -> Self {
        Interval { lo: self.lo - d, hi: self.hi + d }
    }

    pub fn intersect(&self, o: &Interval) -> Interval {
        Interval { lo: self.lo.max(o.lo), hi: self.hi.min(o.hi) }
    }

    /// Nodes `lo + i*step` for `i = 0..=floor(len/step)`.
    pub fn grid(&self, step: f64) -> Vec<f64> {
        let n = (self.len() / step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.lo + i as f64 * step).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x: Interval,
    pub y: Interval,
}

impl Rect {
    pub fn new(x: Interval, y: Interval) -> Self {
        Rect { x, y }
    }

    pub fn square(r: f64) -> Self {
        Rect { x: Interval::symmetric(r), y: Interval::symmetric(r) }
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty() || self.y.is_empty()
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        self.x.contains(p[0]) && self.y.contains(p[1])
    }

    pub fn inflate(&self, d: f64) -> Self {
        Rect { x: self.x.inflate(d), y: self.y.inflate(d) }
    }

    /// Largest distance from the origin to a corner.
    pub fn radius(&self) -> f64 {
        let mx = self.x.lo.abs().max(self.x.hi.abs());
        let my = self.y.lo.abs().max(self.y.hi.abs());
        mx.hypot(my)
    }

    pub fn area(&self) -> f64 {
        self.x.len() * self.y.len()
    }
}

/// A query window in one or two dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Window {
    D1(Interval),
    D2(Rect),
}

impl Window {
    pub fn dim(&self) -> usize {
        match self {
            Window::D1(_) => 1,
            Window::D2(_) => 2,
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            Window::D1(i) => i.is_empty(),
            Window::D2(r) => r.is_empty(),
        }
    }

    /// Grid nodes as flat coordinate vectors (length 1 or 2 each).
    pub fn grid(&self, step: f64) -> Result<Vec<Vec<f64>>> {
        if self.is_empty() {
            return invalid("empty window");
        }
        if !(step > 0.0) {
            return invalid("grid step must be positive");
        }
        Ok(match self {
            Window::D1(i) => i.grid(step).into_iter().map(|x| vec![x]).collect(),
            Window::D2(r) => {
                let xs = r.x.grid(step);
                let ys = r.y.grid(step);
                let mut out = Vec::with_capacity(xs.len() * ys.len());
                for &x in &xs {
                    for &y in &ys {
                        out.push(vec![x, y]);
                    }
                }
                out
            }
        })
    }
}

/// Integer box of coefficient indices, inclusive bounds. In 1D the second axis is `0..=0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IndexBox {
    pub dim: usize,
    pub lo: [i64; 2],
    pub hi: [i64; 2],
}

impl IndexBox {
    pub fn d1(lo: i64, hi: i64) -> Self {
        IndexBox { dim: 1, lo: [lo, 0], hi: [hi, 0] }
    }

    pub fn d2(n_lo: i64, n_hi: i64, m_lo: i64, m_hi: i64) -> Self {
        IndexBox { dim: 2, lo: [n_lo, m_lo], hi: [n_hi, m_hi] }
    }

    /// Symmetric box `[-n, n]^dim`.
    pub fn centered(dim: usize, n: i64) -> Self {
        if dim == 1 {
            Self::d1(-n, n)
        } else {
            Self::d2(-n, n, -n, n)
        }
    }

    pub fn is_empty(&self) -> bool {
        self.hi[0] < self.lo[0] || self.hi[1] < self.lo[1]
    }

    pub fn extent(&self, axis: usize) -> usize {
        if self.hi[axis] < self.lo[axis] {
            0
        } else {
            (self.hi[axis] - self.lo[axis] + 1) as usize
        }
    }

    pub fn len(&self) -> usize {
        self.extent(0) * self.extent(1)
    }

    pub fn shrink(&self, k: i64) -> Self {
        let mut b = *self;
        b.lo[0] += k;
        b.hi[0] -= k;
        if self.dim == 2 {
            b.lo[1] += k;
            b.hi[1] -= k;
        }
        b
    }

    pub fn contains(&self, idx: [i64; 2]) -> bool {
        idx[0] >= self.lo[0] && idx[0] <= self.hi[0] && idx[1] >= self.lo[1] && idx[1] <= self.hi[1]
    }

    /// Row-major position of an index (first axis outer).
    pub fn position(&self, idx: [i64; 2]) -> Option<usize> {
        if !self.contains(idx) {
            return None;
        }
        let i = (idx[0] - self.lo[0]) as usize;
        let j = (idx[1] - self.lo[1]) as usize;
        Some(i * self.extent(1) + j)
    }

    /// Indices in lexicographic order.
    pub fn indices(&self) -> Vec<[i64; 2]> {
        let mut out = Vec::with_capacity(self.len());
        for n in self.lo[0]..=self.hi[0] {
            for m in self.lo[1]..=self.hi[1] {
                out.push([n, m]);
            }
        }
        out
    }
}
