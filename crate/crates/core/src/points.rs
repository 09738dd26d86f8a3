//! Separated point sets on the line, slanted planar configurations and line families.

use std::fmt;
use std::path::Path;

use crate::error::{invalid, Error, Result};
use crate::geometry::{Interval, Rect};

const MATCH_TOL: f64 = 1e-9;
const SCAN_HALF_WIDTH: f64 = 1000.0;

#[derive(Debug, Clone, PartialEq)]
pub enum Descriptor {
    /// `step * Z + offset`, step > 0.
    Progression { step: f64, offset: f64 },
    Union(Vec<PointSet1D>),
    /// Finite sorted list.
    Explicit(Vec<f64>),
    Puncture { base: Box<PointSet1D>, removed: Vec<f64> },
    /// `step * n + offset + offsets[n mod len]`.
    Perturb { step: f64, offset: f64, offsets: Vec<f64> },
}

/// A separated subset of the real line given by a generator descriptor.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet1D {
    desc: Descriptor,
    sep: f64,
}

impl PointSet1D {
    pub fn progression(step: f64, offset: f64) -> Result<Self> {
        if !(step.is_finite() && step != 0.0 && offset.is_finite()) {
            return invalid(format!("progression needs a finite nonzero step, got {step}"));
        }
        Ok(Self::finish(Descriptor::Progression { step: step.abs(), offset }))
    }

    pub fn integers() -> Self {
        Self::progression(1.0, 0.0).unwrap()
    }

    pub fn empty() -> Self {
        Self::finish(Descriptor::Explicit(Vec::new()))
    }

    pub fn explicit(mut pts: Vec<f64>) -> Result<Self> {
        if pts.iter().any(|x| !x.is_finite()) {
            return invalid("explicit points must be finite");
        }
        pts.sort_by(f64::total_cmp);
        for w in pts.windows(2) {
            if w[1] - w[0] <= MATCH_TOL {
                return invalid(format!("explicit points {} and {} coincide", w[0], w[1]));
            }
        }
        Ok(Self::finish(Descriptor::Explicit(pts)))
    }

    pub fn union(parts: Vec<PointSet1D>) -> Result<Self> {
        if parts.is_empty() {
            return Ok(Self::empty());
        }
        let s = Self::finish(Descriptor::Union(parts));
        if !(s.sep > 0.0) {
            return invalid("union is not separated");
        }
        Ok(s)
    }

    pub fn puncture(base: PointSet1D, removed: Vec<f64>) -> Result<Self> {
        if removed.iter().any(|x| !x.is_finite()) {
            return invalid("punctured points must be finite");
        }
        Ok(Self::finish(Descriptor::Puncture { base: Box::new(base), removed }))
    }

    pub fn perturb(step: f64, offset: f64, offsets: Vec<f64>) -> Result<Self> {
        if offsets.is_empty() {
            return invalid("perturbation needs at least one offset");
        }
        if !(step.is_finite() && step > 0.0) {
            return invalid("perturbation base must have a positive step");
        }
        let s = Self::finish(Descriptor::Perturb { step, offset, offsets });
        if !(s.sep > 0.0) {
            return invalid("perturbation offsets destroy separation");
        }
        Ok(s)
    }

    fn finish(desc: Descriptor) -> Self {
        let mut s = PointSet1D { desc, sep: f64::INFINITY };
        s.sep = s.compute_separation();
        s
    }

    pub fn descriptor(&self) -> &Descriptor {
        &self.desc
    }

    /// Separation constant: exact for progressions and perturbations, otherwise a scan
    /// over `[-1000, 1000]`. Infinite for sets with fewer than two points.
    pub fn separation_constant(&self) -> f64 {
        self.sep
    }

    fn compute_separation(&self) -> f64 {
        match &self.desc {
            Descriptor::Progression { step, .. } => *step,
            Descriptor::Perturb { step, offsets, .. } => {
                let l = offsets.len();
                (0..l).map(|i| step + offsets[(i + 1) % l] - offsets[i]).fold(f64::INFINITY, f64::min)
            }
            Descriptor::Explicit(p) => gap_min(p),
            _ => gap_min(&self.points(Interval::symmetric(SCAN_HALF_WIDTH))),
        }
    }

    /// Image under `x -> scale * x + shift`.
    pub fn affine(&self, scale: f64, shift: f64) -> Result<Self> {
        if !(scale.is_finite() && scale != 0.0 && shift.is_finite()) {
            return invalid("affine map needs a finite nonzero scale");
        }
        Ok(match &self.desc {
            Descriptor::Progression { step, offset } => Self::progression(step * scale, offset * scale + shift)?,
            Descriptor::Perturb { step, offset, offsets } => {
                let l = offsets.len();
                let new_offsets: Vec<f64> = if scale > 0.0 {
                    offsets.iter().map(|o| o * scale).collect()
                } else {
                    (0..l).map(|m| offsets[(l - m % l) % l] * scale).collect()
                };
                Self::finish(Descriptor::Perturb { step: step * scale.abs(), offset: offset * scale + shift, offsets: new_offsets })
            }
            Descriptor::Explicit(p) => Self::explicit(p.iter().map(|x| x * scale + shift).collect())?,
            Descriptor::Puncture { base, removed } => {
                Self::puncture(base.affine(scale, shift)?, removed.iter().map(|x| x * scale + shift).collect())?
            }
            Descriptor::Union(parts) => Self::finish(Descriptor::Union(parts.iter().map(|p| p.affine(scale, shift)).collect::<Result<_>>()?)),
        })
    }

    /// Translate by `shift`.
    pub fn translate(&self, shift: f64) -> Result<Self> {
        self.affine(1.0, shift)
    }

    /// Sorted points inside the closed window.
    pub fn points(&self, w: Interval) -> Vec<f64> {
        if w.is_empty() {
            return Vec::new();
        }
        let mut out = match &self.desc {
            Descriptor::Progression { step, offset } => {
                let lo = ((w.lo - offset) / step).floor() as i64 - 1;
                let hi = ((w.hi - offset) / step).ceil() as i64 + 1;
                (lo..=hi).map(|n| step * n as f64 + offset).collect()
            }
            Descriptor::Perturb { step, offset, offsets } => {
                let omax = offsets.iter().fold(0.0f64, |m, o| m.max(o.abs()));
                let lo = ((w.lo - omax - offset) / step).floor() as i64 - 1;
                let hi = ((w.hi + omax - offset) / step).ceil() as i64 + 1;
                let l = offsets.len() as i64;
                (lo..=hi).map(|n| step * n as f64 + offset + offsets[n.rem_euclid(l) as usize]).collect()
            }
            Descriptor::Explicit(p) => p.clone(),
            Descriptor::Puncture { base, removed } => {
                let mut pts = base.points(w.inflate(1.0));
                pts.retain(|x| !removed.iter().any(|r| (x - r).abs() <= MATCH_TOL * (1.0 + r.abs())));
                pts
            }
            Descriptor::Union(parts) => {
                let mut all: Vec<f64> = parts.iter().flat_map(|p| p.points(w.inflate(1.0))).collect();
                all.sort_by(f64::total_cmp);
                all.dedup_by(|b, a| (*b - *a).abs() <= MATCH_TOL * (1.0 + a.abs()));
                all
            }
        };
        out.retain(|x| w.contains(*x));
        out.sort_by(f64::total_cmp);
        out
    }

    /// Minimum gap inside the window; exact for progressions.
    pub fn separation(&self, w: Interval) -> Result<f64> {
        let pts = self.points(w);
        if pts.len() < 2 {
            return Err(Error::UndefinedSeparation(format!("window [{}, {}] holds {} point(s)", w.lo, w.hi, pts.len())));
        }
        if let Descriptor::Progression { step, .. } = self.desc {
            return Ok(step);
        }
        Ok(gap_min(&pts))
    }

    /// Exact Beurling density when the descriptor determines it in closed form.
    pub fn exact_density(&self) -> Option<f64> {
        match &self.desc {
            Descriptor::Progression { step, .. } | Descriptor::Perturb { step, .. } => Some(1.0 / step),
            Descriptor::Explicit(_) => Some(0.0),
            Descriptor::Puncture { base, .. } => base.exact_density(),
            Descriptor::Union(_) => None,
        }
    }

    /// Sliding-window lower and upper density estimates.
    ///
    /// Windows `[x - R/2, x + R/2)` with centers on a grid of step `center_step`
    /// (default half the separation) over `[-span, span]`, `span` defaulting to the
    /// largest `R`.
    pub fn beurling_density(&self, r_list: &[f64], center_step: Option<f64>, span: Option<f64>) -> Result<DensityReport> {
        if r_list.is_empty() {
            return invalid("R list is empty");
        }
        if r_list.iter().any(|r| !(*r > 0.0)) || r_list.windows(2).any(|w| w[1] <= w[0]) {
            return invalid("R list must be positive and increasing");
        }
        let rmax = *r_list.last().unwrap();
        let span = span.unwrap_or(rmax);
        let h = center_step.unwrap_or_else(|| if self.sep.is_finite() { self.sep / 2.0 } else { rmax / 4.0 });
        if !(h > 0.0) {
            return invalid("center grid step must be positive");
        }
        let pts = self.points(Interval::symmetric(span + rmax / 2.0 + 1.0));
        let ncent = (2.0 * span / h).floor() as usize;
        let mut table = Vec::with_capacity(r_list.len());
        for &r in r_list {
            let mut lo = f64::INFINITY;
            let mut hi = 0.0f64;
            for i in 0..=ncent {
                let c = -span + i as f64 * h;
                let a = pts.partition_point(|&x| x < c - r / 2.0);
                let b = pts.partition_point(|&x| x < c + r / 2.0);
                let d = (b - a) as f64 / r;
                lo = lo.min(d);
                hi = hi.max(d);
            }
            table.push(DensityRow { r, lower: lo, upper: hi });
        }
        let last = *table.last().unwrap();
        let (lower, upper, exact) = match self.exact_density() {
            Some(d) => (d, d, true),
            None => (last.lower, last.upper, false),
        };
        Ok(DensityReport { lower, upper, exact, table })
    }

    /// Counting data `max(#[0,r), #(-r,0)) <= rho * r + k` over `r` up to `r_max`.
    ///
    /// `rho` is the largest ratio `count / r` over `r` in `[r_max/2, r_max]`; `k` the
    /// largest excess over all sampled `r`.
    pub fn counting_slope(&self, r_max: f64) -> (f64, f64) {
        let pts = self.points(Interval::symmetric(r_max));
        let zero = pts.partition_point(|&x| x < 0.0);
        let count = |r: f64| {
            let pos = pts.partition_point(|&x| x < r) - zero;
            let neg = zero - pts.partition_point(|&x| x <= -r);
            pos.max(neg) as f64
        };
        let step = if self.sep.is_finite() { (self.sep / 4.0).min(1.0) } else { 1.0 };
        let n = (r_max / step).ceil() as usize;
        let rs: Vec<f64> = (1..=n).map(|i| (i as f64 * step).min(r_max)).collect();
        let mut rho = 0.0f64;
        for &r in rs.iter().filter(|&&r| r >= r_max / 2.0) {
            rho = rho.max(count(r) / r);
        }
        for &x in pts.iter().filter(|x| x.abs() >= r_max / 2.0) {
            let r = x.abs() + 1e-12;
            if r <= r_max {
                rho = rho.max(count(r) / r);
            }
        }
        let mut k = 0.0f64;
        for &r in &rs {
            k = k.max(count(r) - rho * r);
        }
        for &x in &pts {
            let r = x.abs() + 1e-12;
            if r <= r_max {
                k = k.max(count(r) - rho * r);
            }
        }
        (rho, k)
    }

    /// Parse a descriptor such as `prog 0.9 0`, `union { prog 2 0 } { prog 2 0.5 }`,
    /// `puncture { prog 1 0 } 0`, `perturb { prog 1 0 } 0.1 -0.1` or `explicit 1 2 3`.
    /// `file=path` loads numbers from a file (one per line or whitespace separated).
    pub fn parse(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let toks = tokenize(text);
        let mut pos = 0;
        let s = parse_desc(&toks, &mut pos, base_dir)?;
        if pos != toks.len() {
            return Err(Error::Parse { line: 1, column: toks[pos].1, message: format!("unexpected token '{}'", toks[pos].0) });
        }
        Ok(s)
    }
}

fn gap_min(p: &[f64]) -> f64 {
    p.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

impl fmt::Display for PointSet1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.desc {
            Descriptor::Progression { step, offset } => write!(f, "prog {step} {offset}"),
            Descriptor::Union(parts) => {
                write!(f, "union")?;
                for p in parts {
                    write!(f, " {{ {p} }}")?;
                }
                Ok(())
            }
            Descriptor::Explicit(p) => {
                write!(f, "explicit")?;
                for x in p {
                    write!(f, " {x}")?;
                }
                Ok(())
            }
            Descriptor::Puncture { base, removed } => {
                write!(f, "puncture {{ {base} }}")?;
                for x in removed {
                    write!(f, " {x}")?;
                }
                Ok(())
            }
            Descriptor::Perturb { step, offset, offsets } => {
                write!(f, "perturb {{ prog {step} {offset} }}")?;
                for x in offsets {
                    write!(f, " {x}")?;
                }
                Ok(())
            }
        }
    }
}

/// One row of a density table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityRow {
    pub r: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityReport {
    pub lower: f64,
    pub upper: f64,
    pub exact: bool,
    pub table: Vec<DensityRow>,
}

fn tokenize(text: &str) -> Vec<(String, usize)> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut start = 0;
    for (i, ch) in text.char_indices() {
        if ch == '{' || ch == '}' || ch.is_whitespace() {
            if !cur.is_empty() {
                out.push((std::mem::take(&mut cur), start + 1));
            }
            if ch != ' ' && !ch.is_whitespace() {
                out.push((ch.to_string(), i + 1));
            }
        } else {
            if cur.is_empty() {
                start = i;
            }
            cur.push(ch);
        }
    }
    if !cur.is_empty() {
        out.push((cur, start + 1));
    }
    out
}

fn perr(col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line: 1, column: col, message: msg.into() }
}

fn parse_num(tok: &(String, usize)) -> Result<f64> {
    tok.0.parse::<f64>().map_err(|_| perr(tok.1, format!("expected a number, found '{}'", tok.0)))
}

fn read_numbers(path: &str, base: Option<&Path>, col: usize) -> Result<Vec<f64>> {
    let p = match base {
        Some(b) if Path::new(path).is_relative() => b.join(path),
        _ => Path::new(path).to_path_buf(),
    };
    let text = std::fs::read_to_string(&p).map_err(|e| perr(col, format!("cannot read {}: {e}", p.display())))?;
    let mut v = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        for (k, t) in line.split_whitespace().enumerate() {
            v.push(t.parse::<f64>().map_err(|_| Error::Parse { line: ln + 1, column: k + 1, message: format!("bad number '{t}' in {}", p.display()) })?);
        }
    }
    Ok(v)
}

fn trailing_numbers(toks: &[(String, usize)], pos: &mut usize, base: Option<&Path>) -> Result<Vec<f64>> {
    let mut v = Vec::new();
    while *pos < toks.len() && toks[*pos].0 != "}" && toks[*pos].0 != "{" {
        let t = &toks[*pos];
        if let Some(path) = t.0.strip_prefix("file=") {
            v.extend(read_numbers(path, base, t.1)?);
        } else if t.0.parse::<f64>().is_ok() {
            v.push(parse_num(t)?);
        } else {
            break;
        }
        *pos += 1;
    }
    Ok(v)
}

fn braced(toks: &[(String, usize)], pos: &mut usize, base: Option<&Path>) -> Result<PointSet1D> {
    let col = toks.get(*pos).map(|t| t.1).unwrap_or(0);
    if toks.get(*pos).map(|t| t.0.as_str()) != Some("{") {
        return Err(perr(col, "expected '{'"));
    }
    *pos += 1;
    let inner = parse_desc(toks, pos, base)?;
    if toks.get(*pos).map(|t| t.0.as_str()) != Some("}") {
        return Err(perr(toks.get(*pos).map(|t| t.1).unwrap_or(col), "expected '}'"));
    }
    *pos += 1;
    Ok(inner)
}

fn parse_desc(toks: &[(String, usize)], pos: &mut usize, base: Option<&Path>) -> Result<PointSet1D> {
    let Some(head) = toks.get(*pos) else {
        return Err(perr(1, "empty descriptor"));
    };
    let col = head.1;
    *pos += 1;
    let wrap = |r: Result<PointSet1D>| r.map_err(|e| match e {
        Error::Parse { .. } => e,
        other => perr(col, other.to_string()),
    });
    match head.0.as_str() {
        "prog" => {
            let a = parse_num(toks.get(*pos).ok_or_else(|| perr(col, "prog needs alpha beta"))?)?;
            let b = parse_num(toks.get(*pos + 1).ok_or_else(|| perr(col, "prog needs alpha beta"))?)?;
            *pos += 2;
            wrap(PointSet1D::progression(a, b))
        }
        "empty" => Ok(PointSet1D::empty()),
        "explicit" => {
            let v = trailing_numbers(toks, pos, base)?;
            wrap(PointSet1D::explicit(v))
        }
        "union" => {
            let mut parts = Vec::new();
            while toks.get(*pos).map(|t| t.0.as_str()) == Some("{") {
                parts.push(braced(toks, pos, base)?);
            }
            wrap(PointSet1D::union(parts))
        }
        "puncture" => {
            let b = braced(toks, pos, base)?;
            let v = trailing_numbers(toks, pos, base)?;
            wrap(PointSet1D::puncture(b, v))
        }
        "perturb" => {
            let b = braced(toks, pos, base)?;
            let v = trailing_numbers(toks, pos, base)?;
            match b.desc {
                Descriptor::Progression { step, offset } => wrap(PointSet1D::perturb(step, offset, v)),
                _ => Err(perr(col, "perturbation requires a progression base")),
            }
        }
        other => Err(perr(col, format!("unknown descriptor '{other}'"))),
    }
}

/// Integer greatest common divisor.
pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// The rotated product `R (Gamma1 / sigma x sigma Gamma2)` with
/// `R = [[p, -q], [q, p]] / sigma`, `sigma = sqrt(p^2 + q^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlantedConfig {
    p: i64,
    q: i64,
    g1: PointSet1D,
    g2: PointSet1D,
    sigma: f64,
}

impl SlantedConfig {
    pub fn new(p: i64, q: i64, g1: PointSet1D, g2: PointSet1D) -> Result<Self> {
        if p == 0 && q == 0 {
            return invalid("p and q cannot both vanish");
        }
        if gcd(p, q) != 1 {
            return invalid(format!("p={p} and q={q} are not coprime"));
        }
        let sigma = ((p * p + q * q) as f64).sqrt();
        let c = SlantedConfig { p, q, g1, g2, sigma };
        let r = c.rotation();
        let mut resid = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                let d = r[0][i] * r[0][j] + r[1][i] * r[1][j] - if i == j { 1.0 } else { 0.0 };
                resid = resid.max(d.abs());
            }
        }
        assert!(resid <= 1e-15, "rotation not orthogonal: {resid}");
        Ok(c)
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn gamma1(&self) -> &PointSet1D {
        &self.g1
    }

    pub fn gamma2(&self) -> &PointSet1D {
        &self.g2
    }

    pub fn rotation(&self) -> [[f64; 2]; 2] {
        let (p, q, s) = (self.p as f64, self.q as f64, self.sigma);
        [[p / s, -q / s], [q / s, p / s]]
    }

    /// The point `R (g1 / sigma, sigma g2)`.
    pub fn point(&self, g1: f64, g2: f64) -> [f64; 2] {
        let (p, q, s) = (self.p as f64, self.q as f64, self.sigma);
        let u1 = g1 / s;
        let u2 = s * g2;
        [(p * u1 - q * u2) / s, (q * u1 + p * u2) / s]
    }

    /// `((p x + q y) / sigma^2, (p y - q x) / sigma^2)`, recovering `(g1 / sigma^2, g2)`.
    pub fn invert(&self, pt: [f64; 2]) -> [f64; 2] {
        let (p, q) = (self.p as f64, self.q as f64);
        let s2 = (self.p * self.p + self.q * self.q) as f64;
        [(p * pt[0] + q * pt[1]) / s2, (p * pt[1] - q * pt[0]) / s2]
    }

    /// All generated points inside `w`, ordered by `(g1, g2)`.
    pub fn build(&self, w: &Rect) -> Vec<[f64; 2]> {
        if w.is_empty() {
            return Vec::new();
        }
        let corners = [[w.x.lo, w.y.lo], [w.x.lo, w.y.hi], [w.x.hi, w.y.lo], [w.x.hi, w.y.hi]];
        let (p, q, s) = (self.p as f64, self.q as f64, self.sigma);
        let mut g1r = Interval::new(f64::INFINITY, f64::NEG_INFINITY);
        let mut g2r = g1r;
        for c in corners {
            // g1 = p x + q y, g2 = (p y - q x) / sigma^2
            let g1 = p * c[0] + q * c[1];
            let g2 = (p * c[1] - q * c[0]) / (s * s);
            g1r = Interval::new(g1r.lo.min(g1), g1r.hi.max(g1));
            g2r = Interval::new(g2r.lo.min(g2), g2r.hi.max(g2));
        }
        let m1 = 1e-9 * (1.0 + g1r.lo.abs().max(g1r.hi.abs()));
        let m2 = 1e-9 * (1.0 + g2r.lo.abs().max(g2r.hi.abs()));
        let a = self.g1.points(g1r.inflate(m1));
        let b = self.g2.points(g2r.inflate(m2));
        let mut out = Vec::new();
        for &x in &a {
            for &y in &b {
                let pt = self.point(x, y);
                if w.contains(pt) {
                    out.push(pt);
                }
            }
        }
        out
    }

    /// The same set written with rotation indices `(q, -p)` and slots
    /// `(-sigma^2 Gamma2, Gamma1 / sigma^2)`.
    pub fn alternative_representation(&self) -> Result<Self> {
        let s2 = (self.p * self.p + self.q * self.q) as f64;
        SlantedConfig::new(self.q, -self.p, self.g2.affine(-s2, 0.0)?, self.g1.affine(1.0 / s2, 0.0)?)
    }

    /// `Lambda + (u, v)`.
    pub fn translate(&self, shift: [f64; 2]) -> Result<Self> {
        let (p, q) = (self.p as f64, self.q as f64);
        let s2 = (self.p * self.p + self.q * self.q) as f64;
        let (u, v) = (shift[0], shift[1]);
        SlantedConfig::new(self.p, self.q, self.g1.translate(p * u + q * v)?, self.g2.translate((p * v - q * u) / s2)?)
    }

    /// `-Lambda`.
    pub fn negate(&self) -> Result<Self> {
        SlantedConfig::new(self.p, self.q, self.g1.affine(-1.0, 0.0)?, self.g2.affine(-1.0, 0.0)?)
    }
}

/// Direction of a family of parallel lines, given by its unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Direction {
    /// Normal proportional to `(p, q)`.
    Rational { p: i64, q: i64 },
    /// Normal proportional to `(1, ratio)`, declared irrational by the caller.
    Irrational { ratio: f64 },
}

/// Lines `{x : x . v = gamma}` for `gamma` in a point set.
#[derive(Debug, Clone, PartialEq)]
pub struct LineFamily {
    direction: Direction,
    offsets: PointSet1D,
}

/// Part of the line `x . v = gamma` inside a window: `gamma v + t v_perp`, `t` in `[t0, t1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub gamma: f64,
    pub t0: f64,
    pub t1: f64,
}

impl LineFamily {
    pub fn new(direction: Direction, offsets: PointSet1D) -> Result<Self> {
        match direction {
            Direction::Rational { p, q } => {
                if (p == 0 && q == 0) || gcd(p, q) != 1 {
                    return invalid(format!("slope ({p},{q}) must be a coprime pair"));
                }
            }
            Direction::Irrational { ratio } => {
                if !ratio.is_finite() {
                    return invalid("irrational slope must be finite");
                }
            }
        }
        Ok(LineFamily { direction, offsets })
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn offsets(&self) -> &PointSet1D {
        &self.offsets
    }

    /// Unit normal `v`.
    pub fn normal(&self) -> [f64; 2] {
        match self.direction {
            Direction::Rational { p, q } => {
                let s = ((p * p + q * q) as f64).sqrt();
                [p as f64 / s, q as f64 / s]
            }
            Direction::Irrational { ratio } => {
                let s = (1.0 + ratio * ratio).sqrt();
                [1.0 / s, ratio / s]
            }
        }
    }

    /// Unit tangent `v_perp = (-v_y, v_x)`.
    pub fn tangent(&self) -> [f64; 2] {
        let v = self.normal();
        [-v[1], v[0]]
    }

    /// `sqrt(p^2 + q^2)` for rational directions, `None` (infinite) otherwise.
    pub fn sigma(&self) -> Option<f64> {
        match self.direction {
            Direction::Rational { p, q } => Some(((p * p + q * q) as f64).sqrt()),
            Direction::Irrational { .. } => None,
        }
    }

    pub fn point(&self, gamma: f64, t: f64) -> [f64; 2] {
        let v = self.normal();
        let w = self.tangent();
        [gamma * v[0] + t * w[0], gamma * v[1] + t * w[1]]
    }

    /// Clipped segments of all lines meeting `w`.
    pub fn segments(&self, w: &Rect) -> Vec<Segment> {
        let v = self.normal();
        let tv = self.tangent();
        let corners = [[w.x.lo, w.y.lo], [w.x.lo, w.y.hi], [w.x.hi, w.y.lo], [w.x.hi, w.y.hi]];
        let proj: Vec<f64> = corners.iter().map(|c| c[0] * v[0] + c[1] * v[1]).collect();
        let lo = proj.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = proj.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut out = Vec::new();
        for g in self.offsets.points(Interval::new(lo, hi)) {
            let mut t0 = f64::NEG_INFINITY;
            let mut t1 = f64::INFINITY;
            let base = [g * v[0], g * v[1]];
            let ax = [w.x, w.y];
            let mut ok = true;
            for k in 0..2 {
                if tv[k].abs() < 1e-15 {
                    if !ax[k].contains(base[k]) {
                        ok = false;
                    }
                } else {
                    let a = (ax[k].lo - base[k]) / tv[k];
                    let b = (ax[k].hi - base[k]) / tv[k];
                    t0 = t0.max(a.min(b));
                    t1 = t1.min(a.max(b));
                }
            }
            if ok && t1 > t0 {
                out.push(Segment { gamma: g, t0, t1 });
            }
        }
        out
    }
}
