//! Bounded time scales, their computational grids and Δ/∇ calculus.
//!
//! A [`TimeScale`] is stored exactly as an ordered list of closed intervals
//! and isolated points. [`TimeScale::discretize`] replaces every interval by a
//! uniform sub-grid; the result is a [`Grid`], which is itself a (finite) time
//! scale and on which all calculus is exact arithmetic.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Interval { lo: f64, hi: f64 },
    Point(f64),
}

impl Segment {
    pub fn start(&self) -> f64 {
        match *self {
            Segment::Interval { lo, .. } => lo,
            Segment::Point(t) => t,
        }
    }

    pub fn end(&self) -> f64 {
        match *self {
            Segment::Interval { hi, .. } => hi,
            Segment::Point(t) => t,
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        match *self {
            Segment::Interval { lo, hi } => lo <= t && t <= hi,
            Segment::Point(p) => p == t,
        }
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Segment::Interval { lo, hi } => write!(f, "[{lo},{hi}]"),
            Segment::Point(t) => write!(f, "{t}"),
        }
    }
}

/// A bounded time scale: a finite union of disjoint closed intervals and
/// isolated points, listed left to right.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeScale {
    segments: Vec<Segment>,
}

impl TimeScale {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidTimeScale("no segments".into()));
        }
        for seg in &segments {
            match *seg {
                Segment::Interval { lo, hi } => {
                    if !(lo.is_finite() && hi.is_finite()) {
                        return Err(Error::InvalidTimeScale(format!(
                            "interval [{lo},{hi}] has a non-finite endpoint"
                        )));
                    }
                    if lo >= hi {
                        return Err(Error::InvalidTimeScale(format!(
                            "interval [{lo},{hi}] must have positive length"
                        )));
                    }
                }
                Segment::Point(t) if !t.is_finite() => {
                    return Err(Error::InvalidTimeScale(format!("point {t} is not finite")));
                }
                Segment::Point(_) => {}
            }
        }
        for pair in segments.windows(2) {
            if pair[0].end() >= pair[1].start() {
                return Err(Error::InvalidTimeScale(format!(
                    "segments {} and {} are not strictly increasing and separated",
                    pair[0], pair[1]
                )));
            }
        }
        let ts = TimeScale { segments };
        if ts.start() >= ts.end() {
            return Err(Error::InvalidTimeScale(
                "a time scale needs two distinct endpoints".into(),
            ));
        }
        // Interior (a, b) ∩ T is empty only for a two-point set.
        if ts.segments.len() == 2 && ts.segments.iter().all(|s| matches!(s, Segment::Point(_))) {
            return Err(Error::EmptyInterior);
        }
        Ok(ts)
    }

    /// Shorthand for a purely discrete time scale.
    pub fn discrete(points: &[f64]) -> Result<Self> {
        Self::new(points.iter().map(|&t| Segment::Point(t)).collect())
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![Segment::Interval { lo, hi }])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Least element `a`.
    pub fn start(&self) -> f64 {
        self.segments[0].start()
    }

    /// Greatest element `b`.
    pub fn end(&self) -> f64 {
        self.segments[self.segments.len() - 1].end()
    }

    pub fn width(&self) -> f64 {
        self.end() - self.start()
    }

    pub fn is_discrete(&self) -> bool {
        self.segments.iter().all(|s| matches!(s, Segment::Point(_)))
    }

    pub fn interval_count(&self) -> usize {
        self.segments
            .iter()
            .filter(|s| matches!(s, Segment::Interval { .. }))
            .count()
    }

    pub fn contains(&self, t: f64) -> bool {
        self.locate(t).is_some()
    }

    fn locate(&self, t: f64) -> Option<usize> {
        self.segments.iter().position(|s| s.contains(t))
    }

    fn checked(&self, t: f64) -> Result<usize> {
        self.locate(t).ok_or(Error::NotInTimeScale { t })
    }

    /// Forward jump σ(t) = inf{s ∈ T : s > t}, with σ(b) = b.
    pub fn sigma(&self, t: f64) -> Result<f64> {
        let k = self.checked(t)?;
        Ok(match self.segments[k] {
            Segment::Interval { hi, .. } if t < hi => t,
            _ => self.segments.get(k + 1).map_or(t, Segment::start),
        })
    }

    /// Backward jump ρ(t) = sup{s ∈ T : s < t}, with ρ(a) = a.
    pub fn rho(&self, t: f64) -> Result<f64> {
        let k = self.checked(t)?;
        Ok(match self.segments[k] {
            Segment::Interval { lo, .. } if t > lo => t,
            _ if k == 0 => t,
            _ => self.segments[k - 1].end(),
        })
    }

    /// Forward graininess μ(t) = σ(t) − t.
    pub fn mu(&self, t: f64) -> Result<f64> {
        Ok(self.sigma(t)? - t)
    }

    /// Backward graininess ν(t) = t − ρ(t).
    pub fn nu(&self, t: f64) -> Result<f64> {
        Ok(t - self.rho(t)?)
    }

    pub fn discretize(&self, mesh: &MeshParams) -> Result<Grid> {
        discretize(self, mesh)
    }
}

impl fmt::Display for TimeScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, seg) in self.segments.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{seg}")?;
        }
        Ok(())
    }
}

impl FromStr for TimeScale {
    type Err = Error;

    /// Parses literals such as `"[0,1],2,3"` (whitespace is ignored).
    fn from_str(s: &str) -> Result<Self> {
        LiteralParser {
            src: s.as_bytes(),
            pos: 0,
        }
        .parse()
    }
}

struct LiteralParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl LiteralParser<'_> {
    fn parse(mut self) -> Result<TimeScale> {
        let mut segments = Vec::new();
        loop {
            self.skip_ws();
            let seg = if self.eat(b'[') {
                let lo = self.number()?;
                self.expect(b',')?;
                let hi = self.number()?;
                self.expect(b']')?;
                Segment::Interval { lo, hi }
            } else {
                Segment::Point(self.number()?)
            };
            segments.push(seg);
            self.skip_ws();
            if self.pos == self.src.len() {
                break;
            }
            self.expect(b',')?;
        }
        TimeScale::new(segments)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`", c as char)))
        }
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            let sign_ok = (c == b'+' || c == b'-')
                && (self.pos == start || matches!(self.src[self.pos - 1], b'e' | b'E'));
            if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || sign_ok {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        if text.is_empty() {
            self.pos = start;
            return Err(self.error("expected a number".into()));
        }
        text.parse::<f64>().map_err(|_| Error::TimeScaleSyntax {
            offset: start,
            message: format!("malformed number `{text}`"),
        })
    }

    fn error(&self, message: String) -> Error {
        Error::TimeScaleSyntax {
            offset: self.pos,
            message,
        }
    }
}

/// How continuous intervals are subdivided.
#[derive(Debug, Clone, PartialEq)]
pub enum MeshParams {
    /// Uniform subdivision of every interval with step at most `h`.
    Step(f64),
    /// The same number of subintervals in every interval.
    Subdivisions(usize),
    /// One subinterval count per interval, in order.
    PerInterval(Vec<usize>),
}

impl Default for MeshParams {
    fn default() -> Self {
        MeshParams::Subdivisions(8)
    }
}

impl MeshParams {
    fn subdivisions(&self, k: usize, len: f64) -> Result<usize> {
        let n = match self {
            MeshParams::Step(h) => {
                if !(h.is_finite() && *h > 0.0) {
                    return Err(Error::InvalidMesh(format!(
                        "step must be positive, got {h}"
                    )));
                }
                // Tolerate len/h landing a hair above an integer.
                let ratio = len / h;
                (ratio - 1e-9 * ratio.max(1.0)).ceil().max(1.0) as usize
            }
            MeshParams::Subdivisions(n) => *n,
            MeshParams::PerInterval(counts) => *counts.get(k).ok_or_else(|| {
                Error::InvalidMesh(format!("no subdivision count for interval {k}"))
            })?,
        };
        if n == 0 {
            return Err(Error::InvalidMesh(
                "an interval needs at least one subinterval".into(),
            ));
        }
        Ok(n)
    }
}

/// Whether a grid gap subdivides a continuous interval or is a genuine jump
/// of the underlying time scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapKind {
    Mesh,
    Jump,
}

/// The time scale and mesh a grid was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSource {
    pub timescale: TimeScale,
    pub mesh: MeshParams,
}

/// Finite point set `t_0 = a < … < t_m = b` with forward gaps `μ_i`.
///
/// Besides the exact Δ-measure (`μ_i` at point `i`), a grid carries
/// quadrature weights used for inner products: mesh gaps are split evenly
/// between their endpoints, jump gaps go entirely to their left point. The
/// two coincide on discrete time scales and at interior points of intervals;
/// they differ only where an interval meets a jump, where the split weight
/// restores second-order accuracy.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
    mu: Vec<f64>,
    kinds: Vec<GapKind>,
    weights: Vec<f64>,
    source: Option<GridSource>,
}

impl Grid {
    /// A discrete grid: every gap is a jump.
    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        let kinds = vec![GapKind::Jump; points.len().saturating_sub(1)];
        Self::with_kinds(points, kinds)
    }

    pub fn with_kinds(points: Vec<f64>, kinds: Vec<GapKind>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidTimeScale(
                "a grid needs at least two points".into(),
            ));
        }
        if kinds.len() + 1 != points.len() {
            return Err(Error::Precondition("one gap kind per gap".into()));
        }
        let mu: Vec<f64> = points.windows(2).map(|w| w[1] - w[0]).collect();
        if let Some(i) = mu.iter().position(|&g| !(g > 0.0 && g.is_finite())) {
            return Err(Error::InvalidTimeScale(format!(
                "grid points must be finite and strictly increasing (gap {i})"
            )));
        }
        let mut weights = vec![0.0; points.len()];
        for (i, (&g, &kind)) in mu.iter().zip(&kinds).enumerate() {
            match kind {
                GapKind::Mesh => {
                    weights[i] += 0.5 * g;
                    weights[i + 1] += 0.5 * g;
                }
                GapKind::Jump => weights[i] += g,
            }
        }
        Ok(Grid {
            points,
            mu,
            kinds,
            weights,
            source: None,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index `m` of the right endpoint.
    pub fn last(&self) -> usize {
        self.points.len() - 1
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn point(&self, i: usize) -> f64 {
        self.points[i]
    }

    pub fn a(&self) -> f64 {
        self.points[0]
    }

    pub fn b(&self) -> f64 {
        self.points[self.last()]
    }

    pub fn width(&self) -> f64 {
        self.b() - self.a()
    }

    /// Forward gaps `μ_0 … μ_{m-1}`.
    pub fn gaps(&self) -> &[f64] {
        &self.mu
    }

    pub fn gap_kinds(&self) -> &[GapKind] {
        &self.kinds
    }

    /// Forward graininess at point `i` (zero at `b`).
    pub fn mu(&self, i: usize) -> f64 {
        self.mu.get(i).copied().unwrap_or(0.0)
    }

    /// Backward graininess at point `i` (zero at `a`).
    pub fn nu(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            self.mu[i - 1]
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn interior_len(&self) -> usize {
        self.points.len().saturating_sub(2)
    }

    pub fn interior(&self) -> std::ops::Range<usize> {
        1..self.last()
    }

    pub fn source(&self) -> Option<&GridSource> {
        self.source.as_ref()
    }

    pub fn index_of(&self, t: f64) -> Option<usize> {
        self.points.iter().position(|&p| p == t)
    }

    /// Index of the grid point closest to `t`.
    pub fn nearest(&self, t: f64) -> usize {
        match self.points.binary_search_by(|p| p.total_cmp(&t)) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) if i >= self.points.len() => self.last(),
            Err(i) => {
                if t - self.points[i - 1] <= self.points[i] - t {
                    i - 1
                } else {
                    i
                }
            }
        }
    }
}

/// Subdivides every interval of `ts` uniformly; isolated points are kept.
pub fn discretize(ts: &TimeScale, mesh: &MeshParams) -> Result<Grid> {
    if let MeshParams::PerInterval(counts) = mesh {
        if counts.len() != ts.interval_count() {
            return Err(Error::InvalidMesh(format!(
                "{} subdivision counts for {} intervals",
                counts.len(),
                ts.interval_count()
            )));
        }
    }
    let mut points = Vec::new();
    let mut kinds = Vec::new();
    let mut interval_no = 0;
    for seg in ts.segments() {
        if !points.is_empty() {
            kinds.push(GapKind::Jump);
        }
        match *seg {
            Segment::Point(t) => points.push(t),
            Segment::Interval { lo, hi } => {
                let n = mesh.subdivisions(interval_no, hi - lo)?;
                interval_no += 1;
                let step = (hi - lo) / n as f64;
                points.push(lo);
                for j in 1..n {
                    points.push(lo + j as f64 * step);
                    kinds.push(GapKind::Mesh);
                }
                points.push(hi);
                kinds.push(GapKind::Mesh);
            }
        }
    }
    if points.len() < 3 {
        return Err(Error::EmptyInterior);
    }
    let mut grid = Grid::with_kinds(points, kinds)?;
    grid.source = Some(GridSource {
        timescale: ts.clone(),
        mesh: mesh.clone(),
    });
    Ok(grid)
}

/// Real values at every point of a grid, endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Precondition(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let values = vec![0.0; grid.len()];
        GridFunction { grid, values }
    }

    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.points().iter().map(|&t| f(t)).collect();
        GridFunction { grid, values }
    }

    /// Zero at both endpoints, `interior` in between.
    pub fn from_interior(grid: Arc<Grid>, interior: &[f64]) -> Result<Self> {
        if interior.len() != grid.interior_len() {
            return Err(Error::Precondition(format!(
                "{} interior values for {} interior points",
                interior.len(),
                grid.interior_len()
            )));
        }
        let mut values = Vec::with_capacity(grid.len());
        values.push(0.0);
        values.extend_from_slice(interior);
        values.push(0.0);
        Ok(GridFunction { grid, values })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interior(&self) -> &[f64] {
        &self.values[1..self.values.len() - 1]
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn same_grid(&self, other: &GridFunction) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }
}

/// Δ-integral over `[a, b)`: `Σ_{i<m} u_i μ_i`.
pub fn delta_integral(u: &GridFunction) -> f64 {
    u.values.iter().zip(u.grid.gaps()).map(|(v, g)| v * g).sum()
}

/// ∇-integral over `(a, b]`: `Σ_{i≥1} u_i ν_i`.
pub fn nabla_integral(u: &GridFunction) -> f64 {
    u.values[1..]
        .iter()
        .zip(u.grid.gaps())
        .map(|(v, g)| v * g)
        .sum()
}

/// Forward difference quotient; `None` at `b`, where it is undefined.
pub fn delta_derivative(u: &GridFunction) -> Vec<Option<f64>> {
    let mut out: Vec<Option<f64>> = u
        .values
        .windows(2)
        .zip(u.grid.gaps())
        .map(|(w, g)| Some((w[1] - w[0]) / g))
        .collect();
    out.push(None);
    out
}

/// Backward difference quotient; `None` at `a`, where it is undefined.
pub fn nabla_derivative(u: &GridFunction) -> Vec<Option<f64>> {
    let mut out = Vec::with_capacity(u.values.len());
    out.push(None);
    out.extend(
        u.values
            .windows(2)
            .zip(u.grid.gaps())
            .map(|(w, g)| Some((w[1] - w[0]) / g)),
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(s: &str) -> TimeScale {
        s.parse().unwrap()
    }

    #[test]
    fn jumps_on_discrete_set() {
        let t = ts("0,1,2,3");
        assert_eq!(t.sigma(1.0).unwrap(), 2.0);
        assert_eq!(t.mu(1.0).unwrap(), 1.0);
        assert_eq!(t.sigma(3.0).unwrap(), 3.0);
        assert_eq!(t.rho(0.0).unwrap(), 0.0);
    }

    #[test]
    fn jumps_on_hybrid_set() {
        let t = ts("[0,1],2,3");
        assert_eq!(t.sigma(1.0).unwrap(), 2.0);
        assert_eq!(t.mu(1.0).unwrap(), 1.0);
        assert_eq!(t.nu(1.0).unwrap(), 0.0);
        assert_eq!(t.sigma(0.5).unwrap(), 0.5);
        assert_eq!(t.rho(2.0).unwrap(), 1.0);
        assert_eq!(t.nu(2.0).unwrap(), 1.0);
    }

    #[test]
    fn graininess_of_uneven_points() {
        let t = ts("5,7,10");
        assert_eq!(t.mu(7.0).unwrap(), 3.0);
        assert_eq!(t.nu(7.0).unwrap(), 2.0);
    }

    #[test]
    fn jump_outside_is_domain_error() {
        let t = ts("[0,1],2,3");
        assert_eq!(t.sigma(1.5), Err(Error::NotInTimeScale { t: 1.5 }));
        assert!(t.mu(4.0).is_err());
    }

    #[test]
    fn literal_syntax() {
        let t = ts(" [ 0 , 1 ] , 2,3 ");
        assert_eq!(
            t.segments(),
            &[
                Segment::Interval { lo: 0.0, hi: 1.0 },
                Segment::Point(2.0),
                Segment::Point(3.0)
            ]
        );
        assert_eq!(t.to_string(), "[0,1],2,3");
        assert_eq!(ts("-1.5e0,0,2").start(), -1.5);
        assert!(matches!(
            "[0,1".parse::<TimeScale>(),
            Err(Error::TimeScaleSyntax { .. })
        ));
        assert!(matches!(
            "0,,1".parse::<TimeScale>(),
            Err(Error::TimeScaleSyntax { offset: 2, .. })
        ));
        assert!(matches!(
            "0,x".parse::<TimeScale>(),
            Err(Error::TimeScaleSyntax { .. })
        ));
    }

    #[test]
    fn rejects_bad_time_scales() {
        assert!(matches!(
            "2,1,3".parse::<TimeScale>(),
            Err(Error::InvalidTimeScale(_))
        ));
        assert!(matches!(
            "[0,1],1,3".parse::<TimeScale>(),
            Err(Error::InvalidTimeScale(_))
        ));
        assert!(matches!(
            "[1,1]".parse::<TimeScale>(),
            Err(Error::InvalidTimeScale(_))
        ));
        assert_eq!("0,3".parse::<TimeScale>(), Err(Error::EmptyInterior));
        assert!("[0,3]".parse::<TimeScale>().is_ok());
        assert!("0,[1,2]".parse::<TimeScale>().is_ok());
    }

    #[test]
    fn discretize_discrete_set() {
        let g = ts("0,1,2,3").discretize(&MeshParams::Step(0.01)).unwrap();
        assert_eq!(g.points(), &[0.0, 1.0, 2.0, 3.0]);
        assert!(g.gap_kinds().iter().all(|&k| k == GapKind::Jump));
    }

    #[test]
    fn discretize_hybrid_set() {
        let g = ts("[0,1],2,3").discretize(&MeshParams::Step(0.25)).unwrap();
        assert_eq!(g.points(), &[0.0, 0.25, 0.5, 0.75, 1.0, 2.0, 3.0]);
        assert_eq!(g.weights(), &[0.125, 0.25, 0.25, 0.25, 1.125, 1.0, 0.0]);
    }

    #[test]
    fn discretize_fine_interval() {
        let g = ts("[0,3]").discretize(&MeshParams::Step(1e-3)).unwrap();
        assert_eq!(g.len(), 3001);
        assert_eq!(g.b(), 3.0);
        let total: f64 = g.weights().iter().sum();
        assert!((total - 3.0).abs() < 1e-12);
    }

    #[test]
    fn discretize_default_and_counts() {
        let g = ts("[0,1],2,3").discretize(&MeshParams::default()).unwrap();
        assert_eq!(g.len(), 9 + 2);
        let g = ts("[0,1],2,[3,4]")
            .discretize(&MeshParams::PerInterval(vec![2, 4]))
            .unwrap();
        assert_eq!(g.points(), &[0.0, 0.5, 1.0, 2.0, 3.0, 3.25, 3.5, 3.75, 4.0]);
        assert!(ts("[0,1]")
            .discretize(&MeshParams::PerInterval(vec![]))
            .is_err());
        assert!(ts("[0,1]").discretize(&MeshParams::Step(0.0)).is_err());
        // One subinterval on [0,1] leaves no interior point.
        assert_eq!(
            ts("[0,1]").discretize(&MeshParams::Subdivisions(1)),
            Err(Error::EmptyInterior)
        );
    }

    #[test]
    fn integrals() {
        let g = Arc::new(ts("[0,3]").discretize(&MeshParams::Step(0.1)).unwrap());
        let one = GridFunction::from_fn(g, |_| 1.0);
        assert!((delta_integral(&one) - 3.0).abs() < 1e-12);
        assert!((nabla_integral(&one) - 3.0).abs() < 1e-12);

        let d = Arc::new(Grid::from_points(vec![0.0, 1.0, 2.0, 3.0]).unwrap());
        let u = GridFunction::new(d.clone(), vec![0.0, 5.0, 7.0, 100.0]).unwrap();
        assert_eq!(delta_integral(&u), 12.0);
        let id = GridFunction::from_fn(d, |t| t);
        assert_eq!(delta_integral(&id), 3.0);
    }

    #[test]
    fn derivatives() {
        let d = Arc::new(Grid::from_points(vec![0.0, 1.0, 2.0, 3.0]).unwrap());
        let sq = GridFunction::from_fn(d.clone(), |t| t * t);
        assert_eq!(
            delta_derivative(&sq),
            vec![Some(1.0), Some(3.0), Some(5.0), None]
        );
        assert_eq!(
            nabla_derivative(&sq),
            vec![None, Some(1.0), Some(3.0), Some(5.0)]
        );

        let g = Arc::new(ts("[0,1],2,3").discretize(&MeshParams::Step(0.1)).unwrap());
        let id = GridFunction::from_fn(g, |t| t);
        for d in delta_derivative(&id).into_iter().flatten() {
            assert!((d - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn nearest_point() {
        let g = Grid::from_points(vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(g.nearest(1.4), 1);
        assert_eq!(g.nearest(1.6), 2);
        assert_eq!(g.nearest(-5.0), 0);
        assert_eq!(g.nearest(9.0), 3);
    }
}
