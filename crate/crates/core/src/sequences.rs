//! Sequences in `R^d` (`d ≤ 3`), their ε-ball hit sets, finite-grid estimates
//! of the I-cluster set and I-convergence decisions.
//!
//! Terms are streamed, never stored: a hit set over `H` terms costs `O(H)`
//! time and memory proportional to the hit set only.

use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::densities::{CheckpointSchedule, DensityError};
use crate::ideals::{member, Decision, IdealError, IdealSpec, Verdict};
use crate::sampler::{Bits, SamplerError, SubsequenceSelector};
use crate::subsets::{SetFamily, SubsetWindow, BLOCK_LEN};

/// Pitch of automatic candidate grids.
pub const DEFAULT_PITCH: f64 = 0.1;
/// Automatic grids coarsen the pitch by factors of 10 to stay below this size.
pub const MAX_AUTO_GRID: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SequenceError {
    #[error("invalid sequence spec `{0}`")]
    Parse(String),
    #[error("invalid point `{0}`")]
    InvalidPoint(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("epsilon must be positive and finite (got {0})")]
    InvalidEpsilon(f64),
    #[error("candidate grid is empty")]
    EmptyGrid,
    #[error("epsilon {epsilon} does not separate candidates spaced {spacing} apart")]
    GridEpsilonMismatch { epsilon: f64, spacing: f64 },
    #[error("sequence indices start at 1")]
    ZeroIndex,
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error(transparent)]
    Density(#[from] DensityError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    coords: [f64; 3],
    dim: usize,
}

impl Point {
    pub fn scalar(v: f64) -> Self {
        Self { coords: [v, 0.0, 0.0], dim: 1 }
    }

    /// A point with 1 to 3 finite coordinates.
    pub fn new(coords: &[f64]) -> Option<Self> {
        if coords.is_empty() || coords.len() > 3 || coords.iter().any(|c| !c.is_finite()) {
            return None;
        }
        let mut c = [0.0; 3];
        c[..coords.len()].copy_from_slice(coords);
        Some(Self { coords: c, dim: coords.len() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim]
    }

    /// Euclidean distance; coordinates past the lower dimension count as 0.
    pub fn distance(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    fn cmp_lex(&self, other: &Point) -> std::cmp::Ordering {
        self.coords().iter().zip(other.coords()).fold(std::cmp::Ordering::Equal, |acc, (a, b)| acc.then(a.total_cmp(b)))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim == 1 {
            return write!(f, "{}", self.coords[0]);
        }
        let parts: Vec<String> = self.coords().iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for Point {
    type Err = SequenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || SequenceError::InvalidPoint(s.to_string());
        let t = s.trim();
        let inner = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(t);
        let coords = inner
            .split(',')
            .map(|c| c.trim().parse::<f64>().map_err(|_| err()))
            .collect::<Result<Vec<_>, _>>()?;
        Point::new(&coords).ok_or_else(err)
    }
}

/// Scalars serialize as numbers, vectors as arrays.
impl Serialize for Point {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.dim == 1 {
            return serializer.serialize_f64(self.coords[0]);
        }
        let mut seq = serializer.serialize_seq(Some(self.dim))?;
        for c in self.coords() {
            seq.serialize_element(c)?;
        }
        seq.end()
    }
}

/// Splits at `sep` outside of brackets.
fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            c if c == sep && depth == 0 => {
                parts.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

/// Parses `-1,0,1`, `{-1,0,1}` or `(0,0),(1,1)`.
pub fn parse_grid(s: &str) -> Result<Vec<Point>, SequenceError> {
    let t = s.trim();
    let inner = t
        .strip_prefix('{')
        .and_then(|r| r.strip_suffix('}'))
        .or_else(|| t.strip_prefix('[').and_then(|r| r.strip_suffix(']')))
        .unwrap_or(t);
    if inner.trim().is_empty() {
        return Err(SequenceError::EmptyGrid);
    }
    split_top(inner, ',').into_iter().map(str::parse).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum RealSequence {
    /// `(-1)^n`.
    Alternating,
    Periodic(Vec<Point>),
    Constant(Point),
    /// `x_n = n`.
    Identity,
    /// `0, 1, 1/2, 1/3, 2/3, 1/4, 3/4, ...`: reduced fractions in `[0, 1]` by denominator.
    RationalEnum,
    /// `value` on `set`, `base` elsewhere.
    Spike { set: SetFamily, value: Point, base: Box<RealSequence> },
    /// `k ↦ base_{n_k}` for the indices chosen by `selector`.
    Restricted { base: Box<RealSequence>, selector: SubsequenceSelector },
}

impl RealSequence {
    pub fn periodic(values: Vec<Point>) -> Result<Self, SequenceError> {
        let dim = values.first().ok_or_else(|| SequenceError::Parse("periodic:[]".into()))?.dim();
        if let Some(bad) = values.iter().find(|v| v.dim() != dim) {
            return Err(SequenceError::DimensionMismatch { expected: dim, found: bad.dim() });
        }
        Ok(Self::Periodic(values))
    }

    pub fn spike(set: SetFamily, value: Point, base: RealSequence) -> Result<Self, SequenceError> {
        if value.dim() != base.dim() {
            return Err(SequenceError::DimensionMismatch { expected: base.dim(), found: value.dim() });
        }
        Ok(Self::Spike { set, value, base: Box::new(base) })
    }

    pub fn dim(&self) -> usize {
        match self {
            RealSequence::Periodic(v) => v[0].dim(),
            RealSequence::Constant(p) => p.dim(),
            RealSequence::Spike { value, .. } => value.dim(),
            RealSequence::Restricted { base, .. } => base.dim(),
            _ => 1,
        }
    }

    pub fn description(&self) -> String {
        self.to_string()
    }

    /// `x_n`. Restricted and enumerated forms scan from the start.
    pub fn evaluate(&self, n: u64) -> Result<Point, SequenceError> {
        if n == 0 {
            return Err(SequenceError::ZeroIndex);
        }
        Ok(match self {
            RealSequence::Alternating => Point::scalar(if n.is_multiple_of(2) { 1.0 } else { -1.0 }),
            RealSequence::Periodic(v) => v[((n - 1) % v.len() as u64) as usize],
            RealSequence::Constant(p) => *p,
            RealSequence::Identity => Point::scalar(n as f64),
            RealSequence::RationalEnum => self.terms().nth((n - 1) as usize).expect("infinite sequence"),
            RealSequence::Spike { set, value, base } => {
                if set.contains(n) {
                    *value
                } else {
                    base.evaluate(n)?
                }
            }
            RealSequence::Restricted { base, selector } => {
                let index = selector
                    .bits()
                    .enumerate()
                    .filter(|&(_, b)| b)
                    .map(|(i, _)| i as u64 + 1)
                    .nth((n - 1) as usize);
                match index {
                    Some(i) => base.evaluate(i)?,
                    None => {
                        let available = selector.bits().filter(|&b| b).count() as u64;
                        return Err(SamplerError::SelectorExhausted { wanted: n, available }.into());
                    }
                }
            }
        })
    }

    /// Streams `x_1, x_2, ...`. Ends early only for restrictions by finite selectors.
    pub fn terms(&self) -> Terms<'_> {
        let state = match self {
            RealSequence::Alternating => State::Alternating,
            RealSequence::Periodic(v) => State::Periodic(v),
            RealSequence::Constant(p) => State::Constant(*p),
            RealSequence::Identity => State::Identity,
            RealSequence::RationalEnum => State::Rational { p: 0, q: 1 },
            RealSequence::Spike { set, value, base } => State::Spike {
                set,
                value: *value,
                marks: Vec::new(),
                block_lo: 1,
                base: Box::new(base.terms()),
            },
            RealSequence::Restricted { base, selector } => {
                State::Restricted { base: Box::new(base.terms()), bits: selector.bits() }
            }
        };
        Terms { n: 0, state }
    }

    /// Values the sequence takes by construction (periodic values, spike values, ±1).
    pub fn named_values(&self) -> Vec<Point> {
        let mut out = match self {
            RealSequence::Alternating => vec![Point::scalar(-1.0), Point::scalar(1.0)],
            RealSequence::Periodic(v) => v.clone(),
            RealSequence::Constant(p) => vec![*p],
            RealSequence::Identity | RealSequence::RationalEnum => Vec::new(),
            RealSequence::Spike { value, base, .. } => {
                let mut v = base.named_values();
                v.push(*value);
                v
            }
            RealSequence::Restricted { base, .. } => base.named_values(),
        };
        out.sort_by(Point::cmp_lex);
        out.dedup();
        out
    }
}

pub struct Terms<'a> {
    n: u64,
    state: State<'a>,
}

#[allow(clippy::large_enum_variant)]
enum State<'a> {
    Alternating,
    Periodic(&'a [Point]),
    Constant(Point),
    Identity,
    Rational { p: u64, q: u64 },
    Spike { set: &'a SetFamily, value: Point, marks: Vec<bool>, block_lo: u64, base: Box<Terms<'a>> },
    Restricted { base: Box<Terms<'a>>, bits: Bits<'a> },
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Iterator for Terms<'_> {
    type Item = Point;

    fn next(&mut self) -> Option<Point> {
        self.n += 1;
        let n = self.n;
        Some(match &mut self.state {
            State::Alternating => Point::scalar(if n.is_multiple_of(2) { 1.0 } else { -1.0 }),
            State::Periodic(v) => v[((n - 1) % v.len() as u64) as usize],
            State::Constant(p) => *p,
            State::Identity => Point::scalar(n as f64),
            State::Rational { p, q } => {
                let out = Point::scalar(*p as f64 / *q as f64);
                if *q == 1 {
                    (*p, *q) = if *p == 0 { (1, 1) } else { (1, 2) };
                } else {
                    let next = (*p + 1..*q).find(|&c| gcd(c, *q) == 1);
                    (*p, *q) = match next {
                        Some(c) => (c, *q),
                        None => (1, *q + 1),
                    };
                }
                out
            }
            State::Spike { set, value, marks, block_lo, base } => {
                let base_value = base.next()?;
                if marks.is_empty() || n >= *block_lo + marks.len() as u64 {
                    *block_lo = n;
                    marks.clear();
                    marks.resize(BLOCK_LEN as usize, false);
                    set.mark_block(n, marks);
                }
                if marks[(n - *block_lo) as usize] {
                    *value
                } else {
                    base_value
                }
            }
            State::Restricted { base, bits } => loop {
                let v = base.next()?;
                if bits.next()? {
                    break v;
                }
            },
        })
    }
}

impl fmt::Display for RealSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealSequence::Alternating => f.write_str("alternating"),
            RealSequence::Periodic(v) => {
                let parts: Vec<String> = v.iter().map(Point::to_string).collect();
                write!(f, "periodic:[{}]", parts.join(","))
            }
            RealSequence::Constant(p) => write!(f, "const:{p}"),
            RealSequence::Identity => f.write_str("identity"),
            RealSequence::RationalEnum => f.write_str("rational-enum"),
            RealSequence::Spike { set, value, base } => write!(f, "spike:{set}:{value}:{base}"),
            RealSequence::Restricted { base, selector } => write!(f, "restrict:{selector}:{base}"),
        }
    }
}

/// Grammar: `alternating`, `identity`, `rational-enum`, `const0`,
/// `const:<point>`, `periodic:[v1,...,vp]`, `spike:<set>:<value>:<base>`,
/// `restrict:<selector>:<base>`. Points are numbers or `(a,b[,c])`.
impl FromStr for RealSequence {
    type Err = SequenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || SequenceError::Parse(s.to_string());
        let s = s.trim();
        match s {
            "alternating" => return Ok(Self::Alternating),
            "identity" => return Ok(Self::Identity),
            "rational-enum" => return Ok(Self::RationalEnum),
            _ => {}
        }
        if let Some(v) = s.strip_prefix("const:") {
            return Ok(Self::Constant(v.parse()?));
        }
        if let Some(v) = s.strip_prefix("const") {
            return Ok(Self::Constant(v.parse().map_err(|_| err())?));
        }
        if let Some(list) = s.strip_prefix("periodic:") {
            let inner = list.strip_prefix('[').and_then(|r| r.strip_suffix(']')).ok_or_else(err)?;
            let values = split_top(inner, ',').into_iter().map(str::parse).collect::<Result<Vec<Point>, _>>()?;
            return Self::periodic(values);
        }
        if let Some(rest) = s.strip_prefix("spike:") {
            let parts = split_top(rest, ':');
            for i in 1..parts.len().saturating_sub(1) {
                let set = parts[..i].join(":").parse::<SetFamily>();
                let value = parts[i].parse::<Point>();
                let base = parts[i + 1..].join(":").parse::<RealSequence>();
                if let (Ok(set), Ok(value), Ok(base)) = (set, value, base) {
                    return Self::spike(set, value, base);
                }
            }
            return Err(err());
        }
        if let Some(rest) = s.strip_prefix("restrict:") {
            let parts = split_top(rest, ':');
            for i in 1..parts.len() {
                let selector = parts[..i].join(":").parse::<SubsequenceSelector>();
                let base = parts[i..].join(":").parse::<RealSequence>();
                if let (Ok(selector), Ok(base)) = (selector, base) {
                    return Ok(Self::Restricted { base: Box::new(base), selector });
                }
            }
        }
        Err(err())
    }
}

impl Serialize for RealSequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

fn check_epsilon(epsilon: f64) -> Result<(), SequenceError> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(SequenceError::InvalidEpsilon(epsilon))
    }
}

/// Runs `f(n, x_n)` for `n ≤ h`.
fn scan(x: &RealSequence, h: u64, mut f: impl FnMut(u64, &Point)) -> Result<(), SequenceError> {
    let mut produced = 0;
    for (i, p) in x.terms().take(h as usize).enumerate() {
        f(i as u64 + 1, &p);
        produced += 1;
    }
    if produced < h {
        return Err(SamplerError::SelectorExhausted { wanted: h, available: produced }.into());
    }
    Ok(())
}

/// `{n ≤ h : |x_n − center| < ε}`.
pub fn hit_set(x: &RealSequence, center: &Point, epsilon: f64, h: u64) -> Result<SubsetWindow, SequenceError> {
    check_epsilon(epsilon)?;
    let mut members = Vec::new();
    scan(x, h, |n, p| {
        if p.distance(center) < epsilon {
            members.push(n);
        }
    })?;
    Ok(SubsetWindow::new(members, h).expect("scan order is increasing"))
}

/// `{n ≤ h : |x_n − limit| ≥ ε}`.
pub fn escape_set(x: &RealSequence, limit: &Point, epsilon: f64, h: u64) -> Result<SubsetWindow, SequenceError> {
    check_epsilon(epsilon)?;
    let mut members = Vec::new();
    scan(x, h, |n, p| {
        if p.distance(limit) >= epsilon {
            members.push(n);
        }
    })?;
    Ok(SubsetWindow::new(members, h).expect("scan order is increasing"))
}

/// Hit sets of all `centers` in one pass. Requires balls of radius `epsilon`
/// around distinct centers to be disjoint.
pub fn hit_sets(x: &RealSequence, centers: &[Point], epsilon: f64, h: u64) -> Result<Vec<SubsetWindow>, SequenceError> {
    Ok(hit_sets_sweep(x, centers, &[epsilon], h)?.pop().expect("one radius"))
}

/// Hit sets for every radius of a decreasing sweep, indexed `[radius][center]`.
pub fn hit_sets_sweep(
    x: &RealSequence,
    centers: &[Point],
    sweep: &[f64],
    h: u64,
) -> Result<Vec<Vec<SubsetWindow>>, SequenceError> {
    for &e in sweep {
        check_epsilon(e)?;
    }
    let widest = sweep.iter().copied().fold(0.0, f64::max);
    let mut order: Vec<usize> = (0..centers.len()).collect();
    order.sort_by(|&a, &b| centers[a].coords[0].total_cmp(&centers[b].coords[0]));
    let keys: Vec<f64> = order.iter().map(|&i| centers[i].coords[0]).collect();
    let mut members: Vec<Vec<Vec<u64>>> = vec![vec![Vec::new(); centers.len()]; sweep.len()];
    scan(x, h, |n, p| {
        let lo = keys.partition_point(|&k| k <= p.coords[0] - widest);
        for (j, &k) in keys[lo..].iter().enumerate() {
            if k >= p.coords[0] + widest {
                break;
            }
            let c = order[lo + j];
            let dist = p.distance(&centers[c]);
            for (m, &e) in sweep.iter().enumerate() {
                if dist < e {
                    members[m][c].push(n);
                }
            }
        }
    })?;
    Ok(members
        .into_iter()
        .map(|per_center| {
            per_center.into_iter().map(|m| SubsetWindow::new(m, h).expect("scan order is increasing")).collect()
        })
        .collect())
}

/// Escape sets `{n ≤ h : |x_n − limit| ≥ ε}` for every radius in `sweep`.
pub fn escape_sets_sweep(x: &RealSequence, limit: &Point, sweep: &[f64], h: u64) -> Result<Vec<SubsetWindow>, SequenceError> {
    for &e in sweep {
        check_epsilon(e)?;
    }
    let mut members = vec![Vec::new(); sweep.len()];
    scan(x, h, |n, p| {
        let dist = p.distance(limit);
        for (m, &e) in sweep.iter().enumerate() {
            if dist >= e {
                members[m].push(n);
            }
        }
    })?;
    Ok(members.into_iter().map(|m| SubsetWindow::new(m, h).expect("scan order is increasing")).collect())
}

/// Smallest distance between two candidates (infinite for one candidate).
pub fn min_spacing(grid: &[Point]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in grid.iter().enumerate() {
        for b in &grid[i + 1..] {
            best = best.min(a.distance(b));
        }
    }
    best
}

/// Rejects grids whose ε-balls overlap (`2ε > spacing`) or mix dimensions.
pub fn validate_grid(grid: &[Point], dim: usize, epsilon: f64) -> Result<(), SequenceError> {
    check_epsilon(epsilon)?;
    if grid.is_empty() {
        return Err(SequenceError::EmptyGrid);
    }
    if let Some(bad) = grid.iter().find(|p| p.dim() != dim) {
        return Err(SequenceError::DimensionMismatch { expected: dim, found: bad.dim() });
    }
    let spacing = min_spacing(grid);
    if 2.0 * epsilon > spacing * (1.0 + 1e-9) {
        return Err(SequenceError::GridEpsilonMismatch { epsilon, spacing });
    }
    Ok(())
}

/// Uniform grid over the observed range of `x` up to `h`, plus the named
/// values of `x`. Returns the grid and its pitch.
pub fn auto_grid(x: &RealSequence, h: u64) -> Result<(Vec<Point>, f64), SequenceError> {
    let dim = x.dim();
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    scan(x, h, |_, p| {
        for d in 0..dim {
            lo[d] = lo[d].min(p.coords[d]);
            hi[d] = hi[d].max(p.coords[d]);
        }
    })?;
    let mut pitch = DEFAULT_PITCH;
    let ranges = loop {
        let ranges: Vec<(i64, i64)> =
            (0..dim).map(|d| ((lo[d] / pitch).floor() as i64, (hi[d] / pitch).ceil() as i64)).collect();
        let size = ranges.iter().map(|(a, b)| (b - a + 1) as f64).product::<f64>();
        if size <= MAX_AUTO_GRID as f64 {
            break ranges;
        }
        pitch *= 10.0;
    };
    // k / 10 rounds correctly where k * 0.1 does not.
    let coord = |k: i64| if pitch < 1.0 { k as f64 / (1.0 / pitch).round() } else { k as f64 * pitch };
    let mut lattice = vec![Vec::new()];
    for &(a, b) in &ranges {
        lattice = lattice
            .into_iter()
            .flat_map(|prefix: Vec<f64>| {
                (a..=b).map(move |k| {
                    let mut v = prefix.clone();
                    v.push(coord(k));
                    v
                })
            })
            .collect();
    }
    let named = x.named_values();
    let mut grid: Vec<Point> = lattice
        .iter()
        .map(|c| Point::new(c).expect("finite"))
        .filter(|p| named.iter().all(|v| v.distance(p) > 0.5 * pitch * (1.0 + 1e-9)))
        .collect();
    grid.extend(named);
    grid.sort_by(Point::cmp_lex);
    grid.dedup();
    Ok((grid, pitch))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateDecision {
    pub point: Point,
    pub hits: usize,
    #[serde(flatten)]
    pub decision: Decision,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterReport {
    pub sequence: String,
    pub ideal: IdealSpec,
    pub horizon: u64,
    pub epsilon: f64,
    pub candidates: Vec<Point>,
    pub per_candidate: Vec<CandidateDecision>,
    pub gamma: Vec<Point>,
    pub undecided: Vec<Point>,
}

impl ClusterReport {
    pub fn verdict_of(&self, point: &Point) -> Option<Verdict> {
        self.per_candidate.iter().find(|c| c.point == *point).map(|c| c.decision.verdict)
    }
}

/// Candidates whose hit set is NotIn; Undecided candidates are listed apart.
pub fn cluster_points(
    x: &RealSequence,
    ideal: &IdealSpec,
    grid: &[Point],
    epsilon: f64,
    sched: &CheckpointSchedule,
) -> Result<ClusterReport, SequenceError> {
    Ok(cluster_points_sweep(x, ideal, grid, &[epsilon], sched)?.pop().expect("one radius"))
}

/// [`cluster_points`] for each radius of a sweep, from a single pass over `x`.
pub fn cluster_points_sweep(
    x: &RealSequence,
    ideal: &IdealSpec,
    grid: &[Point],
    sweep: &[f64],
    sched: &CheckpointSchedule,
) -> Result<Vec<ClusterReport>, SequenceError> {
    for &e in sweep {
        validate_grid(grid, x.dim(), e)?;
    }
    let h = sched.last();
    let windows = hit_sets_sweep(x, grid, sweep, h)?;
    let sequence = x.to_string();
    sweep
        .iter()
        .zip(windows)
        .map(|(&epsilon, windows)| {
            let per_candidate = grid
                .iter()
                .zip(&windows)
                .map(|(point, w)| {
                    Ok(CandidateDecision { point: *point, hits: w.len(), decision: member(ideal, w, sched)? })
                })
                .collect::<Result<Vec<_>, SequenceError>>()?;
            let with =
                |v: Verdict| per_candidate.iter().filter(|c| c.decision.verdict == v).map(|c| c.point).collect();
            Ok(ClusterReport {
                sequence: sequence.clone(),
                ideal: ideal.clone(),
                horizon: h,
                epsilon,
                candidates: grid.to_vec(),
                gamma: with(Verdict::NotIn),
                undecided: with(Verdict::Undecided),
                per_candidate,
            })
        })
        .collect()
}

/// Decision on the escape set of the ε-ball around `limit`; In means
/// `x →_I limit` at this ε.
pub fn ideal_converges(
    x: &RealSequence,
    ideal: &IdealSpec,
    limit: &Point,
    epsilon: f64,
    sched: &CheckpointSchedule,
) -> Result<Decision, SequenceError> {
    if limit.dim() != x.dim() {
        return Err(SequenceError::DimensionMismatch { expected: x.dim(), found: limit.dim() });
    }
    let escape = escape_set(x, limit, epsilon, sched.last())?;
    Ok(member(ideal, &escape, sched)?)
}
