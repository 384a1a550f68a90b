//! Finite-horizon estimators for the densities and weight statistics the
//! ideals are built from.
//!
//! Ratio statistics (asymptotic, α-, Erdős–Ulam) accumulate quantized weights
//! in 128-bit fixed point, so numerators of disjoint sets add up exactly to
//! the numerator of their union and a set and its complement add up exactly
//! to the denominator. Values are the correctly rounded quotients.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::numeric::{ceil_log2, fixed_point_scale, quantize, ratio_to_f64, NeumaierSum};
use crate::subsets::SubsetWindow;

/// Tail oscillation below which an estimate is reported as converged.
pub const CONVERGENCE_TOLERANCE: f64 = 5e-3;

pub const DEFAULT_RATIO: f64 = 0.8;
pub const DEFAULT_CHECKPOINTS: usize = 32;
pub const DEFAULT_TAIL_FRACTION: f64 = 0.5;
pub const MIN_CHECKPOINTS: usize = 8;
pub const DEFAULT_S_GRID: [f64; 5] = [0.5, 0.75, 0.9, 0.95, 0.99];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DensityError {
    #[error("last checkpoint {last} lies beyond the window horizon {horizon}")]
    ScheduleBeyondHorizon { last: u64, horizon: u64 },
    #[error("a schedule needs at least {MIN_CHECKPOINTS} distinct checkpoints, got {0}")]
    TooFewCheckpoints(usize),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("the s-grid needs at least 3 points, got {0}")]
    GridTooCoarse(usize),
    #[error("invalid s-grid: {0}")]
    InvalidGrid(String),
    #[error("alpha must be at least -1, got {0}")]
    InvalidAlpha(f64),
    #[error("total weight up to the horizon is zero")]
    ZeroTotalWeight,
    #[error("k must be at least 1")]
    InvalidMultiplier,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckpointSchedule {
    checkpoints: Vec<u64>,
    tail_fraction: f64,
}

impl CheckpointSchedule {
    /// `n_j = ⌈H r^{m-j}⌉`, `j = 1..m`, with `r = 0.8`, `m = 32` and the last
    /// half of the checkpoints forming the tail.
    pub fn geometric(horizon: u64) -> Result<Self, DensityError> {
        Self::geometric_with(horizon, DEFAULT_RATIO, DEFAULT_CHECKPOINTS, DEFAULT_TAIL_FRACTION)
    }

    pub fn geometric_with(horizon: u64, ratio: f64, count: usize, tail_fraction: f64) -> Result<Self, DensityError> {
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(DensityError::InvalidSchedule(format!("ratio {ratio} outside (0,1)")));
        }
        let mut checkpoints: Vec<u64> = (1..=count)
            .map(|j| {
                let v = (horizon as f64 * ratio.powi((count - j) as i32)).ceil() as u64;
                v.clamp(1, horizon.max(1))
            })
            .collect();
        checkpoints.dedup();
        Self::new(checkpoints, tail_fraction)
    }

    pub fn new(checkpoints: Vec<u64>, tail_fraction: f64) -> Result<Self, DensityError> {
        if checkpoints.len() < MIN_CHECKPOINTS {
            return Err(DensityError::TooFewCheckpoints(checkpoints.len()));
        }
        if checkpoints[0] == 0 || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(DensityError::InvalidSchedule("checkpoints must be positive and strictly increasing".into()));
        }
        if !(tail_fraction > 0.0 && tail_fraction < 1.0) {
            return Err(DensityError::InvalidSchedule(format!("tail fraction {tail_fraction} outside (0,1)")));
        }
        Ok(Self { checkpoints, tail_fraction })
    }

    pub fn checkpoints(&self) -> &[u64] {
        &self.checkpoints
    }

    pub fn tail_fraction(&self) -> f64 {
        self.tail_fraction
    }

    pub fn last(&self) -> u64 {
        *self.checkpoints.last().expect("schedules are nonempty")
    }

    /// Index of the first tail checkpoint.
    pub fn tail_start(&self) -> usize {
        let m = self.checkpoints.len();
        let tail = ((m as f64 * self.tail_fraction).ceil() as usize).clamp(1, m);
        m - tail
    }

    /// Value of the first tail checkpoint.
    pub fn tail_first(&self) -> u64 {
        self.checkpoints[self.tail_start()]
    }

    pub fn tail(&self) -> &[u64] {
        &self.checkpoints[self.tail_start()..]
    }

    pub fn check_within(&self, horizon: u64) -> Result<(), DensityError> {
        if self.last() > horizon {
            return Err(DensityError::ScheduleBeyondHorizon { last: self.last(), horizon });
        }
        Ok(())
    }
}

/// Named weight functions `f: N → [0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightFunction {
    /// `1/n`
    OneOverN,
    /// `c > 0`
    Const(f64),
    /// `1/((n+1) ln(n+1))`, positive and divergent like `1/(n ln n)`
    OneOverNLog,
    /// `f(2n) = 1`, `f(2n-1) = 0`; admitted although it vanishes on the odds
    Alternating01,
}

impl WeightFunction {
    #[inline]
    pub fn eval(&self, n: u64) -> f64 {
        match self {
            WeightFunction::OneOverN => 1.0 / n as f64,
            WeightFunction::Const(c) => *c,
            WeightFunction::OneOverNLog => {
                let m = (n + 1) as f64;
                1.0 / (m * m.ln())
            }
            WeightFunction::Alternating01 => {
                if n.is_multiple_of(2) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// `sup_n f(n)`.
    pub fn sup(&self) -> f64 {
        match self {
            WeightFunction::Alternating01 => 1.0,
            _ => self.eval(1),
        }
    }

    /// Index from which `f` is non-increasing, if it ever is.
    pub fn nonincreasing_from(&self) -> Option<u64> {
        match self {
            WeightFunction::Alternating01 => None,
            _ => Some(1),
        }
    }

    pub fn definitively_nonincreasing(&self) -> bool {
        self.nonincreasing_from().is_some()
    }

    /// `f(n) / sup f`, in `[0, 1]`.
    #[inline]
    fn normalized(&self, n: u64) -> f64 {
        match self {
            WeightFunction::Const(_) => 1.0,
            _ => (self.eval(n) / self.sup()).min(1.0),
        }
    }
}

impl fmt::Display for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightFunction::OneOverN => f.write_str("one_over_n"),
            WeightFunction::Const(c) if *c == 1.0 => f.write_str("const"),
            WeightFunction::Const(c) => write!(f, "const:{c}"),
            WeightFunction::OneOverNLog => f.write_str("one_over_n_log"),
            WeightFunction::Alternating01 => f.write_str("alternating01"),
        }
    }
}

impl FromStr for WeightFunction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "one_over_n" | "1/n" => Ok(WeightFunction::OneOverN),
            "const" => Ok(WeightFunction::Const(1.0)),
            "one_over_n_log" => Ok(WeightFunction::OneOverNLog),
            "alternating01" => Ok(WeightFunction::Alternating01),
            other => match other.strip_prefix("const:").map(str::parse::<f64>) {
                Some(Ok(c)) if c > 0.0 && c.is_finite() => Ok(WeightFunction::Const(c)),
                _ => Err(format!("unknown weight function `{other}`")),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DensityKind {
    Asymptotic,
    Alpha(f64),
    Polya(Vec<f64>),
    WeightSum(WeightFunction),
    ErdosUlam(WeightFunction),
    AddLimit(WeightFunction, u64),
}

impl fmt::Display for DensityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DensityKind::Asymptotic => f.write_str("asymptotic"),
            DensityKind::Alpha(a) => write!(f, "alpha:{a}"),
            DensityKind::Polya(_) => f.write_str("polya"),
            DensityKind::WeightSum(w) => write!(f, "weight:{w}"),
            DensityKind::ErdosUlam(w) => write!(f, "eu:{w}"),
            DensityKind::AddLimit(w, k) => write!(f, "addlimit:{w}:{k}"),
        }
    }
}

impl Serialize for DensityKind {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TracePoint {
    pub n: u64,
    pub value: f64,
    /// Exact fixed-point numerator and denominator for ratio kinds.
    #[serde(skip)]
    pub exact: Option<(u128, u128)>,
}

/// One `s` of a Pólya sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolyaLevel {
    pub s: f64,
    pub value: f64,
    pub trace: Vec<TracePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityEstimate {
    pub kind: DensityKind,
    pub upper: f64,
    pub lower: f64,
    /// Weight sums only: the partial sums did not settle.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub unbounded: bool,
    pub converged: bool,
    pub oscillation: f64,
    pub trace: Vec<TracePoint>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub per_s: Vec<PolyaLevel>,
}

impl DensityEstimate {
    fn from_trace(kind: DensityKind, trace: Vec<TracePoint>, sched: &CheckpointSchedule) -> Self {
        let (upper, lower) = tail_extremes(&trace, sched);
        let oscillation = upper - lower;
        Self {
            kind,
            upper,
            lower,
            unbounded: false,
            converged: oscillation < CONVERGENCE_TOLERANCE,
            oscillation,
            trace,
            per_s: Vec::new(),
        }
    }

    /// Value at the last checkpoint.
    pub fn final_value(&self) -> f64 {
        self.trace.last().map_or(0.0, |p| p.value)
    }

    pub fn values(&self) -> Vec<f64> {
        self.trace.iter().map(|p| p.value).collect()
    }
}

fn tail_extremes(trace: &[TracePoint], sched: &CheckpointSchedule) -> (f64, f64) {
    trace[sched.tail_start()..]
        .iter()
        .fold((f64::NEG_INFINITY, f64::INFINITY), |(hi, lo), p| (hi.max(p.value), lo.min(p.value)))
}

fn ratio_point(n: u64, num: u128, den: u128) -> TracePoint {
    let value = if den == 0 { 0.0 } else { ratio_to_f64(num, den) };
    TracePoint { n, value, exact: Some((num, den)) }
}

/// Upper and lower asymptotic density from `|A ∩ [1,n]| / n`.
pub fn asymptotic_density(a: &SubsetWindow, sched: &CheckpointSchedule) -> Result<DensityEstimate, DensityError> {
    sched.check_within(a.horizon())?;
    Ok(DensityEstimate::from_trace(DensityKind::Asymptotic, counting_trace(a, sched), sched))
}

fn counting_trace(a: &SubsetWindow, sched: &CheckpointSchedule) -> Vec<TracePoint> {
    sched
        .checkpoints()
        .iter()
        .map(|&n| ratio_point(n, a.count_upto(n) as u128, u128::from(n)))
        .collect()
}

/// Streams `Σ_{i ∈ A, i ≤ n} w(i)` and `Σ_{i ≤ n} w(i)` in fixed point.
fn weighted_ratio_trace(
    a: &SubsetWindow,
    sched: &CheckpointSchedule,
    weight: impl Fn(u64) -> f64,
) -> Vec<TracePoint> {
    let scale = fixed_point_scale(sched.last());
    let members = a.members();
    let mut next_member = 0usize;
    let (mut num, mut den) = (0u128, 0u128);
    let mut i = 0u64;
    let mut trace = Vec::with_capacity(sched.checkpoints().len());
    for &n in sched.checkpoints() {
        while i < n {
            i += 1;
            let w = quantize(weight(i), scale);
            den += w;
            if members.get(next_member) == Some(&i) {
                num += w;
                next_member += 1;
            }
        }
        trace.push(ratio_point(n, num, den));
    }
    trace
}

/// `i^α / 2^{αb}` with `2^b ≥ H` for `α > 0`, and `i^α` for `α ≤ 0`; always in `[0, 1]`.
fn alpha_weight(alpha: f64, horizon: u64) -> impl Fn(u64) -> f64 {
    let reference = if alpha > 0.0 { (1u64 << ceil_log2(horizon)) as f64 } else { 1.0 };
    move |i: u64| {
        let x = i as f64 / reference;
        if alpha == 1.0 {
            x
        } else if alpha == 2.0 {
            x * x
        } else if alpha == 0.5 {
            x.sqrt()
        } else if alpha == -1.0 {
            1.0 / x
        } else if alpha.abs() > 4.0 {
            (alpha * x.ln()).exp()
        } else {
            x.powf(alpha)
        }
    }
}

/// Upper α-density `limsup Σ_{i∈S∩[1,n]} i^α / Σ_{i≤n} i^α`.
pub fn alpha_density_upper(a: &SubsetWindow, alpha: f64, sched: &CheckpointSchedule) -> Result<DensityEstimate, DensityError> {
    if !alpha.is_finite() || alpha < -1.0 {
        return Err(DensityError::InvalidAlpha(alpha));
    }
    sched.check_within(a.horizon())?;
    let trace = if alpha == 0.0 {
        counting_trace(a, sched)
    } else {
        weighted_ratio_trace(a, sched, alpha_weight(alpha, sched.last()))
    };
    Ok(DensityEstimate::from_trace(DensityKind::Alpha(alpha), trace, sched))
}

/// Upper α-densities for several α, as a diagnostic against the Pólya sweep.
pub fn alpha_sweep(a: &SubsetWindow, alphas: &[f64], sched: &CheckpointSchedule) -> Result<Vec<(f64, f64)>, DensityError> {
    alphas
        .iter()
        .map(|&alpha| alpha_density_upper(a, alpha, sched).map(|e| (alpha, e.upper)))
        .collect()
}

/// Left end `⌈n s⌉` of the Pólya window, robust to `n s` landing on an integer.
fn window_start(n: u64, s: f64) -> u64 {
    let x = n as f64 * s;
    let r = x.round();
    let lo = if (x - r).abs() <= 1e-9 * x.max(1.0) { r } else { x.ceil() };
    (lo as u64).max(1)
}

/// Upper Pólya density estimate over an `s`-grid.
///
/// For each `s` the inner value is the maximum over the tail of
/// `|S ∩ [⌈ns⌉, n]| / ((1-s) n)`. The reported upper value is the inner value
/// at the largest `s`; no extrapolation to `s → 1` is attempted.
pub fn polya_upper(a: &SubsetWindow, s_grid: &[f64], sched: &CheckpointSchedule) -> Result<DensityEstimate, DensityError> {
    if s_grid.len() < 3 {
        return Err(DensityError::GridTooCoarse(s_grid.len()));
    }
    if s_grid.iter().any(|&s| !(s > 0.0 && s < 1.0)) || s_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(DensityError::InvalidGrid("values must be strictly increasing inside (0,1)".into()));
    }
    sched.check_within(a.horizon())?;
    let tail = sched.tail_start();
    let per_s: Vec<PolyaLevel> = s_grid
        .iter()
        .map(|&s| {
            let trace: Vec<TracePoint> = sched
                .checkpoints()
                .iter()
                .map(|&n| {
                    let lo = window_start(n, s);
                    let count = a.count_upto(n) - a.count_upto(lo - 1);
                    TracePoint { n, value: count as f64 / ((1.0 - s) * n as f64), exact: None }
                })
                .collect();
            let value = trace[tail..].iter().map(|p| p.value).fold(f64::NEG_INFINITY, f64::max);
            PolyaLevel { s, value, trace }
        })
        .collect();
    let top = per_s.last().expect("grid has at least 3 points");
    let mut est = DensityEstimate::from_trace(DensityKind::Polya(s_grid.to_vec()), top.trace.clone(), sched);
    est.per_s = per_s;
    Ok(est)
}

/// Partial sums `Σ_{n ∈ A, n ≤ n_j} f(n)` at the default schedule for `horizon`.
pub fn weight_sum(f: WeightFunction, a: &SubsetWindow, horizon: u64) -> Result<DensityEstimate, DensityError> {
    let sched = CheckpointSchedule::geometric(horizon)?;
    weight_sum_with(f, a, &sched)
}

pub fn weight_sum_with(f: WeightFunction, a: &SubsetWindow, sched: &CheckpointSchedule) -> Result<DensityEstimate, DensityError> {
    sched.check_within(a.horizon())?;
    let members = a.members();
    let mut acc = NeumaierSum::new();
    let mut next = 0usize;
    let mut trace = Vec::with_capacity(sched.checkpoints().len());
    for &n in sched.checkpoints() {
        while next < members.len() && members[next] <= n {
            acc += f.eval(members[next]);
            next += 1;
        }
        trace.push(TracePoint { n, value: acc.value(), exact: None });
    }
    let tail = &trace[sched.tail_start()..];
    let lower = tail.first().map_or(0.0, |p| p.value);
    let upper = tail.last().map_or(0.0, |p| p.value);
    let oscillation = upper - lower;
    let converged = oscillation < CONVERGENCE_TOLERANCE;
    Ok(DensityEstimate {
        kind: DensityKind::WeightSum(f),
        upper,
        lower,
        unbounded: !converged,
        converged,
        oscillation,
        trace,
        per_s: Vec::new(),
    })
}

/// Relative weight `Σ_{i∈A∩[1,n]} f(i) / Σ_{i≤n} f(i)`.
pub fn erdos_ulam_ratio(f: WeightFunction, a: &SubsetWindow, sched: &CheckpointSchedule) -> Result<DensityEstimate, DensityError> {
    sched.check_within(a.horizon())?;
    let trace = weighted_ratio_trace(a, sched, |i| f.normalized(i));
    if trace.last().and_then(|p| p.exact).is_none_or(|(_, den)| den == 0) {
        return Err(DensityError::ZeroTotalWeight);
    }
    Ok(DensityEstimate::from_trace(DensityKind::ErdosUlam(f), trace, sched))
}

/// `Σ_{i≤n} f(i) / Σ_{i≤kn} f(i)` over the schedule; `lower` is the tail minimum.
///
/// `prefix_horizon` bounds how far prefix sums may be computed.
pub fn addlimit_check(
    f: WeightFunction,
    k: u64,
    sched: &CheckpointSchedule,
    prefix_horizon: u64,
) -> Result<DensityEstimate, DensityError> {
    if k == 0 {
        return Err(DensityError::InvalidMultiplier);
    }
    let far = sched.last().saturating_mul(k);
    if far > prefix_horizon {
        return Err(DensityError::ScheduleBeyondHorizon { last: far, horizon: prefix_horizon });
    }
    // Prefix sums at every n_j and k n_j, in one increasing pass.
    let mut targets: Vec<u64> = sched.checkpoints().iter().flat_map(|&n| [n, n * k]).collect();
    targets.sort_unstable();
    targets.dedup();
    let mut sums = Vec::with_capacity(targets.len());
    let mut acc = NeumaierSum::new();
    let mut i = 0u64;
    for &t in &targets {
        while i < t {
            i += 1;
            acc += f.eval(i);
        }
        sums.push(acc.value());
    }
    let prefix = |n: u64| sums[targets.binary_search(&n).expect("target recorded")];
    let trace = sched
        .checkpoints()
        .iter()
        .map(|&n| {
            let (small, large) = (prefix(n), prefix(n * k));
            let value = if large == 0.0 { 0.0 } else { small / large };
            TracePoint { n, value, exact: None }
        })
        .collect();
    Ok(DensityEstimate::from_trace(DensityKind::AddLimit(f, k), trace, sched))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subsets::SetFamily;

    fn window(spec: &str, h: u64) -> SubsetWindow {
        spec.parse::<SetFamily>().unwrap().materialize(h)
    }

    #[test]
    fn default_schedule_shape() {
        let s = CheckpointSchedule::geometric(1_000_000).unwrap();
        assert_eq!(s.checkpoints().len(), 32);
        assert_eq!(s.last(), 1_000_000);
        assert_eq!(s.tail().len(), 16);
        assert_eq!(s.tail_first(), (1e6 * 0.8f64.powi(15)).ceil() as u64);
        assert!(matches!(CheckpointSchedule::geometric(5), Err(DensityError::TooFewCheckpoints(_))));
    }

    #[test]
    fn schedule_beyond_horizon() {
        let s = CheckpointSchedule::geometric(1000).unwrap();
        let a = window("evens", 999);
        assert!(matches!(asymptotic_density(&a, &s), Err(DensityError::ScheduleBeyondHorizon { .. })));
    }

    #[test]
    fn alpha_zero_is_counting() {
        let a = window("bernoulli:0.3:4|squares", 100_000);
        let s = CheckpointSchedule::geometric(100_000).unwrap();
        let d = asymptotic_density(&a, &s).unwrap();
        let z = alpha_density_upper(&a, 0.0, &s).unwrap();
        assert_eq!(d.values(), z.values());
        assert!(alpha_density_upper(&a, -1.5, &s).is_err());
    }

    #[test]
    fn const_weights_reduce_to_counting() {
        let a = window("evens", 50_000);
        let s = CheckpointSchedule::geometric(50_000).unwrap();
        let d = asymptotic_density(&a, &s).unwrap();
        for c in [1.0, 3.5] {
            let e = erdos_ulam_ratio(WeightFunction::Const(c), &a, &s).unwrap();
            assert_eq!(d.values(), e.values());
        }
    }

    #[test]
    fn empty_set_has_zero_relative_weight() {
        let s = CheckpointSchedule::geometric(10_000).unwrap();
        let e = erdos_ulam_ratio(WeightFunction::OneOverN, &SubsetWindow::empty(10_000), &s).unwrap();
        assert!(e.values().iter().all(|&v| v == 0.0));
        assert_eq!(e.upper, 0.0);
    }

    #[test]
    fn alternating_weights_normalize() {
        let w = WeightFunction::Alternating01;
        assert_eq!((w.eval(1), w.eval(2), w.sup()), (0.0, 1.0, 1.0));
        let s = CheckpointSchedule::geometric(1000).unwrap();
        let e = erdos_ulam_ratio(w, &window("evens", 1000), &s).unwrap();
        assert_eq!((e.upper, e.lower), (1.0, 1.0));
        // n = 1 carries no weight at all
        assert_eq!(e.trace[0].n, 1);
        assert_eq!(e.trace[0].value, 0.0);
    }

    #[test]
    fn polya_of_naturals_and_finite_sets() {
        let h = 1 << 16;
        let s = CheckpointSchedule::geometric(h).unwrap();
        let n = polya_upper(&SubsetWindow::naturals(h), &DEFAULT_S_GRID, &s).unwrap();
        for level in &n.per_s {
            assert!((level.value - 1.0).abs() < 1e-3 + 1.0 / ((1.0 - level.s) * s.tail_first() as f64), "{level:?}");
        }
        let fin = polya_upper(&window("{3,10,77}", h), &DEFAULT_S_GRID, &s).unwrap();
        assert!(fin.per_s.iter().all(|l| l.value == 0.0));
        assert!(matches!(polya_upper(&fin_window(), &[0.5, 0.9], &s), Err(DensityError::GridTooCoarse(2))));
        assert!(polya_upper(&fin_window(), &[0.5, 0.9, 1.0], &s).is_err());
    }

    fn fin_window() -> SubsetWindow {
        window("{3}", 1 << 16)
    }

    #[test]
    fn alternating_weight_sum_on_odds_is_zero() {
        let a = window("odds", 100_000);
        let e = weight_sum(WeightFunction::Alternating01, &a, 100_000).unwrap();
        assert_eq!(e.upper, 0.0);
        assert!(e.converged);
    }

    #[test]
    fn addlimit_trivial_cases() {
        let s = CheckpointSchedule::geometric(100_000).unwrap();
        let one = addlimit_check(WeightFunction::OneOverN, 1, &s, 100_000).unwrap();
        assert!(one.values().iter().all(|&v| v == 1.0));
        let c = addlimit_check(WeightFunction::Const(1.0), 2, &s, 200_000).unwrap();
        assert!((c.lower - 0.5).abs() < 1e-3);
        assert!(addlimit_check(WeightFunction::Const(1.0), 2, &s, 150_000).is_err());
        assert!(addlimit_check(WeightFunction::Const(1.0), 0, &s, 150_000).is_err());
    }

    #[test]
    fn weight_function_grammar() {
        for s in ["one_over_n", "const", "const:2.5", "one_over_n_log", "alternating01"] {
            assert_eq!(s.parse::<WeightFunction>().unwrap().to_string(), s);
        }
        assert!("const:-1".parse::<WeightFunction>().is_err());
        assert!(WeightFunction::OneOverNLog.definitively_nonincreasing());
        assert!(!WeightFunction::Alternating01.definitively_nonincreasing());
    }
}
