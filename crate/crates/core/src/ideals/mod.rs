//! Finite-horizon membership decisions for the ideals, and randomized testers
//! for stretchability, (weak) thinnability and invariance.
//!
//! A decision compares one statistic of the set against two thresholds:
//! at most `tau_in` means In, at least `tau_out` means NotIn, anything in
//! between is Undecided. A window with no members in the tail of the schedule
//! is treated as finite and is In for every ideal.

mod testers;

pub use testers::{
    counterexample_ideal, test_invariant, test_stretchable, test_thinnable, test_weakly_thinnable, ForcedPair,
    Property, PropertyReport, SetGenerator, Witness, COUNTEREXAMPLE_HORIZON,
};

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::densities::{
    alpha_density_upper, asymptotic_density, erdos_ulam_ratio, polya_upper, weight_sum_with, CheckpointSchedule,
    DensityError, DensityEstimate, WeightFunction, CONVERGENCE_TOLERANCE, DEFAULT_S_GRID,
};
use crate::numeric::ratio_to_f64;
use crate::subsets::{SubsetError, SubsetWindow};

pub const DEFAULT_TAU_IN: f64 = 0.005;
pub const DEFAULT_TAU_OUT: f64 = 0.02;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IdealError {
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error(transparent)]
    Subset(#[from] SubsetError),
    #[error("thresholds must satisfy 0 <= tau_in < tau_out (got {tau_in}, {tau_out})")]
    InvalidThresholds { tau_in: f64, tau_out: f64 },
    #[error("no set with verdict {wanted:?} found in {draws} draws")]
    GeneratorExhausted { wanted: Verdict, draws: usize },
    #[error("invalid ideal spec `{0}`")]
    Parse(String),
    #[error("at least one trial is required")]
    NoTrials,
}

#[derive(Debug, Clone, PartialEq)]
pub enum IdealFamily {
    Fin,
    ZeroDensity,
    AlphaDensity(f64),
    Summable(WeightFunction),
    ErdosUlam(WeightFunction),
    Polya,
    /// `{S : S ∩ 2N finite}`, the summable ideal of `f(2n) = 1, f(2n-1) = 0`.
    EvenFin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdealSpec {
    pub family: IdealFamily,
    tau_in: f64,
    tau_out: f64,
}

impl IdealSpec {
    /// Default thresholds: counts for Fin/EvenFin (`0`, `1`), the convergence
    /// tolerance and `10 tau_in sup f` for summable ideals, `0.005`/`0.02` for
    /// ratio statistics.
    pub fn new(family: IdealFamily) -> Self {
        let (tau_in, tau_out) = match &family {
            IdealFamily::Fin | IdealFamily::EvenFin => (0.0, 1.0),
            IdealFamily::Summable(f) => (CONVERGENCE_TOLERANCE, 10.0 * CONVERGENCE_TOLERANCE * f.sup()),
            _ => (DEFAULT_TAU_IN, DEFAULT_TAU_OUT),
        };
        Self { family, tau_in, tau_out }
    }

    pub fn with_thresholds(family: IdealFamily, tau_in: f64, tau_out: f64) -> Result<Self, IdealError> {
        if !(tau_in >= 0.0 && tau_in < tau_out) {
            return Err(IdealError::InvalidThresholds { tau_in, tau_out });
        }
        Ok(Self { family, tau_in, tau_out })
    }

    pub fn fin() -> Self {
        Self::new(IdealFamily::Fin)
    }

    pub fn zero_density() -> Self {
        Self::new(IdealFamily::ZeroDensity)
    }

    pub fn even_fin() -> Self {
        Self::new(IdealFamily::EvenFin)
    }

    pub fn tau_in(&self) -> f64 {
        self.tau_in
    }

    pub fn tau_out(&self) -> f64 {
        self.tau_out
    }

    pub fn verdict_for(&self, statistic: f64) -> Verdict {
        if statistic <= self.tau_in {
            Verdict::In
        } else if statistic >= self.tau_out {
            Verdict::NotIn
        } else {
            Verdict::Undecided
        }
    }

    /// Ideals shown thinnable (Fin, zero density, α-densities, Pólya, and the
    /// stretchable summable / Erdős–Ulam ideals of the roster).
    pub fn known_thinnable(&self) -> bool {
        match &self.family {
            IdealFamily::EvenFin => false,
            IdealFamily::Summable(f) | IdealFamily::ErdosUlam(f) => f.definitively_nonincreasing(),
            _ => true,
        }
    }
}

impl fmt::Display for IdealSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            IdealFamily::Fin => f.write_str("fin"),
            IdealFamily::ZeroDensity => f.write_str("density0"),
            IdealFamily::AlphaDensity(a) => write!(f, "alpha:{a}"),
            IdealFamily::Summable(w) => write!(f, "summable:{w}"),
            IdealFamily::ErdosUlam(w) => write!(f, "eu:{w}"),
            IdealFamily::Polya => f.write_str("polya"),
            IdealFamily::EvenFin => f.write_str("evenfin"),
        }
    }
}

impl Serialize for IdealSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for IdealSpec {
    type Err = IdealError;

    fn from_str(spec: &str) -> Result<Self, Self::Err> {
        let spec = spec.trim();
        let err = || IdealError::Parse(spec.to_string());
        let family = match spec {
            "fin" => IdealFamily::Fin,
            "density0" => IdealFamily::ZeroDensity,
            "polya" => IdealFamily::Polya,
            "evenfin" => IdealFamily::EvenFin,
            _ => {
                let (head, arg) = spec.split_once(':').ok_or_else(err)?;
                match head {
                    "alpha" => {
                        let a: f64 = arg.parse().map_err(|_| err())?;
                        if !a.is_finite() || a < -1.0 {
                            return Err(err());
                        }
                        IdealFamily::AlphaDensity(a)
                    }
                    "summable" => IdealFamily::Summable(arg.parse().map_err(|_| err())?),
                    "eu" => IdealFamily::ErdosUlam(arg.parse().map_err(|_| err())?),
                    _ => return Err(err()),
                }
            }
        };
        Ok(Self::new(family))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    In,
    NotIn,
    Undecided,
}

impl Verdict {
    pub fn is_decided(self) -> bool {
        self != Verdict::Undecided
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Decision {
    pub verdict: Verdict,
    pub statistic: f64,
    pub horizon_used: u64,
}

/// Largest ratio of weight gained inside the tail, `(tail_first, n]`.
///
/// Membership ignores finite heads, and so does the finite-set shortcut in
/// [`member`]; measuring prefixes instead would let two heads-only sets
/// (both In) push a union over `tau_out`. It also keeps slowly growing
/// weights (`1/n`, `n^α` for `α < 0`) from being dominated by the first few
/// members: a finite-weight set's prefix ratio decays only like `1/ln n`.
fn tail_window_upper(est: &DensityEstimate, sched: &CheckpointSchedule) -> f64 {
    let start = sched.tail_start();
    let Some((num0, den0)) = est.trace[start].exact.filter(|_| start + 1 < est.trace.len()) else {
        return est.upper;
    };
    est.trace[start + 1..]
        .iter()
        .filter_map(|p| p.exact)
        .map(|(num, den)| if den > den0 { ratio_to_f64(num - num0, den - den0) } else { 0.0 })
        .fold(0.0, f64::max)
}

/// Decides `a ∈ I` at the schedule's horizon.
pub fn member(ideal: &IdealSpec, a: &SubsetWindow, sched: &CheckpointSchedule) -> Result<Decision, IdealError> {
    sched.check_within(a.horizon())?;
    let horizon_used = sched.last();
    let tail_first = sched.tail_first();
    let in_tail = |pred: &dyn Fn(u64) -> bool| {
        a.members()
            .iter()
            .skip_while(|&&m| m <= tail_first)
            .take_while(|&&m| m <= horizon_used)
            .filter(|&&m| pred(m))
            .count()
    };
    let tail_members = in_tail(&|_| true);
    let statistic = if tail_members == 0 {
        0.0
    } else {
        match &ideal.family {
            IdealFamily::Fin => tail_members as f64,
            IdealFamily::EvenFin => in_tail(&|m| m % 2 == 0) as f64,
            IdealFamily::ZeroDensity => tail_window_upper(&asymptotic_density(a, sched)?, sched),
            IdealFamily::AlphaDensity(alpha) => tail_window_upper(&alpha_density_upper(a, *alpha, sched)?, sched),
            IdealFamily::ErdosUlam(f) => tail_window_upper(&erdos_ulam_ratio(*f, a, sched)?, sched),
            IdealFamily::Polya => polya_upper(a, &DEFAULT_S_GRID, sched)?.upper,
            IdealFamily::Summable(f) => weight_sum_with(*f, a, sched)?.oscillation,
        }
    };
    Ok(Decision { verdict: ideal.verdict_for(statistic), statistic, horizon_used })
}

/// [`member`] at the default geometric schedule of the window's horizon.
pub fn member_default(ideal: &IdealSpec, a: &SubsetWindow) -> Result<Decision, IdealError> {
    member(ideal, a, &CheckpointSchedule::geometric(a.horizon())?)
}
