//! Randomized property testers.
//!
//! Each trial derives its own RNG from `(seed, trial index)`, so reports do not
//! depend on how trials are scheduled across threads.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{member_default, Decision, IdealError, IdealSpec, Verdict};
use crate::densities::{asymptotic_density, CheckpointSchedule};
use crate::rng::{derive_seed, trial_rng};
use crate::subsets::{stretch, thin, SetFamily, SubsetWindow};

pub const COUNTEREXAMPLE_HORIZON: u64 = 1_000_000;
pub const STRETCH_FACTORS: [u64; 3] = [2, 3, 5];
const BERNOULLI_PS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
/// Positive-density sets must show at least this lower density.
const MIN_POSITIVE_DENSITY: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Stretchable,
    WeaklyThinnable,
    Thinnable,
    Invariant,
}

impl Property {
    pub const ALL: [Property; 4] =
        [Property::Stretchable, Property::WeaklyThinnable, Property::Thinnable, Property::Invariant];
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::Stretchable => "stretchable",
            Property::WeaklyThinnable => "weak",
            Property::Thinnable => "full",
            Property::Invariant => "invariant",
        })
    }
}

impl FromStr for Property {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "stretchable" => Ok(Property::Stretchable),
            "weak" | "weakly_thinnable" => Ok(Property::WeaklyThinnable),
            "full" | "thinnable" => Ok(Property::Thinnable),
            "invariant" => Ok(Property::Invariant),
            other => Err(format!("unknown property `{other}`")),
        }
    }
}

/// A trial whose outcome contradicts the property.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub trial: usize,
    pub seed: u64,
    /// Which implication failed: `kA`, `A_B`, `B_A`, `X<=Y`, `A_B<=>B`.
    pub check: String,
    pub a: String,
    pub b: String,
    /// Statistic of the hypothesis set, then of the derived set.
    pub statistics: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub property: Property,
    pub ideal: String,
    pub horizon: u64,
    pub trials: usize,
    pub violations: Vec<Witness>,
    pub undecided: usize,
    pub pass: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl PropertyReport {
    pub fn undecided_fraction(&self) -> f64 {
        self.undecided as f64 / self.trials as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForcedPair {
    pub a: SetFamily,
    pub b: SetFamily,
}

#[derive(Debug, Clone, PartialEq)]
enum Pool {
    Mixed,
    Bernoulli,
    Fixed(Vec<SetFamily>),
}

/// Random subsets of N for the testers.
///
/// The mixed pool draws Bernoulli(p) sets with `p ∈ {0.1, ..., 0.9}`,
/// progressions `a + dN` with `d ≤ 10`, geometric block sets, squares, cubes,
/// small finite sets, odd-only progressions and unions of these.
#[derive(Debug, Clone, PartialEq)]
pub struct SetGenerator {
    horizon: u64,
    pool: Pool,
    forced: Vec<ForcedPair>,
    max_draws: usize,
}

impl SetGenerator {
    pub fn mixed(horizon: u64) -> Self {
        Self { horizon, pool: Pool::Mixed, forced: Vec::new(), max_draws: 64 }
    }

    pub fn bernoulli(horizon: u64) -> Self {
        Self { pool: Pool::Bernoulli, ..Self::mixed(horizon) }
    }

    /// Always draws from the given families.
    pub fn fixed(horizon: u64, families: Vec<SetFamily>) -> Self {
        Self { pool: Pool::Fixed(families), ..Self::mixed(horizon) }
    }

    /// The first trials use these `(A, B)` pairs instead of random draws.
    pub fn with_forced(mut self, pair: ForcedPair) -> Self {
        self.forced.push(pair);
        self
    }

    pub fn with_max_draws(mut self, draws: usize) -> Self {
        self.max_draws = draws.max(1);
        self
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    fn bernoulli_family(rng: &mut ChaCha8Rng) -> SetFamily {
        SetFamily::Bernoulli { p: *BERNOULLI_PS.choose(rng).expect("nonempty"), seed: rng.gen() }
    }

    fn progression(rng: &mut ChaCha8Rng) -> SetFamily {
        let step = rng.gen_range(1..=10);
        SetFamily::Progression { start: rng.gen_range(1..=step), step }
    }

    /// A family of positive asymptotic density.
    pub fn positive_family(&self, rng: &mut ChaCha8Rng) -> SetFamily {
        match &self.pool {
            Pool::Fixed(list) => list.choose(rng).expect("nonempty pool").clone(),
            Pool::Bernoulli => Self::bernoulli_family(rng),
            Pool::Mixed => match rng.gen_range(0..10) {
                0..=4 => Self::bernoulli_family(rng),
                5..=7 => Self::progression(rng),
                _ => SetFamily::Union(vec![Self::bernoulli_family(rng), Self::progression(rng)]),
            },
        }
    }

    pub fn any_family(&self, rng: &mut ChaCha8Rng) -> SetFamily {
        match &self.pool {
            Pool::Fixed(list) => list.choose(rng).expect("nonempty pool").clone(),
            Pool::Bernoulli => Self::bernoulli_family(rng),
            Pool::Mixed => match rng.gen_range(0..100) {
                0..=29 => Self::bernoulli_family(rng),
                30..=49 => Self::progression(rng),
                50..=59 => SetFamily::Blocks(rng.gen_range(2..=4)),
                60..=64 => SetFamily::Squares,
                65..=69 => SetFamily::Cubes,
                70..=79 => {
                    let cap = (self.horizon / 64).max(2);
                    let mut v: Vec<u64> = (0..rng.gen_range(1..=20)).map(|_| rng.gen_range(1..=cap)).collect();
                    v.sort_unstable();
                    v.dedup();
                    SetFamily::Explicit(v)
                }
                80..=87 => {
                    let step = 2 * rng.gen_range(1..=5);
                    SetFamily::Progression { start: 2 * rng.gen_range(0..step / 2) + 1, step }
                }
                _ => SetFamily::Union(vec![self.positive_family(rng), SetFamily::Squares]),
            },
        }
    }

    /// Draws a set at the generator horizon with the wanted verdict.
    pub fn draw_with_verdict(
        &self,
        ideal: &IdealSpec,
        wanted: Verdict,
        rng: &mut ChaCha8Rng,
    ) -> Result<(SetFamily, SubsetWindow, Decision), IdealError> {
        for _ in 0..self.max_draws {
            let family = self.any_family(rng);
            let window = family.materialize(self.horizon);
            let decision = member_default(ideal, &window)?;
            if decision.verdict == wanted {
                return Ok((family, window, decision));
            }
        }
        Err(IdealError::GeneratorExhausted { wanted, draws: self.max_draws })
    }

    /// Draws a positive-density family, materialized with at least `min_members` members.
    fn draw_positive(&self, rng: &mut ChaCha8Rng, min_members: usize) -> Result<(SetFamily, SubsetWindow), IdealError> {
        for _ in 0..self.max_draws {
            let family = self.positive_family(rng);
            if let Some(window) = positive_window(&family, min_members, self.horizon)? {
                return Ok((family, window));
            }
        }
        Err(IdealError::GeneratorExhausted { wanted: Verdict::NotIn, draws: self.max_draws })
    }
}

/// `family` with at least `min_members` members, if its estimated density is positive.
fn positive_window(family: &SetFamily, min_members: usize, horizon: u64) -> Result<Option<SubsetWindow>, IdealError> {
    let cap = horizon.saturating_mul(64);
    let window = family.materialize_count(min_members.max(1), cap);
    if window.len() < min_members {
        return Ok(None);
    }
    let est = asymptotic_density(&window, &CheckpointSchedule::geometric(window.horizon())?)?;
    Ok((est.lower >= MIN_POSITIVE_DENSITY).then_some(window))
}

enum TrialOutcome {
    Confirmed,
    Violated(Vec<Witness>),
    Undecided,
    /// The hypothesis could not be instantiated.
    Skipped(String),
}

struct Ctx<'a> {
    ideal: &'a IdealSpec,
    gen: &'a SetGenerator,
    trial: usize,
    seed: u64,
}

impl Ctx<'_> {
    fn witness(&self, check: &str, a: impl ToString, b: impl ToString, statistics: Vec<f64>) -> Witness {
        Witness { trial: self.trial, seed: self.seed, check: check.into(), a: a.to_string(), b: b.to_string(), statistics }
    }

    fn forced(&self) -> Option<&ForcedPair> {
        self.gen.forced.get(self.trial)
    }
}

/// Combines sub-check outcomes of one trial.
fn combine(parts: Vec<TrialOutcome>) -> TrialOutcome {
    let mut witnesses = Vec::new();
    let mut undecided = false;
    for p in parts {
        match p {
            TrialOutcome::Violated(w) => witnesses.extend(w),
            TrialOutcome::Undecided => undecided = true,
            TrialOutcome::Skipped(note) => return TrialOutcome::Skipped(note),
            TrialOutcome::Confirmed => {}
        }
    }
    if !witnesses.is_empty() {
        TrialOutcome::Violated(witnesses)
    } else if undecided {
        TrialOutcome::Undecided
    } else {
        TrialOutcome::Confirmed
    }
}

/// Expects the derived set to be NotIn.
fn expect_not_in(ctx: &Ctx, check: &str, a: impl ToString, b: impl ToString, hyp: &Decision, derived: &Decision) -> TrialOutcome {
    match derived.verdict {
        Verdict::NotIn => TrialOutcome::Confirmed,
        Verdict::Undecided => TrialOutcome::Undecided,
        Verdict::In => TrialOutcome::Violated(vec![ctx.witness(check, a, b, vec![hyp.statistic, derived.statistic])]),
    }
}

fn run_trials(
    property: Property,
    ideal: &IdealSpec,
    gen: &SetGenerator,
    trials: usize,
    seed: u64,
    trial_fn: impl Fn(&Ctx, &mut ChaCha8Rng) -> Result<TrialOutcome, IdealError> + Sync,
) -> Result<PropertyReport, IdealError> {
    if trials == 0 {
        return Err(IdealError::NoTrials);
    }
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let trial_seed = derive_seed(seed, trial as u64);
            let ctx = Ctx { ideal, gen, trial, seed: trial_seed };
            let mut rng = trial_rng(trial_seed);
            match trial_fn(&ctx, &mut rng) {
                Err(IdealError::GeneratorExhausted { wanted, draws }) => Ok(TrialOutcome::Skipped(format!(
                    "trial {trial}: no set with verdict {wanted:?} in {draws} draws"
                ))),
                other => other,
            }
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut violations = Vec::new();
    let mut undecided = 0;
    let mut skipped = Vec::new();
    for outcome in outcomes {
        match outcome {
            TrialOutcome::Confirmed => {}
            TrialOutcome::Violated(w) => violations.extend(w),
            TrialOutcome::Undecided => undecided += 1,
            TrialOutcome::Skipped(note) => skipped.push(note),
        }
    }
    let mut notes = Vec::new();
    if !skipped.is_empty() {
        undecided += skipped.len();
        if skipped.len() == trials {
            notes.push("vacuous: the hypothesis was never met, no trial could be run".to_string());
        }
        notes.extend(skipped.into_iter().take(5));
    }
    let pass = violations.is_empty();
    Ok(PropertyReport { property, ideal: ideal.to_string(), horizon: gen.horizon, trials, violations, undecided, pass, notes })
}

/// `A ∉ I ⇒ kA ∉ I` for `k ∈ {2, 3, 5}`.
pub fn test_stretchable(ideal: &IdealSpec, gen: &SetGenerator, trials: usize, seed: u64) -> Result<PropertyReport, IdealError> {
    run_trials(Property::Stretchable, ideal, gen, trials, seed, |ctx, rng| {
        let (family, a, hyp) = gen.draw_with_verdict(ctx.ideal, Verdict::NotIn, rng)?;
        let k = *STRETCH_FACTORS.choose(rng).expect("nonempty");
        let derived = member_default(ctx.ideal, &stretch(&a, k)?)?;
        Ok(expect_not_in(ctx, "kA", family, format!("k={k}"), &hyp, &derived))
    })
}

type ThinningPair = (SetFamily, SubsetWindow, SetFamily, SubsetWindow, Decision);

/// Draws `B ∉ I` (or takes the forced pair) and `A` of positive density
/// covering B's indices.
fn draw_thinning_pair(
    ctx: &Ctx,
    rng: &mut ChaCha8Rng,
) -> Result<Result<ThinningPair, TrialOutcome>, IdealError> {
    let (a_family, b_family, b, hyp) = match ctx.forced() {
        Some(pair) => {
            let b = pair.b.materialize(ctx.gen.horizon);
            let hyp = member_default(ctx.ideal, &b)?;
            if hyp.verdict != Verdict::NotIn {
                return Ok(Err(TrialOutcome::Skipped(format!(
                    "trial {}: forced B = {} is not outside the ideal ({:?})",
                    ctx.trial, pair.b, hyp.verdict
                ))));
            }
            (Some(pair.a.clone()), pair.b.clone(), b, hyp)
        }
        None => {
            let (f, w, d) = ctx.gen.draw_with_verdict(ctx.ideal, Verdict::NotIn, rng)?;
            (None, f, w, d)
        }
    };
    let need = b.horizon() as usize;
    let (a_family, a) = match a_family {
        Some(f) => {
            let w = f.materialize_count(need, ctx.gen.horizon.saturating_mul(64));
            (f, w)
        }
        None => ctx.gen.draw_positive(rng, need)?,
    };
    Ok(Ok((a_family, a, b_family, b, hyp)))
}

fn weak_check(ctx: &Ctx, a_family: &SetFamily, a: &SubsetWindow, b_family: &SetFamily, b: &SubsetWindow, hyp: &Decision) -> Result<TrialOutcome, IdealError> {
    let derived = member_default(ctx.ideal, &thin(a, b)?)?;
    Ok(expect_not_in(ctx, "A_B", a_family, b_family, hyp, &derived))
}

/// `A_B ∉ I` whenever `A` has positive density and `B ∉ I`.
pub fn test_weakly_thinnable(ideal: &IdealSpec, gen: &SetGenerator, trials: usize, seed: u64) -> Result<PropertyReport, IdealError> {
    run_trials(Property::WeaklyThinnable, ideal, gen, trials, seed, |ctx, rng| {
        match draw_thinning_pair(ctx, rng)? {
            Err(outcome) => Ok(outcome),
            Ok((af, a, bf, b, hyp)) => weak_check(ctx, &af, &a, &bf, &b, &hyp),
        }
    })
}

/// A set `X ≤ Y` obtained by pulling each `y_n` down by a random fraction,
/// kept strictly increasing.
fn dominated_by(y: &SubsetWindow, rng: &mut ChaCha8Rng) -> SubsetWindow {
    let shrink: f64 = rng.gen_range(0.0..0.5);
    let mut prev = 0u64;
    let members: Vec<u64> = y
        .members()
        .iter()
        .map(|&yn| {
            let offset = (rng.gen::<f64>() * shrink * yn as f64) as u64;
            let x = (yn - offset.min(yn - 1)).max(prev + 1);
            prev = x;
            x
        })
        .collect();
    // X is known exactly up to its last listed element.
    let horizon = members.last().copied().unwrap_or(y.horizon());
    SubsetWindow::new(members, horizon).expect("strictly increasing by construction")
}

/// Weak thinnability plus `B_A ∉ I` and `X ∉ I` for `X ≤ Y ∉ I`.
pub fn test_thinnable(ideal: &IdealSpec, gen: &SetGenerator, trials: usize, seed: u64) -> Result<PropertyReport, IdealError> {
    run_trials(Property::Thinnable, ideal, gen, trials, seed, |ctx, rng| {
        let (af, a, bf, b, hyp) = match draw_thinning_pair(ctx, rng)? {
            Err(outcome) => return Ok(outcome),
            Ok(pair) => pair,
        };
        let weak = weak_check(ctx, &af, &a, &bf, &b, &hyp)?;

        // B_A: indices from A applied to B's enumeration.
        let index_set = af.materialize(b.len().max(1) as u64);
        let reverse = if b.is_empty() {
            TrialOutcome::Undecided
        } else {
            let derived = member_default(ctx.ideal, &thin(&b, &index_set)?)?;
            expect_not_in(ctx, "B_A", &bf, &af, &hyp, &derived)
        };

        let x = dominated_by(&b, rng);
        let domination = match CheckpointSchedule::geometric(x.horizon()) {
            Ok(sched) => {
                let derived = super::member(ctx.ideal, &x, &sched)?;
                expect_not_in(ctx, "X<=Y", "X", &bf, &hyp, &derived)
            }
            Err(_) => TrialOutcome::Undecided,
        };
        Ok(combine(vec![weak, reverse, domination]))
    })
}

/// `A_B ∉ I ⇔ B ∉ I` for `A` of positive density, both directions.
pub fn test_invariant(ideal: &IdealSpec, gen: &SetGenerator, trials: usize, seed: u64) -> Result<PropertyReport, IdealError> {
    run_trials(Property::Invariant, ideal, gen, trials, seed, |ctx, rng| {
        let (af, a, bf, b, hyp) = match ctx.forced() {
            Some(_) => match draw_thinning_pair(ctx, rng)? {
                Err(outcome) => return Ok(outcome),
                Ok(pair) => pair,
            },
            None => {
                let wanted = if rng.gen_bool(0.5) { Verdict::In } else { Verdict::NotIn };
                let (bf, b, hyp) = ctx.gen.draw_with_verdict(ctx.ideal, wanted, rng)?;
                let (af, a) = ctx.gen.draw_positive(rng, b.horizon() as usize)?;
                (af, a, bf, b, hyp)
            }
        };
        let derived = member_default(ctx.ideal, &thin(&a, &b)?)?;
        Ok(match derived.verdict {
            Verdict::Undecided => TrialOutcome::Undecided,
            v if v == hyp.verdict => TrialOutcome::Confirmed,
            _ => TrialOutcome::Violated(vec![ctx.witness("A_B<=>B", af, bf, vec![hyp.statistic, derived.statistic])]),
        })
    })
}

/// The ideal `{S : S ∩ 2N finite}` with `A = N \ {1}` and `B = 2N`, materialized
/// at [`COUNTEREXAMPLE_HORIZON`].
pub fn counterexample_ideal() -> (IdealSpec, SubsetWindow, SubsetWindow) {
    let (a, b) = counterexample_families();
    (IdealSpec::even_fin(), a.materialize(COUNTEREXAMPLE_HORIZON), b.materialize(COUNTEREXAMPLE_HORIZON))
}

pub(crate) fn counterexample_families() -> (SetFamily, SetFamily) {
    (SetFamily::Complement(Box::new(SetFamily::Explicit(vec![1]))), SetFamily::Evens)
}

impl ForcedPair {
    /// `A = N \ {1}`, `B = 2N`.
    pub fn counterexample() -> Self {
        let (a, b) = counterexample_families();
        Self { a, b }
    }
}
