//! Monte Carlo runs over random subsequences, the thinnability suite and the
//! weak-thinnability counterexample, with JSON and CSV output.
//!
//! "For almost every ω" is checked as "for at least `pass_fraction` of the
//! trials". Trial `t` uses the selector seeded by `derive_seed(seed, t)`, so a
//! report depends only on the configuration, never on thread count.

mod config;

pub use config::{parse_count, ExperimentConfig, GridSpec, DEFAULT_CONVERGENCE_EPSILON, KEYS};

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::densities::{addlimit_check, asymptotic_density, CheckpointSchedule, DensityError, WeightFunction};
use crate::ideals::{
    member, member_default, test_invariant, test_stretchable, test_thinnable, test_weakly_thinnable, Decision,
    ForcedPair, IdealError, IdealFamily, IdealSpec, Property, PropertyReport, SetGenerator, Verdict,
};
use crate::rng::derive_seed;
use crate::sampler::{complement_selector, restrict, sample_selector, SamplerError};
use crate::sequences::{
    auto_grid, cluster_points_sweep, escape_sets_sweep, min_spacing, ClusterReport, Point, RealSequence,
    SequenceError,
};
use crate::subsets::{thin, SubsetError, SubsetWindow};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("convergence runs need a `limit`")]
    MissingLimit,
    #[error("no trial could be decided")]
    AllUndecided(Box<ExperimentReport>),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error(transparent)]
    Subset(#[from] SubsetError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    AllUndecided,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 2,
            Status::AllUndecided => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    MainTheorem,
    ConvergenceTheorem,
    Counterexample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialOutcome {
    Agree,
    /// A decided disagreement.
    Disagree,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaAtEpsilon {
    pub epsilon: f64,
    pub gamma: Vec<Point>,
    pub undecided: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTrial {
    /// Conjunction over the sweep, for `x↾ω`.
    pub omega: Verdict,
    /// Conjunction over the sweep, for `x↾(1−ω)`.
    pub complement: Verdict,
    /// Both restrictions converge.
    pub conjunction: Verdict,
    pub partition_identity: bool,
    /// The identity was checked on `[1, partition_checked_upto]`.
    pub partition_checked_upto: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub outcome: TrialOutcome,
    /// `None` for undecided trials.
    pub agreement: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub gamma: Vec<GammaAtEpsilon>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceTrial>,
    #[serde(skip)]
    statistics: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleFacts {
    pub a: String,
    pub b: String,
    pub b_decision: Decision,
    pub a_upper_density: f64,
    pub a_b_decision: Decision,
    pub precondition_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Baseline {
    Gamma(Vec<ClusterReport>),
    Convergence { verdict: Verdict, per_epsilon: Vec<Decision> },
    Counterexample(CounterexampleFacts),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: Experiment,
    pub config: ExperimentConfig,
    pub epsilon_sweep: Vec<f64>,
    pub baseline: Baseline,
    pub per_trial: Vec<TrialRecord>,
    pub decided_trials: usize,
    pub undecided_trials: usize,
    pub hard_disagreements: usize,
    /// Agreeing trials over decided trials.
    pub agreement_fraction: f64,
    pub pass: bool,
    pub status: Status,
    /// Gamma at each radius lies within gamma ∪ undecided at the previous radius.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_coherent: Option<bool>,
    /// Fraction of decided trials whose `x↾ω` verdict equals the baseline.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_agreement_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition_identity: Option<bool>,
    /// Seeds of disagreeing trials, for replay.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witness_seeds: Vec<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip)]
    statistic_columns: Vec<String>,
}

impl ExperimentReport {
    fn assemble(
        experiment: Experiment,
        config: &ExperimentConfig,
        epsilon_sweep: Vec<f64>,
        baseline: Baseline,
        per_trial: Vec<TrialRecord>,
        statistic_columns: Vec<String>,
        notes: Vec<String>,
    ) -> Self {
        let count = |o: TrialOutcome| per_trial.iter().filter(|t| t.outcome == o).count();
        let (agree, disagree, undecided) =
            (count(TrialOutcome::Agree), count(TrialOutcome::Disagree), count(TrialOutcome::Undecided));
        let decided = agree + disagree;
        let agreement_fraction = agreement_fraction(per_trial.iter().map(|t| t.outcome));
        let pass = decided > 0 && agreement_fraction >= config.pass_fraction;
        let status = if decided == 0 {
            Status::AllUndecided
        } else if pass {
            Status::Pass
        } else {
            Status::Fail
        };
        let witness_seeds = per_trial.iter().filter(|t| t.outcome == TrialOutcome::Disagree).map(|t| t.seed).collect();
        Self {
            experiment,
            config: config.clone(),
            epsilon_sweep,
            baseline,
            per_trial,
            decided_trials: decided,
            undecided_trials: undecided,
            hard_disagreements: disagree,
            agreement_fraction,
            pass,
            status,
            sweep_coherent: None,
            omega_agreement_fraction: None,
            partition_identity: None,
            witness_seeds,
            notes,
            statistic_columns,
        }
    }

    fn into_result(self) -> Result<Self, ExperimentError> {
        if self.status == Status::AllUndecided {
            Err(ExperimentError::AllUndecided(Box::new(self)))
        } else {
            Ok(self)
        }
    }

    /// One row per trial: trial, seed, agreement, then statistic columns.
    pub fn csv_table(&self) -> (Vec<String>, Vec<Vec<String>>) {
        let mut header = vec!["trial".to_string(), "seed".to_string(), "agreement".to_string()];
        header.extend(self.statistic_columns.iter().cloned());
        let rows = self
            .per_trial
            .iter()
            .map(|t| {
                let agreement = match t.agreement {
                    Some(a) => a.to_string(),
                    None => "undecided".to_string(),
                };
                let mut row = vec![t.trial.to_string(), t.seed.to_string(), agreement];
                row.extend(t.statistics.iter().map(f64::to_string));
                row
            })
            .collect();
        (header, rows)
    }
}

/// Agreeing trials over decided trials (0 when none is decided).
pub fn agreement_fraction(outcomes: impl IntoIterator<Item = TrialOutcome>) -> f64 {
    let (mut agree, mut decided) = (0usize, 0usize);
    for o in outcomes {
        match o {
            TrialOutcome::Agree => {
                agree += 1;
                decided += 1;
            }
            TrialOutcome::Disagree => decided += 1,
            TrialOutcome::Undecided => {}
        }
    }
    if decided == 0 {
        0.0
    } else {
        agree as f64 / decided as f64
    }
}

/// The candidate grid and the radii to use, defaulting each radius sweep to
/// a quarter of the grid spacing.
pub fn resolve_grid(config: &ExperimentConfig) -> Result<(Vec<Point>, Vec<f64>), ExperimentError> {
    let (grid, pitch) = match &config.grid {
        GridSpec::Auto => auto_grid(&config.sequence, config.horizon)?,
        GridSpec::List(points) => {
            let spacing = min_spacing(points);
            (points.clone(), if spacing.is_finite() { spacing } else { 1.0 })
        }
    };
    let sweep = if config.epsilon_sweep.is_empty() { vec![0.25 * pitch] } else { config.epsilon_sweep.clone() };
    Ok((grid, sweep))
}

fn gamma_rows(reports: &[ClusterReport]) -> Vec<GammaAtEpsilon> {
    reports
        .iter()
        .map(|r| GammaAtEpsilon { epsilon: r.epsilon, gamma: r.gamma.clone(), undecided: r.undecided.clone() })
        .collect()
}

fn sweep_coherent(reports: &[ClusterReport]) -> bool {
    reports
        .windows(2)
        .all(|w| w[1].gamma.iter().all(|p| w[0].gamma.contains(p) || w[0].undecided.contains(p)))
}

/// Compares gammas candidate by candidate. A candidate in one gamma but not
/// the other is a hard disagreement if both sides are decided, and an
/// undecided mismatch otherwise.
fn compare_gammas(baseline: &[ClusterReport], trial: &[ClusterReport]) -> TrialOutcome {
    let mut undecided = false;
    for (b, t) in baseline.iter().zip(trial) {
        for (cb, ct) in b.per_candidate.iter().zip(&t.per_candidate) {
            let (vb, vt) = (cb.decision.verdict, ct.decision.verdict);
            if (vb == Verdict::NotIn) != (vt == Verdict::NotIn) {
                if vb.is_decided() && vt.is_decided() {
                    return TrialOutcome::Disagree;
                }
                undecided = true;
            }
        }
    }
    if undecided {
        TrialOutcome::Undecided
    } else {
        TrialOutcome::Agree
    }
}

/// Whether `Γ_x(I) = Γ_{x↾ω}(I)` for random `ω`, on a finite grid.
pub fn run_main_theorem(config: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    config.validate()?;
    let x = &config.sequence;
    let sched = CheckpointSchedule::geometric(config.horizon)?;
    let (grid, sweep) = resolve_grid(config)?;
    let baseline = cluster_points_sweep(x, &config.ideal, &grid, &sweep, &sched)?;

    let trials: Vec<(TrialRecord, bool)> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = derive_seed(config.seed, trial as u64);
            let y = restrict(x, &sample_selector(seed), config.horizon)?;
            let reports = cluster_points_sweep(&y, &config.ideal, &grid, &sweep, &sched)?;
            let outcome = compare_gammas(&baseline, &reports);
            let statistics =
                reports.iter().flat_map(|r| r.per_candidate.iter().map(|c| c.decision.statistic)).collect();
            let record = TrialRecord {
                trial,
                seed,
                outcome,
                agreement: (outcome != TrialOutcome::Undecided).then_some(outcome == TrialOutcome::Agree),
                gamma: gamma_rows(&reports),
                convergence: None,
                statistics,
            };
            Ok((record, sweep_coherent(&reports)))
        })
        .collect::<Result<_, ExperimentError>>()?;

    let coherent = sweep_coherent(&baseline) && trials.iter().all(|(_, c)| *c);
    let mut notes = Vec::new();
    if !config.ideal.known_thinnable() {
        notes.push(format!("{} is not known to be thinnable; agreement is not predicted", config.ideal));
    }
    let columns = sweep
        .iter()
        .enumerate()
        .flat_map(|(m, _)| grid.iter().map(move |p| format!("stat_eps{m}_{p}")))
        .collect();
    let per_trial = trials.into_iter().map(|(r, _)| r).collect();
    let mut report = ExperimentReport::assemble(
        Experiment::MainTheorem,
        config,
        sweep,
        Baseline::Gamma(baseline),
        per_trial,
        columns,
        notes,
    );
    report.sweep_coherent = Some(coherent);
    report.into_result()
}

/// In if every verdict is In, NotIn if any is NotIn, otherwise Undecided.
fn conjunction(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
    let mut out = Verdict::In;
    for v in verdicts {
        match v {
            Verdict::NotIn => return Verdict::NotIn,
            Verdict::Undecided => out = Verdict::Undecided,
            Verdict::In => {}
        }
    }
    out
}

/// Checks `{n : x_n escapes} = {n_k : k ∈ E_ω} ∪ {m_r : r ∈ E_{1−ω}}` on the
/// longest prefix covered by both restricted windows. Returns the verdict and
/// the prefix length.
fn partition_identity(
    x: &RealSequence,
    limit: &Point,
    sweep: &[f64],
    selector: &crate::sampler::SubsequenceSelector,
    selected_escapes: &[SubsetWindow],
    complement_escapes: &[SubsetWindow],
    h: u64,
) -> (bool, u64) {
    let mut k = 0u64;
    let mut r = 0u64;
    let mut cursors = vec![(0usize, 0usize); sweep.len()];
    let mut n = 0u64;
    for (value, bit) in x.terms().zip(selector.bits()) {
        if k == h || r == h {
            break;
        }
        n += 1;
        let dist = value.distance(limit);
        let (pos, side) = if bit {
            k += 1;
            (k, selected_escapes)
        } else {
            r += 1;
            (r, complement_escapes)
        };
        for (m, &e) in sweep.iter().enumerate() {
            let cursor = if bit { &mut cursors[m].0 } else { &mut cursors[m].1 };
            let members = side[m].members();
            while *cursor < members.len() && members[*cursor] < pos {
                *cursor += 1;
            }
            let recorded = *cursor < members.len() && members[*cursor] == pos;
            if recorded != (dist >= e) {
                return (false, n);
            }
        }
    }
    (true, n)
}

/// Whether `x →_I limit` agrees with the convergence of `x↾ω` and `x↾(1−ω)`
/// for random `ω`.
pub fn run_convergence_theorem(config: &ExperimentConfig, limit: &Point) -> Result<ExperimentReport, ExperimentError> {
    config.validate()?;
    let x = &config.sequence;
    let h = config.horizon;
    let sched = CheckpointSchedule::geometric(h)?;
    let sweep =
        if config.epsilon_sweep.is_empty() { vec![DEFAULT_CONVERGENCE_EPSILON] } else { config.epsilon_sweep.clone() };
    if limit.dim() != x.dim() {
        return Err(SequenceError::DimensionMismatch { expected: x.dim(), found: limit.dim() }.into());
    }
    let decide = |windows: &[SubsetWindow]| -> Result<Vec<Decision>, ExperimentError> {
        windows.iter().map(|w| Ok(member(&config.ideal, w, &sched)?)).collect()
    };
    let baseline_decisions = decide(&escape_sets_sweep(x, limit, &sweep, h)?)?;
    let baseline = conjunction(baseline_decisions.iter().map(|d| d.verdict));

    let per_trial: Vec<TrialRecord> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = derive_seed(config.seed, trial as u64);
            let s = sample_selector(seed);
            let c = complement_selector(&s);
            let ey = escape_sets_sweep(&restrict(x, &s, h)?, limit, &sweep, h)?;
            let ez = escape_sets_sweep(&restrict(x, &c, h)?, limit, &sweep, h)?;
            let (dy, dz) = (decide(&ey)?, decide(&ez)?);
            let omega = conjunction(dy.iter().map(|d| d.verdict));
            let complement = conjunction(dz.iter().map(|d| d.verdict));
            let both = conjunction([omega, complement]);
            let (identity, upto) = partition_identity(x, limit, &sweep, &s, &ey, &ez, h);
            let outcome = if !both.is_decided() || !baseline.is_decided() {
                TrialOutcome::Undecided
            } else if both == baseline {
                TrialOutcome::Agree
            } else {
                TrialOutcome::Disagree
            };
            let statistics = dy.iter().chain(&dz).map(|d| d.statistic).collect();
            Ok(TrialRecord {
                trial,
                seed,
                outcome,
                agreement: (outcome != TrialOutcome::Undecided).then_some(outcome == TrialOutcome::Agree),
                gamma: Vec::new(),
                convergence: Some(ConvergenceTrial {
                    omega,
                    complement,
                    conjunction: both,
                    partition_identity: identity,
                    partition_checked_upto: upto,
                }),
                statistics,
            })
        })
        .collect::<Result<_, ExperimentError>>()?;

    let conv = |t: &TrialRecord| t.convergence.as_ref().expect("convergence trial").clone();
    let omega_decided: Vec<Verdict> = per_trial.iter().map(|t| conv(t).omega).filter(|v| v.is_decided()).collect();
    let omega_fraction = if omega_decided.is_empty() || !baseline.is_decided() {
        0.0
    } else {
        omega_decided.iter().filter(|&&v| v == baseline).count() as f64 / omega_decided.len() as f64
    };
    let identity = per_trial.iter().all(|t| conv(t).partition_identity);
    let mut notes = Vec::new();
    if !matches!(config.ideal.family, IdealFamily::Fin | IdealFamily::ZeroDensity) {
        notes.push(format!("{} is not known to be invariant; agreement is not predicted", config.ideal));
    }
    if !identity {
        notes.push("partition identity failed".to_string());
    }
    let columns = (0..sweep.len())
        .map(|m| format!("omega_eps{m}"))
        .chain((0..sweep.len()).map(|m| format!("complement_eps{m}")))
        .collect();
    let mut report = ExperimentReport::assemble(
        Experiment::ConvergenceTheorem,
        config,
        sweep,
        Baseline::Convergence { verdict: baseline, per_epsilon: baseline_decisions },
        per_trial,
        columns,
        notes,
    );
    report.omega_agreement_fraction = Some(omega_fraction);
    report.partition_identity = Some(identity);
    if !identity {
        report.pass = false;
        report.status = Status::Fail;
    }
    report.into_result()
}

/// `EvenFin` with `A = N \ {1}` and `B = 2N` (or `config.b_set`) at
/// `config.horizon`: expects `B ∉ I`, `d*(A) = 1` and `A_B ∈ I`.
pub fn run_counterexample(config: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    let h = config.horizon;
    let ideal = IdealSpec::even_fin();
    let ForcedPair { a: a_family, b: default_b } = ForcedPair::counterexample();
    let b_family = config.b_set.clone().unwrap_or(default_b);
    let a = a_family.materialize(h);
    let b = b_family.materialize(h);
    let b_decision = member_default(&ideal, &b)?;
    let a_upper_density = asymptotic_density(&a, &CheckpointSchedule::geometric(h)?)?.upper;
    let a_b_decision = member_default(&ideal, &thin(&a, &b)?)?;
    let precondition_holds = b_decision.verdict == Verdict::NotIn;

    let mut notes = Vec::new();
    if !precondition_holds {
        notes.push(format!("precondition fails: B = {b_family} is in the ideal ({:?})", b_decision.verdict));
    }
    if config.ideal != ideal {
        notes.push(format!("the counterexample always uses {ideal}; configured ideal {} ignored", config.ideal));
    }
    let checks = [
        b_decision.verdict == Verdict::NotIn,
        (0.999..=1.0).contains(&a_upper_density),
        a_b_decision.verdict == Verdict::In,
    ];
    let facts = CounterexampleFacts {
        a: a_family.to_string(),
        b: b_family.to_string(),
        b_decision,
        a_upper_density,
        a_b_decision,
        precondition_holds,
    };
    let record = |i: usize, ok: bool| TrialRecord {
        trial: i,
        seed: config.seed,
        outcome: if ok { TrialOutcome::Agree } else { TrialOutcome::Disagree },
        agreement: Some(ok),
        gamma: Vec::new(),
        convergence: None,
        statistics: Vec::new(),
    };
    // One row per expected fact.
    let per_trial = checks.iter().enumerate().map(|(i, &ok)| record(i, ok)).collect();
    let mut config = config.clone();
    config.pass_fraction = 1.0;
    let mut report =
        ExperimentReport::assemble(Experiment::Counterexample, &config, Vec::new(), Baseline::Counterexample(facts), per_trial, Vec::new(), notes);
    report.statistic_columns = vec!["statistic".into()];
    let stats = [b_decision.statistic, a_upper_density, a_b_decision.statistic];
    for (t, s) in report.per_trial.iter_mut().zip(stats) {
        t.statistics = vec![s];
    }
    Ok(report)
}

/// The ideals checked by default in the thinnability suite.
pub fn default_roster() -> Vec<IdealSpec> {
    ["fin", "density0", "alpha:-1", "alpha:0", "alpha:0.5", "alpha:1", "alpha:2", "summable:one_over_n", "eu:one_over_n", "polya", "evenfin"]
        .iter()
        .map(|s| s.parse().expect("roster entries parse"))
        .collect()
}

/// Whether the property is expected to hold: everything except the
/// properties that contain weak thinnability, for `EvenFin`.
pub fn expected_to_hold(ideal: &IdealSpec, property: Property) -> bool {
    ideal.family != IdealFamily::EvenFin || property == Property::Stretchable
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteEntry {
    #[serde(flatten)]
    pub report: PropertyReport,
    pub expected_pass: bool,
    pub matches_expectation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AddLimitRow {
    pub k: u64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub horizon: u64,
    pub trials: usize,
    pub seed: u64,
    pub entries: Vec<SuiteEntry>,
    /// `Σ_{i≤n} 1/i / Σ_{i≤kn} 1/i` over the schedule, for the Erdős–Ulam entry.
    pub addlimit: Vec<AddLimitRow>,
    pub max_undecided_fraction: f64,
    pub pass: bool,
    pub status: Status,
}

impl SuiteReport {
    pub fn csv_table(&self) -> (Vec<String>, Vec<Vec<String>>) {
        let header = ["ideal", "property", "trials", "violations", "undecided", "pass", "expected_pass"]
            .map(String::from)
            .to_vec();
        let rows = self
            .entries
            .iter()
            .map(|e| {
                vec![
                    e.report.ideal.clone(),
                    e.report.property.to_string(),
                    e.report.trials.to_string(),
                    e.report.violations.len().to_string(),
                    e.report.undecided.to_string(),
                    e.report.pass.to_string(),
                    e.expected_pass.to_string(),
                ]
            })
            .collect();
        (header, rows)
    }
}

/// Runs all four property testers over the roster. Every generator forces the
/// counterexample pair `(N \ {1}, 2N)` into its first trial.
pub fn run_thinnability_suite(config: &ExperimentConfig) -> Result<SuiteReport, ExperimentError> {
    config.validate()?;
    let roster = if config.roster.is_empty() { default_roster() } else { config.roster.clone() };
    let gen = SetGenerator::mixed(config.horizon).with_forced(ForcedPair::counterexample());
    let mut entries = Vec::new();
    for (i, ideal) in roster.iter().enumerate() {
        let ideal_seed = derive_seed(config.seed, i as u64);
        for (j, property) in Property::ALL.into_iter().enumerate() {
            let seed = derive_seed(ideal_seed, j as u64);
            let report = match property {
                Property::Stretchable => test_stretchable(ideal, &gen, config.trials, seed)?,
                Property::WeaklyThinnable => test_weakly_thinnable(ideal, &gen, config.trials, seed)?,
                Property::Thinnable => test_thinnable(ideal, &gen, config.trials, seed)?,
                Property::Invariant => test_invariant(ideal, &gen, config.trials, seed)?,
            };
            let expected_pass = expected_to_hold(ideal, property);
            entries.push(SuiteEntry { matches_expectation: report.pass == expected_pass, expected_pass, report });
        }
    }
    let sched = CheckpointSchedule::geometric(config.horizon)?;
    let addlimit = [2, 3]
        .into_iter()
        .map(|k| {
            let est = addlimit_check(WeightFunction::OneOverN, k, &sched, k * config.horizon)?;
            Ok(AddLimitRow { k, lower: est.lower, upper: est.upper })
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    let max_undecided_fraction = entries.iter().map(|e| e.report.undecided_fraction()).fold(0.0, f64::max);
    let pass = entries.iter().all(|e| e.matches_expectation);
    Ok(SuiteReport {
        horizon: config.horizon,
        trials: config.trials,
        seed: config.seed,
        entries,
        addlimit,
        max_undecided_fraction,
        pass,
        status: if pass { Status::Pass } else { Status::Fail },
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), ExperimentError> {
    std::fs::write(path, to_json(value)).map_err(|e| ExperimentError::Io(format!("{}: {e}", path.display())))
}

pub fn write_csv(path: &Path, table: &(Vec<String>, Vec<Vec<String>>)) -> Result<(), ExperimentError> {
    let io = |e: csv::Error| ExperimentError::Io(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(&table.0).map_err(io)?;
    for row in &table.1 {
        w.write_record(row).map_err(io)?;
    }
    w.flush().map_err(|e| ExperimentError::Io(format!("{}: {e}", path.display())))
}

/// The seeds `derive_seed(seed, t)` of a run with `trials` trials.
pub fn trial_seeds(seed: u64, trials: usize) -> Vec<u64> {
    (0..trials as u64).map(|t| derive_seed(seed, t)).collect()
}
