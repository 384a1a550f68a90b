use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use thinnable::densities::{
    addlimit_check, alpha_density_upper, asymptotic_density, erdos_ulam_ratio, polya_upper, weight_sum_with,
    CheckpointSchedule, DensityEstimate, WeightFunction, DEFAULT_S_GRID,
};
use thinnable::experiments::{
    self, run_convergence_theorem, run_counterexample, run_main_theorem, run_thinnability_suite, ExperimentConfig,
    ExperimentError, ExperimentReport, Status,
};
use thinnable::ideals::{
    member_default, test_invariant, test_stretchable, test_thinnable, test_weakly_thinnable, ForcedPair, IdealSpec,
    Property, SetGenerator,
};
use thinnable::sampler::{index_trace, sample_selector};
use thinnable::sequences::{auto_grid, cluster_points, parse_grid, RealSequence};
use thinnable::subsets::SetFamily;

#[derive(Parser)]
#[command(name = "thinnable", version, about = "Densities, ideals and random subsequences of N")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Density estimate of a set.
    Density {
        #[arg(long)]
        set: SetFamily,
        /// asymptotic, alpha:A, polya, weight:F, eu:F or addlimit:F:K
        #[arg(long, default_value = "asymptotic")]
        kind: String,
        #[arg(long, default_value = "1000000", value_parser = parse_horizon)]
        horizon: u64,
    },
    /// Membership decision of a set in an ideal.
    Membership {
        #[arg(long)]
        ideal: IdealSpec,
        #[arg(long)]
        set: SetFamily,
        #[arg(long, default_value = "1000000", value_parser = parse_horizon)]
        horizon: u64,
    },
    /// Randomized property test of one ideal, or the whole roster.
    Thinnability {
        /// stretchable, weak, full or invariant; requires --ideal
        #[arg(long)]
        property: Option<Property>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Cluster points of a sequence on a finite grid.
    Gamma {
        #[arg(long)]
        seq: RealSequence,
        #[arg(long)]
        ideal: IdealSpec,
        #[arg(long, default_value = "1000000", value_parser = parse_horizon)]
        horizon: u64,
        /// `auto` or a list such as `{-1,0,1}`
        #[arg(long, default_value = "auto")]
        grid: String,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Fair-coin selector statistics.
    Sample {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "1000000", value_parser = parse_horizon)]
        horizon: u64,
        /// Index set `i`: reports the density of positions whose `i_n` is selected.
        #[arg(long)]
        indices: Option<SetFamily>,
    },
    /// Cluster sets of random subsequences against the full sequence.
    VerifyMain(RunArgs),
    /// Ideal convergence of random subsequences against the full sequence.
    VerifyConvergence(RunArgs),
    /// The weakly-non-thinnable ideal `{S : S ∩ 2N finite}`.
    Counterexample(RunArgs),
}

/// `--config` file plus per-key overrides.
#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    sequence: Option<String>,
    #[arg(long)]
    ideal: Option<String>,
    #[arg(long)]
    horizon: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    epsilon_sweep: Option<String>,
    #[arg(long)]
    pass_fraction: Option<String>,
    #[arg(long)]
    out_json: Option<String>,
    #[arg(long)]
    out_csv: Option<String>,
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    limit: Option<String>,
    #[arg(long)]
    roster: Option<String>,
    #[arg(long)]
    b_set: Option<String>,
}

impl RunArgs {
    fn load(&self) -> Result<ExperimentConfig, ExperimentError> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        let overrides = [
            ("sequence", &self.sequence),
            ("ideal", &self.ideal),
            ("horizon", &self.horizon),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("epsilon_sweep", &self.epsilon_sweep),
            ("pass_fraction", &self.pass_fraction),
            ("out_json", &self.out_json),
            ("out_csv", &self.out_csv),
            ("grid", &self.grid),
            ("limit", &self.limit),
            ("roster", &self.roster),
            ("b_set", &self.b_set),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                config.set(key, v)?;
            }
        }
        config.validate()?;
        Ok(config)
    }
}

fn parse_horizon(s: &str) -> Result<u64, String> {
    experiments::parse_count(s).filter(|&h| h > 0).ok_or_else(|| format!("invalid horizon `{s}`"))
}

type BoxError = Box<dyn std::error::Error>;

fn print_json<T: Serialize>(value: &T) {
    print!("{}", experiments::to_json(value));
}

fn density(set: &SetFamily, kind: &str, horizon: u64) -> Result<DensityEstimate, BoxError> {
    let sched = CheckpointSchedule::geometric(horizon)?;
    let weight = |f: &str| f.parse::<WeightFunction>().map_err(|e| -> BoxError { e.to_string().into() });
    if let Some(rest) = kind.strip_prefix("addlimit:") {
        let (f, k) = rest.rsplit_once(':').ok_or("addlimit needs `addlimit:F:K`")?;
        let k: u64 = k.parse()?;
        return Ok(addlimit_check(weight(f)?, k, &sched, horizon.saturating_mul(k))?);
    }
    let window = set.materialize(horizon);
    Ok(match kind.split_once(':') {
        None if kind == "asymptotic" => asymptotic_density(&window, &sched)?,
        None if kind == "polya" => polya_upper(&window, &DEFAULT_S_GRID, &sched)?,
        Some(("alpha", a)) => alpha_density_upper(&window, a.parse()?, &sched)?,
        Some(("weight", f)) => weight_sum_with(weight(f)?, &window, &sched)?,
        Some(("eu", f)) => erdos_ulam_ratio(weight(f)?, &window, &sched)?,
        _ => return Err(format!("unknown density kind `{kind}`").into()),
    })
}

#[derive(Serialize)]
struct SampleOutput {
    seed: u64,
    horizon: u64,
    first_bits: String,
    frequency: DensityEstimate,
    #[serde(skip_serializing_if = "Option::is_none")]
    index_trace: Option<DensityEstimate>,
}

fn finish_report(report: &ExperimentReport, config: &ExperimentConfig) -> Result<ExitCode, BoxError> {
    if let Some(path) = &config.out_json {
        experiments::write_json(path, report)?;
    }
    if let Some(path) = &config.out_csv {
        experiments::write_csv(path, &report.csv_table())?;
    }
    print_json(report);
    Ok(exit(report.status))
}

fn exit(status: Status) -> ExitCode {
    ExitCode::from(status.exit_code() as u8)
}

fn run_experiment(
    config: &ExperimentConfig,
    run: impl FnOnce(&ExperimentConfig) -> Result<ExperimentReport, ExperimentError>,
) -> Result<ExitCode, BoxError> {
    match run(config) {
        Ok(report) => finish_report(&report, config),
        Err(ExperimentError::AllUndecided(report)) => finish_report(&report, config),
        Err(e) => Err(e.into()),
    }
}

fn run(cli: Cli) -> Result<ExitCode, BoxError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match cli.command {
        Command::Density { set, kind, horizon } => print_json(&density(&set, &kind, horizon)?),
        Command::Membership { ideal, set, horizon } => print_json(&member_default(&ideal, &set.materialize(horizon))?),
        Command::Thinnability { property, run } => {
            let config = run.load()?;
            if let Some(property) = property {
                let ideal = &config.ideal;
                let gen = SetGenerator::mixed(config.horizon).with_forced(ForcedPair::counterexample());
                let report = match property {
                    Property::Stretchable => test_stretchable(ideal, &gen, config.trials, config.seed)?,
                    Property::WeaklyThinnable => test_weakly_thinnable(ideal, &gen, config.trials, config.seed)?,
                    Property::Thinnable => test_thinnable(ideal, &gen, config.trials, config.seed)?,
                    Property::Invariant => test_invariant(ideal, &gen, config.trials, config.seed)?,
                };
                if let Some(path) = &config.out_json {
                    experiments::write_json(path, &report)?;
                }
                print_json(&report);
                return Ok(exit(if report.pass { Status::Pass } else { Status::Fail }));
            }
            let suite = run_thinnability_suite(&config)?;
            if let Some(path) = &config.out_json {
                experiments::write_json(path, &suite)?;
            }
            if let Some(path) = &config.out_csv {
                experiments::write_csv(path, &suite.csv_table())?;
            }
            print_json(&suite);
            return Ok(exit(suite.status));
        }
        Command::Gamma { seq, ideal, horizon, grid, epsilon } => {
            let (points, pitch) = if grid == "auto" {
                auto_grid(&seq, horizon)?
            } else {
                let points = parse_grid(&grid)?;
                let spacing = thinnable::sequences::min_spacing(&points);
                (points, if spacing.is_finite() { spacing } else { 1.0 })
            };
            let sched = CheckpointSchedule::geometric(horizon)?;
            let report = cluster_points(&seq, &ideal, &points, epsilon.unwrap_or(0.25 * pitch), &sched)?;
            print_json(&report);
        }
        Command::Sample { seed, horizon, indices } => {
            let selector = sample_selector(seed);
            let first_bits = selector.bits().take(64).map(|b| if b { '1' } else { '0' }).collect();
            let frequency = selector.frequency_trace(&CheckpointSchedule::geometric(horizon)?)?;
            let index_trace = match indices {
                Some(family) => {
                    let i = family.materialize(horizon);
                    Some(index_trace(&selector, &i, &CheckpointSchedule::geometric(i.len() as u64)?)?)
                }
                None => None,
            };
            print_json(&SampleOutput { seed, horizon, first_bits, frequency, index_trace });
        }
        Command::VerifyMain(args) => return run_experiment(&args.load()?, run_main_theorem),
        Command::VerifyConvergence(args) => {
            let config = args.load()?;
            let limit = config.limit.ok_or(ExperimentError::MissingLimit)?;
            return run_experiment(&config, |c| run_convergence_theorem(c, &limit));
        }
        Command::Counterexample(args) => {
            let mut config = args.load()?;
            if args.ideal.is_none() && args.config.is_none() {
                config.ideal = IdealSpec::even_fin();
            }
            return run_experiment(&config, run_counterexample);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
