use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Serialize, Serializer};

use super::ExperimentError;
use crate::ideals::IdealSpec;
use crate::sequences::{parse_grid, Point, RealSequence};

pub const DEFAULT_PASS_FRACTION: f64 = 0.99;
pub const DEFAULT_TRIALS: usize = 200;
pub const DEFAULT_HORIZON: u64 = 1_000_000;
/// Default radius for convergence runs without an explicit sweep.
pub const DEFAULT_CONVERGENCE_EPSILON: f64 = 0.5;

/// The recognized configuration keys.
pub const KEYS: [&str; 13] = [
    "sequence",
    "ideal",
    "horizon",
    "trials",
    "seed",
    "epsilon_sweep",
    "pass_fraction",
    "out_json",
    "out_csv",
    "grid",
    "limit",
    "roster",
    "b_set",
];

#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec {
    Auto,
    List(Vec<Point>),
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridSpec::Auto => f.write_str("auto"),
            GridSpec::List(points) => {
                let parts: Vec<String> = points.iter().map(Point::to_string).collect();
                write!(f, "{{{}}}", parts.join(","))
            }
        }
    }
}

impl Serialize for GridSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Settings shared by all experiments. Files hold one `key = value` per line;
/// `#` starts a comment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub sequence: RealSequence,
    pub ideal: IdealSpec,
    pub horizon: u64,
    pub trials: usize,
    pub seed: u64,
    pub grid: GridSpec,
    /// Strictly decreasing radii; empty means the experiment's default.
    pub epsilon_sweep: Vec<f64>,
    pub pass_fraction: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<Point>,
    /// Ideals for the thinnability suite; empty means the default roster.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub roster: Vec<IdealSpec>,
    /// Replacement for `B = 2N` in the counterexample.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_set: Option<crate::subsets::SetFamily>,
    #[serde(skip)]
    pub out_json: Option<PathBuf>,
    #[serde(skip)]
    pub out_csv: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            sequence: RealSequence::Alternating,
            ideal: IdealSpec::zero_density(),
            horizon: DEFAULT_HORIZON,
            trials: DEFAULT_TRIALS,
            seed: 0,
            grid: GridSpec::Auto,
            epsilon_sweep: Vec::new(),
            pass_fraction: DEFAULT_PASS_FRACTION,
            limit: None,
            roster: Vec::new(),
            b_set: None,
            out_json: None,
            out_csv: None,
        }
    }
}

fn parse_list<T>(value: &str, item: impl Fn(&str) -> Option<T>) -> Option<Vec<T>> {
    let inner = value.trim().trim_start_matches(['[', '{']).trim_end_matches([']', '}']);
    if inner.trim().is_empty() {
        return Some(Vec::new());
    }
    inner.split(',').map(|v| item(v.trim())).collect()
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ExperimentError> {
        let mut config = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ExperimentError::Config(format!("line {}: expected `key = value`", i + 1)))?;
            config.set(key.trim(), value.trim())?;
        }
        config.validate()?;
        Ok(config)
    }

    /// Sets one key; used for files and for command-line overrides.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ExperimentError> {
        let bad = || ExperimentError::Config(format!("invalid value for `{key}`: `{value}`"));
        match key {
            "sequence" => self.sequence = value.parse().map_err(|_| bad())?,
            "ideal" => self.ideal = value.parse().map_err(|_| bad())?,
            "horizon" => self.horizon = parse_count(value).ok_or_else(bad)?,
            "trials" => self.trials = parse_count(value).ok_or_else(bad)? as usize,
            "seed" => self.seed = value.parse().map_err(|_| bad())?,
            "epsilon_sweep" => self.epsilon_sweep = parse_list(value, |v| v.parse().ok()).ok_or_else(bad)?,
            "pass_fraction" => self.pass_fraction = value.parse().map_err(|_| bad())?,
            "out_json" => self.out_json = Some(PathBuf::from(value)),
            "out_csv" => self.out_csv = Some(PathBuf::from(value)),
            "grid" => {
                self.grid = if value == "auto" { GridSpec::Auto } else { GridSpec::List(parse_grid(value).map_err(|_| bad())?) }
            }
            "limit" => self.limit = Some(value.parse().map_err(|_| bad())?),
            "roster" => self.roster = parse_list(value, |v| v.parse().ok()).ok_or_else(bad)?,
            "b_set" => self.b_set = Some(value.parse().map_err(|_| bad())?),
            _ => return Err(ExperimentError::Config(format!("unknown key `{key}` (known: {})", KEYS.join(", ")))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let fail = |msg: &str| Err(ExperimentError::Config(msg.to_string()));
        if self.trials == 0 {
            return fail("trials must be at least 1");
        }
        if !(self.pass_fraction > 0.0 && self.pass_fraction <= 1.0) {
            return fail("pass_fraction must lie in (0, 1]");
        }
        if self.epsilon_sweep.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return fail("epsilon_sweep values must be positive");
        }
        if self.epsilon_sweep.windows(2).any(|w| w[1] >= w[0]) {
            return fail("epsilon_sweep must be strictly decreasing");
        }
        Ok(())
    }
}

/// Accepts `1000000`, `1_000_000`, `1e6` and `2^20`.
pub fn parse_count(value: &str) -> Option<u64> {
    let v = value.trim().replace('_', "");
    if let Some((base, exp)) = v.split_once('^') {
        return base.parse::<u64>().ok()?.checked_pow(exp.parse().ok()?);
    }
    if let Ok(n) = v.parse::<u64>() {
        return Some(n);
    }
    let f: f64 = v.parse().ok()?;
    (f >= 0.0 && f.fract() == 0.0 && f < 1.8e19).then_some(f as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_file() {
        let c = ExperimentConfig::parse(
            "# main theorem\nsequence = spike:squares:2:alternating\nideal = fin\nhorizon = 1e6\ntrials = 20\n\
             seed = 7\ngrid = {-1,0,1,2}\nepsilon_sweep = 0.25, 0.1\npass_fraction = 0.95\nout_json = r.json\n",
        )
        .unwrap();
        assert_eq!(c.sequence.to_string(), "spike:squares:2:alternating");
        assert_eq!(c.ideal, IdealSpec::fin());
        assert_eq!((c.horizon, c.trials, c.seed), (1_000_000, 20, 7));
        assert_eq!(c.epsilon_sweep, vec![0.25, 0.1]);
        assert_eq!(c.grid.to_string(), "{-1,0,1,2}");
        assert_eq!(c.out_json, Some(PathBuf::from("r.json")));
    }

    #[test]
    fn rejects() {
        for text in [
            "trials = 0",
            "pass_fraction = 0",
            "pass_fraction = 1.5",
            "epsilon_sweep = 0.1, 0.2",
            "epsilon_sweep = 0.1, 0.1",
            "colour = red",
            "horizon = many",
            "no equals sign",
        ] {
            assert!(ExperimentConfig::parse(text).is_err(), "{text}");
        }
    }

    #[test]
    fn counts() {
        assert_eq!(parse_count("2^20"), Some(1 << 20));
        assert_eq!(parse_count("1_000"), Some(1000));
        assert_eq!(parse_count("1e7"), Some(10_000_000));
        assert_eq!(parse_count("1.5"), None);
    }
}
