//! Rule-backed subsets of N and the set-literal grammar.
//!
//! Grammar (`|` joins alternatives into a union):
//!
//! ```text
//! {2,4,6}  naturals  evens  odds  squares  cubes  multiples:k  ap:a:d
//! powers:b  blocks:base  bernoulli:p:seed  complement:<family>
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use super::SubsetWindow;
use crate::rng::{word_at, WordStream};

/// Windows are materialized in blocks of this many consecutive integers.
pub const BLOCK_LEN: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid set spec `{spec}`: {reason}")]
pub struct ParseSetError {
    pub spec: String,
    pub reason: String,
}

fn bad(spec: &str, reason: impl Into<String>) -> ParseSetError {
    ParseSetError { spec: spec.to_string(), reason: reason.into() }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SetFamily {
    /// A finite set, strictly increasing.
    Explicit(Vec<u64>),
    Naturals,
    Evens,
    Odds,
    Squares,
    Cubes,
    Multiples(u64),
    /// `{start, start + step, start + 2 step, ...}`
    Progression { start: u64, step: u64 },
    /// `{1, b, b^2, ...}`
    Powers(u64),
    /// `∪_j [base^{2j}, 2 base^{2j})`
    Blocks(u64),
    /// Each `n` independently with probability `p`, from a counter-based stream.
    Bernoulli { p: f64, seed: u64 },
    Complement(Box<SetFamily>),
    Union(Vec<SetFamily>),
}

impl SetFamily {
    pub fn contains(&self, n: u64) -> bool {
        if n == 0 {
            return false;
        }
        match self {
            SetFamily::Explicit(v) => v.binary_search(&n).is_ok(),
            SetFamily::Naturals => true,
            SetFamily::Evens => n.is_multiple_of(2),
            SetFamily::Odds => n % 2 == 1,
            SetFamily::Squares => is_kth_power(n, 2),
            SetFamily::Cubes => is_kth_power(n, 3),
            SetFamily::Multiples(k) => n.is_multiple_of(*k),
            SetFamily::Progression { start, step } => n >= *start && (n - start).is_multiple_of(*step),
            SetFamily::Powers(b) => {
                let mut p = 1u64;
                while p < n {
                    match p.checked_mul(*b) {
                        Some(q) => p = q,
                        None => return false,
                    }
                }
                p == n
            }
            SetFamily::Blocks(base) => {
                let sq = base * base;
                let mut lo = 1u64;
                loop {
                    if n < lo {
                        return false;
                    }
                    if n < 2 * lo {
                        return true;
                    }
                    match lo.checked_mul(sq) {
                        Some(next) => lo = next,
                        None => return false,
                    }
                }
            }
            SetFamily::Bernoulli { p, seed } => {
                let w = word_at(*seed, (n - 1) / 4);
                lane_hit(w, (n - 1) % 4, bernoulli_threshold(*p))
            }
            SetFamily::Complement(inner) => !inner.contains(n),
            SetFamily::Union(parts) => parts.iter().any(|f| f.contains(n)),
        }
    }

    /// `S ∩ [1, horizon]`.
    pub fn materialize(&self, horizon: u64) -> SubsetWindow {
        let mut members = Vec::new();
        let mut marks = Vec::new();
        let mut lo = 1;
        while lo <= horizon {
            let len = BLOCK_LEN.min(horizon - lo + 1);
            self.push_block(lo, len, &mut marks, &mut members);
            lo += len;
        }
        SubsetWindow::from_sorted(members, horizon)
    }

    /// Smallest block-aligned window holding at least `min_members` members,
    /// capped at `max_horizon`.
    pub fn materialize_count(&self, min_members: usize, max_horizon: u64) -> SubsetWindow {
        let mut members = Vec::with_capacity(min_members);
        let mut marks = Vec::new();
        let mut lo = 1;
        while lo <= max_horizon && members.len() < min_members {
            let len = BLOCK_LEN.min(max_horizon - lo + 1);
            self.push_block(lo, len, &mut marks, &mut members);
            lo += len;
        }
        SubsetWindow::from_sorted(members, lo - 1)
    }

    fn push_block(&self, lo: u64, len: u64, marks: &mut Vec<bool>, members: &mut Vec<u64>) {
        marks.clear();
        marks.resize(len as usize, false);
        self.mark_block(lo, marks);
        members.extend(
            marks
                .iter()
                .enumerate()
                .filter(|(_, &m)| m)
                .map(|(i, _)| lo + i as u64),
        );
    }

    /// Marks membership of `lo .. lo + marks.len()`.
    pub(crate) fn mark_block(&self, lo: u64, marks: &mut [bool]) {
        let hi = lo + marks.len() as u64 - 1;
        macro_rules! setter {
            () => {
                |n: u64| marks[(n - lo) as usize] = true
            };
        }
        match self {
            SetFamily::Explicit(v) => {
                let start = v.partition_point(|&m| m < lo);
                v[start..].iter().take_while(|&&m| m <= hi).for_each(|&m| marks[(m - lo) as usize] = true);
            }
            SetFamily::Naturals => marks.iter_mut().for_each(|m| *m = true),
            SetFamily::Evens => step_marks(2, 2, lo, hi, setter!()),
            SetFamily::Odds => step_marks(1, 2, lo, hi, setter!()),
            SetFamily::Multiples(k) => step_marks(*k, *k, lo, hi, setter!()),
            SetFamily::Progression { start, step } => step_marks(*start, *step, lo, hi, setter!()),
            SetFamily::Squares | SetFamily::Cubes => {
                let k = if matches!(self, SetFamily::Squares) { 2 } else { 3 };
                let mut r = int_root(lo, k);
                if r.pow(k) < lo {
                    r += 1;
                }
                while let Some(v) = r.checked_pow(k).filter(|&v| v <= hi) {
                    marks[(v - lo) as usize] = true;
                    r += 1;
                }
            }
            SetFamily::Powers(b) => {
                let mut p = 1u64;
                loop {
                    if p > hi {
                        break;
                    }
                    if p >= lo {
                        marks[(p - lo) as usize] = true;
                    }
                    match p.checked_mul(*b) {
                        Some(q) => p = q,
                        None => break,
                    }
                }
            }
            SetFamily::Blocks(base) => {
                let sq = base * base;
                let mut start = 1u64;
                while start <= hi {
                    let end = 2 * start - 1;
                    for n in start.max(lo)..=end.min(hi) {
                        marks[(n - lo) as usize] = true;
                    }
                    match start.checked_mul(sq) {
                        Some(s) => start = s,
                        None => break,
                    }
                }
            }
            SetFamily::Bernoulli { p, seed } => {
                let threshold = bernoulli_threshold(*p);
                let first = lo - 1;
                let mut stream = WordStream::new(*seed, first / 4);
                let mut lane = first % 4;
                let mut word = stream.next_word();
                for slot in marks.iter_mut() {
                    if lane == 4 {
                        word = stream.next_word();
                        lane = 0;
                    }
                    *slot = lane_hit(word, lane, threshold);
                    lane += 1;
                }
            }
            SetFamily::Complement(inner) => {
                inner.mark_block(lo, marks);
                marks.iter_mut().for_each(|m| *m = !*m);
            }
            SetFamily::Union(parts) => {
                let mut scratch = vec![false; marks.len()];
                for part in parts {
                    scratch.iter_mut().for_each(|m| *m = false);
                    part.mark_block(lo, &mut scratch);
                    for (m, s) in marks.iter_mut().zip(&scratch) {
                        *m |= *s;
                    }
                }
            }
        }
    }

    /// True for families known to be finite.
    pub fn is_finite(&self) -> bool {
        match self {
            SetFamily::Explicit(_) => true,
            SetFamily::Union(parts) => parts.iter().all(SetFamily::is_finite),
            _ => false,
        }
    }
}

/// 16-bit lane `lane` of `word` is below `threshold` (out of 2^16).
#[inline]
fn lane_hit(word: u64, lane: u64, threshold: u32) -> bool {
    (((word >> (16 * lane)) & 0xffff) as u32) < threshold
}

#[inline]
fn bernoulli_threshold(p: f64) -> u32 {
    (p.clamp(0.0, 1.0) * 65536.0).round() as u32
}

fn step_marks(start: u64, step: u64, lo: u64, hi: u64, mut set: impl FnMut(u64)) {
    let mut n = if lo <= start {
        start
    } else {
        start + (lo - start).div_ceil(step) * step
    };
    while n <= hi {
        set(n);
        n += step;
    }
}

fn int_root(n: u64, k: u32) -> u64 {
    let mut r = (n as f64).powf(1.0 / f64::from(k)).round() as u64;
    while r > 0 && r.checked_pow(k).is_none_or(|v| v > n) {
        r -= 1;
    }
    while (r + 1).checked_pow(k).is_some_and(|v| v <= n) {
        r += 1;
    }
    r
}

fn is_kth_power(n: u64, k: u32) -> bool {
    int_root(n, k).pow(k) == n
}

impl fmt::Display for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetFamily::Explicit(v) => {
                let items: Vec<String> = v.iter().map(u64::to_string).collect();
                write!(f, "{{{}}}", items.join(","))
            }
            SetFamily::Naturals => f.write_str("naturals"),
            SetFamily::Evens => f.write_str("evens"),
            SetFamily::Odds => f.write_str("odds"),
            SetFamily::Squares => f.write_str("squares"),
            SetFamily::Cubes => f.write_str("cubes"),
            SetFamily::Multiples(k) => write!(f, "multiples:{k}"),
            SetFamily::Progression { start, step } => write!(f, "ap:{start}:{step}"),
            SetFamily::Powers(b) => write!(f, "powers:{b}"),
            SetFamily::Blocks(b) => write!(f, "blocks:{b}"),
            SetFamily::Bernoulli { p, seed } => write!(f, "bernoulli:{p}:{seed}"),
            SetFamily::Complement(inner) => write!(f, "complement:{inner}"),
            SetFamily::Union(parts) => {
                let items: Vec<String> = parts.iter().map(ToString::to_string).collect();
                f.write_str(&items.join("|"))
            }
        }
    }
}

impl Serialize for SetFamily {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for SetFamily {
    type Err = ParseSetError;

    fn from_str(spec: &str) -> Result<Self, Self::Err> {
        let spec = spec.trim();
        if spec.is_empty() {
            return Err(bad(spec, "empty"));
        }
        let parts = split_union(spec);
        if parts.len() > 1 {
            return parts
                .into_iter()
                .map(str::parse)
                .collect::<Result<Vec<_>, _>>()
                .map(SetFamily::Union);
        }
        if let Some(body) = spec.strip_prefix('{') {
            let body = body.strip_suffix('}').ok_or_else(|| bad(spec, "missing `}`"))?;
            let mut members = Vec::new();
            for item in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let n: u64 = item.parse().map_err(|_| bad(spec, format!("`{item}` is not a positive integer")))?;
                if n == 0 {
                    return Err(bad(spec, "members must be positive"));
                }
                if members.last().is_some_and(|&prev| prev >= n) {
                    return Err(bad(spec, "members must be listed in strictly increasing order"));
                }
                members.push(n);
            }
            return Ok(SetFamily::Explicit(members));
        }
        if let Some(inner) = spec.strip_prefix("complement:") {
            return Ok(SetFamily::Complement(Box::new(inner.parse()?)));
        }
        let (head, args) = match spec.split_once(':') {
            Some((h, a)) => (h, a.split(':').collect::<Vec<_>>()),
            None => (spec, Vec::new()),
        };
        let int_arg = |i: usize, min: u64| -> Result<u64, ParseSetError> {
            let raw = args.get(i).ok_or_else(|| bad(spec, "missing argument"))?;
            let v: u64 = raw.parse().map_err(|_| bad(spec, format!("`{raw}` is not an integer")))?;
            if v < min {
                return Err(bad(spec, format!("argument must be at least {min}")));
            }
            Ok(v)
        };
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(bad(spec, format!("expected {n} argument(s)")))
            }
        };
        let family = match head {
            "naturals" | "all" | "N" => SetFamily::Naturals,
            "evens" => SetFamily::Evens,
            "odds" => SetFamily::Odds,
            "squares" => SetFamily::Squares,
            "cubes" => SetFamily::Cubes,
            "multiples" => {
                arity(1)?;
                SetFamily::Multiples(int_arg(0, 1)?)
            }
            "ap" => {
                arity(2)?;
                SetFamily::Progression { start: int_arg(0, 1)?, step: int_arg(1, 1)? }
            }
            "powers" => {
                arity(1)?;
                SetFamily::Powers(int_arg(0, 2)?)
            }
            "blocks" => {
                arity(1)?;
                SetFamily::Blocks(int_arg(0, 2)?)
            }
            "bernoulli" => {
                arity(2)?;
                let p: f64 = args[0].parse().map_err(|_| bad(spec, "probability is not a number"))?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(bad(spec, "probability must lie in [0,1]"));
                }
                SetFamily::Bernoulli { p, seed: int_arg(1, 0)? }
            }
            _ => return Err(bad(spec, "unknown family")),
        };
        if matches!(
            family,
            SetFamily::Naturals | SetFamily::Evens | SetFamily::Odds | SetFamily::Squares | SetFamily::Cubes
        ) {
            arity(0)?;
        }
        Ok(family)
    }
}

/// Splits on `|` outside braces.
fn split_union(spec: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in spec.char_indices() {
        match c {
            '{' => depth += 1,
            '}' => depth -= 1,
            '|' if depth == 0 => {
                parts.push(spec[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(spec[start..].trim());
    parts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(f: &SetFamily, h: u64) -> Vec<u64> {
        (1..=h).filter(|&n| f.contains(n)).collect()
    }

    #[test]
    fn block_materialization_matches_membership() {
        let families = [
            "evens",
            "odds",
            "squares",
            "cubes",
            "multiples:7",
            "ap:3:10",
            "powers:3",
            "blocks:2",
            "blocks:3",
            "bernoulli:0.3:11",
            "complement:squares",
            "complement:{1}",
            "{5,9,200000}",
            "multiples:5|squares",
        ];
        let h = 3 * BLOCK_LEN + 17;
        for spec in families {
            let f: SetFamily = spec.parse().unwrap();
            assert_eq!(f.materialize(h).members(), brute(&f, h).as_slice(), "{spec}");
        }
    }

    #[test]
    fn blocks_two_members() {
        let f = SetFamily::Blocks(2);
        let expected: Vec<u64> = [1].into_iter().chain(4..8).chain(16..32).collect();
        assert_eq!(f.materialize(40).members(), expected.as_slice());
    }

    #[test]
    fn grammar_round_trips() {
        for spec in ["{2,4,6}", "evens", "multiples:3", "blocks:2", "complement:evens", "ap:1:4", "bernoulli:0.25:9"] {
            let f: SetFamily = spec.parse().unwrap();
            assert_eq!(f.to_string(), spec);
        }
    }

    #[test]
    fn grammar_rejects_garbage() {
        for spec in ["", "{9,1,4}", "{0}", "multiples", "multiples:0", "blocks:1", "evens:3", "primes", "bernoulli:2:1"] {
            assert!(spec.parse::<SetFamily>().is_err(), "{spec}");
        }
    }

    #[test]
    fn count_materialization_reaches_target() {
        let w = SetFamily::Multiples(10).materialize_count(10_000, u64::MAX);
        assert!(w.len() >= 10_000);
        assert_eq!(w.horizon() % BLOCK_LEN, 0);
        let capped = SetFamily::Multiples(10).materialize_count(10_000, 500);
        assert_eq!(capped.len(), 50);
        assert_eq!(capped.horizon(), 500);
    }

    #[test]
    fn bernoulli_frequency() {
        let w = SetFamily::Bernoulli { p: 0.3, seed: 5 }.materialize(1 << 18);
        let freq = w.len() as f64 / (1u64 << 18) as f64;
        assert!((freq - 0.3).abs() < 0.005, "{freq}");
    }
}
