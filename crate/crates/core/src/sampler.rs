//! Subsequence selectors: bit streams `d_1 d_2 ...` that keep `x_i` iff `d_i = 1`.
//!
//! A random selector reads bit `i` from word `(i - 1) / 64` of the
//! counter-based stream for its seed, so any bit is a pure function of
//! `(seed, i)`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::densities::{asymptotic_density, CheckpointSchedule, DensityError, DensityEstimate};
use crate::rng::WordStream;
use crate::sequences::RealSequence;
use crate::subsets::SubsetWindow;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplerError {
    #[error("selector yields only {available} selected indices, {wanted} needed")]
    SelectorExhausted { wanted: u64, available: u64 },
    #[error("explicit selector has {prefix} bits, horizon {horizon} requested")]
    BeyondPrefix { horizon: u64, prefix: u64 },
    #[error("index set is empty")]
    EmptyIndices,
    #[error("invalid selector spec `{0}`")]
    Parse(String),
    #[error(transparent)]
    Density(#[from] DensityError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Source {
    Random(u64),
    /// A finite prefix; bits past its end are undefined.
    Explicit(Arc<[bool]>),
    /// Repeats forever.
    Periodic(Arc<[bool]>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsequenceSelector {
    source: Source,
    flipped: bool,
}

/// Fair-coin selector for `seed`.
pub fn sample_selector(seed: u64) -> SubsequenceSelector {
    SubsequenceSelector { source: Source::Random(seed), flipped: false }
}

/// The selector with every bit flipped.
pub fn complement_selector(s: &SubsequenceSelector) -> SubsequenceSelector {
    SubsequenceSelector { source: s.source.clone(), flipped: !s.flipped }
}

impl SubsequenceSelector {
    pub fn explicit(bits: Vec<bool>) -> Self {
        Self { source: Source::Explicit(bits.into()), flipped: false }
    }

    /// Repeats `pattern` forever. Panics on an empty pattern.
    pub fn periodic(pattern: Vec<bool>) -> Self {
        assert!(!pattern.is_empty(), "empty selector pattern");
        Self { source: Source::Periodic(pattern.into()), flipped: false }
    }

    pub fn all_ones() -> Self {
        Self::periodic(vec![true])
    }

    pub fn is_random(&self) -> bool {
        matches!(self.source, Source::Random(_))
    }

    /// Number of defined bits, `None` if unbounded.
    pub fn prefix_len(&self) -> Option<u64> {
        match &self.source {
            Source::Explicit(bits) => Some(bits.len() as u64),
            _ => None,
        }
    }

    /// Whether infinitely many indices are selected. Random selectors are
    /// non-terminating with probability one; explicit prefixes never are.
    pub fn non_terminating(&self) -> bool {
        match &self.source {
            Source::Random(_) => true,
            Source::Explicit(_) => false,
            Source::Periodic(p) => p.iter().any(|&b| b != self.flipped),
        }
    }

    pub fn bits(&self) -> Bits<'_> {
        let inner = match &self.source {
            Source::Random(seed) => BitsInner::Random { stream: WordStream::new(*seed, 0), word: 0, left: 0 },
            Source::Explicit(bits) => BitsInner::Slice { bits, pos: 0, cycle: false },
            Source::Periodic(bits) => BitsInner::Slice { bits, pos: 0, cycle: true },
        };
        Bits { inner, flip: self.flipped }
    }

    /// `d_i` for `i ≥ 1`, `None` past an explicit prefix.
    pub fn bit(&self, i: u64) -> Option<bool> {
        assert!(i >= 1, "selector bits are 1-based");
        let raw = match &self.source {
            Source::Random(seed) => (crate::rng::word_at(*seed, (i - 1) / 64) >> ((i - 1) % 64)) & 1 == 1,
            Source::Explicit(bits) => *bits.get((i - 1) as usize)?,
            Source::Periodic(bits) => bits[((i - 1) % bits.len() as u64) as usize],
        };
        Some(raw != self.flipped)
    }

    /// Selected indices `{i ≤ h : d_i = 1}`.
    pub fn selected_up_to(&self, h: u64) -> Result<SubsetWindow, SamplerError> {
        if let Some(prefix) = self.prefix_len() {
            if h > prefix {
                return Err(SamplerError::BeyondPrefix { horizon: h, prefix });
            }
        }
        let members = match &self.source {
            Source::Random(seed) => {
                let mut stream = WordStream::new(*seed, 0);
                let mut members = Vec::with_capacity((h / 2 + h / 64 + 16) as usize);
                let mut base = 0u64;
                while base < h {
                    let mut w = stream.next_word();
                    if self.flipped {
                        w = !w;
                    }
                    let valid = (h - base).min(64);
                    if valid < 64 {
                        w &= (1u64 << valid) - 1;
                    }
                    while w != 0 {
                        members.push(base + u64::from(w.trailing_zeros()) + 1);
                        w &= w - 1;
                    }
                    base += 64;
                }
                members
            }
            _ => self
                .bits()
                .take(h as usize)
                .enumerate()
                .filter(|&(_, b)| b)
                .map(|(i, _)| i as u64 + 1)
                .collect(),
        };
        Ok(SubsetWindow::new(members, h).expect("indices are increasing and bounded"))
    }

    /// Asymptotic density estimate of the selected indices.
    pub fn frequency_trace(&self, sched: &CheckpointSchedule) -> Result<DensityEstimate, SamplerError> {
        Ok(asymptotic_density(&self.selected_up_to(sched.last())?, sched)?)
    }

    /// Checks that at least `k` indices are selected; random and periodic
    /// non-terminating selectors always pass.
    pub fn ensure_selects(&self, k: u64) -> Result<(), SamplerError> {
        if self.non_terminating() {
            return Ok(());
        }
        let available = self.bits().filter(|&b| b).count() as u64;
        if available < k {
            return Err(SamplerError::SelectorExhausted { wanted: k, available });
        }
        Ok(())
    }
}

pub struct Bits<'a> {
    inner: BitsInner<'a>,
    flip: bool,
}

#[allow(clippy::large_enum_variant)]
enum BitsInner<'a> {
    Random { stream: WordStream, word: u64, left: u32 },
    Slice { bits: &'a [bool], pos: usize, cycle: bool },
}

impl Iterator for Bits<'_> {
    type Item = bool;

    #[inline]
    fn next(&mut self) -> Option<bool> {
        let raw = match &mut self.inner {
            BitsInner::Random { stream, word, left } => {
                if *left == 0 {
                    *word = stream.next_word();
                    *left = 64;
                }
                let b = *word & 1 == 1;
                *word >>= 1;
                *left -= 1;
                b
            }
            BitsInner::Slice { bits, pos, cycle } => {
                if *pos == bits.len() {
                    if !*cycle {
                        return None;
                    }
                    *pos = 0;
                }
                *pos += 1;
                bits[*pos - 1]
            }
        };
        Some(raw != self.flip)
    }
}

/// Bound on `|count(n)/n − 1/2|` used for fair-coin selectors:
/// `5 · sqrt(ln n / n)`.
pub fn frequency_envelope(n: u64) -> f64 {
    let n = n as f64;
    5.0 * (n.ln() / n).sqrt()
}

/// `k ↦ x_{n_k}` where `n_1 < n_2 < ...` are the selected indices. Fails if
/// the selector provides fewer than `len` indices.
pub fn restrict(x: &RealSequence, s: &SubsequenceSelector, len: u64) -> Result<RealSequence, SamplerError> {
    s.ensure_selects(len)?;
    Ok(RealSequence::Restricted { base: Box::new(x.clone()), selector: s.clone() })
}

/// Density estimate of `J = {n : i_n is selected}` over the `|i|` members of `i`.
pub fn index_trace(
    s: &SubsequenceSelector,
    i: &SubsetWindow,
    sched: &CheckpointSchedule,
) -> Result<DensityEstimate, SamplerError> {
    let last = *i.members().last().ok_or(SamplerError::EmptyIndices)?;
    let selected = s.selected_up_to(last)?;
    let positions: Vec<u64> = i
        .members()
        .iter()
        .enumerate()
        .filter(|(_, &m)| selected.contains(m))
        .map(|(pos, _)| pos as u64 + 1)
        .collect();
    let j = SubsetWindow::new(positions, i.len() as u64).expect("positions are increasing");
    Ok(asymptotic_density(&j, sched)?)
}

fn fmt_bits(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn parse_bits(s: &str) -> Option<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect::<Option<Vec<_>>>()
        .filter(|v| !v.is_empty())
}

impl fmt::Display for SubsequenceSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.flipped {
            f.write_str("complement:")?;
        }
        match &self.source {
            Source::Random(seed) => write!(f, "random:{seed}"),
            Source::Explicit(bits) => write!(f, "bits:{}", fmt_bits(bits)),
            Source::Periodic(bits) if bits.len() == 1 && bits[0] => f.write_str("ones"),
            Source::Periodic(bits) => write!(f, "periodic:{}", fmt_bits(bits)),
        }
    }
}

/// Grammar: `random:<seed>`, `bits:<01...>` (finite prefix),
/// `periodic:<01...>`, `ones`, `complement:<selector>`.
impl FromStr for SubsequenceSelector {
    type Err = SamplerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || SamplerError::Parse(s.to_string());
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("complement:") {
            return Ok(complement_selector(&rest.parse()?));
        }
        if s == "ones" {
            return Ok(Self::all_ones());
        }
        let (head, arg) = s.split_once(':').ok_or_else(err)?;
        match head {
            "random" => Ok(sample_selector(arg.parse().map_err(|_| err())?)),
            "bits" => Ok(Self::explicit(parse_bits(arg).ok_or_else(err)?)),
            "periodic" => Ok(Self::periodic(parse_bits(arg).ok_or_else(err)?)),
            _ => Err(err()),
        }
    }
}

impl Serialize for SubsequenceSelector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<bool> {
        parse_bits(s).unwrap()
    }

    #[test]
    fn fair_frequency() {
        let sel = sample_selector(11).selected_up_to(1_000_000).unwrap();
        let freq = sel.len() as f64 / 1e6;
        assert!((freq - 0.5).abs() < 0.002, "{freq}");
    }

    #[test]
    fn deterministic_bits() {
        let a: Vec<bool> = sample_selector(5).bits().take(10_000).collect();
        let b: Vec<bool> = sample_selector(5).bits().take(10_000).collect();
        assert_eq!(a, b);
        assert!((1..=200).all(|i| sample_selector(5).bit(i) == Some(a[i as usize - 1])));
        let c: Vec<bool> = sample_selector(6).bits().take(10_000).collect();
        assert_ne!(a, c);
    }

    #[test]
    fn scan_matches_bits() {
        for s in [sample_selector(3), complement_selector(&sample_selector(3))] {
            let w = s.selected_up_to(1000).unwrap();
            let via_bits: Vec<u64> = s.bits().take(1000).enumerate().filter(|p| p.1).map(|p| p.0 as u64 + 1).collect();
            assert_eq!(w.members(), &via_bits[..]);
        }
    }

    #[test]
    fn alternating_bits_select_odds() {
        let s = SubsequenceSelector::periodic(bits("10"));
        assert_eq!(s.selected_up_to(9).unwrap().members(), &[1, 3, 5, 7, 9]);
        let e = SubsequenceSelector::explicit(bits("101010"));
        assert_eq!(e.selected_up_to(6).unwrap().members(), &[1, 3, 5]);
    }

    #[test]
    fn complement_flips() {
        let s = SubsequenceSelector::explicit(bits("1100"));
        let c = complement_selector(&s);
        assert_eq!(c.bits().collect::<Vec<_>>(), bits("0011"));
        assert_eq!(complement_selector(&c), s);
    }

    #[test]
    fn partition_of_prefix() {
        let s = sample_selector(77);
        let a = s.selected_up_to(10_000).unwrap();
        let b = complement_selector(&s).selected_up_to(10_000).unwrap();
        assert!(a.intersection(&b).is_empty());
        assert_eq!(a.union(&b), SubsetWindow::naturals(10_000));
    }

    #[test]
    fn explicit_prefix_limits() {
        let s = SubsequenceSelector::explicit(bits("0101"));
        assert!(matches!(s.selected_up_to(5), Err(SamplerError::BeyondPrefix { .. })));
        assert!(matches!(s.ensure_selects(3), Err(SamplerError::SelectorExhausted { wanted: 3, available: 2 })));
        assert!(!s.non_terminating());
        assert!(!complement_selector(&SubsequenceSelector::all_ones()).non_terminating());
    }

    #[test]
    fn index_trace_cases() {
        let sched = CheckpointSchedule::geometric(10_000).unwrap();
        let squares = crate::subsets::SetFamily::Squares.materialize(100_000_000);
        assert_eq!(squares.len(), 10_000);
        let est = index_trace(&sample_selector(1), &squares, &sched).unwrap();
        assert!((est.final_value() - 0.5).abs() < 0.02, "{}", est.final_value());
        let ones = index_trace(&SubsequenceSelector::all_ones(), &squares, &sched).unwrap();
        assert_eq!((ones.upper, ones.lower), (1.0, 1.0));
        let zeros = SubsequenceSelector::periodic(vec![false]);
        assert_eq!(index_trace(&zeros, &squares, &sched).unwrap().upper, 0.0);
    }

    #[test]
    fn grammar() {
        for s in ["random:9", "bits:0110", "periodic:10", "ones", "complement:random:3", "complement:bits:1"] {
            assert_eq!(s.parse::<SubsequenceSelector>().unwrap().to_string(), s);
        }
        for s in ["", "random:x", "bits:", "bits:012", "walk:1"] {
            assert!(s.parse::<SubsequenceSelector>().is_err(), "{s}");
        }
    }
}
