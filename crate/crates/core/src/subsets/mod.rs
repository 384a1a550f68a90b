//! Finite-horizon subsets of the positive integers.
//!
//! A [`SubsetWindow`] is the sorted list `S ∩ [1, H]`. Position `n` (1-based)
//! of the list is the `n`-th element of the canonical enumeration of `S`.

mod family;

pub use family::{ParseSetError, SetFamily, BLOCK_LEN};

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubsetError {
    #[error("members must be strictly increasing (position {position}: {prev} then {next})")]
    NotSorted { position: usize, prev: u64, next: u64 },
    #[error("member {member} outside [1, {horizon}]")]
    OutOfRange { member: u64, horizon: u64 },
    #[error("n = {n} is beyond the window horizon {horizon}")]
    BeyondHorizon { n: u64, horizon: u64 },
    #[error("no index of B is covered by A's window ({available} members, smallest index {smallest})")]
    InsufficientWindow { available: usize, smallest: u64 },
    #[error("stretch factor must be at least 1")]
    ZeroStretch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubsetWindow {
    members: Vec<u64>,
    horizon: u64,
    complete_below_horizon: bool,
}

impl SubsetWindow {
    /// Validates and wraps `S ∩ [1, horizon]`.
    pub fn new(members: Vec<u64>, horizon: u64) -> Result<Self, SubsetError> {
        for (i, w) in members.windows(2).enumerate() {
            if w[0] >= w[1] {
                return Err(SubsetError::NotSorted { position: i + 1, prev: w[0], next: w[1] });
            }
        }
        if let Some(&first) = members.first() {
            if first == 0 {
                return Err(SubsetError::OutOfRange { member: 0, horizon });
            }
        }
        if let Some(&last) = members.last() {
            if last > horizon {
                return Err(SubsetError::OutOfRange { member: last, horizon });
            }
        }
        Ok(Self { members, horizon, complete_below_horizon: true })
    }

    /// A window whose list is only known to be a prefix sample, not all of
    /// `S ∩ [1, horizon]`.
    pub fn partial(members: Vec<u64>, horizon: u64) -> Result<Self, SubsetError> {
        let mut w = Self::new(members, horizon)?;
        w.complete_below_horizon = false;
        Ok(w)
    }

    pub(crate) fn from_sorted(members: Vec<u64>, horizon: u64) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(members.last().is_none_or(|&m| m <= horizon));
        Self { members, horizon, complete_below_horizon: true }
    }

    pub fn empty(horizon: u64) -> Self {
        Self::from_sorted(Vec::new(), horizon)
    }

    /// `[1, horizon]`.
    pub fn naturals(horizon: u64) -> Self {
        Self::from_sorted((1..=horizon).collect(), horizon)
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn into_members(self) -> Vec<u64> {
        self.members
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn is_complete(&self) -> bool {
        self.complete_below_horizon
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.members.binary_search(&n).is_ok()
    }

    /// `|A ∩ [1, n]|`.
    pub fn counting(&self, n: u64) -> Result<usize, SubsetError> {
        if n > self.horizon {
            return Err(SubsetError::BeyondHorizon { n, horizon: self.horizon });
        }
        Ok(self.count_upto(n))
    }

    #[inline]
    pub(crate) fn count_upto(&self, n: u64) -> usize {
        self.members.partition_point(|&m| m <= n)
    }

    /// The canonical enumeration `a_1 < a_2 < ...` as far as the window knows it.
    pub fn canonical_enumerate(&self) -> Vec<u64> {
        self.members.clone()
    }

    /// `a_n` for 1-based `n`.
    pub fn nth(&self, n: u64) -> Option<u64> {
        if n == 0 {
            return None;
        }
        self.members.get((n - 1) as usize).copied()
    }

    /// Same set, cut down to `[1, h]`.
    pub fn truncate(&self, h: u64) -> Self {
        let h = h.min(self.horizon);
        let k = self.count_upto(h);
        Self {
            members: self.members[..k].to_vec(),
            horizon: h,
            complete_below_horizon: self.complete_below_horizon,
        }
    }

    /// `[1, horizon] \ A`.
    pub fn complement(&self) -> Self {
        let mut out = Vec::with_capacity(self.horizon as usize - self.members.len());
        let mut it = self.members.iter().peekable();
        for n in 1..=self.horizon {
            if it.peek() == Some(&&n) {
                it.next();
            } else {
                out.push(n);
            }
        }
        Self::from_sorted(out, self.horizon)
    }

    /// Union over the common horizon.
    pub fn union(&self, other: &Self) -> Self {
        let h = self.horizon.min(other.horizon);
        let (a, b) = (self.truncate(h), other.truncate(h));
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.members.len() || j < b.members.len() {
            let x = a.members.get(i).copied().unwrap_or(u64::MAX);
            let y = b.members.get(j).copied().unwrap_or(u64::MAX);
            if x <= y {
                i += 1;
            }
            if y <= x {
                j += 1;
            }
            out.push(x.min(y));
        }
        Self::from_sorted(out, h)
    }

    /// Intersection over the common horizon.
    pub fn intersection(&self, other: &Self) -> Self {
        let h = self.horizon.min(other.horizon);
        let out = self
            .members
            .iter()
            .copied()
            .take_while(|&m| m <= h)
            .filter(|m| other.members.binary_search(m).is_ok())
            .collect();
        Self::from_sorted(out, h)
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.members.iter().all(|m| other.contains(*m))
    }
}

/// `A_B = {a_b : b ∈ B}`.
///
/// Indices of `B` beyond A's known enumeration are dropped. Let `L` be the
/// largest index for which both `a_L` and the membership of every `b ≤ L` are
/// known. The result is exact on `[1, a_L]`, or on all of A's horizon when
/// `L = |A|`.
pub fn thin(a: &SubsetWindow, b: &SubsetWindow) -> Result<SubsetWindow, SubsetError> {
    let covered = (a.len() as u64).min(b.horizon());
    if let Some(&first) = b.members.first() {
        if first > covered {
            return Err(SubsetError::InsufficientWindow { available: a.len(), smallest: first });
        }
    }
    let horizon = if covered == a.len() as u64 {
        a.horizon()
    } else {
        a.members[covered as usize - 1]
    };
    let members = b
        .members
        .iter()
        .take_while(|&&idx| idx <= covered)
        .map(|&idx| a.members[idx as usize - 1])
        .collect();
    Ok(SubsetWindow::from_sorted(members, horizon))
}

/// `kA = {k a : a ∈ A}` with horizon `k H`.
pub fn stretch(a: &SubsetWindow, k: u64) -> Result<SubsetWindow, SubsetError> {
    if k == 0 {
        return Err(SubsetError::ZeroStretch);
    }
    Ok(SubsetWindow {
        members: a.members.iter().map(|&m| m * k).collect(),
        horizon: a.horizon * k,
        complete_below_horizon: a.complete_below_horizon,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Dominance {
    pub holds: bool,
    pub positions_checked: usize,
}

/// Windowed `X ≤ Y`: `x_n ≤ y_n` over the first `min(|X|, |Y|)` positions.
pub fn dominates(x: &SubsetWindow, y: &SubsetWindow) -> Dominance {
    let positions = x.len().min(y.len());
    let holds = x.members[..positions]
        .iter()
        .zip(&y.members[..positions])
        .all(|(a, b)| a <= b);
    Dominance { holds, positions_checked: positions }
}
