//! Subsets of `{0, .., n-1}` as bitmasks, enumerated in graded-lex order.

use std::fmt;

use itertools::Itertools;
use serde::{Serialize, Serializer};

use crate::error::{PcpError, Result};

/// Largest dimension for which `2^n` subset enumeration is attempted.
pub const MAX_ENUMERATION_DIM: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct IndexSet(u32);

impl IndexSet {
    pub fn empty() -> Self {
        IndexSet(0)
    }

    pub fn full(n: usize) -> Self {
        IndexSet(((1u64 << n) - 1) as u32)
    }

    pub fn from_indices(n: usize, indices: &[usize]) -> Result<Self> {
        let mut mask = 0u32;
        for &i in indices {
            if i >= n {
                return Err(PcpError::InvalidInput(format!("index {i} out of range for n = {n}")));
            }
            mask |= 1 << i;
        }
        Ok(IndexSet(mask))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.0 & (1 << i) != 0)
    }

    /// Checks that every element lies below `n`.
    pub fn check(self, n: usize) -> Result<()> {
        if n < 32 && self.0 >> n != 0 {
            return Err(PcpError::InvalidInput(format!("index set {self} has elements outside 1..={n}")));
        }
        Ok(())
    }
}

/// Errors when `n` exceeds [`MAX_ENUMERATION_DIM`].
pub fn guard(n: usize) -> Result<()> {
    if n > MAX_ENUMERATION_DIM {
        return Err(PcpError::ComplexityGuard {
            n,
            max: MAX_ENUMERATION_DIM,
        });
    }
    Ok(())
}

/// All `2^n` subsets, by cardinality and then lexicographically.
pub fn graded_lex_subsets(n: usize) -> impl Iterator<Item = IndexSet> {
    (0..=n).flat_map(move |k| {
        (0..n)
            .combinations(k)
            .map(|c| c.into_iter().fold(IndexSet::empty(), |mut s, i| {
                s.insert(i);
                s
            }))
    })
}

/// Displayed and serialized 1-based, as `{1,3}`.
impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.indices().map(|i| (i + 1).to_string()).join(","))
    }
}

impl Serialize for IndexSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.indices().map(|i| i + 1))
    }
}
