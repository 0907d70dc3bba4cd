//! Coalitions of variables encoded as bitmasks.
//!
//! Variables are numbered `0..d` (zero-based); bit `j` of the mask is set when
//! variable `j` belongs to the coalition. The player count `d` travels with the
//! set so that complements are well defined.

use std::fmt;

use crate::error::{Error, Result};

/// Largest player count an [`IndexSet`] can describe.
pub const MAX_PLAYERS: usize = 30;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSet {
    bits: u32,
    d: u8,
}

impl IndexSet {
    pub fn empty(d: usize) -> Result<Self> {
        check_players(d)?;
        Ok(Self { bits: 0, d: d as u8 })
    }

    pub fn full(d: usize) -> Result<Self> {
        check_players(d)?;
        Ok(Self {
            bits: full_mask(d),
            d: d as u8,
        })
    }

    /// Builds a set from zero-based indices; duplicates are rejected.
    pub fn from_indices<I>(d: usize, indices: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut set = Self::empty(d)?;
        for j in indices {
            if j >= d {
                return Err(Error::domain(format!("index {j} out of range for d = {d}")));
            }
            if set.contains(j) {
                return Err(Error::domain(format!("duplicate index {j}")));
            }
            set.bits |= 1 << j;
        }
        Ok(set)
    }

    pub fn from_mask(d: usize, bits: u32) -> Result<Self> {
        check_players(d)?;
        if bits & !full_mask(d) != 0 {
            return Err(Error::domain(format!("mask {bits:#b} has bits beyond d = {d}")));
        }
        Ok(Self { bits, d: d as u8 })
    }

    /// Unchecked constructor for internal loops that already respect `d`.
    pub(crate) fn from_mask_unchecked(d: usize, bits: u32) -> Self {
        debug_assert!(d <= MAX_PLAYERS && bits & !full_mask(d) == 0);
        Self { bits, d: d as u8 }
    }

    #[inline]
    pub fn mask(self) -> u32 {
        self.bits
    }

    #[inline]
    pub fn players(self) -> usize {
        self.d as usize
    }

    #[inline]
    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    #[inline]
    pub fn is_full(self) -> bool {
        self.bits == full_mask(self.players())
    }

    #[inline]
    pub fn contains(self, j: usize) -> bool {
        j < self.players() && self.bits & (1 << j) != 0
    }

    /// `−u`, the variables not in `u`.
    #[inline]
    pub fn complement(self) -> Self {
        Self {
            bits: !self.bits & full_mask(self.players()),
            d: self.d,
        }
    }

    /// `u + v` for disjoint `u`, `v`.
    pub fn disjoint_union(self, other: Self) -> Result<Self> {
        if self.d != other.d {
            return Err(Error::dimension(format!(
                "sets over {} and {} players",
                self.d, other.d
            )));
        }
        if self.bits & other.bits != 0 {
            return Err(Error::domain("union of overlapping sets"));
        }
        Ok(Self {
            bits: self.bits | other.bits,
            d: self.d,
        })
    }

    /// `u ∪ {j}`.
    #[inline]
    pub fn with(self, j: usize) -> Self {
        debug_assert!(j < self.players());
        Self {
            bits: self.bits | (1 << j),
            d: self.d,
        }
    }

    #[inline]
    pub fn without(self, j: usize) -> Self {
        Self {
            bits: self.bits & !(1 << j),
            d: self.d,
        }
    }

    #[inline]
    pub fn is_subset_of(self, other: Self) -> bool {
        self.bits & !other.bits == 0
    }

    #[inline]
    pub fn intersects(self, other: Self) -> bool {
        self.bits & other.bits != 0
    }

    /// Members in ascending order.
    pub fn iter(self) -> Members {
        Members { bits: self.bits }
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All subsets of this set, in ascending mask order (including `∅` and the set itself).
    pub fn subsets(self) -> Subsets {
        Subsets {
            universe: self.bits,
            next: Some(0),
            d: self.d,
        }
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, j) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{j}")?;
        }
        write!(f, "}}")
    }
}

pub struct Members {
    bits: u32,
}

impl Iterator for Members {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.bits == 0 {
            return None;
        }
        let j = self.bits.trailing_zeros() as usize;
        self.bits &= self.bits - 1;
        Some(j)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.bits.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Members {}

pub struct Subsets {
    universe: u32,
    next: Option<u32>,
    d: u8,
}

impl Iterator for Subsets {
    type Item = IndexSet;

    fn next(&mut self) -> Option<IndexSet> {
        let cur = self.next?;
        // Standard submask successor: ascending order over submasks of `universe`.
        self.next = if cur == self.universe {
            None
        } else {
            Some((cur.wrapping_sub(self.universe)) & self.universe)
        };
        Some(IndexSet { bits: cur, d: self.d })
    }
}

#[inline]
pub(crate) fn full_mask(d: usize) -> u32 {
    if d >= 32 {
        u32::MAX
    } else {
        (1u32 << d) - 1
    }
}

pub(crate) fn check_players(d: usize) -> Result<()> {
    if d == 0 || d > MAX_PLAYERS {
        return Err(Error::domain(format!(
            "player count d = {d} outside 1..={MAX_PLAYERS}"
        )));
    }
    Ok(())
}
