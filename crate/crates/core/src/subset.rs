//! Subsets of the ground set `N = {1, …, n}` as machine-word bit masks.
//!
//! Variable `i ∈ {1, …, n}` lives at bit `i − 1`. The Rust API addresses
//! variables by their zero-based bit position; only text I/O (`Display`,
//! [`SubsetMask::parse`]) uses the one-based numbering.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Largest supported ground set.
pub const MAX_N: usize = 63;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SubsetMask {
    bits: u64,
    n: u8,
}

pub(crate) fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_N {
        return Err(Error::invalid(format!(
            "ground set size must be in 1..={MAX_N}, got {n}"
        )));
    }
    Ok(())
}

#[inline]
pub(crate) fn full_bits(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl SubsetMask {
    pub fn new(bits: u64, n: usize) -> Result<Self> {
        check_n(n)?;
        if bits & !full_bits(n) != 0 {
            return Err(Error::invalid(format!(
                "mask {bits:#b} has bits outside a ground set of size {n}"
            )));
        }
        Ok(SubsetMask { bits, n: n as u8 })
    }

    /// Caller guarantees `1 <= n <= 63` and no stray bits.
    #[inline]
    pub(crate) fn from_bits(bits: u64, n: usize) -> Self {
        debug_assert!((1..=MAX_N).contains(&n) && bits & !full_bits(n) == 0);
        SubsetMask { bits, n: n as u8 }
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(0, n)
    }

    pub fn full(n: usize) -> Result<Self> {
        Self::new(full_bits(n), n)
    }

    /// Builds a subset from zero-based variable positions.
    pub fn from_positions(n: usize, positions: &[usize]) -> Result<Self> {
        check_n(n)?;
        let mut bits = 0u64;
        for &p in positions {
            if p >= n {
                return Err(Error::invalid(format!(
                    "variable position {p} out of range for n = {n}"
                )));
            }
            bits |= 1 << p;
        }
        Ok(Self::from_bits(bits, n))
    }

    /// Builds a subset from one-based variable indices, which must be strictly increasing.
    pub fn from_indices(n: usize, indices: &[usize]) -> Result<Self> {
        check_n(n)?;
        let mut bits = 0u64;
        let mut prev = 0usize;
        for &i in indices {
            if i == 0 || i > n {
                return Err(Error::invalid(format!(
                    "variable index {i} out of range 1..={n}"
                )));
            }
            if i <= prev {
                return Err(Error::invalid(
                    "subset indices must be strictly increasing".to_string(),
                ));
            }
            prev = i;
            bits |= 1 << (i - 1);
        }
        Ok(Self::from_bits(bits, n))
    }

    /// Parses `{1,3}` (or `1,3`, or `{}`) into a subset.
    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let inner = text.trim();
        let inner = inner
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .unwrap_or(inner)
            .trim();
        let mut indices = Vec::new();
        if !inner.is_empty() {
            for tok in inner.split(',') {
                let i: usize = tok.trim().parse().map_err(|_| {
                    Error::invalid(format!("cannot parse subset element {tok:?} in {text:?}"))
                })?;
                indices.push(i);
            }
        }
        Self::from_indices(n, &indices)
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn n(self) -> usize {
        self.n as usize
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
    pub fn contains(self, position: usize) -> bool {
        position < 64 && self.bits >> position & 1 == 1
    }

    #[inline]
    pub fn is_subset_of(self, other: SubsetMask) -> bool {
        self.bits & !other.bits == 0
    }

    #[inline]
    pub fn union(self, other: SubsetMask) -> SubsetMask {
        SubsetMask::from_bits(self.bits | other.bits, self.n())
    }

    #[inline]
    pub fn intersection(self, other: SubsetMask) -> SubsetMask {
        SubsetMask::from_bits(self.bits & other.bits, self.n())
    }

    #[inline]
    pub fn difference(self, other: SubsetMask) -> SubsetMask {
        SubsetMask::from_bits(self.bits & !other.bits, self.n())
    }

    #[inline]
    pub fn complement(self) -> SubsetMask {
        SubsetMask::from_bits(!self.bits & full_bits(self.n()), self.n())
    }

    pub fn with(self, position: usize) -> SubsetMask {
        SubsetMask::from_bits(self.bits | 1 << position, self.n())
    }

    /// Zero-based positions in increasing order.
    pub fn positions(self) -> impl Iterator<Item = usize> {
        let mut rest = self.bits;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let p = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(p)
            }
        })
    }

    /// One-based indices in increasing order.
    pub fn indices(self) -> Vec<usize> {
        self.positions().map(|p| p + 1).collect()
    }

    /// All `T ⊆ self`, starting from `self` and ending at `∅`.
    pub fn subsets(self) -> impl Iterator<Item = SubsetMask> {
        let n = self.n();
        let mask = self.bits;
        let mut cur = Some(mask);
        std::iter::from_fn(move || {
            let s = cur?;
            cur = if s == 0 { None } else { Some((s - 1) & mask) };
            Some(SubsetMask::from_bits(s, n))
        })
    }

    /// All `T ⊇ self` within the ground set, in increasing bit order.
    pub fn supersets(self) -> impl Iterator<Item = SubsetMask> {
        let n = self.n();
        let full = full_bits(n);
        let base = self.bits;
        let mut cur = Some(base);
        std::iter::from_fn(move || {
            let s = cur?;
            cur = if s == full {
                None
            } else {
                Some((s + 1) | base)
            };
            Some(SubsetMask::from_bits(s, n))
        })
    }
}

impl Ord for SubsetMask {
    /// Report order: by cardinality, then lexicographically on the sorted indices.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.positions().cmp(other.positions()))
            .then_with(|| self.n.cmp(&other.n))
    }
}

impl PartialOrd for SubsetMask {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.positions().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}/{}", self.n)
    }
}

/// Iterator over every `S ⊆ N` with `|S| ≤ k`, in report order.
pub struct SubsetsUpTo {
    n: usize,
    k: usize,
    /// Sorted positions of the next subset to yield.
    combo: Option<Vec<usize>>,
}

impl Iterator for SubsetsUpTo {
    type Item = SubsetMask;

    fn next(&mut self) -> Option<SubsetMask> {
        let combo = self.combo.as_mut()?;
        let bits = combo.iter().fold(0u64, |b, &p| b | 1 << p);
        let out = SubsetMask::from_bits(bits, self.n);
        let size = combo.len();
        match (0..size).rev().find(|&i| combo[i] < self.n - size + i) {
            Some(i) => {
                combo[i] += 1;
                for j in i + 1..size {
                    combo[j] = combo[j - 1] + 1;
                }
            }
            None if size < self.k => *combo = (0..=size).collect(),
            None => self.combo = None,
        }
        Some(out)
    }
}

pub fn subsets_of_size_at_most(n: usize, k: usize) -> Result<SubsetsUpTo> {
    check_n(n)?;
    if k > n {
        return Err(Error::invalid(format!("order k = {k} exceeds n = {n}")));
    }
    Ok(SubsetsUpTo {
        n,
        k,
        combo: Some(Vec::new()),
    })
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Checks that `perm` (zero-based images) is a bijection on `0..n`.
pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::invalid(format!(
            "permutation has length {}, expected {n}",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::invalid("permutation is not a bijection".to_string()));
        }
        seen[p] = true;
    }
    Ok(())
}

impl SubsetMask {
    /// Image `π(S) = {π(i) : i ∈ S}` under a zero-based permutation.
    pub fn permuted(self, perm: &[usize]) -> Result<SubsetMask> {
        check_permutation(perm, self.n())?;
        let mut bits = 0u64;
        for p in self.positions() {
            bits |= 1 << perm[p];
        }
        Ok(SubsetMask::from_bits(bits, self.n()))
    }
}
