use std::fmt;

use serde::{Serialize, Serializer};

/// Subset of `{0, .., 63}` stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct IndexSet(pub u64);

impl IndexSet {
    pub const EMPTY: IndexSet = IndexSet(0);

    pub fn full(n: usize) -> Self {
        assert!(n <= 64);
        if n == 64 {
            IndexSet(u64::MAX)
        } else {
            IndexSet((1u64 << n) - 1)
        }
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        IndexSet(indices.into_iter().fold(0, |m, i| m | (1u64 << i)))
    }

    pub fn singleton(i: usize) -> Self {
        IndexSet(1u64 << i)
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 >> i & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        IndexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        IndexSet(self.0 & other.0)
    }

    pub fn complement(self, n: usize) -> Self {
        IndexSet(!self.0 & Self::full(n).0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.contains(i))
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Lexicographic comparison of the sorted index lists.
    pub fn lex_cmp(self, other: Self) -> std::cmp::Ordering {
        self.to_vec().cmp(&other.to_vec())
    }

    /// All subsets of `{0, .., n-1}` with exactly `k` elements, in increasing bitmask order.
    pub fn k_subsets(n: usize, k: usize) -> impl Iterator<Item = IndexSet> {
        let limit = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let first = if k == 0 { 0 } else { (1u64 << k) - 1 };
        let mut next = if k > n { None } else { Some(first) };
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == 0 {
                None
            } else {
                // Gosper's hack.
                let c = cur & cur.wrapping_neg();
                let r = cur + c;
                let n2 = (((r ^ cur) >> 2) / c) | r;
                if r == 0 || n2 > limit || n2 < cur {
                    None
                } else {
                    Some(n2)
                }
            };
            Some(IndexSet(cur))
        })
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for IndexSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}
