use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite subset of ℕ = {1, 2, …}, stored as a strictly increasing list.
///
/// `get(k)` is 1-based, so `s.get(1)` is the minimum.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct FinSet(Vec<u32>);

impl FinSet {
    pub fn empty() -> Self {
        FinSet(Vec::new())
    }

    pub fn new(elements: Vec<u32>) -> Result<Self> {
        if elements.first() == Some(&0) {
            return Err(Error::Precondition("elements must be positive integers".into()));
        }
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Precondition(format!(
                "elements must be strictly increasing: {elements:?}"
            )));
        }
        Ok(FinSet(elements))
    }

    /// Sorts and deduplicates.
    pub fn from_unsorted(mut elements: Vec<u32>) -> Result<Self> {
        elements.sort_unstable();
        elements.dedup();
        FinSet::new(elements)
    }

    pub(crate) fn from_sorted_unchecked(elements: Vec<u32>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        FinSet(elements)
    }

    pub fn elements(&self) -> &[u32] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The `k`-th smallest element, 1-based.
    pub fn get(&self, k: usize) -> Option<u32> {
        k.checked_sub(1).and_then(|i| self.0.get(i).copied())
    }

    pub fn min_elem(&self) -> Option<u32> {
        self.0.first().copied()
    }

    pub fn max_elem(&self) -> Option<u32> {
        self.0.last().copied()
    }

    pub fn contains(&self, x: u32) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    /// Whether `self` is an initial segment of `other` (equality included).
    pub fn is_prefix_of(&self, other: &FinSet) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn is_proper_prefix_of(&self, other: &FinSet) -> bool {
        self.len() < other.len() && self.is_prefix_of(other)
    }

    pub fn is_subset_of(&self, other: &FinSet) -> bool {
        self.0.iter().all(|&x| other.contains(x))
    }

    /// The first `n` elements.
    pub fn prefix(&self, n: usize) -> FinSet {
        FinSet(self.0[..n.min(self.len())].to_vec())
    }

    /// All initial segments, shortest (∅) first, ending with `self`.
    pub fn prefixes(&self) -> impl Iterator<Item = FinSet> + '_ {
        (0..=self.len()).map(|n| self.prefix(n))
    }

    /// `self` with `x` appended; `x` must exceed the current maximum.
    pub fn pushed(&self, x: u32) -> FinSet {
        debug_assert!(self.max_elem().map_or(true, |m| m < x));
        let mut v = self.0.clone();
        v.push(x);
        FinSet(v)
    }

    pub fn union(&self, other: &FinSet) -> FinSet {
        let mut v: Vec<u32> = self.0.iter().chain(&other.0).copied().collect();
        v.sort_unstable();
        v.dedup();
        FinSet(v)
    }

    /// Elements strictly greater than `bound`.
    pub fn above(&self, bound: u32) -> FinSet {
        FinSet(self.0.iter().copied().filter(|&x| x > bound).collect())
    }

    pub fn without_min(&self) -> FinSet {
        FinSet(self.0.iter().skip(1).copied().collect())
    }

    pub fn without(&self, x: u32) -> FinSet {
        FinSet(self.0.iter().copied().filter(|&y| y != x).collect())
    }

    /// Parses a comma-separated list such as `1,4,9`; the empty string is ∅.
    pub fn parse_list(s: &str) -> Result<FinSet> {
        let s = s.trim().trim_start_matches('{').trim_end_matches('}');
        if s.trim().is_empty() {
            return Ok(FinSet::empty());
        }
        let mut out = Vec::new();
        let mut offset = 0;
        for part in s.split(',') {
            let n: u32 = part
                .trim()
                .parse()
                .map_err(|_| Error::parse(offset, format!("bad integer `{}`", part.trim())))?;
            out.push(n);
            offset += part.len() + 1;
        }
        FinSet::new(out)
    }

    /// All subsets of `{1..=n}`, in no particular order.
    pub fn all_subsets_of_range(n: u32) -> Vec<FinSet> {
        assert!(n < 32, "range too large to enumerate");
        (0u64..(1u64 << n))
            .map(|mask| FinSet((1..=n).filter(|i| mask >> (i - 1) & 1 == 1).collect()))
            .collect()
    }

    /// All subsets of `self`.
    pub fn subsets(&self) -> Vec<FinSet> {
        let n = self.len();
        assert!(n < 32, "set too large to enumerate subsets");
        (0u64..(1u64 << n))
            .map(|mask| {
                FinSet(
                    (0..n)
                        .filter(|i| mask >> i & 1 == 1)
                        .map(|i| self.0[i])
                        .collect(),
                )
            })
            .collect()
    }
}

impl<'de> Deserialize<'de> for FinSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<u32>::deserialize(d)?;
        FinSet::new(v).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

impl<const N: usize> From<[u32; N]> for FinSet {
    /// Panics if the array is not strictly increasing.
    fn from(a: [u32; N]) -> Self {
        FinSet::new(a.to_vec()).expect("strictly increasing positive integers")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unsorted_and_zero() {
        assert!(FinSet::new(vec![2, 1]).is_err());
        assert!(FinSet::new(vec![1, 1]).is_err());
        assert!(FinSet::new(vec![0, 3]).is_err());
    }

    #[test]
    fn one_based_access() {
        let s = FinSet::from([3, 5, 9]);
        assert_eq!(s.get(1), Some(3));
        assert_eq!(s.get(3), Some(9));
        assert_eq!(s.get(0), None);
        assert_eq!(s.get(4), None);
    }

    #[test]
    fn prefixes_and_parse() {
        let s = FinSet::parse_list("1, 4,9").unwrap();
        assert_eq!(s, FinSet::from([1, 4, 9]));
        assert_eq!(s.prefixes().count(), 4);
        assert!(FinSet::from([1, 4]).is_proper_prefix_of(&s));
        assert!(!FinSet::from([4]).is_prefix_of(&s));
        assert_eq!(s.to_string(), "{1,4,9}");
        assert_eq!(FinSet::parse_list("").unwrap(), FinSet::empty());
    }
}
