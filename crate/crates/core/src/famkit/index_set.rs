use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::FinSet;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tail {
    AllFrom(u32),
    Arithmetic { start: u32, step: u32 },
    None,
}

impl Tail {
    fn first(&self) -> Option<u32> {
        match *self {
            Tail::AllFrom(m) => Some(m),
            Tail::Arithmetic { start, .. } => Some(start),
            Tail::None => None,
        }
    }

    fn nth0(&self, j: u32) -> Option<u32> {
        match *self {
            Tail::AllFrom(m) => m.checked_add(j),
            Tail::Arithmetic { start, step } => j.checked_mul(step).and_then(|d| start.checked_add(d)),
            Tail::None => None,
        }
    }

    fn position0(&self, x: u32) -> Option<u32> {
        match *self {
            Tail::AllFrom(m) => (x >= m).then(|| x - m),
            Tail::Arithmetic { start, step } => {
                (x >= start && (x - start) % step == 0).then(|| (x - start) / step)
            }
            Tail::None => None,
        }
    }
}

/// A subset of ℕ given as a finite prefix followed by an optional periodic tail.
///
/// The set is infinite exactly when the tail is present.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexSet {
    prefix: FinSet,
    tail: Tail,
}

impl IndexSet {
    pub fn new(prefix: FinSet, tail: Tail) -> Result<Self> {
        if let Tail::Arithmetic { step: 0, .. } = tail {
            return Err(Error::Precondition("arithmetic step must be positive".into()));
        }
        if let Some(first) = tail.first() {
            if first == 0 {
                return Err(Error::Precondition("index sets live in the positive integers".into()));
            }
            if prefix.max_elem().is_some_and(|m| m >= first) {
                return Err(Error::Precondition(format!(
                    "tail starting at {first} must lie above the prefix {prefix}"
                )));
            }
        }
        Ok(IndexSet { prefix, tail })
    }

    pub fn all() -> Self {
        IndexSet::all_from(1)
    }

    pub fn all_from(m: u32) -> Self {
        IndexSet { prefix: FinSet::empty(), tail: Tail::AllFrom(m.max(1)) }
    }

    pub fn arithmetic(start: u32, step: u32) -> Result<Self> {
        IndexSet::new(FinSet::empty(), Tail::Arithmetic { start, step })
    }

    pub fn evens() -> Self {
        IndexSet { prefix: FinSet::empty(), tail: Tail::Arithmetic { start: 2, step: 2 } }
    }

    pub fn odds() -> Self {
        IndexSet { prefix: FinSet::empty(), tail: Tail::Arithmetic { start: 1, step: 2 } }
    }

    pub fn finite(set: FinSet) -> Self {
        IndexSet { prefix: set, tail: Tail::None }
    }

    pub fn prefix(&self) -> &FinSet {
        &self.prefix
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn is_infinite(&self) -> bool {
        self.tail != Tail::None
    }

    /// Size of a finite set; `None` when infinite.
    pub fn len(&self) -> Option<usize> {
        (!self.is_infinite()).then(|| self.prefix.len())
    }

    pub fn min(&self) -> Option<u32> {
        self.prefix.min_elem().or_else(|| self.tail.first())
    }

    /// Largest element of a finite set.
    pub fn max(&self) -> Option<u32> {
        if self.is_infinite() {
            None
        } else {
            self.prefix.max_elem()
        }
    }

    pub fn contains(&self, x: u32) -> bool {
        self.prefix.contains(x) || self.tail.position0(x).is_some()
    }

    /// `L(k)`, the `k`-th smallest element (1-based).
    pub fn nth(&self, k: u32) -> Option<u32> {
        let k = k.checked_sub(1)?;
        let p = self.prefix.len() as u32;
        if k < p {
            Some(self.prefix.elements()[k as usize])
        } else {
            self.tail.nth0(k - p)
        }
    }

    /// The 1-based position of `x`, if `x` belongs to the set.
    pub fn position(&self, x: u32) -> Option<u32> {
        if let Ok(i) = self.prefix.elements().binary_search(&x) {
            return Some(i as u32 + 1);
        }
        self.tail.position0(x).map(|j| self.prefix.len() as u32 + j + 1)
    }

    /// The elements not exceeding `bound`, increasing.
    pub fn elements_up_to(&self, bound: u32) -> Vec<u32> {
        let mut out: Vec<u32> = self.prefix.elements().iter().copied().filter(|&x| x <= bound).collect();
        let mut j = 0;
        while let Some(x) = self.tail.nth0(j) {
            if x > bound {
                break;
            }
            out.push(x);
            j += 1;
        }
        out
    }

    /// `L ∩ {1..=bound}` as a finite index set.
    pub fn truncate(&self, bound: u32) -> IndexSet {
        IndexSet::finite(FinSet::from_sorted_unchecked(self.elements_up_to(bound)))
    }

    /// `L ∩ L' ∩ {1..=bound}`.
    pub fn intersect_up_to(&self, other: &IndexSet, bound: u32) -> IndexSet {
        let v = self.elements_up_to(bound).into_iter().filter(|&x| other.contains(x)).collect();
        IndexSet::finite(FinSet::from_sorted_unchecked(v))
    }

    pub fn contains_set(&self, s: &FinSet) -> bool {
        s.elements().iter().all(|&x| self.contains(x))
    }
}

/// `L(s) = {L(s(1)), …, L(s(m))}`.
pub fn image(l: &IndexSet, s: &FinSet) -> Result<FinSet> {
    let mut out = Vec::with_capacity(s.len());
    for &k in s.elements() {
        match l.nth(k) {
            Some(x) => out.push(x),
            None => {
                return Err(Error::IndexOverflow { index: k, len: l.prefix.len() });
            }
        }
    }
    Ok(FinSet::from_sorted_unchecked(out))
}

/// `L(H) = {L(s) : s ∈ H}`.
pub fn image_family<'a>(l: &IndexSet, h: impl IntoIterator<Item = &'a FinSet>) -> Result<Vec<FinSet>> {
    h.into_iter().map(|s| image(l, s)).collect()
}

/// `N⁻¹(t)`: the unique `s` with `N(s) = t`.
pub fn index_inverse(n: &IndexSet, t: &FinSet) -> Result<FinSet> {
    let mut out = Vec::with_capacity(t.len());
    for &x in t.elements() {
        match n.position(x) {
            Some(p) => out.push(p),
            None => return Err(Error::NotInIndexSet { element: x, set: t.clone() }),
        }
    }
    Ok(FinSet::from_sorted_unchecked(out))
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tail = match self.tail {
            Tail::AllFrom(m) => format!("all>={m}"),
            Tail::Arithmetic { start, step } => format!("arith:{start},{step}"),
            Tail::None => String::new(),
        };
        if self.prefix.is_empty() {
            if self.tail == Tail::None {
                return write!(f, "prefix:");
            }
            return write!(f, "{tail}");
        }
        let list: Vec<String> = self.prefix.elements().iter().map(|x| x.to_string()).collect();
        write!(f, "prefix:{}", list.join(","))?;
        if self.tail != Tail::None {
            write!(f, ";{tail}")?;
        }
        Ok(())
    }
}

fn parse_tail(s: &str, offset: usize) -> Result<Tail> {
    let bad = |msg: &str| Error::parse(offset, format!("{msg}: `{s}`"));
    let s = s.trim();
    match s {
        "all" => return Ok(Tail::AllFrom(1)),
        "evens" => return Ok(Tail::Arithmetic { start: 2, step: 2 }),
        "odds" => return Ok(Tail::Arithmetic { start: 1, step: 2 }),
        _ => {}
    }
    if let Some(m) = s.strip_prefix("all>=") {
        let m: u32 = m.trim().parse().map_err(|_| bad("bad lower bound"))?;
        if m == 0 {
            return Err(bad("lower bound must be positive"));
        }
        return Ok(Tail::AllFrom(m));
    }
    if let Some(rest) = s.strip_prefix("arith:") {
        let (a, b) = rest.split_once(',').ok_or_else(|| bad("expected `arith:start,step`"))?;
        let start: u32 = a.trim().parse().map_err(|_| bad("bad start"))?;
        let step: u32 = b.trim().parse().map_err(|_| bad("bad step"))?;
        if start == 0 || step == 0 {
            return Err(bad("start and step must be positive"));
        }
        return Ok(Tail::Arithmetic { start, step });
    }
    Err(bad("unknown index set"))
}

impl FromStr for IndexSet {
    type Err = Error;

    /// `all`, `evens`, `odds`, `all>=m`, `arith:start,step`,
    /// `prefix:1,4,9` (finite) or `prefix:1,4,9;all>=12`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("prefix:") {
            let (list, tail) = match rest.split_once(';') {
                Some((l, t)) => (l, parse_tail(t, 7 + l.len() + 1)?),
                None => (rest, Tail::None),
            };
            let prefix = FinSet::parse_list(list).map_err(|e| match e {
                Error::Parse { pos, msg } => Error::parse(pos + 7, msg),
                other => other,
            })?;
            return IndexSet::new(prefix, tail);
        }
        IndexSet::new(FinSet::empty(), parse_tail(s, 0)?)
    }
}

impl Serialize for IndexSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for IndexSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn image_examples() {
        assert_eq!(image(&IndexSet::evens(), &FinSet::from([1, 3])).unwrap(), FinSet::from([2, 6]));
        let s = FinSet::from([2, 7, 11]);
        assert_eq!(image(&IndexSet::all(), &s).unwrap(), s);
        let a = IndexSet::arithmetic(3, 2).unwrap();
        assert_eq!(image(&a, &FinSet::from([2, 4])).unwrap(), FinSet::from([5, 9]));
    }

    #[test]
    fn image_overflows_finite_sets() {
        let l = IndexSet::finite(FinSet::from([4, 8]));
        assert!(matches!(image(&l, &FinSet::from([1, 3])), Err(Error::IndexOverflow { index: 3, .. })));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(index_inverse(&IndexSet::evens(), &FinSet::from([2, 6])).unwrap(), FinSet::from([1, 3]));
        let t = FinSet::from([1, 5, 6]);
        assert_eq!(index_inverse(&IndexSet::all(), &t).unwrap(), t);
        assert!(matches!(
            index_inverse(&IndexSet::evens(), &FinSet::from([3])),
            Err(Error::NotInIndexSet { element: 3, .. })
        ));
    }

    #[test]
    fn mixed_prefix_and_tail() {
        let l: IndexSet = "prefix:1,4,9;all>=12".parse().unwrap();
        assert_eq!(l.nth(1), Some(1));
        assert_eq!(l.nth(3), Some(9));
        assert_eq!(l.nth(4), Some(12));
        assert_eq!(l.nth(6), Some(14));
        assert_eq!(l.position(13), Some(5));
        assert!(!l.contains(10));
        assert_eq!(l.elements_up_to(13), vec![1, 4, 9, 12, 13]);
        assert_eq!(l.to_string(), "prefix:1,4,9;all>=12");
    }

    #[test]
    fn parse_forms() {
        assert_eq!("evens".parse::<IndexSet>().unwrap(), IndexSet::evens());
        assert_eq!("all>=5".parse::<IndexSet>().unwrap(), IndexSet::all_from(5));
        assert_eq!("arith:3,2".parse::<IndexSet>().unwrap(), IndexSet::arithmetic(3, 2).unwrap());
        let fin: IndexSet = "prefix:2,3".parse().unwrap();
        assert_eq!(fin.len(), Some(2));
        assert!("prefix:5;all>=3".parse::<IndexSet>().is_err());
        assert!("arith:1,0".parse::<IndexSet>().is_err());
        assert!("bogus".parse::<IndexSet>().is_err());
    }
}
