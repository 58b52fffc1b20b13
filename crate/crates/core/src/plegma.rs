//! Plegma and block tuples: predicates, enumeration over windows, complete
//! plegma connectedness, and finite-scale Ramsey searches.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::famkit::{restrict, FamilySpec, FinSet, IndexSet};

/// Pairwise plegma condition for `a` placed before `b` in a tuple.
fn ordered_pair_ok(a: &[u32], b: &[u32]) -> bool {
    let m = a.len().min(b.len());
    (0..m).all(|k| a[k] < b[k])
        && (0..a.len().min(b.len().saturating_sub(1))).all(|k| a[k] < b[k + 1])
        && (0..b.len().min(a.len().saturating_sub(1))).all(|k| b[k] < a[k + 1])
}

/// Whether `(s_1, …, s_l)` is a plegma family. Empty parts are rejected.
pub fn is_plegma(parts: &[FinSet]) -> Result<bool> {
    if let Some(i) = parts.iter().position(|p| p.is_empty()) {
        return Err(Error::EmptyPart(i));
    }
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            if !ordered_pair_ok(parts[i].elements(), parts[j].elements()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Interlacing test `s(1) < t(1) < s(2) < t(2) < … < s(|s|) < t(|s|)` for
/// nonempty `s`, `t` with `|s| ≤ |t|`.
pub fn is_plegma_pair(s: &FinSet, t: &FinSet) -> bool {
    let (s, t) = (s.elements(), t.elements());
    debug_assert!(!s.is_empty() && s.len() <= t.len());
    let mut prev = 0u32;
    for k in 0..s.len() {
        if !(prev < s[k] && s[k] < t[k]) && !(k == 0 && s[k] < t[k]) {
            return false;
        }
        prev = t[k];
    }
    true
}

/// A tuple of nonempty finite sets satisfying the plegma conditions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PlegmaTuple(Vec<FinSet>);

impl PlegmaTuple {
    pub fn new(parts: Vec<FinSet>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Precondition("a plegma tuple has at least one part".into()));
        }
        if !is_plegma(&parts)? {
            return Err(Error::Precondition("parts do not form a plegma family".into()));
        }
        Ok(PlegmaTuple(parts))
    }

    pub fn parts(&self) -> &[FinSet] {
        &self.0
    }

    pub fn into_parts(self) -> Vec<FinSet> {
        self.0
    }
}

fn tuple_sort_key(t: &[FinSet]) -> (Vec<u32>, Vec<usize>) {
    (
        t.iter().flat_map(|s| s.elements().iter().copied()).collect(),
        t.iter().map(FinSet::len).collect(),
    )
}

fn canonical_sort(tuples: &mut [Vec<FinSet>]) {
    tuples.sort_by_cached_key(|t| tuple_sort_key(t));
}

/// Members of `ℱ ↾ L` inside the window.
pub fn restricted_members(f: &FamilySpec, l: &IndexSet, window: u32) -> Result<Vec<FinSet>> {
    restrict(f, l).members(window)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TupleKind {
    Plegma,
    Block,
}

impl TupleKind {
    fn compatible(self, before: &FinSet, after: &FinSet) -> bool {
        match self {
            TupleKind::Plegma => ordered_pair_ok(before.elements(), after.elements()),
            TupleKind::Block => before.max_elem() < after.min_elem(),
        }
    }

    /// Plegma compatibility is pairwise over all earlier parts; block
    /// compatibility only needs the previous part.
    fn extends(self, prefix: &[&FinSet], next: &FinSet) -> bool {
        match self {
            TupleKind::Plegma => prefix.iter().all(|p| self.compatible(p, next)),
            TupleKind::Block => prefix.last().map_or(true, |p| self.compatible(p, next)),
        }
    }
}

fn enum_tuples(members: &[FinSet], k: usize, kind: TupleKind) -> Vec<Vec<FinSet>> {
    fn rec<'a>(
        members: &'a [FinSet],
        k: usize,
        kind: TupleKind,
        prefix: &mut Vec<&'a FinSet>,
        out: &mut Vec<Vec<FinSet>>,
    ) {
        if prefix.len() == k {
            out.push(prefix.iter().map(|s| (*s).clone()).collect());
            return;
        }
        for m in members {
            if kind.extends(prefix, m) {
                prefix.push(m);
                rec(members, k, kind, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    if k > 0 {
        rec(members, k, kind, &mut Vec::with_capacity(k), &mut out);
    }
    canonical_sort(&mut out);
    out
}

/// `Plm_k(ℱ ↾ L)` inside `{1..=window}`, in lexicographic order of the
/// concatenated parts.
pub fn enum_plm(f: &FamilySpec, l: &IndexSet, k: usize, window: u32) -> Result<Vec<Vec<FinSet>>> {
    Ok(enum_tuples(&restricted_members(f, l, window)?, k, TupleKind::Plegma))
}

/// `Bl_k(ℱ ↾ L)`: block sequences `max s_i < min s_{i+1}` inside the window.
pub fn enum_bl(f: &FamilySpec, l: &IndexSet, k: usize, window: u32) -> Result<Vec<Vec<FinSet>>> {
    Ok(enum_tuples(&restricted_members(f, l, window)?, k, TupleKind::Block))
}

/// Tuples of the given kind drawn from an explicit member list.
pub fn enum_tuples_from(members: &[FinSet], k: usize, kind: TupleKind) -> Vec<Vec<FinSet>> {
    enum_tuples(members, k, kind)
}

/// The union of a block sequence.
pub fn ubl(parts: &[FinSet]) -> Result<FinSet> {
    for i in 1..parts.len() {
        if parts[i - 1].max_elem() >= parts[i].min_elem() || parts[i].is_empty() {
            return Err(Error::NotBlock(i, i - 1));
        }
    }
    let v: Vec<u32> = parts.iter().flat_map(|s| s.elements().iter().copied()).collect();
    Ok(FinSet::from_sorted_unchecked(v))
}

/// Result of [`completely_plegma_connected`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Connectivity {
    pub connected: bool,
    /// A full selection `(s_1, …, s_l)` with `s_j ∈ F_j` that is not plegma.
    pub witness: Option<Vec<FinSet>>,
}

/// Whether every selection `s_j ∈ F_j` is a plegma family.
pub fn completely_plegma_connected(families: &[Vec<FinSet>]) -> Result<Connectivity> {
    for (j, fam) in families.iter().enumerate() {
        if fam.is_empty() {
            return Err(Error::Precondition(format!("family {j} is empty")));
        }
        if let Some(i) = fam.iter().position(FinSet::is_empty) {
            return Err(Error::EmptyPart(i));
        }
    }
    // The plegma conditions are pairwise, so a violating pair extends to a
    // violating selection.
    for i in 0..families.len() {
        for j in i + 1..families.len() {
            for a in &families[i] {
                for b in &families[j] {
                    if !ordered_pair_ok(a.elements(), b.elements()) {
                        let mut w: Vec<FinSet> = families.iter().map(|f| f[0].clone()).collect();
                        w[i] = a.clone();
                        w[j] = b.clone();
                        return Ok(Connectivity { connected: false, witness: Some(w) });
                    }
                }
            }
        }
    }
    Ok(Connectivity { connected: true, witness: None })
}

/// Finite colorings of tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coloring {
    Const(u32),
    /// `(s_2(1) − s_1(1)) mod m`.
    GapMod(u32),
    /// `s_1(1) mod 2`.
    MinParity,
    Table(ColorTable),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorTable {
    pub palette: u32,
    /// Color of tuples not listed.
    pub default: u32,
    pub entries: Vec<TableEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub tuple: Vec<FinSet>,
    pub color: u32,
}

impl Coloring {
    pub fn palette(&self) -> u32 {
        match self {
            Coloring::Const(c) => c + 1,
            Coloring::GapMod(m) => *m,
            Coloring::MinParity => 2,
            Coloring::Table(t) => t.palette,
        }
    }

    pub fn color(&self, tuple: &[FinSet]) -> Result<u32> {
        let first = |i: usize| -> Result<u32> {
            tuple
                .get(i)
                .and_then(FinSet::min_elem)
                .ok_or_else(|| Error::Precondition(format!("coloring needs a nonempty part {}", i + 1)))
        };
        match self {
            Coloring::Const(c) => Ok(*c),
            Coloring::GapMod(m) => {
                let (a, b) = (first(0)?, first(1)?);
                Ok(b.abs_diff(a) % m)
            }
            Coloring::MinParity => Ok(first(0)? % 2),
            Coloring::Table(t) => Ok(t
                .entries
                .iter()
                .find(|e| e.tuple == tuple)
                .map_or(t.default, |e| e.color)),
        }
    }

    pub fn parse_with(s: &str, load: &dyn Fn(&str) -> Result<String>) -> Result<Coloring> {
        let s = s.trim();
        if s == "minparity" {
            return Ok(Coloring::MinParity);
        }
        if let Some(c) = s.strip_prefix("const:") {
            return c.trim().parse().map(Coloring::Const).map_err(|_| Error::parse(6, "expected a color"));
        }
        if let Some(m) = s.strip_prefix("gapmod:") {
            let m: u32 = m.trim().parse().map_err(|_| Error::parse(7, "expected a modulus"))?;
            if m == 0 {
                return Err(Error::parse(7, "modulus must be positive"));
            }
            return Ok(Coloring::GapMod(m));
        }
        if let Some(rest) = s.strip_prefix("table:") {
            let text = match rest.trim().strip_prefix('@') {
                Some(path) => load(path)?,
                None => rest.to_string(),
            };
            let t: ColorTable = serde_json::from_str(&text).map_err(|e| Error::parse(6, e.to_string()))?;
            if t.default >= t.palette || t.entries.iter().any(|e| e.color >= t.palette) {
                return Err(Error::parse(6, "table colors must be below the palette size"));
            }
            return Ok(Coloring::Table(t));
        }
        Err(Error::parse(0, format!("unknown coloring `{s}`")))
    }
}

impl fmt::Display for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coloring::Const(c) => write!(f, "const:{c}"),
            Coloring::GapMod(m) => write!(f, "gapmod:{m}"),
            Coloring::MinParity => write!(f, "minparity"),
            Coloring::Table(t) => write!(f, "table:{}", serde_json::to_string(t).expect("table serializes")),
        }
    }
}

impl FromStr for Coloring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Coloring::parse_with(s, &|p| Err(Error::Unsupported(format!("file references are not available here: @{p}"))))
    }
}

impl Serialize for Coloring {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Coloring {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SearchVerdict {
    /// `L` of the requested size whose tuples are monochromatic; `color` is
    /// `None` when `L` carries no tuples at all.
    Found { witness: FinSet, color: Option<u32> },
    /// No such `L` inside the window (`exhaustive`), or the node budget ran
    /// out before the search space was covered.
    Exhausted { exhaustive: bool, reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub kind: TupleKind,
    pub window: u32,
    pub target: usize,
    pub arity: usize,
    pub nodes_expanded: u64,
    pub result: SearchVerdict,
}

/// Windows up to this size are searched exhaustively.
pub const EXHAUSTIVE_WINDOW: u32 = 24;
/// Node budget for larger windows.
pub const SEARCH_NODE_BUDGET: u64 = 2_000_000;

struct Search<'a> {
    kind: TupleKind,
    arity: usize,
    coloring: &'a Coloring,
    target: usize,
    pool: Vec<u32>,
    by_max: BTreeMap<u32, Vec<FinSet>>,
    budget: Option<u64>,
    nodes: u64,
    out_of_budget: bool,
}

impl Search<'_> {
    /// Colors of the tuples that use at least one of `fresh`.
    fn new_colors(&self, old: &[FinSet], fresh: &[FinSet], color: &mut Option<u32>) -> Result<bool> {
        let all: Vec<&FinSet> = old.iter().chain(fresh).collect();
        let n_old = old.len();
        let mut prefix: Vec<&FinSet> = Vec::with_capacity(self.arity);
        let mut idx: Vec<usize> = Vec::with_capacity(self.arity);
        self.rec(&all, n_old, &mut prefix, &mut idx, color)
    }

    fn rec<'b>(
        &self,
        all: &[&'b FinSet],
        n_old: usize,
        prefix: &mut Vec<&'b FinSet>,
        idx: &mut Vec<usize>,
        color: &mut Option<u32>,
    ) -> Result<bool> {
        if prefix.len() == self.arity {
            if idx.iter().all(|&i| i < n_old) {
                return Ok(true);
            }
            let tuple: Vec<FinSet> = prefix.iter().map(|s| (*s).clone()).collect();
            let c = self.coloring.color(&tuple)?;
            return Ok(match color {
                Some(prev) => *prev == c,
                None => {
                    *color = Some(c);
                    true
                }
            });
        }
        for (i, m) in all.iter().enumerate() {
            if self.kind.extends(prefix, m) {
                prefix.push(m);
                idx.push(i);
                let ok = self.rec(all, n_old, prefix, idx, color)?;
                prefix.pop();
                idx.pop();
                if !ok {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn dfs(
        &mut self,
        chosen: &mut Vec<u32>,
        members: &mut Vec<FinSet>,
        next: usize,
        color: Option<u32>,
    ) -> Result<Option<(FinSet, Option<u32>)>> {
        if chosen.len() == self.target {
            return Ok(Some((FinSet::from_sorted_unchecked(chosen.clone()), color)));
        }
        for i in next..self.pool.len() {
            if chosen.len() + (self.pool.len() - i) < self.target {
                break;
            }
            if let Some(b) = self.budget {
                if self.nodes >= b {
                    self.out_of_budget = true;
                    return Ok(None);
                }
            }
            self.nodes += 1;
            let x = self.pool[i];
            let fresh: Vec<FinSet> = self
                .by_max
                .get(&x)
                .map(|ms| {
                    ms.iter()
                        .filter(|m| m.elements()[..m.len() - 1].iter().all(|e| chosen.binary_search(e).is_ok()))
                        .cloned()
                        .collect()
                })
                .unwrap_or_default();
            let mut c = color;
            if !fresh.is_empty() && !self.new_colors(members, &fresh, &mut c)? {
                continue;
            }
            let before = members.len();
            members.extend(fresh);
            chosen.push(x);
            let found = self.dfs(chosen, members, i + 1, c)?;
            chosen.pop();
            members.truncate(before);
            if found.is_some() || self.out_of_budget {
                return Ok(found);
            }
        }
        Ok(None)
    }
}

fn ramsey_search(
    kind: TupleKind,
    f: &FamilySpec,
    m: &IndexSet,
    arity: usize,
    coloring: &Coloring,
    target: usize,
    window: u32,
) -> Result<SearchReport> {
    if arity == 0 {
        return Err(Error::Precondition("tuple arity must be positive".into()));
    }
    let members = restricted_members(f, m, window)?;
    let max_size = members.iter().map(FinSet::len).max().unwrap_or(0);
    if target < arity * max_size {
        return Err(Error::Precondition(format!(
            "target {target} is below arity × largest member size = {}",
            arity * max_size
        )));
    }
    let mut by_max: BTreeMap<u32, Vec<FinSet>> = BTreeMap::new();
    let mut empty_member = false;
    for s in members {
        match s.max_elem() {
            Some(x) => by_max.entry(x).or_default().push(s),
            None => empty_member = true,
        }
    }
    if empty_member {
        return Err(Error::Unsupported("families containing ∅ carry no nonempty tuples".into()));
    }
    let mut search = Search {
        kind,
        arity,
        coloring,
        target,
        pool: m.elements_up_to(window),
        by_max,
        budget: (window > EXHAUSTIVE_WINDOW).then_some(SEARCH_NODE_BUDGET),
        nodes: 0,
        out_of_budget: false,
    };
    let found = search.dfs(&mut Vec::new(), &mut Vec::new(), 0, None)?;
    let result = match found {
        Some((witness, color)) => SearchVerdict::Found { witness, color },
        None if search.out_of_budget => SearchVerdict::Exhausted {
            exhaustive: false,
            reason: format!("node budget of {SEARCH_NODE_BUDGET} reached"),
        },
        None => SearchVerdict::Exhausted {
            exhaustive: true,
            reason: "no monochromatic set of the target size inside the window".into(),
        },
    };
    Ok(SearchReport { kind, window, target, arity, nodes_expanded: search.nodes, result })
}

/// Looks for `L ⊆ M ∩ {1..=window}` with `|L| = target` such that
/// `Plm_l(ℱ ↾ L)` is monochromatic.
pub fn ramsey_search_plm(
    f: &FamilySpec,
    m: &IndexSet,
    l: usize,
    coloring: &Coloring,
    target: usize,
    window: u32,
) -> Result<SearchReport> {
    ramsey_search(TupleKind::Plegma, f, m, l, coloring, target, window)
}

/// As [`ramsey_search_plm`] with `Bl_k` in place of `Plm_l`.
pub fn ramsey_search_bl(
    f: &FamilySpec,
    m: &IndexSet,
    k: usize,
    coloring: &Coloring,
    target: usize,
    window: u32,
) -> Result<SearchReport> {
    ramsey_search(TupleKind::Block, f, m, k, coloring, target, window)
}

/// Re-checks by direct enumeration that every tuple of the given kind over
/// `ℱ ↾ L` gets one color. Returns the color, or `None` for no tuples.
pub fn verify_monochromatic(
    kind: TupleKind,
    f: &FamilySpec,
    l: &FinSet,
    arity: usize,
    coloring: &Coloring,
) -> Result<std::result::Result<Option<u32>, (Vec<FinSet>, Vec<FinSet>)>> {
    let window = l.max_elem().unwrap_or(0);
    let set = IndexSet::finite(l.clone());
    let tuples = match kind {
        TupleKind::Plegma => enum_plm(f, &set, arity, window)?,
        TupleKind::Block => enum_bl(f, &set, arity, window)?,
    };
    let mut first: Option<(u32, &Vec<FinSet>)> = None;
    for t in &tuples {
        let c = coloring.color(t)?;
        match first {
            None => first = Some((c, t)),
            Some((c0, t0)) if c0 != c => return Ok(Err((t0.clone(), t.clone()))),
            _ => {}
        }
    }
    Ok(Ok(first.map(|(c, _)| c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::Ordinal;

    fn fs<const N: usize>(a: [u32; N]) -> FinSet {
        FinSet::from(a)
    }

    #[test]
    fn plegma_examples() {
        assert!(is_plegma(&[fs([1, 3]), fs([2, 4])]).unwrap());
        assert!(!is_plegma(&[fs([1]), fs([1])]).unwrap());
        assert!(is_plegma(&[fs([2]), fs([3, 5])]).unwrap());
        assert!(matches!(is_plegma(&[fs([1]), FinSet::empty()]), Err(Error::EmptyPart(1))));
    }

    #[test]
    fn pair_examples() {
        assert!(is_plegma_pair(&fs([1, 3]), &fs([2, 4])));
        assert!(!is_plegma_pair(&fs([1, 2]), &fs([3, 4])));
        assert!(is_plegma_pair(&fs([5]), &fs([6])));
        assert!(!is_plegma_pair(&fs([6]), &fs([5, 9])));
    }

    #[test]
    fn enumeration_examples() {
        let all4 = IndexSet::finite(fs([1, 2, 3, 4]));
        assert_eq!(enum_plm(&FamilySpec::cube(1), &all4, 2, 4).unwrap().len(), 6);
        let t = enum_plm(&FamilySpec::cube(2), &IndexSet::all(), 2, 4).unwrap();
        assert_eq!(t, vec![vec![fs([1, 3]), fs([2, 4])]]);
        let singles = enum_plm(&FamilySpec::uniform(Ordinal::omega()), &IndexSet::all(), 1, 6).unwrap();
        assert_eq!(singles.len(), FamilySpec::uniform(Ordinal::omega()).members(6).unwrap().len());
    }

    #[test]
    fn block_enumeration_examples() {
        let b = enum_bl(&FamilySpec::cube(2), &IndexSet::all(), 2, 5).unwrap();
        assert!(b.contains(&vec![fs([1, 2]), fs([3, 4])]));
        assert!(!b.contains(&vec![fs([1, 3]), fs([2, 4])]));
        assert_eq!(enum_bl(&FamilySpec::cube(2), &IndexSet::all(), 1, 5).unwrap().len(), 10);
        assert_eq!(enum_bl(&FamilySpec::cube(1), &IndexSet::all(), 3, 4).unwrap().len(), 4);
    }

    #[test]
    fn ubl_examples() {
        assert_eq!(ubl(&[fs([1, 2]), fs([3, 4])]).unwrap(), fs([1, 2, 3, 4]));
        assert_eq!(ubl(&[fs([2, 7])]).unwrap(), fs([2, 7]));
        assert!(matches!(ubl(&[fs([1, 3]), fs([2, 4])]), Err(Error::NotBlock(1, 0))));
    }

    #[test]
    fn ubl_is_injective_on_blocks() {
        let blocks = enum_bl(&FamilySpec::cube(1), &IndexSet::all(), 2, 5).unwrap();
        let unions: std::collections::HashSet<FinSet> = blocks.iter().map(|b| ubl(b).unwrap()).collect();
        assert_eq!(unions.len(), blocks.len());
    }

    #[test]
    fn connectivity_examples() {
        assert!(completely_plegma_connected(&[vec![fs([1])], vec![fs([2, 4])]]).unwrap().connected);
        let c = completely_plegma_connected(&[vec![fs([3])], vec![fs([2, 4])]]).unwrap();
        assert!(!c.connected);
        assert_eq!(c.witness, Some(vec![fs([3]), fs([2, 4])]));
        assert!(completely_plegma_connected(&[vec![fs([1]), fs([5])]]).unwrap().connected);
    }

    #[test]
    fn coloring_syntax() {
        for s in ["const:1", "gapmod:2", "minparity"] {
            assert_eq!(s.parse::<Coloring>().unwrap().to_string(), s);
        }
        let t: Coloring = r#"table:{"palette":2,"default":0,"entries":[{"tuple":[[1],[2]],"color":1}]}"#
            .parse()
            .unwrap();
        assert_eq!(t.color(&[fs([1]), fs([2])]).unwrap(), 1);
        assert_eq!(t.color(&[fs([1]), fs([3])]).unwrap(), 0);
        assert!("gapmod:0".parse::<Coloring>().is_err());
    }

    #[test]
    fn gapmod_search_finds_an_even_progression() {
        let c = Coloring::GapMod(2);
        let r = ramsey_search_plm(&FamilySpec::cube(1), &IndexSet::all(), 2, &c, 6, 20).unwrap();
        let SearchVerdict::Found { witness, color } = r.result else { panic!("{r:?}") };
        assert_eq!(color, Some(0));
        let e = witness.elements();
        assert!(e.windows(2).all(|w| (w[1] - w[0]) % 2 == 0));
        let on_evens = ramsey_search_plm(&FamilySpec::cube(1), &IndexSet::evens(), 2, &c, 6, 20).unwrap();
        assert_eq!(
            on_evens.result,
            SearchVerdict::Found { witness: fs([2, 4, 6, 8, 10, 12]), color: Some(0) }
        );
    }

    #[test]
    fn constant_coloring_takes_the_first_subset() {
        let r = ramsey_search_plm(&FamilySpec::cube(2), &IndexSet::all(), 2, &Coloring::Const(1), 4, 10).unwrap();
        assert_eq!(r.result, SearchVerdict::Found { witness: fs([1, 2, 3, 4]), color: Some(1) });
        let r = ramsey_search_bl(&FamilySpec::cube(1), &IndexSet::all(), 2, &Coloring::Const(0), 3, 10).unwrap();
        assert!(matches!(r.result, SearchVerdict::Found { .. }));
    }

    #[test]
    fn parity_search_is_exhausted() {
        let r = ramsey_search_plm(&FamilySpec::cube(1), &IndexSet::all(), 2, &Coloring::MinParity, 6, 6).unwrap();
        assert!(matches!(r.result, SearchVerdict::Exhausted { exhaustive: true, .. }));
    }

    #[test]
    fn block_search_examples() {
        let r = ramsey_search_bl(&FamilySpec::cube(1), &IndexSet::all(), 2, &Coloring::GapMod(2), 5, 20).unwrap();
        let SearchVerdict::Found { witness, .. } = r.result else { panic!() };
        assert!(witness.elements().windows(2).all(|w| (w[1] - w[0]) % 2 == 0));
        let r = ramsey_search_bl(&FamilySpec::cube(1), &IndexSet::all(), 2, &Coloring::Const(0), 8, 5).unwrap();
        assert!(matches!(r.result, SearchVerdict::Exhausted { exhaustive: true, .. }));
    }

    #[test]
    fn search_rejects_small_targets() {
        assert!(ramsey_search_plm(&FamilySpec::cube(3), &IndexSet::all(), 2, &Coloring::Const(0), 5, 10).is_err());
    }
}
