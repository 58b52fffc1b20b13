use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::famkit::{restrict, very_large_check, FamilySpec, FinSet, IndexSet};
use crate::plegma::{enum_plm, is_plegma};
use crate::spaces::{rational_str, Scalar, Vector};

use super::extract::{extract_sm, shared_host, SMEstimate};
use super::grid::Grid;
use super::rule::{FSeqRule, RuleKind, TableRule};

/// Bookkeeping of a join construction, kept for audit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JoinAudit {
    /// The blocks `F_n`, consecutive in `M` with `max F_n < min F_{n+1}`.
    pub blocks: Vec<FinSet>,
    /// `N = {max F_n}` inside the window.
    pub n_set: FinSet,
    /// `t_s^i` for every `s ∈ ℱ ↾ N` in the window, `i = 1, 2, …`.
    /// Serialized as `[s, [t_s^1, …]]` pairs since JSON keys must be strings.
    #[serde(with = "prefix_pairs")]
    pub prefixes: BTreeMap<FinSet, Vec<FinSet>>,
    /// Plegma tuples `(s_j)` whose interleaved prefix tuple was re-checked.
    pub plegma_checked: usize,
    /// `(s_j)` whose interleaved prefixes failed to be plegma.
    pub plegma_failures: Vec<Vec<FinSet>>,
}

mod prefix_pairs {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::famkit::FinSet;

    pub fn serialize<S: Serializer>(m: &BTreeMap<FinSet, Vec<FinSet>>, s: S) -> Result<S::Ok, S::Error> {
        m.iter().collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<FinSet, Vec<FinSet>>, D::Error> {
        Ok(Vec::<(FinSet, Vec<FinSet>)>::deserialize(d)?.into_iter().collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JoinResult {
    /// The table rule `s ↦ z_s` on `ℱ ↾ N`.
    pub rule: FSeqRule,
    pub audit: JoinAudit,
}

impl JoinResult {
    pub fn index_set(&self) -> IndexSet {
        IndexSet::finite(self.audit.n_set.clone())
    }
}

/// The unique member of `f` that is an initial segment of `diagonal`.
fn unique_prefix(f: &FamilySpec, s: &FinSet, i: usize, diagonal: &FinSet) -> Result<FinSet> {
    let mut found: Option<FinSet> = None;
    for p in diagonal.prefixes() {
        if f.contains(&p)? {
            if found.is_some() {
                return Err(Error::PrefixNotUnique { s: s.clone(), i, diagonal: diagonal.clone() });
            }
            found = Some(p);
        }
    }
    found.ok_or_else(|| Error::PrefixMissing { s: s.clone(), i, diagonal: diagonal.clone() })
}

fn require_very_large(f: &FamilySpec, m: &IndexSet, window: u32) -> Result<()> {
    let r = very_large_check(f, m, window)?;
    if !r.very_large {
        let c = r.counterexample.map(|c| c.to_string()).unwrap_or_default();
        return Err(Error::Precondition(format!(
            "{f} is not very large in {m} on {{1..{window}}}: {c} extends to no member"
        )));
    }
    Ok(())
}

/// Cuts `M ∩ {1..=window}` into consecutive blocks of the given sizes; stops
/// at the first block that does not fit.
fn cut_blocks(m: &IndexSet, window: u32, sizes: impl Iterator<Item = usize>) -> Vec<FinSet> {
    let pool = m.elements_up_to(window);
    let mut blocks = Vec::new();
    let mut at = 0;
    for n in sizes {
        if n == 0 || at + n > pool.len() {
            break;
        }
        blocks.push(FinSet::new(pool[at..at + n].to_vec()).expect("increasing"));
        at += n;
    }
    blocks
}

/// `t_s^i` for `i = 1..=count`: the ℱ-prefix of `{B(s(q))(i) : q}` with
/// `B(x)` the block whose maximum is `x`.
fn diagonal_prefixes(
    f: &FamilySpec,
    s: &FinSet,
    by_max: &BTreeMap<u32, &FinSet>,
    count: usize,
) -> Result<Vec<FinSet>> {
    (1..=count)
        .map(|i| {
            let diag: Vec<u32> = s
                .elements()
                .iter()
                .map(|x| by_max[x].get(i).expect("block has at least i elements"))
                .collect();
            unique_prefix(f, s, i, &FinSet::new(diag).expect("blocks are increasing"))
        })
        .collect()
}

/// Re-checks on the window that interleaving the prefixes of a plegma tuple
/// `(s_j)` gives a plegma tuple `(t_{s_1}^1, …, t_{s_1}^k, …, t_{s_l}^k)`.
fn verify_interleaving(
    f: &FamilySpec,
    n: &IndexSet,
    window: u32,
    prefixes: &BTreeMap<FinSet, Vec<FinSet>>,
    max_l: usize,
) -> Result<(usize, Vec<Vec<FinSet>>)> {
    let mut checked = 0;
    let mut failures = Vec::new();
    for l in 1..=max_l {
        for t in enum_plm(f, n, l, window)? {
            let width = t.iter().map(|s| prefixes[s].len()).min().unwrap_or(0);
            let inter: Vec<FinSet> = t.iter().flat_map(|s| prefixes[s][..width].iter().cloned()).collect();
            checked += 1;
            if !inter.is_empty() && !is_plegma(&inter)? {
                failures.push(t);
            }
        }
    }
    Ok((checked, failures))
}

/// Upper bound on the tuple length used by [`verify_interleaving`].
pub const INTERLEAVING_CHECK_L: usize = 2;

/// The join of `k` ℱ-sequences: blocks of size `k` in `M`, `N` their maxima,
/// and `z_s = Σ_i x^i_{t_s^i}` on `ℱ ↾ N`.
pub fn build_join(rules: &[FSeqRule], f: &FamilySpec, m: &IndexSet, window: u32) -> Result<JoinResult> {
    let host = shared_host(rules)?;
    let k = rules.len();
    require_very_large(f, m, window)?;
    let blocks = cut_blocks(m, window, std::iter::repeat(k));
    if blocks.is_empty() {
        return Err(Error::Precondition(format!("no block of size {k} fits in {m} ∩ {{1..{window}}}")));
    }
    let by_max: BTreeMap<u32, &FinSet> = blocks.iter().map(|b| (b.max_elem().expect("nonempty"), b)).collect();
    let n_set = FinSet::new(by_max.keys().copied().collect()).expect("increasing");
    let n_index = IndexSet::finite(n_set.clone());
    let members = restrict(f, &n_index).members(window)?;
    let mut prefixes = BTreeMap::new();
    let mut entries = BTreeMap::new();
    for s in members {
        let ts = diagonal_prefixes(f, &s, &by_max, k)?;
        let mut z = Vector::zero();
        for (rule, t) in rules.iter().zip(&ts) {
            z = z.add(&rule.eval(t)?);
        }
        entries.insert(s.clone(), z);
        prefixes.insert(s, ts);
    }
    let (plegma_checked, plegma_failures) = verify_interleaving(f, &n_index, window, &prefixes, INTERLEAVING_CHECK_L)?;
    let rule = FSeqRule::new(RuleKind::Table(TableRule { window, entries }), host)?;
    Ok(JoinResult { rule, audit: JoinAudit { blocks, n_set, prefixes, plegma_checked, plegma_failures } })
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedJoinResult {
    /// `s ↦ z_s` before normalization.
    pub rule: FSeqRule,
    /// `s ↦ K^{−1} z_s`.
    pub normalized: FSeqRule,
    pub audit: JoinAudit,
    pub weights: Vec<BigRational>,
    pub truncation: usize,
    /// Extracted `‖e_1'‖`.
    pub k_estimate: Scalar,
    pub bounds: KBounds,
}

impl WeightedJoinResult {
    pub fn index_set(&self) -> IndexSet {
        IndexSet::finite(self.audit.n_set.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KBounds {
    /// `max_k c_k^{−1}`.
    #[serde(with = "rational_str")]
    pub lower: BigRational,
    /// `Σ_k c_k^{−1}` over the supplied weights.
    #[serde(with = "rational_str")]
    pub upper: BigRational,
    pub holds: bool,
}

/// The weighted join: blocks `F_n` of size `n`, `L = {max F_n}`, and
/// `z_s = Σ_{i ≤ min(n_s, k')} c_i^{−1} x^i_{t_s^i}` where `max F_{n_s} = min s`.
/// `K` is the extracted norm of the first basis vector along `ℱ ↾ L`.
pub fn build_weighted_join(
    rules: &[FSeqRule],
    c: &[BigRational],
    truncation: usize,
    f: &FamilySpec,
    m: &IndexSet,
    window: u32,
) -> Result<WeightedJoinResult> {
    let host = shared_host(rules)?;
    if truncation == 0 || truncation > rules.len() || truncation > c.len() {
        return Err(Error::Precondition(format!(
            "truncation {truncation} must lie in 1..={}",
            rules.len().min(c.len())
        )));
    }
    if c.iter().any(|x| *x <= BigRational::zero()) {
        return Err(Error::Precondition("weights must be positive".into()));
    }
    require_very_large(f, m, window)?;
    let blocks = cut_blocks(m, window, 1..);
    let by_max: BTreeMap<u32, &FinSet> = blocks.iter().map(|b| (b.max_elem().expect("nonempty"), b)).collect();
    let size_of: BTreeMap<u32, usize> = blocks.iter().map(|b| (b.max_elem().expect("nonempty"), b.len())).collect();
    let n_set = FinSet::new(by_max.keys().copied().collect()).expect("increasing");
    let n_index = IndexSet::finite(n_set.clone());
    let members = restrict(f, &n_index).members(window)?;
    let mut prefixes = BTreeMap::new();
    let mut entries = BTreeMap::new();
    for s in members {
        let Some(first) = s.min_elem() else { continue };
        let count = size_of[&first].min(truncation);
        let ts = diagonal_prefixes(f, &s, &by_max, count)?;
        let mut z = Vector::zero();
        for (i, t) in ts.iter().enumerate() {
            let w = Scalar::Exact(c[i].recip());
            z = z.add(&rules[i].eval(t)?.scale(&w));
        }
        entries.insert(s.clone(), z);
        prefixes.insert(s, ts);
    }
    let (plegma_checked, plegma_failures) = verify_interleaving(f, &n_index, window, &prefixes, INTERLEAVING_CHECK_L)?;
    let table = TableRule { window, entries };
    let rule = FSeqRule::new(RuleKind::Table(table.clone()), host.clone())?;

    let one = Grid::new([vec![BigRational::one()]]);
    let est = extract_sm(&rule, f, &n_index, 1, window, &one)?;
    let k_estimate = est
        .interval(&[BigRational::one()])
        .map(|(_, hi)| hi.clone())
        .ok_or_else(|| Error::Precondition("no qualifying tuple to extract K".into()))?;
    let inv = Scalar::one().div(&k_estimate).ok_or_else(|| Error::Degenerate("weighted join".into()))?;
    let normalized_table = TableRule {
        window,
        entries: table.entries.iter().map(|(s, v)| (s.clone(), v.scale(&inv))).collect(),
    };
    let normalized = FSeqRule::new(RuleKind::Table(normalized_table), host)?;

    let lower = c.iter().map(|x| x.recip()).max().expect("nonempty weights");
    let upper: BigRational = c.iter().map(|x| x.recip()).sum();
    let zero = Scalar::zero();
    let holds = Scalar::Exact(lower.clone()).le_within(&k_estimate, &zero)
        && k_estimate.le_within(&Scalar::Exact(upper.clone()), &zero);
    Ok(WeightedJoinResult {
        rule,
        normalized,
        audit: JoinAudit { blocks, n_set, prefixes, plegma_checked, plegma_failures },
        weights: c.to_vec(),
        truncation,
        k_estimate,
        bounds: KBounds { lower, upper, holds },
    })
}

/// Extracts the join model and its parts on a shared grid.
pub fn join_estimates(
    join: &JoinResult,
    parts: &[FSeqRule],
    f: &FamilySpec,
    m: &IndexSet,
    k_max: usize,
    window: u32,
    grid: &Grid,
) -> Result<(SMEstimate, Vec<SMEstimate>)> {
    let j = extract_sm(&join.rule, f, &join.index_set(), k_max, window, grid)?;
    let p = parts.iter().map(|r| extract_sm(r, f, m, k_max, window, grid)).collect::<Result<_>>()?;
    Ok((j, p))
}
