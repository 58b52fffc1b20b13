//! Window-relative structural checks: regularity, rank, `⊑`, initial-segment
//! maps and very-largeness.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{FamilyKind, FamilySpec, FinSet, IndexSet};
use crate::error::{Error, Result};
use crate::ordinal::Ordinal;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityReport {
    /// Always true on a finite window; recorded as vacuous.
    pub compact: bool,
    pub compact_vacuous: bool,
    pub hereditary: bool,
    pub hereditary_witness: Option<(FinSet, FinSet)>,
    pub spreading: bool,
    pub spreading_witness: Option<(FinSet, FinSet)>,
    /// Some shift of a member would leave the window and could not be checked.
    pub spreading_window_limited: bool,
    pub thin: bool,
    pub thin_witness: Option<(FinSet, FinSet)>,
}

/// Checks compactness, heredity, spreading and thinness of a finite family
/// relative to `{1..=window}`.
pub fn check_regular_properties(members: &[FinSet], window: u32) -> Result<RegularityReport> {
    let set: HashSet<&FinSet> = members.iter().collect();
    for m in members {
        if m.max_elem().is_some_and(|x| x > window) {
            return Err(Error::OutOfWindow { set: m.clone(), window });
        }
    }

    let mut hereditary_witness = None;
    'h: for m in members {
        for &x in m.elements() {
            let sub = m.without(x);
            if !set.contains(&sub) {
                hereditary_witness = Some((m.clone(), sub));
                break 'h;
            }
        }
    }

    // Unit moves (raise one coordinate by one) generate every dominating set.
    let mut spreading_witness = None;
    let mut window_limited = false;
    'sp: for m in members {
        let e = m.elements();
        for i in 0..e.len() {
            let raised = e[i] + 1;
            let blocked = e.get(i + 1).is_some_and(|&next| next == raised);
            if blocked {
                continue;
            }
            if raised > window {
                window_limited = true;
                continue;
            }
            let mut v = e.to_vec();
            v[i] = raised;
            let t = FinSet::from_sorted_unchecked(v);
            if !set.contains(&t) {
                spreading_witness = Some((m.clone(), t));
                break 'sp;
            }
        }
    }

    let mut thin_witness = None;
    'th: for m in members {
        for p in m.prefixes().take(m.len()) {
            if set.contains(&p) {
                thin_witness = Some((p, m.clone()));
                break 'th;
            }
        }
    }

    Ok(RegularityReport {
        compact: true,
        compact_vacuous: true,
        hereditary: hereditary_witness.is_none(),
        hereditary_witness,
        spreading: spreading_witness.is_none(),
        spreading_witness,
        spreading_window_limited: window_limited,
        thin: thin_witness.is_none(),
        thin_witness,
    })
}

/// Fails with the first pair of members where one is a proper initial segment
/// of the other.
pub fn check_thin(members: &[FinSet]) -> Result<()> {
    let set: HashSet<&FinSet> = members.iter().collect();
    for m in members {
        for p in m.prefixes().take(m.len()) {
            if set.contains(&p) {
                return Err(Error::NotThin { shorter: p, longer: m.clone() });
            }
        }
    }
    Ok(())
}

/// The order of the family: rank of the closure under reverse inclusion.
///
/// Cubes and uniform families are answered from their construction; explicit
/// families by the tree-rank recursion over their closure.
pub fn rank(f: &FamilySpec) -> Result<Ordinal> {
    match f.kind() {
        FamilyKind::Cube(k) => Ok(Ordinal::nat(*k as u64)),
        FamilyKind::UniformThin(o) => Ok(o.clone()),
        FamilyKind::Explicit(e) => {
            let members: Vec<FinSet> = e.members().iter().cloned().collect();
            check_thin(&members)?;
            if members.is_empty() {
                return Err(Error::Precondition("the empty family has no rank".into()));
            }
            Ok(Ordinal::nat(tree_rank(f, &FinSet::empty(), e.window())?))
        }
        _ => Err(Error::Unsupported(
            "rank is defined for cube, uniform and explicit families".into(),
        )),
    }
}

/// Brute-force rank of node `s` in `ℱ̂ ∩ P({1..=window})` ordered by reverse
/// inclusion: 0 at maximal nodes, otherwise one more than the largest child.
pub fn tree_rank(f: &FamilySpec, s: &FinSet, window: u32) -> Result<u64> {
    let mut memo = HashMap::new();
    tree_rank_memo(f, s, window, &mut memo)
}

fn tree_rank_memo(f: &FamilySpec, s: &FinSet, window: u32, memo: &mut HashMap<FinSet, u64>) -> Result<u64> {
    if let Some(&r) = memo.get(s) {
        return Ok(r);
    }
    let mut best: Option<u64> = None;
    for x in 1..=window {
        if s.contains(x) {
            continue;
        }
        let child = s.union(&FinSet::from_sorted_unchecked(vec![x]));
        if f.classify(&child)?.in_closure() {
            let r = tree_rank_memo(f, &child, window, memo)?;
            best = Some(best.map_or(r + 1, |b| b.max(r + 1)));
        }
    }
    let r = best.unwrap_or(0);
    memo.insert(s.clone(), r);
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SqClause {
    /// A member of the smaller family has no end-extension in the larger.
    NoExtension,
    /// A member of the larger family has no initial segment in the smaller.
    NoInitialSegment,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SqReport {
    pub holds: bool,
    pub witness: Option<(SqClause, FinSet)>,
}

/// `ℱ ⊑ 𝒢` on the window: every member of `ℱ` end-extends to a member of `𝒢`
/// and every member of `𝒢` has an initial segment in `ℱ`.
pub fn sqsubseteq_check(f: &FamilySpec, g: &FamilySpec, window: u32) -> Result<SqReport> {
    for s in f.members(window)? {
        if !g.extends_to_member(&s)? {
            return Ok(SqReport { holds: false, witness: Some((SqClause::NoExtension, s)) });
        }
    }
    for t in g.members(window)? {
        let mut found = false;
        for p in t.prefixes() {
            if f.contains(&p)? {
                found = true;
                break;
            }
        }
        if !found {
            return Ok(SqReport { holds: false, witness: Some((SqClause::NoInitialSegment, t)) });
        }
    }
    Ok(SqReport { holds: true, witness: None })
}

/// The unique `ℱ`-member that is an initial segment of `t`.
pub fn initial_segment_of(f: &FamilySpec, t: &FinSet) -> Result<Option<FinSet>> {
    let mut hit: Option<FinSet> = None;
    for p in t.prefixes() {
        if f.contains(&p)? {
            if let Some(prev) = hit {
                return Err(Error::NotThin { shorter: prev, longer: p });
            }
            hit = Some(p);
        }
    }
    Ok(hit)
}

/// `t ↦ φ(t)`, the `ℱ`-member that is an initial segment of `t`, for every
/// `𝒢`-member `t` in the window.
pub fn initial_segment_map(f: &FamilySpec, g: &FamilySpec, window: u32) -> Result<BTreeMap<FinSet, FinSet>> {
    let mut map = BTreeMap::new();
    for t in g.members(window)? {
        match initial_segment_of(f, &t)? {
            Some(s) => {
                map.insert(t, s);
            }
            None => {
                return Err(Error::Precondition(format!(
                    "{t} has no initial segment in the smaller family"
                )));
            }
        }
    }
    Ok(map)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VeryLargeReport {
    /// No counterexample exists inside the window.
    pub very_large: bool,
    /// A finite increasing sequence from `L` none of whose extensions can
    /// have an initial segment in the family.
    pub counterexample: Option<FinSet>,
    /// Branches that ran out of window before reaching a member.
    pub window_limited: usize,
    pub nodes: usize,
    pub budget_exhausted: bool,
}

pub const VERY_LARGE_NODE_BUDGET: usize = 2_000_000;

/// Window form of "every infinite `N ⊆ L` has an initial segment in `ℱ`".
pub fn very_large_check(f: &FamilySpec, l: &IndexSet, window: u32) -> Result<VeryLargeReport> {
    let bound = f.bound().map_or(window, |b| b.min(window));
    let pool = l.elements_up_to(bound);
    let mut report = VeryLargeReport {
        very_large: true,
        counterexample: None,
        window_limited: 0,
        nodes: 0,
        budget_exhausted: false,
    };
    if f.contains(&FinSet::empty())? {
        return Ok(report);
    }
    let mut stack: Vec<(FinSet, usize)> = vec![(FinSet::empty(), 0)];
    while let Some((a, next)) = stack.pop() {
        report.nodes += 1;
        if report.nodes > VERY_LARGE_NODE_BUDGET {
            report.budget_exhausted = true;
            break;
        }
        if next == pool.len() {
            report.window_limited += 1;
            continue;
        }
        let mut children = Vec::new();
        for (i, &x) in pool.iter().enumerate().skip(next) {
            let child = a.pushed(x);
            if f.contains(&child)? {
                continue;
            }
            if !f.extends_to_member(&child)? {
                report.very_large = false;
                report.counterexample = Some(child);
                return Ok(report);
            }
            children.push((child, i + 1));
        }
        stack.extend(children.into_iter().rev());
    }
    Ok(report)
}
