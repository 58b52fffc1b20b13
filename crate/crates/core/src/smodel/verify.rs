use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::famkit::{restrict, FamilySpec, FinSet, IndexSet};
use crate::spaces::{Coord, Scalar, Vector};

use super::extract::SMEstimate;
use super::grid::{Coeffs, Grid};
use super::rule::{Certificate, FSeqRule};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuppressionViolation {
    #[serde(with = "crate::spaces::rational_str::vec")]
    pub a: Coeffs,
    /// 1-based position zeroed.
    pub p: usize,
    /// `value(a with a_p = 0) − value(a) − 2·residual`, positive for a violation.
    pub slack: Scalar,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuppressionReport {
    pub checked: usize,
    /// Pairs skipped because the zeroed vector is not on the grid or a cell
    /// is empty.
    pub skipped: usize,
    pub violations: Vec<SuppressionViolation>,
}

impl SuppressionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// For every grid point `a` and position `p`, checks
/// `value(a with a_p = 0) ≤ value(a) + 2·residual`, using the upper ends of
/// the reported intervals and the larger of the two residuals.
pub fn check_suppression(est: &SMEstimate, grid: &Grid) -> SuppressionReport {
    let mut report = SuppressionReport { checked: 0, skipped: 0, violations: Vec::new() };
    for a in grid.points() {
        let Some(full) = est.cell(a).and_then(|c| c.model()) else {
            report.skipped += a.len();
            continue;
        };
        for p in 0..a.len() {
            if a[p].is_zero() {
                continue;
            }
            let mut b = a.clone();
            b[p] = BigRational::zero();
            let Some(supp) = est.cell(&b).and_then(|c| c.model()) else {
                report.skipped += 1;
                continue;
            };
            report.checked += 1;
            let res = full.residual.clone().max(supp.residual.clone());
            let tol = res.add(&res);
            if !supp.hi.le_within(&full.hi, &tol) {
                report.violations.push(SuppressionViolation {
                    a: a.clone(),
                    p: p + 1,
                    slack: supp.hi.sub(&full.hi).sub(&tol),
                });
            }
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CoordStatus {
    /// Constant on the last fibers, over at least two values of `min(s \ t)`.
    Stable { value: Scalar },
    /// Still changing on the last fibers.
    Divergent,
    /// Fewer than two fibers lie beyond the coordinate inside the window.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoordReport {
    pub path: Vec<usize>,
    pub index: u32,
    #[serde(flatten)]
    pub status: CoordStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitEntry {
    /// `ŷ(t)` on the stable coordinates.
    pub limit: Vector,
    /// Coordinates that are not stable.
    pub unsettled: Vec<CoordReport>,
    pub fibers: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubordinationReport {
    /// No coordinate diverges at any proper segment.
    pub coordinatewise_subordinated: bool,
    /// `ŷ(∅)` has no nonzero stable coordinate.
    pub weakly_null_coordinatewise: bool,
    /// Some coordinate could not be decided inside the window.
    pub window_limited: bool,
    pub declared: Option<Certificate>,
    pub limit_map: BTreeMap<FinSet, LimitEntry>,
}

/// Coordinatewise limits `ŷ(t)` of `x_s` along members `s` extending a
/// proper segment `t`, as `min(s \ t)` grows inside the window.
pub fn subordination_check(
    rule: &FSeqRule,
    f: &FamilySpec,
    l: &IndexSet,
    window: u32,
) -> Result<SubordinationReport> {
    let fl = restrict(f, l);
    let members = fl.members(window)?;
    let values: Vec<(FinSet, Vector)> =
        members.iter().map(|s| Ok((s.clone(), rule.eval(s)?))).collect::<Result<_>>()?;
    let closure = fl.closure_in_window(window)?;
    let member_set: BTreeSet<&FinSet> = members.iter().collect();
    let mut limit_map = BTreeMap::new();
    let (mut subordinated, mut limited) = (true, false);
    for t in closure.iter().filter(|t| !member_set.contains(t)) {
        // Fibers: m = s(|t| + 1) ↦ values of x_s.
        let mut fibers: BTreeMap<u32, Vec<&Vector>> = BTreeMap::new();
        for (s, v) in &values {
            if t.is_proper_prefix_of(s) {
                fibers.entry(s.elements()[t.len()]).or_default().push(v);
            }
        }
        let coords: BTreeSet<&Coord> = fibers.values().flatten().flat_map(|v| v.entries().map(|(c, _)| c)).collect();
        let mut limit = Vector::zero();
        let mut unsettled = Vec::new();
        for c in coords {
            let beyond: Vec<(&u32, &Vec<&Vector>)> = fibers.range(c.index + 1..).collect();
            let status = if beyond.len() < 2 {
                CoordStatus::Inconclusive
            } else {
                let per_fiber: Vec<Option<Scalar>> = beyond
                    .iter()
                    .map(|(_, vs)| {
                        let first = vs[0].get(c);
                        vs.iter().all(|v| v.get(c) == first).then_some(first)
                    })
                    .collect();
                let last = per_fiber.last().cloned().flatten();
                let tail = per_fiber.iter().rev().take_while(|x| x.is_some() && **x == last).count();
                match last {
                    Some(value) if tail >= 2 => CoordStatus::Stable { value },
                    _ => CoordStatus::Divergent,
                }
            };
            match status {
                CoordStatus::Stable { value } => limit.set(c.clone(), value),
                other => {
                    if other == CoordStatus::Divergent {
                        subordinated = false;
                    } else {
                        limited = true;
                    }
                    unsettled.push(CoordReport { path: c.path.clone(), index: c.index, status: other });
                }
            }
        }
        limit_map.insert(t.clone(), LimitEntry { limit, unsettled, fibers: fibers.len() });
    }
    let weakly_null = limit_map.get(&FinSet::empty()).map_or(true, |e| e.limit.is_zero());
    Ok(SubordinationReport {
        coordinatewise_subordinated: subordinated,
        weakly_null_coordinatewise: weakly_null,
        window_limited: limited,
        declared: rule.declared.clone(),
        limit_map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smodel::{extract_sm, TableRule};
    use crate::smodel::rule::RuleKind;
    use crate::spaces::{ratio, NormOracle};

    fn fs<const N: usize>(a: [u32; N]) -> FinSet {
        FinSet::from(a)
    }

    #[test]
    fn unitmax_on_pairs_is_weakly_null() {
        let r = FSeqRule::parse("unitmax", NormOracle::lp_int(2)).unwrap();
        let rep = subordination_check(&r, &FamilySpec::cube(2), &IndexSet::all(), 10).unwrap();
        assert!(rep.coordinatewise_subordinated && rep.weakly_null_coordinatewise);
        assert!(rep.limit_map[&fs([3])].limit.is_zero());
        assert!(rep.limit_map[&FinSet::empty()].limit.is_zero());
    }

    #[test]
    fn unitmin_on_pairs_is_constant_on_fibers() {
        let r = FSeqRule::parse("unitmin", NormOracle::lp_int(2)).unwrap();
        let rep = subordination_check(&r, &FamilySpec::cube(2), &IndexSet::all(), 10).unwrap();
        assert!(rep.coordinatewise_subordinated && rep.weakly_null_coordinatewise);
        for n in 1..=8 {
            assert_eq!(rep.limit_map[&fs([n])].limit, Vector::unit(n));
        }
        let last = &rep.limit_map[&fs([9])].unsettled;
        assert_eq!(last[0].status, CoordStatus::Inconclusive);
        assert!(rep.window_limited);
    }

    #[test]
    fn constant_rule_is_not_weakly_null() {
        let t = TableRule::constant(&FamilySpec::cube(1), 8, &Vector::unit(1)).unwrap();
        let r = FSeqRule::new(RuleKind::Table(t), NormOracle::lp_int(2))
            .unwrap()
            .with_certificate(false, "constant sequence");
        let rep = subordination_check(&r, &FamilySpec::cube(1), &IndexSet::all(), 8).unwrap();
        assert!(rep.coordinatewise_subordinated);
        assert!(!rep.weakly_null_coordinatewise);
        assert_eq!(rep.limit_map[&FinSet::empty()].limit, Vector::unit(1));
        assert_eq!(rep.declared.unwrap().weakly_null, false);
    }

    #[test]
    fn suppression_detects_the_constant_rule() {
        let t = TableRule::constant(&FamilySpec::cube(1), 8, &Vector::unit(1)).unwrap();
        let r = FSeqRule::new(RuleKind::Table(t), NormOracle::lp_int(2)).unwrap();
        let g = Grid::new([vec![ratio(1, 1), ratio(-1, 1)], vec![ratio(1, 1), ratio(0, 1)], vec![ratio(0, 1), ratio(-1, 1)]]);
        let e = extract_sm(&r, &FamilySpec::cube(1), &IndexSet::all(), 2, 8, &g).unwrap();
        let rep = check_suppression(&e, &g);
        assert_eq!(rep.checked, 2);
        assert!(rep.violations.iter().any(|v| v.a == vec![ratio(1, 1), ratio(-1, 1)] && v.p == 2));
    }

    #[test]
    fn suppression_holds_for_unit_vectors() {
        let g = Grid::standard(3, 1);
        let r = FSeqRule::parse("unitmax", NormOracle::lp_int(2)).unwrap();
        let e = extract_sm(&r, &FamilySpec::cube(1), &IndexSet::all(), 3, 8, &g).unwrap();
        let rep = check_suppression(&e, &g);
        assert!(rep.passed() && rep.checked > 0);
    }
}
