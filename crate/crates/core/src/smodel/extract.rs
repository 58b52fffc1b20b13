use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::famkit::{FamilySpec, FinSet, IndexSet};
use crate::plegma::enum_plm;
use crate::spaces::{NormOracle, Scalar, Vector};

use super::grid::{to_scalars, Coeffs, Grid};
use super::rule::{DeltaRule, FSeqRule};

/// Norms achieved by qualifying tuples at one cutoff `l`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub l: usize,
    /// `M(l)`: tuples qualify when `s_1(1) ≥ threshold`.
    pub threshold: u32,
    pub tuples: usize,
    pub lo: Scalar,
    pub hi: Scalar,
    pub residual: Scalar,
    /// `residual ≤ δ_l`.
    pub within_delta: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub k: usize,
    #[serde(with = "crate::spaces::rational_str::vec")]
    pub a: Coeffs,
    /// No qualifying tuple at `l = k`.
    pub empty: bool,
    pub cutoffs: Vec<Cutoff>,
    pub residual_nonincreasing: bool,
}

impl Cell {
    /// The interval at the largest cutoff.
    pub fn model(&self) -> Option<&Cutoff> {
        self.cutoffs.last()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateMeta {
    pub family: FamilySpec,
    pub index_set: IndexSet,
    pub window: u32,
    /// One rule for a spreading model; `k` rules for a joint model, the
    /// `j`-th tuple element using rule `((j − 1) mod k) + 1`.
    pub rules: Vec<FSeqRule>,
    pub host: NormOracle,
    pub k_max: usize,
    pub delta: DeltaRule,
}

/// Empirical spreading-model (or joint-model) estimate over a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SMEstimate {
    pub meta: EstimateMeta,
    pub cells: Vec<Cell>,
}

impl SMEstimate {
    pub fn cell(&self, a: &[BigRational]) -> Option<&Cell> {
        self.cells
            .binary_search_by(|c| c.a.as_slice().cmp(a))
            .ok()
            .map(|i| &self.cells[i])
    }

    /// `[lo, hi]` at the largest cutoff, or `None` for an empty or unknown cell.
    pub fn interval(&self, a: &[BigRational]) -> Option<(&Scalar, &Scalar)> {
        self.cell(a).and_then(Cell::model).map(|c| (&c.lo, &c.hi))
    }

    /// Largest residual at the reported cutoffs.
    pub fn max_residual(&self) -> Scalar {
        self.cells
            .iter()
            .filter_map(Cell::model)
            .fold(Scalar::zero(), |acc, c| acc.max(c.residual.clone()))
    }

    pub fn empty_cells(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(|c| c.empty)
    }

    /// Every nonzero grid point has model value 0.
    pub fn is_degenerate(&self) -> bool {
        self.cells
            .iter()
            .filter(|c| c.a.iter().any(|x| !num_traits::Zero::is_zero(x)))
            .filter_map(Cell::model)
            .all(|c| c.hi.is_zero())
    }

    pub fn grid(&self) -> Grid {
        Grid::new(self.cells.iter().map(|c| c.a.clone()))
    }
}

/// `i_k(j) = ((j − 1) mod k) + 1`, 1-based.
pub fn joint_rule_index(k: usize, j: usize) -> usize {
    (j - 1) % k + 1
}

/// `Σ_j a_j x_{s_j}^{i(j)}`.
pub(crate) fn combination(
    rules: &[FSeqRule],
    tuple: &[FinSet],
    a: &[Scalar],
    cache: &HashMap<(usize, FinSet), Vector>,
) -> Vector {
    let mut v = Vector::zero();
    for (j, (s, c)) in tuple.iter().zip(a).enumerate() {
        let r = joint_rule_index(rules.len(), j + 1) - 1;
        v = v.add(&cache[&(r, s.clone())].scale(c));
    }
    v
}

pub(crate) fn shared_host(rules: &[FSeqRule]) -> Result<NormOracle> {
    let host = rules.first().ok_or_else(|| Error::Precondition("at least one rule is required".into()))?.host.clone();
    for r in rules {
        if r.host != host {
            return Err(Error::HostMismatch(host.to_string(), r.host.to_string()));
        }
    }
    Ok(host)
}

pub(crate) fn vector_cache(
    rules: &[FSeqRule],
    tuples: &[Vec<FinSet>],
) -> Result<HashMap<(usize, FinSet), Vector>> {
    let mut cache = HashMap::new();
    for t in tuples {
        for (j, s) in t.iter().enumerate() {
            let r = joint_rule_index(rules.len(), j + 1) - 1;
            if !cache.contains_key(&(r, s.clone())) {
                cache.insert((r, s.clone()), rules[r].eval(s)?);
            }
        }
    }
    Ok(cache)
}

fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Shared driver of [`extract_sm`] and [`extract_joint`].
#[allow(clippy::too_many_arguments)]
pub fn extract_with(
    rules: &[FSeqRule],
    f: &FamilySpec,
    m: &IndexSet,
    k_max: usize,
    window: u32,
    grid: &Grid,
    delta: &DeltaRule,
) -> Result<SMEstimate> {
    if grid.is_empty() {
        return Err(Error::Precondition("the coefficient grid is empty".into()));
    }
    let host = shared_host(rules)?;
    let mut by_k: BTreeMap<usize, Vec<&Coeffs>> = BTreeMap::new();
    for a in grid.points().iter().filter(|a| a.len() <= k_max) {
        by_k.entry(a.len()).or_default().push(a);
    }
    let mut cells = Vec::new();
    for (&k, points) in &by_k {
        let mut tuples = enum_plm(f, m, k, window)?;
        // Descending by s_1(1) so each cutoff is a prefix.
        tuples.sort_by_key(|t| std::cmp::Reverse(t[0].min_elem().unwrap_or(0)));
        let firsts: Vec<u32> = tuples.iter().map(|t| t[0].min_elem().unwrap_or(0)).collect();
        let cache = vector_cache(rules, &tuples)?;
        let mut cutoff_sizes: Vec<(usize, u32, usize)> = Vec::new();
        let mut l = k;
        while let Some(threshold) = m.nth(l as u32) {
            let count = firsts.partition_point(|&x| x >= threshold);
            if count == 0 {
                break;
            }
            cutoff_sizes.push((l, threshold, count));
            l += 1;
        }
        let computed: Vec<Result<Cell>> = par_map(points, |a| {
            let sa = to_scalars(a);
            let norms: Vec<Scalar> = tuples
                .iter()
                .map(|t| host.norm(&combination(rules, t, &sa, &cache)))
                .collect::<Result<_>>()?;
            let mut running: Vec<(Scalar, Scalar)> = Vec::with_capacity(norms.len());
            for n in &norms {
                let next = match running.last() {
                    Some((lo, hi)) => (lo.clone().min(n.clone()), hi.clone().max(n.clone())),
                    None => (n.clone(), n.clone()),
                };
                running.push(next);
            }
            let cutoffs: Vec<Cutoff> = cutoff_sizes
                .iter()
                .map(|&(l, threshold, count)| {
                    let (lo, hi) = running[count - 1].clone();
                    let residual = hi.sub(&lo);
                    let within_delta = residual.le_within(&Scalar::Exact(delta.delta(l)), &Scalar::zero());
                    Cutoff { l, threshold, tuples: count, lo, hi, residual, within_delta }
                })
                .collect();
            let residual_nonincreasing =
                cutoffs.windows(2).all(|w| w[1].residual.le_within(&w[0].residual, &Scalar::zero()));
            Ok(Cell { k, a: (*a).clone(), empty: cutoffs.is_empty(), cutoffs, residual_nonincreasing })
        });
        for c in computed {
            cells.push(c?);
        }
    }
    cells.sort_by(|x, y| x.a.cmp(&y.a));
    Ok(SMEstimate {
        meta: EstimateMeta {
            family: f.clone(),
            index_set: m.clone(),
            window,
            rules: rules.to_vec(),
            host,
            k_max,
            delta: delta.clone(),
        },
        cells,
    })
}

/// Spreading-model estimate of one ℱ-sequence along `Plm_k(ℱ ↾ M)`.
pub fn extract_sm(
    rule: &FSeqRule,
    f: &FamilySpec,
    m: &IndexSet,
    k_max: usize,
    window: u32,
    grid: &Grid,
) -> Result<SMEstimate> {
    extract_with(std::slice::from_ref(rule), f, m, k_max, window, grid, &DeltaRule::default())
}

/// Joint-model estimate of `k` interleaved ℱ-sequences.
pub fn extract_joint(
    rules: &[FSeqRule],
    f: &FamilySpec,
    m: &IndexSet,
    m_max: usize,
    window: u32,
    grid: &Grid,
) -> Result<SMEstimate> {
    extract_with(rules, f, m, m_max, window, grid, &DeltaRule::default())
}

/// Largest discrepancy `|‖Σ a_j x_{s_j}^{i(j)}‖ − ‖Σ a_j x_{t_j}^{i(j)}‖|`
/// over tuple pairs from `Plm_l(ℱ ↾ L)` and grid points of length `l`.
pub fn check_joint_stability(
    rules: &[FSeqRule],
    f: &FamilySpec,
    l_set: &IndexSet,
    l: usize,
    window: u32,
    grid: &Grid,
) -> Result<Scalar> {
    let host = shared_host(rules)?;
    let tuples = enum_plm(f, l_set, l, window)?;
    let cache = vector_cache(rules, &tuples)?;
    let mut worst = Scalar::zero();
    for a in grid.points().iter().filter(|a| a.len() == l) {
        let sa = to_scalars(a);
        let mut range: Option<(Scalar, Scalar)> = None;
        for t in &tuples {
            let n = host.norm(&combination(rules, t, &sa, &cache))?;
            range = Some(match range {
                Some((lo, hi)) => (lo.min(n.clone()), hi.max(n)),
                None => (n.clone(), n),
            });
        }
        if let Some((lo, hi)) = range {
            worst = worst.max(hi.sub(&lo));
        }
    }
    Ok(worst)
}

/// Outcome of comparing a spread-out coefficient vector with its compression.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpreadingReport {
    pub pairs_checked: usize,
    /// Pairs whose values differ (exact cells) or whose intervals are
    /// disjoint (inexact cells).
    #[serde(with = "pairs_serde")]
    pub failures: Vec<(Coeffs, Coeffs)>,
}

mod pairs_serde {
    use super::Coeffs;
    use serde::{Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[(Coeffs, Coeffs)], s: S) -> Result<S::Ok, S::Error> {
        let f = |a: &Coeffs| a.iter().map(ToString::to_string).collect::<Vec<_>>();
        v.iter().map(|(a, b)| (f(a), f(b))).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Vec<(Coeffs, Coeffs)>, D::Error> {
        use serde::Deserialize;
        let parse = |a: Vec<String>| -> Result<Coeffs, D::Error> {
            a.iter()
                .map(|x| crate::spaces::Scalar::parse_rational(x).map_err(serde::de::Error::custom))
                .collect()
        };
        Vec::<(Vec<String>, Vec<String>)>::deserialize(d)?
            .into_iter()
            .map(|(a, b)| Ok((parse(a)?, parse(b)?)))
            .collect()
    }
}

/// Spreading check: the value of `a` with zeros inserted equals the value of
/// its nonzero entries placed at `1..m`.
pub fn spreading_check(est: &SMEstimate) -> SpreadingReport {
    let mut report = SpreadingReport { pairs_checked: 0, failures: Vec::new() };
    for cell in &est.cells {
        let compressed: Coeffs = cell.a.iter().filter(|x| !num_traits::Zero::is_zero(*x)).cloned().collect();
        if compressed.len() == cell.a.len() || compressed.is_empty() {
            continue;
        }
        let (Some(x), Some(y)) = (cell.model(), est.cell(&compressed).and_then(Cell::model)) else {
            continue;
        };
        report.pairs_checked += 1;
        let exact = x.residual.is_zero() && y.residual.is_zero();
        let ok = if exact {
            x.hi.approx_eq(&y.hi)
        } else {
            x.lo.le_within(&y.hi, &Scalar::zero()) && y.lo.le_within(&x.hi, &Scalar::zero())
        };
        if !ok {
            report.failures.push((cell.a.clone(), compressed));
        }
    }
    report
}
