//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Each criterion compares the library against an independent check.

mod support;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use plegma_core::famkit::{rank, tree_rank, FamilySpec, FinSet, IndexSet};
use plegma_core::ordinal::Ordinal;
use plegma_core::plegma::{
    enum_bl, enum_plm, is_plegma, is_plegma_pair, ramsey_search_plm, verify_monochromatic, Coloring, SearchVerdict,
    TupleKind,
};
use plegma_core::poset::{
    classify_pair, dominates, sandwich_check, scaled_domination_check, DominationParams, Relation, SMHandle,
};
use plegma_core::smodel::{
    build_join, build_weighted_join, check_suppression, extract_sm, join_estimates, subordination_check, to_scalars,
    FSeqRule, Grid, RuleKind, TableRule,
};
use plegma_core::spaces::{ratio, NormOracle, Scalar, Vector};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:.1?}, limit {limit:?}"))
}

fn rule(kind: &str, host: &str) -> FSeqRule {
    FSeqRule::parse(kind, host.parse().unwrap()).unwrap()
}

fn nonempty_subsets(n: u32) -> Vec<FinSet> {
    FinSet::all_subsets_of_range(n).into_iter().filter(|s| !s.is_empty()).collect()
}

/// The plegma conditions read literally, with 1-based positions.
fn plegma_by_definition(parts: &[FinSet]) -> bool {
    let at = |s: &FinSet, k: usize| s.elements()[k - 1];
    for i in 0..parts.len() {
        for j in 0..parts.len() {
            let (si, sj) = (&parts[i], &parts[j]);
            if i < j && (1..=si.len().min(sj.len())).any(|k| at(si, k) >= at(sj, k)) {
                return false;
            }
            if i != j && (1..=si.len().min(sj.len().saturating_sub(1))).any(|k| at(si, k) >= at(sj, k + 1)) {
                return false;
            }
        }
    }
    true
}

fn block_by_definition(parts: &[FinSet]) -> bool {
    parts.windows(2).all(|w| w[0].elements().last() < w[1].elements().first())
}

fn plegma_equivalence() -> Outcome {
    let start = Instant::now();
    let sets = nonempty_subsets(8);
    let mut pairs = 0u64;
    for s in &sets {
        for t in sets.iter().filter(|t| s.len() <= t.len()) {
            pairs += 1;
            let (a, b) = (is_plegma(&[s.clone(), t.clone()]).map_err(|e| e.to_string())?, is_plegma_pair(s, t));
            ensure(a == b, || format!("mismatch at {s:?}, {t:?}: {a} vs {b}"))?;
        }
    }
    within(Duration::from_secs(10), start)?;
    Ok(format!("{pairs} pairs, 0 mismatches"))
}

/// Members by their defining size condition, without the library.
fn members_by_definition(family: &str, window: u32) -> Vec<FinSet> {
    nonempty_subsets(window)
        .into_iter()
        .filter(|s| match family {
            "cube:1" => s.len() == 1,
            "cube:2" => s.len() == 2,
            "uniform:w" => s.len() as u32 == s.elements()[0],
            _ => unreachable!(),
        })
        .collect()
}

fn product(members: &[FinSet], k: usize) -> Vec<Vec<FinSet>> {
    (0..k).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter()
            .flat_map(|t| members.iter().map(move |m| [t.clone(), vec![m.clone()]].concat()))
            .collect()
    })
}

fn enumeration_oracle() -> Outcome {
    let mut compared = 0usize;
    for name in ["cube:1", "cube:2", "uniform:w"] {
        let f = FamilySpec::parse(name).map_err(|e| e.to_string())?;
        for window in 1..=10 {
            let members = members_by_definition(name, window);
            for k in 1..=3 {
                let all = product(&members, k);
                let want_plm: BTreeSet<_> = all.iter().filter(|t| plegma_by_definition(t)).cloned().collect();
                let want_bl: BTreeSet<_> = all.iter().filter(|t| block_by_definition(t)).cloned().collect();
                let plm = enum_plm(&f, &IndexSet::all(), k, window).map_err(|e| e.to_string())?;
                let bl = enum_bl(&f, &IndexSet::all(), k, window).map_err(|e| e.to_string())?;
                for (kind, got, want) in [("plm", plm, &want_plm), ("bl", bl, &want_bl)] {
                    let len = got.len();
                    let got: BTreeSet<_> = got.into_iter().collect();
                    ensure(len == got.len(), || format!("{kind} {name} w={window} k={k}: duplicates"))?;
                    ensure(&got == want, || {
                        format!("{kind} {name} w={window} k={k}: {} listed, {} expected", got.len(), want.len())
                    })?;
                    compared += got.len();
                }
            }
        }
    }
    Ok(format!("{compared} tuples matched"))
}

fn rank_check() -> Outcome {
    for k in 1..=5u32 {
        let f = FamilySpec::cube(k);
        let symbolic = rank(&f).map_err(|e| e.to_string())?;
        ensure(symbolic == Ordinal::nat(k as u64), || format!("rank(cube:{k}) = {symbolic}"))?;
        let brute = tree_rank(&f, &FinSet::empty(), k + 3).map_err(|e| e.to_string())?;
        ensure(brute == k as u64, || format!("tree rank of cube:{k} = {brute}"))?;
    }
    let w = FamilySpec::parse("uniform:w").map_err(|e| e.to_string())?;
    let symbolic = rank(&w).map_err(|e| e.to_string())?;
    ensure(symbolic == Ordinal::omega(), || format!("rank(uniform:w) = {symbolic}"))?;
    // Below {n} the Schreier tree is a cube of height n − 1.
    for n in 1..=6u32 {
        let r = tree_rank(&w, &FinSet::from([n]), 2 * n + 2).map_err(|e| e.to_string())?;
        ensure(r == (n - 1) as u64, || format!("tree rank of uniform:w at {{{n}}} = {r}"))?;
    }
    Ok("cube:1..5 symbolic and tree rank, uniform:w = ω, 6 spot checks".into())
}

fn exact_extraction() -> Outcome {
    let start = Instant::now();
    let grid = Grid::sampled(4, 25, 3);
    let rel_tol = 2f64.powi(-40);
    let cases = [
        ("unitmax", "lp:1", 1u32),
        ("unitmax", "linf", 1),
        ("unitmax", "lp:2", 1),
        ("unitmin", "lp:2", 2),
    ];
    let mut cells = 0;
    for (kind, host, size) in cases {
        let f = FamilySpec::cube(size);
        let o: NormOracle = host.parse().unwrap();
        let est = extract_sm(&rule(kind, host), &f, &IndexSet::all(), 4, 12, &grid).map_err(|e| e.to_string())?;
        for cell in &est.cells {
            let m = cell.model().ok_or_else(|| format!("{kind}/{host}: empty cell {:?}", cell.a))?;
            ensure(m.residual.is_zero(), || format!("{kind}/{host} {:?}: residual {}", cell.a, m.residual))?;
            let expect = o.norm_coefficients(&to_scalars(&cell.a)).map_err(|e| e.to_string())?;
            if o.is_exact() {
                ensure(m.lo == expect && m.hi == expect, || format!("{host} {:?}: {} vs {expect}", cell.a, m.hi))?;
            } else {
                let (got, want) = (m.hi.to_f64(), expect.to_f64());
                ensure((got - want).abs() <= rel_tol * want.abs(), || format!("{host} {:?}: {got} vs {want}", cell.a))?;
            }
            cells += 1;
        }
    }
    within(Duration::from_secs(60), start)?;
    Ok(format!("{cells} cells, residual 0"))
}

const SANDWICH_HOST: &str = "dsum(sum; lp:1, lp:2)";

fn join_sandwich() -> Outcome {
    let grid = Grid::standard(3, 5);
    let f = FamilySpec::cube(1);
    let m = IndexSet::all();
    let parts = [rule("inject:1(unitmax)", SANDWICH_HOST), rule("inject:2(unitmax)", SANDWICH_HOST)];
    let join = build_join(&parts, &f, &m, 16).map_err(|e| e.to_string())?;
    ensure(join.audit.plegma_failures.is_empty(), || "join blocks are not plegma".into())?;
    let (je, pe) = join_estimates(&join, &parts, &f, &m, 3, 16, &grid).map_err(|e| e.to_string())?;
    let tol = pe.iter().fold(je.max_residual(), |acc, e| acc.add(&e.max_residual()));
    ensure(tol.is_zero(), || format!("residual {tol}"))?;
    let handles: Vec<SMHandle> = pe.into_iter().map(|e| SMHandle::empirical("part", e)).collect();
    let r = sandwich_check(&SMHandle::empirical("join", je), &handles, &grid, &tol).map_err(|e| e.to_string())?;
    ensure(r.checked == grid.len(), || format!("checked {} of {}", r.checked, grid.len()))?;
    ensure(r.passed(), || format!("violated {:?}", r.violated()))?;
    Ok(format!("{} points, 0 violations", r.checked))
}

const WEIGHTED_HOST: &str = "dsum(sum; lp:1, lp:2, c0)";

fn weighted_join() -> Outcome {
    let grid = Grid::sampled(3, 12, 2);
    let f = FamilySpec::cube(1);
    let m = IndexSet::all();
    let parts: Vec<FSeqRule> =
        (1..=3).map(|c| rule(&format!("inject:{c}(unitmax)"), WEIGHTED_HOST)).collect();
    let c: Vec<BigRational> = (1..=3).map(|k| ratio(1 << k, 1)).collect();
    let w = build_weighted_join(&parts, &c, 3, &f, &m, 45).map_err(|e| e.to_string())?;
    let k = w.k_estimate.clone();
    ensure(w.bounds.holds, || format!("bounds fail: {:?}", w.bounds))?;
    let kf = k.to_f64();
    ensure((0.5..=1.0).contains(&kf), || format!("K = {k}"))?;
    // max c_k^{-1} ≤ K ≤ Σ c_k^{-1}, recomputed here.
    let (lo, hi) = (0.5, 0.5 + 0.25 + 0.125);
    ensure(lo <= kf + 1e-12 && kf <= hi + 1e-12, || format!("K = {k} outside [{lo}, {hi}]"))?;
    let joined = extract_sm(&w.normalized, &f, &w.index_set(), 3, 45, &grid).map_err(|e| e.to_string())?;
    let join = SMHandle::empirical("join", joined);
    let tol = Scalar::frac(1, 1_000_000);
    for (i, r) in parts.iter().enumerate() {
        let part = SMHandle::empirical("part", extract_sm(r, &f, &m, 3, 45, &grid).map_err(|e| e.to_string())?);
        let ck = Scalar::Exact(c[i].clone()).mul(&k);
        let rep = scaled_domination_check(&part, &join, &ck, &grid, &tol).map_err(|e| e.to_string())?;
        ensure(rep.passed() && rep.checked > 0, || format!("part {}: {:?}", i + 1, rep.violated()))?;
    }
    Ok(format!("K = {k}, 3 scaled dominations hold"))
}

fn suppression() -> Outcome {
    let grid = Grid::standard(4, 11);
    let mut weakly_null = 0;
    let models = [
        ("unitmax", 1u32, "lp:1"),
        ("unitmax", 1, "lp:2"),
        ("unitmax", 1, "c0"),
        ("unitmax", 1, "schreier"),
        ("unitmax", 2, "lp:2"),
        ("unitmax", 2, "schreier"),
        ("unitmin", 2, "lp:1"),
        ("avg:1", 2, "lp:1"),
        ("avg:1/2", 2, "lp:2"),
        ("avg:1/2", 2, "c0"),
    ];
    for (kind, size, host) in models {
        let r = rule(kind, host);
        let f = FamilySpec::cube(size);
        let sub = subordination_check(&r, &f, &IndexSet::all(), 10).map_err(|e| e.to_string())?;
        if !sub.weakly_null_coordinatewise {
            continue;
        }
        weakly_null += 1;
        let est = extract_sm(&r, &f, &IndexSet::all(), 4, 12, &grid).map_err(|e| e.to_string())?;
        let rep = check_suppression(&est, &grid);
        ensure(rep.checked > 0, || format!("{kind}/{host}: nothing checked"))?;
        ensure(rep.passed(), || format!("{kind}/{host}: {} violations", rep.violations.len()))?;
    }
    ensure(weakly_null > 0, || "no weakly null model".into())?;
    let f = FamilySpec::cube(1);
    let t = TableRule::constant(&f, 12, &Vector::unit(1)).map_err(|e| e.to_string())?;
    let constant = FSeqRule::new(RuleKind::Table(t), NormOracle::lp_int(2)).map_err(|e| e.to_string())?;
    let sub = subordination_check(&constant, &f, &IndexSet::all(), 12).map_err(|e| e.to_string())?;
    ensure(!sub.weakly_null_coordinatewise, || "constant rule reported weakly null".into())?;
    let est = extract_sm(&constant, &f, &IndexSet::all(), 4, 12, &grid).map_err(|e| e.to_string())?;
    let rep = check_suppression(&est, &grid);
    ensure(!rep.passed(), || "constant rule shows no violation".into())?;
    Ok(format!("{weakly_null} weakly null models clean, constant rule flagged {} times", rep.violations.len()))
}

fn domination_table() -> Outcome {
    let start = Instant::now();
    // Increasing order: c0 ≺ ℓ⁴ ≺ ℓ² ≺ ℓ^{3/2} ≺ ℓ¹.
    let chain = ["c0", "lp:4", "lp:2", "lp:3/2", "lp:1"];
    let handles: Vec<SMHandle> = chain.iter().map(|s| SMHandle::analytic(s.parse().unwrap())).collect();
    let params = DominationParams::new(Grid::standard(3, 9));
    let mut pairs = 0;
    for i in 0..handles.len() {
        for j in i + 1..handles.len() {
            let c = classify_pair(&handles[i], &handles[j], &params).map_err(|e| e.to_string())?;
            ensure(c.relation == Relation::Less, || format!("{} vs {}: {:?}", chain[i], chain[j], c.relation))?;
            let up = dominates(&handles[i], &handles[j], &params).map_err(|e| e.to_string())?;
            let down = dominates(&handles[j], &handles[i], &params).map_err(|e| e.to_string())?;
            ensure(up.is_dominated() && down.is_not_dominated(), || format!("{} vs {}", chain[i], chain[j]))?;
            pairs += 1;
        }
    }
    let report = plegma_core::poset::chains_and_antichains(&handles, &params).map_err(|e| e.to_string())?;
    ensure(report.longest_chain == vec![0, 1, 2, 3, 4], || format!("chain {:?}", report.longest_chain))?;
    ensure(report.antichains.is_empty(), || format!("antichains {:?}", report.antichains))?;
    within(Duration::from_secs(30), start)?;
    Ok(format!("{pairs} pairs conclusive, chain c0 ≺ ℓ⁴ ≺ ℓ² ≺ ℓ^3/2 ≺ ℓ¹"))
}

fn tsirelson_oracle() -> Outcome {
    let theta = ratio(1, 2);
    let reference = support::tsirelson_fixed_point(8, &theta);
    let o = NormOracle::tsirelson(theta).map_err(|e| e.to_string())?;
    for (mask, expect) in reference.iter().enumerate() {
        let got = o.norm(&Vector::ones(support::indices(mask))).map_err(|e| e.to_string())?;
        ensure(got == Scalar::Exact(expect.clone()), || format!("support {:?}: {got} vs {expect}", support::indices(mask)))?;
    }
    Ok(format!("{} vectors equal", reference.len()))
}

fn ramsey_honesty() -> Outcome {
    let f = FamilySpec::cube(1);
    let all = IndexSet::all();
    let gap = Coloring::GapMod(2);
    let rep = ramsey_search_plm(&f, &all, 2, &gap, 6, 20).map_err(|e| e.to_string())?;
    let SearchVerdict::Found { witness, color } = rep.result else {
        return Err(format!("gapmod:2 not found: {:?}", rep.result));
    };
    ensure(witness.len() == 6 && witness.max_elem() <= Some(20), || format!("witness {witness:?}"))?;
    let verdict = verify_monochromatic(TupleKind::Plegma, &f, &witness, 2, &gap).map_err(|e| e.to_string())?;
    ensure(verdict == Ok(color), || format!("re-verification {verdict:?}"))?;
    // Independently: all gaps in the witness share a parity.
    let e = witness.elements();
    let parities: BTreeSet<u32> =
        (0..e.len()).flat_map(|i| (i + 1..e.len()).map(move |j| (e[j] - e[i]) % 2)).collect();
    ensure(parities.len() == 1, || format!("gaps of {witness:?} mix parities"))?;
    let rep = ramsey_search_plm(&f, &all, 2, &Coloring::MinParity, 6, 6).map_err(|e| e.to_string())?;
    let SearchVerdict::Exhausted { exhaustive, .. } = rep.result else {
        return Err(format!("minparity on {{1..6}}: {:?}", rep.result));
    };
    ensure(exhaustive, || "minparity search was not exhaustive".into())?;
    Ok(format!("witness {:?}, minparity exhausted", witness.elements()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("plegma pair characterization", plegma_equivalence),
        ("tuple enumeration", enumeration_oracle),
        ("family rank", rank_check),
        ("exact extraction", exact_extraction),
        ("join sandwich", join_sandwich),
        ("weighted join K-bounds", weighted_join),
        ("suppression", suppression),
        ("domination truth table", domination_table),
        ("Tsirelson oracle", tsirelson_oracle),
        ("Ramsey search honesty", ramsey_honesty),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let t = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({t:.2?})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} ({t:.2?})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
