use num_rational::BigRational;
use plegma_core::poset::{
    chains_and_antichains, classify_pair, dominates, sandwich_check, DominationParams, DominationVerdict, Relation,
    SMHandle,
};
use plegma_core::smodel::Grid;
use plegma_core::spaces::{NormOracle, Scalar};

fn catalog() -> Vec<SMHandle> {
    ["lp:1", "lp:3/2", "lp:2", "lp:4", "c0", "schreier", "tsirelson:1/2", "dsum(sum; lp:1, c0)"]
        .iter()
        .map(|s| SMHandle::analytic(s.parse().unwrap()))
        .collect()
}

fn params() -> DominationParams {
    DominationParams::new(Grid::standard(3, 9))
}

fn constant(v: &DominationVerdict) -> Option<BigRational> {
    match v {
        DominationVerdict::DominatedWith { c, .. } => Some(c.clone()),
        _ => None,
    }
}

#[test]
fn domination_is_a_preorder_on_conclusive_verdicts() {
    let cat = catalog();
    let p = params();
    let n = cat.len();
    let verdicts: Vec<Vec<DominationVerdict>> =
        cat.iter().map(|a| cat.iter().map(|b| dominates(a, b, &p).unwrap()).collect()).collect();
    for i in 0..n {
        assert_eq!(constant(&verdicts[i][i]), Some(BigRational::from_integer(1.into())), "{}", cat[i].name);
    }
    let mut chained = 0;
    for i in 0..n {
        for j in 0..n {
            let Some(c1) = constant(&verdicts[i][j]) else { continue };
            for k in 0..n {
                let Some(c2) = constant(&verdicts[j][k]) else { continue };
                chained += 1;
                let direct = constant(&verdicts[i][k]);
                assert!(
                    direct.as_ref().is_some_and(|c| *c <= &c1 * &c2),
                    "{} ⪯ {} ⪯ {} but direct verdict {:?}",
                    cat[i].name,
                    cat[j].name,
                    cat[k].name,
                    verdicts[i][k]
                );
            }
        }
    }
    assert!(chained > n * n);
}

#[test]
fn verdicts_are_deterministic() {
    let cat = catalog();
    let p = params();
    for a in &cat {
        for b in &cat {
            let (x, y) = (dominates(a, b, &p).unwrap(), dominates(a, b, &p).unwrap());
            assert_eq!(x, y);
            assert!(!(x.is_dominated() && y.is_not_dominated()));
        }
    }
}

#[test]
fn sum_joins_are_upper_bounds() {
    let cat = catalog();
    let p = params();
    for i in 0..cat.len() {
        for j in i + 1..cat.len() {
            let (HandleOracle(a), HandleOracle(b)) = (oracle(&cat[i]), oracle(&cat[j]));
            let join = SMHandle::analytic(NormOracle::dsum(plegma_core::spaces::Combine::Sum, vec![a, b]).unwrap());
            let parts = [cat[i].clone(), cat[j].clone()];
            let r = sandwich_check(&join, &parts, &p.grid, &Scalar::zero()).unwrap();
            assert!(r.passed(), "{}: {:?}", join.name, r.violations);
            for part in &parts {
                let v = dominates(part, &join, &p).unwrap();
                assert!(!v.is_not_dominated(), "{} vs {}: {v:?}", part.name, join.name);
                if let Some(c) = constant(&v) {
                    assert_eq!(c, BigRational::from_integer(1.into()), "{} vs {}", part.name, join.name);
                }
            }
        }
    }
}

struct HandleOracle(NormOracle);

fn oracle(h: &SMHandle) -> HandleOracle {
    match &h.kind {
        plegma_core::poset::HandleKind::Analytic { oracle } => HandleOracle(oracle.clone()),
        _ => unreachable!("the catalog is analytic"),
    }
}

#[test]
fn order_report_is_consistent_with_pairwise_classification() {
    let cat = catalog();
    let p = params();
    let r = chains_and_antichains(&cat, &p).unwrap();
    for i in 0..cat.len() {
        for j in 0..cat.len() {
            if i != j {
                assert_eq!(r.matrix[i][j], r.matrix[j][i].flip());
            }
        }
    }
    assert_eq!(r.matrix[2][0], classify_pair(&cat[2], &cat[0], &p).unwrap().relation);
    for w in r.longest_chain.windows(2) {
        assert_eq!(r.matrix[w[0]][w[1]], Relation::Less);
    }
    for a in &r.antichains {
        for x in a {
            for y in a {
                assert!(x == y || r.matrix[*x][*y] == Relation::Incomparable);
            }
        }
    }
    assert!(r.longest_chain.len() >= 5);
}
