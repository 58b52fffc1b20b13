use plegma_core::famkit::{image, FamilySpec, FinSet, IndexSet};
use plegma_core::plegma::{
    enum_plm, is_plegma, is_plegma_pair, ramsey_search_bl, ramsey_search_plm, verify_monochromatic, ColorTable, Coloring, SearchVerdict,
    TableEntry, TupleKind,
};
use proptest::prelude::*;

/// The plegma conditions read literally, with 1-based positions.
fn plegma_by_definition(parts: &[FinSet]) -> bool {
    let at = |s: &FinSet, k: usize| s.elements()[k - 1];
    let l = parts.len();
    for i in 1..=l {
        for j in 1..=l {
            let (si, sj) = (&parts[i - 1], &parts[j - 1]);
            if i < j {
                for k in 1..=si.len().min(sj.len()) {
                    if at(si, k) >= at(sj, k) {
                        return false;
                    }
                }
            }
            if i != j {
                for k in 1..=si.len().min(sj.len().saturating_sub(1)) {
                    if at(si, k) >= at(sj, k + 1) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn nonempty_subsets(n: u32) -> Vec<FinSet> {
    FinSet::all_subsets_of_range(n).into_iter().filter(|s| !s.is_empty()).collect()
}

#[test]
fn is_plegma_matches_the_definition_on_all_small_tuples() {
    let sets = nonempty_subsets(8);
    for a in &sets {
        assert_eq!(is_plegma(std::slice::from_ref(a)).unwrap(), plegma_by_definition(std::slice::from_ref(a)));
        for b in &sets {
            let pair = [a.clone(), b.clone()];
            let expect = plegma_by_definition(&pair);
            assert_eq!(is_plegma(&pair).unwrap(), expect, "{pair:?}");
            if !expect {
                continue;
            }
            // A triple can only be plegma if its first pair is.
            for c in &sets {
                let triple = [a.clone(), b.clone(), c.clone()];
                assert_eq!(is_plegma(&triple).unwrap(), plegma_by_definition(&triple), "{triple:?}");
            }
        }
    }
}

#[test]
fn interlacing_characterizes_pairs() {
    let sets = nonempty_subsets(8);
    for s in &sets {
        for t in sets.iter().filter(|t| s.len() <= t.len()) {
            assert_eq!(is_plegma_pair(s, t), is_plegma(&[s.clone(), t.clone()]).unwrap(), "{s:?} {t:?}");
        }
    }
}

#[test]
fn reindexing_preserves_plegma_tuples() {
    let small: Vec<FinSet> = nonempty_subsets(8).into_iter().filter(|s| s.len() <= 3).collect();
    for l in [IndexSet::evens(), IndexSet::arithmetic(3, 3).unwrap()] {
        let img: Vec<FinSet> = small.iter().map(|s| image(&l, s).unwrap()).collect();
        for i in 0..small.len() {
            for j in 0..small.len() {
                let p = is_plegma(&[small[i].clone(), small[j].clone()]).unwrap();
                assert_eq!(p, is_plegma(&[img[i].clone(), img[j].clone()]).unwrap());
                if !p {
                    continue;
                }
                for k in 0..small.len() {
                    assert_eq!(
                        is_plegma(&[small[i].clone(), small[j].clone(), small[k].clone()]).unwrap(),
                        is_plegma(&[img[i].clone(), img[j].clone(), img[k].clone()]).unwrap()
                    );
                }
            }
        }
    }
}

#[test]
fn plegma_tuples_have_increasing_minima() {
    let sets = nonempty_subsets(8);
    for a in &sets {
        for b in &sets {
            if !is_plegma(&[a.clone(), b.clone()]).unwrap() {
                continue;
            }
            assert!(a.min_elem() < b.min_elem());
            if a.len() <= b.len() {
                assert!(a.max_elem() < b.max_elem(), "{a:?} {b:?}");
            }
        }
    }
}

/// Whether some `target`-subset of `{1..=window}` has all its pairs colored
/// alike, by checking every subset.
fn brute_force_pairs(colors: &[[u32; 9]; 9], window: u32, target: usize) -> bool {
    FinSet::all_subsets_of_range(window).iter().filter(|s| s.len() == target).any(|s| {
        let e = s.elements();
        let mut seen = None;
        e.iter().enumerate().all(|(i, &x)| {
            e[i + 1..].iter().all(|&y| {
                let c = colors[x as usize][y as usize];
                *seen.get_or_insert(c) == c
            })
        })
    })
}

fn pair_coloring(colors: &[[u32; 9]; 9], window: u32) -> Coloring {
    let mut entries = Vec::new();
    for x in 1..=window {
        for y in x + 1..=window {
            entries.push(TableEntry { tuple: vec![FinSet::from([x]), FinSet::from([y])], color: colors[x as usize][y as usize] });
        }
    }
    Coloring::Table(ColorTable { palette: 2, default: 0, entries })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn search_agrees_with_brute_force_on_pair_colorings(
        bits in prop::collection::vec(0u32..2, 81),
        window in 4u32..=8,
        target in 3usize..=4,
    ) {
        let mut colors = [[0u32; 9]; 9];
        for (i, c) in bits.iter().enumerate() {
            colors[i / 9][i % 9] = *c;
        }
        let coloring = pair_coloring(&colors, window);
        let f = FamilySpec::cube(1);
        let rep = ramsey_search_plm(&f, &IndexSet::all(), 2, &coloring, target, window).unwrap();
        let expect = brute_force_pairs(&colors, window, target);
        match rep.result {
            SearchVerdict::Found { witness, .. } => {
                prop_assert!(expect);
                prop_assert_eq!(witness.len(), target);
                prop_assert!(verify_monochromatic(TupleKind::Plegma, &f, &witness, 2, &coloring).unwrap().is_ok());
            }
            SearchVerdict::Exhausted { exhaustive, .. } => {
                prop_assert!(exhaustive);
                prop_assert!(!expect);
            }
        }
    }

    #[test]
    fn found_witnesses_reverify(
        m in 1u32..=4,
        size in 1u32..=2,
        window in 8u32..=14,
    ) {
        let f = FamilySpec::cube(size);
        let size = size as usize;
        for coloring in [Coloring::GapMod(m), Coloring::MinParity, Coloring::Const(m)] {
            let target = 2 * size + 1;
            let plm = ramsey_search_plm(&f, &IndexSet::all(), 2, &coloring, target, window).unwrap();
            let bl = ramsey_search_bl(&f, &IndexSet::all(), 2, &coloring, target, window).unwrap();
            for (kind, rep) in [(TupleKind::Plegma, plm), (TupleKind::Block, bl)] {
                if let SearchVerdict::Found { witness, color } = rep.result {
                    let v = verify_monochromatic(kind, &f, &witness, 2, &coloring).unwrap();
                    prop_assert_eq!(v, Ok(color));
                }
            }
        }
    }
}

#[test]
fn enumerated_tuples_are_plegma() {
    for (f, w) in [("cube:1", 8), ("cube:2", 8), ("uniform:w", 7)] {
        let f = FamilySpec::parse(f).unwrap();
        for k in 1..=3 {
            for t in enum_plm(&f, &IndexSet::all(), k, w).unwrap() {
                assert!(plegma_by_definition(&t));
            }
        }
    }
}
