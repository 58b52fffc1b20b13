mod support;

use num_rational::BigRational;
use plegma_core::spaces::{ratio, NormOracle, Scalar, Vector};
use proptest::prelude::*;
use support::{indices, successive_sequences, tsirelson_fixed_point, tsirelson_restrictions};

#[test]
fn successive_sequences_are_counted_correctly() {
    // Σ_k C(n, k)·2^(k−1) for the nonempty subsets split into blocks.
    assert_eq!(successive_sequences(1).len(), 1);
    assert_eq!(successive_sequences(2).len(), 4);
    assert_eq!(successive_sequences(3).len(), 13);
}

#[test]
fn dynamic_program_matches_the_fixed_point() {
    for theta in [ratio(1, 2), ratio(1, 3), ratio(2, 3)] {
        let reference = tsirelson_fixed_point(8, &theta);
        let o = NormOracle::tsirelson(theta.clone()).unwrap();
        for (mask, expect) in reference.iter().enumerate() {
            let v = Vector::ones(indices(mask));
            let got = o.norm(&v).unwrap();
            assert_eq!(got, Scalar::Exact(expect.clone()), "θ={theta} support {:?}", indices(mask));
            assert!(got.is_exact());
            assert_eq!(o.norm(&v).unwrap().to_string(), got.to_string());
        }
    }
}

#[test]
fn admissible_singletons_give_the_lower_bound() {
    for theta in [ratio(1, 2), ratio(1, 3)] {
        let o = NormOracle::tsirelson(theta.clone()).unwrap();
        for n in 1..=4u32 {
            let v = Vector::ones(n..2 * n);
            let bound = theta.clone() * BigRational::from_integer(n.into());
            let got = o.norm(&v).unwrap();
            assert!(got >= Scalar::Exact(bound.clone()).max(Scalar::one()), "n={n}: {got} < {bound}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn dynamic_program_matches_the_fixed_point_on_rational_vectors(
        coeffs in prop::collection::vec((-6i64..=6, 1i64..=4), 7),
    ) {
        let x: Vec<BigRational> = coeffs.iter().map(|&(n, d)| ratio(n, d)).collect();
        let reference = tsirelson_restrictions(&x, &ratio(1, 2));
        let o = NormOracle::tsirelson(ratio(1, 2)).unwrap();
        let full = (1usize << x.len()) - 1;
        let v = Vector::from_leaf_entries(indices(full).into_iter().map(|i| (i, Scalar::Exact(x[i as usize - 1].clone()))));
        prop_assert_eq!(o.norm(&v).unwrap(), Scalar::Exact(reference[full].clone()));
    }
}
