use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::spaces::{ratio, Scalar};

/// A coefficient vector `(a_1, …, a_k)` with entries in `[−1, 1]`.
pub type Coeffs = Vec<BigRational>;

/// A finite set of coefficient vectors, kept sorted and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    #[serde(with = "coeffs_serde")]
    points: Vec<Coeffs>,
}

mod coeffs_serde {
    use super::Coeffs;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Coeffs], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|a| a.iter().map(ToString::to_string).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Coeffs>, D::Error> {
        Vec::<Vec<String>>::deserialize(d)?
            .iter()
            .map(|a| {
                a.iter()
                    .map(|x| crate::spaces::Scalar::parse_rational(x).map_err(serde::de::Error::custom))
                    .collect()
            })
            .collect()
    }
}

/// Number of pseudo-random directions added to the standard grid.
pub const RANDOM_POINTS: usize = 20;

fn patterns(k: usize, values: &[BigRational]) -> Vec<Coeffs> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(v.clone());
                    q
                })
            })
            .collect();
    }
    out
}

fn random_point(rng: &mut ChaCha8Rng, k_max: usize) -> Coeffs {
    let k = rng.gen_range(1..=k_max);
    (0..k)
        .map(|_| {
            let d = rng.gen_range(1..=12i64);
            ratio(rng.gen_range(-d..=d), d)
        })
        .collect()
}

fn zeroings(a: &Coeffs) -> Vec<Coeffs> {
    let nz: Vec<usize> = (0..a.len()).filter(|&i| !a[i].is_zero()).collect();
    (0u32..(1 << nz.len()))
        .map(|mask| {
            let mut b = a.clone();
            for (bit, &i) in nz.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    b[i] = BigRational::zero();
                }
            }
            b
        })
        .collect()
}

impl Grid {
    pub fn new(points: impl IntoIterator<Item = Coeffs>) -> Self {
        let set: BTreeSet<Coeffs> = points.into_iter().filter(|p| !p.is_empty()).collect();
        Grid { points: set.into_iter().collect() }
    }

    /// Every vector over `{0, ±1/2, ±1}` of length `1..=k_max`, plus
    /// [`RANDOM_POINTS`] seeded random rational vectors and all their
    /// coordinate zeroings. Closed under zeroing a coordinate.
    pub fn standard(k_max: usize, seed: u64) -> Self {
        let values = [ratio(0, 1), ratio(1, 2), ratio(-1, 2), ratio(1, 1), ratio(-1, 1)];
        let mut pts: Vec<Coeffs> = (1..=k_max).flat_map(|k| patterns(k, &values)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..RANDOM_POINTS {
            pts.extend(zeroings(&random_point(&mut rng, k_max)));
        }
        Grid::new(pts)
    }

    /// A small deterministic grid of `n` points: the all-ones vectors, the
    /// alternating-sign vectors, then seeded random directions.
    pub fn sampled(k_max: usize, n: usize, seed: u64) -> Self {
        let mut pts: Vec<Coeffs> = Vec::new();
        for k in 1..=k_max {
            pts.push(vec![ratio(1, 1); k]);
            pts.push((0..k).map(|j| ratio(if j % 2 == 0 { 1 } else { -1 }, 1)).collect());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut set: BTreeSet<Coeffs> = pts.into_iter().collect();
        let mut guard = 0;
        while set.len() < n && guard < 100 * n {
            set.insert(random_point(&mut rng, k_max));
            guard += 1;
        }
        Grid { points: set.into_iter().take(n.max(1)).collect() }
    }

    pub fn points(&self) -> &[Coeffs] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn max_len(&self) -> usize {
        self.points.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn contains(&self, a: &Coeffs) -> bool {
        self.points.binary_search(a).is_ok()
    }

    /// Points of length at most `k_max`.
    pub fn truncated(&self, k_max: usize) -> Grid {
        Grid { points: self.points.iter().filter(|p| p.len() <= k_max).cloned().collect() }
    }
}

pub fn to_scalars(a: &[BigRational]) -> Vec<Scalar> {
    a.iter().cloned().map(Scalar::Exact).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_grid_is_closed_under_zeroing() {
        let g = Grid::standard(3, 7);
        assert!(g.len() >= 5 + 25 + 125);
        for a in g.points() {
            assert!(a.iter().all(|x| num_traits::Signed::abs(x) <= ratio(1, 1)));
            for i in 0..a.len() {
                let mut b = a.clone();
                b[i] = BigRational::zero();
                assert!(g.contains(&b), "{a:?}");
            }
        }
        assert_eq!(Grid::standard(3, 7), g);
    }

    #[test]
    fn sampled_grid_has_the_requested_size() {
        let g = Grid::sampled(4, 25, 1);
        assert_eq!(g.len(), 25);
        assert!(g.contains(&vec![ratio(1, 1); 4]));
        assert_eq!(g.max_len(), 4);
    }
}
