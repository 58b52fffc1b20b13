//! Reference implementations shared by the integration tests. They are
//! deliberately naive and share no code with the library.

#![allow(dead_code)]

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Every sequence `E_1 < … < E_k` of nonempty successive subsets of
/// `{1..=n}`, as bitmasks over bit `i − 1`.
pub fn successive_sequences(n: u32) -> Vec<Vec<u32>> {
    fn extend(from: u32, n: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if !current.is_empty() {
            out.push(current.clone());
        }
        // The next block is any nonempty subset of {from..=n}; the block after
        // it starts above its maximum.
        for hi in from..=n {
            let below = (1u32 << (hi - 1)) - (1u32 << (from - 1));
            let mut sub = below;
            loop {
                current.push(sub | 1 << (hi - 1));
                extend(hi + 1, n, current, out);
                current.pop();
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & below;
            }
        }
    }
    let mut out = Vec::new();
    extend(1, n, &mut Vec::new(), &mut out);
    out
}

/// Tsirelson norms of all 0/1 vectors supported in `{1..=n}`, indexed by the
/// support bitmask.
pub fn tsirelson_fixed_point(n: u32, theta: &BigRational) -> Vec<BigRational> {
    tsirelson_restrictions(&vec![BigRational::one(); n as usize], theta)
}

/// Tsirelson norms of every restriction `x|_S`, `S ⊆ {1..=x.len()}`, indexed
/// by the bitmask of `S`. Iterates `N ↦ max(‖·‖_∞, θ · max Σ N(E_i x))` over
/// admissible sequences (`k ≤ min E_1`) from the sup norm until nothing
/// changes.
pub fn tsirelson_restrictions(x: &[BigRational], theta: &BigRational) -> Vec<BigRational> {
    let n = x.len() as u32;
    let admissible: Vec<Vec<u32>> = successive_sequences(n)
        .into_iter()
        .filter(|e| e.len() as u32 <= e[0].trailing_zeros() + 1)
        .collect();
    let size = 1usize << n;
    let sup = |s: usize| {
        indices(s).iter().map(|&i| x[i as usize - 1].abs()).fold(BigRational::zero(), |a, b| if b > a { b } else { a })
    };
    let mut norm: Vec<BigRational> = (0..size).map(sup).collect();
    loop {
        let next: Vec<BigRational> = (0..size)
            .map(|s| {
                let mut best = sup(s);
                for e in &admissible {
                    let total: BigRational = e.iter().map(|&b| norm[s & b as usize].clone()).sum();
                    let v = theta * total;
                    if v > best {
                        best = v;
                    }
                }
                best
            })
            .collect();
        if next == norm {
            return norm;
        }
        norm = next;
    }
}

/// Support bitmask to the list of indices.
pub fn indices(mask: usize) -> Vec<u32> {
    (0..usize::BITS).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect()
}
