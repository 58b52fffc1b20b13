use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::famkit::{matching_paren, top_level_find};

use super::{ratio, Scalar, Vector};

/// Largest support the Tsirelson evaluator accepts.
pub const TSIRELSON_SUPPORT_CAP: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Exponent {
    Finite(BigRational),
    Infinity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Combine {
    Sum,
    Max,
}

/// Norms on finitely supported vectors with a 1-unconditional basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NormOracle {
    Lp(Exponent),
    C0,
    Schreier,
    Tsirelson(BigRational),
    DirectSum { combine: Combine, components: Vec<NormOracle> },
}

impl NormOracle {
    pub fn lp(p: BigRational) -> Result<Self> {
        if p < BigRational::one() {
            return Err(Error::Precondition(format!("ℓ^p needs p ≥ 1, got {p}")));
        }
        Ok(NormOracle::Lp(Exponent::Finite(p)))
    }

    pub fn lp_int(p: i64) -> Self {
        NormOracle::lp(ratio(p, 1)).expect("p ≥ 1")
    }

    pub fn linf() -> Self {
        NormOracle::Lp(Exponent::Infinity)
    }

    pub fn tsirelson(theta: BigRational) -> Result<Self> {
        if !(theta > BigRational::zero() && theta < BigRational::one()) {
            return Err(Error::Precondition(format!("θ must lie in (0, 1), got {theta}")));
        }
        Ok(NormOracle::Tsirelson(theta))
    }

    pub fn dsum(combine: Combine, components: Vec<NormOracle>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Precondition("a direct sum needs at least one component".into()));
        }
        Ok(NormOracle::DirectSum { combine, components })
    }

    /// Whether every value this oracle produces on exact input is exact.
    pub fn is_exact(&self) -> bool {
        match self {
            NormOracle::Lp(Exponent::Finite(p)) => p.is_one(),
            NormOracle::DirectSum { components, .. } => components.iter().all(NormOracle::is_exact),
            _ => true,
        }
    }

    pub fn components(&self) -> Option<&[NormOracle]> {
        match self {
            NormOracle::DirectSum { components, .. } => Some(components),
            _ => None,
        }
    }

    /// The `i`-th basis vector. For a direct sum this is the basis vector of
    /// component 1.
    pub fn unit(&self, i: u32) -> Vector {
        match self {
            NormOracle::DirectSum { components, .. } => components[0].unit(i).nest(0),
            _ => Vector::unit(i),
        }
    }

    /// Embeds `v` into component `c` (1-based) of a direct sum.
    pub fn inject(&self, c: usize, v: &Vector) -> Result<Vector> {
        let comps = self
            .components()
            .ok_or_else(|| Error::Unsupported(format!("{self} is not a direct sum")))?;
        if c == 0 || c > comps.len() {
            return Err(Error::BadComponent { index: c, len: comps.len() });
        }
        Ok(v.nest(c - 1))
    }

    /// `Σ_c inject(c, v_c)` with `v_c` the image of `v` in every component.
    pub fn diagonal(&self, v: &Vector) -> Vector {
        match self {
            NormOracle::DirectSum { components, .. } => components
                .iter()
                .enumerate()
                .fold(Vector::zero(), |acc, (c, comp)| acc.add(&comp.diagonal(v).nest(c))),
            _ => v.clone(),
        }
    }

    pub fn norm(&self, v: &Vector) -> Result<Scalar> {
        match self {
            NormOracle::DirectSum { combine, components } => {
                let parts = v.split_components(components.len())?;
                let mut acc = Scalar::zero();
                for (o, p) in components.iter().zip(&parts) {
                    let n = o.norm(p)?;
                    acc = match combine {
                        Combine::Sum => acc.add(&n),
                        Combine::Max => acc.max(n),
                    };
                }
                Ok(acc)
            }
            leaf => {
                let entries = v.leaf_entries().map_err(|_| {
                    Error::Precondition(format!("{leaf} is not a direct sum but the vector has components"))
                })?;
                let abs: Vec<(u32, Scalar)> = entries.into_iter().map(|(i, x)| (i, x.abs())).collect();
                leaf.leaf_norm(&abs)
            }
        }
    }

    /// Norm of `Σ a_j e_j` in the basis the oracle uses for model handles:
    /// the diagonal basis for a direct sum.
    pub fn norm_coefficients(&self, a: &[Scalar]) -> Result<Scalar> {
        self.norm(&self.diagonal(&Vector::from_coefficients(a)))
    }

    fn leaf_norm(&self, abs: &[(u32, Scalar)]) -> Result<Scalar> {
        Ok(match self {
            NormOracle::Lp(Exponent::Infinity) | NormOracle::C0 => sup(abs.iter().map(|(_, x)| x)),
            NormOracle::Lp(Exponent::Finite(p)) if p.is_one() => {
                abs.iter().fold(Scalar::zero(), |acc, (_, x)| acc.add(x))
            }
            NormOracle::Lp(Exponent::Finite(p)) => lp_float(abs, p.to_f64().expect("finite p")),
            NormOracle::Schreier => schreier(abs),
            NormOracle::Tsirelson(theta) => tsirelson(abs, theta)?,
            NormOracle::DirectSum { .. } => unreachable!("handled by norm"),
        })
    }
}

fn sup<'a>(xs: impl Iterator<Item = &'a Scalar>) -> Scalar {
    xs.fold(Scalar::zero(), |acc, x| acc.max(x.clone()))
}

fn lp_float(abs: &[(u32, Scalar)], p: f64) -> Scalar {
    let m = abs.iter().map(|(_, x)| x.to_f64()).fold(0.0, f64::max);
    if m == 0.0 {
        return Scalar::zero();
    }
    let s: f64 = abs.iter().map(|(_, x)| (x.to_f64() / m).powf(p)).sum();
    Scalar::Approx(m * s.powf(1.0 / p))
}

/// `max_m` of the sum of the `m` largest `|v_i|` with `i ≥ m`. The maximum
/// is attained with `m` in the support.
fn schreier(abs: &[(u32, Scalar)]) -> Scalar {
    // Suffixes are scanned right to left. Fenwick trees over the descending
    // rank of each value hold the count and sum of the suffix, so the sum of
    // its `m` largest values is a prefix query.
    let n = abs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| abs[b].1.partial_cmp(&abs[a].1).unwrap_or(std::cmp::Ordering::Equal));
    let mut rank = vec![0; n];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r + 1;
    }
    let mut count = vec![0usize; n + 1];
    let mut sum = vec![Scalar::zero(); n + 1];
    let mut best = Scalar::zero();
    for k in (0..n).rev() {
        let mut i = rank[k];
        while i <= n {
            count[i] += 1;
            sum[i] = sum[i].add(&abs[k].1);
            i += i & i.wrapping_neg();
        }
        let take = (abs[k].0 as usize).min(n - k);
        // Descend to the shortest rank prefix holding `take` suffix values.
        let (mut pos, mut left, mut acc) = (0usize, take, Scalar::zero());
        let mut step = n.next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next <= n && count[next] <= left {
                pos = next;
                left -= count[next];
                acc = acc.add(&sum[next]);
            }
            step >>= 1;
        }
        best = best.max(acc);
    }
    best
}

/// Exact Tsirelson norm by dynamic programming over support intervals.
///
/// `N(i..=j) = max(‖·‖_∞, θ·max_p P(p, j, idx(p)))`, where `P(p, j, m)` is
/// the best sum over partitions of positions `p..=j` into at most `m`
/// consecutive blocks. The one-block partition of the whole interval is
/// excluded; it cannot raise the least fixed point since `θ < 1`.
fn tsirelson(abs: &[(u32, Scalar)], theta: &BigRational) -> Result<Scalar> {
    let n = abs.len();
    if n > TSIRELSON_SUPPORT_CAP {
        return Err(Error::SupportTooLarge { size: n, cap: TSIRELSON_SUPPORT_CAP });
    }
    if n == 0 {
        return Ok(Scalar::zero());
    }
    let theta = Scalar::Exact(theta.clone());
    let mut norm: Vec<Vec<Option<Scalar>>> = vec![vec![None; n]; n];
    let mut parts: HashMap<(usize, usize, usize), Option<Scalar>> = HashMap::new();

    fn best_partition(
        p: usize,
        j: usize,
        m: usize,
        norm: &[Vec<Option<Scalar>>],
        memo: &mut HashMap<(usize, usize, usize), Option<Scalar>>,
    ) -> Option<Scalar> {
        if let Some(v) = memo.get(&(p, j, m)) {
            return v.clone();
        }
        let mut best: Option<Scalar> = None;
        for q in p..=j {
            let head = norm[p][q].clone().expect("shorter interval computed");
            let total = if q == j {
                Some(head)
            } else if m > 1 {
                best_partition(q + 1, j, m - 1, norm, memo).map(|rest| head.add(&rest))
            } else {
                None
            };
            if let Some(t) = total {
                best = Some(match best {
                    Some(b) => b.max(t),
                    None => t,
                });
            }
        }
        memo.insert((p, j, m), best.clone());
        best
    }

    for len in 1..=n {
        for i in 0..=n - len {
            let j = i + len - 1;
            let mut value = sup(abs[i..=j].iter().map(|(_, x)| x));
            for p in i..=j {
                let m = (abs[p].0 as usize).min(j - p + 1);
                let candidate = if p > i {
                    best_partition(p, j, m, &norm, &mut parts)
                } else if m >= 2 {
                    // First block must stop short of `j`.
                    let mut best: Option<Scalar> = None;
                    for q in i..j {
                        let head = norm[i][q].clone().expect("shorter interval computed");
                        if let Some(rest) = best_partition(q + 1, j, m - 1, &norm, &mut parts) {
                            let t = head.add(&rest);
                            best = Some(match best {
                                Some(b) => b.max(t),
                                None => t,
                            });
                        }
                    }
                    best
                } else {
                    None
                };
                if let Some(c) = candidate {
                    value = value.max(theta.mul(&c));
                }
            }
            norm[i][j] = Some(value);
        }
    }
    Ok(norm[0][n - 1].clone().expect("full interval computed"))
}

fn split_top_level(s: &str, ch: char) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = 0;
    while let Some(k) = top_level_find(&s[start..], ch) {
        out.push((start, &s[start..start + k]));
        start += k + ch.len_utf8();
    }
    out.push((start, &s[start..]));
    out
}

fn parse_at(s: &str, offset: usize) -> Result<NormOracle> {
    let lead = s.len() - s.trim_start().len();
    let (s, offset) = (s.trim(), offset + lead);
    let err = |pos: usize, msg: String| Error::parse(offset + pos, msg);
    match s {
        "linf" | "lp:inf" => return Ok(NormOracle::linf()),
        "c0" => return Ok(NormOracle::C0),
        "schreier" => return Ok(NormOracle::Schreier),
        "tsirelson" => return NormOracle::tsirelson(ratio(1, 2)),
        _ => {}
    }
    if let Some(p) = s.strip_prefix("lp:") {
        let p = Scalar::parse_rational(p).map_err(|_| err(3, format!("bad exponent `{p}`")))?;
        return NormOracle::lp(p).map_err(|e| err(3, e.to_string()));
    }
    if let Some(t) = s.strip_prefix("tsirelson:") {
        let t = Scalar::parse_rational(t).map_err(|_| err(10, format!("bad θ `{t}`")))?;
        return NormOracle::tsirelson(t).map_err(|e| err(10, e.to_string()));
    }
    if s.starts_with("dsum(") {
        let close = matching_paren(s, 4).ok_or_else(|| err(4, "unbalanced parenthesis".into()))?;
        if close != s.len() - 1 {
            return Err(err(close + 1, "trailing input after `)`".into()));
        }
        let inner = &s[5..close];
        let semi = top_level_find(inner, ';').ok_or_else(|| err(5, "expected `sum;` or `max;`".into()))?;
        let combine = match inner[..semi].trim() {
            "sum" => Combine::Sum,
            "max" => Combine::Max,
            other => return Err(err(5, format!("unknown combinator `{other}`"))),
        };
        let body = &inner[semi + 1..];
        let mut comps = Vec::new();
        for (pos, part) in split_top_level(body, ',') {
            comps.push(parse_at(part, offset + 5 + semi + 1 + pos)?);
        }
        return NormOracle::dsum(combine, comps).map_err(|e| err(5, e.to_string()));
    }
    Err(err(0, format!("unknown oracle `{s}`")))
}

impl FromStr for NormOracle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_at(s, 0)
    }
}

impl fmt::Display for NormOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormOracle::Lp(Exponent::Infinity) => write!(f, "linf"),
            NormOracle::Lp(Exponent::Finite(p)) => write!(f, "lp:{p}"),
            NormOracle::C0 => write!(f, "c0"),
            NormOracle::Schreier => write!(f, "schreier"),
            NormOracle::Tsirelson(t) => write!(f, "tsirelson:{t}"),
            NormOracle::DirectSum { combine, components } => {
                let c = match combine {
                    Combine::Sum => "sum",
                    Combine::Max => "max",
                };
                write!(f, "dsum({c}; ")?;
                for (i, o) in components.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{o}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl Serialize for NormOracle {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for NormOracle {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ones(ix: impl IntoIterator<Item = u32>) -> Vector {
        Vector::ones(ix)
    }

    #[test]
    fn lp_examples() {
        let n = NormOracle::lp_int(2).norm(&ones([1, 2])).unwrap();
        assert!((n.to_f64() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(NormOracle::lp_int(1).norm(&ones([1, 2, 5])).unwrap(), Scalar::int(3));
        assert_eq!(NormOracle::C0.norm(&ones([1, 2, 5])).unwrap(), Scalar::one());
        assert!(NormOracle::lp(ratio(1, 2)).is_err());
    }

    #[test]
    fn schreier_example() {
        assert_eq!(NormOracle::Schreier.norm(&ones([1, 2, 3])).unwrap(), Scalar::int(2));
        assert_eq!(NormOracle::Schreier.norm(&ones([2, 3])).unwrap(), Scalar::int(2));
        assert_eq!(NormOracle::Schreier.norm(&ones([3, 4, 5, 6])).unwrap(), Scalar::int(3));
    }

    #[test]
    fn tsirelson_example() {
        let t = NormOracle::tsirelson(ratio(1, 2)).unwrap();
        assert_eq!(t.norm(&ones(3..=6)).unwrap(), Scalar::frac(3, 2));
        assert_eq!(t.norm(&ones([5, 6])).unwrap(), Scalar::one());
        assert!(matches!(t.norm(&ones(1..=13)), Err(Error::SupportTooLarge { size: 13, cap: 12 })));
    }

    #[test]
    fn units_have_norm_one() {
        for o in ["lp:1", "lp:2", "lp:3/2", "linf", "c0", "schreier", "tsirelson:1/2"] {
            let o: NormOracle = o.parse().unwrap();
            for i in 1..6 {
                assert_eq!(o.norm(&o.unit(i)).unwrap(), Scalar::one(), "{o} e_{i}");
            }
        }
    }

    #[test]
    fn injection_examples() {
        let d: NormOracle = "dsum(sum; lp:1, lp:2)".parse().unwrap();
        let v = d.inject(2, &Vector::unit(5)).unwrap();
        assert_eq!(d.norm(&v).unwrap(), Scalar::one());
        let w = d.inject(1, &Vector::unit(5)).unwrap();
        assert_eq!(v.entries().count() + w.entries().count(), v.add(&w).support_len());
        assert!(matches!(d.inject(3, &Vector::unit(1)), Err(Error::BadComponent { index: 3, len: 2 })));
        assert!(NormOracle::C0.inject(1, &Vector::unit(1)).is_err());
    }

    #[test]
    fn direct_sum_diagonal() {
        let d: NormOracle = "dsum(max; lp:1, c0)".parse().unwrap();
        let a = [Scalar::one(), Scalar::one(), Scalar::one()];
        assert_eq!(d.norm_coefficients(&a).unwrap(), Scalar::int(3));
    }

    #[test]
    fn syntax_round_trip() {
        for s in ["lp:2", "lp:3/2", "linf", "c0", "schreier", "tsirelson:1/2", "dsum(sum; lp:1, lp:2)",
            "dsum(max; c0, dsum(sum; lp:1, schreier))"]
        {
            assert_eq!(s.parse::<NormOracle>().unwrap().to_string(), s);
        }
        assert_eq!("lp:inf".parse::<NormOracle>().unwrap(), NormOracle::linf());
        let Err(Error::Parse { pos, .. }) = "dsum(sum; lp:1, bogus)".parse::<NormOracle>() else { panic!() };
        assert_eq!(pos, 16);
    }
}
