//! The domination pre-order on spreading-model handles.
//!
//! `lower ⪯_C upper` means `‖Σ a_i e_i^lower‖ ≤ C ‖Σ a_i e_i^upper‖` for all
//! coefficient vectors. Verdicts are three-valued: a pair is only declared
//! dominated or not dominated when the tested points support it.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::smodel::{to_scalars, Coeffs, Grid, SMEstimate};
use crate::spaces::{ratio, Combine, Exponent, NormOracle, Scalar, Vector, TSIRELSON_SUPPORT_CAP};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum HandleKind {
    /// Evaluated exactly in the oracle's diagonal basis.
    Analytic { oracle: NormOracle },
    /// Per-point intervals from an extraction.
    Empirical { estimate: Box<SMEstimate> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SMHandle {
    pub name: String,
    pub kind: HandleKind,
}

/// Families of leaf test vectors, indexed by a size parameter `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Profile {
    /// `e_1 + … + e_n`.
    OnesFromOne,
    /// `e_n + … + e_{2n−1}`.
    OnesFromSize,
    /// `Σ_{k<n} 2^{−k}·(e_{2^k} + … + e_{2^{k+1}−1})`, each level of ℓ¹ mass 1.
    DyadicAverages,
}

impl Profile {
    pub fn vector(self, n: u32) -> Vector {
        match self {
            Profile::OnesFromOne => Vector::ones(1..=n),
            Profile::OnesFromSize => Vector::ones(n..2 * n),
            Profile::DyadicAverages => Vector::from_leaf_entries(
                (0..n).flat_map(|k| (1u32 << k..1u32 << (k + 1)).map(move |i| (i, Scalar::frac(1, 1i64 << k)))),
            ),
        }
    }

    fn describe(self, n: u32) -> String {
        match self {
            Profile::OnesFromOne => format!("e_1 + … + e_{n}"),
            Profile::OnesFromSize => format!("e_{n} + … + e_{}", 2 * n - 1),
            Profile::DyadicAverages => format!("dyadic averages over {n} levels"),
        }
    }
}

/// A test vector: coefficients on `1..=k`, or a member of a [`Profile`].
#[derive(Clone, Debug, PartialEq)]
pub enum TestPoint {
    Coeffs(Coeffs),
    Profile { profile: Profile, n: u32, vector: Vector },
}

impl TestPoint {
    pub fn profile(profile: Profile, n: u32) -> Self {
        TestPoint::Profile { profile, n, vector: profile.vector(n) }
    }

    pub fn describe(&self) -> String {
        match self {
            TestPoint::Coeffs(a) => {
                let v: Vec<String> = a.iter().map(ToString::to_string).collect();
                format!("({})", v.join(", "))
            }
            TestPoint::Profile { profile, n, .. } => profile.describe(*n),
        }
    }

    /// The profile and size this point belongs to. All-ones coefficient
    /// vectors count as the first ones profile.
    fn profile_key(&self) -> Option<(Profile, u32)> {
        match self {
            TestPoint::Coeffs(a) if !a.is_empty() && a.iter().all(One::is_one) => {
                Some((Profile::OnesFromOne, a.len() as u32))
            }
            TestPoint::Profile { profile, n, .. } => Some((*profile, *n)),
            _ => None,
        }
    }

    /// Length of an all-ones witness.
    fn ones_len(&self) -> Option<u64> {
        match self.profile_key() {
            Some((Profile::OnesFromOne | Profile::OnesFromSize, n)) => Some(n as u64),
            _ => None,
        }
    }
}

impl SMHandle {
    pub fn analytic(oracle: NormOracle) -> Self {
        SMHandle { name: oracle.to_string(), kind: HandleKind::Analytic { oracle } }
    }

    pub fn empirical(name: impl Into<String>, estimate: SMEstimate) -> Self {
        SMHandle { name: name.into(), kind: HandleKind::Empirical { estimate: Box::new(estimate) } }
    }

    /// An oracle in text syntax, or `@path` naming a saved estimate.
    pub fn parse_with(s: &str, load: &dyn Fn(&str) -> Result<String>) -> Result<Self> {
        let s = s.trim();
        match s.strip_prefix('@') {
            Some(path) => {
                let text = load(path)?;
                let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::parse(1, e.to_string()))?;
                let est = v.get("estimate").cloned().unwrap_or(v);
                let est: SMEstimate = serde_json::from_value(est).map_err(|e| Error::parse(1, e.to_string()))?;
                Ok(SMHandle::empirical(s, est))
            }
            None => Ok(SMHandle::analytic(s.parse()?)),
        }
    }

    /// `[lo, hi]` at the point, or `None` when the handle cannot evaluate it.
    pub fn evaluate(&self, p: &TestPoint) -> Result<Option<(Scalar, Scalar)>> {
        match (&self.kind, p) {
            (HandleKind::Analytic { oracle }, TestPoint::Coeffs(a)) => {
                let v = oracle.norm_coefficients(&to_scalars(a))?;
                Ok(Some((v.clone(), v)))
            }
            (HandleKind::Analytic { oracle }, TestPoint::Profile { vector, .. }) => {
                if needs_small_support(oracle) && vector.support_len() > TSIRELSON_SUPPORT_CAP {
                    return Ok(None);
                }
                let v = oracle.norm(&oracle.diagonal(vector))?;
                Ok(Some((v.clone(), v)))
            }
            (HandleKind::Empirical { estimate }, TestPoint::Coeffs(a)) => {
                Ok(estimate.interval(a).map(|(lo, hi)| (lo.clone(), hi.clone())))
            }
            (HandleKind::Empirical { .. }, TestPoint::Profile { .. }) => Ok(None),
        }
    }

    pub fn is_degenerate(&self) -> bool {
        match &self.kind {
            HandleKind::Analytic { .. } => false,
            HandleKind::Empirical { estimate } => estimate.is_degenerate(),
        }
    }

    /// `p` for an ℓ^p or c₀ handle (`None` standing for ∞).
    /// `e` with `‖e_n + … + e_{2n−1}‖ = n^e` exactly.
    fn block_exponent(&self) -> Option<BigRational> {
        match &self.kind {
            HandleKind::Analytic { oracle: NormOracle::Lp(Exponent::Finite(p)) } => Some(p.recip()),
            HandleKind::Analytic { oracle: NormOracle::Lp(Exponent::Infinity) | NormOracle::C0 } => {
                Some(BigRational::zero())
            }
            // The whole block is a Schreier set.
            HandleKind::Analytic { oracle: NormOracle::Schreier } => Some(BigRational::one()),
            _ => None,
        }
    }

    fn lp_exponent(&self) -> Option<Option<BigRational>> {
        match &self.kind {
            HandleKind::Analytic { oracle: NormOracle::Lp(Exponent::Finite(p)) } => Some(Some(p.clone())),
            HandleKind::Analytic { oracle: NormOracle::Lp(Exponent::Infinity) | NormOracle::C0 } => Some(None),
            _ => None,
        }
    }
}

/// Whether `lower` is a component, at any depth, of the direct sum `upper`.
/// A diagonal vector's direct-sum norm is at least each component's norm.
fn is_summand(lower: &SMHandle, upper: &SMHandle) -> bool {
    fn within(l: &NormOracle, u: &NormOracle) -> bool {
        match u {
            NormOracle::DirectSum { components, .. } => components.iter().any(|c| c == l || within(l, c)),
            _ => false,
        }
    }
    match (&lower.kind, &upper.kind) {
        (HandleKind::Analytic { oracle: l }, HandleKind::Analytic { oracle: u }) => within(l, u),
        _ => false,
    }
}

fn needs_small_support(o: &NormOracle) -> bool {
    match o {
        NormOracle::Tsirelson(_) => true,
        NormOracle::DirectSum { components, .. } => components.iter().any(needs_small_support),
        _ => false,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub point: String,
    /// Length of the all-ones witness, when it is one.
    pub n: Option<u64>,
    /// Proven lower bound on `lower / upper` at the point.
    pub ratio: Scalar,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    /// Largest certain ratio `lower.lo / upper.hi`.
    pub ratio_lo: Scalar,
    /// Largest possible ratio `lower.hi / upper.lo`.
    pub ratio_hi: Scalar,
    /// Some profile ratio rose by more than [`GROWTH_FACTOR`] at its largest
    /// tested size.
    pub growing: bool,
    pub points: usize,
    pub reason: String,
}

/// What a [`DominationVerdict::DominatedWith`] rests on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evidence {
    /// Exact for every vector: equal handles, a direct-sum component, or the
    /// ℓ^p/c₀ formula.
    ClosedForm,
    /// Exact for every vector, from ℓ¹ and c₀ envelope bounds.
    Envelope,
    /// Holds on every tested point only.
    Scan,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum DominationVerdict {
    DominatedWith {
        #[serde(with = "crate::spaces::rational_str")]
        c: BigRational,
        evidence: Evidence,
    },
    NotDominated { witness: Witness },
    Inconclusive { gap: GapReport },
}

impl DominationVerdict {
    pub fn is_dominated(&self) -> bool {
        matches!(self, DominationVerdict::DominatedWith { .. })
    }

    pub fn is_not_dominated(&self) -> bool {
        matches!(self, DominationVerdict::NotDominated { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominationParams {
    /// Largest all-ones witness length for analytic handles.
    pub n_max: u32,
    pub grid: Grid,
    /// The C-ladder is `1, 2, 4, …, 2^c_scan_log2`.
    pub c_scan_log2: u32,
    /// Absolute tolerance added to every inequality.
    #[serde(with = "crate::spaces::rational_str")]
    pub tol: BigRational,
}

impl DominationParams {
    pub fn new(grid: Grid) -> Self {
        DominationParams { n_max: 4096, grid, c_scan_log2: 10, tol: BigRational::zero() }
    }

    fn c_max(&self) -> u64 {
        1u64 << self.c_scan_log2
    }
}

/// Smallest `n` with `n^e > c` for rational `e > 0`, decided exactly as
/// `n^num > c^den`.
/// `ℓ¹` against Schreier on `D_K = Σ_{k<K} 2^{-k}·1_{[2^k, 2^{k+1})}`:
/// `‖D_K‖_1 = K`, while a Schreier set with `min E ∈ [2^j, 2^{j+1})` has
/// `|E| ≤ min E < 2^{j+1}` entries of size at most `2^{-j}`, so `‖D_K‖_S < 2`.
fn dyadic_witness(lower: &SMHandle, upper: &SMHandle, c: u64) -> Option<Witness> {
    let is = |h: &SMHandle, o: &NormOracle| matches!(&h.kind, HandleKind::Analytic { oracle } if oracle == o);
    if !(is(lower, &NormOracle::Lp(Exponent::Finite(BigRational::one()))) && is(upper, &NormOracle::Schreier)) {
        return None;
    }
    let levels = 2 * c + 1;
    Some(Witness {
        point: format!("dyadic averages over {levels} levels"),
        n: None,
        ratio: Scalar::Exact(BigRational::new(levels.into(), 2.into())),
    })
}

fn ones_witness_length(e: &BigRational, c: u64) -> u64 {
    let (num, den) = (e.numer().to_u32().expect("small exponent"), e.denom().to_u32().expect("small exponent"));
    let exceeds = |n: u64| num_bigint::BigInt::from(n).pow(num) > num_bigint::BigInt::from(c).pow(den);
    let guess = (c as f64).powf(1.0 / e.to_f64().expect("finite")).min(u64::MAX as f64 / 2.0) as u64;
    let mut n = guess.max(1);
    while n > 1 && exceeds(n - 1) {
        n -= 1;
    }
    while !exceeds(n) {
        n += 1;
    }
    n
}

/// `‖1_n‖_p = n^{1/p}`: the ratio `‖1_n‖_p / ‖1_n‖_q = n^{1/p − 1/q}`.
fn lp_closed_form(p: &Option<BigRational>, q: &Option<BigRational>, params: &DominationParams) -> DominationVerdict {
    let inv = |x: &Option<BigRational>| x.as_ref().map_or_else(BigRational::zero, |p| p.recip());
    let e = inv(p) - inv(q);
    if e <= BigRational::zero() {
        return DominationVerdict::DominatedWith { c: BigRational::one(), evidence: Evidence::ClosedForm };
    }
    let n = ones_witness_length(&e, params.c_max());
    let ratio = Scalar::Approx((n as f64).powf(e.to_f64().expect("finite")));
    DominationVerdict::NotDominated {
        witness: Witness { point: format!("e_1 + … + e_{n}"), n: Some(n), ratio },
    }
}

fn test_points(params: &DominationParams, analytic: bool) -> Vec<TestPoint> {
    let mut pts: Vec<TestPoint> = params.grid.points().iter().cloned().map(TestPoint::Coeffs).collect();
    if analytic {
        let mut n = 1u32;
        while n <= params.n_max {
            pts.push(TestPoint::profile(Profile::OnesFromOne, n));
            pts.push(TestPoint::profile(Profile::OnesFromSize, n));
            n = n.saturating_mul(2);
        }
        // Level k occupies [2^k, 2^{k+1}), so K levels have support 2^K − 1.
        let levels = (1..32).take_while(|&k| (1u64 << k) - 1 <= params.n_max as u64);
        pts.extend(levels.map(|k| TestPoint::profile(Profile::DyadicAverages, k)));
    }
    pts
}

/// Bounds every analytic handle satisfies against ℓ¹ and ℓ^∞ in its
/// diagonal basis. All oracles are 1-unconditional, so
/// `unit·‖a‖_∞ ≤ ‖a‖ ≤ unit·‖a‖_1`.
#[derive(Clone, Debug, PartialEq)]
struct Envelope {
    /// Norm of each diagonal basis vector.
    unit: BigRational,
    /// `λ` with `λ·‖a‖_1 ≤ ‖a‖`, when one is known.
    l1_lower: Option<BigRational>,
    /// `γ` with `‖a‖ ≤ γ·‖a‖_∞`, when one is known.
    c0_upper: Option<BigRational>,
    /// `σ` with `σ·‖a‖_S ≤ ‖a‖` for the Schreier norm, when one is known.
    schreier_lower: Option<BigRational>,
    /// `κ` with `‖a‖ ≤ κ·‖a‖_S`, when one is known.
    schreier_upper: Option<BigRational>,
}

/// A rational `κ ≥ (2ζ(p))^{1/p}`, so `‖a‖_p ≤ κ·‖a‖_S` for `p > 1`.
///
/// Among the `2k − 1` largest entries at least `k` sit at indices `≥ k`, and
/// those form a Schreier set, so the decreasing rearrangement obeys
/// `a*_{2k−1}, a*_{2k} ≤ ‖a‖_S / k`. Summing `a*_i^p` gives `2ζ(p)·‖a‖_S^p`.
/// `ζ(p)` is bounded by a partial sum plus its integral tail, in floating
/// point with a relative margin far above the rounding error.
fn lp_schreier_constant(p: &BigRational) -> BigRational {
    const TERMS: u32 = 1000;
    let pf = p.to_f64().expect("finite");
    let head: f64 = (1..TERMS).map(|k| (k as f64).powf(-pf)).sum();
    let n = TERMS as f64;
    let zeta = head + n.powf(-pf) + n.powf(1.0 - pf) / (pf - 1.0);
    let target = 2.0 * zeta * (1.0 + 1e-9);
    // Smallest m/16 with (m/16)^p ≥ target.
    let m = (16..).find(|&m| (m as f64 / 16.0).powf(pf) >= target).expect("finite bound");
    ratio(m, 16)
}

fn envelope(o: &NormOracle) -> Envelope {
    let one = BigRational::one;
    match o {
        NormOracle::Lp(Exponent::Finite(p)) if p.is_one() => Envelope {
            unit: one(),
            l1_lower: Some(one()),
            c0_upper: None,
            schreier_lower: Some(one()),
            schreier_upper: None,
        },
        NormOracle::Lp(Exponent::Finite(p)) => Envelope {
            unit: one(),
            l1_lower: None,
            c0_upper: None,
            schreier_lower: None,
            schreier_upper: Some(lp_schreier_constant(p)),
        },
        NormOracle::Lp(Exponent::Infinity) | NormOracle::C0 => Envelope {
            unit: one(),
            l1_lower: None,
            c0_upper: Some(one()),
            schreier_lower: None,
            schreier_upper: Some(one()),
        },
        NormOracle::Schreier => Envelope {
            unit: one(),
            l1_lower: None,
            c0_upper: None,
            schreier_lower: Some(one()),
            schreier_upper: Some(one()),
        },
        // Singletons of a Schreier set are admissible blocks.
        NormOracle::Tsirelson(theta) => Envelope {
            unit: one(),
            l1_lower: None,
            c0_upper: None,
            schreier_lower: Some(theta.clone()),
            schreier_upper: None,
        },
        NormOracle::DirectSum { combine, components } => {
            let parts: Vec<Envelope> = components.iter().map(envelope).collect();
            let fold = |xs: Vec<BigRational>| match combine {
                Combine::Sum => xs.into_iter().sum(),
                Combine::Max => xs.into_iter().max().expect("nonempty"),
            };
            let unit = fold(parts.iter().map(|e| e.unit.clone()).collect());
            // A lower bound needs one component, an upper bound all of them.
            let lower = |f: fn(&Envelope) -> &Option<BigRational>| {
                let xs: Vec<BigRational> = parts.iter().filter_map(|e| f(e).clone()).collect();
                (!xs.is_empty()).then(|| fold(xs))
            };
            let upper = |f: fn(&Envelope) -> &Option<BigRational>| {
                parts.iter().map(|e| f(e).clone()).collect::<Option<Vec<_>>>().map(fold)
            };
            Envelope {
                unit,
                l1_lower: lower(|e| &e.l1_lower),
                c0_upper: upper(|e| &e.c0_upper),
                schreier_lower: lower(|e| &e.schreier_lower),
                schreier_upper: upper(|e| &e.schreier_upper),
            }
        }
    }
}

/// A constant `C` with `lower ≤ C·upper` that follows from the envelopes.
fn envelope_constant(lower: &SMHandle, upper: &SMHandle) -> Option<BigRational> {
    let (HandleKind::Analytic { oracle: lo }, HandleKind::Analytic { oracle: up }) = (&lower.kind, &upper.kind) else {
        return None;
    };
    let (l, u) = (envelope(lo), envelope(up));
    let via_l1 = u.l1_lower.map(|lam| &l.unit / lam);
    let via_c0 = l.c0_upper.map(|gamma| gamma / &u.unit);
    let via_schreier = l.schreier_upper.zip(u.schreier_lower).map(|(kappa, sigma)| kappa / sigma);
    [via_l1, via_c0, via_schreier].into_iter().flatten().min()
}

/// The smallest rung `2^k ≥ c` of the ladder, if there is one.
fn ladder_rung(c: &BigRational, params: &DominationParams) -> Option<BigRational> {
    (0..=params.c_scan_log2).map(|k| BigRational::from_integer((1i64 << k).into())).find(|r| r >= c)
}

/// A ratio profile whose last step rises by more than this factor is treated
/// as unbounded.
pub const GROWTH_FACTOR: f64 = 1.0 + 1.0 / 64.0;

/// Decides whether `upper` dominates `lower`: in closed form for ℓ^p and c₀
/// pairs, otherwise by scanning test points, with envelope bounds settling
/// pairs the scan leaves open.
///
/// When both a scan constant and an envelope rung exist the smaller one is
/// reported. Domination itself is then proven, but a scan constant below the
/// rung is only known to hold on the tested points, so the evidence stays
/// [`Evidence::Scan`].
pub fn dominates(lower: &SMHandle, upper: &SMHandle, params: &DominationParams) -> Result<DominationVerdict> {
    let scanned = scan(lower, upper, params)?;
    let Some(rung) = envelope_constant(lower, upper).and_then(|c| ladder_rung(&c, params)) else {
        return Ok(scanned);
    };
    let envelope = DominationVerdict::DominatedWith { c: rung.clone(), evidence: Evidence::Envelope };
    Ok(match scanned {
        DominationVerdict::DominatedWith { c, evidence: Evidence::Scan } if c < rung => {
            DominationVerdict::DominatedWith { c, evidence: Evidence::Scan }
        }
        v @ DominationVerdict::DominatedWith { evidence: Evidence::ClosedForm, .. } => v,
        _ => envelope,
    })
}

fn scan(lower: &SMHandle, upper: &SMHandle, params: &DominationParams) -> Result<DominationVerdict> {
    for h in [lower, upper] {
        if h.is_degenerate() {
            return Err(Error::Degenerate(h.name.clone()));
        }
    }
    if lower == upper || is_summand(lower, upper) {
        return Ok(DominationVerdict::DominatedWith { c: BigRational::one(), evidence: Evidence::ClosedForm });
    }
    if let (Some(p), Some(q)) = (lower.lp_exponent(), upper.lp_exponent()) {
        return Ok(lp_closed_form(&p, &q, params));
    }
    if let (Some(el), Some(eu)) = (lower.block_exponent(), upper.block_exponent()) {
        if el > eu {
            let n = ones_witness_length(&(&el - &eu), params.c_max());
            let ratio = Scalar::Approx((n as f64).powf((el - eu).to_f64().expect("finite")));
            let point = format!("e_{n} + … + e_{}", 2 * n - 1);
            return Ok(DominationVerdict::NotDominated { witness: Witness { point, n: Some(n), ratio } });
        }
    }
    if let Some(w) = dyadic_witness(lower, upper, params.c_max()) {
        return Ok(DominationVerdict::NotDominated { witness: w });
    }
    let analytic = matches!(lower.kind, HandleKind::Analytic { .. }) && matches!(upper.kind, HandleKind::Analytic { .. });
    let tol = Scalar::Exact(params.tol.clone());
    let c_max = Scalar::int(params.c_max() as i64);
    let mut ratio_lo = Scalar::zero();
    let mut ratio_hi = Scalar::zero();
    let mut best_witness: Option<(TestPoint, Scalar)> = None;
    // Upper ratio bound per profile point.
    let mut profiles: Vec<(Profile, u32, Scalar)> = Vec::new();
    let mut points = 0;
    for p in test_points(params, analytic) {
        let (Some((l_lo, l_hi)), Some((u_lo, u_hi))) = (lower.evaluate(&p)?, upper.evaluate(&p)?) else {
            continue;
        };
        points += 1;
        if l_hi.le_within(&Scalar::zero(), &tol) {
            continue;
        }
        if u_hi.is_zero() && !l_lo.le_within(&Scalar::zero(), &tol) {
            return Ok(DominationVerdict::NotDominated {
                witness: Witness { point: p.describe(), n: p.ones_len(), ratio: Scalar::Approx(f64::INFINITY) },
            });
        }
        let lo = l_lo.sub(&tol).max(Scalar::zero()).div(&u_hi).unwrap_or_else(Scalar::zero);
        let hi = match u_lo.div(&Scalar::one()).filter(|x| !x.is_zero()) {
            Some(den) => l_hi.add(&tol).div(&den).expect("nonzero"),
            None => Scalar::Approx(f64::INFINITY),
        };
        if best_witness.as_ref().map_or(true, |(_, r)| lo > *r) {
            best_witness = Some((p.clone(), lo.clone()));
        }
        ratio_lo = ratio_lo.max(lo);
        ratio_hi = ratio_hi.max(hi.clone());
        if let Some((profile, n)) = p.profile_key() {
            profiles.push((profile, n, hi));
        }
    }
    if let Some((p, r)) = best_witness.clone() {
        if !r.le_within(&c_max, &Scalar::zero()) {
            return Ok(DominationVerdict::NotDominated {
                witness: Witness { point: p.describe(), n: p.ones_len(), ratio: r },
            });
        }
    }
    profiles.sort_by_key(|x| (x.0, x.1));
    profiles.dedup_by_key(|x| (x.0, x.1));
    let growing = [Profile::OnesFromOne, Profile::OnesFromSize, Profile::DyadicAverages].iter().any(|&profile| {
        let prof: Vec<&(Profile, u32, Scalar)> = profiles.iter().filter(|x| x.0 == profile).collect();
        match prof.as_slice() {
            [.., a, b] => b.2.to_f64() > a.2.to_f64() * GROWTH_FACTOR,
            _ => false,
        }
    });
    let gap = |reason: &str| GapReport {
        ratio_lo: ratio_lo.clone(),
        ratio_hi: ratio_hi.clone(),
        growing,
        points,
        reason: reason.to_string(),
    };
    if points == 0 {
        return Ok(DominationVerdict::Inconclusive { gap: gap("no point could be evaluated by both handles") });
    }
    if growing {
        return Ok(DominationVerdict::Inconclusive { gap: gap("a test profile ratio is still growing") });
    }
    for k in 0..=params.c_scan_log2 {
        let c = Scalar::int(1i64 << k);
        if ratio_hi.le_within(&c, &Scalar::zero()) {
            let c = BigRational::from_integer((1i64 << k).into());
            return Ok(DominationVerdict::DominatedWith { c, evidence: Evidence::Scan });
        }
    }
    Ok(DominationVerdict::Inconclusive { gap: gap("the ratio bounds straddle the C-ladder") })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `a ≺ b`.
    Less,
    /// `b ≺ a`.
    Greater,
    Equivalent,
    Incomparable,
    Inconclusive,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Less => "≺",
            Relation::Greater => "≻",
            Relation::Equivalent => "∼",
            Relation::Incomparable => "∥",
            Relation::Inconclusive => "?",
        }
    }

    pub fn flip(self) -> Relation {
        match self {
            Relation::Less => Relation::Greater,
            Relation::Greater => Relation::Less,
            r => r,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairClassification {
    pub relation: Relation,
    /// `b` dominates `a`.
    pub a_below_b: DominationVerdict,
    /// `a` dominates `b`.
    pub b_below_a: DominationVerdict,
}

pub fn classify_pair(a: &SMHandle, b: &SMHandle, params: &DominationParams) -> Result<PairClassification> {
    let ab = dominates(a, b, params)?;
    let ba = dominates(b, a, params)?;
    let relation = match (&ab, &ba) {
        (x, y) if x.is_dominated() && y.is_dominated() => Relation::Equivalent,
        (x, y) if x.is_dominated() && y.is_not_dominated() => Relation::Less,
        (x, y) if x.is_not_dominated() && y.is_dominated() => Relation::Greater,
        (x, y) if x.is_not_dominated() && y.is_not_dominated() => Relation::Incomparable,
        _ => Relation::Inconclusive,
    };
    Ok(PairClassification { relation, a_below_b: ab, b_below_a: ba })
}

/// Which inequality a violation breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Inequality {
    /// `max_i part_i ≤ join`.
    SandwichLower,
    /// `join ≤ Σ_i part_i`.
    SandwichUpper,
    /// `lower ≤ C·upper`.
    ScaledDomination,
    /// `join ≤ Σ_i w_i part_i`.
    WeightedUpper,
}

impl Inequality {
    pub fn tag(self) -> &'static str {
        match self {
            Inequality::SandwichLower => "sandwich-lower",
            Inequality::SandwichUpper => "sandwich-upper",
            Inequality::ScaledDomination => "scaled-domination",
            Inequality::WeightedUpper => "weighted-upper",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub inequality: Inequality,
    pub point: String,
    pub lhs: Scalar,
    pub rhs: Scalar,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub checked: usize,
    pub skipped: usize,
    pub violations: Vec<Violation>,
}

impl InequalityReport {
    fn new() -> Self {
        InequalityReport { checked: 0, skipped: 0, violations: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Names of the violated inequalities, deduplicated.
    pub fn violated(&self) -> Vec<&'static str> {
        let set: BTreeSet<&'static str> = self.violations.iter().map(|v| v.inequality.tag()).collect();
        set.into_iter().collect()
    }
}

fn check_le(
    report: &mut InequalityReport,
    inequality: Inequality,
    p: &TestPoint,
    lhs: Scalar,
    rhs: Scalar,
    tol: &Scalar,
) {
    if !lhs.le_within(&rhs, tol) {
        report.violations.push(Violation { inequality, point: p.describe(), lhs, rhs });
    }
}

/// `max_i part_i(a) ≤ join(a) ≤ Σ_i part_i(a)` within `tol`, on every grid
/// point all handles can evaluate. Empirical intervals are used on the side
/// that makes each inequality hardest to violate spuriously.
pub fn sandwich_check(join: &SMHandle, parts: &[SMHandle], grid: &Grid, tol: &Scalar) -> Result<InequalityReport> {
    let mut report = InequalityReport::new();
    'points: for a in grid.points() {
        let p = TestPoint::Coeffs(a.clone());
        let Some((j_lo, j_hi)) = join.evaluate(&p)? else {
            report.skipped += 1;
            continue;
        };
        let mut max_lo = Scalar::zero();
        let mut sum_hi = Scalar::zero();
        for part in parts {
            let Some((lo, hi)) = part.evaluate(&p)? else {
                report.skipped += 1;
                continue 'points;
            };
            max_lo = max_lo.max(lo);
            sum_hi = sum_hi.add(&hi);
        }
        report.checked += 1;
        check_le(&mut report, Inequality::SandwichLower, &p, max_lo, j_hi, tol);
        check_le(&mut report, Inequality::SandwichUpper, &p, j_lo, sum_hi, tol);
    }
    Ok(report)
}

/// `lower(a) ≤ c·upper(a)` within `tol` on the grid.
pub fn scaled_domination_check(
    lower: &SMHandle,
    upper: &SMHandle,
    c: &Scalar,
    grid: &Grid,
    tol: &Scalar,
) -> Result<InequalityReport> {
    let mut report = InequalityReport::new();
    for a in grid.points() {
        let p = TestPoint::Coeffs(a.clone());
        let (Some((l_lo, _)), Some((_, u_hi))) = (lower.evaluate(&p)?, upper.evaluate(&p)?) else {
            report.skipped += 1;
            continue;
        };
        report.checked += 1;
        check_le(&mut report, Inequality::ScaledDomination, &p, l_lo, c.mul(&u_hi), tol);
    }
    Ok(report)
}

/// `join(a) ≤ Σ_i w_i part_i(a) + tail` within `tol` on the grid.
pub fn weighted_upper_check(
    join: &SMHandle,
    parts: &[(Scalar, SMHandle)],
    tail: &Scalar,
    grid: &Grid,
    tol: &Scalar,
) -> Result<InequalityReport> {
    let mut report = InequalityReport::new();
    'points: for a in grid.points() {
        let p = TestPoint::Coeffs(a.clone());
        let Some((j_lo, _)) = join.evaluate(&p)? else {
            report.skipped += 1;
            continue;
        };
        let mut rhs = tail.clone();
        for (w, h) in parts {
            let Some((_, hi)) = h.evaluate(&p)? else {
                report.skipped += 1;
                continue 'points;
            };
            rhs = rhs.add(&w.mul(&hi));
        }
        report.checked += 1;
        check_le(&mut report, Inequality::WeightedUpper, &p, j_lo, rhs, tol);
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderReport {
    pub names: Vec<String>,
    /// `matrix[i][j]` relates handle `i` to handle `j`.
    pub matrix: Vec<Vec<Relation>>,
    /// Indices along a longest strict chain, smallest first.
    pub longest_chain: Vec<usize>,
    /// Maximal sets of pairwise incomparable handles, of size at least 2.
    pub antichains: Vec<Vec<usize>>,
}

impl OrderReport {
    /// One line per handle listing its immediate strict successors.
    pub fn hasse_listing(&self) -> String {
        let n = self.names.len();
        let less = |i: usize, j: usize| self.matrix[i][j] == Relation::Less;
        let mut out = String::new();
        for i in 0..n {
            let covers: Vec<&str> = (0..n)
                .filter(|&j| less(i, j) && !(0..n).any(|k| less(i, k) && less(k, j)))
                .map(|j| self.names[j].as_str())
                .collect();
            out.push_str(&format!("{} ≺ {{{}}}\n", self.names[i], covers.join(", ")));
        }
        out
    }
}

fn bron_kerbosch(adj: &[Vec<bool>], r: Vec<usize>, mut p: Vec<usize>, mut x: Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if p.is_empty() && x.is_empty() {
        out.push(r);
        return;
    }
    let pivot = *p.iter().chain(&x).max_by_key(|&&u| p.iter().filter(|&&v| adj[u][v]).count()).expect("nonempty");
    for v in p.clone().into_iter().filter(|&v| !adj[pivot][v]) {
        let mut r2 = r.clone();
        r2.push(v);
        let p2 = p.iter().copied().filter(|&u| adj[v][u]).collect();
        let x2 = x.iter().copied().filter(|&u| adj[v][u]).collect();
        bron_kerbosch(adj, r2, p2, x2, out);
        p.retain(|&u| u != v);
        x.push(v);
    }
}

/// Relation matrix, a longest strict chain and the maximal antichains.
pub fn chains_and_antichains(catalog: &[SMHandle], params: &DominationParams) -> Result<OrderReport> {
    let n = catalog.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let classify = |&(i, j): &(usize, usize)| classify_pair(&catalog[i], &catalog[j], params).map(|c| c.relation);
    #[cfg(feature = "parallel")]
    let rels: Vec<Result<Relation>> = {
        use rayon::prelude::*;
        pairs.par_iter().map(classify).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rels: Vec<Result<Relation>> = pairs.iter().map(classify).collect();
    let mut matrix = vec![vec![Relation::Equivalent; n]; n];
    for (&(i, j), r) in pairs.iter().zip(rels) {
        let r = r?;
        matrix[i][j] = r;
        matrix[j][i] = r.flip();
    }
    // Longest path in the DAG of strict relations, by memoized DFS.
    fn longest(i: usize, m: &[Vec<Relation>], memo: &mut Vec<Option<Vec<usize>>>) -> Vec<usize> {
        if let Some(c) = &memo[i] {
            return c.clone();
        }
        let mut best = vec![i];
        for j in 0..m.len() {
            if m[i][j] == Relation::Less {
                let mut c = vec![i];
                c.extend(longest(j, m, memo));
                if c.len() > best.len() {
                    best = c;
                }
            }
        }
        memo[i] = Some(best.clone());
        best
    }
    let mut memo = vec![None; n];
    let longest_chain = (0..n).map(|i| longest(i, &matrix, &mut memo)).max_by_key(Vec::len).unwrap_or_default();
    let adj: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| matrix[i][j] == Relation::Incomparable).collect()).collect();
    let mut cliques = Vec::new();
    if n > 0 {
        bron_kerbosch(&adj, Vec::new(), (0..n).collect(), Vec::new(), &mut cliques);
    }
    let mut antichains: Vec<Vec<usize>> = cliques
        .into_iter()
        .filter(|c| c.len() >= 2)
        .map(|mut c| {
            c.sort_unstable();
            c
        })
        .collect();
    antichains.sort();
    Ok(OrderReport { names: catalog.iter().map(|h| h.name.clone()).collect(), matrix, longest_chain, antichains })
}
