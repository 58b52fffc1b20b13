use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::famkit::{matching_paren, FamilySpec, FinSet};
use crate::spaces::{rational_str, NormOracle, Scalar, Vector};

/// Finitely many values of an ℱ-sequence, explicitly listed.
#[derive(Clone, Debug, PartialEq)]
pub struct TableRule {
    pub window: u32,
    pub entries: BTreeMap<FinSet, Vector>,
}

#[derive(Serialize, Deserialize)]
struct TableEntryJson {
    set: FinSet,
    vector: Vector,
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    window: u32,
    entries: Vec<TableEntryJson>,
}

impl TableRule {
    /// `s ↦ v` for every member of `f` inside the window.
    pub fn constant(f: &FamilySpec, window: u32, v: &Vector) -> Result<TableRule> {
        let entries = f.members(window)?.into_iter().map(|s| (s, v.clone())).collect();
        Ok(TableRule { window, entries })
    }

    pub fn from_json(text: &str) -> Result<TableRule> {
        let t: TableJson = serde_json::from_str(text).map_err(|e| Error::parse(e.column(), e.to_string()))?;
        Ok(TableRule { window: t.window, entries: t.entries.into_iter().map(|e| (e.set, e.vector)).collect() })
    }

    pub fn to_json(&self) -> String {
        let t = TableJson {
            window: self.window,
            entries: self
                .entries
                .iter()
                .map(|(s, v)| TableEntryJson { set: s.clone(), vector: v.clone() })
                .collect(),
        };
        serde_json::to_string(&t).expect("table serializes")
    }

    pub fn get(&self, s: &FinSet) -> Result<&Vector> {
        if s.max_elem().is_some_and(|m| m > self.window) {
            return Err(Error::OutOfWindow { set: s.clone(), window: self.window });
        }
        self.entries.get(s).ok_or_else(|| Error::MissingEntry(s.clone()))
    }
}

/// The map `s ↦ x_s` of an ℱ-sequence, before the host is attached.
#[derive(Clone, Debug, PartialEq)]
pub enum RuleKind {
    UnitMax,
    UnitMin,
    /// `|s|^{−α} Σ_i e_{s(i)}`.
    Average(BigRational),
    /// The inner vector placed in component `c` (1-based) of a direct sum.
    InjectInto(usize, Box<RuleKind>),
    Scaled(BigRational, Box<RuleKind>),
    Table(TableRule),
}

/// `n^{−α}`, exact when `n^α` is rational.
fn power_weight(n: usize, alpha: &BigRational) -> Scalar {
    let (p, q) = (alpha.numer(), alpha.denom());
    if let (Some(q32), Some(p32)) = (q.to_u32(), p.abs().to_u32()) {
        let n = BigInt::from(n);
        let root = n.nth_root(q32);
        if num_traits::pow(root.clone(), q32 as usize) == n {
            let pow = BigRational::from_integer(num_traits::pow(root, p32 as usize));
            return Scalar::Exact(if p.is_negative() { pow } else { pow.recip() });
        }
    }
    Scalar::Approx((n as f64).powf(-alpha.to_f64().unwrap_or(f64::NAN)))
}

impl RuleKind {
    pub fn eval(&self, s: &FinSet) -> Result<Vector> {
        let nonempty = || {
            if s.is_empty() {
                Err(Error::Precondition("rules are evaluated on nonempty sets".into()))
            } else {
                Ok(())
            }
        };
        match self {
            RuleKind::UnitMax => {
                nonempty()?;
                Ok(Vector::unit(s.max_elem().expect("nonempty")))
            }
            RuleKind::UnitMin => {
                nonempty()?;
                Ok(Vector::unit(s.min_elem().expect("nonempty")))
            }
            RuleKind::Average(alpha) => {
                nonempty()?;
                Ok(Vector::ones(s.elements().iter().copied()).scale(&power_weight(s.len(), alpha)))
            }
            RuleKind::InjectInto(c, inner) => Ok(inner.eval(s)?.nest(c - 1)),
            RuleKind::Scaled(c, inner) => Ok(inner.eval(s)?.scale(&Scalar::Exact(c.clone()))),
            RuleKind::Table(t) => t.get(s).cloned(),
        }
    }

    /// Checks injection indices against the host.
    fn validate(&self, host: &NormOracle) -> Result<()> {
        match self {
            RuleKind::InjectInto(c, inner) => {
                let comps = host
                    .components()
                    .ok_or_else(|| Error::Precondition(format!("inject needs a direct-sum host, got {host}")))?;
                if *c == 0 || *c > comps.len() {
                    return Err(Error::BadComponent { index: *c, len: comps.len() });
                }
                inner.validate(&comps[c - 1])
            }
            RuleKind::Scaled(_, inner) => inner.validate(host),
            _ => Ok(()),
        }
    }

    pub fn parse_with(s: &str, load: &dyn Fn(&str) -> Result<String>) -> Result<RuleKind> {
        parse_at(s, 0, load)
    }
}

fn parse_at(s: &str, offset: usize, load: &dyn Fn(&str) -> Result<String>) -> Result<RuleKind> {
    let lead = s.len() - s.trim_start().len();
    let (s, offset) = (s.trim(), offset + lead);
    let err = |pos: usize, msg: String| Error::parse(offset + pos, msg);
    match s {
        "unitmax" => return Ok(RuleKind::UnitMax),
        "unitmin" => return Ok(RuleKind::UnitMin),
        _ => {}
    }
    if let Some(a) = s.strip_prefix("avg:") {
        let a = Scalar::parse_rational(a).map_err(|_| err(4, format!("bad exponent `{a}`")))?;
        return Ok(RuleKind::Average(a));
    }
    if let Some(rest) = s.strip_prefix("table:") {
        let text = match rest.trim().strip_prefix('@') {
            Some(path) => load(path)?,
            None => rest.to_string(),
        };
        return TableRule::from_json(&text).map(RuleKind::Table).map_err(|e| err(6, e.to_string()));
    }
    for (head, is_inject) in [("inject:", true), ("scale:", false)] {
        if let Some(rest) = s.strip_prefix(head) {
            let open = rest.find('(').ok_or_else(|| err(head.len(), "expected `(`".into()))?;
            let close_in_s = matching_paren(s, head.len() + open)
                .ok_or_else(|| err(head.len() + open, "unbalanced parenthesis".into()))?;
            if close_in_s != s.len() - 1 {
                return Err(err(close_in_s + 1, "trailing input after `)`".into()));
            }
            let arg = &rest[..open];
            let inner = parse_at(&s[head.len() + open + 1..close_in_s], offset + head.len() + open + 1, load)?;
            return if is_inject {
                let c: usize = arg.trim().parse().map_err(|_| err(head.len(), format!("bad component `{arg}`")))?;
                if c == 0 {
                    return Err(err(head.len(), "components are numbered from 1".into()));
                }
                Ok(RuleKind::InjectInto(c, Box::new(inner)))
            } else {
                let c = Scalar::parse_rational(arg).map_err(|_| err(head.len(), format!("bad scale `{arg}`")))?;
                Ok(RuleKind::Scaled(c, Box::new(inner)))
            };
        }
    }
    Err(err(0, format!("unknown rule `{s}`")))
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleKind::UnitMax => write!(f, "unitmax"),
            RuleKind::UnitMin => write!(f, "unitmin"),
            RuleKind::Average(a) => write!(f, "avg:{a}"),
            RuleKind::InjectInto(c, inner) => write!(f, "inject:{c}({inner})"),
            RuleKind::Scaled(c, inner) => write!(f, "scale:{c}({inner})"),
            RuleKind::Table(t) => write!(f, "table:{}", t.to_json()),
        }
    }
}

/// A user-supplied claim about weak nullness, never overridden by the
/// coordinatewise check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub weakly_null: bool,
    pub justification: String,
}

/// An ℱ-sequence `(x_s)` in a host space.
#[derive(Clone, Debug, PartialEq)]
pub struct FSeqRule {
    pub kind: RuleKind,
    pub host: NormOracle,
    pub declared: Option<Certificate>,
}

impl FSeqRule {
    pub fn new(kind: RuleKind, host: NormOracle) -> Result<Self> {
        kind.validate(&host)?;
        Ok(FSeqRule { kind, host, declared: None })
    }

    pub fn with_certificate(mut self, weakly_null: bool, justification: impl Into<String>) -> Self {
        self.declared = Some(Certificate { weakly_null, justification: justification.into() });
        self
    }

    pub fn parse_with(kind: &str, host: NormOracle, load: &dyn Fn(&str) -> Result<String>) -> Result<Self> {
        FSeqRule::new(RuleKind::parse_with(kind, load)?, host)
    }

    pub fn parse(kind: &str, host: NormOracle) -> Result<Self> {
        FSeqRule::parse_with(kind, host, &|p| {
            Err(Error::Unsupported(format!("file references are not available here: @{p}")))
        })
    }

    /// `x_s` in the host. Vectors without a component land in component 1 of
    /// a direct-sum host.
    pub fn eval(&self, s: &FinSet) -> Result<Vector> {
        let v = self.kind.eval(s)?;
        if self.host.components().is_some() {
            Ok(v.map_coords(|c| {
                if c.path.is_empty() {
                    crate::spaces::Coord { path: vec![0], index: c.index }
                } else {
                    c.clone()
                }
            }))
        } else {
            Ok(v)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct FSeqRuleJson {
    kind: String,
    host: NormOracle,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    declared: Option<Certificate>,
}

impl Serialize for FSeqRule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FSeqRuleJson { kind: self.kind.to_string(), host: self.host.clone(), declared: self.declared.clone() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FSeqRule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = FSeqRuleJson::deserialize(d)?;
        let mut r = FSeqRule::parse(&j.kind, j.host).map_err(serde::de::Error::custom)?;
        r.declared = j.declared;
        Ok(r)
    }
}

/// Null sequence `δ_n` of positive tolerances.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DeltaRule {
    /// `δ_n = c·r^n`.
    Geometric {
        #[serde(with = "rational_str")]
        c: BigRational,
        #[serde(with = "rational_str")]
        r: BigRational,
    },
    /// `δ_n = c/n`.
    Harmonic {
        #[serde(with = "rational_str")]
        c: BigRational,
    },
}

impl Default for DeltaRule {
    fn default() -> Self {
        DeltaRule::Geometric { c: BigRational::one(), r: crate::spaces::ratio(1, 2) }
    }
}

impl DeltaRule {
    pub fn new_geometric(c: BigRational, r: BigRational) -> Result<Self> {
        if c <= BigRational::zero() || r <= BigRational::zero() || r >= BigRational::one() {
            return Err(Error::Precondition("geometric δ needs c > 0 and 0 < r < 1".into()));
        }
        Ok(DeltaRule::Geometric { c, r })
    }

    pub fn new_harmonic(c: BigRational) -> Result<Self> {
        if c <= BigRational::zero() {
            return Err(Error::Precondition("harmonic δ needs c > 0".into()));
        }
        Ok(DeltaRule::Harmonic { c })
    }

    pub fn delta(&self, n: usize) -> BigRational {
        match self {
            DeltaRule::Geometric { c, r } => c * num_traits::pow(r.clone(), n),
            DeltaRule::Harmonic { c } => c / BigRational::from_integer(BigInt::from(n)),
        }
    }
}
