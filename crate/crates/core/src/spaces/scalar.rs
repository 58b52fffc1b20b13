use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative error bound carried by every [`Scalar::Approx`] value.
pub const APPROX_REL_ERR: f64 = 1.0 / (1u64 << 40) as f64;

/// A real number that is either an exact rational or a float within
/// [`APPROX_REL_ERR`] relative error. Exactness is lost as soon as one
/// operand is approximate.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(BigRational),
    Approx(f64),
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(BigRational::one())
    }

    pub fn int(n: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Scalar::Exact(ratio(n, d))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(q) => Some(q),
            Scalar::Approx(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_zero(),
            Scalar::Approx(x) => *x == 0.0,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            Scalar::Approx(x) => *x,
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(q.abs()),
            Scalar::Approx(x) => Scalar::Approx(x.abs()),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(-q.clone()),
            Scalar::Approx(x) => Scalar::Approx(-x),
        }
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a + b),
            _ => Scalar::Approx(self.to_f64() + o.to_f64()),
        }
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a * b),
            _ => Scalar::Approx(self.to_f64() * o.to_f64()),
        }
    }

    /// Division; `None` for a zero divisor.
    pub fn div(&self, o: &Scalar) -> Option<Scalar> {
        if o.is_zero() {
            return None;
        }
        Some(match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a / b),
            _ => Scalar::Approx(self.to_f64() / o.to_f64()),
        })
    }

    pub fn max(self, o: Scalar) -> Scalar {
        if o.partial_cmp(&self) == Some(Ordering::Greater) {
            o
        } else {
            self
        }
    }

    pub fn min(self, o: Scalar) -> Scalar {
        if o.partial_cmp(&self) == Some(Ordering::Less) {
            o
        } else {
            self
        }
    }

    /// Absolute slack covering the float error of either operand.
    pub fn rounding_slack(&self, o: &Scalar) -> f64 {
        if self.is_exact() && o.is_exact() {
            0.0
        } else {
            4.0 * APPROX_REL_ERR * self.to_f64().abs().max(o.to_f64().abs())
        }
    }

    /// `self ≤ o + tol`, with float slack when either side is approximate.
    pub fn le_within(&self, o: &Scalar, tol: &Scalar) -> bool {
        let rhs = o.add(tol);
        match (self, &rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a <= b,
            _ => self.to_f64() <= rhs.to_f64() + self.rounding_slack(&rhs),
        }
    }

    /// Equality up to float error; exact values compare exactly.
    pub fn approx_eq(&self, o: &Scalar) -> bool {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => (self.to_f64() - o.to_f64()).abs() <= self.rounding_slack(o),
        }
    }

    /// Parses `p/q`, an integer, or a finite decimal such as `-0.25`.
    pub fn parse_rational(s: &str) -> Result<BigRational> {
        let s = s.trim();
        if let Some((int, frac)) = s.split_once('.') {
            let neg = int.starts_with('-');
            let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::parse(0, format!("bad decimal `{s}`")));
            }
            let n: BigInt = digits.parse().expect("digits");
            let d = num_traits::pow(BigInt::from(10), frac.len());
            let q = BigRational::new(n, d);
            return Ok(if neg { -q } else { q });
        }
        let q: BigRational = s.parse().map_err(|_| Error::parse(0, format!("bad rational `{s}`")))?;
        Ok(q)
    }
}

impl PartialEq for Scalar {
    fn eq(&self, o: &Scalar) -> bool {
        self.partial_cmp(o) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, o: &Scalar) -> Option<Ordering> {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Some(a.cmp(b)),
            _ => self.to_f64().partial_cmp(&o.to_f64()),
        }
    }
}

impl From<BigRational> for Scalar {
    fn from(q: BigRational) -> Self {
        Scalar::Exact(q)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => write!(f, "{q}"),
            Scalar::Approx(x) => write!(f, "{x:?}"),
        }
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Rationals and decimals parse exactly; `~x` marks a float.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().strip_prefix('~') {
            Some(x) => x
                .trim()
                .parse::<f64>()
                .map(Scalar::Approx)
                .map_err(|_| Error::parse(1, format!("bad float `{x}`"))),
            None => Scalar::parse_rational(s).map(Scalar::Exact),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(q) => s.serialize_str(&q.to_string()),
            Scalar::Approx(x) => s.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::String(s) => s.parse().map_err(serde::de::Error::custom),
            serde_json::Value::Number(n) => match n.as_i64() {
                Some(i) => Ok(Scalar::int(i)),
                None => Ok(Scalar::Approx(n.as_f64().unwrap_or(f64::NAN))),
            },
            other => Err(serde::de::Error::custom(format!("expected a number, got {other}"))),
        }
    }
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod rational_str {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        super::Scalar::parse_rational(&String::deserialize(d)?).map_err(serde::de::Error::custom)
    }

    /// The same for sequences.
    pub mod vec {
        use num_rational::BigRational;
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
            v.iter().map(ToString::to_string).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
            Vec::<String>::deserialize(d)?
                .iter()
                .map(|x| super::super::Scalar::parse_rational(x).map_err(serde::de::Error::custom))
                .collect()
        }
    }
}
