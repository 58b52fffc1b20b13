//! Ordinals below ε₀ in Cantor normal form.
//!
//! An ordinal is stored as a strictly decreasing list of terms `ω^e · c`
//! with `c ≥ 1`; the empty list is 0. Exponents are ordinals themselves, so
//! the representation is a finite tree and every value is below ε₀.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub exponent: Ordinal,
    pub coefficient: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Ordinal {
    terms: Vec<Term>,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn nat(n: u64) -> Self {
        if n == 0 {
            Ordinal::zero()
        } else {
            Ordinal {
                terms: vec![Term {
                    exponent: Ordinal::zero(),
                    coefficient: n,
                }],
            }
        }
    }

    pub fn omega() -> Self {
        Ordinal::omega_pow(Ordinal::nat(1))
    }

    /// `ω^e`.
    pub fn omega_pow(exponent: Ordinal) -> Self {
        Ordinal {
            terms: vec![Term {
                exponent,
                coefficient: 1,
            }],
        }
    }

    /// `ω^e · c`; `c = 0` gives 0.
    pub fn monomial(exponent: Ordinal, coefficient: u64) -> Self {
        if coefficient == 0 {
            return Ordinal::zero();
        }
        Ordinal {
            terms: vec![Term {
                exponent,
                coefficient,
            }],
        }
    }

    /// Builds an ordinal from raw terms, checking the normal-form invariants.
    pub fn from_terms(terms: Vec<Term>) -> Result<Self> {
        for (i, t) in terms.iter().enumerate() {
            if t.coefficient == 0 {
                return Err(Error::Precondition(format!(
                    "term {i} has coefficient 0"
                )));
            }
            if i > 0 && terms[i - 1].exponent <= t.exponent {
                return Err(Error::Precondition(
                    "exponents must be strictly decreasing".into(),
                ));
            }
        }
        Ok(Ordinal { terms })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_limit(&self) -> bool {
        self.terms.last().is_some_and(|t| !t.exponent.is_zero())
    }

    pub fn is_successor(&self) -> bool {
        self.terms.last().is_some_and(|t| t.exponent.is_zero())
    }

    /// The value as a natural number, if finite.
    pub fn as_nat(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [t] if t.exponent.is_zero() => Some(t.coefficient),
            _ => None,
        }
    }

    pub fn successor(&self) -> Ordinal {
        self.add(&Ordinal::nat(1))
    }

    /// The predecessor of a successor ordinal.
    pub fn predecessor(&self) -> Option<Ordinal> {
        if !self.is_successor() {
            return None;
        }
        let mut terms = self.terms.clone();
        let last = terms.last_mut().expect("successor has a last term");
        if last.coefficient == 1 {
            terms.pop();
        } else {
            last.coefficient -= 1;
        }
        Some(Ordinal { terms })
    }

    /// Ordinal sum `self + rhs` (not commutative).
    pub fn add(&self, rhs: &Ordinal) -> Ordinal {
        let Some(lead) = rhs.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<Term> = self
            .terms
            .iter()
            .take_while(|t| t.exponent >= lead.exponent)
            .cloned()
            .collect();
        let mut rest = rhs.terms.iter();
        if let Some(last) = terms.last_mut() {
            if last.exponent == lead.exponent {
                last.coefficient += lead.coefficient;
                rest.next();
            }
        }
        terms.extend(rest.cloned());
        Ordinal { terms }
    }

    /// The `n`-th element of the fundamental sequence of a limit ordinal.
    ///
    /// With `λ = prefix + ω^e` (the last copy of the last term peeled off):
    /// `λ[n] = prefix + ω^b · n` when `e = b + 1`, and
    /// `λ[n] = prefix + ω^(e[n])` when `e` is a limit.
    pub fn fundamental_sequence(&self, n: u64) -> Result<Ordinal> {
        if !self.is_limit() {
            return Err(Error::NotLimit(self.to_string()));
        }
        if n == 0 {
            return Err(Error::Precondition(
                "fundamental sequences are indexed from 1".into(),
            ));
        }
        let mut prefix = self.terms.clone();
        let last = prefix.pop().expect("limit has a last term");
        if last.coefficient > 1 {
            prefix.push(Term {
                exponent: last.exponent.clone(),
                coefficient: last.coefficient - 1,
            });
        }
        let prefix = Ordinal { terms: prefix };
        let tail = match last.exponent.predecessor() {
            Some(b) => Ordinal::monomial(b, n),
            None => Ordinal::omega_pow(last.exponent.fundamental_sequence(n)?),
        };
        Ok(prefix.add(&tail))
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::nat(n)
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let ord = a
                .exponent
                .cmp(&b.exponent)
                .then(a.coefficient.cmp(&b.coefficient));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn compare(a: &Ordinal, b: &Ordinal) -> Ordering {
    a.cmp(b)
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            if t.exponent.is_zero() {
                write!(f, "{}", t.coefficient)?;
                continue;
            }
            write!(f, "w")?;
            if t.exponent != Ordinal::nat(1) {
                let bare = t.exponent.as_nat().is_some()
                    || matches!(t.exponent.terms.as_slice(), [only] if only.coefficient == 1);
                if bare {
                    write!(f, "^{}", t.exponent)?;
                } else {
                    write!(f, "^({})", t.exponent)?;
                }
            }
            if t.coefficient > 1 {
                write!(f, "*{}", t.coefficient)?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn nat(&mut self) -> Result<u64> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::parse(start, "expected a natural number"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| Error::parse(start, "natural number out of range"))
    }

    fn sum(&mut self) -> Result<Ordinal> {
        let mut acc = self.term()?;
        while self.eat(b'+') {
            let start = self.pos;
            let t = self.term()?;
            if !acc.is_zero() && !t.is_zero() {
                let prev = &acc.terms.last().expect("nonzero").exponent;
                let next = &t.terms[0].exponent;
                if next > prev {
                    return Err(Error::parse(start, "terms must be in decreasing order"));
                }
            }
            acc = acc.add(&t);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Ordinal> {
        match self.peek() {
            Some(b'w') => {
                let base = self.power()?;
                if self.eat(b'*') {
                    let c = self.nat()?;
                    let exponent = base.terms[0].exponent.clone();
                    Ok(Ordinal::monomial(exponent, c))
                } else {
                    Ok(base)
                }
            }
            Some(c) if c.is_ascii_digit() => Ok(Ordinal::nat(self.nat()?)),
            _ => Err(Error::parse(self.pos, "expected `w` or a natural number")),
        }
    }

    fn power(&mut self) -> Result<Ordinal> {
        if !self.eat(b'w') {
            return Err(Error::parse(self.pos, "expected `w`"));
        }
        if !self.eat(b'^') {
            return Ok(Ordinal::omega());
        }
        let exponent = match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.sum()?;
                if !self.eat(b')') {
                    return Err(Error::parse(self.pos, "expected `)`"));
                }
                e
            }
            Some(b'w') => self.power()?,
            Some(c) if c.is_ascii_digit() => Ordinal::nat(self.nat()?),
            _ => return Err(Error::parse(self.pos, "expected an exponent")),
        };
        Ok(Ordinal::omega_pow(exponent))
    }
}

impl FromStr for Ordinal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut p = Parser {
            src: cleaned.as_bytes(),
            pos: 0,
        };
        let o = p.sum()?;
        if p.pos != cleaned.len() {
            return Err(Error::parse(p.pos, "trailing input"));
        }
        Ok(o)
    }
}

impl Serialize for Ordinal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
