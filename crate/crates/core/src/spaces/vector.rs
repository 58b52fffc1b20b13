use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

use super::Scalar;

/// A coordinate: `path` selects nested direct-sum components (0-based),
/// `index` the basis vector inside the leaf space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord {
    pub path: Vec<usize>,
    pub index: u32,
}

impl Coord {
    pub fn leaf(index: u32) -> Self {
        Coord { path: Vec::new(), index }
    }
}

/// A finitely supported vector. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Vector {
    entries: BTreeMap<Coord, Scalar>,
}

impl Vector {
    pub fn zero() -> Self {
        Vector::default()
    }

    pub fn unit(index: u32) -> Self {
        let mut v = Vector::zero();
        v.set(Coord::leaf(index), Scalar::one());
        v
    }

    pub fn from_leaf_entries(entries: impl IntoIterator<Item = (u32, Scalar)>) -> Self {
        let mut v = Vector::zero();
        for (i, c) in entries {
            v.add_at(Coord::leaf(i), &c);
        }
        v
    }

    /// `Σ a_j e_j` on indices `1..=a.len()`.
    pub fn from_coefficients(a: &[Scalar]) -> Self {
        Vector::from_leaf_entries(a.iter().enumerate().map(|(j, c)| (j as u32 + 1, c.clone())))
    }

    /// Sum of `e_i` over the given indices.
    pub fn ones(indices: impl IntoIterator<Item = u32>) -> Self {
        Vector::from_leaf_entries(indices.into_iter().map(|i| (i, Scalar::one())))
    }

    pub fn set(&mut self, c: Coord, x: Scalar) {
        if x.is_zero() {
            self.entries.remove(&c);
        } else {
            self.entries.insert(c, x);
        }
    }

    pub fn add_at(&mut self, c: Coord, x: &Scalar) {
        let cur = self.entries.get(&c).cloned().unwrap_or_else(Scalar::zero);
        self.set(c, cur.add(x));
    }

    pub fn get(&self, c: &Coord) -> Scalar {
        self.entries.get(c).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Coord, &Scalar)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.entries.values().all(Scalar::is_exact)
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn add(&self, o: &Vector) -> Vector {
        let mut v = self.clone();
        for (c, x) in &o.entries {
            v.add_at(c.clone(), x);
        }
        v
    }

    pub fn scale(&self, k: &Scalar) -> Vector {
        let mut v = Vector::zero();
        for (c, x) in &self.entries {
            v.set(c.clone(), x.mul(k));
        }
        v
    }

    pub fn map_coords(&self, f: impl Fn(&Coord) -> Coord) -> Vector {
        let mut v = Vector::zero();
        for (c, x) in &self.entries {
            v.add_at(f(c), x);
        }
        v
    }

    /// Coordinates whose path is empty, as `(index, coefficient)` pairs.
    pub fn leaf_entries(&self) -> Result<Vec<(u32, Scalar)>> {
        self.entries
            .iter()
            .map(|(c, x)| {
                if c.path.is_empty() {
                    Ok((c.index, x.clone()))
                } else {
                    Err(Error::BadComponent { index: c.path[0] + 1, len: 0 })
                }
            })
            .collect()
    }

    /// Splits by the first path element into `n` component vectors.
    pub fn split_components(&self, n: usize) -> Result<Vec<Vector>> {
        let mut out = vec![Vector::zero(); n];
        for (c, x) in &self.entries {
            let Some((&head, rest)) = c.path.split_first() else {
                return Err(Error::Precondition(format!(
                    "coordinate e_{} has no direct-sum component",
                    c.index
                )));
            };
            if head >= n {
                return Err(Error::BadComponent { index: head + 1, len: n });
            }
            out[head].set(Coord { path: rest.to_vec(), index: c.index }, x.clone());
        }
        Ok(out)
    }

    /// Prepends component `c` (0-based) to every path.
    pub fn nest(&self, c: usize) -> Vector {
        self.map_coords(|k| {
            let mut path = Vec::with_capacity(k.path.len() + 1);
            path.push(c);
            path.extend_from_slice(&k.path);
            Coord { path, index: k.index }
        })
    }

    pub fn to_json(&self) -> Value {
        if self.entries.keys().all(|c| c.path.is_empty()) {
            let mut m = Map::new();
            for (c, x) in &self.entries {
                m.insert(c.index.to_string(), serde_json::to_value(x).expect("scalar"));
            }
            return Value::Object(m);
        }
        let n = self.entries.keys().filter_map(|c| c.path.first()).max().map_or(0, |m| m + 1);
        let parts = self.split_components(n).unwrap_or_default();
        let mut m = Map::new();
        m.insert("components".into(), Value::Array(parts.iter().map(Vector::to_json).collect()));
        Value::Object(m)
    }

    pub fn from_json(v: &Value) -> Result<Vector> {
        let bad = |msg: String| Error::parse(0, msg);
        let obj = v.as_object().ok_or_else(|| bad("a vector is a JSON object".into()))?;
        if let Some(parts) = obj.get("components") {
            let parts = parts.as_array().ok_or_else(|| bad("`components` must be an array".into()))?;
            let mut out = Vector::zero();
            for (c, p) in parts.iter().enumerate() {
                out = out.add(&Vector::from_json(p)?.nest(c));
            }
            return Ok(out);
        }
        let mut out = Vector::zero();
        for (k, x) in obj {
            let i: u32 = k.trim().parse().map_err(|_| bad(format!("bad index `{k}`")))?;
            if i == 0 {
                return Err(bad("indices start at 1".into()));
            }
            let x: Scalar = serde_json::from_value(x.clone()).map_err(|e| bad(e.to_string()))?;
            out.add_at(Coord::leaf(i), &x);
        }
        Ok(out)
    }
}

impl Serialize for Vector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Vector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Vector::from_json(&Value::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}
