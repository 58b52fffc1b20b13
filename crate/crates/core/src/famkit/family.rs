use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{FinSet, IndexSet};
use crate::error::{Error, Result};
use crate::ordinal::Ordinal;

/// Three-way answer of [`FamilySpec::classify`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Membership {
    /// `s ∈ ℱ`.
    InF,
    /// `s ∈ ℱ̂ \ ℱ`: a proper subset of some member.
    ProperSegment,
    /// `s ∉ ℱ̂`.
    Outside,
}

impl Membership {
    pub fn in_closure(self) -> bool {
        self != Membership::Outside
    }
}

/// A finite family given by its members, valid only inside `{1..=window}`.
#[derive(Clone, Debug)]
pub struct ExplicitFamily {
    members: BTreeSet<FinSet>,
    window: u32,
    prefixes: HashSet<FinSet>,
    closure: HashSet<FinSet>,
}

#[derive(Serialize, Deserialize)]
struct ExplicitFile {
    window: u32,
    members: Vec<FinSet>,
}

impl ExplicitFamily {
    pub const MAX_MEMBER_SIZE: usize = 20;

    pub fn new(members: impl IntoIterator<Item = FinSet>, window: u32) -> Result<Self> {
        let members: BTreeSet<FinSet> = members.into_iter().collect();
        let mut prefixes = HashSet::new();
        let mut closure = HashSet::new();
        for m in &members {
            if m.max_elem().is_some_and(|x| x > window) {
                return Err(Error::OutOfWindow { set: m.clone(), window });
            }
            if m.len() > Self::MAX_MEMBER_SIZE {
                return Err(Error::Unsupported(format!(
                    "explicit members are limited to {} elements",
                    Self::MAX_MEMBER_SIZE
                )));
            }
            prefixes.extend(m.prefixes());
            closure.extend(m.subsets());
        }
        Ok(ExplicitFamily { members, window, prefixes, closure })
    }

    /// Reads `{"window": w, "members": [[1,2],[3]]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ExplicitFile =
            serde_json::from_str(text).map_err(|e| Error::parse(e.column(), e.to_string()))?;
        ExplicitFamily::new(file.members, file.window)
    }

    pub fn to_json(&self) -> String {
        let file = ExplicitFile { window: self.window, members: self.members.iter().cloned().collect() };
        serde_json::to_string(&file).expect("explicit family serializes")
    }

    pub fn members(&self) -> &BTreeSet<FinSet> {
        &self.members
    }

    pub fn window(&self) -> u32 {
        self.window
    }

    fn check_window(&self, s: &FinSet) -> Result<()> {
        match s.max_elem() {
            Some(m) if m > self.window => Err(Error::OutOfWindow { set: s.clone(), window: self.window }),
            _ => Ok(()),
        }
    }
}

impl PartialEq for ExplicitFamily {
    fn eq(&self, other: &Self) -> bool {
        self.window == other.window && self.members == other.members
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FamilyKind {
    /// `[ℕ]^k`, all `k`-element sets.
    Cube(u32),
    /// The uniform thin family of the given order.
    UniformThin(Ordinal),
    Explicit(ExplicitFamily),
    /// `ℱ ↾ L`.
    Restricted(FamilySpec, IndexSet),
    /// `ℱ_[t] = {s : min s > max t, t ∪ s ∈ ℱ}`.
    Shifted(FamilySpec, FinSet),
}

/// A finitely described family of finite subsets of ℕ.
///
/// Cheap to clone; the description is shared.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec(Arc<FamilyKind>);

fn uniform_contains(order: &Ordinal, s: &[u32]) -> Result<bool> {
    if order.is_zero() {
        return Ok(s.is_empty());
    }
    let Some(&first) = s.first() else {
        return Ok(false);
    };
    if let Some(beta) = order.predecessor() {
        return uniform_contains(&beta, &s[1..]);
    }
    uniform_contains(&order.fundamental_sequence(first as u64)?, s)
}

/// Whether `s` is an initial segment (or equal to) some member.
fn uniform_prefix(order: &Ordinal, s: &[u32]) -> Result<bool> {
    let Some(&first) = s.first() else {
        return Ok(true);
    };
    if order.is_zero() {
        return Ok(false);
    }
    if let Some(beta) = order.predecessor() {
        return uniform_prefix(&beta, &s[1..]);
    }
    uniform_prefix(&order.fundamental_sequence(first as u64)?, s)
}

impl FamilySpec {
    pub fn new(kind: FamilyKind) -> Self {
        FamilySpec(Arc::new(kind))
    }

    pub fn cube(k: u32) -> Self {
        FamilySpec::new(FamilyKind::Cube(k))
    }

    pub fn uniform(order: Ordinal) -> Self {
        FamilySpec::new(FamilyKind::UniformThin(order))
    }

    pub fn explicit(members: impl IntoIterator<Item = FinSet>, window: u32) -> Result<Self> {
        Ok(FamilySpec::new(FamilyKind::Explicit(ExplicitFamily::new(members, window)?)))
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.0
    }

    /// Restricted and shifted families over a regular base behave like regular
    /// families: the closure is decided by the initial-segment recursion alone.
    pub fn is_spreading_kind(&self) -> bool {
        match self.kind() {
            FamilyKind::Cube(_) | FamilyKind::UniformThin(_) => true,
            FamilyKind::Explicit(_) => false,
            FamilyKind::Restricted(base, l) => l.is_infinite() && base.is_spreading_kind(),
            FamilyKind::Shifted(base, _) => base.is_spreading_kind(),
        }
    }

    /// An upper bound on the elements of any member, when one exists.
    pub fn bound(&self) -> Option<u32> {
        match self.kind() {
            FamilyKind::Cube(_) | FamilyKind::UniformThin(_) => None,
            FamilyKind::Explicit(e) => Some(e.window),
            FamilyKind::Restricted(base, l) => match (base.bound(), l.max()) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            },
            FamilyKind::Shifted(base, _) => base.bound(),
        }
    }

    /// `s ∈ ℱ`.
    pub fn contains(&self, s: &FinSet) -> Result<bool> {
        match self.kind() {
            FamilyKind::Cube(k) => Ok(s.len() == *k as usize),
            FamilyKind::UniformThin(order) => uniform_contains(order, s.elements()),
            FamilyKind::Explicit(e) => {
                e.check_window(s)?;
                Ok(e.members.contains(s))
            }
            FamilyKind::Restricted(base, l) => Ok(l.contains_set(s) && base.contains(s)?),
            FamilyKind::Shifted(base, t) => {
                if !above(s, t) {
                    return Ok(false);
                }
                base.contains(&t.union(s))
            }
        }
    }

    /// A sound pruning test: false only when no member has `s` as an
    /// initial segment. Exact for spreading kinds.
    fn may_extend(&self, s: &FinSet) -> Result<bool> {
        match self.kind() {
            FamilyKind::Cube(k) => Ok(s.len() <= *k as usize),
            FamilyKind::UniformThin(order) => uniform_prefix(order, s.elements()),
            FamilyKind::Explicit(e) => {
                e.check_window(s)?;
                Ok(e.prefixes.contains(s))
            }
            FamilyKind::Restricted(base, l) => Ok(l.contains_set(s) && base.may_extend(s)?),
            FamilyKind::Shifted(base, t) => Ok(above(s, t) && base.may_extend(&t.union(s))?),
        }
    }

    /// Whether some member has `s` as an initial segment (`s` itself counts).
    pub fn extends_to_member(&self, s: &FinSet) -> Result<bool> {
        if self.is_spreading_kind() {
            return self.may_extend(s);
        }
        let bound = self.bound().expect("non-spreading kinds are bounded");
        if s.max_elem().is_some_and(|m| m > bound) {
            if let FamilyKind::Explicit(e) = self.kind() {
                e.check_window(s)?;
            }
            return Ok(false);
        }
        let mut found = false;
        self.walk(s.clone(), bound, &mut |_| {
            found = true;
            Ok(false)
        })?;
        Ok(found)
    }

    /// Classifies `s` as a member, a proper subset of a member, or outside.
    pub fn classify(&self, s: &FinSet) -> Result<Membership> {
        if self.contains(s)? {
            return Ok(Membership::InF);
        }
        match self.kind() {
            FamilyKind::Explicit(e) => {
                return Ok(if e.closure.contains(s) { Membership::ProperSegment } else { Membership::Outside });
            }
            _ if self.is_spreading_kind() => {
                return Ok(if self.may_extend(s)? { Membership::ProperSegment } else { Membership::Outside });
            }
            _ => {}
        }
        let bound = self.bound().expect("non-spreading kinds are bounded");
        if s.max_elem().is_some_and(|m| m > bound) {
            return Ok(Membership::Outside);
        }
        let mut hit = false;
        self.walk(FinSet::empty(), bound, &mut |u| {
            if s.len() < u.len() && s.is_subset_of(u) {
                hit = true;
                return Ok(false);
            }
            Ok(true)
        })?;
        Ok(if hit { Membership::ProperSegment } else { Membership::Outside })
    }

    /// Depth-first walk over members end-extending `start` inside `{1..=bound}`,
    /// in lexicographic order. The visitor returns `false` to stop.
    fn walk(&self, start: FinSet, bound: u32, visit: &mut dyn FnMut(&FinSet) -> Result<bool>) -> Result<bool> {
        if !self.may_extend(&start)? {
            return Ok(true);
        }
        if self.contains(&start)? && !visit(&start)? {
            return Ok(false);
        }
        let from = start.max_elem().map_or(1, |m| m + 1);
        for x in from..=bound {
            if !self.walk(start.pushed(x), bound, visit)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// All members inside `{1..=window}`, in lexicographic order.
    pub fn members(&self, window: u32) -> Result<Vec<FinSet>> {
        let bound = self.bound().map_or(window, |b| b.min(window));
        let mut out = Vec::new();
        self.walk(FinSet::empty(), bound, &mut |u| {
            out.push(u.clone());
            Ok(true)
        })?;
        Ok(out)
    }

    /// All elements of `ℱ̂` inside `{1..=window}`.
    pub fn closure_in_window(&self, window: u32) -> Result<Vec<FinSet>> {
        let bound = self.bound().map_or(window, |b| b.min(window));
        let mut out = Vec::new();
        for s in FinSet::all_subsets_of_range(bound) {
            if self.classify(&s)?.in_closure() {
                out.push(s);
            }
        }
        out.sort();
        Ok(out)
    }
}

fn above(s: &FinSet, t: &FinSet) -> bool {
    match (s.min_elem(), t.max_elem()) {
        (Some(a), Some(b)) => a > b,
        _ => true,
    }
}

pub fn classify(f: &FamilySpec, s: &FinSet) -> Result<Membership> {
    f.classify(s)
}

/// `ℱ ↾ L`.
pub fn restrict(f: &FamilySpec, l: &IndexSet) -> FamilySpec {
    FamilySpec::new(FamilyKind::Restricted(f.clone(), l.clone()))
}

/// `ℱ_[t]`; `t` must be a proper segment of `ℱ`. `ℱ_[∅] = ℱ`.
pub fn shift_family(f: &FamilySpec, t: &FinSet) -> Result<FamilySpec> {
    if t.is_empty() {
        return Ok(f.clone());
    }
    match f.classify(t)? {
        Membership::ProperSegment => Ok(FamilySpec::new(FamilyKind::Shifted(f.clone(), t.clone()))),
        Membership::InF => Err(Error::Precondition(format!("{t} is a member; nothing can follow it"))),
        Membership::Outside => Err(Error::Precondition(format!("{t} is outside the closure"))),
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            FamilyKind::Cube(k) => write!(f, "cube:{k}"),
            FamilyKind::UniformThin(o) => write!(f, "uniform:{o}"),
            FamilyKind::Explicit(e) => write!(f, "explicit:{}", e.to_json()),
            FamilyKind::Restricted(base, l) => write!(f, "restrict({base};L={l})"),
            FamilyKind::Shifted(base, t) => {
                let list: Vec<String> = t.elements().iter().map(|x| x.to_string()).collect();
                write!(f, "shift({base};t={})", list.join(","))
            }
        }
    }
}

/// Position of the `)` matching the `(` at `open`.
pub(crate) fn matching_paren(s: &str, open: usize) -> Option<usize> {
    let mut depth = 0usize;
    for (i, c) in s.char_indices().skip_while(|(i, _)| *i < open) {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}

/// Position of the first `ch` outside any parentheses or brackets.
pub(crate) fn top_level_find(s: &str, ch: char) -> Option<usize> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            c if c == ch && depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

impl FamilySpec {
    /// Parses the family text syntax. `@path` references are passed to `load`.
    pub fn parse_with(s: &str, load: &dyn Fn(&str) -> Result<String>) -> Result<FamilySpec> {
        parse_at(s.trim(), 0, load)
    }

    /// Parses without file access; `explicit:` takes inline JSON.
    pub fn parse(s: &str) -> Result<FamilySpec> {
        FamilySpec::parse_with(s, &|path| {
            Err(Error::Unsupported(format!("file references are not available here: @{path}")))
        })
    }
}

fn parse_at(s: &str, offset: usize, load: &dyn Fn(&str) -> Result<String>) -> Result<FamilySpec> {
    let shift_err = |e: Error| match e {
        Error::Parse { pos, msg } => Error::parse(pos + offset, msg),
        other => other,
    };
    if let Some(k) = s.strip_prefix("cube:") {
        let k: u32 = k.trim().parse().map_err(|_| Error::parse(offset + 5, "expected a cube size"))?;
        return Ok(FamilySpec::cube(k));
    }
    if let Some(o) = s.strip_prefix("uniform:") {
        let o: Ordinal = o.parse().map_err(|e: Error| shift_err(Error::parse(8, e.to_string())))?;
        return Ok(FamilySpec::uniform(o));
    }
    if let Some(rest) = s.strip_prefix("explicit:") {
        let text = match rest.trim().strip_prefix('@') {
            Some(path) => load(path)?,
            None => rest.to_string(),
        };
        let e = ExplicitFamily::from_json(&text).map_err(|e| shift_err(match e {
            Error::Parse { msg, .. } => Error::parse(9, msg),
            other => other,
        }))?;
        return Ok(FamilySpec::new(FamilyKind::Explicit(e)));
    }
    for (head, key) in [("restrict(", "L="), ("shift(", "t=")] {
        let Some(inner_start) = s.strip_prefix(head).map(|_| head.len()) else {
            continue;
        };
        let close = matching_paren(s, inner_start - 1)
            .ok_or_else(|| Error::parse(offset + inner_start - 1, "unbalanced parenthesis"))?;
        if close != s.len() - 1 {
            return Err(Error::parse(offset + close + 1, "trailing input after `)`"));
        }
        let inner = &s[inner_start..close];
        let semi = top_level_find(inner, ';')
            .ok_or_else(|| Error::parse(offset + inner_start, format!("expected `;{key}`")))?;
        let base = parse_at(inner[..semi].trim(), offset + inner_start, load)?;
        let arg = inner[semi + 1..].trim();
        let arg = arg
            .strip_prefix(key)
            .ok_or_else(|| Error::parse(offset + inner_start + semi + 1, format!("expected `{key}`")))?;
        let arg_offset = offset + inner_start + semi + 1 + key.len();
        return if key == "L=" {
            let l: IndexSet = arg.parse().map_err(|e| match e {
                Error::Parse { pos, msg } => Error::parse(pos + arg_offset, msg),
                other => other,
            })?;
            Ok(restrict(&base, &l))
        } else {
            let t = FinSet::parse_list(arg).map_err(|e| match e {
                Error::Parse { pos, msg } => Error::parse(pos + arg_offset, msg),
                other => other,
            })?;
            shift_family(&base, &t)
        };
    }
    Err(Error::parse(offset, format!("unknown family syntax `{s}`")))
}

impl Serialize for FamilySpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FamilySpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        FamilySpec::parse(&String::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}
