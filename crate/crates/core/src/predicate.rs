use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Props;
use crate::value::{PropertyValue, ValueKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Comparator {
    #[serde(rename = "=", alias = "==")]
    Eq,
    #[serde(rename = "!=", alias = "<>")]
    Ne,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl Comparator {
    pub fn holds(self, ord: Ordering) -> bool {
        match self {
            Comparator::Eq => ord == Ordering::Equal,
            Comparator::Ne => ord != Ordering::Equal,
            Comparator::Lt => ord == Ordering::Less,
            Comparator::Le => ord != Ordering::Greater,
            Comparator::Gt => ord == Ordering::Greater,
            Comparator::Ge => ord != Ordering::Less,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Eq => "=",
            Comparator::Ne => "!=",
            Comparator::Lt => "<",
            Comparator::Le => "<=",
            Comparator::Gt => ">",
            Comparator::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atom {
    pub key: String,
    pub op: Comparator,
    pub value: PropertyValue,
}

impl Atom {
    pub fn new(key: &str, op: Comparator, value: impl Into<PropertyValue>) -> Self {
        Atom {
            key: key.to_string(),
            op,
            value: value.into(),
        }
    }

    /// A missing key or a value of another kind fails the atom.
    pub fn eval(&self, props: &Props) -> bool {
        props
            .get(&self.key)
            .and_then(|v| v.try_cmp(&self.value, &self.key).ok())
            .is_some_and(|ord| self.op.holds(ord))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.key, self.op.symbol(), self.value)
    }
}

/// A conjunction of comparison atoms. The empty conjunction accepts everything.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Atom>", into = "Vec<Atom>")]
pub struct Predicate {
    atoms: Vec<Atom>,
}

impl TryFrom<Vec<Atom>> for Predicate {
    type Error = Error;

    fn try_from(atoms: Vec<Atom>) -> Result<Self> {
        Predicate::new(atoms)
    }
}

impl From<Predicate> for Vec<Atom> {
    fn from(p: Predicate) -> Self {
        p.atoms
    }
}

impl Predicate {
    /// Rejects conjunctions that compare one key against values of different kinds.
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        let mut kinds: BTreeMap<&str, ValueKind> = BTreeMap::new();
        for atom in &atoms {
            if atom.key.is_empty() {
                return Err(Error::MalformedPredicate("empty key".into()));
            }
            let kind = atom.value.kind();
            if let Some(&prev) = kinds.get(atom.key.as_str()) {
                if prev != kind {
                    return Err(Error::MalformedPredicate(format!(
                        "key {} compared against both {} and {}",
                        atom.key,
                        prev.name(),
                        kind.name()
                    )));
                }
            }
            kinds.insert(&atom.key, kind);
        }
        Ok(Predicate { atoms })
    }

    pub fn universal() -> Self {
        Predicate::default()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn eval(&self, props: &Props) -> bool {
        self.atoms.iter().all(|a| a.eval(props))
    }

    fn by_key(&self) -> BTreeMap<&str, Vec<&Atom>> {
        let mut map: BTreeMap<&str, Vec<&Atom>> = BTreeMap::new();
        for a in &self.atoms {
            map.entry(a.key.as_str()).or_default().push(a);
        }
        map
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// Decides whether every property map satisfying `stronger` also satisfies `weaker`.
///
/// The check runs key by key. A key absent from `weaker` is unconstrained; a
/// key constrained by `weaker` but absent from `stronger` fails, because
/// `stronger` admits maps without the key. Per key, each side reduces to an
/// interval minus a finite set of excluded points. Integers and booleans are
/// normalized to closed integer intervals, which makes them exact; floats and
/// text are treated as dense orders, which can only err towards `false`.
pub fn predicate_contains(weaker: &Predicate, stronger: &Predicate) -> Result<bool> {
    let weak = weaker.by_key();
    let strong = stronger.by_key();

    for (key, w_atoms) in &weak {
        if let Some(s_atoms) = strong.get(key) {
            let (wk, sk) = (w_atoms[0].value.kind(), s_atoms[0].value.kind());
            if wk != sk {
                return Err(Error::IncomparableKinds {
                    key: key.to_string(),
                    left: wk.name(),
                    right: sk.name(),
                });
            }
        }
    }
    // An unsatisfiable stronger side is contained in anything.
    for atoms in strong.values() {
        if Range::build(atoms).is_empty() {
            return Ok(true);
        }
    }
    for (key, w_atoms) in &weak {
        let Some(s_atoms) = strong.get(key) else {
            return Ok(false);
        };
        let w = Range::build(w_atoms);
        let s = Range::build(s_atoms);
        if !s.within(&w) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Satisfying set of the atoms on one key.
enum Range {
    Discrete(DiscreteRange),
    Dense(DenseRange),
}

impl Range {
    fn build(atoms: &[&Atom]) -> Range {
        match atoms[0].value.kind() {
            ValueKind::Int | ValueKind::Bool => Range::Discrete(DiscreteRange::build(atoms)),
            ValueKind::Float | ValueKind::Text => Range::Dense(DenseRange::build(atoms)),
        }
    }

    fn is_empty(&self) -> bool {
        match self {
            Range::Discrete(r) => r.effective().is_none(),
            Range::Dense(r) => r.effective().is_none(),
        }
    }

    /// `self ⊆ outer`, both built from atoms of the same kind.
    fn within(&self, outer: &Range) -> bool {
        match (self, outer) {
            (Range::Discrete(s), Range::Discrete(w)) => s.within(w),
            (Range::Dense(s), Range::Dense(w)) => s.within(w),
            _ => false,
        }
    }
}

struct DiscreteRange {
    lo: i128,
    hi: i128,
    excluded: Vec<i128>,
}

fn as_int(v: &PropertyValue) -> i128 {
    match v {
        PropertyValue::Int(i) => *i as i128,
        PropertyValue::Bool(b) => *b as i128,
        _ => unreachable!("discrete range over a dense kind"),
    }
}

impl DiscreteRange {
    fn build(atoms: &[&Atom]) -> Self {
        let (mut lo, mut hi) = match atoms[0].value.kind() {
            ValueKind::Bool => (0, 1),
            _ => (i64::MIN as i128, i64::MAX as i128),
        };
        let mut excluded = Vec::new();
        for a in atoms {
            let v = as_int(&a.value);
            match a.op {
                Comparator::Eq => {
                    lo = lo.max(v);
                    hi = hi.min(v);
                }
                Comparator::Ne => excluded.push(v),
                Comparator::Lt => hi = hi.min(v - 1),
                Comparator::Le => hi = hi.min(v),
                Comparator::Gt => lo = lo.max(v + 1),
                Comparator::Ge => lo = lo.max(v),
            }
        }
        excluded.sort_unstable();
        excluded.dedup();
        DiscreteRange { lo, hi, excluded }
    }

    /// Tightest closed bounds after skipping excluded endpoints; `None` if empty.
    fn effective(&self) -> Option<(i128, i128)> {
        let (mut lo, mut hi) = (self.lo, self.hi);
        while lo <= hi && self.excluded.binary_search(&lo).is_ok() {
            lo += 1;
        }
        while lo <= hi && self.excluded.binary_search(&hi).is_ok() {
            hi -= 1;
        }
        (lo <= hi).then_some((lo, hi))
    }

    fn within(&self, outer: &DiscreteRange) -> bool {
        let Some((lo, hi)) = self.effective() else {
            return true;
        };
        lo >= outer.lo
            && hi <= outer.hi
            && outer
                .excluded
                .iter()
                .all(|p| *p < lo || *p > hi || self.excluded.binary_search(p).is_ok())
    }
}

#[derive(Clone)]
struct Bound {
    value: PropertyValue,
    inclusive: bool,
}

struct DenseRange {
    lo: Option<Bound>,
    hi: Option<Bound>,
    excluded: Vec<PropertyValue>,
}

fn cmp(a: &PropertyValue, b: &PropertyValue) -> Ordering {
    a.try_cmp(b, "").expect("same kind")
}

impl DenseRange {
    fn build(atoms: &[&Atom]) -> Self {
        let mut r = DenseRange {
            lo: None,
            hi: None,
            excluded: Vec::new(),
        };
        for a in atoms {
            let b = |inclusive| Bound {
                value: a.value.clone(),
                inclusive,
            };
            match a.op {
                Comparator::Eq => {
                    r.raise_lo(b(true));
                    r.lower_hi(b(true));
                }
                Comparator::Ne => r.excluded.push(a.value.clone()),
                Comparator::Lt => r.lower_hi(b(false)),
                Comparator::Le => r.lower_hi(b(true)),
                Comparator::Gt => r.raise_lo(b(false)),
                Comparator::Ge => r.raise_lo(b(true)),
            }
        }
        r
    }

    fn raise_lo(&mut self, b: Bound) {
        let replace = match &self.lo {
            None => true,
            Some(cur) => match cmp(&b.value, &cur.value) {
                Ordering::Greater => true,
                Ordering::Equal => !b.inclusive,
                Ordering::Less => false,
            },
        };
        if replace {
            self.lo = Some(b);
        }
    }

    fn lower_hi(&mut self, b: Bound) {
        let replace = match &self.hi {
            None => true,
            Some(cur) => match cmp(&b.value, &cur.value) {
                Ordering::Less => true,
                Ordering::Equal => !b.inclusive,
                Ordering::Greater => false,
            },
        };
        if replace {
            self.hi = Some(b);
        }
    }

    fn is_excluded(&self, v: &PropertyValue) -> bool {
        self.excluded.iter().any(|x| cmp(x, v) == Ordering::Equal)
    }

    fn effective(&self) -> Option<(Option<Bound>, Option<Bound>)> {
        let fix = |b: &Option<Bound>| {
            b.clone().map(|mut b| {
                if b.inclusive && self.is_excluded(&b.value) {
                    b.inclusive = false;
                }
                b
            })
        };
        let (lo, hi) = (fix(&self.lo), fix(&self.hi));
        if let (Some(l), Some(h)) = (&lo, &hi) {
            match cmp(&l.value, &h.value) {
                Ordering::Greater => return None,
                Ordering::Equal if !(l.inclusive && h.inclusive) => return None,
                _ => {}
            }
        }
        Some((lo, hi))
    }

    fn contains_point(lo: &Option<Bound>, hi: &Option<Bound>, p: &PropertyValue) -> bool {
        let above = lo.as_ref().is_none_or(|l| match cmp(p, &l.value) {
            Ordering::Greater => true,
            Ordering::Equal => l.inclusive,
            Ordering::Less => false,
        });
        let below = hi.as_ref().is_none_or(|h| match cmp(p, &h.value) {
            Ordering::Less => true,
            Ordering::Equal => h.inclusive,
            Ordering::Greater => false,
        });
        above && below
    }

    fn within(&self, outer: &DenseRange) -> bool {
        let Some((lo, hi)) = self.effective() else {
            return true;
        };
        let lo_ok = match (&outer.lo, &lo) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(o), Some(s)) => match cmp(&s.value, &o.value) {
                Ordering::Greater => true,
                Ordering::Equal => o.inclusive || !s.inclusive,
                Ordering::Less => false,
            },
        };
        let hi_ok = match (&outer.hi, &hi) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(o), Some(s)) => match cmp(&s.value, &o.value) {
                Ordering::Less => true,
                Ordering::Equal => o.inclusive || !s.inclusive,
                Ordering::Greater => false,
            },
        };
        lo_ok
            && hi_ok
            && outer
                .excluded
                .iter()
                .all(|p| !Self::contains_point(&lo, &hi, p) || self.is_excluded(p))
    }
}
