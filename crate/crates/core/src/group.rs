//! Exact arithmetic in products of ℚ/ℤ, ℤ and cyclic groups, plus singular sets.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// One factor of a product group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Factor {
    QmodZ,
    Z,
    Zmod { n: i64 },
}

impl Factor {
    fn zero(self) -> Coord {
        match self {
            Factor::QmodZ => Coord::Circle(Rational64::zero()),
            Factor::Z => Coord::Int(0),
            Factor::Zmod { n } => Coord::Mod { value: 0, n },
        }
    }

    fn is_finite(self) -> bool {
        matches!(self, Factor::Zmod { .. })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type")]
enum SignatureRepr {
    #[serde(rename = "product")]
    Product { factors: Vec<Factor> },
    QmodZ,
    Z,
    Zmod { n: i64 },
}

/// The shape of a product group ℚ/ℤ^a × ℤ^b × ∏ ℤ/nᵢ, factors in any order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SignatureRepr", into = "SignatureRepr")]
pub struct Signature {
    factors: Vec<Factor>,
}

impl TryFrom<SignatureRepr> for Signature {
    type Error = Error;

    fn try_from(r: SignatureRepr) -> Result<Self> {
        match r {
            SignatureRepr::Product { factors } => Signature::new(factors),
            SignatureRepr::QmodZ => Signature::new(vec![Factor::QmodZ]),
            SignatureRepr::Z => Signature::new(vec![Factor::Z]),
            SignatureRepr::Zmod { n } => Signature::new(vec![Factor::Zmod { n }]),
        }
    }
}

impl From<Signature> for SignatureRepr {
    fn from(s: Signature) -> Self {
        SignatureRepr::Product { factors: s.factors }
    }
}

impl Signature {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Parse("group signature needs at least one factor".into()));
        }
        for f in &factors {
            if let Factor::Zmod { n } = f {
                if *n < 1 {
                    return Err(Error::Parse(format!("cyclic factor needs n >= 1, got {n}")));
                }
            }
        }
        Ok(Signature { factors })
    }

    /// ℚ/ℤ alone.
    pub fn circle() -> Self {
        Signature { factors: vec![Factor::QmodZ] }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn is_finite(&self) -> bool {
        self.factors.iter().all(|f| f.is_finite())
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement { coords: self.factors.iter().map(|f| f.zero()).collect() }
    }

    /// Builds an element from one rational/integer per factor.
    pub fn element(&self, parts: &[Rational64]) -> Result<GroupElement> {
        if parts.len() != self.factors.len() {
            return Err(Error::GroupArithmetic(format!(
                "expected {} coordinates, got {}",
                self.factors.len(),
                parts.len()
            )));
        }
        let coords = self
            .factors
            .iter()
            .zip(parts)
            .map(|(f, r)| match f {
                Factor::QmodZ => Ok(Coord::Circle(wrap_unit(*r))),
                Factor::Z | Factor::Zmod { .. } if !r.is_integer() => Err(Error::GroupArithmetic(
                    format!("integer coordinate expected, got {r}"),
                )),
                Factor::Z => Ok(Coord::Int(r.to_integer())),
                Factor::Zmod { n } => Ok(Coord::Mod { value: r.to_integer().rem_euclid(*n), n: *n }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GroupElement { coords })
    }

    /// Parses "1/5", "3" (single factor) or "(1/5,2)".
    pub fn parse(&self, s: &str) -> Result<GroupElement> {
        let t = s.trim();
        let inner = t.strip_prefix('(').and_then(|t| t.strip_suffix(')')).unwrap_or(t);
        let parts = inner.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?;
        self.element(&parts)
    }

    /// Accepts a JSON string or an array of strings/numbers.
    pub fn element_from_json(&self, v: &Value) -> Result<GroupElement> {
        match v {
            Value::String(s) => self.parse(s),
            Value::Number(n) => self.parse(&n.to_string()),
            Value::Array(items) => {
                let parts = items
                    .iter()
                    .map(|x| match x {
                        Value::String(s) => parse_rational(s),
                        Value::Number(n) => parse_rational(&n.to_string()),
                        _ => Err(Error::Parse(format!("bad group coordinate {x}"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                self.element(&parts)
            }
            _ => Err(Error::Parse(format!("bad group element {v}"))),
        }
    }

    /// Whether `x` carries this signature.
    pub fn contains(&self, x: &GroupElement) -> bool {
        x.coords.len() == self.factors.len()
            && x.coords.iter().zip(&self.factors).all(|(c, f)| {
                matches!(
                    (c, f),
                    (Coord::Circle(_), Factor::QmodZ)
                        | (Coord::Int(_), Factor::Z)
                        | (Coord::Mod { .. }, Factor::Zmod { .. })
                ) && match (c, f) {
                    (Coord::Mod { n, .. }, Factor::Zmod { n: m }) => n == m,
                    _ => true,
                }
            })
    }
}

fn parse_rational(s: &str) -> Result<Rational64> {
    let s = s.trim();
    let bad = || Error::Parse(format!("cannot parse rational '{s}'"));
    match s.split_once('/') {
        Some((a, b)) => {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let b: i64 = b.trim().parse().map_err(|_| bad())?;
            if b == 0 {
                return Err(bad());
            }
            Ok(Rational64::new(a, b))
        }
        None => Ok(Rational64::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

fn wrap_unit(r: Rational64) -> Rational64 {
    r - r.floor()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Coord {
    Circle(Rational64),
    Int(i64),
    Mod { value: i64, n: i64 },
}

impl Coord {
    fn add(self, o: Coord) -> Option<Coord> {
        match (self, o) {
            (Coord::Circle(a), Coord::Circle(b)) => Some(Coord::Circle(wrap_unit(a + b))),
            (Coord::Int(a), Coord::Int(b)) => Some(Coord::Int(a + b)),
            (Coord::Mod { value: a, n }, Coord::Mod { value: b, n: m }) if n == m => {
                Some(Coord::Mod { value: (a + b).rem_euclid(n), n })
            }
            _ => None,
        }
    }

    fn neg(self) -> Coord {
        match self {
            Coord::Circle(a) => Coord::Circle(wrap_unit(-a)),
            Coord::Int(a) => Coord::Int(-a),
            Coord::Mod { value, n } => Coord::Mod { value: (-value).rem_euclid(n), n },
        }
    }

    fn scale(self, k: i64) -> Coord {
        match self {
            Coord::Circle(a) => Coord::Circle(wrap_unit(a * Rational64::from_integer(k))),
            Coord::Int(a) => Coord::Int(a * k),
            Coord::Mod { value, n } => Coord::Mod { value: (value * k).rem_euclid(n), n },
        }
    }

    fn is_zero(self) -> bool {
        match self {
            Coord::Circle(a) => a.is_zero(),
            Coord::Int(a) => a == 0,
            Coord::Mod { value, .. } => value == 0,
        }
    }

    fn text(self) -> String {
        match self {
            Coord::Circle(a) => a.to_string(),
            Coord::Int(a) => a.to_string(),
            Coord::Mod { value, .. } => value.to_string(),
        }
    }

    /// Size of the representative, used to order probe candidates.
    fn height(self) -> i64 {
        match self {
            Coord::Circle(a) => *a.denom(),
            Coord::Int(a) => a.abs(),
            Coord::Mod { value, .. } => value,
        }
    }
}

/// An element in canonical form: circle coordinates reduced into [0,1), cyclic ones into [0,n).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    coords: Vec<Coord>,
}

impl GroupElement {
    pub fn checked_add(&self, o: &GroupElement) -> Result<GroupElement> {
        if self.coords.len() != o.coords.len() {
            return Err(Error::GroupArithmetic(format!("signature mismatch: {self} + {o}")));
        }
        let coords = self
            .coords
            .iter()
            .zip(&o.coords)
            .map(|(a, b)| a.add(*b))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::GroupArithmetic(format!("signature mismatch: {self} + {o}")))?;
        Ok(GroupElement { coords })
    }

    pub fn checked_sub(&self, o: &GroupElement) -> Result<GroupElement> {
        self.checked_add(&o.neg())
    }

    pub fn neg(&self) -> GroupElement {
        GroupElement { coords: self.coords.iter().map(|c| c.neg()).collect() }
    }

    /// k·x.
    pub fn scale(&self, k: i64) -> GroupElement {
        GroupElement { coords: self.coords.iter().map(|c| c.scale(k)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// The first circle coordinate, if any.
    pub fn circle_part(&self) -> Option<Rational64> {
        self.coords.iter().find_map(|c| match c {
            Coord::Circle(a) => Some(*a),
            _ => None,
        })
    }

    pub fn height(&self) -> i64 {
        self.coords.iter().map(|c| c.height()).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> Value {
        if self.coords.len() == 1 {
            json!(self.coords[0].text())
        } else {
            Value::Array(self.coords.iter().map(|c| json!(c.text())).collect())
        }
    }
}

/// Sum of same-signature elements. Panics on a signature mismatch; use
/// [`GroupElement::checked_add`] where inputs are not already known to agree.
impl std::ops::Add for &GroupElement {
    type Output = GroupElement;
    fn add(self, o: &GroupElement) -> GroupElement {
        self.checked_add(o).expect("group signature mismatch")
    }
}

impl std::ops::Sub for &GroupElement {
    type Output = GroupElement;
    fn sub(self, o: &GroupElement) -> GroupElement {
        self.checked_sub(o).expect("group signature mismatch")
    }
}

impl std::ops::Neg for &GroupElement {
    type Output = GroupElement;
    fn neg(self) -> GroupElement {
        GroupElement::neg(self)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.len() == 1 {
            write!(f, "{}", self.coords[0].text())
        } else {
            let parts: Vec<String> = self.coords.iter().map(|c| c.text()).collect();
            write!(f, "({})", parts.join(","))
        }
    }
}

/// The circle element a/q.
pub fn circle(a: i64, q: i64) -> GroupElement {
    Signature::circle().element(&[Rational64::new(a, q)]).expect("nonzero denominator")
}

/// Orders elements by denominator/height first, then canonically.
pub fn simplicity_order(a: &GroupElement, b: &GroupElement) -> Ordering {
    a.height().cmp(&b.height()).then_with(|| a.cmp(b))
}

/// The singular set X ⊂ G.
#[derive(Clone)]
pub enum SingularSet {
    /// {x : n·x = 0}.
    TorsionDividing(i64),
    /// An explicit finite list, closed under negation.
    List(Vec<GroupElement>),
    /// A caller-supplied membership test; must be symmetric.
    Predicate(Arc<dyn Fn(&GroupElement) -> bool + Send + Sync>),
}

impl fmt::Debug for SingularSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SingularSet::TorsionDividing(n) => write!(f, "TorsionDividing({n})"),
            SingularSet::List(v) => f.debug_tuple("List").field(v).finish(),
            SingularSet::Predicate(_) => write!(f, "Predicate(..)"),
        }
    }
}

impl SingularSet {
    /// Explicit list; rejects lists that are not closed under negation.
    pub fn list(elements: Vec<GroupElement>) -> Result<Self> {
        let mut v = elements;
        v.sort();
        v.dedup();
        if let Some(x) = v.iter().find(|x| v.binary_search(&x.neg()).is_err()) {
            return Err(Error::Parse(format!("singular list not symmetric: {x} present, -{x} missing")));
        }
        Ok(SingularSet::List(v))
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        match self {
            SingularSet::TorsionDividing(n) => x.scale(*n).is_zero(),
            SingularSet::List(v) => v.binary_search(x).is_ok(),
            SingularSet::Predicate(p) => p(x),
        }
    }

    pub fn is_generic(&self, x: &GroupElement) -> bool {
        !self.contains(x)
    }

    /// Smallness as far as it can be decided: fails only for a nonempty X in a finite group.
    pub fn is_small(&self, sig: &Signature) -> bool {
        if !sig.is_finite() {
            return true;
        }
        match self {
            SingularSet::List(v) => v.is_empty(),
            SingularSet::TorsionDividing(_) => false,
            SingularSet::Predicate(p) => !p(&sig.zero()),
        }
    }

    pub fn from_json(v: &Value, sig: &Signature) -> Result<Self> {
        let ty = v.get("type").and_then(Value::as_str).unwrap_or_default();
        match ty {
            "torsion_dividing" => {
                let n = v
                    .get("n")
                    .and_then(Value::as_i64)
                    .filter(|n| *n >= 1)
                    .ok_or_else(|| Error::Parse("torsion_dividing needs integer n >= 1".into()))?;
                Ok(SingularSet::TorsionDividing(n))
            }
            "list" => {
                let items = v
                    .get("elements")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::Parse("list singular set needs 'elements'".into()))?;
                let els = items.iter().map(|x| sig.element_from_json(x)).collect::<Result<Vec<_>>>()?;
                SingularSet::list(els)
            }
            _ => Err(Error::Parse(format!("unknown singular set {v}"))),
        }
    }

    pub fn to_json(&self) -> Result<Value> {
        match self {
            SingularSet::TorsionDividing(n) => Ok(json!({"type": "torsion_dividing", "n": n})),
            SingularSet::List(v) => Ok(json!({
                "type": "list",
                "elements": v.iter().map(GroupElement::to_json).collect::<Vec<_>>()
            })),
            SingularSet::Predicate(_) => Err(Error::Parse("predicate singular sets cannot be serialized".into())),
        }
    }
}

/// Circle elements a/q in order of increasing q, then a, for 2 ≤ q ≤ max_q.
pub fn small_denominators(sig: &Signature, max_q: i64) -> impl Iterator<Item = GroupElement> + '_ {
    let slot = sig.factors().iter().position(|f| *f == Factor::QmodZ);
    (2..=max_q).flat_map(move |q| {
        (1..q).filter_map(move |a| {
            let slot = slot?;
            if num_integer_gcd(a, q) != 1 {
                return None;
            }
            let parts: Vec<Rational64> = sig
                .factors()
                .iter()
                .enumerate()
                .map(|(i, _)| if i == slot { Rational64::new(a, q) } else { Rational64::zero() })
                .collect();
            sig.element(&parts).ok()
        })
    })
}

fn num_integer_gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}
