//! Graded Levin-Wen data: labels, multiplicities, scalars, γ and modified 6j symbols.

mod family;
mod table;
mod validate;

use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::group::{GroupElement, Signature, SingularSet};

pub use family::{Family, FamilyKind};
pub use table::{export_table, DataFile, TableData};
pub use validate::{closure, validate, AxiomCheck, ValidationReport, AXIOM_NAMES};

/// A simple-object label: a degree and a tag distinguishing labels of equal degree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    pub degree: GroupElement,
    pub tag: u32,
}

impl Label {
    pub fn new(degree: GroupElement, tag: u32) -> Self {
        Label { degree, tag }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.degree, self.tag)
    }
}

/// The three scalars attached to a label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scalars {
    pub d: f64,
    pub b: f64,
    pub beta: f64,
}

/// Uniform query interface over tabulated data and parametric families.
pub trait LwData: Send + Sync {
    fn signature(&self) -> &Signature;
    fn singular(&self) -> &SingularSet;
    /// I_g in provider order.
    fn labels(&self, g: &GroupElement) -> Result<Vec<Label>>;
    fn dual(&self, j: &Label) -> Result<Label>;
    fn delta(&self, i: &Label, j: &Label, k: &Label) -> Result<u32>;
    fn scalars(&self, i: &Label) -> Result<Scalars>;
    /// γ^n_{ijk}, 1 ≤ n ≤ δ_{ijk}.
    fn gamma(&self, i: &Label, j: &Label, k: &Label, n: u32) -> Result<f64>;
    /// N^{j1 j2 j3}_{j4 j5 j6}(a1 a2; a3 a4).
    fn sixj(&self, j: [&Label; 6], a: [u32; 4]) -> Result<Complex64>;
    /// A JSON description embedded in reports.
    fn describe(&self) -> Value;

    fn is_generic(&self, g: &GroupElement) -> bool {
        self.singular().is_generic(g)
    }

    /// Whether labels of degree g can be produced (tables only know a finite slice).
    fn has_degree(&self, g: &GroupElement) -> bool {
        self.is_generic(g)
    }

    fn label_name(&self, j: &Label) -> String {
        j.to_string()
    }

    /// Explicitly stored 6j keys, for providers that have them.
    fn stored_sixj(&self) -> Option<Vec<([Label; 6], [u32; 4])>> {
        None
    }
}

/// Admissible ranges of the four 6j indices:
/// δ_{j1 j2 j3*}, δ_{j3 j4 j5*}, δ_{j5 j6* j1*}, δ_{j6 j4* j2*}.
pub fn sixj_bounds(data: &dyn LwData, j: [&Label; 6]) -> Result<[u32; 4]> {
    let du = |x: &Label| data.dual(x);
    Ok([
        data.delta(j[0], j[1], &du(j[2])?)?,
        data.delta(j[2], j[3], &du(j[4])?)?,
        data.delta(j[4], &du(j[5])?, &du(j[0])?)?,
        data.delta(j[5], &du(j[3])?, &du(j[1])?)?,
    ])
}

/// Parses a family spec such as `P:3:2`, `M:2:1` or `F:2:1:2`.
pub fn parse_family(spec: &str) -> Result<Family> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::Parse(format!("bad family spec '{spec}' (expected P:N:c, M:N:c or F:N:c:gamma0)"));
    let kind = match parts.first().copied() {
        Some("P") => FamilyKind::P,
        Some("M") => FamilyKind::M,
        Some("F") => FamilyKind::F,
        _ => return Err(bad()),
    };
    let want = if kind == FamilyKind::F { 4 } else { 3 };
    if parts.len() != want {
        return Err(bad());
    }
    let n: u32 = parts[1].parse().map_err(|_| bad())?;
    let c: f64 = parts[2].parse().map_err(|_| bad())?;
    let gamma0: f64 = if kind == FamilyKind::F { parts[3].parse().map_err(|_| bad())? } else { 1.0 };
    Family::new(kind, n, c, gamma0)
}

/// Reads a data file: either a family selector or a full table.
pub fn load_data(path: &Path) -> Result<Box<dyn LwData>> {
    let text = std::fs::read_to_string(path)?;
    data_from_json(&serde_json::from_str(&text)?)
}

pub fn data_from_json(v: &Value) -> Result<Box<dyn LwData>> {
    if let Some(kind) = v.get("family") {
        let kind = kind.as_str().ok_or_else(|| Error::Parse("family must be a string".into()))?;
        let n = v.get("N").and_then(Value::as_u64).ok_or_else(|| Error::Parse("family needs N".into()))?;
        let c = v.get("c").and_then(Value::as_f64).ok_or_else(|| Error::Parse("family needs c".into()))?;
        let spec = match v.get("gamma0").and_then(Value::as_f64) {
            Some(g0) => format!("{kind}:{n}:{c}:{g0}"),
            None => format!("{kind}:{n}:{c}"),
        };
        return Ok(Box::new(parse_family(&spec)?));
    }
    let file: DataFile = serde_json::from_value(v.clone())?;
    Ok(Box::new(TableData::from_file(&file)?))
}
