use std::collections::{BTreeSet, HashMap};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{sixj_bounds, Label, LwData, Scalars};
use crate::error::{Error, Result};
use crate::group::{GroupElement, Signature, SingularSet};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabelEntry {
    pub id: String,
    pub degree: Value,
    pub dual: String,
    pub d: f64,
    pub b: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeltaEntry {
    pub i: String,
    pub j: String,
    pub k: String,
    pub value: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GammaEntry {
    pub i: String,
    pub j: String,
    pub k: String,
    pub n: u32,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SixjEntry {
    pub j: [String; 6],
    pub a: [u32; 4],
    pub re: f64,
    pub im: f64,
}

/// On-disk layout of tabulated data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DataFile {
    pub group: Signature,
    pub singular: Value,
    pub labels: Vec<LabelEntry>,
    #[serde(default)]
    pub delta: Vec<DeltaEntry>,
    #[serde(default)]
    pub gamma: Vec<GammaEntry>,
    #[serde(default)]
    pub sixj: Vec<SixjEntry>,
}

/// Data read from a table over a finite slice of degrees. Absent δ and 6j entries are zero.
#[derive(Debug, Clone)]
pub struct TableData {
    sig: Signature,
    singular: SingularSet,
    names: Vec<String>,
    labels: Vec<Label>,
    index: HashMap<Label, u32>,
    by_degree: HashMap<GroupElement, Vec<u32>>,
    dual: Vec<u32>,
    scalars: Vec<Scalars>,
    delta: HashMap<[u32; 3], u32>,
    gamma: HashMap<([u32; 3], u32), f64>,
    sixj: HashMap<([u32; 6], [u32; 4]), Complex64>,
}

impl TableData {
    pub fn from_file(f: &DataFile) -> Result<Self> {
        let sig = f.group.clone();
        let singular = SingularSet::from_json(&f.singular, &sig)?;
        let mut by_name: HashMap<&str, u32> = HashMap::new();
        let mut labels = Vec::with_capacity(f.labels.len());
        let mut by_degree: HashMap<GroupElement, Vec<u32>> = HashMap::new();
        for (idx, e) in f.labels.iter().enumerate() {
            let idx = idx as u32;
            if by_name.insert(e.id.as_str(), idx).is_some() {
                return Err(Error::Parse(format!("duplicate label id '{}'", e.id)));
            }
            let degree = sig.element_from_json(&e.degree)?;
            let slot = by_degree.entry(degree.clone()).or_default();
            labels.push(Label::new(degree, slot.len() as u32));
            slot.push(idx);
        }
        let id = |s: &str| by_name.get(s).copied().ok_or_else(|| Error::Parse(format!("unknown label id '{s}'")));
        let dual = f.labels.iter().map(|e| id(&e.dual)).collect::<Result<Vec<_>>>()?;
        let scalars = f.labels.iter().map(|e| Scalars { d: e.d, b: e.b, beta: e.beta }).collect();
        let mut delta = HashMap::new();
        for e in &f.delta {
            if delta.insert([id(&e.i)?, id(&e.j)?, id(&e.k)?], e.value).is_some() {
                return Err(Error::Parse(format!("duplicate delta entry ({},{},{})", e.i, e.j, e.k)));
            }
        }
        let mut gamma = HashMap::new();
        for e in &f.gamma {
            if gamma.insert(([id(&e.i)?, id(&e.j)?, id(&e.k)?], e.n), e.value).is_some() {
                return Err(Error::Parse(format!("duplicate gamma entry ({},{},{};{})", e.i, e.j, e.k, e.n)));
            }
        }
        let mut sixj = HashMap::new();
        for e in &f.sixj {
            let mut key = [0u32; 6];
            for (k, name) in key.iter_mut().zip(&e.j) {
                *k = id(name)?;
            }
            if sixj.insert((key, e.a), Complex64::new(e.re, e.im)).is_some() {
                return Err(Error::Parse(format!("duplicate sixj entry {:?} {:?}", e.j, e.a)));
            }
        }
        let names = f.labels.iter().map(|e| e.id.clone()).collect();
        let index = labels.iter().cloned().zip(0u32..).collect();
        Ok(TableData { sig, singular, names, labels, index, by_degree, dual, scalars, delta, gamma, sixj })
    }

    fn idx(&self, j: &Label) -> Result<u32> {
        self.index.get(j).copied().ok_or_else(|| Error::MissingData(format!("unknown label {j}")))
    }

    pub fn degrees(&self) -> Vec<GroupElement> {
        let mut v: Vec<_> = self.by_degree.keys().cloned().collect();
        v.sort();
        v
    }
}

impl LwData for TableData {
    fn signature(&self) -> &Signature {
        &self.sig
    }

    fn singular(&self) -> &SingularSet {
        &self.singular
    }

    fn labels(&self, g: &GroupElement) -> Result<Vec<Label>> {
        if !self.singular.is_generic(g) {
            return Err(Error::Domain(g.to_string()));
        }
        let ids = self.by_degree.get(g).ok_or_else(|| Error::MissingData(format!("degree {g} not tabulated")))?;
        Ok(ids.iter().map(|&i| self.labels[i as usize].clone()).collect())
    }

    fn dual(&self, j: &Label) -> Result<Label> {
        Ok(self.labels[self.dual[self.idx(j)? as usize] as usize].clone())
    }

    fn delta(&self, i: &Label, j: &Label, k: &Label) -> Result<u32> {
        let key = [self.idx(i)?, self.idx(j)?, self.idx(k)?];
        Ok(self.delta.get(&key).copied().unwrap_or(0))
    }

    fn scalars(&self, i: &Label) -> Result<Scalars> {
        Ok(self.scalars[self.idx(i)? as usize])
    }

    fn gamma(&self, i: &Label, j: &Label, k: &Label, n: u32) -> Result<f64> {
        let key = [self.idx(i)?, self.idx(j)?, self.idx(k)?];
        let delta = self.delta.get(&key).copied().unwrap_or(0);
        if n < 1 || n > delta {
            return Err(Error::Index(format!("gamma index {n} outside 1..={delta}")));
        }
        self.gamma.get(&(key, n)).copied().ok_or_else(|| {
            let [a, b, c] = key.map(|x| self.names[x as usize].as_str());
            Error::MissingData(format!("gamma({a},{b},{c};{n}) absent"))
        })
    }

    fn sixj(&self, j: [&Label; 6], a: [u32; 4]) -> Result<Complex64> {
        let mut key = [0u32; 6];
        for (k, l) in key.iter_mut().zip(j) {
            *k = self.idx(l)?;
        }
        Ok(self.sixj.get(&(key, a)).copied().unwrap_or_default())
    }

    fn describe(&self) -> Value {
        json!({
            "table": {
                "labels": self.labels.len(),
                "degrees": self.by_degree.len(),
                "delta_entries": self.delta.len(),
                "gamma_entries": self.gamma.len(),
                "sixj_entries": self.sixj.len(),
            }
        })
    }

    fn has_degree(&self, g: &GroupElement) -> bool {
        self.singular.is_generic(g) && self.by_degree.contains_key(g)
    }

    fn label_name(&self, j: &Label) -> String {
        self.idx(j).map(|i| self.names[i as usize].clone()).unwrap_or_else(|_| j.to_string())
    }

    fn stored_sixj(&self) -> Option<Vec<([Label; 6], [u32; 4])>> {
        let mut v: Vec<_> = self
            .sixj
            .keys()
            .map(|(k, a)| (k.map(|i| self.labels[i as usize].clone()), *a))
            .collect();
        v.sort();
        Some(v)
    }
}

/// Writes every entry of `data` whose labels all have degrees in the slice
/// (closed under negation; singular degrees dropped).
pub fn export_table(data: &dyn LwData, degrees: &[GroupElement]) -> Result<DataFile> {
    let mut slice: BTreeSet<GroupElement> = BTreeSet::new();
    for g in degrees {
        for h in [g.clone(), g.neg()] {
            if data.is_generic(&h) {
                slice.insert(h);
            }
        }
    }
    let mut by_degree: HashMap<GroupElement, Vec<Label>> = HashMap::new();
    let mut all = Vec::new();
    for g in &slice {
        let ls = data.labels(g)?;
        all.extend(ls.iter().cloned());
        by_degree.insert(g.clone(), ls);
    }
    let name = |j: &Label| data.label_name(j);
    let within = |g: &GroupElement| by_degree.get(g);

    let mut labels = Vec::new();
    for j in &all {
        let s = data.scalars(j)?;
        labels.push(LabelEntry {
            id: name(j),
            degree: j.degree.to_json(),
            dual: name(&data.dual(j)?),
            d: s.d,
            b: s.b,
            beta: s.beta,
        });
    }

    let mut delta = Vec::new();
    let mut gamma = Vec::new();
    for i in &all {
        for j in &all {
            let Some(ks) = within(&(&i.degree + &j.degree).neg()) else { continue };
            for k in ks {
                let v = data.delta(i, j, k)?;
                if v == 0 {
                    continue;
                }
                delta.push(DeltaEntry { i: name(i), j: name(j), k: name(k), value: v });
                for n in 1..=v {
                    gamma.push(GammaEntry { i: name(i), j: name(j), k: name(k), n, value: data.gamma(i, j, k, n)? });
                }
            }
        }
    }

    let mut sixj = Vec::new();
    for j1 in &all {
        for j2 in &all {
            let Some(l3) = within(&(&j1.degree + &j2.degree)) else { continue };
            for j3 in l3 {
                if data.delta(j1, j2, &data.dual(j3)?)? == 0 {
                    continue;
                }
                for j4 in &all {
                    let Some(l5) = within(&(&j3.degree + &j4.degree)) else { continue };
                    for j5 in l5 {
                        if data.delta(j3, j4, &data.dual(j5)?)? == 0 {
                            continue;
                        }
                        let Some(l6) = within(&(&j5.degree - &j1.degree)) else { continue };
                        for j6 in l6 {
                            let js = [j1, j2, j3, j4, j5, j6];
                            let bounds = sixj_bounds(data, js)?;
                            if bounds.contains(&0) {
                                continue;
                            }
                            for a1 in 1..=bounds[0] {
                                for a2 in 1..=bounds[1] {
                                    for a3 in 1..=bounds[2] {
                                        for a4 in 1..=bounds[3] {
                                            let a = [a1, a2, a3, a4];
                                            let v = data.sixj(js, a)?;
                                            if v != Complex64::default() {
                                                sixj.push(SixjEntry { j: js.map(name), a, re: v.re, im: v.im });
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    Ok(DataFile {
        group: data.signature().clone(),
        singular: data.singular().to_json()?,
        labels,
        delta,
        gamma,
        sixj,
    })
}
