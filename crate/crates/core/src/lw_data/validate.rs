//! Axiom checks over a finite, negation- and sum-closed slice of degrees.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};

use rustc_hash::FxHashMap;

use num_complex::Complex64;
use serde::Serialize;

use super::{Label, LwData, Scalars};
use crate::error::{Error, Result};
use crate::group::GroupElement;

pub const AXIOM_NAMES: [&str; 10] = [
    "involution",
    "reality_duality",
    "delta_symmetry",
    "b_recursion",
    "theta",
    "sixj_support",
    "tetrahedral_symmetry",
    "pentagon",
    "orthogonality",
    "conjugation",
];

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct AxiomCheck {
    pub name: String,
    pub pass: bool,
    pub max_residual: f64,
    pub tolerance: f64,
    pub evaluated: u64,
    pub witness: Option<String>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ValidationReport {
    pub degrees: Vec<String>,
    pub singular_set_small: bool,
    pub checks: Vec<AxiomCheck>,
    pub incomplete: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.singular_set_small && self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.max_residual).fold(0.0, f64::max)
    }
}

/// Samples, their negatives and all pairwise sums of those, keeping generic degrees.
pub fn closure(data: &dyn LwData, samples: &[GroupElement]) -> Vec<GroupElement> {
    let mut base: BTreeSet<GroupElement> = BTreeSet::new();
    for s in samples {
        base.insert(s.clone());
        base.insert(s.neg());
    }
    let mut out: BTreeSet<GroupElement> = base.iter().cloned().collect();
    for a in &base {
        for b in &base {
            if let Ok(c) = a.checked_add(b) {
                out.insert(c);
            }
        }
    }
    out.into_iter().filter(|g| data.is_generic(g)).collect()
}

struct Acc {
    name: &'static str,
    tol: f64,
    max: f64,
    count: u64,
    witness: Option<String>,
}

impl Acc {
    fn new(name: &'static str, tol: f64) -> Self {
        Acc { name, tol, max: 0.0, count: 0, witness: None }
    }

    fn residual(&mut self, r: f64, witness: impl FnOnce() -> String) {
        self.count += 1;
        let r = if r.is_nan() { f64::INFINITY } else { r };
        if r > self.max {
            self.max = r;
            if r > self.tol {
                self.witness = Some(witness());
            }
        }
    }

    fn error(&mut self, e: Error, incomplete: &mut Vec<String>, witness: impl FnOnce() -> String) {
        match e {
            Error::MissingData(m) => incomplete.push(format!("{}: {m}", self.name)),
            other => {
                self.count += 1;
                self.max = f64::INFINITY;
                self.witness = Some(format!("{} ({other})", witness()));
            }
        }
    }

    fn finish(self) -> AxiomCheck {
        AxiomCheck {
            name: self.name.to_string(),
            pass: self.max <= self.tol,
            max_residual: self.max,
            tolerance: self.tol,
            evaluated: self.count,
            witness: self.witness,
        }
    }
}

type Key6 = ([u32; 6], [u32; 4]);

/// Labels interned to integer ids so the inner loops avoid hashing group elements.
const FUSION_TABLE_CAP: usize = 1 << 24;

struct Ctx<'a> {
    data: &'a dyn LwData,
    degs: Vec<GroupElement>,
    add: Vec<Vec<Option<usize>>>,
    neg: Vec<Option<usize>>,
    labels: Vec<Label>,
    deg_of: Vec<usize>,
    by_deg: Vec<Vec<u32>>,
    dual: Vec<Option<u32>>,
    scal: Vec<Option<Scalars>>,
    /// δ for degree-consistent triples: [i][j][position of k in its degree], u32::MAX if the query failed.
    fusion: Vec<u32>,
    max_rank: usize,
    position: Vec<u32>,
    delta: RefCell<FxHashMap<[u32; 3], u32>>,
    sixj: RefCell<FxHashMap<Key6, Complex64>>,
}

impl<'a> Ctx<'a> {
    fn new(data: &'a dyn LwData, degs: Vec<GroupElement>, incomplete: &mut Vec<String>) -> Self {
        let mut kept = Vec::new();
        let mut labels = Vec::new();
        let mut deg_of = Vec::new();
        let mut by_deg = Vec::new();
        for g in degs {
            match data.labels(&g) {
                Ok(ls) => {
                    let d = kept.len();
                    let ids = ls
                        .into_iter()
                        .map(|l| {
                            labels.push(l);
                            deg_of.push(d);
                            (labels.len() - 1) as u32
                        })
                        .collect();
                    by_deg.push(ids);
                    kept.push(g);
                }
                Err(e) => incomplete.push(format!("degree {g} skipped: {e}")),
            }
        }
        let index: HashMap<&GroupElement, usize> = kept.iter().enumerate().map(|(i, g)| (g, i)).collect();
        let add: Vec<Vec<Option<usize>>> = kept
            .iter()
            .map(|a| kept.iter().map(|b| a.checked_add(b).ok().and_then(|c| index.get(&c).copied())).collect())
            .collect();
        let neg: Vec<Option<usize>> = kept.iter().map(|a| index.get(&a.neg()).copied()).collect();
        let lindex: HashMap<&Label, u32> = labels.iter().zip(0u32..).collect();
        let dual = labels.iter().map(|l| data.dual(l).ok().and_then(|d| lindex.get(&d).copied())).collect();
        let scal = labels.iter().map(|l| data.scalars(l).ok()).collect();
        let max_rank = by_deg.iter().map(Vec::len).max().unwrap_or(0);
        let mut position = vec![0u32; labels.len()];
        for ids in &by_deg {
            for (p, &i) in ids.iter().enumerate() {
                position[i as usize] = p as u32;
            }
        }
        let n = labels.len();
        let dense = n * n * max_rank <= FUSION_TABLE_CAP;
        let mut fusion = vec![u32::MAX; if dense { n * n * max_rank } else { 0 }];
        for i in (0..n).filter(|_| dense) {
            for j in 0..n {
                let third = add[deg_of[i]][deg_of[j]].and_then(|s: usize| neg[s]);
                let Some(gk) = third else { continue };
                for (p, &k) in by_deg[gk].iter().enumerate() {
                    if let Ok(v) = data.delta(&labels[i], &labels[j], &labels[k as usize]) {
                        fusion[(i * n + j) * max_rank + p] = v;
                    }
                }
            }
        }
        Ctx {
            data,
            degs: kept,
            add,
            neg,
            labels,
            deg_of,
            by_deg,
            dual,
            scal,
            fusion,
            max_rank,
            position,
            delta: RefCell::default(),
            sixj: RefCell::default(),
        }
    }

    fn name(&self, i: u32) -> String {
        self.data.label_name(&self.labels[i as usize])
    }

    fn names(&self, ids: &[u32]) -> String {
        ids.iter().map(|&i| self.name(i)).collect::<Vec<_>>().join(",")
    }

    fn du(&self, i: u32) -> Result<u32> {
        self.dual[i as usize].ok_or_else(|| {
            Error::MissingData(format!("dual of {} outside the degree slice", self.name(i)))
        })
    }

    fn d(&self, i: u32) -> Result<f64> {
        self.scal[i as usize]
            .map(|s| s.d)
            .ok_or_else(|| Error::MissingData(format!("scalars of {}", self.name(i))))
    }

    fn beta(&self, i: u32) -> Result<f64> {
        self.scal[i as usize]
            .map(|s| s.beta)
            .ok_or_else(|| Error::MissingData(format!("scalars of {}", self.name(i))))
    }

    fn delta(&self, t: [u32; 3]) -> Result<u32> {
        let [i, j, k] = t.map(|x| x as usize);
        let n = self.labels.len();
        let (gi, gj) = (self.deg_of[i], self.deg_of[j]);
        if !self.fusion.is_empty() && self.add[gi][gj].and_then(|s| self.neg[s]) == Some(self.deg_of[k]) {
            let v = self.fusion[(i * n + j) * self.max_rank + self.position[k] as usize];
            if v != u32::MAX {
                return Ok(v);
            }
        }
        if let Some(v) = self.delta.borrow().get(&t) {
            return Ok(*v);
        }
        let l = |i: u32| &self.labels[i as usize];
        let v = self.data.delta(l(t[0]), l(t[1]), l(t[2]))?;
        self.delta.borrow_mut().insert(t, v);
        Ok(v)
    }

    fn gamma(&self, t: [u32; 3], n: u32) -> Result<f64> {
        let l = |i: u32| &self.labels[i as usize];
        self.data.gamma(l(t[0]), l(t[1]), l(t[2]), n)
    }

    fn bounds(&self, j: [u32; 6]) -> Result<[u32; 4]> {
        Ok([
            self.delta([j[0], j[1], self.du(j[2])?])?,
            self.delta([j[2], j[3], self.du(j[4])?])?,
            self.delta([j[4], self.du(j[5])?, self.du(j[0])?])?,
            self.delta([j[5], self.du(j[3])?, self.du(j[1])?])?,
        ])
    }

    fn raw_sixj(&self, j: [u32; 6], a: [u32; 4]) -> Result<Complex64> {
        let l = |i: u32| &self.labels[i as usize];
        self.data.sixj([l(j[0]), l(j[1]), l(j[2]), l(j[3]), l(j[4]), l(j[5])], a)
    }

    fn sixj(&self, j: [u32; 6], a: [u32; 4]) -> Result<Complex64> {
        if let Some(v) = self.sixj.borrow().get(&(j, a)) {
            return Ok(*v);
        }
        let v = self.raw_sixj(j, a)?;
        self.sixj.borrow_mut().insert((j, a), v);
        Ok(v)
    }

    fn sum(&self, a: usize, b: usize) -> Option<usize> {
        self.add[a][b]
    }

    fn diff(&self, a: usize, b: usize) -> Option<usize> {
        self.neg[b].and_then(|nb| self.add[a][nb])
    }

    fn ids(&self, d: usize) -> &[u32] {
        &self.by_deg[d]
    }

    /// Degree triples (g1, g2, g4) with g3 = g1+g2, g5 = g3+g4, g6 = g5−g1 all in the slice.
    fn tetra_degrees(&self) -> Vec<[usize; 6]> {
        let n = self.degs.len();
        let mut out = Vec::new();
        for g1 in 0..n {
            for g2 in 0..n {
                let Some(g3) = self.sum(g1, g2) else { continue };
                for g4 in 0..n {
                    let Some(g5) = self.sum(g3, g4) else { continue };
                    let Some(g6) = self.diff(g5, g1) else { continue };
                    out.push([g1, g2, g3, g4, g5, g6]);
                }
            }
        }
        out
    }

    /// Label sextuples over `tetra_degrees` whose four fusion triples are all nonzero.
    fn admissible_sextuples(&self) -> Result<Vec<([u32; 6], [u32; 4])>> {
        let mut out = Vec::new();
        for g in self.tetra_degrees() {
            for &j1 in self.ids(g[0]) {
                for &j2 in self.ids(g[1]) {
                    for &j3 in self.ids(g[2]) {
                        if self.delta([j1, j2, self.du(j3)?])? == 0 {
                            continue;
                        }
                        for &j4 in self.ids(g[3]) {
                            for &j5 in self.ids(g[4]) {
                                if self.delta([j3, j4, self.du(j5)?])? == 0 {
                                    continue;
                                }
                                for &j6 in self.ids(g[5]) {
                                    let js = [j1, j2, j3, j4, j5, j6];
                                    let b = self.bounds(js)?;
                                    if !b.contains(&0) {
                                        out.push((js, b));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

fn indices(b: [u32; 4]) -> impl Iterator<Item = [u32; 4]> {
    (1..=b[0]).flat_map(move |a1| {
        (1..=b[1]).flat_map(move |a2| (1..=b[2]).flat_map(move |a3| (1..=b[3]).map(move |a4| [a1, a2, a3, a4])))
    })
}

/// Runs the ten axiom checks over the closure of `samples`.
pub fn validate(data: &dyn LwData, samples: &[GroupElement], tol: f64) -> ValidationReport {
    let mut incomplete = Vec::new();
    for s in samples {
        if !data.is_generic(s) {
            incomplete.push(format!("sample {s} is singular and was dropped"));
        }
    }
    let samples: Vec<GroupElement> = samples.iter().filter(|s| data.is_generic(s)).cloned().collect();
    let ctx = Ctx::new(data, closure(data, &samples), &mut incomplete);
    let sextuples = match ctx.admissible_sextuples() {
        Ok(v) => v,
        Err(e) => {
            incomplete.push(format!("sextuple enumeration: {e}"));
            Vec::new()
        }
    };
    let checks = vec![
        involution(&ctx, tol, &mut incomplete),
        reality(&ctx, tol, &mut incomplete),
        delta_symmetry(&ctx, tol, &mut incomplete),
        b_recursion(&ctx, tol, &mut incomplete),
        theta(&ctx, tol, &mut incomplete),
        support(&ctx, tol, &mut incomplete),
        tetra_symmetry(&ctx, &sextuples, tol, &mut incomplete),
        pentagon(&ctx, tol, &mut incomplete),
        orthogonality(&ctx, tol, &mut incomplete),
        conjugation(&ctx, &sextuples, tol, &mut incomplete),
    ];
    incomplete.sort();
    incomplete.dedup();
    ValidationReport {
        degrees: ctx.degs.iter().map(|g| g.to_string()).collect(),
        singular_set_small: data.singular().is_small(data.signature()),
        checks,
        incomplete,
    }
}

fn involution(ctx: &Ctx, tol: f64, inc: &mut Vec<String>) -> AxiomCheck {
    let mut acc = Acc::new("involution", tol);
    for (i, l) in ctx.labels.iter().enumerate() {
        let w = || format!("label {}", ctx.name(i as u32));
        let r = (|| -> Result<f64> {
            let d = ctx.data.dual(l)?;
            let dd = ctx.data.dual(&d)?;
            let listed = ctx.data.labels(&d.degree)?.contains(&d);
            Ok(if d.degree == l.degree.neg() && dd == *l && listed { 0.0 } else { 1.0 })
        })();
        match r {
            Ok(r) => acc.residual(r, w),
            Err(e) => acc.error(e, inc, w),
        }
    }
    acc.finish()
}

fn reality(ctx: &Ctx, tol: f64, inc: &mut Vec<String>) -> AxiomCheck {
    let mut acc = Acc::new("reality_duality", tol);
    let bad = |x: f64| !x.is_finite() || x == 0.0;
    for i in 0..ctx.labels.len() as u32 {
        let w = || format!("label {}", ctx.name(i));
        let r = (|| -> Result<f64> {
            let s = ctx.scal[i as usize].ok_or_else(|| Error::MissingData(format!("scalars of {}", ctx.name(i))))?;
            let t = ctx.scal[ctx.du(i)? as usize]
                .ok_or_else(|| Error::MissingData(format!("scalars of dual of {}", ctx.name(i))))?;
            if bad(s.d) || bad(s.b) || bad(s.beta) {
                return Ok(f64::INFINITY);
            }
            Ok((s.d - t.d).abs().max((s.b - t.b).abs()).max((s.beta - t.beta).abs()))
        })();
        match r {
            Ok(r) => acc.residual(r, w),
            Err(e) => acc.error(e, inc, w),
        }
    }
    for_zero_sum_triples(ctx, |t| {
        let w = || format!("gamma({})", ctx.names(&t));
        let r = (|| -> Result<f64> {
            let mut r: f64 = 0.0;
            for n in 1..=ctx.delta(t)? {
                if bad(ctx.gamma(t, n)?) {
                    r = f64::INFINITY;
                }
            }
            Ok(r)
        })();
        match r {
            Ok(r) => acc.residual(r, w),
            Err(e) => acc.error(e, inc, w),
        }
    });
    acc.finish()
}

fn for_zero_sum_triples(ctx: &Ctx, mut f: impl FnMut([u32; 3])) {
    let n = ctx.degs.len();
    for gi in 0..n {
        for gj in 0..n {
            let Some(gk) = ctx.sum(gi, gj).and_then(|s| ctx.neg[s]) else { continue };
            for &i in ctx.ids(gi) {
                for &j in ctx.ids(gj) {
                    for &k in ctx.ids(gk) {
                        f([i, j, k]);
                    }
                }
            }
        }
    }
}

fn delta_symmetry(ctx: &Ctx, tol: f64, inc: &mut Vec<String>) -> AxiomCheck {
    let mut acc = Acc::new("delta_symmetry", tol);
    let n = ctx.labels.len() as u32;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let t = [i, j, k];
                let w = || format!("delta({})", ctx.names(&t));
                let r = (|| -> Result<f64> {
                    let v = ctx.delta(t)?;
                    let zero_sum = ctx
                        .sum(ctx.deg_of[i as usize], ctx.deg_of[j as usize])
                        .and_then(|s| ctx.neg[s])
                        .is_some_and(|s| s == ctx.deg_of[k as usize]);
                    let sum_is_zero = zero_sum || {
                        let (a, b, c) = (&ctx.labels[i as usize], &ctx.labels[j as usize], &ctx.labels[k as usize]);
                        (&(&a.degree + &b.degree) + &c.degree).is_zero()
                    };
                    if !sum_is_zero {
                        return Ok(f64::from(v));
                    }
                    let rot = ctx.delta([j, k, i])?;
                    let refl = ctx.delta([ctx.du(k)?, ctx.du(j)?, ctx.du(i)?])?;
                    Ok(f64::from(v.abs_diff(rot).max(v.abs_diff(refl))))
                })();
                match r {
                    Ok(r) => acc.residual(r, w),
                    Err(e) => acc.error(e, inc, w),
                }
            }
        }
    }
    acc.finish()
}

fn b_recursion(ctx: &Ctx, tol: f64, inc: &mut Vec<String>) -> AxiomCheck {
    let mut acc = Acc::new("b_recursion", tol);
    let n = ctx.degs.len();
    for g in 0..n {
        for g1 in 0..n {
            let Some(g2) = ctx.diff(g, g1) else { continue };
            for &j in ctx.ids(g) {
                let w = || format!("b({}) over degrees ({}, {})", ctx.name(j), ctx.degs[g1], ctx.degs[g2]);
                let r = (|| -> Result<f64> {
                    let js = ctx.du(j)?;
                    let mut sum = 0.0;
                    for &j1 in ctx.ids(g1) {
                        for &j2 in ctx.ids(g2) {
                            let dl = ctx.delta([js, j1, j2])?;
                            if dl > 0 {
                                let b1 = ctx.scal[j1 as usize].map(|s| s.b).unwrap_or(f64::NAN);
                                let b2 = ctx.scal[j2 as usize].map(|s| s.b).unwrap_or(f64::NAN);
                                sum += b1 * b2 * f64::from(dl);
                            }
                        }
                    }
                    let b = ctx.scal[j as usize].map(|s| s.b).unwrap_or(f64::NAN);
                    Ok((b - sum).abs())
                })();
                match r {
                    Ok(r) => acc.residual(r, w),
                    Err(e) => acc.error(e, inc, w),
                }
            }
        }
    }
    acc.finish()
}

fn theta(ctx: &Ctx, tol: f64, inc: &mut Vec<String>) -> AxiomCheck {
    let mut acc = Acc::new("theta", tol);
    for_zero_sum_triples(ctx, |t| {
        let w = || format!("({})", ctx.names(&t));
        let r = (|| -> Result<f64> {
            let rev = [ctx.du(t[2])?, ctx.du(t[1])?, ctx.du(t[0])?];
            let bb = ctx.beta(t[0])? * ctx.beta(t[1])? * ctx.beta(t[2])?;
            let mut r: f64 = 0.0;
            for n in 1..=ctx.delta(t)? {
                r = r.max((ctx.gamma(t, n)? * ctx.gamma(rev, n)? * bb - 1.0).abs());
            }
            Ok(r)
        })();
        match r {
            Ok(r) => acc.residual(r, w),
            Err(e) => acc.error(e, inc, w),
        }
    });
    acc.finish()
}

fn support(ctx: &Ctx, tol: f64, inc: &mut Vec<String>) -> AxiomCheck {
    let mut acc = Acc::new("sixj_support", tol);
    for g in ctx.tetra_degrees() {
        let lists: Vec<&[u32]> = g.iter().map(|&d| ctx.ids(d)).collect();
        let mut js = [0u32; 6];
        let mut stack = [0usize; 6];
        // Odometer over all label choices of this degree pattern.
        'outer: loop {
            for (k, &s) in stack.iter().enumerate() {
                js[k] = lists[k][s];
            }
            let w = || format!("N({})", ctx.names(&js));
            let r = (|| -> Result<f64> {
                let b = ctx.bounds(js)?;
                let mut probes = Vec::new();
                if b.contains(&0) {
                    probes.push([1, 1, 1, 1]);
                } else {
                    for k in 0..4 {
                        let mut a = [1u32; 4];
                        a[k] = b[k] + 1;
                        probes.push(a);
                    }
                }
                let mut r: f64 = 0.0;
                for a in probes {
                    r = r.max(ctx.raw_sixj(js, a)?.norm());
                }
                Ok(r)
            })();
            match r {
                Ok(r) => acc.residual(r, w),
                Err(e) => acc.error(e, inc, w),
            }
            for k in (0..6).rev() {
                stack[k] += 1;
                if stack[k] < lists[k].len() {
                    continue 'outer;
                }
                stack[k] = 0;
            }
            break;
        }
    }
    if let Some(entries) = ctx.data.stored_sixj() {
        for (ls, a) in entries {
            let refs = [&ls[0], &ls[1], &ls[2], &ls[3], &ls[4], &ls[5]];
            let w = || format!("stored N({}) at {a:?}", ls.iter().map(|l| ctx.data.label_name(l)).collect::<Vec<_>>().join(","));
            match super::sixj_bounds(ctx.data, refs) {
                // In-range entries are covered by the other checks.
                Ok(b) if a.iter().zip(b).any(|(&x, b)| x < 1 || x > b) => {
                    let v = ctx.data.sixj(refs, a).map(|v| v.norm()).unwrap_or(0.0);
                    acc.residual(v, w);
                }
                Ok(_) => {}
                Err(e) => acc.error(e, inc, w),
            }
        }
    }
    acc.finish()
}

fn tetra_symmetry(ctx: &Ctx, sext: &[([u32; 6], [u32; 4])], tol: f64, inc: &mut Vec<String>) -> AxiomCheck {
    let mut acc = Acc::new("tetrahedral_symmetry", tol);
    for &(j, b) in sext {
        for a in indices(b) {
            let w = || format!("N({}) at {a:?}", ctx.names(&j));
            let r = (|| -> Result<f64> {
                let v = ctx.sixj(j, a)?;
                let s1 = ctx.sixj([j[1], ctx.du(j[2])?, ctx.du(j[0])?, j[4], j[5], j[3]], [a[0], a[2], a[3], a[1]])?;
                let s2 = ctx.sixj([j[2], j[3], j[4], ctx.du(j[5])?, j[0], ctx.du(j[1])?], [a[1], a[2], a[0], a[3]])?;
                Ok((v - s1).norm().max((v - s2).norm()))
            })();
            match r {
                Ok(r) => acc.residual(r, w),
                Err(e) => acc.error(e, inc, w),
            }
        }
    }
    acc.finish()
}

fn pentagon(ctx: &Ctx, tol: f64, inc: &mut Vec<String>) -> AxiomCheck {
    let mut acc = Acc::new("pentagon", tol);
    let n = ctx.degs.len();
    for g1 in 0..n {
        for g2 in 0..n {
            let Some(g5) = ctx.sum(g1, g2) else { continue };
            for g3 in 0..n {
                let (Some(g6), Some(gj)) = (ctx.sum(g5, g3), ctx.sum(g2, g3)) else { continue };
                for g4 in 0..n {
                    let Some(g0) = ctx.sum(g6, g4) else { continue };
                    let (Some(g7), Some(g8)) = (ctx.diff(g0, g1), ctx.sum(g3, g4)) else { continue };
                    let degs = [g0, g1, g2, g3, g4, g5, g6, g7, g8, gj];
                    if let Err(e) = pentagon_at(ctx, degs, &mut acc) {
                        acc.error(e, inc, || format!("pentagon degrees {degs:?}"));
                    }
                }
            }
        }
    }
    acc.finish()
}

/// Both sides of the pentagon for every label/index choice over fixed degrees
/// `[g0, ..., g8, g_j]`.
fn pentagon_at(ctx: &Ctx, g: [usize; 10], acc: &mut Acc) -> Result<()> {
    let du = |i: u32| ctx.du(i);
    let nz = |t: [u32; 3]| -> Result<u32> { ctx.delta(t) };
    for &j1 in ctx.ids(g[1]) {
        for &j2 in ctx.ids(g[2]) {
            for &j5 in ctx.ids(g[5]) {
                let b1 = nz([j1, j2, du(j5)?])?;
                if b1 == 0 {
                    continue;
                }
                for &j3 in ctx.ids(g[3]) {
                    for &j6 in ctx.ids(g[6]) {
                        let b2 = nz([j5, j3, du(j6)?])?;
                        if b2 == 0 {
                            continue;
                        }
                        for &j4 in ctx.ids(g[4]) {
                            for &j0 in ctx.ids(g[0]) {
                                let b3 = nz([j6, j4, du(j0)?])?;
                                if b3 == 0 {
                                    continue;
                                }
                                for &j7 in ctx.ids(g[7]) {
                                    let b0 = nz([j0, du(j7)?, du(j1)?])?;
                                    if b0 == 0 {
                                        continue;
                                    }
                                    for &j8 in ctx.ids(g[8]) {
                                        let b4 = nz([j7, du(j8)?, du(j2)?])?;
                                        let b5 = nz([j8, du(j4)?, du(j3)?])?;
                                        if b4 == 0 || b5 == 0 {
                                            continue;
                                        }
                                        let labels = [j0, j1, j2, j3, j4, j5, j6, j7, j8];
                                        pentagon_indices(ctx, g[9], labels, [b0, b1, b2, b3, b4, b5], acc)?;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn pentagon_indices(ctx: &Ctx, gj: usize, l: [u32; 9], b: [u32; 6], acc: &mut Acc) -> Result<()> {
    let [j0, j1, j2, j3, j4, j5, j6, j7, j8] = l;
    let du = |i: u32| ctx.du(i);
    for a0 in 1..=b[0] {
        for a1 in 1..=b[1] {
            for a2 in 1..=b[2] {
                for a3 in 1..=b[3] {
                    for a4 in 1..=b[4] {
                        for a5 in 1..=b[5] {
                            let mut lhs = Complex64::default();
                            for &j in ctx.ids(gj) {
                                let c1m = ctx.delta([j6, du(j)?, du(j1)?])?;
                                let c2m = ctx.delta([j, du(j3)?, du(j2)?])?;
                                let c3m = ctx.delta([j7, du(j4)?, du(j)?])?;
                                let dj = ctx.d(j)?;
                                for c1 in 1..=c1m {
                                    for c2 in 1..=c2m {
                                        let x = ctx.sixj([j1, j2, j5, j3, j6, j], [a1, a2, c1, c2])?;
                                        if x == Complex64::default() {
                                            continue;
                                        }
                                        for c3 in 1..=c3m {
                                            let y = ctx.sixj([j1, j, j6, j4, j0, j7], [c1, a3, a0, c3])?;
                                            let z = ctx.sixj([j2, j3, j, j4, j7, j8], [c2, c3, a4, a5])?;
                                            lhs += x * y * z * dj;
                                        }
                                    }
                                }
                            }
                            let mut rhs = Complex64::default();
                            for c4 in 1..=ctx.delta([j0, du(j8)?, du(j5)?])? {
                                rhs += ctx.sixj([j5, j3, j6, j4, j0, j8], [a2, a3, c4, a5])?
                                    * ctx.sixj([j1, j2, j5, j8, j0, j7], [a1, c4, a0, a4])?;
                            }
                            acc.residual((lhs - rhs).norm(), || {
                                format!(
                                    "j0..j8 = ({}) a0..a5 = ({a0},{a1},{a2},{a3},{a4},{a5}) lhs = {lhs} rhs = {rhs}",
                                    ctx.names(&l)
                                )
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn orthogonality(ctx: &Ctx, tol: f64, inc: &mut Vec<String>) -> AxiomCheck {
    let mut acc = Acc::new("orthogonality", tol);
    let n = ctx.degs.len();
    for gi in 0..n {
        for gjj in 0..n {
            let Some(gp) = ctx.sum(gi, gjj) else { continue };
            for gl in 0..n {
                let (Some(gm), Some(gn)) = (ctx.sum(gp, gl), ctx.sum(gjj, gl)) else { continue };
                if let Err(e) = ortho_at(ctx, [gi, gjj, gp, gl, gm, gn], &mut acc) {
                    acc.error(e, inc, || format!("orthogonality degrees {:?}", [gi, gjj, gl]));
                }
            }
        }
    }
    acc.finish()
}

fn ortho_at(ctx: &Ctx, g: [usize; 6], acc: &mut Acc) -> Result<()> {
    let [gi, gj, gp, gl, gm, gn] = g;
    let du = |i: u32| ctx.du(i);
    for &i in ctx.ids(gi) {
        for &j in ctx.ids(gj) {
            for &p in ctx.ids(gp) {
                let b1 = ctx.delta([i, j, du(p)?])?;
                if b1 == 0 {
                    continue;
                }
                for &l in ctx.ids(gl) {
                    for &m in ctx.ids(gm) {
                        let b2 = ctx.delta([p, l, du(m)?])?;
                        if b2 == 0 {
                            continue;
                        }
                        for &k in ctx.ids(gp) {
                            let b1p = ctx.delta([k, du(j)?, du(i)?])?;
                            let b2p = ctx.delta([m, du(l)?, du(k)?])?;
                            for a1 in 1..=b1 {
                                for a2 in 1..=b2 {
                                    for a1p in 1..=b1p {
                                        for a2p in 1..=b2p {
                                            let mut lhs = Complex64::default();
                                            for &nn in ctx.ids(gn) {
                                                let dn = ctx.d(nn)?;
                                                for a3 in 1..=ctx.delta([m, du(nn)?, du(i)?])? {
                                                    for a4 in 1..=ctx.delta([nn, du(l)?, du(j)?])? {
                                                        lhs += ctx.sixj([i, j, p, l, m, nn], [a1, a2, a3, a4])?
                                                            * ctx.sixj([k, du(j)?, i, nn, m, l], [a1p, a3, a2p, a4])?
                                                            * dn;
                                                    }
                                                }
                                            }
                                            let rhs = if k == p && a1 == a1p && a2 == a2p { 1.0 / ctx.d(k)? } else { 0.0 };
                                            acc.residual((lhs - rhs).norm(), || {
                                                format!(
                                                    "i,j,p,l,m,k = ({}) a = ({a1},{a2};{a1p},{a2p}) lhs = {lhs} rhs = {rhs}",
                                                    ctx.names(&[i, j, p, l, m, k])
                                                )
                                            });
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
    Ok(())
}

fn conjugation(ctx: &Ctx, sext: &[([u32; 6], [u32; 4])], tol: f64, inc: &mut Vec<String>) -> AxiomCheck {
    let mut acc = Acc::new("conjugation", tol);
    for &(j, b) in sext {
        for a in indices(b) {
            let w = || format!("N({}) at {a:?}", ctx.names(&j));
            let r = (|| -> Result<f64> {
                let d = |i: usize| ctx.du(j[i]);
                let v = ctx.sixj(j, a)?.conj();
                let other = ctx.sixj([d(1)?, d(0)?, d(2)?, j[4], j[3], j[5]], [a[0], a[1], a[3], a[2]])?;
                let g = ctx.gamma([j[0], j[1], d(2)?], a[0])?
                    * ctx.gamma([j[2], j[3], d(4)?], a[1])?
                    * ctx.gamma([d(0)?, j[4], d(5)?], a[2])?
                    * ctx.gamma([d(1)?, j[5], d(3)?], a[3])?;
                let mut beta = 1.0;
                for &x in &j {
                    beta *= ctx.beta(x)?;
                }
                Ok((v - other * g * beta).norm())
            })();
            match r {
                Ok(r) => acc.residual(r, w),
                Err(e) => acc.error(e, inc, w),
            }
        }
    }
    acc.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::circle;
    use crate::lw_data::Family;

    #[test]
    fn closure_of_one_sample() {
        let p = Family::p(2, 1.0);
        let c: Vec<String> = closure(&p, &[circle(1, 5)]).iter().map(|g| g.to_string()).collect();
        assert_eq!(c, ["1/5", "2/5", "3/5", "4/5"]);
    }

    #[test]
    fn families_pass_on_a_small_slice() {
        for data in [Family::p(2, 1.0), Family::m(2, 1.0), Family::f(2, 1.0, 2.0), Family::p(3, 2.0)] {
            let r = validate(&data, &[circle(1, 5), circle(1, 7)], 1e-12);
            assert!(r.passed(), "{r:#?}");
            assert!(r.incomplete.is_empty());
            assert!(r.checks.iter().all(|c| c.evaluated > 0), "{r:#?}");
        }
    }
}
