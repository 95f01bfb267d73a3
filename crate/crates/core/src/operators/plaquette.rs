//! Matrix elements of B_p^s.
//!
//! The string s is fused into every side of the plaquette walk, then each corner
//! triangle is collapsed with one 6j symbol. When the walk traverses an edge twice,
//! one side (the outer one) is fused first and the other side fuses into its new
//! label; corners are then ordered so that, at both ends of such an edge, the
//! outer side's corner is collapsed before the inner side's corner. Each corner
//! reads the labels currently carried by its half-edges.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::lw_data::{Label, LwData};
use crate::state_space::{inward_label, State};
use crate::surface::{Coloring, RibbonGraph};

#[derive(Debug, Clone)]
pub(crate) struct PlaquettePlan {
    walk: Vec<usize>,
    arrival: Vec<usize>,
    leg: Vec<usize>,
    vertex: Vec<usize>,
    /// For the inner side of a doubly traversed edge, the position of its outer side.
    outer_of: Vec<Option<usize>>,
    order: Vec<usize>,
}

impl PlaquettePlan {
    pub(crate) fn new(graph: &RibbonGraph, p: usize) -> Result<Self> {
        let walk = graph.plaquette(p).walk.clone();
        let n = walk.len();
        let arrival: Vec<usize> = walk.iter().map(|&h| graph.opp(h)).collect();
        for i in 0..n {
            if graph.next(arrival[i]) != walk[(i + 1) % n] {
                return Err(Error::Topology(format!("plaquette {p} walk is inconsistent at position {i}")));
            }
            let [a, b] = graph.edge_halves(graph.edge(walk[i]));
            if graph.vertex(a) == graph.vertex(b) {
                return Err(Error::Topology(format!(
                    "plaquette {p} contains the loop edge {}; loop edges are not supported",
                    graph.edge(walk[i])
                )));
            }
        }
        let leg: Vec<usize> = (0..n).map(|i| graph.next(walk[(i + 1) % n])).collect();
        let vertex: Vec<usize> = arrival.iter().map(|&a| graph.vertex(a)).collect();
        let pos_of: HashMap<usize, usize> = walk.iter().enumerate().map(|(i, &h)| (h, i)).collect();
        let pairs: Vec<(usize, usize)> = (0..n)
            .filter_map(|i| pos_of.get(&arrival[i]).map(|&m| (i, m)))
            .filter(|&(i, m)| i < m)
            .collect();
        if pairs.len() > 20 {
            return Err(Error::Topology(format!("plaquette {p} has too many doubly traversed edges")));
        }
        for mask in 0u32..(1 << pairs.len()) {
            let mut outer_of = vec![None; n];
            let mut deps: Vec<(usize, usize)> = Vec::new();
            for (k, &(i, m)) in pairs.iter().enumerate() {
                let (o, inner) = if mask >> k & 1 == 0 { (i, m) } else { (m, i) };
                outer_of[inner] = Some(o);
                // Corner c sits between positions c and c+1.
                deps.push((o, (inner + n - 1) % n));
                deps.push(((o + n - 1) % n, inner));
            }
            if let Some(order) = topo_order(n, &deps) {
                return Ok(PlaquettePlan { walk, arrival, leg, vertex, outer_of, order });
            }
        }
        Err(Error::Topology(format!("no consistent corner order for plaquette {p}")))
    }

    pub(crate) fn walk(&self) -> &[usize] {
        &self.walk
    }
}

fn topo_order(n: usize, deps: &[(usize, usize)]) -> Option<Vec<usize>> {
    let mut indeg = vec![0usize; n];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in deps {
        if a == b {
            return None;
        }
        out[a].push(b);
        indeg[b] += 1;
    }
    let mut order = Vec::with_capacity(n);
    let mut done = vec![false; n];
    for _ in 0..n {
        let c = (0..n).find(|&c| !done[c] && indeg[c] == 0)?;
        done[c] = true;
        order.push(c);
        for &b in &out[c] {
            indeg[b] -= 1;
        }
    }
    Some(order)
}

/// Label candidates for every position, fixed per (coloring, plaquette, degree of s).
pub(crate) struct Candidates {
    lists: Vec<Vec<Label>>,
}

impl Candidates {
    pub(crate) fn new(
        graph: &RibbonGraph,
        data: &dyn LwData,
        plan: &PlaquettePlan,
        phi: &Coloring,
        g: &GroupElement,
    ) -> Result<Self> {
        let lists = (0..plan.walk.len())
            .map(|i| {
                let along = phi.along(graph, plan.walk[i]);
                let deg = if plan.outer_of[i].is_some() { along } else { along.checked_sub(g)? };
                if !data.has_degree(&deg) {
                    return Err(Error::GaugeAdmissibility(format!(
                        "string of degree {g} needs labels of degree {deg} on edge {}",
                        graph.edge(plan.walk[i])
                    )));
                }
                data.labels(&deg)
            })
            .collect::<Result<_>>()?;
        Ok(Candidates { lists })
    }
}

struct Engine<'a> {
    data: &'a dyn LwData,
    plan: &'a PlaquettePlan,
    cands: &'a Candidates,
    s: &'a Label,
    base: Vec<Label>,
    labels: Vec<Label>,
    /// (edge, head half-edge) for every edge of the plaquette.
    edges: Vec<(usize, usize)>,
    cur: HashMap<usize, Label>,
    slots: Vec<u32>,
    jp: Vec<Option<Label>>,
    a: Vec<u32>,
    out: HashMap<State, Complex64>,
}

impl Engine<'_> {
    /// The label being fused at position i.
    fn fused(&self, i: usize) -> Result<Label> {
        match self.plan.outer_of[i] {
            None => Ok(self.base[i].clone()),
            Some(o) => self.data.dual(self.jp[o].as_ref().expect("outer side is assigned first")),
        }
    }

    fn finish(&mut self, amp: Complex64) {
        let mut labels = self.labels.clone();
        for &(e, head) in &self.edges {
            labels[e] = self.cur[&head].clone();
        }
        *self.out.entry(State { labels, slots: self.slots.clone() }).or_insert(Complex64::new(0.0, 0.0)) += amp;
    }

    fn run(&mut self, k: usize, amp: Complex64) -> Result<()> {
        if k == self.plan.order.len() {
            self.finish(amp);
            return Ok(());
        }
        let n = self.plan.walk.len();
        let c = self.plan.order[k];
        let next = (c + 1) % n;
        for pos in [c, next] {
            if self.jp[pos].is_none() {
                let fused_dual = self.data.dual(&self.fused(pos)?)?;
                let cands = self.cands;
                for cand in &cands.lists[pos] {
                    let bound = self.data.delta(cand, self.s, &fused_dual)?;
                    if bound == 0 {
                        continue;
                    }
                    let d = self.data.scalars(cand)?.d;
                    self.jp[pos] = Some(cand.clone());
                    for x in 1..=bound {
                        self.a[pos] = x;
                        self.run(k, amp * d)?;
                    }
                }
                self.jp[pos] = None;
                self.a[pos] = 0;
                return Ok(());
            }
        }
        let y = self.plan.vertex[c];
        let slot = self.slots[y];
        if slot == 0 {
            return Ok(());
        }
        let (arr, dep, leg) = (self.plan.arrival[c], self.plan.walk[next], self.plan.leg[c]);
        let j1 = self.jp[c].clone().expect("assigned");
        let jn = self.jp[next].clone().expect("assigned");
        let j3 = self.cur[&arr].clone();
        let j4 = self.cur[&dep].clone();
        let j5 = self.data.dual(&self.cur[&leg])?;
        let j6 = self.data.dual(&jn)?;
        let new_slots = self.data.delta(&j5, &jn, &self.data.dual(&j1)?)?;
        for cp in 1..=new_slots {
            let v = self.data.sixj([&j1, self.s, &j3, &j4, &j5, &j6], [self.a[c], slot, cp, self.a[next]])?;
            if v == Complex64::new(0.0, 0.0) {
                continue;
            }
            self.cur.insert(arr, j1.clone());
            self.cur.insert(dep, j6.clone());
            self.slots[y] = cp;
            self.run(k + 1, amp * v)?;
        }
        self.slots[y] = slot;
        self.cur.insert(arr, j3);
        self.cur.insert(dep, j4);
        Ok(())
    }
}

/// Nonzero entries (target state, amplitude) of B_p^s applied to one basis state.
pub(crate) fn apply_bs(
    graph: &RibbonGraph,
    data: &dyn LwData,
    plan: &PlaquettePlan,
    cands: &Candidates,
    s: &Label,
    state: &State,
) -> Result<Vec<(State, Complex64)>> {
    let n = plan.walk.len();
    let mut cur = HashMap::new();
    for i in 0..n {
        for h in [plan.walk[i], plan.arrival[i], plan.leg[i]] {
            if let std::collections::hash_map::Entry::Vacant(e) = cur.entry(h) {
                e.insert(inward_label(graph, data, &state.labels, h)?);
            }
        }
    }
    let base = (0..n).map(|i| cur[&plan.arrival[i]].clone()).collect();
    let mut edges: Vec<(usize, usize)> =
        plan.walk.iter().map(|&h| graph.edge(h)).map(|e| (e, graph.edge_halves(e)[1])).collect();
    edges.sort_unstable();
    edges.dedup();
    let mut eng = Engine {
        data,
        plan,
        cands,
        s,
        base,
        labels: state.labels.clone(),
        edges,
        cur,
        slots: state.slots.clone(),
        jp: vec![None; n],
        a: vec![0; n],
        out: HashMap::new(),
    };
    eng.run(0, Complex64::new(1.0, 0.0))?;
    let mut out: Vec<(State, Complex64)> = eng.out.into_iter().filter(|(_, z)| z.norm() != 0.0).collect();
    out.sort_by(|a, b| a.0.labels.cmp(&b.0.labels).then(a.0.slots.cmp(&b.0.slots)));
    Ok(out)
}
