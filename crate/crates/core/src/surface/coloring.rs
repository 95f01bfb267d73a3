use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::group::{GroupElement, Signature, SingularSet};

use super::RibbonGraph;

/// A G-coloring Φ: one degree per edge in its canonical direction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coloring {
    values: Vec<GroupElement>,
}

impl Coloring {
    pub fn new(values: Vec<GroupElement>) -> Self {
        Coloring { values }
    }

    pub fn zero(graph: &RibbonGraph, sig: &Signature) -> Self {
        Coloring { values: vec![sig.zero(); graph.num_edges()] }
    }

    pub fn values(&self) -> &[GroupElement] {
        &self.values
    }

    pub fn value(&self, e: usize) -> &GroupElement {
        &self.values[e]
    }

    /// Φ read along dart h.
    pub fn along(&self, graph: &RibbonGraph, h: usize) -> GroupElement {
        let v = &self.values[graph.edge(h)];
        if graph.sign(h) > 0 {
            v.clone()
        } else {
            v.neg()
        }
    }

    /// Φ on the edge at h, oriented into vertex(h).
    pub fn inward(&self, graph: &RibbonGraph, h: usize) -> GroupElement {
        self.along(graph, graph.opp(h))
    }

    /// Checks conservation at every vertex.
    pub fn check_cocycle(&self, graph: &RibbonGraph) -> Result<()> {
        if self.values.len() != graph.num_edges() {
            return Err(Error::Shape(format!("coloring has {} values for {} edges", self.values.len(), graph.num_edges())));
        }
        for v in 0..graph.num_vertices() {
            let [a, b, c] = graph.vertex_halves(v);
            let s = self.along(graph, a).checked_add(&self.along(graph, b))?.checked_add(&self.along(graph, c))?;
            if !s.is_zero() {
                return Err(Error::Topology(format!("coloring is not a cocycle at vertex {v} (net {s})")));
            }
        }
        Ok(())
    }

    /// First edge whose degree is singular, if any.
    pub fn first_singular(&self, singular: &SingularSet) -> Option<usize> {
        self.values.iter().position(|g| singular.contains(g))
    }

    pub fn check_admissible(&self, singular: &SingularSet) -> Result<()> {
        match self.first_singular(singular) {
            Some(e) => Err(Error::Admissibility { edge: e, value: self.values[e].to_string() }),
            None => Ok(()),
        }
    }

    /// Φ + g·δp.
    pub fn gauge_shift(&self, graph: &RibbonGraph, p: usize, g: &GroupElement) -> Result<Coloring> {
        let mut values = self.values.clone();
        for (e, s) in graph.boundary(p) {
            values[e] = values[e].checked_add(&g.scale(s))?;
        }
        Ok(Coloring { values })
    }

    /// Applies the shift to several plaquettes at once.
    pub fn gauge_shift_all(&self, graph: &RibbonGraph, shifts: &[GroupElement]) -> Result<Coloring> {
        let mut c = self.clone();
        for (p, g) in shifts.iter().enumerate() {
            if !g.is_zero() {
                c = c.gauge_shift(graph, p, g)?;
            }
        }
        Ok(c)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.values.iter().map(|g| g.to_json()).collect())
    }
}

/// A tree/cotree split of the edges; the leftover edges carry the holonomy.
#[derive(Debug, Clone)]
pub struct CycleBasis {
    tree: Vec<bool>,
    cotree: Vec<bool>,
    /// Non-root vertices in BFS order, each with the half-edge of its parent edge.
    order: Vec<(usize, usize)>,
    /// Non-root faces in BFS order, each with the dart through which it was reached.
    face_order: Vec<(usize, usize)>,
    leftover: Vec<usize>,
}

impl CycleBasis {
    pub fn new(graph: &RibbonGraph) -> Self {
        let ne = graph.num_edges();
        let mut tree = vec![false; ne];
        let mut seen = vec![false; graph.num_vertices()];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for h in graph.vertex_halves(v) {
                let o = graph.opp(h);
                let w = graph.vertex(o);
                if !seen[w] {
                    seen[w] = true;
                    tree[graph.edge(h)] = true;
                    order.push((w, o));
                    queue.push_back(w);
                }
            }
        }
        let mut cotree = vec![false; ne];
        let mut fseen = vec![false; graph.num_plaquettes()];
        let mut face_order = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        fseen[0] = true;
        while let Some(f) = queue.pop_front() {
            for &h in &graph.plaquette(f).walk {
                let e = graph.edge(h);
                if tree[e] || cotree[e] {
                    continue;
                }
                let o = graph.opp(h);
                let g = graph.face_of(o);
                if !fseen[g] {
                    fseen[g] = true;
                    cotree[e] = true;
                    face_order.push((g, o));
                    queue.push_back(g);
                }
            }
        }
        let leftover = (0..ne).filter(|&e| !tree[e] && !cotree[e]).collect();
        CycleBasis { tree, cotree, order, face_order, leftover }
    }

    /// Edges carrying the 2g holonomy parameters, ascending.
    pub fn holonomy_edges(&self) -> &[usize] {
        &self.leftover
    }

    pub fn is_tree(&self, e: usize) -> bool {
        self.tree[e]
    }

    pub fn is_cotree(&self, e: usize) -> bool {
        self.cotree[e]
    }

    /// The cocycle with the given holonomy values, zero on cotree edges.
    pub fn coloring(&self, graph: &RibbonGraph, sig: &Signature, hol: &[GroupElement]) -> Result<Coloring> {
        if hol.len() != self.leftover.len() {
            return Err(Error::Shape(format!(
                "surface of genus {} needs {} holonomy values, got {}",
                graph.genus(),
                self.leftover.len(),
                hol.len()
            )));
        }
        let mut values = vec![sig.zero(); graph.num_edges()];
        for (&e, g) in self.leftover.iter().zip(hol) {
            if !sig.contains(g) {
                return Err(Error::GroupArithmetic(format!("holonomy value {g} is not in the grading group")));
            }
            values[e] = g.clone();
        }
        let mut c = Coloring { values };
        for &(w, ph) in self.order.iter().rev() {
            let mut s = sig.zero();
            for h in graph.vertex_halves(w) {
                if h != ph {
                    s = s.checked_add(&c.along(graph, h))?;
                }
            }
            let e = graph.edge(ph);
            c.values[e] = if graph.sign(ph) > 0 { s.neg() } else { s };
        }
        Ok(c)
    }

    /// Face potentials that clear every cotree edge, with the root face fixed at zero.
    fn potentials(&self, graph: &RibbonGraph, phi: &Coloring, sig: &Signature) -> Result<Vec<GroupElement>> {
        let mut pot = vec![sig.zero(); graph.num_plaquettes()];
        for &(g, o) in &self.face_order {
            let e = graph.edge(o);
            let f = graph.face_of(graph.opp(o));
            // Value on e after shifting f: Φ(e) − pot_f·c_f(e); then solve for pot_g.
            let cf = coefficient(graph, f, e);
            let cg = coefficient(graph, g, e);
            let rest = phi.values[e].checked_sub(&pot[f].scale(cf))?;
            pot[g] = rest.scale(cg);
        }
        Ok(pot)
    }

    /// Gauge-invariant holonomy of a cocycle.
    pub fn holonomies(&self, graph: &RibbonGraph, phi: &Coloring, sig: &Signature) -> Result<Vec<GroupElement>> {
        phi.check_cocycle(graph)?;
        let pot = self.potentials(graph, phi, sig)?;
        self.leftover
            .iter()
            .map(|&e| {
                let mut v = phi.values[e].clone();
                for (f, g) in pot.iter().enumerate() {
                    let c = coefficient(graph, f, e);
                    if c != 0 {
                        v = v.checked_sub(&g.scale(c))?;
                    }
                }
                Ok(v)
            })
            .collect()
    }
}

/// Net multiplicity of edge e in δf.
fn coefficient(graph: &RibbonGraph, f: usize, e: usize) -> i64 {
    graph.plaquette(f).walk.iter().filter(|&&h| graph.edge(h) == e).map(|&h| -graph.sign(h)).sum()
}

/// Searches gauge shifts (root plaquette fixed) that make Φ admissible.
///
/// Plaquettes are assigned in order; an edge is tested once both of its
/// plaquettes carry a shift. Returns the shifts and the shifted coloring.
pub fn admissible_representative(
    graph: &RibbonGraph,
    phi: &Coloring,
    singular: &SingularSet,
    candidates: &[GroupElement],
    node_limit: usize,
) -> Result<(Vec<GroupElement>, Coloring)> {
    representative_avoiding(graph, phi, &|g| singular.contains(g), candidates, node_limit)
}

/// As [`admissible_representative`], rejecting every edge value for which `bad` holds.
pub fn representative_avoiding(
    graph: &RibbonGraph,
    phi: &Coloring,
    bad: &dyn Fn(&GroupElement) -> bool,
    candidates: &[GroupElement],
    node_limit: usize,
) -> Result<(Vec<GroupElement>, Coloring)> {
    let nf = graph.num_plaquettes();
    let zero = match phi.values.first() {
        Some(g) => g.scale(0),
        None => return Ok((Vec::new(), phi.clone())),
    };
    let mut ready: Vec<Vec<usize>> = vec![Vec::new(); nf];
    for e in 0..graph.num_edges() {
        let [a, b] = graph.edge_halves(e);
        ready[graph.face_of(a).max(graph.face_of(b))].push(e);
    }
    let coeffs: Vec<Vec<(usize, i64)>> = (0..graph.num_edges())
        .map(|e| {
            let [a, b] = graph.edge_halves(e);
            let mut fs = vec![graph.face_of(a), graph.face_of(b)];
            fs.dedup();
            fs.into_iter().map(|f| (f, coefficient(graph, f, e))).filter(|&(_, c)| c != 0).collect()
        })
        .collect();
    let value = |e: usize, pot: &[GroupElement]| -> GroupElement {
        let mut v = phi.values[e].clone();
        for &(f, c) in &coeffs[e] {
            v = &v + &pot[f].scale(c);
        }
        v
    };
    let mut pot = vec![zero.clone(); nf];
    if ready[0].iter().any(|&e| bad(&value(e, &pot))) {
        return Err(Error::GaugeAdmissibility(
            "an edge bounded only by the root plaquette is singular in every gauge".into(),
        ));
    }
    let mut pool = vec![zero];
    for c in candidates {
        if !pool.contains(c) {
            pool.push(c.clone());
        }
    }
    let mut choice = vec![0usize; nf];
    let mut nodes = 0usize;
    let mut f = 1;
    while f < nf {
        let mut placed = false;
        while choice[f] < pool.len() {
            nodes += 1;
            if nodes > node_limit {
                return Err(Error::GaugeAdmissibility(format!(
                    "no admissible gauge found within {node_limit} trials"
                )));
            }
            pot[f] = pool[choice[f]].clone();
            choice[f] += 1;
            if ready[f].iter().all(|&e| !bad(&value(e, &pot))) {
                placed = true;
                break;
            }
        }
        if placed {
            f += 1;
        } else {
            choice[f] = 0;
            if f == 1 {
                return Err(Error::GaugeAdmissibility("no admissible gauge among the candidate shifts".into()));
            }
            f -= 1;
        }
    }
    let shifted = phi.gauge_shift_all(graph, &pot)?;
    Ok((pot, shifted))
}
