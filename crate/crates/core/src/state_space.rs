//! Basis of H(Γ,Φ), the diagonal η operator and the two inner products.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lw_data::{Label, LwData};
use crate::surface::{Coloring, RibbonGraph};

pub const DEFAULT_DIM_CAP: usize = 8192;

/// How the basis is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SpaceOptions {
    /// Drop the slot σ0(v) = 0 so every basis state satisfies fusion.
    pub strict_fusion: bool,
    pub dim_cap: usize,
}

impl Default for SpaceOptions {
    fn default() -> Self {
        SpaceOptions { strict_fusion: false, dim_cap: DEFAULT_DIM_CAP }
    }
}

/// A basis state: one label per edge (canonical direction) and one slot per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct State {
    pub labels: Vec<Label>,
    pub slots: Vec<u32>,
}

/// Label on the edge at half-edge h, oriented into vertex(h).
pub fn inward_label(graph: &RibbonGraph, data: &dyn LwData, labels: &[Label], h: usize) -> Result<Label> {
    let e = graph.edge(h);
    if graph.edge_halves(e)[1] == h {
        Ok(labels[e].clone())
    } else {
        data.dual(&labels[e])
    }
}

/// δ(v) for the inward labels in the stored cyclic order.
pub fn vertex_delta(graph: &RibbonGraph, data: &dyn LwData, labels: &[Label], v: usize) -> Result<u32> {
    let [a, b, c] = graph.vertex_halves(v);
    data.delta(
        &inward_label(graph, data, labels, a)?,
        &inward_label(graph, data, labels, b)?,
        &inward_label(graph, data, labels, c)?,
    )
}

#[derive(Debug, Clone)]
pub struct StateSpace {
    coloring: Coloring,
    options: SpaceOptions,
    states: Vec<State>,
    index: HashMap<State, usize>,
    deltas: Vec<Vec<u32>>,
    eta: Vec<f64>,
    id: u64,
}

impl StateSpace {
    /// Enumerates St(Φ) in the deterministic order: edges ascending with labels in
    /// provider order, then vertex slots ascending.
    pub fn new(graph: &RibbonGraph, coloring: &Coloring, data: &dyn LwData, options: SpaceOptions) -> Result<Self> {
        coloring.check_cocycle(graph)?;
        coloring.check_admissible(data.singular())?;
        let choices = coloring
            .values()
            .iter()
            .map(|g| data.labels(g))
            .collect::<Result<Vec<_>>>()?;
        // Vertices become checkable once their highest edge is assigned.
        let mut ready: Vec<Vec<usize>> = vec![Vec::new(); graph.num_edges()];
        for v in 0..graph.num_vertices() {
            let last = graph.vertex_halves(v).iter().map(|&h| graph.edge(h)).max().unwrap_or(0);
            ready[last].push(v);
        }
        let lo = u32::from(options.strict_fusion);
        let mut states = Vec::new();
        let mut deltas = Vec::new();
        let mut labels: Vec<Label> = Vec::with_capacity(graph.num_edges());
        let mut delta = vec![0u32; graph.num_vertices()];
        let mut pos = vec![0usize; graph.num_edges()];
        let ne = graph.num_edges();
        let mut e = 0usize;
        loop {
            if e == ne {
                push_slots(&labels, &delta, lo, options.dim_cap, &mut states, &mut deltas)?;
                e -= 1;
                labels.pop();
                pos[e] += 1;
                continue;
            }
            if pos[e] >= choices[e].len() {
                pos[e] = 0;
                if e == 0 {
                    break;
                }
                e -= 1;
                labels.pop();
                pos[e] += 1;
                continue;
            }
            labels.push(choices[e][pos[e]].clone());
            let mut ok = true;
            for &v in &ready[e] {
                delta[v] = vertex_delta(graph, data, &labels, v)?;
                if delta[v] < lo {
                    ok = false;
                }
            }
            if ok {
                e += 1;
            } else {
                labels.pop();
                pos[e] += 1;
            }
        }
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let mut space = StateSpace {
            coloring: coloring.clone(),
            options,
            states,
            index,
            deltas,
            eta: Vec::new(),
            id: 0,
        };
        space.eta = space.states.iter().map(|s| eta_entry(graph, data, s)).collect::<Result<_>>()?;
        let mut hasher = DefaultHasher::new();
        coloring.hash(&mut hasher);
        options.strict_fusion.hash(&mut hasher);
        space.id = hasher.finish();
        Ok(space)
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn coloring(&self) -> &Coloring {
        &self.coloring
    }

    pub fn options(&self) -> SpaceOptions {
        self.options
    }

    /// Fingerprint of (coloring, convention), used to match operator domains.
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &State {
        &self.states[i]
    }

    pub fn index_of(&self, s: &State) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// δ(v) of basis state i.
    pub fn delta(&self, i: usize, v: usize) -> u32 {
        self.deltas[i][v]
    }

    pub fn eta_diagonal(&self) -> &[f64] {
        &self.eta
    }

    /// η as an operator.
    pub fn eta(&self) -> LinearOperator {
        let m = DMatrix::from_diagonal(&DVector::from_iterator(self.dim(), self.eta.iter().map(|&x| Complex64::new(x, 0.0))));
        LinearOperator::new(self, self, m)
    }

    fn check_vec(&self, v: &DVector<Complex64>) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::Shape(format!("vector of length {} in a space of dimension {}", v.len(), self.dim())));
        }
        Ok(())
    }

    /// ⟨ψ|φ⟩₊, antilinear in ψ.
    pub fn inner_plus(&self, psi: &DVector<Complex64>, phi: &DVector<Complex64>) -> Result<Complex64> {
        self.check_vec(psi)?;
        self.check_vec(phi)?;
        Ok(psi.dotc(phi))
    }

    /// ⟨ψ|η⁻¹φ⟩₊.
    pub fn inner_indef(&self, psi: &DVector<Complex64>, phi: &DVector<Complex64>) -> Result<Complex64> {
        self.check_vec(psi)?;
        self.check_vec(phi)?;
        Ok(psi.iter().zip(phi.iter()).zip(&self.eta).map(|((a, b), &e)| a.conj() * b / e).sum())
    }

    /// Basis map for export.
    pub fn to_json(&self, data: &dyn LwData) -> Value {
        let basis: Vec<Value> = self
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| {
                json!({
                    "index": i,
                    "labels": s.labels.iter().map(|l| data.label_name(l)).collect::<Vec<_>>(),
                    "slots": s.slots,
                    "eta": self.eta[i],
                })
            })
            .collect();
        json!({
            "coloring": self.coloring.to_json(),
            "strict_fusion": self.options.strict_fusion,
            "dimension": self.dim(),
            "basis": basis,
        })
    }
}

fn push_slots(
    labels: &[Label],
    delta: &[u32],
    lo: u32,
    cap: usize,
    states: &mut Vec<State>,
    deltas: &mut Vec<Vec<u32>>,
) -> Result<()> {
    let nv = delta.len();
    let mut slots: Vec<u32> = vec![lo; nv];
    loop {
        if states.len() >= cap {
            return Err(Error::DimensionCap { reached: states.len() + 1, cap });
        }
        states.push(State { labels: labels.to_vec(), slots: slots.clone() });
        deltas.push(delta.to_vec());
        let mut v = nv;
        loop {
            if v == 0 {
                return Ok(());
            }
            v -= 1;
            if slots[v] < delta[v] {
                slots[v] += 1;
                break;
            }
            slots[v] = lo;
        }
    }
}

/// ∏d / (∏γ ∏β), with γ := 1 on an empty slot.
fn eta_entry(graph: &RibbonGraph, data: &dyn LwData, s: &State) -> Result<f64> {
    let mut num = 1.0;
    let mut den = 1.0;
    for l in &s.labels {
        let sc = data.scalars(l)?;
        num *= sc.d;
        den *= sc.beta;
    }
    for v in 0..graph.num_vertices() {
        if s.slots[v] == 0 {
            continue;
        }
        let [a, b, c] = graph.vertex_halves(v);
        den *= data.gamma(
            &inward_label(graph, data, &s.labels, a)?,
            &inward_label(graph, data, &s.labels, b)?,
            &inward_label(graph, data, &s.labels, c)?,
            s.slots[v],
        )?;
    }
    Ok(num / den)
}

/// A dense map between two state spaces.
#[derive(Debug, Clone)]
pub struct LinearOperator {
    pub source: u64,
    pub target: u64,
    pub matrix: DMatrix<Complex64>,
}

impl LinearOperator {
    pub fn new(source: &StateSpace, target: &StateSpace, matrix: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(matrix.shape(), (target.dim(), source.dim()));
        LinearOperator { source: source.id(), target: target.id(), matrix }
    }

    pub fn identity(space: &StateSpace) -> Self {
        LinearOperator::new(space, space, DMatrix::identity(space.dim(), space.dim()))
    }

    /// self ∘ rhs.
    pub fn compose(&self, rhs: &LinearOperator) -> Result<LinearOperator> {
        if rhs.target != self.source || rhs.matrix.nrows() != self.matrix.ncols() {
            return Err(Error::Shape("operators do not compose: target and source spaces differ".into()));
        }
        Ok(LinearOperator { source: rhs.source, target: self.target, matrix: &self.matrix * &rhs.matrix })
    }

    pub fn apply(&self, v: &DVector<Complex64>) -> Result<DVector<Complex64>> {
        if v.len() != self.matrix.ncols() {
            return Err(Error::Shape(format!("vector of length {} for an operator with {} columns", v.len(), self.matrix.ncols())));
        }
        Ok(&self.matrix * v)
    }

    /// Dense CSV: one row per matrix row, entries written as re+imj.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for r in 0..self.matrix.nrows() {
            let row: Vec<String> = (0..self.matrix.ncols())
                .map(|c| {
                    let z = self.matrix[(r, c)];
                    format!("{:e}{:+e}j", z.re, z.im)
                })
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// A† = η_in · A^H · η_out⁻¹, the adjoint for the indefinite forms.
pub fn adjoint_indef(space_in: &StateSpace, space_out: &StateSpace, a: &LinearOperator) -> Result<LinearOperator> {
    if a.source != space_in.id() || a.target != space_out.id() || a.matrix.shape() != (space_out.dim(), space_in.dim()) {
        return Err(Error::Shape("operator does not map the given spaces".into()));
    }
    let mut m = a.matrix.adjoint();
    for (r, &ei) in space_in.eta.iter().enumerate() {
        for (c, &eo) in space_out.eta.iter().enumerate() {
            m[(r, c)] *= ei / eo;
        }
    }
    Ok(LinearOperator { source: space_out.id(), target: space_in.id(), matrix: m })
}

/// The ⟨·|·⟩₊ adjoint, A^♯ = A^H.
pub fn adjoint_plus(a: &LinearOperator) -> LinearOperator {
    LinearOperator { source: a.target, target: a.source, matrix: a.matrix.adjoint() }
}
