//! Vertex and plaquette operators, the Hamiltonian and ground-state analysis.

mod analysis;
mod plaquette;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{small_denominators, GroupElement};
use crate::lw_data::{Label, LwData};
use crate::state_space::{LinearOperator, SpaceOptions, StateSpace};
use crate::surface::{representative_avoiding, Coloring, CycleBasis, RibbonGraph};

pub use analysis::{dense_eigenvalues, op_norm, GroundDim, Spectrum};
use plaquette::{apply_bs, Candidates, PlaquettePlan};

/// How B_p = B_p^g B_p^{−g} picks its degree g.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProbePolicy {
    /// Smallest-denominator g such that every degree touched is available.
    Auto,
    /// First usable element of the list.
    Explicit(Vec<GroupElement>),
}

const AUTO_PROBE_MAX_Q: i64 = 64;
const GAUGE_SEARCH_MAX_Q: i64 = 12;
const GAUGE_SEARCH_NODES: usize = 1_000_000;

type BsKey = (u64, usize, Label);
type BsEntry = (Arc<StateSpace>, Arc<LinearOperator>);

/// Operator factory over one graph and one data set, with per-coloring caches.
pub struct Model<'a> {
    graph: &'a RibbonGraph,
    data: &'a dyn LwData,
    options: SpaceOptions,
    plans: Vec<PlaquettePlan>,
    spaces: Mutex<HashMap<Coloring, Arc<StateSpace>>>,
    bs: Mutex<HashMap<BsKey, BsEntry>>,
}

impl<'a> Model<'a> {
    pub fn new(graph: &'a RibbonGraph, data: &'a dyn LwData, options: SpaceOptions) -> Result<Self> {
        let plans = (0..graph.num_plaquettes()).map(|p| PlaquettePlan::new(graph, p)).collect::<Result<_>>()?;
        Ok(Model { graph, data, options, plans, spaces: Mutex::default(), bs: Mutex::default() })
    }

    pub fn graph(&self) -> &RibbonGraph {
        self.graph
    }

    pub fn data(&self) -> &dyn LwData {
        self.data
    }

    pub fn options(&self) -> SpaceOptions {
        self.options
    }

    /// H(Γ,Φ), built once per coloring.
    pub fn space(&self, phi: &Coloring) -> Result<Arc<StateSpace>> {
        if let Some(s) = self.spaces.lock().expect("space cache").get(phi) {
            return Ok(s.clone());
        }
        let s = Arc::new(StateSpace::new(self.graph, phi, self.data, self.options)?);
        self.spaces.lock().expect("space cache").insert(phi.clone(), s.clone());
        Ok(s)
    }

    /// An admissible coloring with the given holonomies, every edge degree available.
    ///
    /// Starts from the tree/cotree cocycle and searches plaquette shifts among
    /// ±holonomies and small-denominator elements.
    pub fn holonomy_coloring(&self, hol: &[GroupElement]) -> Result<Coloring> {
        let extra: Vec<GroupElement> = small_denominators(self.data.signature(), GAUGE_SEARCH_MAX_Q).collect();
        self.holonomy_coloring_with(hol, &extra)
    }

    /// As [`Model::holonomy_coloring`], searching shifts among ±holonomies and `extra`.
    pub fn holonomy_coloring_with(&self, hol: &[GroupElement], extra: &[GroupElement]) -> Result<Coloring> {
        let sig = self.data.signature();
        let raw = CycleBasis::new(self.graph).coloring(self.graph, sig, hol)?;
        let bad = |g: &GroupElement| !self.data.has_degree(g);
        if raw.values().iter().all(|g| !bad(g)) {
            return Ok(raw);
        }
        let mut cands: Vec<GroupElement> = hol.iter().flat_map(|h| [h.clone(), h.neg()]).collect();
        cands.extend(extra.iter().cloned());
        match representative_avoiding(self.graph, &raw, &bad, &cands, GAUGE_SEARCH_NODES) {
            Ok((_, phi)) => Ok(phi),
            Err(_) => {
                let e = (0..raw.values().len()).find(|&e| bad(raw.value(e))).expect("some edge is unavailable");
                Err(Error::Admissibility { edge: e, value: raw.value(e).to_string() })
            }
        }
    }

    fn check_space(&self, space: &StateSpace, what: &str) -> Result<()> {
        if space.coloring().values().len() != self.graph.num_edges() || space.options() != self.options {
            return Err(Error::Shape(format!("{what}: space was not built for this model")));
        }
        Ok(())
    }

    /// Q_v: keeps states with 1 ≤ σ0(v) ≤ δ(v).
    pub fn vertex_q(&self, space: &StateSpace, v: usize) -> Result<LinearOperator> {
        self.check_space(space, "vertex operator")?;
        if v >= self.graph.num_vertices() {
            return Err(Error::Index(format!("vertex {v} out of range 0..{}", self.graph.num_vertices())));
        }
        let diag = space.states().iter().map(|s| if s.slots[v] >= 1 { 1.0 } else { 0.0 });
        Ok(diagonal(space, diag))
    }

    /// ∏_v Q_v.
    pub fn vertex_q_all(&self, space: &StateSpace) -> Result<LinearOperator> {
        self.check_space(space, "vertex operator")?;
        let diag = space.states().iter().map(|s| if s.slots.iter().all(|&c| c >= 1) { 1.0 } else { 0.0 });
        Ok(diagonal(space, diag))
    }

    /// Coloring reached by B_p^g, checked for admissibility.
    pub fn shifted(&self, phi: &Coloring, p: usize, g: &GroupElement) -> Result<Coloring> {
        self.check_plaquette(p)?;
        let target = phi.gauge_shift(self.graph, p, g)?;
        if let Some(e) = target.first_singular(self.data.singular()) {
            return Err(Error::GaugeAdmissibility(format!(
                "shifting plaquette {p} by {g} makes edge {e} singular ({})",
                target.value(e)
            )));
        }
        Ok(target)
    }

    fn check_plaquette(&self, p: usize) -> Result<()> {
        if p >= self.graph.num_plaquettes() {
            return Err(Error::Index(format!("plaquette {p} out of range 0..{}", self.graph.num_plaquettes())));
        }
        Ok(())
    }

    /// B_p^s : H(Γ,Φ) → H(Γ,Φ+g.δp), g = |s|. Returns the target space too.
    pub fn plaquette_bs(&self, space: &Arc<StateSpace>, p: usize, s: &Label) -> Result<(Arc<StateSpace>, Arc<LinearOperator>)> {
        self.check_space(space, "plaquette operator")?;
        self.check_plaquette(p)?;
        if !self.data.is_generic(&s.degree) {
            return Err(Error::Domain(format!("string label {s} has singular degree")));
        }
        let key = (space.id(), p, s.clone());
        if let Some(hit) = self.bs.lock().expect("operator cache").get(&key) {
            return Ok(hit.clone());
        }
        let target = self.space(&self.shifted(space.coloring(), p, &s.degree)?)?;
        let plan = &self.plans[p];
        let cands = Candidates::new(self.graph, self.data, plan, space.coloring(), &s.degree)?;
        let cols: Vec<Vec<(usize, Complex64)>> = (0..space.dim())
            .into_par_iter()
            .map(|c| {
                apply_bs(self.graph, self.data, plan, &cands, s, space.state(c))?
                    .into_iter()
                    .map(|(st, z)| {
                        target.index_of(&st).map(|r| (r, z)).ok_or_else(|| {
                            Error::Shape(format!("plaquette {p} produced a state outside the target basis"))
                        })
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let mut m = DMatrix::zeros(target.dim(), space.dim());
        for (c, col) in cols.into_iter().enumerate() {
            for (r, z) in col {
                m[(r, c)] += z;
            }
        }
        let op = Arc::new(LinearOperator::new(space, &target, m));
        let out = (target, op);
        self.bs.lock().expect("operator cache").insert(key, out.clone());
        Ok(out)
    }

    /// B_p^g = Σ_{s ∈ I_g} b(s) B_p^s.
    pub fn plaquette_bg(&self, space: &Arc<StateSpace>, p: usize, g: &GroupElement) -> Result<(Arc<StateSpace>, LinearOperator)> {
        if !self.data.is_generic(g) {
            return Err(Error::Domain(format!("plaquette degree {g} is singular")));
        }
        let target = self.space(&self.shifted(space.coloring(), p, g)?)?;
        let mut m = DMatrix::zeros(target.dim(), space.dim());
        for s in self.data.labels(g)? {
            let b = self.data.scalars(&s)?.b;
            let (_, op) = self.plaquette_bs(space, p, &s)?;
            m += &op.matrix * Complex64::new(b, 0.0);
        }
        Ok((target.clone(), LinearOperator::new(space, &target, m)))
    }

    /// B_p = B_p^g B_p^{−g}.
    pub fn plaquette_b(&self, space: &Arc<StateSpace>, p: usize, g: &GroupElement) -> Result<LinearOperator> {
        let (mid, down) = self.plaquette_bg(space, p, &g.neg())?;
        let (_, up) = self.plaquette_bg(&mid, p, g)?;
        up.compose(&down)
    }

    /// Whether g can serve as the probe for plaquette p on Φ.
    pub fn probe_usable(&self, phi: &Coloring, p: usize, g: &GroupElement) -> bool {
        if g.is_zero() || !self.data.has_degree(g) || !self.data.has_degree(&g.neg()) {
            return false;
        }
        self.plans[p].walk().iter().all(|&h| {
            let x = phi.along(self.graph, h);
            match (x.checked_add(g), x.checked_sub(g)) {
                (Ok(a), Ok(b)) => self.data.has_degree(&a) && self.data.has_degree(&b),
                _ => false,
            }
        })
    }

    pub fn find_probe(&self, phi: &Coloring, p: usize, policy: &ProbePolicy) -> Result<GroupElement> {
        self.check_plaquette(p)?;
        let found = match policy {
            ProbePolicy::Auto => small_denominators(self.data.signature(), AUTO_PROBE_MAX_Q)
                .find(|g| self.probe_usable(phi, p, g)),
            ProbePolicy::Explicit(list) => list.iter().find(|g| self.probe_usable(phi, p, g)).cloned(),
        };
        found.ok_or_else(|| Error::NoProbe {
            plaquette: p,
            hint: match policy {
                ProbePolicy::Auto => format!("no denominator up to {AUTO_PROBE_MAX_Q} works; pass explicit probes"),
                ProbePolicy::Explicit(l) => format!(
                    "none of [{}] keeps every shifted degree available; try other values",
                    l.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", ")
                ),
            },
        })
    }

    /// One probe per plaquette.
    pub fn probes(&self, phi: &Coloring, policy: &ProbePolicy) -> Result<Vec<GroupElement>> {
        (0..self.graph.num_plaquettes()).map(|p| self.find_probe(phi, p, policy)).collect()
    }

    /// All B_p, in plaquette order.
    pub fn plaquette_projectors(&self, space: &Arc<StateSpace>, probes: &[GroupElement]) -> Result<Vec<LinearOperator>> {
        if probes.len() != self.graph.num_plaquettes() {
            return Err(Error::Shape(format!("{} probes for {} plaquettes", probes.len(), self.graph.num_plaquettes())));
        }
        probes.iter().enumerate().map(|(p, g)| self.plaquette_b(space, p, g)).collect()
    }

    /// H = Σ_p (1 − B_p) + Σ_v (1 − Q_v).
    pub fn hamiltonian(&self, space: &Arc<StateSpace>, probes: &[GroupElement]) -> Result<LinearOperator> {
        let n = space.dim();
        let id = DMatrix::<Complex64>::identity(n, n);
        let mut h = DMatrix::zeros(n, n);
        for b in self.plaquette_projectors(space, probes)? {
            h += &id - &b.matrix;
        }
        for v in 0..self.graph.num_vertices() {
            h += &id - &self.vertex_q(space, v)?.matrix;
        }
        Ok(LinearOperator::new(space, space, h))
    }

    /// dim Ker H from the trace of ∏_p B_p ∏_v Q_v.
    pub fn ground_dim(&self, space: &Arc<StateSpace>, probes: &[GroupElement], tol: f64) -> Result<GroundDim> {
        analysis::ground_dim(space.dim(), &self.ground_projector(space, probes)?.matrix, tol)
    }

    /// The ground-space projector ∏_p B_p ∏_v Q_v.
    pub fn ground_projector(&self, space: &Arc<StateSpace>, probes: &[GroupElement]) -> Result<LinearOperator> {
        let mut p = self.vertex_q_all(space)?;
        for b in self.plaquette_projectors(space, probes)?.iter().rev() {
            p = b.compose(&p)?;
        }
        Ok(p)
    }

    /// Spectrum of H by joint splitting along the commuting projectors.
    pub fn spectrum(&self, space: &Arc<StateSpace>, probes: &[GroupElement], tol: f64) -> Result<Spectrum> {
        let bs = self.plaquette_projectors(space, probes)?;
        analysis::spectrum(space, &bs, tol)
    }

    /// Compares ground spaces on Φ and Φ + g.δp and the rank of B_p^g between them.
    pub fn gauge_check(
        &self,
        phi: &Coloring,
        p: usize,
        g: &GroupElement,
        policy: &ProbePolicy,
        tol: f64,
    ) -> Result<GaugeReport> {
        let src = self.space(phi)?;
        let (tgt, bg) = if g.is_zero() {
            (src.clone(), LinearOperator::identity(&src))
        } else {
            self.plaquette_bg(&src, p, g)?
        };
        let probes_src = self.probes(src.coloring(), policy)?;
        let probes_tgt = self.probes(tgt.coloring(), policy)?;
        let ps = self.ground_projector(&src, &probes_src)?;
        let pt = self.ground_projector(&tgt, &probes_tgt)?;
        let gs = analysis::ground_dim(src.dim(), &ps.matrix, tol)?;
        let gt = analysis::ground_dim(tgt.dim(), &pt.matrix, tol)?;
        let restricted = pt.compose(&bg)?.compose(&ps)?;
        let rank = analysis::numerical_rank(&restricted.matrix, 1e-8)?;
        Ok(GaugeReport { source_dim: gs.dim, target_dim: gt.dim, restricted_rank: rank, target: tgt.coloring().clone() })
    }
}

/// Outcome of a gauge comparison.
#[derive(Debug, Clone)]
pub struct GaugeReport {
    pub source_dim: usize,
    pub target_dim: usize,
    pub restricted_rank: usize,
    pub target: Coloring,
}

impl GaugeReport {
    pub fn passed(&self) -> bool {
        self.source_dim == self.target_dim && self.restricted_rank == self.source_dim
    }
}

fn diagonal(space: &StateSpace, diag: impl Iterator<Item = f64>) -> LinearOperator {
    let v = nalgebra::DVector::from_iterator(space.dim(), diag.map(|x| Complex64::new(x, 0.0)));
    LinearOperator::new(space, space, DMatrix::from_diagonal(&v))
}
