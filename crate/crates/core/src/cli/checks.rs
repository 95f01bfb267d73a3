//! The operator-invariant suite behind `rlw check`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::operators::{dense_eigenvalues, op_norm, Model, ProbePolicy};
use crate::state_space::{adjoint_indef, adjoint_plus, LinearOperator, SpaceOptions, StateSpace};
use crate::surface::{Coloring, RibbonGraph};

/// One row of a residual table.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub detail: Option<String>,
}

impl Check {
    pub fn new(name: &str, residual: f64, tolerance: f64) -> Self {
        Check { name: name.into(), residual, tolerance, pass: residual <= tolerance, detail: None }
    }

    /// An exact comparison of two counts.
    pub fn equal(name: &str, a: usize, b: usize) -> Self {
        Check::new(name, a.abs_diff(b) as f64, 0.0).with(format!("{a} vs {b}"))
    }

    pub fn skipped(name: &str, why: String) -> Self {
        Check { name: name.into(), residual: 0.0, tolerance: 0.0, pass: true, detail: Some(format!("skipped: {why}")) }
    }

    pub fn with(mut self, detail: String) -> Self {
        self.detail = Some(detail);
        self
    }
}

/// Tolerances of the suite, derived from the base `--tol`.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub algebra: f64,
    pub pseudo_hermitian: f64,
    pub spectrum: f64,
}

impl Tolerances {
    pub fn from_base(tol: f64) -> Self {
        Tolerances { algebra: tol, pseudo_hermitian: 10.0 * tol, spectrum: 100.0 * tol }
    }
}

pub const RANDOM_PAIRS: usize = 100;
pub const RANDOM_SHIFTS: usize = 10;
const SHIFT_DRAWS: usize = 500;

fn is_diagonal(m: &DMatrix<Complex64>) -> bool {
    m.iter().enumerate().all(|(k, z)| k % m.nrows() == k / m.nrows() || (z.re == 0.0 && z.im == 0.0))
}

fn commutator(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    // [A, D] for diagonal D is A_rc (d_c − d_r) entrywise.
    let entrywise = |a: &DMatrix<Complex64>, d: &DMatrix<Complex64>, sign: f64| {
        DMatrix::from_fn(a.nrows(), a.ncols(), |r, c| a[(r, c)] * (d[(c, c)] - d[(r, r)]) * sign)
    };
    if is_diagonal(b) {
        op_norm(&entrywise(a, b, 1.0))
    } else if is_diagonal(a) {
        op_norm(&entrywise(b, a, -1.0))
    } else {
        op_norm(&(a * b - b * a))
    }
}

fn idempotency(a: &DMatrix<Complex64>) -> f64 {
    op_norm(&(a * a - a))
}

fn max(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

/// Q_v and B_p projector algebra.
pub fn projector_algebra(model: &Model, space: &Arc<StateSpace>, bs: &[LinearOperator], tol: f64) -> Result<Vec<Check>> {
    let nv = model.graph().num_vertices();
    let qs: Vec<LinearOperator> = (0..nv).map(|v| model.vertex_q(space, v)).collect::<Result<_>>()?;
    let mut out = vec![
        Check::new("vertex_idempotent", max(qs.iter().map(|q| idempotency(&q.matrix))), tol),
        Check::new("vertex_commute", max(pairs(qs.len()).map(|(a, b)| commutator(&qs[a].matrix, &qs[b].matrix))), tol),
        Check::new("plaquette_idempotent", max(bs.iter().map(|b| idempotency(&b.matrix))), tol),
        Check::new("plaquette_commute", max(pairs(bs.len()).map(|(a, b)| commutator(&bs[a].matrix, &bs[b].matrix))), tol),
    ];
    let bq = bs.iter().flat_map(|b| qs.iter().map(move |q| commutator(&b.matrix, &q.matrix)));
    out.push(Check::new("plaquette_vertex_commute", max(bq), tol));
    let herm = bs.iter().map(|b| adjoint_indef(space, space, b).map(|a| op_norm(&(a.matrix - &b.matrix))));
    out.push(Check::new("plaquette_self_adjoint", max(herm.collect::<Result<Vec<_>>>()?), tol));
    Ok(out)
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |a| (a + 1..n).map(move |b| (a, b)))
}

fn is_recoverable(e: &Error) -> bool {
    matches!(
        e,
        Error::GaugeAdmissibility(_) | Error::Domain(_) | Error::MissingData(_) | Error::NoProbe { .. } | Error::Admissibility { .. }
    )
}

/// (B_p^g)† = B_p^{−g}, (B_p^s)† = B_p^{s*}, B^{g1}B^{g2} = B^{g1+g2} and probe independence.
pub fn string_algebra(
    model: &Model,
    space: &Arc<StateSpace>,
    probes: &[GroupElement],
    pool: &[GroupElement],
    tol: f64,
) -> Result<Vec<Check>> {
    let data = model.data();
    let (mut adj_g, mut adj_s, mut comp, mut indep) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut notes = Vec::new();
    for (p, g) in probes.iter().enumerate() {
        let (tgt, up) = model.plaquette_bg(space, p, g)?;
        let (back, down) = model.plaquette_bg(&tgt, p, &g.neg())?;
        if back.id() != space.id() {
            return Err(Error::Shape(format!("B_{p}^{{-g}} does not return to the source space")));
        }
        adj_g = adj_g.max(op_norm(&(adjoint_indef(space, &tgt, &up)?.matrix - &down.matrix)));
        for s in data.labels(g)? {
            let (t, bs) = model.plaquette_bs(space, p, &s)?;
            let (_, bsd) = model.plaquette_bs(&t, p, &data.dual(&s)?)?;
            adj_s = adj_s.max(op_norm(&(adjoint_indef(space, &t, &bs)?.matrix - &bsd.matrix)));
        }
        let base = model.plaquette_b(space, p, g)?;
        match second_degree(model, space, p, g, pool)? {
            Some((g2, residual)) => {
                comp = comp.max(residual);
                let other = model.plaquette_b(space, p, &g2)?;
                indep = indep.max(op_norm(&(other.matrix - &base.matrix)));
                notes.push(format!("p{p}: {g} with {g2}"));
            }
            None => notes.push(format!("p{p}: no second degree")),
        }
    }
    let found = notes.iter().all(|n| !n.ends_with("no second degree"));
    let detail = notes.join("; ");
    let mut out = vec![Check::new("string_adjoint_degree", adj_g, tol), Check::new("string_adjoint_label", adj_s, tol)];
    if found {
        out.push(Check::new("string_composition", comp, tol).with(detail.clone()));
        out.push(Check::new("probe_independence", indep, tol).with(detail));
    } else {
        out.push(Check::skipped("string_composition", detail.clone()));
        out.push(Check::skipped("probe_independence", detail));
    }
    Ok(out)
}

/// The first g2 in the pool usable at plaquette p with g + g2 generic, and ‖B^g B^{g2} − B^{g+g2}‖.
fn second_degree(
    model: &Model,
    space: &Arc<StateSpace>,
    p: usize,
    g: &GroupElement,
    pool: &[GroupElement],
) -> Result<Option<(GroupElement, f64)>> {
    let phi = space.coloring();
    for g2 in pool.iter().cloned() {
        if &g2 == g || !model.probe_usable(phi, p, &g2) {
            continue;
        }
        let sum = match g.checked_add(&g2) {
            Ok(x) if model.data().is_generic(&x) => x,
            _ => continue,
        };
        let attempt = (|| -> Result<f64> {
            let (mid, a) = model.plaquette_bg(space, p, &g2)?;
            let (end, b) = model.plaquette_bg(&mid, p, g)?;
            let (direct_end, c) = model.plaquette_bg(space, p, &sum)?;
            if end.id() != direct_end.id() {
                return Err(Error::Shape("composed and direct strings reach different spaces".into()));
            }
            Ok(op_norm(&(b.compose(&a)?.matrix - c.matrix)))
        })();
        match attempt {
            Ok(r) => return Ok(Some((g2, r))),
            Err(e) if is_recoverable(&e) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<Complex64> {
    let v = DVector::from_fn(n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let norm = v.norm();
    if norm > 0.0 {
        v / Complex64::new(norm, 0.0)
    } else {
        v
    }
}

/// ‖η⁻¹Hη − H^♯‖ and |⟨ψ|Hφ⟩ − ⟨Hψ|φ⟩| for random unit pairs in the indefinite form.
pub fn pseudo_hermiticity(space: &StateSpace, h: &LinearOperator, seed: u64, tol: f64) -> Result<Vec<Check>> {
    let eta: Vec<f64> = space.eta_diagonal().to_vec();
    let mut conj = h.matrix.clone();
    for r in 0..conj.nrows() {
        for c in 0..conj.ncols() {
            conj[(r, c)] *= eta[c] / eta[r];
        }
    }
    let sharp = adjoint_plus(h).matrix;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..RANDOM_PAIRS {
        let psi = random_vector(&mut rng, space.dim());
        let phi = random_vector(&mut rng, space.dim());
        let lhs = space.inner_indef(&psi, &h.apply(&phi)?)?;
        let rhs = space.inner_indef(&h.apply(&psi)?, &phi)?;
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(vec![
        Check::new("pseudo_hermitian", op_norm(&(conj - sharp)), tol),
        Check::new("indefinite_pairs", worst, tol).with(format!("{RANDOM_PAIRS} pairs, seed {seed}")),
    ])
}

/// Integer spectrum, ground multiplicity and gap.
pub fn spectrum_checks(model: &Model, space: &Arc<StateSpace>, probes: &[GroupElement], ground: usize, tol: f64) -> Result<Vec<Check>> {
    let spec = model.spectrum(space, probes, tol)?;
    let gap = spec.gap().map(|g| g as f64);
    let mut out = vec![
        Check::new("spectrum_integral", spec.residual, tol),
        Check::new("spectrum_sector_leakage", spec.leakage, tol),
        Check::equal("spectrum_total", spec.total(), space.dim()),
        Check::equal("spectrum_ground_multiplicity", spec.multiplicity(0), ground),
    ];
    out.push(match gap {
        Some(g) => Check::new("spectrum_gap", (1.0 - g).max(0.0), tol).with(format!("gap {g}")),
        None => Check::skipped("spectrum_gap", "single level".into()),
    });
    Ok(out)
}

/// Distance of every dense eigenvalue of H from the nearest nonnegative integer,
/// and the number of eigenvalues rounding to zero.
pub fn dense_oracle(h: &LinearOperator) -> Result<(f64, usize)> {
    let ev = dense_eigenvalues(&h.matrix)?;
    let mut worst: f64 = 0.0;
    let mut zeros = 0;
    for z in ev {
        let k = z.re.round().max(0.0);
        worst = worst.max((z - Complex64::new(k, 0.0)).norm());
        if k == 0.0 {
            zeros += 1;
        }
    }
    Ok((worst, zeros))
}

/// Ground dimension under a chain of random admissible gauge shifts drawn from `pool`,
/// with the rank of B_p^g between consecutive ground spaces.
pub fn gauge_invariance(
    model: &Model,
    phi: &Coloring,
    policy: &ProbePolicy,
    pool: &[GroupElement],
    ground: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<Check>> {
    if pool.is_empty() {
        return Ok(vec![Check::skipped("gauge_ground_dim", "empty degree pool".into())]);
    }
    let np = model.graph().num_plaquettes();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let mut cur = phi.clone();
    let (mut dim_diff, mut rank_def) = (0usize, 0usize);
    let mut steps = Vec::new();
    let mut draws = 0;
    while steps.len() < RANDOM_SHIFTS && draws < SHIFT_DRAWS {
        draws += 1;
        let p = rng.random_range(0..np);
        let g = &pool[rng.random_range(0..pool.len())];
        match model.gauge_check(&cur, p, g, policy, tol) {
            Ok(rep) => {
                dim_diff = dim_diff.max(rep.source_dim.abs_diff(ground)).max(rep.target_dim.abs_diff(ground));
                rank_def = rank_def.max(rep.source_dim.abs_diff(rep.restricted_rank));
                steps.push(format!("p{p}+{g}"));
                cur = rep.target;
            }
            Err(e) if is_recoverable(&e) => continue,
            Err(e) => return Err(e),
        }
    }
    if steps.len() < RANDOM_SHIFTS {
        let c = Check::new("gauge_shifts_found", (RANDOM_SHIFTS - steps.len()) as f64, 0.0);
        return Ok(vec![c.with(format!("only {} admissible shifts in {draws} draws", steps.len()))]);
    }
    let detail = steps.join(" ");
    Ok(vec![
        Check::new("gauge_ground_dim", dim_diff as f64, 0.0).with(detail.clone()),
        Check::new("gauge_restricted_rank", rank_def as f64, 0.0).with(detail),
    ])
}

/// Ground dimension on another triangulation of the same surface with the same holonomies.
pub fn triangulation_invariance(
    model: &Model,
    other: Option<(String, RibbonGraph)>,
    hol: &[GroupElement],
    pool: &[GroupElement],
    policy: &ProbePolicy,
    ground: usize,
    tol: f64,
) -> Result<Check> {
    let graph = model.graph();
    let Some((name, other)) = other else {
        return Ok(Check::skipped("triangulation_invariance", format!("no reference triangulation for {}", graph.name())));
    };
    let options = model.options();
    let run = |opts: SpaceOptions| -> Result<usize> {
        let m = Model::new(&other, model.data(), opts)?;
        let phi = m.holonomy_coloring_with(hol, pool)?;
        let space = m.space(&phi)?;
        let probes = m.probes(&phi, policy)?;
        Ok(m.ground_dim(&space, &probes, tol)?.dim)
    };
    let (dim, note) = match run(options) {
        Ok(d) => (d, String::new()),
        Err(Error::DimensionCap { .. }) if !options.strict_fusion => {
            (run(SpaceOptions { strict_fusion: true, ..options })?, " (strict fusion, inclusive space over the cap)".to_string())
        }
        Err(e) => return Err(e),
    };
    Ok(Check::equal("triangulation_invariance", ground, dim).with(format!("{} vs {name}: {ground} vs {dim}{note}", graph.name())))
}

/// Ground dimension and Hilbert dimension under the other state-space convention.
pub fn fusion_convention(model: &Model, phi: &Coloring, policy: &ProbePolicy, ground: usize, hilbert: usize, tol: f64) -> Result<Check> {
    let options = SpaceOptions { strict_fusion: !model.options().strict_fusion, ..model.options() };
    let other = Model::new(model.graph(), model.data(), options)?;
    let space = match other.space(phi) {
        Ok(s) => s,
        Err(Error::DimensionCap { reached, cap }) => {
            return Ok(Check::skipped("fusion_convention", format!("other convention exceeds the cap ({reached} > {cap})")));
        }
        Err(e) => return Err(e),
    };
    let probes = other.probes(phi, policy)?;
    let gd = other.ground_dim(&space, &probes, tol)?;
    let label = |strict: bool| if strict { "strict" } else { "inclusive" };
    Ok(Check::equal("fusion_convention", ground, gd.dim).with(format!(
        "{} hilbert {hilbert}, {} hilbert {}, difference {}",
        label(model.options().strict_fusion),
        label(options.strict_fusion),
        space.dim(),
        hilbert.abs_diff(space.dim())
    )))
}
