//! Acceptance run: one line per criterion, nonzero exit if any fails.
//!
//! Norms, adjoints, eigenvalues and ranks are recomputed here with nalgebra
//! rather than taken from the library's own helpers.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rlw_core::cli::run;
use rlw_core::group::{circle, small_denominators, GroupElement, Signature};
use rlw_core::lw_data::{closure, validate, Family, LwData, AXIOM_NAMES};
use rlw_core::operators::{Model, ProbePolicy};
use rlw_core::state_space::{SpaceOptions, StateSpace};
use rlw_core::surface::RibbonGraph;
use rlw_core::Error;
use serde_json::Value;

const AXIOM_TOL: f64 = 1e-12;
const ALGEBRA_TOL: f64 = 1e-9;
const SPECTRUM_TOL: f64 = 1e-7;
const PSEUDO_HERMITIAN_TOL: f64 = 1e-8;
const RANDOM_PAIRS: usize = 100;
const RANDOM_SHIFTS: usize = 10;
const RANK_TOL: f64 = 1e-8;
const TRACE_TOL: f64 = 1e-6;
const SEED: u64 = 20_240_601;

type Matrix = DMatrix<Complex64>;

fn samples() -> Vec<GroupElement> {
    vec![circle(1, 5), circle(2, 5), circle(1, 7), circle(3, 7)]
}

fn families() -> Vec<(&'static str, Family)> {
    vec![
        ("P(2,1)", Family::p(2, 1.0)),
        ("P(3,2)", Family::p(3, 2.0)),
        ("M(2,1)", Family::m(2, 1.0)),
        ("F(2,1,2)", Family::f(2, 1.0, 2.0)),
    ]
}

fn pool() -> Vec<GroupElement> {
    small_denominators(&Signature::circle(), 12).collect()
}

/// Largest singular value.
fn norm(m: &Matrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

fn rank(m: &Matrix) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.max();
    sv.iter().filter(|&&s| s > RANK_TOL * top.max(1.0)).count()
}

/// A† for ⟨ψ|φ⟩ = Σ conj(ψ_i) φ_i / η_i on both sides.
fn indef_adjoint(a: &Matrix, eta_in: &[f64], eta_out: &[f64]) -> Matrix {
    Matrix::from_fn(a.ncols(), a.nrows(), |r, c| a[(c, r)].conj() * eta_in[r] / eta_out[c])
}

fn indef_inner(eta: &[f64], x: &DVector<Complex64>, y: &DVector<Complex64>) -> Complex64 {
    x.iter().zip(y.iter()).zip(eta).map(|((a, b), e)| a.conj() * b / e).sum()
}

/// Eigenvalues of H, which is similar to a Hermitian matrix through |η|^{1/2}.
fn oracle_eigenvalues(space: &StateSpace, h: &Matrix) -> Vec<f64> {
    let eta = space.eta_diagonal();
    let sign = eta[0].signum();
    assert!(eta.iter().all(|e| e.signum() == sign), "η changes sign");
    let n = h.nrows();
    let s = Matrix::from_fn(n, n, |r, c| h[(r, c)] * Complex64::new((eta[c] / eta[r]).sqrt(), 0.0));
    let herm = (&s + s.adjoint()) * Complex64::new(0.5, 0.0);
    let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

struct Config {
    family: &'static str,
    data: Family,
    graph: RibbonGraph,
    surface: &'static str,
    strict: bool,
    hol: Vec<GroupElement>,
}

impl Config {
    fn model(&self) -> Model<'_> {
        let opts = SpaceOptions { strict_fusion: self.strict, ..Default::default() };
        Model::new(&self.graph, &self.data, opts).expect("model")
    }

    fn label(&self) -> String {
        let hol: Vec<String> = self.hol.iter().map(|g| g.to_string()).collect();
        format!("{} on {}{} hol ({})", self.family, self.surface, if self.strict { " strict" } else { "" }, hol.join(","))
    }
}

fn config(family: &'static str, data: Family, surface: &'static str, hol: [GroupElement; 2]) -> Config {
    let (graph, strict) = match surface {
        "theta" => (RibbonGraph::theta(), false),
        _ => (RibbonGraph::grid(2).unwrap(), true),
    };
    Config { family, data, graph, surface, strict, hol: hol.to_vec() }
}

fn fifths() -> [GroupElement; 2] {
    [circle(1, 5), circle(2, 5)]
}

fn sevenths() -> [GroupElement; 2] {
    [circle(1, 7), circle(2, 7)]
}

struct Outcome {
    pass: bool,
    summary: String,
}

fn criterion_1() -> Outcome {
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for (name, fam) in families() {
        let report = validate(&fam, &samples(), AXIOM_TOL);
        worst = worst.max(report.max_residual());
        let names: Vec<&str> = report.checks.iter().map(|c| c.name.as_str()).collect();
        if names != AXIOM_NAMES || !report.passed() || report.max_residual() > AXIOM_TOL {
            failures.push(name);
        }
    }
    let degrees = closure(&Family::p(2, 1.0), &samples()).len();
    Outcome {
        pass: failures.is_empty(),
        summary: format!(
            "4 families x 10 checks over {degrees} degrees, max residual {worst:.1e} <= {AXIOM_TOL:e}{}",
            fail_list(&failures)
        ),
    }
}

fn fail_list(f: &[impl AsRef<str>]) -> String {
    if f.is_empty() {
        String::new()
    } else {
        format!("; failing: {}", f.iter().map(|s| s.as_ref()).collect::<Vec<_>>().join(", "))
    }
}

/// B_p^{g2} then B_p^{g1}, compared with B_p^{g1+g2}, for the first workable g2.
fn composition_residual(model: &Model, space: &Arc<StateSpace>, p: usize, g1: &GroupElement) -> Option<(f64, GroupElement)> {
    for g2 in pool() {
        if &g2 == g1 || !model.probe_usable(space.coloring(), p, &g2) {
            continue;
        }
        let sum = g1 + &g2;
        if !model.data().is_generic(&sum) {
            continue;
        }
        let attempt = || -> rlw_core::Result<f64> {
            let (mid, a) = model.plaquette_bg(space, p, &g2)?;
            let (_, b) = model.plaquette_bg(&mid, p, g1)?;
            let (_, c) = model.plaquette_bg(space, p, &sum)?;
            Ok(norm(&(&b.matrix * &a.matrix - c.matrix)))
        };
        match attempt() {
            Ok(r) => return Some((r, g2)),
            Err(Error::GaugeAdmissibility(_)) => continue,
            Err(e) => panic!("composition: {e}"),
        }
    }
    None
}

fn criterion_2() -> Outcome {
    let configs = [
        config("P(2,1)", Family::p(2, 1.0), "theta", fifths()),
        config("P(3,2)", Family::p(3, 2.0), "theta", fifths()),
        config("P(2,1)", Family::p(2, 1.0), "grid(2)", sevenths()),
        config("P(3,2)", Family::p(3, 2.0), "grid(2)", sevenths()),
    ];
    let names = ["idempotent", "commute", "vertex_commute", "adjoint", "composition", "probe_independence"];
    let mut worst = [0.0f64; 6];
    let mut failures = Vec::new();
    for cfg in &configs {
        let model = cfg.model();
        let phi = model.holonomy_coloring(&cfg.hol).expect("coloring");
        let space = model.space(&phi).expect("space");
        let probes = model.probes(&phi, &ProbePolicy::Auto).expect("probes");
        let bs: Vec<Matrix> = probes
            .iter()
            .enumerate()
            .map(|(p, g)| model.plaquette_b(&space, p, g).expect("B_p").matrix)
            .collect();
        let qs: Vec<Matrix> =
            (0..cfg.graph.num_vertices()).map(|v| model.vertex_q(&space, v).expect("Q_v").matrix).collect();
        let mut r = [0.0f64; 6];
        for (p, b) in bs.iter().enumerate() {
            r[0] = r[0].max(norm(&(b * b - b)));
            for b2 in &bs[p + 1..] {
                r[1] = r[1].max(norm(&(b * b2 - b2 * b)));
            }
            for q in &qs {
                r[2] = r[2].max(norm(&(b * q - q * b)));
            }
            let g = &probes[p];
            let (tgt, up) = model.plaquette_bg(&space, p, g).expect("B^g");
            let (_, down) = model.plaquette_bg(&tgt, p, &g.neg()).expect("B^-g");
            let adj = indef_adjoint(&up.matrix, space.eta_diagonal(), tgt.eta_diagonal());
            r[3] = r[3].max(norm(&(adj - &down.matrix)));
            match composition_residual(&model, &space, p, g) {
                Some((res, g2)) => {
                    r[4] = r[4].max(res);
                    let other = model.plaquette_b(&space, p, &g2).expect("second probe").matrix;
                    r[5] = r[5].max(norm(&(other - b)));
                }
                None => {
                    r[4] = f64::INFINITY;
                    r[5] = f64::INFINITY;
                }
            }
        }
        for (w, x) in worst.iter_mut().zip(r) {
            *w = w.max(x);
        }
        if r.iter().any(|&x| x.is_nan() || x > ALGEBRA_TOL) {
            failures.push(format!("{} {:?}", cfg.label(), r));
        }
    }
    let parts: Vec<String> = names.iter().zip(worst).map(|(n, w)| format!("{n} {w:.1e}")).collect();
    Outcome {
        pass: failures.is_empty(),
        summary: format!("4 configs, {} <= {ALGEBRA_TOL:e}{}", parts.join(", "), fail_list(&failures)),
    }
}

fn spectrum_configs() -> Vec<Config> {
    let mut v: Vec<Config> = families().into_iter().map(|(n, f)| config(n, f, "theta", fifths())).collect();
    v.push(config("P(2,1)", Family::p(2, 1.0), "grid(2)", sevenths()));
    v.push(config("P(3,2)", Family::p(3, 2.0), "grid(2)", sevenths()));
    v
}

fn criterion_3() -> Outcome {
    let mut worst_int = 0.0f64;
    let mut min_gap = f64::INFINITY;
    let mut failures = Vec::new();
    let configs = spectrum_configs();
    for cfg in &configs {
        let model = cfg.model();
        let phi = model.holonomy_coloring(&cfg.hol).expect("coloring");
        let space = model.space(&phi).expect("space");
        let probes = model.probes(&phi, &ProbePolicy::Auto).expect("probes");
        let h = model.hamiltonian(&space, &probes).expect("H");
        let ev = oracle_eigenvalues(&space, &h.matrix);
        let dist = ev.iter().map(|e| if *e < -0.5 { f64::INFINITY } else { (e - e.round()).abs() }).fold(0.0, f64::max);
        let zeros = ev.iter().filter(|e| e.abs() <= 0.5).count();
        let gap = ev.iter().filter(|e| **e > 0.5).fold(f64::INFINITY, |a, &b| a.min(b));
        let gd = model.ground_dim(&space, &probes, TRACE_TOL).expect("ground_dim").dim;
        let spec = model.spectrum(&space, &probes, ALGEBRA_TOL).expect("spectrum");
        let integer: Vec<usize> = ev.iter().map(|e| e.round() as usize).collect();
        worst_int = worst_int.max(dist);
        min_gap = min_gap.min(gap);
        let ok = dist <= SPECTRUM_TOL && zeros == gd && gap >= 1.0 - SPECTRUM_TOL && spec.eigenvalues() == integer;
        if !ok {
            failures.push(format!("{} (dist {dist:e}, zeros {zeros}, trace {gd}, gap {gap})", cfg.label()));
        }
    }
    Outcome {
        pass: failures.is_empty(),
        summary: format!(
            "{} configs, integrality {worst_int:.1e} <= {SPECTRUM_TOL:e}, mult(0) = ground_dim, min gap {min_gap:.6} >= 1 - {SPECTRUM_TOL:e}{}",
            configs.len(),
            fail_list(&failures)
        ),
    }
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> DVector<Complex64> {
    let v = DVector::from_fn(n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let len = v.norm();
    v / Complex64::new(len, 0.0)
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut worst_op, mut worst_pair) = (0.0f64, 0.0f64);
    let mut nontrivial_eta = false;
    let mut failures = Vec::new();
    let configs = spectrum_configs();
    for cfg in &configs {
        let model = cfg.model();
        let phi = model.holonomy_coloring(&cfg.hol).expect("coloring");
        let space = model.space(&phi).expect("space");
        let probes = model.probes(&phi, &ProbePolicy::Auto).expect("probes");
        let h = model.hamiltonian(&space, &probes).expect("H").matrix;
        let eta = space.eta_diagonal();
        let n = h.nrows();
        nontrivial_eta |= eta.iter().any(|&e| (e - eta[0]).abs() > 1e-12);
        let conj = Matrix::from_fn(n, n, |r, c| h[(r, c)] * eta[c] / eta[r]);
        let op = norm(&(conj - h.adjoint()));
        let mut pair = 0.0f64;
        for _ in 0..RANDOM_PAIRS {
            let (psi, phi) = (random_unit(&mut rng, n), random_unit(&mut rng, n));
            let lhs = indef_inner(eta, &psi, &(&h * &phi));
            let rhs = indef_inner(eta, &(&h * &psi), &phi);
            pair = pair.max((lhs - rhs).norm());
        }
        worst_op = worst_op.max(op);
        worst_pair = worst_pair.max(pair);
        if !(op <= PSEUDO_HERMITIAN_TOL && pair <= PSEUDO_HERMITIAN_TOL) {
            failures.push(cfg.label());
        }
    }
    Outcome {
        pass: failures.is_empty() && nontrivial_eta,
        summary: format!(
            "{} configs incl. F (eta non-scalar: {nontrivial_eta}), operator {worst_op:.1e}, {RANDOM_PAIRS} pairs each {worst_pair:.1e} <= {PSEUDO_HERMITIAN_TOL:e}{}",
            configs.len(),
            fail_list(&failures)
        ),
    }
}

fn criterion_5() -> Outcome {
    let hols = [
        [circle(1, 5), circle(2, 5)],
        [circle(1, 7), circle(3, 7)],
        [circle(2, 5), circle(1, 7)],
        [circle(3, 11), circle(5, 13)],
    ];
    let mut configs = Vec::new();
    for (n, c) in [(2u32, 1.0), (2, 2.5), (3, 2.0), (3, 0.5)] {
        for hol in &hols {
            configs.push((n, config("P", Family::p(n, c), "theta", hol.clone())));
        }
    }
    configs.push((2, config("P", Family::p(2, 1.0), "grid(2)", sevenths())));
    configs.push((3, config("P", Family::p(3, 2.0), "grid(2)", sevenths())));
    let mut failures = Vec::new();
    for (n, cfg) in &configs {
        let model = cfg.model();
        let phi = model.holonomy_coloring(&cfg.hol).expect("coloring");
        let space = model.space(&phi).expect("space");
        let probes = model.probes(&phi, &ProbePolicy::Auto).expect("probes");
        let h = model.hamiltonian(&space, &probes).expect("H");
        let dense = oracle_eigenvalues(&space, &h.matrix).iter().filter(|e| e.abs() <= 0.5).count();
        let trace = model.ground_dim(&space, &probes, TRACE_TOL).expect("ground_dim").dim;
        let want = (n * n) as usize;
        if dense != want || trace != dense {
            failures.push(format!("{} N={n}: dense {dense}, trace {trace}", cfg.label()));
        }
    }
    Outcome {
        pass: failures.is_empty(),
        summary: format!(
            "{} runs (N in {{2,3}}, 4 holonomy pairs, theta and grid(2)): dense count = trace = N^2{}",
            configs.len(),
            fail_list(&failures)
        ),
    }
}

/// Rank of P_t B^g P_s, recomputed from the library's projectors.
fn restricted_rank(model: &Model, src: &Arc<StateSpace>, p: usize, g: &GroupElement) -> rlw_core::Result<(usize, usize, usize)> {
    let (tgt, bg) = model.plaquette_bg(src, p, g)?;
    let ps = model.ground_projector(src, &model.probes(src.coloring(), &ProbePolicy::Auto)?)?.matrix;
    let pt = model.ground_projector(&tgt, &model.probes(tgt.coloring(), &ProbePolicy::Auto)?)?.matrix;
    let ds = ps.trace().re.round() as usize;
    let dt = pt.trace().re.round() as usize;
    Ok((ds, dt, rank(&(pt * bg.matrix * ps))))
}

fn criterion_6() -> Outcome {
    let mut failures = Vec::new();
    let mut tri = Vec::new();
    for (name, fam) in families() {
        let dims: Vec<usize> = ["theta", "grid(2)"]
            .iter()
            .map(|s| {
                let cfg = config(name, fam.clone(), s, sevenths());
                let model = cfg.model();
                let phi = model.holonomy_coloring(&cfg.hol).expect("coloring");
                let space = model.space(&phi).expect("space");
                let probes = model.probes(&phi, &ProbePolicy::Auto).expect("probes");
                model.ground_dim(&space, &probes, TRACE_TOL).expect("ground_dim").dim
            })
            .collect();
        tri.push(format!("{name} {}/{}", dims[0], dims[1]));
        if dims[0] != dims[1] {
            failures.push(format!("{name} theta {} vs grid {}", dims[0], dims[1]));
        }
    }

    let mut shifts_done = 0;
    for (name, fam) in [("P(2,1)", Family::p(2, 1.0)), ("P(3,2)", Family::p(3, 2.0))] {
        let cfg = config(name, fam, "grid(2)", sevenths());
        let model = cfg.model();
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
        let mut space = model.space(&model.holonomy_coloring(&cfg.hol).expect("coloring")).expect("space");
        let pool: Vec<GroupElement> = pool().into_iter().filter(|g| cfg.data.is_generic(g)).collect();
        let (mut done, mut draws) = (0, 0);
        while done < RANDOM_SHIFTS && draws < 1000 {
            draws += 1;
            let p = rng.random_range(0..cfg.graph.num_plaquettes());
            let g = pool[rng.random_range(0..pool.len())].clone();
            match restricted_rank(&model, &space, p, &g) {
                Ok((ds, dt, r)) => {
                    if ds != dt || r != ds {
                        failures.push(format!("{name} shift p{p} by {g}: dims {ds}/{dt}, rank {r}"));
                    }
                    let report = model.gauge_check(space.coloring(), p, &g, &ProbePolicy::Auto, TRACE_TOL).expect("gauge");
                    if (report.source_dim, report.target_dim, report.restricted_rank) != (ds, dt, r) {
                        failures.push(format!("{name} shift p{p} by {g}: library report disagrees"));
                    }
                    space = model.space(&report.target).expect("target");
                    done += 1;
                }
                Err(Error::GaugeAdmissibility(_)) => continue,
                Err(e) => panic!("gauge shift: {e}"),
            }
        }
        if done < RANDOM_SHIFTS {
            failures.push(format!("{name}: only {done} admissible shifts in {draws} draws"));
        }
        shifts_done += done;
    }
    Outcome {
        pass: failures.is_empty(),
        summary: format!(
            "theta/grid(2) ground dims [{}], {shifts_done} cumulative gauge shifts with equal dims and full rank{}",
            tri.join(", "),
            fail_list(&failures)
        ),
    }
}

fn cli(args: &[&str]) -> (i32, Value) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("rlw").chain(args.iter().copied()), &mut out, &mut err);
    if out.is_empty() {
        return (code, Value::Null);
    }
    let v = serde_json::from_slice(&out).unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", String::from_utf8_lossy(&err)));
    (code, v)
}

fn criterion_7() -> Outcome {
    let dir = tempfile::tempdir().expect("tempdir");
    let table = dir.path().join("p32.json");
    let table = table.to_str().unwrap();
    // Every nonzero class of (1/25)ℤ/ℤ is generic, so the slice is a subgroup minus zero.
    let slice: Vec<String> = (1..25).map(|a| format!("{a}/25")).collect();
    let slice = slice.join(",");
    let common = ["--degrees", slice.as_str(), "--probes", slice.as_str(), "--holonomy", "1/5,2/5", "--seed", "0"];
    let (code, _) = cli(&[&["export-table", "--family", "P:3:2", "--out", table][..], &common[..]].concat());
    if code != 0 {
        return Outcome { pass: false, summary: format!("export-table exited {code}") };
    }
    let runs: [&[&str]; 6] = [
        &["validate"],
        &["check", "--surface", "torus:theta"],
        &["check", "--surface", "torus:grid:2", "--strict-fusion"],
        &["spectrum", "--surface", "torus:theta", "--oracle"],
        &["spectrum", "--surface", "torus:grid:2", "--strict-fusion", "--oracle"],
        &["ground-dim", "--surface", "torus:grid:2", "--strict-fusion", "--oracle"],
    ];
    let mut failures = Vec::new();
    let mut compared = 0;
    for extra in runs {
        let (cmd, rest) = extra.split_first().unwrap();
        let family = cli(&[&[*cmd, "--family", "P:3:2"][..], rest, &common[..]].concat());
        let file = cli(&[&[*cmd, "--data", table][..], rest, &common[..]].concat());
        let name = extra.join(" ");
        compared += family.1["checks"].as_array().map_or(0, Vec::len);
        if family.0 != 0 || file.0 != 0 {
            failures.push(format!("{name}: exit {} / {}", family.0, file.0));
        }
        for key in ["result", "checks", "pass", "error"] {
            if serde_json::to_string(&family.1[key]).unwrap() != serde_json::to_string(&file.1[key]).unwrap() {
                failures.push(format!("{name}: '{key}' differs"));
            }
        }
    }
    Outcome {
        pass: failures.is_empty(),
        summary: format!(
            "P(3,2) table over the 24 classes k/25; {} commands, {compared} checks bit-identical to the family and passing{}",
            runs.len(),
            fail_list(&failures)
        ),
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("axiom suite", criterion_1),
        ("projector algebra", criterion_2),
        ("integer spectrum", criterion_3),
        ("pseudo-Hermiticity", criterion_4),
        ("torus degeneracy oracle", criterion_5),
        ("topological invariance", criterion_6),
        ("ingestion round-trip", criterion_7),
    ];
    let mut all = true;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        all &= o.pass;
        println!(
            "criterion {} {:<24} {}  {} ({:.1} s)",
            i + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            o.summary,
            start.elapsed().as_secs_f64()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
