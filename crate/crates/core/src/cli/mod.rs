//! The `rlw` command line.

pub mod checks;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group::{GroupElement, Signature};
use crate::lw_data::{closure, export_table, load_data, parse_family, validate, LwData};
use crate::operators::{Model, ProbePolicy};
use crate::state_space::{SpaceOptions, StateSpace, DEFAULT_DIM_CAP};
use crate::surface::{Coloring, GraphFile, RibbonGraph, SurfaceSpec};
use checks::{Check, Tolerances};

pub const TOOL: &str = "rlw";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_DEGREES: &str = "1/5,2/5,1/7,3/7";
const VALIDATE_TOL: f64 = 1e-12;
const OPERATOR_TOL: f64 = 1e-9;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "rlw", version, about = "Graded Levin-Wen string-net models on surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the consistency axioms of a data set over a closed sample of degrees.
    Validate(Opts),
    /// Ground-state degeneracy from the trace of the product projector.
    GroundDim(Opts),
    /// Projector algebra, adjoints, pseudo-Hermiticity, gauge and triangulation invariance.
    Check(Opts),
    /// Integer spectrum of H with multiplicities.
    Spectrum(Opts),
    /// Write a family as a file-backed table over the sampled degrees.
    ExportTable(Opts),
    /// Write the basis of H(Γ,Φ), η and the Hamiltonian.
    ExportSpace(Opts),
}

#[derive(Args, Debug, Clone)]
struct Opts {
    /// Built-in family: P:N:c, M:N:c or F:N:c:gamma0.
    #[arg(long, conflicts_with = "data", required_unless_present = "data")]
    family: Option<String>,
    /// Data file (JSON table or family selector).
    #[arg(long)]
    data: Option<PathBuf>,
    /// torus:theta, torus:grid:N or genus:G.
    #[arg(long, conflicts_with = "graph")]
    surface: Option<String>,
    /// Ribbon graph file.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// One holonomy value per basis cycle, comma separated.
    #[arg(long)]
    holonomy: Option<String>,
    /// Probe degrees for B_p; the first usable one per plaquette is taken.
    #[arg(long)]
    probes: Option<String>,
    /// Degree samples for validation and table export.
    #[arg(long, default_value = DEFAULT_DEGREES)]
    degrees: String,
    /// Base tolerance (validate: 1e-12, otherwise 1e-9; pseudo-Hermiticity ×10, spectrum ×100).
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_DIM_CAP)]
    dim_cap: usize,
    /// Drop empty vertex slots from the basis.
    #[arg(long)]
    strict_fusion: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (falls back to RLW_THREADS).
    #[arg(long)]
    threads: Option<usize>,
    /// Confirm by dense diagonalization of H.
    #[arg(long)]
    oracle: bool,
}

/// The resolved configuration, embedded in every report.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RunConfig {
    pub command: String,
    pub data: Value,
    pub surface: String,
    pub holonomy: Vec<String>,
    pub probes: Value,
    pub degrees: Vec<String>,
    pub tol: f64,
    pub dim_cap: usize,
    pub strict_fusion: bool,
    pub seed: u64,
    pub oracle: bool,
    pub out: Option<String>,
}

/// A JSON report.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: RunConfig,
    pub result: Value,
    pub checks: Vec<Check>,
    pub error: Option<String>,
    pub pass: bool,
}

/// Splits a comma list, ignoring commas inside parentheses.
pub fn split_list(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    if !cur.trim().is_empty() || !out.is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

fn parse_elements(sig: &Signature, s: &str) -> Result<Vec<GroupElement>> {
    split_list(s).iter().map(|x| sig.parse(x)).collect()
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::Io(_) | Error::Json(_) | Error::Topology(_) | Error::Shape(_) | Error::GroupArithmetic(_) => {
            EXIT_USAGE
        }
        _ => EXIT_FAIL,
    }
}

struct Setup {
    config: RunConfig,
    opts: Opts,
    data: Box<dyn LwData>,
}

impl Setup {
    fn new(command: &str, opts: Opts) -> Result<Self> {
        let data: Box<dyn LwData> = match (&opts.family, &opts.data) {
            (Some(f), None) => Box::new(parse_family(f)?),
            (None, Some(p)) => load_data(p)?,
            _ => return Err(Error::Parse("give exactly one of --family and --data".into())),
        };
        let default_tol = if command == "validate" { VALIDATE_TOL } else { OPERATOR_TOL };
        let tol = opts.tol.unwrap_or(default_tol);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::Parse(format!("tolerance must be positive, got {tol}")));
        }
        let sig = data.signature();
        let canon = |s: &Option<String>| -> Result<Vec<String>> {
            Ok(match s {
                Some(s) => parse_elements(sig, s)?.iter().map(|g| g.to_string()).collect(),
                None => Vec::new(),
            })
        };
        let surface = match (&opts.surface, &opts.graph) {
            (_, Some(p)) => format!("file:{}", p.display()),
            (Some(s), None) => SurfaceSpec::parse(s)?.to_string(),
            (None, None) => SurfaceSpec::Theta.to_string(),
        };
        let config = RunConfig {
            command: command.into(),
            data: match (&opts.family, &opts.data) {
                (Some(f), _) => json!({ "family": f }),
                (_, Some(p)) => json!({ "file": p.display().to_string() }),
                _ => Value::Null,
            },
            surface,
            holonomy: canon(&opts.holonomy)?,
            probes: match &opts.probes {
                Some(_) => json!(canon(&opts.probes)?),
                None => json!("auto"),
            },
            degrees: canon(&Some(opts.degrees.clone()))?,
            tol,
            dim_cap: opts.dim_cap,
            strict_fusion: opts.strict_fusion,
            seed: opts.seed,
            oracle: opts.oracle,
            out: opts.out.as_ref().map(|p| p.display().to_string()),
        };
        Ok(Setup { config, opts, data })
    }

    fn sig(&self) -> &Signature {
        self.data.signature()
    }

    fn degrees(&self) -> Result<Vec<GroupElement>> {
        parse_elements(self.sig(), &self.opts.degrees)
    }

    /// Generic closure of the degree samples: gauge shifts and second degrees are drawn from it.
    fn pool(&self) -> Result<Vec<GroupElement>> {
        Ok(closure(self.data.as_ref(), &self.degrees()?))
    }

    fn graph(&self) -> Result<RibbonGraph> {
        match (&self.opts.surface, &self.opts.graph) {
            (_, Some(p)) => {
                let file: GraphFile = serde_json::from_str(&std::fs::read_to_string(p)?)?;
                RibbonGraph::from_file(&file)
            }
            (Some(s), None) => SurfaceSpec::parse(s)?.build(),
            (None, None) => SurfaceSpec::Theta.build(),
        }
    }

    fn holonomy(&self) -> Result<Vec<GroupElement>> {
        match &self.opts.holonomy {
            Some(s) => parse_elements(self.sig(), s),
            None => Err(Error::Parse("--holonomy is required for this command".into())),
        }
    }

    fn policy(&self) -> Result<ProbePolicy> {
        Ok(match &self.opts.probes {
            Some(s) => ProbePolicy::Explicit(parse_elements(self.sig(), s)?),
            None => ProbePolicy::Auto,
        })
    }

    fn options(&self) -> SpaceOptions {
        SpaceOptions { strict_fusion: self.opts.strict_fusion, dim_cap: self.opts.dim_cap }
    }

    /// Triangulation used for the invariance comparison.
    fn reference_graph(&self, graph: &RibbonGraph) -> Result<Option<(String, RibbonGraph)>> {
        if graph.genus() != 1 {
            return Ok(None);
        }
        let spec = if graph.is_isomorphic(&RibbonGraph::theta()) { SurfaceSpec::Grid(2) } else { SurfaceSpec::Theta };
        Ok(Some((spec.to_string(), spec.build()?)))
    }
}

/// Everything an operator command needs.
struct Built<'a> {
    model: Model<'a>,
    phi: Coloring,
    space: Arc<StateSpace>,
    policy: ProbePolicy,
    probes: Vec<GroupElement>,
}

fn build<'a>(setup: &'a Setup, graph: &'a RibbonGraph) -> Result<Built<'a>> {
    let model = Model::new(graph, setup.data.as_ref(), setup.options())?;
    let phi = model.holonomy_coloring_with(&setup.holonomy()?, &setup.pool()?)?;
    let space = model.space(&phi)?;
    let policy = setup.policy()?;
    let probes = model.probes(&phi, &policy)?;
    Ok(Built { model, phi, space, policy, probes })
}

fn elements_json(gs: &[GroupElement]) -> Value {
    json!(gs.iter().map(|g| g.to_string()).collect::<Vec<_>>())
}

fn context_json(b: &Built) -> Value {
    json!({
        "coloring": b.phi.to_json(),
        "probes": elements_json(&b.probes),
        "hilbert_dim": b.space.dim(),
    })
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Some(a), Value::Object(b)) = (base.as_object_mut(), extra) {
        a.extend(b);
    }
    base
}

type Outcome = Result<(Value, Vec<Check>)>;

fn cmd_validate(setup: &Setup) -> Outcome {
    let report = validate(setup.data.as_ref(), &setup.degrees()?, setup.config.tol);
    let mut checks = vec![Check::new("singular_set_small", if report.singular_set_small { 0.0 } else { 1.0 }, 0.0)];
    for c in &report.checks {
        let mut row = Check::new(&c.name, c.max_residual, c.tolerance);
        row.pass = c.pass;
        row.detail = c.witness.clone();
        checks.push(row);
    }
    Ok((serde_json::to_value(&report)?, checks))
}

fn cmd_ground_dim(setup: &Setup) -> Outcome {
    let graph = setup.graph()?;
    let b = build(setup, &graph)?;
    let tol = setup.config.tol;
    let gd = b.model.ground_dim(&b.space, &b.probes, tol)?;
    let mut checks = vec![Check::new("ground_projector_idempotent", gd.idempotency_residual, tol)];
    let mut result = merge(context_json(&b), serde_json::to_value(&gd)?);
    if setup.opts.oracle {
        let h = b.model.hamiltonian(&b.space, &b.probes)?;
        let (worst, zeros) = checks::dense_oracle(&h)?;
        let tols = Tolerances::from_base(tol);
        checks.push(Check::new("dense_eigenvalues_integral", worst, tols.spectrum));
        checks.push(Check::equal("dense_ground_dim", zeros, gd.dim));
        result = merge(result, json!({ "dense_ground_dim": zeros }));
    }
    Ok((result, checks))
}

fn cmd_spectrum(setup: &Setup) -> Outcome {
    let graph = setup.graph()?;
    let b = build(setup, &graph)?;
    let tols = Tolerances::from_base(setup.config.tol);
    let spec = b.model.spectrum(&b.space, &b.probes, tols.spectrum)?;
    if spec.residual > tols.spectrum {
        return Err(Error::Instability(format!(
            "eigenvalue rounding residual {:e} exceeds {:e}",
            spec.residual, tols.spectrum
        )));
    }
    let gd = b.model.ground_dim(&b.space, &b.probes, tols.algebra)?;
    let mut checks = checks::spectrum_checks(&b.model, &b.space, &b.probes, gd.dim, tols.spectrum)?;
    let levels: Vec<Value> = spec.levels.iter().map(|(e, m)| json!({ "energy": e, "multiplicity": m })).collect();
    let mut result = merge(
        context_json(&b),
        json!({
            "levels": levels,
            "total": spec.total(),
            "gap": spec.gap(),
            "residual": spec.residual,
            "ground_dim": gd.dim,
        }),
    );
    if setup.opts.oracle {
        let h = b.model.hamiltonian(&b.space, &b.probes)?;
        let (worst, zeros) = checks::dense_oracle(&h)?;
        checks.push(Check::new("dense_eigenvalues_integral", worst, tols.spectrum));
        checks.push(Check::equal("dense_ground_dim", zeros, spec.multiplicity(0)));
        result = merge(result, json!({ "dense_ground_dim": zeros }));
    }
    Ok((result, checks))
}

fn cmd_check(setup: &Setup) -> Outcome {
    let graph = setup.graph()?;
    let b = build(setup, &graph)?;
    let tols = Tolerances::from_base(setup.config.tol);
    let seed = setup.config.seed;
    let pool = setup.pool()?;
    let bs = b.model.plaquette_projectors(&b.space, &b.probes)?;
    let gd = b.model.ground_dim(&b.space, &b.probes, tols.algebra)?;
    let h = b.model.hamiltonian(&b.space, &b.probes)?;
    let mut out = checks::projector_algebra(&b.model, &b.space, &bs, tols.algebra)?;
    out.extend(checks::string_algebra(&b.model, &b.space, &b.probes, &pool, tols.algebra)?);
    out.extend(checks::pseudo_hermiticity(&b.space, &h, seed, tols.pseudo_hermitian)?);
    out.extend(checks::spectrum_checks(&b.model, &b.space, &b.probes, gd.dim, tols.spectrum)?);
    out.extend(checks::gauge_invariance(&b.model, &b.phi, &b.policy, &pool, gd.dim, seed, tols.algebra)?);
    out.push(checks::triangulation_invariance(
        &b.model,
        setup.reference_graph(&graph)?,
        &setup.holonomy()?,
        &pool,
        &b.policy,
        gd.dim,
        tols.algebra,
    )?);
    out.push(checks::fusion_convention(&b.model, &b.phi, &b.policy, gd.dim, b.space.dim(), tols.algebra)?);
    Ok((merge(context_json(&b), json!({ "ground_dim": gd.dim })), out))
}

fn cmd_export_table(setup: &Setup) -> Outcome {
    let slice = closure(setup.data.as_ref(), &setup.degrees()?);
    let file = export_table(setup.data.as_ref(), &slice)?;
    Ok((serde_json::to_value(&file)?, Vec::new()))
}

fn cmd_export_space(setup: &Setup) -> Outcome {
    let graph = setup.graph()?;
    let b = build(setup, &graph)?;
    let h = b.model.hamiltonian(&b.space, &b.probes)?;
    let matrix: Vec<Vec<[f64; 2]>> =
        (0..h.matrix.nrows()).map(|r| (0..h.matrix.ncols()).map(|c| [h.matrix[(r, c)].re, h.matrix[(r, c)].im]).collect()).collect();
    let result = merge(
        context_json(&b),
        json!({
            "graph": graph.to_file(),
            "space": b.space.to_json(setup.data.as_ref()),
            "hamiltonian": matrix,
        }),
    );
    Ok((result, Vec::new()))
}

/// Exports are the artifact itself, tagged with the generating configuration.
fn exported(report: &Report) -> Value {
    let generator = json!({ "tool": report.tool, "version": report.version, "config": report.config });
    merge(report.result.clone(), json!({ "generator": generator }))
}

fn summary(err: &mut dyn Write, report: &Report, elapsed: f64) {
    let _ = writeln!(err, "{} {} ({:.3} s)", TOOL, report.config.command, elapsed);
    for c in &report.checks {
        let verdict = if c.pass { "pass" } else { "FAIL" };
        let _ = writeln!(err, "  {:<32} {:>11.3e} <= {:<9.1e} {}", c.name, c.residual, c.tolerance, verdict);
        if let Some(d) = &c.detail {
            if !c.pass || d.starts_with("skipped") {
                let _ = writeln!(err, "      {d}");
            }
        }
    }
    if let Some(e) = &report.error {
        let _ = writeln!(err, "  error: {e}");
    }
    let _ = writeln!(err, "{}", if report.pass { "PASS" } else { "FAIL" });
}

fn run_command(command: &str, opts: Opts, out: &mut Vec<u8>, err: &mut Vec<u8>) -> i32 {
    let start = Instant::now();
    let setup = match Setup::new(command, opts) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    let outcome = match command {
        "validate" => cmd_validate(&setup),
        "ground-dim" => cmd_ground_dim(&setup),
        "check" => cmd_check(&setup),
        "spectrum" => cmd_spectrum(&setup),
        "export-table" => cmd_export_table(&setup),
        _ => cmd_export_space(&setup),
    };
    let (report, code) = match outcome {
        Ok((result, checks)) => {
            let pass = checks.iter().all(|c| c.pass);
            let code = if pass { EXIT_PASS } else { EXIT_FAIL };
            (Report { tool: TOOL, version: VERSION, config: setup.config.clone(), result, checks, error: None, pass }, code)
        }
        Err(e) => {
            let code = exit_code(&e);
            if code == EXIT_USAGE {
                let _ = writeln!(err, "error: {e}");
                return code;
            }
            let r = Report {
                tool: TOOL,
                version: VERSION,
                config: setup.config.clone(),
                result: Value::Null,
                checks: Vec::new(),
                error: Some(match e {
                    Error::DimensionCap { .. } if !setup.opts.strict_fusion => {
                        format!("{e}; --strict-fusion drops empty vertex slots, --dim-cap raises the limit")
                    }
                    _ => e.to_string(),
                }),
                pass: false,
            };
            (r, code)
        }
    };
    let artifact = command.starts_with("export-") && report.error.is_none();
    let body = if artifact { exported(&report) } else { serde_json::to_value(&report).unwrap_or(Value::Null) };
    let text = match if artifact { serde_json::to_string(&body) } else { serde_json::to_string_pretty(&body) } {
        Ok(t) => t + "\n",
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let written = match &setup.opts.out {
        Some(p) => std::fs::write(p, &text),
        None => out.write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: {e}");
        return EXIT_USAGE;
    }
    summary(err, &report, start.elapsed().as_secs_f64());
    code
}

fn threads(opts: &Opts) -> std::result::Result<Option<usize>, String> {
    if let Some(n) = opts.threads {
        return Ok(Some(n));
    }
    match std::env::var("RLW_THREADS") {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| format!("RLW_THREADS must be an integer, got '{v}'")),
        Err(_) => Ok(None),
    }
}

/// Runs the CLI on `args` (including the program name), writing the report and the summary.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let (name, opts) = match cli.command {
        Command::Validate(o) => ("validate", o),
        Command::GroundDim(o) => ("ground-dim", o),
        Command::Check(o) => ("check", o),
        Command::Spectrum(o) => ("spectrum", o),
        Command::ExportTable(o) => ("export-table", o),
        Command::ExportSpace(o) => ("export-space", o),
    };
    let n = match threads(&opts) {
        Ok(n) => n,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let pool = match n {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => Some(pool),
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return EXIT_USAGE;
            }
        },
        None => None,
    };
    let (mut o, mut e) = (Vec::new(), Vec::new());
    let code = match pool {
        Some(pool) => pool.install(|| run_command(name, opts, &mut o, &mut e)),
        None => run_command(name, opts, &mut o, &mut e),
    };
    let _ = out.write_all(&o);
    let _ = err.write_all(&e);
    code
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
