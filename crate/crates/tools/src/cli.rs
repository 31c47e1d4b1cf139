//! `bellpoly` command line.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use bellpoly_core::lp::{membership_with, visibility_with, LpOptions};
use bellpoly_core::polytope::{
    enumerate_facets_with, lift_symmetric, ns_polytope_vertices, symmetric_classes, symmetrize_vertices, DdState,
    HRepresentation, RelabelingGroup, SymmetricInequality,
};
use bellpoly_core::quantum::{self, named_setup, QuantumSetup, SeesawOptions, SETUP_NAMES};
use bellpoly_core::scalar::rational_from_f64;
use bellpoly_core::vertices::build_vertices_with;
use bellpoly_core::{catalog, Behavior, BellInequality, ModelKind, ModelSpec, NoiseModel, Rational, Scenario, Space, VertexSet};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{ToolError, ToolResult};
use crate::formats::{self, AnyBehavior, Catalog, CatalogEntry, TextScalar};
use crate::manifest::{sha256_hex, RunManifest};
use crate::parallel::{self, RayonScan};
use crate::reproduce::{self, ReproduceOptions, Target};

/// Facet runs on more points than this need `--long`.
pub const SHORT_FACET_POINTS: usize = 32;

#[derive(Debug, Parser)]
#[command(name = "bellpoly", version, about = "Correlation polytopes, LP membership and quantum behaviors for multipartite Bell scenarios")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Arithmetic backend (default: rational for rational inputs, float otherwise).
    #[arg(long, global = true, value_enum)]
    pub backend: Option<Backend>,
    /// Comparison tolerance for reports.
    #[arg(long, global = true, default_value_t = 1e-4)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Allow long-running computations.
    #[arg(long, global = true)]
    pub long: bool,
    /// Write the main artifact here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Record wall time in the manifest (outputs then differ between runs).
    #[arg(long, global = true)]
    pub wall_time: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    Rational,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SpaceArg {
    Probability,
    Correlator,
}

impl From<SpaceArg> for Space {
    fn from(s: SpaceArg) -> Self {
        match s {
            SpaceArg::Probability => Space::Probability,
            SpaceArg::Correlator => Space::Correlator,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the vertex list of a model, e.g. `NS[2/2]`, `PTO[A<B]`, `NS[3/1]:ns3=<file>`.
    Vertices {
        model: String,
        /// Coordinates of the written points (default: native for the model).
        #[arg(long, value_enum)]
        space: Option<SpaceArg>,
    },
    /// Decide whether a behavior lies in a model, with a certificate.
    Membership {
        /// Setup name, `uniform:<n>`, or a behavior/setup JSON file.
        behavior: String,
        /// Model spec or vertex file.
        model: String,
        /// Mix the behavior with white noise at this visibility first.
        #[arg(long)]
        mix: Option<f64>,
    },
    /// Largest white-noise visibility keeping a behavior inside a model.
    Visibility { behavior: String, model: String },
    /// Evaluate an inequality (name or CSV file) on a behavior or setup.
    Eval { inequality: String, behavior: String },
    /// Facets of a model or vertex file by double description.
    Facets {
        source: String,
        /// Work in permutation-symmetric coordinates and lift the results.
        #[arg(long)]
        symmetric: bool,
        /// Checkpoint file, rewritten periodically.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Resume from the checkpoint file.
        #[arg(long, requires = "checkpoint")]
        resume: bool,
    },
    /// Group inequalities into relabeling families.
    Canon { inequalities: PathBuf },
    /// See-saw lower bound on the qubit quantum value of an inequality.
    Seesaw {
        inequality: String,
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        /// Keep the state of this setup fixed.
        #[arg(long)]
        state: Option<String>,
    },
    /// Recompute published numbers and compare.
    Reproduce {
        #[arg(value_enum)]
        targets: Vec<Target>,
        /// Tripartite non-signaling vertex file for `ns31`.
        #[arg(long)]
        ns3: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        restarts: usize,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, requires = "checkpoint")]
        resume: bool,
        /// Emit CSV instead of a text table.
        #[arg(long)]
        csv: bool,
    },
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run<O: Write, E: Write>(args: &[String], stdout: &mut O, stderr: &mut E) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let pool = parallel::pool(cli.global.threads);
    let started = Instant::now();
    let mut ctx = Context { global: &cli.global, args, started };
    // buffered so the work can run inside the pool
    let (mut out_buf, mut err_buf) = (Vec::new(), Vec::new());
    let result = pool.install(|| dispatch(&cli.command, &mut ctx, &mut out_buf, &mut err_buf));
    let _ = stdout.write_all(&out_buf);
    let _ = stderr.write_all(&err_buf);
    match result {
        Ok(ok) => {
            if ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}

struct Context<'a> {
    global: &'a Global,
    args: &'a [String],
    started: Instant,
}

impl Context<'_> {
    fn manifest(&self, backend: &str) -> RunManifest {
        // program name without its install path
        let mut args = vec!["bellpoly".to_string()];
        args.extend(self.args.iter().skip(1).cloned());
        let mut m = RunManifest::new(&args, backend, self.global.seed);
        if self.global.wall_time {
            m.wall_time_ms = Some(self.started.elapsed().as_millis() as u64);
        }
        m
    }

    /// Records hashes of every argument naming an existing file.
    fn manifest_with_inputs(&self, backend: &str) -> ToolResult<RunManifest> {
        let mut m = self.manifest(backend);
        for a in self.args.iter().skip(1) {
            let path = a.split_once(":ns3=").map_or(a.as_str(), |(_, p)| p);
            let p = Path::new(path);
            if p.is_file() && self.global.out.as_deref() != Some(p) {
                m.record_input(p)?;
            }
        }
        Ok(m)
    }

    fn emit<O: Write>(&self, stdout: &mut O, text: &str) -> ToolResult<()> {
        match &self.global.out {
            Some(p) => std::fs::write(p, text).map_err(|e| ToolError::io(p, e)),
            None => Ok(stdout.write_all(text.as_bytes())?),
        }
    }
}

fn read(path: &Path) -> ToolResult<String> {
    std::fs::read_to_string(path).map_err(|e| ToolError::io(path, e))
}

fn dispatch<O: Write, E: Write>(cmd: &Command, ctx: &mut Context, out: &mut O, err: &mut E) -> ToolResult<bool> {
    match cmd {
        Command::Vertices { model, space } => cmd_vertices(ctx, model, *space, out, err),
        Command::Membership { behavior, model, mix } => cmd_membership(ctx, behavior, model, *mix, out),
        Command::Visibility { behavior, model } => cmd_visibility(ctx, behavior, model, out),
        Command::Eval { inequality, behavior } => cmd_eval(ctx, inequality, behavior, out),
        Command::Facets { source, symmetric, checkpoint, resume } => {
            cmd_facets(ctx, source, *symmetric, checkpoint.as_deref(), *resume, out, err)
        }
        Command::Canon { inequalities } => cmd_canon(ctx, inequalities, out),
        Command::Seesaw { inequality, restarts, state } => cmd_seesaw(ctx, inequality, *restarts, state.as_deref(), out),
        Command::Reproduce { targets, ns3, restarts, checkpoint, resume, csv } => {
            cmd_reproduce(ctx, targets, ns3.as_deref(), *restarts, checkpoint.as_deref(), *resume, *csv, out, err)
        }
    }
}

// ---------------------------------------------------------------------------
// sources

/// Model spec (optionally `NS[3/1]:ns3=<file>`) or a vertex file.
pub fn load_vertices(source: &str, long: bool) -> ToolResult<VertexSet> {
    let path = Path::new(source);
    if path.is_file() {
        return formats::read_vertex_file(std::io::BufReader::new(open(path)?), source);
    }
    let (spec_text, ns3_path) = match source.split_once(":ns3=") {
        Some((s, p)) => (s, Some(p)),
        None => (source, None),
    };
    let spec = ModelSpec::parse(spec_text).map_err(|e| ToolError::Usage(format!("model `{spec_text}`: {e}")))?;
    match (&spec.kind, ns3_path) {
        (ModelKind::Ns31, None) => Err(ToolError::Usage("NS[3/1] needs `:ns3=<file>` with the NS[3] vertex list".into())),
        (ModelKind::Ns31, Some(p)) => {
            let ns3 = formats::read_vertex_file(std::io::BufReader::new(open(Path::new(p))?), p)?;
            Ok(build_vertices_with(&spec, Some(&ns3))?)
        }
        (_, Some(_)) => Err(ToolError::Usage("`:ns3=` only applies to NS[3/1]".into())),
        (ModelKind::NonSignaling, None) if spec.scenario.n_parties() > 2 => {
            if !long {
                return Err(ToolError::Usage(format!("{spec} vertices are enumerated by double description; pass --long")));
            }
            Ok(ns_polytope_vertices(spec.scenario)?)
        }
        _ => Ok(build_vertices_with(&spec, None)?),
    }
}

fn open(path: &Path) -> ToolResult<std::fs::File> {
    std::fs::File::open(path).map_err(|e| ToolError::io(path, e))
}

/// A behavior argument: a quantum setup or an explicit table.
pub enum Source {
    Setup(QuantumSetup),
    Table(AnyBehavior),
}

impl Source {
    pub fn behavior(&self) -> ToolResult<AnyBehavior> {
        Ok(match self {
            Source::Setup(s) => AnyBehavior::Float(quantum::behavior_from_setup(s)?),
            Source::Table(b) => b.clone(),
        })
    }
}

pub fn load_source(arg: &str) -> ToolResult<Source> {
    if let Some(n) = arg.strip_prefix("uniform:") {
        let n: usize = n.parse().map_err(|_| ToolError::Usage(format!("bad party count in `{arg}`")))?;
        return Ok(Source::Table(AnyBehavior::Rational(Behavior::uniform(Scenario::new(n)?))));
    }
    if SETUP_NAMES.contains(&arg) {
        return Ok(Source::Setup(named_setup(arg)?));
    }
    let path = Path::new(arg);
    if !path.is_file() {
        return Err(ToolError::Usage(format!(
            "`{arg}` is neither a setup name ({}), `uniform:<n>`, nor a file",
            SETUP_NAMES.join(", ")
        )));
    }
    let text = read(path)?;
    let doc: serde_json::Value = serde_json::from_str(&text)?;
    if doc.get("entries").is_some() {
        Ok(Source::Table(formats::behavior_from_json(&text, arg)?))
    } else {
        Ok(Source::Setup(formats::setup_from_json(&text)?))
    }
}

/// A catalog name or the first inequality of a CSV file.
pub fn load_inequality(arg: &str) -> ToolResult<BellInequality<Rational>> {
    if let Ok(i) = catalog::named(arg) {
        return Ok(i);
    }
    let path = Path::new(arg);
    if !path.is_file() {
        return Err(ToolError::Usage(format!(
            "`{arg}` is neither a named inequality ({}) nor a file",
            catalog::NAMES.join(", ")
        )));
    }
    formats::inequalities_from_csv::<Rational>(&read(path)?, arg)?
        .into_iter()
        .next()
        .ok_or_else(|| ToolError::format(arg, 0, "no inequality in file"))
}

fn resolve_backend(requested: Option<Backend>, behavior: &AnyBehavior) -> Backend {
    requested.unwrap_or(match behavior {
        AnyBehavior::Rational(_) => Backend::Rational,
        AnyBehavior::Float(_) => Backend::Float,
    })
}

fn to_rational(b: &AnyBehavior) -> ToolResult<Behavior<Rational>> {
    match b {
        AnyBehavior::Rational(r) => Ok(r.clone()),
        AnyBehavior::Float(f) => {
            let table = f
                .table()
                .iter()
                .map(|&p| rational_from_f64(p).ok_or_else(|| ToolError::Usage("non-finite probability".into())))
                .collect::<ToolResult<Vec<_>>>()?;
            // exact conversion keeps the rounding error; renormalize by input row
            let s = f.scenario();
            let k = s.n_settings();
            let mut table = table;
            for x in 0..k {
                let sum: Rational = (0..k).map(|a| table[s.index(x, a)].clone()).sum();
                for a in 0..k {
                    let i = s.index(x, a);
                    table[i] = &table[i] / &sum;
                }
            }
            Ok(Behavior::new(s, table)?)
        }
    }
}

// ---------------------------------------------------------------------------
// commands

fn cmd_vertices<O: Write, E: Write>(
    ctx: &Context,
    model: &str,
    space: Option<SpaceArg>,
    out: &mut O,
    err: &mut E,
) -> ToolResult<bool> {
    let v = load_vertices(model, ctx.global.long)?;
    let space = space.map(Space::from).unwrap_or(v.space());
    let manifest = ctx.manifest_with_inputs("rational")?;
    let text = formats::vertex_file_string(&v, space, Some(&manifest))?;
    ctx.emit(out, &text)?;
    let echo = format!("{} count={}\n", v.model(), v.len());
    if ctx.global.out.is_some() {
        out.write_all(echo.as_bytes())?;
    } else {
        err.write_all(echo.as_bytes())?;
    }
    Ok(true)
}

fn mixed<T: bellpoly_core::Scalar>(b: Behavior<T>, mix: Option<f64>, as_t: impl Fn(f64) -> ToolResult<T>) -> ToolResult<Behavior<T>> {
    match mix {
        None => Ok(b),
        Some(v) => {
            let noise = NoiseModel::uniform(b.scenario());
            Ok(b.mix(&as_t(v)?, &noise)?)
        }
    }
}

fn exact_weight(v: f64) -> ToolResult<Rational> {
    rational_from_f64(v).ok_or_else(|| ToolError::Usage(format!("bad weight {v}")))
}

fn cmd_membership<O: Write>(ctx: &Context, behavior: &str, model: &str, mix: Option<f64>, out: &mut O) -> ToolResult<bool> {
    let b = load_source(behavior)?.behavior()?;
    let v = load_vertices(model, ctx.global.long)?;
    let opts = LpOptions::default();
    let (inside, text) = match resolve_backend(ctx.global.backend, &b) {
        Backend::Rational => {
            let t = mixed(to_rational(&b)?, mix, exact_weight)?;
            let cert = membership_with(&t, &v, &opts, &RayonScan)?;
            (cert.inside, formats::membership_to_json(&cert, Some(&ctx.manifest_with_inputs("rational")?)))
        }
        Backend::Float => {
            let t = mixed(b.to_f64(), mix, Ok)?;
            let cert = membership_with(&t, &v, &opts, &RayonScan)?;
            (cert.inside, formats::membership_to_json(&cert, Some(&ctx.manifest_with_inputs("float")?)))
        }
    };
    writeln!(out, "{} {}", if inside { "inside" } else { "outside" }, v.model())?;
    if let Some(p) = &ctx.global.out {
        std::fs::write(p, text).map_err(|e| ToolError::io(p, e))?;
    }
    Ok(true)
}

fn cmd_visibility<O: Write>(ctx: &Context, behavior: &str, model: &str, out: &mut O) -> ToolResult<bool> {
    let b = load_source(behavior)?.behavior()?;
    let v = load_vertices(model, ctx.global.long)?;
    let opts = LpOptions::default();
    let (shown, text) = match resolve_backend(ctx.global.backend, &b) {
        Backend::Rational => {
            let t = to_rational(&b)?;
            let r = visibility_with(&t, &v, &NoiseModel::uniform(t.scenario()), &opts, &RayonScan)?;
            let shown = format!("{} ({:.10})", r.v_max.to_text(), bellpoly_core::Scalar::to_f64(&r.v_max));
            (shown, formats::visibility_to_json(&r, Some(&ctx.manifest_with_inputs("rational")?)))
        }
        Backend::Float => {
            let t = b.to_f64();
            let r = visibility_with(&t, &v, &NoiseModel::uniform(t.scenario()), &opts, &RayonScan)?;
            (format!("{:.10}", r.v_max), formats::visibility_to_json(&r, Some(&ctx.manifest_with_inputs("float")?)))
        }
    };
    writeln!(out, "v_max {} {shown}", v.model())?;
    if let Some(p) = &ctx.global.out {
        std::fs::write(p, text).map_err(|e| ToolError::io(p, e))?;
    }
    Ok(true)
}

fn cmd_eval<O: Write>(ctx: &Context, inequality: &str, behavior: &str, out: &mut O) -> ToolResult<bool> {
    let ineq = load_inequality(inequality)?;
    let line = match load_source(behavior)? {
        Source::Setup(s) if ctx.global.backend != Some(Backend::Rational) => {
            let v = quantum::value(&ineq, &s)?;
            format!("{v:.10} bound {}", ineq.bound().to_text())
        }
        src => {
            let b = src.behavior()?;
            match resolve_backend(ctx.global.backend, &b) {
                Backend::Rational => {
                    let v = ineq.value(&to_rational(&b)?)?;
                    format!("{} bound {}", v.to_text(), ineq.bound().to_text())
                }
                Backend::Float => {
                    let v = ineq.to_f64().value(&b.to_f64())?;
                    format!("{v:.10} bound {}", ineq.bound().to_text())
                }
            }
        }
    };
    writeln!(out, "{line}")?;
    Ok(true)
}

fn cmd_facets<O: Write, E: Write>(
    ctx: &Context,
    source: &str,
    symmetric: bool,
    checkpoint: Option<&Path>,
    resume: bool,
    out: &mut O,
    err: &mut E,
) -> ToolResult<bool> {
    let v = load_vertices(source, ctx.global.long)?;
    let scenario = v.scenario();
    let points: Vec<Vec<Rational>> = if symmetric {
        symmetrize_vertices(&v)?.into_iter().map(|s| s.coords).collect()
    } else {
        v.points().iter().map(|p| p.to_rationals()).collect()
    };
    if points.len() > SHORT_FACET_POINTS && !ctx.global.long {
        return Err(ToolError::Usage(format!(
            "facet enumeration on {} points is long-running; pass --long",
            points.len()
        )));
    }
    let state: Option<DdState> = match (resume, checkpoint) {
        (true, Some(p)) => Some(formats::checkpoint_from_json(&read(p)?, &p.display().to_string())?),
        _ => None,
    };
    let h: HRepresentation = match checkpoint {
        Some(p) => {
            let mut obs = reproduce::FileCheckpoint::new(p.to_path_buf());
            let h = enumerate_facets_with(&points, state, &mut obs)?;
            if let Some(e) = obs.error {
                return Err(ToolError::io(p, e));
            }
            h
        }
        None => enumerate_facets_with(&points, state, &mut ())?,
    };
    let ineqs: Vec<BellInequality> = if symmetric {
        h.facets
            .into_iter()
            .map(|f| {
                let sym = SymmetricInequality { scenario, coeffs: f.normal, bound: f.rhs };
                Ok(lift_symmetric(&sym)?.with_model(v.model().clone()))
            })
            .collect::<ToolResult<_>>()?
    } else {
        h.facets
            .into_iter()
            .map(|f| Ok(BellInequality::new(scenario, v.space(), f.normal, f.rhs)?.with_model(v.model().clone())))
            .collect::<ToolResult<_>>()?
    };
    let manifest = ctx.manifest_with_inputs("rational")?;
    ctx.emit(out, &formats::inequalities_to_csv(&ineqs, Some(&manifest)))?;
    let dims = if symmetric { symmetric_classes(&scenario).len() } else { v.space().dim(&scenario) };
    writeln!(err, "facets={} equalities={} dim={dims}", ineqs.len(), h.equalities.len())?;
    Ok(true)
}

/// Hash of the model-free canonical CSV.
pub fn family_hash(canonical: &BellInequality) -> String {
    let bare = BellInequality::new(
        canonical.scenario(),
        canonical.space(),
        canonical.coeffs().to_vec(),
        canonical.bound().clone(),
    )
    .expect("same shape");
    sha256_hex(formats::inequality_to_csv(&bare).as_bytes())
}

fn cmd_canon<O: Write>(ctx: &Context, path: &Path, out: &mut O) -> ToolResult<bool> {
    let ineqs = formats::inequalities_from_csv::<Rational>(&read(path)?, &path.display().to_string())?;
    let mut catalog = Catalog { families: Vec::new(), manifest: Some(ctx.manifest_with_inputs("rational")?) };
    let mut groups: Vec<(Scenario, RelabelingGroup)> = Vec::new();
    let mut lines = String::new();
    for ineq in &ineqs {
        let s = ineq.scenario();
        if !groups.iter().any(|(g, _)| *g == s) {
            groups.push((s, RelabelingGroup::new(s)));
        }
        let group = &groups.iter().find(|(g, _)| *g == s).expect("inserted").1;
        let c = parallel::canonicalize(ineq, group);
        let hash = family_hash(&c.inequality);
        lines.push_str(&format!("{hash} orbit={}\n", c.orbit_size));
        if !catalog.families.iter().any(|f| f.hash == hash) {
            let bare = BellInequality::new(s, c.inequality.space(), c.inequality.coeffs().to_vec(), c.inequality.bound().clone())?;
            catalog.families.push(CatalogEntry {
                hash,
                orbit_size: c.orbit_size,
                representative: formats::inequality_to_csv(&bare),
            });
        }
    }
    match &ctx.global.out {
        Some(p) => {
            std::fs::write(p, catalog.to_json()).map_err(|e| ToolError::io(p, e))?;
            out.write_all(lines.as_bytes())?;
            writeln!(out, "families={}", catalog.families.len())?;
        }
        None => out.write_all(catalog.to_json().as_bytes())?,
    }
    Ok(true)
}

fn cmd_seesaw<O: Write>(ctx: &Context, inequality: &str, restarts: usize, state: Option<&str>, out: &mut O) -> ToolResult<bool> {
    let ineq = load_inequality(inequality)?;
    let fixed_state = match state {
        None => None,
        Some(s) => match load_source(s)? {
            Source::Setup(q) => Some(q.state().to_vec()),
            Source::Table(_) => return Err(ToolError::Usage("--state needs a setup, not a behavior table".into())),
        },
    };
    let opts = SeesawOptions { restarts, seed: ctx.global.seed, fixed_state, ..Default::default() };
    let res = parallel::seesaw(&ineq, &opts)?;
    let w = quantum::state_visibility_threshold(&ineq, &res.best.setup)?;
    writeln!(
        out,
        "value {:.10} bound {} state_visibility {:.10} restarts {} monotone {}",
        res.best.value,
        ineq.bound().to_text(),
        w,
        res.values.len(),
        res.monotone
    )?;
    if let Some(p) = &ctx.global.out {
        let text = formats::setup_to_json(&res.best.setup, Some(&ctx.manifest_with_inputs("float")?));
        std::fs::write(p, text).map_err(|e| ToolError::io(p, e))?;
    }
    Ok(true)
}

#[allow(clippy::too_many_arguments)]
fn cmd_reproduce<O: Write, E: Write>(
    ctx: &Context,
    targets: &[Target],
    ns3: Option<&Path>,
    restarts: usize,
    checkpoint: Option<&Path>,
    resume: bool,
    csv: bool,
    out: &mut O,
    err: &mut E,
) -> ToolResult<bool> {
    let targets: Vec<Target> = if targets.is_empty() { Target::DEFAULT.to_vec() } else { targets.to_vec() };
    let ns3 = match ns3 {
        Some(p) => Some(formats::read_vertex_file(std::io::BufReader::new(open(p)?), &p.display().to_string())?),
        None => None,
    };
    let resume = match (resume, checkpoint) {
        (true, Some(p)) => Some(formats::checkpoint_from_json(&read(p)?, &p.display().to_string())?),
        _ => None,
    };
    let opts = ReproduceOptions {
        tol: ctx.global.tol,
        seed: ctx.global.seed,
        restarts,
        long: ctx.global.long,
        ns3,
        checkpoint: checkpoint.map(Path::to_path_buf),
        resume,
    };
    let mut report = reproduce::Report::default();
    for t in targets {
        report.extend(reproduce::run(t, &opts)?);
    }
    let text = if csv { report.to_csv() } else { report.render() };
    ctx.emit(out, &text)?;
    for c in report.checks.iter().filter(|c| !c.pass && c.heuristic) {
        writeln!(err, "warning: heuristic check `{}` fell short: {} vs {}", c.item, c.computed, c.expected)?;
    }
    Ok(report.all_pass())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let args: Vec<String> = std::iter::once("bellpoly").chain(args.iter().copied()).map(String::from).collect();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(&args, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn help_and_usage_errors() {
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("reproduce"));
        assert_eq!(run_args(&["frobnicate"]).0, 2);
        assert_eq!(run_args(&["vertices"]).0, 2);
    }

    #[test]
    fn unknown_sources_are_usage_errors() {
        assert!(matches!(load_source("no-such-thing"), Err(ToolError::Usage(_))));
        assert!(matches!(load_inequality("no-such-thing"), Err(ToolError::Usage(_))));
        assert!(matches!(load_vertices("NS[3/1]", false), Err(ToolError::Usage(_))));
        assert!(matches!(load_vertices("NS[3]", false), Err(ToolError::Usage(_))));
        assert!(matches!(load_vertices("L[5", false), Err(ToolError::Usage(_))));
    }

    #[test]
    fn float_tables_convert_to_normalized_rationals() {
        let b = quantum::behavior_from_setup(&named_setup("W3_paper").unwrap()).unwrap();
        let r = to_rational(&AnyBehavior::Float(b.clone())).unwrap();
        assert!(r.to_f64().max_abs_diff(&b) < 1e-15);
    }
}
