//! Command-line front end for the tile-tower engine.
//!
//! Every run follows the same shape: load a rule (a built-in name or a JSON
//! document on disk), build the tower to the requested depth, answer one
//! query family, print the answer. Three formats are supported. `text` is
//! for reading, `structured` wraps the same data in a versioned JSON
//! envelope, and `csv` emits a bare table for the commands whose output is
//! one table (subdivide, dn, lambda0, lattes, visual).
//!
//! Runs are reproducible: the same argv yields byte-identical stdout.
//! Progress notes and size estimates go to stderr. `export` writes
//! artifacts to files; an artifact targeting `-` owns stdout and pushes the
//! run summary to stderr so stdout stays machine-consumable.
//!
//! Exit codes: 0 success; 1 rule rejected (validation failures or periodic
//! critical vertices); 2 resource limits (depth or cell caps, a built depth
//! too shallow for the request, an empty sample); 3 usage errors (bad
//! flags, unreadable or malformed rule documents, unknown cells, a format
//! the command does not support).

mod text;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use tiletower::expansion::{acu_table, write_dn_csv, AcuRow, GrowthRow};
use tiletower::graph::{DefectReport, PairSampler, SandwichReport, TileGraph, TripleSampler};
use tiletower::rule::{periodic_critical_check, CriticalityReport, BUILTIN_RULE_NAMES};
use tiletower::tower::{estimate_cells, LevelStats};
use tiletower::visual::{ray_products, write_profile_csv, RayComparison, VisualProfile};
use tiletower::{
    build_tower, builtin_rule, charvisual_profile, curvature_report, join_sides_dn,
    lambda0_estimate, lattes_criterion, m_points, m_prime_points, parse_rule, validate_rule,
    BuildError, BuildOptions, CurvatureOptions, DnResult, Level, PointRef, PointSeparation,
    QueryError, SubdivisionRule, Tower, VertexId,
};

const SCHEMA_VERSION: &str = "1";

/// Random-walk length used when sampling chains. Long enough to leave any
/// truncation the default depths produce; not worth a flag.
const WALK_LENGTH: usize = 12;

#[derive(Parser)]
#[command(
    name = "tiletower",
    version,
    about = "Subdivision towers, tile graphs and their coarse geometry"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a rule and report its critical-orbit structure
    Validate(CommonArgs),
    /// Build a tower and tabulate cells per level
    Subdivide(CommonArgs),
    /// Hyperbolicity, Gromov-product sandwich and chain defects
    Graph(CommonArgs),
    /// Joining numbers D_n with minimal witness chains
    Dn(CommonArgs),
    /// Growth table for the combinatorial expansion factor
    #[command(name = "lambda0")]
    Lambda0(CommonArgs),
    /// Decay test for the normalized joining sequence
    Lattes(CommonArgs),
    /// Curvature lower-bound report
    Curvature(CommonArgs),
    /// Visual-metric diameter profile and point separations
    Visual(VisualArgs),
    /// Write graph and table artifacts to files
    Export(ExportArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Built-in rule name (lattes-2x2, lattes-3x3) or path to a rule document
    #[arg(long, default_value = "lattes-2x2")]
    rule: String,

    /// Tower depth to build
    #[arg(long, default_value_t = 3)]
    depth: u32,

    /// Seed shared by all samplers
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Triples sampled for the hyperbolicity defect; 0 means exhaustive
    #[arg(long, default_value_t = 100_000)]
    triples: u64,

    /// Pairs sampled for the sandwich constants; 0 means exhaustive
    #[arg(long, default_value_t = 100_000)]
    pairs: u64,

    /// Chains sampled per truncation depth for chain defects
    #[arg(long, default_value_t = 200)]
    chains: u64,

    /// Curvature for the chain inequality; defaults to -(ln^2 deg)/4
    #[arg(long, allow_negative_numbers = true)]
    kappa: Option<f64>,

    /// Expansion factor for the visual profile; defaults to sqrt(deg)
    #[arg(long)]
    lambda: Option<f64>,

    /// Per-level decay factor the Lattes test counts as sustained
    #[arg(long, default_value_t = 0.9)]
    decay_threshold: f64,

    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Maximum tower depth the builder accepts
    #[arg(long, default_value_t = 8)]
    depth_cap: u32,

    /// Maximum estimated cell count the builder accepts
    #[arg(long, default_value_t = 20_000_000)]
    cell_cap: u64,
}

#[derive(Args, Clone)]
struct VisualArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Vertex pair `A,B` to separate (ids at the deepest level); repeatable
    #[arg(long = "pair", value_name = "A,B", value_parser = parse_point_pair)]
    point_pairs: Vec<(u32, u32)>,
}

#[derive(Args, Clone)]
struct ExportArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Write the tile graph in DOT format (`-` for stdout)
    #[arg(long, value_name = "PATH")]
    dot: Option<String>,

    /// Write the tile-graph edge list as CSV
    #[arg(long, value_name = "PATH")]
    edges: Option<String>,

    /// Write the joining-number growth table as CSV
    #[arg(long, value_name = "PATH")]
    dn: Option<String>,

    /// Write the visual-metric profile as CSV
    #[arg(long, value_name = "PATH")]
    profile: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
    Csv,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Text => "text",
            Format::Structured => "structured",
            Format::Csv => "csv",
        }
    }
}

fn parse_point_pair(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `A,B`, got `{s}`"))?;
    let a = a.trim().parse().map_err(|e| format!("vertex `{a}`: {e}"))?;
    let b = b.trim().parse().map_err(|e| format!("vertex `{b}`: {e}"))?;
    Ok((a, b))
}

/// Effective settings of a run, echoed in every report. `kappa` and
/// `lambda` hold the values actually used, with defaults already resolved
/// from the rule's degree.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub rule: String,
    pub depth: u32,
    pub seed: u64,
    pub triples: u64,
    pub pairs: u64,
    pub chains: u64,
    pub walk_length: usize,
    pub kappa: f64,
    pub lambda: f64,
    pub decay_threshold: f64,
    pub format: &'static str,
    pub depth_cap: u32,
    pub cell_cap: u64,
}

#[derive(Serialize)]
struct ToolInfo {
    name: &'static str,
    version: &'static str,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: &'static str,
    tool: ToolInfo,
    command: &'static str,
    config: &'a RunConfig,
    report: &'a T,
}

#[derive(Serialize)]
pub struct ValidateBody {
    pub rule: String,
    pub valid: bool,
    pub violations: Vec<String>,
    /// Present only for structurally valid rules; criticality is
    /// undefined on a broken complex.
    pub criticality: Option<CriticalityReport>,
}

#[derive(Serialize)]
pub struct SubdivideBody {
    pub levels: Vec<LevelStats>,
}

#[derive(Serialize)]
pub struct GraphBody {
    pub kappa: f64,
    pub delta: DefectReport,
    pub sandwich: SandwichReport,
    pub chain_defects: Vec<AcuRow>,
}

#[derive(Serialize)]
pub struct DnBody {
    pub rows: Vec<DnResult>,
}

#[derive(Serialize)]
pub struct Lambda0Body {
    pub rows: Vec<GrowthRow>,
}

#[derive(Serialize)]
pub struct PairReport {
    pub x: u32,
    pub y: u32,
    pub m: PointSeparation,
    pub m_prime: PointSeparation,
    pub rays: RayComparison,
}

#[derive(Serialize)]
pub struct VisualBody {
    pub profile: VisualProfile,
    pub pairs: Vec<PairReport>,
}

#[derive(Serialize)]
pub struct Artifact {
    pub kind: &'static str,
    pub path: String,
    pub bytes: u64,
}

#[derive(Serialize)]
pub struct ExportBody {
    pub artifacts: Vec<Artifact>,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Failure {
        Failure {
            code,
            message: message.into(),
        }
    }

    fn usage(message: impl Into<String>) -> Failure {
        Failure::new(3, message)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Failure {
        Failure::new(2, format!("io error: {e}"))
    }
}

impl From<BuildError> for Failure {
    fn from(e: BuildError) -> Failure {
        let code = match e {
            BuildError::InvalidRule(_) | BuildError::PeriodicCritical { .. } => 1,
            BuildError::DepthCapExceeded { .. } | BuildError::CellCapExceeded { .. } => 2,
            // An invariant broke inside the builder; not a user error.
            BuildError::GluingMismatch { .. } => 70,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<QueryError> for Failure {
    fn from(e: QueryError) -> Failure {
        let code = match e {
            QueryError::DepthTooShallow { .. }
            | QueryError::LevelOutOfRange { .. }
            | QueryError::EmptySample => 2,
            _ => 3,
        };
        Failure::new(code, e.to_string())
    }
}

/// Parses argv, runs one command, writes the report to `out` and notes to
/// `err`, and returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let informational = matches!(
                e.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            );
            let target: &mut dyn Write = if informational { out } else { err };
            let _ = write!(target, "{}", e.render());
            return if informational { 0 } else { 3 };
        }
    };
    match dispatch(cli, out, err) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    match cli.command {
        Command::Validate(a) => cmd_validate(&a, out),
        Command::Subdivide(a) => cmd_subdivide(&a, out, err),
        Command::Graph(a) => cmd_graph(&a, out, err),
        Command::Dn(a) => cmd_dn(&a, out, err),
        Command::Lambda0(a) => cmd_lambda0(&a, out, err),
        Command::Lattes(a) => cmd_lattes(&a, out, err),
        Command::Curvature(a) => cmd_curvature(&a, out, err),
        Command::Visual(a) => cmd_visual(&a, out, err),
        Command::Export(a) => cmd_export(&a, out, err),
    }
}

fn load_rule(source: &str) -> Result<SubdivisionRule, Failure> {
    if BUILTIN_RULE_NAMES.contains(&source) {
        return builtin_rule(source).map_err(|e| Failure::usage(e.to_string()));
    }
    let doc = fs::read_to_string(source).map_err(|e| {
        Failure::usage(format!(
            "`{source}` is neither a built-in rule ({}) nor a readable file: {e}",
            BUILTIN_RULE_NAMES.join(", ")
        ))
    })?;
    parse_rule(&doc).map_err(|e| Failure::usage(format!("rule document `{source}`: {e}")))
}

fn resolve_config(args: &CommonArgs, rule: &SubdivisionRule) -> RunConfig {
    let d = rule.degree as f64;
    RunConfig {
        rule: args.rule.clone(),
        depth: args.depth,
        seed: args.seed,
        triples: args.triples,
        pairs: args.pairs,
        chains: args.chains,
        walk_length: WALK_LENGTH,
        kappa: args.kappa.unwrap_or(-(d.ln() * d.ln()) / 4.0),
        lambda: args.lambda.unwrap_or(d.sqrt()),
        decay_threshold: args.decay_threshold,
        format: args.format.name(),
        depth_cap: args.depth_cap,
        cell_cap: args.cell_cap,
    }
}

fn build(rule: SubdivisionRule, cfg: &RunConfig, err: &mut dyn Write) -> Result<Tower, Failure> {
    let estimate = estimate_cells(&rule, cfg.depth);
    let _ = writeln!(
        err,
        "building {} to depth {} (at most {estimate} cells)",
        rule.name, cfg.depth
    );
    let options = BuildOptions {
        depth_cap: cfg.depth_cap,
        cell_cap: cfg.cell_cap,
    };
    Ok(build_tower(rule, cfg.depth, &options)?)
}

fn curvature_options(cfg: &RunConfig) -> CurvatureOptions {
    CurvatureOptions {
        decay_threshold: cfg.decay_threshold,
        seed: cfg.seed,
        chains_per_level: cfg.chains,
        walk_length: cfg.walk_length,
    }
}

fn triple_sampler(args: &CommonArgs, cap: Level) -> TripleSampler {
    if args.triples == 0 {
        TripleSampler::Exhaustive { cap }
    } else {
        TripleSampler::Seeded {
            cap,
            count: args.triples,
            seed: args.seed,
        }
    }
}

fn pair_sampler(args: &CommonArgs, cap: Level) -> PairSampler {
    if args.pairs == 0 {
        PairSampler::Exhaustive { cap }
    } else {
        PairSampler::Seeded {
            cap,
            count: args.pairs,
            seed: args.seed,
        }
    }
}

fn emit_structured<T: Serialize>(
    out: &mut dyn Write,
    command: &'static str,
    config: &RunConfig,
    report: &T,
) -> Result<(), Failure> {
    let envelope = Envelope {
        schema_version: SCHEMA_VERSION,
        tool: ToolInfo {
            name: "tiletower",
            version: env!("CARGO_PKG_VERSION"),
        },
        command,
        config,
        report,
    };
    serde_json::to_writer_pretty(&mut *out, &envelope)
        .map_err(|e| Failure::new(2, format!("cannot serialize report: {e}")))?;
    writeln!(out)?;
    Ok(())
}

fn no_csv(command: &str) -> Failure {
    Failure::usage(format!(
        "`{command}` has no csv form; use text or structured"
    ))
}

fn cmd_validate(args: &CommonArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let rule = load_rule(&args.rule)?;
    let config = resolve_config(args, &rule);
    let report = validate_rule(&rule);
    let valid = report.is_valid();
    let criticality = valid.then(|| periodic_critical_check(&rule));
    let body = ValidateBody {
        rule: rule.name.clone(),
        valid,
        violations: report.violations.iter().map(|v| v.to_string()).collect(),
        criticality,
    };
    match args.format {
        Format::Text => {
            text::header(out, "validate", &config)?;
            text::validate(out, &body)?;
        }
        Format::Structured => emit_structured(out, "validate", &config, &body)?,
        Format::Csv => return Err(no_csv("validate")),
    }
    if !valid {
        return Err(Failure::new(
            1,
            format!("rule `{}` failed validation", args.rule),
        ));
    }
    if body
        .criticality
        .as_ref()
        .is_some_and(|c| c.has_periodic_critical)
    {
        return Err(Failure::new(
            1,
            format!(
                "rule `{}` has a periodic critical vertex; towers cannot be built from it",
                args.rule
            ),
        ));
    }
    Ok(())
}

fn cmd_subdivide(args: &CommonArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let rule = load_rule(&args.rule)?;
    let config = resolve_config(args, &rule);
    let tower = build(rule, &config, err)?;
    let body = SubdivideBody {
        levels: tower.stats().to_vec(),
    };
    match args.format {
        Format::Text => {
            text::header(out, "subdivide", &config)?;
            text::subdivide(out, &body)?;
        }
        Format::Structured => emit_structured(out, "subdivide", &config, &body)?,
        Format::Csv => text::subdivide_csv(out, &body)?,
    }
    Ok(())
}

fn cmd_graph(args: &CommonArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let rule = load_rule(&args.rule)?;
    let config = resolve_config(args, &rule);
    let tower = build(rule, &config, err)?;
    let graph = TileGraph::new(&tower);
    let cap = config.depth as Level;
    let delta = graph.hyperbolicity_defect(triple_sampler(args, cap))?;
    let sandwich = graph.sandwich_constants(pair_sampler(args, cap))?;
    let chain_defects = acu_table(&graph, config.kappa, &curvature_options(&config))?;
    let body = GraphBody {
        kappa: config.kappa,
        delta,
        sandwich,
        chain_defects,
    };
    match args.format {
        Format::Text => {
            text::header(out, "graph", &config)?;
            text::graph(out, &body)?;
        }
        Format::Structured => emit_structured(out, "graph", &config, &body)?,
        Format::Csv => return Err(no_csv("graph")),
    }
    Ok(())
}

fn cmd_dn(args: &CommonArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let rule = load_rule(&args.rule)?;
    let config = resolve_config(args, &rule);
    let tower = build(rule, &config, err)?;
    let mut rows = Vec::new();
    for n in 1..=config.depth {
        rows.push(join_sides_dn(&tower, n as Level)?);
    }
    let body = DnBody { rows };
    match args.format {
        Format::Text => {
            text::header(out, "dn", &config)?;
            text::dn(out, &body)?;
        }
        Format::Structured => emit_structured(out, "dn", &config, &body)?,
        Format::Csv => text::dn_csv(out, &body)?,
    }
    Ok(())
}

fn cmd_lambda0(args: &CommonArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let rule = load_rule(&args.rule)?;
    let config = resolve_config(args, &rule);
    let tower = build(rule, &config, err)?;
    let body = Lambda0Body {
        rows: lambda0_estimate(&tower)?,
    };
    match args.format {
        Format::Text => {
            text::header(out, "lambda0", &config)?;
            text::lambda0(out, &body.rows)?;
        }
        Format::Structured => emit_structured(out, "lambda0", &config, &body)?,
        Format::Csv => text::lambda0_csv(out, &body.rows)?,
    }
    Ok(())
}

fn cmd_lattes(args: &CommonArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let rule = load_rule(&args.rule)?;
    let config = resolve_config(args, &rule);
    let tower = build(rule, &config, err)?;
    let report = lattes_criterion(&tower, config.decay_threshold)?;
    match args.format {
        Format::Text => {
            text::header(out, "lattes", &config)?;
            text::lattes(out, &report)?;
        }
        Format::Structured => emit_structured(out, "lattes", &config, &report)?,
        Format::Csv => text::lattes_csv(out, &report)?,
    }
    Ok(())
}

fn cmd_curvature(args: &CommonArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let rule = load_rule(&args.rule)?;
    let config = resolve_config(args, &rule);
    let tower = build(rule, &config, err)?;
    let report = curvature_report(&tower, &curvature_options(&config))?;
    match args.format {
        Format::Text => {
            text::header(out, "curvature", &config)?;
            text::curvature(out, &report)?;
        }
        Format::Structured => emit_structured(out, "curvature", &config, &report)?,
        Format::Csv => return Err(no_csv("curvature")),
    }
    Ok(())
}

fn cmd_visual(v: &VisualArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let args = &v.common;
    if args.format == Format::Csv && !v.point_pairs.is_empty() {
        return Err(Failure::usage(
            "csv covers only the profile table; drop --pair or use text/structured",
        ));
    }
    let rule = load_rule(&args.rule)?;
    let config = resolve_config(args, &rule);
    let tower = build(rule, &config, err)?;
    let profile = charvisual_profile(&tower, config.lambda)?;
    let mut pairs = Vec::new();
    if !v.point_pairs.is_empty() {
        let graph = TileGraph::new(&tower);
        for &(a, b) in &v.point_pairs {
            let x = PointRef::new(&tower, VertexId(a))?;
            let y = PointRef::new(&tower, VertexId(b))?;
            pairs.push(PairReport {
                x: a,
                y: b,
                m: m_points(&tower, x, y)?,
                m_prime: m_prime_points(&tower, x, y)?,
                rays: ray_products(&graph, x, y)?,
            });
        }
    }
    let body = VisualBody { profile, pairs };
    match args.format {
        Format::Text => {
            text::header(out, "visual", &config)?;
            text::visual(out, &body)?;
        }
        Format::Structured => emit_structured(out, "visual", &config, &body)?,
        Format::Csv => {
            let mut buf = Vec::new();
            write_profile_csv(&body.profile, &mut buf)?;
            out.write_all(&buf)?;
        }
    }
    Ok(())
}

fn cmd_export(x: &ExportArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let args = &x.common;
    if x.dot.is_none() && x.edges.is_none() && x.dn.is_none() && x.profile.is_none() {
        return Err(Failure::usage(
            "nothing to export; pass --dot, --edges, --dn or --profile",
        ));
    }
    if args.format == Format::Csv {
        return Err(no_csv("export"));
    }
    let rule = load_rule(&args.rule)?;
    let config = resolve_config(args, &rule);
    let tower = build(rule, &config, err)?;
    let cap = config.depth as Level;
    let graph = (x.dot.is_some() || x.edges.is_some()).then(|| TileGraph::new(&tower));
    let mut artifacts = Vec::new();
    let mut used_stdout = false;

    if let Some(path) = &x.dot {
        let mut buf = Vec::new();
        graph.as_ref().unwrap().write_dot(cap, &mut buf)?;
        artifacts.push(write_artifact("dot", path, &buf, out, &mut used_stdout)?);
    }
    if let Some(path) = &x.edges {
        let mut buf = Vec::new();
        graph.as_ref().unwrap().write_edges_csv(cap, &mut buf)?;
        artifacts.push(write_artifact("edges", path, &buf, out, &mut used_stdout)?);
    }
    if let Some(path) = &x.dn {
        let growth = lambda0_estimate(&tower)?;
        let lattes = lattes_criterion(&tower, config.decay_threshold)?;
        let mut buf = Vec::new();
        write_dn_csv(&growth, &lattes.rows, &mut buf)?;
        artifacts.push(write_artifact("dn", path, &buf, out, &mut used_stdout)?);
    }
    if let Some(path) = &x.profile {
        let profile = charvisual_profile(&tower, config.lambda)?;
        let mut buf = Vec::new();
        write_profile_csv(&profile, &mut buf)?;
        artifacts.push(write_artifact("profile", path, &buf, out, &mut used_stdout)?);
    }

    let body = ExportBody { artifacts };
    let target: &mut dyn Write = if used_stdout { err } else { out };
    match args.format {
        Format::Text => {
            text::header(target, "export", &config)?;
            text::export(target, &body)?;
        }
        Format::Structured => emit_structured(target, "export", &config, &body)?,
        Format::Csv => unreachable!("rejected above"),
    }
    Ok(())
}

fn write_artifact(
    kind: &'static str,
    path: &str,
    bytes: &[u8],
    out: &mut dyn Write,
    used_stdout: &mut bool,
) -> Result<Artifact, Failure> {
    if path == "-" {
        out.write_all(bytes)?;
        *used_stdout = true;
    } else {
        fs::write(path, bytes)
            .map_err(|e| Failure::new(2, format!("cannot write `{path}`: {e}")))?;
    }
    Ok(Artifact {
        kind,
        path: path.to_string(),
        bytes: bytes.len() as u64,
    })
}
