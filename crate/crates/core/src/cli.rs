//! Command-line front end. [`execute`] turns an argument vector into a report
//! and an exit code; `main` only prints.
//!
//! Exit codes: 0 success, 1 failed gallery check, 2 usage error, 3 domain
//! error, 4 resource guard.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value as Json};

use crate::asymptotic::{subadditive_constant, value_alt_infinite, value_nonalt_bounds_with};
use crate::codes::{asymptotic_covering_radius_bounds, covering_radius, ForbiddenSet};
use crate::error::{Error, Result};
use crate::finite::{replay_matches, value_alt_finite, value_nonalt_finite_with, SearchOptions};
use crate::gallery::{build_example, run_gallery};
use crate::graph::DirectedGraph;
use crate::instance::{parse_instance, GameInstance, StartSpec};
use crate::strategy::{alice_equilibrium_stream, bob_equilibrium_response, simulate};
use crate::structure::{graph_period, is_irreducible, period, product_component, strongly_connected_components};
use crate::value::NumericMode;

pub const SCHEMA: &str = "mpg-duel/1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "mpg-duel", version, about = "Mean payoff games on pairs of graphs")]
struct Cli {
    /// Human-readable table instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    /// Include wall time in the report (makes output nondeterministic).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Game values.
    Solve {
        #[command(subcommand)]
        horizon: Horizon,
    },
    /// Simulate the block equilibrium strategies against each other.
    Trace(TraceArgs),
    /// Covering radius of a constrained binary code.
    CoveringRadius(CodeArgs),
    /// Run a gallery example's checklist, or export its instance.
    Gallery {
        /// Example name or "all".
        name: String,
        /// Print the instance document instead of running the checks.
        #[arg(long)]
        export: bool,
    },
    /// Components, periods and product-component constants of an instance.
    Inspect(InstanceArgs),
}

#[derive(Debug, Subcommand)]
enum Horizon {
    /// Exact value of the n-round game.
    Finite(FiniteArgs),
    /// Mean payoff of the infinite game.
    Infinite(InfiniteArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Alt,
    NonAlt,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Alt => "alt",
            Mode::NonAlt => "non-alt",
        }
    }
}

#[derive(Debug, Args)]
struct InstanceArgs {
    #[arg(long)]
    file: PathBuf,
    /// Initial edges `e0,f0`.
    #[arg(long, conflicts_with = "start_vertices")]
    start_edges: Option<String>,
    /// Initial vertices `v0,u0`.
    #[arg(long)]
    start_vertices: Option<String>,
}

#[derive(Debug, Args)]
struct FiniteArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long)]
    rounds: usize,
    #[arg(long, value_enum, default_value = "non-alt")]
    mode: Mode,
    #[arg(long)]
    node_cap: Option<usize>,
}

#[derive(Debug, Args)]
struct InfiniteArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, value_enum, default_value = "non-alt")]
    mode: Mode,
    /// Largest finite horizon solved for the non-alternating bounds.
    #[arg(long, default_value_t = 12)]
    budget: usize,
    /// Value-iteration rounds for the alternating game.
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    node_cap: Option<usize>,
}

#[derive(Debug, Args)]
struct TraceArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long)]
    steps: usize,
    /// Record every K-th step (default: about 100 records).
    #[arg(long)]
    every: Option<usize>,
    /// Also report the certified bounds with this horizon budget.
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Debug, Args)]
struct CodeArgs {
    /// Comma-separated forbidden bit strings, e.g. `11` or `00,11`.
    #[arg(long, default_value = "")]
    forbidden: String,
    /// Window length; defaults to the pattern length.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, required_unless_present = "asymptotic")]
    n: Option<usize>,
    /// Report bounds on the limiting normalized radius.
    #[arg(long)]
    asymptotic: bool,
    #[arg(long, default_value_t = 12)]
    budget: usize,
}

enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownExample(_) => Failure::Usage(e.to_string()),
            e => Failure::Domain(e),
        }
    }
}

type Outcome = std::result::Result<(Map<String, Json>, i32), Failure>;

/// Runs one command line (including the program name) and returns the
/// rendered report with its exit code.
pub fn execute<I, T>(argv: I) -> (String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return (e.render().to_string(), code);
        }
    };
    let clock = Instant::now();
    let (mut report, code) = match dispatch(&cli.command) {
        Ok(ok) => ok,
        Err(Failure::Usage(msg)) => (error_body("usage", &msg), EXIT_USAGE),
        Err(Failure::Domain(e)) => {
            let (kind, code) = if e.is_resource_guard() {
                ("resource_guard", EXIT_RESOURCE)
            } else {
                ("domain", EXIT_DOMAIN)
            };
            (error_body(kind, &e.to_string()), code)
        }
    };
    if let Some(Json::String(_)) = report.get("document") {
        // raw export, printed verbatim
        return (report["document"].as_str().unwrap().to_string(), code);
    }
    let mut out = Map::new();
    out.insert("schema".into(), json!(SCHEMA));
    out.insert("command".into(), json!(command_echo(&cli.command)));
    out.append(&mut report);
    if cli.timing {
        out.insert("wall_time_ms".into(), json!(clock.elapsed().as_secs_f64() * 1e3));
    }
    let out = Json::Object(out);
    let text = if cli.pretty {
        pretty(&out)
    } else {
        serde_json::to_string(&out).expect("reports serialize")
    };
    (text, code)
}

fn error_body(kind: &str, message: &str) -> Map<String, Json> {
    let mut m = Map::new();
    m.insert("error".into(), json!({ "kind": kind, "message": message }));
    m
}

fn command_echo(cmd: &Command) -> String {
    match cmd {
        Command::Solve { horizon: Horizon::Finite(a) } => format!("solve finite {}", a.mode.name()),
        Command::Solve { horizon: Horizon::Infinite(a) } => format!("solve infinite {}", a.mode.name()),
        Command::Trace(_) => "trace".into(),
        Command::CoveringRadius(_) => "covering-radius".into(),
        Command::Gallery { name, .. } => format!("gallery {name}"),
        Command::Inspect(_) => "inspect".into(),
    }
}

fn dispatch(cmd: &Command) -> Outcome {
    match cmd {
        Command::Solve { horizon: Horizon::Finite(a) } => solve_finite(a),
        Command::Solve { horizon: Horizon::Infinite(a) } => solve_infinite(a),
        Command::Trace(a) => trace(a),
        Command::CoveringRadius(a) => radius(a),
        Command::Gallery { name, export } => gallery(name, *export),
        Command::Inspect(a) => inspect(a),
    }
}

fn load(args: &InstanceArgs) -> std::result::Result<(GameInstance, Option<StartSpec>), Failure> {
    let text = std::fs::read_to_string(&args.file)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", args.file.display())))?;
    let instance = parse_instance(&text)?;
    let pair = |s: &str| -> std::result::Result<(String, String), Failure> {
        match s.split(',').map(str::trim).collect::<Vec<_>>()[..] {
            [a, b] if !a.is_empty() && !b.is_empty() => Ok((a.to_string(), b.to_string())),
            _ => Err(Failure::Usage(format!("expected two comma-separated ids, got {s:?}"))),
        }
    };
    let start = if let Some(s) = &args.start_edges {
        let (a, b) = pair(s)?;
        Some(StartSpec::edges(&a, &b))
    } else if let Some(s) = &args.start_vertices {
        let (a, b) = pair(s)?;
        Some(StartSpec::vertices(&a, &b))
    } else {
        instance.start.clone()
    };
    Ok((instance, start))
}

fn require_start(start: Option<StartSpec>) -> Result<StartSpec> {
    start.ok_or_else(|| {
        Error::MissingStart("pass --start-edges or --start-vertices, or add \"start\" to the document".into())
    })
}

fn options(node_cap: Option<usize>) -> SearchOptions {
    let mut opts = SearchOptions::from_env();
    if let Some(cap) = node_cap {
        opts.node_cap = cap;
    }
    opts
}

fn is_exact(instance: &GameInstance) -> bool {
    instance.numeric_mode() == NumericMode::ExactRational
}

fn graph_digest(g: &DirectedGraph) -> Json {
    let irreducible = is_irreducible(g);
    json!({
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "irreducible": irreducible,
        "period": if irreducible { graph_period(g).ok() } else { None },
    })
}

fn digest(instance: &GameInstance, start: Option<&StartSpec>) -> Json {
    json!({
        "graph_g": graph_digest(&instance.graph_g),
        "graph_h": graph_digest(&instance.graph_h),
        "numeric_mode": instance.numeric_mode(),
        "start": start,
    })
}

fn body(pairs: Vec<(&str, Json)>) -> Map<String, Json> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn solve_finite(a: &FiniteArgs) -> Outcome {
    let (inst, start) = load(&a.instance)?;
    let start = require_start(start)?;
    let result = match a.mode {
        Mode::Alt => {
            let v = value_alt_finite(&inst, a.rounds, &start)?;
            json!({ "rounds": a.rounds, "value": v, "exact": is_exact(&inst) })
        }
        Mode::NonAlt => {
            let r = value_nonalt_finite_with(&inst, a.rounds, &start, options(a.node_cap))?;
            let replay = replay_matches(&inst, &r)?;
            json!({
                "rounds": r.rounds,
                "value": r.value,
                "exact": r.exact,
                "witness_alice": r.witness_alice.ids(&inst.graph_g),
                "witness_bob": r.witness_bob.ids(&inst.graph_h),
                "replay_matches": replay,
                "nodes_expanded": r.nodes_expanded,
            })
        }
    };
    Ok((
        body(vec![("instance", digest(&inst, Some(&start))), ("result", result)]),
        EXIT_OK,
    ))
}

fn solve_infinite(a: &InfiniteArgs) -> Outcome {
    let (inst, start) = load(&a.instance)?;
    let result = match a.mode {
        Mode::NonAlt => {
            // a reducible instance reports the violated hypothesis, not the missing start
            let irreducible = is_irreducible(&inst.graph_g) && is_irreducible(&inst.graph_h);
            let start = match start {
                None if !irreducible => StartSpec::vertices("", ""),
                other => require_start(other)?,
            };
            let b = value_nonalt_bounds_with(&inst, &start, a.budget, options(a.node_cap))?;
            json!(b)
        }
        Mode::Alt => {
            let start = require_start(start)?;
            json!(value_alt_infinite(&inst, &start, a.iters)?)
        }
    };
    Ok((
        body(vec![
            ("instance", digest(&inst, inst.start.as_ref())),
            ("exact_arithmetic", json!(is_exact(&inst))),
            ("result", result),
        ]),
        EXIT_OK,
    ))
}

fn trace(a: &TraceArgs) -> Outcome {
    let (inst, start) = load(&a.instance)?;
    let start = require_start(start)?;
    let alice = alice_equilibrium_stream(&inst, &start)?;
    let bob = bob_equilibrium_response(&inst, &start)?;
    let schedule = alice.schedule();
    let every = a.every.unwrap_or((a.steps / 100).max(1)).max(1);
    let mut records = Vec::new();
    let mut last = None;
    for rec in simulate(&inst, alice, bob, a.steps) {
        let rec = rec?;
        if rec.step % every == 0 || rec.step == a.steps {
            records.push(json!({
                "step": rec.step,
                "alice_edge": inst.graph_g.edge(rec.alice_edge).id,
                "bob_edge": inst.graph_h.edge(rec.bob_edge).id,
                "cumulative": rec.cumulative,
                "average": rec.average,
            }));
        }
        last = Some(rec);
    }
    let mut out = body(vec![
        ("instance", digest(&inst, Some(&start))),
        (
            "schedule",
            json!({ "period": schedule.p, "padding": schedule.d, "fill_len": schedule.fill_len() }),
        ),
        ("final_average", json!(last.map(|r| r.average))),
        ("records", Json::Array(records)),
    ]);
    if let Some(budget) = a.budget {
        let b = value_nonalt_bounds_with(&inst, &start, budget, SearchOptions::from_env())?;
        out.insert("bounds".into(), json!(b.bounds));
    }
    Ok((out, EXIT_OK))
}

fn radius(a: &CodeArgs) -> Outcome {
    let forbidden = ForbiddenSet::parse(&a.forbidden, a.k)?;
    let mut out = body(vec![("forbidden", json!(forbidden))]);
    if let Some(n) = a.n {
        let r = covering_radius(&forbidden, n)?;
        out.insert("n".into(), json!(r.n));
        out.insert("radius".into(), json!(r.radius));
        out.insert("witness_u".into(), json!(r.witness_u));
        out.insert("mode".into(), json!(r.mode));
    }
    if a.asymptotic {
        let b = asymptotic_covering_radius_bounds(&forbidden, a.budget)?;
        out.insert("asymptotic".into(), json!(b.bounds));
    }
    Ok((out, EXIT_OK))
}

fn gallery(name: &str, export: bool) -> Outcome {
    if export {
        if name == "all" {
            return Err(Failure::Usage("--export takes a single example name".into()));
        }
        let entry = build_example(name)?;
        return Ok((body(vec![("document", json!(entry.instance.to_json()))]), EXIT_OK));
    }
    let runs = run_gallery(name)?;
    let passed = runs.iter().all(|(_, checks)| checks.iter().all(|c| c.passed));
    let examples: Map<String, Json> = runs
        .into_iter()
        .map(|(n, checks)| (n, json!(checks)))
        .collect();
    Ok((
        body(vec![("passed", json!(passed)), ("examples", Json::Object(examples))]),
        if passed { EXIT_OK } else { EXIT_CHECK_FAILED },
    ))
}

fn components(g: &DirectedGraph) -> Json {
    let comps = strongly_connected_components(g);
    let list: Vec<Json> = comps
        .members
        .iter()
        .zip(&comps.nontrivial)
        .map(|(members, &nontrivial)| {
            let names: Vec<&str> = members.iter().map(|&v| g.vertex_name(v)).collect();
            json!({
                "vertices": names,
                "nontrivial": nontrivial,
                "period": if nontrivial { period(g, members).ok() } else { None },
            })
        })
        .collect();
    json!(list)
}

fn inspect(a: &InstanceArgs) -> Outcome {
    let (inst, start) = load(a)?;
    let mut out = body(vec![
        ("instance", digest(&inst, start.as_ref())),
        ("components_g", components(&inst.graph_g)),
        ("components_h", components(&inst.graph_h)),
        ("score_norm", json!(inst.score_norm())),
    ]);
    if let Some(start) = &start {
        let product = match product_component(&inst, start) {
            Ok(c) => {
                let audit = subadditive_constant(&inst, &c)?;
                json!({
                    "size": c.len(),
                    "edge_pairs": c.edge_pairs.len(),
                    "period": c.period,
                    "diameter": c.diameter,
                    "padding": c.padding,
                    "constant": audit,
                })
            }
            Err(e @ Error::TransientStart { .. }) => json!({ "note": e.to_string() }),
            Err(e) => return Err(e.into()),
        };
        out.insert("product_component".into(), product);
    }
    Ok((out, EXIT_OK))
}

/// Flattens a report into aligned `path  value` rows.
fn pretty(report: &Json) -> String {
    fn walk(prefix: &str, v: &Json, rows: &mut Vec<(String, String)>) {
        match v {
            // numeric results print as "value (mode)"
            Json::Object(m) if m.len() == 2 && m.contains_key("value") && m.contains_key("mode") => {
                let val = match &m["value"] {
                    Json::String(s) => s.clone(),
                    other => other.to_string(),
                };
                rows.push((prefix.to_string(), format!("{val} ({})", m["mode"].as_str().unwrap_or(""))));
            }
            Json::Object(m) => {
                for (k, x) in m {
                    let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&p, x, rows);
                }
            }
            Json::Array(xs) if xs.iter().all(|x| !x.is_object() && !x.is_array()) => {
                let items: Vec<String> = xs.iter().map(scalar).collect();
                rows.push((prefix.to_string(), items.join(" ")));
            }
            Json::Array(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), x, rows);
                }
            }
            other => rows.push((prefix.to_string(), scalar(other))),
        }
    }
    fn scalar(v: &Json) -> String {
        match v {
            Json::String(s) => s.clone(),
            other => other.to_string(),
        }
    }
    let mut rows = Vec::new();
    walk("", report, &mut rows);
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter()
        .map(|(k, v)| format!("{k:width$}  {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}
