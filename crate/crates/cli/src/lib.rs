//! Command-line front end. Every command produces a [`Report`], rendered as
//! text or as JSON; the exit code depends only on the report status.

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use stratifold::algebra::{
    abelianization, todd_coxeter, AbelianInvariants, EnumerationError, FiniteCertificate, OrderOracle, OrderVerdict,
    DEFAULT_COSET_BUDGET,
};
use stratifold::analysis::{
    black_orders, classify_fgroup, fgroup_signature, obstructions, q_graph, white_holes, AnalysisError, FClass,
    Obstruction,
};
use stratifold::cells::cw_euler;
use stratifold::format::{
    is_presentation_text, parse_expr, parse_graph, parse_presentation, parse_signature, parse_word, serialize_graph,
    serialize_presentation,
};
use stratifold::graph::{ensure_valid, euler_characteristic, normalize, validate, GraphError, StratifoldGraph, Violation};
use stratifold::presentation::{fgroup_graph, natural_presentation, simplify, GroupPresentation, PresentationError};
use stratifold::spine::{attachment_vertex, delta_sum, recognize, synth};

pub const SCHEMA_ID: &str = "stratifold-report/1";

/// JSON Schema for reports.
pub const REPORT_SCHEMA: &str = include_str!("../schema/report-v1.json");

#[derive(Debug, Parser)]
#[command(name = "stratifold", version, about = "Stratifold graphs, their groups and 3-manifold spines")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Debug, Args)]
struct Options {
    /// Input file (graph or presentation); standard input when absent.
    /// `delta` takes two.
    #[arg(long = "in", global = true, value_name = "FILE")]
    input: Vec<PathBuf>,
    /// Manifold expression, e.g. "L(5) # S2xS1".
    #[arg(long, global = true)]
    expr: Option<String>,
    /// F-group signature, e.g. "F(0;2,3,7)".
    #[arg(long, global = true)]
    sig: Option<String>,
    /// Word for `order`, or subgroup generator for `tc` (repeatable).
    #[arg(long, global = true)]
    word: Vec<String>,
    /// White vertices joined by `delta`, one per input.
    #[arg(long, global = true)]
    at: Vec<String>,
    /// Maximum number of cosets for enumerations.
    #[arg(long, global = true, default_value_t = DEFAULT_COSET_BUDGET)]
    budget: usize,
    /// Emit a JSON report.
    #[arg(long, global = true)]
    json: bool,
    /// Simplify presentations before printing.
    #[arg(long, global = true)]
    simplify: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Check the graph invariants.
    Validate,
    /// Presentation of the fundamental group.
    Pi1,
    /// First homology.
    H1,
    /// Euler characteristic.
    Euler,
    /// Orders of black generators, or of `--word`.
    Order,
    /// Classify an F-group given by `--sig` or an F-group graph.
    Fclass,
    /// White holes.
    Holes,
    /// Q-quotient surgery.
    Q,
    /// Obstructions to being a closed 3-manifold group.
    Obstruct,
    /// Spine of `--expr`.
    Synth,
    /// Manifold expression of a canonical spine.
    Recognize,
    /// Connected sum of two spines.
    Delta,
    /// Coset enumeration over the subgroup generated by `--word`.
    Tc,
    /// F-group graph of `--sig`.
    Fgraph,
}

impl Command {
    fn token(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Pi1 => "pi1",
            Command::H1 => "h1",
            Command::Euler => "euler",
            Command::Order => "order",
            Command::Fclass => "fclass",
            Command::Holes => "holes",
            Command::Q => "q",
            Command::Obstruct => "obstruct",
            Command::Synth => "synth",
            Command::Recognize => "recognize",
            Command::Delta => "delta",
            Command::Tc => "tc",
            Command::Fgraph => "fgraph",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Invalid,
    Indeterminate,
    Obstructed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Invalid => 1,
            Status::Indeterminate => 2,
            Status::Obstructed => 3,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Invalid => "invalid",
            Status::Indeterminate => "indeterminate",
            Status::Obstructed => "obstructed",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub input_digest: String,
    pub payload: Value,
    pub status: Status,
    pub violations: Vec<Value>,
    pub obstructions: Vec<Value>,
    /// Human-readable rendering.
    pub text: String,
}

impl Report {
    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA_ID,
            "command": self.command,
            "input_digest": self.input_digest,
            "payload": self.payload,
            "indeterminate": self.status == Status::Indeterminate,
            "status": self.status.token(),
            "violations": self.violations,
            "obstructions": self.obstructions,
        })
    }

    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }
}

/// What a command body returns.
struct Outcome {
    payload: Value,
    text: String,
    status: Status,
    violations: Vec<Value>,
    obstructions: Vec<Value>,
}

impl Outcome {
    fn ok(payload: Value, text: impl Into<String>) -> Self {
        Outcome {
            payload,
            text: text.into(),
            status: Status::Ok,
            violations: Vec::new(),
            obstructions: Vec::new(),
        }
    }

    fn with_status(mut self, status: Status) -> Self {
        self.status = status;
        self
    }
}

/// A failed command: invalid input, or a computation out of budget.
struct Failure {
    status: Status,
    message: String,
    violations: Vec<Value>,
    detail: Value,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure {
            status: Status::Invalid,
            message: message.into(),
            violations: Vec::new(),
            detail: Value::Null,
        }
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        let violations = match &e {
            GraphError::Invalid(vs) => vs.iter().map(violation_json).collect(),
            _ => Vec::new(),
        };
        Failure {
            violations,
            ..Failure::invalid(e.to_string())
        }
    }
}

impl From<PresentationError> for Failure {
    fn from(e: PresentationError) -> Self {
        match e {
            PresentationError::Graph(g) => g.into(),
            e => Failure::invalid(e.to_string()),
        }
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Graph(g) => g.into(),
            AnalysisError::Presentation(p) => p.into(),
            AnalysisError::Indeterminate(blacks) => Failure {
                status: Status::Indeterminate,
                message: format!("indeterminate: orders of {} not certified within budget", blacks.join(", ")),
                violations: Vec::new(),
                detail: json!({ "undecided": blacks }),
            },
        }
    }
}

macro_rules! invalid {
    ($($t:tt)*) => { Failure::invalid(format!($($t)*)) };
}

enum Input {
    Graph(StratifoldGraph),
    Presentation(GroupPresentation),
}

struct Context<'a> {
    opts: &'a Options,
    texts: Vec<String>,
}

impl Context<'_> {
    fn text(&self) -> Result<&str, Failure> {
        match self.texts.as_slice() {
            [t] => Ok(t),
            [] => Err(invalid!("no input")),
            _ => Err(invalid!("expected one input, got {}", self.texts.len())),
        }
    }

    fn input(&self) -> Result<Input, Failure> {
        let text = self.text()?;
        if is_presentation_text(text) {
            Ok(Input::Presentation(parse_presentation(text).map_err(|e| invalid!("{e}"))?))
        } else {
            Ok(Input::Graph(parse_graph(text).map_err(|e| invalid!("{e}"))?))
        }
    }

    fn graph(&self) -> Result<StratifoldGraph, Failure> {
        match self.input()? {
            Input::Graph(g) => Ok(g),
            Input::Presentation(_) => Err(invalid!("expected a graph, got a presentation")),
        }
    }

    fn valid_graph(&self) -> Result<StratifoldGraph, Failure> {
        let g = self.graph()?;
        ensure_valid(&g)?;
        Ok(g)
    }

    /// The input presentation, or the natural presentation of the input graph.
    fn presentation(&self) -> Result<GroupPresentation, Failure> {
        match self.input()? {
            Input::Presentation(p) => Ok(p),
            Input::Graph(g) => Ok(natural_presentation(&normalize(&g)?)?),
        }
    }

    fn expr(&self) -> Result<&str, Failure> {
        self.opts.expr.as_deref().ok_or_else(|| invalid!("--expr is required"))
    }
}

/// Parses `args` (program name first), runs the command and writes the
/// report to `out`. Returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(out, "{e}");
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let report = execute(&cli, stdin);
    if cli.opts.json {
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report.to_json()).unwrap());
    } else {
        let _ = write!(out, "{}", report.text);
        if !report.text.is_empty() && !report.text.ends_with('\n') {
            let _ = writeln!(out);
        }
    }
    report.exit_code()
}

fn reads_input(cmd: Command, opts: &Options) -> bool {
    match cmd {
        Command::Synth | Command::Fgraph => false,
        Command::Fclass => opts.sig.is_none(),
        _ => true,
    }
}

pub fn execute(cli: &Cli, stdin: &mut dyn Read) -> Report {
    let cmd = cli.command;
    let opts = &cli.opts;
    let mut texts = Vec::new();
    let mut read_error = None;
    if opts.input.is_empty() {
        if reads_input(cmd, opts) {
            let mut s = String::new();
            match stdin.read_to_string(&mut s) {
                Ok(_) => texts.push(s),
                Err(e) => read_error = Some(format!("standard input: {e}")),
            }
        }
    } else {
        for path in &opts.input {
            match fs::read_to_string(path) {
                Ok(s) => texts.push(s),
                Err(e) => read_error = Some(format!("{}: {e}", path.display())),
            }
        }
    }
    let input_digest = digest(&texts, opts);
    let ctx = Context { opts, texts };
    let result = match read_error {
        Some(e) => Err(Failure::invalid(e)),
        None => dispatch(cmd, &ctx),
    };
    let outcome = result.unwrap_or_else(|f| Outcome {
        payload: json!({ "error": f.message, "detail": f.detail }),
        text: format!("error: {}\n", f.message),
        status: f.status,
        violations: f.violations,
        obstructions: Vec::new(),
    });
    Report {
        command: cmd.token(),
        input_digest,
        payload: outcome.payload,
        status: outcome.status,
        violations: outcome.violations,
        obstructions: outcome.obstructions,
        text: outcome.text,
    }
}

/// SHA-256 over the input texts and the expression or signature flags.
fn digest(texts: &[String], opts: &Options) -> String {
    let mut h = Sha256::new();
    for t in texts {
        h.update(t.as_bytes());
        h.update([0u8]);
    }
    for flag in [&opts.expr, &opts.sig].into_iter().flatten() {
        h.update(flag.as_bytes());
        h.update([0u8]);
    }
    hex::encode(h.finalize())
}

fn dispatch(cmd: Command, ctx: &Context) -> Result<Outcome, Failure> {
    match cmd {
        Command::Validate => cmd_validate(ctx),
        Command::Pi1 => cmd_pi1(ctx),
        Command::H1 => cmd_h1(ctx),
        Command::Euler => cmd_euler(ctx),
        Command::Order => cmd_order(ctx),
        Command::Fclass => cmd_fclass(ctx),
        Command::Holes => cmd_holes(ctx),
        Command::Q => cmd_q(ctx),
        Command::Obstruct => cmd_obstruct(ctx),
        Command::Synth => cmd_synth(ctx),
        Command::Recognize => cmd_recognize(ctx),
        Command::Delta => cmd_delta(ctx),
        Command::Tc => cmd_tc(ctx),
        Command::Fgraph => cmd_fgraph(ctx),
    }
}

fn violation_json(v: &Violation) -> Value {
    json!({ "rule": v.rule(), "subject": v.subject(), "message": v.to_string() })
}

fn counts(g: &StratifoldGraph) -> Value {
    json!({ "white": g.white_count(), "black": g.black_count(), "edges": g.edge_count() })
}

fn presentation_json(p: &GroupPresentation) -> Value {
    json!({
        "generators": p.generators().iter().map(|g| json!({ "name": g.name, "role": g.role.token() })).collect::<Vec<_>>(),
        "relators": p.relators().iter().map(|r| r.to_string()).collect::<Vec<_>>(),
    })
}

fn big_json(n: &impl ToString) -> Value {
    let s = n.to_string();
    s.parse::<u64>().map_or(Value::String(s), Value::from)
}

fn invariants_json(a: &AbelianInvariants) -> Value {
    json!({
        "free_rank": a.free_rank,
        "torsion": a.torsion.iter().map(big_json).collect::<Vec<_>>(),
        "group": a.to_string(),
    })
}

fn invariants_text(a: &AbelianInvariants) -> String {
    let torsion: Vec<String> = a.torsion.iter().map(|t| t.to_string()).collect();
    format!("free_rank {}\ntorsion ({})\nH1 = {a}\n", a.free_rank, torsion.join(", "))
}

fn verdict_json(v: &OrderVerdict) -> Value {
    match v {
        OrderVerdict::Finite { order, certificate } => {
            let cert = match certificate {
                FiniteCertificate::Eliminated => json!({ "kind": "eliminated" }),
                FiniteCertificate::Enumeration { group_order } => {
                    json!({ "kind": "enumeration", "group_order": group_order })
                }
                FiniteCertificate::Bounds {
                    abelian_image,
                    permutation_degrees,
                } => json!({
                    "kind": "bounds",
                    "abelian_image": abelian_image,
                    "permutation_degrees": permutation_degrees,
                }),
            };
            json!({ "verdict": "Finite", "order": order, "certificate": cert })
        }
        OrderVerdict::Infinite => json!({ "verdict": "Infinite" }),
        OrderVerdict::Unknown { budget } => json!({ "verdict": "Unknown", "budget": budget }),
    }
}

fn orders_json(orders: &BTreeMap<String, OrderVerdict>) -> Value {
    Value::Object(orders.iter().map(|(k, v)| (k.clone(), verdict_json(v))).collect())
}

fn orders_text(orders: &BTreeMap<String, OrderVerdict>) -> String {
    orders.iter().map(|(k, v)| format!("{k} {}\n", v.token())).collect()
}

fn obstruction_json(o: &Obstruction) -> Value {
    json!({ "kind": o.kind.token(), "witness": o.witness, "evidence": o.evidence })
}

fn cmd_validate(ctx: &Context) -> Result<Outcome, Failure> {
    match ctx.input()? {
        Input::Presentation(p) => Ok(Outcome::ok(
            json!({ "valid": true, "kind": "presentation", "generators": p.generators().len(), "relators": p.relators().len() }),
            "valid presentation\n",
        )),
        Input::Graph(g) => {
            let vs = validate(&g);
            let mut text: String = vs.iter().map(|v| format!("violation {}: {v}\n", v.rule())).collect();
            if vs.is_empty() {
                text = "valid\n".into();
            }
            let mut out = Outcome::ok(json!({ "valid": vs.is_empty(), "kind": "graph", "counts": counts(&g) }), text);
            out.violations = vs.iter().map(violation_json).collect();
            Ok(if vs.is_empty() { out } else { out.with_status(Status::Invalid) })
        }
    }
}

fn cmd_pi1(ctx: &Context) -> Result<Outcome, Failure> {
    let mut p = ctx.presentation()?;
    if ctx.opts.simplify {
        p = simplify(&p, p.generators().len()).presentation;
    }
    let mut payload = presentation_json(&p);
    payload["simplified"] = json!(ctx.opts.simplify);
    Ok(Outcome::ok(payload, serialize_presentation(&p)))
}

fn cmd_h1(ctx: &Context) -> Result<Outcome, Failure> {
    let a = abelianization(&ctx.presentation()?);
    Ok(Outcome::ok(invariants_json(&a), invariants_text(&a)))
}

fn cmd_euler(ctx: &Context) -> Result<Outcome, Failure> {
    let g = ctx.valid_graph()?;
    let chi = euler_characteristic(&g)?;
    let cells = cw_euler(&g)?;
    Ok(Outcome::ok(
        json!({ "euler_characteristic": chi, "cell_count": cells }),
        format!("{chi}\n"),
    ))
}

fn cmd_order(ctx: &Context) -> Result<Outcome, Failure> {
    let budget = ctx.opts.budget;
    let orders = if ctx.opts.word.is_empty() {
        match ctx.input()? {
            Input::Graph(g) => black_orders(&g, budget)?,
            Input::Presentation(_) => return Err(invalid!("--word is required for a presentation")),
        }
    } else {
        let p = match ctx.input()? {
            Input::Graph(g) => {
                ensure_valid(&g)?;
                natural_presentation(&normalize(&g)?)?
            }
            Input::Presentation(p) => p,
        };
        let oracle = OrderOracle::new(&p, budget);
        let mut orders = BTreeMap::new();
        for w in &ctx.opts.word {
            let word = parse_word(w).map_err(|e| invalid!("{e}"))?;
            orders.insert(w.clone(), oracle.order(&word)?);
        }
        orders
    };
    let unknown = orders.values().any(|v| v.is_unknown());
    let out = Outcome::ok(json!({ "orders": orders_json(&orders), "budget": budget }), orders_text(&orders));
    Ok(if unknown { out.with_status(Status::Indeterminate) } else { out })
}

fn cmd_fclass(ctx: &Context) -> Result<Outcome, Failure> {
    let sig = match &ctx.opts.sig {
        Some(s) => parse_signature(s).map_err(|e| invalid!("{e}"))?,
        None => {
            let g = ctx.valid_graph()?;
            fgroup_signature(&g).ok_or_else(|| invalid!("not an F-group graph"))?
        }
    };
    let class = classify_fgroup(&sig);
    let mut payload = json!({ "signature": sig.to_string(), "class": class.to_string() });
    match class {
        FClass::FiniteCyclic { order } => {
            payload["kind"] = json!("FiniteCyclic");
            payload["order"] = json!(order);
        }
        FClass::FiniteNonCyclic { name, order } => {
            payload["kind"] = json!("FiniteNonCyclic");
            payload["name"] = json!(name.to_string());
            payload["order"] = json!(order);
        }
        FClass::Infinite { surface } => {
            payload["kind"] = json!("Infinite");
            payload["surface"] = json!(surface);
        }
    }
    Ok(Outcome::ok(payload, format!("{sig} {class}\n")))
}

fn cmd_holes(ctx: &Context) -> Result<Outcome, Failure> {
    let g = ctx.valid_graph()?;
    let orders = black_orders(&g, ctx.opts.budget)?;
    let holes = white_holes(&g, &orders)?;
    let text: String = holes.iter().map(|h| format!("{h}\n")).collect();
    Ok(Outcome::ok(
        json!({ "orders": orders_json(&orders), "white_holes": holes }),
        if text.is_empty() { "no white holes\n".into() } else { text },
    ))
}

fn cmd_q(ctx: &Context) -> Result<Outcome, Failure> {
    let g = ctx.valid_graph()?;
    let q = q_graph(&g, ctx.opts.budget)?;
    let h1 = abelianization(&q.presentation);
    let components: Vec<Value> = q
        .components
        .iter()
        .map(|c| {
            let vertices: Vec<String> = c
                .graph
                .whites()
                .map(|w| w.id.clone())
                .chain(c.graph.blacks().map(|b| b.id.clone()))
                .collect();
            json!({
                "vertices": vertices,
                "capped": c.capped,
                "closed_surface_genus": c.closed_surface(),
            })
        })
        .collect();
    let mut text = format!(
        "deleted blacks: {}\nwhite holes: {}\ncomponents: {}\n",
        q.deleted_blacks.iter().cloned().collect::<Vec<_>>().join(" "),
        q.white_holes.iter().cloned().collect::<Vec<_>>().join(" "),
        q.components.len()
    );
    for c in &q.components {
        let ids: Vec<String> = c.graph.whites().map(|w| w.id.clone()).collect();
        match c.closed_surface() {
            Some(genus) => text.push_str(&format!("  closed surface {} genus {genus}\n", ids.join(" "))),
            None => text.push_str(&format!("  {} white, {} black\n", c.graph.white_count(), c.graph.black_count())),
        }
    }
    text.push_str(&format!("Q abelianization {h1}\n"));
    Ok(Outcome::ok(
        json!({
            "orders": orders_json(&q.orders),
            "deleted_blacks": q.deleted_blacks,
            "white_holes": q.white_holes,
            "q_components": components,
            "presentation": presentation_json(&q.presentation),
            "abelianization": invariants_json(&h1),
        }),
        text,
    ))
}

fn cmd_obstruct(ctx: &Context) -> Result<Outcome, Failure> {
    let g = ctx.valid_graph()?;
    let found = obstructions(&g, ctx.opts.budget)?;
    let verdict = if found.is_empty() { "no obstruction found" } else { "obstructed" };
    let mut text: String = found.iter().map(|o| format!("{o}\n")).collect();
    text.push_str(&format!("{verdict}\n"));
    let mut out = Outcome::ok(json!({ "verdict": verdict, "count": found.len() }), text);
    out.obstructions = found.iter().map(obstruction_json).collect();
    Ok(if found.is_empty() { out } else { out.with_status(Status::Obstructed) })
}

fn graph_outcome(g: &StratifoldGraph, mut payload: Value) -> Result<Outcome, Failure> {
    let text = serialize_graph(g);
    payload["graph"] = json!(text);
    payload["counts"] = counts(g);
    payload["euler_characteristic"] = json!(euler_characteristic(g)?);
    Ok(Outcome::ok(payload, text))
}

fn cmd_synth(ctx: &Context) -> Result<Outcome, Failure> {
    let e = parse_expr(ctx.expr()?).map_err(|e| invalid!("{e}"))?;
    let g = synth(&e).map_err(|e| invalid!("{e}"))?;
    graph_outcome(&g, json!({ "expression": e.to_string() }))
}

fn cmd_recognize(ctx: &Context) -> Result<Outcome, Failure> {
    let g = ctx.valid_graph()?;
    let e = recognize(&g).map_err(|e| invalid!("{e}"))?;
    let summands: Vec<String> = e.summands().iter().map(|s| s.to_string()).collect();
    Ok(Outcome::ok(
        json!({ "expression": e.to_string(), "summands": summands }),
        format!("{e}\n"),
    ))
}

fn cmd_delta(ctx: &Context) -> Result<Outcome, Failure> {
    let [t1, t2] = ctx.texts.as_slice() else {
        return Err(invalid!("delta needs two inputs (--in A --in B)"));
    };
    let mut g1 = parse_graph(t1).map_err(|e| invalid!("first input: {e}"))?;
    let mut g2 = parse_graph(t2).map_err(|e| invalid!("second input: {e}"))?;
    ensure_valid(&g1)?;
    ensure_valid(&g2)?;
    let (mut w1, mut w2) = match ctx.opts.at.as_slice() {
        [] => (attachment_vertex(&g1).unwrap(), attachment_vertex(&g2).unwrap()),
        [a, b] => (a.clone(), b.clone()),
        _ => return Err(invalid!("--at takes exactly two white vertices")),
    };
    let collide = g1
        .whites()
        .map(|w| w.id.as_str())
        .chain(g1.blacks().map(|b| b.id.as_str()))
        .chain(g1.edges().map(|e| e.id.as_str()))
        .any(|id| g2.has_id(id));
    if collide {
        g1 = g1.with_prefix("1.");
        g2 = g2.with_prefix("2.");
        w1 = format!("1.{w1}");
        w2 = format!("2.{w2}");
    }
    let g = delta_sum(&g1, &w1, &g2, &w2).map_err(|e| invalid!("{e}"))?;
    graph_outcome(&g, json!({ "attached": [w1, w2], "prefixed": collide }))
}

fn cmd_tc(ctx: &Context) -> Result<Outcome, Failure> {
    let p = ctx.presentation()?;
    let subgroup = ctx
        .opts
        .word
        .iter()
        .map(|w| parse_word(w).map_err(|e| invalid!("{e}")))
        .collect::<Result<Vec<_>, _>>()?;
    let budget = ctx.opts.budget;
    match todd_coxeter(&p, &subgroup, budget) {
        Ok(t) => Ok(Outcome::ok(
            json!({ "complete": true, "index": t.cosets(), "cosets": t.cosets(), "budget": budget }),
            format!("index {}\n", t.cosets()),
        )),
        Err(EnumerationError::Exhausted { partial, .. }) => Ok(Outcome::ok(
            json!({ "complete": false, "index": null, "cosets": partial.cosets(), "budget": budget }),
            format!("exhausted after {budget} cosets\n"),
        )
        .with_status(Status::Indeterminate)),
        Err(e) => Err(invalid!("{e}")),
    }
}

fn cmd_fgraph(ctx: &Context) -> Result<Outcome, Failure> {
    let s = ctx.opts.sig.as_deref().ok_or_else(|| invalid!("--sig is required"))?;
    let sig = parse_signature(s).map_err(|e| invalid!("{e}"))?;
    let g = fgroup_graph(&sig)?;
    graph_outcome(&g, json!({ "signature": sig.to_string() }))
}
