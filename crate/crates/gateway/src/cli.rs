//! The `dpm` command line.
//!
//! Exit codes: 0 for success (valid, accepted, equivalent, feasible), 1 for
//! a negative verdict, 2 for usage, input or parse errors.

use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use dpm_core::analysis::{
    bounded_equivalent, check_extraction, enumerate_language, extract_subprocess, inline_subprocess, AnalysisError,
    Bounds, EquivalenceResult, DEFAULT_MAX_STATES,
};
use dpm_core::dsl::{parse_model, parse_trace, render_diagnostics, serialize_model, serialize_trace, SourceDocument};
use dpm_core::engine::ActivityInstanceId;
use dpm_core::{timeline, CompiledDocument, Document, ProcessInstance, ScopeId};
use serde::Serialize;

use crate::store::SessionStore;

#[derive(Parser)]
#[command(name = "dpm", version, about = "Hierarchical declarative process models")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a model for syntax and well-formedness errors.
    Validate { model: PathBuf },
    /// Replay a trace against a model.
    Replay {
        model: PathBuf,
        trace: PathBuf,
        /// Show enablement and termination after every event.
        #[arg(long)]
        timeline: bool,
    },
    /// List the accepted leaf traces within the bounds.
    Enumerate {
        model: PathBuf,
        #[arg(long)]
        max_leaf: usize,
        #[arg(long, default_value_t = 2)]
        max_activations: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_STATES)]
        max_states: usize,
    },
    /// Compare the bounded leaf languages of two models.
    Equiv {
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        max_leaf: usize,
        #[arg(long, default_value_t = 2)]
        max_activations: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_STATES)]
        max_states: usize,
    },
    /// Move activities into a new sub-process.
    Extract {
        model: PathBuf,
        /// Comma-separated activity names.
        #[arg(long)]
        members: String,
        #[arg(long)]
        name: String,
    },
    /// Replace a complex activity by its sub-process and check the result.
    Inline {
        model: PathBuf,
        #[arg(long)]
        complex: String,
        #[arg(long)]
        max_leaf: usize,
        #[arg(long, default_value_t = 2)]
        max_activations: usize,
    },
    /// Run an instance interactively from standard input.
    Simulate { model: PathBuf },
    /// Serve the HTTP/JSON API.
    Serve {
        #[arg(long, env = "PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Persist sessions to this file and restore them on start.
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
}

/// Error with its exit code, already formatted for the user.
struct Exit(i32, String);

type CliResult = Result<i32, Exit>;

fn usage(msg: impl Into<String>) -> Exit {
    Exit(2, msg.into())
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    json: bool,
}

impl Io<'_> {
    fn print_json<T: Serialize>(&mut self, value: &T) {
        let _ = writeln!(self.out, "{}", serde_json::to_string_pretty(value).expect("serializable"));
    }
}

fn read_source(path: &Path) -> Result<SourceDocument, Exit> {
    SourceDocument::read(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path, io: &mut Io) -> Result<Document, Exit> {
    let source = read_source(path)?;
    let parsed = parse_model(&source);
    if !parsed.diagnostics.is_empty() {
        let _ = write!(io.err, "{}", render_diagnostics(&source, &parsed.diagnostics));
    }
    parsed.document.ok_or_else(|| usage(format!("{}: invalid model", path.display())))
}

fn compile(doc: Document) -> Result<Arc<CompiledDocument>, Exit> {
    CompiledDocument::new(doc).map(Arc::new).map_err(|e| usage(e.to_string()))
}

fn analysis(e: AnalysisError) -> Exit {
    match e {
        AnalysisError::UnknownMember(_)
        | AnalysisError::MembersSpanModels(_)
        | AnalysisError::NoMembers
        | AnalysisError::NameCollision(_)
        | AnalysisError::NotComplex(_)
        | AnalysisError::Model(_) => usage(e.to_string()),
        _ => Exit(1, e.to_string()),
    }
}

fn show_trace(t: &[String]) -> String {
    format!("<{}>", t.join(", "))
}

fn report_equivalence(r: &EquivalenceResult, io: &mut Io) -> i32 {
    if io.json {
        io.print_json(r);
    } else if r.equivalent_up_to_k {
        let _ = writeln!(
            io.out,
            "equivalent up to {} leaf events and {} activations",
            r.max_leaf_len, r.max_activations
        );
    } else {
        let _ = writeln!(io.out, "not equivalent");
        if let Some(cx) = &r.counterexample {
            let side = match cx.accepted_by {
                dpm_core::analysis::Side::First => "first",
                dpm_core::analysis::Side::Second => "second",
            };
            let _ = writeln!(io.out, "counterexample: {} (accepted only by the {side} model)", show_trace(&cx.trace));
        }
        if !r.alphabet_difference.is_empty() {
            let _ = writeln!(io.out, "activities in only one model: {}", r.alphabet_difference.join(", "));
        }
    }
    if r.equivalent_up_to_k {
        0
    } else {
        1
    }
}

fn validate(path: &Path, io: &mut Io) -> CliResult {
    let source = read_source(path)?;
    let parsed = parse_model(&source);
    if io.json {
        let diagnostics: Vec<String> = parsed.diagnostics.iter().map(|d| d.to_string()).collect();
        io.print_json(&serde_json::json!({ "valid": parsed.document.is_some(), "diagnostics": diagnostics }));
    } else {
        let _ = write!(io.out, "{}", render_diagnostics(&source, &parsed.diagnostics));
        if parsed.document.is_some() {
            let _ = writeln!(io.out, "{}: ok", source.name());
        }
    }
    Ok(match (parsed.document.is_some(), parsed.syntax_ok) {
        (true, _) => 0,
        (false, true) => 1,
        (false, false) => 2,
    })
}

fn replay_cmd(model: &Path, trace: &Path, show_timeline: bool, io: &mut Io) -> CliResult {
    let doc = compile(load_model(model, io)?)?;
    let source = read_source(trace)?;
    let trace = parse_trace(&source).into_result().map_err(|d| usage(render_diagnostics(&source, &d)))?;
    let t = timeline(&doc, &trace);
    if io.json {
        io.print_json(&t);
    } else if show_timeline {
        let _ = write!(io.out, "{t}");
    } else {
        let _ = writeln!(io.out, "{}", t.verdict);
    }
    Ok(if t.verdict.accepted() { 0 } else { 1 })
}

/// Reads `start LABEL [in sN]`, `complete #N`, `terminate`, `enabled`,
/// `explain LABEL [in sN]`, `trace`, `help` and `quit` lines.
fn simulate(model: &Path, input: &mut dyn BufRead, io: &mut Io) -> CliResult {
    let doc = compile(load_model(model, io)?)?;
    let mut p = ProcessInstance::instantiate(doc);
    let _ = writeln!(io.out, "{}", status_line(&p));
    let mut line = String::new();
    loop {
        line.clear();
        if input.read_line(&mut line).map_err(|e| usage(e.to_string()))? == 0 {
            break;
        }
        let line = line.trim();
        let (verb, rest) = line.split_once(' ').map(|(v, r)| (v, r.trim())).unwrap_or((line, ""));
        let result: Result<String, String> = match verb {
            "" => continue,
            "quit" | "exit" => break,
            "help" => Ok("commands: start LABEL [in sN], complete #N, terminate, enabled, explain LABEL [in sN], trace, quit".into()),
            "enabled" => Ok(status_line(&p)),
            "trace" => Ok(serialize_trace(&p.trace()).trim_end().to_string()),
            "start" => resolve(&p, rest).and_then(|(scope, label)| {
                p.start_activity(scope, &label).map(|e| e.to_string()).map_err(|e| e.to_string())
            }),
            "complete" => rest
                .trim_start_matches('#')
                .parse::<u64>()
                .map_err(|_| format!("expected an activity instance like #3, got `{rest}`"))
                .and_then(|n| p.complete_activity(ActivityInstanceId(n)).map(|e| e.to_string()).map_err(|e| e.to_string())),
            "terminate" => p.terminate().map(|e| e.to_string()).map_err(|e| e.to_string()),
            "explain" => resolve(&p, rest).and_then(|(scope, label)| {
                let reports = p.explain(scope, &label).map_err(|e| e.to_string())?;
                Ok(reports
                    .iter()
                    .map(|r| format!("{}: {}{}", r.constraint, r.status, if r.blocking { ", blocks" } else { "" }))
                    .collect::<Vec<_>>()
                    .join("\n"))
            }),
            other => Err(format!("unknown command `{other}`; try help")),
        };
        match result {
            Ok(text) => {
                if !text.is_empty() {
                    let _ = writeln!(io.out, "{text}");
                }
                if matches!(verb, "start" | "complete") {
                    let _ = writeln!(io.out, "{}", status_line(&p));
                }
            }
            Err(e) => {
                let _ = writeln!(io.out, "rejected: {e}");
            }
        }
        if p.is_terminated() {
            break;
        }
    }
    Ok(0)
}

fn status_line(p: &ProcessInstance) -> String {
    if p.is_terminated() {
        return "terminated".into();
    }
    let enabled: Vec<String> = p
        .enabled_activities()
        .into_iter()
        .map(|(s, l)| if s.0 == 0 { l } else { format!("{l}@{s}") })
        .collect();
    let t = p.termination(p.root());
    let term = if t.allowed {
        "yes".to_string()
    } else {
        format!("no ({})", t.blockers.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(", "))
    };
    format!("enabled: {}; terminate: {term}", enabled.join(", "))
}

/// `LABEL` or `LABEL in sN`; without a scope the label must belong to
/// exactly one running scope.
fn resolve(p: &ProcessInstance, text: &str) -> Result<(ScopeId, String), String> {
    if let Some((label, scope)) = text.rsplit_once(" in ") {
        let n = scope.trim().trim_start_matches('s').parse::<u64>().map_err(|_| format!("bad scope `{scope}`"))?;
        return Ok((ScopeId(n), label.trim().to_string()));
    }
    let owners: Vec<ScopeId> = p
        .root()
        .running_scopes()
        .into_iter()
        .filter(|s| p.model_of(s).activities.iter().any(|a| a.name == text))
        .map(|s| s.id)
        .collect();
    match owners.as_slice() {
        [one] => Ok((*one, text.to_string())),
        [] => Err(format!("no running scope has activity `{text}`")),
        _ => Err(format!("`{text}` runs in several scopes; add `in sN`")),
    }
}

fn serve(host: &str, port: u16, snapshot: Option<PathBuf>, io: &mut Io) -> CliResult {
    let store = match snapshot {
        Some(path) => SessionStore::open(path).map_err(|e| usage(e.to_string()))?,
        None => SessionStore::in_memory(),
    };
    let runtime = tokio::runtime::Runtime::new().map_err(|e| usage(e.to_string()))?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind((host, port))
            .await
            .map_err(|e| usage(format!("cannot bind {host}:{port}: {e}")))?;
        let addr = listener.local_addr().map_err(|e| usage(e.to_string()))?;
        let _ = writeln!(io.err, "listening on http://{addr}");
        axum::serve(listener, crate::http::router(Arc::new(store)))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(|e| Exit(1, e.to_string()))?;
        Ok(0)
    })
}

fn run(cli: Cli, input: &mut dyn BufRead, io: &mut Io) -> CliResult {
    match cli.command {
        Cmd::Validate { model } => validate(&model, io),
        Cmd::Replay { model, trace, timeline } => replay_cmd(&model, &trace, timeline, io),
        Cmd::Enumerate { model, max_leaf, max_activations, max_states } => {
            let doc = compile(load_model(&model, io)?)?;
            let bounds = Bounds::new(max_leaf, max_activations).with_max_states(max_states);
            let lang = enumerate_language(&doc, &bounds).map_err(analysis)?;
            if io.json {
                io.print_json(&lang);
            } else {
                for t in &lang.traces {
                    let _ = writeln!(io.out, "{}", show_trace(t));
                }
                let _ = writeln!(io.out, "{} traces ({} configurations explored)", lang.traces.len(), lang.explored);
            }
            Ok(0)
        }
        Cmd::Equiv { first, second, max_leaf, max_activations, max_states } => {
            let a = compile(load_model(&first, io)?)?;
            let b = compile(load_model(&second, io)?)?;
            let bounds = Bounds::new(max_leaf, max_activations).with_max_states(max_states);
            let r = bounded_equivalent(&a, &b, &bounds).map_err(analysis)?;
            Ok(report_equivalence(&r, io))
        }
        Cmd::Extract { model, members, name } => {
            let doc = load_model(&model, io)?;
            let members: Vec<String> = members.split(',').map(|m| m.trim().to_string()).filter(|m| !m.is_empty()).collect();
            let report = check_extraction(&doc, &members).map_err(analysis)?;
            let extracted = if report.feasible { Some(extract_subprocess(&doc, &members, &name).map_err(analysis)?) } else { None };
            if io.json {
                io.print_json(&serde_json::json!({ "report": report, "model": extracted.as_ref().map(serialize_model) }));
            } else {
                for agg in &report.aggregated {
                    let _ = writeln!(io.err, "aggregated {} constraints into {}", agg.replaced.len(), agg.on(&name));
                }
                for c in &report.blocking {
                    let _ = writeln!(io.err, "blocking: {c}");
                }
                match &extracted {
                    Some(doc) => {
                        let _ = write!(io.out, "{}", serialize_model(doc));
                    }
                    None => {
                        let _ = writeln!(io.out, "extraction is infeasible");
                    }
                }
            }
            Ok(if report.feasible { 0 } else { 1 })
        }
        Cmd::Inline { model, complex, max_leaf, max_activations } => {
            let doc = load_model(&model, io)?;
            let outcome = inline_subprocess(&doc, &complex, &Bounds::new(max_leaf, max_activations)).map_err(analysis)?;
            for w in &outcome.warnings {
                let _ = writeln!(io.err, "warning: {w}");
            }
            if io.json {
                io.print_json(&serde_json::json!({
                    "model": serialize_model(&outcome.document),
                    "warnings": outcome.warnings,
                    "verdict": outcome.verdict,
                }));
                return Ok(if outcome.verdict.equivalent_up_to_k { 0 } else { 1 });
            }
            let _ = writeln!(io.out, "{}", serialize_model(&outcome.document));
            Ok(report_equivalence(&outcome.verdict, io))
        }
        Cmd::Simulate { model } => simulate(&model, input, io),
        Cmd::Serve { port, host, snapshot } => serve(&host, port, snapshot, io),
    }
}

/// Runs the command line given in `args` (including the program name).
pub fn run_cli<I, T>(args: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            if code == 0 {
                let _ = write!(out, "{e}");
            } else {
                let _ = write!(err, "{e}");
            }
            return code;
        }
    };
    let mut io = Io { out, err, json: cli.json };
    match run(cli, input, &mut io) {
        Ok(code) => code,
        Err(Exit(code, msg)) => {
            let _ = writeln!(io.err, "error: {msg}");
            code
        }
    }
}
