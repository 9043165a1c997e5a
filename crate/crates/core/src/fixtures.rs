//! Bundled example models and traces (the files under `fixtures/`).

use crate::dsl::{parse_model, parse_trace, SourceDocument};
use crate::model::Document;
use crate::trace::Trace;

/// Six activities; `existence(1, A)` and `precedence(C, E)`.
pub const DECLARATIVE_BASICS: &str = include_str!("../fixtures/declarative_basics.dpm");
pub const DECLARATIVE_BASICS_TRACE: &str = include_str!("../fixtures/declarative_basics.dpt");
pub const DECLARATIVE_BASICS_FULL_TRACE: &str = include_str!("../fixtures/declarative_basics_full.dpt");
/// Expected transcript of replaying the full basics trace.
pub const DECLARATIVE_BASICS_TIMELINE: &str = include_str!("../fixtures/declarative_basics.timeline");
/// Atomic `A` next to complex `B`, whose sub-process orders `C` before `D`.
pub const SUBPROCESS: &str = include_str!("../fixtures/subprocess.dpm");
pub const SUBPROCESS_TRACE: &str = include_str!("../fixtures/subprocess.dpt");
pub const SUBPROCESS_TIMELINE: &str = include_str!("../fixtures/subprocess.timeline");
/// A chain constraint on a complex activity whose sub-process counts its
/// activities; only expressible with hierarchy.
pub const CONTEXT_COUNTS: &str = include_str!("../fixtures/context_counts.dpm");
pub const CONTEXT_COUNTS_FLAT: &str = include_str!("../fixtures/context_counts_flat.dpm");
pub const PAPER_WRITING_FLAT: &str = include_str!("../fixtures/paper_writing_flat.dpm");
pub const PAPER_WRITING_HIERARCHICAL: &str = include_str!("../fixtures/paper_writing_hierarchical.dpm");
pub const UNCONSTRAINED_NESTED: &str = include_str!("../fixtures/unconstrained_nested.dpm");
pub const SHARED_SUBMODEL: &str = include_str!("../fixtures/shared_submodel.dpm");
/// Ill-formed: a process that instantiates itself.
pub const CYCLIC: &str = include_str!("../fixtures/cyclic.dpm");

/// Activities extracted into the revision sub-process.
pub const REVISION_MEMBERS: [&str; 3] =
    ["Read reviews for revising paper", "Write response letter", "Work on revision"];

/// Every well-formed model fixture, by file name.
pub const MODELS: [(&str, &str); 8] = [
    ("declarative_basics.dpm", DECLARATIVE_BASICS),
    ("subprocess.dpm", SUBPROCESS),
    ("context_counts.dpm", CONTEXT_COUNTS),
    ("context_counts_flat.dpm", CONTEXT_COUNTS_FLAT),
    ("paper_writing_flat.dpm", PAPER_WRITING_FLAT),
    ("paper_writing_hierarchical.dpm", PAPER_WRITING_HIERARCHICAL),
    ("unconstrained_nested.dpm", UNCONSTRAINED_NESTED),
    ("shared_submodel.dpm", SHARED_SUBMODEL),
];

/// Parses a bundled model.
///
/// # Panics
/// If the text does not parse to a well-formed document.
pub fn model(source: &str) -> Document {
    match parse_model(&SourceDocument::inline(source)).into_result() {
        Ok(doc) => doc,
        Err(diagnostics) => panic!("bundled model does not parse: {diagnostics:?}"),
    }
}

/// Parses a bundled trace.
///
/// # Panics
/// If the text does not parse.
pub fn trace(source: &str) -> Trace {
    match parse_trace(&SourceDocument::inline(source)).into_result() {
        Ok(trace) => trace,
        Err(diagnostics) => panic!("bundled trace does not parse: {diagnostics:?}"),
    }
}
