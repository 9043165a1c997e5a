//! Bounded analyses of hierarchical models.
//!
//! Models are compared on their *leaf language*: the sequences of atomic
//! completions of accepted runs, with complex-activity events erased.
//! Because a complex activity may be started and completed without any leaf
//! completion in between, languages are bounded both in leaf length and in
//! the number of complex activations per run.

mod enumerate;
mod equivalence;
mod extraction;
mod inline;
mod schedule;

use serde::Serialize;
use thiserror::Error;

use crate::compiled::ModelError;

pub use enumerate::{enumerate_language, BoundedLanguage};
pub use equivalence::{bounded_equivalent, Counterexample, EquivalenceResult, Side};
pub use extraction::{check_extraction, extract_subprocess, AggregatedConstraint, ExtractionReport};
pub use inline::{inline_rewrite, inline_subprocess, InlineOutcome};
pub use schedule::find_schedule;

/// Default cap on distinct search configurations.
pub const DEFAULT_MAX_STATES: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub max_leaf_len: usize,
    pub max_activations: usize,
    /// Exploration fails with [`AnalysisError::BoundExceeded`] past this many
    /// configurations.
    pub max_states: usize,
}

impl Bounds {
    pub fn new(max_leaf_len: usize, max_activations: usize) -> Self {
        Bounds { max_leaf_len, max_activations, max_states: DEFAULT_MAX_STATES }
    }

    pub fn with_max_states(mut self, max_states: usize) -> Self {
        self.max_states = max_states;
        self
    }
}

#[derive(Debug, Clone, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("bound exceeded: explored {explored} configurations (limit {limit})")]
    BoundExceeded { explored: usize, limit: usize },
    #[error("enumerator and engine disagree on leaf trace {trace:?}")]
    CrossCheckFailed { trace: Vec<String> },
    #[error("`{0}` is not an activity of the document")]
    UnknownMember(String),
    #[error("members must be activities of one process; found them in {}", .0.join(", "))]
    MembersSpanModels(Vec<String>),
    #[error("member set is empty")]
    NoMembers,
    #[error("extraction is infeasible: {} boundary constraint(s) are not shared by all members", .0.blocking.len())]
    Infeasible(Box<ExtractionReport>),
    #[error("name `{0}` is already used in the document")]
    NameCollision(String),
    #[error("`{0}` is not a complex activity of the document")]
    NotComplex(String),
    #[error("sub-process of `{complex}` contains complex activity `{nested}`; inline it first")]
    NestedComplex { complex: String, nested: String },
    #[error("process `{sub_model}` is also used by {}; inlining would duplicate its activities", .others.join(", "))]
    SharedSubModel { sub_model: String, others: Vec<String> },
}
