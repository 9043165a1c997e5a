//! Hierarchical declarative process models.
//!
//! Models are sets of activities plus declarative constraints; complex
//! activities instantiate sub-processes that run in isolation. The crate
//! compiles constraints to finite automata ([`automata`]), executes instances
//! ([`engine`]), analyses bounded trace languages and hierarchy rewrites
//! ([`analysis`]) and reads and writes the `.dpm`/`.dpt` text formats
//! ([`dsl`]).

pub mod analysis;
pub mod automata;
pub mod compiled;
pub mod dsl;
pub mod engine;
pub mod fixtures;
pub mod model;
pub mod timeline;
pub mod trace;

pub use automata::{classify_template, compile_constraint, evaluate_trace, ConstraintAutomaton, Status};
pub use compiled::{CompiledDocument, ModelError};
pub use engine::{replay, Command, EngineError, Event, ProcessInstance, ReplayVerdict, ScopeId};
pub use model::{alphabet, validate_model, ActivityDecl, ConstraintInstance, Document, ProcessModel, Template};
pub use timeline::{timeline, Timeline};
pub use trace::{Trace, TraceAction, TraceStep};
