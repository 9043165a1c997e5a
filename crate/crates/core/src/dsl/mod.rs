//! Text formats: `.dpm` process models and `.dpt` traces.
//!
//! Model grammar (line-oriented, whitespace-insensitive, `//` comments):
//!
//! ```text
//! document   := processdef+
//! processdef := "root"? "process" NAME "{" item* "}"
//! item       := "activity" NAME
//!             | "complex" NAME "=" "process" NAME
//!             | "constraint" TEMPLATE "(" args ")"
//! ```
//!
//! Counting templates take the cardinality first: `existence(1, A)`. Names
//! containing spaces are written in double quotes.
//!
//! Traces list one step per token: a label is a merged start and
//! completion, `.` terminates, `started NAME #ID [in #ID]` and
//! `completed NAME #ID` give the full form, and a leading `!` marks a step
//! that must be rejected.

mod lexer;
mod model;
mod trace;

use std::fmt;
use std::path::PathBuf;

use serde::Serialize;

pub use model::{parse_model, serialize_model, ModelParse};
pub use trace::{parse_trace, serialize_trace, TraceParse};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    Inline,
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceDocument {
    pub text: String,
    pub origin: Origin,
}

impl SourceDocument {
    pub fn inline(text: impl Into<String>) -> Self {
        SourceDocument { text: text.into(), origin: Origin::Inline }
    }

    pub fn read(path: impl Into<PathBuf>) -> std::io::Result<Self> {
        let path = path.into();
        let text = std::fs::read_to_string(&path)?;
        Ok(SourceDocument { text, origin: Origin::File(path) })
    }

    pub fn name(&self) -> String {
        match &self.origin {
            Origin::Inline => "<inline>".to_string(),
            Origin::File(p) => p.display().to_string(),
        }
    }
}

/// 1-based line and column (columns count characters).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl Position {
    pub const START: Position = Position { line: 1, column: 1 };
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub position: Position,
    pub message: String,
}

impl Diagnostic {
    pub fn error(position: Position, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, position, message: message.into() }
    }

    pub fn warning(position: Position, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, position, message: message.into() }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}: {sev}: {}", self.position, self.message)
    }
}

/// Formats diagnostics one per line, prefixed with the source name.
pub fn render_diagnostics(source: &SourceDocument, diagnostics: &[Diagnostic]) -> String {
    let name = source.name();
    diagnostics.iter().map(|d| format!("{name}:{d}\n")).collect()
}
