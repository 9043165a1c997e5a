use std::collections::HashMap;

use super::lexer::{lex, write_name, Token, TokenKind};
use super::{Diagnostic, Position, SourceDocument};
use crate::trace::{Trace, TraceAction, TraceStep};

const RESERVED: &[&str] = &["started", "completed", "in"];

#[derive(Clone, Debug, PartialEq)]
pub struct TraceParse {
    /// Present iff there are no error diagnostics.
    pub trace: Option<Trace>,
    pub diagnostics: Vec<Diagnostic>,
}

impl TraceParse {
    pub fn into_result(self) -> Result<Trace, Vec<Diagnostic>> {
        self.trace.ok_or(self.diagnostics)
    }
}

struct Cursor<'a> {
    tokens: &'a [Token],
    at: usize,
    end: Position,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.at)
    }

    fn next(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.at);
        self.at += 1;
        t
    }

    fn expected(&self, what: &str) -> Diagnostic {
        match self.peek() {
            Some(t) => Diagnostic::error(t.pos, format!("expected {what}, found {}", t.describe())),
            None => Diagnostic::error(self.end, format!("expected {what}, found end of input")),
        }
    }

    fn name(&mut self, what: &str) -> Result<String, Diagnostic> {
        match self.peek() {
            Some(Token { kind: TokenKind::Name { text, .. }, .. }) => {
                let text = text.clone();
                self.next();
                Ok(text)
            }
            _ => Err(self.expected(what)),
        }
    }

    fn instance_id(&mut self) -> Result<String, Diagnostic> {
        match self.peek() {
            Some(t) if t.is_punct('#') => {
                self.next();
            }
            _ => return Err(self.expected("`#`")),
        }
        match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Int(n)) => {
                let id = n.to_string();
                self.next();
                Ok(id)
            }
            Some(TokenKind::Name { text, .. }) => {
                let id = text.clone();
                self.next();
                Ok(id)
            }
            _ => Err(self.expected("an activity instance id")),
        }
    }

    fn step(&mut self) -> Result<TraceStep, Diagnostic> {
        let mut expect_reject = false;
        if self.peek().is_some_and(|t| t.is_punct('!')) {
            self.next();
            expect_reject = true;
        }
        let Some(token) = self.peek() else { return Err(self.expected("a trace step")) };
        let action = if token.is_punct('.') {
            self.next();
            TraceAction::Terminate
        } else if token.is_keyword("started") {
            self.next();
            let label = self.name("an activity name")?;
            let instance = self.instance_id()?;
            let parent = if self.peek().is_some_and(|t| t.is_keyword("in")) {
                self.next();
                Some(self.instance_id()?)
            } else {
                None
            };
            TraceAction::Start { label, instance, parent }
        } else if token.is_keyword("completed") {
            self.next();
            let label = self.name("an activity name")?;
            let instance = self.instance_id()?;
            TraceAction::Complete { label, instance }
        } else {
            let label = self.name("an activity name, `started`, `completed` or `.`")?;
            TraceAction::Execute { label }
        };
        Ok(TraceStep { action, expect_reject })
    }
}

/// Parses a `.dpt` trace. Completions must pair with an earlier start of the
/// same activity under the same instance id.
pub fn parse_trace(source: &SourceDocument) -> TraceParse {
    let (tokens, mut diagnostics) = lex(&source.text);
    let end = tokens.last().map(|t| t.pos).unwrap_or(Position::START);
    let mut cursor = Cursor { tokens: &tokens, at: 0, end };
    let mut steps = Vec::new();
    // instance id -> (label, still open)
    let mut open: HashMap<String, (String, bool)> = HashMap::new();

    while cursor.peek().is_some() {
        let pos = cursor.peek().unwrap().pos;
        match cursor.step() {
            Ok(step) => {
                if !step.expect_reject {
                    match &step.action {
                        TraceAction::Start { label, instance, .. } => {
                            if open.get(instance).is_some_and(|(_, open)| *open) {
                                diagnostics.push(Diagnostic::error(
                                    pos,
                                    format!("instance #{instance} is already running"),
                                ));
                            }
                            open.insert(instance.clone(), (label.clone(), true));
                        }
                        TraceAction::Complete { label, instance } => match open.get_mut(instance) {
                            Some((started, is_open)) if *is_open && started == label => *is_open = false,
                            Some((started, true)) => diagnostics.push(Diagnostic::error(
                                pos,
                                format!("instance #{instance} was started as `{started}`, not `{label}`"),
                            )),
                            _ => diagnostics.push(Diagnostic::error(
                                pos,
                                format!("completion of `{label}` #{instance} has no matching start"),
                            )),
                        },
                        _ => {}
                    }
                }
                steps.push(step);
            }
            Err(d) => {
                diagnostics.push(d);
                // resynchronise on the next token
                if cursor.at < tokens.len() && tokens.get(cursor.at).map(|t| t.pos) == Some(pos) {
                    cursor.next();
                }
            }
        }
    }
    let ok = !diagnostics.iter().any(Diagnostic::is_error);
    TraceParse { trace: ok.then_some(Trace { steps }), diagnostics }
}

fn write_id(out: &mut String, id: &str) {
    match id.parse::<u64>() {
        Ok(n) if n.to_string() == id => out.push_str(id),
        _ => write_name(out, id, RESERVED),
    }
}

/// Writes a trace: runs of merged steps and terminations on one line, each
/// full-form step on its own line.
pub fn serialize_trace(trace: &Trace) -> String {
    let mut out = String::new();
    let mut line_open = false;
    for step in &trace.steps {
        let mut token = String::new();
        if step.expect_reject {
            token.push('!');
        }
        let inline = match &step.action {
            TraceAction::Execute { label } => {
                write_name(&mut token, label, RESERVED);
                true
            }
            TraceAction::Terminate => {
                token.push('.');
                true
            }
            TraceAction::Start { label, instance, parent } => {
                token.push_str("started ");
                write_name(&mut token, label, RESERVED);
                token.push_str(" #");
                write_id(&mut token, instance);
                if let Some(parent) = parent {
                    token.push_str(" in #");
                    write_id(&mut token, parent);
                }
                false
            }
            TraceAction::Complete { label, instance } => {
                token.push_str("completed ");
                write_name(&mut token, label, RESERVED);
                token.push_str(" #");
                write_id(&mut token, instance);
                false
            }
        };
        if inline && line_open {
            out.push(' ');
        } else if line_open {
            out.push('\n');
        }
        out.push_str(&token);
        line_open = inline;
        if !inline {
            out.push('\n');
        }
    }
    if line_open {
        out.push('\n');
    }
    out
}
