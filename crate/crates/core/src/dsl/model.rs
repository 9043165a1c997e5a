use std::collections::HashMap;

use super::lexer::{lex, write_name, Token, TokenKind};
use super::{Diagnostic, Position, SourceDocument};
use crate::model::{
    validate_model, ActivityDecl, ConstraintInstance, Document, ProcessModel, Site, Template,
};

const RESERVED: &[&str] = &["root", "process", "activity", "complex", "constraint"];

#[derive(Clone, Debug, PartialEq)]
pub struct ModelParse {
    /// Present iff there are no error diagnostics.
    pub document: Option<Document>,
    /// The text parsed; any errors are well-formedness violations.
    pub syntax_ok: bool,
    pub diagnostics: Vec<Diagnostic>,
}

impl ModelParse {
    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.is_error())
    }

    pub fn into_result(self) -> Result<Document, Vec<Diagnostic>> {
        match self.document {
            Some(doc) => Ok(doc),
            None => Err(self.diagnostics),
        }
    }
}

/// Positions of parsed items, for attaching semantic diagnostics.
#[derive(Default)]
struct SourceMap {
    models: HashMap<String, Position>,
    activities: HashMap<(String, String), Position>,
    constraints: HashMap<(String, usize), Position>,
}

impl SourceMap {
    fn position(&self, site: &Site) -> Position {
        let found = match site {
            Site::Document => None,
            Site::Model { model } => self.models.get(model),
            Site::Activity { model, activity } => self.activities.get(&(model.clone(), activity.clone())),
            Site::Constraint { model, index } => self.constraints.get(&(model.clone(), *index)),
        };
        found.copied().unwrap_or(Position::START)
    }
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
    diagnostics: Vec<Diagnostic>,
    map: SourceMap,
    end: Position,
}

type Parsed<T> = Result<T, ()>;

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.at)
    }

    fn here(&self) -> Position {
        self.peek().map(|t| t.pos).unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.at).cloned();
        self.at += 1;
        t
    }

    fn fail<T>(&mut self, expected: &str) -> Parsed<T> {
        let (pos, found) = match self.peek() {
            Some(t) => (t.pos, t.describe()),
            None => (self.end, "end of input".to_string()),
        };
        self.diagnostics.push(Diagnostic::error(pos, format!("expected {expected}, found {found}")));
        Err(())
    }

    fn keyword(&mut self, word: &str) -> Parsed<Position> {
        match self.peek() {
            Some(t) if t.is_keyword(word) => Ok(self.next().unwrap().pos),
            _ => self.fail(&format!("`{word}`")),
        }
    }

    fn punct(&mut self, c: char) -> Parsed<()> {
        match self.peek() {
            Some(t) if t.is_punct(c) => {
                self.next();
                Ok(())
            }
            _ => self.fail(&format!("`{c}`")),
        }
    }

    fn name(&mut self, what: &str) -> Parsed<(String, Position)> {
        match self.peek() {
            Some(Token { kind: TokenKind::Name { text, quoted }, pos })
                if *quoted || !RESERVED.contains(&text.as_str()) =>
            {
                let out = (text.clone(), *pos);
                self.next();
                Ok(out)
            }
            _ => self.fail(what),
        }
    }

    fn document(&mut self) -> Document {
        let mut models = Vec::new();
        if self.peek().is_none() {
            let _ = self.fail::<()>("a process definition");
        }
        while self.peek().is_some() {
            match self.process() {
                Ok(m) => models.push(m),
                Err(()) => self.recover_top_level(),
            }
        }
        Document::new(models)
    }

    fn recover_top_level(&mut self) {
        while let Some(t) = self.peek() {
            if t.is_keyword("root") || t.is_keyword("process") {
                // only resynchronise on a process header, not on `= process X`
                let prev_is_eq = self.at > 0 && self.tokens[self.at - 1].is_punct('=');
                if !prev_is_eq {
                    return;
                }
            }
            self.next();
        }
    }

    fn process(&mut self) -> Parsed<ProcessModel> {
        let root = matches!(self.peek(), Some(t) if t.is_keyword("root"));
        if root {
            self.next();
        }
        self.keyword("process")?;
        let (name, pos) = self.name("a process name")?;
        self.map.models.entry(name.clone()).or_insert(pos);
        self.punct('{')?;
        let mut model = ProcessModel::new(name);
        model.root = root;
        loop {
            match self.peek() {
                Some(t) if t.is_punct('}') => {
                    self.next();
                    return Ok(model);
                }
                None => return self.fail("`}`"),
                _ => {
                    if self.item(&mut model).is_err() {
                        self.recover_item()?;
                    }
                }
            }
        }
    }

    /// Skips to the next item keyword or the closing brace. Gives up on the
    /// process when a new process header shows up first.
    fn recover_item(&mut self) -> Parsed<()> {
        while let Some(t) = self.peek() {
            if ["activity", "complex", "constraint"].iter().any(|k| t.is_keyword(k)) || t.is_punct('}') {
                return Ok(());
            }
            if t.is_keyword("root") {
                return Err(());
            }
            self.next();
        }
        Ok(())
    }

    fn item(&mut self, model: &mut ProcessModel) -> Parsed<()> {
        let Some(t) = self.peek() else { return self.fail("an item") };
        if t.is_keyword("activity") {
            self.next();
            let (name, pos) = self.name("an activity name")?;
            self.map.activities.entry((model.name.clone(), name.clone())).or_insert(pos);
            model.activities.push(ActivityDecl::atomic(name));
        } else if t.is_keyword("complex") {
            self.next();
            let (name, pos) = self.name("an activity name")?;
            self.punct('=')?;
            self.keyword("process")?;
            let (target, _) = self.name("a process name")?;
            self.map.activities.entry((model.name.clone(), name.clone())).or_insert(pos);
            model.activities.push(ActivityDecl::complex(name, target));
        } else if t.is_keyword("constraint") {
            self.next();
            let pos = self.here();
            let (template_name, _) = self.name("a constraint template")?;
            let template: Template = match template_name.parse() {
                Ok(t) => t,
                Err(e) => {
                    self.diagnostics.push(Diagnostic::error(pos, e.to_string()));
                    return Err(());
                }
            };
            self.punct('(')?;
            let mut cardinality = None;
            let mut operands = Vec::new();
            let mut first = true;
            loop {
                if matches!(self.peek(), Some(t) if t.is_punct(')')) && first {
                    self.next();
                    break;
                }
                match self.next() {
                    Some(Token { kind: TokenKind::Int(n), pos: int_pos }) => {
                        if !first || cardinality.is_some() {
                            self.diagnostics
                                .push(Diagnostic::error(int_pos, "the cardinality must be the first argument"));
                            return Err(());
                        }
                        match u32::try_from(n) {
                            Ok(n) => cardinality = Some(n),
                            Err(_) => {
                                self.diagnostics.push(Diagnostic::error(int_pos, "cardinality out of range"));
                                return Err(());
                            }
                        }
                    }
                    Some(Token { kind: TokenKind::Name { text, .. }, .. }) => operands.push(text),
                    _ => {
                        self.at -= 1;
                        return self.fail("an activity name or cardinality");
                    }
                }
                first = false;
                match self.peek() {
                    Some(t) if t.is_punct(',') => {
                        self.next();
                    }
                    Some(t) if t.is_punct(')') => {
                        self.next();
                        break;
                    }
                    _ => return self.fail("`,` or `)`"),
                }
            }
            self.map.constraints.insert((model.name.clone(), model.constraints.len()), pos);
            model.constraints.push(ConstraintInstance { template, cardinality, operands });
        } else {
            return self.fail("`activity`, `complex`, `constraint` or `}`");
        }
        Ok(())
    }
}

fn end_position(text: &str) -> Position {
    let mut pos = Position::START;
    for c in text.chars() {
        if c == '\n' {
            pos.line += 1;
            pos.column = 1;
        } else {
            pos.column += 1;
        }
    }
    pos
}

/// Parses and validates a model document.
pub fn parse_model(source: &SourceDocument) -> ModelParse {
    let (tokens, mut diagnostics) = lex(&source.text);
    let mut parser = Parser {
        tokens,
        at: 0,
        diagnostics: Vec::new(),
        map: SourceMap::default(),
        end: end_position(&source.text),
    };
    let document = parser.document();
    diagnostics.append(&mut parser.diagnostics);
    if diagnostics.iter().any(Diagnostic::is_error) {
        diagnostics.sort_by_key(|d| d.position);
        return ModelParse { document: None, syntax_ok: false, diagnostics };
    }

    let report = validate_model(&document);
    for v in &report.violations {
        diagnostics.push(Diagnostic::error(parser.map.position(&v.site()), v.to_string()));
    }
    if report.is_well_formed() {
        let reachable: Vec<String> = document.reachable_models().iter().map(|m| m.name.clone()).collect();
        for m in &document.models {
            if !reachable.contains(&m.name) {
                diagnostics.push(Diagnostic::warning(
                    parser.map.position(&Site::Model { model: m.name.clone() }),
                    format!("process `{}` is not reachable from the root", m.name),
                ));
            }
        }
    }
    diagnostics.sort_by_key(|d| d.position);
    let ok = report.is_well_formed();
    ModelParse { document: ok.then_some(document), syntax_ok: true, diagnostics }
}

/// Canonical text: models in document order, activities in declaration
/// order, constraints sorted, four-space indentation.
pub fn serialize_model(document: &Document) -> String {
    let mut out = String::new();
    for (i, m) in document.models.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        if m.root {
            out.push_str("root ");
        }
        out.push_str("process ");
        write_name(&mut out, &m.name, RESERVED);
        out.push_str(" {\n");
        for a in &m.activities {
            match a.sub_model() {
                None => {
                    out.push_str("    activity ");
                    write_name(&mut out, &a.name, RESERVED);
                }
                Some(sub) => {
                    out.push_str("    complex ");
                    write_name(&mut out, &a.name, RESERVED);
                    out.push_str(" = process ");
                    write_name(&mut out, sub, RESERVED);
                }
            }
            out.push('\n');
        }
        let mut constraints: Vec<&ConstraintInstance> = m.constraints.iter().collect();
        constraints.sort();
        for c in constraints {
            out.push_str("    constraint ");
            out.push_str(c.template.name());
            out.push('(');
            let mut args = Vec::new();
            if let Some(n) = c.cardinality {
                args.push(n.to_string());
            }
            for op in &c.operands {
                let mut s = String::new();
                write_name(&mut s, op, RESERVED);
                args.push(s);
            }
            out.push_str(&args.join(", "));
            out.push_str(")\n");
        }
        out.push_str("}\n");
    }
    out
}
