//! Process-model data structures and well-formedness checks.
//!
//! A [`Document`] is a set of named [`ProcessModel`]s. Exactly one of them is
//! the root; the others are instantiated through complex activities. Every
//! constraint lives in one model and may only mention that model's own
//! activities, which is what makes a sub-process run in isolation from its
//! parent.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Constraint template catalogue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Template {
    Existence,
    Absence,
    Exactly,
    Init,
    RespondedExistence,
    Response,
    Precedence,
    Succession,
    ChainResponse,
    ChainPrecedence,
    NegResponse,
}

impl Template {
    pub const ALL: [Template; 11] = [
        Template::Existence,
        Template::Absence,
        Template::Exactly,
        Template::Init,
        Template::RespondedExistence,
        Template::Response,
        Template::Precedence,
        Template::Succession,
        Template::ChainResponse,
        Template::ChainPrecedence,
        Template::NegResponse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Template::Existence => "existence",
            Template::Absence => "absence",
            Template::Exactly => "exactly",
            Template::Init => "init",
            Template::RespondedExistence => "responded_existence",
            Template::Response => "response",
            Template::Precedence => "precedence",
            Template::Succession => "succession",
            Template::ChainResponse => "chain_response",
            Template::ChainPrecedence => "chain_precedence",
            Template::NegResponse => "neg_response",
        }
    }

    /// Number of activity operands the template takes.
    pub fn arity(self) -> usize {
        match self {
            Template::Existence | Template::Absence | Template::Exactly | Template::Init => 1,
            _ => 2,
        }
    }

    /// Whether the template carries a cardinality argument.
    pub fn is_counting(self) -> bool {
        matches!(self, Template::Existence | Template::Absence | Template::Exactly)
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown constraint template `{0}`")]
pub struct UnknownTemplate(pub String);

impl FromStr for Template {
    type Err = UnknownTemplate;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Template::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| UnknownTemplate(s.to_string()))
    }
}

/// A template applied to concrete activities of one model.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ConstraintInstance {
    pub template: Template,
    /// Only meaningful for counting templates.
    pub cardinality: Option<u32>,
    pub operands: Vec<String>,
}

impl ConstraintInstance {
    pub fn unary(template: Template, operand: impl Into<String>) -> Self {
        ConstraintInstance { template, cardinality: None, operands: vec![operand.into()] }
    }

    pub fn counting(template: Template, n: u32, operand: impl Into<String>) -> Self {
        ConstraintInstance { template, cardinality: Some(n), operands: vec![operand.into()] }
    }

    pub fn binary(template: Template, first: impl Into<String>, second: impl Into<String>) -> Self {
        ConstraintInstance {
            template,
            cardinality: None,
            operands: vec![first.into(), second.into()],
        }
    }

    /// Describes why the operand list does not fit the template, if it doesn't.
    pub fn arity_problem(&self) -> Option<String> {
        let t = self.template;
        if self.operands.len() != t.arity() {
            return Some(format!(
                "`{t}` takes {} activity operand(s), found {}",
                t.arity(),
                self.operands.len()
            ));
        }
        match (t.is_counting(), self.cardinality) {
            (true, None) => return Some(format!("`{t}` requires a cardinality")),
            (false, Some(_)) => return Some(format!("`{t}` does not take a cardinality")),
            _ => {}
        }
        if t.arity() == 2 && self.operands[0] == self.operands[1] {
            return Some(format!("`{t}` requires two distinct operands"));
        }
        None
    }

    pub fn mentions(&self, label: &str) -> bool {
        self.operands.iter().any(|o| o == label)
    }
}

impl fmt::Display for ConstraintInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.template)?;
        let mut first = true;
        if let Some(n) = self.cardinality {
            write!(f, "{n}")?;
            first = false;
        }
        for op in &self.operands {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            f.write_str(op)?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ActivityKind {
    Atomic,
    Complex { sub_model: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ActivityDecl {
    pub name: String,
    pub kind: ActivityKind,
}

impl ActivityDecl {
    pub fn atomic(name: impl Into<String>) -> Self {
        ActivityDecl { name: name.into(), kind: ActivityKind::Atomic }
    }

    pub fn complex(name: impl Into<String>, sub_model: impl Into<String>) -> Self {
        ActivityDecl {
            name: name.into(),
            kind: ActivityKind::Complex { sub_model: sub_model.into() },
        }
    }

    pub fn sub_model(&self) -> Option<&str> {
        match &self.kind {
            ActivityKind::Atomic => None,
            ActivityKind::Complex { sub_model } => Some(sub_model),
        }
    }

    pub fn is_complex(&self) -> bool {
        self.sub_model().is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessModel {
    pub name: String,
    pub activities: Vec<ActivityDecl>,
    pub constraints: Vec<ConstraintInstance>,
    pub root: bool,
}

impl ProcessModel {
    pub fn new(name: impl Into<String>) -> Self {
        ProcessModel { name: name.into(), activities: Vec::new(), constraints: Vec::new(), root: false }
    }

    pub fn activity(&self, label: &str) -> Option<&ActivityDecl> {
        self.activities.iter().find(|a| a.name == label)
    }

    pub fn activity_index(&self, label: &str) -> Option<usize> {
        self.activities.iter().position(|a| a.name == label)
    }
}

/// An ordered set of activity labels; the symbol set of a model's automata.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Alphabet {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl Alphabet {
    pub fn new<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut alphabet = Alphabet::default();
        for label in labels {
            let label = label.into();
            if !alphabet.index.contains_key(&label) {
                alphabet.index.insert(label.clone(), alphabet.labels.len());
                alphabet.labels.push(label);
            }
        }
        alphabet
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.index.contains_key(label)
    }

    pub fn label(&self, symbol: usize) -> &str {
        &self.labels[symbol]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn to_set(&self) -> BTreeSet<String> {
        self.labels.iter().cloned().collect()
    }
}

/// The labels a model's constraints observe: its own activities, not its
/// descendants'.
pub fn alphabet(model: &ProcessModel) -> Alphabet {
    Alphabet::new(model.activities.iter().map(|a| a.name.clone()))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub models: Vec<ProcessModel>,
}

impl Document {
    pub fn new(models: Vec<ProcessModel>) -> Self {
        Document { models }
    }

    pub fn model(&self, name: &str) -> Option<&ProcessModel> {
        self.models.iter().find(|m| m.name == name)
    }

    pub fn model_mut(&mut self, name: &str) -> Option<&mut ProcessModel> {
        self.models.iter_mut().find(|m| m.name == name)
    }

    /// The unique root model, if there is exactly one.
    pub fn root(&self) -> Option<&ProcessModel> {
        let mut roots = self.models.iter().filter(|m| m.root);
        match (roots.next(), roots.next()) {
            (Some(r), None) => Some(r),
            _ => None,
        }
    }

    /// Finds the model declaring `label`. Labels are document-unique in
    /// well-formed documents.
    pub fn owner_of(&self, label: &str) -> Option<&ProcessModel> {
        self.models.iter().find(|m| m.activity(label).is_some())
    }

    /// Models reachable from the root through complex activities, root first.
    pub fn reachable_models(&self) -> Vec<&ProcessModel> {
        let Some(root) = self.root() else { return Vec::new() };
        let mut seen = BTreeSet::new();
        let mut order = Vec::new();
        let mut stack = vec![root];
        while let Some(m) = stack.pop() {
            if !seen.insert(m.name.as_str()) {
                continue;
            }
            order.push(m);
            for a in m.activities.iter().rev() {
                if let Some(sub) = a.sub_model().and_then(|s| self.model(s)) {
                    stack.push(sub);
                }
            }
        }
        order
    }

    /// Atomic activity labels reachable from the root.
    pub fn leaf_alphabet(&self) -> BTreeSet<String> {
        self.reachable_models()
            .into_iter()
            .flat_map(|m| m.activities.iter())
            .filter(|a| !a.is_complex())
            .map(|a| a.name.clone())
            .collect()
    }

    /// Returns a copy with constraint lists sorted and deduplicated and models
    /// ordered root first, then by name. Activity order is preserved.
    pub fn canonicalized(&self) -> Document {
        let mut models = self.models.clone();
        for m in &mut models {
            m.constraints.sort();
            m.constraints.dedup();
        }
        models.sort_by(|a, b| b.root.cmp(&a.root).then_with(|| a.name.cmp(&b.name)));
        Document { models }
    }

    /// Equality up to the order of models, activities and constraints.
    pub fn structurally_eq(&self, other: &Document) -> bool {
        fn key(doc: &Document) -> BTreeMap<&str, (bool, BTreeSet<&ActivityDecl>, BTreeSet<&ConstraintInstance>)> {
            doc.models
                .iter()
                .map(|m| {
                    (
                        m.name.as_str(),
                        (m.root, m.activities.iter().collect(), m.constraints.iter().collect()),
                    )
                })
                .collect()
        }
        self.models.len() == other.models.len() && key(self) == key(other)
    }
}

impl PartialOrd for ActivityDecl {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ActivityDecl {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (&self.name, self.sub_model()).cmp(&(&other.name, other.sub_model()))
    }
}

/// Where in a document a violation was found.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "at", rename_all = "snake_case")]
pub enum Site {
    Document,
    Model { model: String },
    Activity { model: String, activity: String },
    Constraint { model: String, index: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Error)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    #[error("cyclic hierarchy: {}", cycle.join(" -> "))]
    CyclicHierarchy { cycle: Vec<String> },
    #[error("complex activity `{activity}` in `{model}` references missing process `{target}`")]
    DanglingReference { model: String, activity: String, target: String },
    #[error("process `{model}` is defined more than once")]
    DuplicateModel { model: String },
    #[error("activity `{activity}` is declared more than once in `{model}`")]
    DuplicateActivity { model: String, activity: String },
    #[error("activity label `{activity}` is declared in both `{first}` and `{model}`")]
    DuplicateLabel { activity: String, first: String, model: String },
    #[error("constraint #{index} in `{model}`: {detail}")]
    ArityMismatch { model: String, index: usize, detail: String },
    #[error("constraint #{index} in `{model}` mentions `{operand}`, which is not an activity of `{model}`")]
    NonLocalOperand { model: String, index: usize, operand: String },
    #[error("document has no root process")]
    NoRoot,
    #[error("document has several root processes: {}", roots.join(", "))]
    MultipleRoots { roots: Vec<String> },
}

impl Violation {
    pub fn site(&self) -> Site {
        match self {
            Violation::CyclicHierarchy { cycle } => Site::Model { model: cycle[0].clone() },
            Violation::DanglingReference { model, activity, .. }
            | Violation::DuplicateActivity { model, activity }
            | Violation::DuplicateLabel { model, activity, .. } => {
                Site::Activity { model: model.clone(), activity: activity.clone() }
            }
            Violation::DuplicateModel { model } => Site::Model { model: model.clone() },
            Violation::ArityMismatch { model, index, .. } | Violation::NonLocalOperand { model, index, .. } => {
                Site::Constraint { model: model.clone(), index: *index }
            }
            Violation::NoRoot => Site::Document,
            Violation::MultipleRoots { roots } => Site::Model { model: roots[1].clone() },
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct WellFormednessReport {
    pub violations: Vec<Violation>,
}

impl WellFormednessReport {
    pub fn is_well_formed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for WellFormednessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("well-formed");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks a document. Violations are reported as data; an empty report
/// means the document is well-formed.
pub fn validate_model(doc: &Document) -> WellFormednessReport {
    let mut violations = Vec::new();

    let roots: Vec<String> = doc.models.iter().filter(|m| m.root).map(|m| m.name.clone()).collect();
    match roots.len() {
        0 => violations.push(Violation::NoRoot),
        1 => {}
        _ => violations.push(Violation::MultipleRoots { roots }),
    }

    let mut model_names = BTreeSet::new();
    for m in &doc.models {
        if !model_names.insert(m.name.as_str()) {
            violations.push(Violation::DuplicateModel { model: m.name.clone() });
        }
    }

    let mut label_owner: HashMap<&str, &str> = HashMap::new();
    for m in &doc.models {
        let mut local = BTreeSet::new();
        for a in &m.activities {
            if !local.insert(a.name.as_str()) {
                violations.push(Violation::DuplicateActivity {
                    model: m.name.clone(),
                    activity: a.name.clone(),
                });
                continue;
            }
            match label_owner.get(a.name.as_str()) {
                Some(first) if *first != m.name => violations.push(Violation::DuplicateLabel {
                    activity: a.name.clone(),
                    first: first.to_string(),
                    model: m.name.clone(),
                }),
                Some(_) => {}
                None => {
                    label_owner.insert(&a.name, &m.name);
                }
            }
            if let Some(target) = a.sub_model() {
                if doc.model(target).is_none() {
                    violations.push(Violation::DanglingReference {
                        model: m.name.clone(),
                        activity: a.name.clone(),
                        target: target.to_string(),
                    });
                }
            }
        }
        for (index, c) in m.constraints.iter().enumerate() {
            if let Some(detail) = c.arity_problem() {
                violations.push(Violation::ArityMismatch { model: m.name.clone(), index, detail });
            }
            for op in &c.operands {
                if m.activity(op).is_none() {
                    violations.push(Violation::NonLocalOperand {
                        model: m.name.clone(),
                        index,
                        operand: op.clone(),
                    });
                }
            }
        }
    }

    violations.extend(find_cycles(doc));
    WellFormednessReport { violations }
}

/// Reports each elementary cycle of the model reference graph once, starting
/// from its smallest model name.
fn find_cycles(doc: &Document) -> Vec<Violation> {
    let mut edges: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for m in &doc.models {
        let targets = edges.entry(m.name.as_str()).or_default();
        for a in &m.activities {
            if let Some(t) = a.sub_model() {
                if doc.model(t).is_some() {
                    targets.insert(t);
                }
            }
        }
    }

    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Unvisited,
        OnStack,
        Done,
    }
    let mut marks: BTreeMap<&str, Mark> = edges.keys().map(|k| (*k, Mark::Unvisited)).collect();
    let mut found: BTreeSet<Vec<String>> = BTreeSet::new();

    fn visit<'a>(
        node: &'a str,
        edges: &BTreeMap<&'a str, BTreeSet<&'a str>>,
        marks: &mut BTreeMap<&'a str, Mark>,
        path: &mut Vec<&'a str>,
        found: &mut BTreeSet<Vec<String>>,
    ) {
        marks.insert(node, Mark::OnStack);
        path.push(node);
        for &next in &edges[node] {
            match marks[next] {
                Mark::OnStack => {
                    let start = path.iter().position(|n| *n == next).unwrap();
                    let mut cycle: Vec<String> = path[start..].iter().map(|s| s.to_string()).collect();
                    let min = (0..cycle.len()).min_by_key(|&i| &cycle[i]).unwrap();
                    cycle.rotate_left(min);
                    let first = cycle[0].clone();
                    cycle.push(first);
                    found.insert(cycle);
                }
                Mark::Unvisited => visit(next, edges, marks, path, found),
                Mark::Done => {}
            }
        }
        path.pop();
        marks.insert(node, Mark::Done);
    }

    let nodes: Vec<&str> = edges.keys().copied().collect();
    for n in nodes {
        if marks[n] == Mark::Unvisited {
            visit(n, &edges, &mut marks, &mut Vec::new(), &mut found);
        }
    }
    found.into_iter().map(|cycle| Violation::CyclicHierarchy { cycle }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2() -> Document {
        let mut root = ProcessModel::new("Fig2");
        root.root = true;
        root.activities = vec![ActivityDecl::atomic("A"), ActivityDecl::complex("B", "BSub")];
        let mut sub = ProcessModel::new("BSub");
        sub.activities = vec![ActivityDecl::atomic("C"), ActivityDecl::atomic("D")];
        sub.constraints = vec![ConstraintInstance::binary(Template::Precedence, "C", "D")];
        Document::new(vec![root, sub])
    }

    #[test]
    fn fig2_is_well_formed() {
        let report = validate_model(&fig2());
        assert!(report.is_well_formed(), "{report}");
    }

    #[test]
    fn self_reference_is_a_cycle() {
        let mut doc = fig2();
        doc.models[1].activities.push(ActivityDecl::complex("Again", "BSub"));
        let report = validate_model(&doc);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::CyclicHierarchy { cycle } if cycle == &["BSub", "BSub"])));
    }

    #[test]
    fn longer_cycles_reported_once() {
        let mut a = ProcessModel::new("A");
        a.root = true;
        a.activities = vec![ActivityDecl::complex("x", "B")];
        let mut b = ProcessModel::new("B");
        b.activities = vec![ActivityDecl::complex("y", "C")];
        let mut c = ProcessModel::new("C");
        c.activities = vec![ActivityDecl::complex("z", "B")];
        let report = validate_model(&Document::new(vec![a, b, c]));
        let cycles: Vec<_> = report
            .violations
            .iter()
            .filter_map(|v| match v {
                Violation::CyclicHierarchy { cycle } => Some(cycle.clone()),
                _ => None,
            })
            .collect();
        assert_eq!(cycles, vec![vec!["B", "C", "B"]]);
    }

    #[test]
    fn constraint_in_parent_on_child_activity_is_non_local() {
        let mut doc = fig2();
        doc.models[0].activities.push(ActivityDecl::atomic("E"));
        doc.models[0].constraints.push(ConstraintInstance::binary(Template::Precedence, "C", "E"));
        let report = validate_model(&doc);
        assert_eq!(
            report.violations,
            vec![Violation::NonLocalOperand { model: "Fig2".into(), index: 0, operand: "C".into() }]
        );
    }

    #[test]
    fn dangling_reference_and_roots() {
        let mut doc = fig2();
        doc.models[0].activities[1] = ActivityDecl::complex("B", "Missing");
        doc.models[0].root = false;
        let report = validate_model(&doc);
        assert!(report.violations.contains(&Violation::NoRoot));
        assert!(report.violations.contains(&Violation::DanglingReference {
            model: "Fig2".into(),
            activity: "B".into(),
            target: "Missing".into()
        }));

        let mut doc = fig2();
        doc.models[1].root = true;
        assert!(matches!(
            validate_model(&doc).violations.as_slice(),
            [Violation::MultipleRoots { .. }]
        ));
    }

    #[test]
    fn duplicates_and_arity() {
        let mut doc = fig2();
        doc.models[1].activities.push(ActivityDecl::atomic("A"));
        doc.models[1].activities.push(ActivityDecl::atomic("C"));
        doc.models[1].constraints.push(ConstraintInstance::unary(Template::Existence, "C"));
        doc.models[1].constraints.push(ConstraintInstance::binary(Template::Response, "C", "C"));
        doc.models.push(ProcessModel::new("BSub"));
        let v = validate_model(&doc).violations;
        assert!(v.iter().any(|v| matches!(v, Violation::DuplicateLabel { activity, .. } if activity == "A")));
        assert!(v.iter().any(|v| matches!(v, Violation::DuplicateActivity { activity, .. } if activity == "C")));
        assert!(v.iter().any(|v| matches!(v, Violation::DuplicateModel { .. })));
        assert_eq!(v.iter().filter(|v| matches!(v, Violation::ArityMismatch { .. })).count(), 2);
    }

    #[test]
    fn validation_is_pure() {
        let mut doc = fig2();
        doc.models[0].constraints.push(ConstraintInstance::binary(Template::Precedence, "C", "A"));
        assert_eq!(validate_model(&doc), validate_model(&doc));
    }

    #[test]
    fn alphabets_are_local() {
        let doc = fig2();
        assert_eq!(alphabet(&doc.models[0]).labels(), ["A", "B"]);
        assert_eq!(alphabet(&doc.models[1]).labels(), ["C", "D"]);
        assert!(alphabet(&ProcessModel::new("empty")).is_empty());
        assert_eq!(doc.leaf_alphabet().into_iter().collect::<Vec<_>>(), ["A", "C", "D"]);
    }

    #[test]
    fn template_names_round_trip() {
        for t in Template::ALL {
            assert_eq!(t.name().parse::<Template>().unwrap(), t);
        }
        assert!("eventually".parse::<Template>().is_err());
    }
}
