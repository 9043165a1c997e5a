//! Constraint templates compiled to deterministic finite acceptors.
//!
//! An automaton reads the completion labels of one model's activities. Its
//! accepting states are the ones in which the process may terminate, and its
//! dead states are the ones from which no accepting state can be reached
//! any more. Entering a dead state is a permanent violation.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Alphabet, ConstraintInstance, Template, UnknownTemplate};

pub type StateId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error(transparent)]
    UnknownTemplate(#[from] UnknownTemplate),
    #[error("malformed constraint {constraint}: {detail}")]
    Arity { constraint: String, detail: String },
    #[error("constraint {constraint} mentions `{operand}`, which is not in the alphabet")]
    OperandNotInAlphabet { constraint: String, operand: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("label `{0}` is not in the constraint's alphabet")]
pub struct UnknownLabel(pub String);

/// Three-valued verdict for a (partial) completion sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// Satisfied if the run ended here.
    Accepting,
    /// Not satisfied yet, but some continuation satisfies it.
    Pending,
    /// No continuation can satisfy it.
    Violated,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Accepting => "accepting",
            Status::Pending => "pending",
            Status::Violated => "violated",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TemplateClassification {
    pub execution_restricting: bool,
    pub termination_restricting: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintAutomaton {
    constraint: ConstraintInstance,
    alphabet: Alphabet,
    initial: StateId,
    /// Row-major transition table, `state * |alphabet| + symbol`.
    delta: Vec<StateId>,
    accepting: Vec<bool>,
    dead: Vec<bool>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Role {
    First,
    Second,
    Other,
}

/// Unminimised template machine over operand roles. State 0 is initial.
fn template_step(template: Template, n: u32, s: u32, role: Role) -> u32 {
    use Role::*;
    match template {
        Template::Existence => match role {
            First => (s + 1).min(n),
            _ => s,
        },
        Template::Absence | Template::Exactly => match role {
            First => (s + 1).min(n + 1),
            _ => s,
        },
        // 0 = nothing yet, 1 = started with the operand, 2 = started otherwise
        Template::Init => match (s, role) {
            (0, First) => 1,
            (0, _) => 2,
            _ => s,
        },
        // 0 = no first operand yet, 1 = first seen without second, 2 = second seen
        Template::RespondedExistence => match (s, role) {
            (_, Second) | (2, _) => 2,
            (_, First) => 1,
            _ => s,
        },
        // 1 = an occurrence of the first operand still awaits a response
        Template::Response => match role {
            First => 1,
            Second => 0,
            Other => s,
        },
        // 0 = no first operand yet, 1 = seen, 2 = violated
        Template::Precedence => match (s, role) {
            (2, _) => 2,
            (0, Second) => 2,
            (_, First) => 1,
            _ => s,
        },
        Template::Succession => {
            let response = template_step(Template::Response, n, s % 2, role);
            let precedence = template_step(Template::Precedence, n, s / 2, role);
            precedence * 2 + response
        }
        // 1 = the next completion must be the second operand, 2 = violated
        Template::ChainResponse => match (s, role) {
            (2, _) => 2,
            (1, Second) => 0,
            (1, _) => 2,
            (_, First) => 1,
            _ => s,
        },
        // 1 = previous completion was the first operand, 2 = violated
        Template::ChainPrecedence => match (s, role) {
            (2, _) => 2,
            (_, First) => 1,
            (1, Second) => 0,
            (_, Second) => 2,
            (_, Other) => 0,
        },
        // 1 = first operand seen, 2 = violated
        Template::NegResponse => match (s, role) {
            (2, _) => 2,
            (1, Second) => 2,
            (_, First) => 1,
            _ => s,
        },
    }
}

fn template_accepts(template: Template, n: u32, s: u32) -> bool {
    match template {
        Template::Existence => s >= n,
        Template::Absence => s <= n,
        Template::Exactly => s == n,
        // the empty run is accepted; only a wrong first completion violates
        Template::Init => s != 2,
        Template::RespondedExistence => s != 1,
        Template::Response => s == 0,
        Template::Precedence | Template::ChainPrecedence | Template::NegResponse => s != 2,
        Template::Succession => s.is_multiple_of(2) && s / 2 != 2,
        Template::ChainResponse => s == 0,
    }
}

/// Compiles `c` to a total deterministic automaton over `alphabet`. Only
/// states reachable from the initial state are kept.
pub fn compile_constraint(
    c: &ConstraintInstance,
    alphabet: &Alphabet,
) -> Result<ConstraintAutomaton, CompileError> {
    if let Some(detail) = c.arity_problem() {
        return Err(CompileError::Arity { constraint: c.to_string(), detail });
    }
    let mut operand_symbols = Vec::with_capacity(2);
    for op in &c.operands {
        let sym = alphabet.index_of(op).ok_or_else(|| CompileError::OperandNotInAlphabet {
            constraint: c.to_string(),
            operand: op.clone(),
        })?;
        operand_symbols.push(sym);
    }
    let roles: Vec<Role> = (0..alphabet.len())
        .map(|sym| {
            if operand_symbols.first() == Some(&sym) {
                Role::First
            } else if operand_symbols.get(1) == Some(&sym) {
                Role::Second
            } else {
                Role::Other
            }
        })
        .collect();

    let template = c.template;
    let n = c.cardinality.unwrap_or(0);
    let width = alphabet.len();

    let mut ids: HashMap<u32, StateId> = HashMap::from([(0, 0)]);
    let mut raw_states = vec![0u32];
    let mut queue = VecDeque::from([0u32]);
    let mut delta = Vec::new();
    while let Some(raw) = queue.pop_front() {
        for &role in &roles {
            let next = template_step(template, n, raw, role);
            let id = *ids.entry(next).or_insert_with(|| {
                raw_states.push(next);
                queue.push_back(next);
                (raw_states.len() - 1) as StateId
            });
            delta.push(id);
        }
    }
    debug_assert_eq!(delta.len(), raw_states.len() * width);
    let accepting: Vec<bool> = raw_states.iter().map(|&s| template_accepts(template, n, s)).collect();
    let dead = dead_states(&delta, &accepting, width);

    Ok(ConstraintAutomaton {
        constraint: c.clone(),
        alphabet: alphabet.clone(),
        initial: 0,
        delta,
        accepting,
        dead,
    })
}

/// States from which no accepting state is reachable.
fn dead_states(delta: &[StateId], accepting: &[bool], width: usize) -> Vec<bool> {
    let count = accepting.len();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); count];
    for s in 0..count {
        for sym in 0..width {
            preds[delta[s * width + sym] as usize].push(s);
        }
    }
    let mut live = accepting.to_vec();
    let mut queue: VecDeque<usize> = (0..count).filter(|&s| accepting[s]).collect();
    while let Some(s) = queue.pop_front() {
        for &p in &preds[s] {
            if !live[p] {
                live[p] = true;
                queue.push_back(p);
            }
        }
    }
    live.into_iter().map(|l| !l).collect()
}

impl ConstraintAutomaton {
    pub fn constraint(&self) -> &ConstraintInstance {
        &self.constraint
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.accepting.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    /// Transition on an alphabet symbol index.
    pub fn step(&self, state: StateId, symbol: usize) -> StateId {
        self.delta[state as usize * self.alphabet.len() + symbol]
    }

    pub fn step_label(&self, state: StateId, label: &str) -> Result<StateId, UnknownLabel> {
        let sym = self.alphabet.index_of(label).ok_or_else(|| UnknownLabel(label.to_string()))?;
        Ok(self.step(state, sym))
    }

    pub fn is_accepting(&self, state: StateId) -> bool {
        self.accepting[state as usize]
    }

    pub fn is_dead(&self, state: StateId) -> bool {
        self.dead[state as usize]
    }

    pub fn status(&self, state: StateId) -> Status {
        if self.is_accepting(state) {
            Status::Accepting
        } else if self.is_dead(state) {
            Status::Violated
        } else {
            Status::Pending
        }
    }

    pub fn run<S: AsRef<str>>(&self, trace: &[S]) -> Result<StateId, UnknownLabel> {
        trace.iter().try_fold(self.initial, |s, label| self.step_label(s, label.as_ref()))
    }

    pub fn evaluate<S: AsRef<str>>(&self, trace: &[S]) -> Result<Status, UnknownLabel> {
        self.run(trace).map(|s| self.status(s))
    }

    /// Derives the execution/termination classification from the
    /// automaton's shape alone.
    pub fn classify(&self) -> TemplateClassification {
        let width = self.alphabet.len();
        let mut execution_restricting = false;
        let mut termination_restricting = false;
        for s in 0..self.state_count() {
            if self.dead[s] {
                continue;
            }
            if !self.accepting[s] {
                termination_restricting = true;
            }
            if (0..width).any(|sym| self.dead[self.delta[s * width + sym] as usize]) {
                execution_restricting = true;
            }
        }
        TemplateClassification { execution_restricting, termination_restricting }
    }
}

pub fn classify_template(automaton: &ConstraintAutomaton) -> TemplateClassification {
    automaton.classify()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvaluateError {
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    UnknownLabel(#[from] UnknownLabel),
}

/// Evaluates one constraint over a completion sequence drawn from `alphabet`.
pub fn evaluate_trace<S: AsRef<str>>(
    c: &ConstraintInstance,
    alphabet: &Alphabet,
    trace: &[S],
) -> Result<Status, EvaluateError> {
    Ok(compile_constraint(c, alphabet)?.evaluate(trace)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Template::*;

    fn abc() -> Alphabet {
        Alphabet::new(["A", "B", "C", "E"])
    }

    #[test]
    fn existence_on_fig1_trace() {
        let c = ConstraintInstance::counting(Existence, 1, "A");
        let a = compile_constraint(&c, &abc()).unwrap();
        assert_eq!(a.evaluate(&["B"]).unwrap(), Status::Pending);
        assert_eq!(a.evaluate(&["B", "A"]).unwrap(), Status::Accepting);
        assert_eq!(a.evaluate(&["B", "A", "C", "E"]).unwrap(), Status::Accepting);
    }

    #[test]
    fn precedence_violated_by_early_target() {
        let c = ConstraintInstance::binary(Precedence, "C", "E");
        assert_eq!(evaluate_trace(&c, &abc(), &["E"]).unwrap(), Status::Violated);
        assert_eq!(evaluate_trace(&c, &abc(), &["C", "E"]).unwrap(), Status::Accepting);
    }

    #[test]
    fn zero_cardinality_existence_accepts_empty() {
        let c = ConstraintInstance::counting(Existence, 0, "A");
        assert_eq!(evaluate_trace::<&str>(&c, &abc(), &[]).unwrap(), Status::Accepting);
    }

    #[test]
    fn neg_response_violation() {
        let alphabet = Alphabet::new(["G", "R"]);
        let c = ConstraintInstance::binary(NegResponse, "G", "R");
        assert_eq!(evaluate_trace(&c, &alphabet, &["G", "R"]).unwrap(), Status::Violated);
        assert_eq!(evaluate_trace(&c, &alphabet, &["R", "G"]).unwrap(), Status::Accepting);
    }

    #[test]
    fn unknown_label_and_bad_operands() {
        let c = ConstraintInstance::counting(Existence, 1, "A");
        assert_eq!(
            evaluate_trace(&c, &abc(), &["Z"]),
            Err(EvaluateError::UnknownLabel(UnknownLabel("Z".into())))
        );
        let c = ConstraintInstance::binary(Response, "A", "Q");
        assert!(matches!(compile_constraint(&c, &abc()), Err(CompileError::OperandNotInAlphabet { .. })));
        let c = ConstraintInstance::unary(Existence, "A");
        assert!(matches!(compile_constraint(&c, &abc()), Err(CompileError::Arity { .. })));
    }

    #[test]
    fn counters_saturate() {
        let c = ConstraintInstance::counting(Absence, 2, "A");
        let a = compile_constraint(&c, &abc()).unwrap();
        assert_eq!(a.state_count(), 4);
        let c = ConstraintInstance::counting(Existence, 3, "A");
        assert_eq!(compile_constraint(&c, &abc()).unwrap().state_count(), 4);
    }

    #[test]
    fn no_unreachable_states_on_small_alphabets() {
        // with no "other" symbol, chain_precedence never needs the reset branch
        let alphabet = Alphabet::new(["C", "D"]);
        let c = ConstraintInstance::binary(ChainPrecedence, "C", "D");
        let a = compile_constraint(&c, &alphabet).unwrap();
        assert_eq!(a.state_count(), 3);
        let mut seen = vec![false; a.state_count()];
        let mut stack = vec![a.initial()];
        while let Some(s) = stack.pop() {
            if !std::mem::replace(&mut seen[s as usize], true) {
                stack.extend((0..alphabet.len()).map(|sym| a.step(s, sym)));
            }
        }
        assert!(seen.into_iter().all(|s| s));
    }

    #[test]
    fn classification_examples() {
        let alphabet = abc();
        let class = |c: ConstraintInstance| compile_constraint(&c, &alphabet).unwrap().classify();
        let both = |e, t| TemplateClassification { execution_restricting: e, termination_restricting: t };
        assert_eq!(class(ConstraintInstance::counting(Existence, 1, "A")), both(false, true));
        assert_eq!(class(ConstraintInstance::binary(Precedence, "C", "E")), both(true, false));
        assert_eq!(class(ConstraintInstance::binary(Succession, "A", "B")), both(true, true));
    }
}
