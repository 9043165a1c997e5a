use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use serde::Serialize;

use super::{AnalysisError, Bounds};
use crate::automata::StateId;
use crate::compiled::CompiledDocument;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundedLanguage {
    pub max_leaf_len: usize,
    pub max_activations: usize,
    pub traces: BTreeSet<Vec<String>>,
    /// Distinct configurations visited.
    pub explored: usize,
}

impl BoundedLanguage {
    pub fn contains<S: AsRef<str>>(&self, trace: &[S]) -> bool {
        let trace: Vec<String> = trace.iter().map(|s| s.as_ref().to_string()).collect();
        self.traces.contains(&trace)
    }

    /// Members of exactly the given leaf length.
    pub fn of_len(&self, len: usize) -> impl Iterator<Item = &Vec<String>> {
        self.traces.iter().filter(move |t| t.len() == len)
    }
}

/// One running scope: its model, automaton states and running sub-scopes
/// keyed by the complex activity's symbol. Atomic executions are merged, so
/// no atomic activity is ever running.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Frame {
    model: usize,
    states: Vec<StateId>,
    children: Vec<(usize, Frame)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Config {
    root: Frame,
    leaf_left: usize,
    activations_left: usize,
}

enum Move {
    Leaf(u32),
    Structural,
}

/// Leaf traces over sorted leaf symbols, so vector order is label order.
type Language = Rc<BTreeSet<Vec<u32>>>;

struct Enumerator<'a> {
    doc: &'a CompiledDocument,
    /// (model, symbol) -> leaf symbol for atomic activities.
    leaf_symbol: HashMap<(usize, usize), u32>,
    memo: HashMap<Config, Language>,
    /// Configurations entered, including those still being explored.
    visited: usize,
    limit: usize,
}

impl<'a> Enumerator<'a> {
    fn new(doc: &'a CompiledDocument, limit: usize) -> (Self, Vec<String>) {
        let mut labels: Vec<String> = doc
            .models()
            .iter()
            .flat_map(|m| m.activities.iter().filter(|a| a.sub_model.is_none()).map(|a| a.name.clone()))
            .collect();
        labels.sort();
        let mut leaf_symbol = HashMap::new();
        for (m, model) in doc.models().iter().enumerate() {
            for (sym, a) in model.activities.iter().enumerate() {
                if a.sub_model.is_none() {
                    let leaf = labels.binary_search(&a.name).expect("collected above") as u32;
                    leaf_symbol.insert((m, sym), leaf);
                }
            }
        }
        (Enumerator { doc, leaf_symbol, memo: HashMap::new(), visited: 0, limit }, labels)
    }

    fn fresh_frame(&self, model: usize) -> Frame {
        Frame { model, states: self.doc.model(model).initial_states(), children: Vec::new() }
    }

    fn may_terminate(&self, frame: &Frame) -> bool {
        frame.children.is_empty() && self.doc.model(frame.model).all_accepting(&frame.states)
    }

    /// Every frame reachable from `frame` by one move inside its subtree.
    fn successors(&self, frame: &Frame, leaf_left: usize, activations_left: usize) -> Vec<(Frame, Move, bool)> {
        let model = self.doc.model(frame.model);
        let mut out = Vec::new();
        for (sym, activity) in model.activities.iter().enumerate() {
            let running = frame.children.iter().position(|(s, _)| *s == sym);
            let blocked = !model.blocking(&frame.states, sym).is_empty();
            match (activity.sub_model, running) {
                (None, _) => {
                    if leaf_left > 0 && !blocked {
                        let mut next = frame.clone();
                        model.step_all(&mut next.states, sym);
                        out.push((next, Move::Leaf(self.leaf_symbol[&(frame.model, sym)]), false));
                    }
                }
                (Some(sub), None) => {
                    if activations_left > 0 && !blocked {
                        let mut next = frame.clone();
                        let at = next.children.partition_point(|(s, _)| *s < sym);
                        next.children.insert(at, (sym, self.fresh_frame(sub)));
                        out.push((next, Move::Structural, true));
                    }
                }
                (Some(_), Some(i)) => {
                    if !blocked && self.may_terminate(&frame.children[i].1) {
                        let mut next = frame.clone();
                        next.children.remove(i);
                        model.step_all(&mut next.states, sym);
                        out.push((next, Move::Structural, false));
                    }
                }
            }
        }
        for (i, (_, child)) in frame.children.iter().enumerate() {
            for (child_next, mv, activation) in self.successors(child, leaf_left, activations_left) {
                let mut next = frame.clone();
                next.children[i].1 = child_next;
                out.push((next, mv, activation));
            }
        }
        out
    }

    /// Leaf traces of accepted runs continuing from `config`. Every move
    /// decreases (leaf budget, activation budget + running children), so the
    /// recursion is well-founded.
    fn language(&mut self, config: &Config) -> Result<Language, AnalysisError> {
        if let Some(lang) = self.memo.get(config) {
            return Ok(Rc::clone(lang));
        }
        if self.visited >= self.limit {
            return Err(AnalysisError::BoundExceeded { explored: self.visited, limit: self.limit });
        }
        self.visited += 1;
        let mut traces = BTreeSet::new();
        if self.may_terminate(&config.root) {
            traces.insert(Vec::new());
        }
        for (root, mv, activation) in self.successors(&config.root, config.leaf_left, config.activations_left) {
            let next = Config {
                root,
                leaf_left: config.leaf_left - matches!(mv, Move::Leaf(_)) as usize,
                activations_left: config.activations_left - activation as usize,
            };
            let suffixes = self.language(&next)?;
            match mv {
                Move::Leaf(sym) => traces.extend(suffixes.iter().map(|s| {
                    let mut t = Vec::with_capacity(s.len() + 1);
                    t.push(sym);
                    t.extend_from_slice(s);
                    t
                })),
                Move::Structural => traces.extend(suffixes.iter().cloned()),
            }
        }
        let lang = Rc::new(traces);
        self.memo.insert(config.clone(), Rc::clone(&lang));
        Ok(lang)
    }
}

/// Exhaustively explores all schedules (merged atomic executions, complex
/// starts and completions, termination) within the bounds and collects the
/// leaf projections of the runs that terminate.
pub fn enumerate_language(doc: &CompiledDocument, bounds: &Bounds) -> Result<BoundedLanguage, AnalysisError> {
    let (mut enumerator, labels) = Enumerator::new(doc, bounds.max_states);
    let start = Config {
        root: enumerator.fresh_frame(doc.root()),
        leaf_left: bounds.max_leaf_len,
        activations_left: bounds.max_activations,
    };
    let lang = enumerator.language(&start)?;
    let traces = lang
        .iter()
        .map(|t| t.iter().map(|&s| labels[s as usize].clone()).collect())
        .collect();
    Ok(BoundedLanguage {
        max_leaf_len: bounds.max_leaf_len,
        max_activations: bounds.max_activations,
        traces,
        explored: enumerator.visited,
    })
}
