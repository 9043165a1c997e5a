//! A validated document with every constraint compiled against its model's
//! alphabet. Shared read-only by the engine and the analyses.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::automata::{compile_constraint, CompileError, ConstraintAutomaton, StateId};
use crate::model::{alphabet, validate_model, Alphabet, Document, WellFormednessReport};

#[derive(Debug, Clone, Error)]
pub enum ModelError {
    #[error("document is not well-formed:\n{0}")]
    IllFormed(WellFormednessReport),
    #[error(transparent)]
    Compile(#[from] CompileError),
}

#[derive(Clone, Debug)]
pub struct CompiledActivity {
    pub name: String,
    /// Index of the referenced model for complex activities.
    pub sub_model: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct CompiledModel {
    pub name: String,
    pub alphabet: Alphabet,
    /// Same order as the alphabet.
    pub activities: Vec<CompiledActivity>,
    pub automata: Vec<ConstraintAutomaton>,
}

impl CompiledModel {
    pub fn initial_states(&self) -> Vec<StateId> {
        self.automata.iter().map(|a| a.initial()).collect()
    }

    /// Indices of constraints that `symbol` would drive into a dead state.
    pub fn blocking(&self, states: &[StateId], symbol: usize) -> Vec<usize> {
        self.automata
            .iter()
            .zip(states)
            .enumerate()
            .filter(|(_, (a, &s))| a.is_dead(a.step(s, symbol)))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn all_accepting(&self, states: &[StateId]) -> bool {
        self.automata.iter().zip(states).all(|(a, &s)| a.is_accepting(s))
    }

    pub fn step_all(&self, states: &mut [StateId], symbol: usize) {
        for (a, s) in self.automata.iter().zip(states.iter_mut()) {
            *s = a.step(*s, symbol);
        }
    }
}

pub struct CompiledDocument {
    document: Document,
    models: Vec<CompiledModel>,
    by_name: HashMap<String, usize>,
    root: usize,
}

impl fmt::Debug for CompiledDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CompiledDocument").field("root", &self.models[self.root].name).finish()
    }
}

impl CompiledDocument {
    pub fn new(document: Document) -> Result<Self, ModelError> {
        let report = validate_model(&document);
        if !report.is_well_formed() {
            return Err(ModelError::IllFormed(report));
        }
        let by_name: HashMap<String, usize> =
            document.models.iter().enumerate().map(|(i, m)| (m.name.clone(), i)).collect();
        let mut models = Vec::with_capacity(document.models.len());
        for m in &document.models {
            let alphabet = alphabet(m);
            let automata = m
                .constraints
                .iter()
                .map(|c| compile_constraint(c, &alphabet))
                .collect::<Result<Vec<_>, _>>()?;
            let activities = m
                .activities
                .iter()
                .map(|a| CompiledActivity {
                    name: a.name.clone(),
                    sub_model: a.sub_model().map(|s| by_name[s]),
                })
                .collect();
            models.push(CompiledModel { name: m.name.clone(), alphabet, activities, automata });
        }
        let root = document.models.iter().position(|m| m.root).expect("validated document has a root");
        Ok(CompiledDocument { document, models, by_name, root })
    }

    pub fn document(&self) -> &Document {
        &self.document
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn model(&self, index: usize) -> &CompiledModel {
        &self.models[index]
    }

    pub fn models(&self) -> &[CompiledModel] {
        &self.models
    }

    pub fn model_index(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    /// The model that declares `label`, with the label's symbol index.
    pub fn locate(&self, label: &str) -> Option<(usize, usize)> {
        self.models
            .iter()
            .enumerate()
            .find_map(|(m, model)| model.alphabet.index_of(label).map(|sym| (m, sym)))
    }
}
