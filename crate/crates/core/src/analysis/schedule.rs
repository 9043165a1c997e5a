//! Schedule search on the execution engine: given a leaf trace, look for an
//! interleaving of complex starts and completions that the engine accepts.
//! Independent of the enumerator, so the two can cross-check each other.

use std::collections::HashSet;
use std::sync::Arc;

use crate::automata::StateId;
use crate::compiled::CompiledDocument;
use crate::engine::{ProcessInstance, ScopeId, ScopeInstance};
use crate::trace::{Trace, TraceAction, TraceStep};

#[derive(Clone, PartialEq, Eq, Hash)]
struct Shape {
    model: usize,
    states: Vec<StateId>,
    children: Vec<(String, Shape)>,
}

fn shape(scope: &ScopeInstance) -> Shape {
    Shape {
        model: scope.model,
        states: scope.constraint_states.clone(),
        children: scope.children.iter().map(|(l, c)| (l.clone(), shape(c))).collect(),
    }
}

struct Search<'a> {
    leaf: &'a [String],
    failed: HashSet<(Shape, usize, usize)>,
}

fn parent_of(scope: &ScopeInstance) -> Option<String> {
    scope.host.map(|h| h.0.to_string())
}

impl Search<'_> {
    fn run(
        &mut self,
        instance: &ProcessInstance,
        pos: usize,
        activations_left: usize,
        steps: &mut Vec<TraceStep>,
    ) -> bool {
        let key = (shape(instance.root()), pos, activations_left);
        if self.failed.contains(&key) {
            return false;
        }
        if pos == self.leaf.len() && instance.may_terminate(ScopeId(0)).is_ok_and(|t| t.allowed) {
            steps.push(TraceStep::new(TraceAction::Terminate));
            return true;
        }

        let scopes: Vec<&ScopeInstance> = instance.root().running_scopes();
        let mut candidates: Vec<(ProcessInstance, Vec<TraceStep>, usize, usize)> = Vec::new();

        if let Some(label) = self.leaf.get(pos) {
            for scope in &scopes {
                let mut next = instance.clone();
                let Ok(started) = next.start_activity(scope.id, label) else { continue };
                let id = started.activity_instance.expect("start carries an instance");
                if next.complete_activity(id).is_err() {
                    continue;
                }
                let name = id.0.to_string();
                let steps = vec![
                    TraceStep::new(TraceAction::Start {
                        label: label.clone(),
                        instance: name.clone(),
                        parent: parent_of(scope),
                    }),
                    TraceStep::new(TraceAction::Complete { label: label.clone(), instance: name }),
                ];
                candidates.push((next, steps, pos + 1, activations_left));
            }
        }
        for scope in &scopes {
            for (id, label) in &scope.running {
                if !scope.children.contains_key(label) {
                    continue;
                }
                let mut next = instance.clone();
                if next.complete_activity(*id).is_ok() {
                    let step = TraceStep::new(TraceAction::Complete { label: label.clone(), instance: id.0.to_string() });
                    candidates.push((next, vec![step], pos, activations_left));
                }
            }
        }
        if activations_left > 0 {
            for scope in &scopes {
                for activity in &instance.model_of(scope).activities {
                    if activity.sub_model.is_none() {
                        continue;
                    }
                    let mut next = instance.clone();
                    let Ok(started) = next.start_activity(scope.id, &activity.name) else { continue };
                    let id = started.activity_instance.expect("start carries an instance");
                    let step = TraceStep::new(TraceAction::Start {
                        label: activity.name.clone(),
                        instance: id.0.to_string(),
                        parent: parent_of(scope),
                    });
                    candidates.push((next, vec![step], pos, activations_left - 1));
                }
            }
        }

        for (next, new_steps, pos, activations_left) in candidates {
            let mark = steps.len();
            steps.extend(new_steps);
            if self.run(&next, pos, activations_left, steps) {
                return true;
            }
            steps.truncate(mark);
        }
        self.failed.insert(key);
        false
    }
}

/// Searches for a full-form trace whose leaf projection is `leaf`, using at
/// most `max_activations` complex starts, that the engine accepts through
/// termination.
pub fn find_schedule<S: AsRef<str>>(
    doc: &Arc<CompiledDocument>,
    leaf: &[S],
    max_activations: usize,
) -> Option<Trace> {
    let leaf: Vec<String> = leaf.iter().map(|s| s.as_ref().to_string()).collect();
    if leaf.iter().any(|l| doc.locate(l).is_none_or(|(m, sym)| doc.model(m).activities[sym].sub_model.is_some())) {
        return None;
    }
    let mut search = Search { leaf: &leaf, failed: HashSet::new() };
    let mut steps = Vec::new();
    let instance = ProcessInstance::instantiate(Arc::clone(doc));
    search.run(&instance, 0, max_activations, &mut steps).then_some(Trace { steps })
}
