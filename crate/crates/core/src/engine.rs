//! Execution of process instances.
//!
//! An instance is a tree of scopes. The root scope runs the root model; each
//! running complex activity owns one child scope running its sub-model. A
//! scope's automata only ever see completions of that scope's own
//! activities, so a sub-process cannot influence its parent except through
//! the life-cycle of the complex activity that hosts it.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::{StateId, Status};
use crate::compiled::{CompiledDocument, CompiledModel};
use crate::model::ConstraintInstance;
use crate::trace::{Trace, TraceAction, TraceStep};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScopeId(pub u64);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActivityInstanceId(pub u64);

impl fmt::Display for ScopeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

impl fmt::Display for ActivityInstanceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScopeStatus {
    Running,
    Completed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScopeInstance {
    pub id: ScopeId,
    /// Index into the compiled document's models.
    pub model: usize,
    pub status: ScopeStatus,
    /// The complex activity instance this scope runs for; `None` for the root.
    pub host: Option<ActivityInstanceId>,
    pub constraint_states: Vec<StateId>,
    pub running: BTreeMap<ActivityInstanceId, String>,
    /// Keyed by complex activity label; present while that activity runs.
    pub children: BTreeMap<String, ScopeInstance>,
    /// Finished sub-process instances, kept for audit only.
    pub completed_children: Vec<(String, ScopeInstance)>,
    pub completions: Vec<String>,
}

impl ScopeInstance {
    fn new(id: ScopeId, model: usize, host: Option<ActivityInstanceId>, compiled: &CompiledModel) -> Self {
        ScopeInstance {
            id,
            model,
            status: ScopeStatus::Running,
            host,
            constraint_states: compiled.initial_states(),
            running: BTreeMap::new(),
            children: BTreeMap::new(),
            completed_children: Vec::new(),
            completions: Vec::new(),
        }
    }

    fn find(&self, id: ScopeId) -> Option<&ScopeInstance> {
        if self.id == id {
            return Some(self);
        }
        self.children.values().find_map(|c| c.find(id))
    }

    fn find_mut(&mut self, id: ScopeId) -> Option<&mut ScopeInstance> {
        if self.id == id {
            return Some(self);
        }
        self.children.values_mut().find_map(|c| c.find_mut(id))
    }

    fn find_completed(&self, id: ScopeId) -> bool {
        self.completed_children.iter().any(|(_, c)| c.id == id || c.find_completed(id))
            || self.children.values().any(|c| c.find_completed(id))
    }

    fn owner_of_mut(&mut self, instance: ActivityInstanceId) -> Option<&mut ScopeInstance> {
        if self.running.contains_key(&instance) {
            return Some(self);
        }
        self.children.values_mut().find_map(|c| c.owner_of_mut(instance))
    }

    fn owner_of(&self, instance: ActivityInstanceId) -> Option<&ScopeInstance> {
        if self.running.contains_key(&instance) {
            return Some(self);
        }
        self.children.values().find_map(|c| c.owner_of(instance))
    }

    /// Running scopes in pre-order.
    pub fn running_scopes(&self) -> Vec<&ScopeInstance> {
        let mut out = vec![self];
        for c in self.children.values() {
            out.extend(c.running_scopes());
        }
        out
    }

    /// The child scope hosted by the given complex activity instance.
    pub fn child_of_instance(&self, instance: ActivityInstanceId) -> Option<&ScopeInstance> {
        let owner = self.owner_of(instance)?;
        owner.children.get(&owner.running[&instance])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Started,
    Completed,
    Terminated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub seq: u64,
    pub kind: EventKind,
    pub scope: ScopeId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub activity: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub activity_instance: Option<ActivityInstanceId>,
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            EventKind::Terminated => write!(f, "e{}: terminated", self.seq),
            kind => write!(
                f,
                "e{}: {} {} {} in {}",
                self.seq,
                self.activity.as_deref().unwrap_or("?"),
                if kind == EventKind::Started { "started" } else { "completed" },
                self.activity_instance.map(|i| i.to_string()).unwrap_or_default(),
                self.scope
            ),
        }
    }
}

/// Something that prevents an activity from completing or a scope from
/// terminating.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Blocker {
    Constraint { constraint: ConstraintInstance },
    Running { activity: String, instance: ActivityInstanceId },
}

impl fmt::Display for Blocker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Blocker::Constraint { constraint } => write!(f, "{constraint}"),
            Blocker::Running { activity, instance } => write!(f, "{activity} {instance} is running"),
        }
    }
}

fn list<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(", ")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Error)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum EngineError {
    #[error("process instance is already terminated")]
    Terminated,
    #[error("scope {scope} is not running")]
    UnknownScope { scope: ScopeId },
    #[error("scope {scope} has no activity `{label}`")]
    UnknownActivity { scope: ScopeId, label: String },
    #[error("no running activity instance {instance}")]
    UnknownActivityInstance { instance: ActivityInstanceId },
    #[error("complex activity `{label}` already has a running instance")]
    ComplexAlreadyRunning { label: String },
    #[error("`{label}` is not enabled; blocked by {}", list(blockers))]
    NotEnabled { label: String, blockers: Vec<ConstraintInstance> },
    #[error("completing `{label}` would violate {}", list(blockers))]
    CompletionViolates { label: String, blockers: Vec<ConstraintInstance> },
    #[error("sub-process of `{label}` cannot terminate: {}", list(blockers))]
    SubProcessCannotTerminate { label: String, blockers: Vec<Blocker> },
    #[error("termination not allowed: {}", list(blockers))]
    TerminationNotAllowed { blockers: Vec<Blocker> },
    #[error("event log does not replay: expected {expected:?}, produced {produced:?}")]
    LogMismatch { expected: Box<Event>, produced: Box<Event> },
}

/// A write operation on an instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Command {
    Start { scope: ScopeId, activity: String },
    Complete { activity_instance: ActivityInstanceId },
    Terminate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstraintReport {
    pub constraint: ConstraintInstance,
    pub status: Status,
    /// Completing the queried label now would violate this constraint.
    pub blocking: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Termination {
    pub allowed: bool,
    pub blockers: Vec<Blocker>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceState {
    pub root: ScopeInstance,
    pub log: Vec<Event>,
    pub terminated: bool,
    next_scope: u64,
    next_activity_instance: u64,
}

/// A running (or terminated) process instance over a compiled document.
#[derive(Clone, Debug)]
pub struct ProcessInstance {
    doc: Arc<CompiledDocument>,
    state: InstanceState,
}

impl PartialEq for ProcessInstance {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.doc, &other.doc) && self.state == other.state
    }
}

impl ProcessInstance {
    /// Creates an instance of the document's root model.
    pub fn instantiate(doc: Arc<CompiledDocument>) -> Self {
        let root_model = doc.root();
        let root = ScopeInstance::new(ScopeId(0), root_model, None, doc.model(root_model));
        ProcessInstance {
            doc,
            state: InstanceState { root, log: Vec::new(), terminated: false, next_scope: 1, next_activity_instance: 1 },
        }
    }

    /// Rebuilds an instance by re-applying a recorded event log.
    pub fn from_log(doc: Arc<CompiledDocument>, events: &[Event]) -> Result<Self, EngineError> {
        let mut instance = ProcessInstance::instantiate(doc);
        for expected in events {
            let command = match expected.kind {
                EventKind::Started => Command::Start {
                    scope: expected.scope,
                    activity: expected.activity.clone().unwrap_or_default(),
                },
                EventKind::Completed => Command::Complete {
                    activity_instance: expected.activity_instance.unwrap_or(ActivityInstanceId(0)),
                },
                EventKind::Terminated => Command::Terminate,
            };
            let produced = instance.apply(&command)?;
            if &produced != expected {
                return Err(EngineError::LogMismatch {
                    expected: Box::new(expected.clone()),
                    produced: Box::new(produced),
                });
            }
        }
        Ok(instance)
    }

    pub fn document(&self) -> &Arc<CompiledDocument> {
        &self.doc
    }

    /// The log as a full-form trace, with engine instance numbers as trace
    /// instance names. Replaying it reproduces the log.
    pub fn trace(&self) -> Trace {
        let mut scope_model: HashMap<ScopeId, usize> = HashMap::from([(ScopeId(0), self.doc.root())]);
        let mut scope_host: HashMap<ScopeId, ActivityInstanceId> = HashMap::new();
        let mut next_scope = 1;
        let mut steps = Vec::new();
        for e in &self.state.log {
            let label = e.activity.clone().unwrap_or_default();
            let instance = e.activity_instance.map(|i| i.0.to_string()).unwrap_or_default();
            let action = match e.kind {
                EventKind::Started => {
                    let model = self.doc.model(scope_model[&e.scope]);
                    let sub = model.activities.iter().find(|a| a.name == label).and_then(|a| a.sub_model);
                    if let (Some(sub), Some(id)) = (sub, e.activity_instance) {
                        scope_model.insert(ScopeId(next_scope), sub);
                        scope_host.insert(ScopeId(next_scope), id);
                        next_scope += 1;
                    }
                    let parent = scope_host.get(&e.scope).map(|h| h.0.to_string());
                    TraceAction::Start { label, instance, parent }
                }
                EventKind::Completed => TraceAction::Complete { label, instance },
                EventKind::Terminated => TraceAction::Terminate,
            };
            steps.push(TraceStep::new(action));
        }
        Trace { steps }
    }

    pub fn state(&self) -> &InstanceState {
        &self.state
    }

    pub fn root(&self) -> &ScopeInstance {
        &self.state.root
    }

    pub fn log(&self) -> &[Event] {
        &self.state.log
    }

    pub fn is_terminated(&self) -> bool {
        self.state.terminated
    }

    pub fn scope(&self, id: ScopeId) -> Option<&ScopeInstance> {
        self.state.root.find(id)
    }

    pub fn model_of(&self, scope: &ScopeInstance) -> &CompiledModel {
        self.doc.model(scope.model)
    }

    pub fn apply(&mut self, command: &Command) -> Result<Event, EngineError> {
        match command {
            Command::Start { scope, activity } => self.start_activity(*scope, activity),
            Command::Complete { activity_instance } => self.complete_activity(*activity_instance),
            Command::Terminate => self.terminate(),
        }
    }

    fn scope_checked(&self, id: ScopeId) -> Result<&ScopeInstance, EngineError> {
        if self.state.terminated {
            return Err(EngineError::Terminated);
        }
        self.state.root.find(id).ok_or(EngineError::UnknownScope { scope: id })
    }

    /// Why `label` cannot be started in `scope` right now, if it cannot.
    fn start_check(&self, scope: &ScopeInstance, label: &str) -> Result<usize, EngineError> {
        let model = self.model_of(scope);
        let sym = model
            .alphabet
            .index_of(label)
            .ok_or_else(|| EngineError::UnknownActivity { scope: scope.id, label: label.to_string() })?;
        if model.activities[sym].sub_model.is_some() && scope.children.contains_key(label) {
            return Err(EngineError::ComplexAlreadyRunning { label: label.to_string() });
        }
        let blocking = model.blocking(&scope.constraint_states, sym);
        if !blocking.is_empty() {
            return Err(EngineError::NotEnabled {
                label: label.to_string(),
                blockers: blocking.iter().map(|&i| model.automata[i].constraint().clone()).collect(),
            });
        }
        Ok(sym)
    }

    /// Activities that may be started now, as `(scope, label)` pairs in
    /// scope pre-order and declaration order.
    pub fn enabled_activities(&self) -> Vec<(ScopeId, String)> {
        if self.state.terminated {
            return Vec::new();
        }
        let mut out = Vec::new();
        for scope in self.state.root.running_scopes() {
            for a in &self.model_of(scope).activities {
                if self.start_check(scope, &a.name).is_ok() {
                    out.push((scope.id, a.name.clone()));
                }
            }
        }
        out
    }

    pub fn is_enabled(&self, scope: ScopeId, label: &str) -> bool {
        self.enabled_activities().iter().any(|(s, l)| *s == scope && l == label)
    }

    fn push_event(
        &mut self,
        kind: EventKind,
        scope: ScopeId,
        activity: Option<String>,
        activity_instance: Option<ActivityInstanceId>,
    ) -> Event {
        let event = Event { seq: self.state.log.len() as u64 + 1, kind, scope, activity, activity_instance };
        self.state.log.push(event.clone());
        event
    }

    pub fn start_activity(&mut self, scope_id: ScopeId, label: &str) -> Result<Event, EngineError> {
        let scope = self.scope_checked(scope_id)?;
        let sym = self.start_check(scope, label)?;
        let sub_model = self.model_of(scope).activities[sym].sub_model;

        let instance = ActivityInstanceId(self.state.next_activity_instance);
        self.state.next_activity_instance += 1;
        let child = sub_model.map(|m| {
            let id = ScopeId(self.state.next_scope);
            self.state.next_scope += 1;
            ScopeInstance::new(id, m, Some(instance), self.doc.model(m))
        });
        let scope = self.state.root.find_mut(scope_id).expect("checked above");
        scope.running.insert(instance, label.to_string());
        if let Some(child) = child {
            scope.children.insert(label.to_string(), child);
        }
        Ok(self.push_event(EventKind::Started, scope_id, Some(label.to_string()), Some(instance)))
    }

    pub fn complete_activity(&mut self, instance: ActivityInstanceId) -> Result<Event, EngineError> {
        if self.state.terminated {
            return Err(EngineError::Terminated);
        }
        let scope = self.state.root.owner_of(instance).ok_or(EngineError::UnknownActivityInstance { instance })?;
        let label = scope.running[&instance].clone();
        if let Some(child) = scope.children.get(&label) {
            let termination = self.may_terminate_scope(child);
            if !termination.allowed {
                return Err(EngineError::SubProcessCannotTerminate { label, blockers: termination.blockers });
            }
        }
        let model = self.model_of(scope);
        let sym = model.alphabet.index_of(&label).expect("running label belongs to scope");
        let blocking = model.blocking(&scope.constraint_states, sym);
        if !blocking.is_empty() {
            return Err(EngineError::CompletionViolates {
                label,
                blockers: blocking.iter().map(|&i| model.automata[i].constraint().clone()).collect(),
            });
        }

        let doc = Arc::clone(&self.doc);
        let scope = self.state.root.owner_of_mut(instance).expect("found above");
        doc.model(scope.model).step_all(&mut scope.constraint_states, sym);
        scope.completions.push(label.clone());
        scope.running.remove(&instance);
        if let Some(mut child) = scope.children.remove(&label) {
            child.status = ScopeStatus::Completed;
            scope.completed_children.push((label.clone(), child));
        }
        let scope_id = scope.id;
        Ok(self.push_event(EventKind::Completed, scope_id, Some(label), Some(instance)))
    }

    fn may_terminate_scope(&self, scope: &ScopeInstance) -> Termination {
        let model = self.model_of(scope);
        let mut blockers: Vec<Blocker> = model
            .automata
            .iter()
            .zip(&scope.constraint_states)
            .filter(|(a, &s)| !a.is_accepting(s))
            .map(|(a, _)| Blocker::Constraint { constraint: a.constraint().clone() })
            .collect();
        blockers.extend(
            scope
                .running
                .iter()
                .map(|(id, label)| Blocker::Running { activity: label.clone(), instance: *id }),
        );
        Termination { allowed: blockers.is_empty(), blockers }
    }

    /// Whether `scope` could terminate now: every local constraint accepting
    /// and no activity instance running.
    pub fn may_terminate(&self, scope: ScopeId) -> Result<Termination, EngineError> {
        let scope = self.scope_checked(scope)?;
        Ok(self.may_terminate_scope(scope))
    }

    pub fn terminate(&mut self) -> Result<Event, EngineError> {
        let termination = self.may_terminate(ScopeId(0))?;
        if !termination.allowed {
            return Err(EngineError::TerminationNotAllowed { blockers: termination.blockers });
        }
        self.state.terminated = true;
        self.state.root.status = ScopeStatus::Completed;
        Ok(self.push_event(EventKind::Terminated, ScopeId(0), None, None))
    }

    /// Status of each local constraint of `scope`, and whether it blocks
    /// `label`.
    pub fn explain(&self, scope: ScopeId, label: &str) -> Result<Vec<ConstraintReport>, EngineError> {
        let scope = self.scope_checked(scope)?;
        let model = self.model_of(scope);
        let sym = model
            .alphabet
            .index_of(label)
            .ok_or_else(|| EngineError::UnknownActivity { scope: scope.id, label: label.to_string() })?;
        Ok(model
            .automata
            .iter()
            .zip(&scope.constraint_states)
            .map(|(a, &s)| ConstraintReport {
                constraint: a.constraint().clone(),
                status: a.status(s),
                blocking: a.is_dead(a.step(s, sym)),
            })
            .collect())
    }

    /// Status of each local constraint of `scope`.
    pub fn constraint_statuses(&self, scope: &ScopeInstance) -> Vec<(ConstraintInstance, Status)> {
        self.model_of(scope)
            .automata
            .iter()
            .zip(&scope.constraint_states)
            .map(|(a, &s)| (a.constraint().clone(), a.status(s)))
            .collect()
    }

    pub fn termination(&self, scope: &ScopeInstance) -> Termination {
        self.may_terminate_scope(scope)
    }

    pub fn scope_is_completed(&self, id: ScopeId) -> bool {
        self.state.root.find_completed(id)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Accepted,
    Rejected,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Error)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum RejectReason {
    #[error(transparent)]
    Engine(EngineError),
    #[error("`{label}` is not an activity of this document")]
    UnknownLabel { label: String },
    #[error("`{label}` is not enabled: no running scope contains it")]
    NoRunningScope { label: String },
    #[error("`{label}` is ambiguous: several running scopes contain it")]
    AmbiguousScope { label: String },
    #[error("unknown activity instance `{instance}`")]
    UnknownInstance { instance: String },
    #[error("activity instance `{instance}` is already in use")]
    DuplicateInstance { instance: String },
    #[error("step was expected to be rejected but was accepted")]
    UnexpectedAcceptance,
    #[error("trace ends without termination")]
    MissingTermination,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReplayVerdict {
    pub outcome: Outcome,
    /// Index of the offending trace step; equals the trace length when the
    /// trace ends without termination.
    pub failure_index: Option<usize>,
    pub reason: Option<RejectReason>,
}

impl ReplayVerdict {
    pub fn accepted(&self) -> bool {
        self.outcome == Outcome::Accepted
    }
}

impl fmt::Display for ReplayVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.outcome, self.failure_index, &self.reason) {
            (Outcome::Accepted, ..) => f.write_str("accepted"),
            (Outcome::Rejected, Some(i), Some(r)) => write!(f, "rejected at step {i}: {r}"),
            (Outcome::Rejected, ..) => f.write_str("rejected"),
        }
    }
}

/// Replays a trace from a fresh instance. Trace-local instance names are
/// mapped to engine activity instances as the trace proceeds.
pub struct Replayer {
    instance: ProcessInstance,
    names: HashMap<String, ActivityInstanceId>,
}

impl Replayer {
    pub fn new(doc: Arc<CompiledDocument>) -> Self {
        Replayer { instance: ProcessInstance::instantiate(doc), names: HashMap::new() }
    }

    pub fn instance(&self) -> &ProcessInstance {
        &self.instance
    }

    pub fn into_instance(self) -> ProcessInstance {
        self.instance
    }

    fn resolve_scope(&self, label: &str, parent: Option<&str>) -> Result<ScopeId, RejectReason> {
        let doc = self.instance.document();
        let (model, _) = doc.locate(label).ok_or_else(|| RejectReason::UnknownLabel { label: label.to_string() })?;
        if self.instance.is_terminated() {
            return Err(RejectReason::Engine(EngineError::Terminated));
        }
        if let Some(parent) = parent {
            let id = self.names.get(parent).ok_or_else(|| RejectReason::UnknownInstance { instance: parent.to_string() })?;
            return match self.instance.root().child_of_instance(*id) {
                Some(child) if child.model == model => Ok(child.id),
                _ => Err(RejectReason::NoRunningScope { label: label.to_string() }),
            };
        }
        let candidates: Vec<ScopeId> = self
            .instance
            .root()
            .running_scopes()
            .into_iter()
            .filter(|s| s.model == model)
            .map(|s| s.id)
            .collect();
        match candidates.as_slice() {
            [] => Err(RejectReason::NoRunningScope { label: label.to_string() }),
            [one] => Ok(*one),
            _ => Err(RejectReason::AmbiguousScope { label: label.to_string() }),
        }
    }

    fn start(&mut self, label: &str, name: Option<&str>, parent: Option<&str>) -> Result<ActivityInstanceId, RejectReason> {
        if let Some(name) = name {
            if self.names.contains_key(name) {
                return Err(RejectReason::DuplicateInstance { instance: name.to_string() });
            }
        }
        let scope = self.resolve_scope(label, parent)?;
        let event = self.instance.start_activity(scope, label).map_err(RejectReason::Engine)?;
        let id = event.activity_instance.expect("start events carry an instance");
        if let Some(name) = name {
            self.names.insert(name.to_string(), id);
        }
        Ok(id)
    }

    /// Applies one trace action. A rejected action leaves the instance
    /// unchanged.
    pub fn step(&mut self, action: &TraceAction) -> Result<(), RejectReason> {
        match action {
            TraceAction::Execute { label } => {
                let snapshot = self.instance.clone();
                let result = self
                    .start(label, None, None)
                    .and_then(|id| self.instance.complete_activity(id).map_err(RejectReason::Engine));
                if result.is_err() {
                    self.instance = snapshot;
                }
                result.map(|_| ())
            }
            TraceAction::Start { label, instance, parent } => {
                self.start(label, Some(instance), parent.as_deref()).map(|_| ())
            }
            TraceAction::Complete { label, instance } => {
                let id = *self.names.get(instance).ok_or_else(|| RejectReason::UnknownInstance { instance: instance.clone() })?;
                let running_label = self
                    .instance
                    .root()
                    .owner_of(id)
                    .map(|s| s.running[&id].as_str());
                if running_label.is_some_and(|l| l != label) {
                    return Err(RejectReason::UnknownInstance { instance: instance.clone() });
                }
                self.instance.complete_activity(id).map(|_| ()).map_err(RejectReason::Engine)
            }
            TraceAction::Terminate => self.instance.terminate().map(|_| ()).map_err(RejectReason::Engine),
        }
    }
}

/// Replays `trace` on a fresh instance of the document's root model.
pub fn replay(doc: &Arc<CompiledDocument>, trace: &Trace) -> ReplayVerdict {
    let mut replayer = Replayer::new(Arc::clone(doc));
    for (i, step) in trace.steps.iter().enumerate() {
        let result = replayer.step(&step.action);
        let failure = match (result, step.expect_reject) {
            (Ok(()), false) | (Err(_), true) => None,
            (Ok(()), true) => Some(RejectReason::UnexpectedAcceptance),
            (Err(reason), false) => Some(reason),
        };
        if let Some(reason) = failure {
            return ReplayVerdict { outcome: Outcome::Rejected, failure_index: Some(i), reason: Some(reason) };
        }
    }
    if !replayer.instance().is_terminated() {
        return ReplayVerdict {
            outcome: Outcome::Rejected,
            failure_index: Some(trace.len()),
            reason: Some(RejectReason::MissingTermination),
        };
    }
    ReplayVerdict { outcome: Outcome::Accepted, failure_index: None, reason: None }
}
