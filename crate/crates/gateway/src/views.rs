//! JSON views of instances. Scopes nest like the engine's scope tree, and
//! every constraint carries its status and the activities it blocks.

use dpm_core::automata::Status;
use dpm_core::engine::{ActivityInstanceId, Blocker, ScopeInstance, ScopeStatus};
use dpm_core::{Event, ProcessInstance, ScopeId};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct InstanceView {
    pub id: String,
    pub model_id: String,
    pub terminated: bool,
    pub may_terminate: bool,
    pub termination_blockers: Vec<Blocker>,
    pub enabled: Vec<EnabledView>,
    pub root: ScopeView,
    pub event_count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnabledView {
    pub scope: ScopeId,
    pub activity: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScopeView {
    pub id: ScopeId,
    pub model: String,
    pub status: ScopeStatus,
    pub host: Option<ActivityInstanceId>,
    pub may_terminate: bool,
    pub activities: Vec<ActivityView>,
    pub constraints: Vec<ConstraintView>,
    pub running: Vec<RunningView>,
    pub completions: Vec<String>,
    /// Sub-process instances of running complex activities.
    pub children: Vec<ScopeView>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ActivityView {
    pub name: String,
    pub complex: bool,
    pub enabled: bool,
    /// Constraints that completing the activity now would violate.
    pub blocked_by: Vec<String>,
    pub already_running: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstraintView {
    pub constraint: String,
    pub status: Status,
    /// Activities of the scope whose completion this constraint forbids now.
    pub blocks: Vec<String>,
    pub blocking: bool,
    pub blocks_termination: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunningView {
    pub instance: ActivityInstanceId,
    pub activity: String,
}

pub fn enabled(p: &ProcessInstance) -> Vec<EnabledView> {
    if p.is_terminated() {
        return Vec::new();
    }
    p.enabled_activities().into_iter().map(|(scope, activity)| EnabledView { scope, activity }).collect()
}

fn scope_view(p: &ProcessInstance, scope: &ScopeInstance) -> ScopeView {
    let model = p.model_of(scope);
    let live = !p.is_terminated();
    let reports: Vec<_> = model
        .activities
        .iter()
        .map(|a| if live { p.explain(scope.id, &a.name).expect("activity of this scope") } else { Vec::new() })
        .collect();

    let activities = model
        .activities
        .iter()
        .zip(&reports)
        .map(|(a, report)| ActivityView {
            name: a.name.clone(),
            complex: a.sub_model.is_some(),
            enabled: live && p.is_enabled(scope.id, &a.name),
            blocked_by: report.iter().filter(|r| r.blocking).map(|r| r.constraint.to_string()).collect(),
            already_running: a.sub_model.is_some() && scope.children.contains_key(&a.name),
        })
        .collect();

    let constraints = p
        .constraint_statuses(scope)
        .into_iter()
        .enumerate()
        .map(|(i, (c, status))| {
            let blocks: Vec<String> = model
                .activities
                .iter()
                .zip(&reports)
                .filter(|(_, r)| r.get(i).is_some_and(|r| r.blocking))
                .map(|(a, _)| a.name.clone())
                .collect();
            ConstraintView {
                constraint: c.to_string(),
                status,
                blocking: !blocks.is_empty(),
                blocks,
                blocks_termination: status != Status::Accepting,
            }
        })
        .collect();

    ScopeView {
        id: scope.id,
        model: model.name.clone(),
        status: scope.status,
        host: scope.host,
        may_terminate: live && p.termination(scope).allowed,
        activities,
        constraints,
        running: scope.running.iter().map(|(i, a)| RunningView { instance: *i, activity: a.clone() }).collect(),
        completions: scope.completions.clone(),
        children: scope.children.values().map(|c| scope_view(p, c)).collect(),
    }
}

pub fn instance_view(id: &str, model_id: &str, p: &ProcessInstance) -> InstanceView {
    let termination = p.termination(p.root());
    InstanceView {
        id: id.to_string(),
        model_id: model_id.to_string(),
        terminated: p.is_terminated(),
        may_terminate: !p.is_terminated() && termination.allowed,
        termination_blockers: if p.is_terminated() { Vec::new() } else { termination.blockers },
        enabled: enabled(p),
        root: scope_view(p, p.root()),
        event_count: p.log().len(),
    }
}

/// Result of a successful command: the new event and the refreshed state.
#[derive(Clone, Debug, Serialize)]
pub struct CommandView {
    pub event: Event,
    pub instance: InstanceView,
}
