//! Random command walks over the fixture corpus.

use std::sync::Arc;

use dpm_core::engine::{ActivityInstanceId, Replayer};
use dpm_core::{fixtures, replay, Command, CompiledDocument, ProcessInstance, Status};
use proptest::prelude::*;

fn documents() -> Vec<Arc<CompiledDocument>> {
    fixtures::MODELS.iter().map(|(_, src)| Arc::new(CompiledDocument::new(fixtures::model(src)).unwrap())).collect()
}

fn candidates(p: &ProcessInstance) -> Vec<Command> {
    let mut out = vec![Command::Terminate];
    for scope in p.root().running_scopes() {
        for a in &p.model_of(scope).activities {
            out.push(Command::Start { scope: scope.id, activity: a.name.clone() });
        }
        for id in scope.running.keys() {
            out.push(Command::Complete { activity_instance: *id });
        }
    }
    out.push(Command::Complete { activity_instance: ActivityInstanceId(999) });
    out
}

fn walk(doc: &Arc<CompiledDocument>, choices: &[usize], mut check: impl FnMut(&ProcessInstance, &Command, bool)) -> ProcessInstance {
    let mut p = ProcessInstance::instantiate(Arc::clone(doc));
    for &c in choices {
        if p.is_terminated() {
            break;
        }
        let options = candidates(&p);
        let cmd = &options[c % options.len()];
        let before = p.clone();
        let ok = p.apply(cmd).is_ok();
        if !ok {
            assert_eq!(p, before, "rejected {cmd:?} changed the instance");
        }
        check(&before, cmd, ok);
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn log_replay_reproduces_state(doc in 0..8usize, choices in prop::collection::vec(any::<usize>(), 0..40)) {
        let doc = &documents()[doc];
        let p = walk(doc, &choices, |_, _, _| {});
        let rebuilt = ProcessInstance::from_log(Arc::clone(doc), p.log()).unwrap();
        prop_assert_eq!(rebuilt.state(), p.state());
    }

    #[test]
    fn exported_trace_replays_to_the_same_log(doc in 0..8usize, choices in prop::collection::vec(any::<usize>(), 0..40)) {
        let doc = &documents()[doc];
        let p = walk(doc, &choices, |_, _, _| {});
        let mut replayer = Replayer::new(Arc::clone(doc));
        for step in &p.trace().steps {
            replayer.step(&step.action).unwrap();
        }
        prop_assert_eq!(replayer.instance().log(), p.log());
        if p.is_terminated() {
            prop_assert!(replay(doc, &p.trace()).accepted());
        }
    }

    #[test]
    fn enablement_is_sound(doc in 0..8usize, choices in prop::collection::vec(any::<usize>(), 0..40)) {
        let doc = &documents()[doc];
        walk(doc, &choices, |before, cmd, ok| {
            if let Command::Start { scope, activity } = cmd {
                let enabled = before.is_enabled(*scope, activity);
                assert_eq!(enabled, ok, "{activity} in {scope}");
                let is_atomic = before.model_of(before.scope(*scope).unwrap()).activities.iter().any(|a| &a.name == activity && a.sub_model.is_none());
                if enabled && is_atomic {
                    let mut p = before.clone();
                    let id = p.start_activity(*scope, activity).unwrap().activity_instance.unwrap();
                    assert!(p.complete_activity(id).is_ok(), "{activity} started but cannot complete");
                }
            }
        });
    }

    #[test]
    fn accepted_termination_means_every_constraint_is_satisfied(doc in 0..8usize, choices in prop::collection::vec(any::<usize>(), 0..60)) {
        let doc = &documents()[doc];
        walk(doc, &choices, |before, cmd, ok| {
            if matches!(cmd, Command::Terminate) && ok {
                for (c, status) in before.constraint_statuses(before.root()) {
                    assert_eq!(status, Status::Accepting, "{c}");
                }
            }
        });
    }
}
