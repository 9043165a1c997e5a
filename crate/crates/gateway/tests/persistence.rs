mod common;

use std::sync::Arc;

use common::Client;
use dpm_core::engine::ActivityInstanceId;
use dpm_core::{fixtures, Command, ScopeId};
use dpm_gateway::SessionStore;

#[tokio::test]
async fn restart_mid_subprocess_restores_enablement() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sessions.json");

    let before = Client::new(Arc::new(SessionStore::open(&path).unwrap()));
    let id = before.instance_of(fixtures::SUBPROCESS).await;
    let (_, started) = before.start(&id, 0, "B").await;
    let scope = started["instance"]["root"]["children"][0]["id"].as_u64().unwrap();
    before.run(&id, scope, "C").await;
    let expected = before.enabled(&id).await;
    let (_, view) = before.get(&format!("/instances/{id}")).await;
    drop(before);

    let after = Client::new(Arc::new(SessionStore::open(&path).unwrap()));
    assert_eq!(after.enabled(&id).await, expected);
    let (_, restored) = after.get(&format!("/instances/{id}")).await;
    assert_eq!(restored, view);

    // Both sides continue identically.
    after.run(&id, scope, "D").await;
    let (_, body) = after.get(&format!("/instances/{id}/enabled")).await;
    assert_eq!(body["may_terminate"], false);
}

#[test]
fn concurrent_conflicting_commands_have_one_winner() {
    for _ in 0..20 {
        let store = Arc::new(SessionStore::in_memory());
        let model = store.add_model(fixtures::SUBPROCESS).unwrap();
        let id = store.create_instance(&model.id).unwrap().id;
        let start = Command::Start { scope: ScopeId(0), activity: "B".into() };
        let results: Vec<bool> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..4)
                .map(|_| {
                    let store = Arc::clone(&store);
                    let (id, start) = (id.clone(), start.clone());
                    s.spawn(move || store.apply(&id, &start).is_ok())
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        assert_eq!(results.iter().filter(|ok| **ok).count(), 1);
        assert_eq!(store.instance(&id).unwrap().log().len(), 1);
    }
}

#[test]
fn concurrent_completions_of_one_instance() {
    let store = Arc::new(SessionStore::in_memory());
    let model = store.add_model(fixtures::DECLARATIVE_BASICS).unwrap();
    let id = store.create_instance(&model.id).unwrap().id;
    store.apply(&id, &Command::Start { scope: ScopeId(0), activity: "A".into() }).unwrap();
    let complete = Command::Complete { activity_instance: ActivityInstanceId(1) };
    let wins = std::thread::scope(|s| {
        let handles: Vec<_> = (0..4).map(|_| s.spawn(|| store.apply(&id, &complete).is_ok())).collect();
        handles.into_iter().filter(|_| true).map(|h| h.join().unwrap()).filter(|ok| *ok).count()
    });
    assert_eq!(wins, 1);
    assert_eq!(store.instance(&id).unwrap().log().len(), 2);
}
