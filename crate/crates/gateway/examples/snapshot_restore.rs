//! Persists a session mid sub-process, reopens the store from its snapshot
//! file and continues where it left off.

use dpm_core::engine::ActivityInstanceId;
use dpm_core::{fixtures, Command, ScopeId};
use dpm_gateway::SessionStore;

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sessions.json");

    let store = SessionStore::open(&path).unwrap();
    let model = store.add_model(fixtures::SUBPROCESS).unwrap();
    let id = store.create_instance(&model.id).unwrap().id;
    store.apply(&id, &Command::Start { scope: ScopeId(0), activity: "B".into() }).unwrap();
    store.apply(&id, &Command::Start { scope: ScopeId(1), activity: "C".into() }).unwrap();
    store.apply(&id, &Command::Complete { activity_instance: ActivityInstanceId(2) }).unwrap();
    let before = dpm_gateway::views::enabled(&store.instance(&id).unwrap());
    drop(store);

    println!("{}", std::fs::read_to_string(&path).unwrap());

    let store = SessionStore::open(&path).unwrap();
    let after = dpm_gateway::views::enabled(&store.instance(&id).unwrap());
    for e in &after {
        println!("enabled: {} in s{}", e.activity, e.scope.0);
    }
    assert_eq!(
        before.iter().map(|e| (e.scope, &e.activity)).collect::<Vec<_>>(),
        after.iter().map(|e| (e.scope, &e.activity)).collect::<Vec<_>>()
    );
    let done = store.apply(&id, &Command::Start { scope: ScopeId(1), activity: "D".into() }).unwrap();
    println!("{}", done.event);
}
