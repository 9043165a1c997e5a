//! Drives an instance with a sub-process by hand and shows how the scope
//! tree grows and shrinks.

use std::sync::Arc;

use dpm_core::engine::ScopeInstance;
use dpm_core::{fixtures, CompiledDocument, ProcessInstance, ScopeId};

fn show(p: &ProcessInstance, scope: &ScopeInstance, depth: usize) {
    let pad = "  ".repeat(depth);
    println!("{pad}{} {} completions={:?}", scope.id, p.model_of(scope).name, scope.completions);
    for (c, status) in p.constraint_statuses(scope) {
        println!("{pad}  {c}: {status}");
    }
    for child in scope.children.values() {
        show(p, child, depth + 1);
    }
}

fn enabled(p: &ProcessInstance) -> String {
    p.enabled_activities().iter().map(|(s, l)| format!("{l}@{s}")).collect::<Vec<_>>().join(" ")
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let doc = Arc::new(CompiledDocument::new(fixtures::model(fixtures::SUBPROCESS))?);
    let mut p = ProcessInstance::instantiate(doc);
    println!("enabled: {}", enabled(&p));

    let b = p.start_activity(ScopeId(0), "B")?;
    println!("{b}");
    let inner = p.root().child_of_instance(b.activity_instance.unwrap()).unwrap().id;
    show(&p, p.root(), 0);
    println!("enabled: {}", enabled(&p));

    if let Err(e) = p.start_activity(inner, "D") {
        println!("start D: {e}");
    }
    for label in ["C", "D"] {
        let started = p.start_activity(inner, label)?;
        println!("{started}");
        println!("{}", p.complete_activity(started.activity_instance.unwrap())?);
    }
    println!("{}", p.complete_activity(b.activity_instance.unwrap())?);
    show(&p, p.root(), 0);
    println!("enabled: {}", enabled(&p));
    println!("{}", p.terminate()?);
    Ok(())
}
