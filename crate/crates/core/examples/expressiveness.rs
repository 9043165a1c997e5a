//! A chain constraint on a complex activity whose sub-process counts its
//! activities. Inlining it yields the obvious flat model, and a bounded
//! comparison finds a trace that only the hierarchical model accepts.

use std::sync::Arc;

use dpm_core::analysis::{find_schedule, inline_subprocess, Bounds};
use dpm_core::dsl::{serialize_model, serialize_trace};
use dpm_core::{fixtures, replay, CompiledDocument, Trace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let hier = fixtures::model(fixtures::CONTEXT_COUNTS);
    print!("{}", serialize_model(&hier));

    let outcome = inline_subprocess(&hier, "C", &Bounds::new(4, 2))?;
    println!("\ninlined:\n{}", serialize_model(&outcome.document));
    let verdict = &outcome.verdict;
    println!("equivalent up to 4 leaf events, 2 activations: {}", verdict.equivalent_up_to_k);
    if let Some(cx) = &verdict.counterexample {
        println!("counterexample <{}>, accepted by the {:?} model", cx.trace.join(", "), cx.accepted_by);
    }

    let hier = Arc::new(CompiledDocument::new(hier)?);
    let flat = Arc::new(CompiledDocument::new(outcome.document)?);
    let witness = ["B", "A", "B", "D"];
    let schedule = find_schedule(&hier, &witness, 2).expect("hierarchical model accepts");
    println!("\nschedule for {witness:?}:\n{}", serialize_trace(&schedule));
    println!("hierarchical: {}", replay(&hier, &schedule));
    println!("flat:         {}", replay(&flat, &Trace::merged(witness, true)));
    Ok(())
}
