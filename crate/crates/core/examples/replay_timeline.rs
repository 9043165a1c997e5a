//! Replays a trace and prints, after every event, what is enabled and
//! whether the instance may terminate.
//!
//! cargo run --example replay_timeline [MODEL.dpm TRACE.dpt]

use std::sync::Arc;

use dpm_core::dsl::{parse_model, parse_trace, SourceDocument};
use dpm_core::{fixtures, timeline, CompiledDocument};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (model, trace) = match args.as_slice() {
        [m, t] => (SourceDocument::read(m)?, SourceDocument::read(t)?),
        _ => (
            SourceDocument::inline(fixtures::DECLARATIVE_BASICS),
            SourceDocument::inline(fixtures::DECLARATIVE_BASICS_FULL_TRACE),
        ),
    };
    let doc = parse_model(&model).into_result().map_err(|d| format!("{d:?}"))?;
    let trace = parse_trace(&trace).into_result().map_err(|d| format!("{d:?}"))?;
    let doc = Arc::new(CompiledDocument::new(doc)?);
    print!("{}", timeline(&doc, &trace));
    Ok(())
}
