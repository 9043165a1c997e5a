//! Lists the leaf traces a model accepts within a length and activation
//! bound.
//!
//! cargo run --example enumerate_language [MODEL.dpm [MAX_LEAF [MAX_ACTIVATIONS]]]

use dpm_core::analysis::{enumerate_language, Bounds};
use dpm_core::dsl::{parse_model, SourceDocument};
use dpm_core::{fixtures, CompiledDocument};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let source = match args.first() {
        Some(path) => SourceDocument::read(path)?,
        None => SourceDocument::inline(fixtures::SHARED_SUBMODEL),
    };
    let k = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(4);
    let m = args.get(2).map(|s| s.parse()).transpose()?.unwrap_or(2);
    let doc = parse_model(&source).into_result().map_err(|d| format!("{d:?}"))?;
    let lang = enumerate_language(&CompiledDocument::new(doc)?, &Bounds::new(k, m))?;
    for t in &lang.traces {
        println!("<{}>", t.join(", "));
    }
    println!("{} traces, {} configurations explored", lang.traces.len(), lang.explored);
    Ok(())
}
