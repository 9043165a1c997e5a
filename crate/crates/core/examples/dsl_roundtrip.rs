//! Parses a model, reports diagnostics with positions, and prints the
//! canonical form.
//!
//! cargo run --example dsl_roundtrip [MODEL.dpm]

use dpm_core::dsl::{parse_model, render_diagnostics, serialize_model, SourceDocument};

const BROKEN: &str = r#"root process Review {
    activity Draft
    activity "Final check"
    constraint response(Draft, Publish)
    constraint eventually(Draft)
}
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let source = match std::env::args().nth(1) {
        Some(path) => SourceDocument::read(path)?,
        None => SourceDocument::inline(BROKEN),
    };
    let parsed = parse_model(&source);
    if !parsed.diagnostics.is_empty() {
        eprint!("{}", render_diagnostics(&source, &parsed.diagnostics));
    }
    let Some(doc) = parsed.document else { return Ok(()) };
    let canonical = serialize_model(&doc);
    print!("{canonical}");
    let again = serialize_model(&parse_model(&SourceDocument::inline(canonical.clone())).into_result().unwrap());
    assert_eq!(again, canonical);
    Ok(())
}
