//! Moves a group of activities into a sub-process. Boundary constraints
//! shared by every member collapse into one constraint on the new complex
//! activity.

use dpm_core::analysis::{check_extraction, extract_subprocess, inline_rewrite};
use dpm_core::dsl::serialize_model;
use dpm_core::fixtures;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let flat = fixtures::model(fixtures::PAPER_WRITING_FLAT);
    let members: Vec<String> = fixtures::REVISION_MEMBERS.iter().map(|s| s.to_string()).collect();

    let report = check_extraction(&flat, &members)?;
    println!("feasible: {}", report.feasible);
    for agg in &report.aggregated {
        println!("aggregated {} constraints into {}", agg.replaced.len(), agg.on("Revise paper"));
        for c in &agg.replaced {
            println!("  {c}");
        }
    }
    for c in &report.internal {
        println!("moves inside: {c}");
    }

    let hier = extract_subprocess(&flat, &members, "Revise paper")?;
    print!("\n{}", serialize_model(&hier));

    let (back, _) = inline_rewrite(&hier, "Revise paper")?;
    println!("\ninlining restores the original: {}", back.structurally_eq(&flat));

    let mut too_many = members.clone();
    too_many.push("Submit paper".into());
    if let Err(e) = extract_subprocess(&flat, &too_many, "Revise paper") {
        println!("with Submit paper as well: {e}");
    }
    Ok(())
}
