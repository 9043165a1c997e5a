use std::sync::Arc;

use serde::Serialize;

use super::{bounded_equivalent, AnalysisError, Bounds, EquivalenceResult};
use crate::compiled::CompiledDocument;
use crate::model::{ConstraintInstance, Document};

#[derive(Clone, Debug, Serialize)]
pub struct InlineOutcome {
    pub document: Document,
    pub warnings: Vec<String>,
    /// Bounded comparison of the original and the rewritten document.
    pub verdict: EquivalenceResult,
}

/// Replaces the complex activity `complex` by the activities of its
/// sub-process. Binary constraints on the complex activity are duplicated
/// once per hoisted activity; unary ones are dropped with a warning.
pub fn inline_rewrite(doc: &Document, complex: &str) -> Result<(Document, Vec<String>), AnalysisError> {
    let not_complex = || AnalysisError::NotComplex(complex.to_string());
    let parent = doc.owner_of(complex).ok_or_else(not_complex)?;
    let sub_name = parent.activity(complex).and_then(|a| a.sub_model()).ok_or_else(not_complex)?;
    let sub = doc.model(sub_name).ok_or_else(not_complex)?;

    if let Some(nested) = sub.activities.iter().find(|a| a.is_complex()) {
        return Err(AnalysisError::NestedComplex { complex: complex.to_string(), nested: nested.name.clone() });
    }
    let others: Vec<String> = doc
        .models
        .iter()
        .flat_map(|m| m.activities.iter())
        .filter(|a| a.sub_model() == Some(sub_name) && a.name != complex)
        .map(|a| a.name.clone())
        .collect();
    if !others.is_empty() {
        return Err(AnalysisError::SharedSubModel { sub_model: sub_name.to_string(), others });
    }

    let members: Vec<String> = sub.activities.iter().map(|a| a.name.clone()).collect();
    let mut warnings = Vec::new();
    let mut constraints = Vec::new();
    for c in &parent.constraints {
        if !c.mentions(complex) {
            constraints.push(c.clone());
        } else if c.operands.len() == 1 {
            warnings.push(format!("dropped unary constraint {c}"));
        } else {
            if members.is_empty() {
                warnings.push(format!("dropped {c}: `{complex}` has no activities to carry it"));
            }
            for m in &members {
                let operands = c.operands.iter().map(|o| if o == complex { m.clone() } else { o.clone() }).collect();
                constraints.push(ConstraintInstance { operands, ..c.clone() });
            }
        }
    }
    constraints.extend(sub.constraints.iter().cloned());

    let mut activities = Vec::new();
    for a in &parent.activities {
        if a.name == complex {
            activities.extend(sub.activities.iter().cloned());
        } else {
            activities.push(a.clone());
        }
    }

    let parent_name = parent.name.clone();
    let sub_name = sub_name.to_string();
    let mut out = doc.clone();
    let target = out.model_mut(&parent_name).expect("owner exists");
    target.activities = activities;
    target.constraints = constraints;
    out.models.retain(|m| m.name != sub_name);
    Ok((out, warnings))
}

/// Inlines `complex` and checks the rewrite against the original up to the
/// given bounds.
pub fn inline_subprocess(doc: &Document, complex: &str, bounds: &Bounds) -> Result<InlineOutcome, AnalysisError> {
    let (document, warnings) = inline_rewrite(doc, complex)?;
    let before = Arc::new(CompiledDocument::new(doc.clone())?);
    let after = Arc::new(CompiledDocument::new(document.clone())?);
    let verdict = bounded_equivalent(&before, &after, bounds)?;
    Ok(InlineOutcome { document, warnings, verdict })
}
