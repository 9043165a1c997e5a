use std::cmp::Ordering;
use std::sync::Arc;

use serde::Serialize;

use super::{enumerate_language, find_schedule, AnalysisError, Bounds};
use crate::compiled::CompiledDocument;
use crate::engine::replay;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    First,
    Second,
}

/// A leaf trace accepted by exactly one of the compared models.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub trace: Vec<String>,
    pub accepted_by: Side,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceResult {
    pub equivalent_up_to_k: bool,
    pub max_leaf_len: usize,
    pub max_activations: usize,
    pub counterexample: Option<Counterexample>,
    /// Leaf labels that only one of the models declares.
    pub alphabet_difference: Vec<String>,
}

/// Shortest first, then lexicographic by label.
fn shortlex(a: &[String], b: &[String]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// Compares the bounded leaf languages of two models.
///
/// Models whose leaf alphabets differ are inequivalent. The counterexample
/// is the shortlex-least trace in the symmetric difference of the languages;
/// it is confirmed on the execution engine before being reported.
pub fn bounded_equivalent(
    first: &Arc<CompiledDocument>,
    second: &Arc<CompiledDocument>,
    bounds: &Bounds,
) -> Result<EquivalenceResult, AnalysisError> {
    let lang1 = enumerate_language(first, bounds)?;
    let lang2 = enumerate_language(second, bounds)?;
    let alpha1 = first.document().leaf_alphabet();
    let alpha2 = second.document().leaf_alphabet();
    let alphabet_difference: Vec<String> = alpha1.symmetric_difference(&alpha2).cloned().collect();

    let counterexample = lang1
        .traces
        .difference(&lang2.traces)
        .map(|t| (t, Side::First))
        .chain(lang2.traces.difference(&lang1.traces).map(|t| (t, Side::Second)))
        .min_by(|a, b| shortlex(a.0, b.0))
        .map(|(trace, accepted_by)| Counterexample { trace: trace.clone(), accepted_by });

    if let Some(cx) = &counterexample {
        let (yes, no) = match cx.accepted_by {
            Side::First => (first, second),
            Side::Second => (second, first),
        };
        let confirmed = find_schedule(yes, &cx.trace, bounds.max_activations).is_some_and(|s| replay(yes, &s).accepted())
            && find_schedule(no, &cx.trace, bounds.max_activations).is_none();
        if !confirmed {
            return Err(AnalysisError::CrossCheckFailed { trace: cx.trace.clone() });
        }
    }

    Ok(EquivalenceResult {
        equivalent_up_to_k: counterexample.is_none() && alphabet_difference.is_empty(),
        max_leaf_len: bounds.max_leaf_len,
        max_activations: bounds.max_activations,
        counterexample,
        alphabet_difference,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn compile(src: &str) -> Arc<CompiledDocument> {
        Arc::new(CompiledDocument::new(fixtures::model(src)).unwrap())
    }

    #[test]
    fn reflexive() {
        for (name, src) in fixtures::MODELS {
            let doc = compile(src);
            let r = bounded_equivalent(&doc, &doc, &Bounds::new(3, 2)).unwrap();
            assert!(r.equivalent_up_to_k, "{name}");
            assert!(r.counterexample.is_none());
        }
    }

    #[test]
    fn constraint_order_is_irrelevant() {
        let a = compile("root process P { activity A activity B constraint response(A, B) constraint absence(2, B) }");
        let b = compile("root process P { activity A activity B constraint absence(2, B) constraint response(A, B) }");
        assert!(bounded_equivalent(&a, &b, &Bounds::new(4, 0)).unwrap().equivalent_up_to_k);
    }

    #[test]
    fn hierarchy_vs_naive_flattening() {
        let hier = compile(fixtures::CONTEXT_COUNTS);
        let flat = compile(fixtures::CONTEXT_COUNTS_FLAT);
        let r = bounded_equivalent(&hier, &flat, &Bounds::new(4, 2)).unwrap();
        assert!(!r.equivalent_up_to_k);
        let cx = r.counterexample.unwrap();
        assert_eq!(cx.trace, Vec::<String>::new());
        assert_eq!(cx.accepted_by, Side::First);
        let swapped = bounded_equivalent(&flat, &hier, &Bounds::new(4, 2)).unwrap();
        assert_eq!(swapped.counterexample.unwrap().accepted_by, Side::Second);
    }

    #[test]
    fn alphabet_mismatch_is_inequivalent() {
        let a = compile("root process P { activity A activity B constraint absence(0, B) }");
        let b = compile("root process P { activity A }");
        let r = bounded_equivalent(&a, &b, &Bounds::new(3, 0)).unwrap();
        assert!(!r.equivalent_up_to_k);
        assert_eq!(r.alphabet_difference, vec!["B"]);
        assert!(r.counterexample.is_none());
    }
}
