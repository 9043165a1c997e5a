mod common;

use std::sync::Arc;

use common::oracle::{holds, words_up_to};
use dpm_core::analysis::{enumerate_language, find_schedule, Bounds};
use dpm_core::{fixtures, replay, CompiledDocument, Trace};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn compile(src: &str) -> Arc<CompiledDocument> {
    Arc::new(CompiledDocument::new(fixtures::model(src)).unwrap())
}

fn is_flat(doc: &CompiledDocument) -> bool {
    doc.models().len() == 1
}

/// Bounds small enough to finish quickly on every fixture.
fn bounds_for(doc: &CompiledDocument) -> Bounds {
    if doc.document().leaf_alphabet().len() > 5 {
        Bounds::new(4, 2)
    } else {
        Bounds::new(5, 2)
    }
}

#[test]
fn members_are_accepted_and_random_non_members_rejected() {
    let mut rng = StdRng::seed_from_u64(7);
    for (name, src) in fixtures::MODELS {
        let doc = compile(src);
        let bounds = bounds_for(&doc);
        let lang = enumerate_language(&doc, &bounds).unwrap();
        assert!(!lang.traces.is_empty(), "{name}");
        for t in &lang.traces {
            let schedule = find_schedule(&doc, t, bounds.max_activations).unwrap_or_else(|| panic!("{name}: {t:?}"));
            assert!(replay(&doc, &schedule).accepted(), "{name}: {t:?}");
            if is_flat(&doc) {
                assert!(replay(&doc, &Trace::merged(t, true)).accepted(), "{name}: {t:?}");
            }
        }

        let alphabet: Vec<String> = doc.document().leaf_alphabet().into_iter().collect();
        let words: usize = (0..=bounds.max_leaf_len).map(|l| alphabet.len().pow(l as u32)).sum();
        if lang.traces.len() == words {
            // Every word within the bound is a member; there is nothing to sample.
            continue;
        }
        let mut rejected = 0;
        let mut attempts = 0;
        while rejected < 100 {
            attempts += 1;
            assert!(attempts < 100_000, "{name}: language too dense to sample non-members");
            let len = rng.gen_range(0..=bounds.max_leaf_len);
            let t: Vec<String> = (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())].clone()).collect();
            if lang.traces.contains(&t) {
                continue;
            }
            assert!(find_schedule(&doc, &t, bounds.max_activations).is_none(), "{name}: {t:?}");
            if is_flat(&doc) {
                assert!(!replay(&doc, &Trace::merged(&t, true)).accepted(), "{name}: {t:?}");
            }
            rejected += 1;
        }
    }
}

#[test]
fn flat_languages_match_the_predicates() {
    for (name, src) in fixtures::MODELS {
        let doc = compile(src);
        if !is_flat(&doc) {
            continue;
        }
        let model = &doc.document().models[0];
        let alphabet: Vec<&str> = model.activities.iter().map(|a| a.name.as_str()).collect();
        let k = if alphabet.len() > 5 { 4 } else { 5 };
        let lang = enumerate_language(&doc, &Bounds::new(k, 0)).unwrap();
        for w in words_up_to(&alphabet, k) {
            let expected = model.constraints.iter().all(|c| holds(c, &w));
            assert_eq!(lang.contains(&w), expected, "{name}: {w:?}");
        }
    }
}

#[test]
fn enumeration_is_deterministic() {
    for (_, src) in fixtures::MODELS {
        let a = enumerate_language(&compile(src), &Bounds::new(3, 2)).unwrap();
        let b = enumerate_language(&compile(src), &Bounds::new(3, 2)).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn context_counts_language() {
    let lang = enumerate_language(&compile(fixtures::CONTEXT_COUNTS), &Bounds::new(4, 1)).unwrap();
    let expected: Vec<Vec<&str>> = vec![
        vec![],
        vec!["A", "B", "B"],
        vec!["A", "B", "B", "D"],
        vec!["B", "A", "B"],
        vec!["B", "A", "B", "D"],
        vec!["B", "B", "A"],
        vec!["B", "B", "A", "D"],
    ];
    let got: Vec<Vec<&str>> = lang.traces.iter().map(|t| t.iter().map(String::as_str).collect()).collect();
    assert_eq!(got, expected);
}
