use std::sync::Arc;

use dpm_core::{fixtures, replay, timeline, CompiledDocument, ProcessInstance, ScopeId, Trace};

fn compile(src: &str) -> Arc<CompiledDocument> {
    Arc::new(CompiledDocument::new(fixtures::model(src)).unwrap())
}

#[test]
fn basics_transcript_is_byte_stable() {
    let doc = compile(fixtures::DECLARATIVE_BASICS);
    let t = timeline(&doc, &fixtures::trace(fixtures::DECLARATIVE_BASICS_FULL_TRACE));
    assert_eq!(t.to_string(), fixtures::DECLARATIVE_BASICS_TIMELINE);
    let merged = timeline(&doc, &fixtures::trace(fixtures::DECLARATIVE_BASICS_TRACE));
    assert_eq!(merged.to_string(), fixtures::DECLARATIVE_BASICS_TIMELINE);
}

#[test]
fn basics_enablement_follows_completions() {
    let doc = compile(fixtures::DECLARATIVE_BASICS);
    let t = timeline(&doc, &fixtures::trace(fixtures::DECLARATIVE_BASICS_FULL_TRACE));
    let rows = &t.rows;
    assert!(!rows[0].is_enabled("E") && !rows[0].may_terminate);
    for (i, row) in rows.iter().enumerate().take(9) {
        assert_eq!(row.constraints_permit_termination, i >= 4, "row {i}");
        assert_eq!(row.is_enabled("E"), i >= 6, "row {i}");
    }
    assert!(t.verdict.accepted());
}

#[test]
fn subprocess_transcript_is_byte_stable() {
    let doc = compile(fixtures::SUBPROCESS);
    let t = timeline(&doc, &fixtures::trace(fixtures::SUBPROCESS_TRACE));
    assert_eq!(t.to_string(), fixtures::SUBPROCESS_TIMELINE);
    let rows = &t.rows;
    for row in &rows[..3] {
        assert!(!row.is_enabled("C") && !row.is_enabled("D"));
    }
    assert!(rows[3].is_enabled("C") && !rows[3].is_enabled("D"));
    assert!(!rows[4].is_enabled("D") && rows[5].is_enabled("D"));
    assert!(!rows[8].is_enabled("C") && !rows[8].is_enabled("D"));
    assert!(rows[8].is_enabled("A") && rows[8].is_enabled("B"));
    assert!(t.verdict.accepted());
}

#[test]
fn rejections_name_their_blockers() {
    let doc = compile(fixtures::DECLARATIVE_BASICS);
    let v = replay(&doc, &Trace::merged(["E"], true));
    assert_eq!(v.failure_index, Some(0));
    assert!(v.to_string().contains("precedence(C, E)"), "{v}");
    let v = replay(&doc, &Trace::merged(["B"], true));
    assert_eq!(v.failure_index, Some(1));
    assert!(v.to_string().contains("existence(1, A)"), "{v}");

    let sub = compile(fixtures::SUBPROCESS);
    assert!(replay(&sub, &Trace::merged(["A"], true)).accepted());
}

#[test]
fn completing_a_complex_activity_needs_its_sub_process_to_terminate() {
    let doc = compile(fixtures::CONTEXT_COUNTS);
    let mut p = ProcessInstance::instantiate(doc);
    let c = p.start_activity(ScopeId(0), "C").unwrap().activity_instance.unwrap();
    let inner = p.root().child_of_instance(c).unwrap().id;
    let a = p.start_activity(inner, "A").unwrap().activity_instance.unwrap();
    p.complete_activity(a).unwrap();
    let before = p.clone();
    let err = p.complete_activity(c).unwrap_err();
    assert!(err.to_string().contains("exactly(2, B)"), "{err}");
    assert!(!err.to_string().contains("exactly(1, A)"), "{err}");
    assert_eq!(p, before);
}
