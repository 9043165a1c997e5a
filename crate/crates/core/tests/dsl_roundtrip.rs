use dpm_core::dsl::{parse_model, parse_trace, serialize_model, serialize_trace, SourceDocument};
use dpm_core::model::{ActivityDecl, ConstraintInstance, Document, ProcessModel, Template};
use dpm_core::{fixtures, validate_model, Trace, TraceAction, TraceStep};
use proptest::prelude::*;

fn parse(text: &str) -> Document {
    parse_model(&SourceDocument::inline(text)).into_result().unwrap()
}

#[test]
fn fixture_files_are_canonical() {
    for (name, src) in fixtures::MODELS {
        let doc = parse(src);
        let uncommented: String = src.lines().filter(|l| !l.starts_with("//")).map(|l| format!("{l}\n")).collect();
        assert_eq!(serialize_model(&doc), uncommented, "{name}");
        assert_eq!(parse(&serialize_model(&doc)), doc, "{name}");
    }
}

#[test]
fn trace_fixtures_round_trip() {
    for src in [fixtures::DECLARATIVE_BASICS_TRACE, fixtures::DECLARATIVE_BASICS_FULL_TRACE, fixtures::SUBPROCESS_TRACE] {
        let t = fixtures::trace(src);
        let text = serialize_trace(&t);
        assert_eq!(text, src);
        assert_eq!(parse_trace(&SourceDocument::inline(text)).into_result().unwrap(), t);
    }
}

#[test]
fn diagnostics_point_at_the_problem() {
    let errs = parse_model(&SourceDocument::inline("root process P {\n    activity A\n    constraint response(A, Q)\n}\n"))
        .into_result()
        .unwrap_err();
    assert_eq!(errs.len(), 1);
    assert_eq!((errs[0].position.line, errs[0].position.column), (3, 16));
    let cyclic = parse_model(&SourceDocument::inline(fixtures::CYCLIC)).into_result().unwrap_err();
    assert!(cyclic.iter().any(|d| d.message.contains("cycl")), "{cyclic:?}");
}

const NAMES: [&str; 6] = ["A", "B", "Work on revision", "x_1", "process", "say \"hi\""];

fn arb_constraint(labels: Vec<String>) -> impl Strategy<Value = ConstraintInstance> {
    let n = labels.len();
    (prop::sample::select(Template::ALL.to_vec()), 0..n, 1..n.max(2), 0..4u32).prop_map(move |(t, i, j, k)| {
        let a = labels[i].clone();
        if t.is_counting() {
            ConstraintInstance::counting(t, k, a)
        } else if t.arity() == 1 {
            ConstraintInstance::unary(t, a)
        } else {
            ConstraintInstance::binary(t, a, labels[(i + j) % n].clone())
        }
    })
}

fn arb_document() -> impl Strategy<Value = Document> {
    (1..=NAMES.len(), any::<bool>()).prop_flat_map(|(n, nested)| {
        let labels: Vec<String> = NAMES[..n].iter().map(|s| s.to_string()).collect();
        let root_labels = if nested && n > 1 { labels[..n - 1].to_vec() } else { labels.clone() };
        let sub_labels = if nested && n > 1 { vec![labels[n - 1].clone(), "inner".to_string()] } else { Vec::new() };
        let root_cs = if root_labels.len() > 1 { prop::collection::vec(arb_constraint(root_labels.clone()), 0..5).boxed() } else { Just(Vec::new()).boxed() };
        let sub_cs = if sub_labels.is_empty() { Just(Vec::new()).boxed() } else { prop::collection::vec(arb_constraint(sub_labels.clone()), 0..3).boxed() };
        (root_cs, sub_cs).prop_map(move |(rc, sc)| {
            let mut root = ProcessModel::new("Main");
            root.root = true;
            root.activities = root_labels.iter().map(ActivityDecl::atomic).collect();
            root.constraints = rc;
            let mut models = vec![root];
            if !sub_labels.is_empty() {
                let mut sub = ProcessModel::new("Sub model");
                sub.activities = sub_labels.iter().map(ActivityDecl::atomic).collect();
                sub.constraints = sc;
                models[0].activities.push(ActivityDecl::complex("Run sub", "Sub model"));
                models.push(sub);
            }
            Document::new(models)
        })
    })
}

/// Instance ids are fresh per start; every third start is closed right away.
fn arb_trace() -> impl Strategy<Value = Trace> {
    let step = (0..4u8, prop::sample::select(NAMES.to_vec()), prop::option::of(0..5u8), any::<bool>());
    prop::collection::vec(step, 0..10).prop_map(|raw| {
        let mut steps = Vec::new();
        for (i, (kind, label, parent, rejected)) in raw.into_iter().enumerate() {
            let label = label.to_string();
            let id = if i % 2 == 0 { format!("{i}") } else { format!("id {i}") };
            let actions = match kind {
                0 => vec![TraceAction::Execute { label }],
                1 => vec![TraceAction::Terminate],
                2 => vec![TraceAction::Start { label, instance: id, parent: parent.map(|p| p.to_string()) }],
                _ => vec![
                    TraceAction::Start { label: label.clone(), instance: id.clone(), parent: None },
                    TraceAction::Complete { label, instance: id },
                ],
            };
            let n = actions.len();
            for a in actions {
                steps.push(if rejected && n == 1 { TraceStep::rejected(a) } else { TraceStep::new(a) });
            }
        }
        Trace { steps }
    })
}

proptest! {
    #[test]
    fn serialization_round_trips(doc in arb_document()) {
        prop_assume!(validate_model(&doc).is_well_formed());
        let text = serialize_model(&doc);
        let back = parse(&text);
        prop_assert!(back.structurally_eq(&doc));
        prop_assert_eq!(serialize_model(&back), text);
    }

    #[test]
    fn traces_round_trip(trace in arb_trace()) {
        let text = serialize_trace(&trace);
        let back = parse_trace(&SourceDocument::inline(text.clone())).trace.unwrap();
        prop_assert_eq!(serialize_trace(&back), text);
        prop_assert_eq!(back, trace);
    }
}
