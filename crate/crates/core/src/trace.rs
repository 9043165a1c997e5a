//! Execution traces as written in `.dpt` files.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceAction {
    /// Merged start and completion of a non-overlapping activity.
    Execute { label: String },
    Start {
        label: String,
        instance: String,
        /// Instance id of the complex activity whose sub-process hosts this
        /// start. Only needed when several candidate scopes are running.
        parent: Option<String>,
    },
    Complete { label: String, instance: String },
    Terminate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub action: TraceAction,
    /// The step must be rejected; a fixture assertion.
    #[serde(default)]
    pub expect_reject: bool,
}

impl TraceStep {
    pub fn new(action: TraceAction) -> Self {
        TraceStep { action, expect_reject: false }
    }

    pub fn rejected(action: TraceAction) -> Self {
        TraceStep { action, expect_reject: true }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
}

impl Trace {
    /// Merged trace of the given labels, optionally followed by termination.
    pub fn merged<I, S>(labels: I, terminate: bool) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut steps: Vec<TraceStep> = labels
            .into_iter()
            .map(|l| TraceStep::new(TraceAction::Execute { label: l.into() }))
            .collect();
        if terminate {
            steps.push(TraceStep::new(TraceAction::Terminate));
        }
        Trace { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Expands merged steps into a start/complete pair with generated
    /// instance ids (`m<step>`). A merged step expected to be rejected
    /// expands to its start only.
    pub fn expanded(&self) -> Trace {
        let mut steps = Vec::new();
        for (i, step) in self.steps.iter().enumerate() {
            match &step.action {
                TraceAction::Execute { label } => {
                    let instance = format!("m{i}");
                    steps.push(TraceStep {
                        action: TraceAction::Start { label: label.clone(), instance: instance.clone(), parent: None },
                        expect_reject: step.expect_reject,
                    });
                    if !step.expect_reject {
                        steps.push(TraceStep::new(TraceAction::Complete { label: label.clone(), instance }));
                    }
                }
                _ => steps.push(step.clone()),
            }
        }
        Trace { steps }
    }
}
