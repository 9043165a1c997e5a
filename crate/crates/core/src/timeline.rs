//! Step-by-step transcripts of a replay: after every event, which
//! activities are enabled and whether the instance may terminate.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::compiled::CompiledDocument;
use crate::engine::{Blocker, Outcome, RejectReason, ReplayVerdict, Replayer, ScopeId};
use crate::trace::Trace;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TimelineRow {
    /// The event just recorded, `instantiated`, or a rejected step.
    pub label: String,
    pub enabled: Vec<(ScopeId, String)>,
    pub may_terminate: bool,
    /// No root constraint blocks termination; running activities may still
    /// have to finish first.
    pub constraints_permit_termination: bool,
}

impl TimelineRow {
    pub fn is_enabled(&self, label: &str) -> bool {
        self.enabled.iter().any(|(_, l)| l == label)
    }
}

impl fmt::Display for TimelineRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let enabled: Vec<String> = self
            .enabled
            .iter()
            .map(|(s, l)| if s.0 == 0 { l.clone() } else { format!("{l}@{s}") })
            .collect();
        write!(
            f,
            "{}; enabled: {}; terminate: {}",
            self.label,
            if enabled.is_empty() { "-".to_string() } else { enabled.join(", ") },
            match (self.may_terminate, self.constraints_permit_termination) {
                (true, _) => "yes",
                (false, true) => "once running activities complete",
                (false, false) => "no",
            }
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Timeline {
    pub rows: Vec<TimelineRow>,
    pub verdict: ReplayVerdict,
}

impl fmt::Display for Timeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            writeln!(f, "{row}")?;
        }
        writeln!(f, "verdict: {}", self.verdict)
    }
}

fn snapshot(replayer: &Replayer, label: String) -> TimelineRow {
    let instance = replayer.instance();
    if instance.is_terminated() {
        return TimelineRow { label, enabled: Vec::new(), may_terminate: false, constraints_permit_termination: false };
    }
    let termination = instance.termination(instance.root());
    TimelineRow {
        label,
        enabled: instance.enabled_activities(),
        may_terminate: termination.allowed,
        constraints_permit_termination: !termination.blockers.iter().any(|b| matches!(b, Blocker::Constraint { .. })),
    }
}

/// Replays the expanded form of `trace`, so that merged steps show up as a
/// start row and a completion row.
pub fn timeline(doc: &Arc<CompiledDocument>, trace: &Trace) -> Timeline {
    let trace = trace.expanded();
    let mut replayer = Replayer::new(Arc::clone(doc));
    let mut rows = vec![snapshot(&replayer, "instantiated".to_string())];
    let reject = |i: usize, reason: RejectReason| ReplayVerdict {
        outcome: Outcome::Rejected,
        failure_index: Some(i),
        reason: Some(reason),
    };
    for (i, step) in trace.steps.iter().enumerate() {
        let logged = replayer.instance().log().len();
        match (replayer.step(&step.action), step.expect_reject) {
            (Ok(()), false) => {
                let event = replayer.instance().log()[logged..].last().expect("step logs an event").to_string();
                rows.push(snapshot(&replayer, event));
            }
            (Err(reason), true) => rows.push(snapshot(&replayer, format!("rejected as expected: {reason}"))),
            (Ok(()), true) => return Timeline { rows, verdict: reject(i, RejectReason::UnexpectedAcceptance) },
            (Err(reason), false) => return Timeline { rows, verdict: reject(i, reason) },
        }
    }
    let verdict = if replayer.instance().is_terminated() {
        ReplayVerdict { outcome: Outcome::Accepted, failure_index: None, reason: None }
    } else {
        reject(trace.len(), RejectReason::MissingTermination)
    };
    Timeline { rows, verdict }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn basics() -> Arc<CompiledDocument> {
        Arc::new(CompiledDocument::new(fixtures::model(fixtures::DECLARATIVE_BASICS)).unwrap())
    }

    #[test]
    fn merged_steps_get_two_rows() {
        let t = timeline(&basics(), &fixtures::trace(fixtures::DECLARATIVE_BASICS_TRACE));
        assert!(t.verdict.accepted());
        assert_eq!(t.rows.len(), 1 + 8 + 1);
        assert!(!t.rows[0].is_enabled("E"));
        assert!(t.rows[6].is_enabled("E"));
        assert_eq!(t.rows[9].label, "e9: terminated");
    }

    #[test]
    fn rejection_stops_the_transcript() {
        let t = timeline(&basics(), &Trace::merged(["E"], true));
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.verdict.failure_index, Some(0));
        let expected = timeline(&basics(), &fixtures::trace("!E A ."));
        assert!(expected.verdict.accepted(), "{expected}");
    }
}
