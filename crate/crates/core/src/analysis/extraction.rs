use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::AnalysisError;
use crate::model::{ActivityDecl, ConstraintInstance, Document, ProcessModel, Template};

/// Boundary constraints that every member shares with the same outside
/// activity, in the same orientation. They collapse into one constraint on
/// the new complex activity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AggregatedConstraint {
    pub template: Template,
    pub outside: String,
    /// Whether the member is the first operand.
    pub member_first: bool,
    pub replaced: Vec<ConstraintInstance>,
}

impl AggregatedConstraint {
    /// The single constraint that replaces the per-member ones.
    pub fn on(&self, complex: &str) -> ConstraintInstance {
        let (a, b) = if self.member_first {
            (complex.to_string(), self.outside.clone())
        } else {
            (self.outside.clone(), complex.to_string())
        };
        ConstraintInstance::binary(self.template, a, b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtractionReport {
    /// The process that declares the members.
    pub model: String,
    pub members: Vec<String>,
    pub feasible: bool,
    pub aggregated: Vec<AggregatedConstraint>,
    /// Boundary constraints not shared by every member.
    pub blocking: Vec<ConstraintInstance>,
    /// Constraints over members only; they move into the sub-process.
    pub internal: Vec<ConstraintInstance>,
}

/// (template, outside activity, member is first operand)
type GroupKey = (Template, String, bool);

fn locate_members(doc: &Document, members: &[String]) -> Result<(usize, BTreeSet<String>), AnalysisError> {
    if members.is_empty() {
        return Err(AnalysisError::NoMembers);
    }
    let mut owners = BTreeSet::new();
    for m in members {
        let owner = doc
            .models
            .iter()
            .position(|model| model.activity(m).is_some())
            .ok_or_else(|| AnalysisError::UnknownMember(m.clone()))?;
        owners.insert(owner);
    }
    if owners.len() > 1 {
        return Err(AnalysisError::MembersSpanModels(
            owners.into_iter().map(|i| doc.models[i].name.clone()).collect(),
        ));
    }
    let owner = owners.into_iter().next().expect("non-empty");
    Ok((owner, members.iter().cloned().collect()))
}

/// Partitions the constraints around `members` into internal, aggregable
/// and blocking ones. Extraction is feasible iff nothing blocks.
pub fn check_extraction(doc: &Document, members: &[String]) -> Result<ExtractionReport, AnalysisError> {
    let (owner, members) = locate_members(doc, members)?;
    let model = &doc.models[owner];

    let mut internal = Vec::new();
    let mut groups: BTreeMap<GroupKey, (BTreeSet<String>, Vec<ConstraintInstance>)> = BTreeMap::new();
    for c in &model.constraints {
        let inside: Vec<bool> = c.operands.iter().map(|o| members.contains(o)).collect();
        match inside.as_slice() {
            [true] | [true, true] => internal.push(c.clone()),
            [true, false] | [false, true] => {
                let member_first = inside[0];
                let (member, outside) = if member_first {
                    (&c.operands[0], &c.operands[1])
                } else {
                    (&c.operands[1], &c.operands[0])
                };
                let entry = groups.entry((c.template, outside.clone(), member_first)).or_default();
                entry.0.insert(member.clone());
                entry.1.push(c.clone());
            }
            _ => {}
        }
    }

    let mut aggregated = Vec::new();
    let mut blocking = Vec::new();
    for ((template, outside, member_first), (covered, constraints)) in groups {
        if covered == members {
            aggregated.push(AggregatedConstraint { template, outside, member_first, replaced: constraints });
        } else {
            blocking.extend(constraints);
        }
    }

    Ok(ExtractionReport {
        model: model.name.clone(),
        members: members.into_iter().collect(),
        feasible: blocking.is_empty(),
        aggregated,
        blocking,
        internal,
    })
}

/// Moves `members` into a new sub-process `name`, introduced through a
/// complex activity of the same name. Internal constraints move with the
/// members; aggregable boundary constraints become one constraint each on
/// the complex activity.
pub fn extract_subprocess(doc: &Document, members: &[String], name: &str) -> Result<Document, AnalysisError> {
    let report = check_extraction(doc, members)?;
    if !report.feasible {
        return Err(AnalysisError::Infeasible(Box::new(report)));
    }
    if doc.model(name).is_some() || doc.owner_of(name).is_some() {
        return Err(AnalysisError::NameCollision(name.to_string()));
    }

    let mut out = doc.clone();
    let parent = out.model_mut(&report.model).expect("reported model exists");
    let member_set: BTreeSet<&String> = report.members.iter().collect();

    let mut sub = ProcessModel::new(name);
    let first_member = parent.activities.iter().position(|a| member_set.contains(&a.name));
    sub.activities = parent.activities.iter().filter(|a| member_set.contains(&a.name)).cloned().collect();
    parent.activities.retain(|a| !member_set.contains(&a.name));
    let at = first_member.unwrap_or(parent.activities.len()).min(parent.activities.len());
    parent.activities.insert(at, ActivityDecl::complex(name, name));

    sub.constraints = report.internal.clone();
    let replaced: BTreeSet<&ConstraintInstance> = report.aggregated.iter().flat_map(|a| a.replaced.iter()).collect();
    parent.constraints.retain(|c| !replaced.contains(c) && !report.internal.contains(c));
    parent.constraints.extend(report.aggregated.iter().map(|a| a.on(name)));

    out.models.push(sub);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::validate_model;

    fn members() -> Vec<String> {
        fixtures::REVISION_MEMBERS.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn revision_members_aggregate() {
        let flat = fixtures::model(fixtures::PAPER_WRITING_FLAT);
        let report = check_extraction(&flat, &members()).unwrap();
        assert!(report.feasible);
        assert_eq!(report.aggregated.len(), 1);
        let agg = &report.aggregated[0];
        assert_eq!(agg.template, Template::NegResponse);
        assert_eq!(agg.outside, "Get acceptance");
        assert!(!agg.member_first);
        assert_eq!(agg.replaced.len(), 3);
        assert_eq!(report.internal.len(), 2);
        assert!(report.blocking.is_empty());
    }

    #[test]
    fn extraction_yields_the_hierarchical_fixture() {
        let flat = fixtures::model(fixtures::PAPER_WRITING_FLAT);
        let hier = extract_subprocess(&flat, &members(), "Revise paper").unwrap();
        assert!(validate_model(&hier).is_well_formed());
        let expected = fixtures::model(fixtures::PAPER_WRITING_HIERARCHICAL);
        assert!(hier.structurally_eq(&expected), "{hier:#?}");
        let sub = hier.model("Revise paper").unwrap();
        assert!(sub.constraints.contains(&ConstraintInstance::counting(Template::Existence, 1, "Work on revision")));
    }

    #[test]
    fn missing_shared_constraint_blocks() {
        let mut m = members();
        m.push("Submit paper".into());
        let flat = fixtures::model(fixtures::PAPER_WRITING_FLAT);
        let report = check_extraction(&flat, &m).unwrap();
        assert!(!report.feasible);
        assert!(report.aggregated.is_empty());
        assert!(report.blocking.contains(&ConstraintInstance::binary(
            Template::NegResponse,
            "Get acceptance",
            "Work on revision"
        )));
        assert!(matches!(extract_subprocess(&flat, &m, "X"), Err(AnalysisError::Infeasible(_))));
    }

    #[test]
    fn singleton_with_unary_constraints_only() {
        let flat = fixtures::model(fixtures::DECLARATIVE_BASICS);
        let report = check_extraction(&flat, &["A".to_string()]).unwrap();
        assert!(report.feasible);
        assert!(report.aggregated.is_empty());
        assert_eq!(report.internal, vec![ConstraintInstance::counting(Template::Existence, 1, "A")]);
    }

    #[test]
    fn member_errors() {
        let doc = fixtures::model(fixtures::SUBPROCESS);
        assert!(matches!(check_extraction(&doc, &[]), Err(AnalysisError::NoMembers)));
        assert!(matches!(check_extraction(&doc, &["Q".into()]), Err(AnalysisError::UnknownMember(_))));
        assert!(matches!(
            check_extraction(&doc, &["A".into(), "C".into()]),
            Err(AnalysisError::MembersSpanModels(_))
        ));
        assert!(matches!(
            extract_subprocess(&doc, &["A".into()], "Inner"),
            Err(AnalysisError::NameCollision(_))
        ));
    }
}
