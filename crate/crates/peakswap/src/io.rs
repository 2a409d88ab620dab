//! JSON problem documents and the priority-order string format.
//!
//! A problem document declares `n`, an optional `axis` of object names, `n`
//! preference rankings, and an optional endowment. Rankings and endowments
//! reference objects either by axis name or by 0-based axis index; parsing
//! resolves everything to indices and validates the result, collecting every
//! issue instead of stopping at the first. Serialization normalizes to names
//! whenever an axis is present, so parse → serialize → parse is the
//! identity.

use crate::domain::{
    validate_problem, AgentOrder, Assignment, PreferenceRelation, Problem, ValidationIssue,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid problem document:{}", issues.iter().map(|i| format!("\n  {i}")).collect::<String>())]
    Invalid { issues: Vec<ValidationIssue> },
    #[error("invalid order: {0}")]
    Order(String),
}

/// A reference to an object: an axis name or a 0-based axis index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObjectRef {
    Index(usize),
    Name(String),
}

/// The on-disk problem format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<Vec<String>>,
    pub preferences: Vec<Vec<ObjectRef>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endowment: Option<Vec<ObjectRef>>,
}

/// A validated problem plus the axis names it was written with, if any.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedProblem {
    pub problem: Problem,
    pub names: Option<Vec<String>>,
}

fn resolve(
    refs: &[ObjectRef],
    n: usize,
    axis: Option<&[String]>,
    what: &str,
    issues: &mut Vec<ValidationIssue>,
) -> Option<Vec<usize>> {
    let mut word = Vec::with_capacity(refs.len());
    let mut ok = true;
    for r in refs {
        match r {
            ObjectRef::Index(i) => {
                if *i < n {
                    word.push(*i);
                } else {
                    issues.push(ValidationIssue::new(
                        "index-range",
                        format!("{what} references object index {i}, expected 0..{n}"),
                    ));
                    ok = false;
                }
            }
            ObjectRef::Name(name) => match axis.and_then(|a| a.iter().position(|x| x == name)) {
                Some(i) => word.push(i),
                None => {
                    issues.push(ValidationIssue::new(
                        "unknown-name",
                        format!("{what} references \"{name}\", which is not on the axis"),
                    ));
                    ok = false;
                }
            },
        }
    }
    ok.then_some(word)
}

/// Parses and validates a problem document, reporting every issue found.
pub fn parse_problem(text: &str) -> Result<ParsedProblem, IoError> {
    let doc: ProblemDocument = serde_json::from_str(text)?;
    let mut issues = Vec::new();
    let n = doc.n;
    if n == 0 {
        issues.push(ValidationIssue::new("empty", "problem has no agents"));
    }
    if let Some(axis) = &doc.axis {
        if axis.len() != n {
            issues.push(ValidationIssue::new(
                "axis-length",
                format!("axis names {} objects, expected {n}", axis.len()),
            ));
        }
        for (i, name) in axis.iter().enumerate() {
            if axis[..i].contains(name) {
                issues.push(ValidationIssue::new(
                    "axis-duplicate",
                    format!("axis name \"{name}\" appears more than once"),
                ));
            }
        }
    }
    if doc.preferences.len() != n {
        issues.push(ValidationIssue::new(
            "profile-length",
            format!("{} rankings given, expected {n}", doc.preferences.len()),
        ));
    }

    let axis = doc.axis.as_deref();
    let mut profile = Vec::with_capacity(doc.preferences.len());
    for (agent, refs) in doc.preferences.iter().enumerate() {
        let what = format!("agent {}'s ranking", agent + 1);
        if let Some(word) = resolve(refs, n, axis, &what, &mut issues) {
            match PreferenceRelation::from_indices(word) {
                Ok(p) => profile.push(p),
                Err(e) => issues.push(ValidationIssue::new(
                    "ranking-invalid",
                    format!("{what}: {e}"),
                )),
            }
        }
    }
    let endowment = doc.endowment.as_ref().and_then(|refs| {
        let word = resolve(refs, n, axis, "the endowment", &mut issues)?;
        match Assignment::from_indices(word) {
            Ok(a) => Some(a),
            Err(e) => {
                issues.push(ValidationIssue::new(
                    "endowment-invalid",
                    format!("the endowment: {e}"),
                ));
                None
            }
        }
    });

    if !issues.is_empty() {
        return Err(IoError::Invalid { issues });
    }
    let problem = Problem::new(profile, endowment);
    let issues = validate_problem(&problem);
    if !issues.is_empty() {
        return Err(IoError::Invalid { issues });
    }
    Ok(ParsedProblem {
        problem,
        names: doc.axis,
    })
}

/// The normalized document for a problem: names when an axis is given,
/// indices otherwise.
pub fn to_document(problem: &Problem, names: Option<&[String]>) -> ProblemDocument {
    let as_refs = |word: Vec<usize>| -> Vec<ObjectRef> {
        word.into_iter()
            .map(|i| match names {
                Some(names) => ObjectRef::Name(names[i].clone()),
                None => ObjectRef::Index(i),
            })
            .collect()
    };
    ProblemDocument {
        n: problem.n(),
        axis: names.map(|ns| ns.to_vec()),
        preferences: problem
            .profile
            .iter()
            .map(|p| as_refs(p.indices()))
            .collect(),
        endowment: problem
            .endowment
            .as_ref()
            .map(|e| as_refs(e.indices())),
    }
}

/// Pretty-printed JSON for the normalized document.
pub fn serialize_problem(problem: &Problem, names: Option<&[String]>) -> String {
    serde_json::to_string_pretty(&to_document(problem, names)).expect("document serializes")
}

/// Parses a priority order written as comma-separated 1-based agent numbers,
/// best rank first: `"2,1,3"` puts agent 2 first.
pub fn parse_order(text: &str, n: usize) -> Result<AgentOrder, IoError> {
    let mut word = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        let agent: usize = part
            .parse()
            .map_err(|_| IoError::Order(format!("\"{part}\" is not an agent number")))?;
        if agent == 0 || agent > n {
            return Err(IoError::Order(format!(
                "agent {agent} is out of range 1..={n}"
            )));
        }
        word.push(agent - 1);
    }
    if word.len() != n {
        return Err(IoError::Order(format!(
            "{} agents listed, expected {n}",
            word.len()
        )));
    }
    AgentOrder::new(word).map_err(|e| IoError::Order(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const NAMED: &str = r#"{
        "n": 4,
        "axis": ["w1", "w2", "w3", "w4"],
        "preferences": [
            ["w4", "w3", "w2", "w1"],
            ["w2", "w1", "w3", "w4"],
            ["w1", "w2", "w3", "w4"],
            ["w2", "w1", "w3", "w4"]
        ],
        "endowment": ["w1", "w2", "w3", "w4"]
    }"#;

    #[test]
    fn named_document_parses_and_round_trips() {
        let parsed = parse_problem(NAMED).unwrap();
        assert_eq!(parsed.problem.n(), 4);
        assert_eq!(parsed.problem.profile[0].indices(), vec![3, 2, 1, 0]);
        assert_eq!(
            parsed.problem.endowment.as_ref().unwrap().indices(),
            vec![0, 1, 2, 3]
        );
        let text = serialize_problem(&parsed.problem, parsed.names.as_deref());
        let reparsed = parse_problem(&text).unwrap();
        assert_eq!(reparsed, parsed);
        let again = serialize_problem(&reparsed.problem, reparsed.names.as_deref());
        assert_eq!(again, text);
    }

    #[test]
    fn index_document_parses_without_axis() {
        let text = r#"{"n": 3, "preferences": [[0,1,2],[1,0,2],[2,1,0]]}"#;
        let parsed = parse_problem(text).unwrap();
        assert!(parsed.names.is_none());
        assert!(parsed.problem.endowment.is_none());
        let normalized = serialize_problem(&parsed.problem, None);
        assert_eq!(parse_problem(&normalized).unwrap(), parsed);
    }

    fn issue_codes(err: IoError) -> Vec<&'static str> {
        match err {
            IoError::Invalid { issues } => issues.into_iter().map(|i| i.code).collect(),
            other => panic!("expected validation issues, got {other}"),
        }
    }

    #[test]
    fn every_issue_is_reported() {
        let text = r#"{
            "n": 3,
            "axis": ["a", "a", "b"],
            "preferences": [["a", "b", "c"], [0, 1, 2]],
            "endowment": [0, 0, 5]
        }"#;
        let codes = issue_codes(parse_problem(text).unwrap_err());
        assert!(codes.contains(&"axis-duplicate"));
        assert!(codes.contains(&"profile-length"));
        assert!(codes.contains(&"unknown-name"));
        assert!(codes.contains(&"index-range"));
        assert!(codes.len() >= 4);
    }

    #[test]
    fn semantic_issues_surface_after_resolution() {
        let text = r#"{"n": 3, "preferences": [[0,1,2],[1,0,2],[0,2,1]]}"#;
        let codes = issue_codes(parse_problem(text).unwrap_err());
        assert_eq!(codes, vec!["not-single-peaked"]);

        let text = r#"{"n": 2, "preferences": [[0,1],[1,0]], "endowment": [0,0]}"#;
        let codes = issue_codes(parse_problem(text).unwrap_err());
        assert_eq!(codes, vec!["endowment-invalid"]);
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        assert!(matches!(parse_problem("{"), Err(IoError::Json(_))));
        assert!(matches!(
            parse_problem(r#"{"n": 2, "preferences": [[0,1],[1,0]], "extra": 1}"#),
            Err(IoError::Json(_))
        ));
    }

    #[test]
    fn orders_parse_one_based() {
        assert_eq!(
            parse_order("2, 1, 3", 3).unwrap(),
            AgentOrder::new(vec![1, 0, 2]).unwrap()
        );
        assert!(parse_order("0,1", 2).is_err());
        assert!(parse_order("1,1", 2).is_err());
        assert!(parse_order("1", 2).is_err());
        assert!(parse_order("1,x", 2).is_err());
    }

    fn arb_parsed() -> impl Strategy<Value = ParsedProblem> {
        (1usize..=5)
            .prop_flat_map(|n| {
                let orders = crate::domain::enumerate_single_peaked(n).unwrap();
                let count = orders.len();
                let profile = proptest::collection::vec(0..count, n).prop_map(move |picks| {
                    picks.iter().map(|&k| orders[k].clone()).collect::<Vec<_>>()
                });
                let names = any::<bool>().prop_map(move |named| {
                    named.then(|| (0..n).map(|i| format!("obj{}", i + 1)).collect::<Vec<_>>())
                });
                let endowment = proptest::option::of(proptest::sample::select(
                    crate::domain::all_assignments(n).collect::<Vec<_>>(),
                ));
                (profile, names, endowment)
            })
            .prop_map(|(profile, names, endowment)| ParsedProblem {
                problem: Problem::new(profile, endowment),
                names,
            })
    }

    proptest! {
        #[test]
        fn serialization_round_trips(parsed in arb_parsed()) {
            let text = serialize_problem(&parsed.problem, parsed.names.as_deref());
            let reparsed = parse_problem(&text).unwrap();
            prop_assert_eq!(&reparsed, &parsed);
            let again = serialize_problem(&reparsed.problem, reparsed.names.as_deref());
            prop_assert_eq!(again, text);
        }
    }
}
