//! Reallocation rules: the ascending and descending crawlers, top trading
//! cycles, and sequential priority (serial dictatorship).
//!
//! The crawler sweeps over the live agents in the axis order of their current
//! objects. At each step the leftmost live agent whose best live object lies
//! weakly to the left of his current object is assigned that best object;
//! the rightmost live agent always qualifies, so every step assigns exactly
//! one agent. Removing the assigned object shifts the ownership of every
//! agent between it and the assigned agent one live position to the right,
//! which the positional pairing below performs implicitly.

use crate::domain::{
    validate_problem, AgentOrder, Assignment, ObjectId, PreferenceRelation, Problem,
    ValidationIssue,
};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("invalid problem: {}", format_issues(.0))]
    InvalidProblem(Vec<ValidationIssue>),
    #[error("endowment has {got} entries, expected {expected}")]
    EndowmentSize { expected: usize, got: usize },
    #[error("priority order covers {got} agents, expected {expected}")]
    OrderSize { expected: usize, got: usize },
}

fn format_issues(issues: &[ValidationIssue]) -> String {
    issues
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// One assignment step of a crawler run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepTrace {
    /// 1-based step number.
    pub step: usize,
    /// Agent assigned at this step (0-based).
    pub agent: usize,
    /// Object he receives.
    pub object: ObjectId,
    /// Agents whose current object moved one live position, in axis order.
    pub shifted: Vec<usize>,
}

/// Renders steps one per line in a stable format. `names[k]` is the display
/// name of object `k`; pass `None` for the canonical names. Agents print
/// 1-based.
pub fn render_trace(steps: &[StepTrace], names: Option<&[String]>) -> String {
    let mut out = String::new();
    for s in steps {
        let object = match names {
            Some(names) => names[s.object.0].clone(),
            None => s.object.canonical_name(),
        };
        let shifted = if s.shifted.is_empty() {
            "none".to_string()
        } else {
            s.shifted
                .iter()
                .map(|a| (a + 1).to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        out.push_str(&format!(
            "step {}: agent {} takes {}; shifted agents: {}\n",
            s.step,
            s.agent + 1,
            object,
            shifted
        ));
    }
    out
}

fn check_crawler_input(
    profile: &[PreferenceRelation],
    endowment: &Assignment,
) -> Result<(), RuleError> {
    let problem = Problem::new(profile.to_vec(), Some(endowment.clone()));
    let issues = validate_problem(&problem);
    if !issues.is_empty() {
        return Err(RuleError::InvalidProblem(issues));
    }
    Ok(())
}

fn check_strict_profile(profile: &[PreferenceRelation]) -> Result<(), RuleError> {
    let n = profile.len();
    if n == 0 {
        return Err(RuleError::InvalidProblem(vec![ValidationIssue::new(
            "empty",
            "problem has no agents",
        )]));
    }
    for (i, pref) in profile.iter().enumerate() {
        if pref.n() != n {
            return Err(RuleError::InvalidProblem(vec![ValidationIssue::new(
                "ranking-length",
                format!("agent {} ranks {} objects, expected {}", i + 1, pref.n(), n),
            )]));
        }
    }
    Ok(())
}

/// Ascending crawler: left-to-right sweep, with the step-by-step trace.
///
/// Requires a single-peaked profile and an endowment of matching size.
pub fn ascending_crawler(
    profile: &[PreferenceRelation],
    endowment: &Assignment,
) -> Result<(Assignment, Vec<StepTrace>), RuleError> {
    check_crawler_input(profile, endowment)?;
    let n = profile.len();

    // Live agents sorted by the axis position of their current object;
    // live_agents[t] currently owns live_objects[t].
    let mut live_agents: Vec<usize> = (0..n).collect();
    live_agents.sort_by_key(|&a| endowment.object_of(a));
    let mut live_objects: Vec<ObjectId> = live_agents
        .iter()
        .map(|&a| endowment.object_of(a))
        .collect();

    let mut result = vec![ObjectId(0); n];
    let mut steps = Vec::with_capacity(n);

    for step in 1..=n {
        let m = live_agents.len();
        // Leftmost live agent preferring his current object to its right
        // neighbor; the rightmost always qualifies.
        let t = (0..m)
            .find(|&t| {
                t == m - 1 || profile[live_agents[t]].prefers(live_objects[t], live_objects[t + 1])
            })
            .expect("the rightmost live agent always qualifies");
        let agent = live_agents[t];
        let is_live = |o: ObjectId| live_objects.binary_search(&o).is_ok();
        let object = profile[agent]
            .best_among(is_live)
            .expect("a live agent has a live best object");
        let j = live_objects
            .binary_search(&object)
            .expect("assigned object is live");
        debug_assert!(j <= t, "the assigned object lies weakly left of the agent");

        result[agent] = object;
        steps.push(StepTrace {
            step,
            agent,
            object,
            shifted: live_agents[j..t].to_vec(),
        });

        // Dropping the object and the agent pairs each intervening agent
        // with the next object to the right.
        live_objects.remove(j);
        live_agents.remove(t);
    }

    let assignment = Assignment::new(result).expect("crawler output is a bijection");
    Ok((assignment, steps))
}

/// Descending crawler: the ascending sweep on the reversed axis, mapped back.
///
/// The trace reports the mirrored sweep in original labels: step `k` assigns
/// the same agent/object pair the right-to-left sweep assigns, and `shifted`
/// lists the agents whose objects moved one live position leftward.
pub fn descending_crawler(
    profile: &[PreferenceRelation],
    endowment: &Assignment,
) -> Result<(Assignment, Vec<StepTrace>), RuleError> {
    check_crawler_input(profile, endowment)?;
    let reflected_profile: Vec<PreferenceRelation> =
        profile.iter().map(PreferenceRelation::reflected).collect();
    let (mirrored, steps) = ascending_crawler(&reflected_profile, &endowment.reflected())?;
    let n = profile.len();
    let steps = steps
        .into_iter()
        .map(|s| StepTrace {
            step: s.step,
            agent: s.agent,
            object: ObjectId(n - 1 - s.object.0),
            shifted: s.shifted,
        })
        .collect();
    Ok((mirrored.reflected(), steps))
}

/// Crawler outcome at a fixed endowment, allocation only.
pub fn crawler(
    profile: &[PreferenceRelation],
    endowment: &Assignment,
) -> Result<Assignment, RuleError> {
    Ok(ascending_crawler(profile, endowment)?.0)
}

/// Top trading cycles from `endowment`. Strict preferences suffice;
/// single-peakedness is not required.
pub fn ttc(profile: &[PreferenceRelation], endowment: &Assignment) -> Result<Assignment, RuleError> {
    check_strict_profile(profile)?;
    let n = profile.len();
    if endowment.n() != n {
        return Err(RuleError::EndowmentSize {
            expected: n,
            got: endowment.n(),
        });
    }
    let mut live = vec![true; n];
    let mut owner = vec![0usize; n];
    for agent in 0..n {
        owner[endowment.object_of(agent).0] = agent;
    }
    let mut result = vec![ObjectId(0); n];
    let mut remaining = n;

    while remaining > 0 {
        // Each live agent points at the owner of his best live object.
        let mut target = vec![usize::MAX; n];
        for agent in (0..n).filter(|&a| live[a]) {
            let best = profile[agent]
                .best_among(|o| live[owner[o.0]])
                .expect("live objects exist");
            target[agent] = owner[best.0];
        }
        // Every functional graph on the live agents contains a cycle; clear
        // all of them simultaneously.
        let mut on_cycle = vec![false; n];
        for start in (0..n).filter(|&a| live[a]) {
            let mut seen = vec![false; n];
            let mut a = start;
            while !seen[a] {
                seen[a] = true;
                a = target[a];
            }
            // `a` now lies on a cycle; mark it all the way around.
            let entry = a;
            loop {
                on_cycle[a] = true;
                a = target[a];
                if a == entry {
                    break;
                }
            }
        }
        let cleared: Vec<usize> = (0..n).filter(|&a| live[a] && on_cycle[a]).collect();
        debug_assert!(!cleared.is_empty());
        for &agent in &cleared {
            result[agent] = endowment.object_of(target[agent]);
        }
        for &agent in &cleared {
            live[agent] = false;
            remaining -= 1;
        }
    }

    Ok(Assignment::new(result).expect("trading cycles output is a bijection"))
}

/// Serial dictatorship: agents pick their best remaining object in priority
/// order. Strict preferences suffice.
pub fn sequential_priority(
    profile: &[PreferenceRelation],
    order: &AgentOrder,
) -> Result<Assignment, RuleError> {
    check_strict_profile(profile)?;
    let n = profile.len();
    if order.n() != n {
        return Err(RuleError::OrderSize {
            expected: n,
            got: order.n(),
        });
    }
    let mut taken = vec![false; n];
    let mut result = vec![ObjectId(0); n];
    for rank in 0..n {
        let agent = order.agent_at_rank(rank);
        let best = profile[agent]
            .best_among(|o| !taken[o.0])
            .expect("an object remains for every agent");
        taken[best.0] = true;
        result[agent] = best;
    }
    Ok(Assignment::new(result).expect("sequential priority output is a bijection"))
}
