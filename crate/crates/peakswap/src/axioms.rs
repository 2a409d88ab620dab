//! Axiom checkers: efficiency, the endowment lower bound,
//! strategy-proofness, non-bossiness, blocking coalitions, and the core.
//!
//! Every checker is exhaustive and deterministic. Searches iterate in
//! lexicographic order (agents ascending, misreports in enumeration order,
//! coalitions by size then lexicographically), so a reported witness is
//! always the lexicographically smallest one.

use crate::domain::{
    all_assignments, enumerate_single_peaked, lex_permutations, Assignment, ObjectId,
    PreferenceRelation,
};
use crate::rules::RuleError;
use itertools::Itertools;
use serde::Serialize;
use thiserror::Error;

/// Largest `n` for which `is_efficient` enumerates all `n!` allocations.
pub const MAX_EFFICIENCY_N: usize = 8;
/// Largest `n` for which blocking coalitions are enumerated.
pub const MAX_BLOCKING_N: usize = 8;
/// Largest `n` for which the full core is enumerated.
pub const MAX_CORE_N: usize = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AxiomsError {
    #[error("{check} enumerates exhaustively and is limited to {bound} agents, got {n}")]
    Capability {
        check: &'static str,
        n: usize,
        bound: usize,
    },
    #[error(transparent)]
    Rule(#[from] RuleError),
}

/// A concrete witness that an axiom fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `by` makes every agent weakly better off and someone strictly.
    Dominated { by: Assignment },
    /// `agent` strictly prefers his endowment to his assigned object.
    BelowEndowment { agent: usize },
    /// Reporting `misreport` instead of the truth gets `agent` a strictly
    /// better object by his true preferences.
    Manipulable {
        agent: usize,
        misreport: PreferenceRelation,
        truthful_object: ObjectId,
        misreport_object: ObjectId,
    },
    /// `misreport` leaves `agent`'s own object unchanged but changes the
    /// overall allocation.
    Bossy {
        agent: usize,
        misreport: PreferenceRelation,
        truthful: Assignment,
        misreported: Assignment,
    },
    /// `coalition` can weakly improve every member and strictly improve one
    /// by redistributing its own endowments as `reallocation`.
    Blocked {
        coalition: Vec<usize>,
        reallocation: Vec<(usize, ObjectId)>,
    },
}

/// Outcome of a single axiom check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomCheck {
    Holds,
    Violated(Violation),
}

impl AxiomCheck {
    pub fn holds(&self) -> bool {
        matches!(self, AxiomCheck::Holds)
    }

    pub fn violation(&self) -> Option<&Violation> {
        match self {
            AxiomCheck::Holds => None,
            AxiomCheck::Violated(v) => Some(v),
        }
    }
}

/// Which rankings an agent may submit instead of the truth.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MisreportDomain {
    SinglePeaked,
    AllStrict,
}

fn misreports(domain: MisreportDomain, n: usize) -> Vec<PreferenceRelation> {
    match domain {
        MisreportDomain::SinglePeaked => {
            enumerate_single_peaked(n).expect("n >= 1 by construction")
        }
        MisreportDomain::AllStrict => lex_permutations(n)
            .map(|w| PreferenceRelation::from_indices(w).expect("permutation is valid"))
            .collect(),
    }
}

fn dominates(y: &Assignment, x: &Assignment, profile: &[PreferenceRelation]) -> bool {
    let mut strict = false;
    for (i, pref) in profile.iter().enumerate() {
        let (yo, xo) = (y.object_of(i), x.object_of(i));
        if pref.prefers(xo, yo) {
            return false;
        }
        if pref.prefers(yo, xo) {
            strict = true;
        }
    }
    strict
}

/// Whether no allocation makes every agent weakly better off and someone
/// strictly better off than `x`. On failure the witness is the
/// lexicographically first dominating allocation.
pub fn is_efficient(
    x: &Assignment,
    profile: &[PreferenceRelation],
) -> Result<AxiomCheck, AxiomsError> {
    let n = profile.len();
    if n > MAX_EFFICIENCY_N {
        return Err(AxiomsError::Capability {
            check: "is_efficient",
            n,
            bound: MAX_EFFICIENCY_N,
        });
    }
    for y in all_assignments(n) {
        if dominates(&y, x, profile) {
            return Ok(AxiomCheck::Violated(Violation::Dominated { by: y }));
        }
    }
    Ok(AxiomCheck::Holds)
}

/// Whether every agent weakly prefers his assigned object to his endowment.
pub fn meets_endowment_lower_bound(
    x: &Assignment,
    profile: &[PreferenceRelation],
    endowment: &Assignment,
) -> AxiomCheck {
    for (agent, pref) in profile.iter().enumerate() {
        if pref.prefers(endowment.object_of(agent), x.object_of(agent)) {
            return AxiomCheck::Violated(Violation::BelowEndowment { agent });
        }
    }
    AxiomCheck::Holds
}

/// Searches for an agent and a misreport that strictly improve his outcome,
/// trying agents in ascending order and misreports in enumeration order, so
/// the witness is the lexicographically smallest one. `rule` maps a reported
/// profile to an allocation; `Ok(None)` means no manipulation exists.
pub fn find_strategyproofness_violation<R>(
    rule: R,
    profile: &[PreferenceRelation],
    domain: MisreportDomain,
) -> Result<Option<Violation>, AxiomsError>
where
    R: Fn(&[PreferenceRelation]) -> Result<Assignment, RuleError>,
{
    let n = profile.len();
    let truthful = rule(profile)?;
    let candidates = misreports(domain, n);
    let mut reported = profile.to_vec();
    for agent in 0..n {
        for misreport in &candidates {
            if *misreport == profile[agent] {
                continue;
            }
            reported[agent] = misreport.clone();
            let outcome = rule(&reported)?;
            let (truthful_object, misreport_object) =
                (truthful.object_of(agent), outcome.object_of(agent));
            if profile[agent].prefers(misreport_object, truthful_object) {
                return Ok(Some(Violation::Manipulable {
                    agent,
                    misreport: misreport.clone(),
                    truthful_object,
                    misreport_object,
                }));
            }
        }
        reported[agent] = profile[agent].clone();
    }
    Ok(None)
}

/// Searches for an agent and a misreport that keep his own object fixed but
/// change someone else's; same iteration order as the strategy-proofness
/// search.
pub fn find_bossiness_violation<R>(
    rule: R,
    profile: &[PreferenceRelation],
    domain: MisreportDomain,
) -> Result<Option<Violation>, AxiomsError>
where
    R: Fn(&[PreferenceRelation]) -> Result<Assignment, RuleError>,
{
    let n = profile.len();
    let truthful = rule(profile)?;
    let candidates = misreports(domain, n);
    let mut reported = profile.to_vec();
    for agent in 0..n {
        for misreport in &candidates {
            if *misreport == profile[agent] {
                continue;
            }
            reported[agent] = misreport.clone();
            let outcome = rule(&reported)?;
            if outcome.object_of(agent) == truthful.object_of(agent) && outcome != truthful {
                return Ok(Some(Violation::Bossy {
                    agent,
                    misreport: misreport.clone(),
                    truthful,
                    misreported: outcome,
                }));
            }
        }
        reported[agent] = profile[agent].clone();
    }
    Ok(None)
}

/// Searches for a coalition that blocks `x` by redistributing its own
/// endowments: every member weakly gains and at least one strictly gains.
/// Coalitions are tried by size ascending, then lexicographically; internal
/// reallocations lexicographically.
pub fn find_blocking_coalition(
    x: &Assignment,
    profile: &[PreferenceRelation],
    endowment: &Assignment,
) -> Result<Option<Violation>, AxiomsError> {
    let n = profile.len();
    if n > MAX_BLOCKING_N {
        return Err(AxiomsError::Capability {
            check: "find_blocking_coalition",
            n,
            bound: MAX_BLOCKING_N,
        });
    }
    for size in 1..=n {
        for coalition in (0..n).combinations(size) {
            let mut owned: Vec<ObjectId> =
                coalition.iter().map(|&i| endowment.object_of(i)).collect();
            owned.sort();
            for objects in owned.iter().copied().permutations(size) {
                let mut strict = false;
                let mut weak = true;
                for (&agent, &obj) in coalition.iter().zip(objects.iter()) {
                    let current = x.object_of(agent);
                    if profile[agent].prefers(current, obj) {
                        weak = false;
                        break;
                    }
                    if profile[agent].prefers(obj, current) {
                        strict = true;
                    }
                }
                if weak && strict {
                    return Ok(Some(Violation::Blocked {
                        coalition: coalition.clone(),
                        reallocation: coalition.iter().copied().zip(objects).collect(),
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// All allocations no coalition blocks, in lexicographic order.
pub fn core_allocations(
    profile: &[PreferenceRelation],
    endowment: &Assignment,
) -> Result<Vec<Assignment>, AxiomsError> {
    let n = profile.len();
    if n > MAX_CORE_N {
        return Err(AxiomsError::Capability {
            check: "core_allocations",
            n,
            bound: MAX_CORE_N,
        });
    }
    let mut out = Vec::new();
    for x in all_assignments(n) {
        if find_blocking_coalition(&x, profile, endowment)?.is_none() {
            out.push(x);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::AgentOrder;
    use crate::rules::{crawler, sequential_priority, ttc};
    use itertools::Itertools;

    fn prefs(words: &[&[usize]]) -> Vec<PreferenceRelation> {
        words
            .iter()
            .map(|w| PreferenceRelation::from_indices(w.to_vec()).unwrap())
            .collect()
    }

    fn contested_middle_4() -> (Vec<PreferenceRelation>, Assignment) {
        let profile = prefs(&[
            &[3, 2, 1, 0],
            &[1, 0, 2, 3],
            &[0, 1, 2, 3],
            &[1, 0, 2, 3],
        ]);
        (profile, Assignment::identity(4))
    }

    fn asg(word: &[usize]) -> Assignment {
        Assignment::from_indices(word.to_vec()).unwrap()
    }

    #[test]
    fn endowment_can_be_inefficient() {
        let (profile, endowment) = contested_middle_4();
        let check = is_efficient(&endowment, &profile).unwrap();
        let Some(Violation::Dominated { by }) = check.violation().cloned() else {
            panic!("expected a dominating allocation, got {check:?}");
        };
        assert!(dominates(&by, &endowment, &profile));
        assert_eq!(by, asg(&[2, 1, 0, 3]), "witness is the lexicographic minimum");
        // Another allocation that dominates the endowment, not the returned one.
        assert!(dominates(&asg(&[3, 1, 0, 2]), &endowment, &profile));
    }

    #[test]
    fn rule_outputs_are_efficient_on_fixture() {
        let (profile, endowment) = contested_middle_4();
        let cr = crawler(&profile, &endowment).unwrap();
        let tc = ttc(&profile, &endowment).unwrap();
        assert!(is_efficient(&cr, &profile).unwrap().holds());
        assert!(is_efficient(&tc, &profile).unwrap().holds());
    }

    #[test]
    fn endowment_lower_bound_witness() {
        let (profile, endowment) = contested_middle_4();
        let cr = crawler(&profile, &endowment).unwrap();
        assert!(meets_endowment_lower_bound(&cr, &profile, &endowment).holds());
        assert_eq!(
            meets_endowment_lower_bound(&asg(&[1, 0, 2, 3]), &profile, &endowment),
            AxiomCheck::Violated(Violation::BelowEndowment { agent: 1 })
        );
    }

    #[test]
    fn efficiency_capability_bound() {
        let n = MAX_EFFICIENCY_N + 1;
        let profile: Vec<PreferenceRelation> = enumerate_single_peaked(n)
            .unwrap()
            .into_iter()
            .take(n)
            .collect();
        assert_eq!(
            is_efficient(&Assignment::identity(n), &profile).unwrap_err(),
            AxiomsError::Capability {
                check: "is_efficient",
                n,
                bound: MAX_EFFICIENCY_N
            }
        );
    }

    /// Serial dictatorship whose first dictator is chosen by the object
    /// agent 1 ranks last: an obviously manipulable, bossy rule.
    fn last_pick_dictator(profile: &[PreferenceRelation]) -> Result<Assignment, RuleError> {
        let n = profile.len();
        let first = profile[0].ranking().last().unwrap().0;
        let mut by_rank = vec![first];
        by_rank.extend((0..n).filter(|&a| a != first));
        sequential_priority(profile, &AgentOrder::new(by_rank).unwrap())
    }

    #[test]
    fn manipulable_rule_is_caught() {
        let profile = prefs(&[&[1, 0, 2], &[0, 1, 2], &[1, 0, 2]]);
        let found =
            find_strategyproofness_violation(last_pick_dictator, &profile, MisreportDomain::SinglePeaked)
                .unwrap();
        let Some(Violation::Manipulable {
            agent, misreport, ..
        }) = found
        else {
            panic!("expected a manipulation, got {found:?}");
        };
        assert_eq!(agent, 0);
        assert_eq!(misreport.indices(), vec![1, 2, 0]);
    }

    /// Serial dictatorship in id order, but agent 1's last-ranked object
    /// being the leftmost swaps the objects of agents 2 and 3.
    fn toggled_swap(profile: &[PreferenceRelation]) -> Result<Assignment, RuleError> {
        let base = sequential_priority(profile, &AgentOrder::identity(profile.len()))?;
        let mut word = base.indices();
        if profile[0].ranking().last().unwrap().0 == 0 {
            word.swap(1, 2);
        }
        Ok(Assignment::from_indices(word).expect("swap keeps a permutation"))
    }

    #[test]
    fn bossy_rule_is_caught() {
        let profile = prefs(&[&[1, 0, 2], &[0, 1, 2], &[0, 1, 2]]);
        let found =
            find_bossiness_violation(toggled_swap, &profile, MisreportDomain::SinglePeaked).unwrap();
        let Some(Violation::Bossy {
            agent,
            misreport,
            truthful,
            misreported,
        }) = found
        else {
            panic!("expected a bossiness witness, got {found:?}");
        };
        assert_eq!(agent, 0);
        assert_eq!(misreport.indices(), vec![1, 2, 0]);
        assert_eq!(truthful.object_of(0), misreported.object_of(0));
        assert_ne!(truthful, misreported);
    }

    #[test]
    fn crawler_and_ttc_resist_manipulation_small() {
        for n in 1..=3 {
            let orders = enumerate_single_peaked(n).unwrap();
            for profile in (0..n).map(|_| orders.iter()).multi_cartesian_product() {
                let profile: Vec<PreferenceRelation> = profile.into_iter().cloned().collect();
                for endowment in all_assignments(n) {
                    let as_crawler = |p: &[PreferenceRelation]| crawler(p, &endowment);
                    let as_ttc = |p: &[PreferenceRelation]| ttc(p, &endowment);
                    assert_eq!(
                        find_strategyproofness_violation(
                            as_crawler,
                            &profile,
                            MisreportDomain::SinglePeaked
                        )
                        .unwrap(),
                        None
                    );
                    assert_eq!(
                        find_strategyproofness_violation(
                            as_ttc,
                            &profile,
                            MisreportDomain::SinglePeaked
                        )
                        .unwrap(),
                        None
                    );
                    assert_eq!(
                        find_bossiness_violation(as_crawler, &profile, MisreportDomain::SinglePeaked)
                            .unwrap(),
                        None
                    );
                    assert_eq!(
                        find_bossiness_violation(as_ttc, &profile, MisreportDomain::SinglePeaked)
                            .unwrap(),
                        None
                    );
                }
            }
        }
    }

    #[test]
    fn blocking_witness_is_lexicographic_minimum() {
        let (profile, endowment) = contested_middle_4();
        let found = find_blocking_coalition(&endowment, &profile, &endowment).unwrap();
        assert_eq!(
            found,
            Some(Violation::Blocked {
                coalition: vec![0, 2],
                reallocation: vec![(0, ObjectId(2)), (2, ObjectId(0))],
            })
        );
        // The grand coalition also blocks, via the crawler outcome.
        let y = asg(&[3, 1, 0, 2]);
        assert!(dominates(&y, &endowment, &profile));
    }

    #[test]
    fn ttc_outcome_is_unblocked() {
        let (profile, endowment) = contested_middle_4();
        let tc = ttc(&profile, &endowment).unwrap();
        assert_eq!(find_blocking_coalition(&tc, &profile, &endowment).unwrap(), None);
    }

    #[test]
    fn core_is_exactly_ttc_small() {
        for n in 1..=3 {
            let orders = enumerate_single_peaked(n).unwrap();
            for profile in (0..n).map(|_| orders.iter()).multi_cartesian_product() {
                let profile: Vec<PreferenceRelation> = profile.into_iter().cloned().collect();
                for endowment in all_assignments(n) {
                    let core = core_allocations(&profile, &endowment).unwrap();
                    let tc = ttc(&profile, &endowment).unwrap();
                    assert_eq!(core, vec![tc], "profile={profile:?} endow={endowment:?}");
                }
            }
        }
    }

    #[test]
    fn core_on_fixture() {
        let (profile, endowment) = contested_middle_4();
        assert_eq!(
            core_allocations(&profile, &endowment).unwrap(),
            vec![asg(&[3, 1, 2, 0])]
        );
    }

    #[test]
    fn singleton_blocking_matches_endowment_bound() {
        // A singleton coalition blocks exactly when the endowment lower
        // bound fails for that agent.
        let n = 3;
        let orders = enumerate_single_peaked(n).unwrap();
        for profile in (0..n).map(|_| orders.iter()).multi_cartesian_product() {
            let profile: Vec<PreferenceRelation> = profile.into_iter().cloned().collect();
            let endowment = Assignment::identity(n);
            for x in all_assignments(n) {
                let elb = meets_endowment_lower_bound(&x, &profile, &endowment);
                let singleton_blocks = (0..n).any(|i| {
                    profile[i].prefers(endowment.object_of(i), x.object_of(i))
                });
                assert_eq!(!elb.holds(), singleton_blocks);
            }
        }
    }
}
