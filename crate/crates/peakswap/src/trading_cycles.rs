//! A three-agent trading-cycles rule driven by a control-rights structure,
//! and the comparison showing the crawler is not such a rule.
//!
//! A control-rights structure assigns, at every incomplete allocation, each
//! unassigned object to an unassigned agent as either *ownership* or
//! *brokerage*, subject to consistency conditions R1 through R6 (brokerage
//! everywhere at the start, a lone agent owns the rest, a broker controls
//! nothing else, and ownership persists coherently as the allocation grows).
//! The rule itself runs rounds of pointing: objects point at their
//! controllers, agents point at their best unassigned object, cycles that
//! contain an owner clear immediately, and in deadlocks of brokers a
//! contested broker is forced to point one step down his ranking until
//! either an owner-bearing cycle appears or the contest dissolves and all
//! cycles clear at once.
//!
//! [`reproduce_comparison`] builds the two brokerage structures that agree
//! with the crawler on a pivot profile and exhibits, for each, a unanimous
//! profile where the two rules part ways.

use crate::axioms::AxiomsError;
use crate::domain::{Assignment, ObjectId, PreferenceRelation};
use crate::rules::{ascending_crawler, RuleError};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

const N: usize = 3;

#[derive(Debug, Error)]
pub enum TradingCyclesError {
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Axioms(#[from] AxiomsError),
    #[error("this trading-cycles rule is defined for exactly 3 agents, got {0}")]
    WrongSize(usize),
    #[error("control-rights structure violates {condition}: {detail}")]
    InvalidStructure {
        condition: &'static str,
        detail: String,
    },
    #[error("partial allocation reuses an agent or object: {0}")]
    DuplicateAssignment(String),
    #[error("the rule stalled: {0}")]
    NoProgress(String),
}

/// An assignment of objects to a subset of the agents.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PartialAllocation {
    /// Sorted by agent; agents and objects each appear at most once.
    pairs: Vec<(usize, ObjectId)>,
}

impl PartialAllocation {
    pub fn empty() -> Self {
        Self { pairs: Vec::new() }
    }

    pub fn new(mut pairs: Vec<(usize, ObjectId)>) -> Result<Self, TradingCyclesError> {
        pairs.sort_unstable();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(TradingCyclesError::DuplicateAssignment(format!(
                    "agent {}",
                    w[0].0 + 1
                )));
            }
        }
        let mut objects: Vec<ObjectId> = pairs.iter().map(|&(_, o)| o).collect();
        objects.sort_unstable();
        for w in objects.windows(2) {
            if w[0] == w[1] {
                return Err(TradingCyclesError::DuplicateAssignment(format!("{}", w[0])));
            }
        }
        Ok(Self { pairs })
    }

    pub fn assign(&self, agent: usize, object: ObjectId) -> Result<Self, TradingCyclesError> {
        let mut pairs = self.pairs.clone();
        pairs.push((agent, object));
        Self::new(pairs)
    }

    pub fn pairs(&self) -> &[(usize, ObjectId)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_complete(&self, n: usize) -> bool {
        self.pairs.len() == n
    }

    pub fn object_of(&self, agent: usize) -> Option<ObjectId> {
        self.pairs
            .iter()
            .find(|&&(a, _)| a == agent)
            .map(|&(_, o)| o)
    }

    pub fn unassigned_agents(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|&a| self.object_of(a).is_none()).collect()
    }

    pub fn unassigned_objects(&self, n: usize) -> Vec<ObjectId> {
        (0..n)
            .map(ObjectId)
            .filter(|o| !self.pairs.iter().any(|&(_, p)| p == *o))
            .collect()
    }

    pub fn to_assignment(&self, n: usize) -> Option<Assignment> {
        if !self.is_complete(n) {
            return None;
        }
        let objects = self.pairs.iter().map(|&(_, o)| o).collect();
        Assignment::new(objects).ok()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ControlMode {
    Ownership,
    Brokerage,
}

/// Who controls each unassigned object, and how, at every incomplete
/// allocation. Stored extensionally: with three agents there are 28
/// incomplete allocations.
#[derive(Clone, Debug)]
pub struct ControlRights {
    table: BTreeMap<PartialAllocation, BTreeMap<ObjectId, (usize, ControlMode)>>,
}

fn incomplete_allocations() -> Vec<PartialAllocation> {
    let mut all = vec![PartialAllocation::empty()];
    for agent in 0..N {
        for object in 0..N {
            all.push(
                PartialAllocation::new(vec![(agent, ObjectId(object))]).expect("one pair"),
            );
        }
    }
    for a1 in 0..N {
        for a2 in (a1 + 1)..N {
            for o1 in 0..N {
                for o2 in 0..N {
                    if o1 != o2 {
                        all.push(
                            PartialAllocation::new(vec![
                                (a1, ObjectId(o1)),
                                (a2, ObjectId(o2)),
                            ])
                            .expect("two distinct pairs"),
                        );
                    }
                }
            }
        }
    }
    all
}

impl ControlRights {
    /// Builds a structure from the brokerage pattern at the empty
    /// allocation (`brokers[k]` brokers object `k`) and completes the rest
    /// of the table canonically: after one assignment the two remaining
    /// agents own the two remaining objects in ascending order, and a lone
    /// agent owns whatever is left. The completion is validated before it
    /// is returned.
    pub fn from_empty_brokerage(brokers: [usize; N]) -> Result<Self, TradingCyclesError> {
        let mut table = BTreeMap::new();
        for y in incomplete_allocations() {
            let agents = y.unassigned_agents(N);
            let objects = y.unassigned_objects(N);
            let controls: BTreeMap<ObjectId, (usize, ControlMode)> = match agents.len() {
                N => objects
                    .iter()
                    .map(|&o| (o, (brokers[o.0], ControlMode::Brokerage)))
                    .collect(),
                _ => agents
                    .iter()
                    .cycle()
                    .zip(objects.iter())
                    .map(|(&a, &o)| (o, (a, ControlMode::Ownership)))
                    .collect(),
            };
            table.insert(y, controls);
        }
        let rights = Self { table };
        rights.validate()?;
        Ok(rights)
    }

    pub fn controls_at(
        &self,
        y: &PartialAllocation,
    ) -> Result<&BTreeMap<ObjectId, (usize, ControlMode)>, TradingCyclesError> {
        self.table
            .get(y)
            .ok_or_else(|| TradingCyclesError::InvalidStructure {
                condition: "completeness",
                detail: format!("no control entry for allocation {:?}", y.pairs()),
            })
    }

    /// Checks well-formedness and the consistency conditions R1 through R6.
    pub fn validate(&self) -> Result<(), TradingCyclesError> {
        let fail = |condition: &'static str, detail: String| {
            Err(TradingCyclesError::InvalidStructure { condition, detail })
        };

        let all = incomplete_allocations();
        for y in &all {
            let controls = self.controls_at(y)?;
            let agents: BTreeSet<usize> = y.unassigned_agents(N).into_iter().collect();
            let objects: BTreeSet<ObjectId> = y.unassigned_objects(N).into_iter().collect();
            let keys: BTreeSet<ObjectId> = controls.keys().copied().collect();
            if keys != objects {
                return fail(
                    "completeness",
                    format!(
                        "allocation {:?} must control exactly its unassigned objects",
                        y.pairs()
                    ),
                );
            }
            for (&o, &(agent, _)) in controls {
                if !agents.contains(&agent) {
                    return fail(
                        "completeness",
                        format!("{o} is controlled by assigned agent {}", agent + 1),
                    );
                }
            }
            if y.is_empty() {
                for (&o, &(_, mode)) in controls {
                    if mode != ControlMode::Brokerage {
                        return fail("R1", format!("{o} is not brokered at the empty allocation"));
                    }
                }
            }
            if agents.len() == 1 {
                let lone = *agents.iter().next().unwrap();
                for (&o, &(agent, mode)) in controls {
                    if agent != lone || mode != ControlMode::Ownership {
                        return fail(
                            "R2",
                            format!(
                                "lone agent {} must own {o} at {:?}",
                                lone + 1,
                                y.pairs()
                            ),
                        );
                    }
                }
            }
            for &broker in &agents {
                let brokered = controls
                    .values()
                    .any(|&(a, m)| a == broker && m == ControlMode::Brokerage);
                let controlled = controls.values().filter(|&&(a, _)| a == broker).count();
                if brokered && controlled > 1 {
                    return fail(
                        "R3",
                        format!(
                            "broker {} controls {controlled} objects at {:?}",
                            broker + 1,
                            y.pairs()
                        ),
                    );
                }
            }
        }

        // Growth consistency: for nested allocations y ⊆ y', an agent still
        // unassigned at y' who owned an object at y keeps it (R4), brokered
        // objects either stay brokered or pass to him (R5), and whoever
        // controlled another object at y owns the first agent's object once
        // that other object goes to him (R6).
        for y in &all {
            let controls_y = self.controls_at(y)?.clone();
            for y_big in &all {
                if !y.pairs().iter().all(|p| y_big.pairs().contains(p)) {
                    continue;
                }
                let controls_big = self.controls_at(y_big)?;
                let agents_big: BTreeSet<usize> =
                    y_big.unassigned_agents(N).into_iter().collect();
                let objects_big: BTreeSet<ObjectId> =
                    y_big.unassigned_objects(N).into_iter().collect();
                for &i in &agents_big {
                    let owned: Vec<ObjectId> = objects_big
                        .iter()
                        .copied()
                        .filter(|o| controls_y.get(o) == Some(&(i, ControlMode::Ownership)))
                        .collect();
                    for &o in &owned {
                        if controls_big.get(&o) != Some(&(i, ControlMode::Ownership)) {
                            return fail(
                                "R4",
                                format!(
                                    "agent {} owns {o} at {:?} but not at {:?}",
                                    i + 1,
                                    y.pairs(),
                                    y_big.pairs()
                                ),
                            );
                        }
                        for &j in &agents_big {
                            for &o_other in &objects_big {
                                match controls_y.get(&o_other) {
                                    Some(&(a, ControlMode::Brokerage)) if a == j => {
                                        let kept = controls_big.get(&o_other)
                                            == Some(&(j, ControlMode::Brokerage));
                                        let passed = controls_big.get(&o_other)
                                            == Some(&(i, ControlMode::Ownership));
                                        if !kept && !passed {
                                            return fail(
                                                "R5",
                                                format!(
                                                    "{o_other} brokered by agent {} at {:?} is neither kept nor owned by agent {} at {:?}",
                                                    j + 1,
                                                    y.pairs(),
                                                    i + 1,
                                                    y_big.pairs()
                                                ),
                                            );
                                        }
                                    }
                                    _ => {}
                                }
                                if j != i && controls_y.get(&o_other).map(|&(a, _)| a) == Some(j)
                                {
                                    let grown = y.assign(i, o_other)?;
                                    if grown.is_complete(N) {
                                        continue;
                                    }
                                    let controls_grown = self.controls_at(&grown)?;
                                    if controls_grown.get(&o) != Some(&(j, ControlMode::Ownership))
                                    {
                                        return fail(
                                            "R6",
                                            format!(
                                                "agent {} must own {o} once agent {} takes {o_other} from {:?}",
                                                j + 1,
                                                i + 1,
                                                y.pairs()
                                            ),
                                        );
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Agents of one pointing cycle, in walk order.
type Cycle = Vec<usize>;

fn find_cycles(
    pointer: &BTreeMap<usize, ObjectId>,
    controls: &BTreeMap<ObjectId, (usize, ControlMode)>,
    live_agents: &BTreeSet<usize>,
    live_objects: &BTreeSet<ObjectId>,
) -> Vec<Cycle> {
    let mut cycles = Vec::new();
    let mut in_cycle: BTreeSet<usize> = BTreeSet::new();
    for &start in live_agents {
        if in_cycle.contains(&start) {
            continue;
        }
        let mut walk = vec![start];
        let mut agent = start;
        loop {
            let object = pointer[&agent];
            if !live_objects.contains(&object) {
                break;
            }
            let Some(&(controller, _)) = controls.get(&object) else {
                break;
            };
            if !live_agents.contains(&controller) {
                break;
            }
            agent = controller;
            if agent == start {
                in_cycle.extend(walk.iter().copied());
                cycles.push(walk);
                break;
            }
            if walk.contains(&agent) {
                break;
            }
            walk.push(agent);
        }
    }
    cycles
}

/// Runs the trading-cycles rule for three agents under `rights`.
pub fn trading_cycles_3(
    profile: &[PreferenceRelation],
    rights: &ControlRights,
) -> Result<Assignment, TradingCyclesError> {
    if profile.len() != N || profile.iter().any(|p| p.n() != N) {
        return Err(TradingCyclesError::WrongSize(profile.len()));
    }
    rights.validate()?;

    let mut allocation = PartialAllocation::empty();
    let mut rounds = 0;
    while !allocation.is_complete(N) {
        rounds += 1;
        if rounds > N {
            return Err(TradingCyclesError::NoProgress(
                "more rounds than agents".into(),
            ));
        }
        let controls = rights.controls_at(&allocation)?.clone();
        let mut live_agents: BTreeSet<usize> =
            allocation.unassigned_agents(N).into_iter().collect();
        let mut live_objects: BTreeSet<ObjectId> =
            allocation.unassigned_objects(N).into_iter().collect();

        let mut pointer: BTreeMap<usize, ObjectId> = live_agents
            .iter()
            .map(|&a| {
                let best = profile[a]
                    .best_among(|o| live_objects.contains(&o))
                    .expect("a live agent has a live object");
                (a, best)
            })
            .collect();

        let controls_something =
            |a: usize| controls.values().any(|&(agent, _)| agent == a);
        let is_broker = |a: usize| {
            controls
                .values()
                .any(|&(agent, mode)| agent == a && mode == ControlMode::Brokerage)
        };
        let owns_something = |a: usize| {
            controls
                .values()
                .any(|&(agent, mode)| agent == a && mode == ControlMode::Ownership)
        };
        let is_brokered = |o: ObjectId| {
            controls
                .get(&o)
                .is_some_and(|&(_, mode)| mode == ControlMode::Brokerage)
        };

        let mut assigned_this_round: Vec<(usize, ObjectId)> = Vec::new();
        let execute =
            |cycle: &Cycle,
             pointer: &BTreeMap<usize, ObjectId>,
             live_agents: &mut BTreeSet<usize>,
             live_objects: &mut BTreeSet<ObjectId>,
             assigned: &mut Vec<(usize, ObjectId)>| {
                for &agent in cycle {
                    let object = pointer[&agent];
                    assigned.push((agent, object));
                    live_agents.remove(&agent);
                    live_objects.remove(&object);
                }
            };

        let mut downgrades = 0;
        loop {
            let cycles = find_cycles(&pointer, &controls, &live_agents, &live_objects);
            if cycles.is_empty() {
                break;
            }
            let (simple, blocked): (Vec<Cycle>, Vec<Cycle>) = cycles
                .into_iter()
                .partition(|c| c.iter().any(|&a| owns_something(a)));
            if !simple.is_empty() {
                for cycle in &simple {
                    execute(
                        cycle,
                        &pointer,
                        &mut live_agents,
                        &mut live_objects,
                        &mut assigned_this_round,
                    );
                }
                continue;
            }

            // Only broker cycles remain: force one contested broker a step
            // down his ranking, or clear everything when no one is contested.
            let forced = blocked.iter().flat_map(|c| c.iter().copied()).find(|&a| {
                is_broker(a)
                    && is_brokered(pointer[&a])
                    && live_agents.iter().any(|&other| {
                        other != a && controls_something(other) && pointer[&other] == pointer[&a]
                    })
            });
            match forced {
                Some(agent) => {
                    downgrades += 1;
                    if downgrades > N * N {
                        return Err(TradingCyclesError::NoProgress(
                            "broker downgrades exceeded the rank budget".into(),
                        ));
                    }
                    let current = pointer[&agent];
                    let next = profile[agent].best_among(|o| {
                        live_objects.contains(&o) && profile[agent].prefers(current, o)
                    });
                    match next {
                        Some(object) => {
                            pointer.insert(agent, object);
                        }
                        None => {
                            return Err(TradingCyclesError::NoProgress(format!(
                                "broker {} has nothing below {current} to point at",
                                agent + 1
                            )))
                        }
                    }
                }
                None => {
                    for cycle in &blocked {
                        execute(
                            cycle,
                            &pointer,
                            &mut live_agents,
                            &mut live_objects,
                            &mut assigned_this_round,
                        );
                    }
                    break;
                }
            }
        }

        if assigned_this_round.is_empty() {
            return Err(TradingCyclesError::NoProgress(
                "a round assigned nothing".into(),
            ));
        }
        for (agent, object) in assigned_this_round {
            allocation = allocation.assign(agent, object)?;
        }
    }

    Ok(allocation
        .to_assignment(N)
        .expect("loop exits only on a complete allocation"))
}

/// One checked statement of the comparison report.
#[derive(Clone, Debug, Serialize)]
pub struct ComparisonAssertion {
    pub name: &'static str,
    pub holds: bool,
}

/// Side-by-side outcomes of the crawler and the two trading-cycles
/// structures on the pivot profile and the two divergence profiles.
#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    pub crawler_pivot: Assignment,
    pub tc_first_pivot: Assignment,
    pub tc_second_pivot: Assignment,
    pub crawler_ascending: Assignment,
    pub tc_first_ascending: Assignment,
    pub crawler_descending: Assignment,
    pub tc_second_descending: Assignment,
    pub assertions: Vec<ComparisonAssertion>,
}

impl ComparisonReport {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.holds)
    }
}

fn prefs(words: &[[usize; N]; N]) -> Vec<PreferenceRelation> {
    words
        .iter()
        .map(|w| PreferenceRelation::from_indices(w.to_vec()).expect("valid ranking"))
        .collect()
}

/// The pivot profile: the first agent peaks on the middle object, the other
/// two rank the objects in ascending order.
pub fn pivot_profile() -> Vec<PreferenceRelation> {
    prefs(&[[1, 0, 2], [0, 1, 2], [0, 1, 2]])
}

/// First structure agreeing with the crawler on the pivot: agents 1, 2, 3
/// broker objects o1, o3, o2.
pub fn first_structure() -> Result<ControlRights, TradingCyclesError> {
    ControlRights::from_empty_brokerage([0, 2, 1])
}

/// Second structure agreeing with the crawler on the pivot: agents 1, 2, 3
/// broker objects o3, o2, o1.
pub fn second_structure() -> Result<ControlRights, TradingCyclesError> {
    ControlRights::from_empty_brokerage([2, 1, 0])
}

/// Evaluates the crawler (from the identity endowment) and both
/// trading-cycles structures on the pivot profile and on the unanimous
/// ascending/descending profiles, and checks that each structure matches the
/// crawler on the pivot but diverges on its unanimous profile.
pub fn reproduce_comparison() -> Result<ComparisonReport, TradingCyclesError> {
    let endowment = Assignment::identity(N);
    let pivot = pivot_profile();
    let ascending = prefs(&[[0, 1, 2], [0, 1, 2], [0, 1, 2]]);
    let descending = prefs(&[[2, 1, 0], [2, 1, 0], [2, 1, 0]]);
    let first = first_structure()?;
    let second = second_structure()?;

    let crawler_pivot = ascending_crawler(&pivot, &endowment)?.0;
    let tc_first_pivot = trading_cycles_3(&pivot, &first)?;
    let tc_second_pivot = trading_cycles_3(&pivot, &second)?;
    let crawler_ascending = ascending_crawler(&ascending, &endowment)?.0;
    let tc_first_ascending = trading_cycles_3(&ascending, &first)?;
    let crawler_descending = ascending_crawler(&descending, &endowment)?.0;
    let tc_second_descending = trading_cycles_3(&descending, &second)?;

    let assertions = vec![
        ComparisonAssertion {
            name: "first structure reproduces the crawler on the pivot profile",
            holds: tc_first_pivot == crawler_pivot,
        },
        ComparisonAssertion {
            name: "second structure reproduces the crawler on the pivot profile",
            holds: tc_second_pivot == crawler_pivot,
        },
        ComparisonAssertion {
            name: "first structure diverges from the crawler on the unanimous ascending profile",
            holds: tc_first_ascending != crawler_ascending,
        },
        ComparisonAssertion {
            name: "second structure diverges from the crawler on the unanimous descending profile",
            holds: tc_second_descending != crawler_descending,
        },
        ComparisonAssertion {
            name: "the crawler keeps the endowment on both unanimous profiles",
            holds: crawler_ascending == endowment && crawler_descending == endowment,
        },
    ];

    Ok(ComparisonReport {
        crawler_pivot,
        tc_first_pivot,
        tc_second_pivot,
        crawler_ascending,
        tc_first_ascending,
        crawler_descending,
        tc_second_descending,
        assertions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::is_efficient;

    fn check_efficiency_everywhere(rights: &ControlRights) {
        let orders = crate::domain::enumerate_single_peaked(N).unwrap();
        for p1 in &orders {
            for p2 in &orders {
                for p3 in &orders {
                    let profile = vec![p1.clone(), p2.clone(), p3.clone()];
                    let outcome = trading_cycles_3(&profile, rights).unwrap();
                    assert!(
                        is_efficient(&outcome, &profile).unwrap().holds(),
                        "inefficient outcome {outcome:?} on {profile:?}"
                    );
                }
            }
        }
    }

    fn assignment(word: [usize; 3]) -> Assignment {
        Assignment::from_indices(word.to_vec()).unwrap()
    }

    #[test]
    fn canonical_structures_validate() {
        first_structure().unwrap();
        second_structure().unwrap();
        ControlRights::from_empty_brokerage([0, 1, 2]).unwrap();
    }

    #[test]
    fn violations_name_their_condition() {
        let mut rights = first_structure().unwrap();
        let empty = PartialAllocation::empty();

        // Ownership at the start breaks R1.
        let mut tampered = rights.clone();
        tampered
            .table
            .get_mut(&empty)
            .unwrap()
            .insert(ObjectId(0), (0, ControlMode::Ownership));
        match tampered.validate() {
            Err(TradingCyclesError::InvalidStructure { condition, .. }) => {
                assert_eq!(condition, "R1")
            }
            other => panic!("expected an R1 violation, got {other:?}"),
        }

        // A broker holding a second object breaks R3.
        let one = PartialAllocation::new(vec![(0, ObjectId(0))]).unwrap();
        let mut tampered = rights.clone();
        let entry = tampered.table.get_mut(&one).unwrap();
        entry.insert(ObjectId(1), (1, ControlMode::Brokerage));
        entry.insert(ObjectId(2), (1, ControlMode::Ownership));
        match tampered.validate() {
            Err(TradingCyclesError::InvalidStructure { condition, .. }) => {
                assert_eq!(condition, "R3")
            }
            other => panic!("expected an R3 violation, got {other:?}"),
        }

        // A lone agent must own the last object (R2).
        let two = PartialAllocation::new(vec![(0, ObjectId(0)), (1, ObjectId(1))]).unwrap();
        rights
            .table
            .get_mut(&two)
            .unwrap()
            .insert(ObjectId(2), (2, ControlMode::Brokerage));
        match rights.validate() {
            Err(TradingCyclesError::InvalidStructure { condition, .. }) => {
                assert_eq!(condition, "R2")
            }
            other => panic!("expected an R2 violation, got {other:?}"),
        }
    }

    #[test]
    fn one_pair_ownership_choices_are_free() {
        // With three agents and a fully brokered start, the growth rules
        // R4-R6 never bind on their own: any extension of a one-pair
        // allocation retires one of its two remaining agents, and the
        // lone-agent rule re-pins every control for the survivor. Swapping
        // the canonical ownership pattern therefore still validates.
        let mut rights = first_structure().unwrap();
        let one = PartialAllocation::new(vec![(0, ObjectId(0))]).unwrap();
        let entry = rights.table.get_mut(&one).unwrap();
        entry.insert(ObjectId(1), (2, ControlMode::Ownership));
        entry.insert(ObjectId(2), (1, ControlMode::Ownership));
        rights.validate().unwrap();
    }

    #[test]
    fn pivot_profile_matches_crawler_under_both_structures() {
        let report = reproduce_comparison().unwrap();
        assert_eq!(report.crawler_pivot, assignment([1, 0, 2]));
        assert_eq!(report.tc_first_pivot, assignment([1, 0, 2]));
        assert_eq!(report.tc_second_pivot, assignment([1, 0, 2]));
    }

    #[test]
    fn unanimous_profiles_split_the_rules() {
        let report = reproduce_comparison().unwrap();
        assert_eq!(report.crawler_ascending, assignment([0, 1, 2]));
        assert_eq!(report.tc_first_ascending, assignment([1, 0, 2]));
        assert_eq!(report.crawler_descending, assignment([0, 1, 2]));
        assert_eq!(report.tc_second_descending, assignment([1, 0, 2]));
        assert!(report.passed());
        assert_eq!(report.assertions.len(), 5);
    }

    #[test]
    fn outcomes_are_efficient_on_every_profile() {
        check_efficiency_everywhere(&first_structure().unwrap());
        check_efficiency_everywhere(&second_structure().unwrap());
    }

    #[test]
    fn wrong_size_profiles_are_rejected() {
        let profile: Vec<PreferenceRelation> = (0..2)
            .map(|_| PreferenceRelation::from_indices(vec![0, 1]).unwrap())
            .collect();
        let rights = first_structure().unwrap();
        match trading_cycles_3(&profile, &rights) {
            Err(TradingCyclesError::WrongSize(2)) => {}
            other => panic!("expected a size error, got {other:?}"),
        }
    }
}
