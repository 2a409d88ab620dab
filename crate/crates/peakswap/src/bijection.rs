//! A constructive map from endowments to priority orders: running the
//! crawler from endowment `w` selects the same allocation as serial
//! dictatorship under the constructed order `g(w)`, and `w -> g(w)` is a
//! bijection on the `n!` endowments.
//!
//! The literal construction starts from the endowment order and refines it
//! round by round. In a round, each agent with a nonempty remaining set
//! looks at his best remaining object; if the crawler gave that object to
//! someone else, he "envies" that agent. Envy edges form chains, chains
//! sharing agents (including chains formed in earlier rounds) merge into one
//! component, and the component's members are reordered within their
//! existing rank slots: envied agents ahead of their enviers, ties broken by
//! keeping the previous round's relative order. Remaining sets then shrink
//! (an envier loses the envied object, a self-satisfied agent clears his
//! whole set) until everything is empty.
//!
//! The written combination rules pin down only two same-round chains meeting
//! at a common head or tail. Everything else is flagged as an
//! [`AmbiguityEvent`] — in particular every combination that involves a
//! chain formed at an earlier round, because the literal rule is provably
//! not injective there: two endowments can share a crawler outcome, and the
//! envy structure depends only on that outcome, so the stable reordering can
//! erase the distinction between them (a three-agent instance of this is
//! kept as a regression test). Under [`AmbiguityPolicy::Strict`] the
//! construction aborts with its [`ChainState`]; under
//! [`AmbiguityPolicy::OracleFallback`] the result is corrected by a
//! deterministic matching within the outcome class: endowments with the same
//! crawler outcome, in lexicographic order, keep their literal order when it
//! is sound and not already claimed, and the rest receive the
//! lexicographically first free orders that reproduce the outcome. Each
//! replacement is logged. Because every order reproducing the outcome
//! automatically respects the envy constraints (an envier placed before the
//! agent he envies would take the envied object instead of his own), the
//! matching stays within the constraint-respecting orders, and it is onto
//! because the outcome is reached by exactly as many orders as endowments —
//! a count equality this module checks and reports rather than assumes.

use crate::domain::{
    all_agent_orders, all_assignments, factorial, AgentOrder, Assignment, ObjectId,
    PreferenceRelation,
};
use crate::rules::{ascending_crawler, sequential_priority, RuleError};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// Largest `n` for which order/endowment enumeration (the oracle, the
/// fallback matching, whole-domain verification) runs.
pub const MAX_ENUMERATION_N: usize = 8;

const REASON_CROSS_ROUND: &str = "combines chains formed at different rounds";
const REASON_MANY_CHAINS: &str = "three or more chains combine in one component";
const REASON_OVERLAP: &str = "chains overlap beyond a common head or tail";
const REASON_REPLACED: &str =
    "literal order collides with a lexicographically earlier endowment of the same outcome class; replaced by the first free order of that class";

/// What to do when the construction hits a configuration the written
/// combination rules do not determine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AmbiguityPolicy {
    /// Abort, carrying the full construction state.
    Strict,
    /// Correct the literal result by the deterministic outcome-class
    /// matching described in the module docs.
    OracleFallback,
}

/// `envier` envies `envied`: the crawler gave `envied` the object that was
/// `envier`'s best remaining one in `round`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EnvyEdge {
    pub envier: usize,
    pub envied: usize,
    pub round: usize,
}

/// A configuration the written combination rules do not pin down, or a
/// post-construction replacement (`round` 0) by the outcome-class matching.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AmbiguityEvent {
    /// Combination round, or 0 for a post-construction replacement.
    pub round: usize,
    /// Affected agents, ascending.
    pub component: Vec<usize>,
    /// Participating chains as (formation round, agents best rank first).
    pub chains: Vec<(usize, Vec<usize>)>,
    pub reasons: Vec<&'static str>,
}

/// Full construction state, used as the error payload and for debugging.
#[derive(Clone, Debug)]
pub struct ChainState {
    pub round: usize,
    pub order: AgentOrder,
    /// Remaining objects per agent, ascending.
    pub remaining: Vec<Vec<ObjectId>>,
    /// Objects consumed per agent in the latest round, ascending.
    pub consumed: Vec<Vec<ObjectId>>,
    /// Formed chains as (formation round, agents best rank first).
    pub chains: Vec<(usize, Vec<usize>)>,
    pub edges: Vec<EnvyEdge>,
}

impl fmt::Display for ChainState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "round {}", self.round)?;
        writeln!(f, "order: {:?}", self.order)?;
        for agent in 0..self.order.n() {
            write!(f, "agent {}: remaining {{", agent + 1)?;
            for (k, o) in self.remaining[agent].iter().enumerate() {
                write!(f, "{}{o}", if k > 0 { " " } else { "" })?;
            }
            write!(f, "}} consumed {{")?;
            for (k, o) in self.consumed[agent].iter().enumerate() {
                write!(f, "{}{o}", if k > 0 { " " } else { "" })?;
            }
            writeln!(f, "}}")?;
        }
        for (round, chain) in &self.chains {
            writeln!(
                f,
                "chain from round {round}: [{}]",
                chain
                    .iter()
                    .map(|a| (a + 1).to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            )?;
        }
        for e in &self.edges {
            writeln!(
                f,
                "envy: {} -> {} (round {})",
                e.envier + 1,
                e.envied + 1,
                e.round
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum BijectionError {
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error("the accumulated envy relation contains a cycle\n{state}")]
    EnvyCycle { state: Box<ChainState> },
    #[error(
        "the construction hit {} configuration(s) the combination rules do not determine\n{state}",
        events.len()
    )]
    AmbiguousConstruction {
        state: Box<ChainState>,
        events: Vec<AmbiguityEvent>,
    },
    #[error("the constructed order fails to reproduce the crawler outcome\n{state}")]
    PostconditionFailed { state: Box<ChainState> },
    #[error(
        "allocation {allocation:?} is reached by {endowments} endowment(s) but {orders} priority order(s)"
    )]
    CountMismatch {
        allocation: Assignment,
        endowments: u64,
        orders: u64,
    },
    #[error("no priority order reproduces the crawler outcome")]
    NoMatchingOrder,
    #[error("{what} enumerates all {n}! permutations and is limited to {bound} agents")]
    Capability {
        what: &'static str,
        n: usize,
        bound: usize,
    },
}

/// A successfully constructed priority order with its diagnostics.
#[derive(Clone, Debug)]
pub struct PriorityConstruction {
    /// The final order; equals the literal result unless `used_fallback`.
    pub order: AgentOrder,
    /// The crawler allocation the order reproduces.
    pub target: Assignment,
    /// The literal construction's order after each round; the last entry is
    /// the literal result.
    pub orders_by_round: Vec<AgentOrder>,
    pub edges: Vec<EnvyEdge>,
    pub ambiguities: Vec<AmbiguityEvent>,
    /// The outcome-class matching replaced the literal order.
    pub used_fallback: bool,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, a: usize) -> usize {
        if self.parent[a] != a {
            let root = self.find(self.parent[a]);
            self.parent[a] = root;
        }
        self.parent[a]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[rb] = ra;
        }
    }
}

/// Maximal directed paths of this round's envy graph (out-degree is at most
/// one), each returned best rank first, i.e. most-envied agent first.
fn round_chains(new_edges: &[(usize, usize)], n: usize) -> Vec<Vec<usize>> {
    let mut next = vec![usize::MAX; n];
    let mut has_in = vec![false; n];
    for &(envier, envied) in new_edges {
        next[envier] = envied;
        has_in[envied] = true;
    }
    let mut chains = Vec::new();
    for start in 0..n {
        if next[start] != usize::MAX && !has_in[start] {
            let mut path = vec![start];
            let mut a = start;
            while next[a] != usize::MAX {
                a = next[a];
                path.push(a);
            }
            path.reverse();
            chains.push(path);
        }
    }
    chains
}

fn ambiguity_reasons(parts: &[(usize, Vec<usize>)], round: usize) -> Vec<&'static str> {
    let mut reasons = Vec::new();
    if parts.iter().any(|(formed, _)| *formed < round) {
        reasons.push(REASON_CROSS_ROUND);
    }
    if parts.len() >= 3 {
        reasons.push(REASON_MANY_CHAINS);
    }
    'pairs: for (a, (_, chain_a)) in parts.iter().enumerate() {
        for (_, chain_b) in parts.iter().skip(a + 1) {
            let shared: Vec<usize> = chain_a
                .iter()
                .copied()
                .filter(|x| chain_b.contains(x))
                .collect();
            if shared.is_empty() {
                continue;
            }
            let single = shared.len() == 1;
            let common_head = single && chain_a[0] == shared[0] && chain_b[0] == shared[0];
            let common_tail = single
                && *chain_a.last().unwrap() == shared[0]
                && *chain_b.last().unwrap() == shared[0];
            if !common_head && !common_tail {
                reasons.push(REASON_OVERLAP);
                break 'pairs;
            }
        }
    }
    reasons
}

/// Outcome of the literal round-by-round construction for one endowment.
struct LiteralRun {
    candidate: AgentOrder,
    orders_by_round: Vec<AgentOrder>,
    edges: Vec<EnvyEdge>,
    events: Vec<AmbiguityEvent>,
    /// The candidate passes the dictatorship replay.
    reproduces: bool,
    state: Box<ChainState>,
}

fn run_literal(
    profile: &[PreferenceRelation],
    endowment: &Assignment,
    target: &Assignment,
) -> Result<LiteralRun, BijectionError> {
    let n = profile.len();

    let mut by_rank: Vec<usize> = (0..n).collect();
    by_rank.sort_by_key(|&a| endowment.object_of(a));
    let mut rank_by_agent = vec![0usize; n];
    for (rank, &agent) in by_rank.iter().enumerate() {
        rank_by_agent[agent] = rank;
    }

    let mut remaining: Vec<Vec<bool>> = vec![vec![true; n]; n];
    let mut remaining_count = vec![n; n];
    let mut consumed_last: Vec<Vec<ObjectId>> = vec![Vec::new(); n];
    let mut stored_chains: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut edges: Vec<EnvyEdge> = Vec::new();
    let mut edge_set: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut events: Vec<AmbiguityEvent> = Vec::new();
    let mut orders_by_round: Vec<AgentOrder> = Vec::new();

    let order_of = |rank_by_agent: &[usize]| {
        let mut agents: Vec<usize> = (0..n).collect();
        agents.sort_by_key(|&a| rank_by_agent[a]);
        AgentOrder::new(agents).expect("ranks form a permutation")
    };
    let snapshot = |round: usize,
                    rank_by_agent: &[usize],
                    remaining: &[Vec<bool>],
                    consumed_last: &[Vec<ObjectId>],
                    stored_chains: &[(usize, Vec<usize>)],
                    edges: &[EnvyEdge]| {
        Box::new(ChainState {
            round,
            order: order_of(rank_by_agent),
            remaining: remaining
                .iter()
                .map(|r| (0..n).filter(|&o| r[o]).map(ObjectId).collect())
                .collect(),
            consumed: consumed_last.to_vec(),
            chains: stored_chains.to_vec(),
            edges: edges.to_vec(),
        })
    };

    let mut round = 0;
    while remaining_count.iter().any(|&c| c > 0) {
        round += 1;
        debug_assert!(round <= n, "each round shrinks every nonempty set");

        // Envy edges and consumed sets.
        let mut new_edges: Vec<(usize, usize)> = Vec::new();
        let mut consume_all: Vec<usize> = Vec::new();
        let mut consume_one: Vec<(usize, ObjectId)> = Vec::new();
        for agent in (0..n).filter(|&a| remaining_count[a] > 0) {
            let best = profile[agent]
                .best_among(|o| remaining[agent][o.0])
                .expect("remaining set is nonempty");
            let envied = target.agent_of(best);
            if envied == agent {
                consume_all.push(agent);
            } else {
                new_edges.push((agent, envied));
                consume_one.push((agent, best));
            }
        }

        // Merge each component of new chains plus the previously formed
        // chains they touch, reordering within the occupied slots.
        if !new_edges.is_empty() {
            for &(a, b) in &new_edges {
                edge_set.insert((a, b));
                edges.push(EnvyEdge {
                    envier: a,
                    envied: b,
                    round,
                });
            }
            let mut uf = UnionFind::new(n);
            let mut touched = vec![false; n];
            for &(a, b) in &new_edges {
                uf.union(a, b);
                touched[a] = true;
                touched[b] = true;
            }
            let absorbed: Vec<usize> = (0..stored_chains.len())
                .filter(|&k| stored_chains[k].1.iter().any(|&a| touched[a]))
                .collect();
            for &k in &absorbed {
                let first = stored_chains[k].1[0];
                for &a in &stored_chains[k].1[1..] {
                    uf.union(first, a);
                }
            }
            let mut members_by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for (agent, &was_touched) in touched.iter().enumerate() {
                let in_absorbed = absorbed
                    .iter()
                    .any(|&k| stored_chains[k].1.contains(&agent));
                if was_touched || in_absorbed {
                    members_by_root
                        .entry(uf.find(agent))
                        .or_default()
                        .push(agent);
                }
            }

            let fresh_chains = round_chains(&new_edges, n);
            let mut merged_chains: Vec<(usize, Vec<usize>)> = Vec::new();
            for members in members_by_root.values() {
                let mut parts: Vec<(usize, Vec<usize>)> = fresh_chains
                    .iter()
                    .filter(|c| members.contains(&c[0]))
                    .map(|c| (round, c.clone()))
                    .collect();
                parts.extend(
                    absorbed
                        .iter()
                        .map(|&k| stored_chains[k].clone())
                        .filter(|(_, c)| members.contains(&c[0])),
                );
                let reasons = ambiguity_reasons(&parts, round);
                if !reasons.is_empty() {
                    events.push(AmbiguityEvent {
                        round,
                        component: members.clone(),
                        chains: parts,
                        reasons,
                    });
                }

                // Stable topological order: envied agents first, ties by the
                // previous round's rank; slots are reused ascending.
                let mut slots: Vec<usize> = members.iter().map(|&a| rank_by_agent[a]).collect();
                slots.sort_unstable();
                let mut need: BTreeMap<usize, usize> = members.iter().map(|&a| (a, 0)).collect();
                for &(envier, envied) in &edge_set {
                    if need.contains_key(&envier) && need.contains_key(&envied) {
                        *need.get_mut(&envier).unwrap() += 1;
                    }
                }
                let mut placed: Vec<usize> = Vec::with_capacity(members.len());
                let mut unplaced: BTreeSet<usize> = members.iter().copied().collect();
                while !unplaced.is_empty() {
                    let ready = unplaced
                        .iter()
                        .copied()
                        .filter(|a| need[a] == 0)
                        .min_by_key(|&a| rank_by_agent[a]);
                    let Some(pick) = ready else {
                        return Err(BijectionError::EnvyCycle {
                            state: snapshot(
                                round,
                                &rank_by_agent,
                                &remaining,
                                &consumed_last,
                                &stored_chains,
                                &edges,
                            ),
                        });
                    };
                    unplaced.remove(&pick);
                    placed.push(pick);
                    for &(envier, envied) in &edge_set {
                        if envied == pick && unplaced.contains(&envier) {
                            *need.get_mut(&envier).unwrap() -= 1;
                        }
                    }
                }
                for (k, &agent) in placed.iter().enumerate() {
                    rank_by_agent[agent] = slots[k];
                }
                merged_chains.push((round, placed));
            }

            for &k in absorbed.iter().rev() {
                stored_chains.remove(k);
            }
            stored_chains.extend(merged_chains);
        }

        // Untouched agents keep their ranks; remaining sets shrink.
        for consumed in consumed_last.iter_mut() {
            consumed.clear();
        }
        for agent in consume_all {
            consumed_last[agent] = (0..n)
                .filter(|&o| remaining[agent][o])
                .map(ObjectId)
                .collect();
            remaining[agent] = vec![false; n];
            remaining_count[agent] = 0;
        }
        for (agent, object) in consume_one {
            consumed_last[agent] = vec![object];
            remaining[agent][object.0] = false;
            remaining_count[agent] -= 1;
        }

        orders_by_round.push(order_of(&rank_by_agent));
    }

    let candidate = order_of(&rank_by_agent);
    let reproduces = sequential_priority(profile, &candidate)? == *target;
    let state = snapshot(
        round,
        &rank_by_agent,
        &remaining,
        &consumed_last,
        &stored_chains,
        &edges,
    );
    Ok(LiteralRun {
        candidate,
        orders_by_round,
        edges,
        events,
        reproduces,
        state,
    })
}

/// One endowment of an outcome class with its literal run and final order.
struct FiberEntry {
    endowment: Assignment,
    run: LiteralRun,
    order: AgentOrder,
}

/// Deterministic matching of an outcome class: endowments in lexicographic
/// order keep their literal order when it reproduces the outcome and is
/// unclaimed; the rest receive the lexicographically first free orders.
fn matched_fiber(
    profile: &[PreferenceRelation],
    target: &Assignment,
    endowments: Vec<Assignment>,
    orders: Vec<AgentOrder>,
) -> Result<Vec<FiberEntry>, BijectionError> {
    if endowments.len() != orders.len() {
        return Err(BijectionError::CountMismatch {
            allocation: target.clone(),
            endowments: endowments.len() as u64,
            orders: orders.len() as u64,
        });
    }
    let mut taken: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut kept: Vec<(Assignment, LiteralRun, Option<AgentOrder>)> = Vec::new();
    for endowment in endowments {
        let run = run_literal(profile, &endowment, target)?;
        let word = run.candidate.agents_by_rank().to_vec();
        if run.reproduces && !taken.contains(&word) {
            taken.insert(word);
            let order = run.candidate.clone();
            kept.push((endowment, run, Some(order)));
        } else {
            kept.push((endowment, run, None));
        }
    }
    let mut free = orders
        .into_iter()
        .filter(|f| !taken.contains(f.agents_by_rank()));
    let entries = kept
        .into_iter()
        .map(|(endowment, run, chosen)| {
            let order = chosen.unwrap_or_else(|| {
                free.next()
                    .expect("equal fiber sizes leave one free order per pending endowment")
            });
            FiberEntry {
                endowment,
                run,
                order,
            }
        })
        .collect();
    Ok(entries)
}

fn crawler_fiber(
    profile: &[PreferenceRelation],
    target: &Assignment,
) -> Result<Vec<Assignment>, BijectionError> {
    let mut fiber = Vec::new();
    for endowment in all_assignments(profile.len()) {
        if ascending_crawler(profile, &endowment)?.0 == *target {
            fiber.push(endowment);
        }
    }
    Ok(fiber)
}

fn dictatorship_fiber(
    profile: &[PreferenceRelation],
    target: &Assignment,
) -> Result<Vec<AgentOrder>, BijectionError> {
    let mut fiber = Vec::new();
    for order in all_agent_orders(profile.len()) {
        if sequential_priority(profile, &order)? == *target {
            fiber.push(order);
        }
    }
    Ok(fiber)
}

fn construction_from_entry(entry: FiberEntry, target: Assignment) -> PriorityConstruction {
    let FiberEntry {
        endowment: _,
        run,
        order,
    } = entry;
    let mut ambiguities = run.events;
    let used_fallback = order != run.candidate;
    if used_fallback {
        let component: Vec<usize> = (0..order.n())
            .filter(|&a| order.rank_by_agent()[a] != run.candidate.rank_by_agent()[a])
            .collect();
        ambiguities.push(AmbiguityEvent {
            round: 0,
            component,
            chains: Vec::new(),
            reasons: vec![REASON_REPLACED],
        });
    }
    PriorityConstruction {
        order,
        target,
        orders_by_round: run.orders_by_round,
        edges: run.edges,
        ambiguities,
        used_fallback,
    }
}

/// Builds the priority order for `endowment`, together with the envy edges,
/// per-round orders, and any ambiguity events encountered.
pub fn build_priority_order(
    profile: &[PreferenceRelation],
    endowment: &Assignment,
    policy: AmbiguityPolicy,
) -> Result<PriorityConstruction, BijectionError> {
    let (target, _) = ascending_crawler(profile, endowment)?;
    match policy {
        AmbiguityPolicy::Strict => {
            let run = run_literal(profile, endowment, &target)?;
            if !run.events.is_empty() {
                return Err(BijectionError::AmbiguousConstruction {
                    state: run.state,
                    events: run.events,
                });
            }
            if !run.reproduces {
                return Err(BijectionError::PostconditionFailed { state: run.state });
            }
            Ok(PriorityConstruction {
                order: run.candidate,
                target,
                orders_by_round: run.orders_by_round,
                edges: run.edges,
                ambiguities: Vec::new(),
                used_fallback: false,
            })
        }
        AmbiguityPolicy::OracleFallback => {
            let n = profile.len();
            if n > MAX_ENUMERATION_N {
                return Err(BijectionError::Capability {
                    what: "the outcome-class matching",
                    n,
                    bound: MAX_ENUMERATION_N,
                });
            }
            let endowments = crawler_fiber(profile, &target)?;
            let orders = dictatorship_fiber(profile, &target)?;
            let entries = matched_fiber(profile, &target, endowments, orders)?;
            let entry = entries
                .into_iter()
                .find(|e| e.endowment == *endowment)
                .expect("the queried endowment belongs to its own outcome class");
            let construction = construction_from_entry(entry, target);
            debug_assert_eq!(
                sequential_priority(profile, &construction.order).expect("valid order"),
                construction.target
            );
            Ok(construction)
        }
    }
}

/// The lexicographically first priority order whose serial dictatorship
/// reproduces the crawler outcome at `endowment`; independent of the
/// construction above.
pub fn oracle_priority_order(
    profile: &[PreferenceRelation],
    endowment: &Assignment,
) -> Result<AgentOrder, BijectionError> {
    let n = profile.len();
    if n > MAX_ENUMERATION_N {
        return Err(BijectionError::Capability {
            what: "oracle_priority_order",
            n,
            bound: MAX_ENUMERATION_N,
        });
    }
    let (target, _) = ascending_crawler(profile, endowment)?;
    for f in all_agent_orders(n) {
        if sequential_priority(profile, &f)? == target {
            return Ok(f);
        }
    }
    Err(BijectionError::NoMatchingOrder)
}

/// One verified failure of the equivalence claims for a profile.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EquivalenceFailure {
    /// `g(endowment)` does not reproduce the crawler allocation.
    OutcomeMismatch {
        endowment: Assignment,
        order: AgentOrder,
        crawler: Assignment,
        dictatorship: Assignment,
    },
    /// Two endowments map to the same order.
    Collision {
        first: Assignment,
        second: Assignment,
        order: AgentOrder,
    },
    /// Fewer than `n!` distinct orders were produced.
    MissingOrders { produced: u64 },
    /// An allocation is reached by a different number of endowments than of
    /// priority orders.
    CountMismatch {
        allocation: Assignment,
        endowment_count: u64,
        order_count: u64,
    },
}

/// Whole-domain check of the equivalence claims for one profile.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub n: usize,
    pub endowments_checked: u64,
    /// Every constructed order reproduces its crawler allocation.
    pub reproduces_crawler: bool,
    /// No two endowments produce the same order.
    pub injective: bool,
    /// All `n!` orders are produced.
    pub onto: bool,
    /// Per allocation, as many endowments reach it via the crawler as
    /// priority orders reach it via serial dictatorship.
    pub outcome_counts_match: bool,
    pub ambiguity_events: u64,
    pub fallback_uses: u64,
    pub first_failure: Option<EquivalenceFailure>,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.reproduces_crawler && self.injective && self.onto && self.outcome_counts_match
    }
}

/// Runs the construction (with the outcome-class matching) for every
/// endowment of `profile` and checks the three claims: reproduction,
/// bijectivity, and outcome-count equality.
pub fn verify_equivalence_for_profile(
    profile: &[PreferenceRelation],
) -> Result<EquivalenceReport, BijectionError> {
    let n = profile.len();
    if n == 0 || n > MAX_ENUMERATION_N {
        return Err(BijectionError::Capability {
            what: "verify_equivalence_for_profile",
            n,
            bound: MAX_ENUMERATION_N,
        });
    }
    let mut report = EquivalenceReport {
        n,
        endowments_checked: 0,
        reproduces_crawler: true,
        injective: true,
        onto: true,
        outcome_counts_match: true,
        ambiguity_events: 0,
        fallback_uses: 0,
        first_failure: None,
    };
    let record = |report: &mut EquivalenceReport, failure: EquivalenceFailure| {
        if report.first_failure.is_none() {
            report.first_failure = Some(failure);
        }
    };

    let mut endowments_by_target: BTreeMap<Assignment, Vec<Assignment>> = BTreeMap::new();
    for endowment in all_assignments(n) {
        let (target, _) = ascending_crawler(profile, &endowment)?;
        endowments_by_target.entry(target).or_default().push(endowment);
    }
    let mut orders_by_target: BTreeMap<Assignment, Vec<AgentOrder>> = BTreeMap::new();
    for order in all_agent_orders(n) {
        let target = sequential_priority(profile, &order)?;
        orders_by_target.entry(target).or_default().push(order);
    }

    for (target, count) in orders_by_target
        .iter()
        .map(|(t, fs)| (t, fs.len() as u64))
    {
        if !endowments_by_target.contains_key(target) {
            report.outcome_counts_match = false;
            record(
                &mut report,
                EquivalenceFailure::CountMismatch {
                    allocation: target.clone(),
                    endowment_count: 0,
                    order_count: count,
                },
            );
        }
    }

    let mut order_to_endowment: BTreeMap<Vec<usize>, Assignment> = BTreeMap::new();
    for (target, endowments) in endowments_by_target {
        let orders = orders_by_target.remove(&target).unwrap_or_default();
        if endowments.len() != orders.len() {
            report.outcome_counts_match = false;
            record(
                &mut report,
                EquivalenceFailure::CountMismatch {
                    allocation: target.clone(),
                    endowment_count: endowments.len() as u64,
                    order_count: orders.len() as u64,
                },
            );
            report.endowments_checked += endowments.len() as u64;
            continue;
        }
        let entries = matched_fiber(profile, &target, endowments, orders)?;
        for entry in entries {
            report.endowments_checked += 1;
            report.ambiguity_events += entry.run.events.len() as u64;
            let replaced = entry.order != entry.run.candidate;
            if replaced {
                report.ambiguity_events += 1;
                report.fallback_uses += 1;
            }
            let dictatorship = sequential_priority(profile, &entry.order)?;
            if dictatorship != target {
                report.reproduces_crawler = false;
                record(
                    &mut report,
                    EquivalenceFailure::OutcomeMismatch {
                        endowment: entry.endowment.clone(),
                        order: entry.order.clone(),
                        crawler: target.clone(),
                        dictatorship,
                    },
                );
            }
            let word = entry.order.agents_by_rank().to_vec();
            if let Some(previous) = order_to_endowment.get(&word) {
                report.injective = false;
                record(
                    &mut report,
                    EquivalenceFailure::Collision {
                        first: previous.clone(),
                        second: entry.endowment.clone(),
                        order: entry.order.clone(),
                    },
                );
            } else {
                order_to_endowment.insert(word, entry.endowment.clone());
            }
        }
    }

    if (order_to_endowment.len() as u64) < factorial(n) {
        report.onto = false;
        record(
            &mut report,
            EquivalenceFailure::MissingOrders {
                produced: order_to_endowment.len() as u64,
            },
        );
    }

    Ok(report)
}
