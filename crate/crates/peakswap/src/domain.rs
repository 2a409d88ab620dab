//! Core types: objects on an axis, strict preferences, assignments,
//! priority orders, and the single-peaked domain.
//!
//! Conventions used throughout the crate: agents and objects are 0-indexed
//! internally, object `0` is the leftmost point of the axis, and every
//! enumeration (`enumerate_single_peaked`, `all_assignments`,
//! `all_agent_orders`) is in lexicographic order so results are reproducible.

use serde::Serialize;
use std::fmt;
use thiserror::Error;

/// Position of an object on the axis; `ObjectId(0)` is the leftmost object.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct ObjectId(pub usize);

impl ObjectId {
    pub fn index(self) -> usize {
        self.0
    }

    /// Name used when the caller supplies no axis names ("o1" = leftmost).
    pub fn canonical_name(self) -> String {
        format!("o{}", self.0 + 1)
    }
}

impl fmt::Debug for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "o{}", self.0 + 1)
    }
}

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "o{}", self.0 + 1)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DomainError {
    #[error("there must be at least one agent")]
    Empty,
    #[error("expected {expected} entries, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("entry {value} is out of range for {n} positions")]
    OutOfRange { value: usize, n: usize },
    #[error("entry {value} appears more than once")]
    Duplicate { value: usize },
}

fn check_permutation(word: &[usize]) -> Result<(), DomainError> {
    let n = word.len();
    if n == 0 {
        return Err(DomainError::Empty);
    }
    let mut seen = vec![false; n];
    for &v in word {
        if v >= n {
            return Err(DomainError::OutOfRange { value: v, n });
        }
        if seen[v] {
            return Err(DomainError::Duplicate { value: v });
        }
        seen[v] = true;
    }
    Ok(())
}

/// A strict ranking of all `n` objects, best first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PreferenceRelation {
    ranking: Vec<ObjectId>,
    rank_by_object: Vec<usize>,
}

impl PreferenceRelation {
    pub fn new(ranking: Vec<ObjectId>) -> Result<Self, DomainError> {
        Self::from_indices(ranking.into_iter().map(ObjectId::index).collect())
    }

    pub fn from_indices(ranking: Vec<usize>) -> Result<Self, DomainError> {
        check_permutation(&ranking)?;
        let mut rank_by_object = vec![0; ranking.len()];
        for (rank, &obj) in ranking.iter().enumerate() {
            rank_by_object[obj] = rank;
        }
        Ok(Self {
            ranking: ranking.into_iter().map(ObjectId).collect(),
            rank_by_object,
        })
    }

    pub fn n(&self) -> usize {
        self.ranking.len()
    }

    /// Objects from best to worst.
    pub fn ranking(&self) -> &[ObjectId] {
        &self.ranking
    }

    pub fn indices(&self) -> Vec<usize> {
        self.ranking.iter().map(|o| o.0).collect()
    }

    /// The most preferred object.
    pub fn peak(&self) -> ObjectId {
        self.ranking[0]
    }

    /// Rank of `obj`, 0 = best.
    pub fn rank_of(&self, obj: ObjectId) -> usize {
        self.rank_by_object[obj.0]
    }

    /// Strict preference of `a` over `b`.
    pub fn prefers(&self, a: ObjectId, b: ObjectId) -> bool {
        self.rank_of(a) < self.rank_of(b)
    }

    /// `a` preferred to `b`, or `a == b`.
    pub fn weakly_prefers(&self, a: ObjectId, b: ObjectId) -> bool {
        self.rank_of(a) <= self.rank_of(b)
    }

    /// Most preferred object among those accepted by `live`.
    pub fn best_among(&self, mut live: impl FnMut(ObjectId) -> bool) -> Option<ObjectId> {
        self.ranking.iter().copied().find(|&o| live(o))
    }

    /// Whether the ranking is single-peaked with respect to the axis order:
    /// of two objects on the same side of the peak, the one nearer the peak
    /// is preferred. Equivalently, every best-first prefix of the ranking
    /// covers a contiguous interval of the axis.
    pub fn is_single_peaked(&self) -> bool {
        let mut lo = self.ranking[0].0;
        let mut hi = lo;
        for &ObjectId(o) in &self.ranking[1..] {
            if o + 1 == lo {
                lo = o;
            } else if o == hi + 1 {
                hi = o;
            } else {
                return false;
            }
        }
        true
    }

    /// The same ranking on the reversed axis (object `k` relabeled `n-1-k`).
    pub fn reflected(&self) -> Self {
        let n = self.n();
        Self::from_indices(self.ranking.iter().map(|o| n - 1 - o.0).collect())
            .expect("reflection of a permutation is a permutation")
    }
}

impl fmt::Debug for PreferenceRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "≻[")?;
        for (i, o) in self.ranking.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{o}")?;
        }
        write!(f, "]")
    }
}

impl Serialize for PreferenceRelation {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.ranking.iter().map(|o| o.0))
    }
}

/// A bijection from agents to objects; entry `i` is the object of agent `i`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Assignment {
    objects_by_agent: Vec<ObjectId>,
}

impl Assignment {
    pub fn new(objects_by_agent: Vec<ObjectId>) -> Result<Self, DomainError> {
        Self::from_indices(objects_by_agent.into_iter().map(ObjectId::index).collect())
    }

    pub fn from_indices(word: Vec<usize>) -> Result<Self, DomainError> {
        check_permutation(&word)?;
        Ok(Self {
            objects_by_agent: word.into_iter().map(ObjectId).collect(),
        })
    }

    /// Agent `i` holds object `i`.
    pub fn identity(n: usize) -> Self {
        Self {
            objects_by_agent: (0..n).map(ObjectId).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.objects_by_agent.len()
    }

    pub fn object_of(&self, agent: usize) -> ObjectId {
        self.objects_by_agent[agent]
    }

    /// Inverse lookup.
    pub fn agent_of(&self, obj: ObjectId) -> usize {
        self.objects_by_agent
            .iter()
            .position(|&o| o == obj)
            .expect("assignment is a bijection")
    }

    pub fn objects(&self) -> &[ObjectId] {
        &self.objects_by_agent
    }

    pub fn indices(&self) -> Vec<usize> {
        self.objects_by_agent.iter().map(|o| o.0).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, ObjectId)> + '_ {
        self.objects_by_agent.iter().copied().enumerate()
    }

    /// The same assignment on the reversed axis.
    pub fn reflected(&self) -> Self {
        let n = self.n();
        Self::from_indices(self.objects_by_agent.iter().map(|o| n - 1 - o.0).collect())
            .expect("reflection of a permutation is a permutation")
    }
}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, o) in self.objects_by_agent.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{o}")?;
        }
        write!(f, ")")
    }
}

/// A strict priority order over agents; entry `r` is the agent with rank `r`
/// (rank 0 picks first).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct AgentOrder {
    agents_by_rank: Vec<usize>,
}

impl AgentOrder {
    pub fn new(agents_by_rank: Vec<usize>) -> Result<Self, DomainError> {
        check_permutation(&agents_by_rank)?;
        Ok(Self { agents_by_rank })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            agents_by_rank: (0..n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.agents_by_rank.len()
    }

    pub fn agent_at_rank(&self, rank: usize) -> usize {
        self.agents_by_rank[rank]
    }

    pub fn agents_by_rank(&self) -> &[usize] {
        &self.agents_by_rank
    }

    pub fn rank_by_agent(&self) -> Vec<usize> {
        let mut ranks = vec![0; self.agents_by_rank.len()];
        for (rank, &agent) in self.agents_by_rank.iter().enumerate() {
            ranks[agent] = rank;
        }
        ranks
    }
}

impl fmt::Debug for AgentOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨")?;
        for (i, a) in self.agents_by_rank.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", a + 1)?;
        }
        write!(f, "⟩")
    }
}

/// A reallocation instance: a preference profile and optionally the current
/// endowment (agent `i` owns `endowment[i]`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub profile: Vec<PreferenceRelation>,
    pub endowment: Option<Assignment>,
}

impl Problem {
    pub fn new(profile: Vec<PreferenceRelation>, endowment: Option<Assignment>) -> Self {
        Self { profile, endowment }
    }

    pub fn n(&self) -> usize {
        self.profile.len()
    }
}

/// One violated invariant of a [`Problem`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationIssue {
    pub code: &'static str,
    pub message: String,
}

impl ValidationIssue {
    pub fn new(code: &'static str, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

/// All invariant violations of `p`, in a fixed order; empty means valid.
///
/// Rankings and endowments are permutations by construction, so the checks
/// here are the cross-field ones: consistent sizes and single-peakedness of
/// every reported ranking.
pub fn validate_problem(p: &Problem) -> Vec<ValidationIssue> {
    let mut issues = Vec::new();
    let n = p.n();
    if n == 0 {
        issues.push(ValidationIssue::new("empty", "problem has no agents"));
        return issues;
    }
    for (i, pref) in p.profile.iter().enumerate() {
        if pref.n() != n {
            issues.push(ValidationIssue::new(
                "ranking-length",
                format!("agent {} ranks {} objects, expected {}", i + 1, pref.n(), n),
            ));
        } else if !pref.is_single_peaked() {
            issues.push(ValidationIssue::new(
                "not-single-peaked",
                format!("agent {}'s ranking is not single-peaked on the axis", i + 1),
            ));
        }
    }
    if let Some(endowment) = &p.endowment {
        if endowment.n() != n {
            issues.push(ValidationIssue::new(
                "endowment-length",
                format!("endowment assigns {} objects, expected {}", endowment.n(), n),
            ));
        }
    }
    issues
}

/// All single-peaked strict rankings of `n` objects, sorted lexicographically
/// by their index words. There are exactly `2^(n-1)` of them.
pub fn enumerate_single_peaked(n: usize) -> Result<Vec<PreferenceRelation>, DomainError> {
    if n == 0 {
        return Err(DomainError::Empty);
    }
    let mut out = Vec::with_capacity(1 << (n - 1));
    let mut word = Vec::with_capacity(n);
    for peak in 0..n {
        word.push(peak);
        extend_interval(peak, peak, n, &mut word, &mut out);
        word.pop();
    }
    out.sort_by(|a, b| a.ranking.cmp(&b.ranking));
    debug_assert_eq!(out.len(), 1 << (n - 1));
    Ok(out)
}

fn extend_interval(
    lo: usize,
    hi: usize,
    n: usize,
    word: &mut Vec<usize>,
    out: &mut Vec<PreferenceRelation>,
) {
    if word.len() == n {
        out.push(PreferenceRelation::from_indices(word.clone()).expect("interval order is valid"));
        return;
    }
    if lo > 0 {
        word.push(lo - 1);
        extend_interval(lo - 1, hi, n, word, out);
        word.pop();
    }
    if hi + 1 < n {
        word.push(hi + 1);
        extend_interval(lo, hi + 1, n, word, out);
        word.pop();
    }
}

pub fn factorial(n: usize) -> u64 {
    assert!(n <= 20, "factorial overflows u64 beyond 20!");
    (1..=n as u64).product()
}

/// All permutations of `0..n` in lexicographic order.
pub fn lex_permutations(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..factorial(n)).map(move |rank| unrank_permutation(n, rank))
}

/// The `rank`-th permutation of `0..n` in lexicographic order
/// (factorial number system).
pub fn unrank_permutation(n: usize, mut rank: u64) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(n);
    for k in (1..=n).rev() {
        let block = factorial(k - 1);
        let idx = (rank / block) as usize;
        rank %= block;
        out.push(pool.remove(idx));
    }
    out
}

/// All assignments of `n` objects in lexicographic order.
pub fn all_assignments(n: usize) -> impl Iterator<Item = Assignment> {
    lex_permutations(n).map(|w| Assignment::from_indices(w).expect("permutation is valid"))
}

/// All priority orders over `n` agents in lexicographic order.
pub fn all_agent_orders(n: usize) -> impl Iterator<Item = AgentOrder> {
    lex_permutations(n).map(|w| AgentOrder::new(w).expect("permutation is valid"))
}
