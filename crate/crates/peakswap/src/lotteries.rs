//! Exact lotteries over allocations induced by randomizing a rule's
//! parameter uniformly: the priority order for serial dictatorship, the
//! endowment for the crawler and for top trading cycles.
//!
//! Probabilities are stored as integer counts over the fixed denominator
//! `n!`, never reduced and never converted to floating point, so equality
//! between lotteries is exact. Entries live in a `BTreeMap` keyed by the
//! allocation word, which fixes the iteration order everywhere (CSV export,
//! comparison, reports).

use crate::domain::{all_agent_orders, all_assignments, factorial, Assignment, PreferenceRelation};
use crate::rules::{crawler, sequential_priority, ttc, RuleError};
use itertools::{EitherOrBoth, Itertools};
use std::collections::BTreeMap;
use std::io::{self, Write};
use thiserror::Error;

/// Largest `n` for which the `n!`-fold enumerations run.
pub const MAX_LOTTERY_N: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LotteryError {
    #[error("{what} enumerates {n}! outcomes and is limited to {bound} agents")]
    Capability {
        what: &'static str,
        n: usize,
        bound: usize,
    },
    #[error("cannot compare lotteries over {left} and {right} agents")]
    SizeMismatch { left: usize, right: usize },
    #[error("expected {expected} outcomes, got {got}")]
    WrongItemCount { expected: u64, got: u64 },
    #[error(transparent)]
    Rule(#[from] RuleError),
}

/// A probability distribution over allocations with denominator `n!`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalLottery {
    n: usize,
    denominator: u64,
    counts: BTreeMap<Assignment, u64>,
}

impl RationalLottery {
    /// Accumulates one unit of weight per outcome. The outcome stream must
    /// contain exactly `n!` items; addition is commutative, so any
    /// enumeration order of the same outcomes builds the same lottery.
    pub fn uniform_over<I>(n: usize, outcomes: I) -> Result<Self, LotteryError>
    where
        I: IntoIterator<Item = Result<Assignment, RuleError>>,
    {
        let denominator = factorial(n);
        let mut counts: BTreeMap<Assignment, u64> = BTreeMap::new();
        let mut total = 0u64;
        for outcome in outcomes {
            *counts.entry(outcome?).or_insert(0) += 1;
            total += 1;
        }
        if total != denominator {
            return Err(LotteryError::WrongItemCount {
                expected: denominator,
                got: total,
            });
        }
        Ok(Self {
            n,
            denominator,
            counts,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    /// Probability of `x` as (numerator, denominator), unreduced.
    pub fn probability(&self, x: &Assignment) -> (u64, u64) {
        (self.counts.get(x).copied().unwrap_or(0), self.denominator)
    }

    /// Support entries in lexicographic order of the allocation word.
    pub fn entries(&self) -> impl Iterator<Item = (&Assignment, u64)> {
        self.counts.iter().map(|(a, &c)| (a, c))
    }

    pub fn support_size(&self) -> usize {
        self.counts.len()
    }

    /// Writes `allocation,numerator,denominator` rows in entry order.
    /// `names[k]` labels object `k`; `None` uses the canonical names.
    pub fn write_csv<W: Write>(&self, names: Option<&[String]>, out: &mut W) -> io::Result<()> {
        writeln!(out, "allocation,numerator,denominator")?;
        for (allocation, numerator) in self.entries() {
            let label = allocation
                .objects()
                .iter()
                .map(|o| match names {
                    Some(names) => names[o.index()].clone(),
                    None => o.canonical_name(),
                })
                .join("-");
            writeln!(out, "{label},{numerator},{}", self.denominator)?;
        }
        Ok(())
    }
}

/// Result of comparing two lotteries entry by entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LotteryComparison {
    Equal,
    /// The lexicographically first allocation whose probabilities differ.
    Differs {
        allocation: Assignment,
        left: (u64, u64),
        right: (u64, u64),
    },
}

impl LotteryComparison {
    pub fn is_equal(&self) -> bool {
        matches!(self, LotteryComparison::Equal)
    }
}

/// Exact equality check; on inequality reports the first differing entry in
/// lexicographic order.
pub fn compare(
    left: &RationalLottery,
    right: &RationalLottery,
) -> Result<LotteryComparison, LotteryError> {
    if left.n != right.n {
        return Err(LotteryError::SizeMismatch {
            left: left.n,
            right: right.n,
        });
    }
    for pair in left
        .counts
        .iter()
        .merge_join_by(right.counts.iter(), |(a, _), (b, _)| a.cmp(b))
    {
        let (allocation, lc, rc) = match pair {
            EitherOrBoth::Both((a, &lc), (_, &rc)) => (a, lc, rc),
            EitherOrBoth::Left((a, &lc)) => (a, lc, 0),
            EitherOrBoth::Right((a, &rc)) => (a, 0, rc),
        };
        if lc != rc {
            return Ok(LotteryComparison::Differs {
                allocation: allocation.clone(),
                left: (lc, left.denominator),
                right: (rc, right.denominator),
            });
        }
    }
    Ok(LotteryComparison::Equal)
}

fn check_bound(what: &'static str, n: usize) -> Result<(), LotteryError> {
    if n == 0 || n > MAX_LOTTERY_N {
        return Err(LotteryError::Capability {
            what,
            n,
            bound: MAX_LOTTERY_N,
        });
    }
    Ok(())
}

/// Serial dictatorship under a uniformly random priority order. Strict
/// preferences suffice.
pub fn random_priority(profile: &[PreferenceRelation]) -> Result<RationalLottery, LotteryError> {
    let n = profile.len();
    check_bound("random_priority", n)?;
    RationalLottery::uniform_over(
        n,
        all_agent_orders(n).map(|f| sequential_priority(profile, &f)),
    )
}

/// The crawler run from a uniformly random endowment. Requires a
/// single-peaked profile.
pub fn crawler_from_random_endowments(
    profile: &[PreferenceRelation],
) -> Result<RationalLottery, LotteryError> {
    let n = profile.len();
    check_bound("crawler_from_random_endowments", n)?;
    RationalLottery::uniform_over(n, all_assignments(n).map(|w| crawler(profile, &w)))
}

/// Top trading cycles run from a uniformly random endowment. Strict
/// preferences suffice.
pub fn core_from_random_endowments(
    profile: &[PreferenceRelation],
) -> Result<RationalLottery, LotteryError> {
    let n = profile.len();
    check_bound("core_from_random_endowments", n)?;
    RationalLottery::uniform_over(n, all_assignments(n).map(|w| ttc(profile, &w)))
}
