//! Exhaustive and sampled verification suites.
//!
//! Each suite checks one claim instance by instance and reports every
//! failing instance together with the problem that produced it. Reports are
//! deterministic: the same request yields the same report (up to wall time),
//! whatever the worker count, because instances are indexed up front and
//! failures are sorted by index.

use crate::axioms::{self, AxiomsError, MisreportDomain, Violation};
use crate::bijection::{self, BijectionError, EquivalenceReport};
use crate::domain::{
    enumerate_single_peaked, factorial, lex_permutations, unrank_permutation, Assignment,
    DomainError, PreferenceRelation, Problem,
};
use crate::io::{to_document, ProblemDocument};
use crate::lotteries::{self, LotteryError, RationalLottery};
use crate::rules::{self, RuleError};
use crate::trading_cycles::{self, TradingCyclesError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;
use thiserror::Error;

/// Largest `n` any suite accepts in exhaustive mode.
pub const MAX_EXHAUSTIVE_N: usize = 4;
/// Exhaustive bound for the strict-domain suite, whose profile space is
/// `(n!)^n` rather than `2^(n-1)^n`.
pub const MAX_EXHAUSTIVE_STRICT_N: usize = 3;
/// Largest `n` any suite accepts in sample mode.
pub const MAX_SAMPLE_N: usize = 8;
/// Sample-mode bound for the axioms suite, which enumerates the core.
pub const MAX_SAMPLE_AXIOMS_N: usize = axioms::MAX_CORE_N;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("{0}")]
    Usage(String),
    #[error("{what} is limited to n <= {bound}, got n = {n}")]
    Capability {
        what: String,
        n: usize,
        bound: usize,
    },
    #[error("worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Lottery(#[from] LotteryError),
    #[error(transparent)]
    Axioms(#[from] AxiomsError),
    #[error(transparent)]
    Bijection(#[from] BijectionError),
    #[error(transparent)]
    Comparison(#[from] TradingCyclesError),
}

/// The verification suites, named by their command-line tokens.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// Ascending and descending crawlers coincide on every instance.
    Theorem1,
    /// The crawler from uniformly random endowments equals random priority.
    Theorem2,
    /// Random-endowment crawler, random-endowment core, and random priority
    /// all coincide.
    Corollary1,
    /// The random-endowment core equals random priority on strict profiles,
    /// single-peaked or not.
    RttcRp,
    /// The endowment-to-priority-order construction reproduces the crawler,
    /// is injective, and is onto.
    Bijection,
    /// Efficiency, the endowment lower bound, strategy-proofness,
    /// non-bossiness, and core uniqueness.
    Axioms,
    /// The fixed three-agent comparison of the crawler with two
    /// trading-cycles structures.
    Example3,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Theorem1,
        Suite::Theorem2,
        Suite::Corollary1,
        Suite::RttcRp,
        Suite::Bijection,
        Suite::Axioms,
        Suite::Example3,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Suite::Theorem1 => "theorem1",
            Suite::Theorem2 => "theorem2",
            Suite::Corollary1 => "corollary1",
            Suite::RttcRp => "rttc-rp",
            Suite::Bijection => "bijection",
            Suite::Axioms => "axioms",
            Suite::Example3 => "example3",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Suite {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, VerifyError> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.token() == s)
            .ok_or_else(|| {
                VerifyError::Usage(format!(
                    "unknown suite '{s}'; expected one of: {}",
                    Suite::ALL.map(Suite::token).join(", ")
                ))
            })
    }
}

/// How a suite walks its instance space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Every instance, in lexicographic order.
    Exhaustive,
    /// Independently seeded random instances.
    Sample,
    /// Exhaustive at n = 5; accepted only by the theorem1 suite.
    ExhaustiveN5,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Exhaustive, Mode::Sample, Mode::ExhaustiveN5];

    pub fn token(self) -> &'static str {
        match self {
            Mode::Exhaustive => "exhaustive",
            Mode::Sample => "sample",
            Mode::ExhaustiveN5 => "exhaustive-n5",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Mode {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, VerifyError> {
        Mode::ALL
            .into_iter()
            .find(|mode| mode.token() == s)
            .ok_or_else(|| {
                VerifyError::Usage(format!(
                    "unknown mode '{s}'; expected one of: {}",
                    Mode::ALL.map(Mode::token).join(", ")
                ))
            })
    }
}

/// One suite invocation.
#[derive(Clone, Copy, Debug)]
pub struct SuiteRequest {
    pub suite: Suite,
    pub n: usize,
    pub mode: Mode,
    /// Sample mode only: how many instances to draw.
    pub samples: Option<u64>,
    /// Sample mode only: seed for the instance stream.
    pub seed: Option<u64>,
    /// Worker threads; `None` falls back to `PEAKSWAP_JOBS`, then to the
    /// machine default.
    pub jobs: Option<usize>,
}

/// Why one instance failed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FailureDetail {
    /// Two rules that must agree produced different allocations.
    RuleMismatch {
        left_rule: &'static str,
        right_rule: &'static str,
        left: Assignment,
        right: Assignment,
        differing_agents: Vec<usize>,
    },
    /// Two lotteries that must be equal differ; the first differing entry,
    /// with exact probabilities as (numerator, denominator).
    LotteryMismatch {
        left_rule: &'static str,
        right_rule: &'static str,
        allocation: Assignment,
        left_probability: (u64, u64),
        right_probability: (u64, u64),
    },
    /// The endowment-to-order correspondence broke on this profile.
    EquivalenceFailed { report: EquivalenceReport },
    /// A rule outcome violated an axiom.
    AxiomViolated {
        axiom: &'static str,
        rule: &'static str,
        violation: Violation,
    },
    /// The core is not exactly the top-trading-cycles outcome.
    CoreMismatch {
        expected: Assignment,
        core: Vec<Assignment>,
    },
    /// A named fixed-scenario assertion failed.
    AssertionFailed { name: String },
}

/// One failing instance: its index in the suite's instance space, the
/// problem it decodes to, and what went wrong.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FailureRecord {
    pub index: u64,
    pub problem: ProblemDocument,
    pub detail: FailureDetail,
}

/// Outcome of one suite invocation. Serializes to the report consumers see.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub suite: Suite,
    pub n: usize,
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub instances_checked: u64,
    pub pass: bool,
    pub failures: Vec<FailureRecord>,
    pub wall_time_ms: u64,
}

/// How instances are produced: lexicographic rank or seeded draw.
#[derive(Clone, Copy)]
enum Plan {
    Every,
    Sampled { seed: u64 },
}

/// Run one verification suite to completion.
pub fn run_suite(req: &SuiteRequest) -> Result<VerificationReport, VerifyError> {
    let SuiteRequest {
        suite,
        n,
        mode,
        samples,
        seed,
        jobs,
    } = *req;
    if n == 0 {
        return Err(VerifyError::Usage("n must be at least 1".into()));
    }
    match mode {
        Mode::Sample => {
            if samples.is_none() || seed.is_none() {
                return Err(VerifyError::Usage(
                    "sample mode requires both --samples and --seed".into(),
                ));
            }
            if samples == Some(0) {
                return Err(VerifyError::Usage("--samples must be positive".into()));
            }
        }
        Mode::Exhaustive | Mode::ExhaustiveN5 => {
            if samples.is_some() || seed.is_some() {
                return Err(VerifyError::Usage(
                    "--samples and --seed apply only to sample mode".into(),
                ));
            }
        }
    }
    check_capability(suite, n, mode)?;

    let jobs = resolve_jobs(jobs);
    let plan = match mode {
        Mode::Sample => Plan::Sampled {
            seed: seed.expect("checked above"),
        },
        Mode::Exhaustive | Mode::ExhaustiveN5 => Plan::Every,
    };
    let started = Instant::now();

    let (instances, failures) = match suite {
        Suite::Theorem1 => {
            let orders = enumerate_single_peaked(n)?;
            let total = pair_space(&plan, samples, orders.len(), n);
            let failures = run_indexed(total, jobs, |i| {
                let (profile, endowment) = pair_instance(&plan, &orders, n, i);
                let detail = check_theorem1(&profile, &endowment)?;
                Ok(detail.map(|d| record(i, &profile, Some(&endowment), d)))
            })?;
            (total, failures)
        }
        Suite::Theorem2 => {
            let orders = enumerate_single_peaked(n)?;
            let total = profile_space(&plan, samples, orders.len(), n);
            let failures = run_indexed(total, jobs, |i| {
                let profile = profile_instance(&plan, &orders, n, i);
                let detail = check_theorem2(&profile)?;
                Ok(detail.map(|d| record(i, &profile, None, d)))
            })?;
            (total, failures)
        }
        Suite::Corollary1 => {
            let orders = enumerate_single_peaked(n)?;
            let total = profile_space(&plan, samples, orders.len(), n);
            let failures = run_indexed(total, jobs, |i| {
                let profile = profile_instance(&plan, &orders, n, i);
                let detail = check_corollary1(&profile)?;
                Ok(detail.map(|d| record(i, &profile, None, d)))
            })?;
            (total, failures)
        }
        Suite::RttcRp => {
            let orders: Vec<PreferenceRelation> = lex_permutations(n)
                .map(|w| PreferenceRelation::from_indices(w).expect("permutation is valid"))
                .collect();
            let total = profile_space(&plan, samples, orders.len(), n);
            let failures = run_indexed(total, jobs, |i| {
                let profile = profile_instance(&plan, &orders, n, i);
                let detail = check_rttc_rp(&profile)?;
                Ok(detail.map(|d| record(i, &profile, None, d)))
            })?;
            (total, failures)
        }
        Suite::Bijection => {
            let orders = enumerate_single_peaked(n)?;
            let total = profile_space(&plan, samples, orders.len(), n);
            let failures = run_indexed(total, jobs, |i| {
                let profile = profile_instance(&plan, &orders, n, i);
                let detail = check_bijection(&profile)?;
                Ok(detail.map(|d| record(i, &profile, None, d)))
            })?;
            (total, failures)
        }
        Suite::Axioms => {
            let orders = enumerate_single_peaked(n)?;
            let total = pair_space(&plan, samples, orders.len(), n);
            let failures = run_indexed(total, jobs, |i| {
                let (profile, endowment) = pair_instance(&plan, &orders, n, i);
                let detail = check_axioms(&profile, &endowment)?;
                Ok(detail.map(|d| record(i, &profile, Some(&endowment), d)))
            })?;
            (total, failures)
        }
        Suite::Example3 => {
            let report = trading_cycles::reproduce_comparison()?;
            let total = report.assertions.len() as u64;
            let identity = Assignment::identity(3);
            let up = unanimous3(&[0, 1, 2]);
            let down = unanimous3(&[2, 1, 0]);
            let pivot = trading_cycles::pivot_profile();
            // Assertions 0-1 concern the pivot profile, 2 the ascending
            // unanimous one, 3 the descending one, 4 both (ascending shown).
            let profiles = [&pivot, &pivot, &up, &down, &up];
            let failures = report
                .assertions
                .iter()
                .enumerate()
                .filter(|(_, a)| !a.holds)
                .map(|(k, a)| {
                    record(
                        k as u64,
                        profiles[k.min(profiles.len() - 1)],
                        Some(&identity),
                        FailureDetail::AssertionFailed {
                            name: a.name.to_string(),
                        },
                    )
                })
                .collect();
            (total, failures)
        }
    };

    Ok(VerificationReport {
        suite,
        n,
        mode,
        samples,
        seed,
        instances_checked: instances,
        pass: failures.is_empty(),
        failures,
        wall_time_ms: started.elapsed().as_millis() as u64,
    })
}

fn check_capability(suite: Suite, n: usize, mode: Mode) -> Result<(), VerifyError> {
    let over = |what: String, bound: usize| -> Result<(), VerifyError> {
        if n > bound {
            Err(VerifyError::Capability { what, n, bound })
        } else {
            Ok(())
        }
    };
    match (suite, mode) {
        (Suite::Example3, Mode::Exhaustive) => {
            if n != 3 {
                return Err(VerifyError::Usage(
                    "example3 is a fixed scenario at n = 3".into(),
                ));
            }
            Ok(())
        }
        (Suite::Example3, _) => Err(VerifyError::Usage(
            "example3 runs only in exhaustive mode".into(),
        )),
        (Suite::Theorem1, Mode::ExhaustiveN5) => {
            if n != 5 {
                return Err(VerifyError::Usage(format!(
                    "exhaustive-n5 runs at n = 5, got n = {n}"
                )));
            }
            Ok(())
        }
        (_, Mode::ExhaustiveN5) => Err(VerifyError::Usage(
            "exhaustive-n5 applies only to the theorem1 suite".into(),
        )),
        (Suite::RttcRp, Mode::Exhaustive) => over(
            "rttc-rp in exhaustive mode".into(),
            MAX_EXHAUSTIVE_STRICT_N,
        ),
        (suite, Mode::Exhaustive) => over(
            format!("{suite} in exhaustive mode"),
            MAX_EXHAUSTIVE_N,
        ),
        (Suite::Axioms, Mode::Sample) => {
            over("axioms in sample mode".into(), MAX_SAMPLE_AXIOMS_N)
        }
        (suite, Mode::Sample) => over(format!("{suite} in sample mode"), MAX_SAMPLE_N),
    }
}

fn resolve_jobs(explicit: Option<usize>) -> usize {
    explicit
        .or_else(|| {
            std::env::var("PEAKSWAP_JOBS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(0)
}

/// Map each index through `check` on a dedicated pool and collect the
/// failures sorted by index. `jobs == 0` means the machine default.
fn run_indexed<F>(total: u64, jobs: usize, check: F) -> Result<Vec<FailureRecord>, VerifyError>
where
    F: Fn(u64) -> Result<Option<FailureRecord>, VerifyError> + Send + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| VerifyError::Pool(e.to_string()))?;
    let mut failures: Vec<FailureRecord> = pool.install(|| {
        (0..total)
            .into_par_iter()
            .try_fold(Vec::new, |mut acc: Vec<FailureRecord>, i| {
                if let Some(failure) = check(i)? {
                    acc.push(failure);
                }
                Ok::<_, VerifyError>(acc)
            })
            .try_reduce(Vec::new, |mut left, mut right| {
                left.append(&mut right);
                Ok(left)
            })
    })?;
    failures.sort_by_key(|f| f.index);
    Ok(failures)
}

fn profile_space(plan: &Plan, samples: Option<u64>, base: usize, n: usize) -> u64 {
    match plan {
        Plan::Every => (base as u64)
            .checked_pow(n as u32)
            .expect("profile space fits in u64 at supported sizes"),
        Plan::Sampled { .. } => samples.expect("sample mode carries a count"),
    }
}

fn pair_space(plan: &Plan, samples: Option<u64>, base: usize, n: usize) -> u64 {
    match plan {
        Plan::Every => profile_space(plan, samples, base, n)
            .checked_mul(factorial(n))
            .expect("instance space fits in u64 at supported sizes"),
        Plan::Sampled { .. } => samples.expect("sample mode carries a count"),
    }
}

/// Decode index `i` to a profile: digits of `i` base `orders.len()`, agent 0
/// most significant. In sample mode, draw from stream `i` instead.
fn profile_instance(
    plan: &Plan,
    orders: &[PreferenceRelation],
    n: usize,
    i: u64,
) -> Vec<PreferenceRelation> {
    match plan {
        Plan::Every => profile_from_rank(orders, n, i),
        Plan::Sampled { seed } => sample_profile(&mut stream(*seed, i), orders, n),
    }
}

/// Decode index `i` to (profile, endowment): profile rank `i / n!`, endowment
/// rank `i % n!`. In sample mode, draw the profile first, then the endowment.
fn pair_instance(
    plan: &Plan,
    orders: &[PreferenceRelation],
    n: usize,
    i: u64,
) -> (Vec<PreferenceRelation>, Assignment) {
    match plan {
        Plan::Every => {
            let nf = factorial(n);
            let profile = profile_from_rank(orders, n, i / nf);
            let endowment = Assignment::from_indices(unrank_permutation(n, i % nf))
                .expect("permutation is valid");
            (profile, endowment)
        }
        Plan::Sampled { seed } => {
            let mut rng = stream(*seed, i);
            let profile = sample_profile(&mut rng, orders, n);
            let endowment = sample_endowment(&mut rng, n);
            (profile, endowment)
        }
    }
}

fn profile_from_rank(
    orders: &[PreferenceRelation],
    n: usize,
    mut rank: u64,
) -> Vec<PreferenceRelation> {
    let base = orders.len() as u64;
    let mut picks = vec![0usize; n];
    for agent in (0..n).rev() {
        picks[agent] = (rank % base) as usize;
        rank /= base;
    }
    picks.into_iter().map(|k| orders[k].clone()).collect()
}

fn stream(seed: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    rng
}

fn sample_profile(
    rng: &mut ChaCha8Rng,
    orders: &[PreferenceRelation],
    n: usize,
) -> Vec<PreferenceRelation> {
    (0..n)
        .map(|_| orders[rng.gen_range(0..orders.len())].clone())
        .collect()
}

fn sample_endowment(rng: &mut ChaCha8Rng, n: usize) -> Assignment {
    Assignment::from_indices(unrank_permutation(n, rng.gen_range(0..factorial(n))))
        .expect("permutation is valid")
}

fn record(
    index: u64,
    profile: &[PreferenceRelation],
    endowment: Option<&Assignment>,
    detail: FailureDetail,
) -> FailureRecord {
    let problem = Problem {
        profile: profile.to_vec(),
        endowment: endowment.cloned(),
    };
    FailureRecord {
        index,
        problem: to_document(&problem, None),
        detail,
    }
}

fn unanimous3(word: &[usize]) -> Vec<PreferenceRelation> {
    let one = PreferenceRelation::from_indices(word.to_vec()).expect("valid ranking");
    vec![one; 3]
}

fn rule_mismatch(
    left_rule: &'static str,
    right_rule: &'static str,
    left: Assignment,
    right: Assignment,
) -> FailureDetail {
    let differing_agents = (0..left.n())
        .filter(|&a| left.object_of(a) != right.object_of(a))
        .collect();
    FailureDetail::RuleMismatch {
        left_rule,
        right_rule,
        left,
        right,
        differing_agents,
    }
}

fn lottery_mismatch(
    left_rule: &'static str,
    right_rule: &'static str,
    left: &RationalLottery,
    right: &RationalLottery,
) -> Result<Option<FailureDetail>, VerifyError> {
    match lotteries::compare(left, right)? {
        lotteries::LotteryComparison::Equal => Ok(None),
        lotteries::LotteryComparison::Differs {
            allocation,
            left: left_probability,
            right: right_probability,
        } => Ok(Some(FailureDetail::LotteryMismatch {
            left_rule,
            right_rule,
            allocation,
            left_probability,
            right_probability,
        })),
    }
}

fn check_theorem1(
    profile: &[PreferenceRelation],
    endowment: &Assignment,
) -> Result<Option<FailureDetail>, VerifyError> {
    let ascending = rules::ascending_crawler(profile, endowment)?.0;
    let descending = rules::descending_crawler(profile, endowment)?.0;
    if ascending == descending {
        Ok(None)
    } else {
        Ok(Some(rule_mismatch(
            "ascending crawler",
            "descending crawler",
            ascending,
            descending,
        )))
    }
}

fn check_theorem2(profile: &[PreferenceRelation]) -> Result<Option<FailureDetail>, VerifyError> {
    let crawler = lotteries::crawler_from_random_endowments(profile)?;
    let priority = lotteries::random_priority(profile)?;
    lottery_mismatch(
        "crawler from random endowments",
        "random priority",
        &crawler,
        &priority,
    )
}

fn check_corollary1(profile: &[PreferenceRelation]) -> Result<Option<FailureDetail>, VerifyError> {
    let crawler = lotteries::crawler_from_random_endowments(profile)?;
    let core = lotteries::core_from_random_endowments(profile)?;
    if let Some(detail) = lottery_mismatch(
        "crawler from random endowments",
        "core from random endowments",
        &crawler,
        &core,
    )? {
        return Ok(Some(detail));
    }
    let priority = lotteries::random_priority(profile)?;
    lottery_mismatch(
        "core from random endowments",
        "random priority",
        &core,
        &priority,
    )
}

fn check_rttc_rp(profile: &[PreferenceRelation]) -> Result<Option<FailureDetail>, VerifyError> {
    let core = lotteries::core_from_random_endowments(profile)?;
    let priority = lotteries::random_priority(profile)?;
    lottery_mismatch(
        "core from random endowments",
        "random priority",
        &core,
        &priority,
    )
}

fn check_bijection(profile: &[PreferenceRelation]) -> Result<Option<FailureDetail>, VerifyError> {
    let report = bijection::verify_equivalence_for_profile(profile)?;
    if report.passed() {
        Ok(None)
    } else {
        Ok(Some(FailureDetail::EquivalenceFailed { report }))
    }
}

fn check_axioms(
    profile: &[PreferenceRelation],
    endowment: &Assignment,
) -> Result<Option<FailureDetail>, VerifyError> {
    let ascending = rules::ascending_crawler(profile, endowment)?.0;
    let descending = rules::descending_crawler(profile, endowment)?.0;
    let cycles = rules::ttc(profile, endowment)?;
    let outcomes: [(&'static str, &Assignment); 3] = [
        ("ascending crawler", &ascending),
        ("descending crawler", &descending),
        ("top trading cycles", &cycles),
    ];
    for (rule, outcome) in outcomes {
        if let Some(v) = axioms::is_efficient(outcome, profile)?.violation() {
            return Ok(Some(FailureDetail::AxiomViolated {
                axiom: "efficiency",
                rule,
                violation: v.clone(),
            }));
        }
        if let Some(v) =
            axioms::meets_endowment_lower_bound(outcome, profile, endowment).violation()
        {
            return Ok(Some(FailureDetail::AxiomViolated {
                axiom: "endowment-lower-bound",
                rule,
                violation: v.clone(),
            }));
        }
    }
    type Sweep = fn(&[PreferenceRelation], &Assignment) -> Result<Assignment, RuleError>;
    let sweeps: [(&'static str, Sweep); 2] = [
        ("ascending crawler", |p, w| {
            rules::ascending_crawler(p, w).map(|r| r.0)
        }),
        ("descending crawler", |p, w| {
            rules::descending_crawler(p, w).map(|r| r.0)
        }),
    ];
    for (rule, sweep) in sweeps {
        let fixed = |p: &[PreferenceRelation]| sweep(p, endowment);
        if let Some(v) = axioms::find_strategyproofness_violation(
            fixed,
            profile,
            MisreportDomain::SinglePeaked,
        )? {
            return Ok(Some(FailureDetail::AxiomViolated {
                axiom: "strategy-proofness",
                rule,
                violation: v,
            }));
        }
        if let Some(v) =
            axioms::find_bossiness_violation(fixed, profile, MisreportDomain::SinglePeaked)?
        {
            return Ok(Some(FailureDetail::AxiomViolated {
                axiom: "non-bossiness",
                rule,
                violation: v,
            }));
        }
    }
    let core = axioms::core_allocations(profile, endowment)?;
    if core != [cycles.clone()] {
        return Ok(Some(FailureDetail::CoreMismatch {
            expected: cycles,
            core,
        }));
    }
    Ok(None)
}

/// Outcome pair exhibiting the crawler and top trading cycles apart.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivergenceWitness {
    pub problem: ProblemDocument,
    pub crawler: Assignment,
    pub top_trading_cycles: Assignment,
}

/// First (profile, endowment) in lexicographic order, if any, where the
/// crawler and top trading cycles disagree.
pub fn find_crawler_ttc_divergence(n: usize) -> Result<Option<DivergenceWitness>, VerifyError> {
    if n == 0 {
        return Err(VerifyError::Usage("n must be at least 1".into()));
    }
    if n > MAX_EXHAUSTIVE_N {
        return Err(VerifyError::Capability {
            what: "the crawler/top-trading-cycles divergence scan".into(),
            n,
            bound: MAX_EXHAUSTIVE_N,
        });
    }
    let orders = enumerate_single_peaked(n)?;
    let profiles = (orders.len() as u64).pow(n as u32);
    for rank in 0..profiles {
        let profile = profile_from_rank(&orders, n, rank);
        for word in lex_permutations(n) {
            let endowment = Assignment::from_indices(word).expect("permutation is valid");
            let crawler = rules::crawler(&profile, &endowment)?;
            let cycles = rules::ttc(&profile, &endowment)?;
            if crawler != cycles {
                let problem = Problem {
                    profile,
                    endowment: Some(endowment),
                };
                return Ok(Some(DivergenceWitness {
                    problem: to_document(&problem, None),
                    crawler,
                    top_trading_cycles: cycles,
                }));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exhaustive(suite: Suite, n: usize) -> SuiteRequest {
        SuiteRequest {
            suite,
            n,
            mode: Mode::Exhaustive,
            samples: None,
            seed: None,
            jobs: Some(2),
        }
    }

    fn sampled(suite: Suite, n: usize, samples: u64, seed: u64, jobs: usize) -> SuiteRequest {
        SuiteRequest {
            suite,
            n,
            mode: Mode::Sample,
            samples: Some(samples),
            seed: Some(seed),
            jobs: Some(jobs),
        }
    }

    #[test]
    fn tokens_round_trip() {
        for suite in Suite::ALL {
            assert_eq!(suite.token().parse::<Suite>().unwrap(), suite);
            assert_eq!(
                serde_json::to_string(&suite).unwrap(),
                format!("\"{suite}\"")
            );
        }
        for mode in Mode::ALL {
            assert_eq!(mode.token().parse::<Mode>().unwrap(), mode);
            assert_eq!(serde_json::to_string(&mode).unwrap(), format!("\"{mode}\""));
        }
        assert!(matches!(
            "theorem9".parse::<Suite>(),
            Err(VerifyError::Usage(_))
        ));
        assert!(matches!(
            "fast".parse::<Mode>(),
            Err(VerifyError::Usage(_))
        ));
    }

    #[test]
    fn crawler_sweeps_agree_exhaustively() {
        let small = run_suite(&exhaustive(Suite::Theorem1, 2)).unwrap();
        assert_eq!(small.instances_checked, 4 * 2);
        assert!(small.pass, "{:?}", small.failures.first());
        assert!(small.failures.is_empty());

        let medium = run_suite(&exhaustive(Suite::Theorem1, 3)).unwrap();
        assert_eq!(medium.instances_checked, 4u64.pow(3) * 6);
        assert!(medium.pass, "{:?}", medium.failures.first());
    }

    #[test]
    fn lottery_suites_agree_exhaustively() {
        let theorem2 = run_suite(&exhaustive(Suite::Theorem2, 3)).unwrap();
        assert_eq!(theorem2.instances_checked, 64);
        assert!(theorem2.pass, "{:?}", theorem2.failures.first());

        let corollary1 = run_suite(&exhaustive(Suite::Corollary1, 3)).unwrap();
        assert_eq!(corollary1.instances_checked, 64);
        assert!(corollary1.pass, "{:?}", corollary1.failures.first());

        let strict = run_suite(&exhaustive(Suite::RttcRp, 3)).unwrap();
        assert_eq!(strict.instances_checked, 216);
        assert!(strict.pass, "{:?}", strict.failures.first());
    }

    #[test]
    fn bijection_and_axioms_suites_pass_small() {
        let bijection = run_suite(&exhaustive(Suite::Bijection, 3)).unwrap();
        assert_eq!(bijection.instances_checked, 64);
        assert!(bijection.pass, "{:?}", bijection.failures.first());

        let axioms = run_suite(&exhaustive(Suite::Axioms, 3)).unwrap();
        assert_eq!(axioms.instances_checked, 64 * 6);
        assert!(axioms.pass, "{:?}", axioms.failures.first());
    }

    #[test]
    fn fixed_scenario_suite_reports_each_assertion() {
        let report = run_suite(&exhaustive(Suite::Example3, 3)).unwrap();
        assert_eq!(report.instances_checked, 5);
        assert!(report.pass);
        assert!(report.failures.is_empty());
    }

    #[test]
    fn sampling_is_deterministic_across_worker_counts() {
        let single = run_suite(&sampled(Suite::Theorem1, 5, 400, 11, 1)).unwrap();
        let pooled = run_suite(&sampled(Suite::Theorem1, 5, 400, 11, 4)).unwrap();
        assert_eq!(single.instances_checked, 400);
        assert!(single.pass);
        let strip = |mut r: VerificationReport| {
            r.wall_time_ms = 0;
            r
        };
        assert_eq!(strip(single), strip(pooled));
    }

    #[test]
    fn sampled_lottery_suites_pass_beyond_exhaustive_reach() {
        let theorem2 = run_suite(&sampled(Suite::Theorem2, 5, 12, 3, 2)).unwrap();
        assert!(theorem2.pass, "{:?}", theorem2.failures.first());
        let strict = run_suite(&sampled(Suite::RttcRp, 5, 8, 3, 2)).unwrap();
        assert!(strict.pass, "{:?}", strict.failures.first());
        let axioms = run_suite(&sampled(Suite::Axioms, 5, 8, 3, 2)).unwrap();
        assert!(axioms.pass, "{:?}", axioms.failures.first());
    }

    #[test]
    fn requests_outside_capability_are_rejected() {
        let capability = |req: &SuiteRequest| match run_suite(req) {
            Err(VerifyError::Capability { bound, .. }) => bound,
            other => panic!("expected capability error, got {other:?}"),
        };
        assert_eq!(capability(&exhaustive(Suite::Theorem1, 5)), 4);
        assert_eq!(capability(&exhaustive(Suite::RttcRp, 4)), 3);
        assert_eq!(capability(&sampled(Suite::Theorem2, 9, 5, 1, 1)), 8);
        assert_eq!(capability(&sampled(Suite::Axioms, 7, 5, 1, 1)), 6);
    }

    #[test]
    fn malformed_requests_are_usage_errors() {
        let usage = |req: &SuiteRequest| match run_suite(req) {
            Err(VerifyError::Usage(message)) => message,
            other => panic!("expected usage error, got {other:?}"),
        };
        let mut missing_seed = sampled(Suite::Theorem1, 3, 10, 0, 1);
        missing_seed.seed = None;
        assert!(usage(&missing_seed).contains("--seed"));

        let mut stray_samples = exhaustive(Suite::Theorem1, 3);
        stray_samples.samples = Some(10);
        assert!(usage(&stray_samples).contains("sample mode"));

        assert!(usage(&exhaustive(Suite::Example3, 4)).contains("n = 3"));
        assert!(usage(&sampled(Suite::Example3, 3, 5, 1, 1)).contains("exhaustive"));

        let mut wrong_n5 = exhaustive(Suite::Theorem2, 4);
        wrong_n5.mode = Mode::ExhaustiveN5;
        assert!(usage(&wrong_n5).contains("theorem1"));

        let mut n5_at_4 = exhaustive(Suite::Theorem1, 4);
        n5_at_4.mode = Mode::ExhaustiveN5;
        assert!(usage(&n5_at_4).contains("n = 5"));

        assert!(usage(&exhaustive(Suite::Theorem1, 0)).contains("at least 1"));
    }

    #[test]
    fn rule_mismatch_lists_differing_agents() {
        let left = Assignment::from_indices(vec![0, 1, 2]).unwrap();
        let right = Assignment::from_indices(vec![0, 2, 1]).unwrap();
        match rule_mismatch("a", "b", left, right) {
            FailureDetail::RuleMismatch {
                differing_agents, ..
            } => assert_eq!(differing_agents, vec![1, 2]),
            other => panic!("unexpected detail {other:?}"),
        }
    }

    #[test]
    fn divergence_scan_finds_a_witness() {
        assert_eq!(find_crawler_ttc_divergence(1).unwrap(), None);
        let witness = find_crawler_ttc_divergence(4)
            .unwrap()
            .expect("the crawler and top trading cycles separate at n = 4");
        assert_ne!(witness.crawler, witness.top_trading_cycles);
        assert!(witness.problem.endowment.is_some());
        assert!(matches!(
            find_crawler_ttc_divergence(5),
            Err(VerifyError::Capability { .. })
        ));
    }
}
