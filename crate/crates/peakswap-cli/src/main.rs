//! `peakswap`: run reallocation rules on problem files, verify the
//! equivalence and axiom suites, and export exact rule distributions.
//!
//! Exit codes: 0 = success / all checks passed, 1 = a verification suite
//! found failures, 2 = usage or input errors.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use peakswap::domain::Assignment;
use peakswap::io::{parse_order, parse_problem, ObjectRef, ParsedProblem};
use peakswap::lotteries::{self, RationalLottery};
use peakswap::rules;
use peakswap::verify::{run_suite, Mode, Suite, SuiteRequest};
use serde::Serialize;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "peakswap", version, about = "Object reallocation rules on single-peaked preferences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one rule on a problem file and print the allocation.
    Run {
        /// Rule to run.
        #[arg(value_enum)]
        rule: RuleName,
        /// Problem JSON file.
        problem: PathBuf,
        /// Also print the step-by-step trace (acr and dcr only).
        #[arg(long)]
        trace: bool,
        /// Priority order for sp, as comma-separated 1-based agent numbers.
        #[arg(long)]
        order: Option<String>,
    },
    /// Run a verification suite and print its report as JSON.
    Verify {
        /// Suite: theorem1, theorem2, corollary1, rttc-rp, bijection,
        /// axioms, or example3.
        suite: String,
        /// Number of agents.
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Instance walk: exhaustive, sample, or exhaustive-n5.
        #[arg(long, default_value = "exhaustive")]
        mode: String,
        /// Sample mode: number of instances to draw.
        #[arg(long)]
        samples: Option<u64>,
        /// Sample mode: seed for the instance stream.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: PEAKSWAP_JOBS, then all cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Print the exact distribution a random-order rule induces.
    Distribution {
        /// Lifting: rp (random priority), rcr (crawler from random
        /// endowments), or rttc (core from random endowments).
        #[arg(value_enum)]
        lifting: LiftingName,
        /// Problem JSON file; any endowment in it is ignored.
        problem: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RuleName {
    /// Ascending crawler.
    Acr,
    /// Descending crawler.
    Dcr,
    /// Top trading cycles.
    Ttc,
    /// Sequential priority (needs --order).
    Sp,
}

#[derive(Clone, Copy, ValueEnum)]
enum LiftingName {
    Rp,
    Rcr,
    Rttc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run {
            rule,
            problem,
            trace,
            order,
        } => cmd_run(rule, &problem, trace, order.as_deref()),
        Command::Verify {
            suite,
            n,
            mode,
            samples,
            seed,
            jobs,
        } => cmd_verify(&suite, n, &mode, samples, seed, jobs),
        Command::Distribution {
            lifting,
            problem,
            format,
        } => cmd_distribution(lifting, &problem, format),
    }
}

fn load_problem(path: &Path) -> Result<ParsedProblem> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    Ok(parse_problem(&text)?)
}

#[derive(Serialize)]
struct AllocationDocument {
    allocation: Vec<ObjectRef>,
}

fn object_refs(allocation: &Assignment, names: Option<&[String]>) -> Vec<ObjectRef> {
    allocation
        .objects()
        .iter()
        .map(|o| match names {
            Some(names) => ObjectRef::Name(names[o.index()].clone()),
            None => ObjectRef::Index(o.index()),
        })
        .collect()
}

fn cmd_run(rule: RuleName, path: &Path, trace: bool, order: Option<&str>) -> Result<ExitCode> {
    if order.is_some() && rule != RuleName::Sp {
        bail!("--order applies only to sp");
    }
    if trace && !matches!(rule, RuleName::Acr | RuleName::Dcr) {
        bail!("--trace is available for acr and dcr only");
    }
    let ParsedProblem { problem, names } = load_problem(path)?;
    let endowment = || {
        problem
            .endowment
            .clone()
            .ok_or_else(|| anyhow!("this rule needs an endowment in the problem file"))
    };
    let (allocation, steps) = match rule {
        RuleName::Acr => {
            let (a, steps) = rules::ascending_crawler(&problem.profile, &endowment()?)?;
            (a, Some(steps))
        }
        RuleName::Dcr => {
            let (a, steps) = rules::descending_crawler(&problem.profile, &endowment()?)?;
            (a, Some(steps))
        }
        RuleName::Ttc => (rules::ttc(&problem.profile, &endowment()?)?, None),
        RuleName::Sp => {
            let order = order.ok_or_else(|| anyhow!("sp needs --order, e.g. --order \"2,1,3\""))?;
            let order = parse_order(order, problem.n())?;
            (rules::sequential_priority(&problem.profile, &order)?, None)
        }
    };
    let document = AllocationDocument {
        allocation: object_refs(&allocation, names.as_deref()),
    };
    println!("{}", serde_json::to_string(&document)?);
    if trace {
        let steps = steps.expect("traced rules produce steps");
        print!("{}", rules::render_trace(&steps, names.as_deref()));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(
    suite: &str,
    n: usize,
    mode: &str,
    samples: Option<u64>,
    seed: Option<u64>,
    jobs: Option<usize>,
) -> Result<ExitCode> {
    let request = SuiteRequest {
        suite: suite.parse::<Suite>()?,
        n,
        mode: mode.parse::<Mode>()?,
        samples,
        seed,
        jobs,
    };
    let report = run_suite(&request)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(ExitCode::from(exit_code(report.pass)))
}

fn exit_code(pass: bool) -> u8 {
    if pass {
        0
    } else {
        1
    }
}

#[derive(Serialize)]
struct DistributionDocument {
    rule: &'static str,
    n: usize,
    denominator: u64,
    entries: Vec<DistributionEntry>,
}

#[derive(Serialize)]
struct DistributionEntry {
    allocation: Vec<ObjectRef>,
    numerator: u64,
}

fn cmd_distribution(lifting: LiftingName, path: &Path, format: Format) -> Result<ExitCode> {
    let ParsedProblem { problem, names } = load_problem(path)?;
    let (rule, lottery): (&'static str, RationalLottery) = match lifting {
        LiftingName::Rp => ("rp", lotteries::random_priority(&problem.profile)?),
        LiftingName::Rcr => (
            "rcr",
            lotteries::crawler_from_random_endowments(&problem.profile)?,
        ),
        LiftingName::Rttc => (
            "rttc",
            lotteries::core_from_random_endowments(&problem.profile)?,
        ),
    };
    match format {
        Format::Json => {
            let document = DistributionDocument {
                rule,
                n: lottery.n(),
                denominator: lottery.denominator(),
                entries: lottery
                    .entries()
                    .map(|(allocation, numerator)| DistributionEntry {
                        allocation: object_refs(allocation, names.as_deref()),
                        numerator,
                    })
                    .collect(),
            };
            println!("{}", serde_json::to_string_pretty(&document)?);
        }
        Format::Csv => {
            let mut out = std::io::stdout().lock();
            lottery.write_csv(names.as_deref(), &mut out)?;
            out.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
