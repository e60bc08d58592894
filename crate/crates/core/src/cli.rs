//! Command-line front end. Each command prints one JSON document on standard
//! output; `--verbose` adds a human-readable rendering on standard error and
//! `--quiet` reduces standard output to a single verdict line.
//!
//! Exit codes: 0 success, 1 violations or no separation found, 2 usage or
//! input errors.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::collection::Collection;
use crate::error::{Error, Result};
use crate::instance::{instance_to_json, load_instance, Instance};
use crate::predicate::{parse_predicate, DeclaredNames};
use crate::principles::{evaluate, PrincipleId};
use crate::report;
use crate::search::{
    enumerate_instances, find_separation, initial_segments_instance, random_instances,
    save_separation, BMode, Budget, SearchOutcome,
};
use crate::theorems::{check_theorem, TheoremId, TheoremReport};

/// Environment variable capping the worker threads.
pub const WORKERS_ENV: &str = "STARSEL_MAX_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "starsel", version, about = "Finite model checker for selection principles")]
pub struct Cli {
    /// Print only the verdict line.
    #[arg(long, global = true, conflicts_with = "verbose")]
    pub quiet: bool,
    /// Also render a human-readable summary on standard error.
    #[arg(long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one principle on an instance file.
    Eval {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        principle: String,
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Check theorems on an exhaustive or random corpus.
    Check(CheckArgs),
    /// Search for an instance where `left` holds and `right` fails.
    FindSeparation(SeparationArgs),
    /// Validate an instance file and print its canonical form.
    Validate {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Print a built-in instance.
    PaperInstance {
        #[arg(long, value_enum)]
        name: PaperInstanceName,
        #[arg(long)]
        n: usize,
        /// `cover` or any predicate; the family `U` may be referenced.
        #[arg(long, default_value = "cover")]
        b: String,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PaperInstanceName {
    InitialSegments,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CorpusKind {
    Exhaustive,
    Random,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, required_unless_present = "all", conflicts_with = "all")]
    pub theorem: Option<String>,
    #[arg(long)]
    pub all: bool,
    #[arg(long, value_enum, default_value = "random")]
    pub corpus: CorpusKind,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest ground set in the corpus.
    #[arg(long)]
    pub max_n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SeparationArgs {
    #[arg(long)]
    pub left: String,
    #[arg(long)]
    pub right: String,
    #[arg(long, default_value_t = 3)]
    pub max_n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub max_a_size: usize,
    #[arg(long, default_value_t = 1)]
    pub max_horizon: usize,
    #[arg(long, default_value_t = 1)]
    pub max_b_size: usize,
    #[arg(long, default_value_t = 10_000)]
    pub max_instances: usize,
    /// Directory receiving the instance document and its verdict sidecar.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Rendered {
    code: i32,
    json: String,
    verdict: String,
    human: String,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli.command) {
        Ok(r) => {
            let stdout = if cli.quiet { format!("{}\n", r.verdict) } else { format!("{}\n", r.json) };
            let stderr = if cli.verbose { r.human } else { String::new() };
            Outcome { code: r.code, stdout, stderr }
        }
        Err(e) => Outcome { code: 2, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

/// Sizes the global worker pool from `STARSEL_MAX_WORKERS`, if set.
pub fn configure_workers() -> Result<()> {
    let Ok(value) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let workers: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&w| w > 0)
        .ok_or_else(|| Error::Format(format!("{WORKERS_ENV} must be a positive integer")))?;
    // a pool that already exists keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    Ok(())
}

fn read_instance(path: &PathBuf) -> Result<Instance> {
    load_instance(&std::fs::read(path)?)
}

fn execute(command: &Command) -> Result<Rendered> {
    match command {
        Command::Eval { instance, principle, horizon } => {
            let p: PrincipleId = principle.parse()?;
            let mut inst = read_instance(instance)?;
            if let Some(h) = horizon {
                inst = inst.with_horizon(*h);
                inst.validate()?;
            }
            let r = evaluate(p, &inst)?;
            let human = match (&r.witness, &r.counterexample) {
                (Some(w), _) => format!(
                    "{p} holds over {} sequences; first witness produces {}\n",
                    r.sequences_checked, w.produced
                ),
                (None, Some(c)) => format!("{p} fails; counterexample sequence {c:?}\n"),
                _ => format!("{p}: {}\n", r.verdict.as_str()),
            };
            Ok(Rendered {
                code: 0,
                json: report::eval_report(&r)?,
                verdict: r.verdict.as_str().to_string(),
                human,
            })
        }
        Command::Check(args) => check(args),
        Command::FindSeparation(args) => separation(args),
        Command::Validate { instance } => {
            let inst = read_instance(instance)?;
            Ok(Rendered {
                code: 0,
                json: instance_to_json(&inst)?,
                verdict: "valid".into(),
                human: format!(
                    "valid: n = {}, |A| = {}, H = {}, B = {}\n",
                    inst.ground.size(),
                    inst.collection_a.len(),
                    inst.horizon,
                    inst.collection_b
                ),
            })
        }
        Command::PaperInstance { name: PaperInstanceName::InitialSegments, n, b } => {
            let names = DeclaredNames::with_families(["U"]);
            let b = Collection::Intensional(parse_predicate(b, &names)?);
            let inst = initial_segments_instance(*n, b)?;
            inst.validate()?;
            Ok(Rendered {
                code: 0,
                json: instance_to_json(&inst)?,
                verdict: "ok".into(),
                human: format!("initial segments U = {}\n", inst.collection_a[0]),
            })
        }
    }
}

/// Corpus used by `check`.
pub fn check_corpus(kind: CorpusKind, trials: usize, seed: u64, max_n: Option<usize>) -> Result<Vec<Instance>> {
    match kind {
        CorpusKind::Exhaustive => {
            let b = Budget {
                max_n: max_n.unwrap_or(2),
                max_family_size: 16,
                max_a_size: 1,
                max_b_size: 2,
                max_horizon: 2,
                max_instances: usize::MAX,
                seed,
                b_mode: BMode::Extensional,
            };
            Ok(enumerate_instances(&b)?.collect())
        }
        CorpusKind::Random => {
            let b = Budget {
                max_n: max_n.unwrap_or(3),
                max_family_size: 4,
                max_a_size: 2,
                max_b_size: 3,
                max_horizon: 2,
                max_instances: trials.max(1),
                seed,
                b_mode: BMode::Mixed,
            };
            random_instances(&b, trials)
        }
    }
}

fn check(args: &CheckArgs) -> Result<Rendered> {
    let theorems: Vec<TheoremId> = match &args.theorem {
        Some(t) => vec![t.parse()?],
        None => TheoremId::ALL.to_vec(),
    };
    let corpus = check_corpus(args.corpus, args.trials, args.seed, args.max_n)?;
    let reports = theorems
        .iter()
        .map(|&t| check_theorem(t, corpus.iter().cloned()))
        .collect::<Result<Vec<TheoremReport>>>()?;
    let violations: usize = reports.iter().map(|r| r.violations.len()).sum();
    let json = if args.all { report::theorem_reports(&reports)? } else { report::theorem_report(&reports[0])? };
    let human = reports
        .iter()
        .map(|r| {
            format!(
                "{}: {} checked, {} violations, {} skipped over budget, {} witness round trips\n",
                r.theorem,
                r.instances_checked,
                r.violations.len(),
                r.skipped_budget,
                r.witness_roundtrips
            )
        })
        .collect();
    Ok(Rendered {
        code: if violations == 0 { 0 } else { 1 },
        json,
        verdict: if violations == 0 { "pass".into() } else { format!("fail ({violations} violations)") },
        human,
    })
}

fn separation(args: &SeparationArgs) -> Result<Rendered> {
    let left: PrincipleId = args.left.parse()?;
    let right: PrincipleId = args.right.parse()?;
    let b = Budget {
        max_n: args.max_n,
        max_family_size: 16,
        max_a_size: args.max_a_size,
        max_b_size: args.max_b_size,
        max_horizon: args.max_horizon,
        max_instances: args.max_instances,
        seed: args.seed,
        b_mode: BMode::Extensional,
    };
    match find_separation(left, right, &b)? {
        SearchOutcome::Found(r) => {
            if let Some(dir) = &args.out {
                std::fs::create_dir_all(dir)?;
                save_separation(&r, dir, &format!("{left}_{right}"))?;
            }
            Ok(Rendered {
                code: 0,
                json: report::separation_report(&r.instance, &r.left_result, &r.right_result)?,
                verdict: "found".into(),
                human: format!(
                    "{left} holds and {right} fails on n = {}, A = {:?}, B = {}, H = {}\n",
                    r.instance.ground.size(),
                    r.instance.collection_a,
                    r.instance.collection_b,
                    r.instance.horizon
                ),
            })
        }
        SearchOutcome::NotFoundWithinBudget { examined } => Ok(Rendered {
            code: 1,
            json: report::not_found_report(left, right, examined)?,
            verdict: "not found".into(),
            human: format!("no separation among {examined} instances\n"),
        }),
    }
}
