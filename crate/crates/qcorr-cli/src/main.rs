//! Command line front end: pairwise and tripartite reports, the
//! reference-point replication pipeline, and parameter searches. Exit
//! codes: 0 success, 1 structural failure, 2 usage, 3 I/O.

mod errors;
mod output;
mod parse;
mod reproduce;

use clap::{Args, Parser, Subcommand};
use errors::CliError;
use qcorr::discovery::{search, Objective, SearchMode, SearchSpec};
use qcorr::pairwise::{pairwise_report, OptimizerSettings, Side};
use qcorr::tripartite::{tripartite_report, SidePolicy, SplitConvention};
use qcorr::QState;
use serde::Serialize;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "qcorr",
    version,
    about = "Correlation measures for few-qubit density matrices, in bits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mutual information, classical correlation, discord, and
    /// entanglement of a qubit pair
    Pairwise(PairwiseArgs),
    /// Totals, pairwise maxima, both genuine-correlation decompositions,
    /// and their gap for a three-qubit state
    Tripartite(TripartiteArgs),
    /// Run the whole verification pipeline at the reference point
    Reproduce(ReproduceArgs),
    /// Scan the two-branch family or random states for the largest gap
    Search(SearchArgs),
}

#[derive(Args)]
struct PairwiseArgs {
    /// Density matrix: a JSON file path, or name[:params] such as
    /// "bell", "werner:0.3", "counterexample:0.1,3pi/10,0.7,pi/5"
    #[arg(long)]
    state: String,
    /// For a three-qubit state, the pair to keep, e.g. "ac" or "a,c"
    #[arg(long)]
    pair: Option<String>,
    /// Label of the qubit to measure, or "both"
    #[arg(long, default_value = "both")]
    measured: String,
    /// Write a JSON envelope here ("-" for stdout)
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct TripartiteArgs {
    /// Density matrix: a JSON file path, or name[:params]
    #[arg(long)]
    state: String,
    /// measure-first, measure-second, min, max, family, or an explicit
    /// map like "ab=b,ac=min,bc=b"
    #[arg(long, default_value = "measure-first")]
    policy: String,
    /// Split convention for the subtractive decomposition
    /// (conv-singleton); without it only the sum is reported
    #[arg(long)]
    convention: Option<String>,
    /// Write a JSON envelope here ("-" for stdout)
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Seed for the pure-state suites
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also reduce the purification with the second branch's weights
    /// swapped and report how far that lands from the family state
    #[arg(long)]
    literal_purification: bool,
    /// Write a JSON envelope here ("-" for stdout)
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    /// family-grid, family-random, or mixed-random
    #[arg(long)]
    mode: String,
    /// Grid points per axis (family-grid only; default 9)
    #[arg(long)]
    steps: Option<usize>,
    /// Number of seeded draws (family-random and mixed-random; default 200)
    #[arg(long)]
    samples: Option<usize>,
    /// Spectral rank of mixed-random draws (default 1, meaning pure)
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Side policy; family modes default to "family", mixed-random to
    /// "measure-first"
    #[arg(long)]
    policy: Option<String>,
    /// max-gap or first-valid
    #[arg(long, default_value = "max-gap")]
    objective: String,
    /// Worker threads, 0 to pick automatically; the result is the same
    /// for every value
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Write a JSON envelope here ("-" for stdout)
    #[arg(long)]
    json: Option<PathBuf>,
}

/// Wrapper around every JSON payload so downstream tooling can tell what
/// produced it. Wall time and thread count are execution metadata; the
/// payload itself is deterministic.
#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: Vec<String>,
    base: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    payload: &'a T,
    meta: Meta,
}

#[derive(Serialize)]
struct Meta {
    wall_ms: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    threads: Option<usize>,
}

fn emit<T: Serialize>(
    path: &Option<PathBuf>,
    seed: Option<u64>,
    threads: Option<usize>,
    payload: &T,
    started: Instant,
) -> Result<(), CliError> {
    let Some(path) = path else { return Ok(()) };
    let envelope = Envelope {
        tool: "qcorr",
        version: env!("CARGO_PKG_VERSION"),
        command: std::env::args().collect(),
        base: "bits",
        seed,
        payload,
        meta: Meta {
            wall_ms: started.elapsed().as_millis(),
            threads,
        },
    };
    let mut text = serde_json::to_string_pretty(&envelope)
        .map_err(|e| CliError::Io(format!("cannot serialize the JSON envelope: {e}")))?;
    text.push('\n');
    if path.as_os_str() == "-" {
        print!("{text}");
    } else {
        std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn load(spec: &str) -> Result<QState, CliError> {
    parse::load_state_spec(spec).map_err(|e| errors::from_state(e, &format!("state '{spec}'")))
}

fn run_pairwise(args: &PairwiseArgs, started: Instant) -> Result<(), CliError> {
    let state = load(&args.state)?;
    let state = match (state.labels().len(), &args.pair) {
        (2, None) => state,
        (2, Some(_)) => {
            return Err(CliError::Usage(
                "--pair applies to three-qubit states; this state already is a pair".into(),
            ))
        }
        (3, Some(p)) => {
            let (a, b) = parse::parse_pair(p, state.labels()).map_err(CliError::Usage)?;
            qcorr::partial_trace(&state, &[&a, &b]).map_err(errors::from_qmat)?
        }
        (3, None) => {
            return Err(CliError::Usage(
                "a three-qubit state needs --pair to say which two qubits to keep".into(),
            ))
        }
        (n, _) => {
            return Err(CliError::Usage(format!(
                "pairwise needs two qubits, or three qubits with --pair; got {n} subsystems"
            )))
        }
    };
    let only = match args.measured.as_str() {
        "both" => None,
        m => {
            let pos = state.label_position(m).map_err(errors::from_qmat)?;
            Some(if pos == 0 { Side::First } else { Side::Second })
        }
    };
    let report =
        pairwise_report(&state, &OptimizerSettings::standard()).map_err(errors::from_pairwise)?;
    output::print_pairwise(&report, only);
    emit(&args.json, None, None, &report, started)
}

fn run_tripartite(args: &TripartiteArgs, started: Instant) -> Result<(), CliError> {
    let state = load(&args.state)?;
    let spec = parse::parse_policy(&args.policy).map_err(CliError::Usage)?;
    let policy = parse::resolve_policy(&spec, state.labels()).map_err(CliError::Usage)?;
    let convention = match args.convention.as_deref() {
        None => None,
        Some("conv-singleton") => Some(SplitConvention::ConvSingleton),
        Some(other) => {
            return Err(CliError::Usage(format!(
                "unknown split convention '{other}' (known: conv-singleton)"
            )))
        }
    };
    let report = tripartite_report(&state, &policy, convention, &OptimizerSettings::standard())
        .map_err(errors::from_tripartite)?;
    output::print_tripartite(&report);
    emit(&args.json, None, None, &report, started)
}

fn run_reproduce(args: &ReproduceArgs, started: Instant) -> Result<(), CliError> {
    let payload = reproduce::run(args.seed, args.literal_purification)?;
    reproduce::print(&payload);
    emit(&args.json, Some(args.seed), None, &payload, started)?;
    if payload.structural_failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Structural(payload.structural_failures.join("; ")))
    }
}

fn run_search(args: &SearchArgs, started: Instant) -> Result<(), CliError> {
    let reject =
        |flag: &str| CliError::Usage(format!("--{flag} does not apply to mode {}", args.mode));
    let mode = match args.mode.as_str() {
        "family-grid" => {
            if args.samples.is_some() {
                return Err(reject("samples"));
            }
            if args.rank.is_some() {
                return Err(reject("rank"));
            }
            SearchMode::FamilyGrid {
                steps: args.steps.unwrap_or(9),
            }
        }
        "family-random" => {
            if args.steps.is_some() {
                return Err(reject("steps"));
            }
            if args.rank.is_some() {
                return Err(reject("rank"));
            }
            SearchMode::FamilyRandom {
                samples: args.samples.unwrap_or(200),
            }
        }
        "mixed-random" => {
            if args.steps.is_some() {
                return Err(reject("steps"));
            }
            SearchMode::MixedRandom {
                samples: args.samples.unwrap_or(200),
                rank: args.rank.unwrap_or(1),
            }
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown mode '{other}' (known: family-grid, family-random, mixed-random)"
            )))
        }
    };
    let spec = match &args.policy {
        Some(s) => parse::parse_policy(s).map_err(CliError::Usage)?,
        None => parse::PolicySpec::Named(match mode {
            SearchMode::MixedRandom { .. } => SidePolicy::MeasureFirst,
            _ => SidePolicy::family_default(),
        }),
    };
    let family_labels: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
    let policy = parse::resolve_policy(&spec, &family_labels).map_err(CliError::Usage)?;
    if matches!(mode, SearchMode::MixedRandom { .. }) && matches!(policy, SidePolicy::Explicit(_)) {
        return Err(CliError::Usage(
            "mixed-random draws get fresh labels from the canonical frame, so a per-pair label \
             map has nothing to attach to; use measure-first, measure-second, min, or max"
                .into(),
        ));
    }
    let objective = match args.objective.as_str() {
        "max-gap" => Objective::MaxGap,
        "first-valid" | "first-valid-chain" => Objective::FirstValidChain,
        other => {
            return Err(CliError::Usage(format!(
                "unknown objective '{other}' (known: max-gap, first-valid)"
            )))
        }
    };
    let spec = SearchSpec {
        mode,
        seed: args.seed,
        policy,
        objective,
        threads: args.threads,
    };
    let result = search(&spec).map_err(errors::from_discovery)?;
    output::print_search(&result);
    emit(
        &args.json,
        Some(args.seed),
        Some(args.threads),
        &result,
        started,
    )
}

fn main() {
    let cli = Cli::parse();
    let started = Instant::now();
    let result = match &cli.command {
        Command::Pairwise(a) => run_pairwise(a, started),
        Command::Tripartite(a) => run_tripartite(a, started),
        Command::Reproduce(a) => run_reproduce(a, started),
        Command::Search(a) => run_search(a, started),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.code());
    }
}
