//! The `wknot` command-line front end.
//!
//! Exit codes: 0 success, 1 failed check, 2 input error. Running out of
//! search budget is reported inside the output and still exits 0.

use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use crate::coloring::{summary, ColoringSummary};
use crate::families::{generate, Family, FamilyId};
use crate::ffield::{default_battery, parse_battery, FieldSpec};
use crate::gauss::GaussCode;
use crate::invariants::{is_descending, triviality, warping_degree, warping_degree_both, Verdict, SIMPLIFY_EFFORT};
use crate::moves::{simplify, MoveTrace};
use crate::reproduce::{self, ReproduceConfig, SuiteResult, DEFAULT_SEED};
use crate::search::{twist_distance_ub, ut_bounds, uw_upper, SearchBudget};

#[derive(Debug, Parser)]
#[command(name = "wknot", version, about = "Welded knot invariants and twist-move bounds")]
pub struct Cli {
    #[command(flatten)]
    pub opts: Options,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Options {
    /// Field battery, e.g. `R3,R5,F4` or `R3,3:1,0,1`.
    #[arg(long, global = true, value_parser = parse_fields)]
    pub fields: Option<Battery>,
    #[arg(long, global = true)]
    pub max_nodes: Option<usize>,
    /// Maximum number of twist moves explored.
    #[arg(long, global = true)]
    pub max_depth: Option<usize>,
    /// Crossing headroom for insertion moves.
    #[arg(long, global = true)]
    pub max_crossings: Option<usize>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomized suites.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct Battery(pub Vec<FieldSpec>);

fn parse_fields(s: &str) -> Result<Battery, String> {
    let fields = parse_battery(s).map_err(|e| e.to_string())?;
    if fields.is_empty() {
        return Err("empty field battery".into());
    }
    Ok(Battery(fields))
}

/// Inputs are files holding text or JSON codes; `-` or no path reads stdin.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate and normalize a code.
    Parse { input: Option<PathBuf> },
    /// Warping degrees, coloring battery and triviality verdict.
    Invariants { input: Option<PathBuf> },
    /// Certificate for the unknotting twist number.
    UtBounds { input: Option<PathBuf> },
    /// Certificate for the welded unknotting number upper bound.
    Uw { input: Option<PathBuf> },
    /// Certificate for the twist distance between two codes.
    Distance { a: PathBuf, b: PathBuf },
    /// Print a family member, e.g. `gen B 3` or `gen WK 2`.
    Gen { family: String, n: u32 },
    /// Greedy simplification by crossing-removing welded moves.
    Simplify { input: Option<PathBuf> },
    /// Re-apply a MoveTrace JSON and check its end code.
    Replay { trace: Option<PathBuf> },
    /// Recompute every acceptance criterion and print a table.
    Reproduce,
    /// Run the randomized property suites.
    Proptest {
        /// Trials per suite; defaults to 200 flips, 500 moves, 100 oracle codes.
        #[arg(long)]
        trials: Option<usize>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Failure(String),
    /// A report whose checks did not all pass; printed on standard output.
    #[error("{0}")]
    Checks(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Failure(_) | CliError::Checks(_) => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Input(_) => "input",
            CliError::Failure(_) | CliError::Checks(_) => "failure",
        }
    }
}

fn input_err(e: impl ToString) -> CliError {
    CliError::Input(e.to_string())
}

fn read_input(path: Option<&Path>) -> Result<String, CliError> {
    match path {
        None => read_stdin(),
        Some(p) if p == Path::new("-") => read_stdin(),
        Some(p) => fs::read_to_string(p).map_err(|e| input_err(format!("{}: {e}", p.display()))),
    }
}

fn read_stdin() -> Result<String, CliError> {
    let mut s = String::new();
    io::stdin().read_to_string(&mut s).map_err(input_err)?;
    Ok(s)
}

fn read_code(path: Option<&Path>) -> Result<GaussCode, CliError> {
    GaussCode::parse_any(&read_input(path)?).map_err(input_err)
}

impl Options {
    fn fields(&self) -> Vec<FieldSpec> {
        self.fields.as_ref().map_or_else(default_battery, |b| b.0.clone())
    }

    fn budget(&self) -> SearchBudget {
        let d = SearchBudget::default();
        SearchBudget {
            max_nodes: self.max_nodes.unwrap_or(d.max_nodes),
            max_depth: self.max_depth.unwrap_or(d.max_depth),
            max_crossings: self.max_crossings.unwrap_or(d.max_crossings),
        }
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output types serialize")
}

#[derive(Serialize)]
struct InvariantsReport {
    code: GaussCode,
    crossings: usize,
    warping_degree: usize,
    warping_degree_both: usize,
    is_descending: bool,
    colorings: Vec<ColoringSummary>,
    verdict: Verdict,
}

#[derive(Serialize)]
struct ReplayReport {
    ok: bool,
    steps: usize,
    flips: usize,
    end: GaussCode,
}

#[derive(Serialize)]
struct ProptestReport {
    seed: u64,
    flip_suite: SuiteResult,
    move_invariance: SuiteResult,
    oracle: SuiteResult,
}

/// Executes a parsed command and returns its standard output.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    let opts = &cli.opts;
    match &cli.command {
        Command::Parse { input } => {
            let code = read_code(input.as_deref())?;
            Ok(if opts.json { to_json(&code) } else { code.to_string() })
        }
        Command::Invariants { input } => invariants(opts, &read_code(input.as_deref())?),
        Command::UtBounds { input } => {
            Ok(to_json(&ut_bounds(&read_code(input.as_deref())?, &opts.fields(), &opts.budget())))
        }
        Command::Uw { input } => Ok(to_json(&uw_upper(&read_code(input.as_deref())?, &opts.fields(), &opts.budget()))),
        Command::Distance { a, b } => {
            let (a, b) = (read_code(Some(a))?, read_code(Some(b))?);
            Ok(to_json(&twist_distance_ub(&a, &b, &opts.fields(), &opts.budget())))
        }
        Command::Gen { family, n } => {
            let family: Family = family.parse().map_err(input_err)?;
            let code = generate(FamilyId::new(family, *n)).map_err(input_err)?;
            Ok(if opts.json { to_json(&code) } else { code.to_string() })
        }
        Command::Simplify { input } => {
            let (out, trace) = simplify(&read_code(input.as_deref())?, SIMPLIFY_EFFORT);
            Ok(if opts.json { to_json(&trace) } else { out.to_string() })
        }
        Command::Replay { trace } => replay(opts, &read_input(trace.as_deref())?),
        Command::Reproduce => {
            let config = ReproduceConfig {
                fields: opts.fields(),
                max_nodes: opts.max_nodes,
                max_depth: opts.max_depth,
                max_crossings: opts.max_crossings,
                seed: opts.seed(),
            };
            let report = reproduce::run(&config);
            let text = if opts.json { to_json(&report) } else { report.to_string().trim_end().to_string() };
            if report.ok() {
                Ok(text)
            } else {
                Err(CliError::Checks(text))
            }
        }
        Command::Proptest { trials } => {
            let seed = opts.seed();
            let report = ProptestReport {
                seed,
                flip_suite: reproduce::flip_suite(seed, trials.unwrap_or(200)),
                move_invariance: reproduce::move_invariance(seed, trials.unwrap_or(500)),
                oracle: reproduce::oracle_equivalence(seed, trials.unwrap_or(100)),
            };
            let text = if opts.json {
                to_json(&report)
            } else {
                format!(
                    "seed {seed}\nflip suite: {}\nmove invariance: {}\noracle: {}",
                    report.flip_suite, report.move_invariance, report.oracle
                )
            };
            let violations =
                report.flip_suite.violations + report.move_invariance.violations + report.oracle.violations;
            if violations == 0 {
                Ok(text)
            } else {
                Err(CliError::Checks(text))
            }
        }
    }
}

fn invariants(opts: &Options, code: &GaussCode) -> Result<String, CliError> {
    let fields = opts.fields();
    let verdict = triviality(code, &fields, &opts.budget()).map_err(|e| CliError::Failure(e.to_string()))?;
    let report = InvariantsReport {
        code: code.clone(),
        crossings: code.n(),
        warping_degree: warping_degree(code),
        warping_degree_both: warping_degree_both(code),
        is_descending: is_descending(code),
        colorings: fields.iter().map(|f| summary(code, f)).collect(),
        verdict,
    };
    if opts.json {
        return Ok(to_json(&report));
    }
    let mut lines = vec![
        format!("code: {}", report.code),
        format!("crossings: {}", report.crossings),
        format!("warping degree: {}", report.warping_degree),
        format!("warping degree (both orientations): {}", report.warping_degree_both),
        format!("descending: {}", report.is_descending),
    ];
    for s in &report.colorings {
        lines.push(format!("colorings over {}: dim {}, count {}", s.field, s.dim, s.count));
    }
    lines.push(format!("verdict: {:?}", report.verdict.value));
    Ok(lines.join("\n"))
}

fn replay(opts: &Options, input: &str) -> Result<String, CliError> {
    let trace: MoveTrace = serde_json::from_str(input).map_err(input_err)?;
    trace.verify().map_err(|e| CliError::Failure(e.to_string()))?;
    let report = ReplayReport { ok: true, steps: trace.steps.len(), flips: trace.flips(), end: trace.end.clone() };
    Ok(if opts.json {
        to_json(&report)
    } else {
        format!("ok: {} steps, {} flips, ends at {}", report.steps, report.flips, report.end)
    })
}

/// Entry point shared by the binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(out) => {
            if !out.is_empty() {
                println!("{out}");
            }
            ExitCode::SUCCESS
        }
        Err(CliError::Checks(report)) => {
            println!("{report}");
            ExitCode::from(1)
        }
        Err(e) => {
            if cli.opts.json {
                let msg = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
                eprintln!("{msg}");
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
