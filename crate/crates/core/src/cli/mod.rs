//! Command-line driver.
//!
//! Exit codes: 0 on success, 1 when an engine refuses or a budget flag is
//! raised, 2 on usage and parse errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::approx::{iterated_matrix, universal_run};
use crate::fm::{fm_construct, FmInput};
use crate::machine::family::FamilyKind;
use crate::machine::{parse_program, Program};
use crate::oracle::{jump_lightface, Enumeration, OracleSpec, ProgramSource, SetOracle};
use crate::ordinal::{encode_order, Ordinal};
use crate::real::Real;
use crate::runner::{run_transfinite, BudgetPolicy, Outcome, RunResult};

#[derive(Debug, Parser)]
#[command(name = "ittm", version, about = "Budgeted infinite time Turing machines")]
pub struct Cli {
    /// Worker threads for per-program runs; 1 runs serially.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct BudgetArgs {
    /// Stages stay below w^depth.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub depth: Option<u32>,
    /// Steps per w-block and blocks per level.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: Option<u64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub appearance_cap: Option<u64>,
}

impl BudgetArgs {
    pub fn policy(&self) -> Result<BudgetPolicy, CliError> {
        let mut b = BudgetPolicy::from_env();
        if let Some(d) = self.depth {
            b.depth = d;
        }
        if let Some(n) = self.budget {
            b.per_level_budget = n;
        }
        if let Some(c) = self.appearance_cap {
            b.appearance_cap = c as usize;
        }
        b.check().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(b)
    }
}

#[derive(Debug, Clone, Args)]
pub struct EnumArgs {
    /// Work states per program.
    #[arg(long, default_value_t = 1)]
    pub states: usize,
    /// Only the first K programs of the enumeration.
    #[arg(long)]
    pub take: Option<usize>,
}

impl EnumArgs {
    fn source(&self, kind: FamilyKind) -> Result<ProgramSource, CliError> {
        let e = Enumeration::new(kind, self.states).map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(ProgramSource::Enumerated(match self.take {
            Some(k) => e.take(k),
            None => e,
        }))
    }
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    /// Set oracle file: one real per line, `#` comments.
    #[arg(long)]
    pub oracle: Option<PathBuf>,
    /// Real oracle on the oracle track.
    #[arg(long, conflicts_with = "oracle")]
    pub oracle_real: Option<String>,
    /// Queries longer than this many bits are truncated.
    #[arg(long, default_value_t = 64)]
    pub trim_bits: usize,
}

impl OracleArgs {
    fn spec(&self) -> Result<Option<OracleSpec>, CliError> {
        if let Some(path) = &self.oracle {
            return Ok(Some(OracleSpec::Set(read_set(path, self.trim_bits)?)));
        }
        self.oracle_real
            .as_deref()
            .map(|s| parse_real(s).map(OracleSpec::Real))
            .transpose()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one program and print its outcome.
    Run {
        program: PathBuf,
        #[arg(long, default_value = "(0)*")]
        input: String,
        #[command(flatten)]
        oracle: OracleArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Emit the block trace of one run as JSON lines.
    Trace {
        program: PathBuf,
        #[arg(long, default_value = "(0)*")]
        input: String,
        #[command(flatten)]
        oracle: OracleArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        full_snapshots: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Clockable times of every enumerated program, plus the appearance log.
    Survey {
        #[command(flatten)]
        programs: EnumArgs,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(3..=4))]
        tracks: u8,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        appearances: Option<PathBuf>,
    },
    /// The lightface jump over an enumeration.
    Jump {
        #[command(flatten)]
        programs: EnumArgs,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(3..=4))]
        tracks: u8,
        #[command(flatten)]
        oracle: OracleArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Iterated jumps along a coded ordinal, with the erasure log.
    Matrix {
        #[arg(long)]
        order: String,
        #[command(flatten)]
        programs: EnumArgs,
        /// Materialized bits of the order code.
        #[arg(long, default_value_t = 64)]
        prefix: usize,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        log: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The priority construction of two sets over the query family.
    Fm {
        #[command(flatten)]
        programs: EnumArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        events: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Usage(String),
    Refused(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Refused(_) => 1,
        }
    }
}

fn parse_real(s: &str) -> Result<Real, CliError> {
    s.trim().parse().map_err(|e| CliError::Usage(format!("bad real `{s}`: {e}")))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn read_program(path: &Path) -> Result<Program, CliError> {
    parse_program(&read_text(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn read_set(path: &Path, trim_bits: usize) -> Result<SetOracle, CliError> {
    let members = read_text(path)?
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(parse_real)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SetOracle::new(members, trim_bits))
}

fn check_out(path: &Option<PathBuf>) -> Result<(), CliError> {
    if let Some(p) = path {
        let dir = p.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
        if !dir.is_dir() {
            return Err(CliError::Usage(format!("{}: no such directory", dir.display())));
        }
    }
    Ok(())
}

fn json_line<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable") + "\n"
}

fn json_doc<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

/// Writes to `path`, or to `out` when there is none.
fn emit(path: &Option<PathBuf>, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Usage(format!("{}: {e}", p.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Usage(format!("stdout: {e}"))),
    }
}

fn one_run(
    program: &Path,
    input: &str,
    oracle: &OracleArgs,
    budget: &BudgetArgs,
) -> Result<RunResult, CliError> {
    let p = read_program(program)?;
    let input = parse_real(input)?;
    let oracle = oracle.spec()?;
    let b = budget.policy()?;
    run_transfinite(&p, &input, &b, oracle.as_ref()).map_err(|e| CliError::Refused(e.to_string()))
}

/// Empty set for query programs, nothing otherwise.
fn default_oracle(p: &Program) -> Option<OracleSpec> {
    p.query_states().is_some().then(|| OracleSpec::empty_set(64))
}

fn execute(cmd: &Command, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Run {
            program,
            input,
            oracle,
            budget,
            format,
        } => {
            let r = one_run(program, input, oracle, budget)?;
            let text = match format {
                Format::Text => format!("{}\n", r.outcome),
                Format::Json => json_line(&json!({
                    "schema": 1,
                    "outcome": r.outcome.to_string(),
                    "queries": r.queries(),
                })),
            };
            emit(&None, &text, out)?;
            if let Outcome::Exceeded { reason } = &r.outcome {
                return Err(CliError::Refused(format!("budget exceeded: {reason}")));
            }
            Ok(())
        }
        Command::Trace {
            program,
            input,
            oracle,
            budget,
            full_snapshots,
            out: path,
        } => {
            check_out(path)?;
            let r = one_run(program, input, oracle, budget)?;
            emit(path, &r.trace_jsonl(*full_snapshots), out)
        }
        Command::Survey {
            programs,
            tracks,
            budget,
            out: path,
            appearances,
        } => {
            check_out(path)?;
            check_out(appearances)?;
            let b = budget.policy()?;
            let kind = if *tracks == 3 { FamilyKind::Plain } else { FamilyKind::Query };
            let src = programs.source(kind)?;
            let lines: Vec<String> = (0..src.len())
                .into_par_iter()
                .map(|i| {
                    let p = src.get(i);
                    let outcome = run_transfinite(&p, &Real::zero(), &b, default_oracle(&p).as_ref())
                        .map(|r| r.outcome.to_string())
                        .unwrap_or_else(|e| format!("ERROR {e}"));
                    json_line(&json!({ "schema": 1, "program": i, "outcome": outcome }))
                })
                .collect();
            emit(path, &lines.concat(), out)?;
            if appearances.is_some() {
                let log = universal_run(&src, &b);
                let mut text = json_line(&json!({
                    "schema": 1,
                    "distinct": log.first_appearance.len(),
                    "incomplete_from": log.incomplete_from,
                    "truncated": log.truncated,
                }));
                for r in &log.records {
                    text.push_str(&json_line(r));
                }
                emit(appearances, &text, out)?;
            }
            Ok(())
        }
        Command::Jump {
            programs,
            tracks,
            oracle,
            budget,
            out: path,
        } => {
            check_out(path)?;
            let b = budget.policy()?;
            let kind = match (tracks, &oracle.oracle_real) {
                (3, _) => FamilyKind::Plain,
                (_, Some(_)) => FamilyKind::RealOracle,
                _ => FamilyKind::Query,
            };
            let src = programs.source(kind)?;
            let spec = match oracle.spec()? {
                None if kind == FamilyKind::Query => Some(OracleSpec::empty_set(oracle.trim_bits)),
                s => s,
            };
            let j = jump_lightface(&src, spec.as_ref(), &b);
            emit(path, &json_doc(&j), out)?;
            if !j.failed.is_empty() {
                return Err(CliError::Refused(format!(
                    "{} programs could not run: {}",
                    j.failed.len(),
                    j.failed[0].1
                )));
            }
            Ok(())
        }
        Command::Matrix {
            order,
            programs,
            prefix,
            budget,
            log,
            out: path,
        } => {
            check_out(path)?;
            check_out(log)?;
            let b = budget.policy()?;
            let alpha: Ordinal = order
                .parse()
                .map_err(|e| CliError::Usage(format!("bad ordinal `{order}`: {e}")))?;
            let src = programs.source(FamilyKind::RealOracle)?;
            let m = iterated_matrix(&encode_order(&alpha, *prefix), &src, &b)
                .map_err(|e| CliError::Refused(e.to_string()))?;
            let check = m.check(&src);
            if log.is_some() {
                emit(log, &m.log.iter().map(json_line).collect::<String>(), out)?;
            }
            let rows: Vec<_> = m
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "rank": r.rank,
                        "kind": r.kind,
                        "value": r.value,
                        "stabilized_at": r.stabilized_at,
                        "restarts": r.restarts,
                    })
                })
                .collect();
            let doc = json!({
                "schema": 1,
                "order": m.code.ordinal,
                "prefix_bits": m.horizon,
                "programs": m.bound,
                "budget": m.budget,
                "partial": m.partial,
                "rows": rows,
                "erasures": m.log.len(),
                "check": check,
            });
            emit(path, &json_doc(&doc), out)?;
            if m.partial {
                return Err(CliError::Refused("restart cap reached; matrix is partial".into()));
            }
            if !check.ok() {
                return Err(CliError::Refused(format!("matrix check failed: {check:?}")));
            }
            Ok(())
        }
        Command::Fm {
            programs,
            budget,
            events,
            report,
        } => {
            check_out(events)?;
            check_out(report)?;
            let b = budget.policy()?;
            let src = programs.source(FamilyKind::Query)?;
            let res = fm_construct(FmInput::interleaved(src), &b);
            if events.is_some() {
                emit(events, &res.state.events.iter().map(json_line).collect::<String>(), out)?;
            }
            match (&res.report, &res.state.partial) {
                (Some(rep), _) => emit(report, &json_doc(rep), out),
                (None, Some(why)) => Err(CliError::Refused(format!("partial construction, report withheld: {why}"))),
                (None, None) => unreachable!("a report is withheld only for partial states"),
            }
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut buf: Vec<u8> = Vec::new();
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(|| execute(&cli.command, &mut buf)),
            Err(e) => Err(CliError::Usage(e.to_string())),
        },
        None => execute(&cli.command, &mut buf),
    };
    let _ = out.write_all(&buf);
    match result {
        Ok(()) => 0,
        Err(e) => {
            let (CliError::Usage(m) | CliError::Refused(m)) = &e;
            let _ = writeln!(err, "ittm: {m}");
            e.code()
        }
    }
}
