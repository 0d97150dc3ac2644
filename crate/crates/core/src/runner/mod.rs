//! Exact transfinite execution.
//!
//! Successor steps are simulated directly. A limit is only ever taken under a
//! certificate: inside an ω-block the run must provably repeat (exactly, or
//! shifted right over a periodic background); at level k ≥ 2 the sequence of
//! level-(k-1) block starts must recur. Anything else is reported as
//! [`Outcome::Exceeded`].

mod appear;
mod engine;
mod exec;
mod omega;
pub mod profile;
mod tape;
pub mod trace;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::machine::{validate, Program, StateId, Violation, ORACLE, OUTPUT};
use crate::oracle::OracleSpec;
use crate::ordinal::{Ordinal, OrdinalError};
use crate::real::{fnv1a, Real};

pub(crate) use engine::{End, Engine, LevelOutcome, Node};
pub(crate) use exec::Exec;
pub use appear::RunAppearances;

/// A machine configuration without its stage label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Config {
    pub state: StateId,
    pub head: usize,
    pub tracks: Vec<Real>,
}

impl Config {
    pub fn initial(p: &Program, input: &Real, oracle: Option<&OracleSpec>) -> Config {
        let mut tracks = vec![Real::zero(); p.tracks()];
        tracks[0] = input.clone();
        if let (Some(r), true) = (oracle.and_then(OracleSpec::as_real), p.tracks() > ORACLE) {
            tracks[ORACLE] = r.clone();
        }
        Config {
            state: p.start(),
            head: 0,
            tracks,
        }
    }

    pub fn digest(&self) -> u64 {
        let mut s = format!("{}|{}", self.state, self.head);
        for t in &self.tracks {
            s.push('|');
            s.push_str(&t.to_string());
        }
        fnv1a(s.as_bytes())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub state: StateId,
    pub head: usize,
    pub tracks: Vec<Real>,
    pub stage: Ordinal,
}

impl Snapshot {
    pub fn initial(p: &Program, input: &Real, oracle: Option<&OracleSpec>) -> Snapshot {
        Snapshot::at(Config::initial(p, input, oracle), Ordinal::zero())
    }

    pub fn at(c: Config, stage: Ordinal) -> Snapshot {
        Snapshot {
            state: c.state,
            head: c.head,
            tracks: c.tracks,
            stage,
        }
    }

    pub fn config(&self) -> Config {
        Config {
            state: self.state,
            head: self.head,
            tracks: self.tracks.clone(),
        }
    }

    pub fn digest(&self) -> u64 {
        self.config().digest()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    /// The configuration after `mu + pi` steps equals the one after `mu`.
    Repeat { mu: u64, pi: u64 },
    /// The configuration after `mu + pi` steps is the one after `mu` shifted
    /// right by `shift` cells from cell `floor` on, and the head never went
    /// below `floor` in between.
    Translation { mu: u64, pi: u64, shift: u64, floor: u64 },
    HaltAt(u64),
    Exceeded,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::Repeat { mu, pi } => write!(f, "repeat(mu={mu}, pi={pi})"),
            Certificate::Translation { mu, pi, shift, floor } => {
                write!(f, "translation(mu={mu}, pi={pi}, shift={shift}, floor={floor})")
            }
            Certificate::HaltAt(n) => write!(f, "halt-at({n})"),
            Certificate::Exceeded => write!(f, "exceeded"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExceedReason {
    /// An ω-block ran out of steps without a certificate.
    StepBudget,
    /// A level block ran out of children without a recurrence.
    BlockBudget,
    /// The run reaches ω^D.
    OrdinalCap,
}

impl fmt::Display for ExceedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExceedReason::StepBudget => "step-budget",
            ExceedReason::BlockBudget => "block-budget",
            ExceedReason::OrdinalCap => "ordinal-cap",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BudgetPolicy {
    /// Stages stay below ω^depth.
    pub depth: u32,
    /// Steps per ω-block and blocks per level.
    pub per_level_budget: u64,
    /// Cap on distinct reals tracked by appearance logs.
    pub appearance_cap: usize,
}

impl Default for BudgetPolicy {
    fn default() -> Self {
        BudgetPolicy {
            depth: 3,
            per_level_budget: 4096,
            appearance_cap: 4096,
        }
    }
}

impl BudgetPolicy {
    pub fn new(depth: u32, per_level_budget: u64) -> Result<Self, RunError> {
        let b = BudgetPolicy {
            depth,
            per_level_budget,
            ..BudgetPolicy::default()
        };
        b.check()?;
        Ok(b)
    }

    /// Default budget, with `ITTM_DEFAULT_BUDGET` overriding B when set.
    pub fn from_env() -> Self {
        let mut b = BudgetPolicy::default();
        if let Some(v) = std::env::var("ITTM_DEFAULT_BUDGET")
            .ok()
            .and_then(|s| s.trim().parse::<u64>().ok())
            .filter(|&v| v >= 2)
        {
            b.per_level_budget = v;
        }
        b
    }

    pub fn check(&self) -> Result<(), RunError> {
        if self.depth < 1 {
            return Err(RunError::BadBudget("depth must be at least 1".into()));
        }
        if self.per_level_budget < 2 {
            return Err(RunError::BadBudget("budget must be at least 2".into()));
        }
        Ok(())
    }

    pub fn scaled(&self, factor: u64) -> Self {
        BudgetPolicy {
            per_level_budget: self.per_level_budget * factor,
            ..*self
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("cannot step from the halt state")]
    StepFromHalt,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Ordinal(#[from] OrdinalError),
    #[error("oracle does not match the program's query protocol")]
    ProtocolMismatch,
    #[error("invalid program: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidProgram(Vec<Violation>),
    #[error("budget: {0}")]
    BadBudget(String),
    #[error("exceeded: {0}")]
    Exceeded(ExceedReason),
}

/// Summary of one ω-block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSummary {
    pub start: Snapshot,
    pub certificate: Certificate,
    pub ever_one: Vec<Real>,
    pub limit: Option<Snapshot>,
    /// The halting snapshot when the certificate is `HaltAt`.
    pub halted: Option<Snapshot>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopCert {
    /// Level of the blocks whose starts recur.
    pub level: u32,
    pub first: Ordinal,
    pub recur: Ordinal,
    pub digest: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Halted { time: Ordinal, output: Real },
    Loops(LoopCert),
    Exceeded { reason: ExceedReason },
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Halted { time, output } => write!(f, "HALTED time={time} output={output}"),
            Outcome::Loops(c) => write!(
                f,
                "LOOPS level={} first={} recur={} digest={:016x}",
                c.level, c.first, c.recur, c.digest
            ),
            Outcome::Exceeded { reason } => write!(f, "EXCEEDED reason={reason}"),
        }
    }
}

/// Outcome of a run, plus the block tree it was derived from.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub outcome: Outcome,
    pub budget: BudgetPolicy,
    pub(crate) program: Program,
    pub(crate) oracle: Option<OracleSpec>,
    pub(crate) root: Arc<Node>,
}

impl RunResult {
    pub fn halted(&self) -> Option<(&Ordinal, &Real)> {
        match &self.outcome {
            Outcome::Halted { time, output } => Some((time, output)),
            _ => None,
        }
    }

    pub fn loops(&self) -> bool {
        matches!(self.outcome, Outcome::Loops(_))
    }

    pub fn exceeded(&self) -> bool {
        matches!(self.outcome, Outcome::Exceeded { .. })
    }

    pub fn program(&self) -> &Program {
        &self.program
    }
}

// A query program may run without an oracle as long as it never asks; the
// step that enters the query state then fails with `ProtocolMismatch`.
fn check_oracle(p: &Program, oracle: Option<&OracleSpec>) -> Result<(), RunError> {
    match (p.query_states().is_some(), oracle) {
        (true, Some(OracleSpec::Real(_))) | (false, Some(OracleSpec::Set(_))) => {
            Err(RunError::ProtocolMismatch)
        }
        _ => Ok(()),
    }
}

/// One successor step.
pub fn step(s: &Snapshot, p: &Program, oracle: Option<&OracleSpec>) -> Result<Snapshot, RunError> {
    let c = s.config();
    let mut exec = Exec::new(p, oracle, &c);
    exec.step()?;
    Ok(Snapshot::at(exec.config(), s.stage.successor()))
}

/// Runs the ω-block starting at `start`.
pub fn run_block(
    start: &Snapshot,
    p: &Program,
    budget: &BudgetPolicy,
    oracle: Option<&OracleSpec>,
) -> Result<BlockSummary, RunError> {
    budget.check()?;
    check_oracle(p, oracle)?;
    let valid_start = start.stage.is_zero()
        || (start.stage.is_limit() && start.state == p.limit() && start.head == 0);
    if !valid_start {
        return Err(RunError::Precondition(
            "block must start at stage 0 or at a limit snapshot".into(),
        ));
    }
    let c = start.config();
    let node = omega::run_omega(Exec::new(p, oracle, &c), &c, budget.per_level_budget)?;
    if let Some(r) = node.exceeded {
        return Err(RunError::Exceeded(r));
    }
    let limit_stage = start.stage.limit_step(1)?;
    let (limit, halted) = match node.cert {
        Certificate::HaltAt(n) => {
            let at = start.stage.add_finite(n);
            (None, node.end.map(|e| Snapshot::at(e, at)))
        }
        _ => (node.end.map(|e| Snapshot::at(e, limit_stage)), None),
    };
    Ok(BlockSummary {
        start: start.clone(),
        certificate: node.cert,
        ever_one: node.ever_one,
        limit,
        halted,
    })
}

/// The ω^k-limit of a sequence of consecutive level-(k-1) blocks, found by a
/// recurrence of block starts.
pub fn limit_of_level(
    blocks: &[BlockSummary],
    level: u32,
    budget: &BudgetPolicy,
) -> Result<Snapshot, RunError> {
    if level < 2 {
        return Err(RunError::Precondition("level must be at least 2".into()));
    }
    let mut stage = None;
    for (i, b) in blocks.iter().enumerate() {
        if b.limit.is_none() {
            return Err(RunError::Precondition(format!("block {i} has no limit to take")));
        }
        stage.get_or_insert_with(|| b.start.stage.clone());
        let key = b.start.config();
        if let Some(first) = blocks[..i].iter().position(|x| x.start.config() == key) {
            let union = engine::union_tracks(blocks[first..i].iter().map(|x| x.ever_one.as_slice()));
            let stage = blocks[0].start.stage.limit_step(level)?.check_below(budget.depth)?;
            let state = blocks[0]
                .limit
                .as_ref()
                .map(|l| l.state)
                .expect("checked above");
            return Ok(Snapshot {
                state,
                head: 0,
                tracks: union,
                stage,
            });
        }
        if i as u64 + 1 >= budget.per_level_budget {
            break;
        }
    }
    Err(RunError::Exceeded(ExceedReason::BlockBudget))
}

/// Runs from the initial configuration on `input` through levels up to D.
pub fn run_transfinite(
    p: &Program,
    input: &Real,
    budget: &BudgetPolicy,
    oracle: Option<&OracleSpec>,
) -> Result<RunResult, RunError> {
    validate(p).map_err(RunError::InvalidProgram)?;
    budget.check()?;
    check_oracle(p, oracle)?;
    let init = Config::initial(p, input, oracle);
    let mut engine = Engine::new(p, oracle, *budget);
    let root = engine.node(budget.depth, &init)?;
    let outcome = match root.end() {
        End::Halted(c) => {
            let time = halting_time(&root, Ordinal::zero());
            assert!(!time.is_limit(), "halting happens at successor stages only");
            let time = time.check_below(budget.depth)?;
            Outcome::Halted {
                time,
                output: c.tracks[OUTPUT].clone(),
            }
        }
        End::Loop => Outcome::Loops(locate_loop(&root, Ordinal::zero())),
        End::Limit(_) => Outcome::Exceeded {
            reason: ExceedReason::OrdinalCap,
        },
        End::Exceeded(reason) => Outcome::Exceeded { reason },
    };
    Ok(RunResult {
        outcome,
        budget: *budget,
        program: p.clone(),
        oracle: oracle.cloned(),
        root,
    })
}

/// Stage at which child `j` of a level-`k` block starting at `sigma` starts.
pub(crate) fn child_stage(sigma: &Ordinal, level: u32, j: usize) -> Ordinal {
    sigma.add(&Ordinal::monomial(level - 1, j as u64))
}

fn halting_time(node: &Node, sigma: Ordinal) -> Ordinal {
    match node {
        Node::Omega(o) => match o.cert {
            Certificate::HaltAt(n) => sigma.add_finite(n),
            _ => unreachable!("halting ω-block"),
        },
        Node::Level(l) => {
            let j = l.children.len() - 1;
            halting_time(&l.children[j], child_stage(&sigma, l.level, j))
        }
    }
}

fn locate_loop(node: &Node, sigma: Ordinal) -> LoopCert {
    match node {
        Node::Level(l) => match l.outcome {
            LevelOutcome::StrongLoop { first } => LoopCert {
                level: l.level - 1,
                first: child_stage(&sigma, l.level, first),
                recur: child_stage(&sigma, l.level, l.children.len()),
                digest: l.children[first].start().digest(),
            },
            LevelOutcome::InnerLoop => {
                let j = l.children.len() - 1;
                locate_loop(&l.children[j], child_stage(&sigma, l.level, j))
            }
            _ => unreachable!("looping level block"),
        },
        Node::Omega(_) => unreachable!("ω-blocks never loop on their own"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Clockable {
    Halts(Ordinal),
    Diverges,
    Unknown(ExceedReason),
}

impl Clockable {
    pub fn time(&self) -> Option<&Ordinal> {
        match self {
            Clockable::Halts(t) => Some(t),
            _ => None,
        }
    }
}

/// Halting time on the all-zero input.
pub fn clockable_time(p: &Program, budget: &BudgetPolicy) -> Result<Clockable, RunError> {
    let r = run_transfinite(p, &Real::zero(), budget, None)?;
    Ok(match r.outcome {
        Outcome::Halted { time, .. } => Clockable::Halts(time),
        Outcome::Loops(_) => Clockable::Diverges,
        Outcome::Exceeded { reason } => Clockable::Unknown(reason),
    })
}

/// Re-checks a certificate from the snapshot at step `mu` of an ω-block alone.
pub fn verify_certificate(
    p: &Program,
    oracle: Option<&OracleSpec>,
    at_mu: &Config,
    cert: &Certificate,
) -> bool {
    let mut exec = Exec::new(p, oracle, at_mu);
    match *cert {
        Certificate::Repeat { pi, .. } => {
            for _ in 0..pi {
                if exec.step().is_err() {
                    return false;
                }
            }
            pi >= 1 && exec.config() == *at_mu
        }
        Certificate::Translation { pi, shift, floor, .. } => {
            let (d, floor) = (shift as usize, floor as usize);
            let before = exec.clone();
            for _ in 0..pi {
                if exec.head < floor {
                    return false;
                }
                match exec.step() {
                    Ok(i) if !i.bumped && i.query.is_none() => {}
                    _ => return false,
                }
            }
            d >= 1
                && exec.head >= floor
                && exec.state == before.state
                && exec.head == before.head + d
                && before.tapes.iter().zip(&exec.tapes).all(|(s, t)| {
                    let span = s.explicit_len().max(t.explicit_len()) + s.period();
                    (floor..span).all(|i| t.get(i + d) == s.get(i))
                })
        }
        Certificate::HaltAt(n) => {
            for _ in 0..n {
                if exec.is_halted() || exec.step().is_err() {
                    return false;
                }
            }
            exec.is_halted()
        }
        Certificate::Exceeded => false,
    }
}

/// The configuration after `steps` successor steps from `start`.
pub fn simulate(
    p: &Program,
    oracle: Option<&OracleSpec>,
    start: &Config,
    steps: u64,
) -> Result<Config, RunError> {
    let mut exec = Exec::new(p, oracle, start);
    for _ in 0..steps {
        exec.step()?;
    }
    Ok(exec.config())
}

#[cfg(test)]
mod tests;
