//! Nested blocks: a level-k block is a run of level-(k-1) blocks from one
//! configuration up to its ω^k-limit (or halt, loop, budget).

use std::collections::HashMap;
use std::sync::Arc;

use crate::machine::Program;
use crate::oracle::OracleSpec;
use crate::real::Real;

use super::exec::Exec;
use super::omega::{run_omega, OmegaNode};
use super::{BudgetPolicy, Certificate, Config, ExceedReason, RunError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum LevelOutcome {
    /// `children[first..]` recurs forever; the limit is taken.
    Cycle { first: usize },
    /// The recurrence at `children[first]` is strong: the run never ends.
    StrongLoop { first: usize },
    /// The last child loops.
    InnerLoop,
    /// The last child halts.
    Halted,
    Exceeded(ExceedReason),
}

#[derive(Debug)]
pub(crate) struct LevelNode {
    pub level: u32,
    pub start: Config,
    pub children: Vec<Arc<Node>>,
    pub outcome: LevelOutcome,
    pub ever_one: Vec<Real>,
    pub limit: Option<Config>,
}

#[derive(Debug)]
pub(crate) enum Node {
    Omega(OmegaNode),
    Level(LevelNode),
}

pub(crate) enum End<'a> {
    Limit(&'a Config),
    Halted(&'a Config),
    Loop,
    Exceeded(ExceedReason),
}

impl Node {
    pub fn level(&self) -> u32 {
        match self {
            Node::Omega(_) => 1,
            Node::Level(l) => l.level,
        }
    }

    pub fn start(&self) -> &Config {
        match self {
            Node::Omega(o) => &o.start,
            Node::Level(l) => &l.start,
        }
    }

    pub fn ever_one(&self) -> &[Real] {
        match self {
            Node::Omega(o) => &o.ever_one,
            Node::Level(l) => &l.ever_one,
        }
    }

    pub fn end(&self) -> End<'_> {
        match self {
            Node::Omega(o) => match (&o.cert, &o.end) {
                (Certificate::HaltAt(_), Some(c)) => End::Halted(c),
                (Certificate::Exceeded, _) | (_, None) => {
                    End::Exceeded(o.exceeded.unwrap_or(ExceedReason::StepBudget))
                }
                (_, Some(c)) => End::Limit(c),
            },
            Node::Level(l) => match &l.outcome {
                LevelOutcome::Cycle { .. } => End::Limit(l.limit.as_ref().expect("cycle has a limit")),
                LevelOutcome::StrongLoop { .. } | LevelOutcome::InnerLoop => End::Loop,
                LevelOutcome::Halted => match l.children.last().map(|c| c.end()) {
                    Some(End::Halted(c)) => End::Halted(c),
                    _ => unreachable!("halted level block ends with a halted child"),
                },
                LevelOutcome::Exceeded(r) => End::Exceeded(*r),
            },
        }
    }
}

/// Pointwise union of per-track cell sets.
pub(crate) fn union_tracks<'a>(sets: impl IntoIterator<Item = &'a [Real]>) -> Vec<Real> {
    let mut it = sets.into_iter();
    let first = it.next().expect("at least one block").to_vec();
    it.fold(first, |acc, s| acc.iter().zip(s).map(|(a, b)| a.or(b)).collect())
}

pub(crate) struct Engine<'a> {
    pub program: &'a Program,
    pub oracle: Option<&'a OracleSpec>,
    pub budget: BudgetPolicy,
    memo: HashMap<(u32, Config), Arc<Node>>,
}

impl<'a> Engine<'a> {
    pub fn new(program: &'a Program, oracle: Option<&'a OracleSpec>, budget: BudgetPolicy) -> Self {
        Engine {
            program,
            oracle,
            budget,
            memo: HashMap::new(),
        }
    }

    pub fn node(&mut self, level: u32, start: &Config) -> Result<Arc<Node>, RunError> {
        if let Some(n) = self.memo.get(&(level, start.clone())) {
            return Ok(n.clone());
        }
        let node = if level == 1 {
            let exec = Exec::new(self.program, self.oracle, start);
            Node::Omega(run_omega(exec, start, self.budget.per_level_budget)?)
        } else {
            Node::Level(self.level_node(level, start)?)
        };
        let node = Arc::new(node);
        self.memo.insert((level, start.clone()), node.clone());
        Ok(node)
    }

    fn level_node(&mut self, level: u32, start: &Config) -> Result<LevelNode, RunError> {
        let mut children: Vec<Arc<Node>> = Vec::new();
        let mut seen: HashMap<Config, usize> = HashMap::new();
        let mut cur = start.clone();
        let limit_state = self.program.limit();
        let (outcome, limit) = loop {
            if let Some(&first) = seen.get(&cur) {
                let union = union_tracks(children[first..].iter().map(|c| c.ever_one()));
                if union == cur.tracks {
                    break (LevelOutcome::StrongLoop { first }, None);
                }
                let limit = Config {
                    state: limit_state,
                    head: 0,
                    tracks: union,
                };
                break (LevelOutcome::Cycle { first }, Some(limit));
            }
            if children.len() as u64 >= self.budget.per_level_budget {
                break (LevelOutcome::Exceeded(ExceedReason::BlockBudget), None);
            }
            seen.insert(cur.clone(), children.len());
            let child = self.node(level - 1, &cur)?;
            children.push(child.clone());
            match child.end() {
                End::Limit(c) => cur = c.clone(),
                End::Halted(_) => break (LevelOutcome::Halted, None),
                End::Loop => break (LevelOutcome::InnerLoop, None),
                End::Exceeded(r) => break (LevelOutcome::Exceeded(r), None),
            }
        };
        let ever_one = union_tracks(children.iter().map(|c| c.ever_one()));
        Ok(LevelNode {
            level,
            start: start.clone(),
            children,
            outcome,
            ever_one,
            limit,
        })
    }
}
