use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::machine::{Program, ProgramId};
use crate::ordinal::{pair_index, Ordinal};
use crate::real::Real;
use crate::runner::{run_transfinite, BudgetPolicy, Outcome, RunError, RunResult};

use super::enumerate::Enumeration;
use super::OracleSpec;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryEntry {
    pub stage: Ordinal,
    pub real: Real,
    pub answer: bool,
}

/// Every query of one run, in stage order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryLog {
    pub entries: Vec<QueryEntry>,
}

impl QueryLog {
    pub fn from_run(r: &RunResult) -> Self {
        QueryLog {
            entries: r
                .queries()
                .into_iter()
                .map(|(stage, real, answer)| QueryEntry { stage, real, answer })
                .collect(),
        }
    }

    /// True when every recorded answer is what `oracle` says now.
    pub fn replays_against(&self, oracle: &OracleSpec) -> bool {
        match oracle.as_set() {
            Some(s) => self.entries.iter().all(|e| s.answer(&e.real) == e.answer),
            None => self.entries.is_empty(),
        }
    }

    pub fn reals(&self) -> impl Iterator<Item = &Real> {
        self.entries.iter().map(|e| &e.real)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Runs `p` with an oracle. A set oracle needs the query protocol and vice versa.
pub fn run_with_oracle(
    p: &Program,
    input: &Real,
    o: &OracleSpec,
    budget: &BudgetPolicy,
) -> Result<(RunResult, QueryLog), RunError> {
    let needs_set = p.query_states().is_some();
    let is_set = matches!(o, OracleSpec::Set(_));
    if needs_set != is_set || (is_set && p.tracks() != 4) {
        return Err(RunError::ProtocolMismatch);
    }
    let r = run_transfinite(p, input, budget, Some(o))?;
    let log = QueryLog::from_run(&r);
    Ok((r, log))
}

/// Programs to jump over: an enumeration or an explicit list.
#[derive(Debug, Clone)]
pub enum ProgramSource {
    Enumerated(Enumeration),
    Listed(Vec<Program>),
}

impl ProgramSource {
    pub fn len(&self) -> usize {
        match self {
            ProgramSource::Enumerated(e) => e.len(),
            ProgramSource::Listed(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize) -> Program {
        match self {
            ProgramSource::Enumerated(e) => e.get(i),
            ProgramSource::Listed(v) => v[i].clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JumpResult {
    pub halted: Vec<(ProgramId, Ordinal)>,
    pub looping: Vec<ProgramId>,
    pub exceeded: Vec<ProgramId>,
    /// Programs whose run could not start (for example a query without an oracle).
    pub failed: Vec<(ProgramId, String)>,
    pub bound: usize,
    pub budget: BudgetPolicy,
    pub oracle: Option<OracleSpec>,
}

impl JumpResult {
    /// Characteristic real of the halting set.
    pub fn halting_real(&self) -> Real {
        Real::characteristic(self.halted.iter().map(|(p, _)| p.0))
    }

    /// `A ⊕ h^A` for a real oracle `A`.
    pub fn joined(&self) -> Option<Real> {
        let a = self.oracle.as_ref()?.as_real()?;
        Some(Real::join(a, &self.halting_real()))
    }

    pub fn is_halted(&self, p: ProgramId) -> bool {
        self.halted.binary_search_by_key(&p, |(q, _)| *q).is_ok()
    }
}

enum One {
    Halted(Ordinal),
    Loops,
    Exceeded,
    Failed(String),
}

fn run_one(p: &Program, input: &Real, oracle: Option<&OracleSpec>, budget: &BudgetPolicy) -> One {
    match run_transfinite(p, input, budget, oracle) {
        Ok(r) => match r.outcome {
            Outcome::Halted { time, .. } => One::Halted(time),
            Outcome::Loops(_) => One::Loops,
            Outcome::Exceeded { .. } => One::Exceeded,
        },
        Err(RunError::Exceeded(_)) => One::Exceeded,
        Err(e) => One::Failed(e.to_string()),
    }
}

/// Runs every program on the all-zero input.
pub fn jump_lightface(
    programs: &ProgramSource,
    oracle: Option<&OracleSpec>,
    budget: &BudgetPolicy,
) -> JumpResult {
    let outcomes: Vec<One> = (0..programs.len())
        .into_par_iter()
        .map(|i| run_one(&programs.get(i), &Real::zero(), oracle, budget))
        .collect();
    let mut res = JumpResult {
        halted: Vec::new(),
        looping: Vec::new(),
        exceeded: Vec::new(),
        failed: Vec::new(),
        bound: programs.len(),
        budget: *budget,
        oracle: oracle.cloned(),
    };
    for (i, o) in outcomes.into_iter().enumerate() {
        let id = ProgramId(i);
        match o {
            One::Halted(t) => res.halted.push((id, t)),
            One::Loops => res.looping.push(id),
            One::Exceeded => res.exceeded.push(id),
            One::Failed(e) => res.failed.push((id, e)),
        }
    }
    res
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoldfaceResult {
    /// (program, index of the input, halting time).
    pub halted: Vec<(ProgramId, usize, Ordinal)>,
    pub inputs: Vec<Real>,
}

impl BoldfaceResult {
    /// The halting pairs as a set of naturals `pair_index(program, input)`.
    pub fn code(&self) -> Real {
        Real::characteristic(
            self.halted
                .iter()
                .map(|(p, x, _)| pair_index(p.0 as u64, *x as u64) as usize),
        )
    }

    pub fn triples(&self) -> Vec<(ProgramId, Real, Ordinal)> {
        self.halted
            .iter()
            .map(|(p, x, t)| (*p, self.inputs[*x].clone(), t.clone()))
            .collect()
    }
}

/// Halting pairs over a finite set of inputs.
pub fn jump_boldface(
    programs: &ProgramSource,
    inputs: &[Real],
    oracle: Option<&OracleSpec>,
    budget: &BudgetPolicy,
) -> BoldfaceResult {
    let mut inputs: Vec<Real> = inputs.to_vec();
    inputs.sort();
    inputs.dedup();
    let n = inputs.len();
    let jobs: Vec<(usize, usize)> = (0..programs.len())
        .flat_map(|p| (0..n).map(move |x| (p, x)))
        .collect();
    let halted = jobs
        .into_par_iter()
        .filter_map(|(p, x)| match run_one(&programs.get(p), &inputs[x], oracle, budget) {
            One::Halted(t) => Some((ProgramId(p), x, t)),
            _ => None,
        })
        .collect();
    BoldfaceResult { halted, inputs }
}
