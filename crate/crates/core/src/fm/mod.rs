//! A staged Friedberg-Muchnik construction over reals.
//!
//! Requirement `R_p` asks that program `p` with oracle `B` does not compute
//! the characteristic function of `A` on its witness; `S_p` is the mirror
//! image. A requirement acts when its computation halts with all-zero output:
//! its witness goes into its own set, the queries of that computation are
//! preserved, and every lower-priority requirement gets a fresh witness.

mod check;
mod report;

#[cfg(test)]
mod tests;

pub use check::{check_log, FmViolations};
pub use report::{Classification, FmReport, RequirementReport};

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::approx::{diagonal, universal_run, AppearanceLog, ApproxError};
use crate::machine::ProgramId;
use crate::oracle::{run_with_oracle, OracleSpec, ProgramSource, QueryLog, SetOracle};
use crate::ordinal::Ordinal;
use crate::real::Real;
use crate::runner::BudgetPolicy;

/// Queries longer than this many bits are truncated before lookup.
pub const TRIM_BITS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReqKind {
    R,
    S,
}

impl ReqKind {
    /// The set the witness goes into.
    pub fn own(self) -> Side {
        match self {
            ReqKind::R => Side::A,
            ReqKind::S => Side::B,
        }
    }

    /// The set used as oracle.
    pub fn opposite(self) -> Side {
        match self {
            ReqKind::R => Side::B,
            ReqKind::S => Side::A,
        }
    }
}

impl fmt::Display for ReqKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReqKind::R => "R",
            ReqKind::S => "S",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReqState {
    Waiting,
    SatisfiedByWitness,
    SatisfiedByDivergence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessReason {
    Initial,
    /// Replaced after the requirement was injured.
    Injury,
    /// Replaced because a higher-priority requirement acted.
    Reassigned,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub stage: Ordinal,
    pub witness: Real,
    pub reason: WitnessReason,
    /// Number of reals the witness was diagonalized against.
    pub avoided: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Injury {
    pub stage: Ordinal,
    /// Priority of the requirement that acted.
    pub by: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Requirement {
    pub kind: ReqKind,
    pub program: ProgramId,
    pub priority: usize,
    pub witness: Real,
    pub lineage: Vec<WitnessRecord>,
    pub state: ReqState,
    pub injuries: Vec<Injury>,
    pub attentions: usize,
}

impl Requirement {
    pub fn name(&self) -> String {
        format!("{}{}", self.kind, self.program.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Restraint {
    pub owner: usize,
    pub stage: Ordinal,
    pub guards: Side,
    pub preserved: Vec<Real>,
    pub log: QueryLog,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum FmEvent {
    Witness {
        stage: Ordinal,
        req: usize,
        witness: Real,
        reason: WitnessReason,
    },
    Halting {
        stage: Ordinal,
        req: usize,
        program: ProgramId,
        zero_output: bool,
    },
    Attention {
        stage: Ordinal,
        req: usize,
        program: ProgramId,
    },
    Addition {
        stage: Ordinal,
        req: usize,
        side: Side,
        row: ProgramId,
        real: Real,
    },
    Restraint {
        stage: Ordinal,
        req: usize,
        guards: Side,
        preserved: Vec<Real>,
    },
    Injury {
        stage: Ordinal,
        req: usize,
        by: usize,
    },
}

impl FmEvent {
    pub fn stage(&self) -> &Ordinal {
        match self {
            FmEvent::Witness { stage, .. }
            | FmEvent::Halting { stage, .. }
            | FmEvent::Attention { stage, .. }
            | FmEvent::Addition { stage, .. }
            | FmEvent::Restraint { stage, .. }
            | FmEvent::Injury { stage, .. } => stage,
        }
    }
}

/// Which programs the requirements use, in priority order.
#[derive(Debug, Clone)]
pub struct FmInput {
    pub programs: ProgramSource,
    pub requirements: Vec<(ReqKind, ProgramId)>,
}

impl FmInput {
    /// `R_0, S_0, R_1, S_1, ...` over every program.
    pub fn interleaved(programs: ProgramSource) -> Self {
        let requirements = (0..programs.len())
            .flat_map(|i| [(ReqKind::R, ProgramId(i)), (ReqKind::S, ProgramId(i))])
            .collect();
        FmInput { programs, requirements }
    }

    pub fn scripted(programs: ProgramSource, requirements: Vec<(ReqKind, ProgramId)>) -> Self {
        FmInput { programs, requirements }
    }
}

/// A halted run of a requirement's program on its witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certified {
    pub time: Ordinal,
    pub zero_output: bool,
    pub log: QueryLog,
}

#[derive(Debug, Clone)]
struct Pending {
    at: Ordinal,
    run: Certified,
}

#[derive(Debug, Clone)]
pub struct FmState {
    /// Rows indexed by the program whose requirement added the real.
    pub a: BTreeMap<ProgramId, Vec<Real>>,
    pub b: BTreeMap<ProgramId, Vec<Real>>,
    pub requirements: Vec<Requirement>,
    pub restraints: Vec<Option<Restraint>>,
    pub stage: Ordinal,
    pub events: Vec<FmEvent>,
    /// Why the construction stopped early, if it did.
    pub partial: Option<String>,
    pub appearances: AppearanceLog,
    pub budget: BudgetPolicy,
    programs: ProgramSource,
    pending: Vec<Option<Pending>>,
}

/// A real outside every given set, by diagonalizing against their union.
pub fn witness_avoiding<'a>(sets: impl IntoIterator<Item = &'a [Real]>) -> Real {
    let mut all: Vec<Real> = Vec::new();
    for s in sets {
        for r in s {
            if !all.contains(r) {
                all.push(r.clone());
            }
        }
    }
    diagonal(&all)
}

impl FmState {
    pub fn new(input: FmInput, budget: &BudgetPolicy) -> Self {
        let appearances = universal_run(&input.programs, budget);
        let requirements: Vec<Requirement> = input
            .requirements
            .iter()
            .enumerate()
            .map(|(priority, &(kind, program))| Requirement {
                kind,
                program,
                priority,
                witness: Real::zero(),
                lineage: Vec::new(),
                state: ReqState::Waiting,
                injuries: Vec::new(),
                attentions: 0,
            })
            .collect();
        let n = requirements.len();
        FmState {
            a: BTreeMap::new(),
            b: BTreeMap::new(),
            requirements,
            restraints: vec![None; n],
            stage: Ordinal::zero(),
            events: Vec::new(),
            partial: None,
            appearances,
            budget: *budget,
            programs: input.programs,
            pending: vec![None; n],
        }
    }

    pub fn side(&self, s: Side) -> &BTreeMap<ProgramId, Vec<Real>> {
        match s {
            Side::A => &self.a,
            Side::B => &self.b,
        }
    }

    pub fn members(&self, s: Side) -> impl Iterator<Item = &Real> {
        self.side(s).values().flatten()
    }

    pub fn contains(&self, s: Side, r: &Real) -> bool {
        self.members(s).any(|x| x == r)
    }

    pub fn oracle(&self, s: Side) -> OracleSpec {
        OracleSpec::Set(SetOracle::new(self.members(s).cloned(), TRIM_BITS))
    }

    /// Reals that appear on some track at or before the current stage.
    pub fn segment(&self) -> Result<Vec<Real>, ApproxError> {
        self.appearances.distinct_below(&self.stage.successor())
    }

    /// Preserved sets of every restraint in force.
    pub fn preserved(&self) -> impl Iterator<Item = &[Real]> {
        self.restraints.iter().flatten().map(|r| r.preserved.as_slice())
    }

    /// A witness for `req` avoiding the appearance segment, every preserved
    /// set, both sets built so far and every other current witness.
    pub fn fresh_witness(&self, req: usize) -> Result<(Real, usize), ApproxError> {
        let segment = self.segment()?;
        let a: Vec<Real> = self.members(Side::A).cloned().collect();
        let b: Vec<Real> = self.members(Side::B).cloned().collect();
        let others: Vec<Real> = self
            .requirements
            .iter()
            .filter(|r| r.priority != req && !r.lineage.is_empty())
            .map(|r| r.witness.clone())
            .collect();
        let mut sets: Vec<&[Real]> = vec![&segment];
        sets.extend(self.preserved());
        sets.extend([a.as_slice(), b.as_slice(), others.as_slice()]);
        let avoided = sets.iter().flat_map(|s| s.iter()).collect::<std::collections::HashSet<_>>().len();
        Ok((witness_avoiding(sets), avoided))
    }

    fn assign(&mut self, req: usize, reason: WitnessReason) -> Result<(), ApproxError> {
        let (w, avoided) = self.fresh_witness(req)?;
        let r = &mut self.requirements[req];
        r.witness = w.clone();
        r.lineage.push(WitnessRecord {
            stage: self.stage.clone(),
            witness: w.clone(),
            reason,
            avoided,
        });
        self.events.push(FmEvent::Witness {
            stage: self.stage.clone(),
            req,
            witness: w,
            reason,
        });
        Ok(())
    }

    /// Runs the requirement's program on its witness against the current
    /// opposite set. `None` when it does not halt within `budget`.
    pub fn computation(&self, req: usize, budget: &BudgetPolicy) -> Option<Certified> {
        let r = &self.requirements[req];
        let p = self.programs.get(r.program.0);
        let (run, log) = run_with_oracle(&p, &r.witness, &self.oracle(r.kind.opposite()), budget).ok()?;
        let (time, out) = run.halted()?;
        Some(Certified {
            time: time.clone(),
            zero_output: out.is_zero(),
            log,
        })
    }

    /// The certified computation, if the waiting requirement needs attention.
    pub fn check_attention(&self, req: usize) -> Option<Certified> {
        if self.requirements[req].state != ReqState::Waiting {
            return None;
        }
        self.computation(req, &self.budget).filter(|c| c.zero_output)
    }

    /// Starts the requirement's computation over at the current stage.
    fn schedule(&mut self, req: usize) {
        self.pending[req] = (self.requirements[req].state == ReqState::Waiting)
            .then(|| self.computation(req, &self.budget))
            .flatten()
            .map(|run| Pending {
                at: self.stage.add(&run.time),
                run,
            });
    }

    pub fn receive_attention(&mut self, req: usize, cert: Certified) -> Result<(), ApproxError> {
        let stage = self.stage.clone();
        let (kind, program, witness) = {
            let r = &mut self.requirements[req];
            r.attentions += 1;
            r.state = ReqState::SatisfiedByWitness;
            (r.kind, r.program, r.witness.clone())
        };
        self.events.push(FmEvent::Attention {
            stage: stage.clone(),
            req,
            program,
        });
        let own = kind.own();
        match own {
            Side::A => &mut self.a,
            Side::B => &mut self.b,
        }
        .entry(program)
        .or_default()
        .push(witness.clone());
        self.events.push(FmEvent::Addition {
            stage: stage.clone(),
            req,
            side: own,
            row: program,
            real: witness,
        });
        let preserved: Vec<Real> = cert.log.reals().cloned().collect();
        self.events.push(FmEvent::Restraint {
            stage: stage.clone(),
            req,
            guards: kind.opposite(),
            preserved: preserved.clone(),
        });
        self.restraints[req] = Some(Restraint {
            owner: req,
            stage: stage.clone(),
            guards: kind.opposite(),
            preserved,
            log: cert.log,
        });
        self.pending[req] = None;

        for j in req + 1..self.requirements.len() {
            let reason = if self.requirements[j].state == ReqState::SatisfiedByWitness {
                self.requirements[j].injuries.push(Injury {
                    stage: stage.clone(),
                    by: req,
                });
                self.requirements[j].state = ReqState::Waiting;
                self.restraints[j] = None;
                self.events.push(FmEvent::Injury {
                    stage: stage.clone(),
                    req: j,
                    by: req,
                });
                WitnessReason::Injury
            } else {
                WitnessReason::Reassigned
            };
            self.assign(j, reason)?;
        }
        // higher-priority computations that read the set that just grew start over
        for j in 0..self.requirements.len() {
            if j > req || self.requirements[j].kind.opposite() == own {
                self.schedule(j);
            }
        }
        Ok(())
    }

    fn next_stage(&self) -> Option<Ordinal> {
        self.pending.iter().flatten().map(|p| p.at.clone()).min()
    }

    /// Processes every computation halting at the next event stage. Returns
    /// false when nothing is left to do.
    pub fn step(&mut self) -> Result<bool, ApproxError> {
        let Some(stage) = self.next_stage() else { return Ok(false) };
        self.stage = stage.clone();
        let mut winner = None;
        for i in 0..self.pending.len() {
            let Some(p) = self.pending[i].take_if(|p| p.at == stage) else { continue };
            self.events.push(FmEvent::Halting {
                stage: stage.clone(),
                req: i,
                program: self.requirements[i].program,
                zero_output: p.run.zero_output,
            });
            if p.run.zero_output {
                if winner.is_none() {
                    winner = Some((i, p.run));
                } else {
                    // loses to a higher-priority requirement and is reassigned below
                    self.pending[i] = None;
                }
            }
        }
        if let Some((i, cert)) = winner {
            self.receive_attention(i, cert)?;
        }
        Ok(true)
    }
}

/// Result of a construction: the final state and, unless it stopped early,
/// the report.
#[derive(Debug, Clone)]
pub struct FmOutcome {
    pub state: FmState,
    pub report: Option<FmReport>,
}

/// Runs the priority construction to completion or to its event cap.
pub fn fm_construct(input: FmInput, budget: &BudgetPolicy) -> FmOutcome {
    let mut st = FmState::new(input, budget);
    let run = |st: &mut FmState| -> Result<(), ApproxError> {
        for i in 0..st.requirements.len() {
            st.assign(i, WitnessReason::Initial)?;
        }
        for i in 0..st.requirements.len() {
            st.schedule(i);
        }
        let cap = budget.per_level_budget;
        let mut stages = 0u64;
        while st.step()? {
            stages += 1;
            if stages >= cap && st.next_stage().is_some() {
                st.partial = Some(format!("event cap {cap} reached at stage {}", st.stage));
                break;
            }
        }
        Ok(())
    };
    if let Err(e) = run(&mut st) {
        st.partial = Some(format!("witness refused at stage {}: {e}", st.stage));
    }
    let report = st.partial.is_none().then(|| report::classify(&mut st));
    FmOutcome { state: st, report }
}
