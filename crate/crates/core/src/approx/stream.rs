use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::machine::ProgramId;
use crate::oracle::{jump_lightface, OracleSpec, ProgramSource};
use crate::ordinal::Ordinal;
use crate::runner::BudgetPolicy;

/// Halting events of a set of programs, in the order they happen.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproximationStream {
    /// (halting time, program), ordered by time then program.
    pub events: Vec<(Ordinal, ProgramId)>,
    pub final_h: Vec<ProgramId>,
    pub exceeded: Vec<ProgramId>,
    pub bound: usize,
}

impl ApproximationStream {
    /// Programs halted at or before `stage`.
    pub fn snapshot(&self, stage: &Ordinal) -> BTreeSet<ProgramId> {
        self.events
            .iter()
            .take_while(|(t, _)| t <= stage)
            .map(|(_, p)| *p)
            .collect()
    }

    /// Distinct event stages.
    pub fn stages(&self) -> Vec<Ordinal> {
        let mut s: Vec<Ordinal> = self.events.iter().map(|(t, _)| t.clone()).collect();
        s.dedup();
        s
    }

    /// Snapshots grow along the event stages and end at the final set.
    pub fn is_monotone(&self) -> bool {
        let mut prev = BTreeSet::new();
        for s in self.stages() {
            let cur = self.snapshot(&s);
            if !prev.is_subset(&cur) {
                return false;
            }
            prev = cur;
        }
        prev == self.final_h.iter().copied().collect()
    }
}

pub fn approximate_jump(
    programs: &ProgramSource,
    oracle: Option<&OracleSpec>,
    budget: &BudgetPolicy,
) -> ApproximationStream {
    let j = jump_lightface(programs, oracle, budget);
    let mut events: Vec<(Ordinal, ProgramId)> = j.halted.iter().map(|(p, t)| (t.clone(), *p)).collect();
    events.sort();
    ApproximationStream {
        events,
        final_h: j.halted.iter().map(|(p, _)| *p).collect(),
        exceeded: j.exceeded,
        bound: j.bound,
    }
}
