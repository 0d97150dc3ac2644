use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::machine::ProgramId;
use crate::real::Real;
use crate::runner::BudgetPolicy;

use super::{FmState, Injury, ReqKind, ReqState, WitnessRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    SatisfiedByWitness,
    SatisfiedByDivergenceAtBudget,
    /// The end-of-run recheck found a converging computation.
    Unsatisfied,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RequirementReport {
    pub name: String,
    pub kind: ReqKind,
    pub program: ProgramId,
    pub priority: usize,
    pub classification: Classification,
    pub witness: Real,
    pub in_own_set: bool,
    pub attentions: usize,
    pub injuries: Vec<Injury>,
    pub lineage: Vec<WitnessRecord>,
    pub recheck_passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FmReport {
    pub schema: u32,
    pub budget: BudgetPolicy,
    pub recheck_budget: BudgetPolicy,
    pub a_size: usize,
    pub b_size: usize,
    pub events: usize,
    pub requirements: Vec<RequirementReport>,
}

impl FmReport {
    pub fn all_rechecks_passed(&self) -> bool {
        self.requirements.iter().all(|r| r.recheck_passed)
    }
}

/// Classifies every requirement against the final sets.
///
/// A satisfied requirement must still have its witness in its own set and
/// its certified computation must replay against the final opposite set. A
/// waiting one counts as satisfied by divergence when, at twice the budget,
/// its computation still does not halt with zero output.
pub(super) fn classify(st: &mut FmState) -> FmReport {
    let recheck = st.budget.scaled(2);
    let verdicts: Vec<(Classification, bool)> = (0..st.requirements.len())
        .into_par_iter()
        .map(|i| {
            let r = &st.requirements[i];
            let in_own = st.contains(r.kind.own(), &r.witness);
            match r.state {
                ReqState::SatisfiedByWitness => {
                    let replays = st.restraints[i]
                        .as_ref()
                        .is_some_and(|c| c.log.replays_against(&st.oracle(r.kind.opposite())));
                    let zero = st.computation(i, &st.budget).is_some_and(|c| c.zero_output);
                    (Classification::SatisfiedByWitness, in_own && replays && zero)
                }
                _ => {
                    let zero = st.computation(i, &recheck).is_some_and(|c| c.zero_output);
                    if zero || in_own {
                        (Classification::Unsatisfied, false)
                    } else {
                        (Classification::SatisfiedByDivergenceAtBudget, true)
                    }
                }
            }
        })
        .collect();
    let mut requirements = Vec::new();
    for (i, (classification, recheck_passed)) in verdicts.into_iter().enumerate() {
        if classification == Classification::SatisfiedByDivergenceAtBudget {
            st.requirements[i].state = ReqState::SatisfiedByDivergence;
        }
        let r = &st.requirements[i];
        requirements.push(RequirementReport {
            name: r.name(),
            kind: r.kind,
            program: r.program,
            priority: r.priority,
            classification,
            witness: r.witness.clone(),
            in_own_set: st.contains(r.kind.own(), &r.witness),
            attentions: r.attentions,
            injuries: r.injuries.clone(),
            lineage: r.lineage.clone(),
            recheck_passed,
        });
    }
    FmReport {
        schema: 1,
        budget: st.budget,
        recheck_budget: recheck,
        a_size: st.members(super::Side::A).count(),
        b_size: st.members(super::Side::B).count(),
        events: st.events.len(),
        requirements,
    }
}
