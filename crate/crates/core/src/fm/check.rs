use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::approx::AppearanceLog;
use crate::machine::ProgramId;
use crate::real::Real;

use super::{FmEvent, FmState, Side};

/// Event indices (or requirement priorities, for the injury bound) that
/// break an invariant of the construction.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FmViolations {
    pub restraint: Vec<usize>,
    pub injury_bound: Vec<usize>,
    pub additions: Vec<usize>,
    pub hygiene: Vec<usize>,
    /// Final set members with no logged addition.
    pub unlogged_members: usize,
}

impl FmViolations {
    pub fn ok(&self) -> bool {
        self.restraint.is_empty()
            && self.injury_bound.is_empty()
            && self.additions.is_empty()
            && self.hygiene.is_empty()
            && self.unlogged_members == 0
    }
}

/// Replays an event log and checks it against the construction's rules.
/// Only the log and the appearance log are consulted.
pub fn check_log(events: &[FmEvent], appearances: &AppearanceLog) -> FmViolations {
    let mut v = FmViolations::default();
    // req -> (guarded side, preserved reals)
    let mut active: BTreeMap<usize, (Side, Vec<Real>)> = BTreeMap::new();
    let mut injuries: BTreeMap<usize, usize> = BTreeMap::new();
    let mut attentions: Vec<usize> = Vec::new();

    let injured_at = |stage, req: usize| {
        events.iter().any(|e| {
            matches!(e, FmEvent::Injury { stage: s, req: r, by } if s == stage && *r == req && *by < req)
        })
    };

    for (i, e) in events.iter().enumerate() {
        match e {
            FmEvent::Witness { stage, witness, .. } => {
                let fresh_of_segment = appearances
                    .distinct_below(&stage.successor())
                    .is_ok_and(|seg| !seg.contains(witness));
                let fresh_of_restraints = active.values().all(|(_, p)| !p.contains(witness));
                if !(fresh_of_segment && fresh_of_restraints) {
                    v.hygiene.push(i);
                }
            }
            FmEvent::Addition {
                stage,
                req,
                side,
                row,
                real,
            } => {
                let attended = events[..i].iter().any(|x| {
                    matches!(x, FmEvent::Attention { stage: s, req: r, program } if s == stage && r == req && program == row)
                });
                let at_event = events[..i]
                    .iter()
                    .any(|x| matches!(x, FmEvent::Halting { stage: s, req: r, .. } if s == stage && r == req));
                if !(attended && at_event) {
                    v.additions.push(i);
                }
                for (&owner, (guards, preserved)) in &active {
                    if guards == side && preserved.contains(real) && !injured_at(stage, owner) {
                        v.restraint.push(i);
                    }
                }
            }
            FmEvent::Restraint {
                req, guards, preserved, ..
            } => {
                active.insert(*req, (*guards, preserved.clone()));
            }
            FmEvent::Injury { req, by, .. } => {
                active.remove(req);
                *injuries.entry(*req).or_default() += 1;
                if by >= req {
                    v.injury_bound.push(*req);
                }
            }
            FmEvent::Attention { req, .. } => attentions.push(*req),
            FmEvent::Halting { .. } => {}
        }
    }
    for (&req, &n) in &injuries {
        let higher = attentions.iter().filter(|&&a| a < req).count();
        if n > higher && !v.injury_bound.contains(&req) {
            v.injury_bound.push(req);
        }
    }
    v
}

impl FmState {
    /// Checks the event log, and that every final set member was logged.
    pub fn check(&self) -> FmViolations {
        let mut v = check_log(&self.events, &self.appearances);
        let logged: Vec<(Side, ProgramId, &Real)> = self
            .events
            .iter()
            .filter_map(|e| match e {
                FmEvent::Addition { side, row, real, .. } => Some((*side, *row, real)),
                _ => None,
            })
            .collect();
        for side in [Side::A, Side::B] {
            for (row, reals) in self.side(side) {
                v.unlogged_members += reals
                    .iter()
                    .filter(|r| !logged.iter().any(|(s, p, x)| *s == side && p == row && x == r))
                    .count();
            }
        }
        v
    }
}
