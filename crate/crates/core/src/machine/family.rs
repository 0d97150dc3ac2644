//! Compact program families used for enumeration.
//!
//! A full rule table over 3 tracks has 8 read vectors per state, which makes
//! exhaustive surveys hopeless beyond a handful of states. Family programs
//! are ordinary [`Program`]s whose tables are generated from a short genome:
//! one [`Action`] per slot, where a slot is either a state keyed on one
//! tracked bit or an unconditional state.

use serde::{Deserialize, Serialize};

use super::{Move, Program, QueryStates, Rule, StateId, INPUT, ORACLE, OUTPUT, SCRATCH};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Action {
    /// Write scratch bit, stay, same state.
    Stay(bool),
    /// Write scratch bit, move right, same state.
    Sweep(bool),
    /// Write scratch bit, stay, move to the chain successor.
    Advance(bool),
    /// Write output bit, stay, halt.
    Halt(bool),
    /// Enter the query state.
    Ask,
}

impl Action {
    pub const PLAIN: [Action; 8] = [
        Action::Stay(false),
        Action::Stay(true),
        Action::Sweep(false),
        Action::Sweep(true),
        Action::Advance(false),
        Action::Advance(true),
        Action::Halt(false),
        Action::Halt(true),
    ];

    pub const WITH_ASK: [Action; 9] = [
        Action::Stay(false),
        Action::Stay(true),
        Action::Sweep(false),
        Action::Sweep(true),
        Action::Advance(false),
        Action::Advance(true),
        Action::Halt(false),
        Action::Halt(true),
        Action::Ask,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    /// 3 tracks; start and limit branch on the scratch bit, work states do not.
    Plain,
    /// 4 tracks with a read-only oracle; start branches on the oracle bit,
    /// limit on the scratch bit.
    RealOracle,
    /// 4 tracks with the query protocol; every state is unconditional and
    /// non-halting actions copy the input bit onto the oracle track.
    Query,
}

impl FamilyKind {
    pub fn tracks(self) -> usize {
        match self {
            FamilyKind::Plain => 3,
            _ => 4,
        }
    }

    pub fn alphabet(self) -> &'static [Action] {
        match self {
            FamilyKind::Query => &Action::WITH_ASK,
            _ => &Action::PLAIN,
        }
    }

    /// Genome length for `work` extra states.
    pub fn slots(self, work: usize) -> usize {
        4 + work
    }

    /// Number of family programs with exactly `work` work states.
    pub fn count_exact(self, work: usize) -> u64 {
        (self.alphabet().len() as u64).pow(self.slots(work) as u32)
    }
}

/// Builds the program for a genome of `kind.slots(work)` actions.
///
/// Slot layout: plain and real-oracle families use
/// `[start|0, start|1, limit|0, limit|1, w1, .., wk]`; the query family uses
/// `[start, limit, yes, no, w1, .., wk]`.
pub fn build(kind: FamilyKind, work: usize, genome: &[Action]) -> Program {
    assert_eq!(genome.len(), kind.slots(work), "genome length");
    let tracks = kind.tracks();
    let mut states = vec!["start".to_string(), "limit".to_string(), "halt".to_string()];
    let query = (kind == FamilyKind::Query).then(|| {
        states.extend(["query", "yes", "no"].map(String::from));
        QueryStates {
            query: 3,
            yes: 4,
            no: 5,
        }
    });
    let first_work = states.len();
    states.extend((1..=work).map(|i| format!("w{i}")));
    let (start, limit, halt): (StateId, StateId, StateId) = (0, 1, 2);

    let successor = |s: StateId| -> StateId {
        if s == start {
            if work > 0 {
                first_work
            } else {
                limit
            }
        } else if s == limit || query.is_some_and(|q| s == q.yes || s == q.no) {
            start
        } else if s + 1 < first_work + work {
            s + 1
        } else {
            limit
        }
    };

    let mut p = Program {
        tracks,
        start,
        limit,
        halt,
        query,
        partial_query: false,
        rules: vec![None; states.len() << tracks],
        states,
    };

    let bit = |read: u8, track: usize| read >> (tracks - 1 - track) & 1 == 1;
    let set = |mut v: u8, track: usize, b: bool| {
        let mask = 1 << (tracks - 1 - track);
        if b {
            v |= mask;
        } else {
            v &= !mask;
        }
        v
    };

    let rule_for = |state: StateId, read: u8, action: Action| -> Rule {
        let mut write = read;
        if kind == FamilyKind::Query && !matches!(action, Action::Halt(_) | Action::Ask) {
            write = set(write, ORACLE, bit(read, INPUT));
        }
        let (mv, next) = match action {
            Action::Stay(b) => {
                write = set(write, SCRATCH, b);
                (Move::S, state)
            }
            Action::Sweep(b) => {
                write = set(write, SCRATCH, b);
                (Move::R, state)
            }
            Action::Advance(b) => {
                write = set(write, SCRATCH, b);
                (Move::S, successor(state))
            }
            Action::Halt(b) => {
                write = set(write, OUTPUT, b);
                (Move::S, halt)
            }
            Action::Ask => (Move::S, query.expect("Ask outside the query family").query),
        };
        Rule { write, mv, next }
    };

    let keyed = |kind: FamilyKind, state: StateId| -> Option<usize> {
        match (kind, state) {
            (FamilyKind::Plain, 0 | 1) => Some(SCRATCH),
            (FamilyKind::RealOracle, 0) => Some(ORACLE),
            (FamilyKind::RealOracle, 1) => Some(SCRATCH),
            _ => None,
        }
    };

    let slot_states: Vec<(StateId, Option<bool>)> = match kind {
        FamilyKind::Query => [start, limit, 4, 5]
            .into_iter()
            .chain(first_work..first_work + work)
            .map(|s| (s, None))
            .collect(),
        _ => [
            (start, Some(false)),
            (start, Some(true)),
            (limit, Some(false)),
            (limit, Some(true)),
        ]
        .into_iter()
        .chain((first_work..first_work + work).map(|s| (s, None)))
        .collect(),
    };

    for (&(state, key_bit), &action) in slot_states.iter().zip(genome) {
        for read in 0..(1u8 << tracks) {
            let applies = match (keyed(kind, state), key_bit) {
                (Some(track), Some(b)) => bit(read, track) == b,
                _ => true,
            };
            if applies {
                let rule = rule_for(state, read, action);
                p.set_rule(state, read, rule);
            }
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::validate;

    #[test]
    fn every_small_genome_is_valid() {
        for kind in [FamilyKind::Plain, FamilyKind::RealOracle, FamilyKind::Query] {
            let alpha = kind.alphabet();
            for work in 0..=2 {
                // walk a deterministic sample of genomes covering every action in every slot
                for (i, a) in alpha.iter().enumerate() {
                    let genome: Vec<Action> = (0..kind.slots(work))
                        .map(|s| if s % 2 == 0 { *a } else { alpha[(i + s) % alpha.len()] })
                        .collect();
                    let p = build(kind, work, &genome);
                    assert_eq!(validate(&p), Ok(()), "{kind:?} {work} {genome:?}");
                    assert_eq!(p.tracks(), kind.tracks());
                }
            }
        }
    }

    #[test]
    fn closed_form_counts() {
        assert_eq!(FamilyKind::Plain.count_exact(0), 4096);
        assert_eq!(FamilyKind::Plain.count_exact(2), 262_144);
        assert_eq!(FamilyKind::Query.count_exact(0), 6561);
    }
}
