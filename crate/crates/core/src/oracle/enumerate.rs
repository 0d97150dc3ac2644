//! Deterministic enumeration of family programs, ordered by canonical text.
//!
//! Two family programs with the same number of work states render identical
//! headers, and each slot's rules occupy fixed lines. Any two different actions
//! in a slot already differ on the slot's first line, so text order is the
//! lexicographic order of genomes once each slot's actions are ranked by the
//! text of that first line. Groups with different work counts are ordered by
//! their headers. Nothing has to be rendered per program.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::machine::family::{build, Action, FamilyKind};
use crate::machine::{Program, ProgramId};

/// Largest number of work states an enumeration may use.
pub const MAX_WORK_STATES: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error("at most {MAX_WORK_STATES} work states are supported, asked for {0}")]
    CapExceeded(usize),
    #[error("tracks must be 3 or 4, found {0}")]
    Tracks(usize),
}

#[derive(Debug, Clone)]
struct Group {
    work: usize,
    /// Per slot, the alphabet sorted by the text of the slot's first rule line.
    ranked: Vec<Vec<Action>>,
    len: usize,
}

#[derive(Debug, Clone)]
pub struct Enumeration {
    pub kind: FamilyKind,
    pub max_work: usize,
    groups: Vec<Group>,
    take: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationBound {
    pub kind: FamilyKind,
    pub max_work: usize,
    pub len: usize,
}

/// The enumeration for `tracks`: the plain family for 3, the query family for 4.
pub fn enumerate_programs(max_work: usize, tracks: usize) -> Result<Enumeration, EnumerationError> {
    let kind = match tracks {
        3 => FamilyKind::Plain,
        4 => FamilyKind::Query,
        t => return Err(EnumerationError::Tracks(t)),
    };
    Enumeration::new(kind, max_work)
}

fn first_line(p: &Program, slot_state: usize, read: u8) -> String {
    let r = p.rule(slot_state, read).expect("family programs are total");
    format!("{} {} {}", p.state_name(r.next), p.bits_string(r.write), r.mv.symbol())
}

impl Enumeration {
    pub fn new(kind: FamilyKind, max_work: usize) -> Result<Self, EnumerationError> {
        if max_work > MAX_WORK_STATES {
            return Err(EnumerationError::CapExceeded(max_work));
        }
        let alphabet = kind.alphabet();
        let mut groups: Vec<(String, Group)> = (0..=max_work)
            .map(|work| {
                let slots = kind.slots(work);
                let first_reads = slot_first_lines(kind, work);
                let ranked = (0..slots)
                    .map(|s| {
                        let (state, read) = first_reads[s];
                        let mut keyed: Vec<(String, Action)> = alphabet
                            .iter()
                            .map(|&a| {
                                let mut genome = vec![alphabet[0]; slots];
                                genome[s] = a;
                                (first_line(&build(kind, work, &genome), state, read), a)
                            })
                            .collect();
                        keyed.sort();
                        keyed.into_iter().map(|(_, a)| a).collect()
                    })
                    .collect();
                let header = header_text(&build(kind, work, &vec![alphabet[0]; slots]));
                let len = kind.count_exact(work) as usize;
                (header, Group { work, ranked, len })
            })
            .collect();
        groups.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(Enumeration {
            kind,
            max_work,
            groups: groups.into_iter().map(|(_, g)| g).collect(),
            take: None,
        })
    }

    /// Only the first `k` programs.
    pub fn take(mut self, k: usize) -> Self {
        self.take = Some(k.min(self.full_len()));
        self
    }

    fn full_len(&self) -> usize {
        self.groups.iter().map(|g| g.len).sum()
    }

    pub fn len(&self) -> usize {
        self.take.unwrap_or_else(|| self.full_len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn bound(&self) -> EnumerationBound {
        EnumerationBound {
            kind: self.kind,
            max_work: self.max_work,
            len: self.len(),
        }
    }

    /// Work-state count and genome of program `i`.
    pub fn genome(&self, i: usize) -> (usize, Vec<Action>) {
        assert!(i < self.len(), "program index {i} out of range");
        let mut rest = i;
        for g in &self.groups {
            if rest < g.len {
                let base = g.ranked[0].len();
                let mut digits = vec![0usize; g.ranked.len()];
                for d in digits.iter_mut().rev() {
                    *d = rest % base;
                    rest /= base;
                }
                let genome = digits.iter().zip(&g.ranked).map(|(&d, r)| r[d]).collect();
                return (g.work, genome);
            }
            rest -= g.len;
        }
        unreachable!()
    }

    pub fn get(&self, i: usize) -> Program {
        let (work, genome) = self.genome(i);
        build(self.kind, work, &genome)
    }

    pub fn iter(&self) -> impl Iterator<Item = (ProgramId, Program)> + '_ {
        (0..self.len()).map(|i| (ProgramId(i), self.get(i)))
    }

    /// Position of a program in this enumeration.
    pub fn position(&self, p: &Program) -> Option<ProgramId> {
        let text = p.render();
        (0..self.len()).map(ProgramId).find(|id| self.get(id.0).render() == text)
    }
}

/// The (state, read) of the first rule line of each slot.
fn slot_first_lines(kind: FamilyKind, work: usize) -> Vec<(usize, u8)> {
    let p = build(kind, work, &vec![kind.alphabet()[0]; kind.slots(work)]);
    let tracks = kind.tracks();
    let scratch_mask = 1u8 << (tracks - 2);
    let oracle_mask = 1u8;
    let work_first = p.state_count() - work;
    let mut out = match kind {
        FamilyKind::Plain => vec![(0, 0), (0, scratch_mask), (1, 0), (1, scratch_mask)],
        FamilyKind::RealOracle => vec![(0, 0), (0, oracle_mask), (1, 0), (1, scratch_mask)],
        FamilyKind::Query => vec![(0, 0), (1, 0), (4, 0), (5, 0)],
    };
    out.extend((work_first..work_first + work).map(|s| (s, 0)));
    out
}

fn header_text(p: &Program) -> String {
    let text = p.render();
    let end = text.find(" -> ").map(|i| text[..i].rfind('\n').unwrap_or(0)).unwrap_or(text.len());
    text[..end].to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::reference;

    #[test]
    fn zero_work_counts_match_closed_form() {
        let e = enumerate_programs(0, 3).unwrap();
        assert_eq!(e.len(), 4096);
        assert_eq!(enumerate_programs(1, 3).unwrap().len(), 4096 + 32768);
        assert_eq!(enumerate_programs(0, 4).unwrap().len(), 6561);
        assert!(matches!(enumerate_programs(3, 3), Err(EnumerationError::CapExceeded(3))));
    }

    #[test]
    fn order_is_canonical_text_order() {
        for (max_work, tracks) in [(1, 3), (0, 4)] {
            let e = enumerate_programs(max_work, tracks).unwrap();
            let texts: Vec<String> = (0..e.len()).map(|i| e.get(i).render()).collect();
            for w in texts.windows(2) {
                assert!(w[0] < w[1], "not strictly increasing");
            }
        }
        // sampled check across the work-2 group boundary and inside it
        let e = enumerate_programs(2, 3).unwrap();
        let idx: Vec<usize> = (0..e.len()).step_by(997).chain([36863, 36864, 36865]).collect();
        let mut idx = idx;
        idx.sort();
        for w in idx.windows(2) {
            assert!(e.get(w[0]).render() < e.get(w[1]).render());
        }
    }

    #[test]
    fn reference_programs_have_stable_positions() {
        let e = enumerate_programs(0, 3).unwrap();
        let i = e.position(&reference::p_halt()).unwrap();
        assert_eq!(e.get(i.0), reference::p_halt());
        assert_eq!(enumerate_programs(0, 3).unwrap().position(&reference::p_halt()), Some(i));
    }

    #[test]
    fn enumeration_is_deterministic() {
        let a = enumerate_programs(1, 3).unwrap();
        let b = enumerate_programs(1, 3).unwrap();
        for i in (0..a.len()).step_by(101) {
            assert_eq!(a.get(i), b.get(i));
        }
    }
}
