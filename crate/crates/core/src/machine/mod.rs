//! Program model and the `.itm` text format.
//!
//! ```text
//! # comments start with '#'
//! tracks: 3
//! start: s0
//! limit: s0
//! halt: halt
//! states: w1          # optional extra work states
//! s0 000 -> halt 001 S
//! ```
//!
//! Read and write vectors list one bit per track, input track first.

pub mod family;
mod parse;
pub mod reference;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use crate::real::Real;
pub use parse::{parse_program, parse_unvalidated};

pub const INPUT: usize = 0;
pub const SCRATCH: usize = 1;
pub const OUTPUT: usize = 2;
pub const ORACLE: usize = 3;

pub type StateId = usize;

/// Position of a program in a fixed enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ProgramId(pub usize);

impl fmt::Display for ProgramId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    L,
    R,
    S,
}

impl Move {
    pub fn symbol(self) -> char {
        match self {
            Move::L => 'L',
            Move::R => 'R',
            Move::S => 'S',
        }
    }

    pub fn apply(self, head: usize) -> usize {
        match self {
            Move::L => head.saturating_sub(1),
            Move::R => head + 1,
            Move::S => head,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rule {
    /// Bit `t` of the vector (track 0 most significant) is written to track `t`.
    pub write: u8,
    pub mv: Move,
    pub next: StateId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QueryStates {
    pub query: StateId,
    pub yes: StateId,
    pub no: StateId,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("tracks must be 3 or 4, found {0}")]
    TrackCount(usize),
    #[error("halt has outgoing rule")]
    HaltHasRule,
    #[error("query state has outgoing rule")]
    QueryHasRule,
    #[error("limit state equals halt state")]
    LimitIsHalt,
    #[error("start state equals halt state")]
    StartIsHalt,
    #[error("query protocol incomplete")]
    QueryProtocolIncomplete,
    #[error("query protocol needs 4 tracks")]
    QueryNeedsOracleTrack,
    #[error("query/yes/no must be distinct from start, limit and halt and from each other")]
    QueryStatesClash,
    #[error("missing rules: {}", .0.iter().map(|(s, r)| format!("{s} {r}")).collect::<Vec<_>>().join(", "))]
    MissingRules(Vec<(String, String)>),
}

/// A finite ITTM program over 3 tracks (input, scratch, output) or 4 (plus oracle).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Program {
    pub(crate) states: Vec<String>,
    pub(crate) tracks: usize,
    pub(crate) start: StateId,
    pub(crate) limit: StateId,
    pub(crate) halt: StateId,
    pub(crate) query: Option<QueryStates>,
    /// Declared but incomplete query roles, kept so validation can report them.
    pub(crate) partial_query: bool,
    pub(crate) rules: Vec<Option<Rule>>,
}

impl Program {
    pub fn tracks(&self) -> usize {
        self.tracks
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|n| n == name)
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn limit(&self) -> StateId {
        self.limit
    }

    pub fn halt(&self) -> StateId {
        self.halt
    }

    pub fn query_states(&self) -> Option<QueryStates> {
        self.query
    }

    pub fn reads_per_state(&self) -> usize {
        1 << self.tracks
    }

    pub fn rule(&self, state: StateId, read: u8) -> Option<&Rule> {
        self.rules[state * self.reads_per_state() + read as usize].as_ref()
    }

    pub(crate) fn set_rule(&mut self, state: StateId, read: u8, rule: Rule) {
        let n = self.reads_per_state();
        self.rules[state * n + read as usize] = Some(rule);
    }

    pub fn bits_string(&self, v: u8) -> String {
        (0..self.tracks)
            .map(|t| if v >> (self.tracks - 1 - t) & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    /// All invariant violations; empty when the program is valid.
    pub fn violations(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        if !(3..=4).contains(&self.tracks) {
            v.push(Violation::TrackCount(self.tracks));
            return v;
        }
        if self.start == self.halt {
            v.push(Violation::StartIsHalt);
        }
        if self.limit == self.halt {
            v.push(Violation::LimitIsHalt);
        }
        if (0..self.reads_per_state()).any(|r| self.rule(self.halt, r as u8).is_some()) {
            v.push(Violation::HaltHasRule);
        }
        if self.partial_query {
            v.push(Violation::QueryProtocolIncomplete);
        }
        if let Some(q) = self.query {
            if self.tracks != 4 {
                v.push(Violation::QueryNeedsOracleTrack);
            }
            let roles = [q.query, q.yes, q.no];
            let clash = roles
                .iter()
                .any(|&s| s == self.start || s == self.limit || s == self.halt)
                || q.query == q.yes
                || q.query == q.no
                || q.yes == q.no;
            if clash {
                v.push(Violation::QueryStatesClash);
            }
            if (0..self.reads_per_state()).any(|r| self.rule(q.query, r as u8).is_some()) {
                v.push(Violation::QueryHasRule);
            }
        }
        let missing = self.missing_rules();
        if !missing.is_empty() {
            v.push(Violation::MissingRules(missing));
        }
        v
    }

    fn missing_rules(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for s in 0..self.states.len() {
            if s == self.halt || self.query.is_some_and(|q| q.query == s) {
                continue;
            }
            for r in 0..self.reads_per_state() {
                if self.rule(s, r as u8).is_none() {
                    out.push((self.states[s].clone(), self.bits_string(r as u8)));
                }
            }
        }
        out
    }

    /// Canonical text; `parse_program(p.render()) == p` for valid programs.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("tracks: {}\n", self.tracks));
        out.push_str(&format!("start: {}\n", self.states[self.start]));
        out.push_str(&format!("limit: {}\n", self.states[self.limit]));
        out.push_str(&format!("halt: {}\n", self.states[self.halt]));
        if let Some(q) = self.query {
            out.push_str(&format!("query: {}\n", self.states[q.query]));
            out.push_str(&format!("yes: {}\n", self.states[q.yes]));
            out.push_str(&format!("no: {}\n", self.states[q.no]));
        }
        let extra: Vec<&str> = (0..self.states.len())
            .filter(|&s| !self.is_role(s))
            .map(|s| self.states[s].as_str())
            .collect();
        if !extra.is_empty() {
            out.push_str(&format!("states: {}\n", extra.join(" ")));
        }
        for s in 0..self.states.len() {
            for r in 0..self.reads_per_state() {
                if let Some(rule) = self.rule(s, r as u8) {
                    out.push_str(&format!(
                        "{} {} -> {} {} {}\n",
                        self.states[s],
                        self.bits_string(r as u8),
                        self.states[rule.next],
                        self.bits_string(rule.write),
                        rule.mv.symbol()
                    ));
                }
            }
        }
        out
    }

    fn is_role(&self, s: StateId) -> bool {
        s == self.start
            || s == self.limit
            || s == self.halt
            || self
                .query
                .is_some_and(|q| s == q.query || s == q.yes || s == q.no)
    }
}

/// Ok iff every program invariant holds.
pub fn validate(p: &Program) -> Result<(), Vec<Violation>> {
    let v = p.violations();
    if v.is_empty() {
        Ok(())
    } else {
        Err(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_programs_are_valid() {
        for p in [
            reference::p_halt(),
            reference::p_flip(),
            reference::p_flip_lh(),
            reference::p_sweep(),
        ] {
            assert_eq!(validate(&p), Ok(()));
        }
    }

    #[test]
    fn halt_with_rule_is_reported() {
        let mut text = reference::p_halt().render();
        text.push_str("halt 000 -> halt 000 S\n");
        let p = parse_unvalidated(&text).unwrap();
        let v = validate(&p).unwrap_err();
        assert!(v.iter().any(|x| x.to_string() == "halt has outgoing rule"));
    }

    #[test]
    fn partial_query_protocol_is_reported() {
        let text = "tracks: 4\nstart: s\nlimit: s\nhalt: h\nquery: q\n";
        let p = parse_unvalidated(text).unwrap();
        let v = validate(&p).unwrap_err();
        assert!(v.iter().any(|x| x.to_string() == "query protocol incomplete"));
    }

    #[test]
    fn move_left_at_edge_stays() {
        assert_eq!(Move::L.apply(0), 0);
        assert_eq!(Move::L.apply(3), 2);
        assert_eq!(Move::R.apply(0), 1);
    }
}
