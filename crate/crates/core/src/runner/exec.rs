use crate::machine::{Move, Program, StateId, ORACLE};
use crate::oracle::OracleSpec;
use crate::real::Real;

use super::tape::Tape;
use super::{Config, RunError};

/// What one successor step did, enough to undo it.
#[derive(Debug, Clone)]
pub(crate) struct StepInfo {
    pub state: StateId,
    pub head: usize,
    /// Tracks whose cell under the head flipped (bit `t` for track `t`).
    pub changed: u8,
    /// Tracks whose cell flipped to 1.
    pub set_ones: u8,
    /// A left move was attempted at cell 0.
    pub bumped: bool,
    pub query: Option<(Real, bool)>,
}

#[derive(Clone)]
pub(crate) struct Exec<'a> {
    pub program: &'a Program,
    pub oracle: Option<&'a OracleSpec>,
    pub state: StateId,
    pub head: usize,
    pub tapes: Vec<Tape>,
    oracle_read_only: bool,
}

impl<'a> Exec<'a> {
    pub fn new(program: &'a Program, oracle: Option<&'a OracleSpec>, c: &Config) -> Self {
        Exec {
            program,
            oracle,
            state: c.state,
            head: c.head,
            tapes: c.tracks.iter().map(Tape::from_real).collect(),
            oracle_read_only: matches!(oracle, Some(OracleSpec::Real(_))),
        }
    }

    pub fn config(&self) -> Config {
        Config {
            state: self.state,
            head: self.head,
            tracks: self.tapes.iter().map(Tape::to_real).collect(),
        }
    }

    pub fn read(&self) -> u8 {
        let n = self.tapes.len();
        self.tapes
            .iter()
            .enumerate()
            .fold(0u8, |v, (t, tape)| v | (tape.get(self.head) as u8) << (n - 1 - t))
    }

    pub fn is_halted(&self) -> bool {
        self.state == self.program.halt()
    }

    pub fn step(&mut self) -> Result<StepInfo, RunError> {
        let p = self.program;
        if self.state == p.halt() {
            return Err(RunError::StepFromHalt);
        }
        let mut info = StepInfo {
            state: self.state,
            head: self.head,
            changed: 0,
            set_ones: 0,
            bumped: false,
            query: None,
        };
        if let Some(q) = p.query_states().filter(|q| q.query == self.state) {
            let set = self
                .oracle
                .and_then(OracleSpec::as_set)
                .ok_or(RunError::ProtocolMismatch)?;
            let asked = set.canonical_query(&self.tapes[ORACLE].to_real());
            let yes = set.members.contains(&asked);
            self.state = if yes { q.yes } else { q.no };
            info.query = Some((asked, yes));
            return Ok(info);
        }
        let read = self.read();
        let rule = *p
            .rule(self.state, read)
            .expect("validated programs have a rule for every non-halting state");
        let n = self.tapes.len();
        for t in 0..n {
            if t == ORACLE && self.oracle_read_only {
                continue;
            }
            let b = rule.write >> (n - 1 - t) & 1 == 1;
            if self.tapes[t].get(self.head) != b {
                self.tapes[t].set(self.head, b);
                info.changed |= 1 << t;
                if b {
                    info.set_ones |= 1 << t;
                }
            }
        }
        info.bumped = rule.mv == Move::L && self.head == 0;
        self.head = rule.mv.apply(self.head);
        self.state = rule.next;
        Ok(info)
    }

    pub fn undo(&mut self, info: &StepInfo) {
        for t in 0..self.tapes.len() {
            if info.changed >> t & 1 == 1 {
                let b = self.tapes[t].get(info.head);
                self.tapes[t].set(info.head, !b);
            }
        }
        self.state = info.state;
        self.head = info.head;
    }
}

/// Zobrist key of one cell.
#[inline]
pub(crate) fn zobrist(track: usize, cell: usize) -> u64 {
    let mut z = ((cell as u64) << 3 | track as u64).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
