//! Certificate search inside one ω-block.

use std::collections::HashMap;

use crate::machine::StateId;
use crate::real::Real;

use super::exec::{zobrist, Exec, StepInfo};
use super::tape::Tape;
use super::{Certificate, Config, ExceedReason, RunError};

/// Candidate translation partners are looked up among this many recent
/// head-record events.
const RECORD_WINDOW: usize = 12;

#[derive(Debug, Clone)]
pub(crate) struct OmegaNode {
    pub start: Config,
    pub cert: Certificate,
    /// Cells that are 1 at some step of the block, including the start.
    pub ever_one: Vec<Real>,
    /// The ω-limit, or the halting configuration.
    pub end: Option<Config>,
    pub queries: Vec<(u64, Real, bool)>,
    /// Steps actually simulated.
    pub simulated: u64,
    pub exceeded: Option<ExceedReason>,
}

pub(crate) fn run_omega(
    exec0: Exec<'_>,
    start: &Config,
    max_steps: u64,
) -> Result<OmegaNode, RunError> {
    let mut exec = exec0;
    let halt = exec.program.halt();
    let limit_state = exec.program.limit();
    let mut ever = exec.tapes.clone();
    let mut log: Vec<StepInfo> = Vec::new();
    let mut queries = Vec::new();
    let mut zob = 0u64;
    let mut seen: HashMap<(StateId, usize, u64), u64> = HashMap::new();
    seen.insert((exec.state, exec.head, 0), 0);
    let mut records: Vec<(u64, usize, StateId)> = vec![(0, exec.head, exec.state)];
    let mut max_head = exec.head;

    let finish = |cert, ever: &[Tape], end, queries, simulated, exceeded| OmegaNode {
        start: start.clone(),
        cert,
        ever_one: ever.iter().map(Tape::to_real).collect(),
        end,
        queries,
        simulated,
        exceeded,
    };

    for t in 0..max_steps {
        let info = exec.step()?;
        for tr in 0..exec.tapes.len() {
            if info.changed >> tr & 1 == 1 {
                zob ^= zobrist(tr, info.head);
            }
            if info.set_ones >> tr & 1 == 1 {
                ever[tr].set(info.head, true);
            }
        }
        if let Some((q, a)) = &info.query {
            queries.push((t, q.clone(), *a));
        }
        log.push(info);
        let n = t + 1;
        if exec.state == halt {
            let end = exec.config();
            return Ok(finish(Certificate::HaltAt(n), &ever, Some(end), queries, n, None));
        }

        let key = (exec.state, exec.head, zob);
        if let Some(&m) = seen.get(&key) {
            let past = rewind(&exec, &log, m);
            if past.config() == exec.config() {
                let union = cycle_union(&past, &log[m as usize..]);
                let limit = Config {
                    state: limit_state,
                    head: 0,
                    tracks: union.iter().map(Tape::to_real).collect(),
                };
                let cert = Certificate::Repeat { mu: m, pi: n - m };
                return Ok(finish(cert, &ever, Some(limit), queries, n, None));
            }
        } else {
            seen.insert(key, n);
        }

        if exec.head > max_head {
            max_head = exec.head;
            let from = records.len().saturating_sub(RECORD_WINDOW);
            for &(m, h, s) in records[from..].iter().rev() {
                if s != exec.state {
                    continue;
                }
                if let Some((cert, limit, extra)) = try_translation(&exec, &log, m, h) {
                    let ever: Vec<Tape> = ever
                        .iter()
                        .zip(&extra)
                        .map(|(e, x)| Tape::from_real(&e.to_real().or(x)))
                        .collect();
                    return Ok(finish(cert, &ever, Some(limit), queries, n, None));
                }
            }
            records.push((n, exec.head, exec.state));
        }
    }
    Ok(finish(
        Certificate::Exceeded,
        &ever,
        None,
        queries,
        max_steps,
        Some(ExceedReason::StepBudget),
    ))
}

/// The machine as it was after `m` steps.
fn rewind<'a>(exec: &Exec<'a>, log: &[StepInfo], m: u64) -> Exec<'a> {
    let mut past = exec.clone();
    for info in log[m as usize..].iter().rev() {
        past.undo(info);
    }
    past
}

/// Every cell that is 1 at some step of the segment starting at `from`.
fn cycle_union(from: &Exec<'_>, segment: &[StepInfo]) -> Vec<Tape> {
    let mut u = from.tapes.clone();
    for info in segment {
        for (t, tape) in u.iter_mut().enumerate() {
            if info.set_ones >> t & 1 == 1 {
                tape.set(info.head, true);
            }
        }
    }
    u
}

/// Checks whether the segment from step `m` (head `h`) to now repeats forever,
/// shifted right each time. Returns the certificate, the ω-limit and the cells
/// that become 1 in later repetitions.
fn try_translation(
    exec: &Exec<'_>,
    log: &[StepInfo],
    m: u64,
    h: usize,
) -> Option<(Certificate, Config, Vec<Real>)> {
    let seg = &log[m as usize..];
    if seg.iter().any(|i| i.bumped || i.query.is_some()) {
        return None;
    }
    let d = exec.head.checked_sub(h).filter(|&d| d >= 1)?;
    let floor = seg.iter().map(|i| i.head).min().unwrap_or(h).min(exec.head);
    let past = rewind(exec, log, m);
    if past.state != exec.state || past.head != h {
        return None;
    }
    for (s, t) in past.tapes.iter().zip(&exec.tapes) {
        let span = s.explicit_len().max(t.explicit_len()) + s.period();
        if (floor..span).any(|i| t.get(i + d) != s.get(i)) {
            return None;
        }
    }

    let limit_tracks = past
        .tapes
        .iter()
        .zip(&exec.tapes)
        .map(|(s, t)| {
            let prefix = (0..floor).map(|i| s.get(i)).collect();
            let tail = (floor..floor + d).map(|i| t.get(i)).collect();
            Real::new(prefix, tail)
        })
        .collect();
    let limit = Config {
        state: exec.program.limit(),
        head: 0,
        tracks: limit_tracks,
    };

    // later repetitions write the first repetition's ones shifted by multiples of d
    let u = cycle_union(&past, seg);
    let extra = u
        .iter()
        .map(|ut| {
            let n = ut.explicit_len() + ut.period() + 2 * d + floor;
            let mut v = vec![false; n + d];
            for c in floor..n + d {
                v[c] = ut.get(c) || (c >= floor + d && v[c - d]);
            }
            Real::new(v[..n].to_vec(), v[n..n + d].to_vec())
        })
        .collect();
    let cert = Certificate::Translation {
        mu: m,
        pi: log.len() as u64 - m,
        shift: d as u64,
        floor: floor as u64,
    };
    Some((cert, limit, extra))
}
