//! Reals that appear on some track during a run.

use std::collections::HashSet;

use crate::ordinal::Ordinal;
use crate::real::Real;

use super::engine::Node;
use super::exec::Exec;
use super::trace::visit;
use super::{Certificate, ExceedReason, Outcome, RunResult};

/// First appearances of track contents within one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunAppearances {
    /// (stage, track, real), each real listed once, at its first stage.
    pub records: Vec<(Ordinal, usize, Real)>,
    /// Stage from which the list may miss reals; `None` if it is complete.
    pub incomplete_from: Option<Ordinal>,
}

impl RunResult {
    /// Every distinct real on any track, up to `cap` reals.
    ///
    /// Blocks that end in a translation whose period changes some cell keep
    /// producing new contents after the certified segment; those stages are
    /// marked incomplete.
    pub fn appearances(&self, cap: usize) -> RunAppearances {
        let mut seen: HashSet<Real> = HashSet::new();
        let mut records = Vec::new();
        let mut incomplete: Option<Ordinal> = None;
        let mut last_end = Ordinal::zero();
        let program = &self.program;
        let oracle = self.oracle.as_ref();

        let mut note = |stage: &Ordinal, t: usize, r: Real, incomplete: &mut Option<Ordinal>| {
            if incomplete.as_ref().is_some_and(|s| s <= stage) {
                return;
            }
            if seen.contains(&r) {
                return;
            }
            if seen.len() >= cap {
                *incomplete = Some(stage.clone());
                return;
            }
            seen.insert(r.clone());
            records.push((stage.clone(), t, r));
        };

        visit(&self.root, &Ordinal::zero(), &mut |node, sigma| {
            let Node::Omega(o) = node else { return };
            last_end = sigma.limit_step(1).unwrap_or_else(|_| sigma.clone());
            if incomplete.as_ref().is_some_and(|s| s <= sigma) {
                return;
            }
            for (t, r) in o.start.tracks.iter().enumerate() {
                note(sigma, t, r.clone(), &mut incomplete);
            }
            let (steps, mut open, quiet_from) = match o.cert {
                Certificate::HaltAt(n) => (n, false, None),
                Certificate::Repeat { mu, pi } => (mu + pi, false, None),
                Certificate::Translation { mu, pi, .. } => (mu + pi, false, Some(mu)),
                Certificate::Exceeded => (o.simulated, true, None),
            };
            let mut exec = Exec::new(program, oracle, &o.start);
            for i in 0..steps {
                let info = exec.step().expect("replaying a recorded block");
                // a translated period that writes nothing keeps writing nothing
                if quiet_from.is_some_and(|mu| i >= mu) && info.changed != 0 {
                    open = true;
                }
                let stage = sigma.add_finite(i + 1);
                for t in 0..exec.tapes.len() {
                    if info.changed >> t & 1 == 1 {
                        note(&stage, t, exec.tapes[t].to_real(), &mut incomplete);
                    }
                }
            }
            if open {
                let from = sigma.add_finite(steps + 1);
                if incomplete.as_ref().is_none_or(|s| &from < s) {
                    incomplete = Some(from);
                }
            }
        });
        // a run cut short by its budget may write more after the last visited block
        if matches!(
            self.outcome,
            Outcome::Exceeded {
                reason: ExceedReason::StepBudget | ExceedReason::BlockBudget
            }
        ) && incomplete.as_ref().is_none_or(|s| &last_end < s)
        {
            incomplete = Some(last_end);
        }
        RunAppearances {
            records,
            incomplete_from: incomplete,
        }
    }
}
