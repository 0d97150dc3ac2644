use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use std::collections::HashSet;

use crate::machine::ProgramId;
use crate::oracle::{OracleSpec, ProgramSource};
use crate::ordinal::Ordinal;
use crate::real::Real;
use crate::runner::{run_transfinite, BudgetPolicy};

use super::ApproxError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppearanceRecord {
    pub stage: Ordinal,
    pub program: ProgramId,
    pub track: usize,
    pub digest: u64,
    pub real: Real,
}

/// Track contents seen while dovetailing a set of programs, in stage order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppearanceLog {
    /// Per program, the first stage at which each real shows up there.
    pub records: Vec<AppearanceRecord>,
    /// Index into `records` of the earliest record of each distinct real,
    /// in order of first appearance.
    pub first_appearance: Vec<usize>,
    /// Stages from here on may be missing reals; `None` means complete.
    pub incomplete_from: Option<Ordinal>,
    /// Set when the distinct-real cap cut the log.
    pub truncated: bool,
}

fn min_stage(a: Option<Ordinal>, b: Option<Ordinal>) -> Option<Ordinal> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl AppearanceLog {
    /// Merges per-program first appearances into one log.
    pub fn from_runs(
        mut per_program: Vec<(ProgramId, Vec<(Ordinal, usize, Real)>, Option<Ordinal>)>,
        cap: usize,
    ) -> Self {
        per_program.sort_by_key(|(p, _, _)| *p);
        let mut incomplete = None;
        let mut records: Vec<AppearanceRecord> = Vec::new();
        for (p, recs, inc) in per_program {
            incomplete = min_stage(incomplete, inc);
            records.extend(recs.into_iter().map(|(stage, track, real)| AppearanceRecord {
                digest: real.digest(),
                stage,
                program: p,
                track,
                real,
            }));
        }
        records.sort_by(|a, b| {
            (&a.stage, a.program, a.track).cmp(&(&b.stage, b.program, b.track))
        });
        let mut seen = HashSet::new();
        let mut first = Vec::new();
        let mut truncated = false;
        let mut keep = records.len();
        for (i, r) in records.iter().enumerate() {
            if seen.contains(&r.real) {
                continue;
            }
            if seen.len() >= cap {
                truncated = true;
                incomplete = min_stage(incomplete, Some(r.stage.clone()));
                keep = i;
                break;
            }
            seen.insert(r.real.clone());
            first.push(i);
        }
        records.truncate(keep);
        AppearanceLog {
            records,
            first_appearance: first,
            incomplete_from: incomplete,
            truncated,
        }
    }

    /// Distinct reals first appearing below `upto`, in order of first appearance.
    pub fn distinct_below(&self, upto: &Ordinal) -> Result<Vec<Real>, ApproxError> {
        if let Some(s) = self.incomplete_from.as_ref().filter(|s| *s < upto) {
            return Err(ApproxError::Truncated {
                complete_below: s.clone(),
                wanted: upto.clone(),
            });
        }
        Ok(self
            .first_appearance
            .iter()
            .map(|&i| &self.records[i])
            .take_while(|r| &r.stage < upto)
            .map(|r| r.real.clone())
            .collect())
    }

    /// The stage of the first record of `r`, if any.
    pub fn first_stage_of(&self, r: &Real) -> Option<&Ordinal> {
        self.first_appearance
            .iter()
            .map(|&i| &self.records[i])
            .find(|x| &x.real == r)
            .map(|x| &x.stage)
    }
}

const EMPTY_SET_TRIM: usize = 64;

/// Dovetails every program on the all-zero input and logs each new track
/// content with the stage where it first shows up. Query programs ask the
/// empty set.
pub fn universal_run(programs: &ProgramSource, budget: &BudgetPolicy) -> AppearanceLog {
    let cap = budget.appearance_cap;
    let per: Vec<_> = (0..programs.len())
        .into_par_iter()
        .map(|i| {
            let p = programs.get(i);
            let oracle = p.query_states().is_some().then(|| OracleSpec::empty_set(EMPTY_SET_TRIM));
            match run_transfinite(&p, &Real::zero(), budget, oracle.as_ref()) {
                Ok(r) => {
                    let a = r.appearances(cap);
                    (ProgramId(i), a.records, a.incomplete_from)
                }
                Err(_) => (ProgramId(i), Vec::new(), Some(Ordinal::zero())),
            }
        })
        .collect();
    AppearanceLog::from_runs(per, cap)
}

/// A real that differs from the `k`-th real of `reals` at bit `k`, zero elsewhere.
pub fn diagonal(reals: &[Real]) -> Real {
    let bits: Vec<bool> = reals.iter().enumerate().map(|(k, r)| !r.bit(k)).collect();
    let d = Real::from_bits(&bits);
    assert!(!reals.contains(&d), "diagonal real must avoid its inputs");
    d
}

/// Diagonalizes against every real first appearing below `upto_stage`.
pub fn diagonalize_appearances(log: &AppearanceLog, upto_stage: &Ordinal) -> Result<Real, ApproxError> {
    Ok(diagonal(&log.distinct_below(upto_stage)?))
}
