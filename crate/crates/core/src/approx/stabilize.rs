use serde::{Deserialize, Serialize};

use crate::machine::{Program, OUTPUT};
use crate::ordinal::Ordinal;
use crate::real::Real;
use crate::runner::profile::{watch, Profile, Watch};
use crate::runner::{run_transfinite, BudgetPolicy, ExceedReason, RunError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stabilization {
    /// Constant from this stage on, through the budget horizon.
    Stage(Ordinal),
    /// Changes cofinally often.
    Unstable,
    Exceeded(ExceedReason),
}

fn settle(p: Profile) -> (Option<Real>, Stabilization) {
    match p {
        Profile::Constant(v) => (Some(v), Stabilization::Stage(Ordinal::zero())),
        Profile::Settles { at, value } => (Some(value), Stabilization::Stage(at)),
        Profile::Oscillates => (None, Stabilization::Unstable),
    }
}

/// When cell `index` of `track` stops changing on the all-zero input.
pub fn stabilization_stage(
    p: &Program,
    track: usize,
    index: usize,
    budget: &BudgetPolicy,
) -> Result<Stabilization, RunError> {
    if track >= p.tracks() {
        return Err(RunError::Precondition(format!("no track {track}")));
    }
    let run = run_transfinite(p, &Real::zero(), budget, None)?;
    Ok(match watch(&run, Watch::Cell { track, cell: index }) {
        Ok(prof) => settle(prof).1,
        Err(r) => Stabilization::Exceeded(r),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventualWrite {
    Written { value: Real, stage: Ordinal },
    Unstable,
    Exceeded(ExceedReason),
}

impl EventualWrite {
    pub fn written(&self) -> Option<(&Real, &Ordinal)> {
        match self {
            EventualWrite::Written { value, stage } => Some((value, stage)),
            _ => None,
        }
    }
}

/// The output track's final content, if it stops changing.
pub fn eventually_written(p: &Program, budget: &BudgetPolicy) -> Result<EventualWrite, RunError> {
    let run = run_transfinite(p, &Real::zero(), budget, None)?;
    Ok(match watch(&run, Watch::Track(OUTPUT)) {
        Ok(prof) => match settle(prof) {
            (Some(value), Stabilization::Stage(stage)) => EventualWrite::Written { value, stage },
            _ => EventualWrite::Unstable,
        },
        Err(r) => EventualWrite::Exceeded(r),
    })
}
