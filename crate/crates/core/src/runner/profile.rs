//! When does a watched cell (or a whole track) stop changing?
//!
//! A block's profile says whether the watched value is constant over the
//! block, settles at a known stage and stays put until the block ends, or
//! changes cofinally often.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::machine::Program;
use crate::oracle::OracleSpec;
use crate::ordinal::Ordinal;
use crate::real::Real;

use super::engine::{LevelNode, LevelOutcome, Node};
use super::exec::Exec;
use super::omega::OmegaNode;
use super::{child_stage, Certificate, Config, ExceedReason, RunResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Watch {
    Cell { track: usize, cell: usize },
    Track(usize),
}

impl Watch {
    fn value(&self, c: &Config) -> Real {
        match *self {
            Watch::Cell { track, cell } => Real::from_bits(&[c.tracks[track].bit(cell)]),
            Watch::Track(t) => c.tracks[t].clone(),
        }
    }

    fn value_exec(&self, e: &Exec<'_>) -> Real {
        match *self {
            Watch::Cell { track, cell } => Real::from_bits(&[e.tapes[track].get(cell)]),
            Watch::Track(t) => e.tapes[t].to_real(),
        }
    }

    fn touches(&self, track_mask: u8, head: usize) -> bool {
        match *self {
            Watch::Cell { track, cell } => track_mask >> track & 1 == 1 && head == cell,
            Watch::Track(t) => track_mask >> t & 1 == 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    Constant(Real),
    /// The last change happens at stage `at`; afterwards the value is `value`.
    Settles { at: Ordinal, value: Real },
    Oscillates,
}

struct Ctx<'a> {
    program: &'a Program,
    oracle: Option<&'a OracleSpec>,
    watch: Watch,
    memo: HashMap<*const Node, Profile>,
}

/// Profile of the whole run, relative to its start at stage 0.
pub fn watch(run: &RunResult, w: Watch) -> Result<Profile, ExceedReason> {
    let mut ctx = Ctx {
        program: &run.program,
        oracle: run.oracle.as_ref(),
        watch: w,
        memo: HashMap::new(),
    };
    node_profile(&mut ctx, &run.root, &Ordinal::zero())
}

fn node_profile(ctx: &mut Ctx<'_>, node: &Node, sigma: &Ordinal) -> Result<Profile, ExceedReason> {
    // memoized relative to the block start; shift the stage on the way out
    let key = node as *const Node;
    let rel = match ctx.memo.get(&key) {
        Some(p) => p.clone(),
        None => {
            let p = match node {
                Node::Omega(o) => omega_profile(ctx, o)?,
                Node::Level(l) => level_profile(ctx, l)?,
            };
            ctx.memo.insert(key, p.clone());
            p
        }
    };
    Ok(match rel {
        Profile::Settles { at, value } => Profile::Settles {
            at: sigma.add(&at),
            value,
        },
        p => p,
    })
}

fn omega_profile(ctx: &mut Ctx<'_>, o: &OmegaNode) -> Result<Profile, ExceedReason> {
    let (horizon, cofinal_from) = match o.cert {
        Certificate::HaltAt(n) => (n, None),
        Certificate::Repeat { mu, pi } => (mu + pi, Some(mu)),
        Certificate::Translation { mu, pi, shift, floor } => match ctx.watch {
            Watch::Track(_) => (mu + pi, Some(mu)),
            Watch::Cell { cell, .. } => {
                let cell = cell as u64;
                let segments = if cell < floor { 1 } else { (cell - floor) / shift + 1 };
                (mu + segments * pi, None)
            }
        },
        Certificate::Exceeded => return Err(o.exceeded.unwrap_or(ExceedReason::StepBudget)),
    };
    let mut exec = Exec::new(ctx.program, ctx.oracle, &o.start);
    let first = ctx.watch.value(&o.start);
    let mut last_change = 0u64;
    for i in 0..horizon {
        let info = exec.step().expect("replaying a certified block");
        if ctx.watch.touches(info.changed, info.head) {
            if cofinal_from.is_some_and(|m| i >= m) {
                return Ok(Profile::Oscillates);
            }
            last_change = i + 1;
        }
    }
    Ok(if last_change == 0 {
        Profile::Constant(first)
    } else {
        Profile::Settles {
            at: Ordinal::finite(last_change),
            value: ctx.watch.value_exec(&exec),
        }
    })
}

fn level_profile(ctx: &mut Ctx<'_>, l: &LevelNode) -> Result<Profile, ExceedReason> {
    let zero = Ordinal::zero();
    let stage = |j: usize| child_stage(&zero, l.level, j);
    let n = l.children.len();
    let (target, mut settle, mut b) = match &l.outcome {
        LevelOutcome::Cycle { first } | LevelOutcome::StrongLoop { first } => {
            let mut v: Option<Real> = None;
            for j in *first..n {
                match node_profile(ctx, &l.children[j], &stage(j))? {
                    Profile::Constant(u) => match &v {
                        None => v = Some(u),
                        Some(w) if *w == u => {}
                        Some(_) => return Ok(Profile::Oscillates),
                    },
                    _ => return Ok(Profile::Oscillates),
                }
            }
            (v.expect("nonempty cycle"), stage(*first), *first)
        }
        LevelOutcome::Halted | LevelOutcome::InnerLoop => {
            let j = n - 1;
            match node_profile(ctx, &l.children[j], &stage(j))? {
                Profile::Constant(u) => (u, stage(j), j),
                p => return Ok(p),
            }
        }
        LevelOutcome::Exceeded(r) => return Err(*r),
    };
    while b > 0 {
        let j = b - 1;
        match node_profile(ctx, &l.children[j], &stage(j))? {
            Profile::Constant(u) if u == target => {
                settle = stage(j);
                b = j;
            }
            Profile::Settles { at, value } if value == target => {
                settle = at;
                break;
            }
            _ => break,
        }
    }
    Ok(if settle.is_zero() {
        Profile::Constant(target)
    } else {
        Profile::Settles { at: settle, value: target }
    })
}
