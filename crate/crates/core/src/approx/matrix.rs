//! Iterated jumps along a coded well-order, approximated with erasures.
//!
//! Row 0 is all zero. A successor row holds the programs that have halted
//! relative to the row below, counted from the stage that row was last
//! restarted. A limit row is the join of the rows below it. Whenever a row
//! changes, every row above it is erased and restarted at that stage.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::machine::ProgramId;
use crate::oracle::{jump_lightface, OracleSpec, ProgramSource};
use crate::ordinal::{decode_prefix, ordinal_of_index, pair_index, unpair, OrderCode, Ordinal};
use crate::real::Real;
use crate::runner::BudgetPolicy;

use super::ApproxError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErasureCause {
    LowerRowChange,
    LimitOfErasures,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum MatrixEvent {
    /// Programs newly halted in a successor row.
    RowChange {
        stage: Ordinal,
        row: Ordinal,
        added: Vec<ProgramId>,
    },
    Erasure {
        stage: Ordinal,
        row: Ordinal,
        cause: ErasureCause,
    },
}

impl MatrixEvent {
    pub fn stage(&self) -> &Ordinal {
        match self {
            MatrixEvent::RowChange { stage, .. } | MatrixEvent::Erasure { stage, .. } => stage,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowKind {
    Zero,
    Successor,
    Limit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixRow {
    pub rank: Ordinal,
    pub kind: RowKind,
    pub value: Real,
    pub members: BTreeSet<ProgramId>,
    /// Last stage at which the row changed or was erased.
    pub stabilized_at: Ordinal,
    pub restarts: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JumpMatrix {
    pub code: OrderCode,
    pub rows: Vec<MatrixRow>,
    pub log: Vec<MatrixEvent>,
    /// Limit rows are materialized on this many bits, then zero.
    pub horizon: usize,
    pub bound: usize,
    pub budget: BudgetPolicy,
    /// The restart cap stopped the construction early.
    pub partial: bool,
}

/// Outcome of the end-of-construction checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixCheck {
    pub row_zero: bool,
    /// Log entries that are not justified by the log itself.
    pub unjustified_erasures: Vec<usize>,
    /// Successor rows that differ from an independent rerun of the jump.
    pub bad_successor_rows: Vec<Ordinal>,
    pub bad_limit_rows: Vec<Ordinal>,
}

impl MatrixCheck {
    pub fn ok(&self) -> bool {
        self.row_zero
            && self.unjustified_erasures.is_empty()
            && self.bad_successor_rows.is_empty()
            && self.bad_limit_rows.is_empty()
    }
}

/// Naturals of the code's field visible in its prefix, with their ranks.
fn visible_field(y: &OrderCode) -> Vec<(u64, Ordinal)> {
    decode_prefix(y.prefix())
        .field
        .iter()
        .map(|&n| (n, ordinal_of_index(n)))
        .collect()
}

fn predecessor(r: &Ordinal) -> Ordinal {
    let mut terms: Vec<(u32, u64)> = r.terms().iter().map(|t| (t.exponent, t.coefficient)).collect();
    let last = terms.last_mut().expect("successor rank");
    last.1 -= 1;
    Ordinal::from_terms(terms)
}

/// Join of lower rows at a limit rank: bit `pair_index(n, k)` is bit `k` of
/// the row for `ord(n)`, for visible `n` below the limit.
pub fn limit_join(
    rank: &Ordinal,
    field: &[(u64, Ordinal)],
    value_of: impl Fn(&Ordinal) -> Real,
    horizon: usize,
) -> Real {
    let lower: HashMap<u64, Real> = field
        .iter()
        .filter(|(_, o)| o < rank)
        .map(|(n, o)| (*n, value_of(o)))
        .collect();
    let bits: Vec<bool> = (0..horizon as u64)
        .map(|k| {
            let (n, j) = unpair(k);
            lower.get(&n).is_some_and(|r| r.bit(j as usize))
        })
        .collect();
    Real::from_bits(&bits)
}

type Events = Arc<Vec<(Ordinal, ProgramId)>>;

struct Builder<'a> {
    programs: &'a ProgramSource,
    budget: BudgetPolicy,
    cache: HashMap<Real, Events>,
}

impl Builder<'_> {
    fn events(&mut self, oracle: &Real) -> Events {
        if let Some(e) = self.cache.get(oracle) {
            return e.clone();
        }
        let j = jump_lightface(self.programs, Some(&OracleSpec::Real(oracle.clone())), &self.budget);
        let e: Events = Arc::new(j.halted.into_iter().map(|(p, t)| (t, p)).collect());
        self.cache.insert(oracle.clone(), e.clone());
        e
    }
}

pub fn iterated_matrix(
    y: &OrderCode,
    programs: &ProgramSource,
    budget: &BudgetPolicy,
) -> Result<JumpMatrix, ApproxError> {
    let alpha = y.ordinal.clone().check_below(budget.depth)?;
    if alpha.is_zero() {
        return Err(ApproxError::EmptyOrder);
    }
    let field = visible_field(y);
    let ranks: BTreeSet<Ordinal> = field.iter().map(|(_, o)| o.clone()).collect();
    let horizon = y.materialized_prefix_len();
    let mut rows: Vec<MatrixRow> = ranks
        .into_iter()
        .map(|rank| MatrixRow {
            kind: if rank.is_zero() {
                RowKind::Zero
            } else if rank.is_successor() {
                RowKind::Successor
            } else {
                RowKind::Limit
            },
            rank,
            value: Real::zero(),
            members: BTreeSet::new(),
            stabilized_at: Ordinal::zero(),
            restarts: 0,
        })
        .collect();
    let index_of_rank: HashMap<Ordinal, usize> =
        rows.iter().enumerate().map(|(i, r)| (r.rank.clone(), i)).collect();
    let pred: Vec<Option<usize>> = rows
        .iter()
        .map(|r| (r.kind == RowKind::Successor).then(|| index_of_rank[&predecessor(&r.rank)]))
        .collect();

    let mut b = Builder {
        programs,
        budget: *budget,
        cache: HashMap::new(),
    };
    let mut pending: BTreeSet<(Ordinal, usize, ProgramId)> = BTreeSet::new();
    let mut log = Vec::new();
    // a row restarts once per change below it, so the cap grows with the height
    let max_restarts = budget.per_level_budget as usize * rows.len();
    let mut partial = false;

    // bring rows `from..` up to date at `stage`, lower rows first
    let mut rebuild = |rows: &mut Vec<MatrixRow>,
                       pending: &mut BTreeSet<(Ordinal, usize, ProgramId)>,
                       from: usize,
                       stage: &Ordinal|
     -> bool {
        for s in from..rows.len() {
            match rows[s].kind {
                RowKind::Zero => {}
                RowKind::Limit => {
                    let rank = rows[s].rank.clone();
                    let snapshot: HashMap<Ordinal, Real> =
                        rows[..s].iter().map(|r| (r.rank.clone(), r.value.clone())).collect();
                    rows[s].value = limit_join(&rank, &field, |o| snapshot[o].clone(), horizon);
                }
                RowKind::Successor => {
                    if rows[s].restarts >= max_restarts {
                        return false;
                    }
                    rows[s].restarts += 1;
                    let oracle = rows[pred[s].expect("successor row")].value.clone();
                    for (t, p) in b.events(&oracle).iter() {
                        pending.insert((stage.add(t), s, *p));
                    }
                }
            }
        }
        true
    };

    if !rebuild(&mut rows, &mut pending, 0, &Ordinal::zero()) {
        partial = true;
    }
    while !partial {
        let Some((stage, r, _)) = pending.first().cloned() else { break };
        let mut added = Vec::new();
        while let Some(e) = pending.first().filter(|e| e.0 == stage && e.1 == r).cloned() {
            pending.remove(&e);
            added.push(e.2);
        }
        let row = &mut rows[r];
        row.members.extend(added.iter().copied());
        row.value = Real::characteristic(row.members.iter().map(|p| p.0));
        row.stabilized_at = stage.clone();
        log.push(MatrixEvent::RowChange {
            stage: stage.clone(),
            row: row.rank.clone(),
            added,
        });
        pending.retain(|e| e.1 <= r);
        for s in r + 1..rows.len() {
            let row = &mut rows[s];
            row.members.clear();
            row.value = Real::zero();
            row.stabilized_at = stage.clone();
            log.push(MatrixEvent::Erasure {
                stage: stage.clone(),
                row: row.rank.clone(),
                cause: ErasureCause::LowerRowChange,
            });
        }
        if !rebuild(&mut rows, &mut pending, r + 1, &stage) {
            partial = true;
        }
    }

    Ok(JumpMatrix {
        code: y.clone(),
        rows,
        log,
        horizon,
        bound: programs.len(),
        budget: *budget,
        partial,
    })
}

/// Whether `stage` is the supremum of `earlier`, all of which lie below it.
fn is_limit_of(stage: &Ordinal, earlier: &[&Ordinal]) -> bool {
    if !stage.is_limit() || earlier.is_empty() || earlier.iter().any(|s| *s >= stage) {
        return false;
    }
    // a finite set of stages has a largest element, which is then its supremum
    earlier.iter().max().is_some_and(|m| *m == stage)
}

/// Indices of log entries not justified by the log itself.
pub fn check_erasures(log: &[MatrixEvent]) -> Vec<usize> {
    let mut bad = Vec::new();
    for (i, e) in log.iter().enumerate() {
        let MatrixEvent::Erasure { stage, row, cause } = e else { continue };
        let ok = match cause {
            ErasureCause::LowerRowChange => log.iter().any(|x| {
                matches!(x, MatrixEvent::RowChange { stage: s, row: r, .. } if s == stage && r < row)
            }),
            ErasureCause::LimitOfErasures => {
                let earlier: Vec<&Ordinal> = log[..i]
                    .iter()
                    .filter_map(|x| match x {
                        MatrixEvent::Erasure { stage: s, row: r, .. } if r == row => Some(s),
                        _ => None,
                    })
                    .collect();
                is_limit_of(stage, &earlier)
            }
        };
        if !ok {
            bad.push(i);
        }
    }
    bad
}

impl JumpMatrix {
    pub fn row(&self, rank: &Ordinal) -> Option<&MatrixRow> {
        self.rows.iter().find(|r| &r.rank == rank)
    }

    /// Re-checks every invariant from scratch, rerunning each successor jump.
    pub fn check(&self, programs: &ProgramSource) -> MatrixCheck {
        let field = visible_field(&self.code);
        let value = |o: &Ordinal| self.row(o).map(|r| r.value.clone()).unwrap_or_else(Real::zero);
        let mut bad_successor_rows = Vec::new();
        let mut bad_limit_rows = Vec::new();
        for r in &self.rows {
            match r.kind {
                RowKind::Zero => {}
                RowKind::Successor => {
                    let below = value(&predecessor(&r.rank));
                    let j = jump_lightface(programs, Some(&OracleSpec::Real(below)), &self.budget);
                    let halted: BTreeSet<ProgramId> = j.halted.iter().map(|(p, _)| *p).collect();
                    if halted != r.members || r.value != Real::characteristic(halted.iter().map(|p| p.0)) {
                        bad_successor_rows.push(r.rank.clone());
                    }
                }
                RowKind::Limit => {
                    if r.value != limit_join(&r.rank, &field, value, self.horizon) {
                        bad_limit_rows.push(r.rank.clone());
                    }
                }
            }
        }
        MatrixCheck {
            row_zero: self.rows.first().is_some_and(|r| r.rank.is_zero() && r.value.is_zero()),
            unjustified_erasures: check_erasures(&self.log),
            bad_successor_rows,
            bad_limit_rows,
        }
    }

    /// Bit `pair_index(n, k)` of the limit row at `rank`, read straight from
    /// the row of `ord(n)`.
    pub fn join_bit(&self, n: u64, k: u64) -> bool {
        let _ = pair_index(n, k);
        self.row(&ordinal_of_index(n)).is_some_and(|r| r.value.bit(k as usize))
    }
}
