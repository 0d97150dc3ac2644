//! JSON-lines traces: one record per block, in stage order.

use serde::Serialize;

use crate::ordinal::Ordinal;
use crate::real::Real;

use super::engine::{LevelOutcome, Node};
use super::{child_stage, Certificate, Config, RunResult, Snapshot};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceRecord {
    pub schema: u32,
    pub kind: &'static str,
    pub level: u32,
    pub stage: Ordinal,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<String>,
    /// Indices of the recurring child blocks, for level records.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycle: Option<(usize, usize)>,
    pub start_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub end_digest: Option<String>,
    /// Per track, the cells that are 1 somewhere in the block but not at its start.
    pub ever_one_delta: Vec<Real>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<Snapshot>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub end: Option<Snapshot>,
}

fn hex(d: u64) -> String {
    format!("{d:016x}")
}

/// Calls `f(node, stage)` for every block the run passes through, parents
/// before children, children in stage order. A recurring cycle is visited once.
pub(crate) fn visit<'n>(node: &'n Node, sigma: &Ordinal, f: &mut impl FnMut(&'n Node, &Ordinal)) {
    f(node, sigma);
    if let Node::Level(l) = node {
        for (j, c) in l.children.iter().enumerate() {
            visit(c, &child_stage(sigma, l.level, j), f);
        }
    }
}

fn record(node: &Node, sigma: &Ordinal, full: bool) -> TraceRecord {
    let start = node.start();
    let delta = node
        .ever_one()
        .iter()
        .zip(&start.tracks)
        .map(|(e, s)| e.zip_with(s, |a, b| a && !b))
        .collect();
    let (kind, certificate, outcome, cycle, end, end_stage): (
        _,
        _,
        _,
        _,
        Option<&Config>,
        Option<Ordinal>,
    ) = match node {
        Node::Omega(o) => {
            let end_stage = match o.cert {
                Certificate::HaltAt(n) => Some(sigma.add_finite(n)),
                Certificate::Exceeded => None,
                _ => sigma.limit_step(1).ok(),
            };
            ("omega", Some(o.cert), None, None, o.end.as_ref(), end_stage)
        }
        Node::Level(l) => {
            let n = l.children.len();
            let (name, cycle) = match &l.outcome {
                LevelOutcome::Cycle { first } => ("cycle".to_string(), Some((*first, n))),
                LevelOutcome::StrongLoop { first } => ("strong-loop".to_string(), Some((*first, n))),
                LevelOutcome::InnerLoop => ("inner-loop".to_string(), None),
                LevelOutcome::Halted => ("halted".to_string(), None),
                LevelOutcome::Exceeded(r) => (format!("exceeded-{r}"), None),
            };
            let end_stage = l.limit.as_ref().and_then(|_| sigma.limit_step(l.level).ok());
            ("level", None, Some(name), cycle, l.limit.as_ref(), end_stage)
        }
    };
    TraceRecord {
        schema: SCHEMA,
        kind,
        level: node.level(),
        stage: sigma.clone(),
        certificate,
        outcome,
        cycle,
        start_digest: hex(start.digest()),
        end_digest: end.map(|c| hex(c.digest())),
        ever_one_delta: delta,
        start: full.then(|| Snapshot::at(start.clone(), sigma.clone())),
        end: match (full, end, end_stage) {
            (true, Some(c), Some(s)) => Some(Snapshot::at(c.clone(), s)),
            _ => None,
        },
    }
}

impl RunResult {
    /// Every block of the run.
    pub fn trace(&self, full_snapshots: bool) -> Vec<TraceRecord> {
        let mut out = Vec::new();
        visit(&self.root, &Ordinal::zero(), &mut |n, s| {
            out.push(record(n, s, full_snapshots))
        });
        out
    }

    /// The trace as JSON lines, each terminated by a newline.
    pub fn trace_jsonl(&self, full_snapshots: bool) -> String {
        self.trace(full_snapshots)
            .iter()
            .map(|r| serde_json::to_string(r).expect("trace records serialize") + "\n")
            .collect()
    }

    /// Every oracle query, in stage order, with its answer.
    pub fn queries(&self) -> Vec<(Ordinal, Real, bool)> {
        let mut out = Vec::new();
        visit(&self.root, &Ordinal::zero(), &mut |n, s| {
            if let Node::Omega(o) = n {
                for (t, q, a) in &o.queries {
                    out.push((s.add_finite(*t), q.clone(), *a));
                }
            }
        });
        out
    }

    /// ω-block summaries in stage order.
    pub fn blocks(&self) -> Vec<super::BlockSummary> {
        let mut out = Vec::new();
        visit(&self.root, &Ordinal::zero(), &mut |n, s| {
            if let Node::Omega(o) = n {
                let (limit, halted) = match o.cert {
                    Certificate::HaltAt(k) => (None, o.end.clone().map(|c| Snapshot::at(c, s.add_finite(k)))),
                    _ => (
                        o.end.clone().and_then(|c| Some(Snapshot::at(c, s.limit_step(1).ok()?))),
                        None,
                    ),
                };
                out.push(super::BlockSummary {
                    start: Snapshot::at(o.start.clone(), s.clone()),
                    certificate: o.cert,
                    ever_one: o.ever_one.clone(),
                    limit,
                    halted,
                });
            }
        });
        out
    }
}
