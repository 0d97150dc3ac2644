use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::real::Real;

/// What a program may consult.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleSpec {
    /// A real placed read-only on track 3 before the run starts.
    Real(Real),
    /// A set of reals queried through the query protocol.
    Set(SetOracle),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetOracle {
    pub members: BTreeSet<Real>,
    /// Query reals whose canonical form needs more bits than this are cut to
    /// their first `trim_bits` bits followed by zeros.
    pub trim_bits: usize,
}

impl SetOracle {
    pub fn new(members: impl IntoIterator<Item = Real>, trim_bits: usize) -> Self {
        SetOracle {
            members: members.into_iter().collect(),
            trim_bits,
        }
    }

    pub fn canonical_query(&self, r: &Real) -> Real {
        if r.prefix().len() + r.period() <= self.trim_bits {
            r.clone()
        } else {
            r.truncate(self.trim_bits)
        }
    }

    pub fn answer(&self, r: &Real) -> bool {
        self.members.contains(&self.canonical_query(r))
    }
}

impl OracleSpec {
    pub fn empty_set(trim_bits: usize) -> Self {
        OracleSpec::Set(SetOracle::new([], trim_bits))
    }

    pub fn as_real(&self) -> Option<&Real> {
        match self {
            OracleSpec::Real(r) => Some(r),
            OracleSpec::Set(_) => None,
        }
    }

    pub fn as_set(&self) -> Option<&SetOracle> {
        match self {
            OracleSpec::Set(s) => Some(s),
            OracleSpec::Real(_) => None,
        }
    }
}
