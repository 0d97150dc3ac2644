//! Approximating jumps from below: stage-wise appearances, stabilization,
//! halting streams and iterated jumps along coded well-orders.

mod appear;
mod matrix;
mod stabilize;
mod stream;

#[cfg(test)]
mod tests;

pub use appear::{diagonal, diagonalize_appearances, universal_run, AppearanceLog, AppearanceRecord};
pub use matrix::{
    check_erasures, iterated_matrix, limit_join, ErasureCause, JumpMatrix, MatrixCheck, MatrixEvent,
    MatrixRow, RowKind,
};
pub use stabilize::{eventually_written, stabilization_stage, EventualWrite, Stabilization};
pub use stream::{approximate_jump, ApproximationStream};

use thiserror::Error;

use crate::ordinal::{Ordinal, OrdinalError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApproxError {
    #[error("appearance log is only complete below {complete_below}, wanted {wanted}")]
    Truncated { complete_below: Ordinal, wanted: Ordinal },
    #[error(transparent)]
    Ordinal(#[from] OrdinalError),
    #[error("the coded order is empty")]
    EmptyOrder,
}
