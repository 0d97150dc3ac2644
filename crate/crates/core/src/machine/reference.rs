//! Small hand-checked programs used by tests, examples and the CLI.

use super::family::{build, Action, FamilyKind};
use super::Program;

use Action::*;

/// Halts at step 1 with output `1(0)*`.
pub fn p_halt() -> Program {
    build(FamilyKind::Plain, 0, &[Halt(true), Stay(true), Stay(false), Stay(true)])
}

/// Flips scratch cell 0 forever; the limit state behaves like start.
pub fn p_flip() -> Program {
    build(FamilyKind::Plain, 0, &[Stay(true), Stay(false), Stay(true), Stay(false)])
}

/// Like [`p_flip`], but the limit state halts when it reads scratch 1.
pub fn p_flip_lh() -> Program {
    build(FamilyKind::Plain, 0, &[Stay(true), Stay(false), Stay(true), Halt(false)])
}

/// Sets every scratch cell to 1 while moving right; everything else self-loops.
pub fn p_sweep() -> Program {
    build(FamilyKind::Plain, 0, &[Sweep(true), Stay(true), Stay(false), Stay(true)])
}

/// Four-track query-family program that halts at once with all-zero output,
/// whatever the oracle.
pub fn zero_halter() -> Program {
    build(FamilyKind::Query, 0, &[Halt(false), Halt(false), Halt(false), Halt(false)])
}

/// Four-track query-family program that halts at once with output `1(0)*`.
pub fn one_halter() -> Program {
    build(FamilyKind::Query, 0, &[Halt(true), Halt(true), Halt(true), Halt(true)])
}

/// Four-track query-family program that never halts.
pub fn query_looper() -> Program {
    build(FamilyKind::Query, 0, &[Stay(false), Stay(false), Stay(false), Stay(false)])
}

/// Copies its input onto the oracle track during the first ω steps, asks
/// whether that real is in the oracle set at the limit, then halts with
/// output 0 on `yes` and 1 on `no`.
pub fn input_asker() -> Program {
    build(FamilyKind::Query, 0, &[Sweep(false), Ask, Halt(false), Halt(true)])
}
