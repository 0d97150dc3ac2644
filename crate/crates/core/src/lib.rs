//! Infinite time Turing machines: programs, a certified transfinite runner,
//! oracles and jumps, approximation of the jump by stabilization, and a
//! finite-injury construction.

pub mod machine;
pub mod ordinal;
pub mod real;
pub mod oracle;
pub mod runner;
pub mod approx;
pub mod fm;
pub mod cli;
