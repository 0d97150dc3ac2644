//! Oracles, relativized runs, program enumeration and jumps.

mod enumerate;
mod jump;
mod spec;

pub use enumerate::{enumerate_programs, Enumeration, EnumerationBound, EnumerationError, MAX_WORK_STATES};
pub use jump::{
    jump_boldface, jump_lightface, run_with_oracle, BoldfaceResult, JumpResult, ProgramSource,
    QueryEntry, QueryLog,
};
pub use spec::{OracleSpec, SetOracle};

#[cfg(test)]
mod tests;
