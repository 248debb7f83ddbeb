//! Library half of the `sbfix` command-line tool: problem files, JSON-lines
//! output and the subcommand drivers.

pub mod commands;
pub mod demo;
pub mod jsonl;
pub mod points;
pub mod problem;

pub use commands::{CheckOptions, EXIT_FAIL, EXIT_OK, EXIT_USAGE};
pub use problem::{Overrides, Problem, ProblemError, ProblemFile};
