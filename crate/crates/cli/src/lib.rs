//! Problem files, engine dispatch and the benchmark harness behind the
//! `minksum` binary.

pub mod bench;
pub mod error;
pub mod number;
pub mod problem;
pub mod run;
pub mod sequence;

pub use error::CliError;
pub use problem::{EngineKind, Mode, ProblemFile, QueryKind};
pub use run::{run_problem, run_sequence, run_sequence_file, Options, Report, SequenceQuery, Witness};
