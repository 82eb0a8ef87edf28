//! Library side of the `persuade` command-line tool.

pub mod commands;
pub mod figures;
pub mod scenario_file;
pub mod sweep;

pub use commands::{Report, Status, WitnessKind};
pub use scenario_file::{InputError, ScenarioSpec};
