//! Seeded inputs, an independent composition oracle and the scripted verification
//! scenarios behind the `germcalc` command-line tool.

pub mod error;
pub mod oracle;
pub mod random;
pub mod scenarios;

pub use error::HarnessError;
pub use random::{generate_random_jet, SeededTails, HEURISTIC_NOTICE};
pub use scenarios::{run_scenario, scenario_names, Check, Options, Report};
