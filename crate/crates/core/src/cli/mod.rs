//! Scenario I/O, the built-in five-region scenario, and the command
//! implementations behind the `epigame` binary.

pub mod commands;
pub mod format;
pub mod scenario;

pub use commands::{
    check_conditions, simulate, solve, sweep, sweep_csv, sweep_metadata, to_json, RunOptions, SolveReport,
    SweepResultRow, SWEEP_HEADER,
};
pub use format::{fmt_profile, fmt_sig, trajectory_csv};
pub use scenario::{
    emit_scenario, load_scenario, parse_scenario, table1, CrossRates, FixedCrossRates, FixedMode, Scenario,
    ScenarioFile, SweepPlan,
};
