//! Scenario orchestration: configuration, bundled presets, the simulation
//! loop, Monte-Carlo aggregation and report files.

mod config;
mod presets;
mod report;
mod sim;

pub use config::{HistoryFim, ScenarioConfig, ScenarioFile, SCENARIO_FORMAT_VERSION};
pub use presets::{itu_sigma_db, preset, ITU_SIGMA_PRESETS, PRESET_NAMES};
pub use report::{
    parse_metrics_csv, read_run_results, write_comparison_csv, write_metrics_csv, write_run_results,
};
pub use sim::{
    aggregate, compare_planners, heading_change_profile, run_batch, run_monte_carlo, run_single,
    Comparison, EpochMetrics, EpochRecord, RunResult,
};
