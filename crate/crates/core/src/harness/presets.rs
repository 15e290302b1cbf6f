use crate::channel::{ChannelParams, Point2};
use crate::error::{Error, Result};
use crate::estimator::GridSpec;
use crate::planner::{HeadingMode, PlannerKind};

use super::config::HistoryFim;

use super::config::ScenarioConfig;

/// Names accepted by [`preset`].
pub const PRESET_NAMES: [&str; 4] = [
    "single_optimistic",
    "single_realistic",
    "favorable_4uav",
    "realistic_4uav",
];

/// Upper-bound shadowing deviations (dB) for the ITU-R line-of-sight
/// environments, usable as sweep values.
pub const ITU_SIGMA_PRESETS: [(&str, f64); 4] = [
    ("urban_micro", 3.0),
    ("urban_macro", 4.0),
    ("suburban_macro", 6.0),
    ("rural_macro", 6.0),
];

pub fn itu_sigma_db(name: &str) -> Option<f64> {
    ITU_SIGMA_PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|&(_, v)| v)
}

const P0_DBM: f64 = 10.0;
const BETA: f64 = 3.0;
const STEP_M: f64 = 5.0;
const GRID_HALF_WIDTH_M: f64 = 150.0;
const GRID_RESOLUTION_M: f64 = 1.0;
const ANGLE_STEP_DEG: f64 = 5.0;
const RUNS: usize = 100;
const MASTER_SEED: u64 = 20220915;

fn base(
    name: &str,
    sigma_db: f64,
    uav_starts: Vec<Point2<f64>>,
    horizon: usize,
    grid_center: Point2<f64>,
) -> ScenarioConfig {
    ScenarioConfig {
        name: name.to_string(),
        channel: ChannelParams::new(P0_DBM, BETA, 1.0, sigma_db).expect("preset channel"),
        uav_starts,
        target: Point2::origin(),
        step_m: STEP_M,
        horizon,
        planner: PlannerKind::Greedy,
        grid: GridSpec::centered(grid_center, GRID_HALF_WIDTH_M, GRID_RESOLUTION_M)
            .expect("preset grid"),
        angle_step_deg: ANGLE_STEP_DEG,
        d_min_m: 1.0,
        runs: RUNS,
        master_seed: MASTER_SEED,
        heading_mode: HeadingMode::PerUav,
        history_fim: HistoryFim::CurrentEstimate,
    }
}

/// Bundled scenario by name.
pub fn preset(name: &str) -> Result<ScenarioConfig> {
    let single_start = Point2::new(0.0, 100.0);
    let config = match name {
        // Single-UAV grid: 300 m square centred on the UAV start.
        "single_optimistic" => base(name, 0.01, vec![single_start], 15, single_start),
        "single_realistic" => base(name, 6.0, vec![single_start], 15, single_start),
        "favorable_4uav" => base(
            name,
            6.0,
            vec![
                Point2::new(100.0, 100.0),
                Point2::new(-100.0, 100.0),
                Point2::new(-100.0, -100.0),
                Point2::new(100.0, -100.0),
            ],
            27,
            Point2::origin(),
        ),
        "realistic_4uav" => ScenarioConfig {
            planner: PlannerKind::Hybrid {
                switch_epoch: PlannerKind::DEFAULT_SWITCH_EPOCH,
            },
            ..base(
                name,
                6.0,
                vec![Point2::new(-100.0, -100.0); 4],
                27,
                Point2::origin(),
            )
        },
        other => {
            return Err(Error::Config(format!(
                "unknown preset {other:?}; available: {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    config.validate()?;
    Ok(config)
}
