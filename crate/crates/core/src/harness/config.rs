use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelParams, Point2};
use crate::error::{Error, Result};
use crate::estimator::GridSpec;
use crate::planner::{reach_ability, HeadingMode, PlannerKind};

/// Point at which past measurements' information is evaluated for planning.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HistoryFim {
    /// Every past measurement is re-evaluated at the newest estimate.
    #[default]
    CurrentEstimate,
    /// Each epoch's information stays at the estimate available when it was taken.
    Frozen,
}

/// Version written to and required from scenario files.
pub const SCENARIO_FORMAT_VERSION: u32 = 1;

/// Complete description of one experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub channel: ChannelParams<f64>,
    pub uav_starts: Vec<Point2<f64>>,
    pub target: Point2<f64>,
    pub step_m: f64,
    pub horizon: usize,
    pub planner: PlannerKind,
    pub grid: GridSpec<f64>,
    pub angle_step_deg: f64,
    pub d_min_m: f64,
    pub runs: usize,
    pub master_seed: u64,
    pub heading_mode: HeadingMode,
    pub history_fim: HistoryFim,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.channel.validate()?;
        self.grid.validate()?;
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.horizon == 0 {
            return Err(Error::Config("horizon must be at least 1".into()));
        }
        if self.uav_starts.is_empty() {
            return Err(Error::Config("at least one UAV start is required".into()));
        }
        if self.uav_starts.iter().any(|p| !p.is_finite()) || !self.target.is_finite() {
            return Err(Error::Config("positions must be finite".into()));
        }
        if !self.grid.contains(self.target) {
            return Err(Error::Config("target lies outside the search grid".into()));
        }
        if !(self.step_m > 0.0 && self.step_m.is_finite()) {
            return Err(Error::Config("step_m must be positive".into()));
        }
        if !(self.angle_step_deg > 0.0 && self.angle_step_deg <= 360.0) {
            return Err(Error::Config("angle_step_deg must be in (0, 360]".into()));
        }
        if !(self.d_min_m > 0.0 && self.d_min_m.is_finite()) {
            return Err(Error::Config("d_min_m must be positive".into()));
        }
        self.planner
            .validate(self.horizon)
            .map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    pub fn reach_ability(&self) -> f64 {
        reach_ability(&self.uav_starts, self.target, self.horizon, self.step_m)
    }

    pub fn with_planner(&self, planner: PlannerKind) -> Self {
        Self {
            planner,
            ..self.clone()
        }
    }

    /// Reads a scenario file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_toml()?)?;
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let file: ScenarioFile =
            toml::from_str(text).map_err(|e| Error::Config(format!("scenario file: {e}")))?;
        file.try_into()
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(&ScenarioFile::from(self)).map_err(|e| Error::Config(e.to_string()))
    }
}

/// On-disk scenario layout: flat keys, coordinate pairs as two-element arrays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub format_version: u32,
    #[serde(default)]
    pub name: String,
    pub p0_dbm: f64,
    pub beta: f64,
    #[serde(default = "one")]
    pub d0_m: f64,
    pub sigma_db: f64,
    pub uav_starts: Vec<[f64; 2]>,
    pub target: [f64; 2],
    pub step_m: f64,
    pub horizon: usize,
    pub planner: PlannerKind,
    pub grid_x_min: f64,
    pub grid_x_max: f64,
    pub grid_y_min: f64,
    pub grid_y_max: f64,
    pub grid_resolution: f64,
    #[serde(default = "five")]
    pub angle_step_deg: f64,
    #[serde(default = "one")]
    pub d_min_m: f64,
    pub runs: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub heading_mode: HeadingMode,
    #[serde(default)]
    pub history_fim: HistoryFim,
}

fn one() -> f64 {
    1.0
}

fn five() -> f64 {
    5.0
}

impl From<&ScenarioConfig> for ScenarioFile {
    fn from(c: &ScenarioConfig) -> Self {
        Self {
            format_version: SCENARIO_FORMAT_VERSION,
            name: c.name.clone(),
            p0_dbm: c.channel.p0_dbm,
            beta: c.channel.beta,
            d0_m: c.channel.d0_m,
            sigma_db: c.channel.sigma_db,
            uav_starts: c.uav_starts.iter().map(|&p| p.into()).collect(),
            target: c.target.into(),
            step_m: c.step_m,
            horizon: c.horizon,
            planner: c.planner,
            grid_x_min: c.grid.x_min,
            grid_x_max: c.grid.x_max,
            grid_y_min: c.grid.y_min,
            grid_y_max: c.grid.y_max,
            grid_resolution: c.grid.resolution,
            angle_step_deg: c.angle_step_deg,
            d_min_m: c.d_min_m,
            runs: c.runs,
            master_seed: c.master_seed,
            heading_mode: c.heading_mode,
            history_fim: c.history_fim,
        }
    }
}

impl TryFrom<ScenarioFile> for ScenarioConfig {
    type Error = Error;

    fn try_from(f: ScenarioFile) -> Result<Self> {
        if f.format_version != SCENARIO_FORMAT_VERSION {
            return Err(Error::Config(format!(
                "unsupported format_version {} (expected {SCENARIO_FORMAT_VERSION})",
                f.format_version
            )));
        }
        let config = ScenarioConfig {
            name: f.name,
            channel: ChannelParams::new(f.p0_dbm, f.beta, f.d0_m, f.sigma_db)
                .map_err(|e| Error::Config(e.to_string()))?,
            uav_starts: f.uav_starts.into_iter().map(Point2::from).collect(),
            target: f.target.into(),
            step_m: f.step_m,
            horizon: f.horizon,
            planner: f.planner,
            grid: GridSpec::new(
                f.grid_x_min,
                f.grid_x_max,
                f.grid_y_min,
                f.grid_y_max,
                f.grid_resolution,
            )
            .map_err(|e| Error::Config(e.to_string()))?,
            angle_step_deg: f.angle_step_deg,
            d_min_m: f.d_min_m,
            runs: f.runs,
            master_seed: f.master_seed,
            heading_mode: f.heading_mode,
            history_fim: f.history_fim,
        };
        config.validate()?;
        Ok(config)
    }
}
