//! The measure → estimate → plan → move loop and Monte-Carlo batches.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{distance, noise_stream, sample_rss, Measurement, Point2};
use crate::error::{Error, Result};
use crate::estimator::ObjectiveSurface;
use crate::fisher::{crlb, fim_epoch, FimMatrix};
use crate::planner::{candidate_position, plan_step, PlannerKind, PlannerState};

use super::config::{HistoryFim, ScenarioConfig};

/// State of one run at one estimate epoch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// UAV positions at which this epoch's measurements were taken.
    pub uav_positions: Vec<Point2<f64>>,
    pub r_hat: Point2<f64>,
    pub error_m: f64,
    /// Determinant of the information accumulated through this epoch, each
    /// epoch's share evaluated at the estimate made in that epoch.
    pub det_fim: f64,
    /// Trace of the bound, absent when the information matrix is singular.
    pub crlb_trace_m2: Option<f64>,
    /// Headings flown after this epoch; empty at the final epoch.
    pub headings_deg: Vec<f64>,
}

/// Everything produced by one simulated search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub run_index: usize,
    pub planner: PlannerKind,
    /// `horizon + 1` records, one per estimate.
    pub epochs: Vec<EpochRecord>,
    pub measurements: Vec<Measurement<f64>>,
}

impl RunResult {
    /// Waypoints of one UAV, `horizon + 1` long.
    pub fn trajectory(&self, uav: usize) -> Vec<Point2<f64>> {
        self.epochs.iter().map(|e| e.uav_positions[uav]).collect()
    }

    pub fn final_error_m(&self) -> f64 {
        self.epochs.last().map_or(f64::NAN, |e| e.error_m)
    }
}

/// Monte-Carlo aggregate for one epoch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub rmse_m: f64,
    pub mean_det_fim: f64,
    pub mean_crlb_trace_m2: Option<f64>,
}

fn ensure_finite(p: Point2<f64>, what: &str) -> Result<()> {
    if p.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(format!("{what}: ({}, {})", p.x, p.y)))
    }
}

/// Simulates one search with the noise streams of `run_index`.
///
/// Each epoch all UAVs measure, the estimate is recomputed from every
/// measurement so far, then (before the final epoch) headings are planned
/// and every UAV advances one step.
pub fn run_single(config: &ScenarioConfig, run_index: usize) -> Result<RunResult> {
    config.validate()?;
    let ch = &config.channel;
    let d_min = config.d_min_m;
    let n_uav = config.uav_starts.len();

    let mut positions = config.uav_starts.clone();
    let mut surface = ObjectiveSurface::new(config.grid)?;
    let mut measurements = Vec::with_capacity(n_uav * (config.horizon + 1));
    let mut history_flat: Vec<Point2<f64>> = Vec::with_capacity(n_uav * (config.horizon + 1));
    let mut accumulated = FimMatrix::zero();
    let mut last_headings: Option<Vec<f64>> = None;
    let mut epochs = Vec::with_capacity(config.horizon + 1);

    for t in 0..=config.horizon {
        for (m, &pos) in positions.iter().enumerate() {
            let mut rng = noise_stream(config.master_seed, run_index as u64, m as u64, t as u64);
            let meas = sample_rss(pos, config.target, ch, &mut rng, d_min, m, t);
            if !meas.rss_dbm.is_finite() {
                return Err(Error::NonFinite(format!("rss at epoch {t}, uav {m}")));
            }
            surface.add(&meas, ch, d_min);
            measurements.push(meas);
        }
        let r_hat = surface.argmin()?;
        ensure_finite(r_hat, "estimate")?;
        history_flat.extend_from_slice(&positions);

        // The recorded track sums each epoch's information at the estimate of
        // that epoch, so it never decreases; planning may re-evaluate it.
        accumulated += fim_epoch(&positions, r_hat, ch, d_min)?;
        let det_fim = accumulated.det();
        let crlb_trace_m2 = crlb(&accumulated).map(|c| c.trace());

        let headings = if t < config.horizon {
            let state = PlannerState {
                epoch: t,
                horizon: config.horizon,
                step_m: config.step_m,
                angle_step_deg: config.angle_step_deg,
                uav_positions: positions.clone(),
                accumulated_fim: match config.history_fim {
                    HistoryFim::Frozen => accumulated,
                    HistoryFim::CurrentEstimate => fim_epoch(&history_flat, r_hat, ch, d_min)?,
                },
                r_hat,
                last_headings_deg: last_headings.clone(),
                heading_mode: config.heading_mode,
            };
            plan_step(config.planner, &state, ch, d_min)?
        } else {
            Vec::new()
        };

        epochs.push(EpochRecord {
            epoch: t,
            uav_positions: positions.clone(),
            r_hat,
            error_m: distance(r_hat, config.target),
            det_fim,
            crlb_trace_m2,
            headings_deg: headings.clone(),
        });

        if t < config.horizon {
            for (p, &h) in positions.iter_mut().zip(&headings) {
                *p = candidate_position(*p, h, 1, config.step_m);
                ensure_finite(*p, "waypoint")?;
            }
            last_headings = Some(headings);
        }
    }

    Ok(RunResult {
        run_index,
        planner: config.planner,
        epochs,
        measurements,
    })
}

/// All `config.runs` runs, ordered by run index.
pub fn run_batch(config: &ScenarioConfig) -> Result<Vec<RunResult>> {
    config.validate()?;
    (0..config.runs)
        .into_par_iter()
        .map(|i| run_single(config, i))
        .collect()
}

/// Per-epoch aggregates over a batch.
///
/// Sums are taken in run-index order, so the result does not depend on how
/// the runs were scheduled.
pub fn aggregate(runs: &[RunResult]) -> Result<Vec<EpochMetrics>> {
    let first = runs.first().ok_or(Error::Empty("runs"))?;
    let n_epochs = first.epochs.len();
    if runs.iter().any(|r| r.epochs.len() != n_epochs) {
        return Err(Error::Config(
            "runs disagree on the number of epochs".into(),
        ));
    }
    let count = runs.len() as f64;
    let metrics = (0..n_epochs)
        .map(|t| {
            let mut sq = 0.0;
            let mut det = 0.0;
            let mut trace = 0.0;
            let mut invertible = 0usize;
            for r in runs {
                let e = &r.epochs[t];
                sq += e.error_m * e.error_m;
                det += e.det_fim;
                if let Some(tr) = e.crlb_trace_m2 {
                    trace += tr;
                    invertible += 1;
                }
            }
            EpochMetrics {
                epoch: first.epochs[t].epoch,
                rmse_m: (sq / count).sqrt(),
                mean_det_fim: det / count,
                mean_crlb_trace_m2: (invertible > 0).then(|| trace / invertible as f64),
            }
        })
        .collect();
    Ok(metrics)
}

/// Runs the configured batch and aggregates it.
pub fn run_monte_carlo(config: &ScenarioConfig) -> Result<Vec<EpochMetrics>> {
    aggregate(&run_batch(config)?)
}

/// Several planners evaluated on the same noise realisations.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub planners: Vec<PlannerKind>,
    pub metrics: Vec<Vec<EpochMetrics>>,
    pub runs: Vec<Vec<RunResult>>,
}

impl Comparison {
    /// Final-epoch RMSE per planner.
    pub fn final_rmse(&self) -> Vec<f64> {
        self.metrics
            .iter()
            .map(|m| m.last().map_or(f64::NAN, |e| e.rmse_m))
            .collect()
    }

    /// Relative improvement of planner `a` over planner `b` at the final epoch.
    pub fn improvement(&self, a: usize, b: usize) -> f64 {
        let f = self.final_rmse();
        (f[b] - f[a]) / f[b]
    }
}

/// Runs every planner on `config` with identical seeds.
pub fn compare_planners(config: &ScenarioConfig, kinds: &[PlannerKind]) -> Result<Comparison> {
    if kinds.len() < 2 {
        return Err(Error::Config(
            "comparison needs at least two planners".into(),
        ));
    }
    let mut metrics = Vec::with_capacity(kinds.len());
    let mut runs = Vec::with_capacity(kinds.len());
    for &kind in kinds {
        let batch = run_batch(&config.with_planner(kind))?;
        metrics.push(aggregate(&batch)?);
        runs.push(batch);
    }
    Ok(Comparison {
        planners: kinds.to_vec(),
        metrics,
        runs,
    })
}

fn wrap_deg(d: f64) -> f64 {
    (d + 180.0).rem_euclid(360.0) - 180.0
}

/// Mean absolute heading change between consecutive moves.
///
/// Entry `t` (for `t >= 1`) averages `|h_t - h_{t-1}|`, wrapped to
/// `[-180, 180)`, over runs and UAVs; entry 0 is zero.
pub fn heading_change_profile(runs: &[RunResult]) -> Vec<f64> {
    let Some(first) = runs.first() else {
        return Vec::new();
    };
    let moves = first.epochs.len().saturating_sub(1);
    let mut profile = vec![0.0; moves];
    for (t, slot) in profile.iter_mut().enumerate().skip(1) {
        let mut sum = 0.0;
        let mut n = 0usize;
        for r in runs {
            let (prev, cur) = (&r.epochs[t - 1].headings_deg, &r.epochs[t].headings_deg);
            for (a, b) in prev.iter().zip(cur) {
                sum += wrap_deg(b - a).abs();
                n += 1;
            }
        }
        *slot = if n > 0 { sum / n as f64 } else { 0.0 };
    }
    profile
}
