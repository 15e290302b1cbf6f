//! Simulator for locating a radio emitter from UAV-borne received signal
//! strength measurements, with Fisher-information-driven trajectory planning.
//!
//! The numeric modules ([`channel`], [`fisher`], [`estimator`], [`planner`])
//! are generic over the floating-point type through [`Scalar`]; the
//! [`harness`] that runs scenarios, Monte-Carlo batches and file I/O works in
//! `f64`. Concrete aliases for both precisions are exported below.

// `!(a > b)` is used on purpose so that NaN lands on the rejecting side.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod estimator;
pub mod fisher;
pub mod harness;
pub mod planner;
pub mod scalar;

pub use channel::{
    distance, expected_rss, noise_stream, sample_rss, ChannelParams, Measurement, Point2,
};
pub use error::{Error, Result};
pub use estimator::{mle_grid_search, residual_objective, GridSpec, ObjectiveSurface};
pub use fisher::{
    crlb, d_optimality, fim_accumulate, fim_epoch, fim_scale, Covariance2, FimMatrix,
    CONDITION_FLOOR, SINGULAR_DET,
};
pub use planner::{
    candidate_position, greedy_direction, plan_step, predictive_direction, reach_ability,
    HeadingMode, PeerTrack, PlannerKind, PlannerState,
};
pub use scalar::Scalar;

pub type Point2f = Point2<f64>;
pub type Point2f32 = Point2<f32>;
pub type ChannelParamsf = ChannelParams<f64>;
pub type ChannelParamsf32 = ChannelParams<f32>;
pub type Measurementf = Measurement<f64>;
pub type FimMatrixf = FimMatrix<f64>;
pub type FimMatrixf32 = FimMatrix<f32>;
pub type GridSpecf = GridSpec<f64>;
pub type PlannerStatef = PlannerState<f64>;
