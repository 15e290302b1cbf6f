//! Log-distance path loss with log-normal shadowing.
//!
//! Received power at distance `d` from the emitter is
//! `P0 - 10 * beta * log10(d / d0)` dBm, plus a zero-mean Gaussian term with
//! standard deviation `sigma_db` applied in the dB domain. Distances below
//! `d_min` are clamped so neither the power nor the Fisher terms diverge when
//! a receiver passes over the emitter.

use std::ops::{Add, Mul, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Planar position in meters.
///
/// Serialized as a two-element array `[x, y]`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T> Point2<T> {
    pub const fn new(x: T, y: T) -> Self {
        Self { x, y }
    }
}

impl<T: Scalar> Point2<T> {
    pub fn origin() -> Self {
        Self::new(T::zero(), T::zero())
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn norm(&self) -> T {
        (self.x * self.x + self.y * self.y).sqrt()
    }

    /// Bearing of `to` as seen from `self`, in degrees within `[0, 360)`.
    pub fn bearing_deg(&self, to: Point2<T>) -> T {
        let d = to - *self;
        let deg = d.y.atan2(d.x).to_degrees();
        if deg < T::zero() {
            deg + T::lit(360.0)
        } else {
            deg
        }
    }
}

impl<T: Serialize> Serialize for Point2<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (&self.x, &self.y).serialize(s)
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for Point2<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (x, y) = <(T, T)>::deserialize(d)?;
        Ok(Self { x, y })
    }
}

impl<T> From<[T; 2]> for Point2<T> {
    fn from([x, y]: [T; 2]) -> Self {
        Self { x, y }
    }
}

impl<T> From<Point2<T>> for [T; 2] {
    fn from(p: Point2<T>) -> Self {
        [p.x, p.y]
    }
}

impl<T: Scalar> Add for Point2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<T: Scalar> Sub for Point2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl<T: Scalar> Mul<T> for Point2<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        Self::new(self.x * k, self.y * k)
    }
}

/// Euclidean distance between two points.
#[inline]
pub fn distance<T: Scalar>(a: Point2<T>, b: Point2<T>) -> T {
    (a - b).norm()
}

/// Path-loss model parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams<T> {
    /// Received power at the reference distance (dBm).
    pub p0_dbm: T,
    /// Path-loss exponent.
    pub beta: T,
    /// Reference distance (m).
    pub d0_m: T,
    /// Shadowing standard deviation (dB).
    pub sigma_db: T,
}

impl<T: Scalar> ChannelParams<T> {
    pub fn new(p0_dbm: T, beta: T, d0_m: T, sigma_db: T) -> Result<Self> {
        let params = Self {
            p0_dbm,
            beta,
            d0_m,
            sigma_db,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.p0_dbm.is_finite() {
            return Err(Error::InvalidChannel("p0_dbm must be finite".into()));
        }
        if !(self.beta > T::zero() && self.beta.is_finite()) {
            return Err(Error::InvalidChannel(format!(
                "beta must be > 0, got {}",
                self.beta
            )));
        }
        if !(self.d0_m > T::zero() && self.d0_m.is_finite()) {
            return Err(Error::InvalidChannel(format!(
                "d0_m must be > 0, got {}",
                self.d0_m
            )));
        }
        if !(self.sigma_db >= T::zero() && self.sigma_db.is_finite()) {
            return Err(Error::InvalidChannel(format!(
                "sigma_db must be >= 0, got {}",
                self.sigma_db
            )));
        }
        Ok(())
    }

    /// Same channel with a different shadowing deviation.
    pub fn with_sigma(self, sigma_db: T) -> Self {
        Self { sigma_db, ..self }
    }

    /// Power predicted at distance `d`, after clamping to `d_min`.
    #[inline]
    pub fn rss_at_distance(&self, d: T, d_min: T) -> T {
        let d = d.max(d_min);
        self.p0_dbm - T::lit(10.0) * self.beta * (d / self.d0_m).log10()
    }
}

/// One RSS sample taken by one UAV at one epoch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement<T> {
    pub uav_id: usize,
    pub epoch: usize,
    pub rss_dbm: T,
    pub uav_pos: Point2<T>,
}

/// Noise-free received power at `uav` from an emitter at `target`.
#[inline]
pub fn expected_rss<T: Scalar>(
    uav: Point2<T>,
    target: Point2<T>,
    params: &ChannelParams<T>,
    d_min: T,
) -> T {
    params.rss_at_distance(distance(uav, target), d_min)
}

/// Draws one shadowed RSS measurement.
pub fn sample_rss<T, R>(
    uav: Point2<T>,
    target: Point2<T>,
    params: &ChannelParams<T>,
    rng: &mut R,
    d_min: T,
    uav_id: usize,
    epoch: usize,
) -> Measurement<T>
where
    T: Scalar,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    let mean = expected_rss(uav, target, params, d_min);
    let z: T = StandardNormal.sample(rng);
    Measurement {
        uav_id,
        epoch,
        rss_dbm: mean + params.sigma_db * z,
        uav_pos: uav,
    }
}

/// Independent noise stream for one `(seed, run, uav, epoch)` cell.
///
/// The four words form the ChaCha key directly, so streams never depend on
/// what the planner did earlier in the run.
pub fn noise_stream(master_seed: u64, run_index: u64, uav_id: u64, epoch: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    for (chunk, word) in key
        .chunks_exact_mut(8)
        .zip([master_seed, run_index, uav_id, epoch])
    {
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(sigma: f64) -> ChannelParams<f64> {
        ChannelParams::new(10.0, 3.0, 1.0, sigma).unwrap()
    }

    #[test]
    fn distance_cases() {
        assert_eq!(distance(Point2::new(0.0, 100.0), Point2::origin()), 100.0);
        assert_eq!(distance(Point2::<f64>::origin(), Point2::origin()), 0.0);
        assert_eq!(distance(Point2::new(30.0, 40.0), Point2::origin()), 50.0);
    }

    #[test]
    fn expected_rss_cases() {
        let p = params(6.0);
        assert_eq!(
            expected_rss(Point2::new(0.0, 100.0), Point2::origin(), &p, 1.0),
            -50.0
        );
        assert_eq!(
            expected_rss(Point2::new(1.0, 0.0), Point2::origin(), &p, 1.0),
            10.0
        );
        // 10 - 30 * log10(50)
        let v = expected_rss(Point2::new(30.0, 40.0), Point2::origin(), &p, 1.0);
        assert!((v - (-40.969_100_130_080_56)).abs() < 1e-9, "{v}");
    }

    #[test]
    fn clamp_below_d_min() {
        let p = params(6.0);
        let at_zero = expected_rss(Point2::origin(), Point2::origin(), &p, 1.0);
        assert_eq!(at_zero, 10.0);
        assert!(at_zero.is_finite());
    }

    #[test]
    fn works_in_f32() {
        let p = ChannelParams::<f32>::new(10.0, 3.0, 1.0, 6.0).unwrap();
        let v = expected_rss(Point2::new(0.0f32, 100.0), Point2::origin(), &p, 1.0);
        assert!((v + 50.0).abs() < 1e-5);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(ChannelParams::new(10.0, 0.0, 1.0, 1.0).is_err());
        assert!(ChannelParams::new(10.0, 3.0, -1.0, 1.0).is_err());
        assert!(ChannelParams::new(10.0, 3.0, 1.0, -0.1).is_err());
        assert!(ChannelParams::new(f64::NAN, 3.0, 1.0, 1.0).is_err());
        assert!(ChannelParams::new(10.0, 3.0, 1.0, 0.0).is_ok());
    }

    #[test]
    fn zero_sigma_is_noise_free() {
        let p = params(0.0);
        let mut rng = noise_stream(1, 2, 3, 4);
        let uav = Point2::new(12.0, -7.0);
        let m = sample_rss(uav, Point2::origin(), &p, &mut rng, 1.0, 3, 4);
        assert_eq!(m.rss_dbm, expected_rss(uav, Point2::origin(), &p, 1.0));
        assert_eq!((m.uav_id, m.epoch), (3, 4));
    }

    #[test]
    fn fresh_streams_are_identical() {
        let p = params(6.0);
        let uav = Point2::new(0.0, 100.0);
        let a = sample_rss(
            uav,
            Point2::origin(),
            &p,
            &mut noise_stream(9, 0, 1, 5),
            1.0,
            1,
            5,
        );
        let b = sample_rss(
            uav,
            Point2::origin(),
            &p,
            &mut noise_stream(9, 0, 1, 5),
            1.0,
            1,
            5,
        );
        assert_eq!(a.rss_dbm.to_bits(), b.rss_dbm.to_bits());
        let c = sample_rss(
            uav,
            Point2::origin(),
            &p,
            &mut noise_stream(9, 0, 2, 5),
            1.0,
            1,
            5,
        );
        assert_ne!(a.rss_dbm, c.rss_dbm);
    }

    #[test]
    fn shadowing_statistics() {
        let p = params(6.0);
        let uav = Point2::new(0.0, 100.0);
        let mean_rss = expected_rss(uav, Point2::origin(), &p, 1.0);
        let n = 100_000;
        let mut rng = noise_stream(2024, 0, 0, 0);
        let residuals: Vec<f64> = (0..n)
            .map(|_| sample_rss(uav, Point2::origin(), &p, &mut rng, 1.0, 0, 0).rss_dbm - mean_rss)
            .collect();
        let mean = residuals.iter().sum::<f64>() / n as f64;
        let var = residuals.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 0.1, "mean {mean}");
        assert!((var.sqrt() - 6.0).abs() < 0.02 * 6.0, "std {}", var.sqrt());
    }

    #[test]
    fn bearing() {
        let o = Point2::<f64>::origin();
        assert!((o.bearing_deg(Point2::new(1.0, 1.0)) - 45.0).abs() < 1e-12);
        assert!((o.bearing_deg(Point2::new(0.0, -1.0)) - 270.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn strictly_decreasing_beyond_clamp(d in 1.0001f64..1e5, step in 1e-3f64..1e3) {
            let p = params(6.0);
            prop_assert!(p.rss_at_distance(d + step, 1.0) < p.rss_at_distance(d, 1.0));
        }

        #[test]
        fn reference_multiple_identity(c in 1.0f64..1e4) {
            let p = params(6.0);
            let got = p.rss_at_distance(c * p.d0_m, 1.0);
            prop_assert_eq!(got, p.p0_dbm - 10.0 * p.beta * c.log10());
        }
    }
}
