//! Fisher information for RSS localization, its time accumulation, the
//! Cramér–Rao bound and the D-optimality score.
//!
//! For UAVs at offsets `(dx, dy)` from the target estimate, one epoch
//! contributes `K * sum([dx², dx·dy; dx·dy, dy²] / d⁴)` with
//! `K = (10 β / ln 10) / σ_dB`.

use std::iter::Sum;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelParams, Point2};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Determinant at or below which the bound is reported as singular.
pub const SINGULAR_DET: f64 = 1e-15;

/// Smallest `det / (j_xx * j_yy)` accepted for inversion.
///
/// The absolute threshold alone lets rank-one matrices with large entries
/// through on rounding residue. Below this ratio the inverse cannot be
/// represented accurately enough for `inverse * fim` to be within `1e-9` of
/// the identity in double precision, so the geometry is treated as singular.
pub const CONDITION_FLOOR: f64 = 1e-6;

/// Symmetric positive-semidefinite 2×2 information matrix.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FimMatrix<T> {
    pub j_xx: T,
    pub j_xy: T,
    pub j_yy: T,
}

impl<T: Scalar> FimMatrix<T> {
    /// Builds a matrix, rejecting entries that are not PSD.
    pub fn new(j_xx: T, j_xy: T, j_yy: T) -> Result<Self> {
        let m = Self { j_xx, j_xy, j_yy };
        if !(j_xx.is_finite() && j_xy.is_finite() && j_yy.is_finite()) {
            return Err(Error::NonFinite("FIM entry".into()));
        }
        if !m.is_psd() {
            return Err(Error::NotPsd {
                det: m.det().to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(m)
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn diag(a: T, b: T) -> Self {
        Self {
            j_xx: a,
            j_xy: T::zero(),
            j_yy: b,
        }
    }

    /// Unscaled geometry term `sum(u uᵀ / d⁴)` for receivers around `r_hat`.
    pub fn from_geometry<I>(positions: I, r_hat: Point2<T>, d_min: T) -> Self
    where
        I: IntoIterator<Item = Point2<T>>,
    {
        let mut acc = Self::zero();
        for p in positions {
            acc += Self::single(p, r_hat, d_min);
        }
        acc
    }

    #[inline]
    pub(crate) fn single(pos: Point2<T>, r_hat: Point2<T>, d_min: T) -> Self {
        let dx = pos.x - r_hat.x;
        let dy = pos.y - r_hat.y;
        let d2 = (dx * dx + dy * dy).max(d_min * d_min);
        let d4 = d2 * d2;
        Self {
            j_xx: dx * dx / d4,
            j_xy: dx * dy / d4,
            j_yy: dy * dy / d4,
        }
    }

    pub fn scale(self, k: T) -> Self {
        Self {
            j_xx: self.j_xx * k,
            j_xy: self.j_xy * k,
            j_yy: self.j_yy * k,
        }
    }

    /// `j_xx * j_yy - j_xy²`, evaluated with a compensated product.
    pub fn det(&self) -> T {
        let w = self.j_xy * self.j_xy;
        let err = (-self.j_xy).mul_add(self.j_xy, w);
        self.j_xx.mul_add(self.j_yy, -w) + err
    }

    pub fn trace(&self) -> T {
        self.j_xx + self.j_yy
    }

    /// Tolerance used for the PSD test: `1e-12 * max(1, j_xx * j_yy)`.
    pub fn psd_tolerance(&self) -> T {
        T::lit(1e-12) * T::one().max(self.j_xx * self.j_yy)
    }

    pub fn is_psd(&self) -> bool {
        let eps = self.psd_tolerance();
        self.j_xx >= T::zero() && self.j_yy >= T::zero() && self.det() >= -eps
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [T; 2] {
        let half = T::lit(0.5);
        let mean = half * (self.j_xx + self.j_yy);
        let diff = half * (self.j_xx - self.j_yy);
        let r = diff.hypot(self.j_xy);
        [mean - r, mean + r]
    }

    pub fn to_array(&self) -> [[T; 2]; 2] {
        [[self.j_xx, self.j_xy], [self.j_xy, self.j_yy]]
    }
}

impl<T: Scalar> Add for FimMatrix<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            j_xx: self.j_xx + rhs.j_xx,
            j_xy: self.j_xy + rhs.j_xy,
            j_yy: self.j_yy + rhs.j_yy,
        }
    }
}

impl<T: Scalar> AddAssign for FimMatrix<T> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<T: Scalar> Sum for FimMatrix<T> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), Add::add)
    }
}

impl<'a, T: Scalar> Sum<&'a FimMatrix<T>> for FimMatrix<T> {
    fn sum<I: Iterator<Item = &'a Self>>(iter: I) -> Self {
        iter.copied().sum()
    }
}

/// Scale factor `K = (1/σ_dB) (10 β / ln 10)`.
pub fn fim_scale<T: Scalar>(params: &ChannelParams<T>) -> Result<T> {
    if params.sigma_db == T::zero() {
        return Err(Error::ZeroSigma);
    }
    Ok(T::lit(10.0) * params.beta / T::LN_10() / params.sigma_db)
}

/// Information carried by one epoch of measurements taken at `uav_positions`,
/// evaluated at the target estimate `r_hat`.
pub fn fim_epoch<T: Scalar>(
    uav_positions: &[Point2<T>],
    r_hat: Point2<T>,
    params: &ChannelParams<T>,
    d_min: T,
) -> Result<FimMatrix<T>> {
    if uav_positions.is_empty() {
        return Err(Error::Empty("uav_positions"));
    }
    if !r_hat.is_finite() || uav_positions.iter().any(|p| !p.is_finite()) {
        return Err(Error::NonFinite("position passed to fim_epoch".into()));
    }
    let k = fim_scale(params)?;
    Ok(FimMatrix::from_geometry(uav_positions.iter().copied(), r_hat, d_min).scale(k))
}

/// Element-wise sum; the empty history is the zero matrix.
pub fn fim_accumulate<T: Scalar>(history: &[FimMatrix<T>]) -> FimMatrix<T> {
    history.iter().sum()
}

/// D-optimality score: the determinant.
#[inline]
pub fn d_optimality<T: Scalar>(fim: &FimMatrix<T>) -> T {
    fim.det()
}

/// Symmetric 2×2 covariance bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Covariance2<T> {
    pub xx: T,
    pub xy: T,
    pub yy: T,
}

impl<T: Scalar> Covariance2<T> {
    pub fn trace(&self) -> T {
        self.xx + self.yy
    }

    pub fn to_array(&self) -> [[T; 2]; 2] {
        [[self.xx, self.xy], [self.xy, self.yy]]
    }
}

/// Inverse of the information matrix, or `None` when `det <= 1e-15` or the
/// matrix is too close to rank one (see [`CONDITION_FLOOR`]).
pub fn crlb<T: Scalar>(fim: &FimMatrix<T>) -> Option<Covariance2<T>> {
    let det = fim.det();
    if !(det > T::lit(SINGULAR_DET) && det > T::lit(CONDITION_FLOOR) * fim.j_xx * fim.j_yy) {
        return None;
    }
    Some(Covariance2 {
        xx: fim.j_yy / det,
        xy: -fim.j_xy / det,
        yy: fim.j_xx / det,
    })
}
