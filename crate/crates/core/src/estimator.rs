//! Grid-search maximum-likelihood estimation of the emitter position.
//!
//! Under Gaussian shadowing in dB the likelihood is maximised by the point
//! minimising the sum of squared residuals between measured and predicted
//! power. The search is exhaustive over a rectangular lattice; ties resolve
//! to the first point in row-major order (y outer, x inner, both ascending).

use serde::{Deserialize, Serialize};

use crate::channel::{distance, ChannelParams, Measurement, Point2};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Rectangular search lattice.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec<T> {
    pub x_min: T,
    pub x_max: T,
    pub y_min: T,
    pub y_max: T,
    pub resolution: T,
}

impl<T: Scalar> GridSpec<T> {
    pub fn new(x_min: T, x_max: T, y_min: T, y_max: T, resolution: T) -> Result<Self> {
        let g = Self {
            x_min,
            x_max,
            y_min,
            y_max,
            resolution,
        };
        g.validate()?;
        Ok(g)
    }

    /// Square of side `2 * half_width` centred on `center`.
    pub fn centered(center: Point2<T>, half_width: T, resolution: T) -> Result<Self> {
        Self::new(
            center.x - half_width,
            center.x + half_width,
            center.y - half_width,
            center.y + half_width,
            resolution,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.x_min,
            self.x_max,
            self.y_min,
            self.y_max,
            self.resolution,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidGrid("non-finite bound".into()));
        }
        if !(self.x_min < self.x_max && self.y_min < self.y_max) {
            return Err(Error::InvalidGrid(
                "min bound must be below max bound".into(),
            ));
        }
        if !(self.resolution > T::zero()) {
            return Err(Error::InvalidGrid("resolution must be positive".into()));
        }
        Ok(())
    }

    fn axis_count(lo: T, hi: T, res: T) -> usize {
        // Guard against spans like 299.99999999 from decimal bounds.
        let n = ((hi - lo) / res + T::lit(1e-9)).floor();
        n.to_usize().unwrap_or(0) + 1
    }

    pub fn nx(&self) -> usize {
        Self::axis_count(self.x_min, self.x_max, self.resolution)
    }

    pub fn ny(&self) -> usize {
        Self::axis_count(self.y_min, self.y_max, self.resolution)
    }

    pub fn len(&self) -> usize {
        self.nx() * self.ny()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid point at column `ix`, row `iy`.
    #[inline]
    pub fn point(&self, ix: usize, iy: usize) -> Point2<T> {
        Point2::new(
            self.x_min + T::from_count(ix) * self.resolution,
            self.y_min + T::from_count(iy) * self.resolution,
        )
    }

    /// Grid point at row-major scan index.
    #[inline]
    pub fn point_at(&self, index: usize) -> Point2<T> {
        let nx = self.nx();
        self.point(index % nx, index / nx)
    }

    pub fn contains(&self, p: Point2<T>) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    /// Same lattice translated by `offset`.
    pub fn translated(&self, offset: Point2<T>) -> Self {
        Self {
            x_min: self.x_min + offset.x,
            x_max: self.x_max + offset.x,
            y_min: self.y_min + offset.y,
            y_max: self.y_max + offset.y,
            resolution: self.resolution,
        }
    }
}

#[inline]
fn squared_residual<T: Scalar>(
    m: &Measurement<T>,
    candidate: Point2<T>,
    params: &ChannelParams<T>,
    d_min: T,
) -> T {
    let r = m.rss_dbm - params.rss_at_distance(distance(m.uav_pos, candidate), d_min);
    r * r
}

/// Sum of squared dB residuals for a hypothesised emitter position.
pub fn residual_objective<T: Scalar>(
    measurements: &[Measurement<T>],
    candidate: Point2<T>,
    params: &ChannelParams<T>,
    d_min: T,
) -> T {
    measurements.iter().fold(T::zero(), |acc, m| {
        acc + squared_residual(m, candidate, params, d_min)
    })
}

/// Exhaustive grid minimisation of [`residual_objective`].
pub fn mle_grid_search<T: Scalar>(
    measurements: &[Measurement<T>],
    grid: &GridSpec<T>,
    params: &ChannelParams<T>,
    d_min: T,
) -> Result<Point2<T>> {
    if measurements.is_empty() {
        return Err(Error::Empty("measurements"));
    }
    grid.validate()?;
    let mut best: Option<(T, Point2<T>)> = None;
    for iy in 0..grid.ny() {
        for ix in 0..grid.nx() {
            let p = grid.point(ix, iy);
            let v = residual_objective(measurements, p, params, d_min);
            if v.is_nan() {
                continue;
            }
            match best {
                Some((bv, _)) if !(v < bv) => {}
                _ => best = Some((v, p)),
            }
        }
    }
    match best {
        Some((v, p)) if v.is_finite() => Ok(p),
        Some(_) => Err(Error::NonFinite(
            "objective overflowed on every grid point".into(),
        )),
        None => Err(Error::NonFinite(
            "objective is NaN on every grid point".into(),
        )),
    }
}

/// Objective values over a whole grid, updated one measurement at a time.
///
/// Each cell holds exactly the value [`residual_objective`] would return for
/// the measurements added so far, in the same summation order, so
/// [`ObjectiveSurface::argmin`] agrees bit-for-bit with [`mle_grid_search`].
#[derive(Clone, Debug)]
pub struct ObjectiveSurface<T> {
    grid: GridSpec<T>,
    nx: usize,
    values: Vec<T>,
    count: usize,
}

impl<T: Scalar> ObjectiveSurface<T> {
    pub fn new(grid: GridSpec<T>) -> Result<Self> {
        grid.validate()?;
        let nx = grid.nx();
        Ok(Self {
            grid,
            nx,
            values: vec![T::zero(); grid.len()],
            count: 0,
        })
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn measurement_count(&self) -> usize {
        self.count
    }

    pub fn add(&mut self, m: &Measurement<T>, params: &ChannelParams<T>, d_min: T) {
        let grid = self.grid;
        for (iy, row) in self.values.chunks_exact_mut(self.nx).enumerate() {
            for (ix, v) in row.iter_mut().enumerate() {
                *v = *v + squared_residual(m, grid.point(ix, iy), params, d_min);
            }
        }
        self.count += 1;
    }

    pub fn extend<'a, I>(&mut self, ms: I, params: &ChannelParams<T>, d_min: T)
    where
        I: IntoIterator<Item = &'a Measurement<T>>,
    {
        for m in ms {
            self.add(m, params, d_min);
        }
    }

    /// First grid point (in scan order) with the smallest value.
    pub fn argmin(&self) -> Result<Point2<T>> {
        if self.count == 0 {
            return Err(Error::Empty("measurements"));
        }
        let mut best: Option<(T, usize)> = None;
        for (i, &v) in self.values.iter().enumerate() {
            if v.is_nan() {
                continue;
            }
            match best {
                Some((bv, _)) if !(v < bv) => {}
                _ => best = Some((v, i)),
            }
        }
        match best {
            Some((v, i)) if v.is_finite() => Ok(self.grid.point_at(i)),
            Some(_) => Err(Error::NonFinite(
                "objective overflowed on every grid point".into(),
            )),
            None => Err(Error::NonFinite(
                "objective is NaN on every grid point".into(),
            )),
        }
    }

    pub fn value_at(&self, ix: usize, iy: usize) -> T {
        self.values[iy * self.nx + ix]
    }
}
