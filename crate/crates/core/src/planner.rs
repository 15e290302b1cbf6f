//! Heading selection by D-optimal design.
//!
//! Every epoch each UAV picks an absolute heading from a fixed angle grid.
//! The greedy planner scores a heading by the determinant of the information
//! accumulated so far plus the information one step ahead. The predictive
//! planner instead adds the information of every remaining step along a
//! straight line up to the final epoch. The hybrid planner is greedy before
//! a fixed switch epoch and predictive from then on.
//!
//! With several UAVs, headings are chosen one UAV at a time in index order.
//! UAVs already decided contribute their committed next positions; the rest
//! contribute their current positions. For the predictive score, peers are
//! extrapolated along their most recent heading (toward the target estimate
//! before any heading exists).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{distance, ChannelParams, Point2};
use crate::error::{Error, Result};
use crate::fisher::{fim_scale, FimMatrix};
use crate::scalar::Scalar;

/// Which objective chooses the heading.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PlannerKind {
    Greedy,
    Predictive,
    /// Greedy while `epoch < switch_epoch`, predictive afterwards.
    Hybrid {
        switch_epoch: usize,
    },
}

impl PlannerKind {
    /// Hybrid switch used by the bundled realistic scenario.
    pub const DEFAULT_SWITCH_EPOCH: usize = 10;

    /// The concrete planner in effect at `epoch`.
    pub fn resolve(self, epoch: usize) -> PlannerKind {
        match self {
            PlannerKind::Hybrid { switch_epoch } if epoch < switch_epoch => PlannerKind::Greedy,
            PlannerKind::Hybrid { .. } => PlannerKind::Predictive,
            other => other,
        }
    }

    pub fn validate(self, horizon: usize) -> Result<()> {
        match self {
            PlannerKind::Hybrid { switch_epoch } if switch_epoch > horizon => {
                Err(Error::InvalidPlanner(format!(
                    "hybrid switch epoch {switch_epoch} exceeds horizon {horizon}"
                )))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlannerKind::Greedy => f.write_str("greedy"),
            PlannerKind::Predictive => f.write_str("predictive"),
            PlannerKind::Hybrid { switch_epoch } => write!(f, "hybrid:{switch_epoch}"),
        }
    }
}

impl FromStr for PlannerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "greedy" => Ok(PlannerKind::Greedy),
            "predictive" => Ok(PlannerKind::Predictive),
            "hybrid" => Ok(PlannerKind::Hybrid {
                switch_epoch: Self::DEFAULT_SWITCH_EPOCH,
            }),
            _ => match s.strip_prefix("hybrid:") {
                Some(k) => k
                    .parse()
                    .map(|switch_epoch| PlannerKind::Hybrid { switch_epoch })
                    .map_err(|_| Error::Config(format!("bad hybrid switch epoch in {s:?}"))),
                None => Err(Error::Config(format!(
                    "unknown planner {s:?} (expected greedy, predictive or hybrid:K)"
                ))),
            },
        }
    }
}

impl Serialize for PlannerKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PlannerKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Whether UAVs pick headings independently or fly one common heading.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeadingMode {
    #[default]
    PerUav,
    Shared,
}

impl FromStr for HeadingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "per_uav" => Ok(HeadingMode::PerUav),
            "shared" => Ok(HeadingMode::Shared),
            other => Err(Error::Config(format!("unknown heading mode {other:?}"))),
        }
    }
}

/// Everything the planner needs at one epoch.
#[derive(Clone, Debug, PartialEq)]
pub struct PlannerState<T> {
    pub epoch: usize,
    pub horizon: usize,
    pub step_m: T,
    pub angle_step_deg: T,
    pub uav_positions: Vec<Point2<T>>,
    /// Information collected at epochs `0..=epoch`.
    pub accumulated_fim: FimMatrix<T>,
    pub r_hat: Point2<T>,
    /// Heading each UAV flew on its last move; `None` before the first move.
    pub last_headings_deg: Option<Vec<T>>,
    pub heading_mode: HeadingMode,
}

impl<T: Scalar> PlannerState<T> {
    pub fn validate(&self) -> Result<()> {
        if self.uav_positions.is_empty() {
            return Err(Error::Empty("uav_positions"));
        }
        if self.epoch >= self.horizon {
            return Err(Error::InvalidPlanner(format!(
                "epoch {} must be below horizon {}",
                self.epoch, self.horizon
            )));
        }
        if !(self.step_m > T::zero()) {
            return Err(Error::InvalidPlanner("step_m must be positive".into()));
        }
        if !(self.angle_step_deg > T::zero() && self.angle_step_deg <= T::lit(360.0)) {
            return Err(Error::InvalidPlanner(
                "angle_step_deg must be in (0, 360]".into(),
            ));
        }
        if let Some(h) = &self.last_headings_deg {
            if h.len() != self.uav_positions.len() {
                return Err(Error::InvalidPlanner(
                    "one last heading per UAV required".into(),
                ));
            }
        }
        if !self.r_hat.is_finite() || self.uav_positions.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("planner position".into()));
        }
        Ok(())
    }

    /// Steps left before the final epoch.
    pub fn remaining(&self) -> usize {
        self.horizon - self.epoch
    }

    /// Candidate headings `0, step, 2 step, ...` strictly below 360°.
    pub fn angle_grid(&self) -> Vec<T> {
        angle_grid(self.angle_step_deg)
    }

    /// Heading a UAV is expected to keep: its last one, else toward `r_hat`.
    pub fn anticipated_heading(&self, uav_index: usize) -> T {
        match &self.last_headings_deg {
            Some(h) => h[uav_index],
            None => self.uav_positions[uav_index].bearing_deg(self.r_hat),
        }
    }
}

/// Candidate headings `0, step, 2 step, ...` strictly below 360°.
pub fn angle_grid<T: Scalar>(step_deg: T) -> Vec<T> {
    let full = T::lit(360.0);
    (0..)
        .map(|i| T::from_count(i) * step_deg)
        .take_while(|a| *a < full)
        .collect()
}

/// Unit vector for a heading in degrees.
///
/// The angle is reduced into a quadrant and folded about 45° before any
/// trigonometry, so multiples of 90° give exact axis vectors and headings
/// mirrored about an axis give exactly mirrored vectors.
pub fn heading_unit<T: Scalar>(alpha_deg: T) -> (T, T) {
    let ninety = T::lit(90.0);
    let full = T::lit(360.0);
    let mut a = alpha_deg - full * (alpha_deg / full).floor();
    if a >= full {
        a = a - full;
    }
    let q = (a / ninety).floor();
    let r = a - q * ninety;
    let half = T::lit(45.0);
    let (c, s) = if r == half {
        (T::FRAC_1_SQRT_2(), T::FRAC_1_SQRT_2())
    } else if r > half {
        let (s, c) = (ninety - r).to_radians().sin_cos();
        (s, c)
    } else {
        let (s, c) = r.to_radians().sin_cos();
        (c, s)
    };
    match q.to_u8().unwrap_or(0) {
        0 => (c, s),
        1 => (-s, c),
        2 => (-c, -s),
        _ => (s, -c),
    }
}

/// Position after `k` steps of length `step_m` along `alpha_deg`.
pub fn candidate_position<T: Scalar>(
    pos: Point2<T>,
    alpha_deg: T,
    k: usize,
    step_m: T,
) -> Point2<T> {
    let (c, s) = heading_unit(alpha_deg);
    let reach = T::from_count(k) * step_m;
    Point2::new(pos.x + reach * c, pos.y + reach * s)
}

/// Anticipated motion of another UAV: where it will be after the next move,
/// and the heading it keeps afterwards.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeerTrack<T> {
    pub next: Point2<T>,
    pub heading_deg: T,
}

impl<T: Scalar> PeerTrack<T> {
    /// Stationary-looking peer: `next` is where it is now, heading is ignored
    /// by the one-step score.
    pub fn at(next: Point2<T>, heading_deg: T) -> Self {
        Self { next, heading_deg }
    }

    /// Position `k >= 1` steps ahead.
    pub fn position(&self, k: usize, step_m: T) -> Point2<T> {
        if k <= 1 {
            self.next
        } else {
            candidate_position(self.next, self.heading_deg, k - 1, step_m)
        }
    }
}

/// Index of the first maximum; NaN scores never win.
fn first_argmax<T: Scalar>(scores: impl IntoIterator<Item = T>) -> Option<usize> {
    let mut best: Option<(T, usize)> = None;
    for (i, v) in scores.into_iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        match best {
            Some((bv, _)) if !(v > bv) => {}
            _ => best = Some((v, i)),
        }
    }
    best.map(|(_, i)| i)
}

fn pick_heading<T: Scalar>(angles: &[T], scores: Vec<T>) -> Result<T> {
    first_argmax(scores)
        .map(|i| angles[i])
        .ok_or_else(|| Error::NonFinite("every heading scored NaN".into()))
}

/// Score of one heading for one UAV under the greedy objective.
pub fn greedy_score<T: Scalar>(
    state: &PlannerState<T>,
    uav_index: usize,
    peers_next: &[PeerTrack<T>],
    k_scale: T,
    d_min: T,
    alpha_deg: T,
) -> T {
    let own = candidate_position(state.uav_positions[uav_index], alpha_deg, 1, state.step_m);
    let next = FimMatrix::from_geometry(
        peers_next
            .iter()
            .map(|p| p.next)
            .chain(std::iter::once(own)),
        state.r_hat,
        d_min,
    );
    (state.accumulated_fim + next.scale(k_scale)).det()
}

/// Score of one heading for one UAV under the predictive objective.
pub fn predictive_score<T: Scalar>(
    state: &PlannerState<T>,
    uav_index: usize,
    peers: &[PeerTrack<T>],
    k_scale: T,
    d_min: T,
    alpha_deg: T,
) -> T {
    let start = state.uav_positions[uav_index];
    let mut future = FimMatrix::zero();
    for k in 1..=state.remaining() {
        let own = candidate_position(start, alpha_deg, k, state.step_m);
        future += FimMatrix::from_geometry(
            peers
                .iter()
                .map(|p| p.position(k, state.step_m))
                .chain(std::iter::once(own)),
            state.r_hat,
            d_min,
        );
    }
    (state.accumulated_fim + future.scale(k_scale)).det()
}

/// Greedy heading for `uav_index`, smallest angle on ties.
///
/// `peers_next` lists where the other UAVs will be at the next epoch; it
/// must not include the UAV being planned.
pub fn greedy_direction<T: Scalar>(
    state: &PlannerState<T>,
    uav_index: usize,
    peers_next: &[PeerTrack<T>],
    params: &ChannelParams<T>,
    d_min: T,
) -> Result<T> {
    check_index(state, uav_index)?;
    let k_scale = fim_scale(params)?;
    let angles = state.angle_grid();
    let scores = angles
        .iter()
        .map(|&a| greedy_score(state, uav_index, peers_next, k_scale, d_min, a))
        .collect();
    pick_heading(&angles, scores)
}

/// Predictive heading for `uav_index`, smallest angle on ties.
pub fn predictive_direction<T: Scalar>(
    state: &PlannerState<T>,
    uav_index: usize,
    peers: &[PeerTrack<T>],
    params: &ChannelParams<T>,
    d_min: T,
) -> Result<T> {
    check_index(state, uav_index)?;
    if state.remaining() == 0 {
        return Err(Error::InvalidPlanner("no remaining steps".into()));
    }
    let k_scale = fim_scale(params)?;
    let angles = state.angle_grid();
    let scores = angles
        .iter()
        .map(|&a| predictive_score(state, uav_index, peers, k_scale, d_min, a))
        .collect();
    pick_heading(&angles, scores)
}

fn check_index<T>(state: &PlannerState<T>, uav_index: usize) -> Result<()> {
    if uav_index >= state.uav_positions.len() {
        return Err(Error::InvalidPlanner(format!(
            "uav index {uav_index} out of range for {} UAVs",
            state.uav_positions.len()
        )));
    }
    Ok(())
}

/// One heading per UAV for the current epoch.
pub fn plan_step<T: Scalar>(
    kind: PlannerKind,
    state: &PlannerState<T>,
    params: &ChannelParams<T>,
    d_min: T,
) -> Result<Vec<T>> {
    state.validate()?;
    kind.validate(state.horizon)?;
    let kind = kind.resolve(state.epoch);
    match state.heading_mode {
        HeadingMode::PerUav => plan_per_uav(kind, state, params, d_min),
        HeadingMode::Shared => {
            let alpha = shared_direction(kind, state, params, d_min)?;
            Ok(vec![alpha; state.uav_positions.len()])
        }
    }
}

fn plan_per_uav<T: Scalar>(
    kind: PlannerKind,
    state: &PlannerState<T>,
    params: &ChannelParams<T>,
    d_min: T,
) -> Result<Vec<T>> {
    let m = state.uav_positions.len();
    let mut chosen: Vec<T> = Vec::with_capacity(m);
    let mut peers = Vec::with_capacity(m.saturating_sub(1));
    for i in 0..m {
        peers.clear();
        for (j, &pos) in state.uav_positions.iter().enumerate() {
            if j < i {
                peers.push(PeerTrack::at(
                    candidate_position(pos, chosen[j], 1, state.step_m),
                    chosen[j],
                ));
            } else if j > i {
                peers.push(PeerTrack::at(pos, state.anticipated_heading(j)));
            }
        }
        let alpha = match kind {
            PlannerKind::Greedy => greedy_direction(state, i, &peers, params, d_min)?,
            _ => predictive_direction(state, i, &peers, params, d_min)?,
        };
        chosen.push(alpha);
    }
    Ok(chosen)
}

/// Common heading for the whole swarm.
pub fn shared_direction<T: Scalar>(
    kind: PlannerKind,
    state: &PlannerState<T>,
    params: &ChannelParams<T>,
    d_min: T,
) -> Result<T> {
    let k_scale = fim_scale(params)?;
    let steps = match kind.resolve(state.epoch) {
        PlannerKind::Greedy => 1,
        _ => state.remaining(),
    };
    let angles = state.angle_grid();
    let scores = angles
        .iter()
        .map(|&a| {
            let mut future = FimMatrix::zero();
            for k in 1..=steps {
                future += FimMatrix::from_geometry(
                    state
                        .uav_positions
                        .iter()
                        .map(|&p| candidate_position(p, a, k, state.step_m)),
                    state.r_hat,
                    d_min,
                );
            }
            (state.accumulated_fim + future.scale(k_scale)).det()
        })
        .collect();
    pick_heading(&angles, scores)
}

/// Total path length over the mean initial UAV–target distance.
pub fn reach_ability<T: Scalar>(
    uav_starts: &[Point2<T>],
    target: Point2<T>,
    horizon: usize,
    step_m: T,
) -> T {
    if uav_starts.is_empty() {
        return T::zero();
    }
    let mean = uav_starts.iter().map(|&p| distance(p, target)).sum::<T>()
        / T::from_count(uav_starts.len());
    T::from_count(horizon) * step_m / mean
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fisher::fim_epoch;
    use proptest::prelude::*;

    fn params(sigma: f64) -> ChannelParams<f64> {
        ChannelParams::new(10.0, 3.0, 1.0, sigma).unwrap()
    }

    fn state(
        positions: Vec<Point2<f64>>,
        acc: FimMatrix<f64>,
        epoch: usize,
        horizon: usize,
    ) -> PlannerState<f64> {
        PlannerState {
            epoch,
            horizon,
            step_m: 5.0,
            angle_step_deg: 5.0,
            uav_positions: positions,
            accumulated_fim: acc,
            r_hat: Point2::origin(),
            last_headings_deg: None,
            heading_mode: HeadingMode::PerUav,
        }
    }

    // Plain trig and plain Fisher sums, independent of the library path.
    fn oracle_scan(pos: (f64, f64), acc: [f64; 3], steps: usize, l: f64, k: f64) -> f64 {
        let mut best = (f64::NEG_INFINITY, 0.0);
        for i in 0..72 {
            let a = (i as f64 * 5.0).to_radians();
            let mut s = acc;
            for j in 1..=steps {
                let x = pos.0 + j as f64 * l * a.cos();
                let y = pos.1 + j as f64 * l * a.sin();
                let d4 = (x * x + y * y).max(1.0).powi(2);
                s[0] += k * x * x / d4;
                s[1] += k * x * y / d4;
                s[2] += k * y * y / d4;
            }
            let det = s[0] * s[2] - s[1] * s[1];
            if det > best.0 {
                best = (det, i as f64 * 5.0);
            }
        }
        best.1
    }

    #[test]
    fn candidate_positions() {
        assert_eq!(
            candidate_position(Point2::origin(), 0.0, 1, 5.0),
            Point2::new(5.0, 0.0)
        );
        assert_eq!(
            candidate_position(Point2::origin(), 90.0, 3, 5.0),
            Point2::new(0.0, 15.0)
        );
        assert_eq!(
            candidate_position(Point2::new(2.0, 1.0), 180.0, 2, 5.0),
            Point2::new(-8.0, 1.0)
        );
        assert_eq!(
            candidate_position(Point2::origin(), 270.0, 1, 5.0),
            Point2::new(0.0, -5.0)
        );
        assert_eq!(
            candidate_position(Point2::origin(), -90.0, 1, 5.0),
            Point2::new(0.0, -5.0)
        );
    }

    #[test]
    fn heading_unit_mirror_exact() {
        for i in 0..72 {
            let a = i as f64 * 5.0;
            let (c1, s1) = heading_unit(a);
            let (c2, s2) = heading_unit(180.0 - a);
            assert_eq!((c1, s1), (-c2, s2), "alpha {a}");
            assert!((c1 - a.to_radians().cos()).abs() < 1e-15);
            assert!((s1 - a.to_radians().sin()).abs() < 1e-15);
        }
    }

    #[test]
    fn angle_grid_shape() {
        let g = angle_grid(5.0);
        assert_eq!(g.len(), 72);
        assert_eq!(g[71], 355.0);
        assert_eq!(angle_grid(7.0).len(), 52);
        assert_eq!(angle_grid(360.0), vec![0.0]);
    }

    #[test]
    fn planner_kind_parsing() {
        assert_eq!(
            "greedy".parse::<PlannerKind>().unwrap(),
            PlannerKind::Greedy
        );
        assert_eq!(
            "Predictive".parse::<PlannerKind>().unwrap(),
            PlannerKind::Predictive
        );
        assert_eq!(
            "hybrid:7".parse::<PlannerKind>().unwrap(),
            PlannerKind::Hybrid { switch_epoch: 7 }
        );
        assert_eq!(
            "hybrid".parse::<PlannerKind>().unwrap(),
            PlannerKind::Hybrid { switch_epoch: 10 }
        );
        assert!("hybrid:x".parse::<PlannerKind>().is_err());
        assert!("random".parse::<PlannerKind>().is_err());
        assert_eq!(
            PlannerKind::Hybrid { switch_epoch: 3 }.to_string(),
            "hybrid:3"
        );
        assert!(PlannerKind::Hybrid { switch_epoch: 30 }
            .validate(27)
            .is_err());
    }

    #[test]
    fn greedy_single_uav_matches_oracle() {
        let p = params(6.0);
        let start = Point2::new(0.0, 100.0);
        let acc = fim_epoch(&[start], Point2::origin(), &p, 1.0).unwrap();
        let s = state(vec![start], acc, 0, 15);
        let got = greedy_direction(&s, 0, &[], &p, 1.0).unwrap();
        let k = fim_scale(&p).unwrap();
        let want = oracle_scan((0.0, 100.0), [acc.j_xx, acc.j_xy, acc.j_yy], 1, 5.0, k);
        assert_eq!(got, want);
        // Any sideways move beats going straight in or out.
        assert!(got != 90.0 && got != 270.0);
    }

    #[test]
    fn greedy_invariant_under_sigma() {
        let start = Point2::new(30.0, 80.0);
        let r = Point2::new(5.0, -3.0);
        let pick = |sigma: f64| {
            let p = params(sigma);
            let acc = fim_epoch(&[start, Point2::new(40.0, 70.0)], r, &p, 1.0).unwrap();
            let mut s = state(vec![start], acc, 2, 15);
            s.r_hat = r;
            greedy_direction(&s, 0, &[], &p, 1.0).unwrap()
        };
        assert_eq!(pick(6.0), pick(0.5));
        assert_eq!(pick(6.0), pick(3.0));
    }

    #[test]
    fn greedy_symmetric_tie_takes_smaller_angle() {
        let p = params(6.0);
        let s = state(
            vec![Point2::new(0.0, 100.0)],
            FimMatrix::diag(1e-5, 1e-5),
            0,
            15,
        );
        let k = fim_scale(&p).unwrap();
        let angles = s.angle_grid();
        let scores: Vec<f64> = angles
            .iter()
            .map(|&a| greedy_score(&s, 0, &[], k, 1.0, a))
            .collect();
        for (i, &a) in angles.iter().enumerate() {
            let mirror = (180.0 - a).rem_euclid(360.0);
            let j = angles.iter().position(|&b| b == mirror).unwrap();
            assert_eq!(scores[i], scores[j], "alpha {a}");
        }
        let got = greedy_direction(&s, 0, &[], &p, 1.0).unwrap();
        let best = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let first = angles[scores.iter().position(|&v| v == best).unwrap()];
        assert_eq!(got, first);
        let mirror = (180.0 - got).rem_euclid(360.0);
        assert!(got <= mirror, "{got} vs mirror {mirror}");
    }

    #[test]
    fn predictive_far_uav_heads_toward_estimate() {
        let p = params(6.0);
        let start = Point2::new(-600.0, 800.0);
        // Small history from one earlier fix on the perpendicular bearing.
        // An isotropic history would instead favour a tangential line.
        let acc = fim_epoch(&[Point2::new(800.0, 600.0)], Point2::origin(), &p, 1.0).unwrap();
        let s = state(vec![start], acc, 0, 20);
        let got = predictive_direction(&s, 0, &[], &p, 1.0).unwrap();
        let k = fim_scale(&p).unwrap();
        let want = oracle_scan(
            (start.x, start.y),
            [acc.j_xx, acc.j_xy, acc.j_yy],
            20,
            5.0,
            k,
        );
        assert_eq!(got, want);
        let bearing = start.bearing_deg(Point2::origin());
        let diff = (got - bearing + 180.0).rem_euclid(360.0) - 180.0;
        assert!(diff.abs() <= 5.0, "heading {got}, bearing {bearing}");
    }

    #[test]
    fn predictive_same_ray_with_double_step() {
        let p = params(6.0);
        let start = Point2::new(-80.0, 120.0);
        // With no history the score is a Riemann sum along the ray, so halving
        // the sample count roughly rescales it.
        let acc = FimMatrix::zero();
        let mut s = state(vec![start], acc, 0, 16);
        let a = predictive_direction(&s, 0, &[], &p, 1.0).unwrap();
        s.step_m = 10.0;
        s.epoch = 8;
        let b = predictive_direction(&s, 0, &[], &p, 1.0).unwrap();
        let k = fim_scale(&p).unwrap();
        let acc_arr = [acc.j_xx, acc.j_xy, acc.j_yy];
        assert_eq!(a, oracle_scan((start.x, start.y), acc_arr, 16, 5.0, k));
        assert_eq!(b, oracle_scan((start.x, start.y), acc_arr, 8, 10.0, k));
        let diff = (a - b + 180.0).rem_euclid(360.0) - 180.0;
        assert!(diff.abs() <= 5.0, "{a} vs {b}");
    }

    #[test]
    fn hybrid_dispatch_boundary() {
        let p = params(6.0);
        let pos = vec![Point2::new(-100.0, -100.0), Point2::new(-95.0, -100.0)];
        let acc = fim_epoch(&pos, Point2::new(10.0, 20.0), &p, 1.0).unwrap();
        let mut s = state(pos, acc, 9, 27);
        s.r_hat = Point2::new(10.0, 20.0);
        let hybrid = PlannerKind::Hybrid { switch_epoch: 10 };
        assert_eq!(
            plan_step(hybrid, &s, &p, 1.0).unwrap(),
            plan_step(PlannerKind::Greedy, &s, &p, 1.0).unwrap()
        );
        s.epoch = 10;
        assert_eq!(
            plan_step(hybrid, &s, &p, 1.0).unwrap(),
            plan_step(PlannerKind::Predictive, &s, &p, 1.0).unwrap()
        );
    }

    #[test]
    fn single_uav_plan_step_matches_direction_ops() {
        let p = params(6.0);
        let start = Point2::new(0.0, 100.0);
        let acc = fim_epoch(&[start], Point2::new(3.0, 7.0), &p, 1.0).unwrap();
        let mut s = state(vec![start], acc, 4, 15);
        s.r_hat = Point2::new(3.0, 7.0);
        assert_eq!(
            plan_step(PlannerKind::Greedy, &s, &p, 1.0).unwrap(),
            vec![greedy_direction(&s, 0, &[], &p, 1.0).unwrap()]
        );
        assert_eq!(
            plan_step(PlannerKind::Predictive, &s, &p, 1.0).unwrap(),
            vec![predictive_direction(&s, 0, &[], &p, 1.0).unwrap()]
        );
    }

    #[test]
    fn shared_mode_gives_one_heading() {
        let p = params(6.0);
        let pos = vec![Point2::new(-100.0, -100.0); 4];
        let acc = fim_epoch(&pos, Point2::new(30.0, -20.0), &p, 1.0).unwrap();
        let mut s = state(pos, acc, 0, 27);
        s.r_hat = Point2::new(30.0, -20.0);
        s.heading_mode = HeadingMode::Shared;
        let h = plan_step(PlannerKind::Greedy, &s, &p, 1.0).unwrap();
        assert_eq!(h.len(), 4);
        assert!(h.iter().all(|&a| a == h[0]));
    }

    #[test]
    fn reach_ability_cases() {
        assert_eq!(
            reach_ability(&[Point2::new(0.0, 100.0)], Point2::origin(), 15, 5.0),
            0.75
        );
        let r: f64 = reach_ability(&[Point2::new(-100.0, -100.0); 4], Point2::origin(), 27, 5.0);
        assert!((r - 0.954_594_154_601_839_5).abs() < 1e-12, "{r}");
        assert_eq!(
            reach_ability(&[Point2::new(0.0, 100.0)], Point2::origin(), 0, 5.0),
            0.0
        );
    }

    #[test]
    fn rejects_bad_state() {
        let p = params(6.0);
        let mut s = state(vec![Point2::new(0.0, 1.0)], FimMatrix::zero(), 15, 15);
        assert!(plan_step(PlannerKind::Greedy, &s, &p, 1.0).is_err());
        s.epoch = 0;
        s.angle_step_deg = 0.0;
        assert!(plan_step(PlannerKind::Greedy, &s, &p, 1.0).is_err());
        s.angle_step_deg = 5.0;
        assert!(greedy_direction(&s, 3, &[], &p, 1.0).is_err());
        assert!(plan_step(PlannerKind::Greedy, &s, &params(0.0), 1.0).is_err());
    }

    fn point() -> impl Strategy<Value = Point2<f64>> {
        (-200.0f64..200.0, -200.0f64..200.0).prop_map(|(x, y)| Point2::new(x, y))
    }

    proptest! {
        #[test]
        fn chosen_heading_is_first_maximum(
            pos in prop::collection::vec(point(), 1..4),
            r in point(),
            epoch in 0usize..10,
            predictive in any::<bool>(),
        ) {
            let p = params(6.0);
            let acc = fim_epoch(&pos, r, &p, 1.0).unwrap();
            let mut s = state(pos.clone(), acc, epoch, 12);
            s.r_hat = r;
            let peers: Vec<_> = pos[1..].iter().map(|&q| PeerTrack::at(q, 45.0)).collect();
            let k = fim_scale(&p).unwrap();
            let (got, scores): (f64, Vec<f64>) = if predictive {
                let g = predictive_direction(&s, 0, &peers, &p, 1.0).unwrap();
                (g, s.angle_grid().iter().map(|&a| predictive_score(&s, 0, &peers, k, 1.0, a)).collect())
            } else {
                let g = greedy_direction(&s, 0, &peers, &p, 1.0).unwrap();
                (g, s.angle_grid().iter().map(|&a| greedy_score(&s, 0, &peers, k, 1.0, a)).collect())
            };
            let angles = s.angle_grid();
            let gi = angles.iter().position(|&a| a == got).unwrap();
            for (i, &v) in scores.iter().enumerate() {
                prop_assert!(scores[gi] >= v);
                if v == scores[gi] {
                    prop_assert!(i >= gi);
                }
            }
            // Reversed evaluation order lands on the same heading.
            let rev: Vec<(f64, f64)> = angles.iter().cloned().zip(scores.iter().cloned()).rev().collect();
            let best = rev.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
            let min_angle = rev.iter().filter(|x| x.1 == best).map(|x| x.0).fold(f64::INFINITY, f64::min);
            prop_assert_eq!(min_angle, got);
        }

        #[test]
        fn horizon_one_predictive_equals_greedy(
            pos in prop::collection::vec(point(), 1..5),
            r in point(),
            horizon in 1usize..30,
        ) {
            let p = params(6.0);
            let acc = fim_epoch(&pos, r, &p, 1.0).unwrap();
            let mut s = state(pos, acc, horizon - 1, horizon);
            s.r_hat = r;
            prop_assert_eq!(
                plan_step(PlannerKind::Predictive, &s, &p, 1.0).unwrap(),
                plan_step(PlannerKind::Greedy, &s, &p, 1.0).unwrap()
            );
        }

        #[test]
        fn planning_does_not_touch_state(
            pos in prop::collection::vec(point(), 1..4),
            r in point(),
        ) {
            let p = params(6.0);
            let acc = fim_epoch(&pos, r, &p, 1.0).unwrap();
            let mut s = state(pos, acc, 3, 10);
            s.r_hat = r;
            let before = s.clone();
            plan_step(PlannerKind::Hybrid { switch_epoch: 5 }, &s, &p, 1.0).unwrap();
            prop_assert_eq!(before, s);
        }
    }
}
