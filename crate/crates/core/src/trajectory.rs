//! Trajectory data model and preprocessing.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::geo::{haversine, heading_change, LatLng};
use crate::markov::DrivingState;
use crate::{Error, Result};

/// One GPS + kinematics sample.
///
/// `speed` is km/h, `accel` m/s², `heading` degrees clockwise from north.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    /// UTC epoch seconds.
    pub t: f64,
    pub lat: f64,
    pub lng: f64,
    pub speed: f64,
    pub accel: f64,
    pub heading: f64,
}

impl TrajectoryPoint {
    /// Validates ranges and normalizes the heading into [0, 360).
    pub fn new(t: f64, lat: f64, lng: f64, speed: f64, accel: f64, heading: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::InvalidPoint("timestamp is not finite"));
        }
        if !(lat.is_finite() && (-90.0..=90.0).contains(&lat)) {
            return Err(Error::InvalidPoint("latitude outside [-90, 90]"));
        }
        if !(lng.is_finite() && (-180.0..=180.0).contains(&lng)) {
            return Err(Error::InvalidPoint("longitude outside [-180, 180]"));
        }
        if !(speed.is_finite() && speed >= 0.0) {
            return Err(Error::InvalidPoint("speed must be finite and non-negative"));
        }
        if !accel.is_finite() {
            return Err(Error::InvalidPoint("acceleration is not finite"));
        }
        if !heading.is_finite() {
            return Err(Error::InvalidPoint("heading is not finite"));
        }
        let mut heading = crate::geo::rem_euclid(heading, 360.0);
        if heading >= 360.0 {
            heading = 0.0;
        }
        Ok(Self {
            t,
            lat,
            lng,
            speed,
            accel,
            heading,
        })
    }

    pub fn location(&self) -> LatLng {
        LatLng::new(self.lat, self.lng)
    }
}

/// A single trip: points strictly increasing in time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    id: String,
    points: Vec<TrajectoryPoint>,
}

impl Trajectory {
    pub fn new(id: impl Into<String>, points: Vec<TrajectoryPoint>) -> Result<Self> {
        let id = id.into();
        if let Some(i) = points.windows(2).position(|w| w[1].t <= w[0].t) {
            return Err(Error::NonMonotonicTime {
                trajectory: id,
                index: i + 1,
            });
        }
        Ok(Self { id, points })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn points(&self) -> &[TrajectoryPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn into_points(self) -> Vec<TrajectoryPoint> {
        self.points
    }
}

/// Grid steps for the state triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuantizationConfig {
    /// km/h
    pub speed_step: f64,
    /// m/s²
    pub accel_step: f64,
    /// degrees
    pub dheading_step: f64,
}

impl Default for QuantizationConfig {
    fn default() -> Self {
        Self {
            speed_step: 5.0,
            accel_step: 1.0,
            dheading_step: 5.0,
        }
    }
}

impl QuantizationConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("speed_step", self.speed_step),
            ("accel_step", self.accel_step),
            ("dheading_step", self.dheading_step),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(alloc::format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.dheading_step > 180.0 {
            return Err(Error::InvalidConfig(
                "dheading_step must not exceed 180 degrees".to_string(),
            ));
        }
        Ok(())
    }

    /// The same grid with every step multiplied by `factor`.
    pub fn scaled(&self, factor: u32) -> Self {
        let f = factor as f64;
        Self {
            speed_step: self.speed_step * f,
            accel_step: self.accel_step * f,
            dheading_step: self.dheading_step * f,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreprocessConfig {
    pub quantization: QuantizationConfig,
    /// A point is dropped when the speed implied by its distance and time
    /// gap to the previous kept point exceeds this bound.
    pub max_implied_speed_mps: f64,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            quantization: QuantizationConfig::default(),
            max_implied_speed_mps: 65.0,
        }
    }
}

impl PreprocessConfig {
    pub fn validate(&self) -> Result<()> {
        self.quantization.validate()?;
        if !(self.max_implied_speed_mps.is_finite() && self.max_implied_speed_mps > 0.0) {
            return Err(Error::InvalidConfig(
                "max_implied_speed_mps must be positive".to_string(),
            ));
        }
        Ok(())
    }
}

/// A cleaned point with its quantized state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreprocessedPoint {
    pub base: TrajectoryPoint,
    /// km/h
    pub speed_q: f64,
    /// m/s²
    pub accel_q: f64,
    /// Signed change of heading, degrees in [-180, 180).
    pub dheading_q: f64,
    /// Grid coordinates of the quantized triple at the finest level.
    pub state: DrivingState,
}

/// Drops physically implausible points.
///
/// Each point is compared against the last point that was kept, so a single
/// GPS spike removes one point rather than its neighbours too.
pub fn clean(points: &[TrajectoryPoint], max_implied_speed_mps: f64) -> Vec<TrajectoryPoint> {
    let mut kept: Vec<TrajectoryPoint> = Vec::with_capacity(points.len());
    for p in points {
        if let Some(prev) = kept.last() {
            let dt = p.t - prev.t;
            if dt <= 0.0 {
                continue;
            }
            if haversine(prev.location(), p.location()) / dt > max_implied_speed_mps {
                continue;
            }
        }
        kept.push(*p);
    }
    kept
}

/// Cleans a trajectory, derives change-of-heading and quantizes the
/// (speed, acceleration, change-of-heading) triple of every kept point.
///
/// The first point's change of heading is 0.
pub fn preprocess(traj: &Trajectory, cfg: &PreprocessConfig) -> Result<Vec<PreprocessedPoint>> {
    cfg.validate()?;
    let cleaned = clean(traj.points(), cfg.max_implied_speed_mps);
    if cleaned.len() < 2 {
        return Err(Error::DegenerateTrajectory {
            trajectory: traj.id().to_string(),
            remaining: cleaned.len(),
        });
    }

    let q = &cfg.quantization;
    let mut out = Vec::with_capacity(cleaned.len());
    let mut prev_heading = cleaned[0].heading;
    for (i, p) in cleaned.iter().enumerate() {
        let dheading = if i == 0 {
            0.0
        } else {
            heading_change(prev_heading, p.heading)
        };
        prev_heading = p.heading;

        let state = DrivingState::quantize(p.speed, p.accel, dheading, q);
        let [speed_q, accel_q, dheading_q] = state.values(q);
        out.push(PreprocessedPoint {
            base: *p,
            speed_q,
            accel_q,
            dheading_q,
            state,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::destination;
    use alloc::vec;
    use proptest::prelude::*;

    fn pt(t: f64, lat: f64, lng: f64, speed: f64, heading: f64) -> TrajectoryPoint {
        TrajectoryPoint::new(t, lat, lng, speed, 0.0, heading).unwrap()
    }

    #[test]
    fn rejects_out_of_range_points() {
        assert!(TrajectoryPoint::new(0.0, 95.0, 0.0, 10.0, 0.0, 0.0).is_err());
        assert!(TrajectoryPoint::new(0.0, 0.0, 181.0, 10.0, 0.0, 0.0).is_err());
        assert!(TrajectoryPoint::new(0.0, 0.0, 0.0, -1.0, 0.0, 0.0).is_err());
        assert!(TrajectoryPoint::new(f64::NAN, 0.0, 0.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn heading_is_normalized() {
        assert_eq!(pt(0.0, 0.0, 0.0, 0.0, 360.0).heading, 0.0);
        assert_eq!(pt(0.0, 0.0, 0.0, 0.0, -10.0).heading, 350.0);
        assert_eq!(pt(0.0, 0.0, 0.0, 0.0, 725.0).heading, 5.0);
    }

    #[test]
    fn trajectory_requires_increasing_time() {
        let pts = vec![pt(0.0, 0.0, 0.0, 0.0, 0.0), pt(0.0, 0.0, 0.0, 0.0, 0.0)];
        assert_eq!(
            Trajectory::new("a", pts),
            Err(Error::NonMonotonicTime {
                trajectory: "a".to_string(),
                index: 1
            })
        );
    }

    #[test]
    fn heading_change_across_north() {
        let t = Trajectory::new(
            "a",
            vec![pt(0.0, 0.0, 0.0, 0.0, 350.0), pt(1.0, 0.0, 0.0, 0.0, 10.0)],
        )
        .unwrap();
        let out = preprocess(&t, &PreprocessConfig::default()).unwrap();
        assert_eq!(out[0].dheading_q, 0.0);
        assert_eq!(out[1].dheading_q, 20.0);
    }

    #[test]
    fn rounds_to_the_grid() {
        let start = LatLng::new(40.0, -83.0);
        let next = destination(start, 90.0, 17.0);
        let t = Trajectory::new(
            "a",
            vec![
                TrajectoryPoint::new(0.0, start.lat, start.lng, 61.2, 0.4, 90.0).unwrap(),
                TrajectoryPoint::new(1.0, next.lat, next.lng, 61.2, -0.6, 90.0).unwrap(),
            ],
        )
        .unwrap();
        let out = preprocess(&t, &PreprocessConfig::default()).unwrap();
        assert_eq!(out[1].speed_q, 60.0);
        assert_eq!(out[1].dheading_q, 0.0);
        assert_eq!(out[0].accel_q, 0.0);
        assert_eq!(out[1].accel_q, -1.0);
    }

    #[test]
    fn drops_gps_spikes() {
        let a = LatLng::new(40.0, -83.0);
        // 100 m in 1 s is 100 m/s, above the 65 m/s bound
        let spike = destination(a, 0.0, 100.0);
        // 60 m in 2 s from the first point is fine
        let c = destination(a, 0.0, 60.0);
        let t = Trajectory::new(
            "a",
            vec![
                pt(0.0, a.lat, a.lng, 50.0, 0.0),
                pt(1.0, spike.lat, spike.lng, 50.0, 0.0),
                pt(2.0, c.lat, c.lng, 50.0, 0.0),
            ],
        )
        .unwrap();
        let out = preprocess(&t, &PreprocessConfig::default()).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[1].base.t, 2.0);
    }

    #[test]
    fn degenerate_after_cleaning() {
        let a = LatLng::new(40.0, -83.0);
        let far = destination(a, 0.0, 1000.0);
        let t = Trajectory::new(
            "x",
            vec![pt(0.0, a.lat, a.lng, 0.0, 0.0), pt(1.0, far.lat, far.lng, 0.0, 0.0)],
        )
        .unwrap();
        assert_eq!(
            preprocess(&t, &PreprocessConfig::default()),
            Err(Error::DegenerateTrajectory {
                trajectory: "x".to_string(),
                remaining: 1
            })
        );
    }

    fn walk(headings: &[f64], speeds: &[f64]) -> Trajectory {
        let mut loc = LatLng::new(40.0, -83.0);
        let mut pts = Vec::new();
        for (i, (&h, &s)) in headings.iter().zip(speeds).enumerate() {
            if i > 0 {
                loc = destination(loc, h, s / 3.6);
            }
            pts.push(TrajectoryPoint::new(i as f64, loc.lat, loc.lng, s, 0.0, h).unwrap());
        }
        Trajectory::new("w", pts).unwrap()
    }

    proptest! {
        #[test]
        fn dheading_reintegrates_within_quantization_error(
            headings in proptest::collection::vec(0.0f64..360.0, 2..40),
        ) {
            let speeds = vec![30.0; headings.len()];
            let t = walk(&headings, &speeds);
            let cfg = PreprocessConfig::default();
            let out = preprocess(&t, &cfg).unwrap();
            prop_assert_eq!(out.len(), headings.len());
            let step = cfg.quantization.dheading_step;
            let mut h = out[0].base.heading;
            for p in &out {
                prop_assert!(p.dheading_q.abs() <= 180.0);
                prop_assert!((-180.0..180.0).contains(&p.dheading_q));
                prop_assert_eq!(libm::fmod(p.dheading_q, step), 0.0);
                h += p.dheading_q;
            }
            let err = heading_change(h.rem_euclid(360.0), out.last().unwrap().base.heading).abs();
            prop_assert!(err <= out.len() as f64 * step / 2.0 + 1e-9);
        }

        #[test]
        fn idempotent_on_quantized_input(
            turns in proptest::collection::vec(-10i32..10, 2..30),
            speeds in proptest::collection::vec(0i32..20, 2..30),
        ) {
            let n = turns.len().min(speeds.len());
            let mut heading = 0.0f64;
            let mut hs = Vec::new();
            for t in &turns[..n] {
                heading = (heading + *t as f64 * 5.0).rem_euclid(360.0);
                hs.push(heading);
            }
            let ss: Vec<f64> = speeds[..n].iter().map(|s| *s as f64 * 5.0).collect();
            let cfg = PreprocessConfig::default();
            let first = preprocess(&walk(&hs, &ss), &cfg).unwrap();

            // feed quantized values back in as raw measurements
            let again: Vec<TrajectoryPoint> = first
                .iter()
                .map(|p| TrajectoryPoint { speed: p.speed_q, accel: p.accel_q, ..p.base })
                .collect();
            let second = preprocess(&Trajectory::new("w", again).unwrap(), &cfg).unwrap();
            prop_assert_eq!(first.len(), second.len());
            for (a, b) in first.iter().zip(&second) {
                prop_assert_eq!(a.state, b.state);
                prop_assert_eq!(a.speed_q, a.base.speed);
            }
        }
    }
}
