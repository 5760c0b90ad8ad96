//! Seeded synthetic trips stitched from driving regimes, with boundary
//! annotations and optional matching events.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::eval::{Annotation, AnnotationRegime, AnnotationSet};
use crate::events::{slow_runs, Event};
use crate::geo::{destination, rem_euclid, LatLng};
use crate::{Error, Result, Trajectory, TrajectoryPoint};

/// Shortest admissible regime, in points.
pub const MIN_REGIME_DURATION: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeTemplate {
    pub name: String,
    pub target_speed_kmh: f64,
    /// Signed heading change per second (positive turns right).
    pub heading_rate_dps: f64,
    /// Inclusive duration range in points.
    pub min_duration: usize,
    pub max_duration: usize,
}

impl RegimeTemplate {
    pub fn new(name: &str, target_speed_kmh: f64, heading_rate_dps: f64, min_duration: usize, max_duration: usize) -> Self {
        Self {
            name: name.to_string(),
            target_speed_kmh,
            heading_rate_dps,
            min_duration,
            max_duration,
        }
    }
}

/// Standard deviations of the Gaussian kinematic noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSpec {
    pub speed_kmh: f64,
    pub accel_mps2: f64,
    pub heading_deg: f64,
}

impl NoiseSpec {
    pub const NONE: NoiseSpec = NoiseSpec {
        speed_kmh: 0.0,
        accel_mps2: 0.0,
        heading_deg: 0.0,
    };
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            speed_kmh: 1.5,
            accel_mps2: 0.3,
            heading_deg: 1.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegimeOrder {
    /// Draw a regime count and pick regimes at random, never repeating the
    /// previous one.
    Random,
    /// Use every template once, in the listed order.
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    pub regimes: Vec<RegimeTemplate>,
    pub order: RegimeOrder,
    pub min_regimes: usize,
    pub max_regimes: usize,
    pub noise: NoiseSpec,
    pub max_accel_mps2: f64,
    pub max_decel_mps2: f64,
    pub dt_s: f64,
    pub origin: LatLng,
    /// Trip starts are scattered up to this far from `origin` (meters).
    pub origin_spread_m: f64,
    pub start_epoch: f64,
    /// Trip start times are spread uniformly over this window (seconds).
    pub start_spread_s: f64,
    pub annotation_regime: AnnotationRegime,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            regimes: vec![
                RegimeTemplate::new("cruise-30", 30.0, 0.0, 30, 90),
                RegimeTemplate::new("cruise-60", 60.0, 0.0, 40, 120),
                RegimeTemplate::new("cruise-90", 90.0, 0.0, 40, 120),
                RegimeTemplate::new("stop", 0.0, 0.0, 15, 60),
                RegimeTemplate::new("turn-left", 20.0, -9.0, 8, 12),
                RegimeTemplate::new("turn-right", 20.0, 9.0, 8, 12),
            ],
            order: RegimeOrder::Random,
            min_regimes: 3,
            max_regimes: 6,
            noise: NoiseSpec::default(),
            max_accel_mps2: 3.0,
            max_decel_mps2: 4.0,
            dt_s: 1.0,
            origin: LatLng::new(39.9612, -82.9988),
            origin_spread_m: 5000.0,
            // 2016-10-03T00:00:00Z, a Monday
            start_epoch: 1_475_452_800.0,
            start_spread_s: 28.0 * 86_400.0,
            annotation_regime: AnnotationRegime::Easy,
        }
    }
}

impl SynthSpec {
    /// The listed regimes in order, once each.
    pub fn fixed(regimes: Vec<RegimeTemplate>, noise: NoiseSpec) -> Self {
        Self {
            min_regimes: regimes.len(),
            max_regimes: regimes.len(),
            regimes,
            order: RegimeOrder::Fixed,
            noise,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.regimes.is_empty() {
            return bad("no regimes".to_string());
        }
        for r in &self.regimes {
            if r.min_duration < MIN_REGIME_DURATION {
                return bad(format!(
                    "regime `{}` lasts {} points, minimum is {MIN_REGIME_DURATION}",
                    r.name, r.min_duration
                ));
            }
            if r.max_duration < r.min_duration {
                return bad(format!("regime `{}` has max_duration < min_duration", r.name));
            }
            if !(r.target_speed_kmh.is_finite() && r.target_speed_kmh >= 0.0 && r.heading_rate_dps.is_finite()) {
                return bad(format!("regime `{}` has an invalid speed or heading rate", r.name));
            }
        }
        if self.order == RegimeOrder::Random {
            if self.min_regimes == 0 || self.max_regimes < self.min_regimes {
                return bad("regime count range is empty".to_string());
            }
            if self.regimes.len() < 2 && self.max_regimes > 1 {
                return bad("random order needs at least two regimes".to_string());
            }
        }
        let n = self.noise;
        let non_negative = [n.speed_kmh, n.accel_mps2, n.heading_deg, self.origin_spread_m, self.start_spread_s];
        if non_negative.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return bad("noise levels and spreads must be non-negative".to_string());
        }
        let positive = [self.max_accel_mps2, self.max_decel_mps2, self.dt_s];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return bad("acceleration limits and dt must be positive".to_string());
        }
        if !self.origin.is_valid() || !self.start_epoch.is_finite() {
            return bad("invalid origin or start epoch".to_string());
        }
        Ok(())
    }
}

fn normal(sd: f64) -> Normal<f64> {
    Normal::new(0.0, sd).expect("validated standard deviation")
}

fn pick_regimes<'a>(spec: &'a SynthSpec, rng: &mut ChaCha8Rng) -> Vec<&'a RegimeTemplate> {
    match spec.order {
        RegimeOrder::Fixed => spec.regimes.iter().collect(),
        RegimeOrder::Random => {
            let count = rng.random_range(spec.min_regimes..=spec.max_regimes);
            let mut out: Vec<&RegimeTemplate> = Vec::with_capacity(count);
            let mut prev = usize::MAX;
            for _ in 0..count {
                let mut i = rng.random_range(0..spec.regimes.len());
                if spec.regimes.len() > 1 {
                    while i == prev {
                        i = rng.random_range(0..spec.regimes.len());
                    }
                }
                prev = i;
                out.push(&spec.regimes[i]);
            }
            out
        }
    }
}

fn generate_one(id: String, spec: &SynthSpec, rng: &mut ChaCha8Rng) -> Result<(Trajectory, AnnotationSet)> {
    let regimes = pick_regimes(spec, rng);
    let durations: Vec<usize> = regimes
        .iter()
        .map(|r| rng.random_range(r.min_duration..=r.max_duration))
        .collect();
    let (nv, na, nh) = (normal(spec.noise.speed_kmh), normal(spec.noise.accel_mps2), normal(spec.noise.heading_deg));

    let t0 = libm::floor(spec.start_epoch + rng.random_range(0.0..=spec.start_spread_s));
    let mut loc = destination(
        spec.origin,
        rng.random_range(0.0..360.0),
        spec.origin_spread_m * libm::sqrt(rng.random_range(0.0..=1.0)),
    );
    let mut heading: f64 = rng.random_range(0.0..360.0);
    let mut speed = regimes[0].target_speed_kmh;
    let max_up = spec.max_accel_mps2 * 3.6 * spec.dt_s;
    let max_down = spec.max_decel_mps2 * 3.6 * spec.dt_s;

    let total: usize = durations.iter().sum();
    let mut points = Vec::with_capacity(total);
    let mut boundaries = Vec::with_capacity(regimes.len());
    for (r, &len) in regimes.iter().zip(&durations) {
        for _ in 0..len {
            let i = points.len();
            let mut accel = 0.0;
            if i > 0 {
                let prev = speed;
                let dv = (r.target_speed_kmh - prev).clamp(-max_down, max_up);
                speed = (prev + dv + nv.sample(rng)).max(0.0);
                accel = (speed - prev) / 3.6 / spec.dt_s + na.sample(rng);
                if speed > 0.0 {
                    heading = rem_euclid(heading + r.heading_rate_dps * spec.dt_s + nh.sample(rng), 360.0);
                }
                loc = destination(loc, heading, speed / 3.6 * spec.dt_s);
            }
            let t = t0 + i as f64 * spec.dt_s;
            points.push(TrajectoryPoint::new(t, loc.lat, loc.lng, speed, accel, heading)?);
        }
        boundaries.push(points.len());
    }
    boundaries.pop();

    let annotations = boundaries
        .into_iter()
        .map(|index| Annotation {
            index,
            location: points[index - 1].location(),
        })
        .collect();
    let ants = AnnotationSet::new(id.clone(), spec.annotation_regime, annotations)?;
    Ok((Trajectory::new(id, points)?, ants))
}

/// `n_trajs` trips with annotations at every regime boundary (the last
/// point of each regime except the final one). Identical seeds give
/// identical output.
pub fn generate_synthetic(n_trajs: usize, spec: &SynthSpec, seed: u64) -> Result<(Vec<Trajectory>, Vec<AnnotationSet>)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trajs = Vec::with_capacity(n_trajs);
    let mut ants = Vec::with_capacity(n_trajs);
    for i in 0..n_trajs {
        let (t, a) = generate_one(format!("syn-{i:05}"), spec, &mut rng)?;
        trajs.push(t);
        ants.push(a);
    }
    Ok((trajs, ants))
}

/// How synthetic events are scattered around synthetic trips.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EventSynthSpec {
    /// Chance that a physical fact sits near each annotated boundary.
    pub boundary_fact_prob: f64,
    pub fact_jitter_m: f64,
    /// Facts placed at random points of each trip.
    pub decoy_facts: usize,
    /// Chance that a slow run gets a history of congestion reports.
    pub congestion_prob: f64,
    pub min_reports: usize,
    pub max_reports: usize,
    pub report_jitter_m: f64,
    pub slow_speed_kmh: f64,
    pub min_run: usize,
}

impl Default for EventSynthSpec {
    fn default() -> Self {
        Self {
            boundary_fact_prob: 0.7,
            fact_jitter_m: 60.0,
            decoy_facts: 2,
            congestion_prob: 0.6,
            min_reports: 8,
            max_reports: 20,
            report_jitter_m: 80.0,
            slow_speed_kmh: 55.0,
            min_run: 5,
        }
    }
}

const WEEK_S: f64 = 7.0 * 86_400.0;
const FACT_SUBTYPES: [&str; 4] = ["traffic_signal", "exit", "merge", "bridge"];

/// Physical facts near boundaries and at random spots, plus weekly
/// congestion reports (same UTC weekday and hour in earlier weeks) around
/// slow stretches.
pub fn generate_events(
    trajs: &[Trajectory],
    ants: &[AnnotationSet],
    spec: &EventSynthSpec,
    seed: u64,
) -> Result<Vec<Event>> {
    let probs = [spec.boundary_fact_prob, spec.congestion_prob];
    if probs.iter().any(|p| !(0.0..=1.0).contains(p)) || spec.max_reports < spec.min_reports {
        return Err(Error::InvalidSpec("invalid event generation parameters".to_string()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut events = Vec::new();
    let jitter = |rng: &mut ChaCha8Rng, at: LatLng, radius: f64| {
        destination(at, rng.random_range(0.0..360.0), radius * libm::sqrt(rng.random_range(0.0..=1.0)))
    };

    for (traj, set) in trajs.iter().zip(ants) {
        let pts = traj.points();
        if pts.is_empty() {
            continue;
        }
        for a in &set.annotations {
            if rng.random_bool(spec.boundary_fact_prob) {
                let sub = FACT_SUBTYPES[rng.random_range(0..FACT_SUBTYPES.len())];
                events.push(Event::physical("osm", sub, jitter(&mut rng, a.location, spec.fact_jitter_m)));
            }
        }
        for _ in 0..spec.decoy_facts {
            let p = pts[rng.random_range(0..pts.len())].location();
            events.push(Event::physical("hca", "bridge", jitter(&mut rng, p, spec.fact_jitter_m)));
        }
        for (s, e) in slow_runs(pts, spec.slow_speed_kmh, spec.min_run) {
            if !rng.random_bool(spec.congestion_prob) {
                continue;
            }
            let n = pts[s..=e].len() as f64;
            let centre = LatLng::new(
                pts[s..=e].iter().map(|p| p.lat).sum::<f64>() / n,
                pts[s..=e].iter().map(|p| p.lng).sum::<f64>() / n,
            );
            let hour_start = libm::floor(pts[s].t / 3600.0) * 3600.0;
            let reports = rng.random_range(spec.min_reports..=spec.max_reports);
            for w in 1..=reports {
                let t = hour_start - w as f64 * WEEK_S + libm::floor(rng.random_range(0.0..3600.0));
                let source = if rng.random_bool(0.5) { "bing" } else { "mapquest" };
                let at = jitter(&mut rng, centre, spec.report_jitter_m);
                events.push(Event::temporal(source, "congestion", at, t, t + 1800.0));
            }
        }
    }
    Ok(events)
}
