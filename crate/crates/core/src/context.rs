//! Driving contexts and the correlation of cutting points with events.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::events::{CongestionEvidence, EventDatabase, EventFilter, EventKind};
use crate::geo::{haversine, LatLng};
use crate::segment::CutPoint;
use crate::time::{local_time, LocalTime, TimeZone};
use crate::{Error, Result, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DayType {
    WD,
    WE,
}

/// Daily periods, half-open in local time: P1 06-10, P2 10-15, P3 15-19,
/// P4 19-22, P5 22-06.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Period {
    P1,
    P2,
    P3,
    P4,
    P5,
}

impl Period {
    pub fn of(local: &LocalTime) -> Self {
        match local.hour {
            6..=9 => Period::P1,
            10..=14 => Period::P2,
            15..=18 => Period::P3,
            19..=21 => Period::P4,
            _ => Period::P5,
        }
    }
}

impl fmt::Display for DayType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Context {
    pub route_id: String,
    pub day_type: DayType,
    pub period: Period,
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.route_id, self.day_type, self.period)
    }
}

/// Context of a trip, taken from the local time of its first point.
pub fn assign_context(traj: &Trajectory, route_id: &str, tz: &dyn TimeZone) -> Result<Context> {
    let first = traj.points().first().ok_or(Error::DegenerateTrajectory {
        trajectory: traj.id().to_string(),
        remaining: 0,
    })?;
    let local = local_time(tz, first.t);
    Ok(Context {
        route_id: route_id.to_string(),
        day_type: if local.weekday.is_weekend() { DayType::WE } else { DayType::WD },
        period: Period::of(&local),
    })
}

/// True when a physical fact lies within `th` meters of `p`.
pub fn check_relevancy_physical(p: LatLng, db: &EventDatabase, th: f64) -> bool {
    !db.nearby(p, th, EventFilter::Kind(EventKind::PhysicalFact)).is_empty()
}

/// True when some congestion-evidence centroid lies within `th` meters of `p`.
pub fn check_relevancy_temporal(p: LatLng, evidences: &[CongestionEvidence], th: f64) -> bool {
    evidences.iter().any(|e| haversine(p, e.centroid) <= th)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationMode {
    Physical,
    Temporal,
    All,
}

impl CorrelationMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "physical" => Some(Self::Physical),
            "temporal" => Some(Self::Temporal),
            "all" => Some(Self::All),
            _ => None,
        }
    }
}

/// Cutting points of one trajectory with the congestion evidence found in it.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryCuts {
    pub trajectory_id: String,
    pub cuts: Vec<CutPoint>,
    pub evidences: Vec<CongestionEvidence>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContextGroup {
    pub context: Context,
    pub trajectories: Vec<TrajectoryCuts>,
}

/// Groups trajectories by context; groups come out sorted by context.
pub fn group_by_context<I>(items: I) -> Vec<ContextGroup>
where
    I: IntoIterator<Item = (Context, TrajectoryCuts)>,
{
    let mut map: BTreeMap<Context, Vec<TrajectoryCuts>> = BTreeMap::new();
    for (c, t) in items {
        map.entry(c).or_default().push(t);
    }
    map.into_iter()
        .map(|(context, trajectories)| ContextGroup { context, trajectories })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorrelationConfig {
    /// Relevancy radius in meters.
    pub threshold_m: f64,
    /// Contexts with fewer counted cuts are not reported.
    pub min_cuts: usize,
    /// Count the trip end as a cutting point.
    pub include_final_cut: bool,
}

impl Default for CorrelationConfig {
    fn default() -> Self {
        Self {
            threshold_m: 200.0,
            min_cuts: 10,
            include_final_cut: false,
        }
    }
}

impl CorrelationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold_m.is_finite() && self.threshold_m > 0.0) {
            return Err(Error::InvalidConfig("relevancy threshold must be positive".to_string()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutRelevancy {
    pub trajectory_id: String,
    pub index: usize,
    pub location: LatLng,
    pub physical: bool,
    pub temporal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextReport {
    pub context: Context,
    pub n_trajectories: usize,
    pub n_cutting_points: usize,
    pub correlation_physical: f64,
    pub correlation_temporal: f64,
    pub correlation_all: f64,
    pub include_final_cut: bool,
    /// Sorted by trajectory id, then index.
    pub cuts: Vec<CutRelevancy>,
}

impl ContextReport {
    pub fn correlation(&self, mode: CorrelationMode) -> f64 {
        match mode {
            CorrelationMode::Physical => self.correlation_physical,
            CorrelationMode::Temporal => self.correlation_temporal,
            CorrelationMode::All => self.correlation_all,
        }
    }
}

/// A context left out of the report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedContext {
    pub context: Context,
    pub n_cutting_points: usize,
    pub min_cuts: usize,
}

impl fmt::Display for SkippedContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "context {} has {} cutting points, fewer than {}",
            self.context, self.n_cutting_points, self.min_cuts
        )
    }
}

/// Relevant cuts over all cuts of a context, for every mode at once.
pub fn correlate_group(group: &ContextGroup, db: &EventDatabase, cfg: &CorrelationConfig) -> ContextReport {
    let th = cfg.threshold_m;
    let mut cuts: Vec<CutRelevancy> = group
        .trajectories
        .iter()
        .flat_map(|tc| {
            tc.cuts
                .iter()
                .filter(|c| cfg.include_final_cut || !c.is_final)
                .map(move |c| CutRelevancy {
                    trajectory_id: tc.trajectory_id.clone(),
                    index: c.index,
                    location: c.location,
                    physical: check_relevancy_physical(c.location, db, th),
                    temporal: check_relevancy_temporal(c.location, &tc.evidences, th),
                })
        })
        .collect();
    cuts.sort_by(|a, b| (&a.trajectory_id, a.index).cmp(&(&b.trajectory_id, b.index)));

    let n = cuts.len();
    let ratio = |count: usize| if n == 0 { 0.0 } else { count as f64 / n as f64 };
    let physical = cuts.iter().filter(|c| c.physical).count();
    let temporal = cuts.iter().filter(|c| c.temporal).count();
    let either = cuts.iter().filter(|c| c.physical || c.temporal).count();
    ContextReport {
        context: group.context.clone(),
        n_trajectories: group.trajectories.len(),
        n_cutting_points: n,
        correlation_physical: ratio(physical),
        correlation_temporal: ratio(temporal),
        correlation_all: ratio(either),
        include_final_cut: cfg.include_final_cut,
        cuts,
    }
}

/// Reports for every context with at least `min_cuts` counted cuts (and at
/// least one); the rest are returned as skipped.
pub fn correlation(
    groups: &[ContextGroup],
    db: &EventDatabase,
    cfg: &CorrelationConfig,
) -> (Vec<ContextReport>, Vec<SkippedContext>) {
    let mut reports = Vec::new();
    let mut skipped = Vec::new();
    for g in groups {
        let r = correlate_group(g, db, cfg);
        if r.n_cutting_points == 0 || r.n_cutting_points < cfg.min_cuts {
            skipped.push(SkippedContext {
                context: g.context.clone(),
                n_cutting_points: r.n_cutting_points,
                min_cuts: cfg.min_cuts,
            });
        } else {
            reports.push(r);
        }
    }
    (reports, skipped)
}
