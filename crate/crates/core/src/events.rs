//! Located events, their spatial/temporal index, and congestion evidence.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::geo::{haversine, wrap_longitude, LatLng, EARTH_RADIUS_M};
use crate::time::{local_time, TimeZone, Weekday};
use crate::trajectory::TrajectoryPoint;
use crate::{Error, Result, Trajectory};

/// Grid cell edge in degrees (about 200 m of latitude).
pub const GRID_CELL_DEG: f64 = 0.002;
const LNG_CELLS: i64 = 180_000; // 360 / GRID_CELL_DEG
const TIME_BUCKET_S: f64 = 3600.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    /// Timeless road feature: signal, exit, bridge, merge.
    PhysicalFact,
    /// Located event with a time interval, e.g. a congestion report.
    TemporalPhysical,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::PhysicalFact => "physical_fact",
            EventKind::TemporalPhysical => "temporal_physical",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "physical_fact" | "physical" => Some(EventKind::PhysicalFact),
            "temporal_physical" | "temporal" => Some(EventKind::TemporalPhysical),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    /// Data source, e.g. `osm`, `hca`, `bing`, `mapquest`.
    pub source: String,
    #[serde(rename = "type")]
    pub kind: EventKind,
    pub subtype: String,
    pub lat: f64,
    pub lng: f64,
    pub t_start: Option<f64>,
    pub t_end: Option<f64>,
}

impl Event {
    pub fn physical(source: &str, subtype: &str, at: LatLng) -> Self {
        Self {
            source: source.to_string(),
            kind: EventKind::PhysicalFact,
            subtype: subtype.to_string(),
            lat: at.lat,
            lng: at.lng,
            t_start: None,
            t_end: None,
        }
    }

    pub fn temporal(source: &str, subtype: &str, at: LatLng, t_start: f64, t_end: f64) -> Self {
        Self {
            source: source.to_string(),
            kind: EventKind::TemporalPhysical,
            subtype: subtype.to_string(),
            lat: at.lat,
            lng: at.lng,
            t_start: Some(t_start),
            t_end: Some(t_end),
        }
    }

    pub fn location(&self) -> LatLng {
        LatLng::new(self.lat, self.lng)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.location().is_valid() {
            return Err(Error::InvalidEvent(format!(
                "coordinates {} out of range",
                self.location()
            )));
        }
        match (self.kind, self.t_start, self.t_end) {
            (EventKind::PhysicalFact, None, None) => Ok(()),
            (EventKind::PhysicalFact, _, _) => Err(Error::InvalidEvent(
                "physical facts carry no timestamps".to_string(),
            )),
            (EventKind::TemporalPhysical, Some(s), Some(e)) => {
                if !(s.is_finite() && e.is_finite()) {
                    Err(Error::InvalidEvent("timestamps must be finite".to_string()))
                } else if e < s {
                    Err(Error::InvalidEvent(format!("t_end {e} precedes t_start {s}")))
                } else {
                    Ok(())
                }
            }
            (EventKind::TemporalPhysical, _, _) => Err(Error::InvalidEvent(
                "temporal-physical events need t_start and t_end".to_string(),
            )),
        }
    }
}

/// Which events a spatial query returns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EventFilter<'a> {
    Any,
    Kind(EventKind),
    /// Events of `kind` whose subtype is one of the listed names
    /// (ASCII case-insensitive).
    Subtypes(EventKind, &'a [String]),
}

impl EventFilter<'_> {
    pub fn accepts(&self, e: &Event) -> bool {
        match self {
            EventFilter::Any => true,
            EventFilter::Kind(k) => e.kind == *k,
            EventFilter::Subtypes(k, names) => {
                e.kind == *k && names.iter().any(|n| n.eq_ignore_ascii_case(&e.subtype))
            }
        }
    }
}

type Cell = (i64, i64);

/// Immutable event store with a uniform lat/lng grid and an hourly index
/// over the start times of temporal events.
#[derive(Debug, Clone, Default)]
pub struct EventDatabase {
    events: Vec<Event>,
    cells: BTreeMap<Cell, Vec<u32>>,
    by_hour: BTreeMap<i64, Vec<u32>>,
    max_duration: f64,
}

pub fn cell_of(p: LatLng) -> Cell {
    let lat = libm::floor(p.lat / GRID_CELL_DEG) as i64;
    let lng = libm::floor(wrap_longitude(p.lng) / GRID_CELL_DEG) as i64;
    (lat, wrap_lng_cell(lng))
}

fn wrap_lng_cell(c: i64) -> i64 {
    (c + LNG_CELLS / 2).rem_euclid(LNG_CELLS) - LNG_CELLS / 2
}

impl EventDatabase {
    /// Validates and indexes every event.
    pub fn new(events: Vec<Event>) -> Result<Self> {
        let mut cells: BTreeMap<Cell, Vec<u32>> = BTreeMap::new();
        let mut by_hour: BTreeMap<i64, Vec<u32>> = BTreeMap::new();
        let mut max_duration = 0.0f64;
        for (i, e) in events.iter().enumerate() {
            e.validate()?;
            cells.entry(cell_of(e.location())).or_default().push(i as u32);
            if let (Some(s), Some(end)) = (e.t_start, e.t_end) {
                by_hour
                    .entry(libm::floor(s / TIME_BUCKET_S) as i64)
                    .or_default()
                    .push(i as u32);
                max_duration = max_duration.max(end - s);
            }
        }
        Ok(Self {
            events,
            cells,
            by_hour,
            max_duration,
        })
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Event count per source name.
    pub fn count_by_source(&self) -> BTreeMap<String, usize> {
        let mut counts = BTreeMap::new();
        for e in &self.events {
            *counts.entry(e.source.clone()).or_insert(0) += 1;
        }
        counts
    }

    /// Event ids stored in a grid cell.
    pub fn cell_members(&self, cell: Cell) -> &[u32] {
        self.cells.get(&cell).map_or(&[], |v| v.as_slice())
    }

    /// Ids of events whose start falls into the hour bucket.
    pub fn hour_members(&self, bucket: i64) -> &[u32] {
        self.by_hour.get(&bucket).map_or(&[], |v| v.as_slice())
    }

    /// Events within `radius_m` of `p` (inclusive) accepted by `filter`, in
    /// insertion order. The grid only narrows candidates; every returned
    /// event passed an exact haversine check.
    pub fn nearby(&self, p: LatLng, radius_m: f64, filter: EventFilter<'_>) -> Vec<&Event> {
        self.nearby_ids(p, radius_m, filter)
            .into_iter()
            .map(|i| &self.events[i as usize])
            .collect()
    }

    fn nearby_ids(&self, p: LatLng, radius_m: f64, filter: EventFilter<'_>) -> Vec<u32> {
        let keep = |i: u32| {
            let e = &self.events[i as usize];
            filter.accepts(e) && haversine(p, e.location()) <= radius_m
        };
        match self.candidate_cells(p, radius_m) {
            None => (0..self.events.len() as u32).filter(|&i| keep(i)).collect(),
            Some(cells) => {
                let mut ids: Vec<u32> = cells
                    .into_iter()
                    .flat_map(|c| self.cell_members(c).iter().copied())
                    .filter(|&i| keep(i))
                    .collect();
                ids.sort_unstable();
                ids.dedup();
                ids
            }
        }
    }

    /// Grid cells covering the query disc with one cell of slack, or `None`
    /// when a linear scan is cheaper or the disc reaches a pole.
    fn candidate_cells(&self, p: LatLng, radius_m: f64) -> Option<Vec<Cell>> {
        let delta = radius_m / EARTH_RADIUS_M;
        let dlat = delta.to_degrees();
        if p.lat + dlat >= 90.0 || p.lat - dlat <= -90.0 {
            return None;
        }
        let ratio = libm::sin(delta) / libm::cos(p.lat.to_radians());
        if !(ratio < 1.0) {
            return None;
        }
        let dlng = libm::asin(ratio).to_degrees();

        let lat_lo = libm::floor((p.lat - dlat) / GRID_CELL_DEG) as i64 - 1;
        let lat_hi = libm::floor((p.lat + dlat) / GRID_CELL_DEG) as i64 + 1;
        let lng = wrap_longitude(p.lng);
        let lng_lo = libm::floor((lng - dlng) / GRID_CELL_DEG) as i64 - 1;
        let lng_hi = libm::floor((lng + dlng) / GRID_CELL_DEG) as i64 + 1;
        let lng_span = lng_hi - lng_lo + 1;
        let count = (lat_hi - lat_lo + 1) * lng_span;
        if lng_span >= LNG_CELLS || count as usize > self.events.len().max(16) {
            return None;
        }
        let mut cells = Vec::with_capacity(count as usize);
        for la in lat_lo..=lat_hi {
            for lo in lng_lo..=lng_hi {
                cells.push((la, wrap_lng_cell(lo)));
            }
        }
        Some(cells)
    }

    /// Temporal events whose interval intersects `[t0, t1]`, in insertion
    /// order.
    pub fn overlapping(&self, t0: f64, t1: f64) -> Vec<&Event> {
        if t1 < t0 {
            return vec![];
        }
        let lo = libm::floor((t0 - self.max_duration) / TIME_BUCKET_S) as i64;
        let hi = libm::floor(t1 / TIME_BUCKET_S) as i64;
        let mut ids: Vec<u32> = self
            .by_hour
            .range(lo..=hi)
            .flat_map(|(_, v)| v.iter().copied())
            .filter(|&i| {
                let e = &self.events[i as usize];
                matches!((e.t_start, e.t_end), (Some(s), Some(end)) if s <= t1 && end >= t0)
            })
            .collect();
        ids.sort_unstable();
        ids.into_iter().map(|i| &self.events[i as usize]).collect()
    }
}

/// Events within `radius_m` of `p` matching `filter`.
pub fn nearby_events<'a>(
    db: &'a EventDatabase,
    p: LatLng,
    radius_m: f64,
    filter: EventFilter<'_>,
) -> Vec<&'a Event> {
    db.nearby(p, radius_m, filter)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CongestionConfig {
    /// Every point of a candidate run is strictly slower than this (km/h).
    pub max_speed_kmh: f64,
    pub min_run: usize,
    /// Neighbourhood radius around the run centroid (meters).
    pub radius_m: f64,
    /// Reports needed at the same weekday and hour.
    pub min_support: usize,
    /// Temporal-event subtypes that count as congestion reports.
    pub subtypes: Vec<String>,
}

impl Default for CongestionConfig {
    fn default() -> Self {
        Self {
            max_speed_kmh: 55.0,
            min_run: 5,
            radius_m: 200.0,
            min_support: 12,
            subtypes: vec!["congestion".to_string()],
        }
    }
}

/// A slow sub-trajectory corroborated by historical congestion reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CongestionEvidence {
    pub trajectory_id: String,
    /// 1-based inclusive point range.
    pub start_index: usize,
    pub end_index: usize,
    pub centroid: LatLng,
    pub weekday: Weekday,
    pub hour: u8,
    pub support_count: usize,
}

/// Maximal runs of at least `min_run` consecutive points slower than
/// `max_speed_kmh`, as 0-based inclusive ranges.
pub fn slow_runs(points: &[TrajectoryPoint], max_speed_kmh: f64, min_run: usize) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut start = None;
    for (i, p) in points.iter().enumerate() {
        match (p.speed < max_speed_kmh, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                if i - s >= min_run {
                    runs.push((s, i - 1));
                }
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        if points.len() - s >= min_run {
            runs.push((s, points.len() - 1));
        }
    }
    runs
}

fn centroid(points: &[TrajectoryPoint]) -> LatLng {
    let n = points.len() as f64;
    let lat = points.iter().map(|p| p.lat).sum::<f64>() / n;
    let lng = points.iter().map(|p| p.lng).sum::<f64>() / n;
    LatLng::new(lat, lng)
}

/// Two-step congestion detection: slow runs become candidates, and a
/// candidate survives when enough congestion reports lie near its centroid
/// on the same local weekday and hour as the run's first point.
pub fn find_congestion_evidence(
    traj: &Trajectory,
    db: &EventDatabase,
    cfg: &CongestionConfig,
    tz: &dyn TimeZone,
) -> Vec<CongestionEvidence> {
    let pts = traj.points();
    let filter = EventFilter::Subtypes(EventKind::TemporalPhysical, &cfg.subtypes);
    slow_runs(pts, cfg.max_speed_kmh, cfg.min_run)
        .into_iter()
        .filter_map(|(s, e)| {
            let c = centroid(&pts[s..=e]);
            let when = local_time(tz, pts[s].t);
            let support = db
                .nearby(c, cfg.radius_m, filter)
                .into_iter()
                .filter(|ev| {
                    ev.t_start.is_some_and(|t| {
                        let lt = local_time(tz, t);
                        lt.weekday == when.weekday && lt.hour == when.hour
                    })
                })
                .count();
            (support >= cfg.min_support).then(|| CongestionEvidence {
                trajectory_id: traj.id().to_string(),
                start_index: s + 1,
                end_index: e + 1,
                centroid: c,
                weekday: when.weekday,
                hour: when.hour,
                support_count: support,
            })
        })
        .collect()
}
