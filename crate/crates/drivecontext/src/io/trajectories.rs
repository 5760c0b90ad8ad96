use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use drivecontext_core::{Trajectory, TrajectoryPoint};
use serde::{Deserialize, Serialize};

use super::{column_index, csv_error, csv_reader, line_of, open, optional_column, parse_f64, write_comments};
use crate::error::{Error, Result, Warning};
use crate::timefmt::TimestampFormat;

/// Route id used when the input has no route column.
pub const DEFAULT_ROUTE: &str = "default";

/// Header names of the trajectory columns, for inputs that use their own
/// naming.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ColumnMap {
    pub id: String,
    pub timestamp: String,
    pub lat: String,
    pub lng: String,
    pub speed: String,
    pub accel: String,
    pub heading: String,
    /// Optional column.
    pub route: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        Self {
            id: "id".into(),
            timestamp: "timestamp".into(),
            lat: "lat".into(),
            lng: "lng".into(),
            speed: "speed".into(),
            accel: "accel".into(),
            heading: "heading".into(),
            route: "route".into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrajectoryFile {
    /// Sorted by id.
    pub trajectories: Vec<Trajectory>,
    /// Route of each trajectory id that had one.
    pub routes: BTreeMap<String, String>,
    pub warnings: Vec<Warning>,
}

impl TrajectoryFile {
    pub fn route_of(&self, id: &str) -> &str {
        self.routes.get(id).map_or(DEFAULT_ROUTE, String::as_str)
    }
}

pub fn load_trajectories(path: &Path, columns: &ColumnMap) -> Result<TrajectoryFile> {
    parse_trajectories(open(path)?, columns, path)
}

/// Reads trajectory rows, grouping by id. Invalid rows become warnings;
/// rows of one id must be strictly increasing in time.
pub fn parse_trajectories<R: Read>(reader: R, columns: &ColumnMap, path: &Path) -> Result<TrajectoryFile> {
    let mut rdr = csv_reader(reader);
    let headers = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    let mut out = TrajectoryFile::default();
    if headers.is_empty() {
        out.warnings.push(Warning::new(1, "empty file"));
        return Ok(out);
    }
    let names = [
        columns.id.as_str(),
        &columns.timestamp,
        &columns.lat,
        &columns.lng,
        &columns.speed,
        &columns.accel,
        &columns.heading,
    ];
    let idx = column_index(&headers, path, &names)?;
    let route_idx = optional_column(&headers, &columns.route);

    let mut groups: BTreeMap<String, Vec<(u64, TrajectoryPoint)>> = BTreeMap::new();
    let mut format: Option<TimestampFormat> = None;
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = line_of(&record);
        if record.len() != headers.len() {
            out.warnings.push(Warning::new(
                line,
                format!("expected {} fields, found {}", headers.len(), record.len()),
            ));
            continue;
        }
        let field = |i: usize| &record[idx[i]];
        let id = field(0).to_string();
        if id.is_empty() {
            out.warnings.push(Warning::new(line, "empty id"));
            continue;
        }
        let fmt = *format.get_or_insert_with(|| TimestampFormat::detect(field(1)));
        let parsed = (|| {
            let t = fmt.parse(field(1))?;
            let v: Vec<f64> = (2..7)
                .map(|i| parse_f64(field(i), names[i]))
                .collect::<std::result::Result<_, _>>()?;
            TrajectoryPoint::new(t, v[0], v[1], v[2], v[3], v[4]).map_err(|e| e.to_string())
        })();
        match parsed {
            Ok(p) => {
                if let Some(r) = route_idx.map(|i| &record[i]).filter(|r| !r.is_empty()) {
                    out.routes.entry(id.clone()).or_insert_with(|| r.to_string());
                }
                groups.entry(id).or_default().push((line, p));
            }
            Err(reason) => out.warnings.push(Warning::new(line, reason)),
        }
    }

    for (id, rows) in groups {
        if let Some(w) = rows.windows(2).find(|w| w[1].1.t <= w[0].1.t) {
            return Err(Error::Data(format!(
                "{}: trajectory `{id}`: timestamp at line {} does not increase",
                path.display(),
                w[1].0
            )));
        }
        let points = rows.into_iter().map(|(_, p)| p).collect();
        out.trajectories.push(Trajectory::new(id, points)?);
    }
    Ok(out)
}

/// Writes trajectories with the default column names and epoch-second
/// timestamps. Values use the shortest exact decimal form.
pub fn write_trajectories<W: Write>(w: &mut W, trajs: &[Trajectory], echo: &[String]) -> std::io::Result<()> {
    write_comments(w, echo)?;
    writeln!(w, "id,timestamp,lat,lng,speed,accel,heading")?;
    for t in trajs {
        for p in t.points() {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                t.id(),
                p.t,
                p.lat,
                p.lng,
                p.speed,
                p.accel,
                p.heading
            )?;
        }
    }
    Ok(())
}
