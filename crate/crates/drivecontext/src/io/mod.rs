//! CSV and JSON readers and writers.

mod annotations;
mod events;
mod results;
mod trajectories;

pub use annotations::{load_annotations, parse_annotations, write_annotations};
pub use events::{load_events, parse_events_csv, parse_events_json, write_events, EventFile};
pub use results::{
    read_cuts, write_cuts, CutMap, write_pr_curves, write_report_csv, write_report_json, write_signals,
};
pub use trajectories::{
    load_trajectories, parse_trajectories, write_trajectories, ColumnMap, TrajectoryFile,
    DEFAULT_ROUTE,
};

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Writes `# `-prefixed echo lines ahead of CSV content.
pub(crate) fn write_comments<W: Write>(w: &mut W, lines: &[String]) -> std::io::Result<()> {
    for l in lines {
        writeln!(w, "# {l}")?;
    }
    Ok(())
}

pub(crate) fn csv_reader<R: std::io::Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(r)
}

pub(crate) fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

/// Creates `path` and hands a buffered writer to `f`.
pub fn write_file<F>(path: &Path, f: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

/// Position of each named column in `headers`.
pub(crate) fn column_index(
    headers: &csv::StringRecord,
    path: &Path,
    names: &[&str],
) -> Result<Vec<usize>> {
    names
        .iter()
        .map(|name| {
            headers
                .iter()
                .position(|h| h.eq_ignore_ascii_case(name))
                .ok_or_else(|| Error::schema(path, format!("missing column `{name}`")))
        })
        .collect()
}

pub(crate) fn optional_column(headers: &csv::StringRecord, name: &str) -> Option<usize> {
    headers.iter().position(|h| h.eq_ignore_ascii_case(name))
}

pub(crate) fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

pub(crate) fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::schema(path, format!("{other:?}")),
    }
}

pub(crate) fn parse_f64(field: &str, name: &str) -> std::result::Result<f64, String> {
    field
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("{name} `{field}` is not a number"))
}
