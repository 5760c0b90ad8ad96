use std::io::{Read, Write};
use std::path::Path;

use drivecontext_core::events::{Event, EventDatabase, EventKind};
use serde_json::Value;

use super::{column_index, csv_error, csv_reader, line_of, open, optional_column, parse_f64, write_comments};
use crate::error::{Error, Result, Warning};
use crate::timefmt::parse_any;

#[derive(Debug, Clone, Default)]
pub struct EventFile {
    pub db: EventDatabase,
    /// For JSON input `line` is the 1-based array position.
    pub warnings: Vec<Warning>,
}

/// Loads events from CSV, or from a JSON array when the extension is `.json`.
pub fn load_events(path: &Path) -> Result<EventFile> {
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        let mut text = String::new();
        open(path)?
            .read_to_string(&mut text)
            .map_err(|e| Error::io(path, e))?;
        parse_events_json(&text, path)
    } else {
        parse_events_csv(open(path)?, path)
    }
}

struct RawEvent<'a> {
    source: &'a str,
    kind: &'a str,
    subtype: &'a str,
    lat: Result<f64, String>,
    lng: Result<f64, String>,
    t_start: Option<&'a str>,
    t_end: Option<&'a str>,
}

fn build(raw: RawEvent<'_>) -> std::result::Result<Event, String> {
    let kind = EventKind::parse(raw.kind)
        .ok_or_else(|| format!("unknown event type `{}`", raw.kind))?;
    let time = |v: Option<&str>, name: &str| -> std::result::Result<Option<f64>, String> {
        match v.map(str::trim).filter(|s| !s.is_empty()) {
            None => Ok(None),
            Some(s) => parse_any(s)
                .map(Some)
                .ok_or_else(|| format!("{name} `{s}` is not a timestamp")),
        }
    };
    let event = Event {
        source: raw.source.to_string(),
        kind,
        subtype: raw.subtype.to_string(),
        lat: raw.lat?,
        lng: raw.lng?,
        t_start: time(raw.t_start, "t_start")?,
        t_end: time(raw.t_end, "t_end")?,
    };
    event.validate().map_err(|e| e.to_string())?;
    Ok(event)
}

fn finish(events: Vec<Event>, warnings: Vec<Warning>) -> Result<EventFile> {
    Ok(EventFile {
        db: EventDatabase::new(events)?,
        warnings,
    })
}

/// Columns `source,type,subtype,lat,lng,t_start,t_end`; `subtype` and the
/// time columns may be absent.
pub fn parse_events_csv<R: Read>(reader: R, path: &Path) -> Result<EventFile> {
    let mut rdr = csv_reader(reader);
    let headers = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    if headers.is_empty() {
        return finish(vec![], vec![]);
    }
    let idx = column_index(&headers, path, &["source", "type", "lat", "lng"])?;
    let sub = optional_column(&headers, "subtype");
    let ts = optional_column(&headers, "t_start");
    let te = optional_column(&headers, "t_end");
    let mut events = Vec::new();
    let mut warnings = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = line_of(&record);
        if record.len() != headers.len() {
            warnings.push(Warning::new(
                line,
                format!("expected {} fields, found {}", headers.len(), record.len()),
            ));
            continue;
        }
        let raw = RawEvent {
            source: &record[idx[0]],
            kind: &record[idx[1]],
            subtype: sub.map_or("", |i| &record[i]),
            lat: parse_f64(&record[idx[2]], "lat"),
            lng: parse_f64(&record[idx[3]], "lng"),
            t_start: ts.map(|i| &record[i]),
            t_end: te.map(|i| &record[i]),
        };
        match build(raw) {
            Ok(e) => events.push(e),
            Err(reason) => warnings.push(Warning::new(line, reason)),
        }
    }
    finish(events, warnings)
}

/// A JSON array of objects with the CSV field names. Times may be numbers,
/// strings or null.
pub fn parse_events_json(text: &str, path: &Path) -> Result<EventFile> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| Error::schema(path, format!("invalid JSON: {e}")))?;
    let items = value
        .as_array()
        .ok_or_else(|| Error::schema(path, "expected a JSON array of events"))?;
    let mut events = Vec::new();
    let mut warnings = Vec::new();
    for (i, item) in items.iter().enumerate() {
        let line = i as u64 + 1;
        let text_of = |key: &str| -> Option<String> {
            match item.get(key)? {
                Value::String(s) => Some(s.clone()),
                Value::Number(n) => Some(n.to_string()),
                _ => None,
            }
        };
        let number = |key: &str| -> std::result::Result<f64, String> {
            match item.get(key) {
                Some(Value::Number(n)) => n.as_f64().ok_or_else(|| format!("{key} out of range")),
                Some(Value::String(s)) => parse_f64(s, key),
                _ => Err(format!("missing {key}")),
            }
        };
        let (source, kind, subtype) = (text_of("source"), text_of("type"), text_of("subtype"));
        let (t_start, t_end) = (text_of("t_start"), text_of("t_end"));
        let raw = RawEvent {
            source: source.as_deref().unwrap_or(""),
            kind: kind.as_deref().unwrap_or(""),
            subtype: subtype.as_deref().unwrap_or(""),
            lat: number("lat"),
            lng: number("lng"),
            t_start: t_start.as_deref(),
            t_end: t_end.as_deref(),
        };
        match build(raw) {
            Ok(e) => events.push(e),
            Err(reason) => warnings.push(Warning::new(line, reason)),
        }
    }
    finish(events, warnings)
}

pub fn write_events<W: Write>(w: &mut W, events: &[Event], echo: &[String]) -> std::io::Result<()> {
    write_comments(w, echo)?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["source", "type", "subtype", "lat", "lng", "t_start", "t_end"])?;
    let opt = |t: Option<f64>| t.map_or(String::new(), |v| v.to_string());
    for e in events {
        out.write_record([
            e.source.clone(),
            e.kind.as_str().to_string(),
            e.subtype.clone(),
            e.lat.to_string(),
            e.lng.to_string(),
            opt(e.t_start),
            opt(e.t_end),
        ])?;
    }
    out.flush()
}
