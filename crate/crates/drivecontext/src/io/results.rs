use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use drivecontext_core::context::{ContextReport, SkippedContext};
use drivecontext_core::eval::PrCurve;
use drivecontext_core::pmd::StepSource;
use drivecontext_core::segment::CutPoint;
use drivecontext_core::{LatLng, PmdSignal};
use serde_json::{json, Value};

use super::{column_index, csv_error, csv_reader, line_of, open, parse_f64, write_comments};
use crate::error::{Error, Result, Warning};

/// One row per cutting point: `trajectory_id,cut_index,lat,lng,t`.
pub fn write_cuts<W: Write>(w: &mut W, cuts: &[(String, Vec<CutPoint>)], echo: &[String]) -> std::io::Result<()> {
    write_comments(w, echo)?;
    writeln!(w, "trajectory_id,cut_index,lat,lng,t")?;
    for (id, points) in cuts {
        for c in points {
            writeln!(w, "{id},{},{},{},{}", c.index, c.location.lat, c.location.lng, c.t)?;
        }
    }
    Ok(())
}

/// Cutting points keyed by trajectory id.
pub type CutMap = BTreeMap<String, Vec<CutPoint>>;

/// Cutting points by trajectory id, indexes ascending. The highest index of
/// each trajectory is its trip end.
pub fn read_cuts(path: &Path) -> Result<(CutMap, Vec<Warning>)> {
    let mut rdr = csv_reader(open(path)?);
    let headers = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    let mut out: BTreeMap<String, Vec<CutPoint>> = BTreeMap::new();
    let mut warnings = Vec::new();
    if headers.is_empty() {
        return Ok((out, warnings));
    }
    let idx = column_index(&headers, path, &["trajectory_id", "cut_index", "lat", "lng", "t"])?;
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = line_of(&record);
        if record.len() != headers.len() {
            warnings.push(Warning::new(line, "wrong number of fields"));
            continue;
        }
        let parsed = (|| {
            let index: usize = record[idx[1]]
                .parse()
                .ok()
                .filter(|&i| i >= 1)
                .ok_or_else(|| format!("cut_index `{}` is not a positive integer", &record[idx[1]]))?;
            let location = LatLng::new(parse_f64(&record[idx[2]], "lat")?, parse_f64(&record[idx[3]], "lng")?);
            if !location.is_valid() {
                return Err(format!("coordinates {location} out of range"));
            }
            let t = parse_f64(&record[idx[4]], "t")?;
            Ok(CutPoint { index, location, t, is_final: false })
        })();
        match parsed {
            Ok(c) => out.entry(record[idx[0]].to_string()).or_default().push(c),
            Err(reason) => warnings.push(Warning::new(line, reason)),
        }
    }
    for (id, cuts) in out.iter_mut() {
        cuts.sort_by_key(|c| c.index);
        if cuts.windows(2).any(|w| w[0].index == w[1].index) {
            return Err(Error::Data(format!(
                "{}: trajectory `{id}` repeats a cut index",
                path.display()
            )));
        }
        if let Some(last) = cuts.last_mut() {
            last.is_final = true;
        }
    }
    Ok((out, warnings))
}

/// `trajectory_id,step_index,value,level_used` with 0-based steps; a
/// boundary after step `j` is cutting index `j + 1`.
pub fn write_signals<W: Write>(w: &mut W, signals: &[PmdSignal], echo: &[String]) -> std::io::Result<()> {
    write_comments(w, echo)?;
    writeln!(w, "trajectory_id,step_index,value,level_used")?;
    for s in signals {
        for (j, (v, src)) in s.values.iter().zip(&s.level_trace).enumerate() {
            let level = match src {
                StepSource::Level(l) => l.to_string(),
                StepSource::Sentinel => "sentinel".to_string(),
            };
            writeln!(w, "{},{j},{v},{level}", s.trajectory_id)?;
        }
    }
    Ok(())
}

pub fn write_report_csv<W: Write>(w: &mut W, reports: &[ContextReport], echo: &[String]) -> std::io::Result<()> {
    write_comments(w, echo)?;
    writeln!(w, "route,day_type,period,n_traj,n_cuts,corr_physical,corr_temporal,corr_all")?;
    for r in reports {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.context.route_id,
            r.context.day_type,
            r.context.period,
            r.n_trajectories,
            r.n_cutting_points,
            r.correlation_physical,
            r.correlation_temporal,
            r.correlation_all
        )?;
    }
    Ok(())
}

/// Reports with per-cut detail plus the contexts left out.
pub fn write_report_json<W: Write>(
    w: &mut W,
    reports: &[ContextReport],
    skipped: &[SkippedContext],
    config: &Value,
) -> std::io::Result<()> {
    let reports: Vec<Value> = reports
        .iter()
        .map(|r| {
            let cuts: Vec<Value> = r
                .cuts
                .iter()
                .map(|c| {
                    json!({
                        "trajectory_id": c.trajectory_id,
                        "cut_index": c.index,
                        "lat": c.location.lat,
                        "lng": c.location.lng,
                        "physical": c.physical,
                        "temporal": c.temporal,
                    })
                })
                .collect();
            json!({
                "route": r.context.route_id,
                "day_type": r.context.day_type,
                "period": r.context.period,
                "n_traj": r.n_trajectories,
                "n_cuts": r.n_cutting_points,
                "corr_physical": r.correlation_physical,
                "corr_temporal": r.correlation_temporal,
                "corr_all": r.correlation_all,
                "include_final_cut": r.include_final_cut,
                "cuts": cuts,
            })
        })
        .collect();
    let skipped: Vec<Value> = skipped
        .iter()
        .map(|s| {
            json!({
                "route": s.context.route_id,
                "day_type": s.context.day_type,
                "period": s.context.period,
                "n_cuts": s.n_cutting_points,
                "min_cuts": s.min_cuts,
            })
        })
        .collect();
    let doc = json!({ "config": config, "reports": reports, "skipped": skipped });
    serde_json::to_writer_pretty(&mut *w, &doc)?;
    writeln!(w)
}

/// `algorithm,threshold_m,precision,recall`, one row per curve point.
pub fn write_pr_curves<W: Write>(w: &mut W, curves: &[PrCurve], echo: &[String]) -> std::io::Result<()> {
    write_comments(w, echo)?;
    writeln!(w, "algorithm,threshold_m,precision,recall")?;
    for c in curves {
        for p in &c.points {
            writeln!(w, "{},{},{},{}", c.algorithm, p.threshold_m, p.precision, p.recall)?;
        }
    }
    Ok(())
}
