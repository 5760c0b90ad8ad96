use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use drivecontext_core::eval::{Annotation, AnnotationRegime, AnnotationSet};
use drivecontext_core::LatLng;

use super::{column_index, csv_error, csv_reader, line_of, open, parse_f64, write_comments};
use crate::error::{Error, Result, Warning};

pub fn load_annotations(path: &Path, regime: AnnotationRegime) -> Result<(Vec<AnnotationSet>, Vec<Warning>)> {
    parse_annotations(open(path)?, regime, path)
}

/// Columns `trajectory_id,point_index,lat,lng`. Sets come out sorted by
/// trajectory id with indexes ascending; a repeated index is a data error.
pub fn parse_annotations<R: Read>(
    reader: R,
    regime: AnnotationRegime,
    path: &Path,
) -> Result<(Vec<AnnotationSet>, Vec<Warning>)> {
    let mut rdr = csv_reader(reader);
    let headers = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    if headers.is_empty() {
        return Ok((vec![], vec![]));
    }
    let idx = column_index(&headers, path, &["trajectory_id", "point_index", "lat", "lng"])?;
    let mut groups: BTreeMap<String, Vec<Annotation>> = BTreeMap::new();
    let mut warnings = Vec::new();
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
                .ok_or_else(|| format!("point_index `{}` is not a positive integer", &record[idx[1]]))?;
            let loc = LatLng::new(parse_f64(&record[idx[2]], "lat")?, parse_f64(&record[idx[3]], "lng")?);
            if !loc.is_valid() {
                return Err(format!("coordinates {loc} out of range"));
            }
            Ok(Annotation { index, location: loc })
        })();
        match parsed {
            Ok(a) => groups.entry(record[idx[0]].to_string()).or_default().push(a),
            Err(reason) => warnings.push(Warning::new(line, reason)),
        }
    }
    let sets = groups
        .into_iter()
        .map(|(id, mut anns)| {
            anns.sort_by_key(|a| a.index);
            AnnotationSet::new(id, regime, anns)
                .map_err(|e| Error::Data(format!("{}: {e}", path.display())))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((sets, warnings))
}

pub fn write_annotations<W: Write>(w: &mut W, sets: &[AnnotationSet], echo: &[String]) -> std::io::Result<()> {
    write_comments(w, echo)?;
    writeln!(w, "trajectory_id,point_index,lat,lng")?;
    for s in sets {
        for a in &s.annotations {
            writeln!(w, "{},{},{},{}", s.trajectory_id, a.index, a.location.lat, a.location.lng)?;
        }
    }
    Ok(())
}
