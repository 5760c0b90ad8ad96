//! Timestamp parsing: epoch seconds or ISO-8601.

use chrono::{DateTime, NaiveDateTime};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimestampFormat {
    EpochSeconds,
    Iso8601,
}

impl TimestampFormat {
    /// Guesses the format of a column from one of its values.
    pub fn detect(sample: &str) -> Self {
        if sample.trim().parse::<f64>().is_ok() {
            TimestampFormat::EpochSeconds
        } else {
            TimestampFormat::Iso8601
        }
    }

    pub fn parse(self, s: &str) -> Result<f64, String> {
        let s = s.trim();
        let parsed = match self {
            TimestampFormat::EpochSeconds => s.parse::<f64>().ok().filter(|t| t.is_finite()),
            TimestampFormat::Iso8601 => parse_iso8601(s),
        };
        parsed.ok_or_else(|| match self {
            TimestampFormat::EpochSeconds => format!("timestamp `{s}` is not epoch seconds"),
            TimestampFormat::Iso8601 => format!("timestamp `{s}` is not ISO-8601"),
        })
    }
}

/// UTC epoch seconds of an ISO-8601 date-time. Values without an offset
/// are taken as UTC.
pub fn parse_iso8601(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.timestamp() as f64 + dt.timestamp_subsec_nanos() as f64 * 1e-9);
    }
    ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"]
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
        .map(|dt| {
            let utc = dt.and_utc();
            utc.timestamp() as f64 + utc.timestamp_subsec_nanos() as f64 * 1e-9
        })
}

/// Epoch seconds or ISO-8601, decided per value.
pub fn parse_any(s: &str) -> Option<f64> {
    TimestampFormat::detect(s).parse(s).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_and_parses() {
        assert_eq!(TimestampFormat::detect("1476203400"), TimestampFormat::EpochSeconds);
        assert_eq!(TimestampFormat::detect("2016-10-11T16:30:00Z"), TimestampFormat::Iso8601);
        let iso = TimestampFormat::Iso8601;
        assert_eq!(iso.parse("2016-10-11T16:30:00Z"), Ok(1_476_203_400.0));
        assert_eq!(iso.parse("2016-10-11T12:30:00-04:00"), Ok(1_476_203_400.0));
        assert_eq!(iso.parse("2016-10-11 16:30:00"), Ok(1_476_203_400.0));
        assert_eq!(iso.parse("2016-10-11T16:30:00.5"), Ok(1_476_203_400.5));
        assert!(iso.parse("yesterday").is_err());
        assert!(TimestampFormat::EpochSeconds.parse("NaN").is_err());
        assert_eq!(parse_any(" 12.5 "), Some(12.5));
    }
}
