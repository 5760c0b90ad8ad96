//! Dataset timezones: IANA names or fixed offsets.

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Offset, TimeZone as _};
use chrono_tz::Tz;
use drivecontext_core::time::TimeZone;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Zone {
    Iana(Tz),
    /// Seconds east of UTC.
    Fixed(i32),
}

impl Zone {
    pub const UTC: Zone = Zone::Fixed(0);
}

impl TimeZone for Zone {
    fn utc_offset_seconds(&self, utc_seconds: i64) -> i32 {
        match self {
            Zone::Fixed(s) => *s,
            Zone::Iana(tz) => DateTime::from_timestamp(utc_seconds, 0)
                .map(|dt| tz.offset_from_utc_datetime(&dt.naive_utc()).fix().local_minus_utc())
                .unwrap_or(0),
        }
    }
}

fn parse_offset(s: &str) -> Option<i32> {
    let sign = match s.as_bytes().first()? {
        b'+' => 1,
        b'-' => -1,
        _ => return None,
    };
    let (h, m) = s[1..].split_once(':').unwrap_or((&s[1..], "0"));
    let (h, m): (i32, i32) = (h.parse().ok()?, m.parse().ok()?);
    (h <= 18 && m < 60).then_some(sign * (h * 3600 + m * 60))
}

impl FromStr for Zone {
    type Err = String;

    /// `UTC`, an IANA name such as `America/New_York`, or `+HH:MM`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("utc") || s.eq_ignore_ascii_case("z") {
            return Ok(Zone::UTC);
        }
        if let Some(off) = parse_offset(s) {
            return Ok(Zone::Fixed(off));
        }
        s.parse::<Tz>()
            .map(Zone::Iana)
            .map_err(|_| format!("unknown timezone `{s}` (use an IANA name, UTC or +HH:MM)"))
    }
}

impl fmt::Display for Zone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Zone::Iana(tz) => f.write_str(tz.name()),
            Zone::Fixed(0) => f.write_str("UTC"),
            Zone::Fixed(s) => {
                let sign = if *s < 0 { '-' } else { '+' };
                let a = s.unsigned_abs();
                write!(f, "{sign}{:02}:{:02}", a / 3600, (a % 3600) / 60)
            }
        }
    }
}
