//! Civil-time arithmetic over UTC epoch seconds.
//!
//! Timezone rules come from outside the crate through [`TimeZone`];
//! [`FixedOffset`] covers UTC and fixed-offset datasets.

use serde::{Deserialize, Serialize};

/// Maps a UTC instant to the local offset in effect at that instant.
pub trait TimeZone {
    fn utc_offset_seconds(&self, utc_seconds: i64) -> i32;
}

/// A constant UTC offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FixedOffset(pub i32);

impl FixedOffset {
    pub const UTC: FixedOffset = FixedOffset(0);
}

impl TimeZone for FixedOffset {
    fn utc_offset_seconds(&self, _utc_seconds: i64) -> i32 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Weekday {
    Mon,
    Tue,
    Wed,
    Thu,
    Fri,
    Sat,
    Sun,
}

impl Weekday {
    const ALL: [Weekday; 7] = [
        Weekday::Mon,
        Weekday::Tue,
        Weekday::Wed,
        Weekday::Thu,
        Weekday::Fri,
        Weekday::Sat,
        Weekday::Sun,
    ];

    pub fn is_weekend(self) -> bool {
        matches!(self, Weekday::Sat | Weekday::Sun)
    }

    pub fn from_monday_index(i: u8) -> Option<Self> {
        Self::ALL.get(i as usize).copied()
    }

    pub fn monday_index(self) -> u8 {
        self as u8
    }
}

/// Local wall-clock fields of an instant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalTime {
    pub weekday: Weekday,
    pub hour: u8,
    pub minute: u8,
    pub second: u8,
}

impl LocalTime {
    /// Seconds since local midnight.
    pub fn seconds_of_day(&self) -> u32 {
        self.hour as u32 * 3600 + self.minute as u32 * 60 + self.second as u32
    }
}

/// Local time of a UTC epoch timestamp. Fractional seconds are floored.
pub fn local_time(tz: &dyn TimeZone, utc_seconds: f64) -> LocalTime {
    let utc = libm::floor(utc_seconds) as i64;
    let local = utc + tz.utc_offset_seconds(utc) as i64;
    let days = local.div_euclid(86_400);
    let secs = local.rem_euclid(86_400);
    // 1970-01-01 was a Thursday
    let weekday = Weekday::ALL[(days + 3).rem_euclid(7) as usize];
    LocalTime {
        weekday,
        hour: (secs / 3600) as u8,
        minute: ((secs % 3600) / 60) as u8,
        second: (secs % 60) as u8,
    }
}
