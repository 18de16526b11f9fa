use chrono::{DateTime, Duration, FixedOffset, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inclusive calendar-date interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DateInterval {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl DateInterval {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Self {
        Self { start, end }
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.start <= date && date <= self.end
    }

    pub fn is_empty(&self) -> bool {
        self.end < self.start
    }

    pub fn contains_interval(&self, other: &DateInterval) -> bool {
        self.contains(other.start) && self.contains(other.end)
    }

    pub fn num_days(&self) -> i64 {
        if self.is_empty() {
            0
        } else {
            (self.end - self.start).num_days() + 1
        }
    }

    pub fn days(&self) -> impl Iterator<Item = NaiveDate> {
        let start = self.start;
        (0..self.num_days()).map(move |i| start + Duration::days(i))
    }
}

/// Parses a fixed UTC offset such as `+09:00`, `-05:30` or `Z`.
pub fn parse_offset(text: &str) -> Result<FixedOffset> {
    let t = text.trim();
    if t == "Z" || t.eq_ignore_ascii_case("utc") {
        return Ok(FixedOffset::east_opt(0).unwrap());
    }
    let bad = || Error::malformed("timezone", format!("expected ±HH:MM, got {text:?}"));
    let (sign, rest) = match t.as_bytes().first() {
        Some(b'+') => (1, &t[1..]),
        Some(b'-') => (-1, &t[1..]),
        _ => return Err(bad()),
    };
    let (h, m) = rest.split_once(':').ok_or_else(bad)?;
    let h: i32 = h.parse().map_err(|_| bad())?;
    let m: i32 = m.parse().map_err(|_| bad())?;
    if h > 23 || m > 59 {
        return Err(bad());
    }
    FixedOffset::east_opt(sign * (h * 3600 + m * 60)).ok_or_else(bad)
}

pub fn format_offset(offset: &FixedOffset) -> String {
    let secs = offset.local_minus_utc();
    let sign = if secs < 0 { '-' } else { '+' };
    let secs = secs.abs();
    format!("{sign}{:02}:{:02}", secs / 3600, (secs % 3600) / 60)
}

pub fn local_date(ts: DateTime<Utc>, tz: &FixedOffset) -> NaiveDate {
    ts.with_timezone(tz).date_naive()
}

pub fn parse_timestamp(text: &str) -> Result<DateTime<Utc>> {
    DateTime::parse_from_rfc3339(text.trim())
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| Error::malformed("timestamp", format!("{text:?}: {e}")))
}

pub fn format_timestamp(ts: DateTime<Utc>) -> String {
    ts.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

pub fn parse_date(text: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(text.trim(), "%Y-%m-%d").map_err(|e| Error::malformed("date", format!("{text:?}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_round_trip() {
        for s in ["+09:00", "-05:30", "+00:00"] {
            assert_eq!(format_offset(&parse_offset(s).unwrap()), s);
        }
        assert_eq!(parse_offset("Z").unwrap().local_minus_utc(), 0);
        assert!(parse_offset("9").is_err());
        assert!(parse_offset("+25:00").is_err());
    }

    #[test]
    fn local_date_crosses_midnight() {
        let tz = parse_offset("+09:00").unwrap();
        let ts = parse_timestamp("2024-01-01T16:00:00Z").unwrap();
        assert_eq!(local_date(ts, &tz), NaiveDate::from_ymd_opt(2024, 1, 2).unwrap());
    }

    #[test]
    fn interval_days() {
        let d = |s| parse_date(s).unwrap();
        let iv = DateInterval::new(d("2024-02-27"), d("2024-03-01"));
        assert_eq!(iv.num_days(), 4);
        assert_eq!(iv.days().last(), Some(d("2024-03-01")));
        assert!(DateInterval::new(d("2024-01-02"), d("2024-01-01")).is_empty());
    }
}
