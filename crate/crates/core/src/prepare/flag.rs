use chrono::{DateTime, Duration, FixedOffset, NaiveDate, Utc};

use super::region::{GeoPoint, RegionSpec};
use super::{LocationPing, RegionFlag, SearchEvent};
use crate::time::local_date;

#[derive(Debug, Clone, Copy)]
struct FlaggedPing {
    ts: DateTime<Utc>,
    inside: bool,
    date: NaiveDate,
}

/// One user's pings with containment precomputed, sorted by time.
#[derive(Debug, Clone, Default)]
pub struct UserTrack {
    pings: Vec<FlaggedPing>,
}

impl UserTrack {
    pub fn new<'a>(pings: impl IntoIterator<Item = &'a LocationPing>, region: &RegionSpec, tz: &FixedOffset) -> Self {
        let mut pings: Vec<FlaggedPing> = pings
            .into_iter()
            .map(|p| FlaggedPing {
                ts: p.timestamp,
                inside: region.contains(GeoPoint::new(p.lat, p.lon)),
                date: local_date(p.timestamp, tz),
            })
            .collect();
        pings.sort_by_key(|p| p.ts);
        Self { pings }
    }

    pub fn len(&self) -> usize {
        self.pings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pings.is_empty()
    }

    /// Nearest ping within `window` decides; otherwise the majority of the
    /// same local day's pings (ties go to Outside); otherwise `None`.
    pub fn flag_at(&self, ts: DateTime<Utc>, date: NaiveDate, window: Duration) -> Option<RegionFlag> {
        let pings = &self.pings;
        let after = pings.partition_point(|p| p.ts < ts);
        let mut best: Option<(Duration, usize)> = None;
        if after > 0 {
            let first_equal = pings.partition_point(|p| p.ts < pings[after - 1].ts);
            best = Some((ts - pings[first_equal].ts, first_equal));
        }
        if after < pings.len() {
            let gap = pings[after].ts - ts;
            // Strictly closer only: ties keep the earlier ping.
            if best.is_none_or(|(d, _)| gap < d) {
                best = Some((gap, after));
            }
        }
        if let Some((gap, idx)) = best {
            if gap <= window {
                return Some(RegionFlag::from_inside(pings[idx].inside));
            }
        }

        let (mut inside, mut outside) = (0usize, 0usize);
        for p in pings.iter().filter(|p| p.date == date) {
            if p.inside {
                inside += 1;
            } else {
                outside += 1;
            }
        }
        match inside + outside {
            0 => None,
            _ => Some(RegionFlag::from_inside(inside > outside)),
        }
    }
}

/// Flags a single search event from that user's pings.
pub fn assign_region_flag(
    event: &SearchEvent,
    user_pings: &[LocationPing],
    region: &RegionSpec,
    window: Duration,
    tz: &FixedOffset,
) -> Option<RegionFlag> {
    let track = UserTrack::new(user_pings.iter().filter(|p| p.user_id == event.user_id), region, tz);
    track.flag_at(event.timestamp, local_date(event.timestamp, tz), window)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prepare::region::BoundingBox;
    use crate::time::{parse_offset, parse_timestamp};

    fn region() -> RegionSpec {
        RegionSpec {
            name: "box".into(),
            boxes: vec![BoundingBox { min_lat: 37.0, min_lon: 136.5, max_lat: 37.5, max_lon: 137.5 }],
            polygons: vec![],
        }
    }

    fn ping(ts: &str, inside: bool) -> LocationPing {
        let (lat, lon) = if inside { (37.2, 137.0) } else { (35.7, 139.7) };
        LocationPing { user_id: "u1".into(), timestamp: parse_timestamp(ts).unwrap(), lat, lon }
    }

    fn search(ts: &str) -> SearchEvent {
        SearchEvent { user_id: "u1".into(), timestamp: parse_timestamp(ts).unwrap(), query: "q".into() }
    }

    fn flag(event: &str, pings: &[LocationPing]) -> Option<RegionFlag> {
        let tz = parse_offset("+09:00").unwrap();
        assign_region_flag(&search(event), pings, &region(), Duration::minutes(90), &tz)
    }

    #[test]
    fn nearest_ping_inside() {
        let pings = [ping("2024-01-02T02:50:00Z", true), ping("2024-01-02T00:00:00Z", false)];
        assert_eq!(flag("2024-01-02T03:00:00Z", &pings), Some(RegionFlag::Inside));
    }

    #[test]
    fn tie_prefers_earlier_ping() {
        let pings = [ping("2024-01-02T02:50:00Z", false), ping("2024-01-02T03:10:00Z", true)];
        assert_eq!(flag("2024-01-02T03:00:00Z", &pings), Some(RegionFlag::Outside));
        let pings = [ping("2024-01-02T02:50:00Z", true), ping("2024-01-02T03:10:00Z", false)];
        assert_eq!(flag("2024-01-02T03:00:00Z", &pings), Some(RegionFlag::Inside));
    }

    #[test]
    fn window_edge_is_inclusive() {
        let pings = [ping("2024-01-02T01:30:00Z", true), ping("2024-01-02T06:00:00Z", false)];
        assert_eq!(flag("2024-01-02T03:00:00Z", &pings), Some(RegionFlag::Inside));
    }

    #[test]
    fn majority_fallback() {
        // Event at 12:00 local; all pings more than 90 min away, same local day.
        let pings = [
            ping("2024-01-02T00:00:00Z", true),
            ping("2024-01-02T00:10:00Z", true),
            ping("2024-01-02T06:00:00Z", true),
            ping("2024-01-02T06:30:00Z", false),
        ];
        assert_eq!(flag("2024-01-02T03:00:00Z", &pings), Some(RegionFlag::Inside));
    }

    #[test]
    fn majority_tie_is_outside() {
        let pings = [ping("2024-01-02T00:00:00Z", true), ping("2024-01-02T07:00:00Z", false)];
        assert_eq!(flag("2024-01-02T03:30:00Z", &pings), Some(RegionFlag::Outside));
    }

    #[test]
    fn no_pings_that_day_is_none() {
        assert_eq!(flag("2024-01-02T03:00:00Z", &[]), None);
        // Ping on the previous local day, far away in time.
        let pings = [ping("2024-01-01T00:00:00Z", true)];
        assert_eq!(flag("2024-01-02T03:00:00Z", &pings), None);
    }

    #[test]
    fn other_users_pings_ignored() {
        let mut p = ping("2024-01-02T03:00:00Z", true);
        p.user_id = "u2".into();
        assert_eq!(flag("2024-01-02T03:00:00Z", &[p]), None);
    }
}
