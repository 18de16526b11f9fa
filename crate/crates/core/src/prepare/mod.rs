//! Data preparation: region flagging, daily obfuscation, distinct-user
//! aggregation and k-anonymization.
//!
//! Only [`DailyCountRow`]s leave this module. They carry no user ids and no
//! intra-day timestamps.

mod aggregate;
mod flag;
mod normalize;
pub mod region;

use std::collections::HashMap;

use chrono::{DateTime, Duration, FixedOffset, NaiveDate, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use aggregate::{aggregate_daily, k_anonymize, DailyAggregator, FlaggedEvent};
pub use flag::{assign_region_flag, UserTrack};
pub use normalize::normalize_query;
pub use region::{BoundingBox, GeoPoint, Polygon, RegionSpec};

use crate::time::local_date;

pub const DEFAULT_K: u64 = 9;
pub const DEFAULT_WINDOW_MINUTES: i64 = 90;
pub const DEFAULT_TZ: &str = "+09:00";

#[derive(Debug, Clone, PartialEq)]
pub struct LocationPing {
    pub user_id: String,
    pub timestamp: DateTime<Utc>,
    pub lat: f64,
    pub lon: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchEvent {
    pub user_id: String,
    pub timestamp: DateTime<Utc>,
    pub query: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RegionFlag {
    #[serde(rename = "in")]
    Inside,
    #[serde(rename = "out")]
    Outside,
}

impl RegionFlag {
    pub fn from_inside(inside: bool) -> Self {
        if inside {
            RegionFlag::Inside
        } else {
            RegionFlag::Outside
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RegionFlag::Inside => "in",
            RegionFlag::Outside => "out",
        }
    }
}

impl std::str::FromStr for RegionFlag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "in" => Ok(RegionFlag::Inside),
            "out" => Ok(RegionFlag::Outside),
            other => Err(format!("region flag must be `in` or `out`, got {other:?}")),
        }
    }
}

/// Anonymized aggregate: how many distinct users searched `query` on `date`
/// from inside or outside the region.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DailyCountRow {
    pub date: NaiveDate,
    pub region_flag: RegionFlag,
    pub query: String,
    pub user_count: u64,
}

impl DailyCountRow {
    pub fn key(&self) -> (NaiveDate, RegionFlag, &str) {
        (self.date, self.region_flag, &self.query)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PrepareOptions {
    pub k: u64,
    pub window: Duration,
    pub tz: FixedOffset,
}

impl Default for PrepareOptions {
    fn default() -> Self {
        Self {
            k: DEFAULT_K,
            window: Duration::minutes(DEFAULT_WINDOW_MINUTES),
            tz: crate::time::parse_offset(DEFAULT_TZ).expect("valid default offset"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrepareStats {
    pub searches: u64,
    pub dropped_empty_query: u64,
    pub dropped_no_location: u64,
    pub flagged_inside: u64,
    pub flagged_outside: u64,
    pub rows_before_k: u64,
    pub rows_after_k: u64,
}

impl PrepareStats {
    fn merge(mut self, o: PrepareStats) -> PrepareStats {
        self.searches += o.searches;
        self.dropped_empty_query += o.dropped_empty_query;
        self.dropped_no_location += o.dropped_no_location;
        self.flagged_inside += o.flagged_inside;
        self.flagged_outside += o.flagged_outside;
        self
    }
}

fn grow<T>(v: &mut Vec<Vec<T>>, i: u32) {
    if v.len() <= i as usize {
        v.resize_with(i as usize + 1, Vec::new);
    }
}

/// Runs the whole preparation stage over raw logs.
///
/// Work is sharded by user; shard results merge through [`DailyAggregator`],
/// so the output does not depend on the thread count.
pub fn prepare_counts<'a>(
    pings: &'a [LocationPing],
    searches: &'a [SearchEvent],
    region: &RegionSpec,
    opts: &PrepareOptions,
) -> (Vec<DailyCountRow>, PrepareStats) {
    let mut ids: HashMap<&str, u32> = HashMap::new();
    let mut intern = |id: &'a str| -> u32 {
        let next = ids.len() as u32;
        *ids.entry(id).or_insert(next)
    };
    let mut by_user_pings: Vec<Vec<&LocationPing>> = Vec::new();
    let mut by_user_searches: Vec<Vec<&SearchEvent>> = Vec::new();
    for p in pings {
        let u = intern(&p.user_id);
        grow(&mut by_user_pings, u);
        by_user_pings[u as usize].push(p);
    }
    for s in searches {
        let u = intern(&s.user_id);
        grow(&mut by_user_searches, u);
        by_user_searches[u as usize].push(s);
    }
    by_user_searches.resize_with(ids.len(), Vec::new);
    by_user_pings.resize_with(ids.len(), Vec::new);

    let (agg, mut stats) = by_user_searches
        .par_iter()
        .enumerate()
        .fold(
            || (DailyAggregator::<u32>::new(), PrepareStats::default(), HashMap::<&str, String>::new()),
            |(mut agg, mut stats, mut cache), (user, events)| {
                if events.is_empty() {
                    return (agg, stats, cache);
                }
                let track = UserTrack::new(by_user_pings[user].iter().copied(), region, &opts.tz);
                for e in events {
                    stats.searches += 1;
                    let query = cache.entry(e.query.as_str()).or_insert_with(|| normalize_query(&e.query));
                    if query.is_empty() {
                        stats.dropped_empty_query += 1;
                        continue;
                    }
                    let date = local_date(e.timestamp, &opts.tz);
                    match track.flag_at(e.timestamp, date, opts.window) {
                        Some(flag) => {
                            match flag {
                                RegionFlag::Inside => stats.flagged_inside += 1,
                                RegionFlag::Outside => stats.flagged_outside += 1,
                            }
                            agg.add(date, flag, query, user as u32);
                        }
                        None => stats.dropped_no_location += 1,
                    }
                }
                (agg, stats, cache)
            },
        )
        .map(|(agg, stats, _)| (agg, stats))
        .reduce(
            || (DailyAggregator::new(), PrepareStats::default()),
            |(a1, s1), (a2, s2)| (a1.merge(a2), s1.merge(s2)),
        );

    let rows = agg.into_rows();
    stats.rows_before_k = rows.len() as u64;
    let kept = k_anonymize(&rows, opts.k);
    stats.rows_after_k = kept.len() as u64;
    (kept, stats)
}
