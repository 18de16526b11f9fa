use std::collections::BTreeMap;

use chrono::{DateTime, Datelike, Months, NaiveDate, NaiveTime, Utc, Weekday};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::Poisson;
use rayon::prelude::*;

use super::config::{background_token, ScenarioConfig};
use super::truth::GroundTruth;
use crate::error::{Error, Result};
use crate::prepare::{BoundingBox, GeoPoint, LocationPing, RegionFlag, RegionSpec, SearchEvent};
use crate::rng::{self, date_key, StreamRng};
use crate::time::{parse_offset, DateInterval};

const USER_STREAM: u64 = 1;
const PV_STREAM: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenPing {
    pub user: u32,
    pub ts: i64,
    pub lat: f64,
    pub lon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenSearch {
    pub user: u32,
    pub ts: i64,
    pub query: u32,
}

/// Raw logs in compact form; user `i` is `user_id(i)` and query `j` is
/// `queries[j]`. Rows are ordered by user, then time.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedLogs {
    pub n_users_in: u32,
    pub n_users_out: u32,
    pub queries: Vec<String>,
    pub pings: Vec<GenPing>,
    pub searches: Vec<GenSearch>,
}

pub fn user_id(user: u32) -> String {
    format!("u{user:06}")
}

fn to_utc(ts: i64) -> DateTime<Utc> {
    DateTime::from_timestamp(ts, 0).expect("generated timestamps are in range")
}

impl GeneratedLogs {
    pub fn population(&self, user: u32) -> RegionFlag {
        RegionFlag::from_inside(user < self.n_users_in)
    }

    pub fn location_pings(&self) -> Vec<LocationPing> {
        self.pings
            .iter()
            .map(|p| LocationPing { user_id: user_id(p.user), timestamp: to_utc(p.ts), lat: p.lat, lon: p.lon })
            .collect()
    }

    pub fn search_events(&self) -> Vec<SearchEvent> {
        self.searches
            .iter()
            .map(|s| SearchEvent {
                user_id: user_id(s.user),
                timestamp: to_utc(s.ts),
                query: self.queries[s.query as usize].clone(),
            })
            .collect()
    }
}

/// Everything one scenario produces.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub logs: GeneratedLogs,
    pub truth: GroundTruth,
    /// Daily page views, covering the prior year as well.
    pub pv: BTreeMap<NaiveDate, u64>,
}

/// Query strings in sampling order: background vocabulary, then needs,
/// media spikes and region markers.
pub fn query_table(cfg: &ScenarioConfig) -> Vec<String> {
    (1..=cfg.vocab_size)
        .map(background_token)
        .chain(cfg.need_profiles.iter().map(|n| n.query.clone()))
        .chain(cfg.media_spikes.iter().map(|m| m.query.clone()))
        .chain(cfg.region_markers.iter().map(|m| m.query.clone()))
        .collect()
}

/// Unnormalized sampling weights for one population on one date, aligned
/// with [`query_table`].
fn query_weights(cfg: &ScenarioConfig, date: NaiveDate, inside: bool) -> Vec<f64> {
    let mut w: Vec<f64> = (1..=cfg.vocab_size).map(|r| (r as f64).powf(-cfg.zipf_exponent)).collect();
    for n in &cfg.need_profiles {
        let lift = if inside && n.is_active(date) { n.lift } else { 1.0 };
        w.push(n.base_weight * lift);
    }
    for m in &cfg.media_spikes {
        let lift = if m.active_window.contains(date) { m.lift } else { 1.0 };
        w.push(m.base_weight * lift);
    }
    for m in &cfg.region_markers {
        w.push(m.base_weight * if inside { m.lift } else { 1.0 });
    }
    w
}

fn sample_in_box(bb: &BoundingBox, rng: &mut StreamRng) -> GeoPoint {
    let lat = if bb.max_lat > bb.min_lat { rng.random_range(bb.min_lat..=bb.max_lat) } else { bb.min_lat };
    let lon = if bb.max_lon > bb.min_lon { rng.random_range(bb.min_lon..=bb.max_lon) } else { bb.min_lon };
    GeoPoint::new(lat, lon)
}

fn sample_in_region(region: &RegionSpec, bb: &BoundingBox, rng: &mut StreamRng) -> Result<GeoPoint> {
    for _ in 0..100_000 {
        let p = sample_in_box(bb, rng);
        if region.contains(p) {
            return Ok(p);
        }
    }
    Err(Error::config("region", "rejection sampling failed; region area is negligible"))
}

struct Context<'a> {
    cfg: &'a ScenarioConfig,
    days: Vec<(NaiveDate, i64)>,
    laws: Vec<[WeightedIndex<f64>; 2]>,
    region_bb: BoundingBox,
}

fn day_start_utc(date: NaiveDate, offset_secs: i64) -> i64 {
    date.and_time(NaiveTime::MIN).and_utc().timestamp() - offset_secs
}

fn user_logs(ctx: &Context<'_>, user: u32) -> Result<(Vec<GenPing>, Vec<GenSearch>)> {
    let cfg = ctx.cfg;
    let inside = user < cfg.n_users_in;
    let mut pings = Vec::new();
    let mut searches = Vec::new();
    let (h0, h1) = cfg.active_hours;
    let jitter = cfg.ping_jitter_minutes * 60;

    for (day_idx, &(date, start)) in ctx.days.iter().enumerate() {
        let mut rng = rng::stream(cfg.seed, &[USER_STREAM, user as u64, date_key(date)]);
        let mut mean = cfg.searches_per_user_day;
        if inside && date >= cfg.event_day {
            mean *= cfg.activity_damping;
        }
        let n = if mean > 0.0 {
            Poisson::new(mean).map_err(|e| Error::config("searches_per_user_day", e.to_string()))?.sample(&mut rng)
                as u64
        } else {
            0
        };
        let mut times: Vec<i64> = (0..n).map(|_| rng.random_range((h0 as i64 * 3600)..(h1 as i64 * 3600))).collect();
        times.sort_unstable();

        let law = &ctx.laws[day_idx][inside as usize];
        let first_ping = pings.len();
        for t in times {
            let query = law.sample(&mut rng) as u32;
            searches.push(GenSearch { user, ts: start + t, query });
            if rng.random::<f64>() >= cfg.location_dropout {
                let offset = rng.random_range(-jitter..=jitter);
                let local = (t + offset).clamp(0, 86_399);
                let at = if inside {
                    sample_in_region(&cfg.region, &ctx.region_bb, &mut rng)?
                } else {
                    sample_in_box(&cfg.outside_box, &mut rng)
                };
                pings.push(GenPing { user, ts: start + local, lat: at.lat, lon: at.lon });
            }
        }
        pings[first_ping..].sort_by_key(|p| p.ts);
    }
    Ok((pings, searches))
}

fn pv_series(cfg: &ScenarioConfig) -> Result<BTreeMap<NaiveDate, u64>> {
    let start = cfg
        .date_range
        .start
        .checked_sub_months(Months::new(12))
        .ok_or_else(|| Error::DateOverflow(format!("one year before {}", cfg.date_range.start)))?;
    let site = &cfg.pv_site;
    DateInterval::new(start, cfg.date_range.end)
        .days()
        .map(|date| {
            let mut mean = site.base_rate;
            if matches!(date.weekday(), Weekday::Sat | Weekday::Sun) {
                mean *= site.weekend_multiplier;
            }
            if site.lift_window.is_some_and(|w| w.contains(date)) {
                mean *= site.lift;
            }
            let mut rng = rng::stream(cfg.seed, &[PV_STREAM, date_key(date)]);
            let count = if mean > 0.0 {
                Poisson::new(mean).map_err(|e| Error::config("pv_site", e.to_string()))?.sample(&mut rng) as u64
            } else {
                0
            };
            Ok((date, count))
        })
        .collect()
}

/// Builds the synthetic world described by `cfg`.
///
/// Each (user, day) draws from its own RNG stream, so output is identical for
/// any thread count.
pub fn generate_scenario(cfg: &ScenarioConfig) -> Result<Scenario> {
    cfg.validate()?;
    let tz = parse_offset(&cfg.timezone)?;
    let offset_secs = tz.local_minus_utc() as i64;
    let days: Vec<(NaiveDate, i64)> = cfg.date_range.days().map(|d| (d, day_start_utc(d, offset_secs))).collect();
    let laws = days
        .iter()
        .map(|&(date, _)| {
            let law = |inside| {
                WeightedIndex::new(query_weights(cfg, date, inside))
                    .map_err(|e| Error::config("need_profiles", format!("bad sampling weights: {e}")))
            };
            Ok([law(false)?, law(true)?])
        })
        .collect::<Result<Vec<_>>>()?;
    let ctx = Context { cfg, days, laws, region_bb: cfg.region.bounding_box().expect("validated region is nonempty") };

    let n_users = cfg.n_users_in + cfg.n_users_out;
    let per_user: Vec<(Vec<GenPing>, Vec<GenSearch>)> =
        (0..n_users).into_par_iter().map(|u| user_logs(&ctx, u)).collect::<Result<_>>()?;
    let mut pings = Vec::with_capacity(per_user.iter().map(|(p, _)| p.len()).sum());
    let mut searches = Vec::with_capacity(per_user.iter().map(|(_, s)| s.len()).sum());
    for (p, s) in per_user {
        pings.extend(p);
        searches.extend(s);
    }

    Ok(Scenario {
        logs: GeneratedLogs {
            n_users_in: cfg.n_users_in,
            n_users_out: cfg.n_users_out,
            queries: query_table(cfg),
            pings,
            searches,
        },
        truth: GroundTruth::from_config(cfg),
        pv: pv_series(cfg)?,
    })
}
