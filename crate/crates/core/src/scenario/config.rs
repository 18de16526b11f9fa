use std::collections::HashSet;

use chrono::{NaiveDate, Weekday};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prepare::{normalize_query, BoundingBox, RegionSpec};
use crate::time::{parse_offset, DateInterval};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Traffic,
    Water,
    Energy,
    Logistics,
    LifeReconstruction,
    Other,
}

/// A genuine in-region need: the query's in-region sampling weight is
/// multiplied by `lift` on active days.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NeedProfile {
    pub query: String,
    pub category: Category,
    pub lift: f64,
    pub active_window: DateInterval,
    /// Restricts activity to these weekdays (reporting timezone).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weekdays: Option<Vec<Weekday>>,
    #[serde(default = "default_base_weight")]
    pub base_weight: f64,
}

impl NeedProfile {
    pub fn is_active(&self, date: NaiveDate) -> bool {
        use chrono::Datelike;
        self.active_window.contains(date) && self.weekdays.as_ref().is_none_or(|w| w.contains(&date.weekday()))
    }
}

/// News-driven interest: the same lift for both populations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediaSpike {
    pub query: String,
    pub lift: f64,
    pub active_window: DateInterval,
    #[serde(default = "default_base_weight")]
    pub base_weight: f64,
}

/// Place-name style query lifted in-region on every day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionMarker {
    pub query: String,
    pub lift: f64,
    #[serde(default = "default_base_weight")]
    pub base_weight: f64,
}

/// Daily page views of one service: Poisson around
/// `base_rate × weekend_multiplier (Sat/Sun) × lift (inside lift_window)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PvSite {
    pub base_rate: f64,
    #[serde(default = "one")]
    pub weekend_multiplier: f64,
    #[serde(default = "one")]
    pub lift: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lift_window: Option<DateInterval>,
}

fn default_base_weight() -> f64 {
    0.01
}

fn one() -> f64 {
    1.0
}

fn default_tz() -> String {
    crate::prepare::DEFAULT_TZ.into()
}

fn default_dropout() -> f64 {
    0.05
}

fn default_jitter() -> i64 {
    30
}

fn default_active_hours() -> (u32, u32) {
    (7, 23)
}

/// Full parameterization of a synthetic world. Background queries are
/// `term-00001 … term-NNNNN` with Zipf weights `1 / rank^zipf_exponent`;
/// special queries add `base_weight` on that scale (rank 1 has weight 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub date_range: DateInterval,
    #[serde(default = "default_tz")]
    pub timezone: String,
    pub n_users_in: u32,
    pub n_users_out: u32,
    pub region: RegionSpec,
    /// Out-region users are placed uniformly in this box.
    pub outside_box: BoundingBox,
    pub vocab_size: u32,
    pub zipf_exponent: f64,
    pub searches_per_user_day: f64,
    pub activity_damping: f64,
    pub event_day: NaiveDate,
    #[serde(default = "default_dropout")]
    pub location_dropout: f64,
    /// Pings land within ± this many minutes of their search.
    #[serde(default = "default_jitter")]
    pub ping_jitter_minutes: i64,
    /// Local hours `[from, to)` in which searches happen.
    #[serde(default = "default_active_hours")]
    pub active_hours: (u32, u32),
    #[serde(default)]
    pub need_profiles: Vec<NeedProfile>,
    #[serde(default)]
    pub media_spikes: Vec<MediaSpike>,
    #[serde(default)]
    pub region_markers: Vec<RegionMarker>,
    pub pv_site: PvSite,
}

pub fn background_token(rank: u32) -> String {
    format!("term-{rank:05}")
}

fn is_background_token(q: &str, vocab_size: u32) -> bool {
    q.strip_prefix("term-")
        .filter(|d| d.len() == 5 && d.bytes().all(|b| b.is_ascii_digit()))
        .and_then(|d| d.parse::<u32>().ok())
        .is_some_and(|r| r >= 1 && r <= vocab_size)
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| Error::malformed("scenario config", e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let range = &self.date_range;
        if range.is_empty() {
            return Err(Error::config("date_range", "end precedes start"));
        }
        parse_offset(&self.timezone).map_err(|_| Error::config("timezone", "expected ±HH:MM"))?;
        if self.n_users_in == 0 {
            return Err(Error::config("n_users_in", "must be >= 1"));
        }
        if self.n_users_out == 0 {
            return Err(Error::config("n_users_out", "must be >= 1"));
        }
        if self.vocab_size == 0 || self.vocab_size > 99_999 {
            return Err(Error::config("vocab_size", "must be in 1..=99999"));
        }
        if !(self.zipf_exponent > 0.0 && self.zipf_exponent.is_finite()) {
            return Err(Error::config("zipf_exponent", "must be finite and > 0"));
        }
        if !(self.searches_per_user_day >= 0.0 && self.searches_per_user_day.is_finite()) {
            return Err(Error::config("searches_per_user_day", "must be finite and >= 0"));
        }
        if !(self.activity_damping > 0.0 && self.activity_damping <= 1.0) {
            return Err(Error::config("activity_damping", "must be in (0, 1]"));
        }
        if !range.contains(self.event_day) {
            return Err(Error::config("event_day", "must lie within date_range"));
        }
        if !(0.0..=1.0).contains(&self.location_dropout) {
            return Err(Error::config("location_dropout", "must be in [0, 1]"));
        }
        if !(1..=90).contains(&self.ping_jitter_minutes) {
            return Err(Error::config("ping_jitter_minutes", "must be in 1..=90"));
        }
        let (h0, h1) = self.active_hours;
        if h0 >= h1 || h1 > 24 {
            return Err(Error::config("active_hours", "need 0 <= from < to <= 24"));
        }
        self.region.validate_at("region")?;
        self.outside_box.validate("outside_box")?;
        let region_bb = self.region.bounding_box().expect("validated region is nonempty");
        if region_bb.intersects(&self.outside_box) {
            return Err(Error::config("outside_box", "must be disjoint from the region's bounding box"));
        }

        let mut seen = HashSet::new();
        let mut check_query = |field: String, q: &str| -> Result<()> {
            if q.is_empty() || normalize_query(q) != q {
                return Err(Error::config(field, "query must be non-empty and already normalized"));
            }
            if is_background_token(q, self.vocab_size) {
                return Err(Error::config(field, "query collides with a background vocabulary token"));
            }
            if !seen.insert(q.to_owned()) {
                return Err(Error::config(field, "query used by more than one special profile"));
            }
            Ok(())
        };
        let check_weight = |field: String, lift: f64, base: f64| -> Result<()> {
            if !(lift >= 1.0 && lift.is_finite()) {
                return Err(Error::config(format!("{field}.lift"), "must be finite and >= 1"));
            }
            if !(base > 0.0 && base.is_finite()) {
                return Err(Error::config(format!("{field}.base_weight"), "must be finite and > 0"));
            }
            Ok(())
        };
        for (i, n) in self.need_profiles.iter().enumerate() {
            let f = format!("need_profiles[{i}]");
            check_query(format!("{f}.query"), &n.query)?;
            check_weight(f.clone(), n.lift, n.base_weight)?;
            if n.active_window.is_empty() || !range.contains_interval(&n.active_window) {
                return Err(Error::config(format!("{f}.active_window"), "must be a nonempty subrange of date_range"));
            }
            if n.weekdays.as_ref().is_some_and(|w| w.is_empty()) {
                return Err(Error::config(format!("{f}.weekdays"), "must not be empty when given"));
            }
        }
        for (i, m) in self.media_spikes.iter().enumerate() {
            let f = format!("media_spikes[{i}]");
            check_query(format!("{f}.query"), &m.query)?;
            check_weight(f.clone(), m.lift, m.base_weight)?;
            if m.active_window.is_empty() || !range.contains_interval(&m.active_window) {
                return Err(Error::config(format!("{f}.active_window"), "must be a nonempty subrange of date_range"));
            }
        }
        for (i, m) in self.region_markers.iter().enumerate() {
            let f = format!("region_markers[{i}]");
            check_query(format!("{f}.query"), &m.query)?;
            check_weight(f, m.lift, m.base_weight)?;
        }

        let pv = &self.pv_site;
        if !(pv.base_rate >= 0.0 && pv.base_rate.is_finite()) {
            return Err(Error::config("pv_site.base_rate", "must be finite and >= 0"));
        }
        if !(pv.weekend_multiplier > 0.0 && pv.weekend_multiplier.is_finite()) {
            return Err(Error::config("pv_site.weekend_multiplier", "must be finite and > 0"));
        }
        if !(pv.lift > 0.0 && pv.lift.is_finite()) {
            return Err(Error::config("pv_site.lift", "must be finite and > 0"));
        }
        if pv.lift_window.is_some_and(|w| w.is_empty()) {
            return Err(Error::config("pv_site.lift_window", "must be nonempty"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::presets;

    #[test]
    fn presets_validate() {
        presets::demo().validate().unwrap();
        presets::weekend().validate().unwrap();
    }

    #[test]
    fn errors_carry_field_paths() {
        let mut c = presets::demo();
        c.need_profiles[3].lift = 0.5;
        let e = c.validate().unwrap_err().to_string();
        assert!(e.contains("need_profiles[3].lift"), "{e}");

        let mut c = presets::demo();
        c.event_day = c.date_range.end.succ_opt().unwrap();
        assert!(c.validate().unwrap_err().to_string().contains("event_day"));

        let mut c = presets::demo();
        c.media_spikes[0].query = "term-00007".into();
        assert!(c.validate().unwrap_err().to_string().contains("media_spikes[0].query"));

        let mut c = presets::demo();
        c.region_markers[0].query = c.need_profiles[0].query.clone();
        assert!(c.validate().unwrap_err().to_string().contains("region_markers[0].query"));

        let mut c = presets::demo();
        c.n_users_in = 0;
        assert!(c.validate().unwrap_err().to_string().contains("n_users_in"));

        let mut c = presets::demo();
        c.outside_box = c.region.bounding_box().unwrap();
        assert!(c.validate().unwrap_err().to_string().contains("outside_box"));
    }

    #[test]
    fn unknown_fields_rejected() {
        let mut v = serde_json::to_value(presets::demo()).unwrap();
        v["bogus"] = serde_json::json!(1);
        assert!(ScenarioConfig::from_json(&v.to_string()).is_err());
    }

    #[test]
    fn background_token_detection() {
        assert!(is_background_token("term-00001", 10));
        assert!(!is_background_token("term-00011", 10));
        assert!(!is_background_token("term-1", 10));
        assert_eq!(background_token(42), "term-00042");
    }
}
