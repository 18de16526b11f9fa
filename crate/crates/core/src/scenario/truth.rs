use std::collections::BTreeSet;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::config::{Category, ScenarioConfig};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TruthNeed {
    pub query: String,
    pub category: Category,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthDay {
    pub date: NaiveDate,
    pub needs: Vec<TruthNeed>,
    pub media: Vec<String>,
}

/// What the generator injected, per day. A pure function of the config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub event_day: NaiveDate,
    pub region_markers: Vec<String>,
    pub days: Vec<TruthDay>,
}

impl GroundTruth {
    pub fn from_config(cfg: &ScenarioConfig) -> Self {
        let days = cfg
            .date_range
            .days()
            .map(|date| {
                let needs: BTreeSet<TruthNeed> = cfg
                    .need_profiles
                    .iter()
                    .filter(|n| n.is_active(date))
                    .map(|n| TruthNeed { query: n.query.clone(), category: n.category })
                    .collect();
                let media: BTreeSet<String> = cfg
                    .media_spikes
                    .iter()
                    .filter(|m| m.active_window.contains(date))
                    .map(|m| m.query.clone())
                    .collect();
                TruthDay { date, needs: needs.into_iter().collect(), media: media.into_iter().collect() }
            })
            .collect();
        let markers: BTreeSet<String> = cfg.region_markers.iter().map(|m| m.query.clone()).collect();
        Self { event_day: cfg.event_day, region_markers: markers.into_iter().collect(), days }
    }

    pub fn day(&self, date: NaiveDate) -> Option<&TruthDay> {
        self.days.binary_search_by_key(&date, |d| d.date).ok().map(|i| &self.days[i])
    }

    /// Every query that is a need on at least one day.
    pub fn need_queries(&self) -> BTreeSet<&str> {
        self.days.iter().flat_map(|d| d.needs.iter().map(|n| n.query.as_str())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::presets;

    #[test]
    fn pure_function_of_config() {
        let cfg = presets::demo();
        let a = GroundTruth::from_config(&cfg);
        let mut other_seed = cfg.clone();
        other_seed.seed ^= 0xdead_beef;
        assert_eq!(a, GroundTruth::from_config(&other_seed));
        assert_eq!(a.days.len() as i64, cfg.date_range.num_days());
    }

    #[test]
    fn needs_exclude_media_and_markers() {
        let t = GroundTruth::from_config(&presets::demo());
        for d in &t.days {
            for n in &d.needs {
                assert!(!d.media.contains(&n.query));
                assert!(!t.region_markers.contains(&n.query));
            }
        }
        let before = t.day(t.event_day.pred_opt().unwrap()).unwrap();
        assert!(before.needs.is_empty());
        assert!(!t.day(t.event_day).unwrap().needs.is_empty());
    }

    #[test]
    fn weekday_filter() {
        use chrono::{Datelike, Weekday};
        let t = GroundTruth::from_config(&presets::weekend());
        for d in &t.days {
            if !d.needs.is_empty() {
                assert!(matches!(d.date.weekday(), Weekday::Sat | Weekday::Sun));
                assert!(d.date >= t.event_day);
            }
        }
        assert_eq!(t.days.iter().filter(|d| !d.needs.is_empty()).count(), 8);
    }
}
