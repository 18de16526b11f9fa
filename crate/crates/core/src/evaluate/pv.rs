use std::collections::BTreeMap;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::time::DateInterval;

pub const MOVING_AVERAGE_DAYS: usize = 7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PvPoint {
    pub date: NaiveDate,
    pub ratio: Option<f64>,
    pub moving_average: Option<f64>,
}

/// Page views relative to the same calendar day a year earlier, with a
/// trailing 7-day mean of the defined ratios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PvScoreSeries {
    pub points: Vec<PvPoint>,
}

impl PvScoreSeries {
    pub fn get(&self, date: NaiveDate) -> Option<&PvPoint> {
        self.points.iter().find(|p| p.date == date)
    }
}

/// Feb 29 has no prior-year counterpart and yields `None`.
pub fn same_day_prior_year(date: NaiveDate) -> Option<NaiveDate> {
    date.with_year(date.year() - 1)
}

pub fn pv_score(pv: &BTreeMap<NaiveDate, u64>, range: DateInterval) -> PvScoreSeries {
    let ratios: Vec<(NaiveDate, Option<f64>)> = range
        .days()
        .map(|date| {
            let ratio = match (pv.get(&date), same_day_prior_year(date).and_then(|p| pv.get(&p))) {
                (Some(&cur), Some(&prev)) if prev > 0 => Some(cur as f64 / prev as f64),
                _ => None,
            };
            (date, ratio)
        })
        .collect();
    let points = ratios
        .iter()
        .enumerate()
        .map(|(i, &(date, ratio))| {
            let lo = (i + 1).saturating_sub(MOVING_AVERAGE_DAYS);
            let defined: Vec<f64> = ratios[lo..=i].iter().filter_map(|(_, r)| *r).collect();
            let moving_average = (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64);
            PvPoint { date, ratio, moving_average }
        })
        .collect();
    PvScoreSeries { points }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    #[test]
    fn ratio_against_prior_year() {
        let pv = BTreeMap::from([(d(2024, 1, 10), 120), (d(2023, 1, 10), 100)]);
        let s = pv_score(&pv, DateInterval::new(d(2024, 1, 10), d(2024, 1, 10)));
        assert!((s.points[0].ratio.unwrap() - 1.2).abs() < 1e-12);
    }

    #[test]
    fn constant_years_are_exactly_one() {
        let mut pv = BTreeMap::new();
        for date in DateInterval::new(d(2023, 1, 1), d(2024, 3, 31)).days() {
            pv.insert(date, 500);
        }
        let s = pv_score(&pv, DateInterval::new(d(2024, 1, 1), d(2024, 3, 31)));
        for p in &s.points {
            if p.date == d(2024, 2, 29) {
                assert_eq!(p.ratio, None);
            } else {
                assert_eq!(p.ratio, Some(1.0));
            }
            assert_eq!(p.moving_average, Some(1.0));
        }
    }

    #[test]
    fn spike_in_window() {
        let mut pv = BTreeMap::new();
        for (i, date) in DateInterval::new(d(2024, 1, 1), d(2024, 1, 7)).days().enumerate() {
            pv.insert(date, if i == 6 { 800 } else { 100 });
            pv.insert(same_day_prior_year(date).unwrap(), 100);
        }
        let s = pv_score(&pv, DateInterval::new(d(2024, 1, 1), d(2024, 1, 7)));
        assert_eq!(s.points[6].moving_average, Some(2.0));
        // Short window at series start uses what exists.
        assert_eq!(s.points[0].moving_average, Some(1.0));
    }

    #[test]
    fn missing_prior_day_is_excluded() {
        let pv = BTreeMap::from([
            (d(2024, 1, 1), 100),
            (d(2023, 1, 1), 50),
            (d(2024, 1, 2), 300),
            (d(2024, 1, 3), 100),
            (d(2023, 1, 3), 100),
        ]);
        let s = pv_score(&pv, DateInterval::new(d(2024, 1, 1), d(2024, 1, 3)));
        assert_eq!(s.points[1].ratio, None);
        assert_eq!(s.points[1].moving_average, Some(2.0));
        assert_eq!(s.points[2].moving_average, Some(1.5));
    }

    #[test]
    fn leap_day_has_no_prior() {
        assert_eq!(same_day_prior_year(d(2024, 2, 29)), None);
        assert_eq!(same_day_prior_year(d(2024, 3, 1)), Some(d(2023, 3, 1)));
    }
}
