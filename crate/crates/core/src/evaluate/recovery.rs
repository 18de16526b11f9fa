use std::collections::BTreeSet;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learn::NeedReport;
use crate::scenario::GroundTruth;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DayRecovery {
    pub date: NaiveDate,
    pub listed: usize,
    pub truth_needs: usize,
    pub hits: usize,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub media_inclusions: usize,
    pub marker_inclusions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryMetrics {
    pub n: usize,
    pub days: Vec<DayRecovery>,
    pub mean_precision: Option<f64>,
    /// Mean over days with at least one active truth need.
    pub mean_recall: Option<f64>,
    pub false_inclusion_media: usize,
    pub false_inclusion_marker: usize,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

/// Precision and recall of each report's top `n` against the injected needs.
///
/// Media-spike and region-marker queries are tallied separately as false
/// inclusions. Reports and truth must cover exactly the same dates.
pub fn evaluate_recovery(reports: &[NeedReport], truth: &GroundTruth, n: usize) -> Result<RecoveryMetrics> {
    let report_dates: BTreeSet<NaiveDate> = reports.iter().map(|r| r.date).collect();
    let truth_dates: BTreeSet<NaiveDate> = truth.days.iter().map(|d| d.date).collect();
    if report_dates.len() != reports.len() {
        return Err(Error::DateMismatch("duplicate report dates".into()));
    }
    if report_dates != truth_dates {
        let missing_truth: Vec<_> = report_dates.difference(&truth_dates).collect();
        let missing_reports: Vec<_> = truth_dates.difference(&report_dates).collect();
        return Err(Error::DateMismatch(format!(
            "reports without truth: {missing_truth:?}; truth days without reports: {missing_reports:?}"
        )));
    }
    let markers: BTreeSet<&str> = truth.region_markers.iter().map(String::as_str).collect();

    let mut sorted: Vec<&NeedReport> = reports.iter().collect();
    sorted.sort_by_key(|r| r.date);
    let days: Vec<DayRecovery> = sorted
        .into_iter()
        .map(|report| {
            let day = truth.day(report.date).expect("dates checked above");
            let needs: BTreeSet<&str> = day.needs.iter().map(|n| n.query.as_str()).collect();
            let media: BTreeSet<&str> = day.media.iter().map(String::as_str).collect();
            let listed: Vec<&str> = report.top_queries(n).collect();
            let hits = listed.iter().filter(|q| needs.contains(*q)).count();
            DayRecovery {
                date: report.date,
                listed: listed.len(),
                truth_needs: needs.len(),
                hits,
                precision: (!listed.is_empty()).then(|| hits as f64 / listed.len() as f64),
                recall: (!needs.is_empty()).then(|| hits as f64 / needs.len() as f64),
                media_inclusions: listed.iter().filter(|q| media.contains(*q)).count(),
                marker_inclusions: listed.iter().filter(|q| markers.contains(*q)).count(),
            }
        })
        .collect();

    Ok(RecoveryMetrics {
        n,
        mean_precision: mean(days.iter().filter_map(|d| d.precision)),
        mean_recall: mean(days.iter().filter_map(|d| d.recall)),
        false_inclusion_media: days.iter().map(|d| d.media_inclusions).sum(),
        false_inclusion_marker: days.iter().map(|d| d.marker_inclusions).sum(),
        days,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learn::{rank_entries, ReportCounts, ReportDiagnostics, ReportStatus};
    use crate::scenario::{Category, TruthDay, TruthNeed};

    fn d(day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2024, 1, day).unwrap()
    }

    fn report(date: NaiveDate, queries: &[&str]) -> NeedReport {
        let all = rank_entries(queries.iter().enumerate().map(|(i, q)| (*q, 100.0 - i as f64)));
        NeedReport {
            date,
            status: ReportStatus::Ok,
            reason: None,
            top_n: 15,
            top: all.iter().take(15).cloned().collect(),
            all_positive: all,
            stopword_set_id: "none".into(),
            diagnostics: ReportDiagnostics { pos_instances: 0, neg_instances: 0, epochs: 0, final_loss: None },
            counts: ReportCounts::default(),
            provenance: None,
        }
    }

    fn truth(days: Vec<(NaiveDate, Vec<&str>, Vec<&str>)>) -> GroundTruth {
        GroundTruth {
            event_day: d(1),
            region_markers: vec!["noto".into()],
            days: days
                .into_iter()
                .map(|(date, needs, media)| TruthDay {
                    date,
                    needs: needs
                        .iter()
                        .map(|q| TruthNeed { query: q.to_string(), category: Category::Water })
                        .collect(),
                    media: media.iter().map(|q| q.to_string()).collect(),
                })
                .collect(),
        }
    }

    #[test]
    fn recall_eight_of_ten() {
        let needs: Vec<String> = (0..10).map(|i| format!("need{i}")).collect();
        let need_refs: Vec<&str> = needs.iter().map(String::as_str).collect();
        let mut listed: Vec<&str> = need_refs[..8].to_vec();
        let noise: Vec<String> = (0..7).map(|i| format!("noise{i}")).collect();
        listed.extend(noise.iter().map(String::as_str));
        let m = evaluate_recovery(&[report(d(1), &listed)], &truth(vec![(d(1), need_refs, vec![])]), 15).unwrap();
        assert_eq!(m.days[0].recall, Some(0.8));
        assert!((m.days[0].precision.unwrap() - 8.0 / 15.0).abs() < 1e-12);
    }

    #[test]
    fn empty_truth_day() {
        let m = evaluate_recovery(&[report(d(1), &["x", "y"])], &truth(vec![(d(1), vec![], vec![])]), 15).unwrap();
        assert_eq!(m.days[0].recall, None);
        assert_eq!(m.days[0].precision, Some(0.0));
        assert_eq!(m.mean_recall, None);
    }

    #[test]
    fn media_and_marker_inclusions() {
        let t = truth(vec![(d(1), vec!["w"], vec!["news"]), (d(2), vec!["w"], vec![])]);
        let m =
            evaluate_recovery(&[report(d(1), &["news", "w"]), report(d(2), &["noto", "w", "news"])], &t, 15).unwrap();
        assert_eq!(m.false_inclusion_media, 1);
        assert_eq!(m.false_inclusion_marker, 1);
        assert_eq!(m.mean_recall, Some(1.0));
    }

    #[test]
    fn n_caps_at_list_length() {
        let m =
            evaluate_recovery(&[report(d(1), &["w", "a", "b"])], &truth(vec![(d(1), vec!["w"], vec![])]), 2).unwrap();
        assert_eq!(m.days[0].listed, 2);
        assert_eq!(m.days[0].precision, Some(0.5));
    }

    #[test]
    fn date_mismatch() {
        let t = truth(vec![(d(1), vec![], vec![])]);
        assert!(matches!(evaluate_recovery(&[report(d(2), &[])], &t, 15), Err(Error::DateMismatch(_))));
        assert!(matches!(evaluate_recovery(&[], &t, 15), Err(Error::DateMismatch(_))));
    }
}
