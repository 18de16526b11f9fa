use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::corpus::{build_corpus, undersample, CorpusProvenance};
use super::stopwords::StopwordSet;
use super::train::{train, Hyperparams};
use crate::error::{Error, Result};
use crate::prepare::DailyCountRow;
use crate::provenance::Provenance;

pub const DEFAULT_TOP_N: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportStatus {
    Ok,
    Untrainable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub rank: usize,
    pub query: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDiagnostics {
    pub pos_instances: u64,
    pub neg_instances: u64,
    pub epochs: usize,
    pub final_loss: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportCounts {
    pub rows_in: u64,
    pub rows_out: u64,
    pub stopword_rows_removed: u64,
    pub pos_before_balancing: u64,
    pub neg_before_balancing: u64,
    pub pos_after_balancing: u64,
    pub neg_after_balancing: u64,
}

impl ReportCounts {
    fn from_provenance(p: &CorpusProvenance, removed: u64) -> Self {
        Self {
            rows_in: p.rows_in,
            rows_out: p.rows_out,
            stopword_rows_removed: removed,
            pos_before_balancing: p.pos_before,
            neg_before_balancing: p.neg_before,
            pos_after_balancing: p.pos_after,
            neg_after_balancing: p.neg_after,
        }
    }
}

/// Ranked information needs for one day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeedReport {
    pub date: NaiveDate,
    pub status: ReportStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub top_n: usize,
    pub top: Vec<RankedEntry>,
    pub all_positive: Vec<RankedEntry>,
    pub stopword_set_id: String,
    pub diagnostics: ReportDiagnostics,
    pub counts: ReportCounts,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl NeedReport {
    /// Score of `query` in the full positive list, or 0 if it is not listed.
    pub fn score_of(&self, query: &str) -> f64 {
        self.all_positive.iter().find(|e| e.query == query).map_or(0.0, |e| e.score)
    }

    pub fn top_queries(&self, n: usize) -> impl Iterator<Item = &str> {
        self.all_positive.iter().take(n).map(|e| e.query.as_str())
    }
}

/// Sorts by score descending, then query ascending, and assigns 1-based ranks.
pub fn rank_entries<'a>(scores: impl IntoIterator<Item = (&'a str, f64)>) -> Vec<RankedEntry> {
    let mut v: Vec<(&str, f64)> = scores.into_iter().collect();
    v.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    v.into_iter().enumerate().map(|(i, (q, s))| RankedEntry { rank: i + 1, query: q.to_owned(), score: s }).collect()
}

/// Trains the day's model with stopwords removed and ranks positive weights.
///
/// `rows` may span several dates; only those dated `date` are used. An
/// untrainable day yields a report with status `untrainable`, not an error.
pub fn score_day(
    date: NaiveDate,
    rows: &[DailyCountRow],
    stopwords: &StopwordSet,
    hyper: &Hyperparams,
    top_n: usize,
) -> Result<NeedReport> {
    hyper.validate()?;
    let day: Vec<DailyCountRow> = rows.iter().filter(|r| r.date == date).cloned().collect();
    let kept: Vec<DailyCountRow> = day.iter().filter(|r| !stopwords.contains(&r.query)).cloned().collect();
    let removed = (day.len() - kept.len()) as u64;

    let untrainable = |reason: String, counts: ReportCounts| NeedReport {
        date,
        status: ReportStatus::Untrainable,
        reason: Some(reason),
        top_n,
        top: Vec::new(),
        all_positive: Vec::new(),
        stopword_set_id: stopwords.id.clone(),
        diagnostics: ReportDiagnostics { pos_instances: 0, neg_instances: 0, epochs: 0, final_loss: None },
        counts,
        provenance: None,
    };

    let corpus = match build_corpus(date, &kept) {
        Ok(c) => c,
        Err(Error::Untrainable { reason, .. }) => {
            let mut counts = ReportCounts { stopword_rows_removed: removed, ..Default::default() };
            for r in &kept {
                match r.region_flag {
                    crate::prepare::RegionFlag::Inside => {
                        counts.rows_in += 1;
                        counts.pos_before_balancing += r.user_count;
                    }
                    crate::prepare::RegionFlag::Outside => {
                        counts.rows_out += 1;
                        counts.neg_before_balancing += r.user_count;
                    }
                }
            }
            return Ok(untrainable(reason, counts));
        }
        Err(e) => return Err(e),
    };
    let balanced = undersample(&corpus, hyper.seed)?;
    let model = train(&balanced, hyper)?;

    let all_positive = rank_entries(model.weights.iter().filter(|(_, w)| **w > 0.0).map(|(q, w)| (q.as_str(), *w)));
    let top = all_positive.iter().take(top_n).cloned().collect();
    Ok(NeedReport {
        date,
        status: ReportStatus::Ok,
        reason: None,
        top_n,
        top,
        all_positive,
        stopword_set_id: stopwords.id.clone(),
        diagnostics: ReportDiagnostics {
            pos_instances: balanced.pos_total(),
            neg_instances: balanced.neg_total(),
            epochs: model.diagnostics.epochs,
            final_loss: Some(model.diagnostics.final_loss),
        },
        counts: ReportCounts::from_provenance(&balanced.provenance, removed),
        provenance: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prepare::RegionFlag;
    use std::collections::{BTreeMap, BTreeSet};

    fn d() -> NaiveDate {
        NaiveDate::from_ymd_opt(2024, 1, 10).unwrap()
    }

    fn row(flag: RegionFlag, q: &str, c: u64) -> DailyCountRow {
        DailyCountRow { date: d(), region_flag: flag, query: q.into(), user_count: c }
    }

    fn stopwords(qs: &[&str]) -> StopwordSet {
        StopwordSet {
            id: "test".into(),
            queries: qs.iter().map(|q| q.to_string()).collect::<BTreeSet<_>>(),
            weights: BTreeMap::new(),
            ..StopwordSet::empty()
        }
    }

    #[test]
    fn stopword_removed_before_training() {
        let rows = vec![
            row(RegionFlag::Inside, "noto", 500),
            row(RegionFlag::Outside, "noto", 20),
            row(RegionFlag::Inside, "water", 60),
            row(RegionFlag::Outside, "water", 10),
            row(RegionFlag::Inside, "news", 100),
            row(RegionFlag::Outside, "news", 150),
        ];
        let r = score_day(d(), &rows, &stopwords(&["noto"]), &Hyperparams::default(), 15).unwrap();
        assert_eq!(r.status, ReportStatus::Ok);
        assert!(r.all_positive.iter().all(|e| e.query != "noto"));
        assert_eq!(r.top[0].query, "water");
        assert_eq!(r.counts.stopword_rows_removed, 2);
        assert_eq!(r.stopword_set_id, "test");
    }

    #[test]
    fn untrainable_day_reports_status() {
        let rows = vec![row(RegionFlag::Inside, "q", 9)];
        let r = score_day(d(), &rows, &StopwordSet::empty(), &Hyperparams::default(), 15).unwrap();
        assert_eq!(r.status, ReportStatus::Untrainable);
        assert!(r.top.is_empty());
        assert_eq!(r.counts.rows_in, 1);
    }

    #[test]
    fn truncates_to_top_n() {
        let mut rows = Vec::new();
        for i in 0..100u64 {
            rows.push(row(RegionFlag::Inside, &format!("need{i:03}"), 20 + i));
            rows.push(row(RegionFlag::Outside, &format!("need{i:03}"), 10));
        }
        rows.push(row(RegionFlag::Outside, "filler", 20 * 100 + 4950 - 1000));
        let r = score_day(d(), &rows, &StopwordSet::empty(), &Hyperparams::default(), 15).unwrap();
        assert_eq!(r.top.len(), 15);
        assert_eq!(r.all_positive.len(), 100);
        assert!(r.all_positive.windows(2).all(|w| w[0].score >= w[1].score));
        assert_eq!(r.top[..], r.all_positive[..15]);
    }

    #[test]
    fn ties_break_lexicographically() {
        let ranked = rank_entries([("b", 1.0), ("a", 1.0), ("c", 2.0)]);
        let order: Vec<_> = ranked.iter().map(|e| e.query.as_str()).collect();
        assert_eq!(order, ["c", "a", "b"]);
        assert_eq!(ranked[2].rank, 3);
    }
}
