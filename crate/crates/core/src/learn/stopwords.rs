use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::corpus::{pool_corpus, undersample};
use super::train::{train, Hyperparams};
use crate::error::{Error, Result};
use crate::prepare::DailyCountRow;
use crate::provenance::Provenance;
use crate::time::DateInterval;

pub const DEFAULT_TOP_M: usize = 300;
pub const DEFAULT_WEIGHT_FLOOR: f64 = std::f64::consts::LN_2;
pub const DEFAULT_BASELINE_DAYS: i64 = 28;

/// Queries that already discriminate the region in normal times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StopwordSet {
    pub id: String,
    pub queries: BTreeSet<String>,
    pub baseline: DateInterval,
    pub top_m: usize,
    pub weight_floor: f64,
    /// Baseline weight of every selected query.
    pub weights: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl StopwordSet {
    /// Empty set, used when scoring without a baseline.
    pub fn empty() -> Self {
        Self {
            id: "none".into(),
            queries: BTreeSet::new(),
            baseline: DateInterval::new(NaiveDate::MIN, NaiveDate::MIN),
            top_m: 0,
            weight_floor: DEFAULT_WEIGHT_FLOOR,
            weights: BTreeMap::new(),
            provenance: None,
        }
    }

    pub fn contains(&self, query: &str) -> bool {
        self.queries.contains(query)
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    fn compute_id(queries: &BTreeSet<String>, baseline: &DateInterval, top_m: usize, floor: f64) -> String {
        let mut h = Sha256::new();
        h.update(baseline.start.to_string());
        h.update(b"..");
        h.update(baseline.end.to_string());
        h.update(top_m.to_le_bytes());
        h.update(floor.to_bits().to_le_bytes());
        for q in queries {
            h.update((q.len() as u64).to_le_bytes());
            h.update(q.as_bytes());
        }
        hex::encode(&h.finalize()[..8])
    }
}

/// The 28-day window ending the day before `event_day`.
pub fn default_baseline(event_day: NaiveDate) -> Result<DateInterval> {
    let end = event_day.pred_opt().ok_or_else(|| Error::DateOverflow(format!("day before {event_day}")))?;
    let start = end
        .checked_sub_signed(chrono::Duration::days(DEFAULT_BASELINE_DAYS - 1))
        .ok_or_else(|| Error::DateOverflow(format!("baseline start before {end}")))?;
    Ok(DateInterval::new(start, end))
}

/// Trains one pooled, balanced model over the baseline window and keeps the
/// queries weighted at least `weight_floor`, at most `top_m` of them.
///
/// `event_day`, when known, must fall strictly after the window.
pub fn derive_stopwords(
    rows: &[DailyCountRow],
    baseline: DateInterval,
    event_day: Option<NaiveDate>,
    hyper: &Hyperparams,
    top_m: usize,
    weight_floor: f64,
) -> Result<StopwordSet> {
    if baseline.is_empty() {
        return Err(Error::config("baseline", "window is empty"));
    }
    if let Some(event) = event_day {
        if baseline.end >= event {
            return Err(Error::config("baseline.end", format!("must be before the event day {event}")));
        }
    }
    let window: Vec<DailyCountRow> = rows.iter().filter(|r| baseline.contains(r.date)).cloned().collect();
    let pooled = pool_corpus(baseline.end, &window)?;
    let balanced = undersample(&pooled, hyper.seed)?;
    let model = train(&balanced, hyper)?;

    let mut ranked: Vec<(&String, f64)> =
        model.weights.iter().map(|(q, w)| (q, *w)).filter(|(_, w)| *w >= weight_floor).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.truncate(top_m);

    let weights: BTreeMap<String, f64> = ranked.into_iter().map(|(q, w)| (q.clone(), w)).collect();
    let queries: BTreeSet<String> = weights.keys().cloned().collect();
    Ok(StopwordSet {
        id: StopwordSet::compute_id(&queries, &baseline, top_m, weight_floor),
        queries,
        baseline,
        top_m,
        weight_floor,
        weights,
        provenance: None,
    })
}
