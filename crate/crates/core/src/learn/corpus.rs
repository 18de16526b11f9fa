use std::collections::BTreeMap;

use chrono::NaiveDate;
use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prepare::{DailyCountRow, RegionFlag};
use crate::rng;

/// Class sizes before and after balancing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusProvenance {
    pub rows_in: u64,
    pub rows_out: u64,
    pub pos_before: u64,
    pub neg_before: u64,
    pub pos_after: u64,
    pub neg_after: u64,
}

/// One-hot training instances stored as per-query multiplicities.
///
/// Each counted user of an Inside row is one positive instance of that query,
/// each counted user of an Outside row one negative instance.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingCorpus {
    pub date: NaiveDate,
    pub positives: BTreeMap<String, u64>,
    pub negatives: BTreeMap<String, u64>,
    pub provenance: CorpusProvenance,
}

impl TrainingCorpus {
    pub fn from_counts(date: NaiveDate, positives: BTreeMap<String, u64>, negatives: BTreeMap<String, u64>) -> Self {
        let mut c = Self { date, positives, negatives, provenance: CorpusProvenance::default() };
        c.positives.retain(|_, n| *n > 0);
        c.negatives.retain(|_, n| *n > 0);
        c.provenance.rows_in = c.positives.len() as u64;
        c.provenance.rows_out = c.negatives.len() as u64;
        c.provenance.pos_before = c.pos_total();
        c.provenance.neg_before = c.neg_total();
        c.provenance.pos_after = c.provenance.pos_before;
        c.provenance.neg_after = c.provenance.neg_before;
        c
    }

    pub fn pos_total(&self) -> u64 {
        self.positives.values().sum()
    }

    pub fn neg_total(&self) -> u64 {
        self.negatives.values().sum()
    }

    pub fn is_balanced(&self) -> bool {
        self.pos_total() == self.neg_total()
    }

    /// Sorted union of queries in either class.
    pub fn queries(&self) -> Vec<&str> {
        let mut q: Vec<&str> = self.positives.keys().chain(self.negatives.keys()).map(String::as_str).collect();
        q.sort_unstable();
        q.dedup();
        q
    }

    /// (query, pos, neg) in query order.
    pub fn per_query(&self) -> Vec<(&str, u64, u64)> {
        self.queries()
            .into_iter()
            .map(|q| (q, self.positives.get(q).copied().unwrap_or(0), self.negatives.get(q).copied().unwrap_or(0)))
            .collect()
    }

    pub fn swap_labels(&self) -> TrainingCorpus {
        let mut c = self.clone();
        std::mem::swap(&mut c.positives, &mut c.negatives);
        c
    }

    pub fn remove_queries(&mut self, drop: impl Fn(&str) -> bool) {
        self.positives.retain(|q, _| !drop(q));
        self.negatives.retain(|q, _| !drop(q));
        self.provenance.rows_in = self.positives.len() as u64;
        self.provenance.rows_out = self.negatives.len() as u64;
        self.provenance.pos_before = self.pos_total();
        self.provenance.neg_before = self.neg_total();
        self.provenance.pos_after = self.provenance.pos_before;
        self.provenance.neg_after = self.provenance.neg_before;
    }

    pub fn ensure_trainable(&self) -> Result<()> {
        let reason = match (self.pos_total(), self.neg_total()) {
            (0, 0) => "no rows",
            (0, _) => "no inside (positive) instances",
            (_, 0) => "no outside (negative) instances",
            _ => return Ok(()),
        };
        Err(Error::Untrainable { date: self.date, reason: reason.into() })
    }
}

/// Expands one day's rows into an unbalanced corpus.
pub fn build_corpus(date: NaiveDate, rows: &[DailyCountRow]) -> Result<TrainingCorpus> {
    let mut pos = BTreeMap::new();
    let mut neg = BTreeMap::new();
    for r in rows {
        if r.date != date {
            return Err(Error::malformed("corpus rows", format!("row dated {} in corpus for {date}", r.date)));
        }
        let side = match r.region_flag {
            RegionFlag::Inside => &mut pos,
            RegionFlag::Outside => &mut neg,
        };
        *side.entry(r.query.clone()).or_insert(0) += r.user_count;
    }
    let corpus = TrainingCorpus::from_counts(date, pos, neg);
    corpus.ensure_trainable()?;
    Ok(corpus)
}

/// Pools rows from many dates into one corpus labelled `label_date`,
/// summing user counts per (flag, query).
pub fn pool_corpus(label_date: NaiveDate, rows: &[DailyCountRow]) -> Result<TrainingCorpus> {
    let mut pos = BTreeMap::new();
    let mut neg = BTreeMap::new();
    for r in rows {
        let side = match r.region_flag {
            RegionFlag::Inside => &mut pos,
            RegionFlag::Outside => &mut neg,
        };
        *side.entry(r.query.clone()).or_insert(0) += r.user_count;
    }
    let corpus = TrainingCorpus::from_counts(label_date, pos, neg);
    corpus.ensure_trainable()?;
    Ok(corpus)
}

fn downsample(counts: &BTreeMap<String, u64>, keep: u64, rng: &mut rng::StreamRng) -> BTreeMap<String, u64> {
    let total: u64 = counts.values().sum();
    if keep >= total {
        return counts.clone();
    }
    // Instances laid out in query order; pick `keep` positions without replacement.
    let bounds: Vec<(u64, &String)> = counts
        .iter()
        .scan(0u64, |acc, (q, n)| {
            *acc += n;
            Some((*acc, q))
        })
        .collect();
    let mut picked: Vec<usize> = sample(rng, total as usize, keep as usize).into_vec();
    picked.sort_unstable();
    let mut out = BTreeMap::new();
    let mut b = 0;
    for idx in picked {
        while bounds[b].0 <= idx as u64 {
            b += 1;
        }
        *out.entry(bounds[b].1.clone()).or_insert(0) += 1;
    }
    out
}

/// Randomly drops majority-class instances until both classes have the
/// minority's size. Deterministic per (seed, date).
pub fn undersample(corpus: &TrainingCorpus, seed: u64) -> Result<TrainingCorpus> {
    corpus.ensure_trainable()?;
    let (p, n) = (corpus.pos_total(), corpus.neg_total());
    let mut out = corpus.clone();
    let mut rng = rng::date_stream(seed, corpus.date);
    if p > n {
        out.positives = downsample(&corpus.positives, n, &mut rng);
    } else if n > p {
        out.negatives = downsample(&corpus.negatives, p, &mut rng);
    }
    out.provenance.pos_after = out.pos_total();
    out.provenance.neg_after = out.neg_total();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d() -> NaiveDate {
        NaiveDate::from_ymd_opt(2024, 1, 5).unwrap()
    }

    fn row(flag: RegionFlag, q: &str, c: u64) -> DailyCountRow {
        DailyCountRow { date: d(), region_flag: flag, query: q.into(), user_count: c }
    }

    fn corpus(pos: &[(&str, u64)], neg: &[(&str, u64)]) -> TrainingCorpus {
        TrainingCorpus::from_counts(
            d(),
            pos.iter().map(|(q, c)| (q.to_string(), *c)).collect(),
            neg.iter().map(|(q, c)| (q.to_string(), *c)).collect(),
        )
    }

    #[test]
    fn ten_fold_example() {
        let c = build_corpus(
            d(),
            &[row(RegionFlag::Inside, "water outage", 30), row(RegionFlag::Outside, "water outage", 3)],
        )
        .unwrap();
        assert_eq!(c.positives["water outage"], 30);
        assert_eq!(c.negatives["water outage"], 3);
    }

    #[test]
    fn untrainable_days() {
        assert!(matches!(build_corpus(d(), &[]), Err(Error::Untrainable { .. })));
        assert!(matches!(build_corpus(d(), &[row(RegionFlag::Inside, "q", 9)]), Err(Error::Untrainable { .. })));
    }

    #[test]
    fn balance_sizes() {
        let c = corpus(&[("a", 60), ("b", 40)], &[("a", 10), ("c", 30)]);
        let b = undersample(&c, 1).unwrap();
        assert_eq!((b.pos_total(), b.neg_total()), (40, 40));
        assert_eq!(b.negatives, c.negatives);

        let c = corpus(&[("a", 40)], &[("a", 100)]);
        let b = undersample(&c, 1).unwrap();
        assert_eq!((b.pos_total(), b.neg_total()), (40, 40));

        let c = corpus(&[("a", 7), ("b", 3)], &[("a", 2), ("b", 8)]);
        assert_eq!(undersample(&c, 1).unwrap().positives, c.positives);
        assert_eq!(undersample(&c, 1).unwrap().negatives, c.negatives);
    }

    #[test]
    fn undersample_is_seeded() {
        let c = corpus(&[("a", 500), ("b", 500), ("c", 500)], &[("a", 300)]);
        let a = undersample(&c, 7).unwrap();
        assert_eq!(a, undersample(&c, 7).unwrap());
        assert_ne!(a.positives, undersample(&c, 8).unwrap().positives);
        assert_eq!(a.provenance.pos_before, 1500);
        assert_eq!(a.provenance.pos_after, 300);
    }

    proptest! {
        #[test]
        fn undersample_never_invents_instances(
            pos in prop::collection::btree_map("[a-e]", 1u64..50, 1..5),
            neg in prop::collection::btree_map("[a-e]", 1u64..50, 1..5),
            seed in any::<u64>(),
        ) {
            let c = TrainingCorpus::from_counts(d(), pos.clone(), neg.clone());
            let b = undersample(&c, seed).unwrap();
            prop_assert_eq!(b.pos_total(), b.neg_total());
            for (q, n) in &b.positives { prop_assert!(*n <= pos[q]); }
            for (q, n) in &b.negatives { prop_assert!(*n <= neg[q]); }
        }
    }
}
