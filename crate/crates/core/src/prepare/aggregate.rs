use std::collections::{HashMap, HashSet};
use std::hash::Hash;

use chrono::NaiveDate;

use super::{DailyCountRow, RegionFlag};

/// A flagged, normalized search reduced to the fields aggregation needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlaggedEvent<U> {
    pub date: NaiveDate,
    pub flag: RegionFlag,
    pub query: String,
    pub user: U,
}

type Bucket<U> = HashMap<String, HashSet<U>>;

/// Exact distinct-user counter keyed by (date, flag, query).
///
/// Shards keep full user sets so `merge` is a set union: associative,
/// commutative, and exact even when a user appears in several shards.
#[derive(Debug, Clone)]
pub struct DailyAggregator<U> {
    users: HashMap<(NaiveDate, RegionFlag), Bucket<U>>,
}

impl<U: Eq + Hash> Default for DailyAggregator<U> {
    fn default() -> Self {
        Self { users: HashMap::new() }
    }
}

impl<U: Eq + Hash> DailyAggregator<U> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, date: NaiveDate, flag: RegionFlag, query: &str, user: U) {
        let bucket = self.users.entry((date, flag)).or_default();
        match bucket.get_mut(query) {
            Some(set) => {
                set.insert(user);
            }
            None => {
                bucket.insert(query.to_owned(), HashSet::from([user]));
            }
        }
    }

    pub fn merge(mut self, other: Self) -> Self {
        let (mut big, small) = if self.users.len() >= other.users.len() {
            (std::mem::take(&mut self.users), other.users)
        } else {
            (other.users, std::mem::take(&mut self.users))
        };
        for (day, bucket) in small {
            let target = big.entry(day).or_default();
            for (query, set) in bucket {
                let slot = target.entry(query).or_default();
                if slot.len() < set.len() {
                    let old = std::mem::replace(slot, set);
                    slot.extend(old);
                } else {
                    slot.extend(set);
                }
            }
        }
        Self { users: big }
    }

    pub fn into_rows(self) -> Vec<DailyCountRow> {
        let mut rows: Vec<DailyCountRow> = self
            .users
            .into_iter()
            .flat_map(|((date, region_flag), bucket)| {
                bucket.into_iter().map(move |(query, users)| DailyCountRow {
                    date,
                    region_flag,
                    query,
                    user_count: users.len() as u64,
                })
            })
            .collect();
        rows.sort_by(|a, b| a.key().cmp(&b.key()));
        rows
    }
}

/// One row per distinct (date, flag, query), counting distinct users.
pub fn aggregate_daily<U: Eq + Hash>(events: impl IntoIterator<Item = FlaggedEvent<U>>) -> Vec<DailyCountRow> {
    let mut agg = DailyAggregator::new();
    for e in events {
        agg.add(e.date, e.flag, &e.query, e.user);
    }
    agg.into_rows()
}

/// Suppression-style k-anonymity: keep exactly the rows with `user_count >= k`,
/// ordered by (date, flag, query).
pub fn k_anonymize(rows: &[DailyCountRow], k: u64) -> Vec<DailyCountRow> {
    let mut kept: Vec<DailyCountRow> = rows.iter().filter(|r| r.user_count >= k).cloned().collect();
    kept.sort_by(|a, b| a.key().cmp(&b.key()));
    kept
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2024, 1, day).unwrap()
    }

    fn ev(day: u32, flag: RegionFlag, q: &str, user: u32) -> FlaggedEvent<u32> {
        FlaggedEvent { date: d(day), flag, query: q.into(), user }
    }

    #[test]
    fn repeat_searches_count_once() {
        let rows = aggregate_daily((0..5).map(|_| ev(1, RegionFlag::Inside, "toilet", 7)));
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].user_count, 1);
    }

    #[test]
    fn in_and_out_rows() {
        let events = (0..30)
            .map(|u| ev(1, RegionFlag::Inside, "q", u))
            .chain((100..103).map(|u| ev(1, RegionFlag::Outside, "q", u)));
        let rows = aggregate_daily(events);
        assert_eq!(
            rows,
            vec![
                DailyCountRow { date: d(1), region_flag: RegionFlag::Inside, query: "q".into(), user_count: 30 },
                DailyCountRow { date: d(1), region_flag: RegionFlag::Outside, query: "q".into(), user_count: 3 },
            ]
        );
    }

    #[test]
    fn empty_input() {
        assert!(aggregate_daily(Vec::<FlaggedEvent<u32>>::new()).is_empty());
    }

    #[test]
    fn merge_is_exact_with_overlapping_users() {
        let mut a = DailyAggregator::new();
        let mut b = DailyAggregator::new();
        a.add(d(1), RegionFlag::Inside, "q", 1u32);
        a.add(d(1), RegionFlag::Inside, "q", 2);
        b.add(d(1), RegionFlag::Inside, "q", 2);
        b.add(d(1), RegionFlag::Inside, "q", 3);
        let rows = a.merge(b).into_rows();
        assert_eq!(rows[0].user_count, 3);
    }

    fn row(count: u64) -> DailyCountRow {
        DailyCountRow { date: d(1), region_flag: RegionFlag::Inside, query: "q".into(), user_count: count }
    }

    #[test]
    fn k_boundary() {
        assert!(k_anonymize(&[row(8)], 9).is_empty());
        assert_eq!(k_anonymize(&[row(9)], 9).len(), 1);
        let rows = vec![row(1), row(3)];
        assert_eq!(k_anonymize(&rows, 1), rows);
    }

    proptest! {
        #[test]
        fn merge_order_does_not_matter(
            events in prop::collection::vec((1u32..4, any::<bool>(), 0u8..4, 0u32..20), 0..200),
            split in 0usize..200,
        ) {
            let evs: Vec<_> = events.iter().map(|&(day, inside, q, u)| {
                ev(day, RegionFlag::from_inside(inside), &format!("q{q}"), u)
            }).collect();
            let split = split.min(evs.len());
            let whole = aggregate_daily(evs.clone());
            let mut left = DailyAggregator::new();
            let mut right = DailyAggregator::new();
            for e in &evs[..split] { left.add(e.date, e.flag, &e.query, e.user); }
            for e in &evs[split..] { right.add(e.date, e.flag, &e.query, e.user); }
            let lr = left.clone().merge(right.clone()).into_rows();
            let rl = right.merge(left).into_rows();
            prop_assert_eq!(&lr, &whole);
            prop_assert_eq!(&rl, &whole);
        }

        #[test]
        fn k_anonymize_invariants(
            counts in prop::collection::vec((1u32..5, any::<bool>(), 0u8..30, 1u64..40), 0..100),
            k in 1u64..50,
        ) {
            let mut rows: Vec<DailyCountRow> = counts.iter().map(|&(day, inside, q, c)| DailyCountRow {
                date: d(day), region_flag: RegionFlag::from_inside(inside), query: format!("q{q}"), user_count: c,
            }).collect();
            rows.sort_by(|a, b| a.key().cmp(&b.key()));
            rows.dedup_by(|a, b| a.key() == b.key());
            let once = k_anonymize(&rows, k);
            prop_assert!(once.iter().all(|r| r.user_count >= k));
            prop_assert_eq!(once.len(), rows.iter().filter(|r| r.user_count >= k).count());
            prop_assert_eq!(k_anonymize(&once, k), once);
        }
    }
}
