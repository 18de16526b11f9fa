use crate::prepare::{DailyCountRow, RegionFlag};

/// The naive ranking: most distinct users first, ties by query.
pub fn raw_count_ranking(rows: &[DailyCountRow], flag: RegionFlag, top_n: usize) -> Vec<(String, u64)> {
    let mut v: Vec<(String, u64)> =
        rows.iter().filter(|r| r.region_flag == flag).map(|r| (r.query.clone(), r.user_count)).collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    v.truncate(top_n);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn row(flag: RegionFlag, q: &str, c: u64) -> DailyCountRow {
        DailyCountRow {
            date: NaiveDate::from_ymd_opt(2024, 1, 1).unwrap(),
            region_flag: flag,
            query: q.into(),
            user_count: c,
        }
    }

    #[test]
    fn sorts_by_count() {
        let rows =
            [row(RegionFlag::Inside, "q2", 9), row(RegionFlag::Inside, "q1", 30), row(RegionFlag::Outside, "q3", 99)];
        let r = raw_count_ranking(&rows, RegionFlag::Inside, 15);
        assert_eq!(r, vec![("q1".to_string(), 30), ("q2".to_string(), 9)]);
    }

    #[test]
    fn ties_and_truncation() {
        let rows =
            [row(RegionFlag::Inside, "b", 10), row(RegionFlag::Inside, "a", 10), row(RegionFlag::Inside, "c", 5)];
        let r = raw_count_ranking(&rows, RegionFlag::Inside, 2);
        assert_eq!(r.iter().map(|x| x.0.as_str()).collect::<Vec<_>>(), ["a", "b"]);
        assert!(raw_count_ranking(&[], RegionFlag::Inside, 5).is_empty());
    }
}
