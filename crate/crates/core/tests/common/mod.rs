#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use needfinder_core::learn::TrainingCorpus;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub fn rng(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

pub fn day() -> NaiveDate {
    NaiveDate::from_ymd_opt(2024, 1, 29).unwrap()
}

/// Random corpus with every query on both sides, counts in `1..=max_count`,
/// and equal class totals.
pub fn balanced_corpus(rng: &mut impl Rng, max_queries: usize, max_count: u64) -> TrainingCorpus {
    let n = rng.random_range(1..=max_queries);
    let pos: Vec<u64> = (0..n).map(|_| rng.random_range(1..=max_count)).collect();
    let mut neg: Vec<u64> = (0..n).map(|_| rng.random_range(1..=max_count)).collect();
    let target: u64 = pos.iter().sum();
    let mut current: u64 = neg.iter().sum();
    while current != target {
        let i = rng.random_range(0..n);
        if current < target {
            let step = (target - current).min(max_count - neg[i]);
            neg[i] += step;
            current += step;
        } else {
            let step = (current - target).min(neg[i] - 1);
            neg[i] -= step;
            current -= step;
        }
    }
    let name = |i: usize| format!("q{i:03}");
    TrainingCorpus::from_counts(
        day(),
        pos.iter().enumerate().map(|(i, &c)| (name(i), c)).collect(),
        neg.iter().enumerate().map(|(i, &c)| (name(i), c)).collect(),
    )
}

/// Any corpus with both classes present, not necessarily balanced.
pub fn random_corpus(rng: &mut impl Rng, max_queries: usize, max_count: u64) -> TrainingCorpus {
    let n = rng.random_range(1..=max_queries);
    let mut pos = BTreeMap::new();
    let mut neg = BTreeMap::new();
    for i in 0..n {
        pos.insert(format!("q{i:03}"), rng.random_range(1..=max_count));
        neg.insert(format!("q{i:03}"), rng.random_range(1..=max_count));
    }
    TrainingCorpus::from_counts(day(), pos, neg)
}

/// Every file under `root`, relative path to bytes.
pub fn tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                out.insert(path.strip_prefix(root).unwrap().to_path_buf(), std::fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}
