//! Baselines and validation: raw-count ranking, the page-view ratio score and
//! recovery metrics against injected ground truth.

mod baseline;
mod pv;
mod recovery;

pub use baseline::raw_count_ranking;
pub use pv::{pv_score, same_day_prior_year, PvPoint, PvScoreSeries, MOVING_AVERAGE_DAYS};
pub use recovery::{evaluate_recovery, DayRecovery, RecoveryMetrics};
