//! Model learning: balanced in/out corpora, logistic weights as need
//! intensity, spatial stopwords and daily ranked reports.

mod corpus;
mod report;
mod stopwords;
mod train;

pub use corpus::{build_corpus, pool_corpus, undersample, CorpusProvenance, TrainingCorpus};
pub use report::{
    rank_entries, score_day, NeedReport, RankedEntry, ReportCounts, ReportDiagnostics, ReportStatus, DEFAULT_TOP_N,
};
pub use stopwords::{
    default_baseline, derive_stopwords, StopwordSet, DEFAULT_BASELINE_DAYS, DEFAULT_TOP_M, DEFAULT_WEIGHT_FLOOR,
};
pub use train::{train, Hyperparams, LogisticObjective, ModelWeights, TrainDiagnostics};
