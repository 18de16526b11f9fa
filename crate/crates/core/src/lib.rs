//! Mines per-day information needs of a region from location-tagged search
//! logs.
//!
//! The pipeline has two stages. [`prepare`] flags each search as made from
//! inside or outside the region, drops timestamps down to local days, counts
//! distinct users per (date, flag, query) and suppresses rows seen by fewer
//! than `k` users. [`learn`] then trains, per day, a no-intercept logistic
//! classifier separating inside from outside searches; each query's weight is
//! its need score. Queries that already separate the regions during a
//! pre-event baseline ("spatial stopwords") are removed before training.
//!
//! [`scenario`] synthesizes worlds with known injected needs and
//! [`evaluate`] scores reports against them and against simple baselines.

pub mod error;
pub mod evaluate;
pub mod io;
pub mod learn;
pub mod pipeline;
pub mod prepare;
pub mod provenance;
pub mod render;
pub mod rng;
pub mod scenario;
pub mod time;

pub use error::{Error, Result};
