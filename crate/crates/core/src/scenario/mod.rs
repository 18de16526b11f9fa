//! Seeded synthetic worlds: location pings, searches, page views and the
//! ground truth of which needs were injected when.

mod config;
mod generate;
pub mod presets;
mod truth;

pub use config::{background_token, Category, MediaSpike, NeedProfile, PvSite, RegionMarker, ScenarioConfig};
pub use generate::{generate_scenario, query_table, user_id, GenPing, GenSearch, GeneratedLogs, Scenario};
pub use truth::{GroundTruth, TruthDay, TruthNeed};
