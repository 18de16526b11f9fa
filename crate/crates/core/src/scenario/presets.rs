//! Bundled scenarios.

use super::config::ScenarioConfig;

pub const DEMO_JSON: &str = include_str!("../../scenarios/demo.json");
pub const WEEKEND_JSON: &str = include_str!("../../scenarios/weekend.json");

/// 10k users over 60 days: ten staggered needs across five categories, one
/// ×20 media spike and one ×8 region marker.
pub fn demo() -> ScenarioConfig {
    ScenarioConfig::from_json(DEMO_JSON).expect("bundled demo scenario is valid")
}

/// A single need lifted only on Saturdays and Sundays after the event.
pub fn weekend() -> ScenarioConfig {
    ScenarioConfig::from_json(WEEKEND_JSON).expect("bundled weekend scenario is valid")
}
