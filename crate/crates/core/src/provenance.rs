use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const TOOL_NAME: &str = "needfinder";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Embedded in every artifact: which command produced it, with exactly which
/// effective parameters. `config` can be fed back through `--config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: serde_json::Value,
    pub config_hash: String,
}

impl Provenance {
    pub fn new(command: &str, config: &impl Serialize) -> Self {
        let config = serde_json::to_value(config).expect("config serializes to JSON");
        Self {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            command: command.into(),
            config_hash: config_hash(&config),
            config,
        }
    }
}

/// SHA-256 over the compact JSON encoding (object keys sorted).
pub fn config_hash(config: &serde_json::Value) -> String {
    let bytes = serde_json::to_vec(config).expect("json value serializes");
    hex::encode(Sha256::digest(&bytes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn hash_ignores_key_order() {
        let a: serde_json::Value = serde_json::from_str(r#"{"b":1,"a":2}"#).unwrap();
        let b = json!({"a": 2, "b": 1});
        assert_eq!(config_hash(&a), config_hash(&b));
        assert_ne!(config_hash(&a), config_hash(&json!({"a": 3, "b": 1})));
    }

    #[test]
    fn carries_version() {
        let p = Provenance::new("score", &json!({"top": 15}));
        assert_eq!(p.tool, "needfinder");
        assert_eq!(p.version, env!("CARGO_PKG_VERSION"));
        assert_eq!(p.config_hash.len(), 64);
    }
}
