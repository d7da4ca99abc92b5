//! Serializable verification reports.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{GapResult, Law};
use crate::model::ChannelSpec;

/// Hex SHA-256 of the channel's canonical JSON encoding.
pub fn channel_digest(spec: &ChannelSpec) -> String {
    let text = serde_json::to_string(spec).expect("channel specs always serialize");
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub operation: String,
    pub channel_digest: String,
    pub mode: String,
    pub n_evaluated: usize,
    pub min_gap: f64,
    pub argmin_law: serde_json::Value,
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl VerificationReport {
    pub fn new(operation: &str, spec: &ChannelSpec, result: &GapResult, seed: Option<u64>) -> Self {
        Self {
            operation: operation.to_string(),
            channel_digest: channel_digest(spec),
            mode: result.mode.as_str().to_string(),
            n_evaluated: result.n_evaluated,
            min_gap: result.min_gap,
            argmin_law: law_value(&result.argmin_law),
            seed,
            elapsed_ms: None,
        }
    }

    pub fn with_elapsed_ms(mut self, ms: u64) -> Self {
        self.elapsed_ms = Some(ms);
        self
    }
}

fn law_value(law: &Law) -> serde_json::Value {
    serde_json::to_value(law).expect("laws always serialize")
}
