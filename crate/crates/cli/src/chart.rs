//! Confidence chart data: engine confidence next to the full-confidence bar
//! that assumes every pathological test has been observed.

use std::fmt::Write;

use fuzzydx_core::decimal::fmt3;
use fuzzydx_core::{EngineConfig, KnowledgeBase};

pub const FULL_CONFIDENCE: f64 = 100.0;

/// CSV with a header row, one row per disease in KB order.
pub fn render(kb: &KnowledgeBase, config: &EngineConfig) -> String {
    let mut out = String::from("disease_id,system_confidence,full_confidence\n");
    for d in kb.diseases() {
        let system =
            fuzzydx_core::confidence(kb, &d.disease_id, config).expect("disease comes from the KB");
        let _ = writeln!(
            out,
            "{},{},{}",
            d.disease_id,
            fmt3(system),
            fmt3(FULL_CONFIDENCE)
        );
    }
    out
}
