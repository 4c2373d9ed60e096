//! Batch answer files.
//!
//! ```json
//! {
//!   "area_id": "chest",
//!   "symptoms": { "cough": "non-productive", "fever": "low" },
//!   "catalyst_answers": { "asthma_family_history": true }
//! }
//! ```
//!
//! Symptoms absent from `symptoms` are unselected; history questions absent
//! from `catalyst_answers` count as "no".

use std::collections::BTreeMap;
use std::path::Path;

use fuzzydx_core::AnswerSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnswerFileError {
    #[error("cannot read answer file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed answer file: {0}")]
    Parse(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnswerFile {
    pub area_id: String,
    /// symptom_id -> chosen level label
    #[serde(default)]
    pub symptoms: BTreeMap<String, String>,
    #[serde(default)]
    pub catalyst_answers: BTreeMap<String, bool>,
}

impl AnswerFile {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, AnswerFileError> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn to_answer_set(&self) -> AnswerSet {
        AnswerSet {
            selected_symptom_ids: self.symptoms.keys().cloned().collect(),
            level_answers: self.symptoms.clone(),
            catalyst_answers: self.catalyst_answers.clone(),
        }
    }
}
