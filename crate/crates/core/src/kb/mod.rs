//! Declarative knowledge base: the document format, the immutable loaded form
//! and referential lookups the engine relies on.

pub mod validate;

use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuzzy::FuzzyLabelConfig;
use validate::ValidationReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemArea {
    pub area_id: String,
    pub display_name: String,
    pub symptom_ids: Vec<String>,
    pub disease_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Symptom {
    pub symptom_id: String,
    pub display_name: String,
    /// Follow-up question asked once the symptom is selected.
    pub level_question: String,
    pub levels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Disease {
    pub disease_id: String,
    pub display_name: String,
    /// symptom_id -> level label -> weight in `[0, 1]`.
    pub weights: IndexMap<String, IndexMap<String, f64>>,
    pub major_symptom_ids: Vec<String>,
    pub min_th: f64,
    pub max_th: f64,
    pub catalyst_question_ids: Vec<String>,
    pub pathological_test_count: u32,
}

impl Disease {
    /// Weight of a symptom answered at `level`; absent entries weigh 0.
    pub fn weight(&self, symptom_id: &str, level: &str) -> f64 {
        self.weights
            .get(symptom_id)
            .and_then(|levels| levels.get(level))
            .copied()
            .unwrap_or(0.0)
    }

    /// Largest weight the symptom can contribute over all of its levels.
    pub fn max_weight(&self, symptom_id: &str) -> f64 {
        self.weights
            .get(symptom_id)
            .map(|levels| levels.values().copied().fold(0.0, f64::max))
            .unwrap_or(0.0)
    }

    /// Sum of per-symptom maxima, the best raw score the disease can reach.
    pub fn max_weight_sum(&self) -> f64 {
        self.weights.keys().map(|s| self.max_weight(s)).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalystQuestion {
    pub question_id: String,
    pub prompt: String,
    pub target_disease_id: String,
    /// Percentage points added when answered yes.
    pub factor: f64,
}

/// The on-disk JSON document, before resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KbDocument {
    pub kb_id: String,
    pub version: String,
    pub areas: Vec<ProblemArea>,
    pub symptoms: Vec<Symptom>,
    pub diseases: Vec<Disease>,
    pub catalyst_questions: Vec<CatalystQuestion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<FuzzyLabelConfig>,
}

impl KbDocument {
    pub fn from_json_str(text: &str) -> Result<Self, KbError> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Debug, Error)]
pub enum KbError {
    #[error("cannot read knowledge base: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed knowledge base document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid knowledge base: {}", first_error(.0))]
    Invalid(Box<ValidationReport>),
}

fn first_error(report: &ValidationReport) -> String {
    report
        .errors
        .first()
        .map(ToString::to_string)
        .unwrap_or_else(|| "unknown error".to_string())
}

/// A fully resolved, validated knowledge base. Immutable after load.
#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeBase {
    kb_id: String,
    version: String,
    areas: IndexMap<String, ProblemArea>,
    symptoms: IndexMap<String, Symptom>,
    diseases: IndexMap<String, Disease>,
    catalyst_questions: IndexMap<String, CatalystQuestion>,
    label_config: FuzzyLabelConfig,
}

impl KnowledgeBase {
    pub fn from_json_str(text: &str) -> Result<Self, KbError> {
        Self::from_document(KbDocument::from_json_str(text)?)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, KbError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn from_document(doc: KbDocument) -> Result<Self, KbError> {
        let report = validate::validate_kb(&doc);
        if !report.is_ok() {
            return Err(KbError::Invalid(Box::new(report)));
        }
        Ok(KnowledgeBase {
            kb_id: doc.kb_id,
            version: doc.version,
            areas: doc
                .areas
                .into_iter()
                .map(|a| (a.area_id.clone(), a))
                .collect(),
            symptoms: doc
                .symptoms
                .into_iter()
                .map(|s| (s.symptom_id.clone(), s))
                .collect(),
            diseases: doc
                .diseases
                .into_iter()
                .map(|d| (d.disease_id.clone(), d))
                .collect(),
            catalyst_questions: doc
                .catalyst_questions
                .into_iter()
                .map(|q| (q.question_id.clone(), q))
                .collect(),
            label_config: doc.labels.unwrap_or_default(),
        })
    }

    /// Canonical document form; labels are always written out.
    pub fn to_document(&self) -> KbDocument {
        KbDocument {
            kb_id: self.kb_id.clone(),
            version: self.version.clone(),
            areas: self.areas.values().cloned().collect(),
            symptoms: self.symptoms.values().cloned().collect(),
            diseases: self.diseases.values().cloned().collect(),
            catalyst_questions: self.catalyst_questions.values().cloned().collect(),
            labels: Some(self.label_config.clone()),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("document serializes")
    }

    pub fn kb_id(&self) -> &str {
        &self.kb_id
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn areas(&self) -> impl Iterator<Item = &ProblemArea> {
        self.areas.values()
    }

    pub fn area(&self, area_id: &str) -> Option<&ProblemArea> {
        self.areas.get(area_id)
    }

    pub fn symptoms(&self) -> impl Iterator<Item = &Symptom> {
        self.symptoms.values()
    }

    pub fn symptom(&self, symptom_id: &str) -> Option<&Symptom> {
        self.symptoms.get(symptom_id)
    }

    pub fn diseases(&self) -> impl Iterator<Item = &Disease> {
        self.diseases.values()
    }

    pub fn disease(&self, disease_id: &str) -> Option<&Disease> {
        self.diseases.get(disease_id)
    }

    pub fn catalyst_questions(&self) -> impl Iterator<Item = &CatalystQuestion> {
        self.catalyst_questions.values()
    }

    pub fn catalyst_question(&self, question_id: &str) -> Option<&CatalystQuestion> {
        self.catalyst_questions.get(question_id)
    }

    pub fn label_config(&self) -> &FuzzyLabelConfig {
        &self.label_config
    }
}
