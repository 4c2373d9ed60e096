//! Scoring engine.
//!
//! For one disease the temporary probability is
//!
//! ```text
//! temp = (raw_score - major_penalty - min_th) / (max_th - min_th) * 100
//! ```
//!
//! where `raw_score` sums the weights of the selected symptoms at their
//! answered levels and `major_penalty` sums the best-case weight of every
//! major symptom the user did not select. Catalyst factors are then added to
//! the single top-scoring disease only, the total is clamped to `[0, 100]`,
//! labelled, ranked and filtered.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuzzy::fuzzify;
use crate::kb::{Disease, KnowledgeBase};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    /// Results below this final probability (percent) are dropped; 0 keeps all.
    pub filter_threshold: f64,
    /// Confidence lost per required pathological test, in percentage points.
    pub drop_per_test: f64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            filter_threshold: 5.0,
            drop_per_test: 15.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("unknown area '{0}'")]
    UnknownArea(String),
    #[error("unknown disease '{0}'")]
    UnknownDisease(String),
    #[error("unknown symptom '{0}'")]
    UnknownSymptom(String),
    #[error("symptom '{symptom_id}' is not part of area '{area_id}'")]
    SymptomNotInArea { symptom_id: String, area_id: String },
    #[error("symptom '{symptom_id}' has no level '{level}'")]
    UnknownLevel { symptom_id: String, level: String },
    #[error("selected symptom '{0}' has no level answer")]
    MissingLevel(String),
    #[error("level answered for unselected symptom '{0}'")]
    UnselectedLevel(String),
    #[error("unknown catalyst question '{0}'")]
    UnknownCatalystQuestion(String),
}

/// A patient's answers: selected symptoms, their levels and history answers.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerSet {
    pub selected_symptom_ids: BTreeSet<String>,
    pub level_answers: BTreeMap<String, String>,
    pub catalyst_answers: BTreeMap<String, bool>,
}

impl AnswerSet {
    /// Selects `symptom_id` answered at `level`.
    pub fn select(&mut self, symptom_id: impl Into<String>, level: impl Into<String>) -> &mut Self {
        let id = symptom_id.into();
        self.selected_symptom_ids.insert(id.clone());
        self.level_answers.insert(id, level.into());
        self
    }

    pub fn answer_catalyst(&mut self, question_id: impl Into<String>, yes: bool) -> &mut Self {
        self.catalyst_answers.insert(question_id.into(), yes);
        self
    }

    /// Checks that the answers are complete and resolve within `area_id`.
    pub fn check(&self, kb: &KnowledgeBase, area_id: &str) -> Result<(), EngineError> {
        let area = kb
            .area(area_id)
            .ok_or_else(|| EngineError::UnknownArea(area_id.to_string()))?;
        for symptom_id in &self.selected_symptom_ids {
            let symptom = kb
                .symptom(symptom_id)
                .ok_or_else(|| EngineError::UnknownSymptom(symptom_id.clone()))?;
            if !area.symptom_ids.contains(symptom_id) {
                return Err(EngineError::SymptomNotInArea {
                    symptom_id: symptom_id.clone(),
                    area_id: area_id.to_string(),
                });
            }
            let level = self
                .level_answers
                .get(symptom_id)
                .ok_or_else(|| EngineError::MissingLevel(symptom_id.clone()))?;
            if !symptom.levels.contains(level) {
                return Err(EngineError::UnknownLevel {
                    symptom_id: symptom_id.clone(),
                    level: level.clone(),
                });
            }
        }
        if let Some(extra) = self
            .level_answers
            .keys()
            .find(|s| !self.selected_symptom_ids.contains(*s))
        {
            return Err(EngineError::UnselectedLevel(extra.clone()));
        }
        if let Some(q) = self
            .catalyst_answers
            .keys()
            .find(|q| kb.catalyst_question(q).is_none())
        {
            return Err(EngineError::UnknownCatalystQuestion(q.clone()));
        }
        Ok(())
    }
}

/// Temporary probability of one disease and the catalyst points it received.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatalystOutcome {
    pub temp: f64,
    pub catalyst_added: f64,
}

impl CatalystOutcome {
    pub fn total(&self) -> f64 {
        self.temp + self.catalyst_added
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosisResult {
    pub disease_id: String,
    pub display_name: String,
    pub raw_score: f64,
    pub penalty: f64,
    /// Percent, unclamped.
    pub temp_probability: f64,
    pub catalyst_added: f64,
    /// Percent, clamped to `[0, 100]`.
    pub final_probability: f64,
    pub label: String,
    pub memberships: IndexMap<String, f64>,
    pub confidence: f64,
    pub rank: u32,
}

fn disease<'kb>(kb: &'kb KnowledgeBase, disease_id: &str) -> Result<&'kb Disease, EngineError> {
    kb.disease(disease_id)
        .ok_or_else(|| EngineError::UnknownDisease(disease_id.to_string()))
}

pub fn max_level_weight(
    kb: &KnowledgeBase,
    disease_id: &str,
    symptom_id: &str,
) -> Result<f64, EngineError> {
    let d = disease(kb, disease_id)?;
    if kb.symptom(symptom_id).is_none() {
        return Err(EngineError::UnknownSymptom(symptom_id.to_string()));
    }
    Ok(d.max_weight(symptom_id))
}

fn raw_score_of(d: &Disease, answers: &AnswerSet) -> f64 {
    answers
        .selected_symptom_ids
        .iter()
        .filter_map(|s| answers.level_answers.get(s).map(|l| d.weight(s, l)))
        .sum()
}

fn major_penalty_of(d: &Disease, answers: &AnswerSet) -> f64 {
    d.major_symptom_ids
        .iter()
        .filter(|s| !answers.selected_symptom_ids.contains(*s))
        .map(|s| d.max_weight(s))
        .sum()
}

fn temp_of(d: &Disease, raw: f64, penalty: f64) -> f64 {
    (raw - penalty - d.min_th) / (d.max_th - d.min_th) * 100.0
}

/// Sum of the weights of selected symptoms at their answered levels.
pub fn raw_score(
    kb: &KnowledgeBase,
    disease_id: &str,
    answers: &AnswerSet,
) -> Result<f64, EngineError> {
    Ok(raw_score_of(disease(kb, disease_id)?, answers))
}

/// Sum of best-case weights over major symptoms the user did not select.
pub fn major_penalty(
    kb: &KnowledgeBase,
    disease_id: &str,
    answers: &AnswerSet,
) -> Result<f64, EngineError> {
    Ok(major_penalty_of(disease(kb, disease_id)?, answers))
}

pub fn temp_probability(
    kb: &KnowledgeBase,
    disease_id: &str,
    answers: &AnswerSet,
) -> Result<f64, EngineError> {
    let d = disease(kb, disease_id)?;
    Ok(temp_of(
        d,
        raw_score_of(d, answers),
        major_penalty_of(d, answers),
    ))
}

/// Disease with the highest temp probability; ties go to the smallest id.
fn argmax(temp_map: &IndexMap<String, f64>) -> Option<&str> {
    temp_map
        .iter()
        .max_by(|(ia, a), (ib, b)| a.total_cmp(b).then_with(|| ib.cmp(ia)))
        .map(|(id, _)| id.as_str())
}

/// Adds affirmative catalyst factors to the argmax disease; every other
/// disease is left unchanged.
pub fn apply_catalysts(
    kb: &KnowledgeBase,
    temp_map: &IndexMap<String, f64>,
    answers: &AnswerSet,
) -> IndexMap<String, CatalystOutcome> {
    let top = argmax(temp_map);
    let boost: f64 = match top {
        Some(top) => kb
            .catalyst_questions()
            .filter(|q| q.target_disease_id == top)
            .filter(|q| answers.catalyst_answers.get(&q.question_id) == Some(&true))
            .map(|q| q.factor)
            .sum(),
        None => 0.0,
    };
    temp_map
        .iter()
        .map(|(id, &temp)| {
            let catalyst_added = if Some(id.as_str()) == top { boost } else { 0.0 };
            (
                id.clone(),
                CatalystOutcome {
                    temp,
                    catalyst_added,
                },
            )
        })
        .collect()
}

/// Linear confidence model: `clamp(100 - drop_per_test * tests, 0, 100)`.
pub fn confidence(
    kb: &KnowledgeBase,
    disease_id: &str,
    config: &EngineConfig,
) -> Result<f64, EngineError> {
    let d = disease(kb, disease_id)?;
    Ok(confidence_of(d, config))
}

fn confidence_of(d: &Disease, config: &EngineConfig) -> f64 {
    (100.0 - config.drop_per_test * f64::from(d.pathological_test_count)).clamp(0.0, 100.0)
}

/// Scores every disease of the area, then ranks and filters the results.
pub fn diagnose(
    kb: &KnowledgeBase,
    area_id: &str,
    answers: &AnswerSet,
    config: &EngineConfig,
) -> Result<Vec<DiagnosisResult>, EngineError> {
    answers.check(kb, area_id)?;
    let area = kb
        .area(area_id)
        .ok_or_else(|| EngineError::UnknownArea(area_id.to_string()))?;

    let mut partial = Vec::with_capacity(area.disease_ids.len());
    let mut temps = IndexMap::with_capacity(area.disease_ids.len());
    for id in &area.disease_ids {
        let d = disease(kb, id)?;
        let raw = raw_score_of(d, answers);
        let penalty = major_penalty_of(d, answers);
        temps.insert(id.clone(), temp_of(d, raw, penalty));
        partial.push((d, raw, penalty));
    }
    let outcomes = apply_catalysts(kb, &temps, answers);

    let mut scored: Vec<(f64, DiagnosisResult)> = partial
        .into_iter()
        .map(|(d, raw, penalty)| {
            let outcome = outcomes[&d.disease_id];
            let total = outcome.total();
            let final_probability = total.clamp(0.0, 100.0);
            let labelling = fuzzify(final_probability, kb.label_config());
            let result = DiagnosisResult {
                disease_id: d.disease_id.clone(),
                display_name: d.display_name.clone(),
                raw_score: raw,
                penalty,
                temp_probability: outcome.temp,
                catalyst_added: outcome.catalyst_added,
                final_probability,
                label: labelling.label,
                memberships: labelling.memberships,
                confidence: confidence_of(d, config),
                rank: 0,
            };
            (total, result)
        })
        .collect();

    // Clamping can tie diseases that were apart before it; the unclamped
    // total breaks those ties so the argmax stays first.
    scored.sort_by(|(ta, a), (tb, b)| {
        b.final_probability
            .total_cmp(&a.final_probability)
            .then_with(|| tb.total_cmp(ta))
            .then_with(|| a.disease_id.cmp(&b.disease_id))
    });

    let mut results: Vec<DiagnosisResult> = scored
        .into_iter()
        .map(|(_, r)| r)
        .filter(|r| {
            r.final_probability.partial_cmp(&config.filter_threshold) != Some(Ordering::Less)
        })
        .collect();
    for (pos, r) in results.iter_mut().enumerate() {
        r.rank = pos as u32 + 1;
    }
    Ok(results)
}
