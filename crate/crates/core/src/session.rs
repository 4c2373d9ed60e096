//! Staged question flow.
//!
//! A session walks area selection, symptom selection, one level question per
//! selected symptom and the history questions of the area, in that order and
//! never backwards. Every step is a pure `&Session -> Session` transition, so
//! a rejected submission leaves the caller's session untouched.

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use uuid::Uuid;

use crate::engine::{diagnose, AnswerSet, DiagnosisResult, EngineConfig, EngineError};
use crate::kb::{KnowledgeBase, ProblemArea};

pub const AREA_PROMPT_ID: &str = "area";
pub const SYMPTOM_PROMPT_ID: &str = "symptoms";
const LEVEL_PREFIX: &str = "level:";
const HISTORY_PREFIX: &str = "history:";
pub const YES: &str = "yes";
pub const NO: &str = "no";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Phase {
    AreaSelection,
    SymptomSelection,
    LevelQuestions,
    HistoryQuestions,
    Complete,
}

impl Phase {
    /// Wire name, as serialized.
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::AreaSelection => "AREA_SELECTION",
            Phase::SymptomSelection => "SYMPTOM_SELECTION",
            Phase::LevelQuestions => "LEVEL_QUESTIONS",
            Phase::HistoryQuestions => "HISTORY_QUESTIONS",
            Phase::Complete => "COMPLETE",
        }
    }

    fn next(self) -> Phase {
        match self {
            Phase::AreaSelection => Phase::SymptomSelection,
            Phase::SymptomSelection => Phase::LevelQuestions,
            Phase::LevelQuestions => Phase::HistoryQuestions,
            Phase::HistoryQuestions | Phase::Complete => Phase::Complete,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PromptKind {
    Area,
    SymptomMulti,
    Level,
    History,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptOption {
    pub option_id: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prompt {
    pub prompt_id: String,
    pub kind: PromptKind,
    pub text: String,
    pub options: Vec<PromptOption>,
}

impl Prompt {
    fn option(&self, option_id: &str) -> Option<&PromptOption> {
        self.options.iter().find(|o| o.option_id == option_id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SessionError {
    #[error("session is already complete")]
    Complete,
    #[error("prompt '{0}' is not pending")]
    StalePrompt(String),
    #[error("invalid selection for prompt '{prompt_id}': {reason}")]
    InvalidOption { prompt_id: String, reason: String },
    #[error("session belongs to knowledge base '{session}', not '{loaded}'")]
    KbMismatch { session: String, loaded: String },
    #[error("session state is inconsistent with the knowledge base: {0}")]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub session_id: String,
    pub kb_id: String,
    pub phase: Phase,
    pub area_id: Option<String>,
    pub answers: AnswerSet,
    pub created_at: DateTime<Utc>,
    pub updated_at: DateTime<Utc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub results: Option<Vec<DiagnosisResult>>,
}

impl Session {
    pub fn start(kb: &KnowledgeBase) -> Session {
        let now = Utc::now();
        Session {
            session_id: Uuid::new_v4().to_string(),
            kb_id: kb.kb_id().to_string(),
            phase: Phase::AreaSelection,
            area_id: None,
            answers: AnswerSet::default(),
            created_at: now,
            updated_at: now,
            results: None,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.phase == Phase::Complete
    }

    /// Equality ignoring the session id and timestamps.
    pub fn same_state(&self, other: &Session) -> bool {
        self.kb_id == other.kb_id
            && self.phase == other.phase
            && self.area_id == other.area_id
            && self.answers == other.answers
            && self.results == other.results
    }

    fn check_kb(&self, kb: &KnowledgeBase) -> Result<(), SessionError> {
        if self.kb_id != kb.kb_id() {
            return Err(SessionError::KbMismatch {
                session: self.kb_id.clone(),
                loaded: kb.kb_id().to_string(),
            });
        }
        Ok(())
    }

    fn area<'kb>(&self, kb: &'kb KnowledgeBase) -> Result<&'kb ProblemArea, SessionError> {
        let id = self.area_id.as_deref().unwrap_or_default();
        kb.area(id)
            .ok_or_else(|| EngineError::UnknownArea(id.to_string()).into())
    }

    /// Prompts the user must answer next.
    pub fn pending_prompts(&self, kb: &KnowledgeBase) -> Result<Vec<Prompt>, SessionError> {
        self.check_kb(kb)?;
        let prompts = match self.phase {
            Phase::Complete => return Err(SessionError::Complete),
            Phase::AreaSelection => vec![Prompt {
                prompt_id: AREA_PROMPT_ID.to_string(),
                kind: PromptKind::Area,
                text: "Which problem area best describes your complaint?".to_string(),
                options: kb
                    .areas()
                    .map(|a| PromptOption {
                        option_id: a.area_id.clone(),
                        label: a.display_name.clone(),
                    })
                    .collect(),
            }],
            Phase::SymptomSelection => {
                let area = self.area(kb)?;
                let options = area
                    .symptom_ids
                    .iter()
                    .map(|id| {
                        let s = kb
                            .symptom(id)
                            .ok_or_else(|| EngineError::UnknownSymptom(id.clone()))?;
                        Ok(PromptOption {
                            option_id: s.symptom_id.clone(),
                            label: s.display_name.clone(),
                        })
                    })
                    .collect::<Result<Vec<_>, SessionError>>()?;
                vec![Prompt {
                    prompt_id: SYMPTOM_PROMPT_ID.to_string(),
                    kind: PromptKind::SymptomMulti,
                    text: format!("Select every symptom you have ({}).", area.display_name),
                    options,
                }]
            }
            Phase::LevelQuestions => {
                let area = self.area(kb)?;
                let mut prompts = Vec::new();
                for id in &area.symptom_ids {
                    if !self.answers.selected_symptom_ids.contains(id)
                        || self.answers.level_answers.contains_key(id)
                    {
                        continue;
                    }
                    let s = kb
                        .symptom(id)
                        .ok_or_else(|| EngineError::UnknownSymptom(id.clone()))?;
                    prompts.push(Prompt {
                        prompt_id: format!("{LEVEL_PREFIX}{id}"),
                        kind: PromptKind::Level,
                        text: s.level_question.clone(),
                        options: s
                            .levels
                            .iter()
                            .map(|l| PromptOption {
                                option_id: l.clone(),
                                label: l.clone(),
                            })
                            .collect(),
                    });
                }
                prompts
            }
            Phase::HistoryQuestions => history_questions(kb, self.area(kb)?)
                .filter(|q| !self.answers.catalyst_answers.contains_key(&q.question_id))
                .map(|q| Prompt {
                    prompt_id: format!("{HISTORY_PREFIX}{}", q.question_id),
                    kind: PromptKind::History,
                    text: q.prompt.clone(),
                    options: vec![
                        PromptOption {
                            option_id: YES.to_string(),
                            label: "Yes".to_string(),
                        },
                        PromptOption {
                            option_id: NO.to_string(),
                            label: "No".to_string(),
                        },
                    ],
                })
                .collect(),
        };
        Ok(prompts)
    }

    /// Records an answer to a pending prompt and advances the phase once the
    /// current phase has nothing left to ask. Reaching the end runs the
    /// diagnosis and stores the results.
    pub fn submit(
        &self,
        kb: &KnowledgeBase,
        config: &EngineConfig,
        prompt_id: &str,
        selection: &[String],
    ) -> Result<Session, SessionError> {
        let pending = self.pending_prompts(kb)?;
        let prompt = pending
            .iter()
            .find(|p| p.prompt_id == prompt_id)
            .ok_or_else(|| SessionError::StalePrompt(prompt_id.to_string()))?;
        let invalid = |reason: String| SessionError::InvalidOption {
            prompt_id: prompt_id.to_string(),
            reason,
        };
        for choice in selection {
            if prompt.option(choice).is_none() {
                return Err(invalid(format!("'{choice}' is not an option")));
            }
        }

        let mut next = self.clone();
        match prompt.kind {
            PromptKind::SymptomMulti => {
                let mut chosen = std::collections::BTreeSet::new();
                for choice in selection {
                    if !chosen.insert(choice.clone()) {
                        return Err(invalid(format!("'{choice}' selected twice")));
                    }
                }
                next.answers.selected_symptom_ids = chosen;
            }
            _ => {
                let [choice] = selection else {
                    return Err(invalid(format!(
                        "exactly one option required, got {}",
                        selection.len()
                    )));
                };
                match prompt.kind {
                    PromptKind::Area => next.area_id = Some(choice.clone()),
                    PromptKind::Level => {
                        let symptom = &prompt.prompt_id[LEVEL_PREFIX.len()..];
                        next.answers
                            .level_answers
                            .insert(symptom.to_string(), choice.clone());
                    }
                    PromptKind::History => {
                        let question = &prompt.prompt_id[HISTORY_PREFIX.len()..];
                        next.answers
                            .catalyst_answers
                            .insert(question.to_string(), choice == YES);
                    }
                    PromptKind::SymptomMulti => unreachable!(),
                }
            }
        }

        if prompt.kind == PromptKind::Area || prompt.kind == PromptKind::SymptomMulti {
            next.phase = next.phase.next();
        }
        while next.phase != Phase::Complete && next.pending_prompts(kb)?.is_empty() {
            next.phase = next.phase.next();
        }
        if next.phase == Phase::Complete {
            let area = next.area(kb)?.area_id.clone();
            next.results = Some(diagnose(kb, &area, &next.answers, config)?);
        }
        next.updated_at = Utc::now().max(self.updated_at);
        Ok(next)
    }
}

/// Catalyst questions of every disease in the area, deduplicated, KB order.
fn history_questions<'kb>(
    kb: &'kb KnowledgeBase,
    area: &'kb ProblemArea,
) -> impl Iterator<Item = &'kb crate::kb::CatalystQuestion> {
    kb.catalyst_questions()
        .filter(move |q| area.disease_ids.contains(&q.target_disease_id))
}
