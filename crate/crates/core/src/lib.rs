//! Knowledge-base-driven fuzzy expert system for staged symptom-based diagnosis.
//!
//! The crate is split into four layers:
//!
//! - [`kb`]: the declarative knowledge base (areas, symptoms, diseases, catalyst
//!   questions, linguistic labels), its JSON document format and the linter.
//! - [`fuzzy`]: trapezoidal membership functions and label assignment.
//! - [`engine`]: pure scoring, catalyst application, ranking and filtering.
//! - [`session`]: the staged question flow that accumulates an [`AnswerSet`].

pub mod decimal;
pub mod engine;
pub mod fuzzy;
pub mod kb;
pub mod session;

pub use engine::{
    apply_catalysts, confidence, diagnose, major_penalty, max_level_weight, raw_score,
    temp_probability, AnswerSet, CatalystOutcome, DiagnosisResult, EngineConfig, EngineError,
};
pub use fuzzy::{fuzzify, FuzzyLabel, FuzzyLabelConfig, Labelling, Trapezoid};
pub use kb::validate::{validate_kb, Issue, IssueCode, ValidationReport};
pub use kb::{CatalystQuestion, Disease, KbDocument, KbError, KnowledgeBase, ProblemArea, Symptom};
pub use session::{Phase, Prompt, PromptKind, PromptOption, Session, SessionError};
