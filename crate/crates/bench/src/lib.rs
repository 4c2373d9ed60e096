//! Helpers shared by the benchmarks.

use fuzzydx_core::{AnswerSet, KnowledgeBase};
use serde_json::{json, Value};

pub const SYNTHETIC_AREA: &str = "all";

/// Loads the bundled chest fixture.
pub fn chest_kb() -> KnowledgeBase {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/chest.kb.json");
    KnowledgeBase::from_path(path).expect("chest fixture loads")
}

/// The answers behind the worked chest example.
pub fn chest_answers() -> AnswerSet {
    let mut answers = AnswerSet::default();
    answers
        .select("cough", "non-productive")
        .select("fever", "low")
        .select("chest_pain", "always")
        .select("wheezing", "while breathing in")
        .select("short_breath", "yes")
        .answer_catalyst("asthma_family_history", true)
        .answer_catalyst("asthma_allergy_history", true);
    answers
}

// Deterministic weight in [0, 1] so every run sees the same KB.
fn weight(d: usize, s: usize, l: usize) -> f64 {
    ((d * 31 + s * 17 + l * 7) % 11) as f64 / 10.0
}

/// Builds a valid single-area KB with `diseases` diseases, `symptoms` symptoms
/// and `levels` levels each. Every disease weights every symptom, the first
/// symptom is major for every third disease and every disease has one catalyst.
pub fn synthetic_kb(diseases: usize, symptoms: usize, levels: usize) -> KnowledgeBase {
    let level_ids: Vec<String> = (0..levels).map(|l| format!("l{l}")).collect();
    let symptom_docs: Vec<Value> = (0..symptoms)
        .map(|s| {
            json!({
                "symptom_id": format!("s{s}"),
                "display_name": format!("Symptom {s}"),
                "level_question": format!("How is symptom {s}?"),
                "levels": level_ids,
            })
        })
        .collect();
    let disease_docs: Vec<Value> = (0..diseases)
        .map(|d| {
            let weights: serde_json::Map<String, Value> = (0..symptoms)
                .map(|s| {
                    let per_level: serde_json::Map<String, Value> = (0..levels)
                        .map(|l| (format!("l{l}"), json!(weight(d, s, l))))
                        .collect();
                    (format!("s{s}"), Value::Object(per_level))
                })
                .collect();
            let max_sum: f64 = (0..symptoms)
                .map(|s| (0..levels).map(|l| weight(d, s, l)).fold(0.0, f64::max))
                .sum();
            let majors: Vec<String> = if d % 3 == 0 {
                vec!["s0".into()]
            } else {
                vec![]
            };
            json!({
                "disease_id": format!("d{d}"),
                "display_name": format!("Disease {d}"),
                "weights": weights,
                "major_symptom_ids": majors,
                "min_th": 0.0,
                "max_th": max_sum.max(0.1),
                "catalyst_question_ids": [format!("q{d}")],
                "pathological_test_count": d % 4,
            })
        })
        .collect();
    let questions: Vec<Value> = (0..diseases)
        .map(|d| {
            json!({
                "question_id": format!("q{d}"),
                "prompt": format!("History for disease {d}?"),
                "target_disease_id": format!("d{d}"),
                "factor": 1.5,
            })
        })
        .collect();
    let doc = json!({
        "kb_id": "synthetic",
        "version": "1",
        "areas": [{
            "area_id": SYNTHETIC_AREA,
            "display_name": "All",
            "symptom_ids": (0..symptoms).map(|s| format!("s{s}")).collect::<Vec<_>>(),
            "disease_ids": (0..diseases).map(|d| format!("d{d}")).collect::<Vec<_>>(),
        }],
        "symptoms": symptom_docs,
        "diseases": disease_docs,
        "catalyst_questions": questions,
    });
    KnowledgeBase::from_json_str(&doc.to_string()).expect("synthetic KB is valid")
}

/// Selects every other symptom at a rotating level and answers every catalyst yes.
pub fn synthetic_answers(kb: &KnowledgeBase) -> AnswerSet {
    let mut answers = AnswerSet::default();
    for (i, symptom) in kb.symptoms().enumerate().filter(|(i, _)| i % 2 == 0) {
        answers.select(
            symptom.symptom_id.clone(),
            symptom.levels[i % symptom.levels.len()].clone(),
        );
    }
    for q in kb.catalyst_questions() {
        answers.answer_catalyst(q.question_id.clone(), true);
    }
    answers
}
