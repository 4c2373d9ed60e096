//! Random small knowledge bases and answer sets for property tests.

use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::{json, Map, Value};

pub const AREA: &str = "area";

/// One answer set in oracle form: symptom -> level, question -> yes/no.
#[derive(Debug, Clone, Default)]
pub struct Answers {
    pub levels: Vec<(String, String)>,
    pub catalysts: Vec<(String, bool)>,
}

#[derive(Debug, Clone)]
pub struct Shape {
    /// symptom id -> level labels
    pub symptoms: Vec<(String, Vec<String>)>,
    pub questions: Vec<String>,
}

fn weight<R: Rng>(rng: &mut R, dyadic: bool) -> f64 {
    if rng.gen_bool(0.25) {
        0.0
    } else if dyadic {
        f64::from(rng.gen_range(0..=16)) / 16.0
    } else {
        rng.gen_range(0.0..=1.0)
    }
}

/// Random KB with one area, <= 5 diseases, <= 8 symptoms and <= 4 levels.
///
/// `dyadic` KBs use multiples of 1/16 everywhere so sums are exact and ties
/// between diseases actually occur.
pub fn random_kb<R: Rng>(rng: &mut R, dyadic: bool) -> (Value, Shape) {
    let n_symptoms = rng.gen_range(1..=8);
    let n_diseases = rng.gen_range(1..=5);
    let symptoms: Vec<(String, Vec<String>)> = (0..n_symptoms)
        .map(|s| {
            let levels = (0..rng.gen_range(1..=4)).map(|l| format!("l{l}")).collect();
            (format!("s{s}"), levels)
        })
        .collect();

    let mut diseases = Vec::new();
    let mut questions = Vec::new();
    let mut disease_ids: Vec<String> = (0..n_diseases).map(|d| format!("d{d}")).collect();
    for (d, id) in disease_ids.iter().enumerate() {
        let mut weights = Map::new();
        let mut weighted = Vec::new();
        for (sid, levels) in &symptoms {
            if rng.gen_bool(0.2) {
                continue;
            }
            let mut per_level = Map::new();
            let mut best = 0.0f64;
            for level in levels {
                if rng.gen_bool(0.15) {
                    continue;
                }
                let w = weight(rng, dyadic);
                best = best.max(w);
                per_level.insert(level.clone(), json!(w));
            }
            if best > 0.0 {
                weighted.push(sid.clone());
            }
            weights.insert(sid.clone(), Value::Object(per_level));
        }
        let majors: Vec<String> = weighted
            .iter()
            .filter(|_| rng.gen_bool(0.3))
            .cloned()
            .collect();
        let (min_th, max_th) = if dyadic {
            let min = f64::from(rng.gen_range(0..=16)) / 8.0;
            (min, min + f64::from(rng.gen_range(1..=48)) / 8.0)
        } else {
            let min = rng.gen_range(0.0..2.0);
            (min, min + rng.gen_range(0.05..6.0))
        };
        let mut linked = Vec::new();
        for q in 0..rng.gen_range(0..=2) {
            let qid = format!("q{d}_{q}");
            linked.push(qid.clone());
            let factor = if dyadic {
                f64::from(rng.gen_range(0..=40)) / 4.0
            } else {
                rng.gen_range(0.0..30.0)
            };
            questions.push(json!({
                "question_id": qid,
                "prompt": "history?",
                "target_disease_id": id,
                "factor": factor,
            }));
        }
        diseases.push(json!({
            "disease_id": id,
            "display_name": id.to_uppercase(),
            "weights": weights,
            "major_symptom_ids": majors,
            "min_th": min_th,
            "max_th": max_th,
            "catalyst_question_ids": linked,
            "pathological_test_count": rng.gen_range(0..8),
        }));
    }
    // area order differs from id order so tie-breaking by id is exercised
    disease_ids.shuffle(rng);

    let doc = json!({
        "kb_id": "random",
        "version": "0",
        "areas": [{
            "area_id": AREA,
            "display_name": "Area",
            "symptom_ids": symptoms.iter().map(|(s, _)| s.clone()).collect::<Vec<_>>(),
            "disease_ids": disease_ids,
        }],
        "symptoms": symptoms.iter().map(|(s, levels)| json!({
            "symptom_id": s,
            "display_name": s,
            "level_question": "level?",
            "levels": levels,
        })).collect::<Vec<_>>(),
        "diseases": diseases,
        "catalyst_questions": questions.clone(),
    });
    let shape = Shape {
        symptoms,
        questions: questions
            .iter()
            .map(|q| q["question_id"].as_str().unwrap().to_string())
            .collect(),
    };
    (doc, shape)
}

fn catalysts<R: Rng>(rng: &mut R, shape: &Shape) -> Vec<(String, bool)> {
    shape
        .questions
        .iter()
        .map(|q| (q.clone(), rng.gen_bool(0.6)))
        .collect()
}

/// A uniformly random answer set.
pub fn random_answers<R: Rng>(rng: &mut R, shape: &Shape) -> Answers {
    let levels = shape
        .symptoms
        .iter()
        .filter_map(|(s, levels)| {
            let pick = rng.gen_range(0..=levels.len());
            (pick < levels.len()).then(|| (s.clone(), levels[pick].clone()))
        })
        .collect();
    Answers {
        levels,
        catalysts: catalysts(rng, shape),
    }
}

/// Every selection/level combination when there are at most `limit`,
/// otherwise `samples` random ones. Catalyst answers are drawn per set.
pub fn answer_sets<R: Rng>(
    rng: &mut R,
    shape: &Shape,
    limit: usize,
    samples: usize,
) -> Vec<Answers> {
    let total: usize = shape.symptoms.iter().map(|(_, l)| l.len() + 1).product();
    if total > limit {
        return (0..samples).map(|_| random_answers(rng, shape)).collect();
    }
    let mut out = Vec::with_capacity(total);
    for mut code in 0..total {
        let mut levels = Vec::new();
        for (s, ls) in &shape.symptoms {
            let radix = ls.len() + 1;
            let pick = code % radix;
            code /= radix;
            if pick > 0 {
                levels.push((s.clone(), ls[pick - 1].clone()));
            }
        }
        out.push(Answers {
            levels,
            catalysts: catalysts(rng, shape),
        });
    }
    out
}
