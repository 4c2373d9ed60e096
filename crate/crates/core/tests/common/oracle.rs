//! Brute-force transcription of the scoring formula and the catalyst rule,
//! evaluated straight off the JSON knowledge base document.

use serde_json::Value;

use super::gen::Answers;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRow {
    pub disease_id: String,
    pub temp: f64,
    pub total: f64,
    pub final_probability: f64,
}

fn level_of<'a>(answers: &'a Answers, symptom: &str) -> Option<&'a str> {
    answers
        .levels
        .iter()
        .find(|(s, _)| s == symptom)
        .map(|(_, l)| l.as_str())
}

fn weight(disease: &Value, symptom: &str, level: &str) -> f64 {
    disease["weights"][symptom][level].as_f64().unwrap_or(0.0)
}

fn best_weight(disease: &Value, symptom: &str) -> f64 {
    match disease["weights"][symptom].as_object() {
        Some(levels) => levels
            .values()
            .map(|w| w.as_f64().unwrap())
            .fold(0.0, f64::max),
        None => 0.0,
    }
}

/// Rows for every disease of the area, ranked, before filtering.
pub fn score(doc: &Value, area_id: &str, answers: &Answers) -> Vec<OracleRow> {
    let area = doc["areas"]
        .as_array()
        .unwrap()
        .iter()
        .find(|a| a["area_id"] == area_id)
        .unwrap();
    let find_disease = |id: &str| {
        doc["diseases"]
            .as_array()
            .unwrap()
            .iter()
            .find(|d| d["disease_id"] == id)
            .unwrap()
            .clone()
    };

    let mut temps: Vec<(String, f64)> = Vec::new();
    for id in area["disease_ids"].as_array().unwrap() {
        let id = id.as_str().unwrap();
        let disease = find_disease(id);
        // sum S_i * W_i over every symptom of the area
        let mut sum_sw = 0.0;
        for symptom in area["symptom_ids"].as_array().unwrap() {
            let symptom = symptom.as_str().unwrap();
            let (s_i, w_i) = match level_of(answers, symptom) {
                Some(level) => (1.0, weight(&disease, symptom, level)),
                None => (0.0, 0.0),
            };
            sum_sw += s_i * w_i;
        }
        // sum of major weights the user did not select
        let mut sum_major = 0.0;
        for major in disease["major_symptom_ids"].as_array().unwrap() {
            let major = major.as_str().unwrap();
            let s_major = if level_of(answers, major).is_none() {
                1.0
            } else {
                0.0
            };
            sum_major += s_major * best_weight(&disease, major);
        }
        let min_th = disease["min_th"].as_f64().unwrap();
        let max_th = disease["max_th"].as_f64().unwrap();
        temps.push((
            id.to_string(),
            (sum_sw - sum_major - min_th) / (max_th - min_th) * 100.0,
        ));
    }

    // IF temp is Max AND catalysts present THEN temp + sum(C) ELSE temp
    let mut max_id: Option<&str> = None;
    let mut max_temp = f64::NEG_INFINITY;
    for (id, t) in &temps {
        let better = *t > max_temp || (*t == max_temp && max_id.is_some_and(|m| id.as_str() < m));
        if better {
            max_id = Some(id);
            max_temp = *t;
        }
    }
    let mut rows: Vec<OracleRow> = temps
        .iter()
        .map(|(id, t)| {
            let mut total = *t;
            if max_id == Some(id.as_str()) {
                let mut sum_c = 0.0;
                for q in doc["catalyst_questions"].as_array().unwrap() {
                    let yes = answers
                        .catalysts
                        .iter()
                        .any(|(qid, a)| *a && q["question_id"] == qid.as_str());
                    if q["target_disease_id"] == id.as_str() && yes {
                        sum_c += q["factor"].as_f64().unwrap();
                    }
                }
                total += sum_c;
            }
            OracleRow {
                disease_id: id.clone(),
                temp: *t,
                total,
                // spelled out rather than clamp() to stay a literal transcription
                #[allow(clippy::manual_clamp)]
                final_probability: total.max(0.0).min(100.0),
            }
        })
        .collect();

    // bubble sort: final desc, unclamped total desc, id asc
    let n = rows.len();
    for i in 0..n {
        for j in 0..n - 1 - i {
            let (a, b) = (&rows[j], &rows[j + 1]);
            let swap = b.final_probability > a.final_probability
                || (b.final_probability == a.final_probability
                    && (b.total > a.total || (b.total == a.total && b.disease_id < a.disease_id)));
            if swap {
                rows.swap(j, j + 1);
            }
        }
    }
    rows
}

/// Ranked rows remaining after the display filter.
pub fn diagnose(doc: &Value, area_id: &str, answers: &Answers, threshold: f64) -> Vec<OracleRow> {
    score(doc, area_id, answers)
        .into_iter()
        .filter(|r| r.final_probability >= threshold)
        .collect()
}
