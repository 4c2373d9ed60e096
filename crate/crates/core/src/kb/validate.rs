//! Knowledge base linter.
//!
//! Errors block loading; warnings flag consistency problems that the engine
//! tolerates (thresholds are authored constants, not derived from weights).

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::KbDocument;

/// Tolerance used when comparing weight sums against `max_th`.
const SUM_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IssueCode {
    // errors
    EmptyId,
    DuplicateId,
    NoAreas,
    AreaEmpty,
    DanglingRef,
    EmptyLevels,
    DuplicateLevel,
    UnknownLevel,
    WeightRange,
    ThresholdRange,
    ThresholdDegenerate,
    ThresholdOrder,
    MajorWithoutWeight,
    CatalystFactorRange,
    CatalystLinkMismatch,
    LabelEmpty,
    DuplicateLabel,
    LabelShape,
    LabelCoverage,
    // warnings
    WeightSumExceedsMaxth,
    MaxthUnreachable,
    OrphanDisease,
    OrphanSymptom,
}

impl IssueCode {
    pub fn as_str(self) -> &'static str {
        match self {
            IssueCode::EmptyId => "EMPTY_ID",
            IssueCode::DuplicateId => "DUPLICATE_ID",
            IssueCode::NoAreas => "NO_AREAS",
            IssueCode::AreaEmpty => "AREA_EMPTY",
            IssueCode::DanglingRef => "DANGLING_REF",
            IssueCode::EmptyLevels => "EMPTY_LEVELS",
            IssueCode::DuplicateLevel => "DUPLICATE_LEVEL",
            IssueCode::UnknownLevel => "UNKNOWN_LEVEL",
            IssueCode::WeightRange => "WEIGHT_RANGE",
            IssueCode::ThresholdRange => "THRESHOLD_RANGE",
            IssueCode::ThresholdDegenerate => "THRESHOLD_DEGENERATE",
            IssueCode::ThresholdOrder => "THRESHOLD_ORDER",
            IssueCode::MajorWithoutWeight => "MAJOR_WITHOUT_WEIGHT",
            IssueCode::CatalystFactorRange => "CATALYST_FACTOR_RANGE",
            IssueCode::CatalystLinkMismatch => "CATALYST_LINK_MISMATCH",
            IssueCode::LabelEmpty => "LABEL_EMPTY",
            IssueCode::DuplicateLabel => "DUPLICATE_LABEL",
            IssueCode::LabelShape => "LABEL_SHAPE",
            IssueCode::LabelCoverage => "LABEL_COVERAGE",
            IssueCode::WeightSumExceedsMaxth => "WEIGHT_SUM_EXCEEDS_MAXTH",
            IssueCode::MaxthUnreachable => "MAXTH_UNREACHABLE",
            IssueCode::OrphanDisease => "ORPHAN_DISEASE",
            IssueCode::OrphanSymptom => "ORPHAN_SYMPTOM",
        }
    }
}

impl fmt::Display for IssueCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Issue {
    pub code: IssueCode,
    pub path: String,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.code, self.path, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub errors: Vec<Issue>,
    pub warnings: Vec<Issue>,
}

impl ValidationReport {
    /// True when the document can be loaded.
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn has_error(&self, code: IssueCode) -> bool {
        self.errors.iter().any(|i| i.code == code)
    }

    pub fn has_warning(&self, code: IssueCode) -> bool {
        self.warnings.iter().any(|i| i.code == code)
    }

    fn error(&mut self, code: IssueCode, path: impl Into<String>, message: impl Into<String>) {
        self.errors.push(Issue {
            code,
            path: path.into(),
            message: message.into(),
        });
    }

    fn warn(&mut self, code: IssueCode, path: impl Into<String>, message: impl Into<String>) {
        self.warnings.push(Issue {
            code,
            path: path.into(),
            message: message.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for issue in &self.errors {
            writeln!(f, "error: {issue}")?;
        }
        for issue in &self.warnings {
            writeln!(f, "warning: {issue}")?;
        }
        write!(
            f,
            "{} error(s), {} warning(s)",
            self.errors.len(),
            self.warnings.len()
        )
    }
}

/// Collects ids of one kind, reporting empties and duplicates.
fn collect_ids<'a>(
    report: &mut ValidationReport,
    section: &str,
    ids: impl Iterator<Item = &'a str>,
) -> HashSet<&'a str> {
    let mut seen = HashSet::new();
    for (pos, id) in ids.enumerate() {
        if id.trim().is_empty() {
            report.error(
                IssueCode::EmptyId,
                format!("{section}[{pos}]"),
                "id is empty",
            );
        } else if !seen.insert(id) {
            report.error(
                IssueCode::DuplicateId,
                format!("{section}[{id}]"),
                format!("id '{id}' is declared more than once"),
            );
        }
    }
    seen
}

fn check_list<'a>(
    report: &mut ValidationReport,
    path: &str,
    items: &'a [String],
    known: &HashSet<&str>,
    kind: &str,
) -> HashSet<&'a str> {
    let mut seen = HashSet::new();
    for item in items {
        if !known.contains(item.as_str()) {
            report.error(
                IssueCode::DanglingRef,
                path,
                format!("unknown {kind} '{item}'"),
            );
        }
        if !seen.insert(item.as_str()) {
            report.error(
                IssueCode::DuplicateId,
                path,
                format!("{kind} '{item}' listed more than once"),
            );
        }
    }
    seen
}

/// Lints a structurally parsed document. Never fails; pure.
pub fn validate_kb(doc: &KbDocument) -> ValidationReport {
    let mut report = ValidationReport::default();

    collect_ids(
        &mut report,
        "areas",
        doc.areas.iter().map(|a| a.area_id.as_str()),
    );
    let symptom_ids = collect_ids(
        &mut report,
        "symptoms",
        doc.symptoms.iter().map(|s| s.symptom_id.as_str()),
    );
    let disease_ids = collect_ids(
        &mut report,
        "diseases",
        doc.diseases.iter().map(|d| d.disease_id.as_str()),
    );
    let question_ids = collect_ids(
        &mut report,
        "catalyst_questions",
        doc.catalyst_questions
            .iter()
            .map(|q| q.question_id.as_str()),
    );

    if doc.areas.is_empty() {
        report.error(
            IssueCode::NoAreas,
            "areas",
            "at least one problem area is required",
        );
    }
    let mut symptoms_in_areas = HashSet::new();
    let mut diseases_in_areas = HashSet::new();
    for area in &doc.areas {
        let base = format!("areas[{}]", area.area_id);
        if area.symptom_ids.is_empty() {
            report.error(
                IssueCode::AreaEmpty,
                format!("{base}.symptom_ids"),
                "area lists no symptoms",
            );
        }
        if area.disease_ids.is_empty() {
            report.error(
                IssueCode::AreaEmpty,
                format!("{base}.disease_ids"),
                "area lists no diseases",
            );
        }
        symptoms_in_areas.extend(check_list(
            &mut report,
            &format!("{base}.symptom_ids"),
            &area.symptom_ids,
            &symptom_ids,
            "symptom",
        ));
        diseases_in_areas.extend(check_list(
            &mut report,
            &format!("{base}.disease_ids"),
            &area.disease_ids,
            &disease_ids,
            "disease",
        ));
    }

    let mut levels_by_symptom: HashMap<&str, HashSet<&str>> = HashMap::new();
    for symptom in &doc.symptoms {
        let base = format!("symptoms[{}]", symptom.symptom_id);
        if symptom.levels.is_empty() {
            report.error(
                IssueCode::EmptyLevels,
                format!("{base}.levels"),
                "symptom declares no levels",
            );
        }
        let mut levels = HashSet::new();
        for level in &symptom.levels {
            if !levels.insert(level.as_str()) {
                report.error(
                    IssueCode::DuplicateLevel,
                    format!("{base}.levels"),
                    format!("level '{level}' is declared more than once"),
                );
            }
        }
        levels_by_symptom.insert(symptom.symptom_id.as_str(), levels);
        if !symptoms_in_areas.contains(symptom.symptom_id.as_str()) {
            report.warn(
                IssueCode::OrphanSymptom,
                base,
                "symptom is not offered by any area",
            );
        }
    }

    for q in &doc.catalyst_questions {
        let base = format!("catalyst_questions[{}]", q.question_id);
        if !disease_ids.contains(q.target_disease_id.as_str()) {
            report.error(
                IssueCode::DanglingRef,
                format!("{base}.target_disease_id"),
                format!("unknown disease '{}'", q.target_disease_id),
            );
        }
        if !(q.factor.is_finite() && q.factor >= 0.0) {
            report.error(
                IssueCode::CatalystFactorRange,
                format!("{base}.factor"),
                format!("factor {} must be a finite number >= 0", q.factor),
            );
        }
    }

    for disease in &doc.diseases {
        let base = format!("diseases[{}]", disease.disease_id);
        for (symptom_id, levels) in &disease.weights {
            let wpath = format!("{base}.weights[{symptom_id}]");
            let known_levels = levels_by_symptom.get(symptom_id.as_str());
            if known_levels.is_none() {
                report.error(
                    IssueCode::DanglingRef,
                    &wpath,
                    format!("unknown symptom '{symptom_id}'"),
                );
            }
            for (level, &weight) in levels {
                let lpath = format!("{wpath}[{level}]");
                if let Some(known) = known_levels {
                    if !known.contains(level.as_str()) {
                        report.error(
                            IssueCode::UnknownLevel,
                            &lpath,
                            format!("symptom '{symptom_id}' has no level '{level}'"),
                        );
                    }
                }
                if !(0.0..=1.0).contains(&weight) {
                    report.error(
                        IssueCode::WeightRange,
                        &lpath,
                        format!("weight {weight} is outside [0, 1]"),
                    );
                }
            }
        }

        let mut majors = HashSet::new();
        for major in &disease.major_symptom_ids {
            let mpath = format!("{base}.major_symptom_ids");
            if !symptom_ids.contains(major.as_str()) {
                report.error(
                    IssueCode::DanglingRef,
                    &mpath,
                    format!("unknown symptom '{major}'"),
                );
            } else if disease.max_weight(major) <= 0.0 {
                report.error(
                    IssueCode::MajorWithoutWeight,
                    &mpath,
                    format!("major symptom '{major}' has no nonzero weight"),
                );
            }
            if !majors.insert(major.as_str()) {
                report.error(
                    IssueCode::DuplicateId,
                    &mpath,
                    format!("symptom '{major}' listed more than once"),
                );
            }
        }

        let thresholds_finite = disease.min_th.is_finite() && disease.max_th.is_finite();
        if !thresholds_finite || disease.min_th < 0.0 {
            report.error(
                IssueCode::ThresholdRange,
                format!("{base}.min_th"),
                format!(
                    "thresholds must be finite with min_th >= 0 (min_th {}, max_th {})",
                    disease.min_th, disease.max_th
                ),
            );
        } else if disease.min_th == disease.max_th {
            report.error(
                IssueCode::ThresholdDegenerate,
                format!("{base}.max_th"),
                format!("min_th equals max_th ({})", disease.max_th),
            );
        } else if disease.min_th > disease.max_th {
            report.error(
                IssueCode::ThresholdOrder,
                format!("{base}.max_th"),
                format!(
                    "min_th {} exceeds max_th {}",
                    disease.min_th, disease.max_th
                ),
            );
        }

        let linked = check_list(
            &mut report,
            &format!("{base}.catalyst_question_ids"),
            &disease.catalyst_question_ids,
            &question_ids,
            "catalyst question",
        );
        for q in &doc.catalyst_questions {
            let targets_me = q.target_disease_id == disease.disease_id;
            let listed = linked.contains(q.question_id.as_str());
            if targets_me != listed {
                report.error(
                    IssueCode::CatalystLinkMismatch,
                    format!("{base}.catalyst_question_ids"),
                    format!(
                        "question '{}' targets '{}' but is {}listed here",
                        q.question_id,
                        q.target_disease_id,
                        if listed { "" } else { "not " }
                    ),
                );
            }
        }

        if thresholds_finite {
            let sum = disease.max_weight_sum();
            if sum > disease.max_th + SUM_EPSILON {
                report.warn(
                    IssueCode::WeightSumExceedsMaxth,
                    format!("{base}.max_th"),
                    format!(
                        "maximum weight sum {sum:.3} exceeds max_th {}",
                        disease.max_th
                    ),
                );
            } else if sum < disease.max_th - SUM_EPSILON {
                report.warn(
                    IssueCode::MaxthUnreachable,
                    format!("{base}.max_th"),
                    format!(
                        "maximum weight sum {sum:.3} cannot reach max_th {}",
                        disease.max_th
                    ),
                );
            }
        }

        if !diseases_in_areas.contains(disease.disease_id.as_str()) {
            report.warn(
                IssueCode::OrphanDisease,
                base,
                "disease is not part of any area",
            );
        }
    }

    if let Some(config) = &doc.labels {
        if config.labels.is_empty() {
            report.error(IssueCode::LabelEmpty, "labels", "label list is empty");
        }
        let mut names = HashSet::new();
        let mut shapes_ok = true;
        for (pos, l) in config.labels.iter().enumerate() {
            let path = format!("labels[{pos}]");
            if !names.insert(l.label.as_str()) {
                report.error(
                    IssueCode::DuplicateLabel,
                    &path,
                    format!("label '{}' is declared more than once", l.label),
                );
            }
            let t = l.trapezoid;
            let in_range = t.corners().iter().all(|c| (0.0..=100.0).contains(c));
            if !in_range || !t.is_ordered() {
                shapes_ok = false;
                report.error(
                    IssueCode::LabelShape,
                    &path,
                    format!(
                        "trapezoid {:?} must satisfy 0 <= a <= b <= c <= d <= 100",
                        t.corners()
                    ),
                );
            }
        }
        if shapes_ok && !config.labels.is_empty() {
            if let Some(x) = config.uncovered_point() {
                report.error(
                    IssueCode::LabelCoverage,
                    "labels",
                    format!("no label has positive membership at {x}"),
                );
            }
        }
    }

    report
}
