//! Linguistic labels over the probability axis.
//!
//! Each label owns a trapezoidal membership function over `[0, 100]`. A
//! probability is mapped to the degree of every label and the label with the
//! highest degree is reported; ties go to the later label in the config.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

/// Trapezoid `a <= b <= c <= d`: rises on `[a, b]`, flat at 1 on `[b, c]`,
/// falls on `[c, d]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Trapezoid {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl From<[f64; 4]> for Trapezoid {
    fn from([a, b, c, d]: [f64; 4]) -> Self {
        Trapezoid { a, b, c, d }
    }
}

impl From<Trapezoid> for [f64; 4] {
    fn from(t: Trapezoid) -> Self {
        [t.a, t.b, t.c, t.d]
    }
}

impl Trapezoid {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Trapezoid { a, b, c, d }
    }

    pub fn membership(&self, x: f64) -> f64 {
        if x >= self.b && x <= self.c {
            1.0
        } else if x > self.a && x < self.b {
            (x - self.a) / (self.b - self.a)
        } else if x > self.c && x < self.d {
            (self.d - x) / (self.d - self.c)
        } else {
            0.0
        }
    }

    pub fn is_ordered(&self) -> bool {
        self.a <= self.b && self.b <= self.c && self.c <= self.d
    }

    pub fn corners(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuzzyLabel {
    pub label: String,
    pub trapezoid: Trapezoid,
}

/// Ordered list of labels; order matters for tie-breaking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FuzzyLabelConfig {
    pub labels: Vec<FuzzyLabel>,
}

impl Default for FuzzyLabelConfig {
    fn default() -> Self {
        let label = |name: &str, a, b, c, d| FuzzyLabel {
            label: name.to_string(),
            trapezoid: Trapezoid::new(a, b, c, d),
        };
        FuzzyLabelConfig {
            labels: vec![
                label("very unlikely", 0.0, 0.0, 10.0, 25.0),
                label("unlikely", 10.0, 25.0, 35.0, 45.0),
                label("possible", 35.0, 45.0, 55.0, 65.0),
                label("likely", 55.0, 65.0, 75.0, 85.0),
                label("very likely", 75.0, 90.0, 100.0, 100.0),
            ],
        }
    }
}

impl FuzzyLabelConfig {
    /// Returns a point of `[0, 100]` where no label has positive membership.
    ///
    /// Memberships only change shape at trapezoid corners, so probing every
    /// corner and the midpoint between consecutive corners is exhaustive.
    pub fn uncovered_point(&self) -> Option<f64> {
        let mut points: Vec<f64> = vec![0.0, 100.0];
        for l in &self.labels {
            points.extend(
                l.trapezoid
                    .corners()
                    .into_iter()
                    .filter(|p| (0.0..=100.0).contains(p)),
            );
        }
        points.sort_by(f64::total_cmp);
        points.dedup();
        let mut probes = points.clone();
        probes.extend(points.windows(2).map(|w| (w[0] + w[1]) / 2.0));
        probes.sort_by(f64::total_cmp);
        probes
            .into_iter()
            .find(|&x| self.labels.iter().all(|l| l.trapezoid.membership(x) <= 0.0))
    }
}

/// Outcome of fuzzifying one probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Labelling {
    pub label: String,
    pub memberships: IndexMap<String, f64>,
}

/// Evaluates every label at `clamp(p, 0, 100)`.
pub fn fuzzify(p: f64, config: &FuzzyLabelConfig) -> Labelling {
    let x = p.clamp(0.0, 100.0);
    let memberships: IndexMap<String, f64> = config
        .labels
        .iter()
        .map(|l| (l.label.clone(), l.trapezoid.membership(x).clamp(0.0, 1.0)))
        .collect();
    let mut best: Option<(&str, f64)> = None;
    for (label, &degree) in &memberships {
        match best {
            Some((_, top)) if degree < top => {}
            _ => best = Some((label.as_str(), degree)),
        }
    }
    Labelling {
        label: best.map(|(l, _)| l.to_string()).unwrap_or_default(),
        memberships,
    }
}
