//! Plain-text results table shared by `score` and `diagnose`.

use std::fmt::Write;

use fuzzydx_core::decimal::fmt3;
use fuzzydx_core::DiagnosisResult;

pub const EMPTY_MESSAGE: &str = "no likely condition found";

pub fn render(results: &[DiagnosisResult]) -> String {
    let name_width = results
        .iter()
        .map(|r| r.display_name.chars().count())
        .chain(std::iter::once("disease".len()))
        .max()
        .unwrap_or(0);
    let label_width = results
        .iter()
        .map(|r| r.label.chars().count())
        .chain(std::iter::once("label".len()))
        .max()
        .unwrap_or(0);

    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>4}  {:<name_width$}  {:>11}  {:<label_width$}  {:>10}",
        "rank", "disease", "probability", "label", "confidence"
    );
    for r in results {
        let _ = writeln!(
            out,
            "{:>4}  {:<name_width$}  {:>11}  {:<label_width$}  {:>10}",
            r.rank,
            r.display_name,
            fmt3(r.final_probability),
            r.label,
            fmt3(r.confidence)
        );
    }
    if results.is_empty() {
        let _ = writeln!(out, "({EMPTY_MESSAGE})");
    }
    out
}
