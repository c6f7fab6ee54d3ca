//! Evaluation and topic reports: JSON files plus plain-text and CSV views.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use codemix_core::analysis::{Cell, TopicSummary};
use codemix_core::eval::EvalReport;
use serde::Serialize;

use crate::manifest::Manifest;

#[derive(Debug, Clone, Serialize)]
pub struct SchemeResult {
    pub scheme: String,
    pub report: EvalReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportFile {
    pub manifest: Manifest,
    pub results: Vec<SchemeResult>,
}

fn cell(mean: f64, std: Option<f64>) -> String {
    match std {
        Some(s) => format!("{:.2}±{:.2}", 100.0 * mean, 100.0 * s),
        None => format!("{:.2}", 100.0 * mean),
    }
}

/// Scheme × ACC/F1/AUC in percent. Cross-validated rows show mean ± sample
/// standard deviation over folds.
pub fn format_table(results: &[SchemeResult]) -> String {
    let width = results
        .iter()
        .map(|r| r.scheme.chars().count())
        .max()
        .unwrap_or(0)
        .max("Scheme".len());
    let mut out = String::new();
    writeln!(out, "{:<width$}  {:>14}  {:>14}  {:>14}", "Scheme", "ACC", "F1", "AUC").unwrap();
    for r in results {
        let e = &r.report;
        let (a, f, u) = match &e.mean_std {
            Some(ms) => (
                cell(ms.acc.0, Some(ms.acc.1)),
                cell(ms.f1_macro.0, Some(ms.f1_macro.1)),
                cell(ms.auc.0, Some(ms.auc.1)),
            ),
            None => (cell(e.acc, None), cell(e.f1_macro, None), cell(e.auc, None)),
        };
        writeln!(out, "{:<width$}  {:>14}  {:>14}  {:>14}", r.scheme, a, f, u).unwrap();
    }
    if let Some(k) = results
        .iter()
        .find_map(|r| r.report.per_fold.as_ref().map(Vec::len))
    {
        writeln!(out, "(percent; mean±sample std over {k} folds)").unwrap();
    } else {
        writeln!(out, "(percent)").unwrap();
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct TopicsFile {
    pub manifest: Manifest,
    pub min_topic_size: usize,
    pub outliers: usize,
    pub topics: Vec<TopicSummary>,
    pub flairs: BTreeMap<String, Cell>,
}

/// Topic × flair matrix of code-mixing proportions; empty where a topic
/// has no messages of a flair.
pub fn topics_csv(topics: &[TopicSummary]) -> String {
    let flairs: BTreeSet<&str> = topics
        .iter()
        .flat_map(|t| t.flair_breakdown.keys().map(String::as_str))
        .collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["topic_id".to_string(), "size".into(), "all".into()];
    header.extend(flairs.iter().map(|f| f.to_string()));
    w.write_record(&header).expect("in-memory csv");
    for t in topics {
        let mut row = vec![
            t.topic_id.to_string(),
            t.size.to_string(),
            format!("{:.6}", t.codemix_proportion),
        ];
        row.extend(flairs.iter().map(|f| {
            t.flair_breakdown
                .get(*f)
                .map(|c| format!("{:.6}", c.proportion))
                .unwrap_or_default()
        }));
        w.write_record(&row).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv of utf-8 fields")
}
