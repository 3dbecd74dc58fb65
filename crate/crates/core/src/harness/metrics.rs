//! Per-step metric rows and the run summary.

use serde::Serialize;

use super::scenario::Assertion;

/// Bumped whenever the metrics.csv columns or summary fields change.
pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: &str =
    "step,action,prediction_correct,candidate_count,ambiguity_resolved_by,node_count,edge_count,ovc_error_m,phase_error";

/// Names accepted by scenario assertions.
pub const SUMMARY_METRICS: &[&str] = &[
    "prediction_accuracy",
    "predictions",
    "attention_accuracy",
    "attention_predictions",
    "path_accuracy",
    "path_predictions",
    "mean_candidate_count",
    "relocations",
    "fallbacks",
    "consolidated_edges",
    "node_count",
    "edge_count",
    "range_exits",
    "circuit_slack",
    "max_phase_error",
    "max_ovc_error_m",
];

/// What kind of prediction a row carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictionKind {
    Attention,
    Path,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRow {
    pub step: usize,
    pub action: String,
    pub prediction_correct: Option<bool>,
    pub candidate_count: usize,
    pub ambiguity_resolved_by: Option<&'static str>,
    pub node_count: usize,
    pub edge_count: usize,
    /// Distance from the active cell's decoded center to the true vector.
    pub ovc_error_m: Option<f64>,
    /// Torus distance, in phase units, between the engine phase and the
    /// registered true phase.
    pub phase_error: f64,
    #[serde(skip)]
    pub kind: Option<PredictionKind>,
}

/// Renders rows as metrics.csv text, header included.
pub fn metrics_csv(rows: &[StepRow]) -> String {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory csv write");
    }
    let body =
        String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv is utf-8");
    format!("{CSV_HEADER}\n{body}")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub prediction_accuracy: f64,
    pub predictions: usize,
    pub attention_accuracy: f64,
    pub attention_predictions: usize,
    pub path_accuracy: f64,
    pub path_predictions: usize,
    /// Mean grid-consistent candidate count over attention predictions.
    pub mean_candidate_count: f64,
    pub relocations: u64,
    pub fallbacks: usize,
    pub consolidated_edges: usize,
    pub node_count: usize,
    pub edge_count: usize,
    pub range_exits: usize,
    pub circuit_slack: usize,
    pub max_phase_error: f64,
    pub max_ovc_error_m: f64,
}

/// Counters the run accumulates outside the rows.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunCounters {
    pub relocations: u64,
    pub consolidated_edges: usize,
    pub node_count: usize,
    pub edge_count: usize,
    pub range_exits: usize,
    pub circuit_slack: usize,
}

fn ratio(hits: usize, total: usize) -> f64 {
    // an empty set of predictions has nothing wrong in it
    if total == 0 {
        1.0
    } else {
        hits as f64 / total as f64
    }
}

impl Summary {
    pub fn from_rows(rows: &[StepRow], c: RunCounters) -> Self {
        let tally = |kind: Option<PredictionKind>| {
            let sel: Vec<&StepRow> = rows
                .iter()
                .filter(|r| r.prediction_correct.is_some() && (kind.is_none() || r.kind == kind))
                .collect();
            let hits = sel
                .iter()
                .filter(|r| r.prediction_correct == Some(true))
                .count();
            (hits, sel.len())
        };
        let (all_hits, all) = tally(None);
        let (att_hits, att) = tally(Some(PredictionKind::Attention));
        let (path_hits, path) = tally(Some(PredictionKind::Path));
        let attention_rows = rows
            .iter()
            .filter(|r| r.kind == Some(PredictionKind::Attention));
        let cand_total: usize = attention_rows.clone().map(|r| r.candidate_count).sum();
        let mean_candidate_count = if att == 0 {
            0.0
        } else {
            cand_total as f64 / att as f64
        };
        Summary {
            prediction_accuracy: ratio(all_hits, all),
            predictions: all,
            attention_accuracy: ratio(att_hits, att),
            attention_predictions: att,
            path_accuracy: ratio(path_hits, path),
            path_predictions: path,
            mean_candidate_count,
            relocations: c.relocations,
            fallbacks: rows
                .iter()
                .filter(|r| r.ambiguity_resolved_by == Some("FALLBACK"))
                .count(),
            consolidated_edges: c.consolidated_edges,
            node_count: c.node_count,
            edge_count: c.edge_count,
            range_exits: c.range_exits,
            circuit_slack: c.circuit_slack,
            max_phase_error: rows.iter().map(|r| r.phase_error).fold(0.0, f64::max),
            max_ovc_error_m: rows
                .iter()
                .filter_map(|r| r.ovc_error_m)
                .fold(0.0, f64::max),
        }
    }

    /// Value of a metric listed in [`SUMMARY_METRICS`].
    pub fn metric(&self, name: &str) -> Option<f64> {
        let v = match name {
            "prediction_accuracy" => self.prediction_accuracy,
            "predictions" => self.predictions as f64,
            "attention_accuracy" => self.attention_accuracy,
            "attention_predictions" => self.attention_predictions as f64,
            "path_accuracy" => self.path_accuracy,
            "path_predictions" => self.path_predictions as f64,
            "mean_candidate_count" => self.mean_candidate_count,
            "relocations" => self.relocations as f64,
            "fallbacks" => self.fallbacks as f64,
            "consolidated_edges" => self.consolidated_edges as f64,
            "node_count" => self.node_count as f64,
            "edge_count" => self.edge_count as f64,
            "range_exits" => self.range_exits as f64,
            "circuit_slack" => self.circuit_slack as f64,
            "max_phase_error" => self.max_phase_error,
            "max_ovc_error_m" => self.max_ovc_error_m,
            _ => return None,
        };
        Some(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssertionResult {
    pub metric: String,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub value: f64,
    pub passed: bool,
}

pub fn check_assertions(summary: &Summary, assertions: &[Assertion]) -> Vec<AssertionResult> {
    assertions
        .iter()
        .map(|a| {
            let value = summary.metric(&a.metric).unwrap_or(f64::NAN);
            let passed = a.min.is_none_or(|m| value >= m) && a.max.is_none_or(|m| value <= m);
            AssertionResult {
                metric: a.metric.clone(),
                min: a.min,
                max: a.max,
                value,
                passed,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(step: usize, correct: Option<bool>, kind: Option<PredictionKind>) -> StepRow {
        StepRow {
            step,
            action: "ATTEND(1)".into(),
            prediction_correct: correct,
            candidate_count: 3,
            ambiguity_resolved_by: correct.map(|_| "EDGE"),
            node_count: 2,
            edge_count: 1,
            ovc_error_m: Some(0.25),
            phase_error: 0.0,
            kind,
        }
    }

    #[test]
    fn empty_rows_give_header_only() {
        assert_eq!(metrics_csv(&[]), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn csv_columns_follow_header() {
        let text = metrics_csv(&[
            row(0, Some(true), Some(PredictionKind::Attention)),
            row(1, None, None),
        ]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1], "0,ATTEND(1),true,3,EDGE,2,1,0.25,0.0");
        assert_eq!(lines[2], "1,ATTEND(1),,3,,2,1,0.25,0.0");
    }

    #[test]
    fn summary_accuracies_split_by_kind() {
        let rows = vec![
            row(0, Some(true), Some(PredictionKind::Attention)),
            row(1, Some(false), Some(PredictionKind::Attention)),
            row(2, Some(true), Some(PredictionKind::Path)),
            row(3, None, None),
        ];
        let s = Summary::from_rows(&rows, RunCounters::default());
        assert_eq!(s.predictions, 3);
        assert!((s.prediction_accuracy - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(s.attention_accuracy, 0.5);
        assert_eq!(s.path_accuracy, 1.0);
        assert_eq!(s.mean_candidate_count, 3.0);
        for name in SUMMARY_METRICS {
            assert!(s.metric(name).is_some(), "{name}");
        }
    }

    #[test]
    fn assertions_check_both_bounds() {
        let s = Summary::from_rows(
            &[row(0, Some(true), Some(PredictionKind::Attention))],
            RunCounters::default(),
        );
        let res = check_assertions(
            &s,
            &[
                Assertion {
                    metric: "prediction_accuracy".into(),
                    min: Some(0.99),
                    max: None,
                },
                Assertion {
                    metric: "node_count".into(),
                    min: None,
                    max: Some(-1.0),
                },
            ],
        );
        assert!(res[0].passed);
        assert!(!res[1].passed);
    }
}
