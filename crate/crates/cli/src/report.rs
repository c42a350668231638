//! Serializable run reports and their JSON/CSV/table renderings.

use std::fmt::Write;

use pmmknn::evaluation::{CvReport, TuneCell};
use serde::Serialize;

/// Echo of everything needed to rerun a cross-validation experiment.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ResolvedConfig {
    pub command: String,
    pub dataset: String,
    pub variant: String,
    pub classifiers: Vec<String>,
    pub k: usize,
    pub r: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponents: Option<Vec<f64>>,
    pub folds: usize,
    pub seed: u64,
    pub support_scope: String,
    pub dataset_samples: usize,
    pub dataset_features: usize,
    pub dataset_classes: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ClassifierResult {
    pub classifier: String,
    #[serde(flatten)]
    pub cv: CvReport,
}

/// Full `cv` run report; `duration_seconds` is the only field allowed to
/// differ between reruns of the same configuration.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BenchmarkReport {
    pub config: ResolvedConfig,
    pub results: Vec<ClassifierResult>,
    pub duration_seconds: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct TuneRunReport {
    pub config: ResolvedConfig,
    pub best: TuneCell,
    pub cells: Vec<TuneCell>,
    pub duration_seconds: f64,
}

/// Accuracy/sensitivity/specificity for one classifier on one dataset.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct MetricTriple {
    pub classifier: &'static str,
    pub accuracy: f64,
    pub sensitivity: f64,
    pub specificity: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct DatasetBenchmark {
    pub dataset: String,
    pub variant: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub tuned_k: usize,
    pub tuned_r: usize,
    pub knn_k: usize,
    pub measured: Vec<MetricTriple>,
    /// Previously published results for the same datasets and classifiers.
    pub reference: Vec<MetricTriple>,
    pub duration_seconds: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BenchAllReport {
    pub folds: usize,
    pub seed: u64,
    pub datasets: Vec<DatasetBenchmark>,
    pub duration_seconds: f64,
}

/// Published reference results (accuracy, sensitivity, specificity) for
/// PMM-KNN, Gaussian naive Bayes and KNN on the five benchmark datasets.
pub fn reference_results(dataset: &str) -> Option<[MetricTriple; 3]> {
    let triple = |c, a, s, p| MetricTriple {
        classifier: c,
        accuracy: a,
        sensitivity: s,
        specificity: p,
    };
    match dataset {
        "iris" => Some([
            triple("pmm-knn", 0.980, 0.970, 0.990),
            triple("gnb", 0.953, 0.946, 0.973),
            triple("knn", 0.966, 0.957, 0.981),
        ]),
        "wbc" => Some([
            triple("pmm-knn", 0.945, 0.963, 0.908),
            triple("gnb", 0.938, 0.959, 0.888),
            triple("knn", 0.934, 0.961, 0.888),
        ]),
        "digits" => Some([
            triple("pmm-knn", 0.993, 0.999, 0.993),
            triple("gnb", 0.838, 0.834, 0.982),
            triple("knn", 0.986, 0.986, 0.998),
        ]),
        "satellite" => Some([
            triple("pmm-knn", 0.922, 0.899, 0.984),
            triple("gnb", 0.795, 0.784, 0.959),
            triple("knn", 0.894, 0.868, 0.978),
        ]),
        "eeg" => Some([
            triple("pmm-knn", 0.978, 0.977, 0.982),
            triple("gnb", 0.458, 0.942, 0.063),
            triple("knn", 0.941, 0.922, 0.956),
        ]),
        _ => None,
    }
}

pub fn render_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serialization cannot fail")
}

impl BenchmarkReport {
    pub fn render_csv(&self) -> String {
        let mut out = String::from("dataset,classifier,metric,value\n");
        for result in &self.results {
            let rows = [
                ("accuracy", result.cv.pooled.accuracy),
                ("sensitivity", result.cv.pooled.macro_sensitivity),
                ("specificity", result.cv.pooled.macro_specificity),
            ];
            for (metric, value) in rows {
                let _ = writeln!(
                    out,
                    "{},{},{metric},{value}",
                    self.config.dataset, result.classifier
                );
            }
        }
        out
    }

    pub fn render_table(&self) -> String {
        let c = &self.config;
        let mut out = format!(
            "dataset {} ({} samples, {} features, {} classes), variant {}\n\
             folds {}, seed {}, k {}, r {}, support scope {}\n\n",
            c.dataset,
            c.dataset_samples,
            c.dataset_features,
            c.dataset_classes,
            c.variant,
            c.folds,
            c.seed,
            c.k,
            c.r,
            c.support_scope,
        );
        let _ = writeln!(
            out,
            "{:<10} {:>9} {:>12} {:>12} {:>11}",
            "classifier", "accuracy", "sensitivity", "specificity", "fold-mean"
        );
        for r in &self.results {
            let _ = writeln!(
                out,
                "{:<10} {:>9.4} {:>12.4} {:>12.4} {:>11.4}",
                r.classifier,
                r.cv.pooled.accuracy,
                r.cv.pooled.macro_sensitivity,
                r.cv.pooled.macro_specificity,
                r.cv.fold_mean_accuracy,
            );
        }
        let _ = writeln!(out, "\ncompleted in {:.2}s", self.duration_seconds);
        out
    }
}

impl TuneRunReport {
    pub fn render_csv(&self) -> String {
        let mut out = String::from("k,r,mean_accuracy\n");
        for cell in &self.cells {
            let _ = writeln!(out, "{},{},{}", cell.k, cell.r, cell.mean_accuracy);
        }
        out
    }

    pub fn render_table(&self) -> String {
        let mut out = format!(
            "dataset {}, variant {}, folds {}, seed {} ({} grid cells)\n\n",
            self.config.dataset,
            self.config.variant,
            self.config.folds,
            self.config.seed,
            self.cells.len(),
        );
        let _ = writeln!(out, "{:>4} {:>4} {:>14}", "k", "r", "mean accuracy");
        for cell in &self.cells {
            let marker = if cell.k == self.best.k && cell.r == self.best.r {
                "  <- best"
            } else {
                ""
            };
            let _ = writeln!(
                out,
                "{:>4} {:>4} {:>14.4}{marker}",
                cell.k, cell.r, cell.mean_accuracy
            );
        }
        let _ = writeln!(
            out,
            "\nbest: k = {}, r = {}, mean accuracy {:.4} ({:.2}s)",
            self.best.k, self.best.r, self.best.mean_accuracy, self.duration_seconds
        );
        out
    }
}

impl BenchAllReport {
    pub fn render_csv(&self) -> String {
        let mut out = String::from("dataset,classifier,metric,value,reference\n");
        for d in &self.datasets {
            for m in &d.measured {
                let reference = d.reference.iter().find(|r| r.classifier == m.classifier);
                let rows = [
                    ("accuracy", m.accuracy, reference.map(|r| r.accuracy)),
                    (
                        "sensitivity",
                        m.sensitivity,
                        reference.map(|r| r.sensitivity),
                    ),
                    (
                        "specificity",
                        m.specificity,
                        reference.map(|r| r.specificity),
                    ),
                ];
                for (metric, value, reference) in rows {
                    let reference = reference.map_or(String::new(), |v| v.to_string());
                    let _ = writeln!(
                        out,
                        "{},{},{metric},{value},{reference}",
                        d.dataset, m.classifier
                    );
                }
            }
        }
        out
    }

    pub fn render_table(&self) -> String {
        let mut out = format!(
            "five-dataset benchmark, folds {}, seed {} (measured | reference)\n",
            self.folds, self.seed
        );
        for d in &self.datasets {
            let _ = writeln!(
                out,
                "\n{} [{}] tuned pmm-knn k={} r={}, knn k={} ({:.1}s)",
                d.dataset, d.variant, d.tuned_k, d.tuned_r, d.knn_k, d.duration_seconds
            );
            if let Some(err) = &d.error {
                let _ = writeln!(out, "  FAILED: {err}");
                continue;
            }
            let _ = writeln!(
                out,
                "  {:<10} {:>17} {:>17} {:>17}",
                "classifier", "accuracy", "sensitivity", "specificity"
            );
            for m in &d.measured {
                let r = d.reference.iter().find(|r| r.classifier == m.classifier);
                let fmt_pair = |measured: f64, reference: Option<f64>| match reference {
                    Some(v) => format!("{measured:.4} | {v:.3}"),
                    None => format!("{measured:.4} |     -"),
                };
                let _ = writeln!(
                    out,
                    "  {:<10} {:>17} {:>17} {:>17}",
                    m.classifier,
                    fmt_pair(m.accuracy, r.map(|r| r.accuracy)),
                    fmt_pair(m.sensitivity, r.map(|r| r.sensitivity)),
                    fmt_pair(m.specificity, r.map(|r| r.specificity)),
                );
            }
        }
        let _ = writeln!(out, "\ncompleted in {:.2}s", self.duration_seconds);
        out
    }
}
