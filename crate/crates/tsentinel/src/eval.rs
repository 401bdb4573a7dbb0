//! Confusion matrices, the classification metrics, and the end-to-end
//! train/evaluate experiment protocol.
//!
//! Attack is the positive class. A precision or recall whose denominator is
//! zero is 1.0 when the class has zero true members and zero predictions
//! (vacuously perfect) and 0.0 otherwise; F1 of a zero precision/recall pair
//! is 0. Macro averages are unweighted means over the two classes and are the
//! headline figures in the rendered table.

use serde::{Deserialize, Serialize};

use crate::cart::{cart_fit, CartModel, CartParams};
use crate::error::{Error, Result};
use crate::knn::{knn_fit, KnnModel};
use crate::pipeline::{fit_standardizer, standardize, Standardizer};
use crate::telemetry::{to_feature_matrix, Label, TelemetryTrace};

/// 2x2 confusion counts with Attack positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub true_negatives: u64,
}

impl ConfusionMatrix {
    pub fn new(tp: u64, fp: u64, fn_: u64, tn: u64) -> ConfusionMatrix {
        ConfusionMatrix {
            true_positives: tp,
            false_positives: fp,
            false_negatives: fn_,
            true_negatives: tn,
        }
    }

    pub fn total(&self) -> u64 {
        self.true_positives + self.false_positives + self.false_negatives + self.true_negatives
    }
}

/// Counts prediction outcomes against ground truth.
pub fn confusion(predicted: &[Label], truth: &[Label]) -> Result<ConfusionMatrix> {
    if predicted.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: predicted.len(),
            right: truth.len(),
        });
    }
    if predicted.is_empty() {
        return Err(Error::EmptyInput {
            context: "confusion over empty label lists".to_string(),
        });
    }
    let mut c = ConfusionMatrix::new(0, 0, 0, 0);
    for (p, t) in predicted.iter().zip(truth) {
        match (p, t) {
            (Label::Attack, Label::Attack) => c.true_positives += 1,
            (Label::Attack, Label::Benign) => c.false_positives += 1,
            (Label::Benign, Label::Attack) => c.false_negatives += 1,
            (Label::Benign, Label::Benign) => c.true_negatives += 1,
        }
    }
    Ok(c)
}

/// Precision/recall/F1 for one class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// The four headline metrics plus their per-class breakdown.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub attack: ClassMetrics,
    pub benign: ClassMetrics,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
}

/// Ratio with the vacuous-class convention: a zero denominator yields 1.0
/// when the class is absent from both truth and predictions, else 0.0.
fn ratio(numerator: u64, denominator: u64, vacuous: bool) -> f64 {
    if denominator == 0 {
        if vacuous {
            1.0
        } else {
            0.0
        }
    } else {
        numerator as f64 / denominator as f64
    }
}

fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Computes the metrics report from confusion counts.
pub fn metrics(c: &ConfusionMatrix) -> Result<MetricsReport> {
    if c.total() == 0 {
        return Err(Error::EmptyConfusion);
    }
    let (tp, fp, fn_, tn) = (
        c.true_positives,
        c.false_positives,
        c.false_negatives,
        c.true_negatives,
    );
    let attack_vacuous = tp + fn_ == 0 && tp + fp == 0;
    let benign_vacuous = tn + fp == 0 && tn + fn_ == 0;

    let attack = ClassMetrics {
        precision: ratio(tp, tp + fp, attack_vacuous),
        recall: ratio(tp, tp + fn_, attack_vacuous),
        f1: 0.0,
    };
    let attack = ClassMetrics {
        f1: f1(attack.precision, attack.recall),
        ..attack
    };
    // For Benign, the "positives" are benign predictions and benign truths.
    let benign = ClassMetrics {
        precision: ratio(tn, tn + fn_, benign_vacuous),
        recall: ratio(tn, tn + fp, benign_vacuous),
        f1: 0.0,
    };
    let benign = ClassMetrics {
        f1: f1(benign.precision, benign.recall),
        ..benign
    };

    Ok(MetricsReport {
        accuracy: (tp + tn) as f64 / c.total() as f64,
        attack,
        benign,
        macro_precision: (attack.precision + benign.precision) / 2.0,
        macro_recall: (attack.recall + benign.recall) / 2.0,
        macro_f1: (attack.f1 + benign.f1) / 2.0,
    })
}

/// Everything needed to re-run an experiment bit-identically.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// Where the training trace came from (scenario names, seeds, or paths).
    pub train: String,
    /// Where the evaluation trace came from.
    pub test: String,
}

/// Results and full configuration of one train/evaluate run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub features: Vec<String>,
    pub knn_k: usize,
    pub cart_params: CartParams,
    pub knn: MetricsReport,
    pub cart: MetricsReport,
    pub provenance: Provenance,
}

/// Fitted artifacts of an experiment, for reuse by the online detector.
#[derive(Debug, Clone)]
pub struct ExperimentModels {
    pub standardizer: Standardizer,
    pub knn: KnnModel,
    pub cart: CartModel,
}

/// Runs the full protocol: project both traces onto `features`, fit the
/// standardizer on the training trace, standardize both, fit kNN and CART on
/// the training data, predict the test data, and score both classifiers.
pub fn run_experiment(
    train: &TelemetryTrace,
    test: &TelemetryTrace,
    features: &[String],
    knn_k: usize,
    cart_params: CartParams,
    provenance: Provenance,
) -> Result<(ExperimentReport, ExperimentModels)> {
    if !train.is_labeled() {
        return Err(Error::MissingLabels {
            context: "training trace".to_string(),
        });
    }
    if !test.is_labeled() {
        return Err(Error::MissingLabels {
            context: "test trace".to_string(),
        });
    }
    let train_m = to_feature_matrix(train, features)?;
    let test_m = to_feature_matrix(test, features)?;
    let standardizer = fit_standardizer(&train_m)?;
    let train_z = standardize(&standardizer, &train_m)?;
    let test_z = standardize(&standardizer, &test_m)?;

    let knn = knn_fit(train_z.clone(), knn_k)?;
    let cart = cart_fit(&train_z, cart_params)?;

    let truth = test_z.labels().unwrap();
    let knn_pred = knn.predict_matrix(&test_z)?;
    let cart_pred = cart.predict_matrix(&test_z)?;
    let knn_metrics = metrics(&confusion(&knn_pred, truth)?)?;
    let cart_metrics = metrics(&confusion(&cart_pred, truth)?)?;

    let report = ExperimentReport {
        features: features.to_vec(),
        knn_k,
        cart_params,
        knn: knn_metrics,
        cart: cart_metrics,
        provenance,
    };
    let models = ExperimentModels {
        standardizer,
        knn,
        cart,
    };
    Ok((report, models))
}

/// Renders the report as an aligned text table: one row per classifier,
/// macro-averaged percentage columns with two decimals.
pub fn format_table(report: &ExperimentReport) -> String {
    let mut out = String::new();
    let pct = |v: f64| format!("{:6.2}", v * 100.0);
    out.push_str("ML Algorithms | Accuracy | Precision | Recall | F1-Score\n");
    out.push_str("--------------+----------+-----------+--------+---------\n");
    for (name, m) in [("kNN", &report.knn), ("CART", &report.cart)] {
        out.push_str(&format!(
            "{:<13} |   {} |    {} | {} |   {}\n",
            name,
            pct(m.accuracy),
            pct(m.macro_precision),
            pct(m.macro_recall),
            pct(m.macro_f1),
        ));
    }
    out
}
