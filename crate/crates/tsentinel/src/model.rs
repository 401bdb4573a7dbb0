//! Serialized model bundles: one JSON document carrying the feature list,
//! the fitted standardizer, and either classifier.
//!
//! A kNN model is stored as its standardized training data in CSV form
//! (columns = feature names plus `label`) together with k; a CART model is
//! stored as nested JSON nodes. Loading reverses both losslessly.

use serde::{Deserialize, Serialize};

use crate::cart::CartModel;
use crate::error::{Error, Result};
use crate::knn::{knn_fit, KnnModel};
use crate::pipeline::Standardizer;
use crate::telemetry::{FeatureMatrix, Label};

/// Either fitted classifier, behind one prediction interface.
#[derive(Debug, Clone, PartialEq)]
pub enum TrainedModel {
    Knn(KnnModel),
    Cart(CartModel),
}

impl TrainedModel {
    pub fn predict(&self, x: &[f64]) -> Result<Label> {
        match self {
            TrainedModel::Knn(m) => m.predict(x),
            TrainedModel::Cart(m) => m.predict(x),
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            TrainedModel::Knn(m) => m.n_features(),
            TrainedModel::Cart(m) => m.n_features(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            TrainedModel::Knn(_) => "knn",
            TrainedModel::Cart(_) => "cart",
        }
    }
}

/// A trained model plus everything needed to apply it to raw samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelBundle {
    pub feature_names: Vec<String>,
    pub standardizer: Standardizer,
    pub model: TrainedModel,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind")]
enum StoredModel {
    #[serde(rename = "knn")]
    Knn { k: usize, train_csv: String },
    #[serde(rename = "cart")]
    Cart(CartModel),
}

#[derive(Serialize, Deserialize)]
struct StoredBundle {
    feature_names: Vec<String>,
    standardizer: Standardizer,
    model: StoredModel,
}

/// Renders a standardized training matrix as CSV with a trailing label
/// column. Feature values here are z-scores, not raw metrics.
fn matrix_to_csv(m: &FeatureMatrix, labels: &[Label]) -> String {
    let mut out = m.feature_names().join(",");
    out.push_str(",label\n");
    for (row, label) in m.rows().zip(labels) {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!("{v}"));
        }
        out.push(',');
        out.push_str(label.token());
        out.push('\n');
    }
    out
}

fn matrix_from_csv(text: &str, expected_names: &[String]) -> Result<FeatureMatrix> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::EmptyInput {
        context: "kNN training CSV has no header".to_string(),
    })?;
    let columns: Vec<&str> = header.split(',').collect();
    let expected: Vec<&str> = expected_names
        .iter()
        .map(String::as_str)
        .chain(std::iter::once("label"))
        .collect();
    if columns != expected {
        return Err(Error::FeatureNameMismatch {
            expected: expected_names.to_vec(),
            got: columns.iter().map(|s| s.to_string()).collect(),
        });
    }
    let d = expected_names.len();
    let mut data = Vec::new();
    let mut labels = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let row = i + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != d + 1 {
            return Err(Error::WrongFieldCount {
                row,
                expected: d + 1,
                got: fields.len(),
            });
        }
        for (col, raw) in fields[..d].iter().enumerate() {
            data.push(raw.parse::<f64>().map_err(|_| Error::MalformedNumber {
                row,
                column: expected_names[col].clone(),
                value: raw.to_string(),
            })?);
        }
        labels.push(match fields[d] {
            "attack" => Label::Attack,
            "no_attack" => Label::Benign,
            other => {
                return Err(Error::UnknownLabel {
                    row,
                    token: other.to_string(),
                })
            }
        });
    }
    FeatureMatrix::new(expected_names.to_vec(), data, Some(labels))
}

impl ModelBundle {
    pub fn new(
        feature_names: Vec<String>,
        standardizer: Standardizer,
        model: TrainedModel,
    ) -> ModelBundle {
        ModelBundle {
            feature_names,
            standardizer,
            model,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let stored_model = match &self.model {
            TrainedModel::Knn(knn) => StoredModel::Knn {
                k: knn.k(),
                train_csv: matrix_to_csv(knn.train(), knn.train().labels().unwrap()),
            },
            TrainedModel::Cart(cart) => StoredModel::Cart(cart.clone()),
        };
        let stored = StoredBundle {
            feature_names: self.feature_names.clone(),
            standardizer: self.standardizer.clone(),
            model: stored_model,
        };
        Ok(serde_json::to_string_pretty(&stored)?)
    }

    pub fn from_json(text: &str) -> Result<ModelBundle> {
        let stored: StoredBundle = serde_json::from_str(text)?;
        let model = match stored.model {
            StoredModel::Knn { k, train_csv } => {
                let train = matrix_from_csv(&train_csv, &stored.feature_names)?;
                TrainedModel::Knn(knn_fit(train, k)?)
            }
            StoredModel::Cart(cart) => {
                if cart.n_features() != stored.feature_names.len() {
                    return Err(Error::DimensionMismatch {
                        expected: stored.feature_names.len(),
                        got: cart.n_features(),
                    });
                }
                TrainedModel::Cart(cart)
            }
        };
        Ok(ModelBundle {
            feature_names: stored.feature_names,
            standardizer: stored.standardizer,
            model,
        })
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<ModelBundle> {
        ModelBundle::from_json(&std::fs::read_to_string(path)?)
    }
}
