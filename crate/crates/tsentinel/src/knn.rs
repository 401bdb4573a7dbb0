//! k-nearest-neighbors classifier over standardized feature rows.
//!
//! A lazy learner: fitting stores the training data verbatim. Prediction is
//! the majority label among the k nearest rows by Euclidean distance, with
//! distance ties at the cut resolved toward the lowest training-row index.
//! k is required odd, so two-class majority votes cannot tie.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::telemetry::{FeatureMatrix, Label};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    train: FeatureMatrix,
    k: usize,
}

/// Stores labeled training data. Errors: unlabeled matrix, even or zero k,
/// k larger than the row count.
pub fn knn_fit(train: FeatureMatrix, k: usize) -> Result<KnnModel> {
    train.require_labels("knn_fit")?;
    train.require_finite()?;
    if k == 0 || k.is_multiple_of(2) {
        return Err(Error::EvenK { k });
    }
    let n = train.n_rows();
    if k > n {
        return Err(Error::KTooLarge { k, n });
    }
    Ok(KnnModel { train, k })
}

impl KnnModel {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_features(&self) -> usize {
        self.train.n_cols()
    }

    pub fn train(&self) -> &FeatureMatrix {
        &self.train
    }

    /// Majority label among the k nearest training rows to `x`.
    pub fn predict(&self, x: &[f64]) -> Result<Label> {
        let d = self.train.n_cols();
        if x.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: x.len(),
            });
        }
        // Squared distances order identically to Euclidean distances; the
        // (distance, index) sort realizes the lowest-index tie rule.
        let mut dists: Vec<(f64, usize)> = self
            .train
            .rows()
            .enumerate()
            .map(|(i, row)| {
                let d2: f64 = row.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
                (d2, i)
            })
            .collect();
        dists.sort_unstable_by(|(da, ia), (db, ib)| da.partial_cmp(db).unwrap().then(ia.cmp(ib)));

        let labels = self.train.labels().unwrap();
        let attack_votes = dists[..self.k]
            .iter()
            .filter(|(_, i)| labels[*i] == Label::Attack)
            .count();
        Ok(if attack_votes * 2 > self.k {
            Label::Attack
        } else {
            Label::Benign
        })
    }

    /// Predicts every row of `m`.
    pub fn predict_matrix(&self, m: &FeatureMatrix) -> Result<Vec<Label>> {
        m.rows().map(|row| self.predict(row)).collect()
    }
}
