//! CART binary decision tree with Gini impurity splits.
//!
//! Growth is greedy: at each node every feature and every midpoint between
//! consecutive distinct sorted values is a candidate, the split with the
//! largest impurity decrease wins, and ties resolve to the lower feature
//! index, then the lower threshold. A node stops splitting when it is pure,
//! at `max_depth`, smaller than `min_samples_split`, or when the best gain
//! does not exceed `min_gain`. Rows route left when `x[feature] <= threshold`.
//! Leaves predict their majority class; exact ties predict `Benign`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::telemetry::{FeatureMatrix, Label};

/// Growth limits. Defaults: depth 12, split nodes of 2+ rows, any positive
/// gain accepted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartParams {
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub min_gain: f64,
}

impl Default for CartParams {
    fn default() -> CartParams {
        CartParams {
            max_depth: 12,
            min_samples_split: 2,
            min_gain: 0.0,
        }
    }
}

/// Tree node: an internal threshold test or a class leaf.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CartNode {
    Internal {
        feature_index: usize,
        threshold: f64,
        left: Box<CartNode>,
        right: Box<CartNode>,
    },
    Leaf {
        label: Label,
        /// `(n_benign, n_attack)` training rows that reached this leaf.
        counts: (usize, usize),
    },
}

impl CartNode {
    fn depth(&self) -> usize {
        match self {
            CartNode::Leaf { .. } => 0,
            CartNode::Internal { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    fn leaf(n_benign: usize, n_attack: usize) -> CartNode {
        CartNode::Leaf {
            // Majority label; ties go to Benign.
            label: if n_attack > n_benign {
                Label::Attack
            } else {
                Label::Benign
            },
            counts: (n_benign, n_attack),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CartModel {
    pub root: CartNode,
    pub params: CartParams,
    n_features: usize,
}

/// Gini impurity of a node with the given class counts.
fn gini(n_benign: usize, n_attack: usize) -> f64 {
    let n = (n_benign + n_attack) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let pb = n_benign as f64 / n;
    let pa = n_attack as f64 / n;
    1.0 - pb * pb - pa * pa
}

/// Best split of `rows` (indices into `m`), if any has gain above zero:
/// `(feature, threshold, gain)`. Iterating features and thresholds in
/// ascending order with a strict improvement test realizes the tie-break.
fn best_split(m: &FeatureMatrix, labels: &[Label], rows: &[usize]) -> Option<(usize, f64, f64)> {
    let n = rows.len();
    let total_attack = rows.iter().filter(|&&i| labels[i] == Label::Attack).count();
    let total_benign = n - total_attack;
    let parent_gini = gini(total_benign, total_attack);

    let mut best: Option<(usize, f64, f64)> = None;
    for feature in 0..m.n_cols() {
        // Sort this node's rows by the feature value; a single sweep then
        // evaluates every midpoint between consecutive distinct values.
        let mut order: Vec<usize> = rows.to_vec();
        order.sort_unstable_by(|&a, &b| m.row(a)[feature].partial_cmp(&m.row(b)[feature]).unwrap());

        let mut left_attack = 0usize;
        let mut left_n = 0usize;
        for w in 0..n - 1 {
            let i = order[w];
            left_n += 1;
            if labels[i] == Label::Attack {
                left_attack += 1;
            }
            let v = m.row(i)[feature];
            let v_next = m.row(order[w + 1])[feature];
            if v == v_next {
                continue;
            }
            let threshold = v + (v_next - v) / 2.0;
            let left_benign = left_n - left_attack;
            let right_attack = total_attack - left_attack;
            let right_benign = total_benign - left_benign;
            let right_n = n - left_n;
            let weighted = (left_n as f64 / n as f64) * gini(left_benign, left_attack)
                + (right_n as f64 / n as f64) * gini(right_benign, right_attack);
            let gain = parent_gini - weighted;
            let better = match best {
                None => true,
                Some((_, _, best_gain)) => gain > best_gain,
            };
            if better {
                best = Some((feature, threshold, gain));
            }
        }
    }
    best
}

fn grow(
    m: &FeatureMatrix,
    labels: &[Label],
    rows: Vec<usize>,
    depth: usize,
    params: &CartParams,
) -> CartNode {
    let n_attack = rows.iter().filter(|&&i| labels[i] == Label::Attack).count();
    let n_benign = rows.len() - n_attack;
    let pure = n_attack == 0 || n_benign == 0;
    if pure || depth >= params.max_depth || rows.len() < params.min_samples_split {
        return CartNode::leaf(n_benign, n_attack);
    }
    let Some((feature, threshold, gain)) = best_split(m, labels, &rows) else {
        return CartNode::leaf(n_benign, n_attack);
    };
    if gain <= params.min_gain {
        return CartNode::leaf(n_benign, n_attack);
    }
    let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
        .into_iter()
        .partition(|&i| m.row(i)[feature] <= threshold);
    CartNode::Internal {
        feature_index: feature,
        threshold,
        left: Box::new(grow(m, labels, left_rows, depth + 1, params)),
        right: Box::new(grow(m, labels, right_rows, depth + 1, params)),
    }
}

/// Grows a tree on a labeled matrix.
pub fn cart_fit(m: &FeatureMatrix, params: CartParams) -> Result<CartModel> {
    let labels = m.require_labels("cart_fit")?.to_vec();
    m.require_finite()?;
    if m.n_rows() == 0 {
        return Err(Error::EmptyInput {
            context: "cart_fit needs at least one row".to_string(),
        });
    }
    let root = grow(m, &labels, (0..m.n_rows()).collect(), 0, &params);
    debug_assert!(root.depth() <= params.max_depth);
    Ok(CartModel {
        root,
        params,
        n_features: m.n_cols(),
    })
}

impl CartModel {
    pub fn n_features(&self) -> usize {
        self.n_features
    }

    /// Depth of the grown tree (a lone leaf has depth 0).
    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    /// Routes `x` to a leaf and returns its label.
    pub fn predict(&self, x: &[f64]) -> Result<Label> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                got: x.len(),
            });
        }
        let mut node = &self.root;
        loop {
            match node {
                CartNode::Leaf { label, .. } => return Ok(*label),
                CartNode::Internal {
                    feature_index,
                    threshold,
                    left,
                    right,
                } => {
                    node = if x[*feature_index] <= *threshold {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }

    pub fn predict_matrix(&self, m: &FeatureMatrix) -> Result<Vec<Label>> {
        m.rows().map(|row| self.predict(row)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Lcg64;

    fn labeled_1d(values: &[(f64, Label)]) -> FeatureMatrix {
        let data: Vec<f64> = values.iter().map(|(v, _)| *v).collect();
        let labels: Vec<Label> = values.iter().map(|(_, l)| *l).collect();
        FeatureMatrix::new(vec!["cpu_util".into()], data, Some(labels)).unwrap()
    }

    #[test]
    fn separable_1d_splits_at_midpoint() {
        let m = labeled_1d(&[
            (1.0, Label::Benign),
            (2.0, Label::Benign),
            (8.0, Label::Attack),
            (9.0, Label::Attack),
        ]);
        let model = cart_fit(&m, CartParams::default()).unwrap();
        match &model.root {
            CartNode::Internal {
                feature_index,
                threshold,
                left,
                right,
            } => {
                assert_eq!(*feature_index, 0);
                assert_eq!(*threshold, 5.0);
                assert!(matches!(
                    **left,
                    CartNode::Leaf {
                        label: Label::Benign,
                        counts: (2, 0)
                    }
                ));
                assert!(matches!(
                    **right,
                    CartNode::Leaf {
                        label: Label::Attack,
                        counts: (0, 2)
                    }
                ));
            }
            other => panic!("expected one internal node, got {other:?}"),
        }
        assert_eq!(model.predict(&[3.0]).unwrap(), Label::Benign);
        assert_eq!(model.predict(&[7.0]).unwrap(), Label::Attack);
    }

    #[test]
    fn pure_root_is_single_leaf() {
        let m = labeled_1d(&[(1.0, Label::Attack), (2.0, Label::Attack)]);
        let model = cart_fit(&m, CartParams::default()).unwrap();
        assert!(matches!(
            model.root,
            CartNode::Leaf {
                label: Label::Attack,
                counts: (0, 2)
            }
        ));
        assert_eq!(model.predict(&[123.0]).unwrap(), Label::Attack);
    }

    #[test]
    fn leaf_tie_predicts_benign() {
        // Identical rows with conflicting labels cannot be split.
        let m = labeled_1d(&[(1.0, Label::Attack), (1.0, Label::Benign)]);
        let model = cart_fit(&m, CartParams::default()).unwrap();
        assert!(matches!(
            model.root,
            CartNode::Leaf {
                label: Label::Benign,
                counts: (1, 1)
            }
        ));
    }

    #[test]
    fn non_finite_training_data_rejected() {
        let m = FeatureMatrix::new(
            vec!["cpu_util".into()],
            vec![f64::INFINITY, 2.0],
            Some(vec![Label::Benign, Label::Attack]),
        )
        .unwrap();
        let err = cart_fit(&m, CartParams::default()).unwrap_err();
        assert!(matches!(err, Error::OutOfRange { row: 1, .. }));
    }

    #[test]
    fn unlabeled_matrix_rejected() {
        let m = FeatureMatrix::new(vec!["cpu_util".into()], vec![1.0], None).unwrap();
        assert!(matches!(
            cart_fit(&m, CartParams::default()),
            Err(Error::Unlabeled { .. })
        ));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let m = labeled_1d(&[(1.0, Label::Benign), (2.0, Label::Attack)]);
        let model = cart_fit(&m, CartParams::default()).unwrap();
        assert!(matches!(
            model.predict(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    fn random_consistent_dataset(seed: u64, n: usize, d: usize) -> FeatureMatrix {
        let mut rng = Lcg64::new(seed);
        let names: Vec<String> = crate::telemetry::METRIC_NAMES[..d]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let mut data = Vec::with_capacity(n * d);
        for _ in 0..n * d {
            data.push(rng.next_f64() * 10.0);
        }
        let labels: Vec<Label> = (0..n)
            .map(|_| {
                if rng.next_below(2) == 0 {
                    Label::Benign
                } else {
                    Label::Attack
                }
            })
            .collect();
        FeatureMatrix::new(names, data, Some(labels)).unwrap()
    }

    #[test]
    fn unbounded_depth_fits_consistent_data_perfectly() {
        for seed in 0..20 {
            let m = random_consistent_dataset(seed, 50, 6);
            let params = CartParams {
                max_depth: usize::MAX,
                ..CartParams::default()
            };
            let model = cart_fit(&m, params).unwrap();
            let predictions = model.predict_matrix(&m).unwrap();
            assert_eq!(predictions, m.labels().unwrap());
        }
    }

    /// Exhaustive single-split oracle using the same gain criterion and
    /// tie-breaks, recomputed from first principles.
    fn oracle_best_split(m: &FeatureMatrix) -> Option<(usize, f64)> {
        let labels = m.labels().unwrap();
        let n = m.n_rows();
        let count = |rows: &[usize]| {
            let attack = rows.iter().filter(|&&i| labels[i] == Label::Attack).count();
            (rows.len() - attack, attack)
        };
        let all: Vec<usize> = (0..n).collect();
        let (nb, na) = count(&all);
        let parent = gini(nb, na);
        let mut best: Option<(usize, f64, f64)> = None;
        for f in 0..m.n_cols() {
            let mut values: Vec<f64> = m.rows().map(|r| r[f]).collect();
            values.sort_by(|a, b| a.partial_cmp(b).unwrap());
            values.dedup();
            for pair in values.windows(2) {
                let threshold = pair[0] + (pair[1] - pair[0]) / 2.0;
                let left: Vec<usize> = (0..n).filter(|&i| m.row(i)[f] <= threshold).collect();
                let right: Vec<usize> = (0..n).filter(|&i| m.row(i)[f] > threshold).collect();
                let (lb, la) = count(&left);
                let (rb, ra) = count(&right);
                let weighted = left.len() as f64 / n as f64 * gini(lb, la)
                    + right.len() as f64 / n as f64 * gini(rb, ra);
                let gain = parent - weighted;
                if best.is_none_or(|(_, _, g)| gain > g) {
                    best = Some((f, threshold, gain));
                }
            }
        }
        best.map(|(f, t, _)| (f, t))
    }

    #[test]
    fn depth_one_tree_uses_the_exhaustive_best_split() {
        for seed in 100..120 {
            let m = random_consistent_dataset(seed, 40, 4);
            let params = CartParams {
                max_depth: 1,
                ..CartParams::default()
            };
            let model = cart_fit(&m, params).unwrap();
            let (want_f, want_t) = oracle_best_split(&m).unwrap();
            match model.root {
                CartNode::Internal {
                    feature_index,
                    threshold,
                    ..
                } => {
                    assert_eq!(feature_index, want_f, "seed {seed}");
                    assert_eq!(threshold, want_t, "seed {seed}");
                }
                ref other => panic!("expected a split, got {other:?}"),
            }
            assert!(model.depth() <= 1);
        }
    }

    #[test]
    fn every_split_strictly_decreases_weighted_gini() {
        fn check(node: &CartNode, m: &FeatureMatrix, labels: &[Label], rows: &[usize]) {
            if let CartNode::Internal {
                feature_index,
                threshold,
                left,
                right,
            } = node
            {
                let count = |rows: &[usize]| {
                    let a = rows.iter().filter(|&&i| labels[i] == Label::Attack).count();
                    (rows.len() - a, a)
                };
                let (nb, na) = count(rows);
                let parent = gini(nb, na);
                let (lrows, rrows): (Vec<usize>, Vec<usize>) = rows
                    .iter()
                    .partition(|&&i| m.row(i)[*feature_index] <= *threshold);
                let (lb, la) = count(&lrows);
                let (rb, ra) = count(&rrows);
                let weighted = lrows.len() as f64 / rows.len() as f64 * gini(lb, la)
                    + rrows.len() as f64 / rows.len() as f64 * gini(rb, ra);
                assert!(weighted < parent, "split must strictly decrease impurity");
                check(left, m, labels, &lrows);
                check(right, m, labels, &rrows);
            }
        }
        for seed in 40..50 {
            let m = random_consistent_dataset(seed, 60, 3);
            let model = cart_fit(&m, CartParams::default()).unwrap();
            let rows: Vec<usize> = (0..m.n_rows()).collect();
            check(&model.root, &m, m.labels().unwrap(), &rows);
        }
    }

    #[test]
    fn constant_feature_is_never_split() {
        // A zero column (a standardized constant feature) offers no candidate
        // thresholds, so an otherwise identical model results.
        let names: Vec<String> = vec!["cpu_util".into(), "mem_used".into()];
        let data = vec![1.0, 0.0, 2.0, 0.0, 8.0, 0.0, 9.0, 0.0];
        let labels = vec![Label::Benign, Label::Benign, Label::Attack, Label::Attack];
        let m = FeatureMatrix::new(names, data, Some(labels)).unwrap();
        let model = cart_fit(&m, CartParams::default()).unwrap();
        fn no_use_of(node: &CartNode, feature: usize) {
            if let CartNode::Internal {
                feature_index,
                left,
                right,
                ..
            } = node
            {
                assert_ne!(*feature_index, feature);
                no_use_of(left, feature);
                no_use_of(right, feature);
            }
        }
        no_use_of(&model.root, 1);
    }

    #[test]
    fn fitting_is_deterministic() {
        let m = random_consistent_dataset(7, 50, 5);
        let a = cart_fit(&m, CartParams::default()).unwrap();
        let b = cart_fit(&m, CartParams::default()).unwrap();
        assert_eq!(a, b);
    }
}
