//! Standardization, PCA, and PCA-based feature relevance ranking.
//!
//! The covariance convention is population (1/n) throughout, so results are
//! bit-comparable across implementations. The eigen solver is cyclic Jacobi
//! on the symmetric covariance matrix — ample for d <= 8 — with a fixed sweep
//! cap and a deterministic sign convention, so two runs on identical input
//! produce bit-identical models.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::telemetry::{metric_index, FeatureMatrix};

/// Per-feature z-score transform fitted on training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub feature_names: Vec<String>,
    pub mean: Vec<f64>,
    /// Population standard deviation; entries of exactly 0 mark constant
    /// features, which standardize to all-zero columns.
    pub stddev: Vec<f64>,
}

/// Principal component decomposition of standardized training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub feature_names: Vec<String>,
    /// Column means of the fitted data.
    pub mean: Vec<f64>,
    /// Rows are components, sorted by eigenvalue descending. In each row the
    /// loading of largest magnitude is positive (ties: lowest feature index).
    pub components: Vec<Vec<f64>>,
    /// Non-negative, non-increasing. Values within 1e-12 of zero are clamped.
    pub eigenvalues: Vec<f64>,
}

/// Features ordered by relevance score, descending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRanking {
    /// `(feature_name, score)` pairs; ties follow canonical metric order.
    pub ranked: Vec<(String, f64)>,
}

/// Fits per-column mean and population standard deviation. Needs >= 2 rows.
pub fn fit_standardizer(m: &FeatureMatrix) -> Result<Standardizer> {
    let n = m.n_rows();
    if n < 2 {
        return Err(Error::TooFewRows { needed: 2, got: n });
    }
    let d = m.n_cols();
    let mut mean = vec![0.0; d];
    for row in m.rows() {
        for (acc, v) in mean.iter_mut().zip(row) {
            *acc += v;
        }
    }
    for acc in mean.iter_mut() {
        *acc /= n as f64;
    }
    let mut var = vec![0.0; d];
    for row in m.rows() {
        for ((acc, v), mu) in var.iter_mut().zip(row).zip(&mean) {
            let c = v - mu;
            *acc += c * c;
        }
    }
    let stddev = var.iter().map(|v| (v / n as f64).sqrt()).collect();
    Ok(Standardizer {
        feature_names: m.feature_names().to_vec(),
        mean,
        stddev,
    })
}

impl Standardizer {
    /// z-scores one row (in the standardizer's feature order). Constant
    /// features map to 0.
    pub fn transform_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.mean.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mean.len(),
                got: row.len(),
            });
        }
        Ok(row
            .iter()
            .zip(&self.mean)
            .zip(&self.stddev)
            .map(|((v, mu), sd)| if *sd == 0.0 { 0.0 } else { (v - mu) / sd })
            .collect())
    }
}

/// Applies a fitted standardizer to a whole matrix; feature names must match.
pub fn standardize(s: &Standardizer, m: &FeatureMatrix) -> Result<FeatureMatrix> {
    if s.feature_names != m.feature_names() {
        return Err(Error::FeatureNameMismatch {
            expected: s.feature_names.clone(),
            got: m.feature_names().to_vec(),
        });
    }
    let mut data = Vec::with_capacity(m.n_rows() * m.n_cols());
    for row in m.rows() {
        data.extend(s.transform_row(row)?);
    }
    FeatureMatrix::new(
        m.feature_names().to_vec(),
        data,
        m.labels().map(|l| l.to_vec()),
    )
}

/// Column projection preserving row order and labels. `names` must be a
/// subset of the matrix's features.
pub fn select_features(m: &FeatureMatrix, names: &[String]) -> Result<FeatureMatrix> {
    if names.is_empty() {
        return Err(Error::EmptyFeatureList);
    }
    let indices: Vec<usize> = names
        .iter()
        .map(|n| {
            m.feature_names()
                .iter()
                .position(|f| f == n)
                .ok_or_else(|| Error::UnknownFeature { name: n.clone() })
        })
        .collect::<Result<_>>()?;
    let mut data = Vec::with_capacity(m.n_rows() * names.len());
    for row in m.rows() {
        data.extend(indices.iter().map(|&i| row[i]));
    }
    FeatureMatrix::new(names.to_vec(), data, m.labels().map(|l| l.to_vec()))
}

/// Sweep cap for the Jacobi solver; non-convergence past this is an error.
const JACOBI_MAX_SWEEPS: usize = 64;

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
/// (eigenvalues, eigenvectors as columns of `v`), unsorted.
#[allow(clippy::needless_range_loop)] // index loops mirror the rotation math
fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let d = a.len();
    let mut v = vec![vec![0.0; d]; d];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    if d <= 1 {
        return Ok((a.iter().enumerate().map(|(i, r)| r[i]).collect(), v));
    }
    let off_diag_sq = |a: &Vec<Vec<f64>>| -> f64 {
        let mut sum = 0.0;
        for p in 0..d {
            for q in (p + 1)..d {
                sum += a[p][q] * a[p][q];
            }
        }
        sum
    };
    let frob = {
        let mut sum = 0.0;
        for row in &a {
            for x in row {
                sum += x * x;
            }
        }
        sum
    };
    let tol = 1e-30 * frob.max(f64::MIN_POSITIVE);

    let mut sweeps = 0;
    while off_diag_sq(&a) > tol {
        if sweeps >= JACOBI_MAX_SWEEPS {
            return Err(Error::EigenNonConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..d {
            for q in (p + 1)..d {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Rotate rows/columns p and q of A.
                for k in 0..d {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                // Accumulate the rotation into V.
                for k in 0..d {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let eigenvalues = (0..d).map(|i| a[i][i]).collect();
    Ok((eigenvalues, v))
}

/// Fits PCA via eigendecomposition of the population covariance. The input is
/// expected standardized but this is not enforced.
#[allow(clippy::needless_range_loop)]
pub fn fit_pca(m: &FeatureMatrix) -> Result<PcaModel> {
    let n = m.n_rows();
    if n < 2 {
        return Err(Error::TooFewRows { needed: 2, got: n });
    }
    let d = m.n_cols();
    let mut mean = vec![0.0; d];
    for row in m.rows() {
        for (acc, v) in mean.iter_mut().zip(row) {
            *acc += v;
        }
    }
    for acc in mean.iter_mut() {
        *acc /= n as f64;
    }
    let mut cov = vec![vec![0.0; d]; d];
    for row in m.rows() {
        let centered: Vec<f64> = row.iter().zip(&mean).map(|(v, mu)| v - mu).collect();
        for i in 0..d {
            for j in i..d {
                cov[i][j] += centered[i] * centered[j];
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            cov[i][j] /= n as f64;
            cov[j][i] = cov[i][j];
        }
    }

    let (raw_values, v) = jacobi_eigen(cov)?;

    // Sort by eigenvalue descending; equal eigenvalues keep original
    // column order so the output is deterministic.
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| {
        raw_values[j]
            .partial_cmp(&raw_values[i])
            .unwrap()
            .then(i.cmp(&j))
    });

    let mut eigenvalues = Vec::with_capacity(d);
    let mut components = Vec::with_capacity(d);
    for &col in &order {
        let lambda = raw_values[col];
        eigenvalues.push(if lambda.abs() <= 1e-12 { 0.0 } else { lambda });
        let mut component: Vec<f64> = (0..d).map(|row| v[row][col]).collect();
        // Sign convention: the loading of largest magnitude is positive;
        // magnitude ties resolve to the lowest feature index.
        let mut pivot = 0;
        for (i, x) in component.iter().enumerate() {
            if x.abs() > component[pivot].abs() {
                pivot = i;
            }
        }
        if component[pivot] < 0.0 {
            for x in component.iter_mut() {
                *x = -*x;
            }
        }
        components.push(component);
    }

    Ok(PcaModel {
        feature_names: m.feature_names().to_vec(),
        mean,
        components,
        eigenvalues,
    })
}

impl PcaModel {
    /// Projects a centered view of `row` onto all components.
    pub fn project(&self, row: &[f64]) -> Vec<f64> {
        let centered: Vec<f64> = row.iter().zip(&self.mean).map(|(v, mu)| v - mu).collect();
        self.components
            .iter()
            .map(|c| c.iter().zip(&centered).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Reconstructs a row from its full projection (inverse of [`project`]
    /// up to rounding when all components are kept).
    ///
    /// [`project`]: PcaModel::project
    pub fn reconstruct(&self, projected: &[f64]) -> Vec<f64> {
        let d = self.mean.len();
        let mut row = self.mean.clone();
        for (weight, component) in projected.iter().zip(&self.components) {
            for i in 0..d {
                row[i] += weight * component[i];
            }
        }
        row
    }
}

/// Eigenvalues normalized to fractions of total variance. Errors when the
/// data was entirely constant.
pub fn explained_variance_ratio(p: &PcaModel) -> Result<Vec<f64>> {
    let total: f64 = p.eigenvalues.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok(p.eigenvalues.iter().map(|l| l / total).collect())
}

/// Scores features by variance-weighted absolute loadings over the smallest
/// component prefix explaining at least `variance_threshold` of the variance:
/// `score(j) = sum over the first K components of ratio_k * |loading_kj|`.
pub fn rank_features(p: &PcaModel, variance_threshold: f64) -> Result<FeatureRanking> {
    let ratios = explained_variance_ratio(p)?;
    let d = p.feature_names.len();
    let mut k = d;
    let mut cumulative = 0.0;
    for (i, r) in ratios.iter().enumerate() {
        cumulative += r;
        if cumulative >= variance_threshold {
            k = i + 1;
            break;
        }
    }
    let mut scores = vec![0.0; d];
    for (component, ratio) in p.components.iter().zip(&ratios).take(k) {
        for (score, loading) in scores.iter_mut().zip(component) {
            *score += ratio * loading.abs();
        }
    }
    let mut ranked: Vec<(String, f64)> = p.feature_names.iter().cloned().zip(scores).collect();
    ranked.sort_by(|(name_a, score_a), (name_b, score_b)| {
        score_b
            .partial_cmp(score_a)
            .unwrap()
            .then_with(|| metric_index(name_a).cmp(&metric_index(name_b)))
    });
    Ok(FeatureRanking { ranked })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(names: &[&str], rows: &[&[f64]]) -> FeatureMatrix {
        let d = names.len();
        let mut data = Vec::with_capacity(rows.len() * d);
        for row in rows {
            assert_eq!(row.len(), d);
            data.extend_from_slice(row);
        }
        FeatureMatrix::new(names.iter().map(|s| s.to_string()).collect(), data, None).unwrap()
    }

    #[test]
    fn standardizer_two_point_column() {
        let m = matrix(&["cpu_util"], &[&[0.0], &[10.0]]);
        let s = fit_standardizer(&m).unwrap();
        assert_eq!(s.mean, vec![5.0]);
        assert_eq!(s.stddev, vec![5.0]);
    }

    #[test]
    fn standardizer_records_constant_column() {
        let m = matrix(&["cpu_util"], &[&[3.0], &[3.0], &[3.0]]);
        let s = fit_standardizer(&m).unwrap();
        assert_eq!(s.mean, vec![3.0]);
        assert_eq!(s.stddev, vec![0.0]);
        let z = standardize(&s, &m).unwrap();
        assert!(z.rows().all(|r| r == [0.0]));
    }

    #[test]
    fn standardizer_rejects_single_row() {
        let m = matrix(&["cpu_util"], &[&[1.0]]);
        assert!(matches!(
            fit_standardizer(&m),
            Err(Error::TooFewRows { .. })
        ));
    }

    #[test]
    fn standardized_columns_have_zero_mean_unit_sd() {
        let m = matrix(
            &["cpu_util", "net_pkts_in"],
            &[&[1.0, 100.0], &[2.0, 250.0], &[4.0, 175.0], &[9.0, 300.0]],
        );
        let s = fit_standardizer(&m).unwrap();
        let z = standardize(&s, &m).unwrap();
        for col in 0..2 {
            let n = z.n_rows() as f64;
            let mean: f64 = z.rows().map(|r| r[col]).sum::<f64>() / n;
            let var: f64 = z.rows().map(|r| (r[col] - mean).powi(2)).sum::<f64>() / n;
            assert!(mean.abs() < 1e-9);
            assert!((var.sqrt() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn standardize_row_at_training_mean_is_zero() {
        let m = matrix(&["cpu_util", "mem_used"], &[&[1.0, 0.2], &[3.0, 0.6]]);
        let s = fit_standardizer(&m).unwrap();
        assert_eq!(s.transform_row(&[2.0, 0.4]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn standardize_rejects_name_mismatch() {
        let m = matrix(&["cpu_util"], &[&[1.0], &[2.0]]);
        let s = fit_standardizer(&m).unwrap();
        let other = matrix(&["mem_used"], &[&[1.0], &[2.0]]);
        assert!(matches!(
            standardize(&s, &other),
            Err(Error::FeatureNameMismatch { .. })
        ));
    }

    #[test]
    fn pca_axis_aligned_case() {
        // Eight points whose population covariance is exactly [[2,0],[0,1]].
        let m = matrix(
            &["cpu_util", "mem_used"],
            &[
                &[2.0, 1.0],
                &[-2.0, -1.0],
                &[2.0, -1.0],
                &[-2.0, 1.0],
                &[0.0, 1.0],
                &[0.0, -1.0],
                &[0.0, 1.0],
                &[0.0, -1.0],
            ],
        );
        let p = fit_pca(&m).unwrap();
        assert!((p.eigenvalues[0] - 2.0).abs() < 1e-9);
        assert!((p.eigenvalues[1] - 1.0).abs() < 1e-9);
        assert!((p.components[0][0] - 1.0).abs() < 1e-9);
        assert!(p.components[0][1].abs() < 1e-9);
        assert!((p.components[1][1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn pca_perfectly_correlated_pair() {
        let m = matrix(
            &["cpu_util", "mem_used"],
            &[&[1.0, 1.0], &[2.0, 2.0], &[3.0, 3.0], &[-1.0, -1.0]],
        );
        let p = fit_pca(&m).unwrap();
        let total: f64 = p.eigenvalues.iter().sum();
        assert!((p.eigenvalues[0] - total).abs() < 1e-9);
        assert!(p.eigenvalues[1].abs() < 1e-9);
        let inv_sqrt2 = 1.0 / 2.0f64.sqrt();
        assert!((p.components[0][0] - inv_sqrt2).abs() < 1e-9);
        assert!((p.components[0][1] - inv_sqrt2).abs() < 1e-9);
    }

    #[test]
    fn explained_variance_ratio_examples() {
        let mut p = PcaModel {
            feature_names: vec!["cpu_util".into(), "mem_used".into()],
            mean: vec![0.0, 0.0],
            components: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            eigenvalues: vec![3.0, 1.0],
        };
        assert_eq!(explained_variance_ratio(&p).unwrap(), vec![0.75, 0.25]);

        p.eigenvalues = vec![5.0, 0.0];
        assert_eq!(explained_variance_ratio(&p).unwrap(), vec![1.0, 0.0]);

        p.eigenvalues = vec![0.0, 0.0];
        assert!(matches!(
            explained_variance_ratio(&p),
            Err(Error::ZeroVariance)
        ));
    }

    #[test]
    fn pca_is_deterministic_and_ratios_non_increasing() {
        let mut rng = crate::rng::Lcg64::new(404);
        let names = ["cpu_util", "mem_used", "net_pkts_in", "net_pkts_out"];
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|_| (0..4).map(|_| rng.next_gaussian()).collect())
            .collect();
        let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
        let m = matrix(&names, &refs);
        let a = fit_pca(&m).unwrap();
        let b = fit_pca(&m).unwrap();
        assert_eq!(a, b);
        let ratios = explained_variance_ratio(&a).unwrap();
        assert!(ratios.windows(2).all(|w| w[0] >= w[1]));
        assert!((ratios.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_features_invariant_under_row_permutation() {
        let mut rng = crate::rng::Lcg64::new(909);
        let names = ["cpu_util", "mem_used", "net_bytes_in"];
        let mut rows: Vec<Vec<f64>> = (0..40)
            .map(|_| {
                (0..3)
                    .map(|_| rng.next_f64() * (1.0 + rng.next_f64() * 9.0))
                    .collect()
            })
            .collect();
        let ranking_of = |rows: &[Vec<f64>]| {
            let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
            let m = matrix(&names, &refs);
            let order: Vec<String> = rank_features(&fit_pca(&m).unwrap(), 0.95)
                .unwrap()
                .ranked
                .into_iter()
                .map(|(n, _)| n)
                .collect();
            order
        };
        let original = ranking_of(&rows);
        rows.reverse();
        assert_eq!(ranking_of(&rows), original);
        // An interleaved shuffle, deterministic and distinct from reversal.
        let shuffled: Vec<Vec<f64>> = (0..rows.len())
            .map(|i| rows[(i * 17) % rows.len()].clone())
            .collect();
        assert_eq!(ranking_of(&shuffled), original);
    }

    #[test]
    fn rank_features_on_analytic_model() {
        // Eigenvalues 2 and 1, axis-aligned components: ratios [2/3, 1/3].
        let p = PcaModel {
            feature_names: vec!["cpu_util".into(), "mem_used".into()],
            mean: vec![0.0, 0.0],
            components: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            eigenvalues: vec![2.0, 1.0],
        };
        // threshold 0.6: the first ratio (2/3) already covers it, K = 1.
        let r = rank_features(&p, 0.6).unwrap();
        assert_eq!(r.ranked[0].0, "cpu_util");
        assert!((r.ranked[0].1 - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.ranked[1].1, 0.0);

        // threshold 0.7: 2/3 < 0.7, so K = 2 and both components score.
        let r = rank_features(&p, 0.7).unwrap();
        assert_eq!(r.ranked[0].0, "cpu_util");
        assert!((r.ranked[0].1 - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.ranked[1].1 - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn rank_features_threshold_one_uses_all_components() {
        let p = PcaModel {
            feature_names: vec!["cpu_util".into(), "mem_used".into()],
            mean: vec![0.0, 0.0],
            components: vec![vec![0.8, 0.6], vec![0.6, -0.8]],
            eigenvalues: vec![3.0, 1.0],
        };
        let r = rank_features(&p, 1.0).unwrap();
        let score: std::collections::HashMap<_, _> = r.ranked.iter().cloned().collect();
        assert!((score["cpu_util"] - (0.75 * 0.8 + 0.25 * 0.6)).abs() < 1e-12);
        assert!((score["mem_used"] - (0.75 * 0.6 + 0.25 * 0.8)).abs() < 1e-12);
    }

    #[test]
    fn rank_features_ties_follow_canonical_order() {
        // Symmetric loadings make both scores equal; canonical order puts
        // cpu_util before mem_used regardless of insertion order.
        let p = PcaModel {
            feature_names: vec!["mem_used".into(), "cpu_util".into()],
            mean: vec![0.0, 0.0],
            components: vec![
                vec![
                    std::f64::consts::FRAC_1_SQRT_2,
                    std::f64::consts::FRAC_1_SQRT_2,
                ],
                vec![
                    std::f64::consts::FRAC_1_SQRT_2,
                    -std::f64::consts::FRAC_1_SQRT_2,
                ],
            ],
            eigenvalues: vec![1.0, 1.0],
        };
        let r = rank_features(&p, 1.0).unwrap();
        assert_eq!(r.ranked[0].0, "cpu_util");
        assert_eq!(r.ranked[1].0, "mem_used");
        assert_eq!(r.ranked[0].1, r.ranked[1].1);
    }

    #[test]
    fn select_features_projects_and_preserves() {
        let m = FeatureMatrix::new(
            vec!["cpu_util".into(), "mem_used".into(), "net_pkts_in".into()],
            vec![1.0, 0.1, 100.0, 2.0, 0.2, 200.0],
            Some(vec![
                crate::telemetry::Label::Benign,
                crate::telemetry::Label::Attack,
            ]),
        )
        .unwrap();
        let picked = select_features(&m, &["net_pkts_in".into(), "cpu_util".into()]).unwrap();
        assert_eq!(picked.row(0), &[100.0, 1.0]);
        assert_eq!(picked.row(1), &[200.0, 2.0]);
        assert_eq!(picked.labels().unwrap().len(), 2);

        let identity = select_features(&m, m.feature_names()).unwrap();
        assert_eq!(identity, m);

        assert!(matches!(
            select_features(&m, &[]),
            Err(Error::EmptyFeatureList)
        ));
        assert!(matches!(
            select_features(&m, &["disk_read_reqs".into()]),
            Err(Error::UnknownFeature { .. })
        ));
    }
}
