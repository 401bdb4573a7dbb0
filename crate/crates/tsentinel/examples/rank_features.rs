//! PCA screening: which metrics actually react to a SYN flood?
//!
//! Fits a standardizer and PCA on the pooled baseline + attack traces, then
//! prints the explained-variance spectrum and the relevance ranking. The six
//! metrics the toolkit selects by default come out on top; disk reads, which
//! the attack never touches, land at the bottom.
//!
//! Run with: `cargo run --example rank_features`

use tsentinel::prelude::*;

fn main() -> Result<()> {
    let model = LoadModel::default();
    let train = TelemetryTrace::concat(&[
        synthesize(&baseline_scenario(), &model, 0)?,
        synthesize(&attack_scenario(), &model, 0)?,
    ])?;

    let names: Vec<String> = METRIC_NAMES.iter().map(|s| s.to_string()).collect();
    let matrix = to_feature_matrix(&train, &names)?;
    let standardizer = fit_standardizer(&matrix)?;
    let z = standardize(&standardizer, &matrix)?;
    let pca = fit_pca(&z)?;

    println!("explained variance by component:");
    let ratios = explained_variance_ratio(&pca)?;
    let mut cumulative = 0.0;
    for (i, ratio) in ratios.iter().enumerate() {
        cumulative += ratio;
        println!("  PC{}: {ratio:>7.4}  (cumulative {cumulative:.4})", i + 1);
    }

    let threshold = 0.95;
    let ranking = rank_features(&pca, threshold)?;
    println!("\nfeature relevance at variance threshold {threshold}:");
    for (name, score) in &ranking.ranked {
        println!("  {name:<16} {score:.5}");
    }

    let top6: Vec<&str> = ranking.ranked[..6]
        .iter()
        .map(|(n, _)| n.as_str())
        .collect();
    println!("\ntop six: {}", top6.join(", "));
    Ok(())
}
