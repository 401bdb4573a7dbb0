//! The full experiment: train kNN and CART on the two 30-minute traces,
//! evaluate on the 120-minute mixed trace, print the result table.
//!
//! Run with: `cargo run --release --example train_and_evaluate -- [seed]`

use tsentinel::prelude::*;

fn main() -> Result<()> {
    let seed: u64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("seed must be a u64"))
        .unwrap_or(0);

    let model = LoadModel::default();
    let train = TelemetryTrace::concat(&[
        synthesize(&baseline_scenario(), &model, seed)?,
        synthesize(&attack_scenario(), &model, seed)?,
    ])?;
    let test = synthesize(&mixed_scenario(seed + 100), &model, seed + 100)?;

    let features: Vec<String> = SELECTED_METRIC_NAMES
        .iter()
        .map(|s| s.to_string())
        .collect();
    let (report, _models) = run_experiment(
        &train,
        &test,
        &features,
        5,
        CartParams::default(),
        Provenance {
            train: format!("baseline({seed}) + attack({seed})"),
            test: format!("mixed({})", seed + 100),
        },
    )?;

    println!(
        "train: {} ({} samples)   test: {} ({} samples)",
        report.provenance.train,
        train.len(),
        report.provenance.test,
        test.len()
    );
    println!("features: {}\n", report.features.join(", "));
    print!("{}", format_table(&report));
    println!(
        "\nper-class attack recall: kNN {:.4}, CART {:.4}",
        report.knn.attack.recall, report.cart.attack.recall
    );
    Ok(())
}
