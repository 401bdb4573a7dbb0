//! Exports per-metric comparison CSVs for the baseline and attack scenarios,
//! the data behind a side-by-side metrics figure: one file per metric with
//! columns `t,scenario_a,scenario_b`.
//!
//! Run with: `cargo run --example export_plot_data -- [out_dir]`

use tsentinel::prelude::*;

fn main() -> Result<()> {
    let out_dir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "plot_data".to_string());
    std::fs::create_dir_all(&out_dir)?;

    let model = LoadModel::default();
    let baseline = synthesize(&baseline_scenario(), &model, 0)?;
    let attack = synthesize(&attack_scenario(), &model, 0)?;

    for name in METRIC_NAMES {
        let mut csv = String::from("t,scenario_a,scenario_b\n");
        for (a, b) in baseline.samples().iter().zip(attack.samples()) {
            csv.push_str(&format!(
                "{},{},{}\n",
                a.t,
                a.metric(name).unwrap(),
                b.metric(name).unwrap()
            ));
        }
        std::fs::write(format!("{out_dir}/{name}.csv"), csv)?;
    }
    println!("wrote {} files to {out_dir}/", METRIC_NAMES.len());

    // A quick textual contrast of the two scenarios per metric.
    println!("\nmean per metric (active window, 10 s..1790 s):");
    println!("{:<17} {:>14} {:>14}", "metric", "baseline", "attack");
    for name in METRIC_NAMES {
        let mean = |trace: &TelemetryTrace| {
            let values: Vec<f64> = trace
                .samples()
                .iter()
                .filter(|s| s.t >= 10.0 && s.t < 1790.0)
                .map(|s| s.metric(name).unwrap())
                .collect();
            values.iter().sum::<f64>() / values.len() as f64
        };
        println!(
            "{:<17} {:>14.2} {:>14.2}",
            name,
            mean(&baseline),
            mean(&attack)
        );
    }
    Ok(())
}
