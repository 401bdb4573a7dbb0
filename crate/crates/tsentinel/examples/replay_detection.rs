//! Online detection: stream the 120-minute mixed trace through a trained
//! model with a 5-sample majority window, then report attack events and
//! per-onset detection latency.
//!
//! Run with: `cargo run --release --example replay_detection`

use tsentinel::prelude::*;

fn main() -> Result<()> {
    let model = LoadModel::default();
    let train = TelemetryTrace::concat(&[
        synthesize(&baseline_scenario(), &model, 0)?,
        synthesize(&attack_scenario(), &model, 0)?,
    ])?;
    let mixed = synthesize(&mixed_scenario(100), &model, 100)?;

    let features: Vec<String> = SELECTED_METRIC_NAMES
        .iter()
        .map(|s| s.to_string())
        .collect();
    let (_, models) = run_experiment(
        &train,
        &mixed,
        &features,
        5,
        CartParams::default(),
        Provenance::default(),
    )?;
    let bundle = ModelBundle::new(features, models.standardizer, TrainedModel::Knn(models.knn));
    let cfg = DetectorConfig::new(bundle, 5)?;

    // Batch replay over the whole trace...
    let report = detect_events(&mixed, &cfg)?;
    println!("{} attack event(s) detected:", report.events.len());
    for event in &report.events {
        println!(
            "  [{:>6.0} s, {:>6.0} s)  ({:.0} samples)",
            event.start_t,
            event.end_t,
            (event.end_t - event.start_t) / mixed.interval()
        );
    }
    println!("\nground-truth onsets:");
    for latency in &report.latencies {
        match latency.latency_samples {
            Some(n) => println!(
                "  onset {:>6.0} s: detected after {n} sample(s)",
                latency.onset_t
            ),
            None => println!("  onset {:>6.0} s: missed", latency.onset_t),
        }
    }
    if let Some(mean) = report.mean_latency() {
        println!(
            "mean latency {mean:.2} samples ({:.0} s), {} missed",
            mean * mixed.interval(),
            report.missed()
        );
    }
    if let Some(m) = &report.metrics {
        println!(
            "sample-level accuracy {:.4}, macro F1 {:.4}",
            m.accuracy, m.macro_f1
        );
    }

    // ...and the same thing sample-by-sample, as a live consumer would.
    let mut detector = Detector::new(cfg);
    let mut streamed = Vec::with_capacity(mixed.len());
    for sample in mixed.samples() {
        let (_raw, smoothed) = detector.step(sample)?;
        streamed.push(smoothed);
    }
    assert_eq!(streamed, report.smoothed_decisions);
    println!("streaming replay matches the batch decisions exactly");
    Ok(())
}
