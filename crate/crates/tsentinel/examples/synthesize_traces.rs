//! Synthesizes the three canned scenarios and writes their trace CSVs.
//!
//! Run with: `cargo run --example synthesize_traces -- [out_dir]`

use tsentinel::prelude::*;

fn main() -> Result<()> {
    let out_dir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "traces".to_string());
    std::fs::create_dir_all(&out_dir)?;

    let model = LoadModel::default();
    let runs = [
        ("baseline", baseline_scenario(), 0u64),
        ("attack", attack_scenario(), 0),
        ("mixed", mixed_scenario(100), 100),
    ];

    for (name, spec, seed) in runs {
        let trace = synthesize(&spec, &model, seed)?;
        let path = format!("{out_dir}/{name}.csv");
        std::fs::write(&path, write_trace_csv(&trace))?;

        let attack_samples = trace
            .samples()
            .iter()
            .filter(|s| s.label == Some(Label::Attack))
            .count();
        println!(
            "{name:<9} seed {seed:>3}: {:>4} samples over {:>5.0} s, {attack_samples:>4} attack / {:>4} no_attack -> {path}",
            trace.len(),
            spec.total_duration(),
            trace.len() - attack_samples,
        );
    }

    // The scenario description itself is a tiny text format.
    println!("\nattack scenario, declaratively:");
    print!("{}", attack_scenario().to_text());
    Ok(())
}
