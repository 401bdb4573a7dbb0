//! Command-line surface: `synth`, `features`, `eval`, `detect`, `plot-data`.
//!
//! Every subcommand is a thin wrapper over library calls, deterministic given
//! its flags; all randomness flows through explicit `--seed` values. Errors
//! go to stderr with a nonzero exit, data goes to files or stdout. Setting
//! `TSENTINEL_LOADMODEL=<path>` points synthesis at a serialized
//! [`LoadModel`] JSON document instead of the built-in default.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cart::CartParams;
use crate::detector::{detect_events, DetectorConfig};
use crate::error::{Error, Result};
use crate::eval::{format_table, run_experiment, Provenance};
use crate::model::{ModelBundle, TrainedModel};
use crate::pipeline::{
    explained_variance_ratio, fit_pca, fit_standardizer, rank_features, standardize,
};
use crate::synth::{
    attack_scenario, baseline_scenario, mixed_scenario, synthesize, LoadModel, ScenarioSpec,
};
use crate::telemetry::{
    parse_trace_csv, to_feature_matrix, write_trace_csv, Label, TelemetryTrace, METRIC_NAMES,
    SELECTED_METRIC_NAMES,
};

/// Environment variable naming a LoadModel JSON file to use for synthesis.
pub const LOADMODEL_ENV: &str = "TSENTINEL_LOADMODEL";

#[derive(Parser, Debug)]
#[command(
    name = "tsentinel",
    about = "Telemetry-driven DoS detection toolkit",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Synthesize a telemetry trace CSV for a canned scenario
    Synth(SynthArgs),
    /// PCA screening: explained variance and feature relevance ranking
    Features(FeaturesArgs),
    /// Train kNN and CART on labeled traces and evaluate on a test trace
    Eval(EvalArgs),
    /// Replay a trace through a saved model with windowed smoothing
    Detect(DetectArgs),
    /// Emit per-metric comparison CSVs for two traces
    PlotData(PlotDataArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum ScenarioName {
    /// 30 min, legitimate clients only (360 samples)
    Baseline,
    /// 30 min with three attack phases: 300 ms, 250 ms, max rate
    Attack,
    /// 120 min alternating legit-only / attack-only / combined segments
    Mixed,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[command(flatten)]
    pub source: ScenarioSource,
    /// Seed for noise and (for mixed) the segment draw
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output trace CSV path
    #[arg(short = 'o', long = "out")]
    pub out: PathBuf,
}

/// Exactly one of: a canned scenario name, or a scenario text file.
#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct ScenarioSource {
    /// Canned scenario to synthesize
    #[arg(value_enum)]
    pub scenario: Option<ScenarioName>,
    /// Synthesize from a scenario text file instead of a canned scenario
    #[arg(long)]
    pub from: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FeaturesArgs {
    /// Input trace CSV
    pub trace: PathBuf,
    /// Fraction of variance the component prefix must explain, in (0, 1]
    #[arg(long, default_value_t = 0.95)]
    pub variance_threshold: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum ModelKind {
    Knn,
    Cart,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Labeled training trace CSV; repeat to concatenate several
    #[arg(long = "train", required = true)]
    pub train: Vec<PathBuf>,
    /// Labeled test trace CSV
    #[arg(long = "test")]
    pub test: PathBuf,
    /// Comma-separated feature list; default: PCA ranking at --variance-threshold
    #[arg(long, value_delimiter = ',')]
    pub features: Vec<String>,
    /// Neighbors for kNN (odd)
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// CART depth limit
    #[arg(long, default_value_t = 12)]
    pub max_depth: usize,
    /// Minimum rows a node needs to be split
    #[arg(long, default_value_t = 2)]
    pub min_samples_split: usize,
    /// Minimum Gini gain a split must exceed
    #[arg(long, default_value_t = 0.0)]
    pub min_gain: f64,
    /// Variance threshold for the default PCA feature selection
    #[arg(long, default_value_t = 0.95)]
    pub variance_threshold: f64,
    /// Write the JSON experiment report here
    #[arg(short = 'o', long = "out")]
    pub out: Option<PathBuf>,
    /// Save the trained model bundle here
    #[arg(long)]
    pub save_model: Option<PathBuf>,
    /// Which classifier --save-model stores
    #[arg(long, value_enum, default_value_t = ModelKind::Knn)]
    pub save_kind: ModelKind,
}

#[derive(Args, Debug)]
pub struct DetectArgs {
    /// Saved model bundle (see eval --save-model)
    #[arg(long)]
    pub model: PathBuf,
    /// Trace CSV to replay (labels optional)
    pub trace: PathBuf,
    /// Smoothing window in samples (odd)
    #[arg(long, default_value_t = 5)]
    pub window: usize,
    /// Write the JSON detection report here
    #[arg(short = 'o', long = "out")]
    pub out: Option<PathBuf>,
    /// Write the `t,decision` CSV here
    #[arg(long)]
    pub decisions: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PlotDataArgs {
    /// First trace (column `scenario_a`)
    pub trace_a: PathBuf,
    /// Second trace (column `scenario_b`)
    pub trace_b: PathBuf,
    /// Output directory for the eight per-metric CSVs
    #[arg(short = 'o', long = "out")]
    pub out_dir: PathBuf,
}

/// The LoadModel used for synthesis: the default, unless the
/// `TSENTINEL_LOADMODEL` env var names a JSON file to load instead.
fn effective_load_model() -> Result<LoadModel> {
    match std::env::var_os(LOADMODEL_ENV) {
        Some(path) => {
            let text = std::fs::read_to_string(&path)?;
            let model: LoadModel = serde_json::from_str(&text)?;
            model.validate()?;
            Ok(model)
        }
        None => Ok(LoadModel::default()),
    }
}

fn read_trace(path: &PathBuf) -> Result<TelemetryTrace> {
    parse_trace_csv(&std::fs::read_to_string(path)?)
}

fn require_odd(value: usize, flag: &str) -> Result<()> {
    if value == 0 || value.is_multiple_of(2) {
        return Err(Error::InvalidFlag {
            reason: format!("--{flag} must be odd and positive, got {value}"),
        });
    }
    Ok(())
}

fn require_unit_fraction(value: f64, flag: &str) -> Result<()> {
    if !(value > 0.0 && value <= 1.0) {
        return Err(Error::InvalidFlag {
            reason: format!("--{flag} must lie in (0, 1], got {value}"),
        });
    }
    Ok(())
}

/// Dispatches a parsed command line. All side effects happen here.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth(args) => cmd_synth(args),
        Command::Features(args) => cmd_features(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Detect(args) => cmd_detect(args),
        Command::PlotData(args) => cmd_plotdata(args),
    }
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let model = effective_load_model()?;
    let spec = match (args.source.scenario, &args.source.from) {
        (Some(ScenarioName::Baseline), _) => baseline_scenario(),
        (Some(ScenarioName::Attack), _) => attack_scenario(),
        (Some(ScenarioName::Mixed), _) => mixed_scenario(args.seed),
        (None, Some(path)) => ScenarioSpec::from_text(&std::fs::read_to_string(path)?)?,
        (None, None) => unreachable!("clap enforces exactly one source"),
    };
    let trace = synthesize(&spec, &model, args.seed)?;
    std::fs::write(&args.out, write_trace_csv(&trace))?;
    let attack = trace
        .samples()
        .iter()
        .filter(|s| s.label == Some(Label::Attack))
        .count();
    println!(
        "wrote {} samples to {} ({} attack, {} no_attack)",
        trace.len(),
        args.out.display(),
        attack,
        trace.len() - attack
    );
    Ok(())
}

fn cmd_features(args: FeaturesArgs) -> Result<()> {
    require_unit_fraction(args.variance_threshold, "variance-threshold")?;
    let trace = read_trace(&args.trace)?;
    let names: Vec<String> = METRIC_NAMES.iter().map(|s| s.to_string()).collect();
    let matrix = to_feature_matrix(&trace, &names)?;
    let standardizer = fit_standardizer(&matrix)?;
    let z = standardize(&standardizer, &matrix)?;
    let pca = fit_pca(&z)?;
    let ratios = explained_variance_ratio(&pca)?;
    let ranking = rank_features(&pca, args.variance_threshold)?;

    println!("explained variance ratios:");
    for (i, r) in ratios.iter().enumerate() {
        println!("  PC{}: {:.6}", i + 1, r);
    }
    println!(
        "feature relevance (variance threshold {}):",
        args.variance_threshold
    );
    for (name, score) in &ranking.ranked {
        println!("  {name:<16} {score:.6}");
    }
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    require_odd(args.k, "k")?;
    require_unit_fraction(args.variance_threshold, "variance-threshold")?;
    let cart_params = CartParams {
        max_depth: args.max_depth,
        min_samples_split: args.min_samples_split,
        min_gain: args.min_gain,
    };

    let mut train_traces = Vec::new();
    for path in &args.train {
        train_traces.push(read_trace(path)?);
    }
    let train = TelemetryTrace::concat(&train_traces)?;
    let test = read_trace(&args.test)?;
    if !test.is_labeled() {
        return Err(Error::MissingLabels {
            context: "evaluation requires labels on the test trace".to_string(),
        });
    }

    // Feature choice: explicit list, or PCA ranking over the training data.
    let features: Vec<String> = if args.features.is_empty() {
        let names: Vec<String> = METRIC_NAMES.iter().map(|s| s.to_string()).collect();
        let matrix = to_feature_matrix(&train, &names)?;
        let standardizer = fit_standardizer(&matrix)?;
        let z = standardize(&standardizer, &matrix)?;
        let pca = fit_pca(&z)?;
        let ranking = rank_features(&pca, args.variance_threshold)?;
        let keep = SELECTED_METRIC_NAMES.len().min(ranking.ranked.len());
        let mut chosen: Vec<String> = ranking.ranked[..keep]
            .iter()
            .map(|(n, _)| n.clone())
            .collect();
        // Present the chosen subset in canonical metric order.
        chosen.sort_by_key(|n| crate::telemetry::metric_index(n));
        println!("selected features (PCA ranking): {}", chosen.join(","));
        chosen
    } else {
        args.features.clone()
    };

    let provenance = Provenance {
        train: args
            .train
            .iter()
            .map(|p| p.display().to_string())
            .collect::<Vec<_>>()
            .join("+"),
        test: args.test.display().to_string(),
    };
    let (report, models) =
        run_experiment(&train, &test, &features, args.k, cart_params, provenance)?;

    print!("{}", format_table(&report));
    if let Some(out) = &args.out {
        std::fs::write(out, serde_json::to_string_pretty(&report)?)?;
        println!("report written to {}", out.display());
    }
    if let Some(path) = &args.save_model {
        let trained = match args.save_kind {
            ModelKind::Knn => TrainedModel::Knn(models.knn),
            ModelKind::Cart => TrainedModel::Cart(models.cart),
        };
        let bundle = ModelBundle::new(features, models.standardizer, trained);
        bundle.save(path)?;
        println!(
            "{} model written to {}",
            bundle.model.kind(),
            path.display()
        );
    }
    Ok(())
}

fn cmd_detect(args: DetectArgs) -> Result<()> {
    require_odd(args.window, "window")?;
    let bundle = ModelBundle::load(&args.model)?;
    let trace = read_trace(&args.trace)?;
    let cfg = DetectorConfig::new(bundle, args.window)?;
    let report = detect_events(&trace, &cfg)?;

    println!("{} attack event(s):", report.events.len());
    for event in &report.events {
        println!("  [{:>8} s, {:>8} s)", event.start_t, event.end_t);
    }
    if !report.latencies.is_empty() {
        let missed = report.missed();
        match report.mean_latency() {
            Some(mean) => println!(
                "{} ground-truth segment(s), {} missed, mean latency {:.2} samples",
                report.latencies.len(),
                missed,
                mean
            ),
            None => println!(
                "{} ground-truth segment(s), all missed",
                report.latencies.len()
            ),
        }
    }
    if let Some(m) = &report.metrics {
        println!(
            "sample-level accuracy {:.4}, macro F1 {:.4}",
            m.accuracy, m.macro_f1
        );
    }
    if let Some(out) = &args.out {
        std::fs::write(out, serde_json::to_string_pretty(&report)?)?;
        println!("report written to {}", out.display());
    }
    if let Some(path) = &args.decisions {
        std::fs::write(path, report.decisions_csv(trace.interval()))?;
        println!("decisions written to {}", path.display());
    }
    Ok(())
}

fn cmd_plotdata(args: PlotDataArgs) -> Result<()> {
    let a = read_trace(&args.trace_a)?;
    let b = read_trace(&args.trace_b)?;
    if a.interval() != b.interval() {
        return Err(Error::IntervalMismatch {
            a: a.interval(),
            b: b.interval(),
        });
    }
    let n = a.len().min(b.len());
    if a.len() != b.len() {
        eprintln!(
            "warning: traces have {} and {} rows; truncating to {}",
            a.len(),
            b.len(),
            n
        );
    }
    std::fs::create_dir_all(&args.out_dir)?;
    for name in METRIC_NAMES {
        let mut csv = String::from("t,scenario_a,scenario_b\n");
        for i in 0..n {
            let sa = &a.samples()[i];
            let sb = &b.samples()[i];
            csv.push_str(&format!(
                "{},{},{}\n",
                sa.t,
                sa.metric(name).unwrap(),
                sb.metric(name).unwrap()
            ));
        }
        std::fs::write(args.out_dir.join(format!("{name}.csv")), csv)?;
    }
    println!(
        "wrote {} per-metric CSVs to {}",
        METRIC_NAMES.len(),
        args.out_dir.display()
    );
    Ok(())
}
