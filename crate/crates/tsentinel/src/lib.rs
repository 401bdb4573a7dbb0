//! Telemetry-driven DoS detection toolkit.
//!
//! Synthesizes cloud resource-usage traces under legitimate and SYN-flood
//! load, screens metrics with PCA, trains kNN and CART classifiers to label
//! samples attack / no-attack, and replays traces through an online detector
//! with windowed smoothing. Everything is seeded and deterministic.
//!
//! The pipeline, end to end:
//!
//! ```
//! use tsentinel::prelude::*;
//!
//! let model = LoadModel::default();
//! let train = TelemetryTrace::concat(&[
//!     synthesize(&baseline_scenario(), &model, 0).unwrap(),
//!     synthesize(&attack_scenario(), &model, 0).unwrap(),
//! ])
//! .unwrap();
//! let test = synthesize(&mixed_scenario(100), &model, 100).unwrap();
//!
//! let features: Vec<String> = SELECTED_METRIC_NAMES.iter().map(|s| s.to_string()).collect();
//! let (report, _models) = run_experiment(
//!     &train,
//!     &test,
//!     &features,
//!     5,
//!     CartParams::default(),
//!     Provenance::default(),
//! )
//! .unwrap();
//! assert!(report.knn.accuracy > 0.9);
//! ```
//!
//! See the `examples/` directory for one runnable walkthrough per capability,
//! and the `tsentinel` binary for the equivalent command-line surface.

pub mod cart;
pub mod cli;
pub mod detector;
pub mod error;
pub mod eval;
pub mod knn;
pub mod model;
pub mod pipeline;
pub mod rng;
pub mod synth;
pub mod telemetry;

#[cfg(test)]
mod concurrency_contracts {
    use crate::prelude::*;

    fn shareable<T: Send + Sync>() {}

    // Fitted artifacts are immutable and shareable across threads; a
    // Detector owns its window state and is Send but used by one consumer.
    #[test]
    fn fitted_types_are_send_and_sync() {
        shareable::<TelemetryTrace>();
        shareable::<FeatureMatrix>();
        shareable::<ScenarioSpec>();
        shareable::<LoadModel>();
        shareable::<Standardizer>();
        shareable::<PcaModel>();
        shareable::<KnnModel>();
        shareable::<CartModel>();
        shareable::<ModelBundle>();
        shareable::<ExperimentReport>();
        shareable::<DetectionReport>();
        fn sendable<T: Send>() {}
        sendable::<Detector>();
    }
}

/// One-stop imports for the common pipeline.
pub mod prelude {
    pub use crate::cart::{cart_fit, CartModel, CartNode, CartParams};
    pub use crate::detector::{
        detect_events, AttackEvent, DetectionReport, Detector, DetectorConfig,
    };
    pub use crate::error::{Error, Result};
    pub use crate::eval::{
        confusion, format_table, metrics, run_experiment, ConfusionMatrix, ExperimentReport,
        MetricsReport, Provenance,
    };
    pub use crate::knn::{knn_fit, KnnModel};
    pub use crate::model::{ModelBundle, TrainedModel};
    pub use crate::pipeline::{
        explained_variance_ratio, fit_pca, fit_standardizer, rank_features, select_features,
        standardize, FeatureRanking, PcaModel, Standardizer,
    };
    pub use crate::rng::Lcg64;
    pub use crate::synth::{
        attack_scenario, baseline_scenario, mixed_scenario, synthesize, AttackTiming, LoadModel,
        ScenarioSpec, SegmentSpec, DEFAULT_LEGIT_RATE,
    };
    pub use crate::telemetry::{
        parse_trace_csv, to_feature_matrix, write_trace_csv, FeatureMatrix, Label, MetricSample,
        TelemetryTrace, METRIC_NAMES, SELECTED_METRIC_NAMES,
    };
}
