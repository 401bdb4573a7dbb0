//! Streaming replay: a trained model applied sample-by-sample with
//! majority-vote smoothing over a sliding window of raw decisions.
//!
//! The smoothed decision at each step is Attack iff more than `window / 2` of
//! the retained raw decisions are Attack, where `window` is the configured
//! constant — also while the buffer is still filling. This keeps warmup
//! conservative: an isolated raw Attack can never produce an event for
//! window >= 3, no matter where in the stream it lands. `window = 1`
//! reproduces the unsmoothed classifier exactly.

use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::eval::{confusion, metrics, MetricsReport};
use crate::model::ModelBundle;
use crate::telemetry::{Label, MetricSample, TelemetryTrace};

/// Detector configuration: a model bundle plus the smoothing window (odd).
#[derive(Debug, Clone)]
pub struct DetectorConfig {
    pub bundle: ModelBundle,
    pub window: usize,
}

impl DetectorConfig {
    pub fn new(bundle: ModelBundle, window: usize) -> Result<DetectorConfig> {
        if window == 0 || window.is_multiple_of(2) {
            return Err(Error::EvenWindow { window });
        }
        Ok(DetectorConfig { bundle, window })
    }
}

/// A maximal run of Attack decisions, as a half-open interval in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackEvent {
    pub start_t: f64,
    pub end_t: f64,
}

/// Detection latency for one ground-truth attack onset, in samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OnsetLatency {
    /// Timestamp of the first labeled Attack sample of the segment.
    pub onset_t: f64,
    /// Samples from onset to the first Attack decision inside the segment;
    /// `None` when the whole segment passed undetected.
    pub latency_samples: Option<usize>,
}

/// Full outcome of replaying one trace through a detector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub events: Vec<AttackEvent>,
    pub raw_decisions: Vec<Label>,
    pub smoothed_decisions: Vec<Label>,
    /// One entry per ground-truth attack segment; empty for unlabeled traces.
    pub latencies: Vec<OnsetLatency>,
    /// Sample-level quality of the smoothed decisions vs ground truth, when
    /// the trace is labeled.
    pub metrics: Option<MetricsReport>,
}

impl DetectionReport {
    /// Number of ground-truth segments never detected.
    pub fn missed(&self) -> usize {
        self.latencies
            .iter()
            .filter(|l| l.latency_samples.is_none())
            .count()
    }

    /// Mean latency over detected onsets, in samples.
    pub fn mean_latency(&self) -> Option<f64> {
        let detected: Vec<usize> = self
            .latencies
            .iter()
            .filter_map(|l| l.latency_samples)
            .collect();
        if detected.is_empty() {
            None
        } else {
            Some(detected.iter().sum::<usize>() as f64 / detected.len() as f64)
        }
    }

    /// Two-column CSV of the smoothed decision sequence.
    pub fn decisions_csv(&self, interval: f64) -> String {
        let mut out = String::from("t,decision\n");
        for (i, d) in self.smoothed_decisions.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i as f64 * interval, d.token()));
        }
        out
    }
}

/// Stateful streaming detector; one instance consumes one trace in order.
pub struct Detector {
    cfg: DetectorConfig,
    buffer: VecDeque<Label>,
}

impl Detector {
    pub fn new(cfg: DetectorConfig) -> Detector {
        Detector {
            buffer: VecDeque::with_capacity(cfg.window),
            cfg,
        }
    }

    /// Classifies one sample and returns `(raw, smoothed)` decisions.
    pub fn step(&mut self, sample: &MetricSample) -> Result<(Label, Label)> {
        let values: Vec<f64> = self
            .cfg
            .bundle
            .feature_names
            .iter()
            .map(|name| {
                sample
                    .metric(name)
                    .ok_or_else(|| Error::UnknownFeature { name: name.clone() })
            })
            .collect::<Result<_>>()?;
        let z = self.cfg.bundle.standardizer.transform_row(&values)?;
        let raw = self.cfg.bundle.model.predict(&z)?;

        if self.buffer.len() == self.cfg.window {
            self.buffer.pop_front();
        }
        self.buffer.push_back(raw);
        let attack_votes = self.buffer.iter().filter(|&&l| l == Label::Attack).count();
        let smoothed = if attack_votes * 2 > self.cfg.window {
            Label::Attack
        } else {
            Label::Benign
        };
        Ok((raw, smoothed))
    }
}

/// First sample index of each maximal ground-truth attack run.
fn ground_truth_onsets(labels: &[Label]) -> Vec<(usize, usize)> {
    let mut segments = Vec::new();
    let mut start = None;
    for (i, &label) in labels.iter().enumerate() {
        match (label, start) {
            (Label::Attack, None) => start = Some(i),
            (Label::Benign, Some(s)) => {
                segments.push((s, i));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        segments.push((s, labels.len()));
    }
    segments
}

/// Replays a whole trace through a fresh detector: smoothed Attack runs
/// become events, and each ground-truth attack segment gets a latency entry.
pub fn detect_events(trace: &TelemetryTrace, cfg: &DetectorConfig) -> Result<DetectionReport> {
    let mut detector = Detector::new(cfg.clone());
    let mut raw_decisions = Vec::with_capacity(trace.len());
    let mut smoothed_decisions = Vec::with_capacity(trace.len());
    for sample in trace.samples() {
        let (raw, smoothed) = detector.step(sample)?;
        raw_decisions.push(raw);
        smoothed_decisions.push(smoothed);
    }

    let dt = trace.interval();
    let mut events = Vec::new();
    let mut run_start = None;
    for (i, &d) in smoothed_decisions.iter().enumerate() {
        match (d, run_start) {
            (Label::Attack, None) => run_start = Some(i),
            (Label::Benign, Some(s)) => {
                events.push(AttackEvent {
                    start_t: s as f64 * dt,
                    end_t: i as f64 * dt,
                });
                run_start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = run_start {
        events.push(AttackEvent {
            start_t: s as f64 * dt,
            end_t: smoothed_decisions.len() as f64 * dt,
        });
    }

    let mut latencies = Vec::new();
    let mut report_metrics = None;
    if let Some(truth) = trace.labels() {
        for (onset, end) in ground_truth_onsets(&truth) {
            let latency_samples = smoothed_decisions[onset..end]
                .iter()
                .position(|&d| d == Label::Attack);
            latencies.push(OnsetLatency {
                onset_t: onset as f64 * dt,
                latency_samples,
            });
        }
        if !truth.is_empty() {
            report_metrics = Some(metrics(&confusion(&smoothed_decisions, &truth)?)?);
        }
    }

    Ok(DetectionReport {
        events,
        raw_decisions,
        smoothed_decisions,
        latencies,
        metrics: report_metrics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knn::knn_fit;
    use crate::model::TrainedModel;
    use crate::pipeline::Standardizer;
    use crate::telemetry::FeatureMatrix;

    /// A bundle whose kNN model maps net_pkts_in <= 100 to Benign and
    /// everything above to Attack, with an identity standardizer.
    fn threshold_bundle() -> ModelBundle {
        let names = vec!["net_pkts_in".to_string()];
        let train = FeatureMatrix::new(
            names.clone(),
            vec![0.0, 200.0],
            Some(vec![Label::Benign, Label::Attack]),
        )
        .unwrap();
        ModelBundle::new(
            names.clone(),
            Standardizer {
                feature_names: names,
                mean: vec![0.0],
                stddev: vec![1.0],
            },
            TrainedModel::Knn(knn_fit(train, 1).unwrap()),
        )
    }

    fn trace_from_pkts(pkts: &[f64], labeled: bool) -> TelemetryTrace {
        let samples = pkts
            .iter()
            .enumerate()
            .map(|(i, &p)| MetricSample {
                t: i as f64 * 5.0,
                cpu_util: 1.0,
                mem_used: 0.3,
                disk_read_reqs: 1.0,
                disk_write_reqs: 1.0,
                net_bytes_in: 1.0,
                net_bytes_out: 1.0,
                net_pkts_in: p,
                net_pkts_out: 1.0,
                label: labeled.then_some(if p > 100.0 {
                    Label::Attack
                } else {
                    Label::Benign
                }),
            })
            .collect();
        TelemetryTrace::new(5.0, samples).unwrap()
    }

    #[test]
    fn window_one_metrics_match_run_experiment() {
        use crate::eval::{run_experiment, Provenance};
        use crate::synth::{
            attack_scenario, baseline_scenario, mixed_scenario, synthesize, LoadModel,
        };

        let load = LoadModel::default();
        let train = TelemetryTrace::concat(&[
            synthesize(&baseline_scenario(), &load, 4).unwrap(),
            synthesize(&attack_scenario(), &load, 4).unwrap(),
        ])
        .unwrap();
        let test = synthesize(&mixed_scenario(104), &load, 104).unwrap();
        let features: Vec<String> = crate::telemetry::SELECTED_METRIC_NAMES
            .iter()
            .map(|s| s.to_string())
            .collect();
        let (report, models) = run_experiment(
            &train,
            &test,
            &features,
            5,
            crate::cart::CartParams::default(),
            Provenance::default(),
        )
        .unwrap();
        let bundle = ModelBundle::new(features, models.standardizer, TrainedModel::Knn(models.knn));
        let detection = detect_events(&test, &DetectorConfig::new(bundle, 1).unwrap()).unwrap();
        assert_eq!(detection.metrics.unwrap(), report.knn);
    }

    #[test]
    fn window_one_equals_raw() {
        let cfg = DetectorConfig::new(threshold_bundle(), 1).unwrap();
        let trace = trace_from_pkts(&[10.0, 500.0, 10.0, 500.0], false);
        let report = detect_events(&trace, &cfg).unwrap();
        assert_eq!(report.raw_decisions, report.smoothed_decisions);
    }

    #[test]
    fn majority_vote_hand_simulation() {
        // Raw stream B,B,A,A,A with window 5: attack votes reach 3 (> 5/2)
        // only at the fifth step, so the smoothed stream is B,B,B,B,A.
        let cfg = DetectorConfig::new(threshold_bundle(), 5).unwrap();
        let trace = trace_from_pkts(&[10.0, 10.0, 500.0, 500.0, 500.0], false);
        let report = detect_events(&trace, &cfg).unwrap();
        assert_eq!(
            report.raw_decisions,
            vec![
                Label::Benign,
                Label::Benign,
                Label::Attack,
                Label::Attack,
                Label::Attack
            ]
        );
        assert_eq!(
            report.smoothed_decisions,
            vec![
                Label::Benign,
                Label::Benign,
                Label::Benign,
                Label::Benign,
                Label::Attack
            ]
        );
    }

    #[test]
    fn constant_benign_stream_stays_benign() {
        let cfg = DetectorConfig::new(threshold_bundle(), 5).unwrap();
        let trace = trace_from_pkts(&[10.0; 20], false);
        let report = detect_events(&trace, &cfg).unwrap();
        assert!(report
            .smoothed_decisions
            .iter()
            .all(|&d| d == Label::Benign));
        assert!(report.events.is_empty());
    }

    #[test]
    fn isolated_attack_never_fires_with_window_3_or_more() {
        for window in [3, 5, 7] {
            let cfg = DetectorConfig::new(threshold_bundle(), window).unwrap();
            for position in 0..10 {
                let mut pkts = vec![10.0; 10];
                pkts[position] = 500.0;
                let trace = trace_from_pkts(&pkts, false);
                let report = detect_events(&trace, &cfg).unwrap();
                assert!(
                    report.events.is_empty(),
                    "window {window}, isolated attack at {position}"
                );
            }
        }
    }

    #[test]
    fn all_attack_trace_is_one_event_spanning_it() {
        let cfg = DetectorConfig::new(threshold_bundle(), 1).unwrap();
        let trace = trace_from_pkts(&[500.0; 8], false);
        let report = detect_events(&trace, &cfg).unwrap();
        assert_eq!(
            report.events,
            vec![AttackEvent {
                start_t: 0.0,
                end_t: 40.0
            }]
        );
    }

    #[test]
    fn empty_trace_empty_report() {
        let cfg = DetectorConfig::new(threshold_bundle(), 5).unwrap();
        let trace = TelemetryTrace::new(5.0, vec![]).unwrap();
        let report = detect_events(&trace, &cfg).unwrap();
        assert!(report.events.is_empty());
        assert!(report.raw_decisions.is_empty());
        assert!(report.latencies.is_empty());
        assert!(report.metrics.is_none());
    }

    #[test]
    fn streaming_equals_batch() {
        let cfg = DetectorConfig::new(threshold_bundle(), 3).unwrap();
        let pkts = [10.0, 500.0, 500.0, 500.0, 10.0, 10.0, 500.0, 500.0];
        let trace = trace_from_pkts(&pkts, false);
        let report = detect_events(&trace, &cfg).unwrap();
        let mut detector = Detector::new(cfg);
        for (i, sample) in trace.samples().iter().enumerate() {
            let (raw, smoothed) = detector.step(sample).unwrap();
            assert_eq!(raw, report.raw_decisions[i]);
            assert_eq!(smoothed, report.smoothed_decisions[i]);
        }
    }

    #[test]
    fn events_cover_exactly_the_attack_decisions() {
        let cfg = DetectorConfig::new(threshold_bundle(), 3).unwrap();
        let pkts = [
            10.0, 500.0, 500.0, 500.0, 500.0, 10.0, 10.0, 500.0, 500.0, 500.0,
        ];
        let trace = trace_from_pkts(&pkts, false);
        let report = detect_events(&trace, &cfg).unwrap();
        for w in report.events.windows(2) {
            assert!(
                w[0].end_t <= w[1].start_t,
                "events must be disjoint and sorted"
            );
        }
        let dt = trace.interval();
        for (i, &d) in report.smoothed_decisions.iter().enumerate() {
            let t = i as f64 * dt;
            let inside = report.events.iter().any(|e| t >= e.start_t && t < e.end_t);
            assert_eq!(inside, d == Label::Attack);
        }
    }

    #[test]
    fn latency_counts_from_each_onset() {
        let cfg = DetectorConfig::new(threshold_bundle(), 3).unwrap();
        // Attack segment of 6 samples starting at index 3; window 3 delays
        // the first Attack decision to the second attack sample.
        let pkts = [
            10.0, 10.0, 10.0, 500.0, 500.0, 500.0, 500.0, 500.0, 500.0, 10.0,
        ];
        let trace = trace_from_pkts(&pkts, true);
        let report = detect_events(&trace, &cfg).unwrap();
        assert_eq!(report.latencies.len(), 1);
        assert_eq!(report.latencies[0].onset_t, 15.0);
        assert_eq!(report.latencies[0].latency_samples, Some(1));
        assert_eq!(report.missed(), 0);
        assert_eq!(report.mean_latency(), Some(1.0));
    }

    #[test]
    fn short_attack_segment_can_be_missed() {
        let cfg = DetectorConfig::new(threshold_bundle(), 5).unwrap();
        let pkts = [10.0, 10.0, 10.0, 500.0, 10.0, 10.0, 10.0, 10.0];
        let trace = trace_from_pkts(&pkts, true);
        let report = detect_events(&trace, &cfg).unwrap();
        assert_eq!(report.latencies.len(), 1);
        assert_eq!(report.latencies[0].latency_samples, None);
        assert_eq!(report.missed(), 1);
        assert_eq!(report.mean_latency(), None);
    }

    #[test]
    fn decisions_csv_shape() {
        let cfg = DetectorConfig::new(threshold_bundle(), 1).unwrap();
        let trace = trace_from_pkts(&[10.0, 500.0], false);
        let report = detect_events(&trace, &cfg).unwrap();
        assert_eq!(
            report.decisions_csv(trace.interval()),
            "t,decision\n0,no_attack\n5,attack\n"
        );
    }

    #[test]
    fn even_window_rejected() {
        assert!(matches!(
            DetectorConfig::new(threshold_bundle(), 4),
            Err(Error::EvenWindow { window: 4 })
        ));
    }
}
