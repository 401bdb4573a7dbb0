//! Core telemetry domain types and their CSV form.
//!
//! A [`MetricSample`] is one 5-second observation of a monitored host: eight
//! resource metrics plus an optional attack/benign label. A [`TelemetryTrace`]
//! is a uniformly sampled sequence of them, and [`FeatureMatrix`] is the
//! row-per-sample view fed to the learning pipeline.
//!
//! The CSV schema is fixed:
//! `t,cpu_util,mem_used,disk_read_reqs,disk_write_reqs,net_bytes_in,net_bytes_out,net_pkts_in,net_pkts_out[,label]`
//! with `.` decimal points, `\n` newlines, and label tokens `attack` /
//! `no_attack`. Values are printed with the shortest representation that
//! round-trips, so `parse(write(trace)) == trace` exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Canonical metric column order. Every feature name used anywhere in the
/// toolkit must be one of these eight.
pub const METRIC_NAMES: [&str; 8] = [
    "cpu_util",
    "mem_used",
    "disk_read_reqs",
    "disk_write_reqs",
    "net_bytes_in",
    "net_bytes_out",
    "net_pkts_in",
    "net_pkts_out",
];

/// The six metrics the default experiment settles on after PCA screening.
pub const SELECTED_METRIC_NAMES: [&str; 6] = [
    "cpu_util",
    "disk_write_reqs",
    "net_bytes_in",
    "net_bytes_out",
    "net_pkts_in",
    "net_pkts_out",
];

/// Default sampling interval in seconds.
pub const DEFAULT_INTERVAL: f64 = 5.0;

/// Index of `name` in the canonical metric order, if it is a metric name.
pub fn metric_index(name: &str) -> Option<usize> {
    METRIC_NAMES.iter().position(|&m| m == name)
}

/// Binary class label for one telemetry sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "attack")]
    Attack,
    #[serde(rename = "no_attack")]
    Benign,
}

impl Label {
    /// CSV token for this label.
    pub fn token(self) -> &'static str {
        match self {
            Label::Attack => "attack",
            Label::Benign => "no_attack",
        }
    }

    fn parse_token(token: &str, row: usize) -> Result<Label> {
        match token {
            "attack" => Ok(Label::Attack),
            "no_attack" => Ok(Label::Benign),
            _ => Err(Error::UnknownLabel {
                row,
                token: token.to_string(),
            }),
        }
    }
}

/// One telemetry observation covering a single sampling interval.
///
/// Disk request counters are per-interval counts (already differenced);
/// network counters are per-second rates; `mem_used` is a fraction of host
/// RAM. All metrics are interval averages, not instantaneous gauges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSample {
    /// Seconds since trace start.
    pub t: f64,
    /// CPU utilization, percent in [0, 100].
    pub cpu_util: f64,
    /// Memory in use, fraction in [0, 1].
    pub mem_used: f64,
    /// Disk read requests per sampling interval.
    pub disk_read_reqs: f64,
    /// Disk write requests per sampling interval.
    pub disk_write_reqs: f64,
    /// Incoming bytes per second.
    pub net_bytes_in: f64,
    /// Outgoing bytes per second.
    pub net_bytes_out: f64,
    /// Incoming packets per second.
    pub net_pkts_in: f64,
    /// Outgoing packets per second.
    pub net_pkts_out: f64,
    /// Ground-truth class, when known.
    pub label: Option<Label>,
}

impl MetricSample {
    /// The eight metric values in canonical order.
    pub fn metrics(&self) -> [f64; 8] {
        [
            self.cpu_util,
            self.mem_used,
            self.disk_read_reqs,
            self.disk_write_reqs,
            self.net_bytes_in,
            self.net_bytes_out,
            self.net_pkts_in,
            self.net_pkts_out,
        ]
    }

    /// Value of the named metric, or `None` for an unknown name.
    pub fn metric(&self, name: &str) -> Option<f64> {
        metric_index(name).map(|i| self.metrics()[i])
    }

    /// Checks finiteness and the per-field legal ranges. `row` is used only
    /// for error reporting.
    pub fn validate(&self, row: usize) -> Result<()> {
        let checks: [(&str, f64, f64, f64); 9] = [
            ("t", self.t, 0.0, f64::INFINITY),
            ("cpu_util", self.cpu_util, 0.0, 100.0),
            ("mem_used", self.mem_used, 0.0, 1.0),
            ("disk_read_reqs", self.disk_read_reqs, 0.0, f64::INFINITY),
            ("disk_write_reqs", self.disk_write_reqs, 0.0, f64::INFINITY),
            ("net_bytes_in", self.net_bytes_in, 0.0, f64::INFINITY),
            ("net_bytes_out", self.net_bytes_out, 0.0, f64::INFINITY),
            ("net_pkts_in", self.net_pkts_in, 0.0, f64::INFINITY),
            ("net_pkts_out", self.net_pkts_out, 0.0, f64::INFINITY),
        ];
        for (field, value, lo, hi) in checks {
            if !value.is_finite() || value < lo || value > hi {
                return Err(Error::OutOfRange {
                    row,
                    field: field.to_string(),
                    value,
                });
            }
        }
        Ok(())
    }
}

/// A uniformly sampled, ordered telemetry trace.
///
/// Invariants, enforced at construction: timestamps start at 0 and are spaced
/// exactly by `interval`, every sample is in range, and either all samples
/// carry a label or none do. Immutable afterwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TelemetryTrace {
    interval: f64,
    samples: Vec<MetricSample>,
}

impl TelemetryTrace {
    /// Builds a trace, checking every invariant. Row numbers in errors are
    /// 1-based over `samples` (header excluded), matching the CSV layout.
    pub fn new(interval: f64, samples: Vec<MetricSample>) -> Result<TelemetryTrace> {
        if !(interval.is_finite() && interval > 0.0) {
            return Err(Error::InvalidScenario {
                reason: format!("sampling interval must be positive, got {interval}"),
            });
        }
        let labeled = samples.first().map(|s| s.label.is_some());
        for (i, sample) in samples.iter().enumerate() {
            let row = i + 1;
            sample.validate(row)?;
            let expected_t = i as f64 * interval;
            if sample.t != expected_t {
                return Err(Error::NonUniformSpacing { row });
            }
            if sample.label.is_some() != labeled.unwrap() {
                return Err(Error::MixedLabeling { row });
            }
        }
        Ok(TelemetryTrace { interval, samples })
    }

    /// Sampling interval in seconds.
    pub fn interval(&self) -> f64 {
        self.interval
    }

    pub fn samples(&self) -> &[MetricSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// True when samples carry labels. An empty trace counts as unlabeled.
    pub fn is_labeled(&self) -> bool {
        self.samples.first().is_some_and(|s| s.label.is_some())
    }

    /// Ground-truth labels, when present.
    pub fn labels(&self) -> Option<Vec<Label>> {
        if self.is_labeled() {
            Some(self.samples.iter().map(|s| s.label.unwrap()).collect())
        } else {
            None
        }
    }

    /// Concatenates traces into one, re-timing samples sequentially from 0.
    /// All traces must share the interval and labeled-ness; used to pool
    /// training traces.
    pub fn concat(traces: &[TelemetryTrace]) -> Result<TelemetryTrace> {
        let Some(first) = traces.first() else {
            return Err(Error::EmptyInput {
                context: "no traces to concatenate".to_string(),
            });
        };
        let interval = first.interval;
        let mut samples = Vec::new();
        for trace in traces {
            if trace.interval != interval {
                return Err(Error::IntervalMismatch {
                    a: interval,
                    b: trace.interval,
                });
            }
            samples.extend(trace.samples.iter().cloned());
        }
        for (i, sample) in samples.iter_mut().enumerate() {
            sample.t = i as f64 * interval;
        }
        TelemetryTrace::new(interval, samples)
    }
}

/// Row-per-sample numeric view of a trace over a chosen feature subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    feature_names: Vec<String>,
    /// Row-major values, `n_rows x feature_names.len()`.
    data: Vec<f64>,
    labels: Option<Vec<Label>>,
}

impl FeatureMatrix {
    /// Builds a matrix from row-major data. `feature_names` must be distinct
    /// canonical metric names; `labels`, when given, must match the row count.
    pub fn new(
        feature_names: Vec<String>,
        data: Vec<f64>,
        labels: Option<Vec<Label>>,
    ) -> Result<FeatureMatrix> {
        validate_feature_names(&feature_names)?;
        let d = feature_names.len();
        assert_eq!(data.len() % d, 0, "data length must be a multiple of d");
        let n = data.len() / d;
        if let Some(ref labels) = labels {
            if labels.len() != n {
                return Err(Error::LengthMismatch {
                    left: n,
                    right: labels.len(),
                });
            }
        }
        Ok(FeatureMatrix {
            feature_names,
            data,
            labels,
        })
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn n_rows(&self) -> usize {
        self.data.len() / self.feature_names.len()
    }

    pub fn n_cols(&self) -> usize {
        self.feature_names.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let d = self.feature_names.len();
        &self.data[i * d..(i + 1) * d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.feature_names.len())
    }

    pub fn labels(&self) -> Option<&[Label]> {
        self.labels.as_deref()
    }

    /// Labels, or an error naming the operation that needed them.
    pub fn require_labels(&self, context: &str) -> Result<&[Label]> {
        self.labels.as_deref().ok_or_else(|| Error::Unlabeled {
            context: context.to_string(),
        })
    }

    /// Rejects NaN or infinite cells, naming the first offender.
    pub fn require_finite(&self) -> Result<()> {
        for (i, row) in self.rows().enumerate() {
            for (value, name) in row.iter().zip(&self.feature_names) {
                if !value.is_finite() {
                    return Err(Error::OutOfRange {
                        row: i + 1,
                        field: name.clone(),
                        value: *value,
                    });
                }
            }
        }
        Ok(())
    }
}

fn validate_feature_names(names: &[String]) -> Result<()> {
    if names.is_empty() {
        return Err(Error::EmptyFeatureList);
    }
    for (i, name) in names.iter().enumerate() {
        if metric_index(name).is_none() {
            return Err(Error::UnknownFeature { name: name.clone() });
        }
        if names[..i].contains(name) {
            return Err(Error::DuplicateFeature { name: name.clone() });
        }
    }
    Ok(())
}

/// Projects a trace onto the named metrics, one row per sample in trace
/// order. Labels are carried over when present.
pub fn to_feature_matrix(
    trace: &TelemetryTrace,
    feature_names: &[String],
) -> Result<FeatureMatrix> {
    validate_feature_names(feature_names)?;
    let indices: Vec<usize> = feature_names
        .iter()
        .map(|n| metric_index(n).unwrap())
        .collect();
    let mut data = Vec::with_capacity(trace.len() * indices.len());
    for sample in trace.samples() {
        let values = sample.metrics();
        data.extend(indices.iter().map(|&i| values[i]));
    }
    FeatureMatrix::new(feature_names.to_vec(), data, trace.labels())
}

/// Formats a float with the shortest representation that parses back to the
/// same bits. Rust's `Display` for `f64` guarantees this.
fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// Serializes a trace to CSV. Round-trip identity with [`parse_trace_csv`].
pub fn write_trace_csv(trace: &TelemetryTrace) -> String {
    let labeled = trace.is_labeled();
    let mut out = String::new();
    out.push('t');
    for name in METRIC_NAMES {
        out.push(',');
        out.push_str(name);
    }
    if labeled {
        out.push_str(",label");
    }
    out.push('\n');
    for sample in trace.samples() {
        out.push_str(&fmt_f64(sample.t));
        for value in sample.metrics() {
            out.push(',');
            out.push_str(&fmt_f64(value));
        }
        if labeled {
            out.push(',');
            out.push_str(sample.label.unwrap().token());
        }
        out.push('\n');
    }
    out
}

/// Parses the CSV form of a trace.
///
/// The header must name `t` and all eight canonical metrics; `label` is
/// optional. Column order is free (the canonical writer emits the canonical
/// order). The interval is inferred from the first two timestamps and
/// defaults to 5 for shorter traces. Any invariant violation is an error
/// naming the offending data row (1-based, header excluded); nothing is
/// silently repaired.
pub fn parse_trace_csv(text: &str) -> Result<TelemetryTrace> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::EmptyInput {
        context: "CSV has no header row".to_string(),
    })?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();

    let mut required: Vec<&str> = vec!["t"];
    required.extend(METRIC_NAMES);
    let mut col_index = Vec::with_capacity(required.len());
    for name in &required {
        match columns.iter().position(|c| c == name) {
            Some(i) => col_index.push(i),
            None => {
                return Err(Error::MissingColumn {
                    name: name.to_string(),
                })
            }
        }
    }
    let label_index = columns.iter().position(|c| *c == "label");

    let parse_field = |row: usize, column: &str, raw: &str| -> Result<f64> {
        raw.trim()
            .parse::<f64>()
            .map_err(|_| Error::MalformedNumber {
                row,
                column: column.to_string(),
                value: raw.trim().to_string(),
            })
    };

    let mut samples = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = i + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() {
            return Err(Error::WrongFieldCount {
                row,
                expected: columns.len(),
                got: fields.len(),
            });
        }
        let mut values = [0.0f64; 9];
        for (slot, &ci) in col_index.iter().enumerate() {
            values[slot] = parse_field(row, required[slot], fields[ci])?;
        }
        let label = match label_index {
            Some(ci) => Some(Label::parse_token(fields[ci].trim(), row)?),
            None => None,
        };
        let sample = MetricSample {
            t: values[0],
            cpu_util: values[1],
            mem_used: values[2],
            disk_read_reqs: values[3],
            disk_write_reqs: values[4],
            net_bytes_in: values[5],
            net_bytes_out: values[6],
            net_pkts_in: values[7],
            net_pkts_out: values[8],
            label,
        };
        sample.validate(row)?;
        samples.push(sample);
    }

    let interval = if samples.len() >= 2 {
        samples[1].t - samples[0].t
    } else {
        DEFAULT_INTERVAL
    };
    if samples.len() >= 2 && !(interval.is_finite() && interval > 0.0) {
        return Err(Error::NonUniformSpacing { row: 2 });
    }
    // Re-run the invariant checks with row numbers relative to the data rows.
    if let Some(first) = samples.first() {
        if first.t != 0.0 {
            return Err(Error::NonUniformSpacing { row: 1 });
        }
    }
    let labeled = samples.first().map(|s| s.label.is_some());
    for (i, sample) in samples.iter().enumerate() {
        let row = i + 1;
        if sample.t != i as f64 * interval {
            return Err(Error::NonUniformSpacing { row });
        }
        if sample.label.is_some() != labeled.unwrap() {
            return Err(Error::MixedLabeling { row });
        }
    }
    TelemetryTrace::new(interval, samples)
}
