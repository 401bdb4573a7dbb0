//! Deterministic synthesis of telemetry traces under legitimate and SYN-flood
//! load.
//!
//! Three canned scenarios cover the standard experiment set: a 30-minute
//! baseline with only legitimate clients, a 30-minute run with three attack
//! phases of increasing intensity, and a 120-minute mixed run alternating
//! 10-minute segments of legit-only, attack-only, and combined traffic.
//!
//! Per sample, each metric is
//! `baseline + legit_rate * per_request_cost + attack_rate * per_packet_cost + noise`,
//! clamped to its legal range; disk counters additionally scale by the
//! sampling interval (they are per-interval counts), and memory accumulates a
//! SYN-backlog term during attack segments that relaxes geometrically toward
//! baseline otherwise. All randomness flows through the seeded [`Lcg64`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Lcg64;
use crate::telemetry::{Label, MetricSample, TelemetryTrace, DEFAULT_INTERVAL};

/// Legitimate request rate used by the canned scenarios, requests/s. Light
/// enough that the server holds it comfortably.
pub const DEFAULT_LEGIT_RATE: f64 = 12.0;

/// Attack packet cadence within one segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AttackTiming {
    /// No attack traffic.
    None,
    /// One attack packet every `ms` milliseconds.
    EveryMs(u32),
    /// The maximum rate the attacking host can perform
    /// ([`LoadModel::max_attack_rate`]).
    Max,
}

impl AttackTiming {
    /// Realized packet rate in packets/s under `model`.
    pub fn rate(self, model: &LoadModel) -> f64 {
        match self {
            AttackTiming::None => 0.0,
            AttackTiming::EveryMs(ms) => 1000.0 / ms as f64,
            AttackTiming::Max => model.max_attack_rate,
        }
    }

    pub fn is_attack(self) -> bool {
        self != AttackTiming::None
    }

    /// Token used in the scenario text format: `0` for none, the interval in
    /// milliseconds, or `max`.
    fn token(self) -> String {
        match self {
            AttackTiming::None => "0".to_string(),
            AttackTiming::EveryMs(ms) => ms.to_string(),
            AttackTiming::Max => "max".to_string(),
        }
    }

    fn parse(token: &str) -> Result<AttackTiming> {
        if token.eq_ignore_ascii_case("max") {
            return Ok(AttackTiming::Max);
        }
        match token.parse::<u32>() {
            Ok(0) => Ok(AttackTiming::None),
            Ok(u32::MAX) => Ok(AttackTiming::Max),
            Ok(ms) => Ok(AttackTiming::EveryMs(ms)),
            Err(_) => Err(Error::InvalidScenario {
                reason: format!("bad attack interval {token:?}"),
            }),
        }
    }
}

/// One homogeneous stretch of load.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentSpec {
    /// Seconds; must be a positive multiple of the scenario interval.
    pub duration_s: f64,
    /// Legitimate HTTP requests per second.
    pub legit_rate: f64,
    pub attack: AttackTiming,
}

/// Declarative description of a whole experiment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    /// Sampling interval, seconds.
    pub interval: f64,
    pub segments: Vec<SegmentSpec>,
    /// Multiplier on every per-metric noise standard deviation.
    pub noise_scale: f64,
}

impl ScenarioSpec {
    /// Checks the scenario invariants: at least one segment, every duration a
    /// positive multiple of the interval.
    pub fn validate(&self) -> Result<()> {
        if !(self.interval.is_finite() && self.interval > 0.0) {
            return Err(Error::InvalidScenario {
                reason: format!("interval must be positive, got {}", self.interval),
            });
        }
        if self.segments.is_empty() {
            return Err(Error::InvalidScenario {
                reason: "scenario needs at least one segment".to_string(),
            });
        }
        if !(self.noise_scale.is_finite() && self.noise_scale >= 0.0) {
            return Err(Error::InvalidScenario {
                reason: format!("noise_scale must be non-negative, got {}", self.noise_scale),
            });
        }
        for (i, seg) in self.segments.iter().enumerate() {
            let steps = seg.duration_s / self.interval;
            if !(seg.duration_s > 0.0 && steps.fract() == 0.0) {
                return Err(Error::InvalidScenario {
                    reason: format!(
                        "segment {} duration {} is not a positive multiple of interval {}",
                        i + 1,
                        seg.duration_s,
                        self.interval
                    ),
                });
            }
            if !(seg.legit_rate.is_finite() && seg.legit_rate >= 0.0) {
                return Err(Error::InvalidScenario {
                    reason: format!("segment {} legit_rate must be non-negative", i + 1),
                });
            }
        }
        Ok(())
    }

    /// Total duration in seconds.
    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration_s).sum()
    }

    /// Number of samples a synthesized trace will have.
    pub fn sample_count(&self) -> usize {
        (self.total_duration() / self.interval).round() as usize
    }

    /// Human-editable text form: key-value header lines, then one
    /// `segment <duration_s> <legit_rate> <attack_interval_ms>` line each.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("interval {}\n", self.interval));
        out.push_str(&format!("noise_scale {}\n", self.noise_scale));
        for seg in &self.segments {
            out.push_str(&format!(
                "segment {} {} {}\n",
                seg.duration_s,
                seg.legit_rate,
                seg.attack.token()
            ));
        }
        out
    }

    /// Parses the text form. Blank lines and `#` comments are ignored.
    pub fn from_text(text: &str) -> Result<ScenarioSpec> {
        let mut interval = DEFAULT_INTERVAL;
        let mut noise_scale = 1.0;
        let mut segments = Vec::new();
        let bad = |line: usize, why: &str| Error::InvalidScenario {
            reason: format!("line {line}: {why}"),
        };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut parts = trimmed.split_whitespace();
            let key = parts.next().unwrap();
            let rest: Vec<&str> = parts.collect();
            match key {
                "interval" | "noise_scale" => {
                    let [value] = rest[..] else {
                        return Err(bad(line, "expected one value"));
                    };
                    let v: f64 = value.parse().map_err(|_| bad(line, "expected a number"))?;
                    if key == "interval" {
                        interval = v;
                    } else {
                        noise_scale = v;
                    }
                }
                "segment" => {
                    let [dur, rate, attack] = rest[..] else {
                        return Err(bad(
                            line,
                            "expected: segment <duration_s> <legit_rate> <attack_interval_ms>",
                        ));
                    };
                    segments.push(SegmentSpec {
                        duration_s: dur.parse().map_err(|_| bad(line, "bad duration"))?,
                        legit_rate: rate.parse().map_err(|_| bad(line, "bad legit_rate"))?,
                        attack: AttackTiming::parse(attack)?,
                    });
                }
                other => return Err(bad(line, &format!("unknown key {other:?}"))),
            }
        }
        let spec = ScenarioSpec {
            interval,
            segments,
            noise_scale,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Per-metric baseline level and noise standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricLevel {
    pub base: f64,
    pub noise_sd: f64,
}

/// Cost model translating request and attack-packet rates into metric
/// displacements.
///
/// Per-request costs are amortized per legitimate request; per-packet costs
/// apply to each SYN-flood packet, whose footprint covers the SYN itself,
/// the victim's SYN-ACK (re)transmissions, backlog bookkeeping writes, and
/// kernel processing time. Disk counters are per-interval, so their cost
/// contributions scale by the sampling interval. The defaults are calibrated
/// for clear qualitative contrast between the two scenarios, not for absolute
/// realism.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadModel {
    pub cpu: MetricLevel,
    pub mem: MetricLevel,
    pub disk_read: MetricLevel,
    pub disk_write: MetricLevel,
    pub bytes_in: MetricLevel,
    pub bytes_out: MetricLevel,
    pub pkts_in: MetricLevel,
    pub pkts_out: MetricLevel,

    /// CPU percent-seconds per legitimate request.
    pub cpu_per_request: f64,
    /// Disk write requests per legitimate request.
    pub disk_writes_per_request: f64,
    pub bytes_in_per_request: f64,
    pub bytes_out_per_request: f64,
    pub pkts_in_per_request: f64,
    pub pkts_out_per_request: f64,

    /// CPU percent-seconds per attack packet.
    pub cpu_per_attack_pkt: f64,
    pub pkts_in_per_attack_pkt: f64,
    pub bytes_in_per_attack_pkt: f64,
    /// SYN-ACK replies and retransmissions per attack packet.
    pub pkts_out_per_attack_pkt: f64,
    pub bytes_out_per_attack_pkt: f64,
    /// Backlog/conntrack log writes per attack packet.
    pub disk_writes_per_attack_pkt: f64,
    /// Memory fraction accumulated per attack packet (SYN backlog growth).
    pub mem_backlog_per_attack_pkt: f64,
    /// Geometric relaxation factor applied to the backlog each attack-free
    /// interval; 0 clears instantly, values near 1 linger.
    pub mem_backlog_relax: f64,

    /// Packets/s realized by [`AttackTiming::Max`].
    pub max_attack_rate: f64,
}

impl Default for LoadModel {
    fn default() -> LoadModel {
        LoadModel {
            cpu: MetricLevel {
                base: 2.0,
                noise_sd: 0.011,
            },
            mem: MetricLevel {
                base: 0.30,
                noise_sd: 0.002,
            },
            disk_read: MetricLevel {
                base: 1.2,
                noise_sd: 0.18,
            },
            disk_write: MetricLevel {
                base: 6.0,
                noise_sd: 0.26,
            },
            bytes_in: MetricLevel {
                base: 4_000.0,
                noise_sd: 79.0,
            },
            bytes_out: MetricLevel {
                base: 6_000.0,
                noise_sd: 230.0,
            },
            pkts_in: MetricLevel {
                base: 30.0,
                noise_sd: 1.28,
            },
            pkts_out: MetricLevel {
                base: 30.0,
                noise_sd: 3.8,
            },

            cpu_per_request: 0.00025,
            disk_writes_per_request: 0.0028,
            bytes_in_per_request: 2.5,
            bytes_out_per_request: 12.5,
            pkts_in_per_request: 0.04,
            pkts_out_per_request: 0.19,

            cpu_per_attack_pkt: 0.0085,
            pkts_in_per_attack_pkt: 1.0,
            bytes_in_per_attack_pkt: 62.0,
            pkts_out_per_attack_pkt: 3.0,
            bytes_out_per_attack_pkt: 180.0,
            disk_writes_per_attack_pkt: 0.04,
            mem_backlog_per_attack_pkt: 6.0e-7,
            mem_backlog_relax: 0.5,

            max_attack_rate: 10_000.0,
        }
    }
}

impl LoadModel {
    /// Checks that all costs, baselines, and deviations are non-negative.
    pub fn validate(&self) -> Result<()> {
        let levels = [
            self.cpu,
            self.mem,
            self.disk_read,
            self.disk_write,
            self.bytes_in,
            self.bytes_out,
            self.pkts_in,
            self.pkts_out,
        ];
        let costs = [
            self.cpu_per_request,
            self.disk_writes_per_request,
            self.bytes_in_per_request,
            self.bytes_out_per_request,
            self.pkts_in_per_request,
            self.pkts_out_per_request,
            self.cpu_per_attack_pkt,
            self.pkts_in_per_attack_pkt,
            self.bytes_in_per_attack_pkt,
            self.pkts_out_per_attack_pkt,
            self.bytes_out_per_attack_pkt,
            self.disk_writes_per_attack_pkt,
            self.mem_backlog_per_attack_pkt,
            self.max_attack_rate,
        ];
        let ok = levels.iter().all(|l| {
            l.base.is_finite() && l.base >= 0.0 && l.noise_sd.is_finite() && l.noise_sd >= 0.0
        }) && costs.iter().all(|c| c.is_finite() && *c >= 0.0)
            && self.mem_backlog_relax.is_finite()
            && (0.0..=1.0).contains(&self.mem_backlog_relax);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidScenario {
                reason: "load model has a negative or non-finite parameter".to_string(),
            })
        }
    }
}

/// 30-minute baseline: two 10 s idle gaps around 1780 s of legitimate load,
/// no attack anywhere. 360 samples at the default interval.
pub fn baseline_scenario() -> ScenarioSpec {
    ScenarioSpec {
        interval: DEFAULT_INTERVAL,
        segments: vec![
            SegmentSpec {
                duration_s: 10.0,
                legit_rate: 0.0,
                attack: AttackTiming::None,
            },
            SegmentSpec {
                duration_s: 1780.0,
                legit_rate: DEFAULT_LEGIT_RATE,
                attack: AttackTiming::None,
            },
            SegmentSpec {
                duration_s: 10.0,
                legit_rate: 0.0,
                attack: AttackTiming::None,
            },
        ],
        noise_scale: 1.0,
    }
}

/// 30-minute attack run: legitimate load through the 1780 s active window,
/// overlaid with attack phases starting on 600 s boundaries — every 300 ms,
/// every 250 ms, then the attacker's maximum rate. The third phase is cut
/// short by the trailing idle gap.
pub fn attack_scenario() -> ScenarioSpec {
    ScenarioSpec {
        interval: DEFAULT_INTERVAL,
        segments: vec![
            SegmentSpec {
                duration_s: 10.0,
                legit_rate: 0.0,
                attack: AttackTiming::None,
            },
            SegmentSpec {
                duration_s: 600.0,
                legit_rate: DEFAULT_LEGIT_RATE,
                attack: AttackTiming::EveryMs(300),
            },
            SegmentSpec {
                duration_s: 600.0,
                legit_rate: DEFAULT_LEGIT_RATE,
                attack: AttackTiming::EveryMs(250),
            },
            SegmentSpec {
                duration_s: 580.0,
                legit_rate: DEFAULT_LEGIT_RATE,
                attack: AttackTiming::Max,
            },
            SegmentSpec {
                duration_s: 10.0,
                legit_rate: 0.0,
                attack: AttackTiming::None,
            },
        ],
        noise_scale: 1.0,
    }
}

const MIXED_SEGMENTS: usize = 12;
const MIXED_SEGMENT_S: f64 = 600.0;

/// 120-minute mixed run: twelve 10-minute segments whose kinds are drawn
/// uniformly from {legit-only, attack-only, legit+attack}, redrawn until each
/// kind appears at least twice. Attack segments use a cadence drawn uniformly
/// from {300 ms, 250 ms, max}. Deterministic in `seed`.
pub fn mixed_scenario(seed: u64) -> ScenarioSpec {
    let mut rng = Lcg64::new(seed);
    let kinds: Vec<u8> = loop {
        let draw: Vec<u8> = (0..MIXED_SEGMENTS)
            .map(|_| rng.next_below(3) as u8)
            .collect();
        let mut counts = [0usize; 3];
        for &k in &draw {
            counts[k as usize] += 1;
        }
        if counts.iter().all(|&c| c >= 2) {
            break draw;
        }
    };
    let timings = [
        AttackTiming::EveryMs(300),
        AttackTiming::EveryMs(250),
        AttackTiming::Max,
    ];
    let segments = kinds
        .iter()
        .map(|&kind| {
            let attack = if kind == 0 {
                AttackTiming::None
            } else {
                timings[rng.next_below(3) as usize]
            };
            SegmentSpec {
                duration_s: MIXED_SEGMENT_S,
                legit_rate: if kind == 1 { 0.0 } else { DEFAULT_LEGIT_RATE },
                attack,
            }
        })
        .collect();
    ScenarioSpec {
        interval: DEFAULT_INTERVAL,
        segments,
        noise_scale: 1.0,
    }
}

/// Synthesizes a labeled trace from a scenario under a load model.
///
/// Identical `(spec, model, seed)` triples yield bit-identical traces. A
/// sample is labeled `Attack` exactly when its interval lies in a segment
/// with attack traffic.
pub fn synthesize(spec: &ScenarioSpec, model: &LoadModel, seed: u64) -> Result<TelemetryTrace> {
    spec.validate()?;
    model.validate()?;
    let mut rng = Lcg64::new(seed);
    let dt = spec.interval;
    let n = spec.sample_count();

    // Per-sample segment lookup; segment boundaries align to the interval.
    let mut segment_of = Vec::with_capacity(n);
    for (si, seg) in spec.segments.iter().enumerate() {
        let steps = (seg.duration_s / dt).round() as usize;
        segment_of.extend(std::iter::repeat_n(si, steps));
    }
    debug_assert_eq!(segment_of.len(), n);

    let mut backlog = 0.0f64;
    let mut samples = Vec::with_capacity(n);
    #[allow(clippy::needless_range_loop)] // i is also the timestamp index
    for i in 0..n {
        let seg = &spec.segments[segment_of[i]];
        let attack_rate = seg.attack.rate(model);
        let legit = seg.legit_rate;

        if seg.attack.is_attack() {
            backlog += attack_rate * dt * model.mem_backlog_per_attack_pkt;
        } else {
            backlog *= model.mem_backlog_relax;
        }

        // One Gaussian per metric per sample, in canonical metric order.
        let mut noise = [0.0f64; 8];
        for slot in noise.iter_mut() {
            *slot = rng.next_gaussian() * spec.noise_scale;
        }

        let clamp = |v: f64, lo: f64, hi: f64| v.max(lo).min(hi);
        let sample = MetricSample {
            t: i as f64 * dt,
            cpu_util: clamp(
                model.cpu.base
                    + legit * model.cpu_per_request
                    + attack_rate * model.cpu_per_attack_pkt
                    + noise[0] * model.cpu.noise_sd,
                0.0,
                100.0,
            ),
            mem_used: clamp(
                model.mem.base + backlog + noise[1] * model.mem.noise_sd,
                0.0,
                1.0,
            ),
            disk_read_reqs: clamp(
                model.disk_read.base + noise[2] * model.disk_read.noise_sd,
                0.0,
                f64::INFINITY,
            ),
            disk_write_reqs: clamp(
                model.disk_write.base
                    + legit * dt * model.disk_writes_per_request
                    + attack_rate * dt * model.disk_writes_per_attack_pkt
                    + noise[3] * model.disk_write.noise_sd,
                0.0,
                f64::INFINITY,
            ),
            net_bytes_in: clamp(
                model.bytes_in.base
                    + legit * model.bytes_in_per_request
                    + attack_rate * model.bytes_in_per_attack_pkt
                    + noise[4] * model.bytes_in.noise_sd,
                0.0,
                f64::INFINITY,
            ),
            net_bytes_out: clamp(
                model.bytes_out.base
                    + legit * model.bytes_out_per_request
                    + attack_rate * model.bytes_out_per_attack_pkt
                    + noise[5] * model.bytes_out.noise_sd,
                0.0,
                f64::INFINITY,
            ),
            net_pkts_in: clamp(
                model.pkts_in.base
                    + legit * model.pkts_in_per_request
                    + attack_rate * model.pkts_in_per_attack_pkt
                    + noise[6] * model.pkts_in.noise_sd,
                0.0,
                f64::INFINITY,
            ),
            net_pkts_out: clamp(
                model.pkts_out.base
                    + legit * model.pkts_out_per_request
                    + attack_rate * model.pkts_out_per_attack_pkt
                    + noise[7] * model.pkts_out.noise_sd,
                0.0,
                f64::INFINITY,
            ),
            label: Some(if seg.attack.is_attack() {
                Label::Attack
            } else {
                Label::Benign
            }),
        };
        samples.push(sample);
    }
    TelemetryTrace::new(dt, samples)
}
