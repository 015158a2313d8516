//! Speed-trace ingestion and conversion to the 1 Hz cadence the model needs.
//!
//! Two text layouts are accepted, both with `#` comments:
//! - `t,v` rows (optional `t,v` header), timestamps in seconds, possibly sub-second;
//! - one speed per line, implicitly at t = 0, 1, 2, …

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::model::{DriveCycle, ModelError, SpeedUnit};

/// Longest run of empty one-second windows that is filled by interpolation.
pub const MAX_GAP_SECONDS: usize = 5;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: negative speed {speed}")]
    NegativeSpeed { line: usize, speed: f64 },
    #[error("line {line}: time {next} is earlier than previous time {prev}")]
    NonMonotonicTime { line: usize, prev: f64, next: f64 },
    #[error("trace has no samples")]
    EmptyTrace,
    #[error("no samples between t={from} and t={to} ({seconds} empty seconds, limit {MAX_GAP_SECONDS})")]
    GapTooLong { from: i64, to: i64, seconds: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Samples exactly as read: timestamps in seconds, speeds in `unit`.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTrace {
    pub samples: Vec<(f64, f64)>,
    pub unit: SpeedUnit,
}

impl RawTrace {
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Speeds converted to m/s, paired with their timestamps.
    pub fn samples_mps(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.samples.iter().map(|&(t, v)| (t, self.unit.to_mps(v)))
    }

    /// A 1 Hz m/s trace carrying the samples of `cycle`.
    pub fn from_cycle(cycle: &DriveCycle) -> RawTrace {
        RawTrace {
            samples: cycle.samples().iter().map(|s| (s.t as f64, s.speed)).collect(),
            unit: SpeedUnit::MetersPerSecond,
        }
    }
}

pub fn parse_trace(path: &Path, unit: SpeedUnit) -> Result<RawTrace, TraceError> {
    let text = std::fs::read_to_string(path).map_err(|source| TraceError::Io { path: path.to_path_buf(), source })?;
    parse_trace_str(&text, unit)
}

pub fn parse_trace_str(text: &str, unit: SpeedUnit) -> Result<RawTrace, TraceError> {
    let mut samples: Vec<(f64, f64)> = Vec::new();
    let mut columns: Option<usize> = None;
    let mut seen_header = false;
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw_line.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = content.split(',').map(str::trim).collect();
        if !seen_header && samples.is_empty() && fields == ["t", "v"] {
            seen_header = true;
            columns = Some(2);
            continue;
        }
        let width = *columns.get_or_insert(fields.len());
        if fields.len() != width || !(1..=2).contains(&width) {
            return Err(TraceError::Parse {
                line,
                message: format!("expected {width} field(s), found {}", fields.len()),
            });
        }
        let number = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| TraceError::Parse { line, message: format!("{s:?} is not a finite number") })
        };
        let (t, v) = if width == 2 {
            (number(fields[0])?, number(fields[1])?)
        } else {
            (samples.len() as f64, number(fields[0])?)
        };
        if v < 0.0 {
            return Err(TraceError::NegativeSpeed { line, speed: v });
        }
        if let Some(&(prev, _)) = samples.last() {
            if t < prev {
                return Err(TraceError::NonMonotonicTime { line, prev, next: t });
            }
        }
        samples.push((t, v));
    }
    Ok(RawTrace { samples, unit })
}

/// Averages all samples in each whole-second window `[t, t+1)`, fills short
/// runs of empty windows by linear interpolation between neighbouring window
/// means, and derives accelerations.
pub fn resample_to_1hz(raw: &RawTrace) -> Result<DriveCycle, TraceError> {
    let (first_t, _) = *raw.samples.first().ok_or(TraceError::EmptyTrace)?;
    let (last_t, _) = *raw.samples.last().unwrap();
    let start = first_t.floor() as i64;
    let windows = (last_t.floor() as i64 - start + 1) as usize;

    let mut sums = vec![0.0; windows];
    let mut counts = vec![0usize; windows];
    for (t, v) in raw.samples_mps() {
        let w = (t.floor() as i64 - start) as usize;
        sums[w] += v;
        counts[w] += 1;
    }

    let mut speeds = vec![0.0; windows];
    let mut last_filled: Option<usize> = None;
    for w in 0..windows {
        if counts[w] == 0 {
            continue;
        }
        speeds[w] = sums[w] / counts[w] as f64;
        if let Some(prev) = last_filled {
            let empty = w - prev - 1;
            if empty > MAX_GAP_SECONDS {
                return Err(TraceError::GapTooLong { from: start + prev as i64, to: start + w as i64, seconds: empty });
            }
            let span = (w - prev) as f64;
            for k in prev + 1..w {
                let frac = (k - prev) as f64 / span;
                speeds[k] = speeds[prev] + (speeds[w] - speeds[prev]) * frac;
            }
        }
        last_filled = Some(w);
    }

    Ok(DriveCycle::from_speeds_at(start, &speeds, raw.unit)?)
}

/// Serializes a cycle as `t,v` CSV in m/s. Values use the shortest exact
/// representation, so reading the file back reproduces the cycle.
pub fn write_cycle_csv(cycle: &DriveCycle) -> String {
    let mut out = String::from("# speed unit: m/s\nt,v\n");
    for s in cycle.samples() {
        writeln!(out, "{},{}", s.t, s.speed).unwrap();
    }
    out
}
