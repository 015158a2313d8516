use std::fmt;
use std::str::FromStr;

use super::{ModelError, MPS_PER_KPH, MPS_PER_MPH};

/// One second of vehicle state. Speed is m/s, acceleration m/s², grade is the
/// road angle in radians (zero unless the caller supplies it).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicSample {
    pub t: i64,
    pub speed: f64,
    pub accel: f64,
    pub grade: f64,
}

impl KinematicSample {
    pub fn new(t: i64, speed: f64, accel: f64) -> Self {
        KinematicSample { t, speed, accel, grade: 0.0 }
    }
}

/// Unit a speed trace was recorded in. Everything downstream of ingestion is m/s.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpeedUnit {
    #[default]
    MetersPerSecond,
    MilesPerHour,
    KilometersPerHour,
}

impl SpeedUnit {
    pub fn token(self) -> &'static str {
        match self {
            SpeedUnit::MetersPerSecond => "m/s",
            SpeedUnit::MilesPerHour => "mph",
            SpeedUnit::KilometersPerHour => "km/h",
        }
    }

    fn mps_per_unit(self) -> f64 {
        match self {
            SpeedUnit::MetersPerSecond => 1.0,
            SpeedUnit::MilesPerHour => MPS_PER_MPH,
            SpeedUnit::KilometersPerHour => MPS_PER_KPH,
        }
    }

    pub fn to_mps(self, value: f64) -> f64 {
        match self {
            SpeedUnit::MetersPerSecond => value,
            _ => value * self.mps_per_unit(),
        }
    }

    pub fn from_mps(self, value: f64) -> f64 {
        match self {
            SpeedUnit::MetersPerSecond => value,
            _ => value / self.mps_per_unit(),
        }
    }
}

impl fmt::Display for SpeedUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for SpeedUnit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "m/s" | "mps" => Ok(SpeedUnit::MetersPerSecond),
            "mph" => Ok(SpeedUnit::MilesPerHour),
            "km/h" | "kph" => Ok(SpeedUnit::KilometersPerHour),
            other => Err(format!("unknown speed unit {other:?} (expected m/s, mph or km/h)")),
        }
    }
}

/// Forward difference at 1 Hz: `a[0] = 0`, `a[t] = v[t] - v[t-1]`.
pub fn derive_acceleration(speeds: &[f64]) -> Result<Vec<f64>, ModelError> {
    if speeds.is_empty() {
        return Err(ModelError::EmptyCycle);
    }
    if let Some((i, &v)) = speeds.iter().enumerate().find(|(_, v)| v.is_nan() || **v < 0.0) {
        return Err(if v.is_nan() {
            ModelError::InvalidSample { t: i as i64, reason: "speed is NaN".into() }
        } else {
            ModelError::NegativeSpeed { t: i as i64, speed: v }
        });
    }
    let mut accel = Vec::with_capacity(speeds.len());
    accel.push(0.0);
    accel.extend(speeds.windows(2).map(|w| w[1] - w[0]));
    Ok(accel)
}

/// A validated 1 Hz trace: non-empty, timestamps advancing by exactly one
/// second, speeds finite and non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveCycle {
    samples: Vec<KinematicSample>,
    speed_unit_of_origin: SpeedUnit,
}

impl DriveCycle {
    pub fn new(samples: Vec<KinematicSample>, speed_unit_of_origin: SpeedUnit) -> Result<Self, ModelError> {
        if samples.is_empty() {
            return Err(ModelError::EmptyCycle);
        }
        for s in &samples {
            if !s.speed.is_finite() || !s.accel.is_finite() || !s.grade.is_finite() {
                return Err(ModelError::InvalidSample { t: s.t, reason: "non-finite value".into() });
            }
            if s.speed < 0.0 {
                return Err(ModelError::NegativeSpeed { t: s.t, speed: s.speed });
            }
        }
        for w in samples.windows(2) {
            if w[1].t != w[0].t + 1 {
                return Err(ModelError::NonUniformTime { prev: w[0].t, next: w[1].t });
            }
        }
        Ok(DriveCycle { samples, speed_unit_of_origin })
    }

    /// Builds a zero-grade cycle starting at t=0 from m/s speeds, deriving accelerations.
    pub fn from_speeds(speeds: &[f64]) -> Result<Self, ModelError> {
        Self::from_speeds_at(0, speeds, SpeedUnit::MetersPerSecond)
    }

    pub fn from_speeds_at(start: i64, speeds: &[f64], origin: SpeedUnit) -> Result<Self, ModelError> {
        let accel = derive_acceleration(speeds)?;
        let samples = speeds
            .iter()
            .zip(accel)
            .enumerate()
            .map(|(i, (&v, a))| KinematicSample::new(start + i as i64, v, a))
            .collect();
        Self::new(samples, origin)
    }

    pub fn samples(&self) -> &[KinematicSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn speeds(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.speed).collect()
    }

    pub fn speed_unit_of_origin(&self) -> SpeedUnit {
        self.speed_unit_of_origin
    }

    /// Rectangle-rule distance, Σ v·1 s, in metres.
    pub fn distance(&self) -> f64 {
        self.samples.iter().fold(0.0, |d, s| d + s.speed)
    }
}
