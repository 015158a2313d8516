//! Per-timestep emission session for host simulators.
//!
//! The host calls [`EmissionSession::step`] once per simulated second with the
//! vehicle's current speed. Acceleration is the difference to the previous
//! step; the session never resamples, so a fixed 1 s cadence is the caller's
//! responsibility. A session replaying N speeds produces exactly what
//! [`aggregate_cycle`](crate::model::aggregate_cycle) produces on the same
//! N-second cycle, because both drive the same [`Accumulator`].

use std::sync::Arc;

use thiserror::Error;

use crate::model::{
    AccelHistory, Accumulator, CycleResult, EmissionVector, KinematicSample, ModelError, OpMode, SourceType,
    UnknownSourceType, VehicleParams,
};
use crate::tables::TableSet;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SessionError {
    #[error("negative speed {0} m/s")]
    NegativeSpeed(f64),
    #[error("speed must be finite, got {0}")]
    InvalidSpeed(f64),
    #[error("session has not been stepped")]
    EmptySession,
    #[error(transparent)]
    UnknownSourceType(#[from] UnknownSourceType),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Output of one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutput {
    pub opmode: OpMode,
    pub vsp: f64,
    pub accel: f64,
    /// Amount emitted during this second.
    pub emissions: EmissionVector,
}

#[derive(Debug, Clone)]
pub struct EmissionSession {
    tables: Arc<TableSet>,
    acc: Accumulator,
    prev_speed: Option<f64>,
}

impl EmissionSession {
    pub fn new(source_type: SourceType, tables: Arc<TableSet>) -> Self {
        let params = *tables.params(source_type);
        EmissionSession { tables, acc: Accumulator::new(params), prev_speed: None }
    }

    /// Accepts `LDV`/`LDT` or the numeric selectors `1`/`2`.
    pub fn from_token(token: &str, tables: Arc<TableSet>) -> Result<Self, SessionError> {
        Ok(Self::new(token.parse()?, tables))
    }

    pub fn step(&mut self, speed: f64) -> Result<StepOutput, SessionError> {
        if !speed.is_finite() {
            return Err(SessionError::InvalidSpeed(speed));
        }
        if speed < 0.0 {
            return Err(SessionError::NegativeSpeed(speed));
        }
        let accel = self.prev_speed.map_or(0.0, |prev| speed - prev);
        let sample = KinematicSample::new(self.step_count() as i64, speed, accel);
        let record = self.acc.push(&sample, self.tables.rates())?;
        self.prev_speed = Some(speed);
        Ok(StepOutput { opmode: record.opmode, vsp: record.vsp, accel, emissions: record.emissions })
    }

    /// Cycle result over every step so far. The session stays usable.
    pub fn finalize(&self) -> Result<CycleResult, SessionError> {
        if self.step_count() == 0 {
            return Err(SessionError::EmptySession);
        }
        Ok(self.acc.result(self.tables.units())?)
    }

    pub fn step_count(&self) -> usize {
        self.acc.records().len()
    }

    pub fn running_totals(&self) -> EmissionVector {
        self.acc.totals()
    }

    /// Metres travelled so far.
    pub fn distance(&self) -> f64 {
        self.acc.distance()
    }

    pub fn prev_speed(&self) -> Option<f64> {
        self.prev_speed
    }

    pub fn accel_history(&self) -> &AccelHistory {
        self.acc.history()
    }

    pub fn params(&self) -> &VehicleParams {
        self.acc.params()
    }

    pub fn tables(&self) -> &Arc<TableSet> {
        &self.tables
    }
}
