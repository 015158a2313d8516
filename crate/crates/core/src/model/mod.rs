//! The emission pipeline: speed, acceleration, VSP, operating mode, base rate,
//! and cycle aggregation. Everything here is pure; file handling lives in
//! [`crate::tables`] and [`crate::cycle_io`].

mod aggregate;
mod cycle;
mod emissions;
mod opmode;
mod vsp;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use aggregate::{aggregate_cycle, Accumulator, CycleResult, EmissionFactors, SecondRecord};
pub use cycle::{derive_acceleration, DriveCycle, KinematicSample, SpeedUnit};
pub use emissions::{lookup_rate, per_second_emissions, EmissionVector, EnergyUnit, RateTable, RateUnits, Species};
pub use opmode::{classify_opmode, AccelHistory, OpMode, SpeedClass, BIN_CELLS};
pub use vsp::{compute_vsp, GRAVITY};

/// Metres per second in one mile per hour.
pub const MPS_PER_MPH: f64 = 0.44704;

/// Metres per second in one kilometre per hour.
pub const MPS_PER_KPH: f64 = 1.0 / 3.6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("drive cycle is empty")]
    EmptyCycle,
    #[error("negative speed {speed} m/s at t={t}")]
    NegativeSpeed { t: i64, speed: f64 },
    #[error("invalid sample at t={t}: {reason}")]
    InvalidSample { t: i64, reason: String },
    #[error("timestamps must advance by exactly 1 s (t={prev} followed by t={next})")]
    NonUniformTime { prev: i64, next: i64 },
    #[error("no base rate for ({source_type}, opmode {opmode})")]
    MissingEntry { source_type: SourceType, opmode: OpMode },
    #[error("no vehicle parameters for source type {0}")]
    MissingParams(SourceType),
}

/// Vehicle categories with shipped coefficients and base rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SourceType {
    LightDutyVehicle,
    LightDutyTruck,
}

impl SourceType {
    pub const ALL: [SourceType; 2] = [SourceType::LightDutyVehicle, SourceType::LightDutyTruck];

    /// Token used in the table files.
    pub fn code(self) -> &'static str {
        match self {
            SourceType::LightDutyVehicle => "LDV",
            SourceType::LightDutyTruck => "LDT",
        }
    }

    /// Numeric vehicle-type selector: 1 for light-duty vehicle, 2 for light-duty truck.
    pub fn from_veh_type(veh: i64) -> Option<SourceType> {
        match veh {
            1 => Some(SourceType::LightDutyVehicle),
            2 => Some(SourceType::LightDutyTruck),
            _ => None,
        }
    }

    pub fn veh_type(self) -> i32 {
        match self {
            SourceType::LightDutyVehicle => 1,
            SourceType::LightDutyTruck => 2,
        }
    }
}

impl fmt::Display for SourceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown source type {0:?} (expected LDV, LDT, 1 or 2)")]
pub struct UnknownSourceType(pub String);

impl FromStr for SourceType {
    type Err = UnknownSourceType;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "LDV" | "1" => Ok(SourceType::LightDutyVehicle),
            "LDT" | "2" => Ok(SourceType::LightDutyTruck),
            other => Err(UnknownSourceType(other.to_string())),
        }
    }
}

/// Road-load coefficients for one source type.
///
/// `rolling` (A) is in kW·s/m, `rotating` (B) in kW·s²/m², `drag` (C) in
/// kW·s³/m³; `mass` (M) and `fixed_mass_factor` (f) are metric tons, so VSP
/// comes out in kW per metric ton.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleParams {
    pub source_type: SourceType,
    pub rolling: f64,
    pub rotating: f64,
    pub drag: f64,
    pub mass: f64,
    pub fixed_mass_factor: f64,
}

impl VehicleParams {
    /// Lists every broken invariant as `(field, value)`.
    pub fn violations(&self) -> Vec<(&'static str, f64)> {
        let mut out = Vec::new();
        for (name, value) in [("A", self.rolling), ("B", self.rotating), ("C", self.drag)] {
            if !(value >= 0.0 && value.is_finite()) {
                out.push((name, value));
            }
        }
        for (name, value) in [("M", self.mass), ("f", self.fixed_mass_factor)] {
            if !(value > 0.0 && value.is_finite()) {
                out.push((name, value));
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.violations().is_empty()
    }
}
