//! Second-by-second fuel and emission estimates from vehicle speed traces.
//!
//! The pipeline runs speed → acceleration → vehicle specific power →
//! operating mode → base-rate lookup, then sums per-second amounts into cycle
//! totals (ER) and per-km factors (EF). [`model`] holds the pure computation,
//! [`tables`] the coefficient and rate tables, [`cycle_io`] trace ingestion,
//! [`session`] the per-timestep interface for simulators, and [`corridor`] a
//! small signal-approach comparison built on top.

pub mod cli;
pub mod corridor;
pub mod cycle_io;
pub mod model;
pub mod session;
pub mod tables;

pub use model::{
    aggregate_cycle, classify_opmode, compute_vsp, derive_acceleration, lookup_rate, per_second_emissions, CycleResult,
    DriveCycle, EmissionFactors, EmissionVector, KinematicSample, OpMode, SourceType, VehicleParams,
};
pub use session::{EmissionSession, SessionError, StepOutput};
pub use tables::{load_table_set, validate_table_set, TableError, TableSet};
