//! Single-vehicle, single-signal demonstration: a stop-and-go approach versus
//! a glide that reaches the stop bar at green onset, both scored through the
//! emission pipeline.
//!
//! Both trajectories start at cruise speed `approach_distance` upstream of the
//! stop bar at t = 0 and end [`DEPARTURE_DISTANCE`] past it. Distance is the
//! rectangle rule Σ v·1 s; any overshoot of the target is removed by a gentle
//! taper over the last cruise seconds, so both cycles cover the same distance.

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{
    aggregate_cycle, CycleResult, DriveCycle, EmissionVector, ModelError, SourceType, Species, MPS_PER_MPH,
};
use crate::tables::TableSet;

/// Deceleration of the stop-and-go baseline, m/s².
pub const BASELINE_DECEL: f64 = 3.0;
/// Acceleration back to cruise for both trajectories, m/s².
pub const LAUNCH_ACCEL: f64 = 2.0;
/// Deceleration into the glide. Below the sustained-braking threshold
/// (1 mph/s), so the glide never registers as braking.
pub const GLIDE_DECEL: f64 = 0.4;
/// Slowest acceptable glide speed, m/s.
pub const GLIDE_FLOOR: f64 = 3.0;
/// Largest per-second speed drop used when trimming distance overshoot, m/s.
pub const TAPER_DECEL: f64 = 0.4;
/// Distance driven past the stop bar, m.
pub const DEPARTURE_DISTANCE: f64 = 600.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("infeasible scenario: {0}")]
    InfeasibleScenario(String),
    #[error("no glide speed of at least {GLIDE_FLOOR} m/s reaches the stop bar at green onset")]
    InfeasibleGlide,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalScenario {
    /// Metres from the starting point to the stop bar.
    pub approach_distance: f64,
    /// m/s
    pub cruise_speed: f64,
    /// Green duration, s.
    pub green: f64,
    /// Red duration, s.
    pub red: f64,
    /// Seconds into the signal cycle at t = 0; the cycle starts with green.
    pub offset: f64,
    pub vehicle: SourceType,
}

/// When the vehicle reaches the stop bar at cruise speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Arrival {
    Green,
    /// Arrives on red; the light turns green at `green_onset` seconds.
    Red {
        green_onset: f64,
    },
}

impl SignalScenario {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let positive = [("approach_distance", self.approach_distance), ("green", self.green), ("red", self.red)];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ScenarioError::InvalidScenario(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.offset >= 0.0 && self.offset.is_finite()) {
            return Err(ScenarioError::InvalidScenario(format!("offset must be >= 0, got {}", self.offset)));
        }
        if !(self.cruise_speed > MPS_PER_MPH && self.cruise_speed.is_finite()) {
            return Err(ScenarioError::InvalidScenario(format!(
                "cruise speed {} m/s is inside the idle band",
                self.cruise_speed
            )));
        }
        Ok(())
    }

    pub fn is_green_at(&self, t: f64) -> bool {
        (t + self.offset).rem_euclid(self.green + self.red) < self.green
    }

    pub fn arrival(&self) -> Arrival {
        let t_arrive = self.approach_distance / self.cruise_speed;
        if self.is_green_at(t_arrive) {
            Arrival::Green
        } else {
            let period = self.green + self.red;
            let phase = (t_arrive + self.offset).rem_euclid(period);
            Arrival::Red { green_onset: t_arrive + (period - phase) }
        }
    }

    fn total_distance(&self) -> f64 {
        self.approach_distance + DEPARTURE_DISTANCE
    }
}

struct Profile {
    cruise: f64,
    speeds: Vec<f64>,
    position: f64,
}

impl Profile {
    fn new(cruise: f64) -> Self {
        Profile { cruise, speeds: Vec::new(), position: 0.0 }
    }

    fn push(&mut self, v: f64) {
        self.speeds.push(v);
        self.position += v;
    }

    fn accelerate_from(&mut self, mut v: f64) {
        while v < self.cruise {
            v = (v + LAUNCH_ACCEL).min(self.cruise);
            self.push(v);
        }
    }

    /// Cruises until `target` is reached, then trims the overshoot off the
    /// trailing cruise seconds with a linear taper.
    fn finish(mut self, target: f64) -> Result<DriveCycle, ScenarioError> {
        while self.position < target {
            self.push(self.cruise);
        }
        let overshoot = self.position - target;
        if overshoot > 0.0 {
            let mut n = 1usize;
            while 2.0 * overshoot / (n * (n + 1)) as f64 > TAPER_DECEL {
                n += 1;
            }
            let trailing = self.speeds.iter().rev().take_while(|&&v| v == self.cruise).count();
            if trailing < n {
                return Err(ScenarioError::InfeasibleScenario(format!(
                    "departure leaves {trailing} cruise seconds, taper needs {n}"
                )));
            }
            let step = 2.0 * overshoot / (n * (n + 1)) as f64;
            let len = self.speeds.len();
            for (j, v) in self.speeds[len - n..].iter_mut().enumerate() {
                *v -= step * (j + 1) as f64;
            }
        }
        Ok(DriveCycle::from_speeds(&self.speeds)?)
    }
}

fn constant_speed(sc: &SignalScenario) -> Result<DriveCycle, ScenarioError> {
    let mut p = Profile::new(sc.cruise_speed);
    p.push(sc.cruise_speed);
    p.finish(sc.total_distance())
}

/// Conventional driving: cruise, brake hard to a stop on red, idle until
/// green, launch back to cruise.
pub fn gen_baseline_trajectory(sc: &SignalScenario) -> Result<DriveCycle, ScenarioError> {
    sc.validate()?;
    let green_onset = match sc.arrival() {
        Arrival::Green => return constant_speed(sc),
        Arrival::Red { green_onset } => green_onset,
    };
    let v_c = sc.cruise_speed;
    let mut braking = Vec::new();
    let mut v = v_c;
    while v > 0.0 {
        v = (v - BASELINE_DECEL).max(0.0);
        braking.push(v);
    }
    let braking_distance: f64 = braking.iter().sum();
    let cruise_seconds = ((sc.approach_distance - braking_distance) / v_c).floor();
    if cruise_seconds < 1.0 {
        return Err(ScenarioError::InfeasibleScenario(format!(
            "approach of {} m is too short to stop from {v_c} m/s",
            sc.approach_distance
        )));
    }

    let mut p = Profile::new(v_c);
    for _ in 0..cruise_seconds as usize {
        p.push(v_c);
    }
    for v in braking {
        p.push(v);
    }
    while (p.speeds.len() as f64) < green_onset {
        p.push(0.0);
    }
    p.accelerate_from(0.0);
    p.finish(sc.total_distance())
}

/// Glide speed reaching the stop bar exactly at `green_onset` after one
/// deceleration at [`GLIDE_DECEL`] from cruise, or `None` below the floor.
pub fn glide_speed(sc: &SignalScenario, green_onset: f64) -> Option<f64> {
    let v_c = sc.cruise_speed;
    // d = v_g·T + (v_c − v_g)²/(2b), solved for the speed drop.
    let disc = green_onset * green_onset - 2.0 * (v_c * green_onset - sc.approach_distance) / GLIDE_DECEL;
    if disc < 0.0 {
        return None;
    }
    let drop = GLIDE_DECEL * (green_onset - disc.sqrt());
    let v_g = v_c - drop;
    (v_g >= GLIDE_FLOOR).then_some(v_g)
}

/// Eco-approach: ease off once to a constant glide speed that reaches the stop
/// bar at green onset, then return to cruise. Identical to the baseline on a
/// green arrival.
pub fn gen_smoothed_trajectory(sc: &SignalScenario) -> Result<DriveCycle, ScenarioError> {
    sc.validate()?;
    let green_onset = match sc.arrival() {
        Arrival::Green => return constant_speed(sc),
        Arrival::Red { green_onset } => green_onset,
    };
    let v_g = glide_speed(sc, green_onset).ok_or(ScenarioError::InfeasibleGlide)?;
    let mut p = Profile::new(sc.cruise_speed);
    p.push(sc.cruise_speed);
    let mut v = sc.cruise_speed;
    while v > v_g {
        v = (v - GLIDE_DECEL).max(v_g);
        p.push(v);
    }
    while p.position < sc.approach_distance {
        p.push(v_g);
    }
    p.accelerate_from(v_g);
    p.finish(sc.total_distance())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlideOutcome {
    /// Arrived on green; nothing to smooth.
    NotNeeded,
    Smoothed,
    /// No feasible glide; the baseline was reused.
    Fallback,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub baseline: CycleResult,
    pub smoothed: CycleResult,
    pub glide: GlideOutcome,
}

impl ComparisonReport {
    /// (smoothed − baseline) / baseline for each species; 0 when both are 0.
    pub fn relative_change(&self) -> EmissionVector {
        let mut out = EmissionVector::ZERO;
        for s in Species::ALL {
            let b = self.baseline.totals.get(s);
            let m = self.smoothed.totals.get(s);
            out.set(s, if b == m { 0.0 } else { (m - b) / b });
        }
        out
    }

    /// CSV: one row per species with both totals and the percent change.
    pub fn to_csv(&self) -> String {
        let units = self.baseline.units;
        let rel = self.relative_change();
        let glide = match self.glide {
            GlideOutcome::NotNeeded => "not_needed",
            GlideOutcome::Smoothed => "smoothed",
            GlideOutcome::Fallback => "fallback_to_baseline",
        };
        let mut out = format!("# glide: {glide}\nspecies,unit,baseline,smoothed,delta_pct\n");
        for s in Species::ALL {
            writeln!(
                out,
                "{s},{},{:.6},{:.6},{:.4}",
                units.amount(s),
                self.baseline.totals.get(s),
                self.smoothed.totals.get(s),
                rel.get(s) * 100.0
            )
            .unwrap();
        }
        writeln!(out, "distance,m,{:.6},{:.6},0.0000", self.baseline.distance, self.smoothed.distance).unwrap();
        writeln!(
            out,
            "duration,s,{},{},{:.4}",
            self.baseline.per_second.len(),
            self.smoothed.per_second.len(),
            (self.smoothed.per_second.len() as f64 / self.baseline.per_second.len() as f64 - 1.0) * 100.0
        )
        .unwrap();
        out
    }
}

/// Scores both trajectories with the scenario's vehicle.
pub fn compare_scenarios(sc: &SignalScenario, tables: &TableSet) -> Result<ComparisonReport, ScenarioError> {
    let baseline_cycle = gen_baseline_trajectory(sc)?;
    let (smoothed_cycle, glide) = match gen_smoothed_trajectory(sc) {
        Ok(c) if sc.arrival() == Arrival::Green => (c, GlideOutcome::NotNeeded),
        Ok(c) => (c, GlideOutcome::Smoothed),
        Err(ScenarioError::InfeasibleGlide) => (baseline_cycle.clone(), GlideOutcome::Fallback),
        Err(e) => return Err(e),
    };
    let params = tables.params(sc.vehicle);
    Ok(ComparisonReport {
        baseline: aggregate_cycle(&baseline_cycle, params, tables.rates())?,
        smoothed: aggregate_cycle(&smoothed_cycle, params, tables.rates())?,
        glide,
    })
}
