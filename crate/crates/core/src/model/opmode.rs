use std::fmt;

use super::{KinematicSample, MPS_PER_MPH};

/// Running-exhaust operating mode identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpMode(u8);

impl OpMode {
    pub const BRAKING: OpMode = OpMode(0);
    pub const IDLE: OpMode = OpMode(1);

    /// Every valid mode, ascending.
    pub const ALL: [OpMode; 23] = [
        OpMode(0),
        OpMode(1),
        OpMode(11),
        OpMode(12),
        OpMode(13),
        OpMode(14),
        OpMode(15),
        OpMode(16),
        OpMode(21),
        OpMode(22),
        OpMode(23),
        OpMode(24),
        OpMode(25),
        OpMode(27),
        OpMode(28),
        OpMode(29),
        OpMode(30),
        OpMode(33),
        OpMode(35),
        OpMode(37),
        OpMode(38),
        OpMode(39),
        OpMode(40),
    ];

    pub fn new(id: u8) -> Option<OpMode> {
        Self::ALL.binary_search(&OpMode(id)).ok().map(|_| OpMode(id))
    }

    pub fn id(self) -> u8 {
        self.0
    }

    /// Position in [`OpMode::ALL`].
    pub fn index(self) -> usize {
        Self::ALL.binary_search(&self).expect("OpMode is always valid")
    }

    pub fn is_coasting(self) -> bool {
        self.0 == 11 || self.0 == 21
    }
}

impl fmt::Display for OpMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Speed classes of the running bins, bounds in mph, `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpeedClass {
    /// 1 to 25 mph
    Low,
    /// 25 to 50 mph
    Moderate,
    /// 50 mph and up
    High,
}

/// Upper bound of the idle band, mph (exclusive).
pub const IDLE_MAX_MPH: f64 = 1.0;
const LOW_MAX_MPH: f64 = 25.0;
const MODERATE_MAX_MPH: f64 = 50.0;

/// Single-second deceleration that counts as braking, mph/s (inclusive).
pub const HARD_BRAKE_MPHPS: f64 = -2.0;
/// Deceleration that counts as braking when sustained for three seconds, mph/s (exclusive).
pub const SUSTAINED_BRAKE_MPHPS: f64 = -1.0;

impl SpeedClass {
    /// Class for a non-idle speed in m/s.
    pub fn of(speed: f64) -> SpeedClass {
        if speed < LOW_MAX_MPH * MPS_PER_MPH {
            SpeedClass::Low
        } else if speed < MODERATE_MAX_MPH * MPS_PER_MPH {
            SpeedClass::Moderate
        } else {
            SpeedClass::High
        }
    }
}

/// One cell of the running-mode grid: a speed class and a VSP interval
/// `[vsp_lo, vsp_hi)` in kW/t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinCell {
    pub speed_class: SpeedClass,
    pub vsp_lo: f64,
    pub vsp_hi: f64,
    pub mode: OpMode,
}

const fn cell(speed_class: SpeedClass, vsp_lo: f64, vsp_hi: f64, mode: u8) -> BinCell {
    BinCell { speed_class, vsp_lo, vsp_hi, mode: OpMode(mode) }
}

const NEG: f64 = f64::NEG_INFINITY;
const POS: f64 = f64::INFINITY;

/// The running-mode grid, ordered by speed class then ascending VSP.
pub const BIN_CELLS: [BinCell; 21] = [
    cell(SpeedClass::Low, NEG, 0.0, 11),
    cell(SpeedClass::Low, 0.0, 3.0, 12),
    cell(SpeedClass::Low, 3.0, 6.0, 13),
    cell(SpeedClass::Low, 6.0, 9.0, 14),
    cell(SpeedClass::Low, 9.0, 12.0, 15),
    cell(SpeedClass::Low, 12.0, POS, 16),
    cell(SpeedClass::Moderate, NEG, 0.0, 21),
    cell(SpeedClass::Moderate, 0.0, 3.0, 22),
    cell(SpeedClass::Moderate, 3.0, 6.0, 23),
    cell(SpeedClass::Moderate, 6.0, 9.0, 24),
    cell(SpeedClass::Moderate, 9.0, 12.0, 25),
    cell(SpeedClass::Moderate, 12.0, 18.0, 27),
    cell(SpeedClass::Moderate, 18.0, 24.0, 28),
    cell(SpeedClass::Moderate, 24.0, 30.0, 29),
    cell(SpeedClass::Moderate, 30.0, POS, 30),
    cell(SpeedClass::High, NEG, 6.0, 33),
    cell(SpeedClass::High, 6.0, 12.0, 35),
    cell(SpeedClass::High, 12.0, 18.0, 37),
    cell(SpeedClass::High, 18.0, 24.0, 38),
    cell(SpeedClass::High, 24.0, 30.0, 39),
    cell(SpeedClass::High, 30.0, POS, 40),
];

/// The two accelerations (m/s²) preceding the current second, newest first.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AccelHistory {
    pub prev: Option<f64>,
    pub prev2: Option<f64>,
}

impl AccelHistory {
    pub fn push(&mut self, accel: f64) {
        self.prev2 = self.prev;
        self.prev = Some(accel);
    }

    fn sustained_brake(&self, accel: f64) -> bool {
        let limit = SUSTAINED_BRAKE_MPHPS * MPS_PER_MPH;
        let below = |a: Option<f64>| a.is_some_and(|a| a < limit);
        accel < limit && below(self.prev) && below(self.prev2)
    }
}

/// Maps one second of driving to its operating mode.
///
/// Precedence: braking, then idle, then the (speed class, VSP) grid cell.
/// Thresholds are stated in mph and compared after conversion to m/s.
/// Total over every input: non-finite values fall through to some cell.
pub fn classify_opmode(sample: &KinematicSample, history: &AccelHistory, vsp: f64) -> OpMode {
    if sample.accel <= HARD_BRAKE_MPHPS * MPS_PER_MPH || history.sustained_brake(sample.accel) {
        return OpMode::BRAKING;
    }
    if sample.speed < IDLE_MAX_MPH * MPS_PER_MPH {
        return OpMode::IDLE;
    }
    running_mode(SpeedClass::of(sample.speed), vsp)
}

fn running_mode(class: SpeedClass, vsp: f64) -> OpMode {
    let mut last = OpMode::IDLE;
    for c in BIN_CELLS.iter().filter(|c| c.speed_class == class) {
        if vsp < c.vsp_hi {
            return c.mode;
        }
        last = c.mode;
    }
    // only NaN gets here
    last
}
