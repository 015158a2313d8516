use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul};

use super::{ModelError, OpMode, SourceType, VehicleParams};

/// Output species, in column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Species {
    Energy,
    CO,
    HC,
    NOx,
    CO2,
}

impl Species {
    pub const ALL: [Species; 5] = [Species::Energy, Species::CO, Species::HC, Species::NOx, Species::CO2];

    /// Column name used in every CSV surface.
    pub fn column(self) -> &'static str {
        match self {
            Species::Energy => "energy",
            Species::CO => "CO",
            Species::HC => "HC",
            Species::NOx => "NOx",
            Species::CO2 => "CO2",
        }
    }

    pub fn from_column(name: &str) -> Option<Species> {
        Species::ALL.into_iter().find(|s| s.column() == name)
    }
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.column())
    }
}

/// One value per species. Used for hourly base rates, per-second emissions,
/// cycle totals and per-km factors; the unit depends on context.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EmissionVector {
    pub energy: f64,
    pub co: f64,
    pub hc: f64,
    pub nox: f64,
    pub co2: f64,
}

impl EmissionVector {
    pub const ZERO: EmissionVector = EmissionVector { energy: 0.0, co: 0.0, hc: 0.0, nox: 0.0, co2: 0.0 };

    pub fn new(energy: f64, co: f64, hc: f64, nox: f64, co2: f64) -> Self {
        EmissionVector { energy, co, hc, nox, co2 }
    }

    pub fn get(&self, species: Species) -> f64 {
        match species {
            Species::Energy => self.energy,
            Species::CO => self.co,
            Species::HC => self.hc,
            Species::NOx => self.nox,
            Species::CO2 => self.co2,
        }
    }

    pub fn set(&mut self, species: Species, value: f64) {
        let slot = match species {
            Species::Energy => &mut self.energy,
            Species::CO => &mut self.co,
            Species::HC => &mut self.hc,
            Species::NOx => &mut self.nox,
            Species::CO2 => &mut self.co2,
        };
        *slot = value;
    }

    pub fn values(&self) -> [f64; 5] {
        [self.energy, self.co, self.hc, self.nox, self.co2]
    }

    pub fn map(self, f: impl Fn(f64) -> f64) -> Self {
        EmissionVector { energy: f(self.energy), co: f(self.co), hc: f(self.hc), nox: f(self.nox), co2: f(self.co2) }
    }
}

impl Add for EmissionVector {
    type Output = EmissionVector;

    fn add(self, rhs: Self) -> Self {
        EmissionVector {
            energy: self.energy + rhs.energy,
            co: self.co + rhs.co,
            hc: self.hc + rhs.hc,
            nox: self.nox + rhs.nox,
            co2: self.co2 + rhs.co2,
        }
    }
}

impl AddAssign for EmissionVector {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Mul<f64> for EmissionVector {
    type Output = EmissionVector;

    fn mul(self, k: f64) -> Self {
        self.map(|v| v * k)
    }
}

impl Div<f64> for EmissionVector {
    type Output = EmissionVector;

    fn div(self, k: f64) -> Self {
        self.map(|v| v / k)
    }
}

/// What the energy column measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnergyUnit {
    #[default]
    KiloJoules,
    FuelGrams,
}

impl EnergyUnit {
    /// Unit of an amount (per-second value or total).
    pub fn amount(self) -> &'static str {
        match self {
            EnergyUnit::KiloJoules => "kJ",
            EnergyUnit::FuelGrams => "g",
        }
    }

    /// Unit of an hourly base rate.
    pub fn rate_token(self) -> &'static str {
        match self {
            EnergyUnit::KiloJoules => "kJ/h",
            EnergyUnit::FuelGrams => "g/h",
        }
    }
}

/// Units of the rate columns. Pollutants are always grams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RateUnits {
    pub energy: EnergyUnit,
}

impl RateUnits {
    pub fn amount(&self, species: Species) -> &'static str {
        match species {
            Species::Energy => self.energy.amount(),
            _ => "g",
        }
    }
}

/// Hourly base rates keyed by (source type, operating mode).
///
/// Completeness is checked by the table loader, not here; a hand-built table
/// can still miss entries, which [`RateTable::lookup`] reports.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RateTable {
    entries: BTreeMap<(SourceType, OpMode), EmissionVector>,
    units: RateUnits,
}

impl RateTable {
    pub fn from_entries(
        entries: impl IntoIterator<Item = ((SourceType, OpMode), EmissionVector)>,
        units: RateUnits,
    ) -> Self {
        RateTable { entries: entries.into_iter().collect(), units }
    }

    pub fn lookup(&self, source_type: SourceType, mode: OpMode) -> Result<&EmissionVector, ModelError> {
        self.entries.get(&(source_type, mode)).ok_or(ModelError::MissingEntry { source_type, opmode: mode })
    }

    pub fn units(&self) -> RateUnits {
        self.units
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(SourceType, OpMode), &EmissionVector)> {
        self.entries.iter()
    }

    /// Every rate multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> RateTable {
        RateTable { entries: self.entries.iter().map(|(k, v)| (*k, *v * factor)).collect(), units: self.units }
    }
}

/// Base rate for `mode` and the vehicle's source type. No interpolation.
pub fn lookup_rate(mode: OpMode, params: &VehicleParams, rates: &RateTable) -> Result<EmissionVector, ModelError> {
    rates.lookup(params.source_type, mode).copied()
}

/// Converts an hourly rate to the amount emitted in one second.
pub fn per_second_emissions(rate: &EmissionVector) -> EmissionVector {
    *rate / 3600.0
}
