use super::{
    classify_opmode, compute_vsp, lookup_rate, per_second_emissions, AccelHistory, DriveCycle, EmissionVector,
    KinematicSample, ModelError, OpMode, RateTable, RateUnits, VehicleParams,
};

/// Everything computed for one second of a cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondRecord {
    pub t: i64,
    pub speed: f64,
    pub accel: f64,
    pub vsp: f64,
    pub opmode: OpMode,
    /// Amount emitted during this second (rate / 3600).
    pub emissions: EmissionVector,
}

/// Per-km factors, or an explicit marker when the cycle covered no distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EmissionFactors {
    PerKm(EmissionVector),
    Undefined,
}

impl EmissionFactors {
    pub fn per_km(&self) -> Option<&EmissionVector> {
        match self {
            EmissionFactors::PerKm(v) => Some(v),
            EmissionFactors::Undefined => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleResult {
    pub per_second: Vec<SecondRecord>,
    /// Cycle totals (ER).
    pub totals: EmissionVector,
    /// Metres, Σ v·1 s.
    pub distance: f64,
    /// Totals per km travelled (EF).
    pub factors: EmissionFactors,
    pub units: RateUnits,
}

impl CycleResult {
    pub fn distance_km(&self) -> f64 {
        self.distance / 1000.0
    }

    pub fn opmodes(&self) -> Vec<OpMode> {
        self.per_second.iter().map(|r| r.opmode).collect()
    }
}

/// Running state shared by the batch and streaming paths, so both produce
/// bit-identical totals.
#[derive(Debug, Clone)]
pub struct Accumulator {
    params: VehicleParams,
    history: AccelHistory,
    per_second: Vec<SecondRecord>,
    totals: EmissionVector,
    distance: f64,
}

impl Accumulator {
    pub fn new(params: VehicleParams) -> Self {
        Accumulator {
            params,
            history: AccelHistory::default(),
            per_second: Vec::new(),
            totals: EmissionVector::ZERO,
            distance: 0.0,
        }
    }

    pub fn params(&self) -> &VehicleParams {
        &self.params
    }

    pub fn history(&self) -> &AccelHistory {
        &self.history
    }

    pub fn records(&self) -> &[SecondRecord] {
        &self.per_second
    }

    pub fn totals(&self) -> EmissionVector {
        self.totals
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    /// Processes one second. State is only touched once every step has succeeded.
    pub fn push(&mut self, sample: &KinematicSample, rates: &RateTable) -> Result<SecondRecord, ModelError> {
        let vsp = compute_vsp(sample, &self.params)?;
        let opmode = classify_opmode(sample, &self.history, vsp);
        let rate = lookup_rate(opmode, &self.params, rates)?;
        let record = SecondRecord {
            t: sample.t,
            speed: sample.speed,
            accel: sample.accel,
            vsp,
            opmode,
            emissions: per_second_emissions(&rate),
        };
        self.history.push(sample.accel);
        self.totals += record.emissions;
        self.distance += sample.speed;
        self.per_second.push(record);
        Ok(record)
    }

    pub fn result(&self, units: RateUnits) -> Result<CycleResult, ModelError> {
        if self.per_second.is_empty() {
            return Err(ModelError::EmptyCycle);
        }
        let factors = if self.distance > 0.0 {
            EmissionFactors::PerKm(self.totals / (self.distance / 1000.0))
        } else {
            EmissionFactors::Undefined
        };
        Ok(CycleResult {
            per_second: self.per_second.clone(),
            totals: self.totals,
            distance: self.distance,
            factors,
            units,
        })
    }
}

/// Runs every second of `cycle` through the pipeline and aggregates ER and EF.
pub fn aggregate_cycle(
    cycle: &DriveCycle,
    params: &VehicleParams,
    rates: &RateTable,
) -> Result<CycleResult, ModelError> {
    let mut acc = Accumulator::new(*params);
    for sample in cycle.samples() {
        acc.push(sample, rates)?;
    }
    acc.result(rates.units())
}
