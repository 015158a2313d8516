use super::{KinematicSample, ModelError, VehicleParams};

/// Gravitational acceleration used in the grade term, m/s².
pub const GRAVITY: f64 = 9.8;

/// Vehicle specific power in kW per metric ton:
/// `(A·v + B·v² + C·v³ + M·(a + g·sin θ)·v) / f`.
pub fn compute_vsp(sample: &KinematicSample, params: &VehicleParams) -> Result<f64, ModelError> {
    let KinematicSample { t, speed: v, accel: a, grade } = *sample;
    if !v.is_finite() || !a.is_finite() || !grade.is_finite() {
        return Err(ModelError::InvalidSample { t, reason: "non-finite value".into() });
    }
    if v < 0.0 {
        return Err(ModelError::NegativeSpeed { t, speed: v });
    }
    let road_load = params.rolling * v + params.rotating * v * v + params.drag * v * v * v;
    let inertial = params.mass * (a + GRAVITY * grade.sin()) * v;
    Ok((road_load + inertial) / params.fixed_mass_factor)
}
