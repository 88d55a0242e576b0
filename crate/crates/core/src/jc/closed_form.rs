use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SidebandCooling {
    /// Final occupation n̄κγ/(4g²) + (κ/4ω_m)².
    pub occupation: f64,
    /// Red-sideband transfer rate g²/(κ/2).
    pub transfer_rate: f64,
    /// Thermal re-heating rate γn̄/2.
    pub heating_rate: f64,
    /// κ < ω_m; outside this regime the formula is not trustworthy.
    pub resolved_sideband: bool,
}

impl SidebandCooling {
    pub fn transfer_dominates(&self) -> bool {
        self.transfer_rate > self.heating_rate
    }
}

/// Steady-state occupation of a mechanical mode cooled through a lossy cavity.
///
/// `n_bar` is the bath occupation at ω_m, `kappa` the cavity linewidth,
/// `gamma` the mechanical damping and `g` the linearized coupling.
pub fn sideband_occupation(n_bar: f64, kappa: f64, gamma: f64, g: f64, omega_m: f64) -> Result<SidebandCooling> {
    if !(n_bar >= 0.0 && n_bar.is_finite()) {
        return Err(Error::domain("bath occupation must satisfy n̄ ≥ 0"));
    }
    for (name, v) in [("κ", kappa), ("γ", gamma), ("g", g), ("ω_m", omega_m)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::domain(format!("{name} must be positive")));
        }
    }
    let occupation = n_bar * kappa * gamma / (4.0 * g * g) + (kappa / (4.0 * omega_m)).powi(2);
    Ok(SidebandCooling {
        occupation,
        transfer_rate: g * g / (kappa / 2.0),
        heating_rate: gamma * n_bar / 2.0,
        resolved_sideband: kappa < omega_m,
    })
}

/// Centre-of-mass temperature Γ/(Γ + δΓ)·T under parametric feedback.
pub fn feedback_temperature(gamma: f64, delta_gamma: f64, temperature: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::domain("damping must satisfy Γ > 0"));
    }
    if !(delta_gamma >= 0.0) {
        return Err(Error::domain("feedback damping must satisfy δΓ ≥ 0"));
    }
    if !(temperature >= 0.0 && temperature.is_finite()) {
        return Err(Error::domain("temperature must satisfy T ≥ 0"));
    }
    if delta_gamma.is_infinite() {
        return Ok(0.0);
    }
    Ok(gamma / (gamma + delta_gamma) * temperature)
}
