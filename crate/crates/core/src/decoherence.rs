//! Position-decoherence rates.
//!
//! The off-diagonal elements of ρ in position representation decay as
//! `d⟨x|ρ|x'⟩/dt = -Γ(x - x')⟨x|ρ|x'⟩` (Hamiltonian part dropped). Each
//! environmental channel is summarised by a [`RatePair`]: the
//! long-wavelength diffusion coefficient Λ (Γ ≈ ΛΔx²) and the
//! short-wavelength saturation rate γ (Γ ≈ γ). The two limits are joined by
//! `Γ(Δx) = γ[1 - exp(-ΛΔx²/γ)]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::constants::{PhysicalConstants, FACTORIAL_8, ZETA_9};
use crate::{Error, Result};

/// Decoherence channel.
///
/// Scattering and absorption see the external (environment) temperature;
/// emission sees the internal temperature of the particle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Collisions,
    BlackbodyScattering,
    BlackbodyAbsorption,
    BlackbodyEmission,
}

impl Channel {
    pub const ALL: [Channel; 4] = [
        Channel::Collisions,
        Channel::BlackbodyScattering,
        Channel::BlackbodyAbsorption,
        Channel::BlackbodyEmission,
    ];

    /// Temperature the channel depends on, if any.
    pub fn temperature(&self, params: &ChannelParams) -> Option<f64> {
        match self {
            Channel::Collisions => None,
            Channel::BlackbodyScattering | Channel::BlackbodyAbsorption => {
                Some(params.temperature_external)
            }
            Channel::BlackbodyEmission => Some(params.temperature_internal),
        }
    }
}

/// Physical inputs for a decoherence channel, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Residual gas pressure (Pa).
    pub pressure: f64,
    /// Mass of a gas particle (kg).
    pub gas_particle_mass: f64,
    /// Mean thermal velocity of the gas (m/s).
    pub mean_velocity: f64,
    /// Radius of the system; its linear size is 2R (m).
    pub radius: f64,
    /// Internal temperature of the particle (K).
    pub temperature_internal: f64,
    /// Temperature of the environment (K).
    pub temperature_external: f64,
    /// Relative dielectric constant.
    pub dielectric: Complex64,
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        let checks: [(bool, &str); 6] = [
            (self.pressure >= 0.0 && self.pressure.is_finite(), "pressure must satisfy P ≥ 0"),
            (
                self.gas_particle_mass > 0.0 && self.gas_particle_mass.is_finite(),
                "gas particle mass must satisfy m_p > 0",
            ),
            (
                self.mean_velocity > 0.0 && self.mean_velocity.is_finite(),
                "mean velocity must satisfy v̄ > 0",
            ),
            (self.radius > 0.0 && self.radius.is_finite(), "radius must satisfy R > 0"),
            (
                self.temperature_internal >= 0.0 && self.temperature_internal.is_finite(),
                "internal temperature must satisfy T_i ≥ 0",
            ),
            (
                self.temperature_external >= 0.0 && self.temperature_external.is_finite(),
                "external temperature must satisfy T_e ≥ 0",
            ),
        ];
        for (ok, msg) in checks {
            if !ok {
                return Err(Error::domain(msg));
            }
        }
        let f = self.clausius_mossotti();
        if !(f.re.is_finite() && f.im.is_finite()) {
            return Err(Error::domain("dielectric constant must satisfy ε ≠ -2"));
        }
        Ok(())
    }

    /// (ε - 1)/(ε + 2).
    pub fn clausius_mossotti(&self) -> Complex64 {
        (self.dielectric - 1.0) / (self.dielectric + 2.0)
    }
}

/// Long-wavelength diffusion coefficient Λ (m⁻² s⁻¹) and short-wavelength
/// saturation rate γ (s⁻¹).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePair {
    pub lambda: f64,
    pub gamma: f64,
}

impl RatePair {
    pub fn new(lambda: f64, gamma: f64) -> Result<Self> {
        let r = RatePair { lambda, gamma };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::domain("rate pair requires Λ ≥ 0"));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::domain("rate pair requires γ ≥ 0"));
        }
        Ok(())
    }

    /// Sum of independent channels. Γ values do not add exactly under the
    /// interpolation, but both asymptotes do.
    pub fn combine(&self, other: &RatePair) -> RatePair {
        RatePair { lambda: self.lambda + other.lambda, gamma: self.gamma + other.gamma }
    }
}

/// Evaluate the closed-form (Λ, γ) of a channel.
pub fn channel_rates(channel: Channel, params: &ChannelParams) -> Result<RatePair> {
    channel_rates_with(channel, params, &PhysicalConstants::CODATA)
}

pub fn channel_rates_with(
    channel: Channel,
    params: &ChannelParams,
    k: &PhysicalConstants,
) -> Result<RatePair> {
    params.validate()?;
    let r = params.radius;
    let rates = match channel {
        Channel::Collisions => {
            let p = params.pressure;
            let m = params.gas_particle_mass;
            let v = params.mean_velocity;
            let root_2pi = (2.0 * PI).sqrt();
            let root_3 = 3f64.sqrt();
            RatePair {
                lambda: 8.0 * root_2pi * m * v * p * r * r / (3.0 * root_3 * k.hbar * k.hbar),
                gamma: 16.0 * PI * root_2pi * p * r * r / (root_3 * v * m),
            }
        }
        Channel::BlackbodyScattering => {
            let re = params.clausius_mossotti().re;
            let x = k.thermal_wavenumber(params.temperature_external);
            let common = FACTORIAL_8 * 8.0 * ZETA_9 * r.powi(6) * k.c * re * re;
            RatePair {
                lambda: common / (9.0 * PI) * x.powi(9),
                gamma: common * PI.cbrt() / 9.0 * x.powi(7),
            }
        }
        Channel::BlackbodyAbsorption | Channel::BlackbodyEmission => {
            let im = params.clausius_mossotti().im;
            if im < 0.0 {
                return Err(Error::domain(
                    "absorption/emission requires Im((ε-1)/(ε+2)) ≥ 0",
                ));
            }
            let t = channel.temperature(params).unwrap_or_default();
            let x = k.thermal_wavenumber(t);
            let common = 16.0 * r.powi(3) * k.c * im / 189.0;
            RatePair {
                lambda: common * PI.powi(5) * x.powi(6),
                // π⁶·π^{1/3} is kept as tabulated.
                gamma: common * PI.powi(6) * PI.cbrt() * x.powi(4),
            }
        }
    };
    Ok(rates)
}

/// Γ(Δx) = γ[1 - exp(-ΛΔx²/γ)].
pub fn gamma_of_separation(rates: &RatePair, separation: f64) -> Result<f64> {
    rates.validate()?;
    if !(separation >= 0.0) {
        return Err(Error::domain("separation must satisfy Δx ≥ 0"));
    }
    if rates.gamma == 0.0 || rates.lambda == 0.0 {
        return Ok(0.0);
    }
    let exponent = rates.lambda * separation * separation / rates.gamma;
    // -expm1 keeps the quadratic regime accurate for tiny exponents.
    Ok(-rates.gamma * (-exponent).exp_m1())
}

/// Suppression factor exp(-Γ(Δx) t) of ⟨x|ρ|x'⟩ after time t.
pub fn coherence_decay(rates: &RatePair, separation: f64, time: f64) -> Result<f64> {
    if !(time >= 0.0) {
        return Err(Error::domain("time must satisfy t ≥ 0"));
    }
    Ok((-gamma_of_separation(rates, separation)? * time).exp())
}

/// Separation √(γ/Λ) where the two asymptotes ΛΔx² and γ meet.
pub fn crossover_length(rates: &RatePair) -> Result<f64> {
    rates.validate()?;
    if rates.lambda == 0.0 || rates.gamma == 0.0 {
        return Err(Error::domain("no crossover: Λ and γ must both be positive"));
    }
    Ok((rates.gamma / rates.lambda).sqrt())
}
