//! Physical constants in SI units (CODATA 2018, exact where defined).

/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant (J/K).
pub const K_B: f64 = 1.380_649e-23;

/// Speed of light in vacuum (m/s).
pub const C: f64 = 299_792_458.0;

/// Riemann ζ(9).
pub const ZETA_9: f64 = 1.002_008_392_826_082_2;

/// 8! = 40320.
pub const FACTORIAL_8: f64 = 40_320.0;

/// Constant bundle for callers that prefer passing values around.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub k_b: f64,
    pub c: f64,
}

impl PhysicalConstants {
    pub const CODATA: PhysicalConstants = PhysicalConstants { hbar: HBAR, k_b: K_B, c: C };

    /// Thermal wavenumber k_B T / (ħ c) in m⁻¹.
    pub fn thermal_wavenumber(&self, temperature: f64) -> f64 {
        self.k_b * temperature / (self.hbar * self.c)
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_are_positive() {
        let k = PhysicalConstants::default();
        assert!(k.hbar > 0.0 && k.k_b > 0.0 && k.c > 0.0);
    }

    #[test]
    fn factorial_matches_product() {
        assert_eq!((1..=8).product::<u32>() as f64, FACTORIAL_8);
    }
}
