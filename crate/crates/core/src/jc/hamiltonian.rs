use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Spin state of the two-level system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Ground,
    Excited,
}

impl Spin {
    fn offset(self) -> usize {
        match self {
            Spin::Ground => 0,
            Spin::Excited => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Spin::Ground => "g",
            Spin::Excited => "e",
        }
    }
}

/// Oscillator + two-level system, frequencies in rad/s with ħ = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JcParams {
    /// Oscillator frequency ω.
    pub omega: f64,
    /// Two-level Bohr frequency ω_A.
    pub omega_a: f64,
    /// Jaynes–Cummings coupling λ.
    pub lambda: f64,
    /// Duffing strength ε of the ε(a + a†)⁴ term.
    #[serde(default)]
    pub epsilon: f64,
    /// Highest Fock level kept.
    pub n_max: usize,
}

impl JcParams {
    /// Resonant parameters, ω_A = ω.
    pub fn resonant(omega: f64, lambda: f64, epsilon: f64, n_max: usize) -> Result<Self> {
        let p = JcParams { omega, omega_a: omega, lambda, epsilon, n_max };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |x: f64| x > 0.0 && x.is_finite();
        if !pos(self.omega) || !pos(self.omega_a) || !pos(self.lambda) {
            return Err(Error::domain("ω, ω_A and λ must be positive"));
        }
        if !(self.lambda < self.omega) {
            return Err(Error::domain("coupling must satisfy λ < ω"));
        }
        if !(self.epsilon >= 0.0 && self.epsilon < 0.1 * self.omega) {
            return Err(Error::domain("Duffing strength must satisfy 0 ≤ ε < 0.1ω"));
        }
        if self.n_max < 1 {
            return Err(Error::domain("Fock cutoff must satisfy n_max ≥ 1"));
        }
        Ok(())
    }

    pub fn fock_dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn dim(&self) -> usize {
        2 * self.fock_dim()
    }

    /// Row of |spin, n⟩ in the spin ⊗ Fock product basis.
    pub fn index(&self, spin: Spin, n: usize) -> usize {
        spin.offset() * self.fock_dim() + n
    }

    /// Resonant transfer time T_n = π/(2λ√(n+1)) taking |g,n+1⟩ to |e,n⟩.
    pub fn transfer_time(&self, n: usize) -> f64 {
        std::f64::consts::PI / (2.0 * self.lambda * ((n + 1) as f64).sqrt())
    }
}

/// Truncated annihilation operator on Fock levels 0..=n_max.
pub fn annihilation(n_max: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(n_max + 1, n_max + 1);
    for n in 1..=n_max {
        a[(n - 1, n)] = (n as f64).sqrt();
    }
    a
}

/// H = (ω_A/2)σ_z + ω a†a + λ(aσ⁺ + a†σ⁻) + ε(a + a†)⁴.
///
/// The quartic term is the fourth power of the truncated position operator,
/// so only the top two Fock levels carry truncation artifacts. All entries
/// are real; the matrix is symmetric by construction.
pub fn build_hamiltonian(p: &JcParams) -> Result<DMatrix<f64>> {
    p.validate()?;
    let f = p.fock_dim();
    let mut h = DMatrix::zeros(p.dim(), p.dim());
    for n in 0..f {
        let osc = p.omega * n as f64;
        h[(p.index(Spin::Ground, n), p.index(Spin::Ground, n))] = -0.5 * p.omega_a + osc;
        h[(p.index(Spin::Excited, n), p.index(Spin::Excited, n))] = 0.5 * p.omega_a + osc;
    }
    // aσ⁺ maps |g,n+1⟩ to √(n+1)|e,n⟩.
    for n in 0..p.n_max {
        let g = p.index(Spin::Ground, n + 1);
        let e = p.index(Spin::Excited, n);
        let c = p.lambda * ((n + 1) as f64).sqrt();
        h[(e, g)] = c;
        h[(g, e)] = c;
    }
    if p.epsilon > 0.0 {
        let a = annihilation(p.n_max);
        let x = &a + a.transpose();
        let x2 = &x * &x;
        let x4 = &x2 * &x2;
        for spin in [Spin::Ground, Spin::Excited] {
            let off = spin.offset() * f;
            for i in 0..f {
                for j in 0..f {
                    h[(off + i, off + j)] += p.epsilon * x4[(i, j)];
                }
            }
        }
    }
    Ok(h)
}

/// Excitation number σ_z/2 + a†a, conserved when ε = 0.
pub fn excitation_number(p: &JcParams) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(p.dim(), p.dim());
    for n in 0..p.fock_dim() {
        m[(p.index(Spin::Ground, n), p.index(Spin::Ground, n))] = n as f64 - 0.5;
        m[(p.index(Spin::Excited, n), p.index(Spin::Excited, n))] = n as f64 + 0.5;
    }
    m
}
