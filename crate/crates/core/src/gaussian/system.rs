use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::linalg::{asymmetry, min_eigenvalue, physicality_margin, symplectic_form};
use crate::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;
const PHYSICALITY_TOL: f64 = 1e-10;

/// Linear open dynamics of `n_modes` oscillators under Gaussian monitoring.
///
/// Quadratures are ordered (q₁, p₁, q₂, p₂, …) with ħ = 1. The drift is
/// `A = ΩH_s + A_irr`; the covariance obeys
/// `σ̇ = Aσ + σAᵀ + D − χ(σ)` and the mean
/// `dx̄ = (Ax̄ + b)dt + (σCᵀ + Γ_mᵀ)dw`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSystem {
    pub n_modes: usize,
    pub h_s: DMatrix<f64>,
    pub a_irr: DMatrix<f64>,
    pub a: DMatrix<f64>,
    pub d: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub gamma_m: DMatrix<f64>,
    pub b: DVector<f64>,
}

impl GaussianSystem {
    pub fn new(
        h_s: DMatrix<f64>,
        a_irr: DMatrix<f64>,
        d: DMatrix<f64>,
        c: DMatrix<f64>,
        gamma_m: DMatrix<f64>,
        b: DVector<f64>,
    ) -> Result<Self> {
        let dim = h_s.nrows();
        if dim == 0 || dim % 2 != 0 {
            return Err(Error::shape("H_s must be 2n×2n with n ≥ 1"));
        }
        let n_modes = dim / 2;
        let square = |m: &DMatrix<f64>, name: &str| -> Result<()> {
            if m.shape() != (dim, dim) {
                return Err(Error::shape(format!("{name} must be {dim}×{dim}, got {:?}", m.shape())));
            }
            Ok(())
        };
        square(&h_s, "H_s")?;
        square(&a_irr, "A_irr")?;
        square(&d, "D")?;
        if c.ncols() != dim {
            return Err(Error::shape(format!("C must have {dim} columns, got {}", c.ncols())));
        }
        if gamma_m.shape() != c.shape() {
            return Err(Error::shape(format!(
                "Γ_m must match C's shape {:?}, got {:?}",
                c.shape(),
                gamma_m.shape()
            )));
        }
        if b.len() != dim {
            return Err(Error::shape(format!("b must have length {dim}")));
        }
        if asymmetry(&h_s) > SYMMETRY_TOL {
            return Err(Error::domain("H_s must be symmetric"));
        }
        if asymmetry(&d) > SYMMETRY_TOL || min_eigenvalue(&d) < -SYMMETRY_TOL * d.amax().max(1.0) {
            return Err(Error::domain("D must be symmetric PSD"));
        }
        let a = symplectic_form(n_modes) * &h_s + &a_irr;
        Ok(GaussianSystem { n_modes, h_s, a_irr, a, d, c, gamma_m, b })
    }

    /// Oscillators with a thermal bath on every mode, monitored through `c`.
    pub fn with_bath(
        h_s: DMatrix<f64>,
        bath: &BathModel,
        c: DMatrix<f64>,
        gamma_m: DMatrix<f64>,
    ) -> Result<Self> {
        bath.validate()?;
        let dim = h_s.nrows();
        let n = dim / 2;
        GaussianSystem::new(h_s, bath.drift(n), bath.diffusion(n), c, gamma_m, DVector::zeros(dim))
    }

    pub fn dim(&self) -> usize {
        2 * self.n_modes
    }

    /// Same open dynamics with the monitoring switched off.
    pub fn unconditional(&self) -> GaussianSystem {
        let mut uc = self.clone();
        uc.c = DMatrix::zeros(0, self.dim());
        uc.gamma_m = DMatrix::zeros(0, self.dim());
        uc
    }

    pub fn is_monitored(&self) -> bool {
        self.c.iter().chain(self.gamma_m.iter()).any(|&x| x != 0.0)
    }

    /// Number of independent Wiener increments.
    pub fn noise_channels(&self) -> usize {
        self.c.nrows()
    }
}

/// First and second moments of a Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

impl GaussianState {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let s = GaussianState { mean, cov };
        s.validate()?;
        Ok(s)
    }

    pub fn thermal(n_modes: usize, n_bar: f64) -> Result<Self> {
        let dim = 2 * n_modes;
        GaussianState::new(DVector::zeros(dim), DMatrix::identity(dim, dim) * (n_bar + 0.5))
    }

    pub fn validate(&self) -> Result<()> {
        validate_covariance(&self.cov)?;
        if self.mean.len() != self.cov.nrows() {
            return Err(Error::shape("mean and covariance dimensions differ"));
        }
        Ok(())
    }
}

/// Checks σ = σᵀ, σ + iΩ/2 ⪰ 0 and det σ > 0.
pub fn validate_covariance(cov: &DMatrix<f64>) -> Result<()> {
    let dim = cov.nrows();
    if dim == 0 || dim % 2 != 0 || cov.ncols() != dim {
        return Err(Error::shape("covariance must be 2n×2n with n ≥ 1"));
    }
    if asymmetry(cov) > SYMMETRY_TOL {
        return Err(Error::domain("covariance must be symmetric"));
    }
    let margin = physicality_margin(cov);
    if margin < -PHYSICALITY_TOL {
        return Err(Error::domain(format!(
            "covariance violates σ + iΩ/2 ⪰ 0 (smallest eigenvalue {margin:e})"
        )));
    }
    if !(cov.determinant() > 0.0) {
        return Err(Error::domain("covariance must have det σ > 0"));
    }
    Ok(())
}

/// Thermal damping of every mode at rate γ_th towards occupation n̄.
///
/// Contributes `A_irr = -(γ_th/2)·1` and `D = γ_th μ·1` with μ = n̄ + ½.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathModel {
    pub gamma_th: f64,
    pub n_bar: f64,
}

impl BathModel {
    pub fn new(gamma_th: f64, n_bar: f64) -> Result<Self> {
        let b = BathModel { gamma_th, n_bar };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_th >= 0.0 && self.gamma_th.is_finite()) {
            return Err(Error::domain("bath damping must satisfy γ_th ≥ 0"));
        }
        if !(self.n_bar >= 0.0 && self.n_bar.is_finite()) {
            return Err(Error::domain("bath occupation must satisfy n̄ ≥ 0"));
        }
        Ok(())
    }

    pub fn mu(&self) -> f64 {
        self.n_bar + 0.5
    }

    pub fn drift(&self, n_modes: usize) -> DMatrix<f64> {
        DMatrix::identity(2 * n_modes, 2 * n_modes) * (-0.5 * self.gamma_th)
    }

    pub fn diffusion(&self, n_modes: usize) -> DMatrix<f64> {
        DMatrix::identity(2 * n_modes, 2 * n_modes) * (self.gamma_th * self.mu())
    }
}
