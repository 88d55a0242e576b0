//! Wigner-entropy bookkeeping for Gaussian states.
//!
//! Sign convention: Ṡ = Φ + Π, with Φ the entropy flux into the system and
//! Π ≥ 0 the entropy production rate.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::dynamics::chi;
use super::system::{BathModel, GaussianState, GaussianSystem};
use crate::linalg::spd_inverse_logdet;
use crate::{Error, Result};

fn inverse_logdet(sigma: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    spd_inverse_logdet(sigma).ok_or_else(|| Error::domain("σ must be positive definite"))
}

/// S = ½ ln det σ (additive constant set to zero).
pub fn wigner_entropy(sigma: &DMatrix<f64>) -> Result<f64> {
    Ok(0.5 * inverse_logdet(sigma)?.1)
}

/// Ṡ = ½Tr[2A + σ⁻¹(D − χ(σ))]; χ is dropped when `conditional` is false.
pub fn entropy_rate(sys: &GaussianSystem, sigma: &DMatrix<f64>, conditional: bool) -> Result<f64> {
    let (inv, _) = inverse_logdet(sigma)?;
    let mut source = sys.d.clone();
    if conditional {
        source -= chi(sys, sigma)?;
    }
    Ok(0.5 * (2.0 * sys.a.trace() + (inv * source).trace()))
}

/// Excess entropy rate due to monitoring,
/// I = ½Tr[σ_c⁻¹(D − χ(σ_c)) − σ_uc⁻¹D].
pub fn information_rate(sys: &GaussianSystem, sigma_c: &DMatrix<f64>, sigma_uc: &DMatrix<f64>) -> Result<f64> {
    let (inv_c, _) = inverse_logdet(sigma_c)?;
    let (inv_uc, _) = inverse_logdet(sigma_uc)?;
    let reduced = &sys.d - chi(sys, sigma_c)?;
    Ok(0.5 * ((inv_c * reduced).trace() - (inv_uc * &sys.d).trace()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropySplit {
    /// Ṡ
    pub rate: f64,
    /// Φ
    pub flux: f64,
    /// Π
    pub production: f64,
}

/// Entropy rate, flux and production of a state relaxing under `bath` alone.
///
/// `Π = (γ/2μ)Tr[(σ − μ)σ⁻¹(σ − μ)] + (γ/μ)|x̄|²` and
/// `Φ = Σ_modes γ(1 − Tr σ_mode/2μ) − (γ/μ)|x̄|²`. The rate Ṡ is evaluated
/// separately from the drift and diffusion, so `rate == flux + production`
/// is a check rather than a definition.
pub fn epr_split(bath: &BathModel, state: &GaussianState) -> Result<EntropySplit> {
    bath.validate()?;
    let mu = bath.mu();
    if !(mu > 0.0) {
        return Err(Error::domain("zero-temperature flux requires μ > 0"));
    }
    let sigma = &state.cov;
    let dim = sigma.nrows();
    if dim % 2 != 0 || state.mean.len() != dim {
        return Err(Error::shape("state must have 2n quadratures"));
    }
    let n_modes = dim / 2;
    let (inv, _) = inverse_logdet(sigma)?;
    let g = bath.gamma_th;
    let shifted = sigma - DMatrix::identity(dim, dim) * mu;
    let mean_sq = state.mean.norm_squared();

    let production = g / (2.0 * mu) * (&shifted * &inv * &shifted).trace() + g / mu * mean_sq;
    let flux = (0..n_modes)
        .map(|j| {
            let tr = sigma[(2 * j, 2 * j)] + sigma[(2 * j + 1, 2 * j + 1)];
            g * (1.0 - tr / (2.0 * mu))
        })
        .sum::<f64>()
        - g / mu * mean_sq;
    let rate = 0.5 * (2.0 * bath.drift(n_modes).trace() + (inv * bath.diffusion(n_modes)).trace());
    Ok(EntropySplit { rate, flux, production })
}

/// Conditional production Π_c = Π_uc + I.
///
/// `uc_state` carries the unconditional covariance and mean; `sigma_c` is
/// the conditional covariance evolved from the same initial state.
pub fn conditional_epr(
    bath: &BathModel,
    sys: &GaussianSystem,
    sigma_c: &DMatrix<f64>,
    uc_state: &GaussianState,
) -> Result<f64> {
    let split = epr_split(bath, uc_state)?;
    Ok(split.production + information_rate(sys, sigma_c, &uc_state.cov)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::dynamics::evolve_covariance;
    use approx::assert_relative_eq;
    use nalgebra::DVector;
    use proptest::prelude::*;

    fn bath_system(bath: &BathModel, kappa: f64) -> GaussianSystem {
        let c = DMatrix::from_row_slice(1, 2, &[kappa.sqrt(), 0.0]);
        GaussianSystem::with_bath(DMatrix::identity(2, 2) * 0.8, bath, c, DMatrix::zeros(1, 2)).unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(wigner_entropy(&DMatrix::identity(2, 2)).unwrap(), 0.0);
        assert_relative_eq!(
            wigner_entropy(&(DMatrix::identity(2, 2) * 2.0)).unwrap(),
            2f64.ln(),
            max_relative = 1e-15
        );
        assert!(wigner_entropy(&DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0])).is_err());
    }

    #[test]
    fn entropy_rate_examples() {
        let bath = BathModel::new(0.4, 1.0).unwrap();
        let sys = bath_system(&bath, 0.0).unconditional();
        let eq = DMatrix::identity(2, 2) * bath.mu();
        assert!(entropy_rate(&sys, &eq, false).unwrap().abs() < 1e-15);

        let pure_diffusion = GaussianSystem::new(
            DMatrix::zeros(2, 2),
            DMatrix::zeros(2, 2),
            DMatrix::identity(2, 2),
            DMatrix::zeros(0, 2),
            DMatrix::zeros(0, 2),
            DVector::zeros(2),
        )
        .unwrap();
        assert_eq!(entropy_rate(&pure_diffusion, &DMatrix::identity(2, 2), false).unwrap(), 1.0);
    }

    #[test]
    fn hamiltonian_does_not_change_entropy_rate() {
        let bath = BathModel::new(0.4, 1.0).unwrap();
        let c = DMatrix::from_row_slice(1, 2, &[0.3, 0.1]);
        let h1 = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 2.0]);
        let a = GaussianSystem::with_bath(DMatrix::zeros(2, 2), &bath, c.clone(), DMatrix::zeros(1, 2)).unwrap();
        let b = GaussianSystem::with_bath(h1, &bath, c, DMatrix::zeros(1, 2)).unwrap();
        let sigma = DMatrix::from_row_slice(2, 2, &[1.4, 0.2, 0.2, 0.9]);
        for cond in [false, true] {
            assert_relative_eq!(
                entropy_rate(&a, &sigma, cond).unwrap(),
                entropy_rate(&b, &sigma, cond).unwrap(),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn entropy_rate_matches_finite_difference() {
        let bath = BathModel::new(1.0, 1.0).unwrap();
        let sys = bath_system(&bath, 0.3);
        let h = 1e-4;
        let grid: Vec<f64> = (0..=20_000).map(|i| i as f64 * h).collect();
        let s0 = DMatrix::from_row_slice(2, 2, &[3.0, 0.5, 0.5, 0.7]);
        let path = evolve_covariance(&sys, &s0, &grid).unwrap();
        for k in (1..grid.len() - 1).step_by(2_500) {
            let fd = (wigner_entropy(&path[k + 1]).unwrap() - wigner_entropy(&path[k - 1]).unwrap()) / (2.0 * h);
            let exact = entropy_rate(&sys, &path[k], true).unwrap();
            assert!((fd - exact).abs() < 1e-5, "k={k}: {fd} vs {exact}");
        }
    }

    #[test]
    fn information_rate_vanishes_without_monitoring() {
        let bath = BathModel::new(1.0, 0.5).unwrap();
        let sys = bath_system(&bath, 0.0).unconditional();
        let s = DMatrix::from_row_slice(2, 2, &[2.0, 0.1, 0.1, 1.0]);
        assert_eq!(information_rate(&sys, &s, &s).unwrap(), 0.0);
    }

    #[test]
    fn split_examples() {
        let bath = BathModel::new(0.6, 2.0).unwrap();
        let mu = bath.mu();
        let eq = GaussianState::thermal(1, bath.n_bar).unwrap();
        let s = epr_split(&bath, &eq).unwrap();
        assert!(s.rate.abs() < 1e-15 && s.flux.abs() < 1e-15 && s.production.abs() < 1e-15);

        let hot = GaussianState::new(DVector::zeros(2), DMatrix::identity(2, 2) * (2.0 * mu)).unwrap();
        let s = epr_split(&bath, &hot).unwrap();
        assert_relative_eq!(s.production, 0.3, max_relative = 1e-14);
        assert_relative_eq!(s.flux, -0.6, max_relative = 1e-14);
        assert!((s.rate - (s.flux + s.production)).abs() < 1e-12);
    }

    #[test]
    fn conditional_epr_reduces_without_monitoring() {
        let bath = BathModel::new(0.6, 2.0).unwrap();
        let sys = bath_system(&bath, 0.0).unconditional();
        let st = GaussianState::new(DVector::from_vec(vec![0.2, 0.1]), DMatrix::identity(2, 2) * 3.0).unwrap();
        let pi_c = conditional_epr(&bath, &sys, &st.cov, &st).unwrap();
        assert_eq!(pi_c, epr_split(&bath, &st).unwrap().production);
        let eq = GaussianState::thermal(1, bath.n_bar).unwrap();
        assert_eq!(conditional_epr(&bath, &sys, &eq.cov, &eq).unwrap(), 0.0);
    }

    proptest! {
        #[test]
        fn production_is_non_negative_and_split_is_exact(
            gamma in 0.01f64..5.0, n_bar in 0f64..5.0,
            l in 1f64..5.0, r in 0.5f64..5.0, angle in 0f64..3.14,
            x in -2f64..2.0, p in -2f64..2.0,
        ) {
            let bath = BathModel::new(gamma, n_bar).unwrap();
            // Rotated thermal-squeezed covariance with symplectic eigenvalue ≥ ½.
            let (c, s) = (angle.cos(), angle.sin());
            let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
            let diag = DMatrix::from_diagonal(&DVector::from_vec(vec![0.5 * l * r, 0.5 * l / r]));
            let cov = &rot * diag * rot.transpose();
            let st = GaussianState::new(DVector::from_vec(vec![x, p]), cov).unwrap();
            let split = epr_split(&bath, &st).unwrap();
            prop_assert!(split.production >= 0.0);
            prop_assert!((split.rate - split.flux - split.production).abs() <= 1e-10 * (1.0 + split.production.abs()));
        }
    }
}
