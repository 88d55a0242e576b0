use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::system::{validate_covariance, GaussianState, GaussianSystem};
use crate::linalg::{physicality_margin, symmetrize};
use crate::{Error, Result};

const POSITIVITY_TOL: f64 = 1e-10;

/// Measurement term χ(σ) = (σCᵀ + Γ_mᵀ)(Cσ + Γ_m).
pub fn chi(sys: &GaussianSystem, sigma: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let dim = sys.dim();
    if sigma.shape() != (dim, dim) {
        return Err(Error::shape(format!("σ must be {dim}×{dim}, got {:?}", sigma.shape())));
    }
    let gain = noise_gain(sys, sigma);
    Ok(&gain * gain.transpose())
}

/// σCᵀ + Γ_mᵀ, the coefficient of dw in the mean equation.
fn noise_gain(sys: &GaussianSystem, sigma: &DMatrix<f64>) -> DMatrix<f64> {
    sigma * sys.c.transpose() + sys.gamma_m.transpose()
}

fn riccati_rhs(sys: &GaussianSystem, sigma: &DMatrix<f64>) -> DMatrix<f64> {
    let gain = noise_gain(sys, sigma);
    &sys.a * sigma + sigma * sys.a.transpose() + &sys.d - &gain * gain.transpose()
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::domain("time grid must be strictly increasing"));
    }
    Ok(())
}

/// RK4 integration of the Riccati equation, one step per grid interval.
///
/// With C = 0 and Γ_m = 0 this is the unconditional Lyapunov evolution.
/// The path has one covariance per grid point, symmetrized after every step.
pub fn evolve_covariance(
    sys: &GaussianSystem,
    sigma0: &DMatrix<f64>,
    t_grid: &[f64],
) -> Result<Vec<DMatrix<f64>>> {
    validate_covariance(sigma0)?;
    if sigma0.nrows() != sys.dim() {
        return Err(Error::shape("σ0 dimension does not match the system"));
    }
    check_grid(t_grid)?;
    let mut path = Vec::with_capacity(t_grid.len());
    if t_grid.is_empty() {
        return Ok(path);
    }
    let mut sigma = sigma0.clone();
    path.push(sigma.clone());
    for w in t_grid.windows(2) {
        let h = w[1] - w[0];
        let k1 = riccati_rhs(sys, &sigma);
        let k2 = riccati_rhs(sys, &(&sigma + &k1 * (0.5 * h)));
        let k3 = riccati_rhs(sys, &(&sigma + &k2 * (0.5 * h)));
        let k4 = riccati_rhs(sys, &(&sigma + &k3 * h));
        sigma += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        sigma = symmetrize(&sigma);
        if sigma.iter().any(|x| !x.is_finite()) {
            return Err(Error::Integration(format!("non-finite covariance at t = {}; use a smaller step", w[1])));
        }
        let margin = physicality_margin(&sigma);
        if margin < -POSITIVITY_TOL {
            return Err(Error::Integration(format!(
                "covariance lost positivity at t = {} (margin {margin:e}); use a smaller step",
                w[1]
            )));
        }
        path.push(sigma.clone());
    }
    Ok(path)
}

/// Covariance path shared by every trajectory plus one mean path per seed.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub t_grid: Vec<f64>,
    pub sigma_path: Vec<DMatrix<f64>>,
    pub seeds: Vec<u64>,
    pub mean_paths: Vec<Vec<DVector<f64>>>,
}

/// Euler–Maruyama mean path driven by a deterministic stream for `seed`.
pub fn sample_mean_trajectory(
    sys: &GaussianSystem,
    state0: &GaussianState,
    t_grid: &[f64],
    seed: u64,
) -> Result<Vec<DVector<f64>>> {
    let record = sample_ensemble(sys, state0, t_grid, &[seed])?;
    Ok(record.mean_paths.into_iter().next().unwrap_or_default())
}

/// Mean paths for every seed, sharing one covariance path.
///
/// Each seed owns an independent ChaCha stream, so the result does not
/// depend on whether seeds run serially or in parallel.
pub fn sample_ensemble(
    sys: &GaussianSystem,
    state0: &GaussianState,
    t_grid: &[f64],
    seeds: &[u64],
) -> Result<TrajectoryRecord> {
    state0.validate()?;
    if state0.mean.len() != sys.dim() {
        return Err(Error::shape("initial state dimension does not match the system"));
    }
    let sigma_path = evolve_covariance(sys, &state0.cov, t_grid)?;
    let gains: Vec<DMatrix<f64>> = sigma_path.iter().map(|s| noise_gain(sys, s)).collect();
    let run = |seed: u64| integrate_mean(sys, &state0.mean, t_grid, &gains, seed);

    #[cfg(feature = "parallel")]
    let mean_paths = {
        use rayon::prelude::*;
        seeds.par_iter().map(|&s| run(s)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let mean_paths = seeds.iter().map(|&s| run(s)).collect();

    Ok(TrajectoryRecord { t_grid: t_grid.to_vec(), sigma_path, seeds: seeds.to_vec(), mean_paths })
}

fn integrate_mean(
    sys: &GaussianSystem,
    x0: &DVector<f64>,
    t_grid: &[f64],
    gains: &[DMatrix<f64>],
    seed: u64,
) -> Vec<DVector<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let channels = sys.noise_channels();
    let monitored = sys.is_monitored();
    let mut x = x0.clone();
    let mut path = Vec::with_capacity(t_grid.len());
    if t_grid.is_empty() {
        return path;
    }
    path.push(x.clone());
    let mut dw = DVector::zeros(channels);
    for (k, w) in t_grid.windows(2).enumerate() {
        let dt = w[1] - w[0];
        let drift = (&sys.a * &x + &sys.b) * dt;
        if monitored {
            let scale = dt.sqrt();
            for v in dw.iter_mut() {
                let z: f64 = StandardNormal.sample(&mut rng);
                *v = scale * z;
            }
            x += drift + &gains[k] * &dw;
        } else {
            x += drift;
        }
        path.push(x.clone());
    }
    path
}
