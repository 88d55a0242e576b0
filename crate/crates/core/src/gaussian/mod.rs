//! Conditional and unconditional dynamics of continuously monitored
//! Gaussian systems, with Wigner-entropy production bookkeeping.
//!
//! The covariance obeys a deterministic Riccati equation, so everything
//! that depends only on σ (entropy, its rate, the information rate) is
//! identical across measurement records; only the mean is stochastic.

mod dynamics;
mod entropy;
mod system;

pub use dynamics::{chi, evolve_covariance, sample_ensemble, sample_mean_trajectory, TrajectoryRecord};
pub use entropy::{
    conditional_epr, entropy_rate, epr_split, information_rate, wigner_entropy, EntropySplit,
};
pub use system::{validate_covariance, BathModel, GaussianState, GaussianSystem};
