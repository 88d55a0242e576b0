//! Numerical engines for the energetics of open quantum systems.
//!
//! * [`decoherence`]: closed-form position-decoherence rates for gas
//!   collisions and blackbody radiation, plus the interpolating rate Γ(Δx).
//! * [`bec`]: condensate atom-number loss from one-body and three-body
//!   processes.
//! * [`gaussian`]: conditional and unconditional Gaussian dynamics under
//!   continuous monitoring, with Wigner-entropy bookkeeping.
//! * [`jc`]: measurement-based cooling of an oscillator through a
//!   Jaynes–Cummings coupled spin, plus sideband and feedback cooling
//!   figures of merit.

pub mod bec;
pub mod constants;
pub mod decoherence;
mod error;
pub mod gaussian;
pub mod jc;
pub mod linalg;

pub use error::{Error, Result};
