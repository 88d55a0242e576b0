//! Measurement-based cooling of an oscillator through a Jaynes–Cummings
//! coupled two-level system, plus closed-form sideband and feedback cooling
//! figures.

mod closed_form;
mod hamiltonian;
mod protocol;
mod state;

pub use closed_form::{feedback_temperature, sideband_occupation, SidebandCooling};
pub use hamiltonian::{annihilation, build_hamiltonian, excitation_number, JcParams, Spin};
pub use protocol::{cooling_protocol, total_protocol_time, CycleRecord, ProtocolRecord, Schedule, GUARD_LEVELS};
pub use state::{
    evolve, measure_spin, thermal_oscillator, thermal_population, Branch, CompositeState, Propagator,
    SpinMeasurement, ThermalOscillator, TAIL_LIMIT,
};
