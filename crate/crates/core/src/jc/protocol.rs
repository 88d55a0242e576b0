use serde::{Deserialize, Serialize};

use super::hamiltonian::{build_hamiltonian, JcParams, Spin};
use super::state::{measure_spin, thermal_oscillator, CompositeState, Propagator};
use crate::{Error, Result};

/// Top Fock levels treated as a guard band against truncation artifacts.
pub const GUARD_LEVELS: usize = 2;

/// Order in which the transfer times T_n are applied.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// Cycle k uses T_k.
    #[default]
    Ascending,
    /// Cycle k uses T_{N_rep−1−k}.
    Descending,
    /// Any permutation of 0..N_rep.
    Custom(Vec<usize>),
}

impl Schedule {
    pub fn indices(&self, n_rep: usize) -> Result<Vec<usize>> {
        match self {
            Schedule::Ascending => Ok((0..n_rep).collect()),
            Schedule::Descending => Ok((0..n_rep).rev().collect()),
            Schedule::Custom(order) => {
                let mut seen = vec![false; n_rep];
                if order.len() != n_rep {
                    return Err(Error::domain(format!("schedule must list {n_rep} indices, got {}", order.len())));
                }
                for &i in order {
                    if i >= n_rep || std::mem::replace(&mut seen[i], true) {
                        return Err(Error::domain(format!("schedule must be a permutation of 0..{n_rep}")));
                    }
                }
                Ok(order.clone())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub cycle: usize,
    /// Index n of the transfer time T_n used in this cycle.
    pub transfer_index: usize,
    pub duration: f64,
    /// Probability of finding the spin in |g⟩ at the end of the cycle.
    pub p_g: f64,
    pub cumulative_p: f64,
    pub elapsed: f64,
    /// Conditional ⟨a†a⟩ after post-selection.
    pub mean_occupation: f64,
    pub ground_fidelity: f64,
    /// Conditional population in the top Fock levels.
    pub guard_population: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolRecord {
    pub params: JcParams,
    pub n_th: f64,
    pub initial_occupation: f64,
    pub initial_fidelity: f64,
    /// Thermal mass discarded by the Fock cutoff.
    pub truncation_tail: f64,
    pub cycles: Vec<CycleRecord>,
    pub final_state: CompositeState,
}

impl ProtocolRecord {
    pub fn total_time(&self) -> f64 {
        self.cycles.last().map_or(0.0, |c| c.elapsed)
    }

    pub fn cumulative_success(&self) -> f64 {
        self.cycles.last().map_or(1.0, |c| c.cumulative_p)
    }

    pub fn final_occupation(&self) -> f64 {
        self.cycles.last().map_or(self.initial_occupation, |c| c.mean_occupation)
    }
}

/// T_f = Σ T_n over the first `n_rep` transfer times.
pub fn total_protocol_time(p: &JcParams, n_rep: usize) -> f64 {
    (0..n_rep).map(|n| p.transfer_time(n)).sum()
}

/// Repeated free evolution and spin post-selection on |g⟩, starting from
/// |g⟩⟨g| ⊗ ρ_th.
///
/// Each cycle evolves for T_n with n taken from `schedule`, measures the
/// spin and keeps only the |g⟩ branch. Fails if a cycle has zero
/// probability of finding |g⟩.
pub fn cooling_protocol(p: &JcParams, n_th: f64, n_rep: usize, schedule: &Schedule) -> Result<ProtocolRecord> {
    if n_rep < 1 {
        return Err(Error::domain("repetition count must satisfy N_rep ≥ 1"));
    }
    let order = schedule.indices(n_rep)?;
    let prop = Propagator::new(&build_hamiltonian(p)?)?;
    let thermal = thermal_oscillator(n_th, p.n_max)?;
    let mut state = CompositeState::ground_spin_with(*p, &thermal.density_matrix())?;
    let initial_occupation = state.mean_occupation();
    let initial_fidelity = state.ground_fidelity();

    let mut cycles = Vec::with_capacity(n_rep);
    let mut cumulative_p = 1.0;
    let mut elapsed = 0.0;
    for (cycle, &n) in order.iter().enumerate() {
        let duration = p.transfer_time(n);
        let evolved = prop.apply(&state, duration)?;
        let outcome = measure_spin(&evolved);
        state = outcome.post_state(Spin::Ground)?.clone();
        let p_g = outcome.ground.probability;
        cumulative_p *= p_g;
        elapsed += duration;
        cycles.push(CycleRecord {
            cycle,
            transfer_index: n,
            duration,
            p_g,
            cumulative_p,
            elapsed,
            mean_occupation: state.mean_occupation(),
            ground_fidelity: state.ground_fidelity().clamp(0.0, 1.0),
            guard_population: state.guard_band_population(GUARD_LEVELS),
        });
    }
    Ok(ProtocolRecord {
        params: *p,
        n_th,
        initial_occupation,
        initial_fidelity,
        truncation_tail: thermal.tail,
        cycles,
        final_state: state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn ground_state_is_a_fixed_point() {
        let p = JcParams::resonant(1.0, 0.05, 0.0, 6).unwrap();
        for n_rep in [1, 3, 7] {
            let rec = cooling_protocol(&p, 0.0, n_rep, &Schedule::Ascending).unwrap();
            for c in &rec.cycles {
                assert!((c.p_g - 1.0).abs() < 1e-12);
                assert!(c.mean_occupation.abs() < 1e-12);
                assert!((c.ground_fidelity - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn total_time_partial_sum() {
        let p = JcParams::resonant(2.0, 1.0, 0.0, 12).unwrap();
        let expected = PI / 2.0 * (1.0 + 0.5f64.sqrt() + (1.0 / 3.0f64).sqrt() + 0.5);
        assert_relative_eq!(total_protocol_time(&p, 4), expected, max_relative = 1e-15);
        assert!((expected - 4.374).abs() < 5e-4);
        let rec = cooling_protocol(&p, 0.2, 4, &Schedule::Descending).unwrap();
        assert_relative_eq!(rec.total_time(), expected, max_relative = 1e-14);
    }

    #[test]
    fn schedules() {
        assert_eq!(Schedule::Descending.indices(3).unwrap(), vec![2, 1, 0]);
        assert!(Schedule::Custom(vec![0, 0, 1]).indices(3).is_err());
        assert!(Schedule::Custom(vec![0, 1]).indices(3).is_err());
        assert!(Schedule::Custom(vec![0, 3, 1]).indices(3).is_err());
        assert_eq!(Schedule::Custom(vec![1, 2, 0]).indices(3).unwrap(), vec![1, 2, 0]);
        let p = JcParams::resonant(1.0, 0.05, 0.0, 6).unwrap();
        assert!(cooling_protocol(&p, 0.1, 0, &Schedule::Ascending).is_err());
    }

    #[test]
    fn truncation_error_propagates() {
        let p = JcParams::resonant(1.0, 0.05, 0.0, 10).unwrap();
        assert!(matches!(
            cooling_protocol(&p, 1.0, 3, &Schedule::Ascending),
            Err(Error::Truncation { .. })
        ));
    }

    #[test]
    fn cooling_records_are_consistent() {
        let p = JcParams::resonant(1.0, 0.05, 0.0, 30).unwrap();
        let rec = cooling_protocol(&p, 0.5, 12, &Schedule::Ascending).unwrap();
        let p0 = 1.0 / 1.5;
        let mut prev_cum = 1.0;
        let mut prev_fid = rec.initial_fidelity;
        for c in &rec.cycles {
            assert!((0.0..=1.0).contains(&c.p_g));
            assert!(c.cumulative_p <= prev_cum);
            assert!(c.ground_fidelity >= prev_fid - 1e-12);
            prev_cum = c.cumulative_p;
            prev_fid = c.ground_fidelity;
        }
        assert!(rec.cumulative_success() >= p0 * (1.0 - rec.truncation_tail));
        assert!(rec.final_occupation() > 0.0);
        assert!(rec.final_occupation() < rec.initial_occupation);
        rec.final_state.validate().unwrap();
    }
}
