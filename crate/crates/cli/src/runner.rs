use std::collections::BTreeMap;
use std::time::Instant;

use log::{debug, info, warn};
use nalgebra::DMatrix;
use qel_core::bec::solve_numeric;
use qel_core::decoherence::{coherence_decay, crossover_length, gamma_of_separation};
use qel_core::gaussian::{
    entropy_rate, epr_split, evolve_covariance, information_rate, sample_mean_trajectory, wigner_entropy,
    GaussianState,
};
use qel_core::jc::cooling_protocol;

use crate::error::CliError;
use crate::scenario::{Scenario, Workload};
use crate::table::{Metadata, ResultTable};

/// Guard-band population above which a cooling run is flagged.
const GUARD_WARN: f64 = 1e-6;

/// Run a validated scenario. Output depends only on the scenario and `seed`.
pub fn run(scenario: &Scenario, seed: u64) -> Result<ResultTable, CliError> {
    let started = Instant::now();
    let ctx = format!("{} run", scenario.kind.name());
    let engine = |e| CliError::from_engine(&ctx, e);
    let mut summary = BTreeMap::new();

    let mut table = match &scenario.workload {
        Workload::Decoherence { rates, time, separations, channels } => {
            debug!("channels {channels:?}, Λ = {:e}, γ = {:e}", rates.lambda, rates.gamma);
            let mut t = ResultTable::new(cols(&["dx", "Lambda", "gamma", "Gamma", "survival"]));
            for &dx in separations {
                let g = gamma_of_separation(rates, dx).map_err(engine)?;
                let s = coherence_decay(rates, dx, *time).map_err(engine)?;
                t.push(vec![dx, rates.lambda, rates.gamma, g, s]);
            }
            if let Ok(l) = crossover_length(rates) {
                summary.insert("crossover_length".into(), l);
            }
            t
        }
        Workload::Bec { params, grid, target } => {
            let curve = solve_numeric(params, grid).map_err(engine)?;
            let mut t = ResultTable::new(cols(&["t", "N", "N_over_N0"]));
            for (&time, &n) in curve.times.iter().zip(&curve.counts) {
                t.push(vec![time, n, n / params.n0]);
            }
            if let Some(target) = target {
                summary.insert("required_ktilde".into(), target.ktilde);
                summary.insert("retention".into(), target.retention);
                summary.insert("horizon".into(), target.horizon);
            }
            t
        }
        Workload::Gaussian { bath, system, state0, grid } => {
            let uc = system.unconditional();
            let sigma_c = evolve_covariance(system, &state0.cov, grid).map_err(engine)?;
            let sigma_uc = evolve_covariance(&uc, &state0.cov, grid).map_err(engine)?;
            let mean_c = sample_mean_trajectory(system, state0, grid, seed).map_err(engine)?;
            let mean_uc = sample_mean_trajectory(&uc, state0, grid, seed).map_err(engine)?;
            let dim = system.dim();

            let mut names = vec!["t".to_string()];
            for i in 0..dim {
                for j in i..dim {
                    names.push(format!("sigma_{i}_{j}"));
                }
            }
            names.extend((0..dim).map(|i| format!("x_{i}")));
            names.extend(cols(&["S", "dS", "Phi", "Pi", "I", "Pi_c"]));
            let mut t = ResultTable::new(names);

            for (k, &time) in grid.iter().enumerate() {
                let sc = &sigma_c[k];
                let uc_state = GaussianState { mean: mean_uc[k].clone(), cov: sigma_uc[k].clone() };
                let split = epr_split(bath, &uc_state).map_err(engine)?;
                let info = information_rate(system, sc, &sigma_uc[k]).map_err(engine)?;
                let mut row = vec![time];
                row.extend(upper_triangle(sc));
                row.extend(mean_c[k].iter());
                row.push(wigner_entropy(sc).map_err(engine)?);
                row.push(entropy_rate(system, sc, system.is_monitored()).map_err(engine)?);
                row.extend([split.flux, split.production, info, split.production + info]);
                t.push(row);
            }
            t
        }
        Workload::Cooling { params, n_th, n_rep, schedule } => {
            let rec = cooling_protocol(params, *n_th, *n_rep, schedule).map_err(engine)?;
            let mut t = ResultTable::new(cols(&["cycle", "T_n", "p_g", "cumulative_p", "mean_n", "fidelity"]));
            for c in &rec.cycles {
                t.push(vec![c.cycle as f64, c.duration, c.p_g, c.cumulative_p, c.mean_occupation, c.ground_fidelity]);
                if c.guard_population > GUARD_WARN {
                    warn!("cycle {}: {:.2e} population in the top Fock levels; raise n_max", c.cycle, c.guard_population);
                }
            }
            summary.insert("total_time".into(), rec.total_time());
            summary.insert("cumulative_success".into(), rec.cumulative_success());
            summary.insert("initial_occupation".into(), rec.initial_occupation);
            summary.insert("truncation_tail".into(), rec.truncation_tail);
            t
        }
    };

    let wall_time_s = started.elapsed().as_secs_f64();
    info!("{ctx}: {} rows in {wall_time_s:.3} s", table.rows.len());
    table.metadata = Some(Metadata {
        scenario: scenario.source.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed,
        wall_time_s,
        summary,
    });
    Ok(table)
}

fn cols(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn upper_triangle(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    (0..n).flat_map(|i| (i..n).map(move |j| m[(i, j)])).collect()
}
