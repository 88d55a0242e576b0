//! Browser bindings for three interactive operations: a decoherence rate
//! curve, a condensate loss curve with its retention target, and a
//! measurement-based cooling run.
//!
//! Every export is a thin wrapper over a plain function that returns
//! `Result<_, String>`, so the logic is testable without a browser.

use num_complex::Complex64;
use qel_core::bec::{required_three_body, solve_analytic};
use qel_core::decoherence::{channel_rates, coherence_decay, gamma_of_separation, Channel, ChannelParams, RatePair};
use qel_core::jc::{cooling_protocol, JcParams, Schedule};
use wasm_bindgen::prelude::*;

fn channel_from_name(name: &str) -> Result<Option<Channel>, String> {
    Ok(match name {
        "all" => None,
        "collisions" => Some(Channel::Collisions),
        "blackbody_scattering" => Some(Channel::BlackbodyScattering),
        "blackbody_absorption" => Some(Channel::BlackbodyAbsorption),
        "blackbody_emission" => Some(Channel::BlackbodyEmission),
        other => return Err(format!("unknown channel {other:?}")),
    })
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>, String> {
    if points < 2 || !(hi > lo) {
        return Err("grid needs at least 2 points and max > min".into());
    }
    Ok((0..points).map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (points - 1) as f64)).collect())
}

/// Rows of (Δx, Γ(Δx), coherence left after `time`) flattened, plus the
/// rates: `[Λ, γ, Δx₀, Γ₀, c₀, Δx₁, …]`.
pub fn decoherence_rows(
    channel: &str,
    radius: f64,
    pressure: f64,
    temperature: f64,
    time: f64,
    log_dx_min: f64,
    log_dx_max: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    let medium = ChannelParams {
        pressure,
        gas_particle_mass: 4.8e-26,
        mean_velocity: 500.0,
        radius,
        temperature_internal: temperature,
        temperature_external: temperature,
        dielectric: Complex64::new(5.7, 0.1),
    };
    let channels = match channel_from_name(channel)? {
        Some(c) => vec![c],
        None => Channel::ALL.to_vec(),
    };
    let mut rates = RatePair { lambda: 0.0, gamma: 0.0 };
    for ch in channels {
        rates = rates.combine(&channel_rates(ch, &medium).map_err(|e| e.to_string())?);
    }
    let mut out = vec![rates.lambda, rates.gamma];
    for dx in log_grid(log_dx_min, log_dx_max, points)? {
        let g = gamma_of_separation(&rates, dx).map_err(|e| e.to_string())?;
        let c = coherence_decay(&rates, dx, time).map_err(|e| e.to_string())?;
        out.extend([dx, g, c]);
    }
    Ok(out)
}

/// N(t)/N0 on `points` evenly spaced times up to `horizon`.
pub fn bec_rows(k1: f64, ktilde: f64, n0: f64, horizon: f64, points: usize) -> Result<Vec<f64>, String> {
    if points < 2 || !(horizon > 0.0) {
        return Err("need at least 2 points and a positive horizon".into());
    }
    (0..points)
        .map(|i| {
            let t = horizon * i as f64 / (points - 1) as f64;
            solve_analytic(k1, ktilde, n0, t).map(|n| n / n0).map_err(|e| e.to_string())
        })
        .collect()
}

pub fn retention_target(k1: f64, n0: f64, horizon: f64, retention: f64) -> Result<f64, String> {
    required_three_body(k1, n0, horizon, retention).map_err(|e| e.to_string())
}

/// Per cycle `[T_n, p_g, cumulative p, ⟨n⟩, fidelity]`, preceded by the
/// initial `⟨n⟩` and fidelity.
pub fn cooling_rows(n_th: f64, n_rep: usize, lambda: f64, epsilon: f64, n_max: usize) -> Result<Vec<f64>, String> {
    let p = JcParams::resonant(1.0, lambda, epsilon, n_max).map_err(|e| e.to_string())?;
    let rec = cooling_protocol(&p, n_th, n_rep, &Schedule::Ascending).map_err(|e| e.to_string())?;
    let mut out = vec![rec.initial_occupation, rec.initial_fidelity];
    for c in &rec.cycles {
        out.extend([c.duration, c.p_g, c.cumulative_p, c.mean_occupation, c.ground_fidelity]);
    }
    Ok(out)
}

fn js(r: Result<Vec<f64>, String>) -> Result<Vec<f64>, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = decoherenceCurve)]
#[allow(clippy::too_many_arguments)]
pub fn decoherence_curve(
    channel: &str,
    radius: f64,
    pressure: f64,
    temperature: f64,
    time: f64,
    log_dx_min: f64,
    log_dx_max: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    js(decoherence_rows(channel, radius, pressure, temperature, time, log_dx_min, log_dx_max, points))
}

#[wasm_bindgen(js_name = becCurve)]
pub fn bec_curve(k1: f64, ktilde: f64, n0: f64, horizon: f64, points: usize) -> Result<Vec<f64>, JsError> {
    js(bec_rows(k1, ktilde, n0, horizon, points))
}

#[wasm_bindgen(js_name = requiredThreeBody)]
pub fn required_three_body_js(k1: f64, n0: f64, horizon: f64, retention: f64) -> Result<f64, JsError> {
    retention_target(k1, n0, horizon, retention).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = coolingRun)]
pub fn cooling_run(n_th: f64, n_rep: usize, lambda: f64, epsilon: f64, n_max: usize) -> Result<Vec<f64>, JsError> {
    js(cooling_rows(n_th, n_rep, lambda, epsilon, n_max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decoherence_curve_saturates() {
        let rows = decoherence_rows("all", 1e-7, 1e-8, 300.0, 1e-6, -12.0, -2.0, 21).unwrap();
        let (lambda, gamma) = (rows[0], rows[1]);
        assert_eq!(rows.len(), 2 + 3 * 21);
        let last = &rows[rows.len() - 3..];
        assert_eq!(last[1], gamma);
        let first = &rows[2..5];
        assert!((first[1] / (lambda * first[0] * first[0]) - 1.0).abs() < 1e-3);
        assert!(decoherence_rows("neutrinos", 1e-7, 1e-8, 300.0, 1.0, -9.0, -3.0, 5).is_err());
    }

    #[test]
    fn bec_curve_and_target() {
        let kt = retention_target(1e-3, 1e5, 10.0, 0.9).unwrap();
        let rows = bec_rows(1e-3, kt, 1e5, 10.0, 11).unwrap();
        assert_eq!(rows[0], 1.0);
        assert!((rows[10] - 0.9).abs() < 1e-9);
        assert!(retention_target(1e-3, 1e5, 10.0, 1.5).unwrap_err().contains("retention"));
    }

    #[test]
    fn cooling_rows_layout() {
        let rows = cooling_rows(0.5, 6, 0.05, 0.0, 30).unwrap();
        assert_eq!(rows.len(), 2 + 5 * 6);
        assert!((rows[0] - 0.5).abs() < 1e-6);
        let final_n = rows[rows.len() - 2];
        assert!(final_n < rows[0]);
        assert!(cooling_rows(1.0, 3, 0.05, 0.0, 10).unwrap_err().contains("n_max"));
    }
}
