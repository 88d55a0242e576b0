//! Condensate atom-number loss, dN/dt = -K₁N - K̃N³.
//!
//! K₁ is the one-body rate from collisions with the thermal cloud and
//! K̃ = K₃/((2π)³ 3^{3/2} σ_t⁶) the effective three-body rate for a cloud of
//! position spread σ_t.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

use crate::{Error, Result};

/// K̃ from the three-body coefficient K₃ and the position spread σ_t.
pub fn effective_three_body(k3: f64, sigma: f64) -> f64 {
    k3 / ((2.0 * PI).powi(3) * 3f64.powf(1.5) * sigma.powi(6))
}

/// Position spread σ_t of the condensate.
#[derive(Clone)]
pub enum PositionSpread {
    Constant(f64),
    /// Piecewise-constant: `(t_start, sigma)` pairs sorted by `t_start`, the
    /// first starting at or before zero.
    Piecewise(Vec<(f64, f64)>),
    Function(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for PositionSpread {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Constant(s) => f.debug_tuple("Constant").field(s).finish(),
            Self::Piecewise(p) => f.debug_tuple("Piecewise").field(p).finish(),
            Self::Function(_) => f.write_str("Function(..)"),
        }
    }
}

impl PositionSpread {
    pub fn at(&self, t: f64) -> f64 {
        match self {
            Self::Constant(s) => *s,
            Self::Piecewise(steps) => steps
                .iter()
                .take_while(|(start, _)| *start <= t)
                .last()
                .or(steps.first())
                .map(|(_, s)| *s)
                .unwrap_or(f64::NAN),
            Self::Function(f) => f(t),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::Piecewise(steps) => steps.iter().map(|(t, _)| *t).collect(),
            _ => Vec::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Self::Constant(s) if !(*s > 0.0 && s.is_finite()) => {
                Err(Error::domain("position spread must satisfy σ_t > 0"))
            }
            Self::Piecewise(steps) => {
                if steps.is_empty() {
                    return Err(Error::domain("piecewise position spread needs at least one step"));
                }
                if steps.windows(2).any(|w| !(w[0].0 < w[1].0)) {
                    return Err(Error::domain("piecewise position spread must have increasing start times"));
                }
                if steps.iter().any(|(_, s)| !(*s > 0.0 && s.is_finite())) {
                    return Err(Error::domain("position spread must satisfy σ_t > 0"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Three-body coefficient, given either as K̃ directly or as (K₃, σ_t).
#[derive(Debug, Clone)]
pub enum ThreeBody {
    Effective(f64),
    FromK3 { k3: f64, sigma: PositionSpread },
}

impl ThreeBody {
    /// K̃ at time t.
    pub fn ktilde(&self, t: f64) -> f64 {
        match self {
            ThreeBody::Effective(k) => *k,
            ThreeBody::FromK3 { k3, sigma } => effective_three_body(*k3, sigma.at(t)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LossParams {
    pub k1: f64,
    pub three_body: ThreeBody,
    pub n0: f64,
}

impl LossParams {
    pub fn with_ktilde(k1: f64, ktilde: f64, n0: f64) -> Result<Self> {
        let p = LossParams { k1, three_body: ThreeBody::Effective(ktilde), n0 };
        p.validate()?;
        Ok(p)
    }

    pub fn with_k3(k1: f64, k3: f64, sigma: PositionSpread, n0: f64) -> Result<Self> {
        let p = LossParams { k1, three_body: ThreeBody::FromK3 { k3, sigma }, n0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k1 >= 0.0 && self.k1.is_finite()) {
            return Err(Error::domain("one-body rate must satisfy K1 ≥ 0"));
        }
        if !(self.n0 > 0.0 && self.n0.is_finite()) {
            return Err(Error::domain("initial atom number must satisfy N0 > 0"));
        }
        match &self.three_body {
            ThreeBody::Effective(k) if !(*k >= 0.0 && k.is_finite()) => {
                Err(Error::domain("three-body rate must satisfy K̃ ≥ 0"))
            }
            ThreeBody::FromK3 { k3, sigma } => {
                if !(*k3 >= 0.0 && k3.is_finite()) {
                    return Err(Error::domain("three-body coefficient must satisfy K3 ≥ 0"));
                }
                sigma.validate()
            }
            _ => Ok(()),
        }
    }
}

/// Atom numbers on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossCurve {
    pub times: Vec<f64>,
    pub counts: Vec<f64>,
}

/// Closed-form N(t) for constant coefficients.
///
/// With u = N⁻² the equation is linear, giving
/// `N = N0 e^{-K1 t} / √(1 + K̃N0² (1 - e^{-2K1 t})/K1)`, and
/// `N = N0 / √(1 + 2K̃N0² t)` when K1 = 0.
pub fn solve_analytic(k1: f64, ktilde: f64, n0: f64, t: f64) -> Result<f64> {
    if !(k1 >= 0.0) || !(ktilde >= 0.0) || !(n0 >= 0.0) || !(t >= 0.0) {
        return Err(Error::domain("loss inputs must be non-negative"));
    }
    let growth = if k1 == 0.0 { 2.0 * t } else { -(-2.0 * k1 * t).exp_m1() / k1 };
    Ok(n0 * (-k1 * t).exp() / (1.0 + ktilde * n0 * n0 * growth).sqrt())
}

fn rate(k1: f64, ktilde: f64, n: f64) -> f64 {
    -k1 * n - ktilde * n * n * n
}

/// Fixed-step RK4 integration on `t_grid` (ascending, starting at 0).
///
/// Each grid interval is split at σ_t breakpoints and subdivided so that
/// every step satisfies `h·(K1 + K̃N²) ≤ 0.01`.
pub fn solve_numeric(params: &LossParams, t_grid: &[f64]) -> Result<LossCurve> {
    params.validate()?;
    if t_grid.is_empty() {
        return Ok(LossCurve { times: Vec::new(), counts: Vec::new() });
    }
    if t_grid[0] != 0.0 {
        return Err(Error::domain("time grid must start at t = 0"));
    }
    if t_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::domain("time grid must be strictly increasing"));
    }
    let k1 = params.k1;
    let three = &params.three_body;
    let breaks = match three {
        ThreeBody::FromK3 { sigma, .. } => sigma.breakpoints(),
        ThreeBody::Effective(_) => Vec::new(),
    };
    let piecewise = !breaks.is_empty();

    let mut n = params.n0;
    let mut counts = Vec::with_capacity(t_grid.len());
    counts.push(n);
    for w in t_grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mut knots = vec![a];
        knots.extend(breaks.iter().copied().filter(|&s| s > a && s < b));
        knots.push(b);
        for seg in knots.windows(2) {
            let (s0, s1) = (seg[0], seg[1]);
            // Piecewise σ_t is constant inside a segment; sample it there so
            // the stage at the right edge does not pick up the next value.
            let kt = |t: f64| {
                if piecewise {
                    three.ktilde(0.5 * (s0 + s1))
                } else {
                    three.ktilde(t)
                }
            };
            let span = s1 - s0;
            let stiffness = k1 + kt(s0) * n * n;
            let mut steps = 1usize;
            if stiffness > 0.0 {
                let needed = (span * stiffness / 0.01).ceil();
                if !needed.is_finite() || needed > 1e9 {
                    return Err(Error::Integration(format!(
                        "step size underflow on [{s0}, {s1}] (rate {stiffness:e})"
                    )));
                }
                steps = steps.max(needed as usize);
            }
            let h = span / steps as f64;
            for i in 0..steps {
                let t = s0 + i as f64 * h;
                let f1 = rate(k1, kt(t), n);
                let f2 = rate(k1, kt(t + 0.5 * h), n + 0.5 * h * f1);
                let f3 = rate(k1, kt(t + 0.5 * h), n + 0.5 * h * f2);
                let f4 = rate(k1, kt(t + h), n + h * f3);
                n += h / 6.0 * (f1 + 2.0 * f2 + 2.0 * f3 + f4);
            }
            if !n.is_finite() || n <= 0.0 {
                return Err(Error::Integration(format!("non-finite or non-positive atom number at t = {s1}")));
            }
        }
        counts.push(n);
    }
    Ok(LossCurve { times: t_grid.to_vec(), counts })
}

/// Smallest upper bound on K̃ that keeps `N(horizon) ≥ retention·N0`.
///
/// Bisection on the monotone map K̃ ↦ N(horizon), bracketed by
/// [0, 10³/(N0²·horizon)] and widened if needed.
pub fn required_three_body(k1: f64, n0: f64, horizon: f64, retention: f64) -> Result<f64> {
    if !(retention > 0.0 && retention < 1.0) {
        return Err(Error::domain("retention ∈ (0,1)"));
    }
    if !(k1 >= 0.0) || !(n0 > 0.0) || !(horizon > 0.0) {
        return Err(Error::domain("requires K1 ≥ 0, N0 > 0, horizon > 0"));
    }
    let target = retention * n0;
    let residual = |kt: f64| solve_analytic(k1, kt, n0, horizon).map(|n| n - target);
    let at_zero = residual(0.0)?;
    if at_zero < 0.0 {
        return Err(Error::Infeasible("one-body loss exceeds budget".into()));
    }
    if at_zero == 0.0 {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = 1e3 / (n0 * n0 * horizon);
    let mut widen = 0;
    while residual(hi)? > 0.0 {
        lo = hi;
        hi *= 2.0;
        widen += 1;
        if widen > 200 {
            return Err(Error::Integration("could not bracket the three-body target".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if residual(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
