//! Scenario documents: parsing, field-level diagnostics and preparation of
//! the engine inputs.

use std::path::PathBuf;

use nalgebra::{DMatrix, DVector};
use qel_core::bec::{required_three_body, LossParams, PositionSpread};
use qel_core::decoherence::{channel_rates, Channel, ChannelParams, RatePair};
use qel_core::gaussian::{BathModel, GaussianState, GaussianSystem};
use qel_core::jc::{JcParams, Schedule};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Decoherence,
    Bec,
    Gaussian,
    Cooling,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Decoherence => "decoherence",
            Kind::Bec => "bec",
            Kind::Gaussian => "gaussian",
            Kind::Cooling => "cooling",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// `points` samples from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(CliError::validation("grid", "start and stop must be finite"));
        }
        if self.points < 2 {
            return Err(CliError::validation("grid.points", "grid needs at least 2 points"));
        }
        if !(self.stop > self.start) {
            return Err(CliError::validation("grid.stop", "grid must be strictly increasing (stop > start)"));
        }
        let last = (self.points - 1) as f64;
        let mut v: Vec<f64> = match self.spacing {
            Spacing::Linear => {
                (0..self.points).map(|i| self.start + (self.stop - self.start) * (i as f64 / last)).collect()
            }
            Spacing::Log => {
                if !(self.start > 0.0) {
                    return Err(CliError::validation("grid.start", "log spacing needs start > 0"));
                }
                let (a, b) = (self.start.ln(), self.stop.ln());
                (0..self.points).map(|i| (a + (b - a) * (i as f64 / last)).exp()).collect()
            }
        };
        v[0] = self.start;
        v[self.points - 1] = self.stop;
        if v.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(CliError::validation("grid.points", "grid spacing collapses below float resolution"));
        }
        Ok(v)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope {
    kind: Kind,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    output: OutputSpec,
    #[serde(default)]
    grid: Option<GridSpec>,
    parameters: Value,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecoherenceParams {
    /// Channels whose rates are summed; all four when omitted.
    #[serde(default)]
    pub channels: Option<Vec<Channel>>,
    pub medium: ChannelParams,
    /// Time at which the surviving coherence is reported (s).
    pub time: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum SpreadSpec {
    Constant(f64),
    Piecewise(Vec<(f64, f64)>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BecParams {
    pub k1: f64,
    pub n0: f64,
    #[serde(default)]
    pub ktilde: Option<f64>,
    #[serde(default)]
    pub k3: Option<f64>,
    #[serde(default)]
    pub sigma: Option<SpreadSpec>,
    /// Fraction of atoms to keep; when set, the required K̃ is reported.
    #[serde(default)]
    pub retention: Option<f64>,
    /// Horizon for the retention target; defaults to the end of the grid.
    #[serde(default)]
    pub horizon: Option<f64>,
}

type Rows = Vec<Vec<f64>>;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianParams {
    pub bath: BathModel,
    /// Single-mode frequency, H_s = ω·1.
    #[serde(default)]
    pub omega: Option<f64>,
    #[serde(default)]
    pub h_s: Option<Rows>,
    #[serde(default)]
    pub c: Option<Rows>,
    #[serde(default)]
    pub gamma_m: Option<Rows>,
    /// Replaces the bath diffusion matrix.
    #[serde(default)]
    pub d: Option<Rows>,
    #[serde(default)]
    pub b: Option<Vec<f64>>,
    #[serde(default)]
    pub sigma0: Option<Rows>,
    #[serde(default)]
    pub x0: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoolingParams {
    pub omega: f64,
    /// Defaults to resonance with the oscillator.
    #[serde(default)]
    pub omega_a: Option<f64>,
    pub lambda: f64,
    #[serde(default)]
    pub epsilon: f64,
    pub n_max: usize,
    pub n_th: f64,
    pub n_rep: usize,
    #[serde(default)]
    pub schedule: Schedule,
}

#[derive(Debug, Clone)]
pub struct RetentionTarget {
    pub retention: f64,
    pub horizon: f64,
    pub ktilde: f64,
}

/// Engine inputs built from a validated scenario.
#[derive(Debug, Clone)]
pub enum Workload {
    Decoherence { channels: Vec<Channel>, rates: RatePair, time: f64, separations: Vec<f64> },
    Bec { params: LossParams, grid: Vec<f64>, target: Option<RetentionTarget> },
    Gaussian { bath: BathModel, system: GaussianSystem, state0: GaussianState, grid: Vec<f64> },
    Cooling { params: JcParams, n_th: f64, n_rep: usize, schedule: Schedule },
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub kind: Kind,
    pub seed: u64,
    pub output: OutputSpec,
    pub workload: Workload,
    /// The document exactly as parsed, echoed into result metadata.
    pub source: Value,
}

fn path_of(path: &serde_path_to_error::Path, prefix: &str) -> String {
    let p = path.to_string();
    match (prefix.is_empty(), p == ".") {
        (true, _) => p,
        (false, true) => prefix.to_string(),
        (false, false) => format!("{prefix}.{p}"),
    }
}

fn typed<T: DeserializeOwned>(value: Value, prefix: &str) -> Result<T, CliError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = path_of(e.path(), prefix);
        CliError::validation(path, e.into_inner())
    })
}

fn matrix(rows: &Rows, path: &str) -> Result<DMatrix<f64>, CliError> {
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(CliError::validation(path, "rows must all have the same length"));
    }
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(CliError::validation(path, "entries must be finite"));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

fn vector(v: &[f64], dim: usize, path: &str) -> Result<DVector<f64>, CliError> {
    if v.len() != dim {
        return Err(CliError::validation(path, format!("expected {dim} entries, got {}", v.len())));
    }
    Ok(DVector::from_column_slice(v))
}

fn positive(x: f64, path: &str) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::validation(path, "must be positive and finite"))
    }
}

fn require_grid(grid: Option<GridSpec>, kind: Kind) -> Result<Vec<f64>, CliError> {
    grid.ok_or_else(|| CliError::validation("grid", format!("required for kind {}", kind.name())))?.values()
}

/// Parse and fully validate a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, CliError> {
    let source: Value = serde_json::from_str(text).map_err(|e| CliError::validation("document", e))?;
    let env: Envelope = typed(source.clone(), "")?;
    let workload = match env.kind {
        Kind::Decoherence => decoherence(typed(env.parameters, "parameters")?, env.grid)?,
        Kind::Bec => bec(typed(env.parameters, "parameters")?, env.grid)?,
        Kind::Gaussian => gaussian(typed(env.parameters, "parameters")?, env.grid)?,
        Kind::Cooling => cooling(typed(env.parameters, "parameters")?)?,
    };
    Ok(Scenario { kind: env.kind, seed: env.seed, output: env.output, workload, source })
}

fn decoherence(p: DecoherenceParams, grid: Option<GridSpec>) -> Result<Workload, CliError> {
    p.medium.validate().map_err(|e| CliError::validation("parameters.medium", e))?;
    if !(p.time >= 0.0 && p.time.is_finite()) {
        return Err(CliError::validation("parameters.time", "must satisfy t ≥ 0"));
    }
    let channels = p.channels.unwrap_or_else(|| Channel::ALL.to_vec());
    if channels.is_empty() {
        return Err(CliError::validation("parameters.channels", "at least one channel is required"));
    }
    let mut rates = RatePair { lambda: 0.0, gamma: 0.0 };
    for (i, &ch) in channels.iter().enumerate() {
        let r = channel_rates(ch, &p.medium).map_err(|e| CliError::validation(format!("parameters.channels[{i}]"), e))?;
        rates = rates.combine(&r);
    }
    let separations = require_grid(grid, Kind::Decoherence)?;
    if separations[0] < 0.0 {
        return Err(CliError::validation("grid.start", "separations must satisfy Δx ≥ 0"));
    }
    Ok(Workload::Decoherence { channels, rates, time: p.time, separations })
}

fn bec(p: BecParams, grid: Option<GridSpec>) -> Result<Workload, CliError> {
    let grid = require_grid(grid, Kind::Bec)?;
    if grid[0] != 0.0 {
        return Err(CliError::validation("grid.start", "time grid must start at t = 0"));
    }
    let target = match p.retention {
        Some(retention) => {
            let horizon = p.horizon.unwrap_or(grid[grid.len() - 1]);
            let ktilde = required_three_body(p.k1, p.n0, horizon, retention)
                .map_err(|e| CliError::validation("parameters.retention", e))?;
            Some(RetentionTarget { retention, horizon, ktilde })
        }
        None if p.horizon.is_some() => {
            return Err(CliError::validation("parameters.horizon", "only meaningful together with retention"));
        }
        None => None,
    };
    let params = match (p.ktilde, p.k3, p.sigma, &target) {
        (Some(kt), None, None, _) => LossParams::with_ktilde(p.k1, kt, p.n0),
        (None, Some(k3), Some(sigma), _) => {
            let spread = match sigma {
                SpreadSpec::Constant(s) => PositionSpread::Constant(s),
                SpreadSpec::Piecewise(steps) => PositionSpread::Piecewise(steps),
            };
            LossParams::with_k3(p.k1, k3, spread, p.n0)
        }
        (None, None, None, Some(t)) => LossParams::with_ktilde(p.k1, t.ktilde, p.n0),
        _ => {
            return Err(CliError::validation(
                "parameters",
                "give exactly one of ktilde, k3 together with sigma, or retention alone",
            ))
        }
    }
    .map_err(|e| CliError::validation("parameters", e))?;
    Ok(Workload::Bec { params, grid, target })
}

fn gaussian(p: GaussianParams, grid: Option<GridSpec>) -> Result<Workload, CliError> {
    p.bath.validate().map_err(|e| CliError::validation("parameters.bath", e))?;
    let h_s = match (&p.omega, &p.h_s) {
        (Some(w), None) => {
            if !w.is_finite() {
                return Err(CliError::validation("parameters.omega", "must be finite"));
            }
            DMatrix::identity(2, 2) * *w
        }
        (None, Some(rows)) => matrix(rows, "parameters.h_s")?,
        _ => return Err(CliError::validation("parameters", "give exactly one of omega or h_s")),
    };
    let dim = h_s.nrows();
    if dim == 0 || dim % 2 != 0 || h_s.ncols() != dim {
        return Err(CliError::validation("parameters.h_s", "must be 2n×2n with n ≥ 1"));
    }
    let n_modes = dim / 2;
    let c = match &p.c {
        Some(rows) if !rows.is_empty() => matrix(rows, "parameters.c")?,
        _ => DMatrix::zeros(0, dim),
    };
    let gamma_m = match &p.gamma_m {
        Some(rows) if !rows.is_empty() => matrix(rows, "parameters.gamma_m")?,
        _ => DMatrix::zeros(c.nrows(), c.ncols()),
    };
    let d = match &p.d {
        Some(rows) => matrix(rows, "parameters.d")?,
        None => p.bath.diffusion(n_modes),
    };
    let b = match &p.b {
        Some(v) => vector(v, dim, "parameters.b")?,
        None => DVector::zeros(dim),
    };
    let system =
        GaussianSystem::new(h_s, p.bath.drift(n_modes), d, c, gamma_m, b).map_err(|e| CliError::validation("parameters", e))?;
    let cov = match &p.sigma0 {
        Some(rows) => matrix(rows, "parameters.sigma0")?,
        None => DMatrix::identity(dim, dim) * p.bath.mu(),
    };
    let mean = match &p.x0 {
        Some(v) => vector(v, dim, "parameters.x0")?,
        None => DVector::zeros(dim),
    };
    if cov.shape() != (dim, dim) {
        return Err(CliError::validation("parameters.sigma0", format!("must be {dim}×{dim}")));
    }
    let state0 = GaussianState::new(mean, cov).map_err(|e| CliError::validation("parameters.sigma0", e))?;
    let grid = require_grid(grid, Kind::Gaussian)?;
    Ok(Workload::Gaussian { bath: p.bath, system, state0, grid })
}

fn cooling(p: CoolingParams) -> Result<Workload, CliError> {
    positive(p.omega, "parameters.omega")?;
    let params = JcParams {
        omega: p.omega,
        omega_a: p.omega_a.unwrap_or(p.omega),
        lambda: p.lambda,
        epsilon: p.epsilon,
        n_max: p.n_max,
    };
    params.validate().map_err(|e| CliError::validation("parameters", e))?;
    if !(p.n_th >= 0.0 && p.n_th.is_finite()) {
        return Err(CliError::validation("parameters.n_th", "must satisfy n_th ≥ 0"));
    }
    if p.n_rep < 1 {
        return Err(CliError::validation("parameters.n_rep", "must satisfy N_rep ≥ 1"));
    }
    p.schedule.indices(p.n_rep).map_err(|e| CliError::validation("parameters.schedule", e))?;
    Ok(Workload::Cooling { params, n_th: p.n_th, n_rep: p.n_rep, schedule: p.schedule })
}
