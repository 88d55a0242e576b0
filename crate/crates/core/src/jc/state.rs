use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::hamiltonian::{JcParams, Spin};
use crate::linalg::complex_from_real;
use crate::{Error, Result};

/// Largest thermal mass allowed above the Fock cutoff.
pub const TAIL_LIMIT: f64 = 1e-6;
const TRACE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-10;

/// Truncated thermal state of the oscillator.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalOscillator {
    /// Renormalized populations p_0..p_{n_max}.
    pub populations: Vec<f64>,
    /// Mass Σ_{k>n_max} p_k discarded by the cutoff.
    pub tail: f64,
}

impl ThermalOscillator {
    pub fn density_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_column_slice(&self.populations))
    }
}

/// Bose–Einstein populations p_k = n^k/(1+n)^{k+1}, not renormalized.
pub fn thermal_population(n_th: f64, k: usize) -> f64 {
    let q = n_th / (1.0 + n_th);
    q.powi(k as i32) / (1.0 + n_th)
}

pub fn thermal_oscillator(n_th: f64, n_max: usize) -> Result<ThermalOscillator> {
    if !(n_th >= 0.0 && n_th.is_finite()) {
        return Err(Error::domain("thermal occupation must satisfy n_th ≥ 0"));
    }
    let q = n_th / (1.0 + n_th);
    let tail = q.powi(n_max as i32 + 1);
    if tail > TAIL_LIMIT {
        return Err(Error::Truncation { tail, n_max, limit: TAIL_LIMIT });
    }
    let raw: Vec<f64> = (0..=n_max).map(|k| thermal_population(n_th, k)).collect();
    let norm: f64 = raw.iter().sum();
    Ok(ThermalOscillator { populations: raw.iter().map(|p| p / norm).collect(), tail })
}

/// Density matrix on spin ⊗ Fock, index `spin·(n_max+1) + n` with g = 0, e = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeState {
    pub params: JcParams,
    pub rho: DMatrix<Complex64>,
}

impl CompositeState {
    pub fn new(params: JcParams, rho: DMatrix<Complex64>) -> Result<Self> {
        let s = CompositeState { params, rho };
        s.validate()?;
        Ok(s)
    }

    /// |g⟩⟨g| ⊗ ρ_osc.
    pub fn ground_spin_with(params: JcParams, osc: &DMatrix<f64>) -> Result<Self> {
        let f = params.fock_dim();
        if osc.shape() != (f, f) {
            return Err(Error::shape(format!("oscillator state must be {f}×{f}")));
        }
        let mut rho = DMatrix::zeros(params.dim(), params.dim());
        rho.view_mut((0, 0), (f, f)).copy_from(&complex_from_real(osc));
        CompositeState::new(params, rho)
    }

    /// Pure state from amplitudes on the product basis.
    pub fn pure(params: JcParams, amplitudes: &[(Spin, usize, Complex64)]) -> Result<Self> {
        let mut psi = DVector::<Complex64>::zeros(params.dim());
        for &(s, n, c) in amplitudes {
            if n > params.n_max {
                return Err(Error::domain(format!("Fock level {n} above cutoff {}", params.n_max)));
            }
            psi[params.index(s, n)] += c;
        }
        let norm = psi.norm();
        if !(norm > 0.0) {
            return Err(Error::domain("state vector must be non-zero"));
        }
        psi /= Complex64::new(norm, 0.0);
        CompositeState::new(params, &psi * psi.adjoint())
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.params.dim();
        if self.rho.shape() != (dim, dim) {
            return Err(Error::shape(format!("density matrix must be {dim}×{dim}")));
        }
        let herm = (&self.rho - self.rho.adjoint()).camax();
        if herm > TRACE_TOL {
            return Err(Error::domain("density matrix must be Hermitian"));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::domain(format!("density matrix trace {tr} differs from 1")));
        }
        let hermitian = (&self.rho + self.rho.adjoint()) * Complex64::new(0.5, 0.0);
        let min = hermitian.symmetric_eigenvalues().min();
        if min < -PSD_TOL {
            return Err(Error::domain(format!("density matrix has eigenvalue {min:e} < 0")));
        }
        Ok(())
    }

    pub fn trace(&self) -> f64 {
        self.rho.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn population(&self, spin: Spin, n: usize) -> f64 {
        let i = self.params.index(spin, n);
        self.rho[(i, i)].re
    }

    /// Spin-traced Fock populations.
    pub fn fock_populations(&self) -> Vec<f64> {
        (0..=self.params.n_max)
            .map(|n| self.population(Spin::Ground, n) + self.population(Spin::Excited, n))
            .collect()
    }

    /// ⟨a†a⟩
    pub fn mean_occupation(&self) -> f64 {
        self.fock_populations().iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    /// ⟨O⟩ for a real observable on the full space.
    pub fn expectation(&self, op: &DMatrix<f64>) -> f64 {
        (complex_from_real(op) * &self.rho).trace().re
    }

    /// Weight ⟨g,0|ρ|g,0⟩ on the joint ground state.
    pub fn ground_fidelity(&self) -> f64 {
        self.population(Spin::Ground, 0)
    }

    /// Population in the top `levels` Fock states, where truncation artifacts live.
    pub fn guard_band_population(&self, levels: usize) -> f64 {
        let pops = self.fock_populations();
        let start = pops.len().saturating_sub(levels);
        pops[start..].iter().sum()
    }
}

/// U(t) = exp(−iHt) from the eigendecomposition of a real symmetric H.
#[derive(Debug, Clone)]
pub struct Propagator {
    vectors: DMatrix<Complex64>,
    energies: DVector<f64>,
}

impl Propagator {
    pub fn new(h: &DMatrix<f64>) -> Result<Self> {
        if !h.is_square() {
            return Err(Error::shape("Hamiltonian must be square"));
        }
        if (h - h.transpose()).amax() > 0.0 {
            return Err(Error::domain("Hamiltonian must be symmetric"));
        }
        let eig = h.clone().symmetric_eigen();
        Ok(Propagator { vectors: complex_from_real(&eig.eigenvectors), energies: eig.eigenvalues })
    }

    pub fn energies(&self) -> &DVector<f64> {
        &self.energies
    }

    pub fn unitary(&self, t: f64) -> DMatrix<Complex64> {
        let mut vd = self.vectors.clone();
        for (j, e) in self.energies.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -e * t);
            for z in vd.column_mut(j).iter_mut() {
                *z *= phase;
            }
        }
        vd * self.vectors.adjoint()
    }

    pub fn apply(&self, state: &CompositeState, t: f64) -> Result<CompositeState> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::domain("evolution time must satisfy t ≥ 0"));
        }
        if self.vectors.nrows() != state.params.dim() {
            return Err(Error::shape("propagator and state dimensions differ"));
        }
        if t == 0.0 {
            return Ok(state.clone());
        }
        let u = self.unitary(t);
        let rho = &u * &state.rho * u.adjoint();
        let rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
        Ok(CompositeState { params: state.params, rho })
    }
}

/// ρ(t) = U ρ U† for a single evolution time.
pub fn evolve(h: &DMatrix<f64>, state: &CompositeState, t: f64) -> Result<CompositeState> {
    Propagator::new(h)?.apply(state, t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub probability: f64,
    /// `None` when the branch has zero probability.
    pub post_state: Option<CompositeState>,
}

impl Branch {
    pub fn state(&self, label: &'static str) -> Result<&CompositeState> {
        self.post_state.as_ref().ok_or(Error::UndefinedPostState(label))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinMeasurement {
    pub ground: Branch,
    pub excited: Branch,
}

impl SpinMeasurement {
    pub fn branch(&self, spin: Spin) -> &Branch {
        match spin {
            Spin::Ground => &self.ground,
            Spin::Excited => &self.excited,
        }
    }

    /// Post-measurement state for `spin`, or an error if it never occurs.
    pub fn post_state(&self, spin: Spin) -> Result<&CompositeState> {
        self.branch(spin).state(spin.label())
    }
}

/// Projective measurement of σ_z.
pub fn measure_spin(state: &CompositeState) -> SpinMeasurement {
    let f = state.params.fock_dim();
    let branch = |spin: Spin| {
        let off = state.params.index(spin, 0);
        let block = state.rho.view((off, off), (f, f));
        let prob = block.diagonal().iter().map(|z| z.re).sum::<f64>().clamp(0.0, 1.0);
        let post_state = (prob > 0.0).then(|| {
            let mut rho = DMatrix::zeros(state.params.dim(), state.params.dim());
            rho.view_mut((off, off), (f, f)).copy_from(&(block / Complex64::new(prob, 0.0)));
            CompositeState { params: state.params, rho }
        });
        Branch { probability: prob, post_state }
    };
    SpinMeasurement { ground: branch(Spin::Ground), excited: branch(Spin::Excited) }
}
