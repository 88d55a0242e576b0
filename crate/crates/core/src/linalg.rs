//! Small dense linear-algebra helpers shared by the engines.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Symplectic form Ω = ⊕ [[0, 1], [-1, 0]] for `n_modes` modes.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for j in 0..n_modes {
        omega[(2 * j, 2 * j + 1)] = 1.0;
        omega[(2 * j + 1, 2 * j)] = -1.0;
    }
    omega
}

/// (M + Mᵀ)/2.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Largest |M - Mᵀ| entry relative to the largest |M| entry.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let scale = m.amax().max(f64::MIN_POSITIVE);
    (m - m.transpose()).amax() / scale
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    symmetrize(m).symmetric_eigenvalues().min()
}

/// Smallest eigenvalue of the Hermitian matrix σ + iΩ/2. Non-negative iff σ
/// is the covariance matrix of a physical state.
pub fn physicality_margin(sigma: &DMatrix<f64>) -> f64 {
    let n = sigma.nrows();
    let omega = symplectic_form(n / 2);
    let m = DMatrix::from_fn(n, n, |i, j| Complex64::new(sigma[(i, j)], 0.5 * omega[(i, j)]));
    m.symmetric_eigenvalues().min()
}

/// Cholesky-based inverse and log-determinant of a positive-definite matrix.
pub fn spd_inverse_logdet(m: &DMatrix<f64>) -> Option<(DMatrix<f64>, f64)> {
    let chol = symmetrize(m).cholesky()?;
    Some((chol.inverse(), chol.ln_determinant()))
}

pub fn complex_from_real(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Trace norm ½‖A - B‖₁ of the difference of two Hermitian matrices.
pub fn trace_distance(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    let d = a - b;
    let d = (&d + d.adjoint()) * Complex64::new(0.5, 0.0);
    0.5 * d.symmetric_eigenvalues().iter().map(|e| e.abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::DVector;

    #[test]
    fn symplectic_form_is_antisymmetric_and_squares_to_minus_one() {
        let o = symplectic_form(3);
        assert_eq!(&o + o.transpose(), DMatrix::zeros(6, 6));
        assert_eq!(&o * &o, -DMatrix::identity(6, 6));
    }

    #[test]
    fn vacuum_sits_on_the_physicality_boundary() {
        let vac = DMatrix::identity(2, 2) * 0.5;
        assert!(physicality_margin(&vac).abs() < 1e-15);
        let squeezed_too_far = DMatrix::from_diagonal(&DVector::from_vec(vec![0.1, 0.5]));
        assert!(physicality_margin(&squeezed_too_far) < 0.0);
        let thermal = DMatrix::identity(2, 2) * 1.5;
        assert_relative_eq!(physicality_margin(&thermal), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn logdet_matches_determinant() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0]);
        let (inv, logdet) = spd_inverse_logdet(&m).unwrap();
        assert_relative_eq!(logdet, m.determinant().ln(), epsilon = 1e-14);
        assert_relative_eq!(inv * &m, DMatrix::identity(2, 2), epsilon = 1e-14);
        assert!(spd_inverse_logdet(&DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0])).is_none());
    }
}
