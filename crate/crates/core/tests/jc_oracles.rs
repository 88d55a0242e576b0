use nalgebra::DMatrix;
use num_complex::Complex64;
use qel_core::jc::{
    build_hamiltonian, cooling_protocol, evolve, excitation_number, thermal_oscillator, thermal_population,
    CompositeState, JcParams, Propagator, Schedule, Spin,
};
use qel_core::linalg::trace_distance;
use std::f64::consts::FRAC_PI_2;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// exp(−iMτ) for a small real symmetric M by Taylor series.
fn taylor_exp(m: &DMatrix<f64>, tau: f64) -> DMatrix<Complex64> {
    let n = m.nrows();
    let x = m.map(|v| c(0.0, -v * tau));
    let mut term = DMatrix::<Complex64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..40 {
        term = &term * &x / c(k as f64, 0.0);
        sum += &term;
        if term.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-18 {
            break;
        }
    }
    sum
}

fn diag_exp(d: &[f64], tau: f64) -> DMatrix<Complex64> {
    DMatrix::from_diagonal(&d.iter().map(|e| Complex64::from_polar(1.0, -e * tau)).collect::<Vec<_>>().into())
}

/// Fourth-order Yoshida composition of the split H = diag(H) + offdiag(H).
fn product_formula(h: &DMatrix<f64>, t: f64, steps: usize) -> DMatrix<Complex64> {
    let n = h.nrows();
    let d: Vec<f64> = h.diagonal().iter().copied().collect();
    let v = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { h[(i, j)] });
    let tau = t / steps as f64;
    let cbrt2 = 2f64.cbrt();
    let w1 = 1.0 / (2.0 - cbrt2);
    let w0 = -cbrt2 / (2.0 - cbrt2);
    let strang = |s: f64| {
        let half = diag_exp(&d, 0.5 * s);
        &half * taylor_exp(&v, s) * &half
    };
    let step = strang(w1 * tau) * strang(w0 * tau) * strang(w1 * tau);
    let mut u = DMatrix::<Complex64>::identity(n, n);
    for _ in 0..steps {
        u = &step * u;
    }
    u
}

#[test]
fn eigen_propagator_matches_product_formula_with_duffing() {
    let p = JcParams::resonant(1.0, 0.05, 1e-3, 8).unwrap();
    let h = build_hamiltonian(&p).unwrap();
    let t = p.transfer_time(0);

    let mixed =
        CompositeState::ground_spin_with(p, &thermal_oscillator(0.15, 8).unwrap().density_matrix()).unwrap();
    let pure = CompositeState::pure(
        p,
        &[(Spin::Ground, 2, c(1.0, 0.0)), (Spin::Excited, 1, c(0.5, 0.0)), (Spin::Ground, 5, c(0.0, 0.7))],
    )
    .unwrap();

    let u = product_formula(&h, t, 4000);
    for s in [mixed, pure] {
        let exact = evolve(&h, &s, t).unwrap();
        let oracle = &u * &s.rho * u.adjoint();
        let d = trace_distance(&exact.rho, &oracle);
        assert!(d < 1e-6, "trace distance {d:e}");
    }
}

#[test]
fn excitation_number_is_conserved_without_duffing() {
    let p = JcParams::resonant(1.0, 0.05, 0.0, 12).unwrap();
    let prop = Propagator::new(&build_hamiltonian(&p).unwrap()).unwrap();
    let n_op = excitation_number(&p);
    let s = CompositeState::pure(
        p,
        &[(Spin::Ground, 3, c(0.6, 0.0)), (Spin::Excited, 7, c(0.0, 0.8)), (Spin::Ground, 0, c(0.3, 0.1))],
    )
    .unwrap();
    let n0 = s.expectation(&n_op);
    for k in 1..20 {
        let out = prop.apply(&s, 3.7 * k as f64).unwrap();
        assert!((out.expectation(&n_op) - n0).abs() < 1e-9);
        assert!((out.trace() - 1.0).abs() < 1e-10);
    }
}

/// Surviving g-population of |g,m⟩ after the ascending schedule: each cycle
/// multiplies it by cos²(π/2·√(m/(n+1))).
fn block_rabi_survivors(n_th: f64, n_max: usize, n_rep: usize) -> Vec<f64> {
    let norm: f64 = (0..=n_max).map(|k| thermal_population(n_th, k)).sum();
    (0..=n_max)
        .map(|m| {
            let p = thermal_population(n_th, m) / norm;
            (0..n_rep).fold(p, |acc, n| {
                let amp = (FRAC_PI_2 * (m as f64 / (n + 1) as f64).sqrt()).cos();
                acc * amp * amp
            })
        })
        .collect()
}

#[test]
fn protocol_matches_block_rabi_bookkeeping() {
    let (n_th, n_max, n_rep) = (1.0, 60, 30);
    let p = JcParams::resonant(1.0, 0.05, 0.0, n_max).unwrap();
    let rec = cooling_protocol(&p, n_th, n_rep, &Schedule::Ascending).unwrap();

    let survivors = block_rabi_survivors(n_th, n_max, n_rep);
    let total: f64 = survivors.iter().sum();
    assert!((rec.cumulative_success() - total).abs() < 1e-9, "{} vs {total}", rec.cumulative_success());
    let mean: f64 = survivors.iter().enumerate().map(|(m, s)| m as f64 * s).sum::<f64>() / total;
    assert!((rec.final_occupation() - mean).abs() < 1e-9);

    assert!((rec.cumulative_success() - 0.5).abs() <= 0.05);
    assert!(rec.final_occupation() < 0.1);
    assert!(rec.final_occupation() > 0.0);
    assert!(rec.cumulative_success() >= 0.5 * (1.0 - rec.truncation_tail));
}

#[test]
fn fidelity_is_monotone_at_resonance() {
    let p = JcParams::resonant(1.0, 0.05, 0.0, 40).unwrap();
    for schedule in [Schedule::Ascending, Schedule::Descending, Schedule::Custom(vec![3, 0, 5, 1, 4, 2])] {
        let rec = cooling_protocol(&p, 0.8, 6, &schedule).unwrap();
        let mut prev = rec.initial_fidelity;
        for cyc in &rec.cycles {
            assert!(cyc.ground_fidelity >= prev - 1e-12);
            prev = cyc.ground_fidelity;
        }
    }
}

#[test]
fn duffing_deformation_still_cools() {
    let p = JcParams::resonant(1.0, 0.05, 1e-3, 40).unwrap();
    let rec = cooling_protocol(&p, 0.8, 10, &Schedule::Ascending).unwrap();
    assert!(rec.final_occupation() < rec.initial_occupation);
    assert!(rec.final_occupation() < 0.5 * rec.initial_occupation);
    for cyc in &rec.cycles {
        assert!(cyc.guard_population < 1e-6);
    }
    rec.final_state.validate().unwrap();
}
