//! Independent oracles for the exact solver: power iteration for ground
//! states, step-halving for the unitary integrator, and multinomial checks
//! for Born sampling.

use nqs_core::exact::{self, StateVector};
use nqs_core::operators::{build_tfi, LocalOperator};
use nqs_core::scalar::Cplx;
use nqs_core::spin::BasisIndex;

type C = Cplx<f64>;

/// Ground energy by shifted power iteration on the dense matrix — an
/// implementation with nothing in common with the solver under test.
fn power_iteration_ground_energy(op: &LocalOperator<f64>, iterations: usize) -> f64 {
    let dense = op.dense_matrix().unwrap();
    let dim = dense.nrows();
    // Gershgorin bound keeps c − H positive so iteration converges to E₀.
    let bound: f64 = (0..dim)
        .map(|r| (0..dim).map(|c| dense[(r, c)].norm()).sum())
        .fold(0.0_f64, f64::max);
    let mut v = nalgebra::DVector::from_fn(dim, |i, _| C::new(1.0 + (i as f64 * 0.7).sin(), 0.0));
    v /= C::new(v.norm(), 0.0);
    let mut rayleigh = 0.0;
    for _ in 0..iterations {
        let mut w = &v * C::new(bound, 0.0) - &dense * &v;
        w /= C::new(w.norm(), 0.0);
        rayleigh = (w.adjoint() * &dense * &w)[(0, 0)].re;
        v = w;
    }
    rayleigh
}

#[test]
fn ground_state_matches_power_iteration() {
    for (n, h) in [(4, 1.0), (5, 0.5), (6, 1.5)] {
        let op = build_tfi::<f64>(n, 1.0, h, true).unwrap();
        let spectral = exact::ground_state(&op).unwrap();
        // The h < 1 case has a nearly degenerate ground doublet, so the
        // iteration count is sized for a gap of ~10⁻² under a Gershgorin
        // shift of ~10¹.
        let oracle = power_iteration_ground_energy(&op, 40_000);
        assert!(
            (spectral.ground_energy - oracle).abs() < 1e-8,
            "N={n} h={h}: {} vs oracle {oracle}",
            spectral.ground_energy
        );
        // Eigenpair residual ‖Hv − E v‖.
        let applied = exact::apply_operator(&op, &spectral.ground_state).unwrap();
        let mut residual = 0.0_f64;
        for i in 0..applied.dim() {
            let diff = applied.amplitude(BasisIndex(i))
                - spectral.ground_state.amplitude(BasisIndex(i)) * C::new(spectral.ground_energy, 0.0);
            residual = residual.max(diff.norm());
        }
        assert!(residual < 1e-9, "N={n} h={h}: residual {residual}");
        assert!(spectral.gap >= 0.0);
    }
}

#[test]
fn evolve_exact_conserves_energy_and_norm() {
    let op = build_tfi::<f64>(4, 1.0, 1.0, true).unwrap();
    let mut state = StateVector::<f64>::basis_state(4, BasisIndex(3)).unwrap();
    state.normalize().unwrap();
    let before = exact::expectation(&op, &state).unwrap().re;
    let evolved = exact::evolve_exact(&op, &state, 2.0, 2000).unwrap();
    let after = exact::expectation(&op, &evolved).unwrap().re;
    assert!((evolved.norm() - 1.0).abs() < 1e-9);
    assert!(
        (after - before).abs() <= 1e-6 * before.abs().max(1.0),
        "energy {before} → {after}"
    );
}

#[test]
fn evolve_exact_error_shrinks_at_fourth_order() {
    // Step-halving oracle: for a fourth-order integrator the distance to a
    // tightly resolved reference drops by ~16 when the step halves.
    let op = build_tfi::<f64>(3, 1.0, 0.9, false).unwrap();
    let state = {
        let mut s = StateVector::<f64>::from_fn(3, |cfg| {
            C::new(1.0 + 0.3 * cfg.spin(0) as f64, 0.2 * cfg.spin(1) as f64)
        })
        .unwrap();
        s.normalize().unwrap();
        s
    };
    let duration = 1.0;
    let reference = exact::evolve_exact(&op, &state, duration, 4096).unwrap();
    let distance = |steps: usize| -> f64 {
        let evolved = exact::evolve_exact(&op, &state, duration, steps).unwrap();
        let mut max = 0.0_f64;
        for i in 0..evolved.dim() {
            max = max.max((evolved.amplitude(BasisIndex(i)) - reference.amplitude(BasisIndex(i))).norm());
        }
        max
    };
    let coarse = distance(16);
    let fine = distance(32);
    let ratio = coarse / fine;
    assert!(
        (8.0..40.0).contains(&ratio),
        "order-4 halving ratio out of range: {coarse} / {fine} = {ratio}"
    );
}

#[test]
fn born_sampling_tracks_the_exact_distribution() {
    let op = build_tfi::<f64>(4, 1.0, 1.0, true).unwrap();
    let state = exact::ground_state(&op).unwrap().ground_state;
    let draws = 100_000;
    let samples = exact::born_sample(&state, draws, 99).unwrap();
    let mut counts = vec![0usize; state.dim()];
    for s in &samples {
        counts[s.encode().0] += 1;
    }
    let mut tv = 0.0;
    for i in 0..state.dim() {
        let p = state.amplitude(BasisIndex(i)).norm_sqr();
        tv += (counts[i] as f64 / draws as f64 - p).abs();
    }
    tv *= 0.5;
    assert!(tv < 0.02, "total variation {tv}");
    // Determinism per seed.
    let again = exact::born_sample(&state, 50, 99).unwrap();
    assert_eq!(&samples[..50], &again[..]);
}

#[test]
fn fidelity_is_phase_invariant_and_bounded() {
    let op = build_tfi::<f64>(3, 1.0, 1.2, false).unwrap();
    let state = exact::ground_state(&op).unwrap().ground_state;
    let mut rotated = state.clone();
    for a in rotated.amplitudes_mut().iter_mut() {
        *a *= C::new(0.0, 1.0);
    }
    let f = exact::fidelity(&state, &rotated).unwrap();
    assert!((f - 1.0).abs() < 1e-12);
    let other = StateVector::<f64>::basis_state(3, BasisIndex(5)).unwrap();
    let f = exact::fidelity(&state, &other).unwrap();
    assert!((0.0..=1.0 + 1e-12).contains(&f));
}
