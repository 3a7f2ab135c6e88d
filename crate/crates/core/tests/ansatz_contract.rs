//! Contract tests shared by every ansatz family: analytic log-derivatives
//! against central finite differences, cache consistency along random walks,
//! and parameter round-trips, at both working precisions.

use nalgebra::DVector;
use nqs_core::ansatz::{build_ansatz, AnsatzSpec, AnsatzState, LogAmp, SymmetryGroup};
use nqs_core::scalar::Cplx;
use nqs_core::spin::{full_basis, SpinConfiguration};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn specs(n: usize) -> Vec<(&'static str, AnsatzSpec)> {
    vec![
        ("rbm", AnsatzSpec::Rbm { hidden: 2 * n }),
        (
            "symmetric_rbm",
            AnsatzSpec::SymmetricRbm {
                features: 2,
                group: SymmetryGroup::translations(n).unwrap(),
            },
        ),
        ("jastrow", AnsatzSpec::Jastrow),
        ("mean_field", AnsatzSpec::MeanField),
    ]
}

/// exp(a−b) compared against 1, so 2πi branch offsets in either log cannot
/// produce a false mismatch.
fn log_close(a: Cplx<f64>, b: Cplx<f64>, tol: f64) -> bool {
    ((a - b).exp() - Cplx::new(1.0, 0.0)).norm() < tol
}

#[test]
fn log_derivatives_match_central_finite_differences() {
    let n = 6;
    let h = 1e-6;
    for (name, spec) in specs(n) {
        for seed in 0..5u64 {
            let ansatz = build_ansatz::<f64>(n, &spec, 0.2, seed).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(900 + seed);
            for _ in 0..4 {
                let index = rng.random_range(0..1usize << n);
                let s = SpinConfiguration::decode(nqs_core::BasisIndex(index), n).unwrap();
                let analytic = ansatz.log_derivatives(&s);
                let base = ansatz.parameters();
                for p in 0..ansatz.parameter_count() {
                    for (direction, expected) in [
                        (Cplx::new(h, 0.0), analytic[p]),
                        (Cplx::new(0.0, h), analytic[p] * Cplx::new(0.0, 1.0)),
                    ] {
                        let mut probe = ansatz.clone();
                        let mut params = base.clone();
                        params[p] += direction;
                        probe.set_parameters(&params).unwrap();
                        let plus = probe.log_amplitude(&s).finite().unwrap();
                        let mut params = base.clone();
                        params[p] -= direction;
                        probe.set_parameters(&params).unwrap();
                        let minus = probe.log_amplitude(&s).finite().unwrap();
                        let numeric = (plus - minus) / Cplx::new(2.0 * h, 0.0);
                        assert!(
                            (numeric - expected).norm() < 1e-6 * (1.0 + expected.norm()),
                            "{name} seed {seed} parameter {p}: {numeric} vs {expected}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn log_ratio_agrees_with_amplitude_differences() {
    let n = 5;
    for (name, spec) in specs(n) {
        let ansatz = build_ansatz::<f64>(n, &spec, 0.3, 42).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let from_index = rng.random_range(0..1usize << n);
            let to_index = rng.random_range(0..1usize << n);
            let from = SpinConfiguration::decode(nqs_core::BasisIndex(from_index), n).unwrap();
            let to = SpinConfiguration::decode(nqs_core::BasisIndex(to_index), n).unwrap();
            let a = ansatz.log_amplitude(&from).finite().unwrap();
            let b = ansatz.log_amplitude(&to).finite().unwrap();
            let ratio = ansatz.log_ratio(&from, &to).finite().unwrap();
            assert!(log_close(ratio, b - a, 1e-9), "{name}: {from} → {to}");
        }
    }
}

#[test]
fn caches_stay_consistent_along_random_walks() {
    let n = 6;
    for (name, spec) in specs(n) {
        let ansatz = build_ansatz::<f64>(n, &spec, 0.25, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut current = SpinConfiguration::all_up(n).unwrap();
        let mut cache = ansatz.make_cache(&current);
        for step in 0..400 {
            // Propose one or two flips, compare the cached ratio against
            // direct evaluation, then commit and re-check the cached
            // amplitude.
            let mut flips = vec![rng.random_range(0..n)];
            if rng.random::<bool>() {
                let other = rng.random_range(0..n);
                if other != flips[0] {
                    flips.push(other);
                }
            }
            let target = current.flipped_many(&flips).unwrap();
            let direct_from = ansatz.log_amplitude(&current).finite().unwrap();
            let direct_to = ansatz.log_amplitude(&target).finite().unwrap();
            let cached_ratio = ansatz.cached_log_ratio(&cache, &current, &flips).finite().unwrap();
            assert!(
                log_close(cached_ratio, direct_to - direct_from, 1e-9),
                "{name} step {step}: ratio drifted"
            );
            ansatz.advance_cache(&mut cache, &current, &flips);
            current = target;
            let cached = ansatz.cached_log_amplitude(&cache).finite().unwrap();
            assert!(
                log_close(cached, direct_to, 1e-8),
                "{name} step {step}: cache drifted from direct evaluation"
            );
        }
    }
}

#[test]
fn parameters_round_trip_and_count_matches() {
    let n = 4;
    for (name, spec) in specs(n) {
        let ansatz = build_ansatz::<f64>(n, &spec, 0.2, 5).unwrap();
        let params = ansatz.parameters();
        assert_eq!(params.len(), ansatz.parameter_count(), "{name}");
        let mut other = build_ansatz::<f64>(n, &spec, 0.2, 77).unwrap();
        other.set_parameters(&params).unwrap();
        for s in full_basis(n).unwrap() {
            let a = ansatz.log_amplitude(&s);
            let b = other.log_amplitude(&s);
            match (a, b) {
                (LogAmp::Finite(x), LogAmp::Finite(y)) => assert_eq!(x, y, "{name} at {s}"),
                (LogAmp::Zero, LogAmp::Zero) => {}
                other => panic!("{name} at {s}: mismatched classification {other:?}"),
            }
        }
        let too_short = DVector::from_element(params.len() + 1, Cplx::new(0.0, 0.0));
        assert!(other.set_parameters(&too_short).is_err(), "{name}");
    }
}

#[test]
fn f32_families_evaluate_and_differentiate() {
    let n = 4;
    let h = 1e-3f32;
    for (name, spec) in specs(n) {
        let ansatz = build_ansatz::<f32>(n, &spec, 0.2, 9).unwrap();
        let s = SpinConfiguration::parse_token("udud").unwrap();
        let analytic = ansatz.log_derivatives(&s);
        let base = ansatz.parameters();
        // Single-precision sanity at one parameter: the full sweep runs in f64.
        let p = 0;
        let mut probe = ansatz.clone();
        let mut params = base.clone();
        params[p] += Cplx::new(h, 0.0);
        probe.set_parameters(&params).unwrap();
        let plus = probe.log_amplitude(&s).finite().unwrap();
        let mut params = base.clone();
        params[p] -= Cplx::new(h, 0.0);
        probe.set_parameters(&params).unwrap();
        let minus = probe.log_amplitude(&s).finite().unwrap();
        let numeric = (plus - minus) / Cplx::new(2.0 * h, 0.0);
        assert!(
            (numeric - analytic[p]).norm() < 2e-2 * (1.0 + analytic[p].norm()),
            "{name}: {numeric} vs {}",
            analytic[p]
        );
    }
}
