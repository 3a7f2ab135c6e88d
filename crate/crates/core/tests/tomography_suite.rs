//! End-to-end tomography checks: the branch-sum rotated-amplitude evaluator
//! against a dense rotation oracle, snapshot-generation statistics, and
//! likelihood training on targets whose reconstructions are known.

use nqs_core::ansatz::{build_ansatz, AnsatzSpec, AnsatzState};
use nqs_core::exact::{
    apply_single_site_unitary, dense_ansatz_state, ground_state, StateVector,
};
use nqs_core::operators::{build_tfi, Pauli};
use nqs_core::tomography::{
    generate_snapshots, parse_basis, reconstruct_fidelity, rotated_log_amplitude,
    rotation_matrix, train_tomography,
};
use nqs_core::{BasisIndex, Cplx, SpinConfiguration};

type C = Cplx<f64>;

/// Unnormalized dense amplitude vector of an ansatz.
fn raw_dense(ansatz: &impl AnsatzState<f64>) -> StateVector<f64> {
    StateVector::from_fn(ansatz.n_sites(), |s| ansatz.log_amplitude(s).weight()).unwrap()
}

/// Rotate every non-Z site of `state` into the given measurement basis.
fn rotate_dense(state: &StateVector<f64>, basis: &[Pauli]) -> StateVector<f64> {
    let mut rotated = state.clone();
    for (site, &letter) in basis.iter().enumerate() {
        if letter != Pauli::Z {
            rotated =
                apply_single_site_unitary(&rotated, site, &rotation_matrix(letter)).unwrap();
        }
    }
    rotated
}

/// Total-variation distance between the Born distributions of two normalized
/// states.
fn born_tv(a: &StateVector<f64>, b: &StateVector<f64>) -> f64 {
    assert_eq!(a.dim(), b.dim());
    let mut tv = 0.0;
    for i in 0..a.dim() {
        let index = BasisIndex(i);
        tv += (a.amplitude(index).norm_sqr() - b.amplitude(index).norm_sqr()).abs();
    }
    0.5 * tv
}

#[test]
fn rotated_amplitudes_match_a_dense_rotation_oracle() {
    let ansatz = build_ansatz::<f64>(5, &AnsatzSpec::Rbm { hidden: 10 }, 0.25, 31).unwrap();
    let raw = raw_dense(&ansatz);
    for token in ["ZZZZZ", "XZYZX", "YYZXZ", "XXXXX"] {
        let basis = parse_basis(token).unwrap();
        let rotated = rotate_dense(&raw, &basis);
        let scale = (0..rotated.dim())
            .map(|i| rotated.amplitude(BasisIndex(i)).norm())
            .fold(0.0, f64::max);
        for i in 0..rotated.dim() {
            let outcome = SpinConfiguration::decode(BasisIndex(i), 5).unwrap();
            let expect = rotated.amplitude(BasisIndex(i));
            let got = rotated_log_amplitude(&ansatz, &basis, &outcome)
                .unwrap()
                .weight();
            assert!(
                (got - expect).norm() <= 1e-10 * (scale + expect.norm()),
                "basis {token}, outcome {outcome}: {got} vs {expect}"
            );
        }
    }
}

#[test]
fn generated_snapshots_follow_the_rotated_born_distribution() {
    let op = build_tfi::<f64>(3, 1.0, 0.8, false).unwrap();
    let psi = ground_state(&op).unwrap().ground_state;
    let basis = parse_basis("XXX").unwrap();
    let shots = 100_000usize;
    let dataset = generate_snapshots(&psi, &[basis.clone()], shots, 91).unwrap();
    let again = generate_snapshots(&psi, &[basis.clone()], shots, 91).unwrap();
    assert_eq!(dataset, again, "snapshot generation must be deterministic");

    let rotated = rotate_dense(&psi, &basis);
    let group = &dataset.groups()[0];
    assert_eq!(group.shots(), shots as u64);
    let mut tv = 0.0;
    for i in 0..rotated.dim() {
        let p = rotated.amplitude(BasisIndex(i)).norm_sqr();
        let config = SpinConfiguration::decode(BasisIndex(i), 3).unwrap();
        let count = group
            .outcomes()
            .iter()
            .find(|(s, _)| *s == config)
            .map_or(0, |(_, c)| *c);
        tv += (count as f64 / shots as f64 - p).abs();
    }
    tv *= 0.5;
    assert!(tv < 0.02, "empirical X-basis distribution off by TV {tv}");
}

#[test]
fn uniform_target_training_reaches_high_fidelity() {
    let n = 4;
    let amp = C::new(0.25, 0.0);
    let target = StateVector::from_fn(n, |_| amp).unwrap();
    let bases = [parse_basis("ZZZZ").unwrap(), parse_basis("XXXX").unwrap()];
    let dataset = generate_snapshots(&target, &bases, 20_000, 7).unwrap();

    let mut model = build_ansatz::<f64>(n, &AnsatzSpec::Rbm { hidden: 8 }, 0.05, 5).unwrap();
    let records = train_tomography(&mut model, &dataset, 0.25, 400).unwrap();
    assert_eq!(records.len(), 401);
    assert!(
        records.last().unwrap().loss < records[0].loss,
        "training never lowered the loss"
    );
    let fid = reconstruct_fidelity(&model, &target).unwrap();
    assert!(fid > 0.999, "uniform-target fidelity {fid}");
}

#[test]
fn multi_basis_training_beats_z_only_on_a_sign_structured_target() {
    let n = 4;
    let op = build_tfi::<f64>(n, 1.0, 1.0, true).unwrap();
    let gs = ground_state(&op).unwrap().ground_state;
    // Flip the signs of a scrambled subset of amplitudes: the computational
    // Born distribution is untouched, so only rotated bases see the change.
    let mut target = StateVector::from_fn(n, |s| {
        let i = s.encode().0;
        let sign = if (i.wrapping_mul(2654435761)) >> 28 & 1 == 1 {
            -1.0
        } else {
            1.0
        };
        C::new(sign, 0.0) * gs.amplitude(BasisIndex(i))
    })
    .unwrap();
    target.normalize().unwrap();

    let z_basis = parse_basis("ZZZZ").unwrap();
    let all = [
        z_basis.clone(),
        parse_basis("XXXX").unwrap(),
        parse_basis("YYYY").unwrap(),
    ];
    let shots = 50_000usize;
    let init = build_ansatz::<f64>(n, &AnsatzSpec::Rbm { hidden: 8 }, 0.05, 77).unwrap();

    for seed in [201u64, 202, 203, 204, 205] {
        // `generate_snapshots` seeds each basis by position, so the Z group
        // is shot-for-shot identical in both arms: the comparison is paired.
        let z_only = generate_snapshots(&target, std::slice::from_ref(&z_basis), shots, seed)
            .unwrap();
        let multi = generate_snapshots(&target, &all, shots, seed).unwrap();
        assert_eq!(z_only.groups()[0], multi.groups()[2]);

        let mut model_z = init.clone();
        let mut model_m = init.clone();
        train_tomography(&mut model_z, &z_only, 0.1, 5_000).unwrap();
        train_tomography(&mut model_m, &multi, 0.1, 5_000).unwrap();

        let fid_z = reconstruct_fidelity(&model_z, &target).unwrap();
        let fid_m = reconstruct_fidelity(&model_m, &target).unwrap();
        assert!(
            fid_m > fid_z,
            "seed {seed}: multi-basis fidelity {fid_m} did not beat Z-only {fid_z}"
        );
        assert!(
            fid_m - fid_z > 0.05,
            "seed {seed}: improvement {fid_m} over {fid_z} is not meaningful"
        );

        // The Z-only model still nails the computational Born weights even
        // though it cannot see the signs.
        let dense_z = dense_ansatz_state(&model_z).unwrap();
        let tv = born_tv(&dense_z, &target);
        assert!(tv < 0.02, "seed {seed}: Z-only Born distribution off by {tv}");
        assert!(
            fid_z < 0.9,
            "seed {seed}: Z-only arm unexpectedly learned the signs ({fid_z})"
        );
    }
}
