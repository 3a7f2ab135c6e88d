//! Operator-layer oracles: sparse connected elements against dense matrices,
//! Hermiticity checks, Jordan–Wigner fermion algebra, and model builders
//! against independently constructed Hamiltonians.

use nalgebra::DMatrix;
use nqs_core::exact;
use nqs_core::operators::{
    build_heisenberg_benchmark, build_tfi, jordan_wigner_free_fermions, LocalOperator, Pauli,
    PauliString,
};
use nqs_core::scalar::Cplx;
use nqs_core::spin::{full_basis, BasisIndex, SpinConfiguration};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C = Cplx<f64>;

fn random_operator(n: usize, terms: usize, seed: u64) -> LocalOperator<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let letters = [Pauli::X, Pauli::Y, Pauli::Z];
    let strings = (0..terms)
        .map(|_| {
            let coefficient = C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let support = rng.random_range(1..=3.min(n));
            let mut sites: Vec<usize> = Vec::new();
            while sites.len() < support {
                let site = rng.random_range(0..n);
                if !sites.contains(&site) {
                    sites.push(site);
                }
            }
            sites.sort_unstable();
            let factors: Vec<(usize, Pauli)> = sites
                .into_iter()
                .map(|site| (site, letters[rng.random_range(0..3)]))
                .collect();
            PauliString::new(coefficient, &factors).unwrap()
        })
        .collect();
    LocalOperator::from_terms(n, strings).unwrap()
}

/// Rebuild the dense matrix column by column from `visit_connected` and
/// compare against `dense_matrix`.
#[test]
fn connected_elements_reproduce_the_dense_matrix() {
    for seed in 0..6u64 {
        let n = 4;
        let op = random_operator(n, 7, seed);
        let dense = op.dense_matrix().unwrap();
        let dim = 1usize << n;
        let mut rebuilt = DMatrix::from_element(dim, dim, C::new(0.0, 0.0));
        for s in full_basis(n).unwrap() {
            // `visit_connected` yields ⟨s|Ô|s′⟩, so the visited configuration
            // is the row and the flipped one the column.
            let row = s.encode().0;
            op.visit_connected(&s, |flips, value| {
                let col = s.flipped_many(flips).unwrap().encode().0;
                rebuilt[(row, col)] += value;
            })
            .unwrap();
        }
        let diff = (&dense - &rebuilt).map(|z| z.norm()).max();
        assert!(diff < 1e-12, "seed {seed}: max deviation {diff}");
    }
}

#[test]
fn hermitian_check_accepts_h_plus_adjoint_and_rejects_skewed_sums() {
    let op = random_operator(4, 6, 31);
    let hermitian = op.add(&op.adjoint()).unwrap();
    assert!(hermitian.hermitian_check());
    let dense = hermitian.dense_matrix().unwrap();
    let deviation = (&dense - &dense.adjoint()).map(|z| z.norm()).max();
    assert!(deviation < 1e-12);

    let skewed = op
        .add(&LocalOperator::from_terms(4, vec![PauliString::identity(C::new(0.0, 1.0))]).unwrap())
        .unwrap();
    let skewed = skewed.add(&skewed.adjoint()).unwrap();
    // i·1 + (i·1)† cancels, so force a genuinely non-Hermitian coefficient.
    let bad = LocalOperator::from_terms(
        3,
        vec![PauliString::new(C::new(0.0, 1.0), &[(0, Pauli::Z)]).unwrap()],
    )
    .unwrap();
    assert!(!bad.hermitian_check());
    assert!(skewed.hermitian_check());
}

#[test]
fn tfi_open_two_site_spectrum_is_exact() {
    // H = −Z₀Z₁ at J = 1, h = 0: ground energy −1 with degenerate ↑↑ / ↓↓.
    let op = build_tfi::<f64>(2, 1.0, 0.0, false).unwrap();
    let spectral = exact::ground_state(&op).unwrap();
    assert!((spectral.ground_energy - (-1.0)).abs() < 1e-12);

    // At J = 0, h = 1 the model is a free transverse field: E₀ = −N.
    let op = build_tfi::<f64>(3, 0.0, 1.0, false).unwrap();
    let spectral = exact::ground_state(&op).unwrap();
    assert!((spectral.ground_energy - (-3.0)).abs() < 1e-10);
}

#[test]
fn tfi_periodic_matches_independent_dense_construction() {
    let (n, j, h) = (4, 1.3, 0.7);
    let op = build_tfi::<f64>(n, j, h, true).unwrap();
    let dense = op.dense_matrix().unwrap();
    let dim = 1usize << n;
    let mut oracle = DMatrix::from_element(dim, dim, C::new(0.0, 0.0));
    for index in 0..dim {
        let s = SpinConfiguration::decode(BasisIndex(index), n).unwrap();
        let mut zz = 0.0;
        for site in 0..n {
            let next = (site + 1) % n;
            zz += f64::from(s.spin(site) * s.spin(next));
        }
        oracle[(index, index)] += C::new(-j * zz, 0.0);
        // The field term enters with +h: H = −J Σ σᶻσᶻ + h Σ σˣ.
        for site in 0..n {
            let flipped = s.flipped(site).unwrap().encode().0;
            oracle[(flipped, index)] += C::new(h, 0.0);
        }
    }
    let diff = (&dense - &oracle).map(|z| z.norm()).max();
    assert!(diff < 1e-12, "max deviation {diff}");
}

#[test]
fn heisenberg_benchmark_is_hermitian_with_expected_term_count() {
    let op = build_heisenberg_benchmark::<f64>(4, [1.0, 1.0, -1.0], [1.0, 1.5, 3.0]).unwrap();
    assert!(op.hermitian_check());
    // 3 couplings × 3 bonds + 3 fields × 4 sites.
    assert_eq!(op.terms().len(), 21);
    let dense = op.dense_matrix().unwrap();
    let deviation = (&dense - &dense.adjoint()).map(|z| z.norm()).max();
    assert!(deviation < 1e-12);
}

/// Jordan–Wigner fermion mode c_i = (Π_{j<i} Z_j)(X_i + iY_i)/2.
fn jw_mode(n: usize, i: usize) -> LocalOperator<f64> {
    let mut x_factors: Vec<(usize, Pauli)> = (0..i).map(|j| (j, Pauli::Z)).collect();
    let mut y_factors = x_factors.clone();
    x_factors.push((i, Pauli::X));
    y_factors.push((i, Pauli::Y));
    LocalOperator::from_terms(
        n,
        vec![
            PauliString::new(C::new(0.5, 0.0), &x_factors).unwrap(),
            PauliString::new(C::new(0.0, 0.5), &y_factors).unwrap(),
        ],
    )
    .unwrap()
}

#[test]
fn jordan_wigner_modes_satisfy_canonical_anticommutators() {
    let n = 5;
    let dim = 1usize << n;
    let modes: Vec<DMatrix<C>> = (0..n).map(|i| jw_mode(n, i).dense_matrix().unwrap()).collect();
    let identity = DMatrix::<C>::identity(dim, dim);
    for i in 0..n {
        for j in 0..n {
            let dagger_j = modes[j].adjoint();
            let anti = &modes[i] * &dagger_j + &dagger_j * &modes[i];
            let expect = if i == j { identity.clone() } else { DMatrix::from_element(dim, dim, C::new(0.0, 0.0)) };
            let deviation = (&anti - &expect).map(|z| z.norm()).max();
            assert!(deviation < 1e-12, "{{c_{i}, c_{j}†}} deviates by {deviation}");
            let plain = &modes[i] * &modes[j] + &modes[j] * &modes[i];
            let deviation = plain.map(|z| z.norm()).max();
            assert!(deviation < 1e-12, "{{c_{i}, c_{j}}} deviates by {deviation}");
        }
    }
}

#[test]
fn free_fermion_ground_energy_equals_filled_band_sum() {
    // Open hopping chain −(1/2)Σ(c†c + h.c.): single-particle energies are
    // −cos(πk/(N+1)); the many-body ground state fills the negative ones.
    let n = 6;
    let op = jordan_wigner_free_fermions::<f64>(n).unwrap();
    let spectral = exact::ground_state(&op).unwrap();
    let filled: f64 = (1..=n)
        .map(|k| -(std::f64::consts::PI * k as f64 / (n as f64 + 1.0)).cos())
        .filter(|&e| e < 0.0)
        .sum();
    assert!(
        (spectral.ground_energy - filled).abs() < 1e-10,
        "many-body {} vs band sum {filled}",
        spectral.ground_energy
    );
}

#[test]
fn pauli_composition_matches_dense_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let a = random_operator(3, 4, rng.random());
        let b = random_operator(3, 4, rng.random());
        let composed = a.compose(&b).unwrap().dense_matrix().unwrap();
        let product = a.dense_matrix().unwrap() * b.dense_matrix().unwrap();
        let deviation = (&composed - &product).map(|z| z.norm()).max();
        assert!(deviation < 1e-12, "composition deviates by {deviation}");
    }
}
