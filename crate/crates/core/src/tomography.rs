//! Quantum state tomography from projective measurement snapshots.
//!
//! A snapshot measures every site once in a local Pauli basis: each site is
//! rotated into its measurement frame and read out in the computational
//! basis. Site `i` measured in basis `B_i` is rotated by
//!
//! * `Z` — identity (no rotation),
//! * `X` — the Hadamard `H`,
//! * `Y` — `H·S†`,
//!
//! so the rotated state's Born distribution gives the outcome probabilities.
//! Reconstruction fits an ansatz by gradient descent on the mean negative
//! log-likelihood of the observed snapshots. The likelihood normalizer is
//! evaluated by full basis summation, so training is limited to enumerable
//! system sizes; the rotated amplitude itself expands one branch per non-`Z`
//! site and is capped at [`MAX_ROTATED_SITES`] such sites.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::time::Instant;

use nalgebra::DVector;

use crate::ansatz::{AnsatzState, LogAmp};
use crate::error::{Error, Result};
use crate::exact::{self, StateVector};
use crate::operators::Pauli;
use crate::scalar::{derive_seed, exp, is_finite_c, ln, real, Cplx, Real};
use crate::spin::{full_basis, SpinConfiguration};

/// Hard cap on non-`Z` sites in one measurement basis. Every rotated site
/// doubles the number of branches in the rotated amplitude, so this bounds
/// the expansion at 2^20 terms.
pub const MAX_ROTATED_SITES: usize = 20;

/// Single-site rotation into the measurement frame of `letter`.
///
/// Row index is the rotated-frame outcome, column index the original
/// configuration, with index 0 = up and 1 = down. All three matrices are
/// unitary; `Z` is the identity.
pub fn rotation_matrix<T: Real>(letter: Pauli) -> [[Cplx<T>; 2]; 2] {
    let zero = Cplx::new(T::zero(), T::zero());
    let one = Cplx::new(T::one(), T::zero());
    let r = Cplx::new(real::<T>(std::f64::consts::FRAC_1_SQRT_2), T::zero());
    let ri = Cplx::new(T::zero(), real::<T>(std::f64::consts::FRAC_1_SQRT_2));
    match letter {
        Pauli::Z => [[one, zero], [zero, one]],
        Pauli::X => [[r, r], [r, -r]],
        Pauli::Y => [[r, -ri], [r, ri]],
    }
}

/// Format a per-site basis as a letter string, site 0 first (e.g. `ZXZZ`).
pub fn basis_token(basis: &[Pauli]) -> String {
    basis.iter().map(|p| p.letter()).collect()
}

/// Parse a basis letter string (`Z`/`X`/`Y`, case-insensitive), site 0 first.
pub fn parse_basis(token: &str) -> Result<Vec<Pauli>> {
    if token.is_empty() {
        return Err(Error::Parse("empty basis token".into()));
    }
    token.chars().map(Pauli::from_letter).collect()
}

/// One projective measurement record: per-site basis letters and the outcome
/// observed in the rotated frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    basis: Vec<Pauli>,
    outcome: SpinConfiguration,
}

impl Snapshot {
    /// Build a snapshot; the basis must assign one letter per outcome site.
    pub fn new(basis: Vec<Pauli>, outcome: SpinConfiguration) -> Result<Self> {
        if basis.len() != outcome.n_sites() {
            return Err(Error::Domain(format!(
                "basis has {} letters but the outcome has {} sites",
                basis.len(),
                outcome.n_sites()
            )));
        }
        Ok(Self { basis, outcome })
    }

    /// Per-site measurement basis, site 0 first.
    pub fn basis(&self) -> &[Pauli] {
        &self.basis
    }

    /// Measured configuration in the rotated frame.
    pub fn outcome(&self) -> &SpinConfiguration {
        &self.outcome
    }
}

/// Snapshots that share one measurement basis, with duplicate outcomes
/// collapsed into counts. Always holds at least one outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisGroup {
    basis: Vec<Pauli>,
    outcomes: Vec<(SpinConfiguration, u64)>,
    shots: u64,
}

impl BasisGroup {
    /// Per-site measurement basis, site 0 first.
    pub fn basis(&self) -> &[Pauli] {
        &self.basis
    }

    /// Letter-string form of the basis.
    pub fn basis_token(&self) -> String {
        basis_token(&self.basis)
    }

    /// Distinct outcomes with their multiplicities, in basis-index order.
    pub fn outcomes(&self) -> &[(SpinConfiguration, u64)] {
        &self.outcomes
    }

    /// Total number of shots in this group.
    pub fn shots(&self) -> u64 {
        self.shots
    }

    /// True when every site is measured in the computational (`Z`) basis.
    pub fn is_computational(&self) -> bool {
        self.basis.iter().all(|&p| p == Pauli::Z)
    }
}

/// A measurement record grouped by basis, the input to likelihood training.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnapshotDataset {
    n_sites: usize,
    groups: Vec<BasisGroup>,
}

impl SnapshotDataset {
    /// Group raw snapshots by basis string. All snapshots must share one
    /// site count and at least one snapshot is required.
    pub fn from_snapshots(snapshots: Vec<Snapshot>) -> Result<Self> {
        let n_sites = match snapshots.first() {
            Some(s) => s.outcome.n_sites(),
            None => return Err(Error::Domain("dataset needs at least one snapshot".into())),
        };
        let mut tallies: BTreeMap<String, (Vec<Pauli>, BTreeMap<usize, (SpinConfiguration, u64)>)> =
            BTreeMap::new();
        for snapshot in snapshots {
            if snapshot.outcome.n_sites() != n_sites {
                return Err(Error::Domain(format!(
                    "mixed site counts in dataset: {} and {}",
                    n_sites,
                    snapshot.outcome.n_sites()
                )));
            }
            let key = basis_token(&snapshot.basis);
            let entry = tallies.entry(key).or_insert_with(|| (snapshot.basis.clone(), BTreeMap::new()));
            entry
                .1
                .entry(snapshot.outcome.encode().0)
                .or_insert((snapshot.outcome, 0))
                .1 += 1;
        }
        let groups = tallies
            .into_values()
            .map(|(basis, outcomes)| {
                let outcomes: Vec<(SpinConfiguration, u64)> = outcomes.into_values().collect();
                let shots = outcomes.iter().map(|&(_, c)| c).sum();
                BasisGroup { basis, outcomes, shots }
            })
            .collect();
        Ok(Self { n_sites, groups })
    }

    /// Number of sites per snapshot.
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Basis groups in basis-token order.
    pub fn groups(&self) -> &[BasisGroup] {
        &self.groups
    }

    /// Total number of shots across all groups.
    pub fn total_shots(&self) -> u64 {
        self.groups.iter().map(BasisGroup::shots).sum()
    }

    /// True when at least one group measures every site in the `Z` basis.
    pub fn has_computational_group(&self) -> bool {
        self.groups.iter().any(BasisGroup::is_computational)
    }

    /// Write one `BASIS OUTCOME` line per shot (e.g. `ZXZZ udud`), groups in
    /// stored order and duplicate outcomes repeated by multiplicity.
    pub fn write_lines<W: Write>(&self, writer: &mut W) -> Result<()> {
        for group in &self.groups {
            let token = group.basis_token();
            for (outcome, count) in &group.outcomes {
                let line = format!("{token} {outcome}\n");
                for _ in 0..*count {
                    writer.write_all(line.as_bytes())?;
                }
            }
        }
        Ok(())
    }

    /// Parse a snapshot file written by [`SnapshotDataset::write_lines`]:
    /// one `BASIS OUTCOME` pair per line, blank lines ignored.
    pub fn read_lines<R: BufRead>(reader: R) -> Result<Self> {
        let mut snapshots = Vec::new();
        for (number, line) in reader.lines().enumerate() {
            let line = line?;
            let mut fields = line.split_whitespace();
            let Some(basis) = fields.next() else { continue };
            let outcome = fields.next().ok_or_else(|| {
                Error::Parse(format!("line {}: missing outcome token", number + 1))
            })?;
            if fields.next().is_some() {
                return Err(Error::Parse(format!(
                    "line {}: expected `BASIS OUTCOME`, got extra fields",
                    number + 1
                )));
            }
            let basis = parse_basis(basis)?;
            let outcome = SpinConfiguration::parse_token(outcome)?;
            snapshots.push(Snapshot::new(basis, outcome)?);
        }
        Self::from_snapshots(snapshots)
    }
}

/// Draw projective measurement snapshots from a dense state.
///
/// Every entry of `bases` is measured `shots_per_basis` times by rotating the
/// state into that frame and sampling its Born distribution. Sampling is
/// deterministic per seed, with one derived stream per basis entry; repeated
/// basis entries are merged into one group in the returned dataset.
pub fn generate_snapshots<T: Real>(
    state: &StateVector<T>,
    bases: &[Vec<Pauli>],
    shots_per_basis: usize,
    seed: u64,
) -> Result<SnapshotDataset> {
    if bases.is_empty() {
        return Err(Error::Domain("need at least one measurement basis".into()));
    }
    if shots_per_basis == 0 {
        return Err(Error::Domain("shots_per_basis must be at least 1".into()));
    }
    let n = state.n_sites();
    let mut snapshots = Vec::new();
    for (which, basis) in bases.iter().enumerate() {
        if basis.len() != n {
            return Err(Error::Domain(format!(
                "basis {} has {} letters for a {n}-site state",
                basis_token(basis),
                basis.len()
            )));
        }
        let mut rotated = state.clone();
        for (site, &letter) in basis.iter().enumerate() {
            if letter != Pauli::Z {
                rotated = exact::apply_single_site_unitary(&rotated, site, &rotation_matrix(letter))?;
            }
        }
        let outcomes = exact::born_sample(&rotated, shots_per_basis, derive_seed(seed, which as u64))?;
        for outcome in outcomes {
            snapshots.push(Snapshot::new(basis.clone(), outcome)?);
        }
    }
    SnapshotDataset::from_snapshots(snapshots)
}

/// One evaluated rotated amplitude; `derivative` is the branch-weighted log
/// derivative vector when it was requested.
struct RotatedEval<T: Real> {
    log: Cplx<T>,
    derivative: Option<DVector<Cplx<T>>>,
}

/// Evaluate log⟨outcome|Û_B|ψ_θ⟩ by expanding one branch per non-`Z` site.
///
/// Returns `Ok(None)` when the rotated amplitude is exactly zero. Branch
/// amplitudes are taken from cached log-ratios against the outcome
/// configuration when its own amplitude is finite, and from direct
/// evaluations otherwise; the branch sum is accumulated in a streaming
/// log-sum-exp so no branch table is materialized.
fn rotated_eval<T: Real, A: AnsatzState<T>>(
    ansatz: &A,
    basis: &[Pauli],
    outcome: &SpinConfiguration,
    with_derivative: bool,
) -> Result<Option<RotatedEval<T>>> {
    let n = ansatz.n_sites();
    if basis.len() != n || outcome.n_sites() != n {
        return Err(Error::Domain(format!(
            "basis of {} letters and outcome of {} sites for a {n}-site ansatz",
            basis.len(),
            outcome.n_sites()
        )));
    }
    let rotated: Vec<usize> = (0..n).filter(|&site| basis[site] != Pauli::Z).collect();
    let k = rotated.len();
    if k > MAX_ROTATED_SITES {
        return Err(Error::Capacity(format!(
            "basis {} rotates {k} sites, more than the cap of {MAX_ROTATED_SITES}",
            basis_token(basis)
        )));
    }
    if k == 0 {
        return Ok(match ansatz.log_amplitude(outcome) {
            LogAmp::Zero => None,
            LogAmp::Finite(log) => {
                if !is_finite_c(log) {
                    return Err(Error::Numerical(format!(
                        "non-finite log amplitude at outcome {outcome}"
                    )));
                }
                let derivative = with_derivative.then(|| ansatz.log_derivatives(outcome));
                Some(RotatedEval { log, derivative })
            }
        });
    }

    // Row of the site's rotation matrix selected by the measured outcome,
    // and the outcome's own column index, per rotated site.
    let rows: Vec<[Cplx<T>; 2]> = rotated
        .iter()
        .map(|&site| {
            let m = rotation_matrix::<T>(basis[site]);
            m[usize::from(outcome.spin(site) < 0)]
        })
        .collect();
    let outcome_cols: Vec<usize> = rotated
        .iter()
        .map(|&site| usize::from(outcome.spin(site) < 0))
        .collect();

    let cache = ansatz.make_cache(outcome);
    let base = ansatz.cached_log_amplitude(&cache).finite();

    let zero = Cplx::new(T::zero(), T::zero());
    let mut max_re: Option<T> = None;
    let mut sum = zero;
    let mut deriv_sum = with_derivative.then(|| DVector::from_element(ansatz.parameter_count(), zero));
    let mut flips: Vec<usize> = Vec::with_capacity(k);

    for branch in 0u64..(1u64 << k) {
        let mut coefficient = Cplx::new(T::one(), T::zero());
        flips.clear();
        for j in 0..k {
            let col = (branch >> j & 1) as usize;
            coefficient *= rows[j][col];
            if col != outcome_cols[j] {
                flips.push(rotated[j]);
            }
        }
        let log = match base {
            Some(b) => ansatz.cached_log_ratio(&cache, outcome, &flips).finite().map(|r| b + r),
            None => {
                let s = outcome.flipped_many(&flips)?;
                ansatz.log_amplitude(&s).finite()
            }
        };
        let Some(log) = log else { continue };
        if !is_finite_c(log) {
            return Err(Error::Numerical(format!(
                "non-finite branch amplitude in basis {}",
                basis_token(basis)
            )));
        }
        // Streaming log-sum-exp: rescale the running sums when a branch
        // raises the reference exponent.
        let reference = match max_re {
            Some(m) if m >= log.re => m,
            _ => {
                if let Some(m) = max_re {
                    let scale = Cplx::new(exp(m - log.re), T::zero());
                    sum *= scale;
                    if let Some(acc) = deriv_sum.as_mut() {
                        *acc *= scale;
                    }
                }
                max_re = Some(log.re);
                log.re
            }
        };
        let weight = coefficient * (log - Cplx::new(reference, T::zero())).exp();
        sum += weight;
        if let Some(acc) = deriv_sum.as_mut() {
            let s = outcome.flipped_many(&flips)?;
            acc.axpy(weight, &ansatz.log_derivatives(&s), Cplx::new(T::one(), T::zero()));
        }
    }

    let Some(reference) = max_re else { return Ok(None) };
    if sum.norm_sqr() == T::zero() {
        return Ok(None);
    }
    let log = Cplx::new(reference, T::zero()) + sum.ln();
    if !is_finite_c(log) {
        return Err(Error::Numerical(format!(
            "rotated amplitude overflowed in basis {}",
            basis_token(basis)
        )));
    }
    let derivative = deriv_sum.map(|acc| acc / sum);
    Ok(Some(RotatedEval { log, derivative }))
}

/// log⟨outcome|Û_B|ψ_θ⟩ for one measurement basis, `LogAmp::Zero` when the
/// rotated amplitude vanishes.
///
/// For an all-`Z` basis this is exactly `log_amplitude`; otherwise the sum
/// over 2^k branches (k = non-`Z` sites, capped at [`MAX_ROTATED_SITES`]) is
/// evaluated with a streaming log-sum-exp.
pub fn rotated_log_amplitude<T: Real, A: AnsatzState<T>>(
    ansatz: &A,
    basis: &[Pauli],
    outcome: &SpinConfiguration,
) -> Result<LogAmp<T>> {
    Ok(match rotated_eval(ansatz, basis, outcome, false)? {
        Some(eval) => LogAmp::Finite(eval.log),
        None => LogAmp::Zero,
    })
}

/// Mean negative log-likelihood of a snapshot dataset under the ansatz, with
/// its parameter gradient.
///
/// The loss is `ln Z_θ − (2/S) Σ c_s Re log ψ_θ^B(s)` over all `S` shots,
/// where `Z_θ = Σ_s |ψ_θ(s)|²` is evaluated by full basis summation (the
/// rotations are unitary, so one normalizer serves every basis). Up to a
/// constant, this is the Kullback–Leibler divergence from the empirical
/// outcome distributions to the model's Born distributions. The gradient
/// convention matches the energy gradient: the loss derivative with respect
/// to the real (imaginary) part of parameter `p` is the real (imaginary)
/// part of component `p`.
pub fn kl_loss<T: Real, A: AnsatzState<T>>(
    ansatz: &A,
    dataset: &SnapshotDataset,
) -> Result<(T, DVector<Cplx<T>>)> {
    let n = ansatz.n_sites();
    if dataset.n_sites() != n {
        return Err(Error::Domain(format!(
            "dataset has {} sites but the ansatz has {n}",
            dataset.n_sites()
        )));
    }
    let zero = Cplx::new(T::zero(), T::zero());
    let two = real::<T>(2.0);

    // Full-basis pass: ln Z and the Born-weighted mean conjugate derivative.
    let mut basis_logs: Vec<(SpinConfiguration, Cplx<T>)> = Vec::new();
    let mut shift: Option<T> = None;
    for s in full_basis(n)? {
        if let LogAmp::Finite(log) = ansatz.log_amplitude(&s) {
            if !is_finite_c(log) {
                return Err(Error::Numerical(format!(
                    "non-finite log amplitude at configuration {s}"
                )));
            }
            let re2 = log.re + log.re;
            shift = Some(match shift {
                Some(m) if m >= re2 => m,
                _ => re2,
            });
            basis_logs.push((s, log));
        }
    }
    let shift = shift.ok_or_else(|| {
        Error::Domain("ansatz vanishes on the whole basis; likelihood undefined".into())
    })?;
    let mut normalizer = T::zero();
    let mut mean_conj_deriv = DVector::from_element(ansatz.parameter_count(), zero);
    for (s, log) in &basis_logs {
        let weight = exp(log.re + log.re - shift);
        normalizer += weight;
        mean_conj_deriv.axpy(
            Cplx::new(weight, T::zero()),
            &ansatz.log_derivatives(s).conjugate(),
            Cplx::new(T::one(), T::zero()),
        );
    }
    let log_normalizer = shift + ln(normalizer);
    mean_conj_deriv /= Cplx::new(normalizer, T::zero());

    // Snapshot pass: mean rotated log modulus and mean conjugate
    // branch-weighted derivative over all shots.
    let total = real::<T>(dataset.total_shots() as f64);
    let mut mean_log_modulus = T::zero();
    let mut snapshot_conj_deriv = DVector::from_element(ansatz.parameter_count(), zero);
    for group in dataset.groups() {
        for (outcome, count) in group.outcomes() {
            let eval = rotated_eval(ansatz, group.basis(), outcome, true)?.ok_or_else(|| {
                Error::ZeroAmplitudeSnapshot {
                    basis: group.basis_token(),
                    outcome: outcome.token(),
                }
            })?;
            let count = real::<T>(*count as f64);
            mean_log_modulus += count * eval.log.re;
            let derivative = eval.derivative.expect("requested derivative");
            snapshot_conj_deriv.axpy(
                Cplx::new(count, T::zero()),
                &derivative.conjugate(),
                Cplx::new(T::one(), T::zero()),
            );
        }
    }
    mean_log_modulus /= total;
    snapshot_conj_deriv /= Cplx::new(total, T::zero());

    let loss = log_normalizer - two * mean_log_modulus;
    let mut gradient = mean_conj_deriv - snapshot_conj_deriv;
    gradient *= Cplx::new(two, T::zero());
    if !loss.is_finite() || gradient.iter().any(|g| !is_finite_c(*g)) {
        return Err(Error::Numerical("non-finite tomography loss or gradient".into()));
    }
    Ok((loss, gradient))
}

/// One step of a tomography training run.
#[derive(Debug, Clone)]
pub struct TomographyRecord<T: Real> {
    /// Step index, 0 for the initial evaluation.
    pub step: usize,
    /// Mean negative log-likelihood before the step's update.
    pub loss: T,
    /// Euclidean norm of the loss gradient at this step.
    pub gradient_norm: T,
    /// Wall-clock seconds spent on this step.
    pub seconds: f64,
}

/// Fit an ansatz to a snapshot dataset by gradient descent on the mean
/// negative log-likelihood.
///
/// Requires at least one all-`Z` basis group: without computational-basis
/// coverage the likelihood cannot pin the amplitude moduli. Returns
/// `n_steps + 1` records; the last one evaluates the final parameters. A
/// non-finite loss or update restores the last finite parameters on the
/// ansatz and fails with [`Error::Diverged`].
pub fn train_tomography<T: Real, A: AnsatzState<T>>(
    ansatz: &mut A,
    dataset: &SnapshotDataset,
    learning_rate: T,
    n_steps: usize,
) -> Result<Vec<TomographyRecord<T>>> {
    if !learning_rate.is_finite() || learning_rate < T::zero() {
        return Err(Error::Config("tomography learning rate must be finite and >= 0".into()));
    }
    if !dataset.has_computational_group() {
        return Err(Error::Config(
            "tomography training needs at least one all-Z basis group".into(),
        ));
    }
    let rate = Cplx::new(learning_rate, T::zero());
    let mut last_good = ansatz.parameters();
    let mut records = Vec::with_capacity(n_steps + 1);
    for step in 0..=n_steps {
        let start = Instant::now();
        let (loss, gradient) = match kl_loss(ansatz, dataset) {
            Ok(result) => result,
            Err(Error::Numerical(_)) => {
                ansatz.set_parameters(&last_good)?;
                return Err(Error::Diverged { step });
            }
            Err(other) => {
                ansatz.set_parameters(&last_good)?;
                return Err(other);
            }
        };
        records.push(TomographyRecord {
            step,
            loss,
            gradient_norm: gradient.norm(),
            seconds: start.elapsed().as_secs_f64(),
        });
        if step == n_steps {
            break;
        }
        last_good = ansatz.parameters();
        let mut updated = last_good.clone();
        updated.axpy(-rate, &gradient, Cplx::new(T::one(), T::zero()));
        if updated.iter().any(|p| !is_finite_c(*p)) {
            ansatz.set_parameters(&last_good)?;
            return Err(Error::Diverged { step });
        }
        ansatz.set_parameters(&updated)?;
    }
    Ok(records)
}

/// Squared overlap |⟨reference|ψ_θ⟩|² between the normalized ansatz state and
/// a dense reference, by full basis evaluation.
pub fn reconstruct_fidelity<T: Real, A: AnsatzState<T>>(
    ansatz: &A,
    reference: &StateVector<T>,
) -> Result<T> {
    if ansatz.n_sites() != reference.n_sites() {
        return Err(Error::Domain(format!(
            "ansatz has {} sites but the reference has {}",
            ansatz.n_sites(),
            reference.n_sites()
        )));
    }
    let dense = exact::dense_ansatz_state(ansatz)?;
    exact::fidelity(&dense, reference)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::Rbm;
    use crate::exact::table_ansatz;
    use crate::operators::build_tfi;
    use crate::spin::BasisIndex;

    type C = Cplx<f64>;

    fn letters(token: &str) -> Vec<Pauli> {
        parse_basis(token).unwrap()
    }

    fn small_rbm(n_visible: usize, n_hidden: usize) -> Rbm<f64> {
        let mut rbm = Rbm::zeros(n_visible, n_hidden).unwrap();
        let count = rbm.parameter_count();
        let params = DVector::from_fn(count, |p, _| {
            let x = (p as f64 + 1.0) * 0.7;
            C::new(0.11 * x.sin(), 0.09 * (1.7 * x).cos())
        });
        rbm.set_parameters(&params).unwrap();
        rbm
    }

    #[test]
    fn rotation_matrices_are_unitary() {
        for letter in [Pauli::X, Pauli::Y, Pauli::Z] {
            let m = rotation_matrix::<f64>(letter);
            for row in 0..2 {
                for col in 0..2 {
                    let mut dot = C::new(0.0, 0.0);
                    for k in 0..2 {
                        dot += m[k][row].conj() * m[k][col];
                    }
                    let expect = if row == col { 1.0 } else { 0.0 };
                    assert!((dot - C::new(expect, 0.0)).norm() < 1e-14, "{letter:?}");
                }
            }
        }
    }

    #[test]
    fn rotations_map_their_eigenstates_to_up() {
        // |+⟩ = (|u⟩+|d⟩)/√2 and |+i⟩ = (|u⟩+i|d⟩)/√2 must land on |u⟩.
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let plus = StateVector::<f64>::from_fn(1, |_| C::new(r, 0.0)).unwrap();
        let rotated = exact::apply_single_site_unitary(&plus, 0, &rotation_matrix(Pauli::X)).unwrap();
        assert!((rotated.amplitude(BasisIndex(0)) - C::new(1.0, 0.0)).norm() < 1e-14);
        assert!(rotated.amplitude(BasisIndex(1)).norm() < 1e-14);

        let plus_i = StateVector::<f64>::from_fn(1, |s| {
            if s.spin(0) > 0 { C::new(r, 0.0) } else { C::new(0.0, r) }
        })
        .unwrap();
        let rotated = exact::apply_single_site_unitary(&plus_i, 0, &rotation_matrix(Pauli::Y)).unwrap();
        assert!((rotated.amplitude(BasisIndex(0)) - C::new(1.0, 0.0)).norm() < 1e-14);
        assert!(rotated.amplitude(BasisIndex(1)).norm() < 1e-14);
    }

    #[test]
    fn all_z_basis_reduces_to_log_amplitude() {
        let rbm = small_rbm(4, 3);
        let basis = letters("ZZZZ");
        for index in 0..16usize {
            let s = SpinConfiguration::decode(BasisIndex(index), 4).unwrap();
            let direct = rbm.log_amplitude(&s).finite().unwrap();
            let rotated = rotated_log_amplitude(&rbm, &basis, &s).unwrap().finite().unwrap();
            assert_eq!(direct, rotated);
        }
    }

    #[test]
    fn rotated_amplitude_matches_dense_rotation() {
        // Oracle: rotate the dense state with single-site unitaries and
        // compare amplitudes outcome by outcome.
        let mut state = StateVector::<f64>::from_fn(3, |s| {
            let idx = s.encode().0 as f64;
            C::new(0.3 + 0.1 * idx.sin(), 0.2 * (0.7 * idx).cos())
        })
        .unwrap();
        state.normalize().unwrap();
        let ansatz = table_ansatz(&state);
        for token in ["XZY", "YYX", "ZXZ", "XXX"] {
            let basis = letters(token);
            let mut rotated = state.clone();
            for (site, &letter) in basis.iter().enumerate() {
                if letter != Pauli::Z {
                    rotated =
                        exact::apply_single_site_unitary(&rotated, site, &rotation_matrix(letter))
                            .unwrap();
                }
            }
            for index in 0..8usize {
                let outcome = SpinConfiguration::decode(BasisIndex(index), 3).unwrap();
                let expected = rotated.amplitude(BasisIndex(index));
                match rotated_log_amplitude(&ansatz, &basis, &outcome).unwrap() {
                    LogAmp::Finite(log) => {
                        assert!((log.exp() - expected).norm() < 1e-12, "{token} {outcome}");
                    }
                    LogAmp::Zero => assert!(expected.norm() < 1e-14, "{token} {outcome}"),
                }
            }
        }
    }

    #[test]
    fn rotated_site_count_is_capped() {
        let rbm = Rbm::<f64>::zeros(MAX_ROTATED_SITES + 2, 1).unwrap();
        let basis = vec![Pauli::X; MAX_ROTATED_SITES + 2];
        let outcome = SpinConfiguration::all_up(MAX_ROTATED_SITES + 2).unwrap();
        assert!(matches!(
            rotated_log_amplitude(&rbm, &basis, &outcome),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn snapshots_of_all_up_state_in_z_are_all_up() {
        let state = StateVector::<f64>::basis_state(3, BasisIndex(0)).unwrap();
        let dataset = generate_snapshots(&state, &[letters("ZZZ")], 40, 11).unwrap();
        assert_eq!(dataset.groups().len(), 1);
        let group = &dataset.groups()[0];
        assert_eq!(group.shots(), 40);
        assert_eq!(group.outcomes().len(), 1);
        assert_eq!(group.outcomes()[0].0.encode(), BasisIndex(0));
        assert_eq!(group.outcomes()[0].1, 40);
    }

    #[test]
    fn snapshots_in_x_basis_spread_and_are_deterministic() {
        let state = StateVector::<f64>::basis_state(3, BasisIndex(0)).unwrap();
        let a = generate_snapshots(&state, &[letters("XXX")], 128, 5).unwrap();
        let b = generate_snapshots(&state, &[letters("XXX")], 128, 5).unwrap();
        let c = generate_snapshots(&state, &[letters("XXX")], 128, 6).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        // |↑↑↑⟩ rotated by H per site is uniform over all 8 outcomes.
        assert!(a.groups()[0].outcomes().len() >= 4);
        assert_eq!(a.total_shots(), 128);
    }

    #[test]
    fn snapshot_file_round_trips() {
        let state = StateVector::<f64>::basis_state(2, BasisIndex(0)).unwrap();
        let dataset =
            generate_snapshots(&state, &[letters("ZZ"), letters("XY")], 25, 3).unwrap();
        let mut buffer = Vec::new();
        dataset.write_lines(&mut buffer).unwrap();
        let text = String::from_utf8(buffer.clone()).unwrap();
        assert_eq!(text.lines().count(), 50);
        assert!(text.lines().all(|l| l.len() == 5 && l.as_bytes()[2] == b' '));
        let back = SnapshotDataset::read_lines(buffer.as_slice()).unwrap();
        assert_eq!(back, dataset);
    }

    #[test]
    fn snapshot_parsing_rejects_malformed_lines() {
        assert!(matches!(
            SnapshotDataset::read_lines("QZ uu\n".as_bytes()),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            SnapshotDataset::read_lines("ZZ u\n".as_bytes()),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            SnapshotDataset::read_lines("ZZ uu extra\n".as_bytes()),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            SnapshotDataset::read_lines("ZZ\n".as_bytes()),
            Err(Error::Parse(_))
        ));
        assert!(SnapshotDataset::read_lines("".as_bytes()).is_err());
    }

    #[test]
    fn truth_model_sits_at_the_entropy_floor_with_zero_gradient() {
        // A zero-parameter RBM is the uniform state. A dataset holding every
        // computational outcome exactly once is its exact Born distribution,
        // so the loss equals the empirical entropy and the gradient vanishes.
        let n = 3;
        let rbm = Rbm::<f64>::zeros(n, 2).unwrap();
        let mut snapshots = Vec::new();
        for index in 0..(1usize << n) {
            let outcome = SpinConfiguration::decode(BasisIndex(index), n).unwrap();
            snapshots.push(Snapshot::new(letters("ZZZ"), outcome).unwrap());
        }
        // The uniform state is |+⟩^N, so the all-X group has the all-up
        // point mass as its exact distribution.
        for _ in 0..8 {
            snapshots
                .push(Snapshot::new(letters("XXX"), SpinConfiguration::all_up(n).unwrap()).unwrap());
        }
        let dataset = SnapshotDataset::from_snapshots(snapshots).unwrap();
        let (loss, gradient) = kl_loss(&rbm, &dataset).unwrap();
        let floor = 0.5 * n as f64 * std::f64::consts::LN_2;
        assert!((loss - floor).abs() < 1e-12, "loss {loss} vs floor {floor}");
        assert!(gradient.norm() < 1e-9, "gradient norm {}", gradient.norm());
    }

    #[test]
    fn uniform_model_on_point_mass_pays_n_log_two() {
        let n = 3;
        let rbm = Rbm::<f64>::zeros(n, 2).unwrap();
        let all_up = SpinConfiguration::all_up(n).unwrap();
        let snapshots = (0..10)
            .map(|_| Snapshot::new(letters("ZZZ"), all_up.clone()).unwrap())
            .collect();
        let dataset = SnapshotDataset::from_snapshots(snapshots).unwrap();
        let (loss, _) = kl_loss(&rbm, &dataset).unwrap();
        let expected = n as f64 * std::f64::consts::LN_2;
        assert!((loss - expected).abs() < 1e-12, "loss {loss} vs {expected}");
    }

    #[test]
    fn kl_gradient_matches_finite_differences() {
        let hamiltonian = build_tfi(3, 1.0, 0.9, false).unwrap();
        let target = exact::ground_state(&hamiltonian).unwrap().ground_state;
        let dataset = generate_snapshots(
            &target,
            &[letters("ZZZ"), letters("XZY"), letters("YXZ")],
            60,
            7,
        )
        .unwrap();
        let rbm = small_rbm(3, 2);
        let (_, gradient) = kl_loss(&rbm, &dataset).unwrap();
        let h = 1e-6;
        let base = rbm.parameters();
        for p in 0..rbm.parameter_count() {
            for (direction, expected) in [(C::new(1.0, 0.0), gradient[p].re), (C::new(0.0, 1.0), gradient[p].im)] {
                let mut probe = rbm.clone();
                let mut params = base.clone();
                params[p] += direction * C::new(h, 0.0);
                probe.set_parameters(&params).unwrap();
                let (plus, _) = kl_loss(&probe, &dataset).unwrap();
                let mut params = base.clone();
                params[p] -= direction * C::new(h, 0.0);
                probe.set_parameters(&params).unwrap();
                let (minus, _) = kl_loss(&probe, &dataset).unwrap();
                let numeric = (plus - minus) / (2.0 * h);
                assert!(
                    (numeric - expected).abs() < 1e-5 * (1.0 + expected.abs()),
                    "component {p}: numeric {numeric} vs analytic {expected}"
                );
            }
        }
    }

    #[test]
    fn zero_model_amplitude_on_a_snapshot_is_reported() {
        let state = StateVector::<f64>::basis_state(2, BasisIndex(0)).unwrap();
        let ansatz = table_ansatz(&state);
        let dataset = SnapshotDataset::from_snapshots(vec![Snapshot::new(
            letters("ZZ"),
            SpinConfiguration::parse_token("dd").unwrap(),
        )
        .unwrap()])
        .unwrap();
        match kl_loss(&ansatz, &dataset) {
            Err(Error::ZeroAmplitudeSnapshot { basis, outcome }) => {
                assert_eq!(basis, "ZZ");
                assert_eq!(outcome, "dd");
            }
            other => panic!("expected zero-amplitude error, got {other:?}"),
        }
    }

    #[test]
    fn training_requires_computational_coverage() {
        let state = StateVector::<f64>::basis_state(2, BasisIndex(0)).unwrap();
        let dataset = generate_snapshots(&state, &[letters("XX")], 20, 1).unwrap();
        let mut rbm = Rbm::<f64>::zeros(2, 2).unwrap();
        assert!(matches!(
            train_tomography(&mut rbm, &dataset, 0.1, 5),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            train_tomography(&mut rbm, &dataset, -0.1, 5),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn training_lowers_the_loss_and_raises_fidelity() {
        let hamiltonian = build_tfi(2, 1.0, 0.8, false).unwrap();
        let target = exact::ground_state(&hamiltonian).unwrap().ground_state;
        let dataset = generate_snapshots(
            &target,
            &[letters("ZZ"), letters("XX"), letters("YZ")],
            400,
            21,
        )
        .unwrap();
        let mut rbm = small_rbm(2, 2);
        let before = reconstruct_fidelity(&rbm, &target).unwrap();
        let records = train_tomography(&mut rbm, &dataset, 0.2, 150).unwrap();
        let after = reconstruct_fidelity(&rbm, &target).unwrap();
        assert_eq!(records.len(), 151);
        assert!(records.iter().all(|r| r.loss.is_finite()));
        assert!(records.last().unwrap().loss < records[0].loss);
        assert!(after > before, "fidelity {before} -> {after}");
        assert!(after > 0.98, "final fidelity {after}");
    }

    #[test]
    fn zero_steps_returns_one_record_and_leaves_parameters() {
        let state = StateVector::<f64>::basis_state(2, BasisIndex(0)).unwrap();
        let dataset = generate_snapshots(&state, &[letters("ZZ")], 10, 2).unwrap();
        let mut rbm = small_rbm(2, 2);
        let before = rbm.parameters();
        let records = train_tomography(&mut rbm, &dataset, 0.5, 0).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(rbm.parameters(), before);
    }

    #[test]
    fn reconstruct_fidelity_hits_the_endpoints() {
        let mut state = StateVector::<f64>::from_fn(3, |s| {
            C::new(1.0 + 0.2 * s.spin(0) as f64, 0.3 * s.spin(2) as f64)
        })
        .unwrap();
        state.normalize().unwrap();
        let ansatz = table_ansatz(&state);
        let same = reconstruct_fidelity(&ansatz, &state).unwrap();
        assert!((same - 1.0).abs() < 1e-12);

        let up = StateVector::<f64>::basis_state(2, BasisIndex(0)).unwrap();
        let down = StateVector::<f64>::basis_state(2, BasisIndex(3)).unwrap();
        let point = table_ansatz(&up);
        assert!(reconstruct_fidelity(&point, &down).unwrap() < 1e-24);
        assert!(matches!(
            reconstruct_fidelity(&point, &state),
            Err(Error::Domain(_))
        ));
    }
}
