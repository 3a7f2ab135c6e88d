//! Local estimators and stochastic/exact expectation values.


use crate::ansatz::{AnsatzState, LogAmp};
use crate::error::{Error, Result};
use crate::operators::LocalOperator;
use crate::sampler::{binned_statistics, SampleBatch};
use crate::scalar::{is_finite_c, real, Cplx, Real};
use crate::spin::{full_basis, SpinConfiguration};
use crate::vmc::{EnergyEstimate, EstimatorSource};

/// The local estimator O_loc(s) = Σ_{s′} ⟨s|Ô|s′⟩ Ψ(s′)/Ψ(s).
///
/// The sum runs over the configurations connected to `s` by the operator;
/// amplitude ratios come from the ansatz cache. Zero-amplitude target
/// configurations contribute nothing; a zero amplitude at `s` itself is a
/// domain error, and a non-finite sum (overflowing ratios) is a numerical
/// error.
pub fn local_estimator<T: Real, A: AnsatzState<T>>(
    op: &LocalOperator<T>,
    ansatz: &A,
    s: &SpinConfiguration,
) -> Result<Cplx<T>> {
    let cache = ansatz.make_cache(s);
    local_estimator_cached(op, ansatz, s, &cache)
}

/// [`local_estimator`] with a caller-supplied cache already pinned to `s`.
pub(crate) fn local_estimator_cached<T: Real, A: AnsatzState<T>>(
    op: &LocalOperator<T>,
    ansatz: &A,
    s: &SpinConfiguration,
    cache: &A::Cache,
) -> Result<Cplx<T>> {
    if ansatz.cached_log_amplitude(cache).is_zero() {
        return Err(Error::Domain(format!(
            "local estimator at zero-amplitude configuration {s}"
        )));
    }
    let mut acc = Cplx::new(T::zero(), T::zero());
    op.visit_connected(s, |flips, value| {
        if flips.is_empty() {
            acc += value;
        } else if let LogAmp::Finite(delta) = ansatz.cached_log_ratio(cache, s, flips) {
            acc += value * delta.exp();
        }
    })?;
    if !is_finite_c(acc) {
        return Err(Error::Numerical(format!(
            "local estimator diverged at configuration {s}"
        )));
    }
    Ok(acc)
}

/// Local estimator values for every sample of a batch, chain-major.
pub fn batch_local_energies<T: Real, A: AnsatzState<T>>(
    op: &LocalOperator<T>,
    ansatz: &A,
    batch: &SampleBatch<T>,
) -> Result<Vec<Cplx<T>>> {
    if batch.n_sites() != ansatz.n_sites() {
        return Err(Error::Domain(format!(
            "batch over {} sites, ansatz over {}",
            batch.n_sites(),
            ansatz.n_sites()
        )));
    }
    let mut values = Vec::with_capacity(batch.len());
    for i in 0..batch.len() {
        let config = batch.configuration(i)?;
        values.push(local_estimator(op, ansatz, &config)?);
    }
    Ok(values)
}

/// A batch resolved into estimator rows: weights, configurations, and local
/// estimator values, all produced from one ansatz snapshot and one operator.
///
/// For sampled sources the weights are uniform 1/M and the rows stay
/// chain-major so binning can see chain boundaries; for full summation the
/// weights are normalized |Ψ(s)|² and zero-amplitude configurations are
/// skipped (they never enter the summation). Log-derivative rows are
/// recomputed on demand rather than stored, which keeps million-sample
/// batches at O(M) memory.
#[derive(Debug, Clone)]
pub struct EvaluatedBatch<T: Real> {
    weights: Vec<T>,
    configs: Vec<SpinConfiguration>,
    local_values: Vec<Cplx<T>>,
    chain_shape: Option<(usize, usize)>,
    acceptance: Option<T>,
}

impl<T: Real> EvaluatedBatch<T> {
    /// Number of rows.
    pub fn len(&self) -> usize {
        self.configs.len()
    }

    /// Whether the batch has no rows.
    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    /// Normalized row weights (they sum to 1).
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Row configurations.
    pub fn configs(&self) -> &[SpinConfiguration] {
        &self.configs
    }

    /// Per-row local estimator values.
    pub fn local_values(&self) -> &[Cplx<T>] {
        &self.local_values
    }

    /// (n_chains, samples_per_chain) for sampled sources.
    pub fn chain_shape(&self) -> Option<(usize, usize)> {
        self.chain_shape
    }

    /// Overall sampler acceptance, when the rows came from Markov chains.
    pub fn acceptance(&self) -> Option<T> {
        self.acceptance
    }

    /// Weighted mean of the local estimator values.
    pub fn weighted_mean(&self) -> Cplx<T> {
        let mut acc = Cplx::new(T::zero(), T::zero());
        for (w, v) in self.weights.iter().zip(&self.local_values) {
            acc += *v * Cplx::new(*w, T::zero());
        }
        acc
    }
}

/// Resolve an estimator source into rows for `op` at the current ansatz
/// parameters.
pub fn evaluate_batch<T: Real, A: AnsatzState<T>>(
    op: &LocalOperator<T>,
    ansatz: &A,
    source: &EstimatorSource<'_, T>,
) -> Result<EvaluatedBatch<T>> {
    let n = ansatz.n_sites();
    if op.n_sites() != n {
        return Err(Error::Domain(format!(
            "operator on {} sites, ansatz on {n}",
            op.n_sites()
        )));
    }
    match source {
        EstimatorSource::Sampled(batch) => {
            if batch.is_empty() {
                return Err(Error::Domain("estimator over an empty sample batch".into()));
            }
            if batch.n_sites() != n {
                return Err(Error::Domain(format!(
                    "batch over {} sites, ansatz over {n}",
                    batch.n_sites()
                )));
            }
            let m = batch.len();
            let w = T::one() / real::<T>(m as f64);
            let mut configs = Vec::with_capacity(m);
            let mut local_values = Vec::with_capacity(m);
            for i in 0..m {
                let config = batch.configuration(i)?;
                local_values.push(local_estimator(op, ansatz, &config)?);
                configs.push(config);
            }
            Ok(EvaluatedBatch {
                weights: vec![w; m],
                configs,
                local_values,
                chain_shape: Some((batch.n_chains(), batch.samples_per_chain())),
                acceptance: Some(batch.acceptance()),
            })
        }
        EstimatorSource::FullSummation => {
            let basis = full_basis(n)?;
            let mut configs = Vec::new();
            let mut log_weights = Vec::new();
            let mut max_lw = T::neg_infinity();
            for s in basis {
                if let LogAmp::Finite(z) = ansatz.log_amplitude(&s) {
                    let lw = z.re + z.re;
                    if lw > max_lw {
                        max_lw = lw;
                    }
                    log_weights.push(lw);
                    configs.push(s);
                }
            }
            if configs.is_empty() {
                return Err(Error::Domain(
                    "full summation over an identically zero wave function".into(),
                ));
            }
            let mut weights: Vec<T> =
                log_weights.iter().map(|&lw| crate::scalar::exp(lw - max_lw)).collect();
            let total: T = weights.iter().fold(T::zero(), |acc, w| acc + *w);
            for w in &mut weights {
                *w /= total;
            }
            let mut local_values = Vec::with_capacity(configs.len());
            for s in &configs {
                local_values.push(local_estimator(op, ansatz, s)?);
            }
            Ok(EvaluatedBatch {
                weights,
                configs,
                local_values,
                chain_shape: None,
                acceptance: None,
            })
        }
    }
}

/// Summarize resolved rows into an [`EnergyEstimate`].
///
/// Sampled rows get a binning analysis per chain (autocorrelation-corrected
/// standard error); full-summation rows are exact, with zero standard error
/// and infinite effective sample count.
pub fn estimate_from_evaluated<T: Real>(ev: &EvaluatedBatch<T>) -> Result<EnergyEstimate<T>> {
    if ev.is_empty() {
        return Err(Error::Domain("estimate over an empty batch".into()));
    }
    match ev.chain_shape {
        Some((n_chains, spc)) => {
            let views: Vec<&[Cplx<T>]> =
                (0..n_chains).map(|c| &ev.local_values[c * spc..(c + 1) * spc]).collect();
            let stats = binned_statistics(&views)?;
            Ok(EnergyEstimate {
                mean: stats.mean,
                variance: stats.variance,
                stderr: stats.stderr,
                effective_samples: stats.effective_samples,
            })
        }
        None => {
            let mean = ev.weighted_mean();
            let mut variance = T::zero();
            for (w, v) in ev.weights.iter().zip(&ev.local_values) {
                variance += *w * (*v - mean).norm_sqr();
            }
            Ok(EnergyEstimate {
                mean,
                variance,
                stderr: T::zero(),
                effective_samples: T::infinity(),
            })
        }
    }
}

/// Monte Carlo expectation value of `op` over a sample batch.
pub fn expectation_estimate<T: Real, A: AnsatzState<T>>(
    op: &LocalOperator<T>,
    ansatz: &A,
    batch: &SampleBatch<T>,
) -> Result<EnergyEstimate<T>> {
    let ev = evaluate_batch(op, ansatz, &EstimatorSource::Sampled(batch))?;
    estimate_from_evaluated(&ev)
}

/// Exact expectation value ⟨Ψ|Ô|Ψ⟩/⟨Ψ|Ψ⟩ by full-basis summation.
pub fn full_expectation<T: Real, A: AnsatzState<T>>(
    op: &LocalOperator<T>,
    ansatz: &A,
) -> Result<Cplx<T>> {
    Ok(full_estimate(op, ansatz)?.mean)
}

/// Full-summation [`EnergyEstimate`]: exact mean, exact local-estimator
/// variance, zero standard error.
pub fn full_estimate<T: Real, A: AnsatzState<T>>(
    op: &LocalOperator<T>,
    ansatz: &A,
) -> Result<EnergyEstimate<T>> {
    let ev = evaluate_batch(op, ansatz, &EstimatorSource::FullSummation)?;
    estimate_from_evaluated(&ev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{build_ansatz, AnsatzSpec, Rbm};
    use crate::exact::{dense_ansatz_state, expectation, ground_state, table_ansatz, StateVector};
    use crate::operators::build_tfi;
    use crate::sampler::{run_chain, SamplerConfig, TransitionKernel};
    use crate::spin::BasisIndex;

    #[test]
    fn eigenstate_local_estimator_is_constant() {
        let op = build_tfi::<f64>(3, 1.0, 0.5, false).unwrap();
        let spectral = ground_state(&op).unwrap();
        let table = table_ansatz(&spectral.ground_state);
        for s in full_basis(3).unwrap() {
            if table.log_amplitude(&s).is_zero() {
                continue;
            }
            let e = local_estimator(&op, &table, &s).unwrap();
            assert!((e.re - spectral.ground_energy).abs() < 1e-10, "E_loc = {e}");
            assert!(e.im.abs() < 1e-10);
        }
    }

    #[test]
    fn uniform_ansatz_tfi_local_estimator() {
        // All amplitude ratios are 1, so E_loc(s) = −J Σ sᵢsᵢ₊₁ + h·N.
        let n = 5;
        let (j, h) = (1.3, 0.7);
        let op = build_tfi::<f64>(n, j, h, false).unwrap();
        let ansatz = Rbm::<f64>::zeros(n, 2).unwrap();
        for s in full_basis(n).unwrap() {
            let mut zz = 0.0;
            for i in 0..n - 1 {
                zz += (s.spin(i) as f64) * (s.spin(i + 1) as f64);
            }
            let expected = -j * zz + h * n as f64;
            let e = local_estimator(&op, &ansatz, &s).unwrap();
            assert!((e.re - expected).abs() < 1e-12);
            assert!(e.im.abs() < 1e-12);
        }
    }

    #[test]
    fn zero_amplitude_is_domain_error() {
        let state = StateVector::<f64>::basis_state(2, BasisIndex(1)).unwrap();
        let table = table_ansatz(&state);
        let op = build_tfi::<f64>(2, 1.0, 1.0, false).unwrap();
        let all_up = SpinConfiguration::all_up(2).unwrap();
        assert!(matches!(
            local_estimator(&op, &table, &all_up),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn full_summation_matches_dense_oracle() {
        // ⟨H⟩ by local-estimator summation equals the Rayleigh quotient of
        // the densely materialized state.
        for seed in [1u64, 2, 3] {
            let ansatz = build_ansatz::<f64>(
                5,
                &AnsatzSpec::Rbm { hidden: 10 },
                0.4,
                seed,
            )
            .unwrap();
            let op = build_tfi::<f64>(5, 1.0, 0.8, true).unwrap();
            let mine = full_expectation(&op, &ansatz).unwrap();
            let dense = dense_ansatz_state(&ansatz).unwrap();
            let oracle = expectation(&op, &dense).unwrap();
            assert!((mine - oracle).norm() < 1e-10, "{mine} vs {oracle}");
        }
    }

    #[test]
    fn classical_eigenstate_variance_is_exactly_zero() {
        // h = 0: the Hamiltonian is diagonal and |all-up⟩ is an exact
        // eigenstate, so every local value is identical and the variance is
        // exactly 0 in floating point.
        let op = build_tfi::<f64>(4, 1.0, 0.0, true).unwrap();
        let state = StateVector::<f64>::basis_state(4, BasisIndex(0)).unwrap();
        let table = table_ansatz(&state);
        let est = full_estimate(&op, &table).unwrap();
        assert_eq!(est.variance, 0.0);
        assert_eq!(est.stderr, 0.0);
        assert_eq!(est.mean.re, -4.0);
    }

    #[test]
    fn sampled_estimate_matches_full_summation() {
        let ansatz = build_ansatz::<f64>(
            4,
            &AnsatzSpec::Rbm { hidden: 8 },
            0.3,
            11,
        )
        .unwrap();
        let op = build_tfi::<f64>(4, 1.0, 1.0, true).unwrap();
        let exact = full_expectation(&op, &ansatz).unwrap();
        let config = SamplerConfig::new(4, 2000, 5);
        let batch = run_chain(&config, &TransitionKernel::SingleFlip, &ansatz).unwrap();
        let est = expectation_estimate(&op, &ansatz, &batch).unwrap();
        assert!(
            (est.mean.re - exact.re).abs() < 3.0 * est.stderr + 1e-12,
            "estimate {} vs exact {} (3ε = {})",
            est.mean.re,
            exact.re,
            3.0 * est.stderr
        );
        // The stderr invariant holds exactly by construction.
        let reconstructed = (est.variance / est.effective_samples).sqrt();
        assert!((est.stderr - reconstructed).abs() < 1e-15);
        // Hermitian operator: imaginary part is pure noise.
        assert!(est.mean.im.abs() <= 3.0 * est.stderr + 1e-12);
    }

    #[test]
    fn full_summation_skips_zero_amplitudes() {
        // A table state supported on half the basis still sums cleanly.
        let mut state = StateVector::<f64>::zero(3).unwrap();
        state.amplitudes_mut()[0] = Cplx::new(1.0, 0.0);
        state.amplitudes_mut()[3] = Cplx::new(0.5, 0.0);
        state.normalize().unwrap();
        let table = table_ansatz(&state);
        let op = build_tfi::<f64>(3, 1.0, 0.3, false).unwrap();
        let mine = full_expectation(&op, &table).unwrap();
        let oracle = expectation(&op, &state).unwrap();
        assert!((mine - oracle).norm() < 1e-12);
    }
}
