//! Ground-state optimisation and time evolution of variational parameters.
//!
//! Both flows repeat: draw estimator rows at the current parameters, build
//! forces (and, for stochastic reconfiguration / time evolution, the
//! geometric tensor), then advance the parameters. Real time integrates
//! S·θ̇ = −i·f; imaginary time integrates S·θ̇ = −f, which doubles as the
//! stochastic-reconfiguration ground-state search. Plain stochastic gradient
//! descent skips the tensor and steps along −η·g.

use std::time::Instant;

use nalgebra::DVector;

use crate::ansatz::AnsatzState;
use crate::error::{Error, Result};
use crate::operators::LocalOperator;
use crate::sampler::{
    run_chain_with_workers, worker_count, SampleBatch, SamplerConfig, TransitionKernel,
};
use crate::scalar::{derive_seed, is_finite_c, real, Cplx, Real};
use crate::vmc::{
    estimate_from_evaluated, evaluate_batch, expectation_estimate, forces_from_evaluated,
    full_estimate, qgt_and_forces, qgt_from_evaluated, solve_regularized, EnergyEstimate,
    EstimatorSource, LinearSolver, Qgt,
};

/// Seed streams per evolution step: one measurement batch plus up to four
/// integrator stages.
const STREAMS_PER_STEP: u64 = 5;

/// Which Schrödinger flow the parameters follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvolutionMode {
    /// S·θ̇ = −i·f — unitary dynamics.
    RealTime,
    /// S·θ̇ = −f — gradient flow toward the ground state.
    ImaginaryTime,
}

impl EvolutionMode {
    /// Stable text name for logs and configs.
    pub fn name(&self) -> &'static str {
        match self {
            EvolutionMode::RealTime => "real_time",
            EvolutionMode::ImaginaryTime => "imaginary_time",
        }
    }

    /// Parse a text name.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "real_time" => Ok(EvolutionMode::RealTime),
            "imaginary_time" => Ok(EvolutionMode::ImaginaryTime),
            other => Err(Error::Parse(format!("unknown evolution mode '{other}'"))),
        }
    }
}

/// Time integrator for the parameter flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrator {
    /// First-order Euler: θ ← θ + δ·θ̇.
    Euler,
    /// Classical fourth-order Runge–Kutta with a fresh estimator batch per
    /// stage.
    Rk4,
}

impl Integrator {
    /// Stable text name for logs and configs.
    pub fn name(&self) -> &'static str {
        match self {
            Integrator::Euler => "euler",
            Integrator::Rk4 => "rk4",
        }
    }

    /// Parse a text name.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "euler" => Ok(Integrator::Euler),
            "rk4" => Ok(Integrator::Rk4),
            other => Err(Error::Parse(format!("unknown integrator '{other}'"))),
        }
    }
}

/// Parameters of a time-evolution run; total duration = step × max_steps.
#[derive(Debug, Clone)]
pub struct EvolutionConfig<T: Real> {
    /// Real or imaginary time.
    pub mode: EvolutionMode,
    /// Time step δ > 0.
    pub step: T,
    /// Diagonal regularization Λ ≥ 0 of the geometric tensor.
    pub regularization: T,
    /// Integrator (Euler or RK4).
    pub integrator: Integrator,
    /// Number of steps to take.
    pub max_steps: usize,
    /// How the regularized tensor equation is solved.
    pub linear_solver: LinearSolver<T>,
}

impl<T: Real> EvolutionConfig<T> {
    /// Config with the default regularization (10⁻⁴), Euler integration,
    /// and a direct solver.
    pub fn new(mode: EvolutionMode, step: T, max_steps: usize) -> Self {
        Self {
            mode,
            step,
            regularization: real::<T>(1e-4),
            integrator: Integrator::Euler,
            max_steps,
            linear_solver: LinearSolver::Direct,
        }
    }

    /// Total evolved time δ·max_steps.
    pub fn total_duration(&self) -> T {
        self.step * real::<T>(self.max_steps as f64)
    }

    fn validate(&self) -> Result<()> {
        if !(self.step > T::zero()) {
            return Err(Error::Config("evolution step must be > 0".into()));
        }
        if self.regularization < T::zero() {
            return Err(Error::Config("regularization must be ≥ 0".into()));
        }
        Ok(())
    }
}

/// Where evolution draws its estimator rows.
#[derive(Debug, Clone, Copy)]
pub enum EvolveSampling<'a, T: Real> {
    /// Markov-chain sampling; a fresh batch is drawn per step and per RK
    /// stage from seed streams derived from the sampler config's seed.
    Sampled {
        /// Chain layout and master seed.
        config: &'a SamplerConfig,
        /// Proposal kernel.
        kernel: &'a TransitionKernel<T>,
    },
    /// Exact full-basis summation (no sampling noise; small N only).
    FullSummation,
}

/// Diagnostic summary of one parameter step.
#[derive(Debug, Clone, Copy)]
pub struct TimeStepInfo<T: Real> {
    /// Mean local energy of the rows the step was computed from.
    pub energy: Cplx<T>,
    /// Euclidean norm of the parameter velocity θ̇.
    pub velocity_norm: T,
}

/// θ̇ from an assembled tensor: solve (S + Λ·I)·θ̇ = −ξ·f.
fn velocity_from_qgt<T: Real>(
    qgt: &Qgt<T>,
    config: &EvolutionConfig<T>,
) -> Result<DVector<Cplx<T>>> {
    let rhs = match config.mode {
        EvolutionMode::ImaginaryTime => qgt.forces.map(|f| -f),
        EvolutionMode::RealTime => qgt.forces.map(|f| f * Cplx::new(T::zero(), -T::one())),
    };
    solve_regularized(qgt, &rhs, &config.linear_solver)
}

/// The parameter velocity θ̇ at the current parameters.
pub fn parameter_velocity<T: Real, A: AnsatzState<T>>(
    op: &LocalOperator<T>,
    ansatz: &A,
    source: &EstimatorSource<'_, T>,
    config: &EvolutionConfig<T>,
) -> Result<DVector<Cplx<T>>> {
    config.validate()?;
    let qgt = qgt_and_forces(op, ansatz, source, config.regularization)?;
    velocity_from_qgt(&qgt, config)
}

fn ensure_finite_params<T: Real>(params: &DVector<Cplx<T>>) -> Result<()> {
    for i in 0..params.len() {
        if !is_finite_c(params[i]) {
            return Err(Error::Numerical("non-finite parameter update".into()));
        }
    }
    Ok(())
}

/// Advance the parameters by one Euler step of the configured flow.
///
/// Solves the regularized tensor equation on the given rows and applies
/// θ ← θ + δ·θ̇. Higher-order integration is composed from these stages by
/// [`evolve`].
pub fn time_step<T: Real, A: AnsatzState<T>>(
    op: &LocalOperator<T>,
    ansatz: &mut A,
    source: &EstimatorSource<'_, T>,
    config: &EvolutionConfig<T>,
) -> Result<TimeStepInfo<T>> {
    config.validate()?;
    let qgt = qgt_and_forces(op, ansatz, source, config.regularization)?;
    let velocity = velocity_from_qgt(&qgt, config)?;
    let params = ansatz.parameters() + &velocity * Cplx::new(config.step, T::zero());
    ensure_finite_params(&params)?;
    ansatz.set_parameters(&params)?;
    Ok(TimeStepInfo { energy: qgt.energy, velocity_norm: velocity.norm() })
}

/// One time point of an evolution run.
#[derive(Debug, Clone)]
pub struct EvolveRecord<T: Real> {
    /// Step index (0 = initial state).
    pub step: usize,
    /// Time t = step·δ.
    pub t: T,
    /// Energy estimate at this time.
    pub energy: EnergyEstimate<T>,
    /// One estimate per requested observable, in call order.
    pub observables: Vec<EnergyEstimate<T>>,
    /// Sampler acceptance of the measurement batch (None for full
    /// summation).
    pub acceptance: Option<T>,
    /// Wall-clock seconds spent on this step (measurement + advance).
    pub seconds: f64,
}

fn measurement_batch<T: Real, A: AnsatzState<T> + Sync>(
    sampling: &EvolveSampling<'_, T>,
    ansatz: &A,
    stream: u64,
) -> Result<Option<SampleBatch<T>>> {
    match sampling {
        EvolveSampling::Sampled { config, kernel } => {
            let mut staged = (*config).clone();
            staged.seed = derive_seed(config.seed, stream);
            let batch = run_chain_with_workers(&staged, kernel, ansatz, worker_count())?;
            Ok(Some(batch))
        }
        EvolveSampling::FullSummation => Ok(None),
    }
}

fn stage_velocity<T: Real, A: AnsatzState<T> + Clone + Sync>(
    op: &LocalOperator<T>,
    template: &A,
    params: &DVector<Cplx<T>>,
    sampling: &EvolveSampling<'_, T>,
    stream: u64,
    config: &EvolutionConfig<T>,
) -> Result<DVector<Cplx<T>>> {
    ensure_finite_params(params)?;
    let mut work = template.clone();
    work.set_parameters(params)?;
    match measurement_batch(sampling, &work, stream)? {
        Some(batch) => {
            parameter_velocity(op, &work, &EstimatorSource::Sampled(&batch), config)
        }
        None => parameter_velocity(op, &work, &EstimatorSource::FullSummation, config),
    }
}

/// Evolve the ansatz under `op` and record an observable time series.
///
/// Produces `max_steps + 1` records: the initial state and one per step.
/// Each step draws a fresh measurement batch (stream `step·5`), estimates
/// the energy and all requested observables, then advances the parameters —
/// Euler reuses the measurement rows for its single stage, RK4 draws a fresh
/// batch per stage (streams `step·5 + 1..4`) so stale rows never bias the
/// stage derivatives. With imaginary-time mode this is the
/// stochastic-reconfiguration ground-state search.
pub fn evolve<T: Real, A: AnsatzState<T> + Clone + Sync>(
    op: &LocalOperator<T>,
    ansatz: &mut A,
    config: &EvolutionConfig<T>,
    sampling: &EvolveSampling<'_, T>,
    observables: &[LocalOperator<T>],
) -> Result<Vec<EvolveRecord<T>>> {
    config.validate()?;
    let mut records = Vec::with_capacity(config.max_steps + 1);
    for step in 0..=config.max_steps {
        let start = Instant::now();
        let base_stream = step as u64 * STREAMS_PER_STEP;
        let batch = measurement_batch(sampling, ansatz, base_stream)?;
        let (ev, acceptance) = match &batch {
            Some(b) => (
                evaluate_batch(op, ansatz, &EstimatorSource::Sampled(b))?,
                Some(b.acceptance()),
            ),
            None => (evaluate_batch(op, ansatz, &EstimatorSource::FullSummation)?, None),
        };
        let energy = estimate_from_evaluated(&ev)?;
        let mut obs_estimates = Vec::with_capacity(observables.len());
        for obs in observables {
            let est = match &batch {
                Some(b) => expectation_estimate(obs, ansatz, b)?,
                None => full_estimate(obs, ansatz)?,
            };
            obs_estimates.push(est);
        }
        if step == config.max_steps {
            records.push(EvolveRecord {
                step,
                t: real::<T>(step as f64) * config.step,
                energy,
                observables: obs_estimates,
                acceptance,
                seconds: start.elapsed().as_secs_f64(),
            });
            break;
        }

        let theta0 = ansatz.parameters();
        let delta = Cplx::new(config.step, T::zero());
        let next = match config.integrator {
            Integrator::Euler => {
                let qgt = qgt_from_evaluated(ansatz, &ev, config.regularization)?;
                let k1 = velocity_from_qgt(&qgt, config)?;
                &theta0 + k1 * delta
            }
            Integrator::Rk4 => {
                let half = Cplx::new(config.step / (T::one() + T::one()), T::zero());
                let sixth = delta / Cplx::new(real::<T>(6.0), T::zero());
                let two = Cplx::new(T::one() + T::one(), T::zero());
                let qgt = qgt_from_evaluated(ansatz, &ev, config.regularization)?;
                let k1 = velocity_from_qgt(&qgt, config)?;
                let k2 = stage_velocity(
                    op,
                    ansatz,
                    &(&theta0 + &k1 * half),
                    sampling,
                    base_stream + 1,
                    config,
                )?;
                let k3 = stage_velocity(
                    op,
                    ansatz,
                    &(&theta0 + &k2 * half),
                    sampling,
                    base_stream + 2,
                    config,
                )?;
                let k4 = stage_velocity(
                    op,
                    ansatz,
                    &(&theta0 + &k3 * delta),
                    sampling,
                    base_stream + 3,
                    config,
                )?;
                &theta0 + (k1 + k2 * two + k3 * two + k4) * sixth
            }
        };
        ensure_finite_params(&next)?;
        ansatz.set_parameters(&next)?;
        records.push(EvolveRecord {
            step,
            t: real::<T>(step as f64) * config.step,
            energy,
            observables: obs_estimates,
            acceptance,
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    Ok(records)
}

/// One optimisation step of a ground-state search.
#[derive(Debug, Clone)]
pub struct StepRecord<T: Real> {
    /// Step index.
    pub step: usize,
    /// Energy estimate at the pre-update parameters.
    pub energy: EnergyEstimate<T>,
    /// Sampler acceptance of the step's batch.
    pub acceptance: Option<T>,
    /// Wall-clock seconds spent on the step.
    pub seconds: f64,
}

/// Energy trajectory of a ground-state search.
#[derive(Debug, Clone, Default)]
pub struct Trajectory<T: Real> {
    /// Per-step records in step order.
    pub records: Vec<StepRecord<T>>,
}

impl<T: Real> Trajectory<T> {
    /// The most recent record.
    pub fn last(&self) -> Option<&StepRecord<T>> {
        self.records.last()
    }
}

/// Plain stochastic gradient descent toward the ground state.
///
/// Each step draws a batch from seed stream `step`, measures the energy,
/// and applies θ ← θ − η·g with g the covariance gradient. A non-finite
/// energy or update aborts with a divergence error after restoring the most
/// recent finite parameters into the ansatz.
pub fn sgd_ground_state<T: Real, A: AnsatzState<T> + Sync>(
    op: &LocalOperator<T>,
    ansatz: &mut A,
    sampler: &SamplerConfig,
    kernel: &TransitionKernel<T>,
    learning_rate: T,
    n_steps: usize,
) -> Result<Trajectory<T>> {
    if learning_rate < T::zero() {
        return Err(Error::Config("learning rate must be ≥ 0".into()));
    }
    let two = Cplx::new(T::one() + T::one(), T::zero());
    let eta = Cplx::new(learning_rate, T::zero());
    let mut trajectory = Trajectory { records: Vec::with_capacity(n_steps) };
    let mut last_good = ansatz.parameters();
    for step in 0..n_steps {
        let start = Instant::now();
        let mut staged = sampler.clone();
        staged.seed = derive_seed(sampler.seed, step as u64);
        let batch = run_chain_with_workers(&staged, kernel, ansatz, worker_count())?;
        let outcome = evaluate_batch(op, ansatz, &EstimatorSource::Sampled(&batch))
            .and_then(|ev| {
                let energy = estimate_from_evaluated(&ev)?;
                let (forces, _) = forces_from_evaluated(ansatz, &ev)?;
                Ok((energy, forces))
            });
        let (energy, forces) = match outcome {
            Ok(pair) => pair,
            Err(Error::Numerical(_)) => {
                ansatz.set_parameters(&last_good)?;
                return Err(Error::Diverged { step });
            }
            Err(e) => return Err(e),
        };
        if !is_finite_c(energy.mean) {
            ansatz.set_parameters(&last_good)?;
            return Err(Error::Diverged { step });
        }
        last_good = ansatz.parameters();
        trajectory.records.push(StepRecord {
            step,
            energy,
            acceptance: Some(batch.acceptance()),
            seconds: start.elapsed().as_secs_f64(),
        });
        let params = &last_good - forces * two * eta;
        if ensure_finite_params(&params).is_err() {
            ansatz.set_parameters(&last_good)?;
            return Err(Error::Diverged { step });
        }
        ansatz.set_parameters(&params)?;
    }
    Ok(trajectory)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{build_ansatz, AnsatzSpec, AnyAnsatz, MeanField};
    use crate::operators::{build_tfi, mean_field_observable, Pauli};
    use crate::vmc::full_expectation;

    fn pinned_up_mean_field(n: usize) -> AnyAnsatz<f64> {
        let mut mf = MeanField::<f64>::zeros(n).unwrap();
        let mut params = DVector::from_element(2 * n, Cplx::new(0.0, 0.0));
        for i in 0..n {
            params[i] = Cplx::new(1.0, 0.0);
        }
        mf.set_parameters(&params).unwrap();
        AnyAnsatz::MeanField(mf)
    }

    #[test]
    fn eigenstate_time_step_is_a_fixed_point() {
        let op = build_tfi::<f64>(3, 1.0, 0.0, false).unwrap();
        let mut ansatz = pinned_up_mean_field(3);
        let before = ansatz.parameters();
        let config =
            EvolutionConfig::new(EvolutionMode::ImaginaryTime, 1e-3, 1);
        let info =
            time_step(&op, &mut ansatz, &EstimatorSource::FullSummation, &config).unwrap();
        assert_eq!(info.velocity_norm, 0.0);
        let after = ansatz.parameters();
        for i in 0..before.len() {
            assert_eq!(before[i], after[i]);
        }
    }

    #[test]
    fn imaginary_time_strictly_decreases_full_summation_energy() {
        let op = build_tfi::<f64>(3, 1.0, 1.0, true).unwrap();
        let mut ansatz = build_ansatz::<f64>(
            3,
            &AnsatzSpec::Rbm { hidden: 6 },
            0.3,
            17,
        )
        .unwrap();
        let before = full_expectation(&op, &ansatz).unwrap().re;
        let config =
            EvolutionConfig::new(EvolutionMode::ImaginaryTime, 1e-3, 1);
        time_step(&op, &mut ansatz, &EstimatorSource::FullSummation, &config).unwrap();
        let after = full_expectation(&op, &ansatz).unwrap().re;
        assert!(after < before, "energy {before} → {after}");
    }

    #[test]
    fn real_time_conserves_full_summation_energy() {
        let op = build_tfi::<f64>(3, 1.0, 0.8, true).unwrap();
        let mut ansatz = build_ansatz::<f64>(
            3,
            &AnsatzSpec::Rbm { hidden: 6 },
            0.3,
            19,
        )
        .unwrap();
        let before = full_expectation(&op, &ansatz).unwrap().re;
        // The continuous flow conserves energy exactly (the regularized
        // tensor stays Hermitian), so a fourth-order integrator must hold it
        // far below the per-step 1e-6 relative bound; first-order Euler sees
        // its own O(δ²‖θ̇‖²) error instead.
        let mut config = EvolutionConfig::new(EvolutionMode::RealTime, 1e-3, 5);
        config.integrator = Integrator::Rk4;
        let records =
            evolve(&op, &mut ansatz, &config, &EvolveSampling::FullSummation, &[]).unwrap();
        let after = full_expectation(&op, &ansatz).unwrap().re;
        assert_eq!(records.len(), 6);
        assert!(
            (after - before).abs() <= 5.0 * 1e-6 * before.abs().max(1.0),
            "energy drifted {before} → {after}"
        );
        for record in &records {
            assert!(
                (record.energy.mean.re - before).abs() <= 5.0 * 1e-6 * before.abs().max(1.0),
                "step {}: energy drifted {before} → {}",
                record.step,
                record.energy.mean.re
            );
        }
    }

    #[test]
    fn zero_duration_evolution_reports_initial_observables() {
        let op = build_tfi::<f64>(3, 1.0, 1.0, false).unwrap();
        let mut ansatz = build_ansatz::<f64>(
            3,
            &AnsatzSpec::Rbm { hidden: 3 },
            0.2,
            23,
        )
        .unwrap();
        let config =
            EvolutionConfig::new(EvolutionMode::RealTime, 0.01, 0);
        let obs = vec![mean_field_observable::<f64>(3, Pauli::X).unwrap()];
        let records = evolve(
            &op,
            &mut ansatz,
            &config,
            &EvolveSampling::FullSummation,
            &obs,
        )
        .unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].step, 0);
        assert_eq!(records[0].t, 0.0);
        assert_eq!(records[0].observables.len(), 1);
        assert!(records[0].acceptance.is_none());
    }

    #[test]
    fn rk4_full_summation_runs_and_decreases_energy() {
        let op = build_tfi::<f64>(3, 1.0, 1.0, true).unwrap();
        let mut ansatz = build_ansatz::<f64>(
            3,
            &AnsatzSpec::Rbm { hidden: 6 },
            0.3,
            29,
        )
        .unwrap();
        let before = full_expectation(&op, &ansatz).unwrap().re;
        let mut config =
            EvolutionConfig::new(EvolutionMode::ImaginaryTime, 0.02, 10);
        config.integrator = Integrator::Rk4;
        let records = evolve(
            &op,
            &mut ansatz,
            &config,
            &EvolveSampling::FullSummation,
            &[],
        )
        .unwrap();
        assert_eq!(records.len(), 11);
        let after = full_expectation(&op, &ansatz).unwrap().re;
        assert!(after < before);
        // t column advances by δ.
        assert!((records[1].t - 0.02).abs() < 1e-15);
        assert!((records[10].t - 0.2).abs() < 1e-12);
    }

    #[test]
    fn sampled_evolution_smoke() {
        let op = build_tfi::<f64>(3, 1.0, 1.0, false).unwrap();
        let mut ansatz = build_ansatz::<f64>(
            3,
            &AnsatzSpec::Rbm { hidden: 3 },
            0.2,
            31,
        )
        .unwrap();
        let config =
            EvolutionConfig::new(EvolutionMode::ImaginaryTime, 0.01, 3);
        let sampler = SamplerConfig::new(2, 128, 7);
        let kernel = TransitionKernel::SingleFlip;
        let records = evolve(
            &op,
            &mut ansatz,
            &config,
            &EvolveSampling::Sampled { config: &sampler, kernel: &kernel },
            &[],
        )
        .unwrap();
        assert_eq!(records.len(), 4);
        for r in &records {
            assert!(r.acceptance.is_some());
            assert!(r.energy.stderr > 0.0);
        }
    }

    #[test]
    fn sgd_zero_learning_rate_is_inert() {
        let op = build_tfi::<f64>(3, 1.0, 1.0, false).unwrap();
        let mut ansatz = build_ansatz::<f64>(
            3,
            &AnsatzSpec::Rbm { hidden: 3 },
            0.2,
            37,
        )
        .unwrap();
        let before = ansatz.parameters();
        let sampler = SamplerConfig::new(2, 64, 5);
        let trajectory = sgd_ground_state(
            &op,
            &mut ansatz,
            &sampler,
            &TransitionKernel::SingleFlip,
            0.0,
            3,
        )
        .unwrap();
        assert_eq!(trajectory.records.len(), 3);
        let after = ansatz.parameters();
        for i in 0..before.len() {
            assert_eq!(before[i], after[i]);
        }
    }

    #[test]
    fn sgd_divergence_restores_last_good_parameters() {
        let op = build_tfi::<f64>(3, 1.0, 1.0, false).unwrap();
        let mut ansatz = build_ansatz::<f64>(
            3,
            &AnsatzSpec::Rbm { hidden: 3 },
            0.2,
            41,
        )
        .unwrap();
        let sampler = SamplerConfig::new(2, 64, 5);
        let err = sgd_ground_state(
            &op,
            &mut ansatz,
            &sampler,
            &TransitionKernel::SingleFlip,
            1e15,
            10,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Diverged { .. }));
        let params = ansatz.parameters();
        for i in 0..params.len() {
            assert!(is_finite_c(params[i]));
        }
    }

    #[test]
    fn negative_learning_rate_rejected() {
        let op = build_tfi::<f64>(2, 1.0, 1.0, false).unwrap();
        let mut ansatz = build_ansatz::<f64>(
            2,
            &AnsatzSpec::Rbm { hidden: 2 },
            0.2,
            1,
        )
        .unwrap();
        let sampler = SamplerConfig::new(1, 16, 1);
        assert!(matches!(
            sgd_ground_state(
                &op,
                &mut ansatz,
                &sampler,
                &TransitionKernel::SingleFlip,
                -0.1,
                1
            ),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn invalid_evolution_config_rejected() {
        let config = EvolutionConfig::<f64>::new(EvolutionMode::RealTime, 0.0, 1);
        assert!(config.validate().is_err());
        let mut config = EvolutionConfig::<f64>::new(EvolutionMode::RealTime, 0.1, 1);
        config.regularization = -1.0;
        assert!(config.validate().is_err());
        assert_eq!(
            EvolutionConfig::<f64>::new(EvolutionMode::RealTime, 0.25, 8).total_duration(),
            2.0
        );
    }
}
