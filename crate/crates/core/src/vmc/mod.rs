//! Variational Monte Carlo: stochastic estimators, gradients, the quantum
//! geometric tensor, ground-state optimisation, time evolution, and
//! variational gate application.
//!
//! Expectation values of a k-local operator Ô reduce to averages of its
//! local estimator O_loc(s) = Σ_{s′} ⟨s|Ô|s′⟩ Ψ(s′)/Ψ(s) over samples of
//! P(s) ∝ |Ψ(s)|². Every routine here accepts either a Monte Carlo
//! [`crate::sampler::SampleBatch`] or exhaustive full-basis summation
//! (exact weights, no statistical error) through [`EstimatorSource`], so
//! tests can swap the stochastic path for the deterministic one at small N.

mod estimator;
mod evolve;
mod gate;
mod gradient;
mod solver;

pub use estimator::{
    batch_local_energies, estimate_from_evaluated, evaluate_batch, expectation_estimate,
    full_estimate, full_expectation, local_estimator, EvaluatedBatch,
};
pub use evolve::{
    evolve, parameter_velocity, sgd_ground_state, time_step, EvolutionConfig, EvolutionMode,
    EvolveRecord, EvolveSampling, Integrator, StepRecord, TimeStepInfo, Trajectory,
};
pub use gate::{
    apply_gate_variational, gate_hadamard, gate_z, unitarity_check, GateConfig, GateOutcome,
};
pub use gradient::{
    energy_gradient, forces_from_evaluated, qgt_and_forces, qgt_from_evaluated, Qgt,
};
pub use solver::{solve_regularized, LinearSolver};

use crate::sampler::SampleBatch;
use crate::scalar::{Cplx, Real};

/// Where estimator rows come from.
#[derive(Debug, Clone, Copy)]
pub enum EstimatorSource<'a, T: Real> {
    /// Monte Carlo samples drawn from |Ψ|².
    Sampled(&'a SampleBatch<T>),
    /// Exhaustive summation over the full basis with |Ψ(s)|² weights
    /// (exact, capped at small site counts by basis enumeration).
    FullSummation,
}

/// Monte Carlo estimate of a scalar expectation value.
///
/// Satisfies `stderr = √(variance / effective_samples)` exactly; full
/// summation reports `stderr = 0` with infinite effective samples.
#[derive(Debug, Clone, Copy)]
pub struct EnergyEstimate<T: Real> {
    /// Estimated expectation value (imaginary part is statistical noise for
    /// Hermitian operators).
    pub mean: Cplx<T>,
    /// Sample variance of the local estimator.
    pub variance: T,
    /// Standard error ε of the mean, after binning correction.
    pub stderr: T,
    /// Number of effectively independent samples M/τ.
    pub effective_samples: T,
}
