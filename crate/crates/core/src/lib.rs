//! Variational Monte Carlo engine for neural-quantum-state simulation of
//! quantum spin systems.
//!
//! The crate is organised around a small number of building blocks:
//!
//! * [`spin`] — configurations of N spin-1/2 sites and their basis encoding;
//! * [`operators`] — k-local operators as sums of weighted Pauli strings,
//!   with model builders (transverse-field Ising, anisotropic Heisenberg,
//!   Jordan–Wigner free fermions);
//! * [`exact`] — a dense/iterative exact solver used as an oracle at small
//!   system sizes (ground states, unitary evolution, Born sampling);
//! * [`ansatz`] — variational wavefunctions (restricted Boltzmann machines,
//!   a symmetrised RBM variant, Jastrow and mean-field baselines) behind one
//!   [`ansatz::AnsatzState`] contract;
//! * [`sampler`] — Markov-chain Monte Carlo over spin configurations with
//!   Metropolis-Hastings kernels and binning-based error diagnostics;
//! * [`vmc`] — stochastic estimation of observables and gradients, ground
//!   state optimisation (SGD and stochastic reconfiguration), real- and
//!   imaginary-time evolution, and variational gate application;
//! * [`tomography`] — reconstruction of a quantum state from projective
//!   measurement snapshots in multiple local bases.
//!
//! All numerical code is generic over the real scalar type through the
//! [`scalar::Real`] trait (`f32` or `f64`); the crate root exports concrete
//! `f64` aliases for the common types.

pub mod ansatz;
pub mod error;
pub mod exact;
pub mod operators;
pub mod sampler;
pub mod scalar;
pub mod spin;
pub mod tomography;
pub mod vmc;

pub use error::{Error, Result};
pub use scalar::{Cplx, Real};
pub use spin::{BasisIndex, SpinConfiguration};

/// Complex number over `f64`, the default working precision.
pub type C64 = Cplx<f64>;
/// Sum of weighted Pauli strings over `f64` coefficients.
pub type LocalOperator64 = operators::LocalOperator<f64>;
/// A single weighted Pauli string over `f64` coefficients.
pub type PauliString64 = operators::PauliString<f64>;
/// Dense state vector over `f64` amplitudes.
pub type StateVector64 = exact::StateVector<f64>;
/// Restricted Boltzmann machine ansatz over `f64` parameters.
pub type Rbm64 = ansatz::Rbm<f64>;
/// Translation-symmetrised RBM over `f64` parameters.
pub type SymmetricRbm64 = ansatz::SymmetricRbm<f64>;
/// Two-body Jastrow ansatz over `f64` parameters.
pub type Jastrow64 = ansatz::Jastrow<f64>;
/// Site-factorised mean-field ansatz over `f64` parameters.
pub type MeanField64 = ansatz::MeanField<f64>;
/// Runtime-dispatched ansatz over `f64` parameters.
pub type AnyAnsatz64 = ansatz::AnyAnsatz<f64>;
/// Monte Carlo sample batch over `f64`.
pub type SampleBatch64 = sampler::SampleBatch<f64>;
/// Monte Carlo estimate of a scalar expectation value over `f64`.
pub type EnergyEstimate64 = vmc::EnergyEstimate<f64>;
