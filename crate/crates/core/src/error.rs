//! Crate-wide error type.
//!
//! Errors are grouped by the contract they violate rather than by module:
//! domain errors (an argument outside its documented range), capacity errors
//! (a request that would exceed the enumerable system size), configuration
//! errors (inconsistent run set-up), numerical errors (a solve or estimate
//! that broke down), and Monte Carlo chain-state errors.

use thiserror::Error;

/// Errors produced by the engine.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside its documented domain (bad site index,
    /// mismatched lengths, value out of range).
    #[error("domain error: {0}")]
    Domain(String),

    /// The request would exceed a hard capacity limit, typically the full
    /// basis enumeration cap.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// Inconsistent or invalid run configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// A numerical procedure failed (singular solve, non-finite result).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// A Markov chain reached an invalid state (for example a configuration
    /// with zero wavefunction amplitude).
    #[error("chain state error: {0}")]
    ChainState(String),

    /// A transition kernel could not produce a proposal from the current
    /// configuration.
    #[error("proposal error: {0}")]
    Proposal(String),

    /// The model assigns zero amplitude to an observed measurement snapshot,
    /// making the log-likelihood undefined.
    #[error("zero model amplitude on snapshot: basis {basis}, outcome {outcome}")]
    ZeroAmplitudeSnapshot {
        /// Per-site measurement basis string, e.g. `ZXZZ`.
        basis: String,
        /// Observed outcome token, e.g. `udud`.
        outcome: String,
    },

    /// An optimisation produced a non-finite energy. The driver restores the
    /// last finite parameter vector on the ansatz before returning this.
    #[error("optimization diverged at step {step}: energy became non-finite")]
    Diverged {
        /// Step index at which the divergence was detected.
        step: usize,
    },

    /// Malformed serialized data (operator text, checkpoint, state vector,
    /// snapshot file).
    #[error("parse error: {0}")]
    Parse(String),

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
