//! Construction of operators, kernels, and ansatz states from a run
//! configuration.

use std::sync::Arc;

use nqs_core::ansatz::{build_ansatz, AnsatzSpec, AnyAnsatz};
use nqs_core::operators::{
    build_heisenberg_benchmark, build_tfi, jordan_wigner_free_fermions, mean_field_observable,
    LocalOperator,
};
use nqs_core::sampler::TransitionKernel;
use nqs_core::scalar::derive_seed;

use crate::config::{seed_stream, KernelChoice, ModelKind, RunConfig};
use crate::error::Result;
use crate::checkpoint;

/// Build the configured Hamiltonian.
pub fn build_model(cfg: &RunConfig) -> Result<LocalOperator<f64>> {
    let op = match cfg.model {
        ModelKind::Tfi => build_tfi(cfg.n, cfg.coupling, cfg.field, cfg.periodic)?,
        ModelKind::Heisenberg => build_heisenberg_benchmark(cfg.n, cfg.exchange, cfg.local_fields)?,
        ModelKind::FreeFermion => jordan_wigner_free_fermions(cfg.n)?,
    };
    Ok(op)
}

/// Build the configured proposal kernel. The Hamiltonian kernel proposes
/// moves along the connectivity of the given operator.
pub fn make_kernel(cfg: &RunConfig, op: &LocalOperator<f64>) -> Result<TransitionKernel<f64>> {
    Ok(match cfg.kernel {
        KernelChoice::SingleFlip => TransitionKernel::SingleFlip,
        KernelChoice::PairExchange => TransitionKernel::PairExchange,
        KernelChoice::Hamiltonian => TransitionKernel::hamiltonian(Arc::new(op.clone()))?,
    })
}

/// Mean-magnetization observables requested by the configuration, paired
/// with their column names.
pub fn build_observables(cfg: &RunConfig) -> Result<Vec<(String, LocalOperator<f64>)>> {
    cfg.observables
        .iter()
        .map(|&letter| {
            let name = format!("s{}", letter.letter().to_ascii_lowercase());
            Ok((name, mean_field_observable(cfg.n, letter)?))
        })
        .collect()
}

/// The starting ansatz: loaded from a checkpoint when one is configured,
/// otherwise freshly initialized from the master seed's init stream.
pub fn initial_ansatz(cfg: &RunConfig) -> Result<(AnsatzSpec, AnyAnsatz<f64>)> {
    match &cfg.load_checkpoint {
        Some(path) => checkpoint::load(path, cfg.n),
        None => {
            let spec = cfg.ansatz_spec()?;
            let ansatz =
                build_ansatz(cfg.n, &spec, cfg.scale, derive_seed(cfg.seed, seed_stream::INIT))?;
            Ok((spec, ansatz))
        }
    }
}
