//! Scratch calibration probe for the anisotropic-exchange benchmark (removed
//! after use).

use std::time::Instant;

use nqs_core::ansatz::{build_ansatz, AnsatzSpec};
use nqs_core::exact::ground_state;
use nqs_core::operators::build_heisenberg_benchmark;
use nqs_core::sampler::{SamplerConfig, TransitionKernel};
use nqs_core::scalar::derive_seed;
use nqs_core::vmc::{
    evolve, full_expectation, EvolutionConfig, EvolutionMode, EvolveSampling, Integrator,
};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let alpha: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1);
    let steps: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(600);
    let samples: usize = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(500);
    let delta: f64 = args.get(5).and_then(|s| s.parse().ok()).unwrap_or(0.02);

    let n = 4;
    let op = build_heisenberg_benchmark::<f64>(n, [1.0, 1.0, -1.0], [1.0, 1.5, 3.0]).unwrap();
    let exact = ground_state(&op).unwrap();

    let spec = AnsatzSpec::Rbm { hidden: alpha * n };
    let mut ansatz = build_ansatz::<f64>(n, &spec, 0.05, derive_seed(seed, 1)).unwrap();
    let kernel = TransitionKernel::SingleFlip;

    let t0 = Instant::now();
    let mut sampler = SamplerConfig::new(4, samples, 25);
    sampler.seed = derive_seed(seed, 2);
    let mut evo = EvolutionConfig::new(EvolutionMode::ImaginaryTime, delta, steps);
    evo.regularization = 1e-4;
    evo.integrator = Integrator::Euler;
    evolve(
        &op,
        &mut ansatz,
        &evo,
        &EvolveSampling::Sampled { config: &sampler, kernel: &kernel },
        &[],
    )
    .unwrap();
    let e = full_expectation(&op, &ansatz).unwrap().re;
    let rel = (e - exact.ground_energy) / exact.ground_energy.abs();
    println!(
        "alpha={alpha} seed={seed} steps={steps} M={} {:.1}s  E0={:.8}  rel={rel:.3e}",
        4 * samples,
        t0.elapsed().as_secs_f64(),
        exact.ground_energy
    );
}
