//! Scratch calibration probe for the quench-dynamics settings (removed after
//! use).

use std::time::Instant;

use nqs_core::ansatz::{build_ansatz, AnsatzSpec, AnsatzState};
use nqs_core::exact::{evolve_exact, expectation, ground_state};
use nqs_core::operators::{build_tfi, mean_field_observable, Pauli};
use nqs_core::sampler::{SamplerConfig, TransitionKernel};
use nqs_core::scalar::derive_seed;
use nqs_core::vmc::{
    evolve, full_expectation, EvolutionConfig, EvolutionMode, EvolveSampling, Integrator,
};
use nqs_core::Cplx;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let alpha: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1);
    let steps: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(100);
    let samples: usize = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(250);
    let delta: f64 = args.get(5).and_then(|s| s.parse().ok()).unwrap_or(0.01);
    let prep_steps: usize = args.get(6).and_then(|s| s.parse().ok()).unwrap_or(400);
    let lambda: f64 = args.get(7).and_then(|s| s.parse().ok()).unwrap_or(1e-4);

    let n = 8;
    let h_i = build_tfi::<f64>(n, 1.0, 0.5, true).unwrap();
    let h_f = build_tfi::<f64>(n, 1.0, 1.0, true).unwrap();
    let sx = mean_field_observable::<f64>(n, Pauli::X).unwrap();

    // Exact reference: evolve the exact ground state of the initial model.
    let init = ground_state(&h_i).unwrap();
    let mut reference = Vec::with_capacity(steps + 1);
    let mut state = init.ground_state.clone();
    reference.push(expectation(&sx, &state).unwrap().re);
    for _ in 0..steps {
        state = evolve_exact(&h_f, &state, delta, 8).unwrap();
        reference.push(expectation(&sx, &state).unwrap().re);
    }

    // Variational preparation: full-summation SR on the initial model.
    let spec = AnsatzSpec::Rbm { hidden: alpha * n };
    let mut ansatz = build_ansatz::<f64>(n, &spec, 0.05, derive_seed(7, 1)).unwrap();
    let mut p = ansatz.parameters();
    for i in 0..n {
        p[i] += Cplx::new(0.0, std::f64::consts::FRAC_PI_2);
    }
    ansatz.set_parameters(&p).unwrap();
    let t0 = Instant::now();
    let mut prep = EvolutionConfig::new(EvolutionMode::ImaginaryTime, 0.05, prep_steps);
    prep.regularization = 1e-4;
    evolve(&h_i, &mut ansatz, &prep, &EvolveSampling::FullSummation, &[]).unwrap();
    let e_prep = full_expectation(&h_i, &ansatz).unwrap().re;
    let prep_rel = (e_prep - init.ground_energy) / init.ground_energy.abs();
    let sx0 = full_expectation(&sx, &ansatz).unwrap().re;
    println!(
        "alpha={alpha} prep {:.1}s rel={prep_rel:.2e} sx0={sx0:.5} (exact {:.5})",
        t0.elapsed().as_secs_f64(),
        reference[0]
    );

    // Sampled t-VMC under the quenched Hamiltonian, one segment per step so
    // the observable can be evaluated exactly on the variational state.
    let kernel = TransitionKernel::SingleFlip;
    let t1 = Instant::now();
    let mut theta = ansatz.clone();
    let mut max_dev: f64 = (sx0 - reference[0]).abs();
    let mut integrated = 0.0;
    for step in 0..steps {
        let mut sampler = SamplerConfig::new(4, samples.max(1), 25);
        sampler.seed = derive_seed(derive_seed(seed, 40), step as u64);
        let mut evo = EvolutionConfig::new(EvolutionMode::RealTime, delta, 1);
        evo.regularization = lambda;
        evo.integrator = Integrator::Rk4;
        let sampling = if samples == 0 {
            EvolveSampling::FullSummation
        } else {
            EvolveSampling::Sampled { config: &sampler, kernel: &kernel }
        };
        evolve(&h_f, &mut theta, &evo, &sampling, &[]).unwrap();
        let sx_t = full_expectation(&sx, &theta).unwrap().re;
        let dev = (sx_t - reference[step + 1]).abs();
        max_dev = max_dev.max(dev);
        integrated += dev * delta;
        if (step + 1) % 20 == 0 {
            println!(
                "  t={:.2}  sx={sx_t:.5}  exact={:.5}  dev={dev:.4}",
                (step + 1) as f64 * delta,
                reference[step + 1]
            );
        }
    }
    println!(
        "alpha={alpha} seed={seed} tvmc {:.1}s  max_dev={max_dev:.4}  integrated={integrated:.5}",
        t1.elapsed().as_secs_f64()
    );
}
