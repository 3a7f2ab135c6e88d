//! Scratch calibration probe for optimizer settings (not part of the crate's
//! public surface; removed after use).

use std::time::Instant;

use nqs_core::ansatz::{build_ansatz, AnsatzSpec, AnsatzState};
use nqs_core::exact::ground_state;
use nqs_core::operators::build_tfi;
use nqs_core::sampler::{SamplerConfig, TransitionKernel};
use nqs_core::scalar::derive_seed;
use nqs_core::vmc::{
    evolve, full_expectation, EvolutionConfig, EvolutionMode, EvolveSampling, Integrator,
};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let alpha: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1);
    let segs: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(10);
    let samples: usize = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(250);
    let delta: f64 = args.get(5).and_then(|s| s.parse().ok()).unwrap_or(0.02);
    let lam_hi: f64 = args.get(6).and_then(|s| s.parse().ok()).unwrap_or(1e-3);
    let lam_lo: f64 = args.get(7).and_then(|s| s.parse().ok()).unwrap_or(1e-4);

    let n = 10;
    let per_seg = 90usize;
    let op = build_tfi::<f64>(n, 1.0, 1.0, true).unwrap();
    let exact = ground_state(&op).unwrap();

    let marshall: u8 = args.get(8).and_then(|s| s.parse().ok()).unwrap_or(0);
    let spec = AnsatzSpec::Rbm { hidden: alpha * n };
    let mut ansatz = build_ansatz::<f64>(n, &spec, 0.05, derive_seed(seed, 1)).unwrap();
    if marshall == 1 {
        let mut p = ansatz.parameters();
        for i in 0..n {
            p[i] += nqs_core::Cplx::new(0.0, std::f64::consts::FRAC_PI_2);
        }
        ansatz.set_parameters(&p).unwrap();
    }
    let kernel = TransitionKernel::SingleFlip;

    let t1 = Instant::now();
    let mut min_margin = f64::INFINITY;
    let mut checkpoints = Vec::new();
    for seg in 0..segs {
        let lambda = lam_hi * (lam_lo / lam_hi).powf(seg as f64 / 9.0);
        let mut sampler = SamplerConfig::new(4, samples.max(1), 25);
        sampler.seed = derive_seed(derive_seed(seed, 2), seg as u64);
        let mut evo = EvolutionConfig::new(EvolutionMode::ImaginaryTime, delta, per_seg);
        evo.regularization = lambda;
        evo.integrator = Integrator::Euler;
        let sampling = if samples == 0 {
            EvolveSampling::FullSummation
        } else {
            EvolveSampling::Sampled { config: &sampler, kernel: &kernel }
        };
        let records = evolve(&op, &mut ansatz, &evo, &sampling, &[]).unwrap();
        for r in &records {
            let margin = (r.energy.mean.re - exact.ground_energy) / r.energy.stderr.max(1e-300);
            min_margin = min_margin.min(margin);
        }
        let full = full_expectation(&op, &ansatz).unwrap().re;
        let rel = (full - exact.ground_energy) / exact.ground_energy.abs();
        println!("  seg {seg:2}  lam={lambda:.2e}  full={full:.8}  rel={rel:.3e}");
        checkpoints.push(full);
    }
    let elapsed = t1.elapsed().as_secs_f64();
    let final_energy = *checkpoints.last().unwrap();
    let rel = (final_energy - exact.ground_energy) / exact.ground_energy.abs();
    println!("alpha={alpha} seed={seed} segs={segs} M={} delta={delta}", 4 * samples);
    println!("  train {elapsed:.1}s  rel_err={rel:.3e}  min_margin={min_margin:.2}");
}
