//! Scratch calibration probe for variational gate settings (removed after
//! use).

use std::time::Instant;

use nqs_core::ansatz::{build_ansatz, AnsatzSpec};
use nqs_core::exact::{apply_single_site_unitary, dense_ansatz_state, fidelity};
use nqs_core::sampler::SamplerConfig;
use nqs_core::vmc::{apply_gate_variational, gate_hadamard, gate_z, GateConfig};
use nqs_core::Cplx;

type C = Cplx<f64>;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let samples: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1500);
    let lr: f64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(0.1);
    let steps: usize = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(400);
    let target_infid: f64 = args.get(5).and_then(|s| s.parse().ok()).unwrap_or(1e-3);

    let root = std::f64::consts::FRAC_1_SQRT_2;
    let h_mat = [
        [C::new(root, 0.0), C::new(root, 0.0)],
        [C::new(root, 0.0), C::new(-root, 0.0)],
    ];
    let z_mat = [
        [C::new(1.0, 0.0), C::new(0.0, 0.0)],
        [C::new(0.0, 0.0), C::new(-1.0, 0.0)],
    ];

    // Variational Hadamard on site 0.
    let gate = gate_hadamard::<f64>(n, 0).unwrap();
    let mut ansatz = build_ansatz::<f64>(n, &AnsatzSpec::Rbm { hidden: 2 * n }, 0.2, 5).unwrap();
    let before = dense_ansatz_state(&ansatz).unwrap();
    let target = apply_single_site_unitary(&before, 0, &h_mat).unwrap();
    let sampler = SamplerConfig::new(4, samples, 42);
    let mut config = GateConfig::new(lr, steps);
    config.target_infidelity = target_infid;
    let t0 = Instant::now();
    let outcome = apply_gate_variational(&gate, &mut ansatz, &sampler, &config).unwrap();
    let after = dense_ansatz_state(&ansatz).unwrap();
    let fid = fidelity(&after, &target).unwrap();
    println!(
        "hadamard n={n} fid={fid:.6} steps={} infid_est={:.2e} converged={} {:.1}s",
        outcome.steps,
        outcome.infidelity,
        outcome.converged,
        t0.elapsed().as_secs_f64()
    );

    // Variational Z on site 1 vs the analytic update.
    let zgate = gate_z::<f64>(n, 1).unwrap();
    let mut var = build_ansatz::<f64>(n, &AnsatzSpec::Rbm { hidden: 2 * n }, 0.2, 9).unwrap();
    let mut ana = var.clone();
    let before = dense_ansatz_state(&var).unwrap();
    let target_z = apply_single_site_unitary(&before, 1, &z_mat).unwrap();
    let t1 = Instant::now();
    let outcome = apply_gate_variational(&zgate, &mut var, &sampler, &config).unwrap();
    ana.apply_z_gate(1).unwrap();
    let var_dense = dense_ansatz_state(&var).unwrap();
    let ana_dense = dense_ansatz_state(&ana).unwrap();
    let fid_va = fidelity(&var_dense, &ana_dense).unwrap();
    let fid_at = fidelity(&ana_dense, &target_z).unwrap();
    println!(
        "z n={n} fid(var,analytic)={fid_va:.6} fid(analytic,target)={fid_at:.10} steps={} {:.1}s",
        outcome.steps,
        t1.elapsed().as_secs_f64()
    );
}
