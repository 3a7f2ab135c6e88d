//! The six driver commands and the artifacts they write.
//!
//! Every command prepares the output directory, echoes the effective
//! configuration, runs, and finishes with `manifest.json`. Failures after the
//! directory exists leave a machine-readable `error.json` behind instead.

use std::time::Instant;

use nqs_core::exact::{
    dense_ansatz_state, evolve_exact, expectation, fidelity, ground_state,
};
use nqs_core::operators::{build_tfi, LocalOperator, Pauli};
use nqs_core::sampler::{run_chain_with_workers, worker_count};
use nqs_core::scalar::derive_seed;
use nqs_core::tomography::{
    generate_snapshots, parse_basis, reconstruct_fidelity, train_tomography, SnapshotDataset,
};
use nqs_core::vmc::{
    apply_gate_variational, evolve, full_expectation, gate_hadamard, gate_z, sgd_ground_state,
    EnergyEstimate, EvolutionConfig, EvolutionMode, EvolveSampling, GateConfig,
};
use nqs_core::SpinConfiguration;
use serde_json::json;

use crate::checkpoint;
use crate::config::{
    fmt_f64, seed_stream, CommandKind, EstimatorChoice, GateKind, GateMethodChoice, MethodChoice,
    RunConfig,
};
use crate::error::{CliError, Result};
use crate::model::{build_model, build_observables, initial_ansatz, make_kernel};
use crate::outdir::{opt_cell, seconds, Csv, OutDir};

/// Execute the configured command end to end.
pub fn run(cfg: &RunConfig) -> Result<()> {
    let started = Instant::now();
    let out = OutDir::prepare(&cfg.out, cfg.force)?;
    let workers = apply_worker_env(cfg.workers);
    let result = (|| {
        out.write_text("config.effective", &cfg.effective_echo())?;
        execute(cfg, &out)
    })();
    match result {
        Ok(mut artifacts) => {
            artifacts.push("config.effective".to_string());
            artifacts.sort();
            write_manifest(cfg, &out, &artifacts, workers, started)?;
            println!("{}: wrote {}", cfg.command.name(), cfg.out.display());
            Ok(())
        }
        Err(err) => {
            let record = json!({ "kind": err.kind(), "message": err.to_string() });
            let _ = out.write_json("error.json", &record);
            Err(err)
        }
    }
}

/// Resolve the worker count against the `NQS_THREADS` environment cap and
/// export the result so the engine's samplers pick it up.
fn apply_worker_env(requested: usize) -> usize {
    let cap = std::env::var("NQS_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&w| w >= 1);
    let effective = match cap {
        Some(limit) => requested.min(limit),
        None => requested,
    };
    std::env::set_var("NQS_THREADS", effective.to_string());
    effective
}

fn write_manifest(
    cfg: &RunConfig,
    out: &OutDir,
    artifacts: &[String],
    workers: usize,
    started: Instant,
) -> Result<()> {
    let record = json!({
        "command": cfg.command.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "workers": workers,
        "seeds": {
            "master": cfg.seed,
            "ansatz_init": derive_seed(cfg.seed, seed_stream::INIT),
            "sampler": derive_seed(cfg.seed, seed_stream::SAMPLER),
            "snapshots": derive_seed(cfg.seed, seed_stream::SNAPSHOTS),
        },
        "timings": { "total_seconds": seconds(started.elapsed()) },
        "artifacts": artifacts,
    });
    out.write_json("manifest.json", &record)
}

fn execute(cfg: &RunConfig, out: &OutDir) -> Result<Vec<String>> {
    match cfg.command {
        CommandKind::Gs => cmd_gs(cfg, out),
        CommandKind::Evolve => cmd_evolve(cfg, out),
        CommandKind::Gate => cmd_gate(cfg, out),
        CommandKind::Tomo => cmd_tomo(cfg, out),
        CommandKind::Exact => cmd_exact(cfg, out),
        CommandKind::Sample => cmd_sample(cfg, out),
    }
}

fn energy_cells(estimate: &EnergyEstimate<f64>) -> [String; 3] {
    [
        fmt_f64(estimate.mean.re),
        fmt_f64(estimate.mean.im),
        fmt_f64(estimate.stderr),
    ]
}

fn cmd_gs(cfg: &RunConfig, out: &OutDir) -> Result<Vec<String>> {
    let op = build_model(cfg)?;
    let (spec, mut ansatz) = initial_ansatz(cfg)?;
    let sampler = cfg.sampler_config();
    let kernel = make_kernel(cfg, &op)?;
    let mut csv = Csv::new(&["step", "energy_re", "energy_im", "stderr", "acceptance"]);
    let summary;
    match cfg.method {
        MethodChoice::Sr => {
            let mut evo = EvolutionConfig::new(EvolutionMode::ImaginaryTime, cfg.delta, cfg.steps);
            evo.regularization = cfg.lambda;
            evo.integrator = cfg.integrator;
            let sampling = match cfg.estimator {
                EstimatorChoice::Full => EvolveSampling::FullSummation,
                EstimatorChoice::Sampled => {
                    EvolveSampling::Sampled { config: &sampler, kernel: &kernel }
                }
            };
            let records = evolve(&op, &mut ansatz, &evo, &sampling, &[])?;
            for r in &records {
                let [re, im, se] = energy_cells(&r.energy);
                csv.row(&[r.step.to_string(), re, im, se, opt_cell(r.acceptance)]);
            }
            let last = records.last().expect("evolve always records the initial state");
            summary = json!({
                "method": "sr",
                "steps": records.len() - 1,
                "final_energy_re": last.energy.mean.re,
                "final_energy_im": last.energy.mean.im,
                "final_stderr": last.energy.stderr,
            });
        }
        MethodChoice::Sgd => {
            let trajectory =
                sgd_ground_state(&op, &mut ansatz, &sampler, &kernel, cfg.eta, cfg.steps)?;
            for r in &trajectory.records {
                let [re, im, se] = energy_cells(&r.energy);
                csv.row(&[r.step.to_string(), re, im, se, opt_cell(r.acceptance)]);
            }
            summary = match trajectory.records.last() {
                Some(last) => json!({
                    "method": "sgd",
                    "steps": trajectory.records.len(),
                    "final_energy_re": last.energy.mean.re,
                    "final_energy_im": last.energy.mean.im,
                    "final_stderr": last.energy.stderr,
                }),
                None => json!({ "method": "sgd", "steps": 0 }),
            };
        }
    }
    out.write_text("energy.csv", &csv.into_text())?;
    out.write_json("summary.json", &summary)?;
    checkpoint::save(&out.file(checkpoint::FILE_NAME), &spec, &ansatz)?;
    Ok(vec![
        "energy.csv".to_string(),
        "summary.json".to_string(),
        checkpoint::FILE_NAME.to_string(),
    ])
}

fn cmd_evolve(cfg: &RunConfig, out: &OutDir) -> Result<Vec<String>> {
    let op = build_model(cfg)?;
    let (spec, mut ansatz) = initial_ansatz(cfg)?;
    let sampler = cfg.sampler_config();
    let kernel = make_kernel(cfg, &op)?;
    let observables = build_observables(cfg)?;
    let obs_ops: Vec<LocalOperator<f64>> =
        observables.iter().map(|(_, op)| op.clone()).collect();

    let mut evo = EvolutionConfig::new(cfg.mode, cfg.delta, cfg.steps);
    evo.regularization = cfg.lambda;
    evo.integrator = cfg.integrator;
    let sampling = match cfg.estimator {
        EstimatorChoice::Full => EvolveSampling::FullSummation,
        EstimatorChoice::Sampled => EvolveSampling::Sampled { config: &sampler, kernel: &kernel },
    };
    let records = evolve(&op, &mut ansatz, &evo, &sampling, &obs_ops)?;

    let mut header: Vec<String> = ["step", "t", "energy_re", "energy_im", "stderr", "acceptance"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for (name, _) in &observables {
        header.push(format!("{name}_re"));
        header.push(format!("{name}_im"));
        header.push(format!("{name}_stderr"));
    }
    let mut csv = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    for r in &records {
        let mut row = vec![r.step.to_string(), fmt_f64(r.t)];
        let [re, im, se] = energy_cells(&r.energy);
        row.extend([re, im, se, opt_cell(r.acceptance)]);
        for estimate in &r.observables {
            row.extend(energy_cells(estimate));
        }
        csv.row(&row);
    }
    out.write_text("evolution.csv", &csv.into_text())?;

    let last = records.last().expect("evolve always records the initial state");
    out.write_json(
        "summary.json",
        &json!({
            "mode": match cfg.mode {
                EvolutionMode::RealTime => "real",
                EvolutionMode::ImaginaryTime => "imaginary",
            },
            "steps": records.len() - 1,
            "final_t": last.t,
            "final_energy_re": last.energy.mean.re,
            "final_energy_im": last.energy.mean.im,
            "final_stderr": last.energy.stderr,
        }),
    )?;
    checkpoint::save(&out.file(checkpoint::FILE_NAME), &spec, &ansatz)?;
    Ok(vec![
        "evolution.csv".to_string(),
        "summary.json".to_string(),
        checkpoint::FILE_NAME.to_string(),
    ])
}

fn cmd_gate(cfg: &RunConfig, out: &OutDir) -> Result<Vec<String>> {
    let (spec, mut ansatz) = initial_ansatz(cfg)?;
    let sampler = cfg.sampler_config();
    let mut csv =
        Csv::new(&["index", "gate", "site", "infidelity", "stderr", "steps", "converged"]);
    let mut total_steps = 0usize;
    let mut max_infidelity = 0.0f64;
    let mut all_converged = true;
    for (index, &(kind, site)) in cfg.gates.iter().enumerate() {
        match cfg.gate_method {
            GateMethodChoice::Analytic => {
                match kind {
                    GateKind::Z => ansatz.apply_z_gate(site)?,
                    GateKind::Hadamard => {
                        return Err(CliError::Config(
                            "the hadamard gate has no analytic update; use \
                             gate_method=variational"
                                .into(),
                        ))
                    }
                }
                csv.row(&[
                    index.to_string(),
                    kind.letter().to_string(),
                    site.to_string(),
                    fmt_f64(0.0),
                    fmt_f64(0.0),
                    "0".to_string(),
                    "true".to_string(),
                ]);
            }
            GateMethodChoice::Variational => {
                let gate_op = match kind {
                    GateKind::Z => gate_z::<f64>(cfg.n, site)?,
                    GateKind::Hadamard => gate_hadamard::<f64>(cfg.n, site)?,
                };
                let mut gate_cfg = GateConfig::new(cfg.eta, cfg.steps);
                gate_cfg.target_infidelity = cfg.target_infidelity;
                let outcome = apply_gate_variational(&gate_op, &mut ansatz, &sampler, &gate_cfg)?;
                total_steps += outcome.steps;
                max_infidelity = max_infidelity.max(outcome.infidelity);
                all_converged &= outcome.converged;
                csv.row(&[
                    index.to_string(),
                    kind.letter().to_string(),
                    site.to_string(),
                    fmt_f64(outcome.infidelity),
                    fmt_f64(outcome.stderr),
                    outcome.steps.to_string(),
                    outcome.converged.to_string(),
                ]);
            }
        }
    }
    out.write_text("gates.csv", &csv.into_text())?;
    out.write_json(
        "summary.json",
        &json!({
            "gates": cfg.gates.len(),
            "gate_method": cfg.gate_method.name(),
            "total_steps": total_steps,
            "max_infidelity": max_infidelity,
            "all_converged": all_converged,
        }),
    )?;
    checkpoint::save(&out.file(checkpoint::FILE_NAME), &spec, &ansatz)?;
    Ok(vec![
        "gates.csv".to_string(),
        "summary.json".to_string(),
        checkpoint::FILE_NAME.to_string(),
    ])
}

fn cmd_tomo(cfg: &RunConfig, out: &OutDir) -> Result<Vec<String>> {
    let op = build_model(cfg)?;
    let target = ground_state(&op)?.ground_state;
    let dataset = snapshot_dataset(cfg, &target)?;
    write_snapshots(out, &dataset)?;

    let (spec, mut ansatz) = initial_ansatz(cfg)?;
    let records = train_tomography(&mut ansatz, &dataset, cfg.eta, cfg.steps)?;
    let mut csv = Csv::new(&["step", "loss", "gradient_norm"]);
    for r in &records {
        csv.row(&[r.step.to_string(), fmt_f64(r.loss), fmt_f64(r.gradient_norm)]);
    }
    out.write_text("loss.csv", &csv.into_text())?;

    let fidelity = reconstruct_fidelity(&ansatz, &target)?;
    let first = records.first().expect("training always records the initial loss");
    let last = records.last().expect("training always records the final loss");
    out.write_json(
        "tomo.json",
        &json!({
            "fidelity": fidelity,
            "initial_loss": first.loss,
            "final_loss": last.loss,
            "shots_per_basis": cfg.shots,
            "total_shots": dataset.total_shots(),
            "bases": cfg.bases,
        }),
    )?;
    checkpoint::save(&out.file(checkpoint::FILE_NAME), &spec, &ansatz)?;
    Ok(vec![
        "snapshots.txt".to_string(),
        "loss.csv".to_string(),
        "tomo.json".to_string(),
        checkpoint::FILE_NAME.to_string(),
    ])
}

fn cmd_exact(cfg: &RunConfig, out: &OutDir) -> Result<Vec<String>> {
    let op = build_model(cfg)?;
    let spectral = ground_state(&op)?;
    let mut artifacts = vec!["ground_energy.txt".to_string(), "exact.json".to_string()];
    out.write_text("ground_energy.txt", &format!("{}\n", fmt_f64(spectral.ground_energy)))?;
    out.write_json(
        "exact.json",
        &json!({
            "model": cfg.model.name(),
            "n": cfg.n,
            "ground_energy": spectral.ground_energy,
            "gap": spectral.gap,
        }),
    )?;

    if !cfg.observables.is_empty() && cfg.steps > 0 {
        let observables = build_observables(cfg)?;
        let mut state = match cfg.initial_field {
            // A quench reference: start from the ground state of the
            // pre-quench field, evolve under the configured Hamiltonian.
            Some(h0) => {
                let pre = build_tfi(cfg.n, cfg.coupling, h0, cfg.periodic)?;
                ground_state(&pre)?.ground_state
            }
            None => spectral.ground_state.clone(),
        };
        let mut header: Vec<String> = vec!["step".to_string(), "t".to_string()];
        for (name, _) in &observables {
            header.push(format!("{name}_re"));
            header.push(format!("{name}_im"));
        }
        let mut csv = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
        // Substeps keep the integrator error of the reference far below the
        // tolerances it is compared against.
        let substeps = ((cfg.delta / 1e-3).ceil() as usize).max(1);
        for step in 0..=cfg.steps {
            let mut row = vec![step.to_string(), fmt_f64(step as f64 * cfg.delta)];
            for (_, obs) in &observables {
                let value = expectation(obs, &state)?;
                row.push(fmt_f64(value.re));
                row.push(fmt_f64(value.im));
            }
            csv.row(&row);
            if step < cfg.steps {
                state = evolve_exact(&op, &state, cfg.delta, substeps)?;
            }
        }
        out.write_text("reference.csv", &csv.into_text())?;
        artifacts.push("reference.csv".to_string());
    }

    if cfg.load_checkpoint.is_some() {
        let (_, ansatz) = initial_ansatz(cfg)?;
        let variational = full_expectation(&op, &ansatz)?;
        let dense = dense_ansatz_state(&ansatz)?;
        let overlap = fidelity(&dense, &spectral.ground_state)?;
        let denominator = spectral.ground_energy.abs().max(f64::MIN_POSITIVE);
        out.write_json(
            "report.json",
            &json!({
                "ground_energy": spectral.ground_energy,
                "variational_energy_re": variational.re,
                "variational_energy_im": variational.im,
                "relative_error": (variational.re - spectral.ground_energy) / denominator,
                "fidelity": overlap,
            }),
        )?;
        artifacts.push("report.json".to_string());
    }
    Ok(artifacts)
}

fn cmd_sample(cfg: &RunConfig, out: &OutDir) -> Result<Vec<String>> {
    if !cfg.bases.is_empty() {
        let op = build_model(cfg)?;
        let target = ground_state(&op)?.ground_state;
        let dataset = snapshot_dataset(cfg, &target)?;
        write_snapshots(out, &dataset)?;
        out.write_json(
            "summary.json",
            &json!({
                "source": "exact-ground-state",
                "bases": cfg.bases,
                "shots_per_basis": cfg.shots,
                "total_shots": dataset.total_shots(),
            }),
        )?;
        return Ok(vec!["snapshots.txt".to_string(), "summary.json".to_string()]);
    }

    let op = build_model(cfg)?;
    let (_, ansatz) = initial_ansatz(cfg)?;
    let sampler = cfg.sampler_config();
    let kernel = make_kernel(cfg, &op)?;
    let batch = run_chain_with_workers(&sampler, &kernel, &ansatz, worker_count())?;
    let mut csv = Csv::new(&["chain", "position", "configuration", "log_amp_re", "log_amp_im"]);
    for (i, entry) in batch.entries().iter().enumerate() {
        // Entries are chain-major: chain c owns one contiguous block.
        let chain = i / sampler.samples_per_chain;
        let position = i % sampler.samples_per_chain;
        let token = SpinConfiguration::decode(entry.index, cfg.n)?.token();
        csv.row(&[
            chain.to_string(),
            position.to_string(),
            token,
            fmt_f64(entry.log_amp.re),
            fmt_f64(entry.log_amp.im),
        ]);
    }
    out.write_text("samples.csv", &csv.into_text())?;
    out.write_json(
        "summary.json",
        &json!({
            "source": "markov-chain",
            "acceptance": batch.acceptance(),
            "chains": batch.n_chains(),
            "samples_per_chain": batch.samples_per_chain(),
        }),
    )?;
    Ok(vec!["samples.csv".to_string(), "summary.json".to_string()])
}

/// Generate snapshots of a reference state in the configured bases.
fn snapshot_dataset(
    cfg: &RunConfig,
    target: &nqs_core::exact::StateVector<f64>,
) -> Result<SnapshotDataset> {
    let bases: Vec<Vec<Pauli>> = cfg
        .bases
        .iter()
        .map(|token| parse_basis(token))
        .collect::<nqs_core::Result<_>>()?;
    Ok(generate_snapshots(
        target,
        &bases,
        cfg.shots,
        derive_seed(cfg.seed, seed_stream::SNAPSHOTS),
    )?)
}

fn write_snapshots(out: &OutDir, dataset: &SnapshotDataset) -> Result<()> {
    let mut lines: Vec<u8> = Vec::new();
    dataset.write_lines(&mut lines)?;
    out.write_text(
        "snapshots.txt",
        std::str::from_utf8(&lines).expect("snapshot lines are ASCII"),
    )
}
