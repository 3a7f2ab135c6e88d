//! Run configuration: `key=value` file parsing, defaults, and flag overrides.
//!
//! A configuration file is a flat list of `key=value` lines. Blank lines and
//! lines starting with `#` are ignored. A `[section]` header is accepted as a
//! visual grouping aid but does not scope anything: every key lives in one
//! flat namespace, so a key may appear once in the whole file no matter which
//! sections the occurrences sit under. Unknown keys are rejected and reported
//! with their section qualification (`sampler.foo`) so the offending line is
//! easy to find.
//!
//! Precedence, lowest to highest: built-in defaults, the configuration file,
//! `--set key=value` overrides in order, then the dedicated flags
//! (`--out`, `--seed`, `--chains`).

use std::collections::BTreeMap;
use std::path::PathBuf;

use nqs_core::ansatz::{AnsatzSpec, SymmetryGroup};
use nqs_core::operators::Pauli;
use nqs_core::sampler::SamplerConfig;
use nqs_core::scalar::derive_seed;
use nqs_core::vmc::{EvolutionMode, Integrator};

use crate::error::{CliError, Result};

/// Seed stream offsets for the independently seeded run phases.
pub mod seed_stream {
    /// Ansatz parameter initialization.
    pub const INIT: u64 = 1;
    /// Markov-chain sampling.
    pub const SAMPLER: u64 = 2;
    /// Synthetic measurement snapshot generation.
    pub const SNAPSHOTS: u64 = 3;
}

/// Values supplied on the command line; they beat the configuration file.
#[derive(Debug, Default)]
pub struct Overrides {
    /// `--out DIR`.
    pub out: Option<PathBuf>,
    /// `--seed N`.
    pub seed: Option<u64>,
    /// `--chains N`.
    pub chains: Option<usize>,
    /// `--force`.
    pub force: bool,
    /// `--set key=value`, applied in order after the file.
    pub set: Vec<String>,
}

/// Which subcommand is running.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    /// Ground-state search.
    Gs,
    /// Real- or imaginary-time evolution.
    Evolve,
    /// Gate application.
    Gate,
    /// Measurement-driven state reconstruction.
    Tomo,
    /// Exact-diagonalization reference.
    Exact,
    /// Draw samples or synthetic measurement snapshots.
    Sample,
}

impl CommandKind {
    /// Stable text name (matches the subcommand).
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Gs => "gs",
            CommandKind::Evolve => "evolve",
            CommandKind::Gate => "gate",
            CommandKind::Tomo => "tomo",
            CommandKind::Exact => "exact",
            CommandKind::Sample => "sample",
        }
    }
}

/// Hamiltonian family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// Transverse-field Ising chain (`J`, `h`).
    Tfi,
    /// Anisotropic Heisenberg benchmark chain (`jx..jz`, `hx..hz`).
    Heisenberg,
    /// Free fermions mapped to a spin chain (no parameters).
    FreeFermion,
}

impl ModelKind {
    /// Stable text name.
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Tfi => "tfi",
            ModelKind::Heisenberg => "heisenberg",
            ModelKind::FreeFermion => "free-fermion",
        }
    }
}

/// Variational family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnsatzChoice {
    /// Dense RBM; hidden units = `alpha`·n.
    Rbm,
    /// Translation-averaged RBM; `alpha` feature filters.
    SymmetricRbm,
    /// Pairwise Jastrow factor.
    Jastrow,
    /// Site-product mean field.
    MeanField,
}

impl AnsatzChoice {
    /// Stable text name.
    pub fn name(self) -> &'static str {
        match self {
            AnsatzChoice::Rbm => "rbm",
            AnsatzChoice::SymmetricRbm => "symmetric-rbm",
            AnsatzChoice::Jastrow => "jastrow",
            AnsatzChoice::MeanField => "mean-field",
        }
    }
}

/// Proposal kernel selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelChoice {
    /// Uniform single spin flip.
    SingleFlip,
    /// Magnetization-conserving pair exchange.
    PairExchange,
    /// Proposals drawn from the Hamiltonian's connectivity.
    Hamiltonian,
}

impl KernelChoice {
    /// Stable text name.
    pub fn name(self) -> &'static str {
        match self {
            KernelChoice::SingleFlip => "single-flip",
            KernelChoice::PairExchange => "pair-exchange",
            KernelChoice::Hamiltonian => "hamiltonian",
        }
    }
}

/// Expectation-value source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorChoice {
    /// Markov-chain Monte Carlo sampling.
    Sampled,
    /// Exhaustive full-basis summation (small systems only).
    Full,
}

impl EstimatorChoice {
    /// Stable text name.
    pub fn name(self) -> &'static str {
        match self {
            EstimatorChoice::Sampled => "sampled",
            EstimatorChoice::Full => "full",
        }
    }
}

/// Ground-state optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    /// Stochastic reconfiguration (imaginary-time flow).
    Sr,
    /// Plain stochastic gradient descent.
    Sgd,
}

impl MethodChoice {
    /// Stable text name.
    pub fn name(self) -> &'static str {
        match self {
            MethodChoice::Sr => "sr",
            MethodChoice::Sgd => "sgd",
        }
    }
}

/// How gates are applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateMethodChoice {
    /// Variational infidelity minimization (any supported gate).
    Variational,
    /// Exact parameter update (Pauli-Z on an RBM only).
    Analytic,
}

impl GateMethodChoice {
    /// Stable text name.
    pub fn name(self) -> &'static str {
        match self {
            GateMethodChoice::Variational => "variational",
            GateMethodChoice::Analytic => "analytic",
        }
    }
}

/// A single gate in a `gates` list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    /// Single-site Hadamard.
    Hadamard,
    /// Single-site Pauli-Z.
    Z,
}

impl GateKind {
    /// One-letter text name used in `gates` tokens and output rows.
    pub fn letter(self) -> char {
        match self {
            GateKind::Hadamard => 'h',
            GateKind::Z => 'z',
        }
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Invoked subcommand.
    pub command: CommandKind,
    /// Hamiltonian family.
    pub model: ModelKind,
    /// Number of sites.
    pub n: usize,
    /// Periodic boundary (TFI only; the other models are open chains).
    pub periodic: bool,
    /// Ising coupling `J` (TFI).
    pub coupling: f64,
    /// Transverse field `h` (TFI).
    pub field: f64,
    /// Optional pre-quench field `h0` (TFI; used by `exact` to pick the
    /// initial state of a reference evolution).
    pub initial_field: Option<f64>,
    /// Heisenberg exchange couplings `[jx, jy, jz]`.
    pub exchange: [f64; 3],
    /// Heisenberg local fields `[hx, hy, hz]`.
    pub local_fields: [f64; 3],
    /// Variational family.
    pub ansatz: AnsatzChoice,
    /// Width multiplier: hidden units per site (RBM) or feature filters
    /// (symmetric RBM).
    pub alpha: usize,
    /// Standard deviation of the random parameter initialization.
    pub scale: f64,
    /// Master seed; all phase seeds derive from it.
    pub seed: u64,
    /// Markov-chain count.
    pub chains: usize,
    /// Retained samples per chain.
    pub samples: usize,
    /// Full sweeps between retained samples.
    pub sweeps: usize,
    /// Burn-in sweeps before retention starts.
    pub burn_in: usize,
    /// Proposal kernel.
    pub kernel: KernelChoice,
    /// Optional magnetization sector restriction.
    pub sector: Option<i64>,
    /// Expectation-value source.
    pub estimator: EstimatorChoice,
    /// Ground-state optimizer (`gs` only).
    pub method: MethodChoice,
    /// Learning rate for gradient-based updates.
    pub eta: f64,
    /// Number of optimization or evolution steps.
    pub steps: usize,
    /// Time step for evolution methods.
    pub delta: f64,
    /// Diagonal regularization of the geometric tensor.
    pub lambda: f64,
    /// Time integrator.
    pub integrator: Integrator,
    /// Evolution mode (`evolve` only; `gs` always flows in imaginary time).
    pub mode: EvolutionMode,
    /// Mean-field observables to record, as Pauli letters.
    pub observables: Vec<Pauli>,
    /// Gate sequence (`gate` only).
    pub gates: Vec<(GateKind, usize)>,
    /// Gate application method.
    pub gate_method: GateMethodChoice,
    /// Early-stop threshold for variational gates.
    pub target_infidelity: f64,
    /// Measurement basis tokens (uppercased, validated).
    pub bases: Vec<String>,
    /// Snapshots per basis.
    pub shots: usize,
    /// Output directory.
    pub out: PathBuf,
    /// Replace an existing output directory.
    pub force: bool,
    /// Requested worker thread count.
    pub workers: usize,
    /// Optional checkpoint to start from.
    pub load_checkpoint: Option<PathBuf>,
}

impl RunConfig {
    /// Parse, merge, default, and validate a run configuration.
    pub fn assemble(command: CommandKind, file: Option<&str>, ov: &Overrides) -> Result<Self> {
        let mut raw = RawConfig::parse(file.unwrap_or(""))?;
        for pair in &ov.set {
            raw.override_pair(pair)?;
        }

        if let Some(value) = raw.take("command") {
            if value.text != command.name() {
                return Err(CliError::Config(format!(
                    "the file says command={} but the invoked subcommand is {}",
                    value.text,
                    command.name()
                )));
            }
        }

        let model = match raw.take("model") {
            Some(v) => match v.text.as_str() {
                "tfi" => ModelKind::Tfi,
                "heisenberg" => ModelKind::Heisenberg,
                "free-fermion" => ModelKind::FreeFermion,
                other => {
                    return Err(bad_value(&v.path, "one of tfi, heisenberg, free-fermion", other))
                }
            },
            None => return Err(CliError::Config("missing required key 'model'".into())),
        };
        let n = match raw.take("n") {
            Some(v) => parse_num::<usize>(&v, "a positive integer", |x| *x >= 1)?,
            None => return Err(CliError::Config("missing required key 'n'".into())),
        };

        let periodic = match raw.take("boundary") {
            Some(v) => match v.text.as_str() {
                "open" => false,
                "periodic" => true,
                other => return Err(bad_value(&v.path, "open or periodic", other)),
            },
            None => false,
        };

        // Model parameters. Keys of the other families are rejected so a typo
        // like setting jx on a TFI run cannot pass silently.
        let tfi_keys = [raw.take("J"), raw.take("h"), raw.take("h0")];
        let heis_keys = [
            raw.take("jx"),
            raw.take("jy"),
            raw.take("jz"),
            raw.take("hx"),
            raw.take("hy"),
            raw.take("hz"),
        ];
        let mut coupling = 1.0;
        let mut field = 1.0;
        let mut initial_field = None;
        let mut exchange = [1.0, 1.0, -1.0];
        let mut local_fields = [1.0, 1.5, 3.0];
        match model {
            ModelKind::Tfi => {
                reject_foreign(&heis_keys, model)?;
                let [j, h, h0] = tfi_keys;
                if let Some(v) = j {
                    coupling = parse_num::<f64>(&v, "a finite number", |x| x.is_finite())?;
                }
                if let Some(v) = h {
                    field = parse_num::<f64>(&v, "a finite number", |x| x.is_finite())?;
                }
                if let Some(v) = h0 {
                    initial_field =
                        Some(parse_num::<f64>(&v, "a finite number", |x| x.is_finite())?);
                }
            }
            ModelKind::Heisenberg => {
                reject_foreign(&tfi_keys, model)?;
                if periodic {
                    return Err(CliError::Config(
                        "the heisenberg model is an open chain; set boundary=open".into(),
                    ));
                }
                for (slot, value) in exchange
                    .iter_mut()
                    .chain(local_fields.iter_mut())
                    .zip(heis_keys.into_iter())
                {
                    if let Some(v) = value {
                        *slot = parse_num::<f64>(&v, "a finite number", |x| x.is_finite())?;
                    }
                }
            }
            ModelKind::FreeFermion => {
                reject_foreign(&tfi_keys, model)?;
                reject_foreign(&heis_keys, model)?;
                if periodic {
                    return Err(CliError::Config(
                        "the free-fermion model is an open chain; set boundary=open".into(),
                    ));
                }
            }
        }

        let ansatz = match raw.take("ansatz") {
            Some(v) => match v.text.as_str() {
                "rbm" => AnsatzChoice::Rbm,
                "symmetric-rbm" => AnsatzChoice::SymmetricRbm,
                "jastrow" => AnsatzChoice::Jastrow,
                "mean-field" => AnsatzChoice::MeanField,
                other => return Err(bad_value(
                    &v.path,
                    "one of rbm, symmetric-rbm, jastrow, mean-field",
                    other,
                )),
            },
            None => AnsatzChoice::Rbm,
        };
        let alpha = take_num(&mut raw, "alpha", 2usize, "a positive integer", |x| *x >= 1)?;
        let scale =
            take_num(&mut raw, "scale", 0.05f64, "a positive number", |x| x.is_finite() && *x > 0.0)?;

        let seed = match ov.seed {
            Some(s) => {
                raw.take("seed");
                s
            }
            None => take_num(&mut raw, "seed", 0u64, "an unsigned integer", |_| true)?,
        };
        let chains = match ov.chains {
            Some(c) if c >= 1 => {
                raw.take("chains");
                c
            }
            Some(_) => return Err(CliError::Config("--chains must be at least 1".into())),
            None => take_num(&mut raw, "chains", 4usize, "a positive integer", |x| *x >= 1)?,
        };
        let samples = take_num(&mut raw, "samples", 1000usize, "a positive integer", |x| *x >= 1)?;
        let sweeps = take_num(&mut raw, "sweeps", 1usize, "a positive integer", |x| *x >= 1)?;
        let burn_in = match raw.take("burn_in") {
            Some(v) => parse_num::<usize>(&v, "an unsigned integer", |_| true)?,
            None => (samples * sweeps).div_ceil(10),
        };

        let kernel = match raw.take("kernel") {
            Some(v) => match v.text.as_str() {
                "single-flip" => KernelChoice::SingleFlip,
                "pair-exchange" => KernelChoice::PairExchange,
                "hamiltonian" => KernelChoice::Hamiltonian,
                other => return Err(bad_value(
                    &v.path,
                    "one of single-flip, pair-exchange, hamiltonian",
                    other,
                )),
            },
            None => KernelChoice::SingleFlip,
        };
        let sector = match raw.take("sector") {
            Some(v) => Some(parse_num::<i64>(&v, "an integer", |_| true)?),
            None => None,
        };

        let estimator = match raw.take("estimator") {
            Some(v) => match v.text.as_str() {
                "sampled" => EstimatorChoice::Sampled,
                "full" => EstimatorChoice::Full,
                other => return Err(bad_value(&v.path, "sampled or full", other)),
            },
            None => EstimatorChoice::Sampled,
        };
        let method = match raw.take("method") {
            Some(v) => match v.text.as_str() {
                "sr" => MethodChoice::Sr,
                "sgd" => MethodChoice::Sgd,
                other => return Err(bad_value(&v.path, "sr or sgd", other)),
            },
            None => MethodChoice::Sr,
        };
        if method == MethodChoice::Sgd && estimator == EstimatorChoice::Full {
            return Err(CliError::Config(
                "method=sgd draws Monte Carlo batches; it does not support estimator=full".into(),
            ));
        }

        let eta = take_num(&mut raw, "eta", 0.05f64, "a non-negative number", |x| {
            x.is_finite() && *x >= 0.0
        })?;
        let steps = take_num(&mut raw, "steps", 200usize, "an unsigned integer", |_| true)?;
        let delta = take_num(&mut raw, "delta", 0.01f64, "a positive number", |x| {
            x.is_finite() && *x > 0.0
        })?;
        let lambda = take_num(&mut raw, "lambda", 1e-4f64, "a non-negative number", |x| {
            x.is_finite() && *x >= 0.0
        })?;
        let integrator = match raw.take("integrator") {
            Some(v) => Integrator::from_name(&v.text)
                .map_err(|_| bad_value(&v.path, "euler or rk4", &v.text))?,
            None => Integrator::Euler,
        };
        let mode = match raw.take("mode") {
            Some(v) => match v.text.as_str() {
                "real" => EvolutionMode::RealTime,
                "imaginary" => EvolutionMode::ImaginaryTime,
                other => return Err(bad_value(&v.path, "real or imaginary", other)),
            },
            None => EvolutionMode::RealTime,
        };

        let observables = match raw.take("observables") {
            Some(v) => parse_observables(&v)?,
            None => Vec::new(),
        };
        let gates = match raw.take("gates") {
            Some(v) => parse_gates(&v, n)?,
            None => Vec::new(),
        };
        let gate_method = match raw.take("gate_method") {
            Some(v) => match v.text.as_str() {
                "variational" => GateMethodChoice::Variational,
                "analytic" => GateMethodChoice::Analytic,
                other => return Err(bad_value(&v.path, "variational or analytic", other)),
            },
            None => GateMethodChoice::Variational,
        };
        let target_infidelity =
            take_num(&mut raw, "target_infidelity", 1e-3f64, "a positive number", |x| {
                x.is_finite() && *x > 0.0
            })?;

        let bases = match raw.take("bases") {
            Some(v) => parse_bases(&v, n)?,
            None => Vec::new(),
        };
        let shots = take_num(&mut raw, "shots", 10_000usize, "a positive integer", |x| *x >= 1)?;

        let out = match &ov.out {
            Some(path) => {
                raw.take("out");
                path.clone()
            }
            None => match raw.take("out") {
                Some(v) => PathBuf::from(v.text),
                None => PathBuf::from("nqs-run"),
            },
        };
        let workers = take_num(&mut raw, "workers", 1usize, "a positive integer", |x| *x >= 1)?;
        let load_checkpoint = raw.take("load_checkpoint").map(|v| PathBuf::from(v.text));

        raw.finish()?;

        if command == CommandKind::Gate && gates.is_empty() {
            return Err(CliError::Config(
                "the gate command needs a non-empty 'gates' list, e.g. gates=h0,z1".into(),
            ));
        }
        if command == CommandKind::Tomo && bases.is_empty() {
            return Err(CliError::Config(
                "the tomo command needs a non-empty 'bases' list, e.g. bases=ZZZZ,XXXX".into(),
            ));
        }
        if initial_field.is_some() && command != CommandKind::Exact {
            return Err(CliError::Config(
                "h0 selects the initial state of an exact reference evolution; it only applies \
                 to the exact command"
                    .into(),
            ));
        }

        Ok(RunConfig {
            command,
            model,
            n,
            periodic,
            coupling,
            field,
            initial_field,
            exchange,
            local_fields,
            ansatz,
            alpha,
            scale,
            seed,
            chains,
            samples,
            sweeps,
            burn_in,
            kernel,
            sector,
            estimator,
            method,
            eta,
            steps,
            delta,
            lambda,
            integrator,
            mode,
            observables,
            gates,
            gate_method,
            target_infidelity,
            bases,
            shots,
            out,
            force: ov.force,
            workers,
            load_checkpoint,
        })
    }

    /// The ansatz specification this configuration asks for.
    pub fn ansatz_spec(&self) -> Result<AnsatzSpec> {
        Ok(match self.ansatz {
            AnsatzChoice::Rbm => AnsatzSpec::Rbm { hidden: self.alpha * self.n },
            AnsatzChoice::SymmetricRbm => AnsatzSpec::SymmetricRbm {
                features: self.alpha,
                group: SymmetryGroup::translations(self.n)?,
            },
            AnsatzChoice::Jastrow => AnsatzSpec::Jastrow,
            AnsatzChoice::MeanField => AnsatzSpec::MeanField,
        })
    }

    /// Sampler configuration with the run's derived sampling seed.
    pub fn sampler_config(&self) -> SamplerConfig {
        SamplerConfig {
            n_chains: self.chains,
            samples_per_chain: self.samples,
            sweeps_per_sample: self.sweeps,
            burn_in_sweeps: self.burn_in,
            seed: derive_seed(self.seed, seed_stream::SAMPLER),
            sector: self.sector,
        }
    }

    /// The effective configuration as a sorted `key=value` file, reusable as
    /// a configuration file for an identical rerun.
    pub fn effective_echo(&self) -> String {
        let mut pairs: Vec<(String, String)> = vec![
            ("command".into(), self.command.name().into()),
            ("model".into(), self.model.name().into()),
            ("n".into(), self.n.to_string()),
            (
                "boundary".into(),
                if self.periodic { "periodic" } else { "open" }.into(),
            ),
            ("ansatz".into(), self.ansatz.name().into()),
            ("alpha".into(), self.alpha.to_string()),
            ("scale".into(), fmt_f64(self.scale)),
            ("seed".into(), self.seed.to_string()),
            ("chains".into(), self.chains.to_string()),
            ("samples".into(), self.samples.to_string()),
            ("sweeps".into(), self.sweeps.to_string()),
            ("burn_in".into(), self.burn_in.to_string()),
            ("kernel".into(), self.kernel.name().into()),
            ("estimator".into(), self.estimator.name().into()),
            ("method".into(), self.method.name().into()),
            ("eta".into(), fmt_f64(self.eta)),
            ("steps".into(), self.steps.to_string()),
            ("delta".into(), fmt_f64(self.delta)),
            ("lambda".into(), fmt_f64(self.lambda)),
            ("integrator".into(), self.integrator.name().into()),
            (
                "mode".into(),
                match self.mode {
                    EvolutionMode::RealTime => "real",
                    EvolutionMode::ImaginaryTime => "imaginary",
                }
                .into(),
            ),
            ("gate_method".into(), self.gate_method.name().into()),
            ("target_infidelity".into(), fmt_f64(self.target_infidelity)),
            ("shots".into(), self.shots.to_string()),
            ("out".into(), self.out.display().to_string()),
            ("workers".into(), self.workers.to_string()),
        ];
        match self.model {
            ModelKind::Tfi => {
                pairs.push(("J".into(), fmt_f64(self.coupling)));
                pairs.push(("h".into(), fmt_f64(self.field)));
                if let Some(h0) = self.initial_field {
                    pairs.push(("h0".into(), fmt_f64(h0)));
                }
            }
            ModelKind::Heisenberg => {
                for (key, value) in ["jx", "jy", "jz"].iter().zip(self.exchange) {
                    pairs.push(((*key).into(), fmt_f64(value)));
                }
                for (key, value) in ["hx", "hy", "hz"].iter().zip(self.local_fields) {
                    pairs.push(((*key).into(), fmt_f64(value)));
                }
            }
            ModelKind::FreeFermion => {}
        }
        if let Some(sector) = self.sector {
            pairs.push(("sector".into(), sector.to_string()));
        }
        if !self.observables.is_empty() {
            let joined: Vec<String> = self
                .observables
                .iter()
                .map(|p| format!("s{}", p.letter().to_ascii_lowercase()))
                .collect();
            pairs.push(("observables".into(), joined.join(",")));
        }
        if !self.gates.is_empty() {
            let joined: Vec<String> = self
                .gates
                .iter()
                .map(|(kind, site)| format!("{}{site}", kind.letter()))
                .collect();
            pairs.push(("gates".into(), joined.join(",")));
        }
        if !self.bases.is_empty() {
            pairs.push(("bases".into(), self.bases.join(",")));
        }
        if let Some(path) = &self.load_checkpoint {
            pairs.push(("load_checkpoint".into(), path.display().to_string()));
        }
        pairs.sort();
        let mut text = String::new();
        for (key, value) in pairs {
            text.push_str(&key);
            text.push('=');
            text.push_str(&value);
            text.push('\n');
        }
        text
    }
}

/// Canonical float formatting for echoes, CSV cells, and plain-text outputs:
/// the shortest decimal string that parses back to the same value.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// One raw value with the section-qualified path it was found under.
#[derive(Debug, Clone)]
struct RawValue {
    path: String,
    text: String,
}

/// Parsed but not yet interpreted configuration lines.
#[derive(Debug, Default)]
struct RawConfig {
    entries: BTreeMap<String, RawValue>,
}

impl RawConfig {
    fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut section: Option<String> = None;
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(header) = line.strip_prefix('[') {
                let Some(name) = header.strip_suffix(']') else {
                    return Err(CliError::Config(format!(
                        "line {line_no}: section header does not end with ']'"
                    )));
                };
                let name = name.trim();
                if !is_identifier(name) {
                    return Err(CliError::Config(format!(
                        "line {line_no}: invalid section name '{name}'"
                    )));
                }
                section = Some(name.to_string());
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config(format!(
                    "line {line_no}: expected key=value, got '{line}'"
                )));
            };
            let key = key.trim();
            let value = value.trim();
            if !is_identifier(key) {
                return Err(CliError::Config(format!("line {line_no}: invalid key '{key}'")));
            }
            let path = match &section {
                Some(s) => format!("{s}.{key}"),
                None => key.to_string(),
            };
            if let Some(previous) = entries.insert(
                key.to_string(),
                RawValue { path: path.clone(), text: value.to_string() },
            ) {
                return Err(CliError::Config(format!(
                    "line {line_no}: duplicate key '{path}' (keys share one flat namespace; \
                     first seen as '{}')",
                    previous.path
                )));
            }
        }
        Ok(RawConfig { entries })
    }

    /// Apply one `--set key=value` pair, replacing any file value.
    fn override_pair(&mut self, pair: &str) -> Result<()> {
        let Some((key, value)) = pair.split_once('=') else {
            return Err(CliError::Config(format!("--set expects key=value, got '{pair}'")));
        };
        let key = key.trim();
        if !is_identifier(key) {
            return Err(CliError::Config(format!("--set: invalid key '{key}'")));
        }
        self.entries.insert(
            key.to_string(),
            RawValue { path: key.to_string(), text: value.trim().to_string() },
        );
        Ok(())
    }

    fn take(&mut self, key: &str) -> Option<RawValue> {
        self.entries.remove(key)
    }

    /// Reject any keys nothing consumed.
    fn finish(self) -> Result<()> {
        if self.entries.is_empty() {
            return Ok(());
        }
        let mut paths: Vec<String> =
            self.entries.into_values().map(|v| format!("'{}'", v.path)).collect();
        paths.sort();
        let noun = if paths.len() == 1 { "key" } else { "keys" };
        Err(CliError::Config(format!("unknown configuration {noun} {}", paths.join(", "))))
    }
}

/// Reject parameters that belong to a different model family.
fn reject_foreign(keys: &[Option<RawValue>], model: ModelKind) -> Result<()> {
    if let Some(value) = keys.iter().flatten().next() {
        return Err(CliError::Config(format!(
            "key '{}' does not apply to model={}",
            value.path,
            model.name()
        )));
    }
    Ok(())
}

fn is_identifier(text: &str) -> bool {
    let mut chars = text.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn bad_value(path: &str, expected: &str, got: &str) -> CliError {
    CliError::Config(format!("key '{path}': expected {expected}, got '{got}'"))
}

fn parse_num<T: std::str::FromStr>(
    value: &RawValue,
    expected: &str,
    check: impl Fn(&T) -> bool,
) -> Result<T> {
    match value.text.parse::<T>() {
        Ok(parsed) if check(&parsed) => Ok(parsed),
        _ => Err(bad_value(&value.path, expected, &value.text)),
    }
}

fn take_num<T: std::str::FromStr>(
    raw: &mut RawConfig,
    key: &str,
    default: T,
    expected: &str,
    check: impl Fn(&T) -> bool,
) -> Result<T> {
    match raw.take(key) {
        Some(v) => parse_num(&v, expected, check),
        None => Ok(default),
    }
}

fn parse_observables(value: &RawValue) -> Result<Vec<Pauli>> {
    let mut letters = Vec::new();
    for token in value.text.split(',') {
        let token = token.trim();
        match token {
            "sx" => letters.push(Pauli::X),
            "sy" => letters.push(Pauli::Y),
            "sz" => letters.push(Pauli::Z),
            other => {
                return Err(bad_value(&value.path, "a comma list of sx, sy, sz", other));
            }
        }
    }
    Ok(letters)
}

fn parse_gates(value: &RawValue, n: usize) -> Result<Vec<(GateKind, usize)>> {
    let mut gates = Vec::new();
    for token in value.text.split(',') {
        let token = token.trim();
        let mut chars = token.chars();
        let kind = match chars.next() {
            Some('h') => GateKind::Hadamard,
            Some('z') => GateKind::Z,
            _ => {
                return Err(bad_value(
                    &value.path,
                    "a comma list of gate tokens like h0 or z3",
                    token,
                ))
            }
        };
        let site: usize = chars
            .as_str()
            .parse()
            .map_err(|_| bad_value(&value.path, "a comma list of gate tokens like h0 or z3", token))?;
        if site >= n {
            return Err(CliError::Config(format!(
                "key '{}': gate '{token}' addresses site {site}, but the chain has {n} sites",
                value.path
            )));
        }
        gates.push((kind, site));
    }
    Ok(gates)
}

fn parse_bases(value: &RawValue, n: usize) -> Result<Vec<String>> {
    let mut bases = Vec::new();
    for token in value.text.split(',') {
        let token = token.trim().to_ascii_uppercase();
        if token.len() != n {
            return Err(CliError::Config(format!(
                "key '{}': basis '{token}' has {} letters, but the chain has {n} sites",
                value.path,
                token.len()
            )));
        }
        if let Some(c) = token.chars().find(|c| !matches!(c, 'X' | 'Y' | 'Z')) {
            return Err(CliError::Config(format!(
                "key '{}': basis '{token}' contains '{c}'; only X, Y, Z are allowed",
                value.path
            )));
        }
        bases.push(token);
    }
    Ok(bases)
}
