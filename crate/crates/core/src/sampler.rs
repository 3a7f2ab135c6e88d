//! Markov-chain Monte Carlo over spin configurations.
//!
//! Chains draw from P(s) ∝ |Ψ(s)|² via Metropolis–Hastings. Three proposal
//! kernels are provided: uniform single flips, magnetization-conserving
//! pair exchanges, and Hamiltonian-guided moves that propose connected
//! configurations with probability proportional to |⟨s|Ĥ|s′⟩|. Each chain
//! owns a counter-based RNG stream derived from the master seed, so batches
//! are reproducible regardless of how chains are scheduled across workers.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ansatz::{AnsatzState, LogAmp};
use crate::error::{Error, Result};
use crate::operators::LocalOperator;
use crate::scalar::{derive_seed, real, sqrt, to_f64, Cplx, Real};
use crate::spin::{BasisIndex, SpinConfiguration};

/// How many times chain initialization re-draws before giving up on finding
/// a nonzero-amplitude starting configuration.
const INIT_ATTEMPTS: usize = 1024;

/// Worker threads used for chain-parallel sampling: the `NQS_THREADS`
/// environment variable when set, otherwise the machine's available
/// parallelism. Results never depend on this value.
pub fn worker_count() -> usize {
    std::env::var("NQS_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&w| w >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism().map(std::num::NonZeroUsize::get).unwrap_or(1)
        })
}

/// Proposal distribution for Metropolis moves.
#[derive(Debug, Clone)]
pub enum TransitionKernel<T: Real> {
    /// Flip one uniformly chosen site; T(s→s′) = 1/N.
    SingleFlip,
    /// Pick an unordered site pair uniformly and swap opposite spins
    /// (self-move when they agree). Conserves total magnetization.
    PairExchange,
    /// Propose a connected configuration of the wrapped Hermitian operator
    /// with probability ∝ |⟨s|Ĥ|s′⟩|.
    Hamiltonian(Arc<LocalOperator<T>>),
}

impl<T: Real> TransitionKernel<T> {
    /// Hamiltonian-guided kernel; the operator must be Hermitian so forward
    /// and reverse matrix elements share a modulus.
    pub fn hamiltonian(op: Arc<LocalOperator<T>>) -> Result<Self> {
        if !op.hermitian_check() {
            return Err(Error::Domain(
                "the Hamiltonian kernel requires a Hermitian operator".into(),
            ));
        }
        Ok(TransitionKernel::Hamiltonian(op))
    }

    /// Whether the kernel conserves total magnetization.
    pub fn conserves_magnetization(&self) -> bool {
        matches!(self, TransitionKernel::PairExchange)
    }

    /// Stable text name for logs and configs.
    pub fn name(&self) -> &'static str {
        match self {
            TransitionKernel::SingleFlip => "single_flip",
            TransitionKernel::PairExchange => "pair_exchange",
            TransitionKernel::Hamiltonian(_) => "hamiltonian",
        }
    }

    /// Draw a proposal at `s`. `flips` is empty for a self-move (counted as
    /// accepted); `forward`/`reverse` are T(s→s′) and T(s′→s).
    pub fn propose<R: Rng + ?Sized>(
        &self,
        s: &SpinConfiguration,
        rng: &mut R,
    ) -> Result<Proposal<T>> {
        let n = s.n_sites();
        match self {
            TransitionKernel::SingleFlip => {
                let site = rng.random_range(0..n);
                let p = T::one() / real::<T>(n as f64);
                Ok(Proposal { flips: vec![site], forward: p, reverse: p })
            }
            TransitionKernel::PairExchange => {
                if n < 2 {
                    return Err(Error::Proposal(
                        "pair exchange needs at least two sites".into(),
                    ));
                }
                let a = rng.random_range(0..n);
                let mut b = rng.random_range(0..n - 1);
                if b >= a {
                    b += 1;
                }
                let p = real::<T>(2.0) / real::<T>((n * (n - 1)) as f64);
                if s.spin(a) == s.spin(b) {
                    // Equal spins: swapping is the identity. Report it as a
                    // self-move so acceptance bookkeeping stays honest.
                    Ok(Proposal { flips: Vec::new(), forward: p, reverse: p })
                } else {
                    Ok(Proposal { flips: vec![a.min(b), a.max(b)], forward: p, reverse: p })
                }
            }
            TransitionKernel::Hamiltonian(op) => {
                let (target, forward, reverse) = hamiltonian_proposal(op, s, rng)?;
                let flips: Vec<usize> =
                    (0..n).filter(|&i| s.spin(i) != target.spin(i)).collect();
                Ok(Proposal { flips, forward, reverse })
            }
        }
    }
}

/// One Metropolis proposal: the sites to flip and the transition
/// probabilities in both directions.
#[derive(Debug, Clone)]
pub struct Proposal<T: Real> {
    /// Sites on which the proposed configuration differs (empty =
    /// self-move).
    pub flips: Vec<usize>,
    /// T(s → s′).
    pub forward: T,
    /// T(s′ → s).
    pub reverse: T,
}

/// Draw a Hamiltonian-guided proposal: a connected configuration s′ of `s`
/// chosen with probability |⟨s|Ĥ|s′⟩| / Σ, plus the forward and reverse
/// transition probabilities. Errors if `s` has no off-diagonal connections.
pub fn hamiltonian_proposal<T: Real, R: Rng + ?Sized>(
    op: &LocalOperator<T>,
    s: &SpinConfiguration,
    rng: &mut R,
) -> Result<(SpinConfiguration, T, T)> {
    let weights = off_diagonal_weights(op, s)?;
    if weights.is_empty() {
        return Err(Error::Proposal(format!(
            "configuration {s} has no off-diagonal connections to propose"
        )));
    }
    let total: T = weights.iter().fold(T::zero(), |acc, (_, w)| acc + *w);
    if !(total > T::zero()) {
        return Err(Error::Proposal(
            "off-diagonal weights sum to zero; nothing to propose".into(),
        ));
    }
    let u = T::sample_unit(rng) * total;
    let mut acc = T::zero();
    let mut chosen = weights.len() - 1;
    for (k, (_, w)) in weights.iter().enumerate() {
        acc += *w;
        if u < acc {
            chosen = k;
            break;
        }
    }
    let (mask, weight) = weights[chosen];
    let target = flip_mask(s, mask);
    let forward = weight / total;
    // Hermiticity: |⟨s′|Ĥ|s⟩| = |⟨s|Ĥ|s′⟩|, so only the normalization at s′
    // is new.
    let reverse_weights = off_diagonal_weights(op, &target)?;
    let reverse_total: T = reverse_weights.iter().fold(T::zero(), |acc, (_, w)| acc + *w);
    if !(reverse_total > T::zero()) {
        return Err(Error::Proposal(
            "proposed configuration has no reverse connections".into(),
        ));
    }
    let reverse = weight / reverse_total;
    Ok((target, forward, reverse))
}

/// |⟨s|Ĥ|s′⟩| per off-diagonal connected flip mask.
fn off_diagonal_weights<T: Real>(
    op: &LocalOperator<T>,
    s: &SpinConfiguration,
) -> Result<Vec<(usize, T)>> {
    let mut out = Vec::new();
    op.visit_connected(s, |flips, value| {
        if !flips.is_empty() {
            let mut mask = 0usize;
            for &f in flips {
                mask |= 1 << f;
            }
            out.push((mask, value.norm()));
        }
    })?;
    Ok(out)
}

fn flip_mask(s: &SpinConfiguration, mask: usize) -> SpinConfiguration {
    let mut out = s.clone();
    let mut m = mask;
    while m != 0 {
        let site = m.trailing_zeros() as usize;
        out.flip(site).expect("mask sites are in range");
        m &= m - 1;
    }
    out
}

/// Sampler run parameters.
#[derive(Debug, Clone)]
pub struct SamplerConfig {
    /// Number of independent chains.
    pub n_chains: usize,
    /// Retained samples per chain.
    pub samples_per_chain: usize,
    /// Full sweeps (N proposals each) between retained samples.
    pub sweeps_per_sample: usize,
    /// Full sweeps discarded before the first retained sample.
    pub burn_in_sweeps: usize,
    /// Master seed; chain c uses an independent stream derived from it.
    pub seed: u64,
    /// Restrict sampling to a fixed total magnetization (requires the
    /// pair-exchange kernel).
    pub sector: Option<i64>,
}

impl SamplerConfig {
    /// Config with the default burn-in (10% of the retained sweeps) and one
    /// sweep between samples.
    pub fn new(n_chains: usize, samples_per_chain: usize, seed: u64) -> Self {
        let sweeps_per_sample = 1;
        let burn_in_sweeps = (samples_per_chain * sweeps_per_sample).div_ceil(10);
        Self {
            n_chains,
            samples_per_chain,
            sweeps_per_sample,
            burn_in_sweeps,
            seed,
            sector: None,
        }
    }

    fn validate(&self, n_sites: usize) -> Result<()> {
        if self.n_chains == 0 {
            return Err(Error::Config("sampler needs at least one chain".into()));
        }
        if self.samples_per_chain == 0 {
            return Err(Error::Config("sampler needs at least one sample per chain".into()));
        }
        if self.sweeps_per_sample == 0 {
            return Err(Error::Config("sweeps_per_sample must be at least 1".into()));
        }
        if let Some(m) = self.sector {
            let n = n_sites as i64;
            if m.abs() > n {
                return Err(Error::Config(format!(
                    "magnetization sector {m} impossible on {n} sites"
                )));
            }
            if (n + m) % 2 != 0 {
                return Err(Error::Config(format!(
                    "magnetization sector {m} has the wrong parity for {n} sites"
                )));
            }
        }
        Ok(())
    }
}

/// One retained sample: the encoded configuration and its log amplitude at
/// sampling time.
#[derive(Debug, Clone, Copy)]
pub struct SampleEntry<T: Real> {
    /// Encoded configuration.
    pub index: BasisIndex,
    /// log Ψ of the configuration (always finite: chains cannot reach exact
    /// zeros).
    pub log_amp: Cplx<T>,
}

/// Acceptance bookkeeping for one chain.
#[derive(Debug, Clone, Copy, Default)]
pub struct ChainStats {
    /// Accepted proposals (self-moves included).
    pub accepted: u64,
    /// Total proposals.
    pub proposed: u64,
}

impl ChainStats {
    /// Acceptance fraction.
    pub fn acceptance<T: Real>(&self) -> T {
        if self.proposed == 0 {
            T::zero()
        } else {
            real::<T>(self.accepted as f64) / real::<T>(self.proposed as f64)
        }
    }
}

/// A chain-major batch of retained samples.
#[derive(Debug, Clone)]
pub struct SampleBatch<T: Real> {
    n_sites: usize,
    n_chains: usize,
    samples_per_chain: usize,
    entries: Vec<SampleEntry<T>>,
    chain_stats: Vec<ChainStats>,
}

impl<T: Real> SampleBatch<T> {
    /// Number of sites of the sampled system.
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Number of chains.
    pub fn n_chains(&self) -> usize {
        self.n_chains
    }

    /// Retained samples per chain.
    pub fn samples_per_chain(&self) -> usize {
        self.samples_per_chain
    }

    /// Total sample count.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Whether the batch is empty.
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// All samples, chain-major.
    pub fn entries(&self) -> &[SampleEntry<T>] {
        &self.entries
    }

    /// The samples of one chain.
    pub fn chain_entries(&self, chain: usize) -> &[SampleEntry<T>] {
        let start = chain * self.samples_per_chain;
        &self.entries[start..start + self.samples_per_chain]
    }

    /// Acceptance bookkeeping per chain.
    pub fn chain_stats(&self) -> &[ChainStats] {
        &self.chain_stats
    }

    /// Decode sample `i` into a full configuration.
    pub fn configuration(&self, i: usize) -> Result<SpinConfiguration> {
        SpinConfiguration::decode(self.entries[i].index, self.n_sites)
    }

    /// Overall acceptance fraction across chains.
    pub fn acceptance(&self) -> T {
        let (acc, prop) = self
            .chain_stats
            .iter()
            .fold((0u64, 0u64), |(a, p), s| (a + s.accepted, p + s.proposed));
        if prop == 0 {
            T::zero()
        } else {
            real::<T>(acc as f64) / real::<T>(prop as f64)
        }
    }
}

/// Mutable Metropolis chain state.
#[derive(Debug, Clone)]
pub struct ChainState<T: Real, A: AnsatzState<T>> {
    /// Current configuration.
    pub current: SpinConfiguration,
    /// Ansatz cache pinned to `current`.
    pub cache: A::Cache,
    /// The chain's private RNG stream.
    pub rng: ChaCha8Rng,
    /// Acceptance bookkeeping.
    pub stats: ChainStats,
}

impl<T: Real, A: AnsatzState<T>> ChainState<T, A> {
    /// Initialize a chain at a random nonzero-amplitude configuration drawn
    /// from the given RNG (uniformly, or uniformly within the sector).
    pub fn initialize(
        ansatz: &A,
        sector: Option<i64>,
        mut rng: ChaCha8Rng,
    ) -> Result<Self> {
        let n = ansatz.n_sites();
        for _ in 0..INIT_ATTEMPTS {
            let candidate = match sector {
                None => crate::exact::random_configuration::<T, _>(n, &mut rng),
                Some(m) => {
                    let ups = ((n as i64 + m) / 2) as usize;
                    let mut spins = vec![1i8; n];
                    for s in spins.iter_mut().skip(ups) {
                        *s = -1;
                    }
                    // Fisher–Yates shuffle.
                    for i in (1..n).rev() {
                        let j = rng.random_range(0..=i);
                        spins.swap(i, j);
                    }
                    SpinConfiguration::from_spins(spins).expect("spins are ±1")
                }
            };
            if !ansatz.log_amplitude(&candidate).is_zero() {
                let cache = ansatz.make_cache(&candidate);
                return Ok(Self { current: candidate, cache, rng, stats: ChainStats::default() });
            }
        }
        Err(Error::ChainState(format!(
            "no nonzero-amplitude starting configuration found in {INIT_ATTEMPTS} draws"
        )))
    }
}

/// One Metropolis–Hastings step; returns whether the proposal was accepted.
///
/// The acceptance is A = min(1, |Ψ(s′)/Ψ(s)|²·T(s′→s)/T(s→s′)), applied as
/// the literal rule `A ≥ 1 || u < A`, so certain moves consume no
/// uniform variate and zero-amplitude targets can never be accepted.
pub fn metropolis_step<T: Real, A: AnsatzState<T>>(
    chain: &mut ChainState<T, A>,
    kernel: &TransitionKernel<T>,
    ansatz: &A,
) -> Result<bool> {
    let proposal = kernel.propose(&chain.current, &mut chain.rng)?;
    chain.stats.proposed += 1;
    let a = if proposal.flips.is_empty() {
        T::one()
    } else {
        let ratio = ansatz.cached_log_ratio(&chain.cache, &chain.current, &proposal.flips);
        ratio.probability_weight() * proposal.reverse / proposal.forward
    };
    let accept = a >= T::one() || T::sample_unit(&mut chain.rng) < a;
    if accept {
        ansatz.advance_cache(&mut chain.cache, &chain.current, &proposal.flips);
        for &site in &proposal.flips {
            chain.current.flip(site)?;
        }
        chain.stats.accepted += 1;
    }
    Ok(accept)
}

struct ChainResult<T: Real> {
    entries: Vec<SampleEntry<T>>,
    stats: ChainStats,
}

fn run_single_chain<T: Real, A: AnsatzState<T>>(
    config: &SamplerConfig,
    kernel: &TransitionKernel<T>,
    ansatz: &A,
    chain_index: usize,
) -> Result<ChainResult<T>> {
    let n = ansatz.n_sites();
    let rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, chain_index as u64));
    let mut chain = ChainState::<T, A>::initialize(ansatz, config.sector, rng)?;
    let sweep = |chain: &mut ChainState<T, A>| -> Result<()> {
        for _ in 0..n {
            metropolis_step(chain, kernel, ansatz)?;
        }
        Ok(())
    };
    for _ in 0..config.burn_in_sweeps {
        sweep(&mut chain)?;
    }
    let mut entries = Vec::with_capacity(config.samples_per_chain);
    for _ in 0..config.samples_per_chain {
        for _ in 0..config.sweeps_per_sample {
            sweep(&mut chain)?;
        }
        let log_amp = match ansatz.cached_log_amplitude(&chain.cache) {
            LogAmp::Finite(z) => z,
            LogAmp::Zero => {
                return Err(Error::ChainState(
                    "chain reached a zero-amplitude configuration".into(),
                ))
            }
        };
        entries.push(SampleEntry { index: chain.current.encode(), log_amp });
    }
    Ok(ChainResult { entries, stats: chain.stats })
}

/// Run all chains sequentially and collect the batch.
pub fn run_chain<T: Real, A: AnsatzState<T> + Sync>(
    config: &SamplerConfig,
    kernel: &TransitionKernel<T>,
    ansatz: &A,
) -> Result<SampleBatch<T>> {
    run_chain_with_workers(config, kernel, ansatz, 1)
}

/// Run chains distributed over up to `workers` OS threads. Results are
/// identical to the sequential path for any worker count: every chain owns a
/// seed-derived RNG stream and lands at its own batch offset.
pub fn run_chain_with_workers<T: Real, A: AnsatzState<T> + Sync>(
    config: &SamplerConfig,
    kernel: &TransitionKernel<T>,
    ansatz: &A,
    workers: usize,
) -> Result<SampleBatch<T>> {
    let n = ansatz.n_sites();
    config.validate(n)?;
    if let TransitionKernel::Hamiltonian(op) = kernel {
        if op.n_sites() != n {
            return Err(Error::Config(format!(
                "kernel operator acts on {} sites, ansatz on {n}",
                op.n_sites()
            )));
        }
    }
    if config.sector.is_some() && !kernel.conserves_magnetization() {
        return Err(Error::Config(format!(
            "magnetization sector requires the pair_exchange kernel, got {}",
            kernel.name()
        )));
    }

    let workers = workers.max(1).min(config.n_chains);
    let mut results: Vec<Option<ChainResult<T>>> = Vec::new();
    results.resize_with(config.n_chains, || None);

    if workers == 1 {
        for (c, slot) in results.iter_mut().enumerate() {
            *slot = Some(run_single_chain(config, kernel, ansatz, c)?);
        }
    } else {
        let chunk = config.n_chains.div_ceil(workers);
        let outcomes: Vec<(usize, Result<ChainResult<T>>)> = std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for w in 0..workers {
                let lo = w * chunk;
                let hi = ((w + 1) * chunk).min(config.n_chains);
                if lo >= hi {
                    break;
                }
                handles.push(scope.spawn(move || {
                    (lo..hi)
                        .map(|c| (c, run_single_chain(config, kernel, ansatz, c)))
                        .collect::<Vec<_>>()
                }));
            }
            handles.into_iter().flat_map(|h| h.join().expect("chain worker panicked")).collect()
        });
        for (c, outcome) in outcomes {
            results[c] = Some(outcome?);
        }
    }

    let mut entries = Vec::with_capacity(config.n_chains * config.samples_per_chain);
    let mut chain_stats = Vec::with_capacity(config.n_chains);
    for slot in results {
        let r = slot.expect("every chain index was scheduled");
        entries.extend(r.entries);
        chain_stats.push(r.stats);
    }
    Ok(SampleBatch {
        n_sites: n,
        n_chains: config.n_chains,
        samples_per_chain: config.samples_per_chain,
        entries,
        chain_stats,
    })
}

/// Mean/variance/error summary of a (complex) Monte Carlo series with
/// autocorrelation handled by binning.
#[derive(Debug, Clone)]
pub struct BinnedStats<T: Real> {
    /// Sample mean.
    pub mean: Cplx<T>,
    /// Naive sample variance (|x − mean|², M−1 normalization).
    pub variance: T,
    /// Standard error of the mean at the binning plateau; satisfies
    /// stderr = √(variance / effective_samples) exactly.
    pub stderr: T,
    /// Integrated autocorrelation time estimate τ.
    pub autocorrelation_time: T,
    /// Uncertainty of τ from the bin count at the plateau.
    pub autocorrelation_stderr: T,
    /// M / τ.
    pub effective_samples: T,
    /// Binning level (log₂ bin size) where τ plateaued.
    pub plateau_level: usize,
}

/// Binning analysis over per-chain series.
///
/// Bin variances are computed per level l (bin size 2^l) pooled across
/// chains; τ_l = 2^l·var_l/var_0 climbs until correlations are resolved, and
/// the first level whose successor grows by less than 5% is taken as the
/// plateau. A series with exactly zero variance short-circuits to stderr 0,
/// τ = 1.
pub fn binned_statistics<T: Real>(chains: &[&[Cplx<T>]]) -> Result<BinnedStats<T>> {
    let total: usize = chains.iter().map(|c| c.len()).sum();
    if total == 0 {
        return Err(Error::Domain("binned statistics of an empty series".into()));
    }
    let mut mean = Cplx::new(T::zero(), T::zero());
    for chain in chains {
        for x in *chain {
            mean += *x;
        }
    }
    mean /= Cplx::new(real::<T>(total as f64), T::zero());

    if total == 1 {
        return Ok(BinnedStats {
            mean,
            variance: T::zero(),
            stderr: T::zero(),
            autocorrelation_time: T::one(),
            autocorrelation_stderr: T::zero(),
            effective_samples: T::one(),
            plateau_level: 0,
        });
    }

    let mut sq = T::zero();
    for chain in chains {
        for x in *chain {
            sq += (*x - mean).norm_sqr();
        }
    }
    let variance = sq / real::<T>((total - 1) as f64);
    if variance == T::zero() {
        return Ok(BinnedStats {
            mean,
            variance,
            stderr: T::zero(),
            autocorrelation_time: T::one(),
            autocorrelation_stderr: T::zero(),
            effective_samples: real::<T>(total as f64),
            plateau_level: 0,
        });
    }

    // Pooled bin-mean variances per level. Level 0 reproduces `variance`.
    let mut taus: Vec<(T, usize)> = vec![(T::one(), total)];
    let mut level = 1usize;
    loop {
        let bin = 1usize << level;
        let min_bins = chains.iter().map(|c| c.len() / bin).min().unwrap_or(0);
        if min_bins < 16 {
            break;
        }
        let mut bin_means: Vec<Cplx<T>> = Vec::new();
        for chain in chains {
            let nb = chain.len() / bin;
            for b in 0..nb {
                let mut acc = Cplx::new(T::zero(), T::zero());
                for x in &chain[b * bin..(b + 1) * bin] {
                    acc += *x;
                }
                bin_means.push(acc / Cplx::new(real::<T>(bin as f64), T::zero()));
            }
        }
        let nb_total = bin_means.len();
        let mut bm_mean = Cplx::new(T::zero(), T::zero());
        for b in &bin_means {
            bm_mean += *b;
        }
        bm_mean /= Cplx::new(real::<T>(nb_total as f64), T::zero());
        let mut bv = T::zero();
        for b in &bin_means {
            bv += (*b - bm_mean).norm_sqr();
        }
        let bin_variance = bv / real::<T>((nb_total - 1) as f64);
        let tau = real::<T>(bin as f64) * bin_variance / variance;
        taus.push((tau, nb_total));
        level += 1;
    }

    let mut plateau = 0usize;
    let growth = real::<T>(1.05);
    while plateau + 1 < taus.len() && taus[plateau + 1].0 > taus[plateau].0 * growth {
        plateau += 1;
    }
    let (tau, bins_at_plateau) = taus[plateau];
    let effective_samples = real::<T>(total as f64) / tau;
    let stderr = sqrt(variance / effective_samples);
    let autocorrelation_stderr = if bins_at_plateau > 1 {
        tau * sqrt(real::<T>(2.0) / real::<T>((bins_at_plateau - 1) as f64))
    } else {
        T::zero()
    };
    Ok(BinnedStats {
        mean,
        variance,
        stderr,
        autocorrelation_time: tau,
        autocorrelation_stderr,
        effective_samples,
        plateau_level: plateau,
    })
}

/// Mixing diagnostics of a batch, measured on the total magnetization.
#[derive(Debug, Clone)]
pub struct DiagnosticsReport<T: Real> {
    /// Acceptance fraction per chain.
    pub acceptance_per_chain: Vec<T>,
    /// Mean total magnetization.
    pub mean_magnetization: T,
    /// Binned standard error of the magnetization mean.
    pub stderr_magnetization: T,
    /// Integrated autocorrelation time of the magnetization series.
    pub autocorrelation_time: T,
    /// Uncertainty of the τ estimate.
    pub autocorrelation_stderr: T,
    /// Total retained samples divided by τ.
    pub effective_samples: T,
}

/// Compute mixing diagnostics for a batch using the total magnetization as
/// the probe observable.
pub fn diagnostics<T: Real>(batch: &SampleBatch<T>) -> Result<DiagnosticsReport<T>> {
    let n = batch.n_sites();
    let series: Vec<Vec<Cplx<T>>> = (0..batch.n_chains())
        .map(|c| {
            batch
                .chain_entries(c)
                .iter()
                .map(|e| {
                    let downs = e.index.0.count_ones() as i64;
                    let m = n as i64 - 2 * downs;
                    Cplx::new(real::<T>(m as f64), T::zero())
                })
                .collect()
        })
        .collect();
    let views: Vec<&[Cplx<T>]> = series.iter().map(|v| v.as_slice()).collect();
    let stats = binned_statistics(&views)?;
    Ok(DiagnosticsReport {
        acceptance_per_chain: batch.chain_stats().iter().map(ChainStats::acceptance).collect(),
        mean_magnetization: stats.mean.re,
        stderr_magnetization: stats.stderr,
        autocorrelation_time: stats.autocorrelation_time,
        autocorrelation_stderr: stats.autocorrelation_stderr,
        effective_samples: stats.effective_samples,
    })
}

/// Write a sample dump: one line per retained sample, `token re im`.
pub fn write_sample_dump<T: Real, W: std::io::Write>(
    writer: &mut W,
    batch: &SampleBatch<T>,
) -> Result<()> {
    for i in 0..batch.len() {
        let config = batch.configuration(i)?;
        let e = &batch.entries()[i];
        writeln!(writer, "{} {} {}", config.token(), to_f64(e.log_amp.re), to_f64(e.log_amp.im))?;
    }
    Ok(())
}
