//! Variational wave functions: log-amplitude models over spin
//! configurations.
//!
//! Every family implements [`AnsatzState`]: a holomorphic map from a complex
//! parameter vector to log amplitudes log Ψ(s), together with log-amplitude
//! ratios, per-parameter log derivatives O_p(s) = ∂ log Ψ / ∂θ_p, and an
//! incremental cache so samplers can evaluate flip ratios without
//! recomputing the full amplitude. Zero amplitudes are legal states of
//! affairs (mean-field components can vanish, lookup tables hold exact
//! zeros) and are reported through the [`LogAmp::Zero`] sentinel instead of
//! raw infinities.

mod jastrow;
mod mean_field;
mod rbm;
mod symmetric;

pub mod checkpoint;

pub use jastrow::{Jastrow, JastrowCache};
pub use mean_field::{MeanField, MeanFieldCache};
pub use rbm::{Rbm, RbmCache};
pub use symmetric::{SymmetricRbm, SymmetricRbmCache, SymmetryGroup};

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::{derive_seed, Cplx, Real};
use crate::spin::SpinConfiguration;

/// Seed stream tag for parameter initialization.
const INIT_STREAM: u64 = 0x494e_4954;

/// A log amplitude that may be an exact zero.
///
/// `Finite(z)` means Ψ(s) = e^z; `Zero` means Ψ(s) = 0 exactly. The sentinel
/// keeps −∞ real parts and NaN phases out of downstream arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogAmp<T: Real> {
    /// log Ψ(s) for a nonzero amplitude.
    Finite(Cplx<T>),
    /// Ψ(s) = 0 exactly.
    Zero,
}

impl<T: Real> LogAmp<T> {
    /// Whether the amplitude is exactly zero.
    pub fn is_zero(&self) -> bool {
        matches!(self, LogAmp::Zero)
    }

    /// The log amplitude, if finite.
    pub fn finite(&self) -> Option<Cplx<T>> {
        match self {
            LogAmp::Finite(z) => Some(*z),
            LogAmp::Zero => None,
        }
    }

    /// e^{log ratio}: the amplitude ratio itself, with `Zero` mapping to 0.
    pub fn weight(&self) -> Cplx<T> {
        match self {
            LogAmp::Finite(z) => z.exp(),
            LogAmp::Zero => Cplx::new(T::zero(), T::zero()),
        }
    }

    /// |e^z|² = e^{2 Re z}, with `Zero` mapping to 0 — the probability-ratio
    /// factor used in Metropolis acceptances.
    pub fn probability_weight(&self) -> T {
        match self {
            LogAmp::Finite(z) => crate::scalar::exp(z.re + z.re),
            LogAmp::Zero => T::zero(),
        }
    }

    /// Classify a raw complex log: a −∞ real part is an exact zero.
    pub fn classify(z: Cplx<T>) -> Self {
        if z.re == T::neg_infinity() {
            LogAmp::Zero
        } else {
            LogAmp::Finite(z)
        }
    }
}

/// A variational wave function with complex parameters.
///
/// The parameter vector is flat and complex; [`Self::parameters`] /
/// [`Self::set_parameters`] round-trip it exactly. Log derivatives are
/// holomorphic derivatives with respect to those complex parameters.
///
/// The `Cache` machinery is a performance contract: `make_cache` pins a
/// configuration, `cached_log_ratio` prices a prospective set of spin flips
/// (typically O(parameters/N) instead of a full evaluation), and
/// `advance_cache` commits them. Callers must keep the cache and its
/// configuration in lockstep and must not reuse a cache across parameter
/// updates.
pub trait AnsatzState<T: Real> {
    /// Incremental evaluation state pinned to one configuration.
    type Cache: Clone + Send;

    /// Number of spin sites.
    fn n_sites(&self) -> usize;

    /// Length of the flat complex parameter vector.
    fn parameter_count(&self) -> usize;

    /// log Ψ(s), or [`LogAmp::Zero`] for an exact zero amplitude.
    fn log_amplitude(&self, s: &SpinConfiguration) -> LogAmp<T>;

    /// log Ψ(to) − log Ψ(from). `Zero` when Ψ(to) = 0; callers must not ask
    /// for ratios out of a zero-amplitude `from`.
    fn log_ratio(&self, from: &SpinConfiguration, to: &SpinConfiguration) -> LogAmp<T> {
        match (self.log_amplitude(to), self.log_amplitude(from)) {
            (LogAmp::Zero, _) => LogAmp::Zero,
            (LogAmp::Finite(_), LogAmp::Zero) => {
                debug_assert!(false, "log ratio out of a zero-amplitude configuration");
                LogAmp::Zero
            }
            (LogAmp::Finite(t), LogAmp::Finite(f)) => LogAmp::Finite(t - f),
        }
    }

    /// O_p(s) = ∂ log Ψ(s)/∂θ_p for all parameters, in flat order.
    fn log_derivatives(&self, s: &SpinConfiguration) -> DVector<Cplx<T>>;

    /// Flat complex parameter vector.
    fn parameters(&self) -> DVector<Cplx<T>>;

    /// Replace the parameter vector; the length must match
    /// [`Self::parameter_count`].
    fn set_parameters(&mut self, parameters: &DVector<Cplx<T>>) -> Result<()>;

    /// Build the incremental cache for `s`.
    fn make_cache(&self, s: &SpinConfiguration) -> Self::Cache;

    /// log Ψ of the cached configuration.
    fn cached_log_amplitude(&self, cache: &Self::Cache) -> LogAmp<T>;

    /// log Ψ(s flipped at `flips`) − log Ψ(s), where `s` is the cached
    /// configuration and `flips` lists distinct sites.
    fn cached_log_ratio(
        &self,
        cache: &Self::Cache,
        s: &SpinConfiguration,
        flips: &[usize],
    ) -> LogAmp<T>;

    /// Commit `flips` to the cache; `s` is the configuration BEFORE the
    /// flips.
    fn advance_cache(&self, cache: &mut Self::Cache, s: &SpinConfiguration, flips: &[usize]);
}

/// Which ansatz family a runtime value belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnsatzKind {
    /// Dense restricted Boltzmann machine.
    Rbm,
    /// Symmetry-averaged RBM with feature filters.
    SymmetricRbm,
    /// Pairwise Jastrow factor.
    Jastrow,
    /// Site-product mean field.
    MeanField,
}

impl AnsatzKind {
    /// Stable text name (used by checkpoints and the CLI).
    pub fn name(self) -> &'static str {
        match self {
            AnsatzKind::Rbm => "rbm",
            AnsatzKind::SymmetricRbm => "symmetric-rbm",
            AnsatzKind::Jastrow => "jastrow",
            AnsatzKind::MeanField => "mean-field",
        }
    }

    /// Parse the text name.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "rbm" => Ok(AnsatzKind::Rbm),
            "symmetric-rbm" => Ok(AnsatzKind::SymmetricRbm),
            "jastrow" => Ok(AnsatzKind::Jastrow),
            "mean-field" => Ok(AnsatzKind::MeanField),
            other => Err(Error::Parse(format!("unknown ansatz kind {other:?}"))),
        }
    }
}

/// Runtime-selected ansatz: one enum so drivers need no trait objects.
#[derive(Debug, Clone)]
pub enum AnyAnsatz<T: Real> {
    /// Dense RBM.
    Rbm(Rbm<T>),
    /// Symmetrized RBM.
    SymmetricRbm(SymmetricRbm<T>),
    /// Pairwise Jastrow.
    Jastrow(Jastrow<T>),
    /// Site-product mean field.
    MeanField(MeanField<T>),
}

/// Cache for [`AnyAnsatz`], mirroring its variants.
#[derive(Debug, Clone)]
pub enum AnyCache<T: Real> {
    /// Cache of the RBM variant.
    Rbm(RbmCache<T>),
    /// Cache of the symmetric RBM variant.
    SymmetricRbm(SymmetricRbmCache<T>),
    /// Cache of the Jastrow variant.
    Jastrow(JastrowCache<T>),
    /// Cache of the mean-field variant.
    MeanField(MeanFieldCache<T>),
}

impl<T: Real> AnyAnsatz<T> {
    /// Which family this value is.
    pub fn kind(&self) -> AnsatzKind {
        match self {
            AnyAnsatz::Rbm(_) => AnsatzKind::Rbm,
            AnyAnsatz::SymmetricRbm(_) => AnsatzKind::SymmetricRbm,
            AnyAnsatz::Jastrow(_) => AnsatzKind::Jastrow,
            AnyAnsatz::MeanField(_) => AnsatzKind::MeanField,
        }
    }

    /// Apply a single-site Z gate analytically. Only the plain RBM supports
    /// this (the visible bias absorbs the phase); other families error.
    pub fn apply_z_gate(&mut self, site: usize) -> Result<()> {
        match self {
            AnyAnsatz::Rbm(rbm) => rbm.apply_z_gate(site),
            other => Err(Error::Domain(format!(
                "the analytic Z gate is defined for the rbm ansatz, not {}",
                other.kind().name()
            ))),
        }
    }
}

macro_rules! dispatch {
    ($self:expr, $inner:ident => $body:expr) => {
        match $self {
            AnyAnsatz::Rbm($inner) => $body,
            AnyAnsatz::SymmetricRbm($inner) => $body,
            AnyAnsatz::Jastrow($inner) => $body,
            AnyAnsatz::MeanField($inner) => $body,
        }
    };
}

impl<T: Real> AnsatzState<T> for AnyAnsatz<T> {
    type Cache = AnyCache<T>;

    fn n_sites(&self) -> usize {
        dispatch!(self, a => a.n_sites())
    }

    fn parameter_count(&self) -> usize {
        dispatch!(self, a => a.parameter_count())
    }

    fn log_amplitude(&self, s: &SpinConfiguration) -> LogAmp<T> {
        dispatch!(self, a => a.log_amplitude(s))
    }

    fn log_ratio(&self, from: &SpinConfiguration, to: &SpinConfiguration) -> LogAmp<T> {
        dispatch!(self, a => a.log_ratio(from, to))
    }

    fn log_derivatives(&self, s: &SpinConfiguration) -> DVector<Cplx<T>> {
        dispatch!(self, a => a.log_derivatives(s))
    }

    fn parameters(&self) -> DVector<Cplx<T>> {
        dispatch!(self, a => a.parameters())
    }

    fn set_parameters(&mut self, parameters: &DVector<Cplx<T>>) -> Result<()> {
        dispatch!(self, a => a.set_parameters(parameters))
    }

    fn make_cache(&self, s: &SpinConfiguration) -> Self::Cache {
        match self {
            AnyAnsatz::Rbm(a) => AnyCache::Rbm(a.make_cache(s)),
            AnyAnsatz::SymmetricRbm(a) => AnyCache::SymmetricRbm(a.make_cache(s)),
            AnyAnsatz::Jastrow(a) => AnyCache::Jastrow(a.make_cache(s)),
            AnyAnsatz::MeanField(a) => AnyCache::MeanField(a.make_cache(s)),
        }
    }

    fn cached_log_amplitude(&self, cache: &Self::Cache) -> LogAmp<T> {
        match (self, cache) {
            (AnyAnsatz::Rbm(a), AnyCache::Rbm(c)) => a.cached_log_amplitude(c),
            (AnyAnsatz::SymmetricRbm(a), AnyCache::SymmetricRbm(c)) => a.cached_log_amplitude(c),
            (AnyAnsatz::Jastrow(a), AnyCache::Jastrow(c)) => a.cached_log_amplitude(c),
            (AnyAnsatz::MeanField(a), AnyCache::MeanField(c)) => a.cached_log_amplitude(c),
            _ => panic!("ansatz cache used with a different ansatz kind"),
        }
    }

    fn cached_log_ratio(
        &self,
        cache: &Self::Cache,
        s: &SpinConfiguration,
        flips: &[usize],
    ) -> LogAmp<T> {
        match (self, cache) {
            (AnyAnsatz::Rbm(a), AnyCache::Rbm(c)) => a.cached_log_ratio(c, s, flips),
            (AnyAnsatz::SymmetricRbm(a), AnyCache::SymmetricRbm(c)) => {
                a.cached_log_ratio(c, s, flips)
            }
            (AnyAnsatz::Jastrow(a), AnyCache::Jastrow(c)) => a.cached_log_ratio(c, s, flips),
            (AnyAnsatz::MeanField(a), AnyCache::MeanField(c)) => a.cached_log_ratio(c, s, flips),
            _ => panic!("ansatz cache used with a different ansatz kind"),
        }
    }

    fn advance_cache(&self, cache: &mut Self::Cache, s: &SpinConfiguration, flips: &[usize]) {
        match (self, cache) {
            (AnyAnsatz::Rbm(a), AnyCache::Rbm(c)) => a.advance_cache(c, s, flips),
            (AnyAnsatz::SymmetricRbm(a), AnyCache::SymmetricRbm(c)) => a.advance_cache(c, s, flips),
            (AnyAnsatz::Jastrow(a), AnyCache::Jastrow(c)) => a.advance_cache(c, s, flips),
            (AnyAnsatz::MeanField(a), AnyCache::MeanField(c)) => a.advance_cache(c, s, flips),
            _ => panic!("ansatz cache used with a different ansatz kind"),
        }
    }
}

/// Structural description of an ansatz to build (the CLI's vocabulary).
#[derive(Debug, Clone)]
pub enum AnsatzSpec {
    /// Dense RBM with the given hidden-unit count.
    Rbm {
        /// Number of hidden units M.
        hidden: usize,
    },
    /// Symmetric RBM with `features` filters averaged over `group`.
    SymmetricRbm {
        /// Number of feature filters α_f.
        features: usize,
        /// Symmetry group to average over.
        group: SymmetryGroup,
    },
    /// Pairwise Jastrow factor.
    Jastrow,
    /// Site-product mean field.
    MeanField,
}

/// Build an ansatz with every parameter drawn as scale·(x + iy), x and y
/// standard normal, from a dedicated stream of `seed`. The same (spec,
/// scale, seed) triple always produces the same parameters.
pub fn build_ansatz<T: Real>(
    n_sites: usize,
    spec: &AnsatzSpec,
    scale: T,
    seed: u64,
) -> Result<AnyAnsatz<T>> {
    let mut ansatz = match spec {
        AnsatzSpec::Rbm { hidden } => AnyAnsatz::Rbm(Rbm::zeros(n_sites, *hidden)?),
        AnsatzSpec::SymmetricRbm { features, group } => {
            AnyAnsatz::SymmetricRbm(SymmetricRbm::zeros(n_sites, *features, group.clone())?)
        }
        AnsatzSpec::Jastrow => AnyAnsatz::Jastrow(Jastrow::zeros(n_sites)?),
        AnsatzSpec::MeanField => AnyAnsatz::MeanField(MeanField::zeros(n_sites)?),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, INIT_STREAM));
    let count = ansatz.parameter_count();
    let mut parameters = DVector::from_element(count, Cplx::new(T::zero(), T::zero()));
    for p in parameters.iter_mut() {
        let re = T::sample_normal(&mut rng) * scale;
        let im = T::sample_normal(&mut rng) * scale;
        *p = Cplx::new(re, im);
    }
    ansatz.set_parameters(&parameters)?;
    Ok(ansatz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::real;

    #[test]
    fn log_amp_sentinel_behaviour() {
        let finite = LogAmp::Finite(Cplx::new(0.0f64, 0.0));
        assert!(!finite.is_zero());
        assert!((finite.weight() - Cplx::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(LogAmp::<f64>::Zero.weight(), Cplx::new(0.0, 0.0));
        assert_eq!(LogAmp::<f64>::Zero.probability_weight(), 0.0);
        let classified = LogAmp::classify(Cplx::new(f64::NEG_INFINITY, 1.0));
        assert!(classified.is_zero());
    }

    #[test]
    fn build_is_deterministic_per_seed() {
        let spec = AnsatzSpec::Rbm { hidden: 6 };
        let a = build_ansatz::<f64>(4, &spec, real(0.05), 11).unwrap();
        let b = build_ansatz::<f64>(4, &spec, real(0.05), 11).unwrap();
        let c = build_ansatz::<f64>(4, &spec, real(0.05), 12).unwrap();
        assert_eq!(a.parameters(), b.parameters());
        assert_ne!(a.parameters(), c.parameters());
        assert_eq!(a.parameter_count(), 4 + 6 + 24);
    }

    #[test]
    fn z_gate_only_on_rbm() {
        let mut jastrow =
            build_ansatz::<f64>(4, &AnsatzSpec::Jastrow, real(0.01), 3).unwrap();
        assert!(jastrow.apply_z_gate(0).is_err());
    }
}
