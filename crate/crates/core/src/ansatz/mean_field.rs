//! Site-product mean field.
//!
//! Each site carries an independent amplitude pair (θ_up, θ_down);
//! log Ψ(s) = Σ_i log θ^{(i)}_{σ_i}. A zero component makes every
//! configuration selecting it an exact zero, reported through the
//! [`LogAmp::Zero`] sentinel. Parameters are flattened as [all θ_up; all
//! θ_down], P = 2N.

use nalgebra::DVector;

use crate::ansatz::{AnsatzState, LogAmp};
use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};
use crate::spin::SpinConfiguration;

/// Product-state wave function.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanField<T: Real> {
    n_sites: usize,
    up: DVector<Cplx<T>>,
    down: DVector<Cplx<T>>,
}

/// Cache: just the log amplitude (per-flip work is O(1) from parameters).
#[derive(Debug, Clone)]
pub struct MeanFieldCache<T: Real> {
    log_amp: LogAmp<T>,
}

impl<T: Real> MeanField<T> {
    /// All-zero parameters. NOTE: the all-zero mean field is the zero state;
    /// callers normally fill parameters right after construction.
    pub fn zeros(n_sites: usize) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::Domain("mean field needs at least one site".into()));
        }
        let zero = Cplx::new(T::zero(), T::zero());
        Ok(Self {
            n_sites,
            up: DVector::from_element(n_sites, zero),
            down: DVector::from_element(n_sites, zero),
        })
    }

    /// Component selected by the spin at `site`.
    fn component(&self, site: usize, spin: i8) -> Cplx<T> {
        if spin > 0 {
            self.up[site]
        } else {
            self.down[site]
        }
    }

    fn is_zero(c: Cplx<T>) -> bool {
        c.re == T::zero() && c.im == T::zero()
    }

    /// Complex log of one component, or `None` if it is exactly zero.
    fn log_component(&self, site: usize, spin: i8) -> Option<Cplx<T>> {
        let c = self.component(site, spin);
        if Self::is_zero(c) {
            None
        } else {
            Some(Cplx::new(crate::scalar::ln(c.norm()), c.arg()))
        }
    }
}

impl<T: Real> AnsatzState<T> for MeanField<T> {
    type Cache = MeanFieldCache<T>;

    fn n_sites(&self) -> usize {
        self.n_sites
    }

    fn parameter_count(&self) -> usize {
        2 * self.n_sites
    }

    fn log_amplitude(&self, s: &SpinConfiguration) -> LogAmp<T> {
        let mut acc = Cplx::new(T::zero(), T::zero());
        for i in 0..self.n_sites {
            match self.log_component(i, s.spin(i)) {
                Some(l) => acc += l,
                None => return LogAmp::Zero,
            }
        }
        LogAmp::Finite(acc)
    }

    fn log_derivatives(&self, s: &SpinConfiguration) -> DVector<Cplx<T>> {
        // ∂ log Ψ / ∂θ^{(i)}_v = [σ_i = v] / θ^{(i)}_v. On a zero component
        // the amplitude itself is zero and estimators never consult the
        // derivative, so the entry is left at 0 rather than ±∞.
        let zero = Cplx::new(T::zero(), T::zero());
        let one = Cplx::new(T::one(), T::zero());
        let mut out = DVector::from_element(self.parameter_count(), zero);
        for i in 0..self.n_sites {
            let spin = s.spin(i);
            let c = self.component(i, spin);
            if !Self::is_zero(c) {
                let slot = if spin > 0 { i } else { self.n_sites + i };
                out[slot] = one / c;
            }
        }
        out
    }

    fn parameters(&self) -> DVector<Cplx<T>> {
        let mut out = DVector::from_element(
            self.parameter_count(),
            Cplx::new(T::zero(), T::zero()),
        );
        for i in 0..self.n_sites {
            out[i] = self.up[i];
            out[self.n_sites + i] = self.down[i];
        }
        out
    }

    fn set_parameters(&mut self, parameters: &DVector<Cplx<T>>) -> Result<()> {
        if parameters.len() != self.parameter_count() {
            return Err(Error::Domain(format!(
                "expected {} parameters, got {}",
                self.parameter_count(),
                parameters.len()
            )));
        }
        for i in 0..self.n_sites {
            self.up[i] = parameters[i];
            self.down[i] = parameters[self.n_sites + i];
        }
        Ok(())
    }

    fn make_cache(&self, s: &SpinConfiguration) -> Self::Cache {
        MeanFieldCache { log_amp: self.log_amplitude(s) }
    }

    fn cached_log_amplitude(&self, cache: &Self::Cache) -> LogAmp<T> {
        cache.log_amp
    }

    fn cached_log_ratio(
        &self,
        cache: &Self::Cache,
        s: &SpinConfiguration,
        flips: &[usize],
    ) -> LogAmp<T> {
        debug_assert!(
            !cache.log_amp.is_zero() || flips.is_empty(),
            "ratio out of a zero-amplitude configuration"
        );
        let mut delta = Cplx::new(T::zero(), T::zero());
        for &i in flips {
            let old_spin = s.spin(i);
            let new = match self.log_component(i, -old_spin) {
                Some(l) => l,
                None => return LogAmp::Zero,
            };
            let old = match self.log_component(i, old_spin) {
                Some(l) => l,
                None => return LogAmp::Zero,
            };
            delta += new - old;
        }
        LogAmp::Finite(delta)
    }

    fn advance_cache(&self, cache: &mut Self::Cache, s: &SpinConfiguration, flips: &[usize]) {
        let ratio = self.cached_log_ratio(cache, s, flips);
        cache.log_amp = match (cache.log_amp, ratio) {
            (LogAmp::Finite(a), LogAmp::Finite(d)) => LogAmp::Finite(a + d),
            _ => LogAmp::Zero,
        };
    }
}
