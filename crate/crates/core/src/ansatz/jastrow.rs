//! Pairwise Jastrow factor.
//!
//! log Ψ(s) = −½ Σ_{i≠j} θ_ij σ_i σ_j with the coupling table symmetrized,
//! i.e. −Σ_{i<j} θ_ij σ_i σ_j over the stored upper triangle. Parameters are
//! the upper triangle flattened row-major, P = N(N−1)/2. Amplitudes are
//! never zero, so every log is finite.

use nalgebra::DVector;

use crate::ansatz::{AnsatzState, LogAmp};
use crate::error::{Error, Result};
use crate::scalar::{real, Cplx, Real};
use crate::spin::SpinConfiguration;

/// Pairwise Jastrow wave function.
#[derive(Debug, Clone, PartialEq)]
pub struct Jastrow<T: Real> {
    n_sites: usize,
    /// Upper triangle (i < j), row-major: (0,1), (0,2), …, (N−2,N−1).
    couplings: Vec<Cplx<T>>,
}

/// Incremental state: the symmetrized field g_i = Σ_{j≠i} θ_ij σ_j and the
/// log amplitude.
#[derive(Debug, Clone)]
pub struct JastrowCache<T: Real> {
    field: DVector<Cplx<T>>,
    log_amp: Cplx<T>,
}

impl<T: Real> Jastrow<T> {
    /// All-zero couplings (the uniform state).
    pub fn zeros(n_sites: usize) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::Domain(format!(
                "Jastrow factor needs at least 2 sites, got {n_sites}"
            )));
        }
        let count = n_sites * (n_sites - 1) / 2;
        Ok(Self { n_sites, couplings: vec![Cplx::new(T::zero(), T::zero()); count] })
    }

    /// Flat index of the (i, j) pair, i < j.
    fn pair_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.n_sites);
        // Row i starts after (N−1) + (N−2) + … + (N−i) entries.
        i * self.n_sites - i * (i + 1) / 2 + (j - i - 1)
    }

    /// Symmetrized coupling θ_ij for any i ≠ j.
    pub fn coupling(&self, i: usize, j: usize) -> Cplx<T> {
        if i < j {
            self.couplings[self.pair_index(i, j)]
        } else {
            self.couplings[self.pair_index(j, i)]
        }
    }

    fn spin_value(s: &SpinConfiguration, i: usize) -> T {
        if s.spin(i) > 0 {
            T::one()
        } else {
            -T::one()
        }
    }

    fn compute_cache(&self, s: &SpinConfiguration) -> JastrowCache<T> {
        let mut field = DVector::from_element(self.n_sites, Cplx::new(T::zero(), T::zero()));
        for i in 0..self.n_sites {
            let mut acc = Cplx::new(T::zero(), T::zero());
            for j in 0..self.n_sites {
                if j != i {
                    acc += self.coupling(i, j) * Cplx::new(Self::spin_value(s, j), T::zero());
                }
            }
            field[i] = acc;
        }
        // log Ψ = −½ Σ_i σ_i g_i (each pair counted twice in the field).
        let mut log_amp = Cplx::new(T::zero(), T::zero());
        for i in 0..self.n_sites {
            log_amp -= field[i] * Cplx::new(Self::spin_value(s, i), T::zero());
        }
        log_amp *= Cplx::new(real::<T>(0.5), T::zero());
        JastrowCache { field, log_amp }
    }
}

impl<T: Real> AnsatzState<T> for Jastrow<T> {
    type Cache = JastrowCache<T>;

    fn n_sites(&self) -> usize {
        self.n_sites
    }

    fn parameter_count(&self) -> usize {
        self.couplings.len()
    }

    fn log_amplitude(&self, s: &SpinConfiguration) -> LogAmp<T> {
        LogAmp::Finite(self.compute_cache(s).log_amp)
    }

    fn log_derivatives(&self, s: &SpinConfiguration) -> DVector<Cplx<T>> {
        let mut out = DVector::from_element(
            self.parameter_count(),
            Cplx::new(T::zero(), T::zero()),
        );
        let mut idx = 0;
        for i in 0..self.n_sites {
            let si = Self::spin_value(s, i);
            for j in i + 1..self.n_sites {
                let sj = Self::spin_value(s, j);
                out[idx] = Cplx::new(-si * sj, T::zero());
                idx += 1;
            }
        }
        out
    }

    fn parameters(&self) -> DVector<Cplx<T>> {
        DVector::from_iterator(self.couplings.len(), self.couplings.iter().copied())
    }

    fn set_parameters(&mut self, parameters: &DVector<Cplx<T>>) -> Result<()> {
        if parameters.len() != self.couplings.len() {
            return Err(Error::Domain(format!(
                "expected {} parameters, got {}",
                self.couplings.len(),
                parameters.len()
            )));
        }
        for (c, p) in self.couplings.iter_mut().zip(parameters.iter()) {
            *c = *p;
        }
        Ok(())
    }

    fn make_cache(&self, s: &SpinConfiguration) -> Self::Cache {
        self.compute_cache(s)
    }

    fn cached_log_amplitude(&self, cache: &Self::Cache) -> LogAmp<T> {
        LogAmp::Finite(cache.log_amp)
    }

    fn cached_log_ratio(
        &self,
        cache: &Self::Cache,
        s: &SpinConfiguration,
        flips: &[usize],
    ) -> LogAmp<T> {
        // Flipping site k adds 2 σ_k g_k to the log, where g_k reflects all
        // previously applied flips in this proposal: those flipped spins have
        // moved by −2σ, shifting g_k by −2 θ_{k,u} σ_u per earlier flip u.
        let two = real::<T>(2.0);
        let mut delta = Cplx::new(T::zero(), T::zero());
        for (t, &k) in flips.iter().enumerate() {
            let sigma_k = Self::spin_value(s, k);
            let mut g = cache.field[k];
            for &u in &flips[..t] {
                debug_assert_ne!(u, k, "duplicate site in flip list");
                let sigma_u = Self::spin_value(s, u);
                g -= self.coupling(k, u) * Cplx::new(two * sigma_u, T::zero());
            }
            delta += g * Cplx::new(two * sigma_k, T::zero());
        }
        LogAmp::Finite(delta)
    }

    fn advance_cache(&self, cache: &mut Self::Cache, s: &SpinConfiguration, flips: &[usize]) {
        let two = real::<T>(2.0);
        // Sequential flips; track each flipped spin's current sign.
        let mut flipped_signs: Vec<(usize, T)> = Vec::with_capacity(flips.len());
        for &k in flips {
            let mut sigma_k = Self::spin_value(s, k);
            for &(site, sign) in &flipped_signs {
                if site == k {
                    sigma_k = sign;
                }
            }
            let g = cache.field[k];
            cache.log_amp += g * Cplx::new(two * sigma_k, T::zero());
            for i in 0..self.n_sites {
                if i != k {
                    cache.field[i] -= self.coupling(i, k) * Cplx::new(two * sigma_k, T::zero());
                }
            }
            flipped_signs.push((k, -sigma_k));
        }
    }
}
