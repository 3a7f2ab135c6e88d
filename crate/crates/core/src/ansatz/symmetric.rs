//! Symmetry-averaged RBM.
//!
//! A small set of feature filters is shared across all elements of a site
//! permutation group: log Ψ(s) = (Σ_f b_f)·Σ_k m(T_k s) + Σ_f Σ_k
//! log 2cosh(c_f + W_f·(T_k s)), where (T_k s)_j = s_{π_k(j)}. Each filter f
//! contributes one scalar visible bias b_f, one scalar hidden bias c_f, and
//! one weight row W_f of length N, so P = α_f·(2 + N) independently of the
//! group size. For a group closed under composition the wave function is
//! exactly invariant under every T_k.

use nalgebra::{DMatrix, DVector};

use crate::ansatz::{AnsatzState, LogAmp};
use crate::error::{Error, Result};
use crate::scalar::{ln_2cosh, real, Cplx, Real};
use crate::spin::SpinConfiguration;

/// A finite set of site permutations, with precomputed inverses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetryGroup {
    n_sites: usize,
    /// perms[k][j] = π_k(j).
    perms: Vec<Vec<usize>>,
    /// inverse[k][i] = π_k⁻¹(i).
    inverse: Vec<Vec<usize>>,
}

impl SymmetryGroup {
    /// The cyclic translation group of an N-site ring: π_k(j) = (j+k) mod N.
    pub fn translations(n_sites: usize) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::Domain("translation group needs at least one site".into()));
        }
        let perms = (0..n_sites)
            .map(|k| (0..n_sites).map(|j| (j + k) % n_sites).collect())
            .collect();
        Self::from_permutations(n_sites, perms)
    }

    /// The trivial group containing only the identity.
    pub fn identity(n_sites: usize) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::Domain("symmetry group needs at least one site".into()));
        }
        Self::from_permutations(n_sites, vec![(0..n_sites).collect()])
    }

    /// Build from explicit permutations; each must be a bijection on
    /// 0..n_sites and the list must be non-empty.
    pub fn from_permutations(n_sites: usize, perms: Vec<Vec<usize>>) -> Result<Self> {
        if perms.is_empty() {
            return Err(Error::Domain("symmetry group needs at least one element".into()));
        }
        let mut inverse = Vec::with_capacity(perms.len());
        for (k, perm) in perms.iter().enumerate() {
            if perm.len() != n_sites {
                return Err(Error::Domain(format!(
                    "permutation {k} has length {}, expected {n_sites}",
                    perm.len()
                )));
            }
            let mut inv = vec![usize::MAX; n_sites];
            for (j, &image) in perm.iter().enumerate() {
                if image >= n_sites {
                    return Err(Error::Domain(format!(
                        "permutation {k} maps {j} to {image}, outside 0..{n_sites}"
                    )));
                }
                if inv[image] != usize::MAX {
                    return Err(Error::Domain(format!(
                        "permutation {k} is not a bijection: {image} hit twice"
                    )));
                }
                inv[image] = j;
            }
            inverse.push(inv);
        }
        Ok(Self { n_sites, perms, inverse })
    }

    /// Number of sites the group acts on.
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Number of group elements K.
    pub fn size(&self) -> usize {
        self.perms.len()
    }

    /// π_k(j).
    pub fn apply(&self, k: usize, j: usize) -> usize {
        self.perms[k][j]
    }

    /// π_k⁻¹(i).
    pub fn inverse_site(&self, k: usize, i: usize) -> usize {
        self.inverse[k][i]
    }

    /// The raw permutation tables (used by checkpoints).
    pub fn permutations(&self) -> &[Vec<usize>] {
        &self.perms
    }

    /// Whether the set is closed under composition (exact invariance holds
    /// only for closed sets).
    pub fn is_closed(&self) -> bool {
        let contains = |candidate: &[usize]| self.perms.iter().any(|p| p == candidate);
        for a in &self.perms {
            for b in &self.perms {
                let composed: Vec<usize> = (0..self.n_sites).map(|j| a[b[j]]).collect();
                if !contains(&composed) {
                    return false;
                }
            }
        }
        true
    }
}

/// Symmetry-averaged RBM wave function.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricRbm<T: Real> {
    n_sites: usize,
    features: usize,
    group: SymmetryGroup,
    /// One scalar visible bias per feature.
    visible_bias: DVector<Cplx<T>>,
    /// One scalar hidden bias per feature.
    hidden_bias: DVector<Cplx<T>>,
    /// Row f holds filter f's weights over sites (α_f × N).
    weights: DMatrix<Cplx<T>>,
}

/// Incremental state: total magnetization, the θ_{f,k} table, and the log
/// amplitude.
#[derive(Debug, Clone)]
pub struct SymmetricRbmCache<T: Real> {
    magnetization: T,
    /// θ_{f,k} = c_f + Σ_j W_{f,j}·s_{π_k(j)}, stored features × K.
    theta: DMatrix<Cplx<T>>,
    log_amp: Cplx<T>,
}

impl<T: Real> SymmetricRbm<T> {
    /// All-zero parameters.
    pub fn zeros(n_sites: usize, features: usize, group: SymmetryGroup) -> Result<Self> {
        if n_sites == 0 || features == 0 {
            return Err(Error::Domain(format!(
                "symmetric RBM needs at least one site and one feature, got {n_sites}×{features}"
            )));
        }
        if group.n_sites() != n_sites {
            return Err(Error::Domain(format!(
                "symmetry group acts on {} sites, ansatz has {n_sites}",
                group.n_sites()
            )));
        }
        let zero = Cplx::new(T::zero(), T::zero());
        Ok(Self {
            n_sites,
            features,
            group,
            visible_bias: DVector::from_element(features, zero),
            hidden_bias: DVector::from_element(features, zero),
            weights: DMatrix::from_element(features, n_sites, zero),
        })
    }

    /// Number of feature filters α_f.
    pub fn features(&self) -> usize {
        self.features
    }

    /// The symmetry group.
    pub fn group(&self) -> &SymmetryGroup {
        &self.group
    }

    /// Effective hidden-unit count α_f·K.
    pub fn effective_hidden(&self) -> usize {
        self.features * self.group.size()
    }

    fn spin_value(s: &SpinConfiguration, i: usize) -> T {
        if s.spin(i) > 0 {
            T::one()
        } else {
            -T::one()
        }
    }

    fn compute_cache(&self, s: &SpinConfiguration) -> SymmetricRbmCache<T> {
        let k_count = self.group.size();
        let mut magnetization = T::zero();
        for i in 0..self.n_sites {
            magnetization += Self::spin_value(s, i);
        }
        let mut theta =
            DMatrix::from_element(self.features, k_count, Cplx::new(T::zero(), T::zero()));
        for k in 0..k_count {
            for f in 0..self.features {
                let mut acc = self.hidden_bias[f];
                for j in 0..self.n_sites {
                    let sigma = Self::spin_value(s, self.group.apply(k, j));
                    acc += self.weights[(f, j)] * Cplx::new(sigma, T::zero());
                }
                theta[(f, k)] = acc;
            }
        }
        let log_amp = self.log_from_parts(magnetization, &theta);
        SymmetricRbmCache { magnetization, theta, log_amp }
    }

    fn log_from_parts(&self, magnetization: T, theta: &DMatrix<Cplx<T>>) -> Cplx<T> {
        let k_count = self.group.size();
        let mut bias_sum = Cplx::new(T::zero(), T::zero());
        for f in 0..self.features {
            bias_sum += self.visible_bias[f];
        }
        let m_total = real::<T>(k_count as f64) * magnetization;
        let mut log_amp = bias_sum * Cplx::new(m_total, T::zero());
        for k in 0..k_count {
            for f in 0..self.features {
                log_amp += ln_2cosh(theta[(f, k)]);
            }
        }
        log_amp
    }
}

impl<T: Real> AnsatzState<T> for SymmetricRbm<T> {
    type Cache = SymmetricRbmCache<T>;

    fn n_sites(&self) -> usize {
        self.n_sites
    }

    fn parameter_count(&self) -> usize {
        self.features * (2 + self.n_sites)
    }

    fn log_amplitude(&self, s: &SpinConfiguration) -> LogAmp<T> {
        LogAmp::classify(self.compute_cache(s).log_amp)
    }

    fn log_derivatives(&self, s: &SpinConfiguration) -> DVector<Cplx<T>> {
        let cache = self.compute_cache(s);
        let k_count = self.group.size();
        let mut out = DVector::from_element(
            self.parameter_count(),
            Cplx::new(T::zero(), T::zero()),
        );
        let m_total = real::<T>(k_count as f64) * cache.magnetization;
        for f in 0..self.features {
            out[f] = Cplx::new(m_total, T::zero());
        }
        // tanh table reused for hidden and weight derivatives.
        let mut tanh =
            DMatrix::from_element(self.features, k_count, Cplx::new(T::zero(), T::zero()));
        for k in 0..k_count {
            for f in 0..self.features {
                tanh[(f, k)] = cache.theta[(f, k)].tanh();
                out[self.features + f] += tanh[(f, k)];
            }
        }
        let base = 2 * self.features;
        for f in 0..self.features {
            for j in 0..self.n_sites {
                let mut acc = Cplx::new(T::zero(), T::zero());
                for k in 0..k_count {
                    let sigma = Self::spin_value(s, self.group.apply(k, j));
                    acc += tanh[(f, k)] * Cplx::new(sigma, T::zero());
                }
                out[base + f * self.n_sites + j] = acc;
            }
        }
        out
    }

    fn parameters(&self) -> DVector<Cplx<T>> {
        let mut out = DVector::from_element(
            self.parameter_count(),
            Cplx::new(T::zero(), T::zero()),
        );
        for f in 0..self.features {
            out[f] = self.visible_bias[f];
            out[self.features + f] = self.hidden_bias[f];
        }
        let base = 2 * self.features;
        for f in 0..self.features {
            for j in 0..self.n_sites {
                out[base + f * self.n_sites + j] = self.weights[(f, j)];
            }
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
        for f in 0..self.features {
            self.visible_bias[f] = parameters[f];
            self.hidden_bias[f] = parameters[self.features + f];
        }
        let base = 2 * self.features;
        for f in 0..self.features {
            for j in 0..self.n_sites {
                self.weights[(f, j)] = parameters[base + f * self.n_sites + j];
            }
        }
        Ok(())
    }

    fn make_cache(&self, s: &SpinConfiguration) -> Self::Cache {
        self.compute_cache(s)
    }

    fn cached_log_amplitude(&self, cache: &Self::Cache) -> LogAmp<T> {
        LogAmp::classify(cache.log_amp)
    }

    fn cached_log_ratio(
        &self,
        cache: &Self::Cache,
        s: &SpinConfiguration,
        flips: &[usize],
    ) -> LogAmp<T> {
        if flips.is_empty() {
            return LogAmp::Finite(Cplx::new(T::zero(), T::zero()));
        }
        let mut theta = cache.theta.clone();
        let mut magnetization = cache.magnetization;
        let two = real::<T>(2.0);
        let k_count = self.group.size();
        for &i in flips {
            let sigma = Self::spin_value(s, i);
            magnetization -= two * sigma;
            for k in 0..k_count {
                let j = self.group.inverse_site(k, i);
                for f in 0..self.features {
                    theta[(f, k)] -= self.weights[(f, j)] * Cplx::new(two * sigma, T::zero());
                }
            }
        }
        let new_log = self.log_from_parts(magnetization, &theta);
        match (LogAmp::classify(new_log), LogAmp::classify(cache.log_amp)) {
            (LogAmp::Zero, _) => LogAmp::Zero,
            (LogAmp::Finite(_), LogAmp::Zero) => {
                debug_assert!(false, "ratio out of a zero-amplitude configuration");
                LogAmp::Zero
            }
            (LogAmp::Finite(n), LogAmp::Finite(o)) => LogAmp::Finite(n - o),
        }
    }

    fn advance_cache(&self, cache: &mut Self::Cache, s: &SpinConfiguration, flips: &[usize]) {
        let two = real::<T>(2.0);
        let k_count = self.group.size();
        for &i in flips {
            let sigma = Self::spin_value(s, i);
            cache.magnetization -= two * sigma;
            for k in 0..k_count {
                let j = self.group.inverse_site(k, i);
                for f in 0..self.features {
                    cache.theta[(f, k)] -=
                        self.weights[(f, j)] * Cplx::new(two * sigma, T::zero());
                }
            }
        }
        cache.log_amp = self.log_from_parts(cache.magnetization, &cache.theta);
    }
}
