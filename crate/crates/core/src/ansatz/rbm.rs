//! Dense complex restricted Boltzmann machine.
//!
//! log Ψ(s) = Σ_i b_i s_i + Σ_j log 2cosh(c_j + Σ_i W_ji s_i), with visible
//! biases b, hidden biases c, and an M×N weight matrix W. The flat parameter
//! order is [visible; hidden; weights row-major], so P = N + M + M·N.

use nalgebra::{DMatrix, DVector};

use crate::ansatz::{AnsatzState, LogAmp};
use crate::error::{Error, Result};
use crate::scalar::{ln_2cosh, real, Cplx, Real};
use crate::spin::SpinConfiguration;

/// Dense RBM wave function.
#[derive(Debug, Clone, PartialEq)]
pub struct Rbm<T: Real> {
    n_visible: usize,
    n_hidden: usize,
    visible_bias: DVector<Cplx<T>>,
    hidden_bias: DVector<Cplx<T>>,
    /// Row j holds hidden unit j's couplings to all visible spins.
    weights: DMatrix<Cplx<T>>,
}

/// Incremental state for one configuration: the hidden-unit arguments
/// θ_j = c_j + Σ_i W_ji s_i, the visible-bias term, and the resulting log
/// amplitude.
#[derive(Debug, Clone)]
pub struct RbmCache<T: Real> {
    theta: DVector<Cplx<T>>,
    visible_term: Cplx<T>,
    log_amp: Cplx<T>,
}

impl<T: Real> Rbm<T> {
    /// All-zero parameters (the uniform state, log Ψ ≡ M·log 2).
    pub fn zeros(n_visible: usize, n_hidden: usize) -> Result<Self> {
        if n_visible == 0 || n_hidden == 0 {
            return Err(Error::Domain(format!(
                "RBM needs at least one visible and one hidden unit, got {n_visible}×{n_hidden}"
            )));
        }
        let zero = Cplx::new(T::zero(), T::zero());
        Ok(Self {
            n_visible,
            n_hidden,
            visible_bias: DVector::from_element(n_visible, zero),
            hidden_bias: DVector::from_element(n_hidden, zero),
            weights: DMatrix::from_element(n_hidden, n_visible, zero),
        })
    }

    /// Number of hidden units M.
    pub fn n_hidden(&self) -> usize {
        self.n_hidden
    }

    /// Visible biases b.
    pub fn visible_bias(&self) -> &DVector<Cplx<T>> {
        &self.visible_bias
    }

    /// Hidden biases c.
    pub fn hidden_bias(&self) -> &DVector<Cplx<T>> {
        &self.hidden_bias
    }

    /// Weight matrix W (M×N).
    pub fn weights(&self) -> &DMatrix<Cplx<T>> {
        &self.weights
    }

    /// Absorb a single-site Z gate into the visible bias: b_site += iπ/2.
    ///
    /// For ±1 spins, e^{iπσ/2} = i·σ, so the shift multiplies every
    /// amplitude by i·σ_site — exactly σᶻ on that site up to the global
    /// phase i, which no physical prediction sees.
    pub fn apply_z_gate(&mut self, site: usize) -> Result<()> {
        if site >= self.n_visible {
            return Err(Error::Domain(format!(
                "site {site} out of range for {} visible units",
                self.n_visible
            )));
        }
        let half_pi = real::<T>(std::f64::consts::FRAC_PI_2);
        self.visible_bias[site] += Cplx::new(T::zero(), half_pi);
        Ok(())
    }

    fn spin_value(s: &SpinConfiguration, i: usize) -> T {
        if s.spin(i) > 0 {
            T::one()
        } else {
            -T::one()
        }
    }

    fn compute_cache(&self, s: &SpinConfiguration) -> RbmCache<T> {
        let mut visible_term = Cplx::new(T::zero(), T::zero());
        for i in 0..self.n_visible {
            visible_term += self.visible_bias[i] * Cplx::new(Self::spin_value(s, i), T::zero());
        }
        let mut theta = self.hidden_bias.clone();
        for i in 0..self.n_visible {
            let sigma = Cplx::new(Self::spin_value(s, i), T::zero());
            for j in 0..self.n_hidden {
                theta[j] += self.weights[(j, i)] * sigma;
            }
        }
        let mut log_amp = visible_term;
        for j in 0..self.n_hidden {
            log_amp += ln_2cosh(theta[j]);
        }
        RbmCache { theta, visible_term, log_amp }
    }

    /// Log amplitude recomputed from an updated (θ, visible) pair.
    fn log_from_parts(&self, theta: &DVector<Cplx<T>>, visible_term: Cplx<T>) -> Cplx<T> {
        let mut log_amp = visible_term;
        for j in 0..self.n_hidden {
            log_amp += ln_2cosh(theta[j]);
        }
        log_amp
    }
}

impl<T: Real> AnsatzState<T> for Rbm<T> {
    type Cache = RbmCache<T>;

    fn n_sites(&self) -> usize {
        self.n_visible
    }

    fn parameter_count(&self) -> usize {
        self.n_visible + self.n_hidden + self.n_hidden * self.n_visible
    }

    fn log_amplitude(&self, s: &SpinConfiguration) -> LogAmp<T> {
        LogAmp::classify(self.compute_cache(s).log_amp)
    }

    fn log_derivatives(&self, s: &SpinConfiguration) -> DVector<Cplx<T>> {
        let cache = self.compute_cache(s);
        let mut out = DVector::from_element(
            self.parameter_count(),
            Cplx::new(T::zero(), T::zero()),
        );
        for i in 0..self.n_visible {
            out[i] = Cplx::new(Self::spin_value(s, i), T::zero());
        }
        let mut tanh = DVector::from_element(self.n_hidden, Cplx::new(T::zero(), T::zero()));
        for j in 0..self.n_hidden {
            tanh[j] = cache.theta[j].tanh();
            out[self.n_visible + j] = tanh[j];
        }
        let base = self.n_visible + self.n_hidden;
        for j in 0..self.n_hidden {
            for i in 0..self.n_visible {
                out[base + j * self.n_visible + i] =
                    tanh[j] * Cplx::new(Self::spin_value(s, i), T::zero());
            }
        }
        out
    }

    fn parameters(&self) -> DVector<Cplx<T>> {
        let mut out = DVector::from_element(
            self.parameter_count(),
            Cplx::new(T::zero(), T::zero()),
        );
        for i in 0..self.n_visible {
            out[i] = self.visible_bias[i];
        }
        for j in 0..self.n_hidden {
            out[self.n_visible + j] = self.hidden_bias[j];
        }
        let base = self.n_visible + self.n_hidden;
        for j in 0..self.n_hidden {
            for i in 0..self.n_visible {
                out[base + j * self.n_visible + i] = self.weights[(j, i)];
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
        for i in 0..self.n_visible {
            self.visible_bias[i] = parameters[i];
        }
        for j in 0..self.n_hidden {
            self.hidden_bias[j] = parameters[self.n_visible + j];
        }
        let base = self.n_visible + self.n_hidden;
        for j in 0..self.n_hidden {
            for i in 0..self.n_visible {
                self.weights[(j, i)] = parameters[base + j * self.n_visible + i];
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
        let mut visible_term = cache.visible_term;
        let two = real::<T>(2.0);
        for &i in flips {
            let sigma = Self::spin_value(s, i);
            let shift = Cplx::new(two * sigma, T::zero());
            visible_term -= self.visible_bias[i] * shift;
            for j in 0..self.n_hidden {
                theta[j] -= self.weights[(j, i)] * shift;
            }
        }
        let new_log = self.log_from_parts(&theta, visible_term);
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
        for &i in flips {
            let sigma = Self::spin_value(s, i);
            let shift = Cplx::new(two * sigma, T::zero());
            cache.visible_term -= self.visible_bias[i] * shift;
            for j in 0..self.n_hidden {
                cache.theta[j] -= self.weights[(j, i)] * shift;
            }
        }
        cache.log_amp = self.log_from_parts(&cache.theta, cache.visible_term);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{build_ansatz, AnsatzSpec, AnyAnsatz};

    fn sample_rbm(seed: u64) -> Rbm<f64> {
        match build_ansatz::<f64>(4, &AnsatzSpec::Rbm { hidden: 6 }, 0.3, seed).unwrap() {
            AnyAnsatz::Rbm(rbm) => rbm,
            _ => unreachable!(),
        }
    }

    #[test]
    fn zero_parameters_give_uniform_state() {
        let rbm = Rbm::<f64>::zeros(3, 5).unwrap();
        let expected = 5.0 * 2.0f64.ln();
        for token in ["uuu", "udu", "ddd"] {
            let s = SpinConfiguration::parse_token(token).unwrap();
            let la = rbm.log_amplitude(&s).finite().unwrap();
            assert!((la.re - expected).abs() < 1e-14);
            assert!(la.im.abs() < 1e-14);
        }
    }

    #[test]
    fn cache_matches_direct_evaluation() {
        let rbm = sample_rbm(5);
        let s = SpinConfiguration::parse_token("uddu").unwrap();
        let cache = rbm.make_cache(&s);
        let direct = rbm.log_amplitude(&s).finite().unwrap();
        let cached = rbm.cached_log_amplitude(&cache).finite().unwrap();
        assert!((direct - cached).norm() < 1e-14);

        // Flip ratio agrees with two direct evaluations.
        let flips = [0usize, 3usize];
        let t = s.flipped_many(&flips).unwrap();
        let expected = rbm.log_amplitude(&t).finite().unwrap() - direct;
        let ratio = rbm.cached_log_ratio(&cache, &s, &flips).finite().unwrap();
        assert!((expected - ratio).norm() < 1e-12);

        // Advancing the cache tracks the new configuration.
        let mut moved = cache.clone();
        rbm.advance_cache(&mut moved, &s, &flips);
        let advanced = rbm.cached_log_amplitude(&moved).finite().unwrap();
        assert!((advanced - rbm.log_amplitude(&t).finite().unwrap()).norm() < 1e-12);
    }

    #[test]
    fn parameter_round_trip() {
        let mut rbm = sample_rbm(9);
        let p = rbm.parameters();
        assert_eq!(p.len(), 4 + 6 + 24);
        let mut q = p.clone();
        q[7] += Cplx::new(0.5, -0.25);
        rbm.set_parameters(&q).unwrap();
        assert_eq!(rbm.parameters(), q);
        let wrong = DVector::from_element(3, Cplx::new(0.0, 0.0));
        assert!(rbm.set_parameters(&wrong).is_err());
    }

    #[test]
    fn z_gate_shifts_relative_phase() {
        let mut rbm = sample_rbm(13);
        let s_up = SpinConfiguration::parse_token("uudd").unwrap();
        let s_down = SpinConfiguration::parse_token("dudd").unwrap();
        let before_up = rbm.log_amplitude(&s_up).finite().unwrap();
        let before_down = rbm.log_amplitude(&s_down).finite().unwrap();
        rbm.apply_z_gate(0).unwrap();
        let after_up = rbm.log_amplitude(&s_up).finite().unwrap();
        let after_down = rbm.log_amplitude(&s_down).finite().unwrap();
        // Amplitude ratio between σ₀ = ±1 sectors gains exactly e^{iπ} = −1.
        let before_ratio = (before_up - before_down).exp();
        let after_ratio = (after_up - after_down).exp();
        assert!((after_ratio + before_ratio).norm() < 1e-12);
        // Moduli are untouched.
        assert!((after_up.re - before_up.re).abs() < 1e-14);
        assert!((after_down.re - before_down.re).abs() < 1e-14);
    }

    #[test]
    fn z_gate_site_range() {
        let mut rbm = sample_rbm(1);
        assert!(rbm.apply_z_gate(4).is_err());
    }
}
