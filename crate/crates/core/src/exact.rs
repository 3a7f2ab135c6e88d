//! Exact state vectors and small-system reference calculations.
//!
//! Everything here enumerates the full 2^N basis, so it is capped at
//! [`MAX_ENUMERATED_SITES`] sites. Dense diagonalization covers systems up
//! to [`DENSE_EIGEN_SITES`] sites; above that the ground state comes from a
//! matrix-free Lanczos iteration with full reorthogonalization. These
//! routines are the measuring stick the stochastic engine is judged
//! against, so they favour clarity and verifiable contracts over speed.

use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ansatz::{AnsatzState, LogAmp};
use crate::error::{Error, Result};
use crate::operators::LocalOperator;
use crate::scalar::{abs, is_finite_c, ln, real, sqrt, to_f64, Cplx, Real};
use crate::spin::{BasisIndex, SpinConfiguration, MAX_ENUMERATED_SITES};

/// Largest site count handled by dense diagonalization; larger systems (up
/// to [`MAX_ENUMERATED_SITES`]) use the Lanczos path.
pub const DENSE_EIGEN_SITES: usize = 12;

/// Residual tolerance ‖Hv − λv‖∞ that `ground_state` enforces on the
/// eigenpair it returns.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-8;

/// A full state vector over the 2^N basis, indexed by [`BasisIndex`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real> {
    n_sites: usize,
    amplitudes: DVector<Cplx<T>>,
}

impl<T: Real> StateVector<T> {
    /// Wrap a dense amplitude vector; the length must be exactly 2^N.
    pub fn new(n_sites: usize, amplitudes: DVector<Cplx<T>>) -> Result<Self> {
        if n_sites == 0 || n_sites > MAX_ENUMERATED_SITES {
            return Err(Error::Capacity(format!(
                "state vectors cover 1..={MAX_ENUMERATED_SITES} sites, got {n_sites}"
            )));
        }
        let dim = 1usize << n_sites;
        if amplitudes.len() != dim {
            return Err(Error::Domain(format!(
                "amplitude vector has length {}, expected 2^{n_sites} = {dim}",
                amplitudes.len()
            )));
        }
        Ok(Self { n_sites, amplitudes })
    }

    /// Computational basis state |index⟩.
    pub fn basis_state(n_sites: usize, index: BasisIndex) -> Result<Self> {
        let mut state = Self::zero(n_sites)?;
        if index.0 >= state.dim() {
            return Err(Error::Domain(format!(
                "basis index {} out of range for {n_sites} sites",
                index.0
            )));
        }
        state.amplitudes[index.0] = Cplx::new(T::one(), T::zero());
        Ok(state)
    }

    /// All-zero vector (not a physical state until amplitudes are filled).
    pub fn zero(n_sites: usize) -> Result<Self> {
        if n_sites == 0 || n_sites > MAX_ENUMERATED_SITES {
            return Err(Error::Capacity(format!(
                "state vectors cover 1..={MAX_ENUMERATED_SITES} sites, got {n_sites}"
            )));
        }
        let dim = 1usize << n_sites;
        Ok(Self { n_sites, amplitudes: DVector::from_element(dim, Cplx::new(T::zero(), T::zero())) })
    }

    /// Fill from a function of the basis configuration.
    pub fn from_fn(n_sites: usize, mut f: impl FnMut(&SpinConfiguration) -> Cplx<T>) -> Result<Self> {
        let mut state = Self::zero(n_sites)?;
        for i in 0..state.dim() {
            let s = SpinConfiguration::decode(BasisIndex(i), n_sites)?;
            state.amplitudes[i] = f(&s);
        }
        Ok(state)
    }

    /// Number of sites.
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Dimension 2^N.
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Amplitude ⟨index|ψ⟩.
    pub fn amplitude(&self, index: BasisIndex) -> Cplx<T> {
        self.amplitudes[index.0]
    }

    /// Full amplitude vector.
    pub fn amplitudes(&self) -> &DVector<Cplx<T>> {
        &self.amplitudes
    }

    /// Mutable amplitude vector.
    pub fn amplitudes_mut(&mut self) -> &mut DVector<Cplx<T>> {
        &mut self.amplitudes
    }

    /// Euclidean norm ‖ψ‖.
    pub fn norm(&self) -> T {
        let mut acc = T::zero();
        for a in self.amplitudes.iter() {
            acc += a.norm_sqr();
        }
        sqrt(acc)
    }

    /// Normalize in place; errors on the zero vector.
    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n <= T::zero() || !crate::scalar::is_finite(n) {
            return Err(Error::Numerical(format!(
                "cannot normalize a state with norm {}",
                to_f64(n)
            )));
        }
        let inv = Cplx::new(T::one() / n, T::zero());
        for a in self.amplitudes.iter_mut() {
            *a *= inv;
        }
        Ok(())
    }

    /// ⟨self|other⟩ = Σ_s conj(self(s))·other(s).
    pub fn inner(&self, other: &Self) -> Result<Cplx<T>> {
        if self.n_sites != other.n_sites {
            return Err(Error::Domain(format!(
                "inner product between {}-site and {}-site states",
                self.n_sites, other.n_sites
            )));
        }
        let mut acc = Cplx::new(T::zero(), T::zero());
        for (a, b) in self.amplitudes.iter().zip(other.amplitudes.iter()) {
            acc += a.conj() * b;
        }
        Ok(acc)
    }

    /// Write the vector in the binary layout: `u32` site count, `u64`
    /// amplitude count, then interleaved real/imag 64-bit little-endian
    /// floats.
    pub fn write_binary<W: Write>(&self, writer: &mut W) -> Result<()> {
        writer.write_all(&(self.n_sites as u32).to_le_bytes())?;
        writer.write_all(&(self.dim() as u64).to_le_bytes())?;
        for a in self.amplitudes.iter() {
            writer.write_all(&to_f64(a.re).to_le_bytes())?;
            writer.write_all(&to_f64(a.im).to_le_bytes())?;
        }
        Ok(())
    }

    /// Read the binary layout written by [`Self::write_binary`].
    pub fn read_binary<R: Read>(reader: &mut R) -> Result<Self> {
        let mut u32buf = [0u8; 4];
        reader.read_exact(&mut u32buf)?;
        let n_sites = u32::from_le_bytes(u32buf) as usize;
        let mut u64buf = [0u8; 8];
        reader.read_exact(&mut u64buf)?;
        let count = u64::from_le_bytes(u64buf) as usize;
        if n_sites == 0 || n_sites > MAX_ENUMERATED_SITES {
            return Err(Error::Parse(format!("state file claims {n_sites} sites")));
        }
        if count != 1usize << n_sites {
            return Err(Error::Parse(format!(
                "state file claims {count} amplitudes for {n_sites} sites"
            )));
        }
        let mut amplitudes = DVector::from_element(count, Cplx::new(T::zero(), T::zero()));
        let mut f64buf = [0u8; 8];
        for i in 0..count {
            reader.read_exact(&mut f64buf)?;
            let re = f64::from_le_bytes(f64buf);
            reader.read_exact(&mut f64buf)?;
            let im = f64::from_le_bytes(f64buf);
            amplitudes[i] = Cplx::new(real(re), real(im));
        }
        Self::new(n_sites, amplitudes)
    }
}

/// Lowest eigenpair of a Hermitian operator, with the spectral gap.
#[derive(Debug, Clone)]
pub struct SpectralResult<T: Real> {
    /// Lowest eigenvalue E₀.
    pub ground_energy: T,
    /// Normalized eigenvector for E₀.
    pub ground_state: StateVector<T>,
    /// E₁ − E₀ ≥ 0 (0 for a degenerate ground space).
    pub gap: T,
}

/// Apply an operator to a state: out(s) = Σ_s′ ⟨s|Ô|s′⟩ ψ(s′).
pub fn apply_operator<T: Real>(
    op: &LocalOperator<T>,
    state: &StateVector<T>,
) -> Result<StateVector<T>> {
    if op.n_sites() != state.n_sites() {
        return Err(Error::Domain(format!(
            "operator on {} sites applied to a {}-site state",
            op.n_sites(),
            state.n_sites()
        )));
    }
    let n = state.n_sites();
    let mut out = StateVector::zero(n)?;
    for i in 0..state.dim() {
        let s = SpinConfiguration::decode(BasisIndex(i), n)?;
        let mut acc = Cplx::new(T::zero(), T::zero());
        op.visit_connected(&s, |flips, value| {
            let mut j = i;
            for &f in flips {
                j ^= 1 << f;
            }
            acc += value * state.amplitudes[j];
        })?;
        out.amplitudes[i] = acc;
    }
    Ok(out)
}

/// Rayleigh quotient ⟨ψ|Ô|ψ⟩ / ⟨ψ|ψ⟩.
pub fn expectation<T: Real>(op: &LocalOperator<T>, state: &StateVector<T>) -> Result<Cplx<T>> {
    let applied = apply_operator(op, state)?;
    let numerator = state.inner(&applied)?;
    let norm_sqr = {
        let mut acc = T::zero();
        for a in state.amplitudes().iter() {
            acc += a.norm_sqr();
        }
        acc
    };
    if norm_sqr <= T::zero() {
        return Err(Error::Domain("expectation value of the zero state".into()));
    }
    Ok(numerator / Cplx::new(norm_sqr, T::zero()))
}

/// Squared overlap |⟨a|b⟩|² / (‖a‖²‖b‖²) — basis- and phase-independent.
pub fn fidelity<T: Real>(a: &StateVector<T>, b: &StateVector<T>) -> Result<T> {
    let na = a.norm();
    let nb = b.norm();
    if na <= T::zero() || nb <= T::zero() {
        return Err(Error::Domain("fidelity with a zero-norm state".into()));
    }
    let overlap = a.inner(b)?;
    Ok(overlap.norm_sqr() / (na * na * nb * nb))
}

/// Lowest eigenpair of a Hermitian operator. Dense diagonalization up to
/// [`DENSE_EIGEN_SITES`] sites, matrix-free Lanczos beyond; both paths
/// verify the residual ‖Hv − E₀v‖∞ ≤ 10⁻⁸ before returning.
pub fn ground_state<T: Real>(op: &LocalOperator<T>) -> Result<SpectralResult<T>> {
    if op.n_sites() > MAX_ENUMERATED_SITES {
        return Err(Error::Capacity(format!(
            "exact ground state is capped at {MAX_ENUMERATED_SITES} sites, got {}",
            op.n_sites()
        )));
    }
    if !op.hermitian_check() {
        return Err(Error::Domain(
            "ground_state requires a Hermitian operator".into(),
        ));
    }
    let result = if op.n_sites() <= DENSE_EIGEN_SITES {
        dense_ground_state(op)?
    } else {
        lanczos_ground_state(op, 2048)?
    };
    let residual = eigen_residual(op, &result.ground_state, result.ground_energy)?;
    if to_f64(residual) > EIGEN_RESIDUAL_TOL {
        return Err(Error::Numerical(format!(
            "eigenpair residual {} exceeds {EIGEN_RESIDUAL_TOL}",
            to_f64(residual)
        )));
    }
    Ok(result)
}

/// ‖Hv − λv‖∞ for a normalized candidate eigenpair.
fn eigen_residual<T: Real>(
    op: &LocalOperator<T>,
    vector: &StateVector<T>,
    value: T,
) -> Result<T> {
    let hv = apply_operator(op, vector)?;
    let mut worst = T::zero();
    for (h, v) in hv.amplitudes().iter().zip(vector.amplitudes().iter()) {
        let r = (h - v * Cplx::new(value, T::zero())).norm();
        if r > worst {
            worst = r;
        }
    }
    Ok(worst)
}

fn dense_ground_state<T: Real>(op: &LocalOperator<T>) -> Result<SpectralResult<T>> {
    let matrix = op.dense_matrix()?;
    let eigen = matrix
        .symmetric_eigen();
    let dim = eigen.eigenvalues.len();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        eigen.eigenvalues[a]
            .partial_cmp(&eigen.eigenvalues[b])
            .expect("Hermitian eigenvalues are finite")
    });
    let lowest = order[0];
    let ground_energy = eigen.eigenvalues[lowest];
    let gap = if dim > 1 {
        eigen.eigenvalues[order[1]] - ground_energy
    } else {
        T::zero()
    };
    let column = eigen.eigenvectors.column(lowest).into_owned();
    let mut ground = StateVector::new(op.n_sites(), column)?;
    ground.normalize()?;
    Ok(SpectralResult { ground_energy, ground_state: ground, gap: if gap < T::zero() { T::zero() } else { gap } })
}

/// Matrix-free Lanczos with full reorthogonalization. The starting vector is
/// drawn from a fixed internal seed so results are reproducible.
fn lanczos_ground_state<T: Real>(
    op: &LocalOperator<T>,
    max_krylov: usize,
) -> Result<SpectralResult<T>> {
    let n = op.n_sites();
    let dim = 1usize << n;
    let mut rng = ChaCha8Rng::seed_from_u64(0x6c61_6e63_7a6f_73u64);
    let mut v0 = StateVector::zero(n)?;
    for a in v0.amplitudes_mut().iter_mut() {
        *a = Cplx::new(T::sample_normal(&mut rng), T::sample_normal(&mut rng));
    }
    v0.normalize()?;

    let mut basis: Vec<DVector<Cplx<T>>> = vec![v0.amplitudes().clone()];
    let mut alphas: Vec<T> = Vec::new();
    let mut betas: Vec<T> = Vec::new();
    let tol = real::<T>(EIGEN_RESIDUAL_TOL);

    let limit = max_krylov.min(dim);
    for k in 0..limit {
        let vk = StateVector::new(n, basis[k].clone())?;
        let mut w = apply_operator(op, &vk)?.amplitudes().clone();
        let alpha = {
            let mut acc = Cplx::new(T::zero(), T::zero());
            for (a, b) in basis[k].iter().zip(w.iter()) {
                acc += a.conj() * b;
            }
            acc.re
        };
        alphas.push(alpha);
        // Three-term recurrence, then full reorthogonalization (twice) to
        // keep the Krylov basis numerically orthonormal.
        for _ in 0..2 {
            for prev in &basis {
                let mut overlap = Cplx::new(T::zero(), T::zero());
                for (a, b) in prev.iter().zip(w.iter()) {
                    overlap += a.conj() * b;
                }
                for (wi, pi) in w.iter_mut().zip(prev.iter()) {
                    *wi -= overlap * pi;
                }
            }
        }
        let beta = {
            let mut acc = T::zero();
            for x in w.iter() {
                acc += x.norm_sqr();
            }
            sqrt(acc)
        };

        // Solve the small tridiagonal problem and test the Ritz residual.
        if k + 1 == limit || beta < real::<T>(1e-14) || (k >= 4 && (k + 1) % 8 == 0) {
            let m = alphas.len();
            let mut tri = DMatrix::<T>::zeros(m, m);
            for i in 0..m {
                tri[(i, i)] = alphas[i];
                if i + 1 < m {
                    tri[(i, i + 1)] = betas[i];
                    tri[(i + 1, i)] = betas[i];
                }
            }
            let eigen = tri.symmetric_eigen();
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&a, &b| {
                eigen.eigenvalues[a]
                    .partial_cmp(&eigen.eigenvalues[b])
                    .expect("finite eigenvalues")
            });
            let ground_energy = eigen.eigenvalues[order[0]];
            let gap = if m > 1 {
                let g = eigen.eigenvalues[order[1]] - ground_energy;
                if g < T::zero() {
                    T::zero()
                } else {
                    g
                }
            } else {
                T::zero()
            };
            let coeffs = eigen.eigenvectors.column(order[0]);
            let mut ritz = DVector::from_element(dim, Cplx::new(T::zero(), T::zero()));
            for (j, v) in basis.iter().enumerate() {
                let c = Cplx::new(coeffs[j], T::zero());
                for (r, b) in ritz.iter_mut().zip(v.iter()) {
                    *r += c * b;
                }
            }
            let mut ground = StateVector::new(n, ritz)?;
            ground.normalize()?;
            let residual = eigen_residual(op, &ground, ground_energy)?;
            if residual <= tol || k + 1 == limit || beta < real::<T>(1e-14) {
                return Ok(SpectralResult { ground_energy, ground_state: ground, gap });
            }
        }

        if beta < real::<T>(1e-14) {
            break;
        }
        betas.push(beta);
        let inv = Cplx::new(T::one() / beta, T::zero());
        let next: DVector<Cplx<T>> = DVector::from_iterator(dim, w.iter().map(|x| x * inv));
        basis.push(next);
    }
    Err(Error::Numerical(
        "Lanczos iteration failed to reach the requested residual".into(),
    ))
}

/// Propagate dψ/dt = −iĤψ for `duration` with `steps` classical RK4 steps.
/// The operator must be Hermitian; the result is re-usable but NOT
/// re-normalized (the integrator drift is part of what callers measure).
pub fn evolve_exact<T: Real>(
    op: &LocalOperator<T>,
    state: &StateVector<T>,
    duration: T,
    steps: usize,
) -> Result<StateVector<T>> {
    if !op.hermitian_check() {
        return Err(Error::Domain("evolve_exact requires a Hermitian operator".into()));
    }
    if steps == 0 {
        return Err(Error::Domain("evolve_exact needs at least one step".into()));
    }
    if op.n_sites() != state.n_sites() {
        return Err(Error::Domain(format!(
            "operator on {} sites applied to a {}-site state",
            op.n_sites(),
            state.n_sites()
        )));
    }
    let dt = duration / real::<T>(steps as f64);
    let minus_i = Cplx::new(T::zero(), -T::one());
    let derivative = |psi: &StateVector<T>| -> Result<DVector<Cplx<T>>> {
        let h_psi = apply_operator(op, psi)?;
        Ok(h_psi.amplitudes().map(|a| minus_i * a))
    };
    let mut current = state.clone();
    let half = Cplx::new(dt / real::<T>(2.0), T::zero());
    let full = Cplx::new(dt, T::zero());
    let sixth = Cplx::new(dt / real::<T>(6.0), T::zero());
    let two = Cplx::new(real::<T>(2.0), T::zero());
    for _ in 0..steps {
        let k1 = derivative(&current)?;
        let y2 = StateVector::new(current.n_sites, current.amplitudes() + &k1 * half)?;
        let k2 = derivative(&y2)?;
        let y3 = StateVector::new(current.n_sites, current.amplitudes() + &k2 * half)?;
        let k3 = derivative(&y3)?;
        let y4 = StateVector::new(current.n_sites, current.amplitudes() + &k3 * full)?;
        let k4 = derivative(&y4)?;
        let increment = (k1 + k2 * two + k3 * two + k4) * sixth;
        current = StateVector::new(current.n_sites, current.amplitudes() + increment)?;
    }
    Ok(current)
}

/// Draw `count` configurations from the Born distribution |ψ(s)|²; the state
/// must be normalized to within 10⁻¹⁰.
pub fn born_sample<T: Real>(
    state: &StateVector<T>,
    count: usize,
    seed: u64,
) -> Result<Vec<SpinConfiguration>> {
    let norm = state.norm();
    if abs(norm - T::one()) > real::<T>(1e-10) {
        return Err(Error::Domain(format!(
            "born_sample needs a normalized state, got norm {}",
            to_f64(norm)
        )));
    }
    // Cumulative distribution over basis indices.
    let dim = state.dim();
    let mut cumulative = Vec::with_capacity(dim);
    let mut acc = T::zero();
    for a in state.amplitudes().iter() {
        acc += a.norm_sqr();
        cumulative.push(acc);
    }
    let total = acc;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let u = T::sample_unit(&mut rng) * total;
        // First index whose cumulative weight exceeds u.
        let mut lo = 0usize;
        let mut hi = dim - 1;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if cumulative[mid] > u {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        out.push(SpinConfiguration::decode(BasisIndex(lo), state.n_sites())?);
    }
    Ok(out)
}

/// Apply a single-site 2×2 unitary to one site of a dense state. `matrix` is
/// row-major in the (up, down) basis.
pub fn apply_single_site_unitary<T: Real>(
    state: &StateVector<T>,
    site: usize,
    matrix: &[[Cplx<T>; 2]; 2],
) -> Result<StateVector<T>> {
    if site >= state.n_sites() {
        return Err(Error::Domain(format!(
            "site {site} out of range for {} sites",
            state.n_sites()
        )));
    }
    let mut out = StateVector::zero(state.n_sites())?;
    let bit = 1usize << site;
    for i in 0..state.dim() {
        if i & bit == 0 {
            let up = state.amplitudes[i];
            let down = state.amplitudes[i | bit];
            out.amplitudes[i] = matrix[0][0] * up + matrix[0][1] * down;
            out.amplitudes[i | bit] = matrix[1][0] * up + matrix[1][1] * down;
        }
    }
    Ok(out)
}

/// Evaluate an ansatz on the full basis and return the normalized dense
/// state. Amplitudes are rescaled by the largest log modulus before
/// exponentiation so large positive logs cannot overflow.
pub fn dense_ansatz_state<T: Real, A: AnsatzState<T>>(ansatz: &A) -> Result<StateVector<T>> {
    let n = ansatz.n_sites();
    if n > MAX_ENUMERATED_SITES {
        return Err(Error::Capacity(format!(
            "dense ansatz evaluation is capped at {MAX_ENUMERATED_SITES} sites, got {n}"
        )));
    }
    let dim = 1usize << n;
    let mut logs: Vec<LogAmp<T>> = Vec::with_capacity(dim);
    let mut max_re: Option<T> = None;
    for i in 0..dim {
        let s = SpinConfiguration::decode(BasisIndex(i), n)?;
        let la = ansatz.log_amplitude(&s);
        if let LogAmp::Finite(z) = la {
            if !is_finite_c(z) {
                return Err(Error::Numerical(format!(
                    "non-finite log amplitude at basis index {i}"
                )));
            }
            max_re = Some(match max_re {
                Some(m) if m >= z.re => m,
                _ => z.re,
            });
        }
        logs.push(la);
    }
    let shift = max_re.ok_or_else(|| {
        Error::Domain("ansatz vanishes on the whole basis; no state to build".into())
    })?;
    let mut state = StateVector::zero(n)?;
    for (i, la) in logs.iter().enumerate() {
        if let LogAmp::Finite(z) = la {
            state.amplitudes[i] = (z - Cplx::new(shift, T::zero())).exp();
        }
    }
    state.normalize()?;
    Ok(state)
}

/// Table-backed ansatz wrapping a dense state vector: the exact log
/// amplitudes, no variational parameters. Useful as a ground-truth stand-in
/// anywhere an [`AnsatzState`] is expected.
#[derive(Debug, Clone)]
pub struct TableAnsatz<T: Real> {
    n_sites: usize,
    logs: Vec<LogAmp<T>>,
}

/// Build a [`TableAnsatz`] holding the log amplitudes of `state`.
pub fn table_ansatz<T: Real>(state: &StateVector<T>) -> TableAnsatz<T> {
    let logs = state
        .amplitudes()
        .iter()
        .map(|a| {
            if a.re == T::zero() && a.im == T::zero() {
                LogAmp::Zero
            } else {
                LogAmp::Finite(Cplx::new(ln(a.norm()), a.arg()))
            }
        })
        .collect();
    TableAnsatz { n_sites: state.n_sites(), logs }
}

/// Cache for [`TableAnsatz`]: just the basis index of the tracked
/// configuration.
#[derive(Debug, Clone)]
pub struct TableCache {
    index: usize,
}

impl<T: Real> AnsatzState<T> for TableAnsatz<T> {
    type Cache = TableCache;

    fn n_sites(&self) -> usize {
        self.n_sites
    }

    fn parameter_count(&self) -> usize {
        0
    }

    fn log_amplitude(&self, s: &SpinConfiguration) -> LogAmp<T> {
        self.logs[s.encode().0]
    }

    fn log_derivatives(&self, _s: &SpinConfiguration) -> DVector<Cplx<T>> {
        DVector::from_element(0, Cplx::new(T::zero(), T::zero()))
    }

    fn parameters(&self) -> DVector<Cplx<T>> {
        DVector::from_element(0, Cplx::new(T::zero(), T::zero()))
    }

    fn set_parameters(&mut self, parameters: &DVector<Cplx<T>>) -> Result<()> {
        if parameters.len() != 0 {
            return Err(Error::Domain(
                "table ansatz has no variational parameters".into(),
            ));
        }
        Ok(())
    }

    fn make_cache(&self, s: &SpinConfiguration) -> Self::Cache {
        TableCache { index: s.encode().0 }
    }

    fn cached_log_amplitude(&self, cache: &Self::Cache) -> LogAmp<T> {
        self.logs[cache.index]
    }

    fn cached_log_ratio(
        &self,
        cache: &Self::Cache,
        _s: &SpinConfiguration,
        flips: &[usize],
    ) -> LogAmp<T> {
        let mut target = cache.index;
        for &f in flips {
            target ^= 1 << f;
        }
        match (self.logs[target], self.logs[cache.index]) {
            (LogAmp::Zero, _) => LogAmp::Zero,
            (LogAmp::Finite(_), LogAmp::Zero) => {
                debug_assert!(false, "log ratio from a zero-amplitude configuration");
                LogAmp::Zero
            }
            (LogAmp::Finite(to), LogAmp::Finite(from)) => LogAmp::Finite(to - from),
        }
    }

    fn advance_cache(&self, cache: &mut Self::Cache, _s: &SpinConfiguration, flips: &[usize]) {
        for &f in flips {
            cache.index ^= 1 << f;
        }
    }
}

/// Draw a uniformly random ±1 configuration (helper shared by samplers and
/// tests).
pub fn random_configuration<T: Real, R: Rng + ?Sized>(
    n_sites: usize,
    rng: &mut R,
) -> SpinConfiguration {
    let spins: Vec<i8> = (0..n_sites)
        .map(|_| if rng.random::<bool>() { 1 } else { -1 })
        .collect();
    SpinConfiguration::from_spins(spins).expect("spins are ±1 by construction")
}
