//! Energy gradients, forces, and the quantum geometric tensor.

use nalgebra::{DMatrix, DVector};

use crate::ansatz::AnsatzState;
use crate::error::{Error, Result};
use crate::operators::LocalOperator;
use crate::scalar::{is_finite_c, sqrt, Cplx, Real};
use crate::vmc::{evaluate_batch, EstimatorSource, EvaluatedBatch};

/// Quantum geometric tensor and force vector at one parameter point.
///
/// S_{pp′} = ⟨O_p* O_{p′}⟩ − ⟨O_p*⟩⟨O_{p′}⟩ and
/// f_p = ⟨E_loc O_p*⟩ − ⟨E_loc⟩⟨O_p*⟩, both over the same rows. The matrix
/// is assembled from centered, weight-scaled rows as a Gram matrix, so it is
/// Hermitian and positive semidefinite by construction. `energy` is the
/// weighted mean local energy used for centering (handy for step logging).
#[derive(Debug, Clone)]
pub struct Qgt<T: Real> {
    /// The P×P geometric tensor S.
    pub matrix: DMatrix<Cplx<T>>,
    /// The force vector f.
    pub forces: DVector<Cplx<T>>,
    /// Diagonal shift Λ ≥ 0 applied when the tensor is solved.
    pub regularization: T,
    /// Weighted mean local energy of the rows.
    pub energy: Cplx<T>,
}

/// One covariance pass over the rows: forces, mean energy, and the mean
/// log-derivative row.
fn covariance_pass<T: Real, A: AnsatzState<T>>(
    ansatz: &A,
    ev: &EvaluatedBatch<T>,
) -> Result<(DVector<Cplx<T>>, Cplx<T>, Vec<Cplx<T>>)> {
    if ev.is_empty() {
        return Err(Error::Domain("forces over an empty batch".into()));
    }
    let p = ansatz.parameter_count();
    let zero = Cplx::new(T::zero(), T::zero());
    let mut mean_o = vec![zero; p];
    let mut mean_eo = vec![zero; p]; // ⟨E_loc O_p*⟩
    let mut mean_e = zero;
    for ((w, config), e) in ev.weights().iter().zip(ev.configs()).zip(ev.local_values()) {
        let wc = Cplx::new(*w, T::zero());
        let ew = *e * wc;
        mean_e += ew;
        let row = ansatz.log_derivatives(config);
        let row = row.as_slice();
        for i in 0..p {
            mean_o[i] += row[i] * wc;
            mean_eo[i] += row[i].conj() * ew;
        }
    }
    let mut forces = DVector::from_element(p, zero);
    for i in 0..p {
        forces[i] = mean_eo[i] - mean_e * mean_o[i].conj();
    }
    for i in 0..p {
        if !is_finite_c(forces[i]) {
            return Err(Error::Numerical("non-finite force component".into()));
        }
    }
    Ok((forces, mean_e, mean_o))
}

/// Force vector and mean energy from resolved rows (single pass).
///
/// Returns (f, ⟨E_loc⟩) with f_p = ⟨E_loc O_p*⟩ − ⟨E_loc⟩⟨O_p*⟩.
pub fn forces_from_evaluated<T: Real, A: AnsatzState<T>>(
    ansatz: &A,
    ev: &EvaluatedBatch<T>,
) -> Result<(DVector<Cplx<T>>, Cplx<T>)> {
    let (forces, energy, _) = covariance_pass(ansatz, ev)?;
    Ok((forces, energy))
}

/// Energy gradient g with respect to the complex parameters, g = 2f.
///
/// Convention: for a parameter θ_p = x + iy of a holomorphic ansatz,
/// ∂E/∂x = Re g_p and ∂E/∂y = Im g_p, so plain gradient descent is
/// θ ← θ − η·g. For real parameters this reduces to the covariance form
/// ∂E/∂θ_p = 2 Re⟨(E_loc − ⟨E_loc⟩) O_p*⟩.
pub fn energy_gradient<T: Real, A: AnsatzState<T>>(
    op: &LocalOperator<T>,
    ansatz: &A,
    source: &EstimatorSource<'_, T>,
) -> Result<DVector<Cplx<T>>> {
    let ev = evaluate_batch(op, ansatz, source)?;
    let (forces, _) = forces_from_evaluated(ansatz, &ev)?;
    Ok(forces * Cplx::new(T::one() + T::one(), T::zero()))
}

/// Geometric tensor and forces from resolved rows.
///
/// Two passes: the first accumulates the mean log-derivative row and the
/// forces; the second accumulates S as a Gram matrix of centered rows scaled
/// by √w, filling the upper triangle and mirroring (diagonal exactly real).
pub fn qgt_from_evaluated<T: Real, A: AnsatzState<T>>(
    ansatz: &A,
    ev: &EvaluatedBatch<T>,
    regularization: T,
) -> Result<Qgt<T>> {
    if regularization < T::zero() {
        return Err(Error::Config("regularization must be ≥ 0".into()));
    }
    let (forces, energy, mean_o) = covariance_pass(ansatz, ev)?;
    let p = ansatz.parameter_count();
    let zero = Cplx::new(T::zero(), T::zero());

    // Pass 2: upper-triangular Gram accumulation over centered rows.
    let mut upper = vec![zero; p * p];
    let mut centered = vec![zero; p];
    for (w, config) in ev.weights().iter().zip(ev.configs()) {
        let sw = Cplx::new(sqrt(*w), T::zero());
        let row = ansatz.log_derivatives(config);
        let row = row.as_slice();
        for i in 0..p {
            centered[i] = (row[i] - mean_o[i]) * sw;
        }
        for i in 0..p {
            let ci = centered[i].conj();
            let dst = &mut upper[i * p + i..(i + 1) * p];
            let src = &centered[i..p];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += ci * *s;
            }
        }
    }
    let mut matrix = DMatrix::from_element(p, p, zero);
    for i in 0..p {
        matrix[(i, i)] = Cplx::new(upper[i * p + i].re, T::zero());
        for j in i + 1..p {
            let v = upper[i * p + j];
            matrix[(i, j)] = v;
            matrix[(j, i)] = v.conj();
        }
    }
    for v in matrix.iter() {
        if !is_finite_c(*v) {
            return Err(Error::Numerical("non-finite geometric tensor entry".into()));
        }
    }
    Ok(Qgt { matrix, forces, regularization, energy })
}

/// Geometric tensor and forces for `op` at the current parameters.
pub fn qgt_and_forces<T: Real, A: AnsatzState<T>>(
    op: &LocalOperator<T>,
    ansatz: &A,
    source: &EstimatorSource<'_, T>,
    regularization: T,
) -> Result<Qgt<T>> {
    let ev = evaluate_batch(op, ansatz, source)?;
    qgt_from_evaluated(ansatz, &ev, regularization)
}
