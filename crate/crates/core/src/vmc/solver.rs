//! Regularized linear solves of the geometric-tensor equation.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::scalar::{is_finite_c, Cplx, Real};
use crate::vmc::Qgt;

/// How (S + Λ·I)·x = rhs is solved.
#[derive(Debug, Clone, Copy)]
pub enum LinearSolver<T: Real> {
    /// Hermitian direct solve: Cholesky, falling back to LU when the
    /// regularized tensor is not numerically positive definite.
    Direct,
    /// Spectral pseudo-inverse: eigenmodes with λ ≤ cutoff·λ_max are
    /// discarded.
    PseudoInverse {
        /// Relative eigenvalue cutoff (e.g. 1e-10).
        cutoff: T,
    },
}

impl<T: Real> LinearSolver<T> {
    /// Stable text name for logs and configs.
    pub fn name(&self) -> &'static str {
        match self {
            LinearSolver::Direct => "direct",
            LinearSolver::PseudoInverse { .. } => "pseudo_inverse",
        }
    }
}

impl<T: Real> Default for LinearSolver<T> {
    fn default() -> Self {
        LinearSolver::Direct
    }
}

/// Solve (S + Λ·I)·x = rhs for the tensor and Λ stored in `qgt`.
pub fn solve_regularized<T: Real>(
    qgt: &Qgt<T>,
    rhs: &DVector<Cplx<T>>,
    solver: &LinearSolver<T>,
) -> Result<DVector<Cplx<T>>> {
    let p = qgt.matrix.nrows();
    if rhs.len() != p {
        return Err(Error::Domain(format!(
            "right-hand side has {} entries for a {p}-parameter tensor",
            rhs.len()
        )));
    }
    if p == 0 {
        return Ok(DVector::from_element(0, Cplx::new(T::zero(), T::zero())));
    }
    let mut a = qgt.matrix.clone();
    let lambda = Cplx::new(qgt.regularization, T::zero());
    for i in 0..p {
        a[(i, i)] += lambda;
    }
    let solution = match solver {
        LinearSolver::Direct => match a.clone().cholesky() {
            Some(chol) => chol.solve(rhs),
            None => a
                .lu()
                .solve(rhs)
                .ok_or_else(|| Error::Numerical("geometric tensor is singular".into()))?,
        },
        LinearSolver::PseudoInverse { cutoff } => {
            let eig = a.symmetric_eigen();
            let mut lambda_max = T::zero();
            for k in 0..p {
                if eig.eigenvalues[k] > lambda_max {
                    lambda_max = eig.eigenvalues[k];
                }
            }
            if !(lambda_max > T::zero()) {
                return Err(Error::Numerical(
                    "geometric tensor has no positive eigenvalues".into(),
                ));
            }
            let threshold = *cutoff * lambda_max;
            let mut x = DVector::from_element(p, Cplx::new(T::zero(), T::zero()));
            for k in 0..p {
                let lam = eig.eigenvalues[k];
                if lam > threshold {
                    let v = eig.eigenvectors.column(k);
                    let coeff = v.dotc(rhs) / Cplx::new(lam, T::zero());
                    x += v * coeff;
                }
            }
            x
        }
    };
    for i in 0..p {
        if !is_finite_c(solution[i]) {
            return Err(Error::Numerical("linear solve produced a non-finite entry".into()));
        }
    }
    Ok(solution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn qgt_from(matrix: DMatrix<Cplx<f64>>, lambda: f64) -> Qgt<f64> {
        let p = matrix.nrows();
        Qgt {
            matrix,
            forces: DVector::from_element(p, Cplx::new(0.0, 0.0)),
            regularization: lambda,
            energy: Cplx::new(0.0, 0.0),
        }
    }

    #[test]
    fn identity_solve() {
        let qgt = qgt_from(DMatrix::identity(3, 3), 0.0);
        let rhs = DVector::from_vec(vec![
            Cplx::new(1.0, 2.0),
            Cplx::new(-0.5, 0.0),
            Cplx::new(0.0, -3.0),
        ]);
        let x = solve_regularized(&qgt, &rhs, &LinearSolver::Direct).unwrap();
        for i in 0..3 {
            assert!((x[i] - rhs[i]).norm() < 1e-14);
        }
    }

    #[test]
    fn regularization_shifts_the_diagonal() {
        let qgt = qgt_from(DMatrix::identity(2, 2), 1.0);
        let rhs = DVector::from_vec(vec![Cplx::new(2.0, 0.0), Cplx::new(4.0, 0.0)]);
        let x = solve_regularized(&qgt, &rhs, &LinearSolver::Direct).unwrap();
        assert!((x[0].re - 1.0).abs() < 1e-14);
        assert!((x[1].re - 2.0).abs() < 1e-14);
    }

    #[test]
    fn singular_direct_fails_pseudo_inverse_succeeds() {
        // Rank-1 Hermitian matrix.
        let mut m = DMatrix::from_element(2, 2, Cplx::new(0.0, 0.0));
        m[(0, 0)] = Cplx::new(1.0, 0.0);
        let qgt = qgt_from(m, 0.0);
        let rhs = DVector::from_vec(vec![Cplx::new(3.0, 0.0), Cplx::new(0.0, 0.0)]);
        assert!(solve_regularized(&qgt, &rhs, &LinearSolver::Direct).is_err());
        let x = solve_regularized(
            &qgt,
            &rhs,
            &LinearSolver::PseudoInverse { cutoff: 1e-10 },
        )
        .unwrap();
        assert!((x[0].re - 3.0).abs() < 1e-12);
        assert!(x[1].norm() < 1e-12);
    }

    #[test]
    fn solvers_agree_on_well_conditioned_systems() {
        // Hermitian positive definite 3×3.
        let mut m = DMatrix::from_element(3, 3, Cplx::new(0.0, 0.0));
        m[(0, 0)] = Cplx::new(2.0, 0.0);
        m[(1, 1)] = Cplx::new(3.0, 0.0);
        m[(2, 2)] = Cplx::new(4.0, 0.0);
        m[(0, 1)] = Cplx::new(0.5, 0.25);
        m[(1, 0)] = Cplx::new(0.5, -0.25);
        m[(1, 2)] = Cplx::new(-0.3, 0.1);
        m[(2, 1)] = Cplx::new(-0.3, -0.1);
        let qgt = qgt_from(m, 1e-4);
        let rhs = DVector::from_vec(vec![
            Cplx::new(1.0, -1.0),
            Cplx::new(0.0, 2.0),
            Cplx::new(-1.5, 0.5),
        ]);
        let a = solve_regularized(&qgt, &rhs, &LinearSolver::Direct).unwrap();
        let b = solve_regularized(
            &qgt,
            &rhs,
            &LinearSolver::PseudoInverse { cutoff: 1e-12 },
        )
        .unwrap();
        for i in 0..3 {
            assert!((a[i] - b[i]).norm() < 1e-10);
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let qgt = qgt_from(DMatrix::identity(2, 2), 0.0);
        let rhs = DVector::from_element(3, Cplx::new(1.0, 0.0));
        assert!(solve_regularized(&qgt, &rhs, &LinearSolver::Direct).is_err());
    }
}
