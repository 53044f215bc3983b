//! Small shared linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Eigendecomposition of a Hermitian matrix: eigenvalues ascending, columns
/// of the returned matrix are the eigenvectors.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (DVector<f64>, DMatrix<C64>) {
    let se = m.clone().symmetric_eigen();
    (se.eigenvalues, se.eigenvectors)
}

/// exp(iH) for Hermitian H, computed spectrally. Exactly unitary up to the
/// accuracy of the eigendecomposition.
pub fn unitary_exp_i(h: &DMatrix<C64>) -> DMatrix<C64> {
    let (vals, vecs) = hermitian_eigen(h);
    let phases = DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&l| C64::from_polar(1.0, l)),
    );
    &vecs * DMatrix::from_diagonal(&phases) * vecs.adjoint()
}

/// Principal square root of a Hermitian positive semidefinite matrix.
/// Eigenvalues slightly below zero (numerical noise) are clamped.
pub fn hermitian_sqrt(m: &DMatrix<C64>) -> DMatrix<C64> {
    let (vals, vecs) = hermitian_eigen(m);
    let roots = DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&l| C64::new(l.max(0.0).sqrt(), 0.0)),
    );
    &vecs * DMatrix::from_diagonal(&roots) * vecs.adjoint()
}

/// Result of an SVD-backed real least-squares solve.
#[derive(Debug)]
pub struct LeastSquares {
    /// Minimizing coefficient vector.
    pub solution: DVector<f64>,
    /// Per-coefficient standard errors from the residual variance.
    pub stderr: DVector<f64>,
    /// Euclidean norm of the residual A x - b.
    pub residual_norm: f64,
    /// Ratio of largest to smallest retained singular value.
    pub condition: f64,
}

/// Solve min ||A x - b||_2 by SVD and report conditioning diagnostics.
///
/// `condition_limit` turns near-rank-deficiency into an error naming the
/// weakest singular directions.
pub fn solve_least_squares(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    condition_limit: f64,
) -> Result<LeastSquares> {
    let (rows, cols) = a.shape();
    if rows < cols {
        return Err(Error::FitFailure(format!(
            "underdetermined system: {rows} equations for {cols} unknowns"
        )));
    }
    let svd = a.clone().svd(true, true);
    let u = svd.u.as_ref().expect("svd with u");
    let vt = svd.v_t.as_ref().expect("svd with v_t");
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition > condition_limit {
        let mut pairs: Vec<(f64, usize)> = svd
            .singular_values
            .iter()
            .copied()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let detail: Vec<String> = pairs
            .iter()
            .take(3)
            .map(|(s, i)| {
                let dir = vt.row(*i).transpose();
                let (jmax, _) = dir
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                    .expect("nonempty direction");
                format!("sigma = {s:.3e} dominated by coefficient {jmax}")
            })
            .collect();
        return Err(Error::IllConditioned {
            condition,
            limit: condition_limit,
            detail: format!("; weakest directions: {}", detail.join(", ")),
        });
    }

    // x = V S^-1 U^T b with tiny singular values zeroed
    let eps = smax * f64::EPSILON * rows.max(cols) as f64;
    let utb = u.transpose() * b;
    let mut scaled = DVector::zeros(cols);
    for i in 0..svd.singular_values.len() {
        let s = svd.singular_values[i];
        if s > eps {
            scaled[i] = utb[i] / s;
        }
    }
    let solution = vt.transpose() * &scaled;

    let residual = a * &solution - b;
    let residual_norm = residual.norm();
    let dof = (rows as isize - cols as isize).max(1) as f64;
    let sigma2 = residual_norm * residual_norm / dof;

    // covariance = sigma^2 V S^-2 V^T; only the diagonal is needed
    let mut stderr = DVector::zeros(cols);
    for j in 0..cols {
        let mut var = 0.0;
        for i in 0..svd.singular_values.len() {
            let s = svd.singular_values[i];
            if s > eps {
                let vji = vt[(i, j)];
                var += vji * vji / (s * s);
            }
        }
        stderr[j] = (sigma2 * var).sqrt();
    }

    Ok(LeastSquares {
        solution,
        stderr,
        residual_norm,
        condition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn hermitian_eigen_diagonalizes() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.0, -1.0),
                C64::new(0.0, 1.0),
                C64::new(1.0, 0.0),
            ],
        );
        let (vals, vecs) = hermitian_eigen(&m);
        let rebuilt = &vecs
            * DMatrix::from_diagonal(&vals.map(|v| C64::new(v, 0.0)))
            * vecs.adjoint();
        for (a, b) in rebuilt.iter().zip(m.iter()) {
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-12);
            assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-12);
        }
        let mut sorted: Vec<f64> = vals.iter().copied().collect();
        sorted.sort_by(f64::total_cmp);
        assert_abs_diff_eq!(sorted[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sorted[1], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn unitary_exp_is_unitary() {
        let h = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.3, 0.0),
                C64::new(0.1, 0.2),
                C64::new(0.1, -0.2),
                C64::new(-0.5, 0.0),
            ],
        );
        let u = unitary_exp_i(&h);
        let id = &u * u.adjoint();
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(id[(i, j)].re, expect, epsilon = 1e-12);
                assert_abs_diff_eq!(id[(i, j)].im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn least_squares_recovers_exact_solution() {
        let a = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, -1.0]);
        let x_true = DVector::from_column_slice(&[2.0, -3.0]);
        let b = &a * &x_true;
        let ls = solve_least_squares(&a, &b, 1e8).unwrap();
        assert_abs_diff_eq!(ls.solution[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ls.solution[1], -3.0, epsilon = 1e-12);
        assert!(ls.residual_norm < 1e-12);
        assert!(ls.condition < 3.0);
    }

    #[test]
    fn least_squares_flags_rank_deficiency() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 2.0, 2.0, 3.0, 3.0]);
        let b = DVector::from_column_slice(&[1.0, 2.0, 3.0]);
        let err = solve_least_squares(&a, &b, 1e8).unwrap_err();
        assert!(matches!(err, Error::IllConditioned { .. }));
    }
}
