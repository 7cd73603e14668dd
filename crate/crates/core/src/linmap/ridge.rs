use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lag::LagWindow;
use crate::linmap::moments::Moments;

/// Smallest accepted ratio of a squared Cholesky pivot to the largest diagonal
/// entry of the centered Gram matrix before the system is declared singular.
const PIVOT_RATIO: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RidgeConfig {
    /// Dimensionless; the penalty is `lambda · trace(G) / p`.
    pub lambda: f64,
    pub lag: LagWindow,
}

impl RidgeConfig {
    pub const DEFAULT_LAMBDA: f64 = 1e-3;

    pub fn new(lambda: f64, lag: LagWindow) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::Validation(format!("lambda must be finite and >= 0, got {lambda}")));
        }
        lag.validate()?;
        Ok(Self { lambda, lag })
    }

    pub fn backward_default() -> Self {
        Self {
            lambda: Self::DEFAULT_LAMBDA,
            lag: LagWindow::backward_default(100.0),
        }
    }

    pub fn forward_default() -> Self {
        Self {
            lambda: Self::DEFAULT_LAMBDA,
            lag: LagWindow::forward_default(100.0),
        }
    }
}

/// `Y ≈ D W + 1 biasᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeSolution {
    /// `p × q`.
    pub weights: DMatrix<f64>,
    pub bias: DVector<f64>,
}

impl RidgeSolution {
    pub fn predict(&self, design: &DMatrix<f64>) -> DMatrix<f64> {
        let mut y = design * &self.weights;
        for mut row in y.row_iter_mut() {
            row += self.bias.transpose();
        }
        y
    }
}

/// Solves the centered ridge system from accumulated moments.
pub fn solve_moments(m: &Moments, lambda: f64) -> Result<RidgeSolution> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::Validation(format!("lambda must be finite and >= 0, got {lambda}")));
    }
    let p = m.n_params();
    if m.n_rows == 0 {
        return Err(Error::Validation("ridge system has no rows".into()));
    }
    let n = m.n_rows as f64;
    let mu = &m.col_sum / n;
    let nu = &m.target_sum / n;

    let mut g = m.gram.clone();
    g.ger(-n, &mu, &mu, 1.0);
    let mut b = m.cross.clone();
    b.ger(-n, &mu, &nu, 1.0);
    if !g.iter().chain(b.iter()).all(|v| v.is_finite()) {
        return Err(Error::Validation("non-finite values in ridge moments".into()));
    }

    let trace = g.trace();
    let max_diag = (0..p).map(|i| g[(i, i)]).fold(0.0f64, f64::max);
    if lambda > 0.0 && trace <= 0.0 {
        // Constant design: nothing to fit, the penalty pins the weights at zero.
        return Ok(RidgeSolution {
            weights: DMatrix::zeros(p, m.n_targets()),
            bias: nu,
        });
    }
    let shift = lambda * trace / p as f64;
    for i in 0..p {
        g[(i, i)] += shift;
    }
    let l = blocked_cholesky(g).ok_or_else(|| {
        Error::Singular(format!("{p}×{p} Gram matrix is not positive definite (lambda = {lambda})"))
    })?;
    let min_pivot = l.diagonal().iter().fold(f64::INFINITY, |a, &v| a.min(v * v));
    if min_pivot <= PIVOT_RATIO * (max_diag + shift) {
        return Err(Error::Singular(format!(
            "{p}×{p} Gram matrix is numerically rank deficient (lambda = {lambda})"
        )));
    }
    let mut weights = b;
    l.solve_lower_triangular_mut(&mut weights);
    l.tr_solve_lower_triangular_mut(&mut weights);
    let bias = nu - weights.transpose() * mu;
    Ok(RidgeSolution { weights, bias })
}

const CHOL_BLOCK: usize = 64;

/// Lower Cholesky factor of a symmetric positive-definite matrix, computed
/// blockwise so the trailing updates run as matrix products.
fn blocked_cholesky(mut a: DMatrix<f64>) -> Option<DMatrix<f64>> {
    let p = a.nrows();
    let mut k = 0;
    while k < p {
        let kb = CHOL_BLOCK.min(p - k);
        let l11 = a.view((k, k), (kb, kb)).into_owned().cholesky()?.unpack();
        a.view_mut((k, k), (kb, kb)).copy_from(&l11);
        let rest = p - k - kb;
        if rest > 0 {
            // L21 = A21 · L11⁻ᵀ
            let mut l21t = a.view((k + kb, k), (rest, kb)).transpose();
            if !l11.solve_lower_triangular_mut(&mut l21t) {
                return None;
            }
            let l21 = l21t.transpose();
            a.view_mut((k + kb, k), (rest, kb)).copy_from(&l21);
            a.view_mut((k + kb, k + kb), (rest, rest)).gemm(-1.0, &l21, &l21t, 1.0);
        }
        k += kb;
    }
    a.fill_upper_triangle(0.0, 1);
    Some(a)
}

/// Ridge regression of `targets` on `design` with an unpenalized intercept.
pub fn ridge_solve(design: &DMatrix<f64>, targets: &DMatrix<f64>, lambda: f64) -> Result<RidgeSolution> {
    solve_moments(&Moments::from_dense(design, targets)?, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg(n: usize, seed: u64) -> Vec<f64> {
        let mut s = seed;
        (0..n)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            })
            .collect()
    }

    #[test]
    fn planted_solution_lambda_zero() {
        let d = DMatrix::from_vec(40, 4, lcg(160, 1));
        let w0 = DMatrix::from_vec(4, 2, vec![1.0, -2.0, 0.5, 3.0, 0.0, 1.5, -1.0, 2.0]);
        let mut y = &d * &w0;
        y.column_mut(1).add_scalar_mut(7.0);
        let sol = ridge_solve(&d, &y, 0.0).unwrap();
        assert!((&sol.weights - &w0).norm() / w0.norm() < 1e-10);
        assert!((sol.bias[1] - 7.0).abs() < 1e-10);
    }

    #[test]
    fn huge_lambda_shrinks_to_mean() {
        let d = DMatrix::from_vec(30, 3, lcg(90, 2));
        let y = DMatrix::from_vec(30, 1, lcg(30, 3));
        let sol = ridge_solve(&d, &y, 1e12).unwrap();
        assert!(sol.weights.norm() < 1e-9);
        assert!((sol.bias[0] - y.mean()).abs() < 1e-9);
    }

    #[test]
    fn rank_deficient_without_penalty_is_singular() {
        let mut d = DMatrix::from_vec(20, 3, lcg(60, 4));
        let c0 = d.column(0).into_owned();
        d.set_column(2, &(c0 * 2.0));
        let y = DMatrix::from_vec(20, 1, lcg(20, 5));
        let err = ridge_solve(&d, &y, 0.0).unwrap_err();
        assert!(matches!(err, Error::Singular(_)));
        assert!(err.to_string().contains("lambda > 0"));
        assert!(ridge_solve(&d, &y, 1e-3).is_ok());
    }
}
