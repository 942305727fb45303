//! Least-squares affine map `y ≈ A·x + b` between embedding spaces.
//!
//! The intercept is handled by centering: with `Xc`, `Yc` the centered fit
//! sets, `A = Ycᵀ·Xc·G⁺` where `G = Xcᵀ·Xc`, and `b = ȳ − A·x̄`. `G⁺` is the
//! inverse when `G` is well conditioned and the eigen pseudo-inverse
//! otherwise, which yields the minimum-norm solution.
//!
//! The prediction for a query `x` is also a weighted sum of the fit targets,
//! `ŷ = Σ_o h_o·y_o` with `h_o = 1/n + (x_o − x̄)ᵀ·G⁺·(x − x̄)`; the weights
//! sum to one and do not depend on `y`, which lets a plan replay the map on
//! any matrix bound to the same vocabulary.

use nalgebra::{DMatrix, DVector};

use super::TransferError;

const RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct LinearFit {
    /// d_out × d_in.
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    /// Fewer samples than parameters, or collinear inputs.
    pub rank_deficient: bool,
    mean_x: DVector<f64>,
    /// `Xc·G⁺`, n × d_in.
    leverage: DMatrix<f64>,
}

fn to_matrix(rows: &[&[f64]], dim: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), dim, |i, j| rows[i][j])
}

fn column_mean(m: &DMatrix<f64>) -> DVector<f64> {
    let n = m.nrows() as f64;
    DVector::from_fn(m.ncols(), |j, _| m.column(j).sum() / n)
}

fn pseudo_inverse_spd(g: &DMatrix<f64>) -> (DMatrix<f64>, bool) {
    let eig = g.clone().symmetric_eigen();
    let max = eig.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    let cutoff = max * RANK_TOL * g.nrows() as f64;
    let deficient = max == 0.0 || eig.eigenvalues.iter().any(|&l| l <= cutoff);
    if !deficient {
        if let Some(inv) = g.clone().lu().try_inverse() {
            return (inv, false);
        }
    }
    let inv_vals = eig.eigenvalues.map(|l| if l > cutoff { 1.0 / l } else { 0.0 });
    let pinv = &eig.eigenvectors * DMatrix::from_diagonal(&inv_vals) * eig.eigenvectors.transpose();
    (pinv, true)
}

impl LinearFit {
    /// Fits on paired rows. `xs` and `ys` must be non-empty and equally long.
    pub fn fit(xs: &[&[f64]], ys: &[&[f64]]) -> Result<Self, TransferError> {
        if xs.is_empty() {
            return Err(TransferError::NoOverlap);
        }
        if xs.len() != ys.len() {
            return Err(TransferError::DimensionMismatch {
                what: "linear fit samples",
                expected: xs.len(),
                found: ys.len(),
            });
        }
        let d_in = xs[0].len();
        let d_out = ys[0].len();
        let x = to_matrix(xs, d_in);
        let y = to_matrix(ys, d_out);
        let mean_x = column_mean(&x);
        let mean_y = column_mean(&y);
        let xc = DMatrix::from_fn(x.nrows(), d_in, |i, j| x[(i, j)] - mean_x[j]);
        let yc = DMatrix::from_fn(y.nrows(), d_out, |i, j| y[(i, j)] - mean_y[j]);

        let g = xc.transpose() * &xc;
        let (g_pinv, deficient) = pseudo_inverse_spd(&g);
        let leverage = &xc * g_pinv;
        let a = yc.transpose() * &leverage;
        let b = &mean_y - &a * &mean_x;
        Ok(Self {
            a,
            b,
            rank_deficient: deficient || xs.len() < d_in + 1,
            mean_x,
            leverage,
        })
    }

    pub fn predict(&self, x: &[f64]) -> Vec<f64> {
        let x = DVector::from_column_slice(x);
        (&self.a * x + &self.b).iter().copied().collect()
    }

    /// Weights `h_o` over the fit samples reproducing `predict(x)`.
    pub fn sample_weights(&self, x: &[f64]) -> Vec<f64> {
        let n = self.leverage.nrows() as f64;
        let dx = DVector::from_column_slice(x) - &self.mean_x;
        (&self.leverage * dx).iter().map(|v| 1.0 / n + v).collect()
    }

    /// Σ ‖A·x + b − y‖² over the given pairs.
    pub fn residual(a: &DMatrix<f64>, b: &DVector<f64>, xs: &[&[f64]], ys: &[&[f64]]) -> f64 {
        xs.iter()
            .zip(ys)
            .map(|(x, y)| {
                let pred = a * DVector::from_column_slice(x) + b;
                pred.iter().zip(y.iter()).map(|(p, t)| (p - t).powi(2)).sum::<f64>()
            })
            .sum()
    }
}
