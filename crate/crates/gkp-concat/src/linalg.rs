//! Small dense helpers shared by the code builder and the decoders.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

const CONDITION_LIMIT: f64 = 1e6;

/// Numerical rank of `a` from the spectrum of `a aᵀ`.
pub fn row_rank(a: &DMatrix<f64>) -> usize {
    if a.nrows() == 0 {
        return 0;
    }
    let eig = SymmetricEigen::new(a * a.transpose());
    let max = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    let tol = max.max(1.0) * 1e-12;
    eig.eigenvalues.iter().filter(|&&l| l > tol).count()
}

/// `(a aᵀ)⁻¹`, refusing rank-deficient or badly conditioned inputs.
pub fn gram_inverse(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let rows = a.nrows();
    if rows == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let gram = a * a.transpose();
    let eig = SymmetricEigen::new(gram.clone());
    let max = eig.eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
    let min = eig.eigenvalues.iter().cloned().fold(f64::MAX, f64::min);
    let tol = max.max(1.0) * 1e-12;
    if min <= tol {
        let rank = eig.eigenvalues.iter().filter(|&&l| l > tol).count();
        return Err(Error::RankDeficient { rank, rows });
    }
    let cond = max / min;
    if cond > CONDITION_LIMIT {
        return Err(Error::IllConditioned(cond));
    }
    gram.cholesky()
        .map(|c| c.inverse())
        .ok_or(Error::RankDeficient { rank: rows - 1, rows })
}

/// Row-major dense matrix used on the sampling hot path.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl FlatMatrix {
    pub fn from_dmatrix(m: &DMatrix<f64>) -> Self {
        let (rows, cols) = m.shape();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(m[(i, j)]);
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn mul_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (o, row) in out.iter_mut().zip(self.data.chunks_exact(self.cols)) {
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}
