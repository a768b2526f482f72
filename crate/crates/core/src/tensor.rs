//! Tensor-leg bookkeeping on `(C^n)^{⊗k}` and partial transposition.

use crate::error::{ensure, Result};
use crate::matrix::Matrix;
use crate::scalar::Real;

/// `k` legs of dimension `n`. Leg 0 is the most significant digit of the flat index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TensorShape {
    legs: usize,
    leg_dim: usize,
}

impl TensorShape {
    pub fn new(legs: usize, leg_dim: usize) -> Self {
        Self { legs, leg_dim }
    }

    pub fn legs(&self) -> usize {
        self.legs
    }

    pub fn leg_dim(&self) -> usize {
        self.leg_dim
    }

    pub fn total(&self) -> usize {
        self.leg_dim.pow(self.legs as u32)
    }

    /// Place value of a leg in the flat index.
    pub fn stride(&self, leg: usize) -> usize {
        self.leg_dim.pow((self.legs - 1 - leg) as u32)
    }

    pub fn flatten(&self, multi: &[usize]) -> usize {
        debug_assert_eq!(multi.len(), self.legs);
        multi.iter().fold(0, |acc, &d| acc * self.leg_dim + d)
    }

    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.legs];
        for slot in out.iter_mut().rev() {
            *slot = flat % self.leg_dim;
            flat /= self.leg_dim;
        }
        out
    }

    pub fn digit(&self, flat: usize, leg: usize) -> usize {
        (flat / self.stride(leg)) % self.leg_dim
    }
}

/// Transposes the listed legs (0-based): the entry at row multi-index `r` and
/// column multi-index `c` moves to the position with `r_j` and `c_j` exchanged
/// for every `j` in `legs`.
pub fn partial_transpose<T: Real>(m: &Matrix<T>, shape: TensorShape, legs: &[usize]) -> Result<Matrix<T>> {
    let dim = shape.total();
    ensure!(
        m.rows() == dim && m.cols() == dim,
        Shape,
        "matrix is {}x{} but the tensor shape has total dimension {dim}",
        m.rows(),
        m.cols()
    );
    ensure!(
        legs.iter().all(|&l| l < shape.legs()),
        Shape,
        "leg set {legs:?} out of range for {} legs",
        shape.legs()
    );
    let strides: Vec<usize> = legs.iter().map(|&l| shape.stride(l)).collect();
    let n = shape.leg_dim();
    let mut out = Matrix::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            let (mut r2, mut c2) = (r, c);
            for &s in &strides {
                let dr = (r / s) % n;
                let dc = (c / s) % n;
                r2 = r2 - dr * s + dc * s;
                c2 = c2 - dc * s + dr * s;
            }
            out[(r2, c2)] = m[(r, c)];
        }
    }
    Ok(out)
}
