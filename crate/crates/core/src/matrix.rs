//! Dense complex matrices.
//!
//! Storage is row-major. Tensor products use big-endian flattening: in
//! `kron(a, b)` the factor `a` occupies the most significant index.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::scalar::{Complex, Real};

/// Relative tolerance used when a caller asserts a matrix is Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "MatrixJson",
    into = "MatrixJson",
    bound = "T: Real"
)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        ensure!(
            data.len() == rows * cols,
            Shape,
            "{} entries supplied for a {rows}x{cols} matrix",
            data.len()
        );
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| Complex::new(T::lit(rows[i][j]), T::zero()))
    }

    pub fn diag_real(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex::new(v, T::zero());
        }
        m
    }

    /// Matrix unit `e_ij` of size `n x n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = Complex::one();
        m
    }

    /// `|v><w|`.
    pub fn outer(v: &[Complex<T>], w: &[Complex<T>]) -> Self {
        Self::from_fn(v.len(), w.len(), |i, j| v[i] * w[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// Hilbert–Schmidt pairing `Tr(self* other)`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Kronecker product, big-endian: entry `[(i,p),(j,q)] = self[i][j] * other[p][q]`.
    pub fn kron(&self, other: &Self) -> Self {
        let (br, bc) = (other.rows, other.cols);
        let mut out = Self::zeros(self.rows * br, self.cols * bc);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for p in 0..br {
                    let dst = (i * br + p) * out.cols + j * bc;
                    for q in 0..bc {
                        out.data[dst + q] = a * other.data[p * bc + q];
                    }
                }
            }
        }
        out
    }

    /// `self^{⊗k}`; the 1x1 identity for `k = 0`.
    pub fn kron_power(&self, k: usize) -> Self {
        (0..k).fold(Self::identity(1), |acc, _| acc.kron(self))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        ensure!(
            self.cols == other.rows,
            Shape,
            "cannot multiply {}x{} by {}x{}",
            self.rows,
            self.cols,
            other.rows,
            other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let dst = i * other.cols;
            for l in 0..self.cols {
                let a = self.data[i * self.cols + l];
                if a.is_zero() {
                    continue;
                }
                let src = &other.data[l * other.cols..(l + 1) * other.cols];
                for (o, &b) in out.data[dst..dst + other.cols].iter_mut().zip(src) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        ensure!(
            v.len() == self.cols,
            Shape,
            "vector of length {} against {} columns",
            v.len(),
            self.cols
        );
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| *a * *b).sum())
            .collect())
    }

    /// `<v|self|v>`.
    pub fn quadratic_form(&self, v: &[Complex<T>]) -> Result<Complex<T>> {
        let mv = self.matvec(v)?;
        Ok(v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum())
    }

    /// `self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        Ok(&self.matmul(other)? - &other.matmul(self)?)
    }

    /// Top-left `r x c` block.
    pub fn top_left(&self, r: usize, c: usize) -> Self {
        Self::from_fn(r, c, |i, j| self[(i, j)])
    }

    pub fn block(&self, r0: usize, c0: usize, r: usize, c: usize) -> Self {
        Self::from_fn(r, c, |i, j| self[(r0 + i, c0 + j)])
    }

    /// `max |M_ij − conj(M_ji)|`.
    pub fn hermiticity_defect(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Hermitian within `HERMITIAN_TOL · (1 + max|M_ij|)`.
    pub fn is_hermitian(&self) -> bool {
        self.is_square()
            && self.hermiticity_defect() <= T::tol(HERMITIAN_TOL) * (T::one() + self.max_abs())
    }

    /// `(M + M*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * half
        })
    }

    pub fn require_hermitian(&self, what: &str) -> Result<()> {
        if !self.is_square() {
            return Err(Error::Shape(format!(
                "{what} must be square, got {}x{}",
                self.rows, self.cols
            )));
        }
        ensure!(
            self.is_hermitian(),
            Contract,
            "{what} is not Hermitian (defect {:e})",
            self.hermiticity_defect().to_f64_lossy()
        );
        Ok(())
    }

    pub fn cast<U: Real>(&self) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|z| Complex::new(U::lit(z.re.to_f64_lossy()), U::lit(z.im.to_f64_lossy())))
                .collect(),
        }
    }

    /// Positions and values of the nonzero entries.
    pub fn nonzeros(&self) -> Vec<(usize, usize, Complex<T>)> {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, z)| !z.is_zero())
            .map(|(idx, &z)| (idx / self.cols, idx % self.cols, z))
            .collect()
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = Complex<T>;

    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

fn zip_with<T: Real>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>,
) -> Matrix<T> {
    assert!(
        a.rows == b.rows && a.cols == b.cols,
        "elementwise op on {}x{} and {}x{}",
        a.rows,
        a.cols,
        b.rows,
        b.cols
    );
    Matrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(&x, &y)| f(x, y)).collect(),
    }
}

impl<T: Real> Add for &Matrix<T> {
    type Output = Matrix<T>;

    fn add(self, rhs: Self) -> Matrix<T> {
        zip_with(self, rhs, |a, b| a + b)
    }
}

impl<T: Real> Sub for &Matrix<T> {
    type Output = Matrix<T>;

    fn sub(self, rhs: Self) -> Matrix<T> {
        zip_with(self, rhs, |a, b| a - b)
    }
}

impl<T: Real> Neg for &Matrix<T> {
    type Output = Matrix<T>;

    fn neg(self) -> Matrix<T> {
        self.map(|z| -z)
    }
}

impl<T: Real> Mul for &Matrix<T> {
    type Output = Matrix<T>;

    /// Panics on a shape mismatch; use [`Matrix::matmul`] for a fallible product.
    fn mul(self, rhs: Self) -> Matrix<T> {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

/// Kronecker product (free-function form).
pub fn kron<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    a.kron(b)
}

/// Euclidean norm of a complex vector.
pub fn vec_norm<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// `v ⊗ w`, big-endian.
pub fn vec_kron<T: Real>(v: &[Complex<T>], w: &[Complex<T>]) -> Vec<Complex<T>> {
    v.iter()
        .flat_map(|&a| w.iter().map(move |&b| a * b))
        .collect()
}

/// Wire format: `{"rows": r, "cols": c, "re": [...], "im": [...]}`, row-major.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl<T: Real> From<Matrix<T>> for MatrixJson {
    fn from(m: Matrix<T>) -> Self {
        Self {
            rows: m.rows,
            cols: m.cols,
            re: m.data.iter().map(|z| z.re.to_f64_lossy()).collect(),
            im: m.data.iter().map(|z| z.im.to_f64_lossy()).collect(),
        }
    }
}

impl<T: Real> TryFrom<MatrixJson> for Matrix<T> {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Self> {
        let n = j.rows * j.cols;
        ensure!(
            j.re.len() == n && j.im.len() == n,
            Shape,
            "matrix JSON declares {}x{} but carries {} real and {} imaginary parts",
            j.rows,
            j.cols,
            j.re.len(),
            j.im.len()
        );
        let data = j
            .re
            .iter()
            .zip(&j.im)
            .map(|(&r, &i)| Complex::new(T::lit(r), T::lit(i)))
            .collect();
        Matrix::from_vec(j.rows, j.cols, data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    type M = Matrix<f64>;

    #[test]
    fn kron_of_identities_is_identity() {
        assert_eq!(M::identity(2).kron(&M::identity(3)), M::identity(6));
    }

    #[test]
    fn kron_places_matrix_units_big_endian() {
        let e11 = M::unit(2, 0, 0);
        let e22 = M::unit(2, 1, 1);
        let k = e11.kron(&e22);
        assert_eq!(k.nonzeros(), vec![(1, 1, c(1.0, 0.0))]);
    }

    #[test]
    fn kron_is_associative() {
        let a = M::from_fn(2, 3, |i, j| c(i as f64, j as f64 + 0.5));
        let b = M::from_fn(2, 2, |i, j| c((i + 2 * j) as f64, -1.0));
        let cm = M::from_fn(3, 1, |i, _| c(1.0, i as f64));
        assert_eq!(a.kron(&b).kron(&cm), a.kron(&b.kron(&cm)));
    }

    #[test]
    fn kron_matches_vector_tensor_product() {
        let a = M::from_fn(2, 2, |i, j| c(1.0 + i as f64, j as f64));
        let b = M::from_fn(3, 3, |i, j| c((i * j) as f64, 1.0));
        let v = vec![c(0.3, -1.0), c(2.0, 0.5)];
        let w = vec![c(1.0, 0.0), c(-0.5, 0.2), c(0.1, 0.1)];
        let lhs = a.kron(&b).matvec(&vec_kron(&v, &w)).unwrap();
        let rhs = vec_kron(&a.matvec(&v).unwrap(), &b.matvec(&w).unwrap());
        for (x, y) in lhs.iter().zip(&rhs) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn product_shape_mismatch_is_an_error() {
        assert!(matches!(
            M::zeros(2, 3).matmul(&M::zeros(2, 3)),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn json_round_trip_and_shape_check() {
        let m = M::from_fn(2, 3, |i, j| c(i as f64 - 0.5, j as f64 * 2.0));
        let text = serde_json::to_string(&m).unwrap();
        assert!(text.starts_with("{\"rows\":2,\"cols\":3,\"re\":"));
        let back: M = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
        let bad = r#"{"rows":2,"cols":2,"re":[1,2,3],"im":[0,0,0,0]}"#;
        assert!(serde_json::from_str::<M>(bad).is_err());
    }

    #[test]
    fn hermiticity_check_uses_relative_tolerance() {
        let mut m = M::from_real_rows(&[&[1.0, 2.0], &[2.0, 5.0]]);
        assert!(m.is_hermitian());
        m[(0, 1)] = c(2.0, 1e-6);
        assert!(!m.is_hermitian());
    }
}
