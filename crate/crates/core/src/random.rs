//! Seeded sampling: complex Gaussians, unit vectors and Haar unitaries.
//!
//! Every randomized routine takes a [`Seed`]. Trial `i` draws from ChaCha
//! stream `i` of that seed, so loops over trials give identical results in any
//! order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::linalg::householder_qr;
use crate::matrix::Matrix;
use crate::scalar::{Complex, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl Seed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Independent stream for trial `index`.
    pub fn trial(self, index: u64) -> ChaCha8Rng {
        let mut rng = self.rng();
        rng.set_stream(index);
        rng
    }

    /// A child seed, for handing a whole sub-computation its own family of streams.
    pub fn derive(self, index: u64) -> Seed {
        Seed(self.trial(index).random())
    }
}

impl Default for Seed {
    fn default() -> Self {
        Seed(0x5EED)
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

/// Standard complex Gaussian: real and imaginary parts `N(0, 1/2)`.
pub fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Complex::new(T::lit(re * s), T::lit(im * s))
}

pub fn ginibre<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix<T> {
    Matrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub fn gaussian_vector<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex<T>> {
    (0..dim).map(|_| complex_gaussian(rng)).collect()
}

/// Uniform on the unit sphere of `C^dim`.
pub fn random_unit_vector<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex<T>> {
    loop {
        let v = gaussian_vector::<T, R>(dim, rng);
        let norm = crate::matrix::vec_norm(&v);
        if norm > T::zero() {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Haar-distributed unitary from the QR factorization of a Ginibre matrix,
/// with the phases of `diag(R)` folded into `Q`.
pub fn haar_unitary_from<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix<T> {
    let z = ginibre::<T, R>(n, n, rng);
    let (q, r) = householder_qr(&z);
    let phases: Vec<Complex<T>> = (0..n)
        .map(|j| {
            let d = r[(j, j)];
            let m = d.norm();
            if m > T::zero() {
                d / m
            } else {
                Complex::new(T::one(), T::zero())
            }
        })
        .collect();
    Matrix::from_fn(n, n, |i, j| q[(i, j)] * phases[j])
}

pub fn haar_unitary<T: Real>(n: usize, seed: Seed) -> Matrix<T> {
    haar_unitary_from(n, &mut seed.rng())
}

/// Random density matrix `G G* / Tr(G G*)` with `G` Ginibre `n x n`.
pub fn random_density<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix<T> {
    let g = ginibre::<T, R>(n, n, rng);
    let rho = &g * &g.adjoint();
    let tr = rho.trace().re;
    rho.scale_real(T::one() / tr).hermitian_part()
}

/// Random Hermitian matrix `(G + G*) / 2`.
pub fn random_hermitian<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix<T> {
    ginibre::<T, R>(n, n, rng).hermitian_part()
}
