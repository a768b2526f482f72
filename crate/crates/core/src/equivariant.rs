//! `(a,b)`-unitarily equivariant maps `M_n → M_n^{⊗a} ⊗ M_n^{⊗b}`.
//!
//! Their Choi matrices, on `k + 1 = a + b + 1` legs (input leg first), are
//! exactly the span of
//!
//! ```text
//! C_π = (θ^{⊗(a+1)} ⊗ id^{⊗b}) [σ_{k+1}(π)],   π ∈ S_{k+1},
//! ```
//!
//! the partial transpose of the slot permutation on legs `0..=a`. These are
//! the matrices commuting with `Ū^{⊗(a+1)} ⊗ U^{⊗b}` for every unitary `U`.
//!
//! Maps realised by the basis elements (legs: input, then output legs; `B` is
//! the unnormalized Bell projector on the two output legs):
//!
//! | signature | π       | `Φ_π(X)`            |
//! |-----------|---------|---------------------|
//! | (0,1)     | `()`    | `Tr(X)·1`           |
//! | (0,1)     | `(1 2)` | `X`                 |
//! | (1,0)     | `()`    | `Tr(X)·1`           |
//! | (1,0)     | `(1 2)` | `Xᵗ`                |
//! | (1,1)     | `()`    | `Tr(X)·1⊗1`         |
//! | (1,1)     | `(1 2)` | `Xᵗ ⊗ 1`            |
//! | (1,1)     | `(1 3)` | `1 ⊗ X`             |
//! | (1,1)     | `(2 3)` | `Tr(X)·B`           |
//! | (1,1)     | `(1 2 3)` | `B·(1 ⊗ X)`       |
//! | (1,1)     | `(1 3 2)` | `(1 ⊗ X)·B`       |
//!
//! The table is checked by brute force on matrix units in the tests below.

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::choi::{Equivariance, LinearMap};
use crate::error::{ensure, Error, Result};
use crate::linalg::{hermitian_eig, matrix_rank};
use crate::matrix::Matrix;
use crate::perm::{enumerate_sym, lex_rank, sigma_rep, GramMatrix, Permutation, MAX_TENSOR_DIM};
use crate::random::{ginibre, haar_unitary_from, Seed};
use crate::scalar::{Complex, Real};
use crate::tensor::{partial_transpose, TensorShape};

/// Singular values of the Gram matrix below this fraction of the largest are dropped.
pub const PINV_CUTOFF: f64 = 1e-10;
/// Relative rank tolerance for the rank-profile equivariance test.
pub const RANK_TOL: f64 = 1e-8;
const HERMITIAN_COEFF_TOL: f64 = 1e-12;

/// `(n, a, b)` and coefficients `f(π)` for every `π ∈ S_{a+b+1}`, indexed in
/// lexicographic order of image arrays.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivariantSpec<T> {
    pub n: usize,
    pub a: usize,
    pub b: usize,
    coeffs: Vec<Complex<T>>,
}

fn factorial(k: usize) -> usize {
    (1..=k).product()
}

fn check_signature(n: usize, a: usize, b: usize) -> Result<()> {
    ensure!(n >= 1, Parameter, "leg dimension must be positive");
    let legs = a + b + 1;
    ensure!(
        legs <= crate::perm::MAX_DEGREE,
        Capacity,
        "a + b + 1 = {legs} exceeds the supported degree {}",
        crate::perm::MAX_DEGREE
    );
    let dim = n.checked_pow(legs as u32).unwrap_or(usize::MAX);
    ensure!(
        dim <= MAX_TENSOR_DIM,
        Capacity,
        "Choi dimension {n}^{legs} = {dim} exceeds {MAX_TENSOR_DIM}"
    );
    Ok(())
}

impl<T: Real> EquivariantSpec<T> {
    pub fn zeros(n: usize, a: usize, b: usize) -> Result<Self> {
        check_signature(n, a, b)?;
        Ok(Self {
            n,
            a,
            b,
            coeffs: vec![Complex::zero(); factorial(a + b + 1)],
        })
    }

    /// Coefficients listed per permutation; anything omitted is zero.
    pub fn from_pairs(n: usize, a: usize, b: usize, pairs: &[(Permutation, Complex<T>)]) -> Result<Self> {
        let mut spec = Self::zeros(n, a, b)?;
        for (pi, v) in pairs {
            spec.set(pi, *v)?;
        }
        Ok(spec)
    }

    pub fn from_vec(n: usize, a: usize, b: usize, coeffs: Vec<Complex<T>>) -> Result<Self> {
        let mut spec = Self::zeros(n, a, b)?;
        ensure!(
            coeffs.len() == spec.coeffs.len(),
            Shape,
            "{} coefficients supplied for S_{} of order {}",
            coeffs.len(),
            a + b + 1,
            spec.coeffs.len()
        );
        spec.coeffs = coeffs;
        Ok(spec)
    }

    pub fn k(&self) -> usize {
        self.a + self.b
    }

    pub fn degree(&self) -> usize {
        self.a + self.b + 1
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn get(&self, pi: &Permutation) -> Complex<T> {
        self.coeffs[lex_rank(pi)]
    }

    pub fn set(&mut self, pi: &Permutation, v: Complex<T>) -> Result<()> {
        ensure!(
            pi.degree() == self.degree(),
            Shape,
            "permutation {pi} has degree {}, signature needs {}",
            pi.degree(),
            self.degree()
        );
        self.coeffs[lex_rank(pi)] = v;
        Ok(())
    }

    /// `f(π⁻¹) = conj(f(π))` within tolerance; this makes the Choi matrix Hermitian.
    pub fn check_hermitian_pairing(&self) -> Result<()> {
        let perms = enumerate_sym(self.degree())?;
        let scale = self.coeffs.iter().map(|z| z.norm()).fold(T::one(), T::max);
        for (i, pi) in perms.iter().enumerate() {
            let j = lex_rank(&pi.inverse());
            let defect = (self.coeffs[j] - self.coeffs[i].conj()).norm();
            ensure!(
                defect <= T::tol(HERMITIAN_COEFF_TOL) * scale,
                Contract,
                "coefficients violate f(π⁻¹) = conj(f(π)) at π = {pi} (defect {:e})",
                defect.to_f64_lossy()
            );
        }
        Ok(())
    }

    /// Nonzero coefficients with their permutations.
    pub fn terms(&self) -> Vec<(Permutation, Complex<T>)> {
        enumerate_sym(self.degree())
            .expect("degree validated at construction")
            .into_iter()
            .zip(self.coeffs.iter().copied())
            .filter(|(_, v)| !v.is_zero())
            .collect()
    }
}

/// `C_π`: the slot permutation `σ(π)` on `a + b + 1` legs, transposed on legs `0..=a`.
pub fn choi_basis_element<T: Real>(n: usize, a: usize, b: usize, pi: &Permutation) -> Result<Matrix<T>> {
    check_signature(n, a, b)?;
    ensure!(
        pi.degree() == a + b + 1,
        Shape,
        "permutation {pi} has degree {}, signature ({a},{b}) needs {}",
        pi.degree(),
        a + b + 1
    );
    let legs: Vec<usize> = (0..=a).collect();
    partial_transpose(&sigma_rep(pi, n)?, TensorShape::new(a + b + 1, n), &legs)
}

/// Positions of the ones in `C_π`.
fn basis_support(n: usize, a: usize, b: usize, pi: &Permutation) -> Vec<(usize, usize)> {
    let shape = TensorShape::new(a + b + 1, n);
    let dim = shape.total();
    let mut out = Vec::with_capacity(dim);
    let mut image = vec![0; a + b + 1];
    for col in 0..dim {
        let input = shape.unflatten(col);
        for (j, &d) in input.iter().enumerate() {
            image[pi.apply(j)] = d;
        }
        let mut r = image.clone();
        let mut c = input;
        for leg in 0..=a {
            std::mem::swap(&mut r[leg], &mut c[leg]);
        }
        out.push((shape.flatten(&r), shape.flatten(&c)));
    }
    out
}

/// `Σ_π f(π) C_π` as a map `M_n → M_{n^{a+b}}`.
pub fn build_equivariant<T: Real>(spec: &EquivariantSpec<T>) -> Result<LinearMap<T>> {
    spec.check_hermitian_pairing()?;
    let (n, a, b) = (spec.n, spec.a, spec.b);
    let dim = n.pow(spec.degree() as u32);
    let mut choi = Matrix::zeros(dim, dim);
    for (pi, v) in spec.terms() {
        for (r, c) in basis_support(n, a, b, &pi) {
            choi[(r, c)] += v;
        }
    }
    let label = format!("equivariant(n={n},a={a},b={b})");
    Ok(LinearMap::from_choi(n, n.pow(spec.k() as u32), choi, label)?.with_equivariance(Equivariance::Ab { a, b }))
}

#[derive(Clone, Debug)]
pub struct Decomposition<T> {
    pub spec: EquivariantSpec<T>,
    /// `‖C − Σ f(π) C_π‖_F`.
    pub residual: T,
    /// Numerical rank of the Gram matrix; below `(k+1)!` the coefficients are
    /// the minimum-norm solution.
    pub gram_rank: usize,
}

/// Least-squares coefficients of `c` in the basis `{C_π}`, from the Gram
/// system `G f = t`, `t[π] = Tr(C_π* C)`, via a truncated eigen-pseudo-inverse.
pub fn decompose_equivariant<T: Real>(c: &Matrix<T>, n: usize, a: usize, b: usize) -> Result<Decomposition<T>> {
    check_signature(n, a, b)?;
    let degree = a + b + 1;
    let dim = n.pow(degree as u32);
    ensure!(
        c.rows() == dim && c.cols() == dim,
        Shape,
        "matrix is {}x{}, signature ({a},{b}) at n = {n} needs {dim}x{dim}",
        c.rows(),
        c.cols()
    );
    let gram = GramMatrix::new(degree, n)?;
    let supports: Vec<Vec<(usize, usize)>> = gram.perms().iter().map(|pi| basis_support(n, a, b, pi)).collect();
    let rhs: Vec<Complex<T>> = supports
        .iter()
        .map(|s| s.iter().map(|&(r, col)| c[(r, col)]).sum())
        .collect();

    let eig = hermitian_eig(&gram.to_matrix::<T>())?;
    let cutoff = T::tol(PINV_CUTOFF) * eig.max().abs();
    let size = gram.size();
    let mut coeffs = vec![Complex::<T>::zero(); size];
    let mut gram_rank = 0;
    for (idx, &lam) in eig.values.iter().enumerate() {
        if lam <= cutoff {
            continue;
        }
        gram_rank += 1;
        let v = eig.vectors.column(idx);
        let proj: Complex<T> = v.iter().zip(&rhs).map(|(x, y)| x.conj() * y).sum();
        let w = proj / lam;
        for (slot, x) in coeffs.iter_mut().zip(&v) {
            *slot += *x * w;
        }
    }

    let mut recon = Matrix::zeros(dim, dim);
    for (s, &f) in supports.iter().zip(&coeffs) {
        for &(r, col) in s {
            recon[(r, col)] += f;
        }
    }
    let residual = (c - &recon).frobenius_norm();
    Ok(Decomposition {
        spec: EquivariantSpec::from_vec(n, a, b, coeffs)?,
        residual,
        gram_rank,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivarianceReport {
    pub trials: usize,
    #[serde(rename = "maxRelCommutatorNorm")]
    pub max_rel_commutator_norm: f64,
    pub verdict: Verdict,
    pub tolerance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl EquivarianceReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// `Ū^{⊗(a+1)} ⊗ U^{⊗b}`.
pub fn commutant_unitary<T: Real>(u: &Matrix<T>, a: usize, b: usize) -> Matrix<T> {
    u.conj().kron_power(a + 1).kron(&u.kron_power(b))
}

/// `‖[C, V]‖_F` using only the nonzero entries of `C`.
fn commutator_norm<T: Real>(nonzeros: &[(usize, usize, Complex<T>)], v: &Matrix<T>) -> T {
    let dim = v.rows();
    let mut comm = Matrix::<T>::zeros(dim, dim);
    for &(r, j, cv) in nonzeros {
        // (C V)[r][:] += C[r][j] · V[j][:]
        for (col, &vv) in v.row(j).iter().enumerate() {
            comm[(r, col)] += cv * vv;
        }
        // (V C)[:][j] += V[:][r] · C[r][j]
        for row in 0..dim {
            comm[(row, j)] -= v[(row, r)] * cv;
        }
    }
    comm.frobenius_norm()
}

/// Max over Haar samples of `‖[C, Ū^{⊗(a+1)} ⊗ U^{⊗b}]‖_F / max(1, ‖C‖_F)`.
pub fn check_ab_equivariance<T: Real>(
    c: &Matrix<T>,
    n: usize,
    a: usize,
    b: usize,
    trials: usize,
    seed: Seed,
    tol: f64,
) -> Result<EquivarianceReport> {
    ensure!(trials >= 1, Parameter, "at least one trial is required");
    let dim = n.pow((a + b + 1) as u32);
    ensure!(
        c.rows() == dim && c.cols() == dim,
        Shape,
        "matrix is {}x{}, signature ({a},{b}) at n = {n} needs {dim}x{dim}",
        c.rows(),
        c.cols()
    );
    let nonzeros = c.nonzeros();
    let denom = T::one().max(c.frobenius_norm());
    let mut worst = T::zero();
    for trial in 0..trials {
        let u = haar_unitary_from::<T, _>(n, &mut seed.trial(trial as u64));
        let v = commutant_unitary(&u, a, b);
        worst = worst.max(commutator_norm(&nonzeros, &v) / denom);
    }
    let worst = worst.to_f64_lossy();
    Ok(EquivarianceReport {
        trials,
        max_rel_commutator_norm: worst,
        verdict: if worst <= tol { Verdict::Pass } else { Verdict::Fail },
        tolerance: tol,
    })
}

/// A unitary `U` and input `X` with `rank Φ(UXU*) ≠ rank Φ(X)`, which rules out
/// `Φ(UXU*) = V Φ(X) V*` for any `V`.
#[derive(Clone, Debug)]
pub struct RankWitness<T> {
    pub u: Matrix<T>,
    pub x: Matrix<T>,
    pub rank_rotated: usize,
    pub rank_plain: usize,
}

fn rank_mismatch<T: Real, F>(f: &F, u: &Matrix<T>, x: &Matrix<T>) -> Option<RankWitness<T>>
where
    F: Fn(&Matrix<T>) -> Matrix<T>,
{
    let rotated = &(u * x) * &u.adjoint();
    let tol = T::tol(RANK_TOL);
    let rank_rotated = matrix_rank(&f(&rotated), tol);
    let rank_plain = matrix_rank(&f(x), tol);
    (rank_rotated != rank_plain).then(|| RankWitness {
        u: u.clone(),
        x: x.clone(),
        rank_rotated,
        rank_plain,
    })
}

/// Searches for a rank-profile violation: first over `candidates`, then over
/// `trials` random pairs (Haar `U`, random low-rank `X`). `None` only means
/// nothing was found.
pub fn find_equivariance_violation<T, F>(
    f: F,
    n: usize,
    candidates: &[(Matrix<T>, Matrix<T>)],
    trials: usize,
    seed: Seed,
) -> Option<RankWitness<T>>
where
    T: Real,
    F: Fn(&Matrix<T>) -> Matrix<T>,
{
    for (u, x) in candidates {
        if let Some(w) = rank_mismatch(&f, u, x) {
            return Some(w);
        }
    }
    for trial in 0..trials {
        let mut rng = seed.trial(trial as u64);
        let u = haar_unitary_from::<T, _>(n, &mut rng);
        let rank = rng.random_range(1..=n);
        let left = ginibre::<T, _>(n, rank, &mut rng);
        let x = if trial % 2 == 0 {
            &left * &left.adjoint()
        } else {
            &left * &ginibre::<T, _>(rank, n, &mut rng)
        };
        if let Some(w) = rank_mismatch(&f, &u, &x) {
            return Some(w);
        }
    }
    None
}

/// Wire format for coefficient files.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoeffJson {
    pub n: usize,
    pub a: usize,
    pub b: usize,
    pub coeffs: Vec<CoeffEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoeffEntry {
    pub perm: String,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl<T: Real> TryFrom<CoeffJson> for EquivariantSpec<T> {
    type Error = Error;

    fn try_from(j: CoeffJson) -> Result<Self> {
        let mut spec = Self::zeros(j.n, j.a, j.b)?;
        let degree = spec.degree();
        for entry in &j.coeffs {
            let pi = Permutation::parse_cycles(&entry.perm, degree)?;
            let v = spec.get(&pi) + Complex::new(T::lit(entry.re), T::lit(entry.im));
            spec.set(&pi, v)?;
        }
        Ok(spec)
    }
}

impl<T: Real> From<&EquivariantSpec<T>> for CoeffJson {
    fn from(spec: &EquivariantSpec<T>) -> Self {
        Self {
            n: spec.n,
            a: spec.a,
            b: spec.b,
            coeffs: spec
                .terms()
                .into_iter()
                .map(|(pi, v)| CoeffEntry {
                    perm: pi.to_string(),
                    re: v.re.to_f64_lossy(),
                    im: v.im.to_f64_lossy(),
                })
                .collect(),
        }
    }
}

/// `δ_π` as a spec.
pub fn basis_spec<T: Real>(n: usize, a: usize, b: usize, pi: &Permutation) -> Result<EquivariantSpec<T>> {
    EquivariantSpec::from_pairs(n, a, b, &[(pi.clone(), Complex::one())])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choi::{bell_matrix, choi_of_map};
    use crate::random::{complex_gaussian, haar_unitary};
    use crate::scalar::c;

    type M = Matrix<f64>;

    fn p(s: &str, k: usize) -> Permutation {
        Permutation::parse_cycles(s, k).unwrap()
    }

    fn basis_map(n: usize, a: usize, b: usize, pi: &Permutation) -> LinearMap<f64> {
        build_equivariant(&basis_spec(n, a, b, pi).unwrap()).unwrap()
    }

    /// `Σ X_ij · block(i,j)` on the raw Choi matrix, which need not be Hermitian.
    fn apply_raw(cm: &M, n: usize, x: &M) -> M {
        let big = cm.rows() / n;
        let mut out = M::zeros(big, big);
        for i in 0..n {
            for j in 0..n {
                out = &out + &cm.block(i * big, j * big, big, big).scale(x[(i, j)]);
            }
        }
        out
    }

    fn assert_basis_map(n: usize, a: usize, b: usize, pi: &str, f: impl Fn(&M) -> M) {
        let cm: M = choi_basis_element(n, a, b, &p(pi, a + b + 1)).unwrap();
        for i in 0..n {
            for j in 0..n {
                let e = M::unit(n, i, j);
                let diff = (&apply_raw(&cm, n, &e) - &f(&e)).frobenius_norm();
                assert!(diff < 1e-12, "({a},{b}) {pi}: mismatch on e_{i}{j}");
            }
        }
    }

    #[test]
    fn basis_element_small_cases() {
        assert_eq!(choi_basis_element::<f64>(3, 0, 0, &p("()", 1)).unwrap(), M::identity(3));
        assert_eq!(choi_basis_element::<f64>(2, 1, 0, &p("()", 2)).unwrap(), M::identity(4));
        let swap = sigma_rep::<f64>(&p("(1 2)", 2), 2).unwrap();
        assert_eq!(choi_basis_element::<f64>(2, 1, 0, &p("(1 2)", 2)).unwrap(), swap);
        assert!(choi_basis_element::<f64>(2, 1, 1, &p("(1 2)", 2)).is_err());
    }

    #[test]
    fn support_matches_partial_transpose() {
        for (a, b) in [(0, 1), (1, 0), (1, 1), (2, 0), (0, 2), (2, 1)] {
            for pi in enumerate_sym(a + b + 1).unwrap() {
                let dense: M = choi_basis_element(2, a, b, &pi).unwrap();
                let mut from_support = M::zeros(dense.rows(), dense.cols());
                for (r, col) in basis_support(2, a, b, &pi) {
                    from_support[(r, col)] += c(1.0, 0.0);
                }
                assert_eq!(dense, from_support, "({a},{b}) {pi}");
            }
        }
    }

    #[test]
    fn basis_map_table() {
        let n = 3;
        let tr_id = |x: &M| M::identity(n).scale(x.trace());
        assert_basis_map(n, 0, 1, "()", tr_id);
        assert_basis_map(n, 0, 1, "(1 2)", |x| x.clone());
        assert_basis_map(n, 1, 0, "()", tr_id);
        assert_basis_map(n, 1, 0, "(1 2)", |x| x.transpose());

        let one = M::identity(n);
        let bell = bell_matrix::<f64>(n);
        assert_basis_map(n, 1, 1, "()", |x| M::identity(n * n).scale(x.trace()));
        assert_basis_map(n, 1, 1, "(1 2)", |x| x.transpose().kron(&one));
        assert_basis_map(n, 1, 1, "(1 3)", |x| one.kron(x));
        assert_basis_map(n, 1, 1, "(2 3)", |x| bell.scale(x.trace()));
        assert_basis_map(n, 1, 1, "(1 2 3)", |x| &bell * &one.kron(x));
        assert_basis_map(n, 1, 1, "(1 3 2)", |x| &one.kron(x) * &bell);
    }

    #[test]
    fn hermitian_basis_maps_apply_through_linear_map() {
        let phi = basis_map(3, 1, 1, &p("(2 3)", 3));
        let x = M::unit(3, 0, 0);
        let want = bell_matrix::<f64>(3);
        assert!((&phi.apply(&x).unwrap() - &want).frobenius_norm() < 1e-12);
    }

    #[test]
    fn identity_map_is_the_transposition_element() {
        let phi = basis_map(3, 0, 1, &p("(1 2)", 2));
        assert_eq!(phi.choi(), &bell_matrix::<f64>(3));
        assert_eq!(phi.equivariance(), Equivariance::Ab { a: 0, b: 1 });
    }

    #[test]
    fn zero_coefficients_give_zero_map() {
        let phi = build_equivariant(&EquivariantSpec::<f64>::zeros(2, 1, 1).unwrap()).unwrap();
        assert_eq!(phi.choi().frobenius_norm(), 0.0);
        assert_eq!(phi.out_dim(), 4);
    }

    #[test]
    fn non_hermitian_coefficients_are_rejected() {
        let spec = EquivariantSpec::<f64>::from_pairs(3, 1, 1, &[(p("(1 2 3)", 3), c(1.0, 0.0))]).unwrap();
        assert!(matches!(build_equivariant(&spec), Err(Error::Contract(_))));
        let spec = EquivariantSpec::<f64>::from_pairs(3, 0, 1, &[(p("()", 2), c(0.0, 1.0))]).unwrap();
        assert!(matches!(build_equivariant(&spec), Err(Error::Contract(_))));
    }

    #[test]
    fn collins_family_coefficients() {
        // A ↦ Aᵗ⊗1 + 1⊗A + Tr(A)(α 1 + β B)
        let (n, alpha, beta) = (3, 2.0, -1.0);
        let one = M::identity(n);
        let bell = bell_matrix::<f64>(n);
        let f = |x: &M| {
            let tail = &M::identity(n * n).scale_real(alpha) + &bell.scale_real(beta);
            &(&x.transpose().kron(&one) + &one.kron(x)) + &tail.scale(x.trace())
        };
        let direct = choi_of_map(f, n, n * n, "collins").unwrap();
        let spec = EquivariantSpec::from_pairs(
            n,
            1,
            1,
            &[
                (p("(1 2)", 3), c(1.0, 0.0)),
                (p("(1 3)", 3), c(1.0, 0.0)),
                (p("()", 3), c(alpha, 0.0)),
                (p("(2 3)", 3), c(beta, 0.0)),
            ],
        )
        .unwrap();
        let built = build_equivariant(&spec).unwrap();
        assert!((&(built.choi().clone()) - direct.choi()).frobenius_norm() < 1e-12);

        let dec = decompose_equivariant(direct.choi(), n, 1, 1).unwrap();
        assert!(dec.residual < 1e-9);
        for (pi, v) in [("()", alpha), ("(2 3)", beta), ("(1 2)", 1.0), ("(1 3)", 1.0), ("(1 2 3)", 0.0), ("(1 3 2)", 0.0)] {
            assert!((dec.spec.get(&p(pi, 3)) - c(v, 0.0)).norm() < 1e-9, "{pi}");
        }
    }

    #[test]
    fn basis_elements_decompose_to_deltas() {
        for (n, a, b) in [(2, 0, 1), (3, 1, 1), (3, 2, 0), (4, 0, 3)] {
            for pi in enumerate_sym(a + b + 1).unwrap() {
                let cm: M = choi_basis_element(n, a, b, &pi).unwrap();
                let dec = decompose_equivariant(&cm, n, a, b).unwrap();
                assert!(dec.residual < 1e-10);
                for (rho, v) in enumerate_sym(a + b + 1).unwrap().iter().zip(dec.spec.coeffs()) {
                    let expect = if *rho == pi { 1.0 } else { 0.0 };
                    assert!((v - c(expect, 0.0)).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn orthogonal_perturbation_shows_in_residual() {
        // Gram–Schmidt a random Hermitian matrix against the basis span; a
        // unit-norm component outside the span must survive as residual.
        let (n, a, b) = (2, 1, 1);
        let mut rng = Seed(21).rng();
        let basis: Vec<M> = enumerate_sym(3)
            .unwrap()
            .iter()
            .map(|pi| choi_basis_element(n, a, b, pi).unwrap())
            .collect();
        let mut ortho: Vec<M> = Vec::new();
        for bm in &basis {
            let mut v = bm.clone();
            for q in &ortho {
                v = &v - &q.scale(q.inner(&v));
            }
            let nv = v.frobenius_norm();
            if nv > 1e-9 {
                ortho.push(v.scale_real(1.0 / nv));
            }
        }
        let mut pert: M = crate::random::random_hermitian(8, &mut rng);
        for q in &ortho {
            pert = &pert - &q.scale(q.inner(&pert));
        }
        let pert = pert.scale_real(1.0 / pert.frobenius_norm());
        let base = build_equivariant(
            &EquivariantSpec::from_pairs(n, a, b, &[(p("(1 2)", 3), c(1.0, 0.0)), (p("()", 3), c(0.5, 0.0))]).unwrap(),
        )
        .unwrap();
        let dec = decompose_equivariant(&(base.choi() + &pert), n, a, b).unwrap();
        assert!(dec.residual >= 0.5, "residual {}", dec.residual);
        assert!((dec.residual - 1.0).abs() < 1e-9);
    }

    #[test]
    fn equivariance_checks() {
        let cm: M = choi_basis_element(3, 1, 1, &p("(1 2 3)", 3)).unwrap();
        let r = check_ab_equivariance(&cm, 3, 1, 1, 20, Seed(1), 1e-11).unwrap();
        assert!(r.passed(), "{r:?}");

        let mut rng = Seed(2).rng();
        let random: M = crate::random::random_hermitian(27, &mut rng);
        let r = check_ab_equivariance(&random, 3, 1, 1, 20, Seed(1), 1e-8).unwrap();
        assert!(!r.passed() && r.max_rel_commutator_norm > 1e-4);
        assert!(check_ab_equivariance(&random, 2, 1, 1, 1, Seed(1), 1e-8).is_err());
    }

    #[test]
    fn decomposition_is_invariant_under_commutant_conjugation() {
        let mut rng = Seed(4).rng();
        let (n, a, b) = (3, 1, 1);
        let mut spec = EquivariantSpec::<f64>::zeros(n, a, b).unwrap();
        for pi in enumerate_sym(3).unwrap() {
            let inv = pi.inverse();
            if lex_rank(&inv) < lex_rank(&pi) {
                continue;
            }
            let v: Complex<f64> = complex_gaussian(&mut rng);
            let v = if inv == pi { c(v.re, 0.0) } else { v };
            spec.set(&pi, v).unwrap();
            spec.set(&inv, v.conj()).unwrap();
        }
        let phi = build_equivariant(&spec).unwrap();
        let u0: M = haar_unitary(n, Seed(77));
        let w = commutant_unitary(&u0, a, b);
        let rotated = &(&w * phi.choi()) * &w.adjoint();
        let dec = decompose_equivariant(&rotated, n, a, b).unwrap();
        for (x, y) in dec.spec.coeffs().iter().zip(spec.coeffs()) {
            assert!((x - y).norm() < 1e-9);
        }
    }

    #[test]
    fn coefficient_json() {
        let text = r#"{"n":3,"a":1,"b":1,"coeffs":[{"perm":"(1 2)","re":1.0,"im":0.0},{"perm":"()","re":2.5}]}"#;
        let j: CoeffJson = serde_json::from_str(text).unwrap();
        let spec = EquivariantSpec::<f64>::try_from(j).unwrap();
        assert_eq!(spec.get(&p("(1 2)", 3)), c(1.0, 0.0));
        assert_eq!(spec.get(&p("()", 3)), c(2.5, 0.0));
        assert_eq!(spec.terms().len(), 2);
        let back = CoeffJson::from(&spec);
        assert_eq!(back.coeffs.len(), 2);
    }

    #[test]
    fn rank_scan_on_conjugation_finds_nothing() {
        let w: M = haar_unitary(3, Seed(3));
        let f = |x: &M| &(&w * x) * &w.adjoint();
        assert!(find_equivariance_violation(f, 3, &[], 100, Seed(9)).is_none());
    }
}
