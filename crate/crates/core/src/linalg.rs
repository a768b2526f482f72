//! Hermitian eigendecomposition, singular values and QR.
//!
//! The eigensolver is the cyclic complex Jacobi method. Each rotation is built
//! from the phase of the pivot `a_pq` and a real 2x2 Jacobi rotation, so the
//! diagonal stays real throughout. Sweeps stop once the off-diagonal
//! Frobenius mass falls below `1e-14 · ‖M‖_F`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Complex, Real};

const OFF_DIAGONAL_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 100;

#[derive(Clone, Debug)]
pub struct HermitianEig<T> {
    /// Ascending.
    pub values: Vec<T>,
    /// Column `j` is the eigenvector for `values[j]`.
    pub vectors: Matrix<T>,
}

impl<T: Real> HermitianEig<T> {
    pub fn min(&self) -> T {
        self.values.first().copied().unwrap_or_else(T::zero)
    }

    pub fn max(&self) -> T {
        self.values.last().copied().unwrap_or_else(T::zero)
    }
}

fn off_diagonal_norm<T: Real>(a: &Matrix<T>) -> T {
    let n = a.rows();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// `M = V diag(λ) V*` with `λ` ascending. Fails with a contract error when `M`
/// is not Hermitian within the crate tolerance; otherwise `M` is symmetrized first.
pub fn hermitian_eig<T: Real>(m: &Matrix<T>) -> Result<HermitianEig<T>> {
    m.require_hermitian("eigensolver input")?;
    let n = m.rows();
    let mut a = m.hermitian_part();
    for i in 0..n {
        a[(i, i)] = Complex::new(a[(i, i)].re, T::zero());
    }
    let mut v = Matrix::<T>::identity(n);
    let threshold = T::tol(OFF_DIAGONAL_TOL) * a.frobenius_norm();

    let mut converged = off_diagonal_norm(&a) <= threshold;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::Numeric(format!(
                "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps (n = {n})"
            )));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        converged = off_diagonal_norm(&a) <= threshold;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermitianEig { values, vectors })
}

fn rotate<T: Real>(a: &mut Matrix<T>, v: &mut Matrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g == T::zero() {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Negligible pivot relative to both diagonal entries: zero it outright.
    let hundred = T::lit(100.0);
    if app.abs() + hundred * g == app.abs() && aqq.abs() + hundred * g == aqq.abs() {
        a[(p, q)] = Complex::zero();
        a[(q, p)] = Complex::zero();
        return;
    }
    let phase = apq / g;
    let theta = (aqq - app) / (g + g);
    let t = {
        let t = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
        if theta < T::zero() {
            -t
        } else {
            t
        }
    };
    let cs = T::one() / (t * t + T::one()).sqrt();
    let sn = t * cs;
    // J = [[phase·c, phase·s], [−s, c]] acting on coordinates (p, q).
    let j00 = phase * cs;
    let j01 = phase * sn;
    let j10 = Complex::new(-sn, T::zero());
    let j11 = Complex::new(cs, T::zero());
    let n = a.rows();
    for i in 0..n {
        let (x, y) = (a[(i, p)], a[(i, q)]);
        a[(i, p)] = x * j00 + y * j10;
        a[(i, q)] = x * j01 + y * j11;
        let (x, y) = (v[(i, p)], v[(i, q)]);
        v[(i, p)] = x * j00 + y * j10;
        v[(i, q)] = x * j01 + y * j11;
    }
    for i in 0..n {
        let (x, y) = (a[(p, i)], a[(q, i)]);
        a[(p, i)] = j00.conj() * x + j10.conj() * y;
        a[(q, i)] = j01.conj() * x + j11.conj() * y;
    }
    a[(p, q)] = Complex::zero();
    a[(q, p)] = Complex::zero();
    a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
    a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());
}

/// Singular values in descending order, by one-sided Jacobi on the columns.
pub fn singular_values<T: Real>(m: &Matrix<T>) -> Vec<T> {
    // Work on whichever orientation has fewer columns.
    let work = if m.cols() > m.rows() { m.adjoint() } else { m.clone() };
    let (rows, cols) = (work.rows(), work.cols());
    let mut columns: Vec<Vec<Complex<T>>> = (0..cols).map(|j| work.column(j)).collect();
    let eps = T::epsilon();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha: T = columns[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: T = columns[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex<T> = columns[p]
                    .iter()
                    .zip(&columns[q])
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let g = gamma.norm();
                if g <= eps * (alpha * beta).sqrt() || g == T::zero() {
                    continue;
                }
                rotated = true;
                // Rotate p against e^{-iφ}·q, which makes the pairing real.
                let phase_conj = (gamma / g).conj();
                let zeta = (beta - alpha) / (g + g);
                let t = {
                    let t = T::one() / (zeta.abs() + (zeta * zeta + T::one()).sqrt());
                    if zeta < T::zero() {
                        -t
                    } else {
                        t
                    }
                };
                let cs = T::one() / (t * t + T::one()).sqrt();
                let sn = cs * t;
                for i in 0..rows {
                    let x = columns[p][i];
                    let y = columns[q][i] * phase_conj;
                    columns[p][i] = x * cs - y * sn;
                    columns[q][i] = x * sn + y * cs;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<T> = columns
        .iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
    sv
}

/// Number of singular values exceeding `tol · σ_max`.
pub fn matrix_rank<T: Real>(m: &Matrix<T>, tol: T) -> usize {
    let sv = singular_values(m);
    let Some(&top) = sv.first() else { return 0 };
    if top == T::zero() {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * top).count()
}

/// Whether the Cholesky factorization of `m + shift·1` runs to completion with
/// positive pivots, i.e. `λ_min(m) > −shift` up to rounding. Only the
/// Hermitian part of `m` is read (lower triangle).
pub fn cholesky_succeeds<T: Real>(m: &Matrix<T>, shift: T) -> bool {
    let n = m.rows();
    let mut l = vec![Complex::new(T::zero(), T::zero()); n * n];
    for j in 0..n {
        let mut d = m[(j, j)].re + shift;
        for p in 0..j {
            d -= l[j * n + p].norm_sqr();
        }
        if !(d > T::zero()) {
            return false;
        }
        let d = d.sqrt();
        l[j * n + j] = Complex::new(d, T::zero());
        for i in j + 1..n {
            let mut v = m[(i, j)];
            for p in 0..j {
                v -= l[i * n + p] * l[j * n + p].conj();
            }
            l[i * n + j] = v / d;
        }
    }
    true
}

pub fn frobenius_norm<T: Real>(m: &Matrix<T>) -> T {
    m.frobenius_norm()
}

/// Householder QR of a square matrix: `m = q·r`, `q` unitary, `r` upper triangular.
pub fn householder_qr<T: Real>(m: &Matrix<T>) -> (Matrix<T>, Matrix<T>) {
    let n = m.rows();
    let mut r = m.clone();
    let mut q = Matrix::<T>::identity(n);
    for k in 0..n.saturating_sub(1) {
        let x: Vec<Complex<T>> = (k..n).map(|i| r[(i, k)]).collect();
        let norm_x = x.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if norm_x == T::zero() {
            continue;
        }
        let phase = if x[0].norm() == T::zero() {
            Complex::one()
        } else {
            x[0] / x[0].norm()
        };
        // v = x + e^{iφ}‖x‖ e_1 avoids cancellation.
        let mut v = x.clone();
        v[0] += phase * norm_x;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        let two = T::lit(2.0);
        // r ← (I − 2vv*) r on rows k..n
        for j in 0..n {
            let dot: Complex<T> = (k..n).map(|i| v[i - k].conj() * r[(i, j)]).sum();
            for i in k..n {
                r[(i, j)] -= v[i - k] * dot * two;
            }
        }
        // q ← q (I − 2vv*) on columns k..n
        for i in 0..n {
            let dot: Complex<T> = (k..n).map(|j| q[(i, j)] * v[j - k]).sum();
            for j in k..n {
                q[(i, j)] -= dot * v[j - k].conj() * two;
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            r[(i, j)] = Complex::zero();
        }
    }
    (q, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    type M = Matrix<f64>;

    fn random_hermitian(n: usize, salt: u64) -> M {
        // Deterministic pseudo-random entries without pulling in an RNG.
        let mut state = salt.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let g = M::from_fn(n, n, |_, _| c(next(), next()));
        &g + &g.adjoint()
    }

    #[test]
    fn diagonal_and_two_by_two() {
        let e = hermitian_eig(&M::diag_real(&[3.0, -1.0, 2.0])).unwrap();
        assert_eq!(e.values, vec![-1.0, 2.0, 3.0]);
        let e = hermitian_eig(&M::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn reconstruction_and_unitarity() {
        for (n, salt) in [(1, 1), (5, 2), (12, 3), (27, 4)] {
            let m = random_hermitian(n, salt);
            let e = hermitian_eig(&m).unwrap();
            let lam = M::diag_real(&e.values);
            let resid = (&(&m * &e.vectors) - &(&e.vectors * &lam)).frobenius_norm();
            assert!(resid <= 1e-10 * (1.0 + m.frobenius_norm()), "n={n} resid={resid}");
            let gram = &e.vectors.adjoint() * &e.vectors;
            assert!((&gram - &M::identity(n)).frobenius_norm() < 1e-10);
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn complex_hermitian_two_by_two() {
        // [[1, i], [-i, 1]] has eigenvalues 0 and 2.
        let m = M::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => c(0.0, 1.0),
            (1, 0) => c(0.0, -1.0),
            _ => c(1.0, 0.0),
        });
        let e = hermitian_eig(&m).unwrap();
        assert!(e.values[0].abs() < 1e-14 && (e.values[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn non_hermitian_is_a_contract_violation() {
        let m = M::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(hermitian_eig(&m), Err(Error::Contract(_))));
    }

    #[test]
    fn zero_matrix_has_zero_spectrum() {
        let e = hermitian_eig(&M::zeros(3, 3)).unwrap();
        assert_eq!(e.values, vec![0.0; 3]);
    }

    #[test]
    fn rank_basics() {
        assert_eq!(matrix_rank(&M::identity(2), 1e-10), 2);
        assert_eq!(matrix_rank(&M::unit(2, 0, 0), 1e-10), 1);
        assert_eq!(matrix_rank(&M::zeros(2, 2), 1e-10), 0);
        let v = vec![c(1.0, 0.5), c(-2.0, 0.0), c(0.0, 1.0)];
        assert_eq!(matrix_rank(&M::outer(&v, &v), 1e-10), 1);
    }

    #[test]
    fn singular_values_match_eigenvalues_of_gram() {
        let a = M::from_fn(3, 5, |i, j| c((i + 2 * j) as f64 * 0.3 - 1.0, (i * j) as f64 * 0.1));
        let sv = singular_values(&a);
        let e = hermitian_eig(&(&a * &a.adjoint())).unwrap();
        for (s, lam) in sv.iter().zip(e.values.iter().rev()) {
            assert!((s * s - lam).abs() < 1e-10);
        }
    }

    #[test]
    fn qr_factorizes() {
        let m = random_hermitian(6, 9);
        let (q, r) = householder_qr(&m);
        assert!((&(&q * &r) - &m).frobenius_norm() < 1e-12);
        assert!((&(&q.adjoint() * &q) - &M::identity(6)).frobenius_norm() < 1e-12);
        for i in 0..6 {
            for j in 0..i {
                assert_eq!(r[(i, j)], c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn works_in_single_precision() {
        let m = Matrix::<f32>::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let e = hermitian_eig(&m).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-5 && (e.values[1] - 3.0).abs() < 1e-5);
    }

    #[test]
    fn cholesky_matches_spectrum() {
        let mut rng = crate::random::Seed(31).rng();
        for trial in 0..40 {
            let h: Matrix<f64> = crate::random::random_hermitian(6, &mut rng);
            let lam = hermitian_eig(&h).unwrap().min();
            let shift = -lam + if trial % 2 == 0 { 1e-3 } else { -1e-3 };
            assert_eq!(cholesky_succeeds(&h, shift), lam > -shift, "trial {trial}");
        }
        assert!(!cholesky_succeeds(&Matrix::<f64>::zeros(2, 2), 0.0));
        assert!(cholesky_succeeds(&Matrix::<f64>::zeros(2, 2), 1e-12));
    }
}
