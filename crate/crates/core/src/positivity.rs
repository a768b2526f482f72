//! Positive semi-definiteness, the block criterion for `k`-positivity of
//! equivariant maps, and a state-sampling falsifier that needs no equivariance.

use serde::Serialize;

use crate::choi::LinearMap;
use crate::error::{ensure, Result};
use crate::linalg::{cholesky_succeeds, hermitian_eig};
use crate::matrix::{vec_kron, Matrix};
use crate::random::{random_unit_vector, Seed};
use crate::scalar::{Complex, Real};

/// Default relative PSD tolerance; boundary cases with an exact zero eigenvalue must pass.
pub const PSD_TOL: f64 = 1e-9;
/// A falsifier witness needs `⟨ψ′|(i_k⊗Φ)(|ψ⟩⟨ψ|)|ψ′⟩` below minus this.
pub const WITNESS_MARGIN: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsdVerdict<T> {
    pub psd: bool,
    pub min_eigenvalue: T,
}

/// PSD iff `λ_min ≥ −tol · max(1, ‖M‖_F)`.
pub fn is_psd<T: Real>(m: &Matrix<T>, tol: f64) -> Result<PsdVerdict<T>> {
    let eig = hermitian_eig(m)?;
    let min_eigenvalue = eig.min();
    let floor = -T::lit(tol) * T::one().max(m.frobenius_norm());
    Ok(PsdVerdict {
        psd: min_eigenvalue >= floor,
        min_eigenvalue,
    })
}

fn require_equivariant<T: Real>(phi: &LinearMap<T>) -> Result<()> {
    ensure!(
        phi.equivariance().is_equivariant(),
        Contract,
        "the block criterion needs an equivariant map; '{}' is marked {}",
        phi.label(),
        phi.equivariance()
    );
    Ok(())
}

/// `k`-positivity of an equivariant map from `[Φ(e_ij)]_{i,j≤k}`, `1 ≤ k ≤ min(n, N)`.
pub fn k_positivity<T: Real>(phi: &LinearMap<T>, k: usize, tol: f64) -> Result<PsdVerdict<T>> {
    require_equivariant(phi)?;
    let k_max = phi.in_dim().min(phi.out_dim());
    ensure!((1..=k_max).contains(&k), Parameter, "k = {k} outside 1..={k_max}");
    is_psd(&phi.block_matrix(k)?, tol)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KEntry {
    pub k: usize,
    #[serde(rename = "minEig")]
    pub min_eigenvalue: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PositivityProfile {
    pub label: String,
    #[serde(rename = "perK")]
    pub per_k: Vec<KEntry>,
    /// Largest `k` such that every `k' ≤ k` passes; 0 if the map is not positive.
    #[serde(rename = "maxK")]
    pub max_k: usize,
    #[serde(rename = "cp")]
    pub completely_positive: bool,
}

/// The block criterion for every `k = 1..=min(n, N)` and PSD-ness of the full Choi matrix.
pub fn positivity_profile<T: Real>(phi: &LinearMap<T>, tol: f64) -> Result<PositivityProfile> {
    require_equivariant(phi)?;
    let k_max = phi.in_dim().min(phi.out_dim());
    let mut per_k = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let v = k_positivity(phi, k, tol)?;
        per_k.push(KEntry {
            k,
            min_eigenvalue: v.min_eigenvalue.to_f64_lossy(),
            pass: v.psd,
        });
    }
    let max_k = per_k.iter().take_while(|e| e.pass).count();
    let completely_positive = is_psd(phi.choi(), tol)?.psd;
    Ok(PositivityProfile {
        label: phi.label().to_string(),
        per_k,
        max_k,
        completely_positive,
    })
}

#[derive(Clone, Debug)]
pub struct FalsifierWitness<T> {
    /// The sampled input vector on `C^k ⊗ C^n`.
    pub input: Vec<Complex<T>>,
    /// Eigenvector of the most negative eigenvalue of `(i_k⊗Φ)(|ψ⟩⟨ψ|)`.
    pub witness: Vec<Complex<T>>,
    pub value: T,
    pub trial: usize,
}

/// Samples `ψ` uniformly on the unit sphere of `C^k ⊗ C^n` and returns the first
/// one for which `(i_k⊗Φ)(|ψ⟩⟨ψ|)` has an eigenvalue below `−WITNESS_MARGIN`.
/// Works for any map; `None` only means no witness was found.
pub fn k_positivity_falsify<T: Real>(
    phi: &LinearMap<T>,
    k: usize,
    trials: usize,
    seed: Seed,
) -> Result<Option<FalsifierWitness<T>>> {
    ensure!(k >= 1, Parameter, "k must be positive");
    let dim = k * phi.in_dim();
    for trial in 0..trials {
        let psi = random_unit_vector::<T, _>(dim, &mut seed.trial(trial as u64));
        let image = phi.apply_extended(k, &Matrix::outer(&psi, &psi))?.hermitian_part();
        if cholesky_succeeds(&image, T::tol(WITNESS_MARGIN)) {
            continue;
        }
        let eig = hermitian_eig(&image)?;
        let value = eig.min();
        if value < -T::tol(WITNESS_MARGIN) {
            return Ok(Some(FalsifierWitness {
                input: psi,
                witness: eig.vectors.column(0),
                value,
                trial,
            }));
        }
    }
    Ok(None)
}

/// `⟨w|(i_k⊗Φ)(|ψ⟩⟨ψ|)|w⟩`, for re-checking a witness independently.
pub fn witness_value<T: Real>(phi: &LinearMap<T>, k: usize, psi: &[Complex<T>], w: &[Complex<T>]) -> Result<T> {
    let image = phi.apply_extended(k, &Matrix::outer(psi, psi))?;
    Ok(image.quadratic_form(w)?.re)
}

/// `|e_i⟩ ⊗ |e_i⟩` summed over `i < k`: the unnormalized `k`-level Bell vector in `C^k ⊗ C^n`.
pub fn truncated_bell<T: Real>(k: usize, n: usize) -> Vec<Complex<T>> {
    let mut v = vec![Complex::new(T::zero(), T::zero()); k * n];
    for i in 0..k.min(n) {
        let mut ek = vec![Complex::new(T::zero(), T::zero()); k];
        let mut en = vec![Complex::new(T::zero(), T::zero()); n];
        ek[i] = Complex::new(T::one(), T::zero());
        en[i] = Complex::new(T::one(), T::zero());
        for (slot, x) in v.iter_mut().zip(vec_kron(&ek, &en)) {
            *slot += x;
        }
    }
    v
}
