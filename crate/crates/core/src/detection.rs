//! Bipartite states on `C^m ⊗ C^n`, Schmidt ranks, and entanglement detection
//! by `(i_m ⊗ φ)(ρ) ⋡ 0`.
//!
//! A [`DetectorFamily`] is the direct sum `X ↦ ⊕_i φ(U_i* X U_i)` over a list
//! of Haar unitaries. The direct sum is block diagonal, so its minimum
//! eigenvalue is the minimum over members, and a longer list from the same
//! seed extends a shorter one.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::choi::{bell_matrix, LinearMap};
use crate::error::{ensure, Error, Result};
use crate::linalg::{hermitian_eig, singular_values};
use crate::matrix::{vec_norm, Matrix, MatrixJson};
use crate::positivity::k_positivity;
use crate::random::{haar_unitary_from, random_density, random_unit_vector, Seed};
use crate::scalar::{Complex, Real};
use crate::zoo::Params;

/// Trace and eigenvalue slack accepted for density matrices.
pub const STATE_TOL: f64 = 1e-10;
/// Default singular-value cutoff for Schmidt ranks.
pub const SCHMIDT_TOL: f64 = 1e-9;
/// Default relative detection tolerance, equal to the PSD tolerance.
pub const DETECT_TOL: f64 = crate::positivity::PSD_TOL;

pub const STATE_GRAMMAR: &str = "state spec: NAME:key=value,...
  isotropic:n=N,p=P | bell:n=N | pure:m=M,n=N,r=R,seed=S
  product:fileA=A.json,fileB=B.json | file:rho.json";

/// Density matrix on `C^m ⊗ C^n`, party `A` on the most significant index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateJson", into = "StateJson", bound = "T: Real")]
pub struct DensityMatrix<T> {
    m: usize,
    n: usize,
    mat: Matrix<T>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateJson {
    pub m: usize,
    pub n: usize,
    pub mat: MatrixJson,
}

impl<T: Real> TryFrom<StateJson> for DensityMatrix<T> {
    type Error = Error;

    fn try_from(j: StateJson) -> Result<Self> {
        DensityMatrix::new(j.m, j.n, Matrix::try_from(j.mat)?)
    }
}

impl<T: Real> From<DensityMatrix<T>> for StateJson {
    fn from(d: DensityMatrix<T>) -> Self {
        Self {
            m: d.m,
            n: d.n,
            mat: d.mat.into(),
        }
    }
}

/// Hermitian, unit trace and PSD within [`STATE_TOL`].
fn validate_state<T: Real>(mat: &Matrix<T>, what: &str) -> Result<Matrix<T>> {
    mat.require_hermitian(what)?;
    let mat = mat.hermitian_part();
    let tr = mat.trace();
    ensure!(
        (tr.re - T::one()).abs() <= T::tol(STATE_TOL) && tr.im.abs() <= T::tol(STATE_TOL),
        Contract,
        "{what} has trace {} + {}i, expected 1",
        tr.re,
        tr.im
    );
    let min = hermitian_eig(&mat)?.min();
    ensure!(
        min >= -T::tol(STATE_TOL),
        Contract,
        "{what} has eigenvalue {min}, expected >= 0"
    );
    Ok(mat)
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(m: usize, n: usize, mat: Matrix<T>) -> Result<Self> {
        ensure!(m >= 1 && n >= 1, Parameter, "party dimensions must be positive");
        ensure!(
            mat.rows() == m * n && mat.cols() == m * n,
            Shape,
            "state is {}x{}, dimensions {m}x{n} need {}x{}",
            mat.rows(),
            mat.cols(),
            m * n,
            m * n
        );
        let mat = validate_state(&mat, "density matrix")?;
        Ok(Self { m, n, mat })
    }

    /// `|ψ⟩⟨ψ|` for a unit vector `ψ`.
    pub fn pure(m: usize, n: usize, psi: &[Complex<T>]) -> Result<Self> {
        ensure!(psi.len() == m * n, Shape, "vector has length {}, expected {}", psi.len(), m * n);
        require_unit(psi)?;
        Self::new(m, n, Matrix::outer(psi, psi))
    }

    pub fn dim_a(&self) -> usize {
        self.m
    }

    pub fn dim_b(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.mat
    }

    /// `(1 ⊗ W) ρ (1 ⊗ W)*`.
    pub fn rotate_b(&self, w: &Matrix<T>) -> Result<Self> {
        ensure!(w.rows() == self.n && w.cols() == self.n, Shape, "local unitary must be {0}x{0}", self.n);
        let full = Matrix::identity(self.m).kron(w);
        Self::new(self.m, self.n, &(&full * &self.mat) * &full.adjoint())
    }
}

fn require_unit<T: Real>(psi: &[Complex<T>]) -> Result<()> {
    let norm = vec_norm(psi);
    ensure!(
        (norm - T::one()).abs() <= T::tol(STATE_TOL),
        Contract,
        "vector norm is {norm}, expected 1"
    );
    Ok(())
}

/// Number of Schmidt coefficients of the unit vector `ψ ∈ C^m ⊗ C^n` above `tol`.
pub fn schmidt_rank<T: Real>(psi: &[Complex<T>], m: usize, n: usize, tol: f64) -> Result<usize> {
    ensure!(psi.len() == m * n, Shape, "vector has length {}, expected {}", psi.len(), m * n);
    require_unit(psi)?;
    let mat = Matrix::from_fn(m, n, |i, j| psi[i * n + j]);
    Ok(singular_values(&mat).into_iter().filter(|&s| s > T::lit(tol)).count())
}

/// `p·B/n + (1−p)·1/n²` on `C^n ⊗ C^n`.
pub fn isotropic_state<T: Real>(n: usize, p: T) -> Result<DensityMatrix<T>> {
    ensure!(n >= 1, Parameter, "n must be positive");
    ensure!(p >= T::zero() && p <= T::one(), Parameter, "p = {p} outside [0, 1]");
    let nf = T::lit(n as f64);
    let mat = &bell_matrix::<T>(n).scale_real(p / nf) + &Matrix::identity(n * n).scale_real((T::one() - p) / (nf * nf));
    DensityMatrix::new(n, n, mat)
}

/// The normalized maximally entangled state `B/n`.
pub fn bell_state<T: Real>(n: usize) -> Result<DensityMatrix<T>> {
    isotropic_state(n, T::one())
}

pub fn product_state<T: Real>(rho_a: &Matrix<T>, rho_b: &Matrix<T>) -> Result<DensityMatrix<T>> {
    ensure!(rho_a.is_square() && rho_b.is_square(), Shape, "factors must be square");
    let a = validate_state(rho_a, "first factor")?;
    let b = validate_state(rho_b, "second factor")?;
    DensityMatrix::new(a.rows(), b.rows(), a.kron(&b))
}

/// A unit vector of Schmidt rank exactly `r`: Schmidt coefficients bounded
/// away from zero, Haar-random local bases.
pub fn random_pure_vector<T: Real, R: Rng + ?Sized>(m: usize, n: usize, r: usize, rng: &mut R) -> Result<Vec<Complex<T>>> {
    ensure!(m >= 1 && n >= 1, Parameter, "party dimensions must be positive");
    ensure!((1..=m.min(n)).contains(&r), Parameter, "Schmidt rank {r} outside 1..={}", m.min(n));
    let weights: Vec<f64> = (0..r).map(|_| rng.random_range(0.2..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let ua = haar_unitary_from::<T, R>(m, rng);
    let ub = haar_unitary_from::<T, R>(n, rng);
    let mut psi = vec![Complex::new(T::zero(), T::zero()); m * n];
    for (k, w) in weights.iter().enumerate() {
        let s = T::lit((w / total).sqrt());
        for i in 0..m {
            for j in 0..n {
                psi[i * n + j] += ua[(i, k)] * ub[(j, k)] * s;
            }
        }
    }
    let norm = vec_norm(&psi);
    Ok(psi.into_iter().map(|z| z / norm).collect())
}

pub fn random_pure<T: Real>(m: usize, n: usize, r: usize, seed: Seed) -> Result<DensityMatrix<T>> {
    let psi = random_pure_vector::<T, _>(m, n, r, &mut seed.rng())?;
    DensityMatrix::pure(m, n, &psi)
}

/// Convex mixture of `terms` products of random states, alternating pure and
/// mixed factors.
pub fn random_separable<T: Real, R: Rng + ?Sized>(m: usize, n: usize, terms: usize, rng: &mut R) -> Result<DensityMatrix<T>> {
    ensure!(terms >= 1, Parameter, "at least one product term is required");
    let mut mat = Matrix::zeros(m * n, m * n);
    let mut total = T::zero();
    for t in 0..terms {
        let (a, b) = if t % 2 == 0 {
            let u = random_unit_vector::<T, R>(m, rng);
            let v = random_unit_vector::<T, R>(n, rng);
            (Matrix::outer(&u, &u), Matrix::outer(&v, &v))
        } else {
            (random_density::<T, R>(m, rng), random_density::<T, R>(n, rng))
        };
        let w = T::lit(rng.random_range(0.1..1.0));
        total += w;
        mat = &mat + &a.kron(&b).scale_real(w);
    }
    DensityMatrix::new(m, n, mat.scale_real(T::one() / total).hermitian_part())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DetectionVerdict<T> {
    pub label: String,
    #[serde(rename = "minEigenvalue")]
    pub min_eigenvalue: T,
    pub detected: bool,
    /// Eigenvector of the minimum eigenvalue, present when detected.
    #[serde(skip)]
    pub witness: Option<Vec<Complex<T>>>,
}

/// `(i_m ⊗ Φ)(ρ)` is not PSD at relative tolerance `tol`.
pub fn detect<T: Real>(rho: &DensityMatrix<T>, phi: &LinearMap<T>, tol: f64) -> Result<DetectionVerdict<T>> {
    ensure!(
        phi.in_dim() == rho.n,
        Shape,
        "map acts on M_{} but the second party has dimension {}",
        phi.in_dim(),
        rho.n
    );
    let image = phi.apply_extended(rho.m, &rho.mat)?.hermitian_part();
    let eig = hermitian_eig(&image)?;
    let min_eigenvalue = eig.min();
    let detected = min_eigenvalue < -T::lit(tol) * T::one().max(image.frobenius_norm());
    Ok(DetectionVerdict {
        label: phi.label().to_string(),
        min_eigenvalue,
        detected,
        witness: detected.then(|| eig.vectors.column(0)),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum SnOutcome {
    /// `SN(ρ) ≥ t + 1`.
    Certified {
        #[serde(rename = "schmidtNumberAtLeast")]
        bound: usize,
        #[serde(rename = "positivityMinEig")]
        positivity_min_eig: f64,
        #[serde(rename = "detectionMinEig")]
        detection_min_eig: f64,
    },
    /// The map is `t`-positive but does not detect `ρ`.
    NotDetected {
        #[serde(rename = "positivityMinEig")]
        positivity_min_eig: f64,
        #[serde(rename = "detectionMinEig")]
        detection_min_eig: f64,
    },
    /// No certificate can be issued with this map.
    Refused { reason: String },
}

impl SnOutcome {
    pub fn certified_bound(&self) -> Option<usize> {
        match self {
            Self::Certified { bound, .. } => Some(*bound),
            _ => None,
        }
    }
}

/// Certifies `SN(ρ) ≥ t + 1` when the block criterion shows `Φ` is `t`-positive
/// and `Φ` detects `ρ`. Maps without an equivariance declaration are an error.
pub fn sn_certificate<T: Real>(rho: &DensityMatrix<T>, phi: &LinearMap<T>, t: usize, tol: f64) -> Result<SnOutcome> {
    let pos = k_positivity(phi, t, tol)?;
    let positivity_min_eig = pos.min_eigenvalue.to_f64_lossy();
    if !pos.psd {
        return Ok(SnOutcome::Refused {
            reason: format!(
                "'{}' is not {t}-positive (block minimum eigenvalue {positivity_min_eig:e})",
                phi.label()
            ),
        });
    }
    let det = detect(rho, phi, tol)?;
    let detection_min_eig = det.min_eigenvalue.to_f64_lossy();
    Ok(if det.detected {
        SnOutcome::Certified {
            bound: t + 1,
            positivity_min_eig,
            detection_min_eig,
        }
    } else {
        SnOutcome::NotDetected {
            positivity_min_eig,
            detection_min_eig,
        }
    })
}

/// `X ↦ ⊕_i φ(U_i* X U_i)`; member `i` is drawn from stream `i` of the seed.
#[derive(Clone, Debug)]
pub struct DetectorFamily<T> {
    pub base: LinearMap<T>,
    pub unitaries: Vec<Matrix<T>>,
    pub seed: Seed,
}

pub fn sampled_detector<T: Real>(base: &LinearMap<T>, a: usize, seed: Seed) -> Result<DetectorFamily<T>> {
    ensure!(a >= 1, Parameter, "a family needs at least one member");
    let n = base.in_dim();
    Ok(DetectorFamily {
        base: base.clone(),
        unitaries: (0..a).map(|i| haar_unitary_from(n, &mut seed.trial(i as u64))).collect(),
        seed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyVerdict {
    pub label: String,
    /// Minimum eigenvalue of member `i`'s block.
    #[serde(rename = "memberMinEig")]
    pub member_min_eig: Vec<f64>,
    #[serde(rename = "minEigenvalue")]
    pub min_eigenvalue: f64,
    pub detected: bool,
    /// First member whose block is not PSD.
    #[serde(rename = "firstDetectingMember")]
    pub first_detecting: Option<usize>,
}

impl FamilyVerdict {
    /// Running minimum over the first `a` members, `a = 1..=len`.
    pub fn curve(&self) -> Vec<f64> {
        self.member_min_eig
            .iter()
            .scan(f64::INFINITY, |acc, &v| {
                *acc = acc.min(v);
                Some(*acc)
            })
            .collect()
    }
}

pub fn detect_with_family<T: Real>(rho: &DensityMatrix<T>, family: &DetectorFamily<T>, tol: f64) -> Result<FamilyVerdict> {
    let mut member_min_eig = Vec::with_capacity(family.unitaries.len());
    let mut first_detecting = None;
    for (i, u) in family.unitaries.iter().enumerate() {
        let rotated = rho.rotate_b(&u.adjoint())?;
        let v = detect(&rotated, &family.base, tol)?;
        if v.detected && first_detecting.is_none() {
            first_detecting = Some(i);
        }
        member_min_eig.push(v.min_eigenvalue.to_f64_lossy());
    }
    let min_eigenvalue = member_min_eig.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(FamilyVerdict {
        label: format!("family({}, a={})", family.base.label(), family.unitaries.len()),
        member_min_eig,
        min_eigenvalue,
        detected: first_detecting.is_some(),
        first_detecting,
    })
}

/// Smallest `p` at which `detect(isotropic(n, p), φ)` fires, by bisection to width `eps`.
/// Assumes detection is monotone in `p` and absent at `p = 0`.
pub fn isotropic_detection_threshold(phi: &LinearMap<f64>, n: usize, eps: f64, tol: f64) -> Result<Option<f64>> {
    let fires = |p: f64| -> Result<bool> { Ok(detect(&isotropic_state(n, p)?, phi, tol)?.detected) };
    if !fires(1.0)? {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > eps {
        let mid = 0.5 * (lo + hi);
        if fires(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Parses a state spec; see [`STATE_GRAMMAR`].
pub fn parse_state_spec<T: Real>(spec: &str) -> Result<DensityMatrix<T>> {
    let p = Params::parse(spec)?;
    match p.name.as_str() {
        "isotropic" => {
            p.allow(&["n", "p"])?;
            isotropic_state(p.usize("n")?, p.real("p")?)
        }
        "bell" => {
            p.allow(&["n"])?;
            bell_state(p.usize("n")?)
        }
        "pure" => {
            p.allow(&["m", "n", "r", "seed"])?;
            let seed = match p.values.get("seed") {
                Some(_) => Seed(p.usize("seed")? as u64),
                None => Seed::default(),
            };
            random_pure(p.usize("m")?, p.usize("n")?, p.usize("r")?, seed)
        }
        "product" => {
            p.allow(&["filea", "fileb"])?;
            let a: MatrixJson = crate::io::read_json(p.raw("filea")?)?;
            let b: MatrixJson = crate::io::read_json(p.raw("fileb")?)?;
            product_state(&Matrix::try_from(a)?, &Matrix::try_from(b)?)
        }
        "file" => {
            let j: StateJson = crate::io::read_json(p.raw("file")?)?;
            DensityMatrix::try_from(j)
        }
        other => Err(Error::Parse(format!("unknown state '{other}'\n{STATE_GRAMMAR}"))),
    }
}
