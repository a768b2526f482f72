//! Linear maps `M_n → M_N` stored through their Choi matrices.
//!
//! Convention: `C_Φ = Σ_ij e_ij ⊗ Φ(e_ij)`, the input index on the most
//! significant leg. The block `(i, j)` of `C_Φ` (rows `iN..(i+1)N`, columns
//! `jN..(j+1)N`) is `Φ(e_ij)`, so `Φ(X) = Σ_ij X_ij · block(i, j)`.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::matrix::Matrix;
use crate::random::{complex_gaussian, ginibre, Seed};
use crate::scalar::{Complex, Real};

const LINEARITY_PAIRS: u64 = 10;
const LINEARITY_TOL: f64 = 1e-10;
const LINEARITY_SEED: Seed = Seed(0x11AE_A417);

/// What is known about a map's covariance under `X ↦ UXU*`.
///
/// The `k`-positivity block criterion is only valid for equivariant maps;
/// [`crate::positivity::k_positivity`] refuses maps marked `Unknown` or
/// `NotEquivariant`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Equivariance {
    Unknown,
    NotEquivariant,
    /// Equivariant with some non-unitary `V(U)`.
    EquivariantOnly,
    /// Equivariant with unitary `V(U)`.
    Unitary,
    /// `V(U) = Ū^{⊗a} ⊗ U^{⊗b}`.
    Ab { a: usize, b: usize },
}

impl Equivariance {
    pub fn is_equivariant(self) -> bool {
        matches!(self, Self::EquivariantOnly | Self::Unitary | Self::Ab { .. })
    }
}

impl fmt::Display for Equivariance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Unknown => write!(f, "unknown"),
            Self::NotEquivariant => write!(f, "not-equivariant"),
            Self::EquivariantOnly => write!(f, "equivariant"),
            Self::Unitary => write!(f, "unitarily-equivariant"),
            Self::Ab { a, b } => write!(f, "({a},{b})"),
        }
    }
}

impl FromStr for Equivariance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "unknown" => Self::Unknown,
            "not-equivariant" => Self::NotEquivariant,
            "equivariant" => Self::EquivariantOnly,
            "unitarily-equivariant" => Self::Unitary,
            other => {
                let inner = other
                    .strip_prefix('(')
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| Error::Parse(format!("unknown equivariance tag {other:?}")))?;
                let (a, b) = inner
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("expected (a,b), got {other:?}")))?;
                let parse = |t: &str| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad signature {other:?}")))
                };
                Self::Ab {
                    a: parse(a)?,
                    b: parse(b)?,
                }
            }
        })
    }
}

impl Serialize for Equivariance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Equivariance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A self-adjoint linear map `M_n → M_N` held as its (Hermitian) Choi matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MapJson", into = "MapJson", bound = "T: Real")]
pub struct LinearMap<T> {
    in_dim: usize,
    out_dim: usize,
    choi: Matrix<T>,
    label: String,
    equivariance: Equivariance,
}

impl<T: Real> LinearMap<T> {
    pub fn from_choi(in_dim: usize, out_dim: usize, choi: Matrix<T>, label: impl Into<String>) -> Result<Self> {
        let dim = in_dim * out_dim;
        ensure!(in_dim >= 1 && out_dim >= 1, Parameter, "map dimensions must be positive");
        ensure!(
            choi.rows() == dim && choi.cols() == dim,
            Shape,
            "Choi matrix is {}x{}, expected {dim}x{dim} for M_{in_dim} → M_{out_dim}",
            choi.rows(),
            choi.cols()
        );
        choi.require_hermitian("Choi matrix")?;
        Ok(Self {
            in_dim,
            out_dim,
            choi: choi.hermitian_part(),
            label: label.into(),
            equivariance: Equivariance::Unknown,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn choi(&self) -> &Matrix<T> {
        &self.choi
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn equivariance(&self) -> Equivariance {
        self.equivariance
    }

    pub fn with_equivariance(mut self, e: Equivariance) -> Self {
        self.equivariance = e;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// `Φ(e_ij)`.
    pub fn image_of_unit(&self, i: usize, j: usize) -> Matrix<T> {
        let n = self.out_dim;
        self.choi.block(i * n, j * n, n, n)
    }

    /// `Φ(X) = Tr_1[(Xᵗ ⊗ 1_N) C_Φ]`.
    pub fn apply(&self, x: &Matrix<T>) -> Result<Matrix<T>> {
        ensure!(
            x.rows() == self.in_dim && x.cols() == self.in_dim,
            Shape,
            "input is {}x{}, map expects {}x{}",
            x.rows(),
            x.cols(),
            self.in_dim,
            self.in_dim
        );
        let big_n = self.out_dim;
        let mut out = Matrix::zeros(big_n, big_n);
        for i in 0..self.in_dim {
            for j in 0..self.in_dim {
                let w = x[(i, j)];
                if w.is_zero() {
                    continue;
                }
                for p in 0..big_n {
                    for q in 0..big_n {
                        out[(p, q)] += w * self.choi[(i * big_n + p, j * big_n + q)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// `[Φ(e_ij)]_{i,j<k}`: the leading `kN x kN` principal block of `C_Φ`.
    pub fn block_matrix(&self, k: usize) -> Result<Matrix<T>> {
        ensure!(
            (1..=self.in_dim).contains(&k),
            Parameter,
            "block size k = {k} outside 1..={}",
            self.in_dim
        );
        let d = k * self.out_dim;
        Ok(self.choi.top_left(d, d))
    }

    /// `(i_m ⊗ Φ)(X)` for `X` on `C^m ⊗ C^n`.
    pub fn apply_extended(&self, m: usize, x: &Matrix<T>) -> Result<Matrix<T>> {
        let n = self.in_dim;
        ensure!(
            x.rows() == m * n && x.cols() == m * n,
            Shape,
            "input is {}x{}, expected {}x{} for i_{m} ⊗ Φ",
            x.rows(),
            x.cols(),
            m * n,
            m * n
        );
        let big_n = self.out_dim;
        let mut out = Matrix::zeros(m * big_n, m * big_n);
        for a in 0..m {
            for b in 0..m {
                let image = self.apply(&x.block(a * n, b * n, n, n))?;
                for p in 0..big_n {
                    for q in 0..big_n {
                        out[(a * big_n + p, b * big_n + q)] = image[(p, q)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// `i_m ⊗ Φ : M_{mn} → M_{mN}`. Equivariance metadata is not carried over.
    pub fn extend(&self, m: usize) -> Result<Self> {
        ensure!(m >= 1, Parameter, "extension dimension must be positive");
        let (n, big_n) = (self.in_dim, self.out_dim);
        let in_dim = m * n;
        let out_dim = m * big_n;
        // Row ((a,i),(a',p)), column ((b,j),(b',q)) = δ_aa' δ_bb' C[(i,p),(j,q)].
        let choi = Matrix::from_fn(in_dim * out_dim, in_dim * out_dim, |r, c| {
            let (ai, ap) = (r / out_dim, r % out_dim);
            let (bj, bq) = (c / out_dim, c % out_dim);
            let (a, i) = (ai / n, ai % n);
            let (b, j) = (bj / n, bj % n);
            let (a2, p) = (ap / big_n, ap % big_n);
            let (b2, q) = (bq / big_n, bq % big_n);
            if a == a2 && b == b2 {
                self.choi[(i * big_n + p, j * big_n + q)]
            } else {
                Complex::zero()
            }
        });
        let label = if m == 1 {
            self.label.clone()
        } else {
            format!("i_{m} ⊗ {}", self.label)
        };
        let mut out = Self::from_choi(in_dim, out_dim, choi, label)?;
        if m == 1 {
            out.equivariance = self.equivariance;
        }
        Ok(out)
    }

    /// Checks `Φ(X*) = Φ(X)*` on one input.
    pub fn is_self_adjoint_on(&self, x: &Matrix<T>) -> Result<bool> {
        let lhs = self.apply(&x.adjoint())?;
        let rhs = self.apply(x)?.adjoint();
        Ok((&lhs - &rhs).frobenius_norm() <= T::tol(1e-12) * (T::one() + lhs.frobenius_norm()))
    }
}

/// `B_n = Σ_i e_i ⊗ e_i` (unnormalized).
pub fn bell_vector<T: Real>(n: usize) -> Vec<Complex<T>> {
    let mut v = vec![Complex::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = Complex::one();
    }
    v
}

/// `B_{n²} = B_n B_n*`.
pub fn bell_matrix<T: Real>(n: usize) -> Matrix<T> {
    let v = bell_vector::<T>(n);
    Matrix::outer(&v, &v)
}

/// The 4-leg swap `Σ e_ij ⊗ e_ji` on `C^n ⊗ C^n`.
pub fn swap_matrix<T: Real>(n: usize) -> Matrix<T> {
    let mut m = Matrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            m[(i * n + j, j * n + i)] = Complex::one();
        }
    }
    m
}

/// Builds `C_Φ = Σ e_ij ⊗ f(e_ij)` after checking `f` is linear on random pairs.
pub fn choi_of_map<T, F>(f: F, n: usize, big_n: usize, label: impl Into<String>) -> Result<LinearMap<T>>
where
    T: Real,
    F: Fn(&Matrix<T>) -> Matrix<T>,
{
    ensure!(n >= 1 && big_n >= 1, Parameter, "map dimensions must be positive");
    let checked = |x: &Matrix<T>| -> Result<Matrix<T>> {
        let y = f(x);
        ensure!(
            y.rows() == big_n && y.cols() == big_n,
            Shape,
            "callable returned {}x{}, declared output is {big_n}x{big_n}",
            y.rows(),
            y.cols()
        );
        Ok(y)
    };

    for trial in 0..LINEARITY_PAIRS {
        let mut rng = LINEARITY_SEED.trial(trial);
        let x = ginibre::<T, _>(n, n, &mut rng);
        let y = ginibre::<T, _>(n, n, &mut rng);
        let alpha: Complex<T> = complex_gaussian(&mut rng);
        let beta: Complex<T> = complex_gaussian(&mut rng);
        let combined = checked(&(&x.scale(alpha) + &y.scale(beta)))?;
        let fx = checked(&x)?;
        let fy = checked(&y)?;
        let expected = &fx.scale(alpha) + &fy.scale(beta);
        let resid = (&combined - &expected).frobenius_norm();
        let scale = T::one() + alpha.norm() * fx.frobenius_norm() + beta.norm() * fy.frobenius_norm();
        ensure!(
            resid <= T::tol(LINEARITY_TOL) * scale,
            Contract,
            "callable is not linear: residual {:e} on random pair {trial}",
            resid.to_f64_lossy()
        );
    }

    let mut choi = Matrix::zeros(n * big_n, n * big_n);
    for i in 0..n {
        for j in 0..n {
            let image = checked(&Matrix::unit(n, i, j))?;
            for p in 0..big_n {
                for q in 0..big_n {
                    choi[(i * big_n + p, j * big_n + q)] = image[(p, q)];
                }
            }
        }
    }
    LinearMap::from_choi(n, big_n, choi, label)
}

/// Wire format: `{"n": …, "N": …, "label": …, "choi": <matrix JSON>}` plus an
/// optional `"equivariance"` tag.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapJson {
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub label: String,
    pub choi: crate::matrix::MatrixJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equivariance: Option<Equivariance>,
}

impl<T: Real> From<LinearMap<T>> for MapJson {
    fn from(m: LinearMap<T>) -> Self {
        Self {
            n: m.in_dim,
            big_n: m.out_dim,
            label: m.label,
            choi: m.choi.into(),
            equivariance: match m.equivariance {
                Equivariance::Unknown => None,
                e => Some(e),
            },
        }
    }
}

impl<T: Real> TryFrom<MapJson> for LinearMap<T> {
    type Error = Error;

    fn try_from(j: MapJson) -> Result<Self> {
        let choi = Matrix::try_from(j.choi)?;
        Ok(LinearMap::from_choi(j.n, j.big_n, choi, j.label)?
            .with_equivariance(j.equivariance.unwrap_or(Equivariance::Unknown)))
    }
}
