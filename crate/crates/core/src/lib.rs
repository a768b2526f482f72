//! Unitarily equivariant linear maps between matrix algebras.
//!
//! A map `Φ : M_n → M_n^{⊗a} ⊗ M_n^{⊗b}` is `(a,b)`-unitarily equivariant when
//! `Φ(UXU*) = V Φ(X) V*` with `V = Ū^{⊗a} ⊗ U^{⊗b}` for every unitary `U`.
//! Such maps are spanned by partially transposed permutation operators, one
//! per `π ∈ S_{a+b+1}`. This crate builds and decomposes them, decides their
//! `k`-positivity from a single block matrix, uses them as entanglement
//! detectors, and draws their wiring diagrams.
//!
//! All numerics are generic over [`scalar::Real`] (`f32` or `f64`); the
//! aliases below fix `f64`, which the default tolerances are calibrated for.

// Negated comparisons are deliberate: a NaN must fail every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod choi;
pub mod detection;
pub mod diagram;
pub mod equivariant;
pub mod error;
pub mod io;
pub mod linalg;
pub mod matrix;
pub mod perm;
pub mod positivity;
pub mod random;
pub mod scalar;
pub mod tensor;
pub mod zoo;

pub use choi::Equivariance;
pub use error::{Error, Result};
pub use perm::Permutation;
pub use random::Seed;

pub type ComplexMatrix = matrix::Matrix<f64>;
pub type MapRep = choi::LinearMap<f64>;
pub type EquivariantSpec = equivariant::EquivariantSpec<f64>;
pub type DensityMatrix = detection::DensityMatrix<f64>;
pub type DetectorFamily = detection::DetectorFamily<f64>;
pub type Complex64 = scalar::Complex<f64>;
