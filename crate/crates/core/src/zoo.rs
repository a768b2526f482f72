//! Named maps with their declared equivariance, each declaration checked
//! numerically at construction.
//!
//! Map specs are `name:key=value,...`:
//!
//! ```text
//! identity:n=3            transpose:n=3          choi:n=3
//! tomiyama:n=3,lambda=1.2 bhat:n=3,alpha=1,beta=0
//! collins:n=3,alpha=2,beta=-1
//! collins3:n=3,alpha=2,beta=-1,gamma=0.5
//! conj:file=A.json        id-plus-transpose:n=2  skew-shift:n=2
//! file:map.json
//! ```
//!
//! `collins` and `collins3` accept `unvalidated=true` to allow `n = 2`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;
use serde::Serialize;

use crate::choi::{bell_matrix, choi_of_map, Equivariance, LinearMap, MapJson};
use crate::equivariant::{build_equivariant, check_ab_equivariance, find_equivariance_violation, EquivariantSpec};
use crate::error::{ensure, Error, Result};
use crate::linalg::matrix_rank;
use crate::matrix::{Matrix, MatrixJson};
use crate::perm::Permutation;
use crate::positivity::k_positivity;
use crate::random::Seed;
use crate::scalar::{Complex, Real};

/// Tolerance for verifying `(a,b)` declarations.
pub const DECLARATION_TOL: f64 = 1e-9;
pub const DECLARATION_TRIALS: usize = 20;
/// Random pairs tried by the rank scan after the fixed candidates.
pub const SCAN_TRIALS: usize = 100;
const UNITARY_TOL: f64 = 1e-6;
const INVERTIBLE_TOL: f64 = 1e-12;
const ZOO_SEED: Seed = Seed(0x200);

pub const MAP_GRAMMAR: &str = "map spec: NAME:key=value,...
  identity:n=N | transpose:n=N | choi:n=N
  tomiyama:n=N,lambda=L | bhat:n=N,alpha=A,beta=B
  collins:n=N,alpha=A,beta=B[,unvalidated=true]
  collins3:n=N,alpha=A,beta=B,gamma=G[,unvalidated=true]
  conj:file=A.json | id-plus-transpose:n=N | skew-shift:n=N
  file:map.json";

fn verify_ab<T: Real>(phi: LinearMap<T>, a: usize, b: usize) -> Result<LinearMap<T>> {
    let report = check_ab_equivariance(
        phi.choi(),
        phi.in_dim(),
        a,
        b,
        DECLARATION_TRIALS,
        ZOO_SEED,
        T::tol(DECLARATION_TOL).to_f64_lossy(),
    )?;
    ensure!(
        report.passed(),
        Numeric,
        "'{}' declared ({a},{b}) but commutator norm is {:e}",
        phi.label(),
        report.max_rel_commutator_norm
    );
    Ok(phi.with_equivariance(Equivariance::Ab { a, b }))
}

/// The fixed unitary of the rank counterexamples, `[[1, 1], [−i, i]]/√2`,
/// embedded in the top-left corner of `1_n`.
pub fn counterexample_unitary<T: Real>(n: usize) -> Matrix<T> {
    let s = T::FRAC_1_SQRT_2();
    let mut u = Matrix::identity(n);
    if n >= 2 {
        u[(0, 0)] = Complex::new(s, T::zero());
        u[(0, 1)] = Complex::new(s, T::zero());
        u[(1, 0)] = Complex::new(T::zero(), -s);
        u[(1, 1)] = Complex::new(T::zero(), s);
    }
    u
}

/// `(U, e_11)` and `(U, −i e_11 + i e_22)` with `U` from [`counterexample_unitary`].
pub fn counterexample_candidates<T: Real>(n: usize) -> Vec<(Matrix<T>, Matrix<T>)> {
    let u = counterexample_unitary(n);
    let mut out = vec![(u.clone(), Matrix::unit(n, 0, 0))];
    if n >= 2 {
        let mut x = Matrix::zeros(n, n);
        x[(0, 0)] = Complex::new(T::zero(), -T::one());
        x[(1, 1)] = Complex::new(T::zero(), T::one());
        out.push((u, x));
    }
    out
}

fn verify_not_equivariant<T: Real>(phi: LinearMap<T>) -> Result<LinearMap<T>> {
    let n = phi.in_dim();
    let found = find_equivariance_violation(
        |x: &Matrix<T>| phi.apply(x).expect("square input of the map's size"),
        n,
        &counterexample_candidates(n),
        SCAN_TRIALS,
        ZOO_SEED,
    );
    ensure!(found.is_some(), Numeric, "'{}' declared not equivariant but no rank witness found", phi.label());
    Ok(phi.with_equivariance(Equivariance::NotEquivariant))
}

fn require_n(n: usize, min: usize, what: &str) -> Result<()> {
    ensure!(n >= min, Parameter, "{what} needs n >= {min}, got {n}");
    Ok(())
}

pub fn identity_map<T: Real>(n: usize) -> Result<LinearMap<T>> {
    require_n(n, 1, "identity")?;
    verify_ab(LinearMap::from_choi(n, n, bell_matrix(n), format!("identity(n={n})"))?, 0, 1)
}

/// `θ_n : A ↦ Aᵗ`.
pub fn transpose_map<T: Real>(n: usize) -> Result<LinearMap<T>> {
    require_n(n, 1, "transpose")?;
    let phi = choi_of_map(|x: &Matrix<T>| x.transpose(), n, n, format!("transpose(n={n})"))?;
    verify_ab(phi, 1, 0)
}

/// `A ↦ (n−1)Tr(A)·1 − A`.
pub fn choi_map<T: Real>(n: usize) -> Result<LinearMap<T>> {
    require_n(n, 2, "choi")?;
    let w = T::lit((n - 1) as f64);
    let phi = choi_of_map(
        move |x: &Matrix<T>| &Matrix::identity(n).scale(x.trace() * w) - x,
        n,
        n,
        format!("choi(n={n})"),
    )?;
    verify_ab(phi, 0, 1)
}

/// `A ↦ (λ/n)Tr(A)·1 + (1−λ)A`.
pub fn tomiyama_map<T: Real>(n: usize, lambda: T) -> Result<LinearMap<T>> {
    require_n(n, 2, "tomiyama")?;
    let s = lambda / T::lit(n as f64);
    let phi = choi_of_map(
        move |x: &Matrix<T>| &Matrix::identity(n).scale(x.trace() * s) + &x.scale_real(T::one() - lambda),
        n,
        n,
        format!("tomiyama(n={n},lambda={lambda})"),
    )?;
    verify_ab(phi, 0, 1)
}

/// `X ↦ αX + βTr(X)·1`.
pub fn bhat_map<T: Real>(n: usize, alpha: T, beta: T) -> Result<LinearMap<T>> {
    require_n(n, 1, "bhat")?;
    let phi = choi_of_map(
        move |x: &Matrix<T>| &x.scale_real(alpha) + &Matrix::identity(n).scale(x.trace() * beta),
        n,
        n,
        format!("bhat(n={n},alpha={alpha},beta={beta})"),
    )?;
    verify_ab(phi, 0, 1)
}

fn collins_fn<T: Real>(n: usize, alpha: T, beta: T, gamma: T) -> impl Fn(&Matrix<T>) -> Matrix<T> {
    let one = Matrix::<T>::identity(n);
    let bell = bell_matrix::<T>(n);
    let tail = &Matrix::<T>::identity(n * n).scale_real(alpha) + &bell.scale_real(beta);
    move |x: &Matrix<T>| {
        let left = one.kron(x);
        let mut out = &(&x.transpose().kron(&one) + &left) + &tail.scale(x.trace());
        if !gamma.is_zero() {
            let cyc = &(&bell * &left) + &(&left * &bell);
            out = &out + &cyc.scale_real(gamma);
        }
        out
    }
}

fn collins_label(name: &str, n: usize, params: &str, unvalidated: bool) -> String {
    let mark = if n < 3 && unvalidated { ",unvalidated" } else { "" };
    format!("{name}(n={n},{params}{mark})")
}

/// `A ↦ Aᵗ⊗1 + 1⊗A + Tr(A)(α·1 + β·B)`, stated for `n ≥ 3`; `unvalidated`
/// admits `n = 2` as well.
pub fn collins_map<T: Real>(n: usize, alpha: T, beta: T, unvalidated: bool) -> Result<LinearMap<T>> {
    collins3_map(n, alpha, beta, T::zero(), unvalidated).map(|phi| {
        let label = collins_label("collins", n, &format!("alpha={alpha},beta={beta}"), unvalidated);
        phi.with_label(label)
    })
}

/// [`collins_map`] plus `γ(B(1⊗A) + (1⊗A)B)`.
pub fn collins3_map<T: Real>(n: usize, alpha: T, beta: T, gamma: T, unvalidated: bool) -> Result<LinearMap<T>> {
    require_n(n, if unvalidated { 2 } else { 3 }, "collins")?;
    let label = collins_label("collins3", n, &format!("alpha={alpha},beta={beta},gamma={gamma}"), unvalidated);
    let phi = choi_of_map(collins_fn(n, alpha, beta, gamma), n, n * n, label)?;
    verify_ab(phi, 1, 1)
}

/// The same family assembled from permutation coefficients, for scans.
pub fn collins_spec<T: Real>(n: usize, alpha: T, beta: T, gamma: T) -> Result<EquivariantSpec<T>> {
    let p = |s: &str| Permutation::parse_cycles(s, 3).expect("fixed cycle text");
    let r = |v: T| Complex::new(v, T::zero());
    EquivariantSpec::from_pairs(
        n,
        1,
        1,
        &[
            (p("(1 2)"), Complex::one()),
            (p("(1 3)"), Complex::one()),
            (p("()"), r(alpha)),
            (p("(2 3)"), r(beta)),
            (p("(1 2 3)"), r(gamma)),
            (p("(1 3 2)"), r(gamma)),
        ],
    )
}

/// `Φ_A : X ↦ AXA*`. Unitary `A` is declared unitarily equivariant,
/// invertible non-unitary `A` equivariant only, after a rank scan finds no
/// violation; singular nonzero `A` is declared not equivariant once the scan
/// finds a witness.
pub fn conjugation_map<T: Real>(a: &Matrix<T>) -> Result<LinearMap<T>> {
    ensure!(a.is_square() && a.rows() >= 1, Shape, "conjugation needs a square matrix, got {}x{}", a.rows(), a.cols());
    let n = a.rows();
    let a_adj = a.adjoint();
    let phi = choi_of_map(|x: &Matrix<T>| &(a * x) * &a_adj, n, n, format!("conj(n={n})"))?;
    let defect = (&(&a_adj * a) - &Matrix::identity(n)).frobenius_norm();
    let invertible = matrix_rank(a, T::tol(INVERTIBLE_TOL)) == n;
    let witness = find_equivariance_violation(
        |x: &Matrix<T>| phi.apply(x).expect("square input of the map's size"),
        n,
        &counterexample_candidates(n),
        SCAN_TRIALS,
        ZOO_SEED,
    );
    let tag = match (witness.is_some(), invertible, defect <= T::tol(UNITARY_TOL)) {
        (true, _, _) => Equivariance::NotEquivariant,
        (false, true, true) => Equivariance::Unitary,
        (false, true, false) => Equivariance::EquivariantOnly,
        (false, false, _) if a.max_abs().is_zero() => Equivariance::Unitary,
        (false, false, _) => Equivariance::Unknown,
    };
    Ok(phi.with_equivariance(tag))
}

/// `i_n + θ_n`, the sum of two unitarily equivariant maps that is not equivariant.
pub fn id_plus_transpose_map<T: Real>(n: usize) -> Result<LinearMap<T>> {
    require_n(n, 2, "id-plus-transpose")?;
    let phi = choi_of_map(|x: &Matrix<T>| x + &x.transpose(), n, n, format!("id-plus-transpose(n={n})"))?;
    verify_not_equivariant(phi)
}

/// `A ↦ A − Aᵗ + Tr(A)·1`, completely positive for `n = 2` and not equivariant.
pub fn skew_shift_map<T: Real>(n: usize) -> Result<LinearMap<T>> {
    require_n(n, 2, "skew-shift")?;
    let phi = choi_of_map(
        move |x: &Matrix<T>| &(x - &x.transpose()) + &Matrix::identity(n).scale(x.trace()),
        n,
        n,
        format!("skew-shift(n={n})"),
    )?;
    verify_not_equivariant(phi)
}

/// Loads a map file. An `(a,b)` tag is re-verified; other equivariance tags
/// must survive a rank scan.
pub fn load_map<T: Real>(path: &str) -> Result<LinearMap<T>> {
    let j: MapJson = crate::io::read_json(path)?;
    let phi = LinearMap::<T>::try_from(j)?;
    match phi.equivariance() {
        Equivariance::Ab { a, b } => {
            let n = phi.in_dim();
            let expected = n.checked_pow((a + b) as u32);
            ensure!(
                expected == Some(phi.out_dim()),
                Contract,
                "{path}: tag ({a},{b}) needs N = {n}^{} but N = {}",
                a + b,
                phi.out_dim()
            );
            // A false tag in a file is bad input, not an internal failure.
            verify_ab(phi, a, b).map_err(|e| match e {
                Error::Numeric(m) => Error::Contract(format!("{path}: {m}")),
                e => e,
            })
        }
        Equivariance::Unitary | Equivariance::EquivariantOnly => {
            let n = phi.in_dim();
            let witness = find_equivariance_violation(
                |x: &Matrix<T>| phi.apply(x).expect("square input of the map's size"),
                n,
                &counterexample_candidates(n),
                SCAN_TRIALS,
                ZOO_SEED,
            );
            ensure!(
                witness.is_none(),
                Contract,
                "{path}: declared {} but a rank witness contradicts it",
                phi.equivariance()
            );
            Ok(phi)
        }
        _ => Ok(phi),
    }
}

/// A parsed map spec: constructor name, parameters and the map.
#[derive(Clone, Debug)]
pub struct ZooEntry<T> {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub map: LinearMap<T>,
}

impl<T: Real> ZooEntry<T> {
    pub fn declared(&self) -> Equivariance {
        self.map.equivariance()
    }
}

/// `name:key=value,...` split into parts; `file:PATH` keeps the path whole.
pub(crate) struct Params {
    pub(crate) name: String,
    pub(crate) values: BTreeMap<String, String>,
}

impl Params {
    pub(crate) fn parse(spec: &str) -> Result<Self> {
        let (name, rest) = spec.split_once(':').unwrap_or((spec, ""));
        let name = name.trim().to_ascii_lowercase();
        ensure!(!name.is_empty(), Parse, "empty spec name in '{spec}'");
        let mut values = BTreeMap::new();
        if name == "file" {
            values.insert("file".to_string(), rest.trim().to_string());
            return Ok(Self { name, values });
        }
        for part in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got '{part}' in '{spec}'")))?;
            let key = k.trim().to_ascii_lowercase();
            ensure!(
                values.insert(key.clone(), v.trim().to_string()).is_none(),
                Parse,
                "duplicate key '{key}' in '{spec}'"
            );
        }
        Ok(Self { name, values })
    }

    pub(crate) fn allow(&self, keys: &[&str]) -> Result<()> {
        for k in self.values.keys() {
            ensure!(keys.contains(&k.as_str()), Parse, "unknown key '{k}' for '{}'", self.name);
        }
        Ok(())
    }

    pub(crate) fn raw(&self, key: &str) -> Result<&str> {
        self.values
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::Parse(format!("'{}' needs {key}=...", self.name)))
    }

    pub(crate) fn usize(&self, key: &str) -> Result<usize> {
        let v = self.raw(key)?;
        v.parse().map_err(|_| Error::Parse(format!("{key}={v} is not a count")))
    }

    pub(crate) fn real<T: Real>(&self, key: &str) -> Result<T> {
        let v = self.raw(key)?;
        let x: f64 = v.parse().map_err(|_| Error::Parse(format!("{key}={v} is not a number")))?;
        ensure!(x.is_finite(), Parameter, "{key}={v} is not finite");
        Ok(T::lit(x))
    }

    pub(crate) fn flag(&self, key: &str) -> Result<bool> {
        match self.values.get(key).map(String::as_str) {
            None | Some("false") | Some("0") => Ok(false),
            Some("true") | Some("1") | Some("") => Ok(true),
            Some(v) => Err(Error::Parse(format!("{key}={v} is not a boolean"))),
        }
    }
}

/// Parses a map spec; see the module docs for the grammar.
pub fn parse_map_spec<T: Real>(spec: &str) -> Result<ZooEntry<T>> {
    let p = Params::parse(spec)?;
    let map = match p.name.as_str() {
        "identity" | "id" => {
            p.allow(&["n"])?;
            identity_map(p.usize("n")?)?
        }
        "transpose" => {
            p.allow(&["n"])?;
            transpose_map(p.usize("n")?)?
        }
        "choi" => {
            p.allow(&["n"])?;
            choi_map(p.usize("n")?)?
        }
        "tomiyama" => {
            p.allow(&["n", "lambda"])?;
            tomiyama_map(p.usize("n")?, p.real("lambda")?)?
        }
        "bhat" => {
            p.allow(&["n", "alpha", "beta"])?;
            bhat_map(p.usize("n")?, p.real("alpha")?, p.real("beta")?)?
        }
        "collins" => {
            p.allow(&["n", "alpha", "beta", "unvalidated"])?;
            collins_map(p.usize("n")?, p.real("alpha")?, p.real("beta")?, p.flag("unvalidated")?)?
        }
        "collins3" => {
            p.allow(&["n", "alpha", "beta", "gamma", "unvalidated"])?;
            collins3_map(
                p.usize("n")?,
                p.real("alpha")?,
                p.real("beta")?,
                p.real("gamma")?,
                p.flag("unvalidated")?,
            )?
        }
        "conj" => {
            p.allow(&["file"])?;
            let j: MatrixJson = crate::io::read_json(p.raw("file")?)?;
            conjugation_map(&Matrix::try_from(j)?)?
        }
        "id-plus-transpose" => {
            p.allow(&["n"])?;
            id_plus_transpose_map(p.usize("n")?)?
        }
        "skew-shift" => {
            p.allow(&["n"])?;
            skew_shift_map(p.usize("n")?)?
        }
        "file" => load_map(p.raw("file")?)?,
        other => return Err(Error::Parse(format!("unknown map '{other}'\n{MAP_GRAMMAR}"))),
    };
    Ok(ZooEntry {
        name: p.name,
        params: p.values,
        map,
    })
}

/// `lo:hi:steps`, `steps` evenly spaced points including both ends.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ParamRange {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl ParamRange {
    pub fn new(lo: f64, hi: f64, steps: usize) -> Result<Self> {
        ensure!(steps >= 1, Parameter, "range needs at least one step");
        ensure!(lo.is_finite() && hi.is_finite(), Parameter, "range ends must be finite");
        Ok(Self { lo, hi, steps })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        let span = self.hi - self.lo;
        (0..self.steps)
            .map(|i| self.lo + span * i as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

impl std::str::FromStr for ParamRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        ensure!(parts.len() == 3, Parse, "range '{s}' is not lo:hi:steps");
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("'{t}' in range '{s}' is not a number")));
        let steps = parts[2]
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("'{}' in range '{s}' is not a count", parts[2])))?;
        Self::new(num(parts[0])?, num(parts[1])?, steps)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    NotPositive,
    PositiveNotCp,
    Cp,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::NotPositive => "not-positive",
            Self::PositiveNotCp => "positive-not-cp",
            Self::Cp => "cp",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanPoint {
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "minEigK1")]
    pub min_eig_k1: f64,
    #[serde(rename = "minEigKn")]
    pub min_eig_kn: f64,
    pub region: Region,
}

/// Classifies the collins family over a rectangle by the block criterion at `k = 1` and `k = n`.
pub fn scan_collins(n: usize, alpha: ParamRange, beta: ParamRange, gamma: f64, tol: f64) -> Result<Vec<ScanPoint>> {
    require_n(n, 2, "scan")?;
    let mut out = Vec::with_capacity(alpha.steps * beta.steps);
    for &a in &alpha.values() {
        for &b in &beta.values() {
            let phi = build_equivariant(&collins_spec::<f64>(n, a, b, gamma)?)?;
            let k1 = k_positivity(&phi, 1, tol)?;
            let kn = k_positivity(&phi, n, tol)?;
            let region = match (k1.psd, kn.psd) {
                (false, _) => Region::NotPositive,
                (true, false) => Region::PositiveNotCp,
                (true, true) => Region::Cp,
            };
            out.push(ScanPoint {
                alpha: a,
                beta: b,
                min_eig_k1: k1.min_eigenvalue,
                min_eig_kn: kn.min_eigenvalue,
                region,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivariant::decompose_equivariant;
    use crate::linalg::hermitian_eig;
    use crate::positivity::{positivity_profile, PSD_TOL};
    use crate::scalar::c;

    type M = Matrix<f64>;

    fn choi_diff(a: &LinearMap<f64>, b: &LinearMap<f64>) -> f64 {
        (a.choi() - b.choi()).max_abs()
    }

    #[test]
    fn identity_and_transpose() {
        let t = transpose_map::<f64>(2).unwrap();
        let x = M::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(t.apply(&x).unwrap(), x.transpose());
        let id = identity_map::<f64>(3).unwrap();
        assert!((id.choi().trace() - c(3.0, 0.0)).norm() < 1e-15);
        let t3 = transpose_map::<f64>(3).unwrap();
        let y: M = crate::random::ginibre(3, 3, &mut Seed(1).rng());
        let twice = t3.apply(&t3.apply(&y).unwrap()).unwrap();
        assert!((&twice - &id.apply(&y).unwrap()).max_abs() < 1e-15);
        assert_eq!(t3.equivariance(), Equivariance::Ab { a: 1, b: 0 });
    }

    #[test]
    fn choi_map_examples() {
        let phi = choi_map::<f64>(3).unwrap();
        let e11 = phi.apply(&M::unit(3, 0, 0)).unwrap();
        assert!((&e11 - &(&M::identity(3).scale_real(2.0) - &M::unit(3, 0, 0))).max_abs() < 1e-15);
        let e12 = phi.apply(&M::unit(3, 0, 1)).unwrap();
        assert!((&e12 + &M::unit(3, 0, 1)).max_abs() < 1e-15);
        let phi2 = choi_map::<f64>(2).unwrap();
        assert!((&phi2.apply(&M::identity(2)).unwrap() - &M::identity(2)).max_abs() < 1e-15);
        let eig = hermitian_eig(&phi.block_matrix(2).unwrap()).unwrap();
        assert!(eig.values[0].abs() < 1e-12);
        assert!(eig.values[1..].iter().all(|v| (v - 2.0).abs() < 1e-12));
        assert!(choi_diff(&phi, &bhat_map(3, -1.0, 2.0).unwrap()) < 1e-12);
        assert!(choi_map::<f64>(1).is_err());
    }

    #[test]
    fn tomiyama_examples() {
        let phi = tomiyama_map::<f64>(3, 0.5).unwrap();
        let eig = hermitian_eig(&phi.block_matrix(2).unwrap()).unwrap();
        for want in [1.0 / 6.0, 1.0 / 6.0 + 1.0] {
            assert!(eig.values.iter().any(|v| (v - want).abs() < 1e-12), "{want}");
        }
        assert!(choi_diff(&tomiyama_map(3, 0.0).unwrap(), &identity_map(3).unwrap()) < 1e-15);
        let depol = tomiyama_map::<f64>(3, 1.0).unwrap();
        assert!((depol.choi() - &M::identity(9).scale_real(1.0 / 3.0)).max_abs() < 1e-15);
        assert!(positivity_profile(&depol, PSD_TOL).unwrap().completely_positive);
        for lambda in [-0.3, 0.5, 1.1, 1.5] {
            let t = tomiyama_map::<f64>(4, lambda).unwrap();
            assert!(choi_diff(&t, &bhat_map(4, 1.0 - lambda, lambda / 4.0).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn tomiyama_profiles() {
        let p = positivity_profile(&tomiyama_map::<f64>(3, 1.1).unwrap(), PSD_TOL).unwrap();
        assert_eq!(p.max_k, 3);
        assert!(p.completely_positive);
        let p = positivity_profile(&tomiyama_map::<f64>(3, 1.2).unwrap(), PSD_TOL).unwrap();
        assert_eq!(p.max_k, 2);
        assert!(p.per_k[1].min_eigenvalue.abs() < 1e-9);
    }

    #[test]
    fn bhat_examples() {
        assert!(choi_diff(&bhat_map(3, 1.0, 0.0).unwrap(), &identity_map(3).unwrap()) < 1e-15);
        let (alpha, beta) = (0.7, -1.3);
        let phi = bhat_map::<f64>(3, alpha, beta).unwrap();
        let dec = decompose_equivariant(phi.choi(), 3, 0, 1).unwrap();
        assert!(dec.residual < 1e-10);
        let e = Permutation::identity(2);
        let t = Permutation::transposition(2, 0, 1);
        assert!((dec.spec.get(&t) - c(alpha, 0.0)).norm() < 1e-10);
        assert!((dec.spec.get(&e) - c(beta, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn collins_examples() {
        let phi = collins_map::<f64>(3, 2.0, -1.0, false).unwrap();
        assert_eq!(phi.equivariance(), Equivariance::Ab { a: 1, b: 1 });
        let dec = decompose_equivariant(phi.choi(), 3, 1, 1).unwrap();
        let want = collins_spec::<f64>(3, 2.0, -1.0, 0.0).unwrap();
        assert!(dec.residual < 1e-9);
        for (x, y) in dec.spec.coeffs().iter().zip(want.coeffs()) {
            assert!((x - y).norm() < 1e-9);
        }
        let three = collins3_map::<f64>(3, 2.0, -1.0, 0.0, false).unwrap();
        assert!(choi_diff(&phi, &three) < 1e-15);
        let built = build_equivariant(&collins_spec::<f64>(3, 0.3, 0.1, 0.5).unwrap()).unwrap();
        assert!(choi_diff(&built, &collins3_map(3, 0.3, 0.1, 0.5, false).unwrap()) < 1e-12);
        assert!(matches!(collins_map::<f64>(2, 1.0, 1.0, false), Err(Error::Parameter(_))));
        let small = collins_map::<f64>(2, 1.0, 1.0, true).unwrap();
        assert!(small.label().contains("unvalidated"));
    }

    #[test]
    fn collins_is_affine_in_parameters() {
        let base = collins_map::<f64>(3, 0.0, 0.0, false).unwrap();
        let da = &collins_map::<f64>(3, 1.0, 0.0, false).unwrap().choi().clone() - base.choi();
        let db = &collins_map::<f64>(3, 0.0, 1.0, false).unwrap().choi().clone() - base.choi();
        for (a, b) in [(2.0, -1.0), (-0.5, 3.0), (1.5, 1.5)] {
            let phi = collins_map::<f64>(3, a, b, false).unwrap();
            let pred = &(base.choi() + &da.scale_real(a)) + &db.scale_real(b);
            assert!((phi.choi() - &pred).frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn conjugation_tags() {
        let id = conjugation_map(&M::identity(3)).unwrap();
        assert!(choi_diff(&id, &identity_map(3).unwrap()) < 1e-15);
        assert_eq!(id.equivariance(), Equivariance::Unitary);

        let a = M::diag_real(&[1.0, 2.0]);
        let phi = conjugation_map(&a).unwrap();
        assert_eq!(phi.equivariance(), Equivariance::EquivariantOnly);
        assert!(crate::positivity::is_psd(phi.choi(), PSD_TOL).unwrap().psd);
        let r = check_ab_equivariance(phi.choi(), 2, 0, 1, 20, Seed(3), 1e-9).unwrap();
        assert!(r.max_rel_commutator_norm > 1e-3);

        let u: M = crate::random::haar_unitary(3, Seed(12));
        assert_eq!(conjugation_map(&u).unwrap().equivariance(), Equivariance::Unitary);

        let singular = M::diag_real(&[1.0, 0.0]);
        assert_eq!(conjugation_map(&singular).unwrap().equivariance(), Equivariance::NotEquivariant);
        assert!(conjugation_map(&M::zeros(2, 3)).is_err());
    }

    #[test]
    fn rank_counterexamples() {
        let sum = id_plus_transpose_map::<f64>(2).unwrap();
        assert_eq!(sum.equivariance(), Equivariance::NotEquivariant);
        let cands = counterexample_candidates::<f64>(2);
        let (u, x) = &cands[0];
        let rot = &(u * x) * &u.adjoint();
        assert!((&sum.apply(&rot).unwrap() - &M::identity(2)).max_abs() < 1e-12);
        assert_eq!(matrix_rank(&sum.apply(x).unwrap(), 1e-8), 1);

        let skew = skew_shift_map::<f64>(2).unwrap();
        let (u, x) = &cands[1];
        let rot = &(u * x) * &u.adjoint();
        let want = M::from_real_rows(&[&[0.0, 2.0], &[-2.0, 0.0]]);
        assert!((&skew.apply(&rot).unwrap() - &want).max_abs() < 1e-12);
        assert!(skew.apply(x).unwrap().max_abs() < 1e-12);
        assert!(crate::positivity::is_psd(skew.choi(), PSD_TOL).unwrap().psd);
        assert!(id_plus_transpose_map::<f64>(3).is_ok());
        assert!(skew_shift_map::<f64>(3).is_ok());
    }

    #[test]
    fn spec_grammar() {
        let e = parse_map_spec::<f64>("tomiyama:n=3,lambda=1.2").unwrap();
        assert_eq!(e.name, "tomiyama");
        assert_eq!(e.params["lambda"], "1.2");
        assert_eq!(e.declared(), Equivariance::Ab { a: 0, b: 1 });
        assert!(parse_map_spec::<f64>("collins:n=3,alpha=2,beta=-1").is_ok());
        assert!(parse_map_spec::<f64>("collins3:n=3,alpha=2,beta=-1,gamma=0.5").is_ok());
        assert!(parse_map_spec::<f64>("bhat:n=3,alpha=1,beta=0").is_ok());
        for bad in ["nope:n=3", "choi", "choi:n=x", "choi:n=3,m=2", "choi:n=3,n=4", "tomiyama:n=3", "choi:n"] {
            assert!(matches!(parse_map_spec::<f64>(bad), Err(Error::Parse(_))), "{bad}");
        }
        let err = parse_map_spec::<f64>("nope:n=3").unwrap_err().to_string();
        assert!(err.contains("tomiyama:n=N,lambda=L"));
    }

    #[test]
    fn file_specs() {
        let dir = std::env::temp_dir().join(format!("equimap-zoo-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let a_path = dir.join("a.json");
        crate::io::write_json(&a_path, &MatrixJson::from(M::diag_real(&[1.0, 2.0]))).unwrap();
        let e = parse_map_spec::<f64>(&format!("conj:file={}", a_path.display())).unwrap();
        assert_eq!(e.declared(), Equivariance::EquivariantOnly);

        let m_path = dir.join("m.json");
        crate::io::write_json(&m_path, &MapJson::from(choi_map::<f64>(3).unwrap())).unwrap();
        let e = parse_map_spec::<f64>(&format!("file:{}", m_path.display())).unwrap();
        assert_eq!(e.declared(), Equivariance::Ab { a: 0, b: 1 });

        let mut lie = MapJson::from(skew_shift_map::<f64>(2).unwrap());
        lie.equivariance = Some(Equivariance::Ab { a: 0, b: 1 });
        crate::io::write_json(&m_path, &lie).unwrap();
        assert!(matches!(
            parse_map_spec::<f64>(&format!("file:{}", m_path.display())),
            Err(Error::Contract(_))
        ));
        lie.equivariance = Some(Equivariance::Unitary);
        crate::io::write_json(&m_path, &lie).unwrap();
        assert!(matches!(
            parse_map_spec::<f64>(&format!("file:{}", m_path.display())),
            Err(Error::Contract(_))
        ));
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn ranges() {
        let r: ParamRange = "-1:1:5".parse().unwrap();
        assert_eq!(r.values(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!("2:3:1".parse::<ParamRange>().unwrap().values(), vec![2.0]);
        assert!("1:2".parse::<ParamRange>().is_err());
        assert!("1:2:0".parse::<ParamRange>().is_err());
    }

    #[test]
    fn scan_regions() {
        let pts = scan_collins(3, "0:4:3".parse().unwrap(), "-1:1:3".parse().unwrap(), 0.0, PSD_TOL).unwrap();
        assert_eq!(pts.len(), 9);
        for p in &pts {
            let phi = collins_map::<f64>(3, p.alpha, p.beta, false).unwrap();
            let k1 = k_positivity(&phi, 1, PSD_TOL).unwrap();
            assert_eq!(k1.psd, p.region != Region::NotPositive);
        }
    }
}
