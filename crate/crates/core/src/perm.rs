//! Symmetric group elements and their tensor representation.
//!
//! Permutations are stored 0-based. Text I/O uses 1-based cycle notation,
//! e.g. `(1 2 3)(4 5)`, with the identity printed as `()`.
//!
//! `sigma_rep(π)` permutes tensor factors: the factor in input slot `j` ends
//! up in output slot `π(j)`, equivalently output slot `s` carries input slot
//! `π⁻¹(s)`. It is a homomorphism: `σ(π∘τ) = σ(π)·σ(τ)`.

use std::fmt;
use std::str::FromStr;

use num_traits::One;

use crate::error::{ensure, Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Real;
use crate::tensor::TensorShape;

/// Largest degree accepted by [`enumerate_sym`].
pub const MAX_DEGREE: usize = 6;
/// Largest tensor dimension `n^k` for dense representation matrices.
pub const MAX_TENSOR_DIM: usize = 1024;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Self {
            images: (0..degree).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            ensure!(
                i < images.len() && !seen[i],
                Parameter,
                "{images:?} is not a bijection on 0..{}",
                images.len()
            );
            seen[i] = true;
        }
        Ok(Self { images })
    }

    /// Transposition of the 0-based points `i` and `j`.
    pub fn transposition(degree: usize, i: usize, j: usize) -> Self {
        let mut images: Vec<usize> = (0..degree).collect();
        images.swap(i, j);
        Self { images }
    }

    /// Builds from 0-based cycles.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<usize> = (0..degree).collect();
        let mut used = vec![false; degree];
        for cycle in cycles {
            for (pos, &p) in cycle.iter().enumerate() {
                ensure!(p < degree, Parse, "point {} exceeds degree {degree}", p + 1);
                ensure!(!used[p], Parse, "point {} appears twice", p + 1);
                used[p] = true;
                images[p] = cycle[(pos + 1) % cycle.len()];
            }
        }
        Ok(Self { images })
    }

    /// Parses 1-based cycle notation for a permutation of the given degree.
    /// Inside a cycle, points are whitespace- or comma-separated; when every
    /// point is a single digit they may also be packed, as in `(123)`.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Self> {
        let trimmed = text.trim();
        let mut cycles = Vec::new();
        let mut rest = trimmed;
        if rest.is_empty() {
            return Err(Error::Parse("empty permutation text".into()));
        }
        while !rest.is_empty() {
            ensure!(
                rest.starts_with('('),
                Parse,
                "expected '(' in {trimmed:?} at byte {}",
                trimmed.len() - rest.len()
            );
            let close = rest
                .find(')')
                .ok_or_else(|| Error::Parse(format!("unclosed cycle in {trimmed:?}")))?;
            let body = rest[1..close].trim();
            let tokens: Vec<&str> = body
                .split(|ch: char| ch.is_whitespace() || ch == ',')
                .filter(|t| !t.is_empty())
                .collect();
            let pieces: Vec<String> = if tokens.len() == 1 && tokens[0].len() > 1 && degree <= 9 {
                tokens[0].chars().map(String::from).collect()
            } else {
                tokens.iter().map(|t| t.to_string()).collect()
            };
            let mut cycle = Vec::with_capacity(pieces.len());
            for p in pieces {
                let v: usize = p
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad point {p:?} in {trimmed:?}")))?;
                ensure!(v >= 1, Parse, "points are 1-based, got 0 in {trimmed:?}");
                cycle.push(v - 1);
            }
            if !cycle.is_empty() {
                cycles.push(cycle);
            }
            rest = rest[close + 1..].trim_start();
        }
        Self::from_cycles(degree, &cycles)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.degree(), other.degree(), "degree mismatch in compose");
        Self {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.degree()];
        for (i, &p) in self.images.iter().enumerate() {
            images[p] = i;
        }
        Self { images }
    }

    /// Disjoint cycles including fixed points, each starting at its smallest point,
    /// ordered by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut p = self.images[start];
            while p != start {
                seen[p] = true;
                cycle.push(p);
                p = self.images[p];
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_count(&self) -> usize {
        self.cycles().len()
    }

    /// Cycle lengths in descending order.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }

    /// Lexicographic successor of the image array, `None` at the last permutation.
    pub fn next_lex(&self) -> Option<Self> {
        let mut a = self.images.clone();
        let n = a.len();
        if n < 2 {
            return None;
        }
        let mut i = n - 1;
        while i > 0 && a[i - 1] >= a[i] {
            i -= 1;
        }
        if i == 0 {
            return None;
        }
        let mut j = n - 1;
        while a[j] <= a[i - 1] {
            j -= 1;
        }
        a.swap(i - 1, j);
        a[i..].reverse();
        Some(Self { images: a })
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for cycle in self.cycles().into_iter().filter(|c| c.len() > 1) {
            let body: Vec<String> = cycle.iter().map(|p| (p + 1).to_string()).collect();
            write!(f, "({})", body.join(" "))?;
            wrote = true;
        }
        if !wrote {
            write!(f, "()")?;
        }
        Ok(())
    }
}

/// Parses cycle notation, taking the degree to be the largest point mentioned.
impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let degree = s
            .split(|ch: char| !ch.is_ascii_digit())
            .filter_map(|t| t.parse::<usize>().ok())
            .max()
            .unwrap_or(1);
        // Packed single-digit cycles such as "(123)" parse as one large number above.
        let degree = if degree > 9 && !s.contains(|ch: char| ch.is_whitespace() || ch == ',') {
            s.chars().filter_map(|ch| ch.to_digit(10)).max().unwrap_or(1) as usize
        } else {
            degree
        };
        Self::parse_cycles(s, degree)
    }
}

/// All of `S_k` in lexicographic order of image arrays; the identity comes first.
pub fn enumerate_sym(k: usize) -> Result<Vec<Permutation>> {
    ensure!(
        (1..=MAX_DEGREE).contains(&k),
        Capacity,
        "symmetric group degree {k} outside 1..={MAX_DEGREE}"
    );
    let mut out = Vec::new();
    let mut cur = Some(Permutation::identity(k));
    while let Some(p) = cur {
        cur = p.next_lex();
        out.push(p);
    }
    Ok(out)
}

/// Position of `π` in [`enumerate_sym`] order.
pub fn lex_rank(pi: &Permutation) -> usize {
    let n = pi.degree();
    let mut rank = 0;
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut fact: usize = (1..n).product::<usize>().max(1);
    for (pos, &v) in pi.images().iter().enumerate() {
        let idx = remaining.iter().position(|&r| r == v).expect("bijection");
        rank += idx * fact;
        remaining.remove(idx);
        if pos + 1 < n {
            fact /= n - 1 - pos;
        }
    }
    rank
}

/// `n^k x n^k` 0/1 matrix of `σ_k(π)` on `(C^n)^{⊗k}`.
pub fn sigma_rep<T: Real>(pi: &Permutation, n: usize) -> Result<Matrix<T>> {
    let k = pi.degree();
    let shape = TensorShape::new(k, n);
    let dim = shape.total();
    ensure!(
        dim <= MAX_TENSOR_DIM,
        Capacity,
        "tensor dimension {n}^{k} = {dim} exceeds {MAX_TENSOR_DIM}"
    );
    let mut m = Matrix::zeros(dim, dim);
    let mut out = vec![0; k];
    for col in 0..dim {
        let input = shape.unflatten(col);
        for (j, &d) in input.iter().enumerate() {
            out[pi.apply(j)] = d;
        }
        m[(shape.flatten(&out), col)] = num_complex::Complex::one();
    }
    Ok(m)
}

/// `G[π][τ] = Tr(σ(π)* σ(τ)) = n^{cycles(π⁻¹∘τ)}`, rows and columns in
/// [`enumerate_sym`] order. Entries are exact integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramMatrix {
    degree: usize,
    n: usize,
    perms: Vec<Permutation>,
    entries: Vec<u64>,
}

impl GramMatrix {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        let perms = enumerate_sym(k)?;
        let size = perms.len();
        let inverses: Vec<Permutation> = perms.iter().map(Permutation::inverse).collect();
        let mut entries = Vec::with_capacity(size * size);
        for inv in &inverses {
            for tau in &perms {
                entries.push((n as u64).pow(inv.compose(tau).cycle_count() as u32));
            }
        }
        Ok(Self {
            degree: k,
            n,
            perms,
            entries,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn leg_dim(&self) -> usize {
        self.n
    }

    pub fn perms(&self) -> &[Permutation] {
        &self.perms
    }

    pub fn size(&self) -> usize {
        self.perms.len()
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.size() + j]
    }

    pub fn to_matrix<T: Real>(&self) -> Matrix<T> {
        Matrix::from_fn(self.size(), self.size(), |i, j| {
            num_complex::Complex::new(T::lit(self.get(i, j) as f64), T::zero())
        })
    }

    pub fn numeric_rank(&self, tol: f64) -> usize {
        crate::linalg::matrix_rank(&self.to_matrix::<f64>(), tol)
    }
}

pub fn gram_matrix(k: usize, n: usize) -> Result<GramMatrix> {
    GramMatrix::new(k, n)
}
