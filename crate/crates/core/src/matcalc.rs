//! Finitely supported matrices over a block algebra with the convolution
//! product.
//!
//! An element is an ℕ×ℕ matrix with finitely many nonzero entries from the
//! algebra, where the entry at `(i, j)` must lie in the corner
//! `δ^i(1)·A·δ^j(1)`. The algebra `A` embeds at the `(0,0)` slot and a
//! canonical partial isometry `u` sits at `(0,1)` with value `δ(1)`;
//! together they generate everything. Multiplication is the convolution
//!
//! ```text
//! a ⋆ b = a · Σ_{j≥0} Λ^j(b) + Σ_{j≥1} Λ^j(a) · b
//! ```
//!
//! where `·` is the ordinary matrix product and `Λ` shifts a matrix one
//! step down the main diagonal while applying `δ` to its entries. The sums
//! are finite: once `j` exceeds the support of the fixed factor the
//! products vanish, so truncating there is exact, not approximate.
//!
//! Matrices are graded by diagonals: the component with entries at
//! `j − i = k` is the `k`-th spectral subspace of the gauge action. The
//! same matrix is therefore indexed in two ways, by position `(i, j)` and
//! by diagonal-and-offset `(n, k)`; both views appear below.

use std::collections::BTreeMap;

use crate::algebra::AlgebraElement;
use crate::endo::Endomorphism;
use crate::exec;
use crate::{Complex, Error, Result};

/// Position of the coefficient `n` on diagonal `k` in matrix coordinates.
#[inline]
pub fn diag_position(n: usize, k: i64) -> (usize, usize) {
    if k >= 0 {
        (n, n + k as usize)
    } else {
        (n + (-k) as usize, n)
    }
}

/// Finitely supported matrix over the coefficient algebra, tied to a
/// dynamical system `(A, δ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CpMatrix {
    sys: Endomorphism,
    entries: BTreeMap<(usize, usize), AlgebraElement>,
}

impl CpMatrix {
    pub fn zero(sys: &Endomorphism) -> Self {
        CpMatrix { sys: sys.clone(), entries: BTreeMap::new() }
    }

    /// Embed an algebra element at the `(0,0)` corner.
    pub fn embed(sys: &Endomorphism, a: &AlgebraElement) -> Self {
        assert_eq!(a.algebra(), sys.algebra(), "element belongs to a different algebra");
        let mut m = CpMatrix::zero(sys);
        m.insert_raw(0, 0, a.clone());
        m
    }

    /// The canonical partial isometry: `δ(1)` at position `(0,1)`.
    pub fn u(sys: &Endomorphism) -> Self {
        let mut m = CpMatrix::zero(sys);
        m.insert_raw(0, 1, sys.unit_projection(1));
        m
    }

    /// ⋆-power of `u`: the projection `δ^k(1)` at position `(0,k)`.
    /// `u_pow(0)` is the multiplicative identity `embed(1)`.
    pub fn u_pow(sys: &Endomorphism, k: usize) -> Self {
        let mut m = CpMatrix::zero(sys);
        m.insert_raw(0, k, sys.unit_projection(k));
        m
    }

    /// Build from explicit entries, verifying the corner constraint.
    pub fn from_entries(
        sys: &Endomorphism,
        entries: impl IntoIterator<Item = ((usize, usize), AlgebraElement)>,
    ) -> Result<Self> {
        let mut m = CpMatrix::zero(sys);
        for ((i, j), v) in entries {
            if v.algebra() != sys.algebra() {
                return Err(Error::AlgebraMismatch(format!(
                    "entry ({i},{j}) belongs to a different algebra"
                )));
            }
            let projected = Self::project_corner(sys, i, j, &v);
            let residual = (&projected - &v).norm();
            if residual > sys.tol().get() {
                return Err(Error::CornerViolation { i, j, residual });
            }
            let prev = m.entries.remove(&(i, j));
            let sum = match prev {
                Some(p) => &p + &v,
                None => v,
            };
            m.insert_raw(i, j, sum);
        }
        Ok(m)
    }

    /// Corner projection δ^i(1)·v·δ^j(1); used by constructors and tests.
    pub fn project_corner(
        sys: &Endomorphism,
        i: usize,
        j: usize,
        v: &AlgebraElement,
    ) -> AlgebraElement {
        let left = sys.unit_projection(i);
        let right = sys.unit_projection(j);
        &(&left * v) * &right
    }

    fn insert_raw(&mut self, i: usize, j: usize, v: AlgebraElement) {
        if !v.is_zero(self.sys.tol().get()) {
            self.entries.insert((i, j), v);
        }
    }

    pub fn system(&self) -> &Endomorphism {
        &self.sys
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &AlgebraElement)> {
        self.entries.iter()
    }

    pub fn entry(&self, i: usize, j: usize) -> Option<&AlgebraElement> {
        self.entries.get(&(i, j))
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest row or column index in the support.
    pub fn max_index(&self) -> Option<usize> {
        self.entries.keys().map(|&(i, j)| i.max(j)).max()
    }

    fn max_col(&self) -> Option<usize> {
        self.entries.keys().map(|&(_, j)| j).max()
    }

    fn max_row(&self) -> Option<usize> {
        self.entries.keys().map(|&(i, _)| i).max()
    }

    /// Largest residual of the corner constraint over the support.
    pub fn corner_residual(&self) -> f64 {
        self.entries
            .iter()
            .map(|(&(i, j), v)| (&Self::project_corner(&self.sys, i, j, v) - v).norm())
            .fold(0.0, f64::max)
    }

    /// Entrywise supremum norm, used for support pruning and comparisons.
    pub fn sup_entry_norm(&self) -> f64 {
        self.entries.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    fn assert_same_system(&self, other: &CpMatrix) {
        assert!(self.sys.same_system(&other.sys), "operands from different systems");
    }

    pub fn add(&self, other: &CpMatrix) -> CpMatrix {
        self.assert_same_system(other);
        let mut out = self.clone();
        for (&(i, j), v) in &other.entries {
            let sum = match out.entries.remove(&(i, j)) {
                Some(p) => &p + v,
                None => v.clone(),
            };
            out.insert_raw(i, j, sum);
        }
        out
    }

    pub fn sub(&self, other: &CpMatrix) -> CpMatrix {
        self.add(&other.scale(Complex::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex) -> CpMatrix {
        let mut out = CpMatrix::zero(&self.sys);
        for (&(i, j), v) in &self.entries {
            out.insert_raw(i, j, v.scale(c));
        }
        out
    }

    /// Involution: transpose the support and adjoin the entries.
    pub fn adjoint(&self) -> CpMatrix {
        let mut out = CpMatrix::zero(&self.sys);
        for (&(i, j), v) in &self.entries {
            out.insert_raw(j, i, v.adjoint());
        }
        out
    }

    /// The diagonal shift: entry `(i,j)` moves to `(i+1,j+1)` through `δ`.
    pub fn shift(&self) -> CpMatrix {
        let mut out = CpMatrix::zero(&self.sys);
        for (&(i, j), v) in &self.entries {
            out.insert_raw(i + 1, j + 1, self.sys.apply(v));
        }
        out
    }

    /// Plain (non-convolution) matrix product; the shift is multiplicative
    /// for it, which is what makes the convolution associative.
    pub fn matmul(&self, other: &CpMatrix) -> CpMatrix {
        self.assert_same_system(other);
        // group the right factor by row for the contraction over k
        let mut by_row: BTreeMap<usize, Vec<(usize, &AlgebraElement)>> = BTreeMap::new();
        for (&(k, j), v) in &other.entries {
            by_row.entry(k).or_default().push((j, v));
        }
        let mut acc: BTreeMap<(usize, usize), AlgebraElement> = BTreeMap::new();
        for (&(i, k), a) in &self.entries {
            if let Some(row) = by_row.get(&k) {
                for &(j, b) in row {
                    let prod = a * b;
                    match acc.get_mut(&(i, j)) {
                        Some(s) => *s = &*s + &prod,
                        None => {
                            acc.insert((i, j), prod);
                        }
                    }
                }
            }
        }
        let mut out = CpMatrix::zero(&self.sys);
        for ((i, j), v) in acc {
            out.insert_raw(i, j, v);
        }
        out
    }

    /// Entry-pair count below which fanning the shift summands out to
    /// rayon costs more than it saves.
    const STAR_PAR_MIN_PAIRS: usize = 10_000;

    /// Convolution product. Uses rayon for the independent shift summands
    /// when the `parallel` feature is enabled and the work is large enough;
    /// the reduction order is fixed either way, so results are identical.
    pub fn star(&self, other: &CpMatrix) -> CpMatrix {
        let big = self.nnz() * other.nnz() >= Self::STAR_PAR_MIN_PAIRS;
        self.star_impl(other, cfg!(feature = "parallel") && big)
    }

    /// Convolution product on a single thread, regardless of features.
    pub fn star_seq(&self, other: &CpMatrix) -> CpMatrix {
        self.star_impl(other, false)
    }

    /// Convolution product with the parallel path forced on.
    #[cfg(feature = "parallel")]
    pub fn par_star(&self, other: &CpMatrix) -> CpMatrix {
        self.star_impl(other, true)
    }

    fn star_impl(&self, other: &CpMatrix, parallel: bool) -> CpMatrix {
        self.assert_same_system(other);
        if self.is_zero() || other.is_zero() {
            return CpMatrix::zero(&self.sys);
        }
        // a·Λ^j(b) dies once j exceeds the columns of a; Λ^j(a)·b once j
        // exceeds the rows of b.
        let t1 = self.max_col().unwrap_or(0);
        let t2 = other.max_row().unwrap_or(0);

        // Precompute the shift towers once; each level feeds the next.
        let mut shifted_b = Vec::with_capacity(t1 + 1);
        shifted_b.push(other.clone());
        for j in 1..=t1 {
            let next = shifted_b[j - 1].shift();
            shifted_b.push(next);
        }
        let mut shifted_a = Vec::with_capacity(t2 + 1);
        shifted_a.push(self.clone());
        for j in 1..=t2 {
            let next = shifted_a[j - 1].shift();
            shifted_a.push(next);
        }

        let mut tasks: Vec<(&CpMatrix, &CpMatrix)> = Vec::new();
        for b in shifted_b.iter() {
            tasks.push((self, b));
        }
        for a in shifted_a.iter().skip(1) {
            tasks.push((a, other));
        }

        let run = |(a, b): (&CpMatrix, &CpMatrix)| a.matmul(b);
        let partials: Vec<CpMatrix> = if parallel {
            exec::map_ordered(tasks, run)
        } else {
            tasks.into_iter().map(run).collect()
        };
        // deterministic merge in task order
        let mut out = CpMatrix::zero(&self.sys);
        for p in partials {
            out = out.add(&p);
        }
        out
    }

    /// Indices of diagonals with at least one entry, sorted.
    pub fn diagonals(&self) -> Vec<i64> {
        let mut ks: Vec<i64> = self.entries.keys().map(|&(i, j)| j as i64 - i as i64).collect();
        ks.sort_unstable();
        ks.dedup();
        ks
    }

    /// The component supported on the diagonal `j − i = k`.
    pub fn diagonal(&self, k: i64) -> KDiagonal {
        let mut coeffs = BTreeMap::new();
        for (&(i, j), v) in &self.entries {
            if j as i64 - i as i64 == k {
                coeffs.insert(i.min(j), v.clone());
            }
        }
        KDiagonal { sys: self.sys.clone(), k, coeffs }
    }

    /// Fourier coefficient map: carry diagonal `k` onto the main diagonal
    /// and delete everything else. The result lives in the 0-graded part.
    pub fn fourier_coefficient(&self, k: i64) -> CpMatrix {
        self.diagonal(k).to_zero_diagonal().to_matrix()
    }

    /// Unique expansion into Fourier coefficients: pairs `(k, a_k)` with
    /// `a_k` 0-diagonal, reassembling as
    /// `Σ_{k<0} u*^{⋆|k|} ⋆ a_k + Σ_{k≥0} a_k ⋆ u^{⋆k}`.
    pub fn fourier_expansion(&self) -> Vec<(i64, CpMatrix)> {
        self.diagonals()
            .into_iter()
            .map(|k| (k, self.fourier_coefficient(k)))
            .collect()
    }

    /// Reassemble a matrix from its Fourier expansion.
    pub fn from_fourier_expansion(sys: &Endomorphism, terms: &[(i64, CpMatrix)]) -> CpMatrix {
        let mut out = CpMatrix::zero(sys);
        for (k, coeff) in terms {
            let part = if *k >= 0 {
                coeff.star(&CpMatrix::u_pow(sys, *k as usize))
            } else {
                CpMatrix::u_pow(sys, (-*k) as usize).adjoint().star(coeff)
            };
            out = out.add(&part);
        }
        out
    }

    /// Gauge automorphism: scale the `k`-diagonal by `z^k` for `|z| = 1`.
    pub fn gauge_twist(&self, z: Complex) -> Result<CpMatrix> {
        let modulus = z.norm();
        if (modulus - 1.0).abs() > self.sys.tol().get().max(1e-12) {
            return Err(Error::NotUnimodular(modulus));
        }
        let mut out = CpMatrix::zero(&self.sys);
        for (&(i, j), v) in &self.entries {
            let k = j as i64 - i as i64;
            let factor = z.powi(k as i32);
            out.insert_raw(i, j, v.scale(factor));
        }
        Ok(out)
    }

    /// Largest entry deviation between two matrices.
    pub fn entry_distance(&self, other: &CpMatrix) -> f64 {
        self.sub(other).sup_entry_norm()
    }
}

/// One diagonal of a [`CpMatrix`]: the degree `k` and the coefficients
/// `n ↦ a_n`, where coefficient `n` sits at [`diag_position`]`(n, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KDiagonal {
    sys: Endomorphism,
    k: i64,
    coeffs: BTreeMap<usize, AlgebraElement>,
}

impl KDiagonal {
    pub fn new(
        sys: &Endomorphism,
        k: i64,
        coeffs: impl IntoIterator<Item = (usize, AlgebraElement)>,
    ) -> Result<Self> {
        let entries = coeffs
            .into_iter()
            .map(|(n, v)| (diag_position(n, k), v))
            .collect::<Vec<_>>();
        let m = CpMatrix::from_entries(sys, entries)?;
        Ok(m.diagonal(k))
    }

    pub fn system(&self) -> &Endomorphism {
        &self.sys
    }

    pub fn degree(&self) -> i64 {
        self.k
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (usize, &AlgebraElement)> {
        self.coeffs.iter().map(|(&n, v)| (n, v))
    }

    pub fn coefficient(&self, n: usize) -> Option<&AlgebraElement> {
        self.coeffs.get(&n)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest coefficient index in the support.
    pub fn max_coeff_index(&self) -> Option<usize> {
        self.coeffs.keys().next_back().copied()
    }

    /// View as a full matrix again.
    pub fn to_matrix(&self) -> CpMatrix {
        let mut out = CpMatrix::zero(&self.sys);
        for (&n, v) in &self.coeffs {
            let (i, j) = diag_position(n, self.k);
            out.insert_raw(i, j, v.clone());
        }
        out
    }

    /// The same coefficients viewed on the main diagonal.
    pub fn to_zero_diagonal(&self) -> KDiagonal {
        KDiagonal { sys: self.sys.clone(), k: 0, coeffs: self.coeffs.clone() }
    }

    /// Adjoint diagonal: degree flips sign, coefficients are adjoined.
    pub fn adjoint(&self) -> KDiagonal {
        KDiagonal {
            sys: self.sys.clone(),
            k: -self.k,
            coeffs: self.coeffs.iter().map(|(&n, v)| (n, v.adjoint())).collect(),
        }
    }
}
