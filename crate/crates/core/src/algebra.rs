//! Finite-dimensional C*-algebras as direct sums of matrix blocks.
//!
//! Every finite-dimensional C*-algebra is a direct sum of full matrix
//! algebras, every closed two-sided ideal is a sum of a subset of the
//! blocks, and the operator norm of an element is the maximum of the
//! largest singular values of its blocks. Quotient norms reduce to maxima
//! over complementary blocks, which makes distances to ideals exact.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::{CMat, Complex};

/// Shape of a finite-dimensional C*-algebra: ordered block dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockAlgebra {
    block_dims: Vec<usize>,
}

impl BlockAlgebra {
    /// Algebra with the given block dimensions, e.g. `[2, 1]` for M2 ⊕ C.
    pub fn new(block_dims: Vec<usize>) -> Self {
        assert!(!block_dims.is_empty(), "an algebra needs at least one block");
        assert!(block_dims.iter().all(|&n| n >= 1), "block dimensions must be positive");
        BlockAlgebra { block_dims }
    }

    /// Commutative algebra C^p: `p` blocks of dimension one.
    pub fn commutative(points: usize) -> Self {
        BlockAlgebra::new(vec![1; points])
    }

    pub fn block_count(&self) -> usize {
        self.block_dims.len()
    }

    pub fn block_dim(&self, b: usize) -> usize {
        self.block_dims[b]
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    /// Total dimension Σ n_b² as a vector space.
    pub fn dimension(&self) -> usize {
        self.block_dims.iter().map(|n| n * n).sum()
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement {
            algebra: self.clone(),
            blocks: self.block_dims.iter().map(|&n| CMat::zeros(n, n)).collect(),
        }
    }

    pub fn identity(&self) -> AlgebraElement {
        AlgebraElement {
            algebra: self.clone(),
            blocks: self.block_dims.iter().map(|&n| CMat::identity(n, n)).collect(),
        }
    }

    /// Element from explicit block matrices.
    pub fn element(&self, blocks: Vec<CMat>) -> AlgebraElement {
        assert_eq!(blocks.len(), self.block_count(), "wrong number of blocks");
        for (b, m) in blocks.iter().enumerate() {
            assert_eq!(
                (m.nrows(), m.ncols()),
                (self.block_dims[b], self.block_dims[b]),
                "block {b} has the wrong shape"
            );
        }
        AlgebraElement { algebra: self.clone(), blocks }
    }

    /// Element of a commutative algebra from scalar values per point.
    pub fn scalar_element(&self, values: &[Complex]) -> AlgebraElement {
        assert!(self.block_dims.iter().all(|&n| n == 1), "algebra is not commutative");
        assert_eq!(values.len(), self.block_count());
        self.element(values.iter().map(|&v| CMat::from_element(1, 1, v)).collect())
    }

    /// Matrix unit e_{pq} in block `b`, zero elsewhere.
    pub fn matrix_unit(&self, b: usize, p: usize, q: usize) -> AlgebraElement {
        let mut x = self.zero();
        x.blocks[b][(p, q)] = Complex::new(1.0, 0.0);
        x
    }

    /// All matrix units; a spanning set of the algebra.
    pub fn spanning_set(&self) -> Vec<AlgebraElement> {
        let mut out = Vec::with_capacity(self.dimension());
        for b in 0..self.block_count() {
            for p in 0..self.block_dims[b] {
                for q in 0..self.block_dims[b] {
                    out.push(self.matrix_unit(b, p, q));
                }
            }
        }
        out
    }

    pub fn ideal<I: IntoIterator<Item = usize>>(&self, blocks_in: I) -> Ideal {
        let blocks_in: BTreeSet<usize> = blocks_in.into_iter().collect();
        if let Some(&b) = blocks_in.iter().next_back() {
            assert!(b < self.block_count(), "ideal references block {b} out of range");
        }
        Ideal { algebra: self.clone(), blocks_in }
    }

    pub fn zero_ideal(&self) -> Ideal {
        self.ideal([])
    }

    pub fn full_ideal(&self) -> Ideal {
        self.ideal(0..self.block_count())
    }

    /// Central projection with the identity on the blocks of `s`.
    pub fn block_unit(&self, s: &Ideal) -> AlgebraElement {
        assert_eq!(self, &s.algebra, "ideal belongs to a different algebra");
        let mut x = self.zero();
        for &b in &s.blocks_in {
            x.blocks[b] = CMat::identity(self.block_dims[b], self.block_dims[b]);
        }
        x
    }
}

/// Element of a [`BlockAlgebra`]: one complex matrix per block.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    algebra: BlockAlgebra,
    blocks: Vec<CMat>,
}

/// Largest singular value of a dense complex matrix.
pub fn operator_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

impl AlgebraElement {
    pub fn algebra(&self) -> &BlockAlgebra {
        &self.algebra
    }

    pub fn block(&self, b: usize) -> &CMat {
        &self.blocks[b]
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn block_mut(&mut self, b: usize) -> &mut CMat {
        &mut self.blocks[b]
    }

    pub fn adjoint(&self) -> AlgebraElement {
        AlgebraElement {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(|m| m.adjoint()).collect(),
        }
    }

    pub fn scale(&self, c: Complex) -> AlgebraElement {
        AlgebraElement {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(|m| m * c).collect(),
        }
    }

    /// C*-norm: max over blocks of the largest singular value.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(|m| operator_norm(m)).fold(0.0, f64::max)
    }

    /// Per-block operator norms.
    pub fn block_norms(&self) -> Vec<f64> {
        self.blocks.iter().map(operator_norm).collect()
    }

    /// Quotient norm ‖x + K‖: max over blocks outside `K`.
    ///
    /// Equals the distance inf {‖x − k‖ : k ∈ K} because the infimum is
    /// attained by matching `x` on the blocks of `K`.
    pub fn distance_to(&self, k: &Ideal) -> f64 {
        assert_eq!(&self.algebra, &k.algebra, "ideal belongs to a different algebra");
        self.blocks
            .iter()
            .enumerate()
            .filter(|(b, _)| !k.blocks_in.contains(b))
            .map(|(_, m)| operator_norm(m))
            .fold(0.0, f64::max)
    }

    /// True when every entry is negligible at the given tolerance.
    pub fn is_zero(&self, tol: f64) -> bool {
        self.norm() <= tol
    }

    /// Projection onto the range (column space) of this element, blockwise,
    /// discarding singular directions below `cutoff`.
    pub fn range_projection(&self, cutoff: f64) -> AlgebraElement {
        let blocks = self
            .blocks
            .iter()
            .map(|m| {
                let svd = m.clone().svd(true, false);
                let u = svd.u.as_ref().expect("svd with u requested");
                let mut proj = CMat::zeros(m.nrows(), m.nrows());
                for (i, &s) in svd.singular_values.iter().enumerate() {
                    if s > cutoff {
                        let col = u.column(i);
                        proj += col * col.adjoint();
                    }
                }
                proj
            })
            .collect();
        AlgebraElement { algebra: self.algebra.clone(), blocks }
    }

    fn assert_same_algebra(&self, other: &AlgebraElement) {
        assert_eq!(
            self.algebra, other.algebra,
            "elements belong to different algebras"
        );
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.assert_same_algebra(rhs);
        AlgebraElement {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.assert_same_algebra(rhs);
        AlgebraElement {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.assert_same_algebra(rhs);
        AlgebraElement {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a * b).collect(),
        }
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        self.scale(Complex::new(-1.0, 0.0))
    }
}

/// Closed two-sided ideal: the elements supported on a subset of blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ideal {
    algebra: BlockAlgebra,
    blocks_in: BTreeSet<usize>,
}

impl Ideal {
    pub fn algebra(&self) -> &BlockAlgebra {
        &self.algebra
    }

    pub fn blocks(&self) -> &BTreeSet<usize> {
        &self.blocks_in
    }

    pub fn contains_block(&self, b: usize) -> bool {
        self.blocks_in.contains(&b)
    }

    pub fn is_zero(&self) -> bool {
        self.blocks_in.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.blocks_in.len() == self.algebra.block_count()
    }

    /// Blocks shared with another ideal.
    pub fn intersection_blocks(&self, other: &Ideal) -> Vec<usize> {
        assert_eq!(self.algebra, other.algebra);
        self.blocks_in.intersection(&other.blocks_in).copied().collect()
    }

    /// Two ideals are orthogonal when they intersect trivially.
    pub fn is_orthogonal(&self, other: &Ideal) -> bool {
        self.intersection_blocks(other).is_empty()
    }

    /// The largest ideal orthogonal to this one: the complementary blocks.
    pub fn complement(&self) -> Ideal {
        let all: BTreeSet<usize> = (0..self.algebra.block_count()).collect();
        Ideal {
            algebra: self.algebra.clone(),
            blocks_in: all.difference(&self.blocks_in).copied().collect(),
        }
    }

    pub fn is_subset_of(&self, other: &Ideal) -> bool {
        assert_eq!(self.algebra, other.algebra);
        self.blocks_in.is_subset(&other.blocks_in)
    }

    /// True when the element lies in the ideal up to `tol`.
    pub fn contains_element(&self, x: &AlgebraElement, tol: f64) -> bool {
        x.distance_to(self) <= tol
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut blocks: Vec<String> = self.blocks_in.iter().map(|b| (b + 1).to_string()).collect();
        if blocks.is_empty() {
            blocks.push("-".into());
        }
        write!(f, "{{{}}}", blocks.join(","))
    }
}
