//! *-endomorphisms of block algebras.
//!
//! Up to unitary equivalence, a *-homomorphism between finite-dimensional
//! C*-algebras is determined by a matrix of multiplicities: target block
//! `b` is a unitary conjugate of a direct sum that contains `mult[b][i]`
//! copies of source block `i`, padded with zeros. Storing endomorphisms in
//! this normal form makes kernels, the projections `δ^m(1)` and the
//! propagation of block norms exact and combinatorial.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::algebra::{AlgebraElement, BlockAlgebra, Ideal};
use crate::{CMat, Complex, Error, Result, Tol};

#[derive(Debug)]
struct EndoData {
    algebra: BlockAlgebra,
    /// mult[target][source]
    mult: Vec<Vec<usize>>,
    /// One unitary per target block, size n_b × n_b.
    unitaries: Vec<CMat>,
    /// Zero padding per target block.
    slack: Vec<usize>,
    tol: Tol,
    /// Cached powers δ^m(1); write-once per key.
    unit_cache: Mutex<HashMap<usize, AlgebraElement>>,
}

/// A *-endomorphism in multiplicity normal form, together with its
/// algebra and the tolerance knob for the whole system. Cloning is cheap
/// and clones share the power cache.
#[derive(Debug, Clone)]
pub struct Endomorphism {
    data: Arc<EndoData>,
}

impl PartialEq for Endomorphism {
    fn eq(&self, other: &Self) -> bool {
        self.data.algebra == other.data.algebra
            && self.data.mult == other.data.mult
            && self.data.slack == other.data.slack
            && self.data.unitaries == other.data.unitaries
    }
}

impl Endomorphism {
    /// Build and validate an endomorphism from its normal form.
    ///
    /// Checks the dimension bookkeeping `Σ_i mult[b][i]·n_i + slack[b] = n_b`
    /// and unitarity of each `W_b` within the tolerance.
    pub fn new(
        algebra: BlockAlgebra,
        mult: Vec<Vec<usize>>,
        unitaries: Vec<CMat>,
        slack: Vec<usize>,
        tol: Tol,
    ) -> Result<Self> {
        let b_count = algebra.block_count();
        if mult.len() != b_count || unitaries.len() != b_count || slack.len() != b_count {
            return Err(Error::InvalidInput(format!(
                "normal form needs {b_count} rows of multiplicities, unitaries and slack"
            )));
        }
        for (b, row) in mult.iter().enumerate() {
            if row.len() != b_count {
                return Err(Error::InvalidInput(format!(
                    "multiplicity row {b} has length {}, expected {b_count}",
                    row.len()
                )));
            }
            let used: usize = row.iter().zip(algebra.block_dims()).map(|(m, n)| m * n).sum();
            if used + slack[b] != algebra.block_dim(b) {
                return Err(Error::InvalidInput(format!(
                    "block {b}: multiplicities fill {used} of {} dimensions with slack {}",
                    algebra.block_dim(b),
                    slack[b]
                )));
            }
            let w = &unitaries[b];
            let n = algebra.block_dim(b);
            if w.nrows() != n || w.ncols() != n {
                return Err(Error::InvalidInput(format!("unitary {b} has the wrong shape")));
            }
            let residual = (w * w.adjoint() - CMat::identity(n, n)).norm();
            if residual > tol.get().max(1e-9) {
                return Err(Error::InvalidInput(format!(
                    "matrix for block {b} is not unitary (residual {residual:.3e})"
                )));
            }
        }
        Ok(Endomorphism {
            data: Arc::new(EndoData {
                algebra,
                mult,
                unitaries,
                slack,
                tol,
                unit_cache: Mutex::new(HashMap::new()),
            }),
        })
    }

    /// Identity endomorphism.
    pub fn identity(algebra: BlockAlgebra, tol: Tol) -> Self {
        let b = algebra.block_count();
        let mut mult = vec![vec![0usize; b]; b];
        for (i, row) in mult.iter_mut().enumerate() {
            row[i] = 1;
        }
        let unitaries = algebra
            .block_dims()
            .iter()
            .map(|&n| CMat::identity(n, n))
            .collect();
        Endomorphism::new(algebra, mult, unitaries, vec![0; b], tol).expect("identity is valid")
    }

    /// The zero map: every block collapses to zero padding.
    pub fn zero(algebra: BlockAlgebra, tol: Tol) -> Self {
        let b = algebra.block_count();
        let mult = vec![vec![0usize; b]; b];
        let slack = algebra.block_dims().to_vec();
        let unitaries = algebra
            .block_dims()
            .iter()
            .map(|&n| CMat::identity(n, n))
            .collect();
        Endomorphism::new(algebra, mult, unitaries, slack, tol).expect("zero map is valid")
    }

    pub fn algebra(&self) -> &BlockAlgebra {
        &self.data.algebra
    }

    pub fn tol(&self) -> Tol {
        self.data.tol
    }

    pub fn multiplicity(&self, target: usize, source: usize) -> usize {
        self.data.mult[target][source]
    }

    pub fn multiplicities(&self) -> &[Vec<usize>] {
        &self.data.mult
    }

    pub fn slack(&self) -> &[usize] {
        &self.data.slack
    }

    pub fn unitaries(&self) -> &[CMat] {
        &self.data.unitaries
    }

    /// Structural identity of the underlying system; used to guard
    /// mixed-system arithmetic.
    pub fn same_system(&self, other: &Endomorphism) -> bool {
        Arc::ptr_eq(&self.data, &other.data) || self == other
    }

    /// Apply the endomorphism once.
    pub fn apply(&self, x: &AlgebraElement) -> AlgebraElement {
        assert_eq!(
            x.algebra(),
            &self.data.algebra,
            "element belongs to a different algebra"
        );
        let alg = &self.data.algebra;
        let blocks = (0..alg.block_count())
            .map(|b| {
                let n = alg.block_dim(b);
                let mut d = CMat::zeros(n, n);
                let mut offset = 0usize;
                for (i, &m) in self.data.mult[b].iter().enumerate() {
                    let ni = alg.block_dim(i);
                    for _ in 0..m {
                        d.view_mut((offset, offset), (ni, ni)).copy_from(x.block(i));
                        offset += ni;
                    }
                }
                // remaining `slack` rows stay zero
                let w = &self.data.unitaries[b];
                w * d * w.adjoint()
            })
            .collect();
        alg.element(blocks)
    }

    /// Apply the n-th power; `n = 0` is the identity.
    pub fn apply_n(&self, x: &AlgebraElement, n: usize) -> AlgebraElement {
        let mut y = x.clone();
        for _ in 0..n {
            y = self.apply(&y);
        }
        y
    }

    /// The projection δ^m(1), cached per exponent.
    pub fn unit_projection(&self, m: usize) -> AlgebraElement {
        if m == 0 {
            return self.data.algebra.identity();
        }
        {
            let cache = self.data.unit_cache.lock().unwrap();
            if let Some(p) = cache.get(&m) {
                return p.clone();
            }
        }
        let prev = self.unit_projection(m - 1);
        let p = self.apply(&prev);
        let mut cache = self.data.unit_cache.lock().unwrap();
        cache.entry(m).or_insert_with(|| p.clone());
        p
    }

    /// Kernel: the ideal of source blocks that no target block uses.
    pub fn kernel(&self) -> Ideal {
        let b_count = self.data.algebra.block_count();
        let blocks = (0..b_count)
            .filter(|&i| (0..b_count).all(|b| self.data.mult[b][i] == 0))
            .collect::<Vec<_>>();
        self.data.algebra.ideal(blocks)
    }

    /// Largest power worth taking: beyond it the projections δ^m(1)
    /// stabilize. Cheap bound used by callers that scan powers.
    pub fn is_unital(&self) -> bool {
        self.unit_projection(1) == self.data.algebra.identity()
    }
}

/// Result of checking two ideals against each other.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orthogonality {
    pub orthogonal: bool,
    /// Largest ideal orthogonal to the first argument.
    pub iperp: Ideal,
}

/// Orthogonality of `i` and `j`, and the largest ideal orthogonal to `i`.
pub fn orthogonality(i: &Ideal, j: &Ideal) -> Orthogonality {
    Orthogonality {
        orthogonal: i.is_orthogonal(j),
        iperp: i.complement(),
    }
}

/// A finite dynamical system on points: a partial map `ψ` on `{0,…,p−1}`.
///
/// Compiles to an endomorphism of C^p by `δ(f)(x) = f(ψ(x))` where `ψ(x)`
/// is defined and `0` elsewhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutativeSystem {
    map: Vec<Option<usize>>,
}

impl CommutativeSystem {
    pub fn new(points: usize, map: Vec<Option<usize>>) -> Result<Self> {
        if map.len() != points {
            return Err(Error::InvalidInput(format!(
                "map has {} entries for {points} points",
                map.len()
            )));
        }
        if let Some(bad) = map.iter().flatten().find(|&&v| v >= points) {
            return Err(Error::InvalidInput(format!("map value {bad} out of range")));
        }
        Ok(CommutativeSystem { map })
    }

    /// Total map given as images per point.
    pub fn total(images: &[usize]) -> Result<Self> {
        CommutativeSystem::new(images.len(), images.iter().map(|&v| Some(v)).collect())
    }

    pub fn points(&self) -> usize {
        self.map.len()
    }

    pub fn psi(&self, x: usize) -> Option<usize> {
        self.map[x]
    }

    /// Domain of ψ.
    pub fn domain(&self) -> Vec<usize> {
        (0..self.points()).filter(|&x| self.map[x].is_some()).collect()
    }

    /// Image ψ(Y).
    pub fn image(&self) -> Vec<usize> {
        let mut img: Vec<usize> = self.map.iter().flatten().copied().collect();
        img.sort_unstable();
        img.dedup();
        img
    }

    /// Compile to the multiplicity normal form on C^p.
    pub fn compile(&self, tol: Tol) -> Endomorphism {
        let p = self.points();
        let algebra = BlockAlgebra::commutative(p);
        let mut mult = vec![vec![0usize; p]; p];
        let mut slack = vec![0usize; p];
        for x in 0..p {
            match self.map[x] {
                Some(y) => mult[x][y] = 1,
                None => slack[x] = 1,
            }
        }
        let unitaries = vec![CMat::identity(1, 1); p];
        Endomorphism::new(algebra, mult, unitaries, slack, tol).expect("compiled form is valid")
    }
}

/// The extension of `(A, δ)` by an orthogonal ideal `J`: the system on
/// `(A/I) ⊕ (A/J)` whose kernel is unital.
#[derive(Debug, Clone)]
pub struct ExtendedSystem {
    endo: Endomorphism,
    /// Original blocks surviving in the first summand (those outside I).
    first_blocks: Vec<usize>,
    /// Original blocks surviving in the second summand (those outside J).
    second_blocks: Vec<usize>,
    base: Endomorphism,
}

impl ExtendedSystem {
    pub fn algebra(&self) -> &BlockAlgebra {
        self.endo.algebra()
    }

    pub fn endomorphism(&self) -> &Endomorphism {
        &self.endo
    }

    pub fn base_system(&self) -> &Endomorphism {
        &self.base
    }

    pub fn first_blocks(&self) -> &[usize] {
        &self.first_blocks
    }

    pub fn second_blocks(&self) -> &[usize] {
        &self.second_blocks
    }

    /// The ideal J the extension was built from, inside the base algebra.
    pub fn ideal_j(&self) -> Ideal {
        let second: std::collections::BTreeSet<usize> = self.second_blocks.iter().copied().collect();
        let blocks: Vec<usize> = (0..self.base.algebra().block_count())
            .filter(|b| !second.contains(b))
            .collect();
        self.base.algebra().ideal(blocks)
    }

    /// The kernel ideal I of the base system.
    pub fn ideal_i(&self) -> Ideal {
        self.base.kernel()
    }

    /// Indices of the second summand inside the extended algebra.
    pub fn second_summand(&self) -> Ideal {
        let start = self.first_blocks.len();
        let end = start + self.second_blocks.len();
        self.endo.algebra().ideal(start..end)
    }

    /// Unit of the kernel of the extended endomorphism: (0 + I) ⊕ (1 + J).
    pub fn kernel_unit(&self) -> AlgebraElement {
        self.algebra().block_unit(&self.second_summand())
    }

    /// The embedding a ↦ (a + I) ⊕ (a + J).
    pub fn embed(&self, a: &AlgebraElement) -> AlgebraElement {
        assert_eq!(a.algebra(), self.base.algebra());
        let blocks = self
            .first_blocks
            .iter()
            .chain(self.second_blocks.iter())
            .map(|&b| a.block(b).clone())
            .collect();
        self.algebra().element(blocks)
    }

    /// Canonical lift of an extended element's first component back to A,
    /// zero on the blocks of I.
    pub fn lift_first(&self, xi: &AlgebraElement) -> AlgebraElement {
        assert_eq!(xi.algebra(), self.algebra());
        let mut a = self.base.algebra().zero();
        for (pos, &b) in self.first_blocks.iter().enumerate() {
            *a.block_mut(b) = xi.block(pos).clone();
        }
        a
    }

    /// Canonical lift of the second component back to A, zero on J.
    pub fn lift_second(&self, xi: &AlgebraElement) -> AlgebraElement {
        assert_eq!(xi.algebra(), self.algebra());
        let mut a = self.base.algebra().zero();
        let offset = self.first_blocks.len();
        for (pos, &b) in self.second_blocks.iter().enumerate() {
            *a.block_mut(b) = xi.block(offset + pos).clone();
        }
        a
    }

    /// Pair of quotient classes as an extended element.
    pub fn from_pair(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        assert_eq!(a.algebra(), self.base.algebra());
        assert_eq!(b.algebra(), self.base.algebra());
        let blocks = self
            .first_blocks
            .iter()
            .map(|&i| a.block(i).clone())
            .chain(self.second_blocks.iter().map(|&i| b.block(i).clone()))
            .collect();
        self.algebra().element(blocks)
    }
}

/// Build the extended system `(A_J, δ_J)` for `J` orthogonal to the kernel.
///
/// The extended algebra lists the quotient `A/I` blocks first and the
/// `A/J` blocks second; both copies of `δ(a)` read their sources from the
/// first summand, which is exactly why the kernel of the extension is the
/// second summand and has a unit.
pub fn extend_system(delta: &Endomorphism, j: &Ideal) -> Result<ExtendedSystem> {
    let i = delta.kernel();
    let shared = i.intersection_blocks(j);
    if !shared.is_empty() {
        return Err(Error::NotOrthogonal(shared.iter().map(|b| b + 1).collect()));
    }
    let alg = delta.algebra();
    let first_blocks: Vec<usize> = (0..alg.block_count()).filter(|b| !i.contains_block(*b)).collect();
    let second_blocks: Vec<usize> = (0..alg.block_count()).filter(|b| !j.contains_block(*b)).collect();

    let ext_dims: Vec<usize> = first_blocks
        .iter()
        .chain(second_blocks.iter())
        .map(|&b| alg.block_dim(b))
        .collect();
    let ext_alg = BlockAlgebra::new(ext_dims);
    let ext_count = ext_alg.block_count();

    // Position of an original non-kernel block inside the first summand.
    let mut first_pos = vec![usize::MAX; alg.block_count()];
    for (pos, &b) in first_blocks.iter().enumerate() {
        first_pos[b] = pos;
    }

    let mut mult = vec![vec![0usize; ext_count]; ext_count];
    let mut slack = vec![0usize; ext_count];
    let mut unitaries = Vec::with_capacity(ext_count);

    // Each extended target block is a copy of an original target block b;
    // sources in the kernel turn into zero padding, reordered behind the
    // surviving sources by a permutation folded into the unitary.
    for (ext_b, &b) in first_blocks.iter().chain(second_blocks.iter()).enumerate() {
        let n = alg.block_dim(b);
        // Old layout: for source i in order, mult[b][i] copies of block i,
        // then slack. New layout: surviving sources first, then all padding.
        let mut old_offsets = Vec::new(); // (source, copy) -> start offset
        let mut off = 0usize;
        for (src, &m) in delta.multiplicities()[b].iter().enumerate() {
            for _ in 0..m {
                old_offsets.push((src, off));
                off += alg.block_dim(src);
            }
        }
        let old_slack_start = off;

        let mut perm = CMat::zeros(n, n);
        let mut new_off = 0usize;
        for &(src, old_start) in &old_offsets {
            if i.contains_block(src) {
                continue;
            }
            let ni = alg.block_dim(src);
            for r in 0..ni {
                perm[(old_start + r, new_off + r)] = Complex::new(1.0, 0.0);
            }
            mult[ext_b][first_pos[src]] += 1;
            new_off += ni;
        }
        // Remaining new positions are padding: map them onto the unused old
        // positions (kernel copies and old slack) in order.
        let mut unused: Vec<usize> = old_offsets
            .iter()
            .filter(|(src, _)| i.contains_block(*src))
            .flat_map(|&(src, start)| (start..start + alg.block_dim(src)).collect::<Vec<_>>())
            .collect();
        unused.extend(old_slack_start..n);
        for (k, old_row) in unused.into_iter().enumerate() {
            perm[(old_row, new_off + k)] = Complex::new(1.0, 0.0);
        }
        slack[ext_b] = n - new_off;
        unitaries.push(&delta.unitaries()[b] * perm);
    }

    let endo = Endomorphism::new(ext_alg, mult, unitaries, slack, delta.tol())?;
    Ok(ExtendedSystem {
        endo,
        first_blocks,
        second_blocks,
        base: delta.clone(),
    })
}
