//! Covariant representations of dynamical systems.
//!
//! A covariant representation is a faithful unital *-representation `π` of
//! the block algebra on a finite-dimensional Hilbert space together with a
//! partial isometry `U` satisfying `U π(a) U* = π(δ(a))` with `U*U` in the
//! commutant of `π(A)`. Each one singles out the ideal
//! `J = {a : U*U π(a) = π(a)}`, and the operator norms it assigns to
//! graded matrix elements depend only on that ideal, which is what ties
//! representations back to the quotient-distance formulas in [`crate::norms`].
//!
//! For commutative systems a representation associated with any admissible
//! ideal is built explicitly on a path space: chains of backward orbits
//! for the points outside the ideal, plus cyclic blocks for the periodic
//! points inside it. Chains are truncated at a configurable depth; the
//! truncation breaks covariance only on a recorded "defect shell" of
//! deepest nodes, and validation can be restricted off that shell. When
//! every forward orbit of a chain root dies out before the cutoff the
//! shell is empty and the representation is exactly covariant.

use serde::{Deserialize, Serialize};

use crate::algebra::{operator_norm, AlgebraElement, BlockAlgebra, Ideal};
use crate::endo::{CommutativeSystem, Endomorphism, ExtendedSystem};
use crate::exec;
use crate::matcalc::CpMatrix;
use crate::norms::diagonal_norm_exact;
use crate::{CMat, Complex, Error, Result};

/// A representation of a block algebra in multiplicity normal form:
/// `π(x) = W (⊕_b x_b ⊗ 1_{μ_b}) W*` with all multiplicities positive.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockRep {
    multiplicities: Vec<usize>,
    basis: CMat,
}

impl BlockRep {
    pub fn new(algebra: &BlockAlgebra, multiplicities: Vec<usize>, basis: CMat) -> Result<Self> {
        if multiplicities.len() != algebra.block_count() {
            return Err(Error::InvalidRep(format!(
                "{} multiplicities for {} blocks",
                multiplicities.len(),
                algebra.block_count()
            )));
        }
        let dim: usize = multiplicities
            .iter()
            .zip(algebra.block_dims())
            .map(|(m, n)| m * n)
            .sum();
        if basis.nrows() != dim || basis.ncols() != dim {
            return Err(Error::InvalidRep(format!(
                "basis is {}x{}, expected {dim}x{dim}",
                basis.nrows(),
                basis.ncols()
            )));
        }
        Ok(BlockRep { multiplicities, basis })
    }

    /// Identity-basis representation with the given multiplicities.
    pub fn standard(algebra: &BlockAlgebra, multiplicities: Vec<usize>) -> Result<Self> {
        let dim: usize = multiplicities
            .iter()
            .zip(algebra.block_dims())
            .map(|(m, n)| m * n)
            .sum();
        BlockRep::new(algebra, multiplicities, CMat::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn basis(&self) -> &CMat {
        &self.basis
    }

    /// Apply the representation to an algebra element.
    pub fn apply(&self, x: &AlgebraElement) -> CMat {
        let dim = self.dim();
        let mut d = CMat::zeros(dim, dim);
        let mut offset = 0;
        for (b, &mu) in self.multiplicities.iter().enumerate() {
            let n = x.block(b).nrows();
            for _ in 0..mu {
                d.view_mut((offset, offset), (n, n)).copy_from(x.block(b));
                offset += n;
            }
        }
        &self.basis * d * self.basis.adjoint()
    }

    /// All multiplicities positive, so the representation is faithful.
    pub fn is_faithful(&self) -> bool {
        self.multiplicities.iter().all(|&m| m >= 1)
    }
}

/// One validation check: a named axiom and its numerical residual.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub pass: bool,
    /// Offending generator for spanning-set checks, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

/// Outcome of validating a representation; never an error, always a report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_violation: Option<String>,
}

impl ValidationReport {
    fn from_checks(checks: Vec<Check>) -> Self {
        let first_violation = checks.iter().find(|c| !c.pass).map(|c| c.name.clone());
        ValidationReport { ok: first_violation.is_none(), checks, first_violation }
    }
}

/// A covariant representation candidate: `π` plus the operator `U`.
#[derive(Debug, Clone)]
pub struct CovariantRep {
    sys: Endomorphism,
    pi: BlockRep,
    u: CMat,
}

impl CovariantRep {
    pub fn new(sys: &Endomorphism, pi: BlockRep, u: CMat) -> Result<Self> {
        if u.nrows() != pi.dim() || u.ncols() != pi.dim() {
            return Err(Error::InvalidRep(format!(
                "U is {}x{}, expected {}x{}",
                u.nrows(),
                u.ncols(),
                pi.dim(),
                pi.dim()
            )));
        }
        Ok(CovariantRep { sys: sys.clone(), pi, u })
    }

    pub fn system(&self) -> &Endomorphism {
        &self.sys
    }

    pub fn dim(&self) -> usize {
        self.pi.dim()
    }

    pub fn pi(&self) -> &BlockRep {
        &self.pi
    }

    pub fn u(&self) -> &CMat {
        &self.u
    }

    pub fn pi_apply(&self, x: &AlgebraElement) -> CMat {
        self.pi.apply(x)
    }

    /// Validate all axioms on the spanning set of matrix units.
    pub fn validate(&self) -> ValidationReport {
        self.validate_off(&[])
    }

    /// Validate with covariance restricted to vectors off the given
    /// coordinate set (used for the defect shell of truncated path reps).
    pub fn validate_off(&self, excluded: &[usize]) -> ValidationReport {
        let tol = self.sys.tol().get();
        let dim = self.dim();
        let mut checks = Vec::new();

        // π structure: positive multiplicities and a unitary basis.
        let faithful = self.pi.is_faithful();
        checks.push(Check {
            name: "pi-faithful-unital".into(),
            residual: if faithful { 0.0 } else { 1.0 },
            pass: faithful,
            witness: None,
        });
        let w = self.pi.basis();
        let basis_residual = (w * w.adjoint() - CMat::identity(dim, dim)).norm();
        checks.push(Check {
            name: "pi-basis-unitary".into(),
            residual: basis_residual,
            pass: basis_residual <= tol.max(1e-9),
            witness: None,
        });

        // U U* U = U.
        let pi_residual = operator_norm(&(&self.u * self.u.adjoint() * &self.u - &self.u));
        checks.push(Check {
            name: "u-partial-isometry".into(),
            residual: pi_residual,
            pass: pi_residual <= tol.max(1e-9),
            witness: None,
        });

        // Off-shell restriction: zero out excluded columns of the residual.
        let mut mask = CMat::identity(dim, dim);
        for &c in excluded {
            mask[(c, c)] = Complex::new(0.0, 0.0);
        }

        // Covariance and commutant on the spanning set.
        let mut cov_worst = (0.0f64, None::<String>);
        let mut comm_worst = (0.0f64, None::<String>);
        let uu = self.u.adjoint() * &self.u;
        for (idx, a) in self.sys.algebra().spanning_set().iter().enumerate() {
            let pa = self.pi.apply(a);
            let cov = operator_norm(
                &((&self.u * &pa * self.u.adjoint() - self.pi.apply(&self.sys.apply(a))) * &mask),
            );
            if cov > cov_worst.0 {
                cov_worst = (cov, Some(format!("matrix unit #{idx}")));
            }
            let comm = operator_norm(&(&uu * &pa - &pa * &uu));
            if comm > comm_worst.0 {
                comm_worst = (comm, Some(format!("matrix unit #{idx}")));
            }
        }
        checks.push(Check {
            name: "covariance".into(),
            residual: cov_worst.0,
            pass: cov_worst.0 <= tol.max(1e-9),
            witness: cov_worst.1,
        });
        checks.push(Check {
            name: "uu-commutant".into(),
            residual: comm_worst.0,
            pass: comm_worst.0 <= tol.max(1e-9),
            witness: comm_worst.1,
        });

        ValidationReport::from_checks(checks)
    }

    /// The ideal this representation is associated with: the blocks whose
    /// unit is fixed by `U*U`. Meaningful for validated representations.
    pub fn association_ideal(&self) -> Ideal {
        let alg = self.sys.algebra().clone();
        let tol = self.sys.tol().get();
        let uu = self.u.adjoint() * &self.u;
        let blocks: Vec<usize> = (0..alg.block_count())
            .filter(|&b| {
                let z = self.pi.apply(&alg.block_unit(&alg.ideal([b])));
                operator_norm(&(&uu * &z - &z)) <= tol.max(1e-9)
            })
            .collect();
        alg.ideal(blocks)
    }

    /// Strictness: `U*U = 1 − π(p_I)` with `p_I` the unit of the kernel.
    ///
    /// Strict representations are associated with the complement of the
    /// kernel; in finite dimensions the converse also holds, because the
    /// kernel unit and its complement split the identity.
    pub fn is_strict(&self) -> bool {
        let tol = self.sys.tol().get();
        let p_i = self
            .pi
            .apply(&self.sys.algebra().block_unit(&self.sys.kernel()));
        let uu = self.u.adjoint() * &self.u;
        let target = CMat::identity(self.dim(), self.dim()) - p_i;
        operator_norm(&(uu - target)) <= tol.max(1e-9)
    }

    /// Evaluate a matrix element as an operator:
    /// `Ψ(x) = Σ_{m,n} U^{*m} π(x_{mn}) U^n`.
    pub fn evaluate(&self, x: &CpMatrix) -> CMat {
        assert!(
            self.sys.same_system(x.system()),
            "matrix belongs to a different system"
        );
        let dim = self.dim();
        let max_idx = x.max_index().unwrap_or(0);
        let mut u_pows = Vec::with_capacity(max_idx + 1);
        u_pows.push(CMat::identity(dim, dim));
        for m in 1..=max_idx {
            let next = &u_pows[m - 1] * &self.u;
            u_pows.push(next);
        }
        let mut acc = CMat::zeros(dim, dim);
        for (&(m, n), v) in x.entries() {
            acc += u_pows[m].adjoint() * self.pi.apply(v) * &u_pows[n];
        }
        acc
    }

    /// Operator norm of the evaluated element.
    pub fn norm_of(&self, x: &CpMatrix) -> f64 {
        operator_norm(&self.evaluate(x))
    }

    /// Fourier coefficient as an operator: `Σ_n U^{*n} π(x_n^{(k)}) U^n`.
    pub fn coefficient_operator(&self, x: &CpMatrix, k: i64) -> CMat {
        self.evaluate(&x.fourier_coefficient(k))
    }

    /// Search the samples for a violation of the compression property:
    /// the main-diagonal part should never exceed the whole in norm.
    /// Sampling can only falsify the property, never certify it.
    pub fn check_compression(&self, samples: &[CpMatrix]) -> CompressionCheck {
        let tol = self.sys.tol().get();
        let results = exec::map_ordered(samples.to_vec(), |x| {
            let whole = self.norm_of(&x);
            let diag = operator_norm(&self.coefficient_operator(&x, 0));
            (diag, whole)
        });
        let mut worst_margin = f64::NEG_INFINITY;
        let mut witness = None;
        for (idx, (diag, whole)) in results.iter().enumerate() {
            let margin = diag - whole;
            if margin > worst_margin {
                worst_margin = margin;
                if margin > tol.max(1e-9) {
                    witness = Some(idx);
                }
            }
        }
        CompressionCheck {
            violation: witness.is_some(),
            witness,
            worst_margin: if samples.is_empty() { 0.0 } else { worst_margin },
            samples: samples.len(),
        }
    }

    /// Extend `π` to the quotient pair algebra of an extended system:
    /// `π̃((a+I) ⊕ (b+J)) = U*U π(a) + (1 − U*U) π(b)`.
    ///
    /// Requires the representation to be associated with the ideal the
    /// extension was built from, otherwise the formula is not well defined
    /// on quotient classes.
    pub fn extend<'a>(&'a self, ext: &'a ExtendedSystem) -> Result<ExtendedRep<'a>> {
        let expected = ext.ideal_j();
        let actual = self.association_ideal();
        if expected != actual {
            return Err(Error::InvalidRep(format!(
                "representation is associated with {actual}, extension was built from {expected}"
            )));
        }
        Ok(ExtendedRep { rep: self, ext })
    }
}

/// Result of a compression-property sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompressionCheck {
    pub violation: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<usize>,
    pub worst_margin: f64,
    pub samples: usize,
}

/// The extension of a covariant representation to the quotient pair
/// algebra; `U` is unchanged.
pub struct ExtendedRep<'a> {
    rep: &'a CovariantRep,
    ext: &'a ExtendedSystem,
}

impl ExtendedRep<'_> {
    /// Apply `π̃` to an element of the extended algebra.
    pub fn apply(&self, xi: &AlgebraElement) -> CMat {
        let uu = self.rep.u.adjoint() * &self.rep.u;
        let a = self.ext.lift_first(xi);
        let b = self.ext.lift_second(xi);
        let dim = self.rep.dim();
        let complement = CMat::identity(dim, dim) - &uu;
        uu * self.rep.pi_apply(&a) + complement * self.rep.pi_apply(&b)
    }

    pub fn u(&self) -> &CMat {
        &self.rep.u
    }

    /// Covariance residual of `(π̃, U)` for the extended system over its
    /// spanning set.
    pub fn covariance_residual(&self) -> f64 {
        self.covariance_residual_off(&[])
    }

    /// Covariance residual restricted off the given coordinates; an
    /// extension of a truncated path representation inherits its defect
    /// shell, so that is where to exclude.
    pub fn covariance_residual_off(&self, excluded: &[usize]) -> f64 {
        let ext_alg = self.ext.algebra();
        let delta = self.ext.endomorphism();
        let dim = self.rep.dim();
        let mut mask = CMat::identity(dim, dim);
        for &c in excluded {
            mask[(c, c)] = Complex::new(0.0, 0.0);
        }
        ext_alg
            .spanning_set()
            .iter()
            .map(|xi| {
                let lhs = &self.rep.u * self.apply(xi) * self.rep.u.adjoint();
                let rhs = self.apply(&delta.apply(xi));
                operator_norm(&((lhs - rhs) * &mask))
            })
            .fold(0.0, f64::max)
    }
}

/// Report from comparing two representations over shared samples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompareReport {
    pub association_match: bool,
    pub ideal1: String,
    pub ideal2: String,
    pub samples: usize,
    /// Largest difference of operator norms over the samples.
    pub max_norm_gap: f64,
    /// Samples (by index, with diagonal degree) where a representation's
    /// norm fell strictly below the formula norm: evidence it lacks the
    /// compression property.
    pub rep1_below_formula: Vec<(usize, i64)>,
    pub rep2_below_formula: Vec<(usize, i64)>,
}

/// Compare operator norms of two representations on the samples; both must
/// be associated with the same ideal for the comparison to be meaningful.
/// `slack` is the tolerance for the below-formula flags.
pub fn compare_reps(
    rep1: &CovariantRep,
    rep2: &CovariantRep,
    samples: &[CpMatrix],
    slack: f64,
) -> Result<CompareReport> {
    if !rep1.sys.same_system(&rep2.sys) {
        return Err(Error::SystemMismatch);
    }
    let ideal1 = rep1.association_ideal();
    let ideal2 = rep2.association_ideal();
    let association_match = ideal1 == ideal2;

    let mut max_norm_gap: f64 = 0.0;
    let mut rep1_below = Vec::new();
    let mut rep2_below = Vec::new();
    if association_match {
        for (idx, x) in samples.iter().enumerate() {
            let n1 = rep1.norm_of(x);
            let n2 = rep2.norm_of(x);
            max_norm_gap = max_norm_gap.max((n1 - n2).abs());
            for k in x.diagonals() {
                let d = x.diagonal(k);
                let formula = diagonal_norm_exact(&d, &ideal1)?;
                let dm = d.to_matrix();
                if rep1.norm_of(&dm) < formula - slack {
                    rep1_below.push((idx, k));
                }
                if rep2.norm_of(&dm) < formula - slack {
                    rep2_below.push((idx, k));
                }
            }
        }
    }
    Ok(CompareReport {
        association_match,
        ideal1: ideal1.to_string(),
        ideal2: ideal2.to_string(),
        samples: samples.len(),
        max_norm_gap,
        rep1_below_formula: rep1_below,
        rep2_below_formula: rep2_below,
    })
}

/// Where a path-space basis vector comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Chain,
    Cycle,
}

/// Metadata for one basis vector of a path representation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathNode {
    /// Point of the underlying system labelling this node (0-based).
    pub label: usize,
    pub kind: NodeKind,
    /// Chain level, or position along the cycle.
    pub depth: usize,
}

/// A covariant representation on a truncated path space, with the node
/// bookkeeping and the defect shell where truncation breaks covariance.
#[derive(Debug, Clone)]
pub struct PathRep {
    rep: CovariantRep,
    nodes: Vec<PathNode>,
    defect_shell: Vec<usize>,
}

impl PathRep {
    pub fn rep(&self) -> &CovariantRep {
        &self.rep
    }

    pub fn nodes(&self) -> &[PathNode] {
        &self.nodes
    }

    pub fn defect_shell(&self) -> &[usize] {
        &self.defect_shell
    }

    /// Exactly covariant: no truncation defect at all.
    pub fn is_exact(&self) -> bool {
        self.defect_shell.is_empty()
    }

    /// Validate off the defect shell; exact on shell-free reps.
    pub fn validate(&self) -> ValidationReport {
        self.rep.validate_off(&self.defect_shell)
    }

    /// Depth budget left for an element of the given support width before
    /// norm queries start touching the shell.
    pub fn safe_support(&self, depth: usize) -> usize {
        depth.saturating_sub(2)
    }
}

/// Build a path representation of a commutative system associated with the
/// ideal given by the point set `s_j`.
///
/// Basis vectors: for every root `x ∉ S_J` a chain `(x, k)` labelled
/// `ψ^k(x)` while iterates are defined and `k ≤ depth`; for every ψ-cycle
/// contained in `S_J` a cyclic block on which `U` is unitary. `U` drops
/// one chain level and annihilates the roots; `U*` raises one level where
/// the label still maps and the cutoff is not reached. Requires
/// `S_J ⊆ ψ(Y)` (orthogonality to the kernel) and every point to appear as
/// a label, which holds whenever `depth` is at least the number of points.
pub fn build_path_rep(
    system: &CommutativeSystem,
    s_j: &Ideal,
    depth: usize,
    endo: &Endomorphism,
) -> Result<PathRep> {
    let p = system.points();
    if depth < 1 {
        return Err(Error::InvalidInput("depth must be at least 1".into()));
    }
    assert_eq!(
        endo.algebra().block_count(),
        p,
        "endomorphism does not match the point system"
    );
    let image = system.image();
    let outside_image: Vec<usize> = s_j
        .blocks()
        .iter()
        .copied()
        .filter(|pt| !image.contains(pt))
        .collect();
    if !outside_image.is_empty() {
        return Err(Error::InvalidInput(format!(
            "ideal points {:?} lie outside the image of the map",
            outside_image.iter().map(|x| x + 1).collect::<Vec<_>>()
        )));
    }

    let in_sj = |x: usize| s_j.contains_block(x);

    // Chains from the roots.
    let mut nodes: Vec<PathNode> = Vec::new();
    let mut chains: Vec<Vec<usize>> = Vec::new(); // node indices per chain
    for root in (0..p).filter(|&x| !in_sj(x)) {
        let mut chain = Vec::new();
        let mut label = root;
        for k in 0..=depth {
            chain.push(nodes.len());
            nodes.push(PathNode { label, kind: NodeKind::Chain, depth: k });
            match system.psi(label) {
                Some(next) if k < depth => label = next,
                _ => break,
            }
        }
        chains.push(chain);
    }

    // Cycles contained in S_J.
    let mut cycles: Vec<Vec<usize>> = Vec::new(); // node indices per cycle
    let mut on_known_cycle = vec![false; p];
    for start in 0..p {
        if !in_sj(start) || on_known_cycle[start] {
            continue;
        }
        // walk forward to find the cycle through `start`, if it returns
        let mut seen = vec![usize::MAX; p];
        let mut pos = 0usize;
        let mut cur = start;
        let cycle = loop {
            if seen[cur] != usize::MAX {
                break Some((cur, pos - seen[cur]));
            }
            seen[cur] = pos;
            pos += 1;
            match system.psi(cur) {
                Some(next) => cur = next,
                None => break None,
            }
        };
        if let Some((entry, len)) = cycle {
            if entry != start {
                continue; // start is pre-periodic, the cycle is handled from its own points
            }
            // collect cycle points in orbit order
            let mut pts = Vec::with_capacity(len);
            let mut x = entry;
            for _ in 0..len {
                pts.push(x);
                x = system.psi(x).expect("cycle point maps");
            }
            if pts.iter().all(|&x| in_sj(x)) && !pts.iter().any(|&x| on_known_cycle[x]) {
                let mut idxs = Vec::with_capacity(len);
                for (i, &pt) in pts.iter().enumerate() {
                    on_known_cycle[pt] = true;
                    idxs.push(nodes.len());
                    nodes.push(PathNode { label: pt, kind: NodeKind::Cycle, depth: i });
                }
                cycles.push(idxs);
            }
        }
    }

    // every point must appear as a label, otherwise π is not faithful
    let mut seen_label = vec![false; p];
    for n in &nodes {
        seen_label[n.label] = true;
    }
    if let Some(missing) = seen_label.iter().position(|&s| !s) {
        return Err(Error::InvalidInput(format!(
            "point {} never appears as a label; increase the depth",
            missing + 1
        )));
    }

    let dim = nodes.len();
    let mut u = CMat::zeros(dim, dim);
    let mut defect_shell = Vec::new();
    let dom = system.domain();
    for chain in &chains {
        for (k, &node) in chain.iter().enumerate() {
            if k >= 1 {
                u[(chain[k - 1], node)] = Complex::new(1.0, 0.0);
            }
            let label = nodes[node].label;
            let truncated = k == depth || (k + 1 == chain.len() && dom.contains(&label));
            if k == depth && dom.contains(&label) && truncated {
                defect_shell.push(node);
            }
        }
    }
    for cycle in &cycles {
        let len = cycle.len();
        for (i, &node) in cycle.iter().enumerate() {
            // U drops toward the preimage: c_i ↦ c_{i−1}
            u[(cycle[(i + len - 1) % len], node)] = Complex::new(1.0, 0.0);
        }
    }

    // π in normal form: count nodes per label and sort them into blocks.
    let mut multiplicities = vec![0usize; p];
    for n in &nodes {
        multiplicities[n.label] += 1;
    }
    let mut basis = CMat::zeros(dim, dim);
    let mut next_slot = {
        let mut starts = vec![0usize; p];
        let mut acc = 0;
        for x in 0..p {
            starts[x] = acc;
            acc += multiplicities[x];
        }
        starts
    };
    for (node_idx, n) in nodes.iter().enumerate() {
        basis[(node_idx, next_slot[n.label])] = Complex::new(1.0, 0.0);
        next_slot[n.label] += 1;
    }

    let pi = BlockRep::new(endo.algebra(), multiplicities, basis)?;
    let rep = CovariantRep::new(endo, pi, u)?;
    Ok(PathRep { rep, nodes, defect_shell })
}
