//! Norms on the graded matrix calculus and the ideal-dependent seminorm.
//!
//! Fix an ideal `J` orthogonal to the kernel `I` of `δ`. A diagonal of
//! degree `k ≥ 0` with coefficients `a_0, …, a_N` determines the partial
//! sums `s_i = Σ_{j≤i} δ^{i−j}(a_j)`, and its norm in any covariant
//! representation associated with `J` is
//!
//! ```text
//! max( max_{i=0..N} d(s_i, J),  d(s_N, I) )
//! ```
//!
//! where `d` is the quotient distance. The same value can be computed by a
//! second, independent route that never mentions `I`: push `s_N` forward
//! through `δ` and watch the quotient distances and norms of the orbit,
//! which are eventually periodic because block norms propagate along the
//! boolean reachability matrix of the multiplicity pattern. Negative
//! degrees reduce to positive ones through the adjoint. Both routes are
//! implemented and cross-checked; the finite formula is the canonical one.
//!
//! Summing the diagonal norms of an arbitrary element gives the seminorm
//! `⦀·⦀_J`; the crossed product is the enveloping C*-algebra of the
//! quotient by its kernel, and here the completion is represented by its
//! computable norm rather than as a constructed object. For elements mixing
//! several diagonals the C*-norm itself is reached by the even-power
//! formula `‖x‖ = lim_k ‖N₀[(x⋆x*)^{2k}]‖^{1/4k}`, mechanized by
//! [`csnorm_estimate`].

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, Ideal};
use crate::endo::Endomorphism;
use crate::exec;
use crate::matcalc::{CpMatrix, KDiagonal};
use crate::{Error, Result};

/// Boolean reachability digraph of an endomorphism: edge `target ← source`
/// whenever the multiplicity is positive. Its boolean powers drive the
/// exact evaluation of orbit suprema.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Reachability {
    size: usize,
    /// adjacency[target * size + source]
    adjacency: Vec<bool>,
}

impl Reachability {
    pub fn from_endomorphism(delta: &Endomorphism) -> Self {
        let size = delta.algebra().block_count();
        let mut adjacency = vec![false; size * size];
        for t in 0..size {
            for s in 0..size {
                adjacency[t * size + s] = delta.multiplicity(t, s) > 0;
            }
        }
        Reachability { size, adjacency }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn edge(&self, target: usize, source: usize) -> bool {
        self.adjacency[target * self.size + source]
    }

    /// Boolean matrix product `self ∘ other`.
    pub fn compose(&self, other: &Reachability) -> Reachability {
        assert_eq!(self.size, other.size);
        let n = self.size;
        let mut adjacency = vec![false; n * n];
        for t in 0..n {
            for s in 0..n {
                adjacency[t * n + s] =
                    (0..n).any(|m| self.adjacency[t * n + m] && other.adjacency[m * n + s]);
            }
        }
        Reachability { size: n, adjacency }
    }

    /// Propagate a vector of block norms one step: the image block norm is
    /// the max over reachable sources.
    pub fn propagate(&self, norms: &[f64]) -> Vec<f64> {
        (0..self.size)
            .map(|t| {
                (0..self.size)
                    .filter(|&s| self.edge(t, s))
                    .map(|s| norms[s])
                    .fold(0.0, f64::max)
            })
            .collect()
    }
}

/// Exact statistics of the orbit `m ↦ δ^m(x)`, `m ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitStats {
    /// sup over `m ≥ 1` of the quotient distance `d(δ^m(x), J)`.
    pub sup_distance: f64,
    /// Limit of the norms `‖δ^m(x)‖`; the sequence is non-increasing and
    /// eventually periodic, hence eventually constant.
    pub limit_norm: f64,
    /// Steps before the boolean power sequence enters its cycle.
    pub transient: usize,
    /// Cycle length of the boolean power sequence.
    pub period: usize,
}

/// Walk the orbit of `x` under `δ`, tracking quotient distances to `J`.
///
/// The block-norm vector of `δ^m(x)` is determined by the m-th boolean
/// power of the reachability matrix applied to the block norms of `x`, and
/// the powers of a boolean matrix repeat after finitely many steps, so the
/// supremum is taken over the transient plus one full period and is exact.
pub fn orbit_stats(x: &AlgebraElement, j: &Ideal, delta: &Endomorphism) -> OrbitStats {
    assert_eq!(x.algebra(), delta.algebra());
    assert_eq!(j.algebra(), delta.algebra());
    let base = Reachability::from_endomorphism(delta);
    let norms = x.block_norms();
    let outside: Vec<usize> = (0..base.size()).filter(|&b| !j.contains_block(b)).collect();

    let mut seen: HashMap<Reachability, usize> = HashMap::new();
    let mut power = base.clone();
    let mut m = 1usize;
    let mut sup_distance: f64 = 0.0;
    let mut per_step_norm = Vec::new();
    let (first, repeat) = loop {
        if let Some(&first) = seen.get(&power) {
            break (first, m);
        }
        let v = power.propagate(&norms);
        let dist = outside.iter().map(|&b| v[b]).fold(0.0, f64::max);
        sup_distance = sup_distance.max(dist);
        per_step_norm.push(v.iter().copied().fold(0.0, f64::max));
        seen.insert(power.clone(), m);
        power = power.compose(&base);
        m += 1;
    };
    OrbitStats {
        sup_distance,
        // non-increasing and periodic from `first` on, hence constant there
        limit_norm: per_step_norm[first - 1],
        transient: first - 1,
        period: repeat - first,
    }
}

/// sup over `m ≥ 1` of the distance from `δ^m(x)` to `J`; the tail term of
/// the orbit route to diagonal norms.
pub fn pushforward_sup(x: &AlgebraElement, j: &Ideal, delta: &Endomorphism) -> f64 {
    orbit_stats(x, j, delta).sup_distance
}

fn check_orthogonal(j: &Ideal, delta: &Endomorphism) -> Result<Ideal> {
    let kernel = delta.kernel();
    let shared = kernel.intersection_blocks(j);
    if shared.is_empty() {
        Ok(kernel)
    } else {
        Err(Error::NotOrthogonal(shared.iter().map(|b| b + 1).collect()))
    }
}

/// Partial sums `s_i = Σ_{j≤i} δ^{i−j}(a_j)` of a diagonal, `i = 0..N`.
fn partial_sums(d: &KDiagonal) -> Vec<AlgebraElement> {
    let sys = d.system();
    let zero = sys.algebra().zero();
    let n_max = match d.max_coeff_index() {
        Some(n) => n,
        None => return Vec::new(),
    };
    let mut sums: Vec<AlgebraElement> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let prev = if n == 0 { zero.clone() } else { sys.apply(&sums[n - 1]) };
        let s = match d.coefficient(n) {
            Some(a) => &prev + a,
            None => prev,
        };
        sums.push(s);
    }
    sums
}

/// Norm of a graded component by the finite formula.
///
/// For degree `k ≥ 0` this is `max(max_i d(s_i, J), d(s_N, I))`; negative
/// degrees go through the adjoint, which flips the degree sign without
/// changing the norm. The `I`-term uses the full partial sum `s_N`, not the
/// bare top coefficient: the two differ whenever earlier coefficients still
/// push mass through `δ` past the end of the support, and only the partial
/// sum agrees with operator norms in actual representations.
pub fn diagonal_norm_exact(d: &KDiagonal, j: &Ideal) -> Result<f64> {
    let sys = d.system().clone();
    let kernel = check_orthogonal(j, &sys)?;
    if d.degree() < 0 {
        return diagonal_norm_exact(&d.adjoint(), j);
    }
    let sums = partial_sums(d);
    if sums.is_empty() {
        return Ok(0.0);
    }
    let head = sums.iter().map(|s| s.distance_to(j)).fold(0.0, f64::max);
    let tail = sums.last().unwrap().distance_to(&kernel);
    Ok(head.max(tail))
}

/// Norm of a graded component by the orbit route.
///
/// Beyond the support the partial sums are `δ^m(s_N)`, so the running
/// maximum of quotient distances converges to
/// `max(max_i d(s_i, J), sup_m d(δ^m(s_N), J), lim_m ‖δ^m(s_N)‖)`;
/// the last term is the limit of the kernel distances `d(s_n, I)` and
/// cannot be dropped, because mass can circulate inside `J` forever
/// without ever showing up in a quotient distance.
pub fn diagonal_norm_limit(d: &KDiagonal, j: &Ideal) -> Result<f64> {
    Ok(diagonal_norm_limit_with_meta(d, j)?.0)
}

/// Orbit route with the detected transient and period attached.
pub fn diagonal_norm_limit_with_meta(d: &KDiagonal, j: &Ideal) -> Result<(f64, OrbitStats)> {
    let sys = d.system().clone();
    check_orthogonal(j, &sys)?;
    if d.degree() < 0 {
        return diagonal_norm_limit_with_meta(&d.adjoint(), j);
    }
    let sums = partial_sums(d);
    if sums.is_empty() {
        return Ok((
            0.0,
            OrbitStats { sup_distance: 0.0, limit_norm: 0.0, transient: 0, period: 0 },
        ));
    }
    let head = sums.iter().map(|s| s.distance_to(j)).fold(0.0, f64::max);
    let orbit = orbit_stats(sums.last().unwrap(), j, &sys);
    Ok((head.max(orbit.sup_distance).max(orbit.limit_norm), orbit))
}

/// The ideal-dependent seminorm: the sum of the diagonal norms.
///
/// Zero exactly on the kernel of the quotient defining the crossed
/// product; *-invariant and submultiplicative for the convolution. The
/// per-diagonal norms fan out to rayon for large supports; they are summed
/// in diagonal order either way.
pub fn seminorm(x: &CpMatrix, j: &Ideal) -> Result<f64> {
    if x.nnz() < 256 {
        return seminorm_seq(x, j);
    }
    check_orthogonal(j, x.system())?;
    let parts: Vec<KDiagonal> = x.diagonals().into_iter().map(|k| x.diagonal(k)).collect();
    let values = exec::map_ordered(parts, |d| diagonal_norm_exact(&d, j));
    let mut total = 0.0;
    for v in values {
        total += v?;
    }
    Ok(total)
}

/// Sequential twin of [`seminorm`], available for benchmarking regardless
/// of the `parallel` feature.
pub fn seminorm_seq(x: &CpMatrix, j: &Ideal) -> Result<f64> {
    check_orthogonal(j, x.system())?;
    let mut total = 0.0;
    for k in x.diagonals() {
        total += diagonal_norm_exact(&x.diagonal(k), j)?;
    }
    Ok(total)
}

/// Power schedule for the C*-norm estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    /// Exponents 2k with 4k-th roots, the literal limit formula.
    Linear,
    /// Exponents 2^k with (2·2^k)-th roots; fewer, larger steps.
    Doubling,
}

impl Schedule {
    /// The power of `x⋆x*` evaluated at step `k` (1-based).
    pub fn exponent(self, k: usize) -> usize {
        match self {
            Schedule::Linear => 2 * k,
            Schedule::Doubling => 1 << k,
        }
    }
}

impl std::str::FromStr for Schedule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Schedule::Linear),
            "doubling" => Ok(Schedule::Doubling),
            other => Err(Error::InvalidInput(format!("unknown schedule `{other}`"))),
        }
    }
}

/// Options for [`csnorm_estimate`].
#[derive(Debug, Clone, Copy)]
pub struct EstimateOptions {
    pub kmax: usize,
    pub schedule: Schedule,
    /// Abort when a power's support exceeds this many entries.
    pub support_cap: usize,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions { kmax: 6, schedule: Schedule::Linear, support_cap: 10_000 }
    }
}

/// Everything a norm computation reports, with enough configuration to
/// reproduce the run bit for bit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormReport {
    pub method: String,
    pub values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_schedule: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transient: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<usize>,
    pub config: ReportConfig,
}

/// Resolved configuration embedded in every report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportConfig {
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Schedule>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kmax: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub support_cap: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
}

impl ReportConfig {
    pub fn bare(tol: f64) -> Self {
        ReportConfig { tol, schedule: None, kmax: None, support_cap: None, depth: None }
    }
}

/// Estimate the crossed-product C*-norm of `x` through even powers.
///
/// With `p = x ⋆ x*`, step `k` computes `p^{⋆m_k}` by iterated
/// convolution, extracts the main-diagonal Fourier coefficient, evaluates
/// its graded norm and takes the `1/(2·m_k)`-th root. The sequence
/// converges to the norm of the image of `x` in the crossed product, and
/// every step is bounded by the seminorm. Graded-norm values at or below
/// the tolerance are treated as exact zeros before taking roots; a
/// fractional root would otherwise blow numerical dust up to order one.
pub fn csnorm_estimate(x: &CpMatrix, j: &Ideal, opts: &EstimateOptions) -> Result<NormReport> {
    if opts.kmax == 0 {
        return Err(Error::InvalidInput("kmax must be at least 1".into()));
    }
    let sys = x.system().clone();
    check_orthogonal(j, &sys)?;
    let tol = sys.tol().get();
    let p = x.star(&x.adjoint());

    let mut values = Vec::with_capacity(opts.kmax);
    let mut exponents = Vec::with_capacity(opts.kmax);
    let mut current: Option<CpMatrix> = None;

    for k in 1..=opts.kmax {
        let target = opts.schedule.exponent(k);
        let next = match (&current, opts.schedule) {
            (None, _) => p.star(&p),
            (Some(c), Schedule::Linear) => c.star(&p).star(&p),
            (Some(c), Schedule::Doubling) => c.star(c),
        };
        if next.nnz() > opts.support_cap {
            return Err(Error::SupportCap { cap: opts.support_cap, k, nnz: next.nnz() });
        }
        current = Some(next);

        let diag = current.as_ref().unwrap().diagonal(0);
        let value = diagonal_norm_exact(&diag, j)?;
        let root = 1.0 / (2.0 * target as f64);
        values.push(if value <= tol { 0.0 } else { value.powf(root) });
        exponents.push(target);
    }

    Ok(NormReport {
        method: "estimate".into(),
        values,
        k_schedule: Some(exponents),
        transient: None,
        period: None,
        config: ReportConfig {
            tol,
            schedule: Some(opts.schedule),
            kmax: Some(opts.kmax),
            support_cap: Some(opts.support_cap),
            depth: None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BlockAlgebra;
    use crate::endo::CommutativeSystem;
    use crate::matcalc::diag_position;
    use crate::{CMat, Complex, Tol};

    fn re(v: f64) -> Complex {
        Complex::new(v, 0.0)
    }

    /// ψ: 1↦2, 2↦3, 3↦3.
    fn c3_sys() -> Endomorphism {
        CommutativeSystem::total(&[1, 2, 2]).unwrap().compile(Tol::default())
    }

    fn c3_elt(values: [f64; 3]) -> AlgebraElement {
        BlockAlgebra::commutative(3).scalar_element(&[re(values[0]), re(values[1]), re(values[2])])
    }

    /// The degree-0 diagonal with a_0 = e_2 and a_1 = −δ(e_2); its norm is
    /// 0 or 1 depending on the chosen ideal.
    fn j_dependent_fixture(sys: &Endomorphism) -> KDiagonal {
        let a0 = c3_elt([0.0, 1.0, 0.0]);
        let a1 = sys.apply(&a0).scale(re(-1.0));
        KDiagonal::new(sys, 0, [(0, a0), (1, a1)]).unwrap()
    }

    struct XorShift(u64);
    impl XorShift {
        fn next_f(&mut self) -> f64 {
            self.0 ^= self.0 << 13;
            self.0 ^= self.0 >> 7;
            self.0 ^= self.0 << 17;
            (self.0 as f64 / u64::MAX as f64) * 2.0 - 1.0
        }
    }

    fn random_element(sys: &Endomorphism, rng: &mut XorShift) -> AlgebraElement {
        let alg = sys.algebra();
        let blocks = alg
            .block_dims()
            .iter()
            .map(|&n| CMat::from_fn(n, n, |_, _| Complex::new(rng.next_f(), rng.next_f())))
            .collect();
        alg.element(blocks)
    }

    fn random_diagonal(sys: &Endomorphism, rng: &mut XorShift, k: i64, coeffs: usize) -> KDiagonal {
        let items: Vec<(usize, AlgebraElement)> = (0..coeffs)
            .map(|n| {
                let (i, j) = diag_position(n, k);
                (n, CpMatrix::project_corner(sys, i, j, &random_element(sys, rng)))
            })
            .collect();
        KDiagonal::new(sys, k, items).unwrap()
    }

    fn orthogonal_ideals(sys: &Endomorphism) -> Vec<Ideal> {
        let perp = sys.kernel().complement();
        let blocks: Vec<usize> = perp.blocks().iter().copied().collect();
        let mut out = Vec::new();
        for mask in 0..(1usize << blocks.len()) {
            let subset: Vec<usize> = blocks
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1usize << i) != 0)
                .map(|(_, &b)| b)
                .collect();
            out.push(sys.algebra().ideal(subset));
        }
        out
    }

    #[test]
    fn pushforward_examples() {
        let sys = c3_sys();
        let alg = sys.algebra().clone();
        let j = alg.ideal([1, 2]);
        assert_eq!(pushforward_sup(&alg.zero(), &j, &sys), 0.0);

        let id = Endomorphism::identity(alg.clone(), Tol::default());
        let x = c3_elt([0.3, -1.1, 0.6]);
        assert!((pushforward_sup(&x, &j, &id) - x.distance_to(&j)).abs() < 1e-14);

        // explicit orbit: δ(e_2) = e_1, δ²(e_2) = 0
        let e2 = c3_elt([0.0, 1.0, 0.0]);
        assert!((pushforward_sup(&e2, &j, &sys) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn orbit_meta_detects_cycles() {
        let sys = c3_sys();
        let alg = sys.algebra().clone();
        let stats = orbit_stats(&c3_elt([1.0, 1.0, 1.0]), &alg.ideal([1, 2]), &sys);
        assert!(stats.period >= 1);
        // mass settles on the fixed point 3, invisible from outside {2,3}
        // only while it still sits at 2
        assert!((stats.limit_norm - 1.0).abs() < 1e-14);
    }

    #[test]
    fn exact_norm_examples() {
        let sys = c3_sys();
        let alg = sys.algebra().clone();
        // embedded elements: the norm is the max of the two distances,
        // which is the full norm by block disjointness
        let a = c3_elt([0.0, 1.0, 0.0]);
        let d = KDiagonal::new(&sys, 0, [(0, a.clone())]).unwrap();
        let j = alg.ideal([1, 2]);
        assert!((diagonal_norm_exact(&d, &j).unwrap() - 1.0).abs() < 1e-14);

        // the u-diagonal for a unital system has norm 1 for proper J
        let u_diag = CpMatrix::u(&sys).diagonal(1);
        assert!((diagonal_norm_exact(&u_diag, &j).unwrap() - 1.0).abs() < 1e-14);
        assert!((diagonal_norm_exact(&u_diag, &alg.zero_ideal()).unwrap() - 1.0).abs() < 1e-14);

        // the J-dependence fixture
        let fix = j_dependent_fixture(&sys);
        assert_eq!(diagonal_norm_exact(&fix, &j).unwrap(), 0.0);
        assert!((diagonal_norm_exact(&fix, &alg.zero_ideal()).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn limit_norm_examples() {
        let sys = c3_sys();
        let alg = sys.algebra().clone();
        let j = alg.ideal([1, 2]);
        let empty = KDiagonal::new(&sys, 0, []).unwrap();
        assert_eq!(diagonal_norm_limit(&empty, &j).unwrap(), 0.0);

        // d(a, J) = 0 but the orbit reaches block 1 outside J
        let a = c3_elt([0.0, 1.0, 0.0]);
        let d = KDiagonal::new(&sys, 0, [(0, a)]).unwrap();
        assert!((diagonal_norm_limit(&d, &j).unwrap() - 1.0).abs() < 1e-14);

        let fix = j_dependent_fixture(&sys);
        assert_eq!(diagonal_norm_limit(&fix, &j).unwrap(), 0.0);
        assert!((diagonal_norm_limit(&fix, &alg.zero_ideal()).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_orthogonal_ideals() {
        let sys = c3_sys();
        let d = j_dependent_fixture(&sys);
        let bad = sys.algebra().ideal([0]);
        assert!(matches!(diagonal_norm_exact(&d, &bad), Err(Error::NotOrthogonal(_))));
        assert!(matches!(seminorm(&d.to_matrix(), &bad), Err(Error::NotOrthogonal(_))));
    }

    /// The two routes must agree everywhere, including the regimes that
    /// tell the formulas apart: identity systems with the full ideal need
    /// the circulating-mass term, and top coefficients that are not the
    /// whole partial sum need the s_N tail.
    #[test]
    fn exact_equals_limit_on_adversarial_systems() {
        let mut rng = XorShift(3);

        let id2 = Endomorphism::identity(BlockAlgebra::commutative(2), Tol::default());
        let c2 = CommutativeSystem::total(&[1, 1]).unwrap().compile(Tol::default());
        let c3 = c3_sys();
        for sys in [id2, c2, c3] {
            for j in orthogonal_ideals(&sys) {
                for k in [-2i64, -1, 0, 1, 2] {
                    for coeffs in 1..=3 {
                        let d = random_diagonal(&sys, &mut rng, k, coeffs);
                        let exact = diagonal_norm_exact(&d, &j).unwrap();
                        let limit = diagonal_norm_limit(&d, &j).unwrap();
                        assert!(
                            (exact - limit).abs() < 1e-11,
                            "routes disagree: exact={exact}, limit={limit}, k={k}, J={j}"
                        );
                    }
                }
            }
        }
    }

    /// Regression pin for the tail term: with ψ: 1↦2, 2↦2 and J = {2},
    /// coefficients a_0 = (0, s), a_1 = (t, w) give s_1 = (s + t, s + w);
    /// the norm must see s + w through δ, not the bare coefficient w.
    #[test]
    fn tail_uses_partial_sum_not_top_coefficient() {
        let c2 = CommutativeSystem::total(&[1, 1]).unwrap().compile(Tol::default());
        let alg = c2.algebra().clone();
        let a0 = alg.scalar_element(&[re(0.01), re(0.02)]);
        let a1 = alg.scalar_element(&[re(0.03), re(0.9)]);
        let d = KDiagonal::new(&c2, 0, [(0, a0), (1, a1)]).unwrap();
        let j = alg.ideal([1]);
        let exact = diagonal_norm_exact(&d, &j).unwrap();
        assert!((exact - 0.92).abs() < 1e-12, "got {exact}");
        let limit = diagonal_norm_limit(&d, &j).unwrap();
        assert!((limit - 0.92).abs() < 1e-12, "got {limit}");
    }

    /// Regression pin for the circulating-mass term: with δ = id and
    /// J = {2}, the embedded e_2 never shows up in a quotient distance but
    /// its norm is 1.
    #[test]
    fn limit_route_sees_mass_circulating_inside_j() {
        let id2 = Endomorphism::identity(BlockAlgebra::commutative(2), Tol::default());
        let alg = id2.algebra().clone();
        let e2 = alg.scalar_element(&[re(0.0), re(1.0)]);
        let d = KDiagonal::new(&id2, 0, [(0, e2)]).unwrap();
        let j = alg.ideal([1]);
        assert!((diagonal_norm_limit(&d, &j).unwrap() - 1.0).abs() < 1e-14);
        assert!((diagonal_norm_exact(&d, &j).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn negative_degrees_through_adjoint() {
        let sys = c3_sys();
        let mut rng = XorShift(5);
        for j in orthogonal_ideals(&sys) {
            let d = random_diagonal(&sys, &mut rng, -2, 3);
            let via_adjoint = diagonal_norm_exact(&d.adjoint(), &j).unwrap();
            assert!((diagonal_norm_exact(&d, &j).unwrap() - via_adjoint).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_diagonal_view_is_isometric() {
        let sys = c3_sys();
        let mut rng = XorShift(7);
        let j = sys.algebra().ideal([1, 2]);
        for k in [-2i64, -1, 1, 2] {
            let d = random_diagonal(&sys, &mut rng, k, 3);
            let moved = d.to_zero_diagonal();
            let a = diagonal_norm_exact(&d, &j).unwrap();
            let b = diagonal_norm_exact(&moved, &j).unwrap();
            assert!((a - b).abs() < 1e-12, "k={k}: {a} vs {b}");
        }
    }

    #[test]
    fn seminorm_basics() {
        let sys = c3_sys();
        let alg = sys.algebra().clone();
        let j = alg.ideal([1, 2]);
        let one = CpMatrix::embed(&sys, &alg.identity());
        assert!((seminorm(&one, &j).unwrap() - 1.0).abs() < 1e-14);

        let fix = j_dependent_fixture(&sys).to_matrix();
        assert_eq!(seminorm(&fix, &j).unwrap(), 0.0);
        assert!((seminorm(&fix, &alg.zero_ideal()).unwrap() - 1.0).abs() < 1e-14);

        let mut rng = XorShift(13);
        for _ in 0..10 {
            let x = random_matrix(&sys, &mut rng);
            let a = seminorm(&x, &j).unwrap();
            let b = seminorm(&x.adjoint(), &j).unwrap();
            assert!((a - b).abs() < 1e-11, "star invariance failed: {a} vs {b}");
            assert!((a - seminorm_seq(&x, &j).unwrap()).abs() < 1e-15);
        }
    }

    fn random_matrix(sys: &Endomorphism, rng: &mut XorShift) -> CpMatrix {
        let mut out = CpMatrix::zero(sys);
        for k in [-1i64, 0, 1] {
            out = out.add(&random_diagonal(sys, rng, k, 2).to_matrix());
        }
        out
    }

    #[test]
    fn seminorm_axioms_on_samples() {
        let sys = c3_sys();
        let j = sys.algebra().ideal([2]);
        let mut rng = XorShift(17);
        for _ in 0..10 {
            let x = random_matrix(&sys, &mut rng);
            let y = random_matrix(&sys, &mut rng);
            let sx = seminorm(&x, &j).unwrap();
            let sy = seminorm(&y, &j).unwrap();
            let sxy = seminorm(&x.add(&y), &j).unwrap();
            assert!(sxy <= sx + sy + 1e-10, "triangle inequality failed");
            let prod = seminorm(&x.star(&y), &j).unwrap();
            assert!(prod <= sx * sy + 1e-9, "submultiplicativity failed: {prod} vs {}", sx * sy);
            let scaled = seminorm(&x.scale(Complex::new(0.0, -2.5)), &j).unwrap();
            assert!((scaled - 2.5 * sx).abs() < 1e-10, "homogeneity failed");
        }
    }

    #[test]
    fn monotone_in_the_ideal() {
        let sys = c3_sys();
        let alg = sys.algebra().clone();
        let mut rng = XorShift(19);
        let j1 = alg.ideal([2]);
        let j2 = alg.ideal([1, 2]);
        for k in [-1i64, 0, 2] {
            let d = random_diagonal(&sys, &mut rng, k, 3);
            let n1 = diagonal_norm_exact(&d, &j1).unwrap();
            let n2 = diagonal_norm_exact(&d, &j2).unwrap();
            assert!(n2 <= n1 + 1e-13);
        }
    }

    #[test]
    fn estimator_on_generators() {
        let sys = c3_sys();
        let alg = sys.algebra().clone();
        let j = alg.ideal([1, 2]);
        let opts = EstimateOptions::default();

        // u ⋆ u* is an embedded projection, so every estimate is exactly 1
        let u = CpMatrix::u(&sys);
        let report = csnorm_estimate(&u, &j, &opts).unwrap();
        for e in &report.values {
            assert!((e - 1.0).abs() < 1e-12);
        }

        // embedded elements: every step returns the element norm exactly
        let mut rng = XorShift(29);
        for _ in 0..5 {
            let a = random_element(&sys, &mut rng);
            let x = CpMatrix::embed(&sys, &a);
            let report = csnorm_estimate(&x, &j, &opts).unwrap();
            for e in &report.values {
                assert!((e - a.norm()).abs() < 1e-9 * a.norm().max(1.0), "embed estimate drifted");
            }
        }

        // seminorm-zero elements stay zero at every step
        let fix = j_dependent_fixture(&sys).to_matrix();
        let report = csnorm_estimate(&fix, &j, &opts).unwrap();
        assert!(report.values.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn estimates_bounded_by_seminorm() {
        let sys = c3_sys();
        let j = sys.algebra().ideal([2]);
        let mut rng = XorShift(31);
        for schedule in [Schedule::Linear, Schedule::Doubling] {
            let opts = EstimateOptions { kmax: 4, schedule, support_cap: 10_000 };
            for _ in 0..5 {
                let x = random_matrix(&sys, &mut rng);
                let bound = seminorm(&x, &j).unwrap();
                let report = csnorm_estimate(&x, &j, &opts).unwrap();
                for &e in &report.values {
                    assert!(e <= bound + 1e-9, "estimate {e} above seminorm {bound}");
                }
            }
        }
    }

    #[test]
    fn support_cap_reports_step() {
        let sys = c3_sys();
        let j = sys.algebra().ideal([1, 2]);
        let mut rng = XorShift(37);
        let x = random_matrix(&sys, &mut rng);
        let opts = EstimateOptions { kmax: 6, schedule: Schedule::Doubling, support_cap: 4 };
        match csnorm_estimate(&x, &j, &opts) {
            Err(Error::SupportCap { k, .. }) => assert!(k >= 1),
            other => panic!("expected a support cap error, got {other:?}"),
        }
    }

    #[test]
    fn csnorm_consistent_with_cstar_identity() {
        // e_k(x)² tracks e'_k(x⋆x*) on matched schedules
        let sys = c3_sys();
        let j = sys.algebra().ideal([1, 2]);
        let mut rng = XorShift(41);
        let x = random_matrix(&sys, &mut rng);
        let p = x.star(&x.adjoint());
        let opts = EstimateOptions { kmax: 4, schedule: Schedule::Doubling, support_cap: 50_000 };
        let ex = csnorm_estimate(&x, &j, &opts).unwrap().values;
        let ep = csnorm_estimate(&p, &j, &opts).unwrap().values;
        let last_x = ex.last().unwrap();
        let last_p = ep.last().unwrap();
        assert!(
            (last_x * last_x - last_p).abs() <= 0.05 * last_p.max(1e-9),
            "C*-identity drift: {} vs {}",
            last_x * last_x,
            last_p
        );
    }

    #[test]
    fn gauge_invariance_of_norms() {
        let sys = c3_sys();
        let j = sys.algebra().ideal([2]);
        let mut rng = XorShift(43);
        let x = random_matrix(&sys, &mut rng);
        let base_semi = seminorm(&x, &j).unwrap();
        let opts = EstimateOptions { kmax: 3, schedule: Schedule::Linear, support_cap: 10_000 };
        let base_est = csnorm_estimate(&x, &j, &opts).unwrap().values;
        for t in 0..8 {
            let z = Complex::from_polar(1.0, 0.25 + t as f64 * 0.7);
            let tw = x.gauge_twist(z).unwrap();
            assert!((seminorm(&tw, &j).unwrap() - base_semi).abs() < 1e-10);
            let est = csnorm_estimate(&tw, &j, &opts).unwrap().values;
            for (a, b) in est.iter().zip(&base_est) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn norm_report_serializes() {
        let report = NormReport {
            method: "estimate".into(),
            values: vec![1.0, 0.5],
            k_schedule: Some(vec![2, 4]),
            transient: None,
            period: None,
            config: ReportConfig {
                tol: 1e-10,
                schedule: Some(Schedule::Doubling),
                kmax: Some(2),
                support_cap: Some(10_000),
                depth: None,
            },
        };
        let text = serde_json::to_string(&report).unwrap();
        let back: NormReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.values, report.values);
        assert_eq!(back.config.schedule, Some(Schedule::Doubling));
    }
}
