//! Shared fixtures and generators for the integration suites.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use xprod::algebra::{AlgebraElement, BlockAlgebra, Ideal};
use xprod::endo::{CommutativeSystem, Endomorphism};
use xprod::matcalc::{diag_position, CpMatrix, KDiagonal};
use xprod::rep::{BlockRep, CovariantRep};
use xprod::{CMat, Complex, Tol};

/// ψ: 1↦2, 2↦3, 3↦3 — total, one fixed point, kernel {1}.
pub fn c3() -> (CommutativeSystem, Endomorphism) {
    let cs = CommutativeSystem::total(&[1, 2, 2]).unwrap();
    let endo = cs.compile(Tol::default());
    (cs, endo)
}

/// ψ: 1↦2, 2↦2 — total, kernel {1}.
pub fn c2() -> (CommutativeSystem, Endomorphism) {
    let cs = CommutativeSystem::total(&[1, 1]).unwrap();
    let endo = cs.compile(Tol::default());
    (cs, endo)
}

/// ψ: 1↦2, 2↦3, 3 undefined — every orbit dies, kernel {1}.
pub fn mortal3() -> (CommutativeSystem, Endomorphism) {
    let cs = CommutativeSystem::new(3, vec![Some(1), Some(2), None]).unwrap();
    let endo = cs.compile(Tol::default());
    (cs, endo)
}

/// ψ: 1↦3, 2↦3, 3↦4, 4 undefined — mortal with a merging transient.
pub fn mortal4() -> (CommutativeSystem, Endomorphism) {
    let cs = CommutativeSystem::new(4, vec![Some(2), Some(2), Some(3), None]).unwrap();
    let endo = cs.compile(Tol::default());
    (cs, endo)
}

/// The constant map onto a single fixed point: every orbit lands on the
/// last point, the kernel is everything else.
pub fn constant4() -> (CommutativeSystem, Endomorphism) {
    let cs = CommutativeSystem::total(&[3, 3, 3, 3]).unwrap();
    let endo = cs.compile(Tol::default());
    (cs, endo)
}

/// Identity endomorphism on C².
pub fn id2() -> Endomorphism {
    Endomorphism::identity(BlockAlgebra::commutative(2), Tol::default())
}

/// Noncommutative fixture M2 ⊕ C: the matrix block collapses, the scalar
/// block spreads onto both.
pub fn nc1() -> Endomorphism {
    let alg = BlockAlgebra::new(vec![2, 1]);
    let mult = vec![vec![0, 2], vec![0, 1]];
    let w = vec![
        CMat::from_row_slice(
            2,
            2,
            &[
                Complex::new(0.6, 0.0),
                Complex::new(0.0, 0.8),
                Complex::new(0.0, 0.8),
                Complex::new(0.6, 0.0),
            ],
        ),
        CMat::identity(1, 1),
    ];
    Endomorphism::new(alg, mult, w, vec![0, 0], Tol::default()).unwrap()
}

/// The five fixture systems every formula-level sweep runs over.
pub fn fixture_systems() -> Vec<(&'static str, Endomorphism)> {
    vec![
        ("c3", c3().1),
        ("c2", c2().1),
        ("mortal3", mortal3().1),
        ("id2", id2()),
        ("nc1", nc1()),
    ]
}

/// All ideals orthogonal to the kernel: the subsets of its complement.
pub fn orthogonal_ideals(sys: &Endomorphism) -> Vec<Ideal> {
    let perp = sys.kernel().complement();
    let blocks: Vec<usize> = perp.blocks().iter().copied().collect();
    (0..(1usize << blocks.len()))
        .map(|mask| {
            let subset: Vec<usize> = blocks
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1usize << i) != 0)
                .map(|(_, &b)| b)
                .collect();
            sys.algebra().ideal(subset)
        })
        .collect()
}

pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    let m = CMat::from_fn(n, n, |_, _| {
        Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    m.qr().q()
}

/// A random system in multiplicity normal form: 2 to 4 blocks of dimension
/// 1 to 3, random multiplicity pattern, random basis unitaries.
pub fn random_system(rng: &mut ChaCha8Rng) -> Endomorphism {
    let b: usize = rng.random_range(2..=4);
    let dims: Vec<usize> = (0..b).map(|_| rng.random_range(1..=3)).collect();
    let alg = BlockAlgebra::new(dims.clone());
    let mut mult = vec![vec![0usize; b]; b];
    let mut slack = vec![0usize; b];
    for t in 0..b {
        let mut remaining = dims[t];
        for _ in 0..8 {
            if remaining == 0 {
                break;
            }
            let s = rng.random_range(0..b);
            if dims[s] <= remaining && rng.random::<f64>() < 0.7 {
                mult[t][s] += 1;
                remaining -= dims[s];
            }
        }
        slack[t] = remaining;
    }
    let unitaries = dims.iter().map(|&n| random_unitary(rng, n)).collect();
    Endomorphism::new(alg, mult, unitaries, slack, Tol::default()).unwrap()
}

pub fn random_element(sys: &Endomorphism, rng: &mut ChaCha8Rng) -> AlgebraElement {
    let alg = sys.algebra();
    let blocks = alg
        .block_dims()
        .iter()
        .map(|&n| {
            CMat::from_fn(n, n, |_, _| {
                Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            })
        })
        .collect();
    alg.element(blocks)
}

/// Random matrix element with entries conformed to the corner constraint.
pub fn random_matrix(
    sys: &Endomorphism,
    rng: &mut ChaCha8Rng,
    entries: usize,
    span: usize,
) -> CpMatrix {
    let mut out = CpMatrix::zero(sys);
    for _ in 0..entries {
        let i = rng.random_range(0..span);
        let j = rng.random_range(0..span);
        let v = CpMatrix::project_corner(sys, i, j, &random_element(sys, rng));
        if let Ok(m) = CpMatrix::from_entries(sys, [((i, j), v)]) {
            out = out.add(&m);
        }
    }
    out
}

/// Random diagonal of the given degree with coefficients at 0..coeffs.
pub fn random_diagonal(
    sys: &Endomorphism,
    rng: &mut ChaCha8Rng,
    k: i64,
    coeffs: usize,
) -> KDiagonal {
    let items: Vec<(usize, AlgebraElement)> = (0..coeffs)
        .map(|n| {
            let (i, j) = diag_position(n, k);
            (n, CpMatrix::project_corner(sys, i, j, &random_element(sys, rng)))
        })
        .collect();
    KDiagonal::new(sys, k, items).unwrap()
}

/// Direct sum of two representations of the same system; multiplicities
/// add and both operators act blockwise.
pub fn direct_sum(a: &CovariantRep, b: &CovariantRep) -> CovariantRep {
    let sys = a.system().clone();
    let alg = sys.algebra().clone();
    let (da, db) = (a.dim(), b.dim());
    let dim = da + db;

    let mut u = CMat::zeros(dim, dim);
    u.view_mut((0, 0), (da, da)).copy_from(a.u());
    u.view_mut((da, da), (db, db)).copy_from(b.u());

    let mults: Vec<usize> = a
        .pi()
        .multiplicities()
        .iter()
        .zip(b.pi().multiplicities())
        .map(|(x, y)| x + y)
        .collect();

    // permutation from the summed standard layout to (layout_a ⊕ layout_b)
    let mut p = CMat::zeros(dim, dim);
    let (mut sum_off, mut a_off, mut b_off) = (0usize, 0usize, 0usize);
    for blk in 0..alg.block_count() {
        let n = alg.block_dim(blk);
        let (ma, mb) = (a.pi().multiplicities()[blk], b.pi().multiplicities()[blk]);
        for t in 0..ma * n {
            p[(a_off + t, sum_off + t)] = Complex::new(1.0, 0.0);
        }
        sum_off += ma * n;
        for t in 0..mb * n {
            p[(da + b_off + t, sum_off + t)] = Complex::new(1.0, 0.0);
        }
        sum_off += mb * n;
        a_off += ma * n;
        b_off += mb * n;
    }

    let mut w = CMat::zeros(dim, dim);
    w.view_mut((0, 0), (da, da)).copy_from(a.pi().basis());
    w.view_mut((da, da), (db, db)).copy_from(b.pi().basis());

    let pi = BlockRep::new(&alg, mults, w * p).unwrap();
    CovariantRep::new(&sys, pi, u).unwrap()
}
