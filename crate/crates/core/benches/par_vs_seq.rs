//! Convolution-heavy workloads, parallel path against the sequential
//! fallback. Build with `--no-default-features` to measure the pure
//! sequential build; with default features the `par/*` groups use rayon.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use xprod::algebra::BlockAlgebra;
use xprod::endo::Endomorphism;
use xprod::matcalc::CpMatrix;
use xprod::norms::{csnorm_estimate, seminorm, seminorm_seq, EstimateOptions, Schedule};
use xprod::{CMat, Complex, Tol};

struct XorShift(u64);

impl XorShift {
    fn next_f(&mut self) -> f64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        (self.0 as f64 / u64::MAX as f64) * 2.0 - 1.0
    }
    fn next_usize(&mut self, bound: usize) -> usize {
        (self.next_f().abs() * 1e6) as usize % bound
    }
}

/// A block system with mixed dimensions and a permuting multiplicity
/// pattern, big enough for star products to dominate the measurements.
fn bench_system() -> Endomorphism {
    let alg = BlockAlgebra::new(vec![2, 2, 1]);
    // block 0 <- block 1, block 1 <- block 0, block 2 <- block 2
    let mult = vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]];
    let unitaries = vec![
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
        CMat::identity(2, 2),
        CMat::identity(1, 1),
    ];
    Endomorphism::new(alg, mult, unitaries, vec![0, 0, 0], Tol::default()).unwrap()
}

fn random_matrix(sys: &Endomorphism, rng: &mut XorShift, entries: usize, span: usize) -> CpMatrix {
    let alg = sys.algebra().clone();
    let mut out = CpMatrix::zero(sys);
    for _ in 0..entries {
        let i = rng.next_usize(span);
        let j = rng.next_usize(span);
        let blocks = alg
            .block_dims()
            .iter()
            .map(|&n| CMat::from_fn(n, n, |_, _| Complex::new(rng.next_f(), rng.next_f())))
            .collect();
        let v = CpMatrix::project_corner(sys, i, j, &alg.element(blocks));
        if let Ok(m) = CpMatrix::from_entries(sys, [((i, j), v)]) {
            out = out.add(&m);
        }
    }
    out
}

fn bench_star(c: &mut Criterion) {
    let sys = bench_system();
    let mut rng = XorShift(0xA5A5);
    // below the auto-dispatch work gate and above it
    let small = (random_matrix(&sys, &mut rng, 60, 12), random_matrix(&sys, &mut rng, 60, 12));
    let large = (random_matrix(&sys, &mut rng, 170, 24), random_matrix(&sys, &mut rng, 170, 24));

    let mut group = c.benchmark_group("star");
    group.sample_size(20);
    group.bench_function("small/seq", |bench| {
        bench.iter(|| black_box(small.0.star_seq(&small.1)));
    });
    group.bench_function("large/seq", |bench| {
        bench.iter(|| black_box(large.0.star_seq(&large.1)));
    });
    #[cfg(feature = "parallel")]
    {
        group.bench_function("small/par", |bench| {
            bench.iter(|| black_box(small.0.par_star(&small.1)));
        });
        group.bench_function("large/par", |bench| {
            bench.iter(|| black_box(large.0.par_star(&large.1)));
        });
    }
    group.finish();
}

fn bench_seminorm(c: &mut Criterion) {
    let sys = bench_system();
    let j = sys.algebra().ideal([2]);
    let mut rng = XorShift(0x5A5A);
    let x = random_matrix(&sys, &mut rng, 80, 14);

    let mut group = c.benchmark_group("seminorm");
    group.bench_function("seq", |bench| {
        bench.iter(|| black_box(seminorm_seq(&x, &j).unwrap()));
    });
    group.bench_function("auto", |bench| {
        bench.iter(|| black_box(seminorm(&x, &j).unwrap()));
    });
    group.finish();
}

fn bench_estimate(c: &mut Criterion) {
    let sys = bench_system();
    let j = sys.algebra().ideal([2]);
    let mut rng = XorShift(0x1234);
    let x = random_matrix(&sys, &mut rng, 8, 3);
    let opts = EstimateOptions { kmax: 4, schedule: Schedule::Linear, support_cap: 100_000 };

    let mut group = c.benchmark_group("estimate");
    group.sample_size(10);
    group.bench_function("kmax4", |bench| {
        bench.iter_batched(
            || x.clone(),
            |x| black_box(csnorm_estimate(&x, &j, &opts).unwrap()),
            BatchSize::SmallInput,
        );
    });
    group.finish();
}

criterion_group!(benches, bench_star, bench_seminorm, bench_estimate);
criterion_main!(benches);
