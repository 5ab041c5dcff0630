use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use latmax_core::checks::{check_dr_dl, check_submodular, DrDlMode, SubmodularMode};
use latmax_core::dl::{dl_double_greedy, greedy_poset_matroid};
use latmax_core::smbil::{double_greedy_smbil, ComponentOrder};
use latmax_core::{enumerate_ideals, linear_extension, Comparison, Poset, PosetMatroid, TieBreak, ValueOracle};
use std::hint::black_box;

fn ideals(c: &mut Criterion) {
    let mut g = c.benchmark_group("enumerate_ideals");
    for size in [12, 16, 20] {
        let poset = Poset::random(size, 0.2, 7).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(size), &poset, |b, p| {
            b.iter(|| enumerate_ideals(black_box(p), u64::MAX).unwrap().len())
        });
    }
    g.finish();
}

fn solvers(c: &mut Criterion) {
    let mut g = c.benchmark_group("solvers");
    for (n, bound) in [(4, 3), (6, 4)] {
        let f = ValueOracle::random_submodular(n, bound, 1).unwrap();
        g.bench_function(format!("dg13/{n}x{bound}"), |b| {
            b.iter(|| double_greedy_smbil(black_box(&f), &ComponentOrder::Fixed).unwrap().value)
        });
    }
    let f = ValueOracle::random_dr_dl(Poset::random(14, 0.2, 3).unwrap(), 3, Default::default()).unwrap();
    let ext = linear_extension(f.poset().unwrap(), TieBreak::Id);
    g.bench_function("dl_double_greedy/14", |b| b.iter(|| dl_double_greedy(black_box(&f), 5, &ext).unwrap().value));
    let m = PosetMatroid::uniform(f.poset().unwrap().clone(), 4);
    g.bench_function("matroid_greedy/14", |b| b.iter(|| greedy_poset_matroid(black_box(&f), &m).unwrap().value));
    g.finish();
}

fn checkers(c: &mut Criterion) {
    let mut g = c.benchmark_group("checkers");
    g.sample_size(20);
    let f = ValueOracle::random_submodular(4, 3, 2).unwrap();
    for mode in [SubmodularMode::LocalSquares, SubmodularMode::AllPairs] {
        g.bench_function(format!("submodular/{mode:?}"), |b| {
            b.iter(|| check_submodular(black_box(&f), mode, Comparison::default()).unwrap().holds)
        });
    }
    let h = ValueOracle::random_dr_dl(Poset::random(10, 0.2, 4).unwrap(), 4, Default::default()).unwrap();
    for mode in [DrDlMode::Local, DrDlMode::Exhaustive] {
        g.bench_function(format!("dr_dl/{mode:?}"), |b| {
            b.iter(|| check_dr_dl(black_box(&h), mode, Comparison::default()).unwrap().holds)
        });
    }
    g.finish();
}

criterion_group!(benches, ideals, solvers, checkers);
criterion_main!(benches);
