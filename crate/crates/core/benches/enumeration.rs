use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use purity_lab::algcore::{Budget, LatticeModule};
use purity_lab::fixtures::{e1_datum, e1_order, e1_r1, e1_r2};
use purity_lab::maranda::MarandaReport;
use purity_lab::par;
use purity_lab::rrfun::fullness_direct;

fn modes(c: &mut Criterion, name: &str, mut f: impl FnMut()) {
    let mut g = c.benchmark_group(name);
    g.sample_size(20);
    for (label, seq) in [("parallel", false), ("sequential", true)] {
        par::set_sequential(seq);
        g.bench_function(BenchmarkId::from_parameter(label), |b| b.iter(&mut f));
    }
    par::set_sequential(false);
    g.finish();
}

fn family() -> Vec<LatticeModule> {
    let o = e1_order();
    let (lam, r1, r2) = (o.regular(16).unwrap(), e1_r1(&o, 16).unwrap(), e1_r2(&o, 16).unwrap());
    vec![lam.clone(), r1.clone(), r2.clone(), r1.direct_sum(&r2).unwrap(), lam.direct_sum(&r1).unwrap()]
}

fn maranda(c: &mut Criterion) {
    let fam: Vec<(String, LatticeModule)> = family().into_iter().enumerate().map(|(i, l)| (format!("L{i}"), l)).collect();
    let budget = Budget::default();
    modes(c, "maranda_report", || {
        MarandaReport::build(&fam, 6, &budget).unwrap();
    });
}

fn fullness(c: &mut Criterion) {
    let b = e1_datum(32).unwrap();
    let d = b.build_d().unwrap();
    let lats = family();
    modes(c, "fullness_direct", || {
        fullness_direct(&b, &d, &lats, 8).unwrap();
    });
}

criterion_group!(benches, maranda, fullness);
criterion_main!(benches);
