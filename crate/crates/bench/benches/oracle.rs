use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use covadj::scm::{counterfactual_joint, joint_observed, random_scm, search_counterexample, Term};
use covadj::{AdjustmentQuery, Assignment, NodeId};
use covadj_bench::{fig1, layered};

fn exact_inference(c: &mut Criterion) {
    let small = random_scm(&fig1('c'), 0, 2, 0.05).unwrap();
    c.bench_function("joint_observed/fig1c", |b| {
        b.iter(|| joint_observed(black_box(&small)).unwrap())
    });
    // 12 observed binary nodes plus 8 latents
    let wide = random_scm(&layered(3, 4), 0, 2, 0.05).unwrap();
    c.bench_function("joint_observed/layered_3x4", |b| {
        b.iter(|| joint_observed(black_box(&wide)).unwrap())
    });
}

fn counterfactuals(c: &mut Criterion) {
    let m = random_scm(&fig1('a'), 1, 2, 0.05).unwrap();
    let x: Assignment = [(NodeId::from("X"), 1)].into_iter().collect();
    let terms = [Term::under("Y", x), Term::factual("X"), Term::factual("Z")];
    c.bench_function("counterfactual_joint/fig1a", |b| {
        b.iter(|| counterfactual_joint(black_box(&m), &terms).unwrap())
    });
}

fn refutation(c: &mut Criterion) {
    let g = fig1('c');
    let q = AdjustmentQuery::from_names(&["X"], &["Y"], &["Z"]);
    c.bench_function("search_counterexample/fig1c", |b| {
        b.iter(|| search_counterexample(black_box(&g), &q, 200, 0.01, 0).unwrap())
    });
}

criterion_group!(benches, exact_inference, counterfactuals, refutation);
criterion_main!(benches);
