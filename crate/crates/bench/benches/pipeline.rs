use std::sync::Arc;
use std::time::Duration;

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use gmplan_bench::{quartic, FERMAT, KLEIN, QUICK_EDGE};
use gmplan_core::algebra::integer;
use gmplan_core::budget::Budget;
use gmplan_core::connection::{gm_connection_at, Pencil};
use gmplan_core::dataset::enumerate_fewnomials;
use gmplan_core::features::{edge_vector, pca_fit};
use gmplan_core::jacobian::JacobianRing;
use gmplan_core::learn::{default_cnn_spec, Network, Sample};
use gmplan_core::picard_fuchs::first_ode;
use gmplan_core::scheduler::{brute_force, random_instance, queue_order, SearchOptions};

fn algebra(c: &mut Criterion) {
    let mut g = c.benchmark_group("algebra");
    g.sample_size(10).measurement_time(Duration::from_secs(5));
    for (name, s) in [("fermat", FERMAT), ("klein", KLEIN)] {
        let f = quartic(s);
        g.bench_function(format!("jacobian_ring/{name}"), |b| b.iter(|| JacobianRing::new(black_box(&f)).unwrap()));
    }
    let e = Pencil::from_smooth(quartic(QUICK_EDGE.0), quartic(QUICK_EDGE.1));
    g.bench_function("gm_connection_at_0", |b| b.iter(|| gm_connection_at(black_box(&e), &integer(0)).unwrap()));
    g.bench_function("first_ode", |b| b.iter(|| first_ode(black_box(&e), &Budget::seconds(30.0))));
    g.finish();
}

fn dataset(c: &mut Criterion) {
    let mut g = c.benchmark_group("dataset");
    g.sample_size(10);
    g.bench_function("enumerate_v4", |b| b.iter(|| enumerate_fewnomials(black_box(4)).unwrap()));
    let v = enumerate_fewnomials(4).unwrap();
    let rows: Vec<Vec<f64>> = v
        .members
        .iter()
        .enumerate()
        .flat_map(|(i, f)| v.members[i + 1..].iter().map(move |g| edge_vector(f, g)))
        .collect();
    g.bench_function("pca_v4_edges", |b| b.iter(|| pca_fit(black_box(&rows), 23).unwrap()));
    g.finish();
}

fn learn(c: &mut Criterion) {
    let net = Network::init_seeded(default_cnn_spec(2, 21), 0, 1.0).unwrap();
    let batch: Vec<Sample> =
        (0..16).map(|i| Sample::labeled((0..2 * 21 * 21).map(|j| ((i * j) % 7) as f64 / 7.0).collect(), i % 2 == 0)).collect();
    c.bench_function("learn/cnn_gradient_batch16", |b| b.iter(|| net.gradient(black_box(&batch)).unwrap()));
}

fn scheduler(c: &mut Criterion) {
    let (p, o) = random_instance(3, 40);
    let order = queue_order(&p, 0);
    let o = Arc::new(o);
    c.bench_function("scheduler/brute_force_40", |b| {
        b.iter(|| brute_force(&p, &order, o.clone(), &SearchOptions::default()).unwrap())
    });
}

criterion_group!(benches, algebra, dataset, learn, scheduler);
criterion_main!(benches);
