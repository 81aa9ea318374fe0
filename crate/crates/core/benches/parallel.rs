use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use gcs::dynamics::{ehrenfest_sweep, EhrenfestCase};
use gcs::linalg::{CVec, C64};
use gcs::*;

fn spin(s: &str) -> LieAlgebraRep {
    build_spin_rep(s.parse().unwrap())
}

fn sweep_cases(rep: &LieAlgebraRep, count: usize) -> Vec<EhrenfestCase> {
    (0..count)
        .map(|k| {
            let x = k as f64;
            let psi = CVec::from_iterator(
                rep.d(),
                (0..rep.d()).map(|i| C64::new((x + i as f64).sin(), (0.7 * x - i as f64).cos())),
            );
            let psi = &psi / C64::new(psi.norm(), 0.0);
            let h = vec![(0.3 * x).cos(), (0.5 * x).sin(), 1.0];
            EhrenfestCase { psi0: psi, schedule: HamiltonianSchedule::constant(h, 5.0).unwrap() }
        })
        .collect()
}

/// Runs `f` once per execution mode: the global rayon pool and a one-thread
/// pool when the `parallel` feature is on, the sequential fallback otherwise.
fn modes<F: Fn() + Sync>(c: &mut Criterion, group: &str, f: F) {
    let mut g = c.benchmark_group(group);
    g.sample_size(10);
    #[cfg(feature = "parallel")]
    {
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let threads = rayon::current_num_threads();
        g.bench_function(BenchmarkId::new("rayon-pool", threads), |b| b.iter(&f));
        g.bench_function(BenchmarkId::new("single-thread", 1), |b| b.iter(|| one.install(&f)));
    }
    #[cfg(not(feature = "parallel"))]
    g.bench_function(BenchmarkId::new("sequential", 1), |b| b.iter(&f));
    g.finish();
}

fn identity(c: &mut Criterion) {
    let rep = spin("2");
    let psi = FiducialVector::highest_weight(&rep).unwrap();
    let quad = haar_quadrature(&rep, QuadratureOrders::new(16, 32, 32)).unwrap();
    modes(c, "identity_resolution/spin2/16x32x32", || {
        identity_resolution(&rep, &psi, &quad).unwrap();
    });
    modes(c, "haar_quadrature/spin2/16x32x32", || {
        haar_quadrature(&rep, QuadratureOrders::new(16, 32, 32)).unwrap();
    });
}

fn kernel(c: &mut Criterion) {
    let rep = spin("1");
    let tol = Tolerances::default();
    let psi = FiducialVector::matsumoto(&rep).unwrap();
    let quad = haar_quadrature(&rep, QuadratureOrders::new(6, 10, 10)).unwrap();
    let sched = HamiltonianSchedule::constant(vec![0.2, 0.0, 1.0], 1.0).unwrap();
    let id = GroupElement::identity(&rep);
    for mode in [KernelMode::Exact, KernelMode::FirstOrder] {
        modes(c, &format!("path_integral/{mode:?}/600-nodes"), || {
            discrete_propagator(&rep, &psi, &sched, 1.0, &id, &id, &[4], &quad, mode, &tol).unwrap();
        });
    }
}

fn sweep(c: &mut Criterion) {
    let rep = spin("1");
    let tol = Tolerances::default();
    let cases = sweep_cases(&rep, 64);
    modes(c, "ehrenfest_sweep/64-cases", || {
        ehrenfest_sweep(&rep, &cases, 1e-2, &tol).unwrap();
    });
}

criterion_group!(benches, identity, kernel, sweep);
criterion_main!(benches);
