use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;
use qclone_core::bounds::bound_1ton;
use qclone_core::cloning::{gm_apply, werner_output};
use qclone_core::fock::{self, evolve, EvolutionParams, FockState};
use qclone_core::ks::{prepare_psi1, run_joint_device};
use qclone_core::qubit::Ket;
use qclone_core::stimulated::{evolve_ladder, StimulatedLadder};
use qclone_core::vatom::{fidelity_curves, simulate_vatoms};
use std::hint::black_box;

fn bench_cloning(c: &mut Criterion) {
    let plus = Ket::new(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]).unwrap();
    c.bench_function("gm_apply 2->5", |b| {
        b.iter(|| black_box(gm_apply(black_box(&plus), 2, 5).unwrap()))
    });
    c.bench_function("werner_output 2->4", |b| {
        b.iter(|| black_box(werner_output(black_box(&plus.density()), 2, 4).unwrap()))
    });
}

fn bench_fock(c: &mut Criterion) {
    let h = fock::lambda_schwinger(1.0);
    let s = FockState::basis(vec![3, 0, 0, 0, 3]);
    c.bench_function("taylor evolve lambda m=3 N=3 gt=1", |b| {
        b.iter(|| black_box(evolve(&h, &s, &EvolutionParams::taylor(1.0)).unwrap()))
    });
    let pdc = fock::pdc_classical_pump(1.0);
    let seed = FockState::basis(vec![1, 0, 0, 0]);
    c.bench_function("taylor evolve pair source gt=0.5", |b| {
        b.iter(|| black_box(evolve(&pdc, &seed, &EvolutionParams::taylor(0.5)).unwrap()))
    });
}

fn bench_ladder(c: &mut Criterion) {
    let init = StimulatedLadder::initial(400, 6).unwrap();
    c.bench_function("ladder evolution m=400 N=6", |b| {
        b.iter(|| black_box(evolve_ladder(black_box(&init), 0.04)))
    });
}

fn bench_vatoms(c: &mut Criterion) {
    let grid: Vec<f64> = (0..24).map(|i| 3.0 * i as f64 / 23.0).collect();
    c.bench_function("vatom curves N=3", |b| {
        b.iter(|| {
            let table = simulate_vatoms(3, &grid).unwrap();
            black_box(fidelity_curves(&table))
        })
    });
}

fn bench_bounds(c: &mut Criterion) {
    c.bench_function("scaling bound LP N=8", |b| {
        b.iter(|| black_box(bound_1ton(8).unwrap()))
    });
}

fn bench_ks(c: &mut Criterion) {
    let psi = prepare_psi1();
    c.bench_function("joint device distribution", |b| {
        b.iter(|| black_box(run_joint_device(black_box(&psi))))
    });
}

criterion_group!(
    benches,
    bench_cloning,
    bench_fock,
    bench_ladder,
    bench_vatoms,
    bench_bounds,
    bench_ks
);
criterion_main!(benches);
