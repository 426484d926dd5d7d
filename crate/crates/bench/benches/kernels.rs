//! Hot-path benchmarks: targeted gate application against register size,
//! the Hermitian matrix exponential, value iteration, Pauli-group closure,
//! and the shift-rule gradient.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use naqrl_core::bellman::{value_iteration, StateRegistry};
use naqrl_core::gates;
use naqrl_core::linalg::{Complex64, ComplexMatrix};
use naqrl_core::noncomm::group_closure;
use naqrl_core::pqc::{gradient, ParamVector, Placement};
use naqrl_core::{
    ActionUnitary, CircuitTemplate, EnvironmentSpec, GateSpec, Observable, SeededRng, StateVector,
};

fn bench_gate_application(c: &mut Criterion) {
    let mut group = c.benchmark_group("gate_layer");
    for &n in &[4usize, 8, 10] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            let state = StateVector::basis_state(n, 0).unwrap();
            b.iter(|| {
                let mut s = state.clone();
                for q in 0..n {
                    s = s.apply_gate(&GateSpec::h(q)).unwrap();
                }
                for q in 0..n - 1 {
                    s = s.apply_gate(&GateSpec::cnot(q, q + 1)).unwrap();
                }
                s
            });
        });
    }
    group.finish();
}

fn random_hermitian(rng: &mut SeededRng, n: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let re = rng.next_f64() * 2.0 - 1.0;
            let im = if i == j { 0.0 } else { rng.next_f64() * 2.0 - 1.0 };
            m.set(i, j, Complex64::new(re, im));
            m.set(j, i, Complex64::new(re, -im));
        }
    }
    m
}

fn bench_expm(c: &mut Criterion) {
    let mut rng = SeededRng::from_seed(1);
    let h16 = random_hermitian(&mut rng, 16);
    c.bench_function("expm_skew_dim16", |b| b.iter(|| h16.expm_skew(0.37).unwrap()));
}

fn bench_value_iteration(c: &mut Criterion) {
    let env = EnvironmentSpec::new(
        1,
        vec![
            ActionUnitary::new("I", ComplexMatrix::identity(2)).unwrap(),
            ActionUnitary::new("X", gates::pauli_x()).unwrap(),
        ],
        Observable::new(gates::pauli_z()).unwrap(),
        0.9,
        0.0,
        8,
        StateVector::basis_state(1, 0).unwrap(),
    )
    .unwrap();
    c.bench_function("value_iteration_two_state", |b| {
        b.iter(|| {
            let mut registry = StateRegistry::new(0.99);
            value_iteration(&env, &mut registry, 1e-6).unwrap()
        })
    });
}

fn bench_group_closure(c: &mut Criterion) {
    let generators = vec![gates::pauli_x(), gates::pauli_y(), gates::pauli_z()];
    c.bench_function("pauli_group_closure", |b| {
        b.iter(|| group_closure(&generators, 64).unwrap())
    });
}

fn bench_gradient(c: &mut Criterion) {
    let template = CircuitTemplate::new(
        2,
        4,
        vec![
            Placement::h(0),
            Placement::r(0, 0),
            Placement::cr(0, 1, 1),
            Placement::cnot(1, 0),
            Placement::r(1, 2),
            Placement::cr(1, 0, 3),
        ],
    )
    .unwrap();
    let theta = ParamVector::new(vec![0.3, 1.2, -0.7, 2.1]).unwrap();
    let mut rng = SeededRng::from_seed(2);
    let obs = Observable::new(random_hermitian(&mut rng, 4)).unwrap();
    c.bench_function("shift_rule_gradient_2q4p", |b| {
        b.iter(|| gradient(&template, &theta, &obs).unwrap())
    });
}

criterion_group!(
    benches,
    bench_gate_application,
    bench_expm,
    bench_value_iteration,
    bench_group_closure,
    bench_gradient
);
criterion_main!(benches);
