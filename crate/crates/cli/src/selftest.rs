//! Bundled invariant checks, runnable in any build via `naqrl selftest`.
//!
//! The `NAQRL_FAULT` environment variable injects faults so the checks can
//! be shown to catch regressions: `NAQRL_FAULT=h_norm` corrupts the
//! Hadamard normalization used by the unitarity check, which must then
//! fail.

use naqrl_core::bellman::{value_iteration, StateRegistry};
use naqrl_core::gates;
use naqrl_core::noncomm::{commutator_subgroup, group_closure};
use naqrl_core::pqc::{gradient, gradient_finite_difference, ParamVector, Placement};
use naqrl_core::{
    ActionUnitary, CircuitTemplate, ComplexMatrix, EnvironmentSpec, GateSpec, Observable,
    SeededRng, StateVector,
};

pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Hadamard used by the unitarity check; the fault hook replaces the
/// normalization constant.
fn selftest_hadamard() -> ComplexMatrix {
    match std::env::var("NAQRL_FAULT").as_deref() {
        Ok("h_norm") => {
            ComplexMatrix::from_real(2, 2, &[0.6, 0.6, 0.6, -0.6]).expect("static matrix")
        }
        _ => gates::hadamard(),
    }
}

fn check_unitarity(seed: u64) -> Check {
    let matrices = vec![
        ("H", selftest_hadamard()),
        ("X", gates::pauli_x()),
        ("Y", gates::pauli_y()),
        ("Z", gates::pauli_z()),
        ("CNOT", gates::cnot()),
        ("R(0.7)", gates::rotation(0.7)),
        ("CR(1.1)", gates::controlled_rotation(1.1)),
    ];
    let mut max_defect = 0.0f64;
    let mut worst = "";
    for (name, m) in &matrices {
        let d = m.unitarity_defect();
        if d > max_defect {
            max_defect = d;
            worst = name;
        }
    }

    let mut rng = SeededRng::from_seed(seed);
    let mut max_norm_drift = 0.0f64;
    for _ in 0..200 {
        let n = 2 + rng.index(5); // 2..=6 qubits
        let mut state = StateVector::basis_state(n, 0).expect("valid");
        let gates_in_seq = 1 + rng.index(100);
        for _ in 0..gates_in_seq {
            let q = rng.index(n);
            let gate = match rng.index(4) {
                0 => GateSpec::h(q),
                1 => GateSpec::r(q, rng.next_f64() * 6.28),
                2 => GateSpec::x(q),
                _ => GateSpec::cnot(q, (q + 1 + rng.index(n - 1)) % n),
            };
            state = state.apply_gate(&gate).expect("valid gate");
        }
        max_norm_drift = max_norm_drift.max((state.amplitudes().norm() - 1.0).abs());
    }

    let passed = max_defect <= 1e-9 && max_norm_drift <= 1e-9;
    Check {
        name: "unitarity",
        passed,
        detail: format!("max gate defect {max_defect:.2e} ({worst}), max norm drift {max_norm_drift:.2e}"),
    }
}

fn check_born_frequencies(seed: u64) -> Check {
    let plus = StateVector::basis_state(1, 0)
        .expect("valid")
        .apply_gate(&GateSpec::h(0))
        .expect("valid");
    let mut rng = SeededRng::from_seed(seed);
    let trials = 100_000;
    let mut zeros = 0usize;
    for _ in 0..trials {
        if plus.measure_computational(&mut rng).0 == 0 {
            zeros += 1;
        }
    }
    let freq = zeros as f64 / trials as f64;
    Check {
        name: "born_frequencies",
        passed: (0.49..=0.51).contains(&freq),
        detail: format!("outcome-0 frequency {freq:.5} over {trials} draws"),
    }
}

fn check_gradient(seed: u64) -> Check {
    let mut rng = SeededRng::from_seed(seed);
    let mut max_diff = 0.0f64;
    for _ in 0..5 {
        let mut placements = Vec::new();
        let mut param = 0usize;
        while param < 4 {
            match rng.index(4) {
                0 => {
                    placements.push(Placement::r(rng.index(2), param));
                    param += 1;
                }
                1 => {
                    let c = rng.index(2);
                    placements.push(Placement::cr(c, 1 - c, param));
                    param += 1;
                }
                2 => placements.push(Placement::h(rng.index(2))),
                _ => {
                    let c = rng.index(2);
                    placements.push(Placement::cnot(c, 1 - c));
                }
            }
        }
        let template = CircuitTemplate::new(2, 4, placements).expect("valid template");
        let theta = ParamVector::new((0..4).map(|_| rng.next_f64() * 6.28 - 3.14).collect())
            .expect("finite");
        let obs = Observable::new(random_hermitian(&mut rng, 4)).expect("hermitian");
        let exact = gradient(&template, &theta, &obs).expect("gradient");
        let fd = gradient_finite_difference(&template, &theta, &obs, 1e-5).expect("fd");
        for (a, b) in exact.iter().zip(&fd) {
            max_diff = max_diff.max((a - b).abs());
        }
    }
    Check {
        name: "gradient_check",
        passed: max_diff <= 1e-5,
        detail: format!("max |shift − fd| = {max_diff:.2e}"),
    }
}

fn random_hermitian(rng: &mut SeededRng, n: usize) -> ComplexMatrix {
    use naqrl_core::linalg::Complex64;
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

fn check_contraction() -> Check {
    let env = EnvironmentSpec::new(
        1,
        vec![
            ActionUnitary::new("I", ComplexMatrix::identity(2)).expect("unitary"),
            ActionUnitary::new("X", gates::pauli_x()).expect("unitary"),
        ],
        Observable::new(gates::pauli_z()).expect("hermitian"),
        0.9,
        0.0,
        8,
        StateVector::basis_state(1, 0).expect("valid"),
    )
    .expect("valid env");
    let mut registry = StateRegistry::new(0.99);
    let result = match value_iteration(&env, &mut registry, 1e-6) {
        Ok(r) => r,
        Err(e) => {
            return Check {
                name: "contraction",
                passed: false,
                detail: format!("value iteration failed: {e}"),
            }
        }
    };
    let fixed_point_err = (result.q.get(0, 0) - 10.0).abs();
    let mut worst_ratio = 0.0f64;
    for pair in result.sup_deltas.windows(2) {
        if pair[0] > 1e-12 {
            worst_ratio = worst_ratio.max(pair[1] / pair[0]);
        }
    }
    Check {
        name: "contraction",
        passed: fixed_point_err <= 1e-4 && worst_ratio <= 0.91,
        detail: format!(
            "fixed-point error {fixed_point_err:.2e}, worst sweep ratio {worst_ratio:.4} over {} sweeps",
            result.sweeps
        ),
    }
}

fn check_pauli_closure() -> Check {
    let full = match group_closure(&[gates::pauli_x(), gates::pauli_y(), gates::pauli_z()], 64) {
        Ok(c) => c,
        Err(e) => {
            return Check {
                name: "pauli_closure",
                passed: false,
                detail: format!("closure failed: {e}"),
            }
        }
    };
    let sub = match commutator_subgroup(&full) {
        Ok(s) => s,
        Err(e) => {
            return Check {
                name: "pauli_closure",
                passed: false,
                detail: format!("commutator subgroup failed: {e}"),
            }
        }
    };
    let minus_i = ComplexMatrix::identity(2).scale(num_minus_one());
    let real_subgroup = group_closure(&[gates::pauli_x(), gates::pauli_z()], 64)
        .map(|c| c.len())
        .unwrap_or(0);
    let passed = full.len() == 16
        && sub.len() == 2
        && sub.contains(&ComplexMatrix::identity(2))
        && sub.contains(&minus_i)
        && real_subgroup == 8;
    Check {
        name: "pauli_closure",
        passed,
        detail: format!(
            "closure(X,Y,Z) = {} elements, commutator subgroup = {}, closure(X,Z) = {real_subgroup}",
            full.len(),
            sub.len()
        ),
    }
}

fn num_minus_one() -> naqrl_core::linalg::Complex64 {
    naqrl_core::linalg::Complex64::new(-1.0, 0.0)
}

/// Runs every check and prints one line per check; returns true iff all
/// passed.
pub fn run(seed: u64) -> bool {
    let checks = vec![
        check_unitarity(seed),
        check_born_frequencies(seed),
        check_gradient(seed),
        check_contraction(),
        check_pauli_closure(),
    ];
    let mut all_passed = true;
    for check in &checks {
        let status = if check.passed { "PASS" } else { "FAIL" };
        println!("check {:<18} {status}  {}", check.name, check.detail);
        all_passed &= check.passed;
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    println!("selftest: {passed}/{} checks passed (seed {seed})", checks.len());
    all_passed
}
