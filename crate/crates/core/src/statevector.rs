//! n-qubit pure states and targeted gate application.
//!
//! Gates act on selected qubits by contracting the gate matrix against the
//! amplitude vector directly; the full 2^n × 2^n embedding is never formed.
//! Qubit 0 is the most significant bit of a basis index, so on two qubits
//! `basis_state(2, 2)` is |10⟩.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates;
use crate::linalg::{Complex64, ComplexMatrix, ComplexVector, UNITARY_TOL};
use crate::observable::Observable;
use crate::rng::SeededRng;

/// Largest supported register size.
pub const MAX_QUBITS: usize = 12;
/// Tolerance on `Σ|amplitude|² = 1`.
pub const NORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawState {
    n: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

/// Normalized pure state of `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawState", into = "RawState")]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: ComplexVector,
}

impl TryFrom<RawState> for StateVector {
    type Error = Error;

    fn try_from(raw: RawState) -> Result<Self> {
        if raw.re.len() != raw.im.len() {
            return Err(Error::invalid(
                "state literal",
                format!("re has {} entries but im has {}", raw.re.len(), raw.im.len()),
            ));
        }
        let amps = ComplexVector::new(
            raw.re
                .iter()
                .zip(raw.im.iter())
                .map(|(&re, &im)| Complex64::new(re, im))
                .collect(),
        )?;
        StateVector::from_amplitudes(raw.n, amps)
    }
}

impl From<StateVector> for RawState {
    fn from(s: StateVector) -> Self {
        RawState {
            n: s.num_qubits,
            re: s.amplitudes.entries().iter().map(|c| c.re).collect(),
            im: s.amplitudes.entries().iter().map(|c| c.im).collect(),
        }
    }
}

impl StateVector {
    /// Computational basis state |index⟩.
    pub fn basis_state(num_qubits: usize, index: usize) -> Result<Self> {
        Self::check_qubit_count(num_qubits)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::IndexOutOfRange {
                context: "basis state",
                index,
                bound: dim,
            });
        }
        let mut amps = ComplexVector::zeros(dim);
        amps.entries_mut()[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_qubits,
            amplitudes: amps,
        })
    }

    /// Builds a state from amplitudes, checking dimension and normalization.
    pub fn from_amplitudes(num_qubits: usize, amplitudes: ComplexVector) -> Result<Self> {
        Self::check_qubit_count(num_qubits)?;
        let dim = 1usize << num_qubits;
        if amplitudes.dim() != dim {
            return Err(Error::invalid(
                "state dimension",
                format!("{} qubits need {} amplitudes, got {}", num_qubits, dim, amplitudes.dim()),
            ));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid(
                "state normalization",
                format!("norm is {norm}, expected 1 within {NORM_TOL:e}"),
            ));
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    fn check_qubit_count(num_qubits: usize) -> Result<()> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::invalid(
                "qubit count",
                format!("{num_qubits} outside 1..={MAX_QUBITS}"),
            ));
        }
        Ok(())
    }

    /// Internal constructor for amplitudes produced by unitary evolution,
    /// where normalization is already guaranteed up to roundoff.
    pub(crate) fn from_evolved(num_qubits: usize, amplitudes: ComplexVector) -> Self {
        debug_assert!((amplitudes.norm() - 1.0).abs() <= 1e-6);
        Self {
            num_qubits,
            amplitudes,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    /// Applies a gate to the selected qubits.
    pub fn apply_gate(&self, gate: &GateSpec) -> Result<StateVector> {
        gate.validate(self.num_qubits)?;
        let matrix = gate.realize()?;
        Ok(self.contract(&gate.targets, &matrix))
    }

    /// Applies a full-dimension matrix to the state. The matrix must be
    /// unitary within [`UNITARY_TOL`] so the result stays normalized.
    pub fn apply_matrix(&self, matrix: &ComplexMatrix) -> Result<StateVector> {
        if matrix.rows() != self.dim() || matrix.cols() != self.dim() {
            return Err(Error::ShapeMismatch {
                context: "apply_matrix",
                left_rows: matrix.rows(),
                left_cols: matrix.cols(),
                right_rows: self.dim(),
                right_cols: 1,
            });
        }
        let amps = matrix.mul_vector(&self.amplitudes)?;
        Ok(Self::from_evolved(self.num_qubits, amps))
    }

    /// Contracts a 2^k gate matrix against the target qubits.
    fn contract(&self, targets: &[usize], matrix: &ComplexMatrix) -> StateVector {
        let n = self.num_qubits;
        let k = targets.len();
        let sub_dim = 1usize << k;
        debug_assert_eq!(matrix.rows(), sub_dim);
        // targets[j] supplies bit (k-1-j) of the gate's sub-index
        let masks: Vec<usize> = targets.iter().map(|&q| 1usize << (n - 1 - q)).collect();
        let all_mask: usize = masks.iter().fold(0, |acc, m| acc | m);

        let amps = self.amplitudes.entries();
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        let mut indices = vec![0usize; sub_dim];
        for base in 0..amps.len() {
            if base & all_mask != 0 {
                continue;
            }
            for (s, slot) in indices.iter_mut().enumerate() {
                let mut idx = base;
                for (j, &mask) in masks.iter().enumerate() {
                    if s & (1 << (k - 1 - j)) != 0 {
                        idx |= mask;
                    }
                }
                *slot = idx;
            }
            for s in 0..sub_dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for (t, &idx) in indices.iter().enumerate() {
                    acc += matrix.get(s, t) * amps[idx];
                }
                out[indices[s]] = acc;
            }
        }
        StateVector::from_evolved(n, ComplexVector::new(out).expect("finite amplitudes"))
    }

    /// Born-rule probability of each basis outcome.
    pub fn born_probabilities(&self) -> Vec<f64> {
        self.amplitudes.entries().iter().map(|c| c.norm_sqr()).collect()
    }

    /// Samples a full computational-basis measurement.
    ///
    /// Returns the outcome index, the collapsed (exact basis) state, and the
    /// pre-collapse Born probability of the outcome.
    pub fn measure_computational(&self, rng: &mut SeededRng) -> (usize, StateVector, f64) {
        let probs = self.born_probabilities();
        let u = rng.next_f64();
        let mut cumulative = 0.0;
        let mut outcome = probs.len() - 1;
        for (i, &p) in probs.iter().enumerate() {
            cumulative += p;
            if u < cumulative {
                outcome = i;
                break;
            }
        }
        // guard against roundoff putting u past the final cumulative sum
        if probs[outcome] == 0.0 {
            outcome = probs
                .iter()
                .enumerate()
                .rev()
                .find(|(_, &p)| p > 0.0)
                .map(|(i, _)| i)
                .unwrap_or(0);
        }
        let collapsed =
            StateVector::basis_state(self.num_qubits, outcome).expect("outcome in range");
        (outcome, collapsed, probs[outcome])
    }

    /// `⟨ψ|obs|ψ⟩`; the (tiny, Hermiticity-bounded) imaginary residue is
    /// discarded.
    pub fn expectation(&self, obs: &Observable) -> Result<f64> {
        if obs.dim() != self.dim() {
            return Err(Error::ShapeMismatch {
                context: "expectation",
                left_rows: obs.dim(),
                left_cols: obs.dim(),
                right_rows: self.dim(),
                right_cols: 1,
            });
        }
        let applied = obs.matrix().mul_vector(&self.amplitudes)?;
        let value = self.amplitudes.inner(&applied)?;
        debug_assert!(value.im.abs() <= 1e-10);
        Ok(value.re)
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::ShapeMismatch {
                context: "fidelity",
                left_rows: self.dim(),
                left_cols: 1,
                right_rows: other.dim(),
                right_cols: 1,
            });
        }
        Ok(self.amplitudes.inner(&other.amplitudes)?.norm_sqr())
    }
}

/// Gate kinds supported by [`GateSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    CNOT,
    R,
    CR,
    Custom,
}

impl GateKind {
    fn arity(self) -> Option<usize> {
        match self {
            GateKind::H | GateKind::X | GateKind::Y | GateKind::Z | GateKind::R => Some(1),
            GateKind::CNOT | GateKind::CR => Some(2),
            GateKind::Custom => None,
        }
    }

    fn takes_param(self) -> bool {
        matches!(self, GateKind::R | GateKind::CR)
    }
}

/// A gate placement: kind, ordered target qubits, optional rotation angle,
/// and an explicit matrix for `Custom`. For two-qubit kinds the first target
/// is the control.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateSpec {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom_matrix: Option<ComplexMatrix>,
}

impl GateSpec {
    pub fn h(qubit: usize) -> Self {
        Self::fixed(GateKind::H, vec![qubit])
    }

    pub fn x(qubit: usize) -> Self {
        Self::fixed(GateKind::X, vec![qubit])
    }

    pub fn y(qubit: usize) -> Self {
        Self::fixed(GateKind::Y, vec![qubit])
    }

    pub fn z(qubit: usize) -> Self {
        Self::fixed(GateKind::Z, vec![qubit])
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::fixed(GateKind::CNOT, vec![control, target])
    }

    pub fn r(qubit: usize, theta: f64) -> Self {
        Self {
            kind: GateKind::R,
            targets: vec![qubit],
            param: Some(theta),
            custom_matrix: None,
        }
    }

    pub fn cr(control: usize, target: usize, theta: f64) -> Self {
        Self {
            kind: GateKind::CR,
            targets: vec![control, target],
            param: Some(theta),
            custom_matrix: None,
        }
    }

    pub fn custom(targets: Vec<usize>, matrix: ComplexMatrix) -> Self {
        Self {
            kind: GateKind::Custom,
            targets,
            param: None,
            custom_matrix: Some(matrix),
        }
    }

    fn fixed(kind: GateKind, targets: Vec<usize>) -> Self {
        Self {
            kind,
            targets,
            param: None,
            custom_matrix: None,
        }
    }

    /// Checks arity, target ranges, parameter presence, and (for custom
    /// gates) unitarity against a register of `num_qubits` qubits.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        if let Some(arity) = self.kind.arity() {
            if self.targets.len() != arity {
                return Err(Error::invalid(
                    "gate arity",
                    format!("{:?} takes {} target(s), got {}", self.kind, arity, self.targets.len()),
                ));
            }
        }
        for &q in &self.targets {
            if q >= num_qubits {
                return Err(Error::IndexOutOfRange {
                    context: "gate target",
                    index: q,
                    bound: num_qubits,
                });
            }
        }
        for (i, &a) in self.targets.iter().enumerate() {
            if self.targets[i + 1..].contains(&a) {
                return Err(Error::invalid("gate targets", "target qubits must be distinct"));
            }
        }
        match (self.kind.takes_param(), self.param) {
            (true, None) => {
                return Err(Error::invalid(
                    "gate param",
                    format!("{:?} requires an angle", self.kind),
                ))
            }
            (true, Some(p)) if !p.is_finite() => {
                return Err(Error::NonFinite { context: "gate param" })
            }
            (false, Some(_)) => {
                return Err(Error::invalid(
                    "gate param",
                    format!("{:?} does not take an angle", self.kind),
                ))
            }
            _ => {}
        }
        match (self.kind, &self.custom_matrix) {
            (GateKind::Custom, Some(m)) => {
                let expected = 1usize << self.targets.len();
                if m.rows() != expected || m.cols() != expected {
                    return Err(Error::invalid(
                        "custom gate",
                        format!(
                            "matrix is {}x{}, expected {expected}x{expected} for {} target(s)",
                            m.rows(),
                            m.cols(),
                            self.targets.len()
                        ),
                    ));
                }
                m.ensure_unitary(UNITARY_TOL)?;
            }
            (GateKind::Custom, None) => {
                return Err(Error::invalid("custom gate", "missing matrix"));
            }
            (_, Some(_)) => {
                return Err(Error::invalid(
                    "custom gate",
                    format!("{:?} does not take an explicit matrix", self.kind),
                ));
            }
            _ => {}
        }
        if self.targets.is_empty() {
            return Err(Error::invalid("gate targets", "at least one target required"));
        }
        Ok(())
    }

    /// The gate's matrix on its own 2^k-dimensional subspace.
    pub fn realize(&self) -> Result<ComplexMatrix> {
        Ok(match self.kind {
            GateKind::H => gates::hadamard(),
            GateKind::X => gates::pauli_x(),
            GateKind::Y => gates::pauli_y(),
            GateKind::Z => gates::pauli_z(),
            GateKind::CNOT => gates::cnot(),
            GateKind::R => gates::rotation(self.param.expect("validated")),
            GateKind::CR => gates::controlled_rotation(self.param.expect("validated")),
            GateKind::Custom => self.custom_matrix.clone().expect("validated"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Test oracle: the full 2^n embedding of a gate, built entry by entry
    /// from the definition (gate entry on target sub-indices, identity on
    /// the rest). Independent of the contraction path in `apply_gate`.
    fn embed(num_qubits: usize, targets: &[usize], m: &ComplexMatrix) -> ComplexMatrix {
        let dim = 1usize << num_qubits;
        let k = targets.len();
        let masks: Vec<usize> = targets.iter().map(|&q| 1usize << (num_qubits - 1 - q)).collect();
        let all_mask: usize = masks.iter().fold(0, |a, b| a | b);
        let sub = |index: usize| -> usize {
            let mut s = 0;
            for (j, &mask) in masks.iter().enumerate() {
                if index & mask != 0 {
                    s |= 1 << (k - 1 - j);
                }
            }
            s
        };
        let mut out = ComplexMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                if i & !all_mask == j & !all_mask {
                    out.set(i, j, m.get(sub(i), sub(j)));
                }
            }
        }
        out
    }

    #[test]
    fn basis_state_indexing() {
        let s = StateVector::basis_state(1, 0).unwrap();
        assert_eq!(s.amplitudes().entries(), &[c(1.0, 0.0), c(0.0, 0.0)]);

        // qubit 0 is the most significant bit: index 2 on two qubits is |10⟩
        let s = StateVector::basis_state(2, 2).unwrap();
        assert_eq!(
            s.amplitudes().entries(),
            &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]
        );

        let s = StateVector::basis_state(3, 7).unwrap();
        assert_eq!(s.amplitudes().entries()[7], c(1.0, 0.0));

        assert!(StateVector::basis_state(2, 4).is_err());
    }

    #[test]
    fn hadamard_creates_equal_superposition() {
        let s = StateVector::basis_state(1, 0).unwrap();
        let out = s.apply_gate(&GateSpec::h(0)).unwrap();
        let amp = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out.amplitudes().entries()[0] - c(amp, 0.0)).norm() <= 1e-12);
        assert!((out.amplitudes().entries()[1] - c(amp, 0.0)).norm() <= 1e-12);
    }

    #[test]
    fn cnot_worked_examples() {
        let s00 = StateVector::basis_state(2, 0).unwrap();
        let out = s00.apply_gate(&GateSpec::cnot(0, 1)).unwrap();
        assert_eq!(out.amplitudes().entries()[0], c(1.0, 0.0));

        let s10 = StateVector::basis_state(2, 2).unwrap();
        let out = s10.apply_gate(&GateSpec::cnot(0, 1)).unwrap();
        assert_eq!(out.amplitudes().entries()[3], c(1.0, 0.0));
    }

    #[test]
    fn contraction_matches_embedded_matrix() {
        let mut rng = SeededRng::from_seed(21);
        let single: Vec<(GateKind, ComplexMatrix)> = vec![
            (GateKind::H, gates::hadamard()),
            (GateKind::X, gates::pauli_x()),
            (GateKind::Y, gates::pauli_y()),
            (GateKind::R, gates::rotation(0.9)),
        ];
        for n in 2..=3usize {
            let mut state = StateVector::basis_state(n, 0).unwrap();
            // randomize the state a little first
            for q in 0..n {
                state = state.apply_gate(&GateSpec::r(q, rng.next_f64() * 6.0)).unwrap();
            }
            for _ in 0..20 {
                let (spec, matrix, targets) = if rng.next_f64() < 0.5 {
                    let (kind, m) = single[rng.index(single.len())].clone();
                    let q = rng.index(n);
                    let spec = match kind {
                        GateKind::R => GateSpec::r(q, 0.9),
                        GateKind::H => GateSpec::h(q),
                        GateKind::X => GateSpec::x(q),
                        _ => GateSpec::y(q),
                    };
                    (spec, m, vec![q])
                } else {
                    let a = rng.index(n);
                    let b = (a + 1 + rng.index(n - 1)) % n;
                    if rng.next_f64() < 0.5 {
                        (GateSpec::cnot(a, b), gates::cnot(), vec![a, b])
                    } else {
                        (
                            GateSpec::cr(a, b, 1.3),
                            gates::controlled_rotation(1.3),
                            vec![a, b],
                        )
                    }
                };
                let fast = state.apply_gate(&spec).unwrap();
                let full = embed(n, &targets, &matrix);
                let slow = state.apply_matrix(&full).unwrap();
                let diff: f64 = fast
                    .amplitudes()
                    .entries()
                    .iter()
                    .zip(slow.amplitudes().entries())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                assert!(diff <= 1e-12, "contraction disagrees with embedding: {diff}");
                state = fast;
            }
        }
    }

    #[test]
    fn embedding_oracle_agrees_with_kron_for_adjacent_targets() {
        let m = gates::rotation(1.1);
        let by_rule = embed(3, &[1], &m);
        let by_kron = ComplexMatrix::identity(2)
            .kron(&m)
            .unwrap()
            .kron(&ComplexMatrix::identity(2))
            .unwrap();
        assert!(by_rule.max_abs_diff(&by_kron) <= 1e-15);
    }

    #[test]
    fn measurement_of_basis_state_is_deterministic() {
        let s = StateVector::basis_state(1, 0).unwrap();
        let mut rng = SeededRng::from_seed(5);
        let (outcome, collapsed, p) = s.measure_computational(&mut rng);
        assert_eq!(outcome, 0);
        assert_eq!(p, 1.0);
        assert_eq!(collapsed.amplitudes().entries()[0], c(1.0, 0.0));
    }

    #[test]
    fn born_frequencies_on_plus_state() {
        let plus = StateVector::basis_state(1, 0)
            .unwrap()
            .apply_gate(&GateSpec::h(0))
            .unwrap();
        let mut rng = SeededRng::from_seed(2024);
        let trials = 100_000;
        let mut zeros = 0usize;
        for _ in 0..trials {
            let (outcome, _, p) = plus.measure_computational(&mut rng);
            assert!((p - 0.5).abs() <= 1e-12);
            if outcome == 0 {
                zeros += 1;
            }
        }
        let freq = zeros as f64 / trials as f64;
        assert!((0.49..=0.51).contains(&freq), "frequency {freq} outside [0.49, 0.51]");
    }

    #[test]
    fn measurement_is_reproducible() {
        let plus = StateVector::basis_state(1, 0)
            .unwrap()
            .apply_gate(&GateSpec::h(0))
            .unwrap();
        let run = |seed: u64| -> Vec<usize> {
            let mut rng = SeededRng::from_seed(seed);
            (0..32).map(|_| plus.measure_computational(&mut rng).0).collect()
        };
        assert_eq!(run(9), run(9));
    }

    #[test]
    fn expectation_examples() {
        let z = Observable::new(gates::pauli_z()).unwrap();
        let zero = StateVector::basis_state(1, 0).unwrap();
        assert!((zero.expectation(&z).unwrap() - 1.0).abs() <= 1e-12);

        let plus = zero.apply_gate(&GateSpec::h(0)).unwrap();
        assert!(plus.expectation(&z).unwrap().abs() <= 1e-12);

        let zz = Observable::new(gates::pauli_z().kron(&gates::pauli_z()).unwrap()).unwrap();
        let s11 = StateVector::basis_state(2, 3).unwrap();
        assert!((s11.expectation(&zz).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn fidelity_examples() {
        let zero = StateVector::basis_state(1, 0).unwrap();
        let one = StateVector::basis_state(1, 1).unwrap();
        let plus = zero.apply_gate(&GateSpec::h(0)).unwrap();
        assert!((zero.fidelity(&zero).unwrap() - 1.0).abs() <= 1e-15);
        assert!(zero.fidelity(&one).unwrap() <= 1e-15);
        assert!((zero.fidelity(&plus).unwrap() - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn gate_order_matters() {
        let s00 = StateVector::basis_state(2, 0).unwrap();
        let h_then_cnot = s00
            .apply_gate(&GateSpec::h(0))
            .unwrap()
            .apply_gate(&GateSpec::cnot(0, 1))
            .unwrap();
        let cnot_then_h = s00
            .apply_gate(&GateSpec::cnot(0, 1))
            .unwrap()
            .apply_gate(&GateSpec::h(0))
            .unwrap();
        let f = h_then_cnot.fidelity(&cnot_then_h).unwrap();
        assert!(f < 1.0 - 1e-6, "gate order should matter, fidelity {f}");
        assert!((f - 0.25).abs() <= 1e-12);
    }

    #[test]
    fn norm_preserved_over_long_random_sequences() {
        let mut rng = SeededRng::from_seed(33);
        let n = 5;
        let mut state = StateVector::basis_state(n, 0).unwrap();
        for _ in 0..100 {
            let q = rng.index(n);
            let gate = match rng.index(4) {
                0 => GateSpec::h(q),
                1 => GateSpec::r(q, rng.next_f64() * 6.28),
                2 => GateSpec::x(q),
                _ => {
                    let t = (q + 1 + rng.index(n - 1)) % n;
                    GateSpec::cnot(q, t)
                }
            };
            state = state.apply_gate(&gate).unwrap();
        }
        assert!((state.amplitudes().norm() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn gate_validation_errors() {
        assert!(GateSpec::h(2).validate(2).is_err());
        assert!(GateSpec::cnot(1, 1).validate(2).is_err());
        assert!(GateSpec::fixed(GateKind::R, vec![0]).validate(1).is_err()); // missing angle
        let not_unitary = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(GateSpec::custom(vec![0], not_unitary).validate(1).is_err());
    }

    #[test]
    fn state_json_round_trip_and_gate_sequence_parse() {
        let s = StateVector::basis_state(2, 2).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        let back: StateVector = serde_json::from_str(&text).unwrap();
        assert_eq!(s, back);

        let seq = r#"[{"kind":"H","targets":[0]},{"kind":"CNOT","targets":[0,1]},{"kind":"R","targets":[1],"param":0.5}]"#;
        let gates: Vec<GateSpec> = serde_json::from_str(seq).unwrap();
        assert_eq!(gates.len(), 3);
        let mut state = StateVector::basis_state(2, 0).unwrap();
        for g in &gates {
            state = state.apply_gate(g).unwrap();
        }
        assert!((state.amplitudes().norm() - 1.0).abs() <= 1e-12);
    }
}
