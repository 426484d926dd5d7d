//! Standard gate matrices.
//!
//! `rotation` is the real single-qubit rotation
//! `[[cos(θ/2), −sin(θ/2)], [sin(θ/2), cos(θ/2)]]` (a Y-axis rotation with no
//! global-phase variant), and `controlled_rotation` applies it on the target
//! when the control qubit is |1⟩. In two-qubit matrices the first qubit of
//! the pair is the control and is the more significant bit of the 2-bit
//! sub-index.

use num_complex::Complex;

use crate::linalg::ComplexMatrix;

pub fn hadamard() -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real(2, 2, &[s, s, s, -s]).expect("static matrix")
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).expect("static matrix")
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::new(
        2,
        2,
        vec![
            Complex::new(0.0, 0.0),
            Complex::new(0.0, -1.0),
            Complex::new(0.0, 1.0),
            Complex::new(0.0, 0.0),
        ],
    )
    .expect("static matrix")
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).expect("static matrix")
}

pub fn cnot() -> ComplexMatrix {
    ComplexMatrix::from_real(
        4,
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            0.0, 0.0, 1.0, 0.0,
        ],
    )
    .expect("static matrix")
}

/// `R(θ)`: rotation by θ about Y, written with real entries.
pub fn rotation(theta: f64) -> ComplexMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    ComplexMatrix::from_real(2, 2, &[c, -s, s, c]).expect("static matrix")
}

/// `CR(θ)`: identity on the |0⟩ control sector, `R(θ)` on the |1⟩ sector.
pub fn controlled_rotation(theta: f64) -> ComplexMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    ComplexMatrix::from_real(
        4,
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, c, -s, //
            0.0, 0.0, s, c,
        ],
    )
    .expect("static matrix")
}

/// Pauli matrix for a noise kind index (0 = X, 1 = Y, 2 = Z).
pub(crate) fn pauli_by_index(index: usize) -> ComplexMatrix {
    match index {
        0 => pauli_x(),
        1 => pauli_y(),
        2 => pauli_z(),
        _ => unreachable!("pauli index is always drawn from 0..3"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::UNITARY_TOL;

    #[test]
    fn all_standard_gates_are_unitary() {
        for m in [hadamard(), pauli_x(), pauli_y(), pauli_z(), cnot()] {
            assert!(m.unitarity_defect() <= UNITARY_TOL);
        }
        for theta in [0.0, 0.3, 1.0, std::f64::consts::PI, 5.5] {
            assert!(rotation(theta).unitarity_defect() <= UNITARY_TOL);
            assert!(controlled_rotation(theta).unitarity_defect() <= UNITARY_TOL);
        }
    }

    #[test]
    fn rotation_at_zero_is_identity() {
        assert!(rotation(0.0).max_abs_diff(&ComplexMatrix::identity(2)) <= 1e-15);
    }
}
