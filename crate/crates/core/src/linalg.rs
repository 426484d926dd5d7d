//! Dense complex vectors and matrices.
//!
//! Storage is row-major `Vec<Complex64>`. Construction validates shape and
//! finiteness; every other invariant (Hermiticity, unitarity) is checked at
//! the call sites that need it. Full-matrix operations are meant for small
//! operators — the matrix exponential is capped at dimension 2^6, Kronecker
//! products at 2^12 — while anything acting on larger systems goes through
//! the targeted gate application in [`crate::statevector`].

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Complex64 = Complex<f64>;

/// Tolerance for Hermiticity checks.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Tolerance for unitarity checks (Frobenius deviation of `U†U` from `I`).
pub const UNITARY_TOL: f64 = 1e-9;
/// Largest dimension accepted by [`ComplexMatrix::expm_skew`].
pub const EXPM_DIM_CAP: usize = 1 << 6;
/// Largest result dimension accepted by [`ComplexMatrix::kron`].
pub const KRON_DIM_CAP: usize = 1 << 12;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl TryFrom<RawMatrix> for ComplexMatrix {
    type Error = Error;

    fn try_from(raw: RawMatrix) -> Result<Self> {
        if raw.re.len() != raw.im.len() {
            return Err(Error::invalid(
                "matrix literal",
                format!("re has {} entries but im has {}", raw.re.len(), raw.im.len()),
            ));
        }
        let entries = raw
            .re
            .iter()
            .zip(raw.im.iter())
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        ComplexMatrix::new(raw.rows, raw.cols, entries)
    }
}

impl From<ComplexMatrix> for RawMatrix {
    fn from(m: ComplexMatrix) -> Self {
        RawMatrix {
            rows: m.rows,
            cols: m.cols,
            re: m.entries.iter().map(|c| c.re).collect(),
            im: m.entries.iter().map(|c| c.im).collect(),
        }
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, validating shape and
    /// finiteness.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(
                "matrix shape",
                format!("{rows}x{cols} has a zero dimension"),
            ));
        }
        if entries.len() != rows * cols {
            return Err(Error::invalid(
                "matrix shape",
                format!("{rows}x{cols} needs {} entries, got {}", rows * cols, entries.len()),
            ));
        }
        if entries.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite { context: "matrix entries" });
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Convenience constructor from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            entries.iter().map(|&r| Complex64::new(r, 0.0)).collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        debug_assert!(row < self.rows && col < self.cols);
        self.entries[row * self.cols + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        assert!(row < self.rows && col < self.cols, "entry index out of range");
        self.entries[row * self.cols + col] = value;
    }

    /// Standard matrix product.
    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                context: "matmul",
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.entries[i * self.cols + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.entries[i * other.cols + j] += a * other.entries[k * other.cols + j];
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[j * self.rows + i] = self.entries[i * self.cols + j].conj();
            }
        }
        out
    }

    /// Kronecker product, `(a.rows·b.rows) x (a.cols·b.cols)`.
    pub fn kron(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let dim = rows.max(cols);
        if dim > KRON_DIM_CAP {
            return Err(Error::DimensionCap {
                context: "kron",
                requested: dim,
                cap: KRON_DIM_CAP,
            });
        }
        let mut out = ComplexMatrix::zeros(rows, cols);
        for ai in 0..self.rows {
            for aj in 0..self.cols {
                let a = self.entries[ai * self.cols + aj];
                for bi in 0..other.rows {
                    for bj in 0..other.cols {
                        out.entries[(ai * other.rows + bi) * cols + (aj * other.cols + bj)] =
                            a * other.entries[bi * other.cols + bj];
                    }
                }
            }
        }
        Ok(out)
    }

    /// `√(Σ|entries|²)`.
    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_entries("add", other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_entries("sub", other, |a, b| a - b)
    }

    pub fn scale(&self, factor: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|c| c * factor).collect(),
        }
    }

    fn zip_entries(
        &self,
        context: &'static str,
        other: &ComplexMatrix,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<ComplexMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch {
                context,
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(other.entries.iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Matrix-vector product.
    pub fn mul_vector(&self, v: &ComplexVector) -> Result<ComplexVector> {
        if self.cols != v.dim() {
            return Err(Error::ShapeMismatch {
                context: "mul_vector",
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: v.dim(),
                right_cols: 1,
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let row = &self.entries[i * self.cols..(i + 1) * self.cols];
            out[i] = row
                .iter()
                .zip(v.entries().iter())
                .map(|(&a, &b)| a * b)
                .sum();
        }
        ComplexVector::new(out)
    }

    /// Largest entry-wise absolute difference. Panics if shapes differ.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "max_abs_diff requires equal shapes"
        );
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max `|a_ij − conj(a_ji)|` over the matrix; 0 for exactly Hermitian.
    pub fn hermiticity_defect(&self) -> f64 {
        assert!(self.is_square(), "hermiticity is defined for square matrices");
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn ensure_hermitian(&self, tolerance: f64) -> Result<()> {
        if !self.is_square() {
            return Err(Error::invalid(
                "hermitian check",
                format!("matrix is {}x{}, not square", self.rows, self.cols),
            ));
        }
        let defect = self.hermiticity_defect();
        if defect > tolerance {
            return Err(Error::NotHermitian {
                max_asymmetry: defect,
                tolerance,
            });
        }
        Ok(())
    }

    /// Frobenius norm of `U†U − I`.
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let gram = self.dagger().matmul(self).expect("square product");
        gram.sub(&ComplexMatrix::identity(self.rows))
            .expect("same shape")
            .frobenius_norm()
    }

    pub fn ensure_unitary(&self, tolerance: f64) -> Result<()> {
        let defect = self.unitarity_defect();
        if defect > tolerance {
            return Err(Error::NotUnitary {
                deviation: defect,
                tolerance,
            });
        }
        Ok(())
    }

    /// `e^{−i·self·t}` for Hermitian `self`, via eigendecomposition.
    ///
    /// Requires dimension ≤ [`EXPM_DIM_CAP`] and Hermiticity within
    /// [`HERMITIAN_TOL`]; the result is unitary to within [`UNITARY_TOL`].
    pub fn expm_skew(&self, t: f64) -> Result<ComplexMatrix> {
        self.ensure_hermitian(HERMITIAN_TOL)?;
        if self.rows > EXPM_DIM_CAP {
            return Err(Error::DimensionCap {
                context: "expm_skew",
                requested: self.rows,
                cap: EXPM_DIM_CAP,
            });
        }
        if !t.is_finite() {
            return Err(Error::NonFinite { context: "expm_skew time" });
        }
        let n = self.rows;
        let h = DMatrix::from_row_slice(n, n, &self.entries);
        let eig = h.symmetric_eigen();
        // U = V · diag(e^{−iλt}) · V†
        let mut scaled = eig.eigenvectors.clone();
        for (k, lambda) in eig.eigenvalues.iter().enumerate() {
            let phase = Complex64::new(0.0, -lambda * t).exp();
            for r in 0..n {
                scaled[(r, k)] *= phase;
            }
        }
        let u = scaled * eig.eigenvectors.adjoint();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(u[(i, j)]);
            }
        }
        ComplexMatrix::new(n, n, entries)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawVector {
    re: Vec<f64>,
    im: Vec<f64>,
}

/// Dense complex vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawVector", into = "RawVector")]
pub struct ComplexVector {
    entries: Vec<Complex64>,
}

impl TryFrom<RawVector> for ComplexVector {
    type Error = Error;

    fn try_from(raw: RawVector) -> Result<Self> {
        if raw.re.len() != raw.im.len() {
            return Err(Error::invalid(
                "vector literal",
                format!("re has {} entries but im has {}", raw.re.len(), raw.im.len()),
            ));
        }
        ComplexVector::new(
            raw.re
                .iter()
                .zip(raw.im.iter())
                .map(|(&re, &im)| Complex64::new(re, im))
                .collect(),
        )
    }
}

impl From<ComplexVector> for RawVector {
    fn from(v: ComplexVector) -> Self {
        RawVector {
            re: v.entries.iter().map(|c| c.re).collect(),
            im: v.entries.iter().map(|c| c.im).collect(),
        }
    }
}

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("vector shape", "zero dimension"));
        }
        if entries.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite { context: "vector entries" });
        }
        Ok(Self { entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub(crate) fn entries_mut(&mut self) -> &mut [Complex64] {
        &mut self.entries
    }

    /// `⟨self|other⟩` with conjugation on `self`.
    pub fn inner(&self, other: &ComplexVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::ShapeMismatch {
                context: "inner",
                left_rows: self.dim(),
                left_cols: 1,
                right_rows: other.dim(),
                right_cols: 1,
            });
        }
        Ok(self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &ComplexVector) -> Result<ComplexVector> {
        let dim = self.dim() * other.dim();
        if dim > KRON_DIM_CAP {
            return Err(Error::DimensionCap {
                context: "kron",
                requested: dim,
                cap: KRON_DIM_CAP,
            });
        }
        let mut out = Vec::with_capacity(dim);
        for a in &self.entries {
            for b in &other.entries {
                out.push(a * b);
            }
        }
        ComplexVector::new(out)
    }
}
