//! Dense complex linear algebra used to verify every synthesized object.
//!
//! This module is the numerical oracle: it never appears on a synthesis
//! path, only on verification paths. Everything is dense and double
//! precision; the dimensions in play (at most 2^10) make that the
//! simplest fully auditable choice.

mod eig;

pub use eig::hermitian_eig;

use num_complex::Complex64;
use thiserror::Error;

use crate::tolerances::TOL_UNITARY;

#[derive(Debug, Error, PartialEq)]
pub enum DenseError {
    #[error("matrix is not Hermitian (max |a - a^dagger| = {0:.3e})")]
    NotHermitian(f64),
    #[error("Jacobi eigensolver did not converge within the sweep budget")]
    NoConvergence,
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimMismatch(usize, usize, usize, usize),
    #[error("state vector is not normalized (norm = {0})")]
    NotNormalized(f64),
}

pub type Result<T> = std::result::Result<T, DenseError>;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
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
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Build from a row-major list of entries.
    pub fn from_rows(rows: usize, cols: usize, entries: Vec<Complex64>) -> Self {
        assert_eq!(rows * cols, entries.len(), "entry count must be rows*cols");
        Self { rows, cols, entries }
    }

    /// Build from a row-major list of real entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Self {
        Self::from_rows(
            rows,
            cols,
            entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
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

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conjugate(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.conj()).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &StateVector) -> StateVector {
        assert_eq!(self.cols, v.dim(), "dimension mismatch");
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self[(i, j)] * v.amplitudes()[j];
            }
            out[i] = acc;
        }
        StateVector::from_amplitudes(out)
    }

    /// Largest entrywise deviation from the identity of a^dagger a.
    pub fn unitarity_defect(&self) -> f64 {
        let prod = self.dagger().matmul(self);
        max_abs_diff(&prod, &Self::identity(self.cols)).unwrap_or(f64::INFINITY)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square() && self.unitarity_defect() <= tol
    }

    /// Largest entrywise deviation from the conjugate transpose.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        max_abs_diff(self, &self.dagger()).unwrap_or(f64::INFINITY)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> Complex64 {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| {
                    a[(i, col)]
                        .norm()
                        .partial_cmp(&a[(j, col)].norm())
                        .unwrap()
                })
                .unwrap();
            if a[(pivot, col)].norm() == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            if pivot != col {
                for j in 0..n {
                    let tmp = a[(pivot, j)];
                    a[(pivot, j)] = a[(col, j)];
                    a[(col, j)] = tmp;
                }
                det = -det;
            }
            det *= a[(col, col)];
            for i in col + 1..n {
                let factor = a[(i, col)] / a[(col, col)];
                for j in col..n {
                    let sub = factor * a[(col, j)];
                    a[(i, j)] -= sub;
                }
            }
        }
        det
    }

    /// Max |a_ij| over all entries.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    fn check_dims(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(DenseError::DimMismatch(
                self.rows, self.cols, other.rows, other.cols,
            ));
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.cols + j]
    }
}

/// Kronecker product. The left factor owns the most significant index
/// bits, matching left-to-right tensor notation.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for ia in 0..a.rows() {
        for ja in 0..a.cols() {
            let f = a[(ia, ja)];
            if f.norm_sqr() == 0.0 {
                continue;
            }
            for ib in 0..b.rows() {
                for jb in 0..b.cols() {
                    out[(ia * b.rows() + ib, ja * b.cols() + jb)] = f * b[(ib, jb)];
                }
            }
        }
    }
    out
}

/// Max over entries of |a_ij - b_ij|.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(DenseError::DimMismatch(a.rows(), a.cols(), b.rows(), b.cols()));
    }
    Ok(a.entries
        .iter()
        .zip(&b.entries)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max))
}

/// e^{i t h} for Hermitian h, via eigendecomposition.
pub fn expm_hermitian(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let (values, vectors) = hermitian_eig(h)?;
    let n = h.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let phase = Complex64::from_polar(1.0, t * values[k]);
        for i in 0..n {
            let vik = vectors[(i, k)];
            if vik.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..n {
                out[(i, j)] += phase * vik * vectors[(j, k)].conj();
            }
        }
    }
    Ok(out)
}

/// Largest singular value, as sqrt of the top eigenvalue of a^dagger a.
pub fn spectral_norm(a: &ComplexMatrix) -> Result<f64> {
    let gram = a.dagger().matmul(a);
    let (values, _) = hermitian_eig(&gram)?;
    Ok(values.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}

/// Dense complex state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self {
            amplitudes: values.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    /// Computational basis state |index> of the given dimension.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(DenseError::NotNormalized(0.0));
        }
        Ok(Self {
            amplitudes: self.amplitudes.iter().map(|a| a / n).collect(),
        })
    }

    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        let n = self.norm();
        if (n - 1.0).abs() > tol {
            return Err(DenseError::NotNormalized(n));
        }
        Ok(())
    }

    /// <self|other>.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// |self><other|.
    pub fn outer(&self, other: &Self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim(), other.dim());
        for i in 0..self.dim() {
            for j in 0..other.dim() {
                out[(i, j)] = self.amplitudes[i] * other.amplitudes[j].conj();
            }
        }
        out
    }

    pub fn conjugate(&self) -> Self {
        Self {
            amplitudes: self.amplitudes.iter().map(|a| a.conj()).collect(),
        }
    }

    /// <self| h |self>.
    pub fn expectation(&self, h: &ComplexMatrix) -> Complex64 {
        self.inner(&h.apply(self))
    }
}

/// Random normalized state with complex-normal amplitudes.
pub fn random_state<R: rand::Rng>(rng: &mut R, dim: usize) -> StateVector {
    use rand::distributions::Distribution;
    let normal = rand_distr_standard_normal();
    let amplitudes: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(normal.sample(rng), normal.sample(rng)))
        .collect();
    StateVector::from_amplitudes(amplitudes)
        .normalized()
        .expect("nonzero with probability one")
}

// Box-Muller standard normal; avoids pulling in rand_distr for one use.
fn rand_distr_standard_normal() -> impl rand::distributions::Distribution<f64> {
    struct StdNormal;
    impl rand::distributions::Distribution<f64> for StdNormal {
        fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> f64 {
            let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        }
    }
    StdNormal
}

/// Checks that `h` is Hermitian within `tol`, returning the defect on failure.
pub fn require_hermitian(h: &ComplexMatrix, tol: f64) -> Result<()> {
    let defect = h.hermiticity_defect();
    if defect > tol {
        return Err(DenseError::NotHermitian(defect));
    }
    Ok(())
}

/// Checks that `u` is unitary within `TOL_UNITARY`.
pub fn require_unitary(u: &ComplexMatrix) -> bool {
    u.is_unitary(TOL_UNITARY)
}
