//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each (p, q) pivot is annihilated by a complex Givens rotation: the
//! pivot's phase is absorbed into a diagonal phase so the 2x2 block
//! becomes real symmetric, then the classic Jacobi angle is applied.
//! Quadratic convergence makes a cyclic sweep plenty at 64x64.

use num_complex::Complex64;

use super::{max_abs_diff, ComplexMatrix, DenseError, Result};
use crate::tolerances::{JACOBI_CONVERGENCE, JACOBI_MAX_SWEEPS, TOL_UNITARY};

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns eigenvalues in ascending order and the matching eigenvectors
/// as orthonormal columns.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !h.is_square() {
        return Err(DenseError::DimMismatch(h.rows(), h.cols(), h.cols(), h.rows()));
    }
    let defect = max_abs_diff(h, &h.dagger())?;
    if defect > TOL_UNITARY {
        return Err(DenseError::NotHermitian(defect));
    }

    let n = h.rows();
    let mut a = h.clone();
    let mut v = ComplexMatrix::identity(n);
    // Scale-aware threshold so large-entry inputs still converge.
    let scale = a.max_abs().max(1.0);
    let threshold = JACOBI_CONVERGENCE * scale;

    let mut converged = n < 2;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_mass(&a) < threshold {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_mass(&a) >= threshold {
        return Err(DenseError::NoConvergence);
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());

    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = v[(row, src)];
        }
    }
    Ok((values, vectors))
}

fn off_diagonal_mass(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Annihilates a[(p, q)] with the unitary J = D(phi) R(theta) acting on
/// the (p, q) plane, updating a <- J^dagger a J and v <- v J.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag; // e^{i phi}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;

    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let cos = 1.0 / (1.0 + t * t).sqrt();
    let sin = t * cos;

    // Column entries of J restricted to the (p, q) plane.
    let jpp = Complex64::new(cos, 0.0);
    let jpq = Complex64::new(sin, 0.0);
    let jqp = -sin * phase.conj();
    let jqq = cos * phase.conj();

    let n = a.rows();
    // a <- a J (columns p, q)
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * jpp + aiq * jqp;
        a[(i, q)] = aip * jpq + aiq * jqq;
    }
    // a <- J^dagger a (rows p, q)
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = jpp.conj() * apj + jqp.conj() * aqj;
        a[(q, j)] = jpq.conj() * apj + jqq.conj() * aqj;
    }
    // Clean up the annihilated pair and enforce real diagonal.
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    // v <- v J
    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * jpp + viq * jqp;
        v[(i, q)] = vip * jpq + viq * jqq;
    }
}
