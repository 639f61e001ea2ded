//! Numerical tolerances used across the crate.
//!
//! All equality assertions on synthesized objects go through these
//! constants; nothing else in the crate carries an ad-hoc epsilon.

/// Max-abs tolerance for unitary / Hermitian equality checks
/// (lowered circuits against dense targets, reducer conjugations,
/// block extraction).
pub const TOL_UNITARY: f64 = 1e-10;

/// Max-abs tolerance for exact algebraic identities (decomposition
/// sums against dense constructors, Kronecker identities).
pub const TOL_ALGEBRAIC: f64 = 1e-12;

/// Tolerance for snapping eigenvalues onto {-1, 0, 1} during spectral
/// classification. Jacobi eigenvalues at these dimensions are accurate
/// to ~1e-12, so 1e-9 separates the classes cleanly.
pub const TOL_EIGEN_SNAP: f64 = 1e-9;

/// Tolerance for walk-operator eigenphase checks, which compose an
/// eigendecomposition with an arccos relation.
pub const TOL_EIGENPHASE: f64 = 1e-8;

/// Off-diagonal Frobenius mass below which the Jacobi sweep stops.
pub const JACOBI_CONVERGENCE: f64 = 1e-12;

/// Maximum number of Jacobi sweeps before reporting non-convergence.
pub const JACOBI_MAX_SWEEPS: usize = 128;

/// A rotation angle is "trivial" (Clifford) when it is this close to a
/// multiple of pi/2; anything else counts as an arbitrary rotation.
pub const TOL_ANGLE: f64 = 1e-12;

/// Largest register lowered to a dense unitary.
pub const MAX_LOWER_QUBITS: usize = 10;
