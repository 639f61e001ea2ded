//! Lowering of structured matrices to qubitized-Hamiltonian circuits.
//!
//! The crate takes a declarative description of a structured matrix
//! (Toeplitz diagonal, circulant, Hankel, anti-circulant, permutation,
//! Gram-type, grid), decomposes it into a linear combination of
//! qubitized Hamiltonians or unitaries, synthesizes the three standard
//! queries (Hamiltonian simulation, block-encoding, measurement
//! circuits) as a gate-level IR, and verifies every construction
//! against a dense linear-algebra oracle.
//!
//! # Conventions
//!
//! * Qubit 0 is the most significant bit of a computational basis
//!   index; tensor factors read left to right.
//! * In a [`circuit::Circuit`] the first listed operation acts first,
//!   i.e. it is the rightmost factor in the lowered operator product.
//! * Rotations: `RY(theta) = exp(-i theta Y / 2)` and
//!   `RZ(theta) = diag(e^{i theta/2}, e^{-i theta/2})`, so `RZ(2t)`
//!   equals `exp(i t Z)` and the Hadamard is `RY(pi/4) Z RY(pi/4)^dag`.
//! * `P(theta) = diag(1, e^{i theta})`; `S = P(pi/2)`.
//!
//! # Modules
//!
//! * [`densemath`] — dense complex linear algebra, the verification oracle.
//! * [`opalg`] — operator strings over `{I, X, Y, Z, n, m, sigma, sigma^dag}`
//!   and spectral classification.
//! * [`circuit`] — gate IR, macro expansion, dense lowering, text format.
//! * [`synth`] — reducers, Hamiltonian simulation, LCU splits, Prep-Sel-Prep
//!   block-encoding, qubitization, measurement programs, adders.
//! * [`structured`] — builders from declarative specs to linear combinations.
//! * [`bounds`] — sampling-variance and Trotter commutator bounds.
//! * [`cli`] — the batch command-line front end.

pub mod bounds;
pub mod circuit;
pub mod cli;
pub mod densemath;
pub mod opalg;
pub mod structured;
pub mod synth;
pub mod tolerances;
