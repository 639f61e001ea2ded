//! Builders mapping declaratively specified structured matrices onto
//! linear combinations of qubitized Hamiltonians or unitaries, plus the
//! dense reference constructors every builder is checked against.
//!
//! Index conventions (pinned by the goldens in the test suite):
//!
//! * Diagonal families index from the corner: `Toeplitz { n, m }` is
//!   the hop-distance-`m - n` adjacency of an m-node line, so `n = m-1`
//!   is tridiagonal and `n = 1` is the far corner.
//! * Anti-diagonal families index from the corner too: `Hankel { n }`
//!   holds row + col = n - 1.
//! * Anti-circulants index 0-based from the main anti-diagonal:
//!   `Anticirculant { n }` holds row + col = m - 1 - n (mod m).

mod gram;
mod hankel;
mod perm;
mod toeplitz;

pub use gram::{
    density_matrix, density_matrix_hs, density_matrix_lcu, line_column, line_column_lcu,
    outer_product, outer_product_lcu, pseudo_covariance, pseudo_covariance_lcu,
    state_prep_circuit, LineColumnKind,
};
pub use hankel::{anticirculant, anticirculant_anti_adder, hankel_antidiag, AntiCirculantVariant};
pub use perm::{
    circular_permutation, permutation_by_swaps, permutation_from_table, relabeling_circuit,
    relabeling_spec, transposition_circuit, PermutationSpec,
};
pub use toeplitz::{
    circulant, circulant_adder_applies, circulant_adder_lcu, fusc, toeplitz_diag, CirculantVariant,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::Circuit;
use crate::densemath::{ComplexMatrix, StateVector};
use crate::opalg::{Factor, LcTerm, LinearCombination};
use crate::synth::LcuCombination;

#[derive(Debug, Error)]
pub enum StructuredError {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("permutation table is not a bijection")]
    NotBijective,
    #[error("permutation is not a single cycle over all nodes")]
    NotSingleCycle,
    #[error(transparent)]
    Synth(#[from] crate::synth::SynthError),
    #[error(transparent)]
    Dense(#[from] crate::densemath::DenseError),
    #[error(transparent)]
    Opalg(#[from] crate::opalg::OpalgError),
}

pub type Result<T> = std::result::Result<T, StructuredError>;

fn to_complex(pair: (f64, f64)) -> Complex64 {
    Complex64::new(pair.0, pair.1)
}

fn default_weight() -> (f64, f64) {
    (1.0, 0.0)
}

fn to_state(amplitudes: &[(f64, f64)]) -> StateVector {
    StateVector::from_amplitudes(amplitudes.iter().map(|&p| to_complex(p)).collect())
}

/// Declarative description of a structured matrix, JSON-serializable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StructuredSpec {
    Toeplitz {
        m: u64,
        n: u64,
        #[serde(default = "default_weight")]
        weight: (f64, f64),
    },
    Circulant {
        m: u64,
        n: u64,
        #[serde(default = "default_weight")]
        weight: (f64, f64),
        #[serde(default = "CirculantVariant::default_variant")]
        variant: CirculantVariant,
    },
    Hankel {
        m: u64,
        n: u64,
        #[serde(default = "default_weight")]
        weight: (f64, f64),
    },
    Anticirculant {
        m: u64,
        n: u64,
        #[serde(default = "default_weight")]
        weight: (f64, f64),
        #[serde(default = "AntiCirculantVariant::default_variant")]
        variant: AntiCirculantVariant,
    },
    CornerEmbed {
        /// Full register size 2^S.
        s: u64,
        inner: Box<StructuredSpec>,
    },
    CircularPermutation {
        m: u64,
        n: u64,
        /// The rotation: a single m-cycle as a lookup table.
        table: Vec<usize>,
        #[serde(default = "default_weight")]
        weight: (f64, f64),
    },
    PermutationTable {
        m: u64,
        table: Vec<usize>,
    },
    DensityMatrix {
        amplitudes: Vec<(f64, f64)>,
    },
    OuterProduct {
        phi: Vec<(f64, f64)>,
        psi: Vec<(f64, f64)>,
    },
    LineColumn {
        psi: Vec<(f64, f64)>,
        j: usize,
        which: LineColumnKind,
    },
    Grid {
        dims: Vec<u64>,
        cyclic: Vec<bool>,
        #[serde(default)]
        weights: Option<Vec<(f64, f64)>>,
    },
}

impl CirculantVariant {
    fn default_variant() -> Self {
        CirculantVariant::Recursive
    }
}

impl AntiCirculantVariant {
    fn default_variant() -> Self {
        AntiCirculantVariant::Sum
    }
}

impl StructuredSpec {
    /// Number of system qubits of the materialized matrix.
    pub fn system_qubits(&self) -> usize {
        let dim = self.dimension();
        dim.max(2).trailing_zeros() as usize
    }

    /// Dimension of the materialized matrix.
    pub fn dimension(&self) -> usize {
        match self {
            StructuredSpec::Toeplitz { m, .. }
            | StructuredSpec::Circulant { m, .. }
            | StructuredSpec::Hankel { m, .. }
            | StructuredSpec::Anticirculant { m, .. }
            | StructuredSpec::CircularPermutation { m, .. }
            | StructuredSpec::PermutationTable { m, .. } => *m as usize,
            StructuredSpec::CornerEmbed { s, .. } => *s as usize,
            StructuredSpec::DensityMatrix { amplitudes } => amplitudes.len(),
            StructuredSpec::OuterProduct { psi, .. } => psi.len(),
            StructuredSpec::LineColumn { psi, .. } => psi.len(),
            StructuredSpec::Grid { dims, .. } => dims.iter().product::<u64>() as usize,
        }
    }
}

/// What a builder produced: a Hermitian combination (with exact
/// per-term simulations), a combination of unitaries (block-encoding
/// material), or a bare permutation circuit over an ancilla register.
#[derive(Debug, Clone)]
pub enum Decomposition {
    Hermitian(LinearCombination),
    Unitaries(LcuCombination),
    PermutationCircuit {
        circuit: Circuit,
        system_qubits: usize,
    },
}

impl Decomposition {
    pub fn term_count(&self) -> usize {
        match self {
            Decomposition::Hermitian(lc) => lc.len(),
            Decomposition::Unitaries(lcu) => lcu.terms.len(),
            Decomposition::PermutationCircuit { .. } => 1,
        }
    }
}

/// Runs the builder for a spec.
pub fn build(spec: &StructuredSpec) -> Result<Decomposition> {
    match spec {
        StructuredSpec::Toeplitz { m, n, weight } => Ok(Decomposition::Hermitian(toeplitz_diag(
            *n,
            *m,
            to_complex(*weight),
        )?)),
        StructuredSpec::Circulant {
            m,
            n,
            weight,
            variant,
        } => match variant {
            CirculantVariant::AdderLcu => Ok(Decomposition::Unitaries(circulant_adder_lcu(
                *n,
                *m,
                to_complex(*weight),
            )?)),
            other => Ok(Decomposition::Hermitian(circulant(
                *n,
                *m,
                to_complex(*weight),
                *other,
            )?)),
        },
        StructuredSpec::Hankel { m, n, weight } => Ok(Decomposition::Hermitian(hankel_antidiag(
            *n,
            *m,
            to_complex(*weight),
        )?)),
        StructuredSpec::Anticirculant {
            m,
            n,
            weight,
            variant,
        } => match variant {
            AntiCirculantVariant::AntiAdder => Ok(Decomposition::Unitaries(
                anticirculant_anti_adder(*n, *m, to_complex(*weight))?,
            )),
            other => Ok(Decomposition::Hermitian(anticirculant(
                *n,
                *m,
                to_complex(*weight),
                *other,
            )?)),
        },
        StructuredSpec::CornerEmbed { s, inner } => {
            let inner_built = build(inner)?;
            let Decomposition::Hermitian(lc) = inner_built else {
                return Err(StructuredError::InvalidSpec(
                    "corner embedding needs a Hermitian inner decomposition".into(),
                ));
            };
            Ok(Decomposition::Hermitian(corner_embed(&lc, *s)?))
        }
        StructuredSpec::CircularPermutation {
            m,
            n,
            table,
            weight,
        } => {
            let p = PermutationSpec::new(table.clone())?;
            let (_, hermitian) = circular_permutation(&p, *n, *m, to_complex(*weight))?;
            Ok(Decomposition::Hermitian(hermitian))
        }
        StructuredSpec::PermutationTable { m, table } => {
            if table.len() as u64 != *m {
                return Err(StructuredError::InvalidSpec(format!(
                    "table length {} does not match m = {m}",
                    table.len()
                )));
            }
            let p = PermutationSpec::new(table.clone())?;
            let circuit = permutation_from_table(&p)?;
            Ok(Decomposition::PermutationCircuit {
                circuit,
                system_qubits: (*m).trailing_zeros() as usize,
            })
        }
        StructuredSpec::DensityMatrix { amplitudes } => Ok(Decomposition::Unitaries(
            density_matrix_lcu(&to_state(amplitudes))?,
        )),
        StructuredSpec::OuterProduct { phi, psi } => Ok(Decomposition::Unitaries(
            outer_product_lcu(&to_state(phi), &to_state(psi))?,
        )),
        StructuredSpec::LineColumn { psi, j, which } => Ok(Decomposition::Unitaries(
            line_column_lcu(&to_state(psi), *j, *which)?,
        )),
        StructuredSpec::Grid {
            dims,
            cyclic,
            weights,
        } => Ok(Decomposition::Hermitian(grid(
            dims,
            cyclic,
            weights.as_deref(),
        )?)),
    }
}

/// Prefixes every term with hole projectors, embedding the combination
/// as the top-left block of a 2^S-dimensional register.
pub fn corner_embed(inner: &LinearCombination, s: u64) -> Result<LinearCombination> {
    if !s.is_power_of_two() || s < 2 {
        return Err(StructuredError::InvalidSpec(format!(
            "embedding size {s} must be a power of two >= 2"
        )));
    }
    let target_qubits = s.trailing_zeros() as usize;
    let inner_qubits = inner.num_qubits();
    if target_qubits < inner_qubits {
        return Err(StructuredError::InvalidSpec(format!(
            "embedding size 2^{target_qubits} smaller than the inner matrix (2^{inner_qubits})"
        )));
    }
    let pad = target_qubits - inner_qubits;
    let terms = inner
        .terms
        .iter()
        .map(|term| {
            let mut factors = vec![Factor::M; pad];
            factors.extend(term.string.factors.iter().copied());
            let string = crate::opalg::OperatorString::new(
                factors,
                term.string.coefficient,
                term.string.plus_hc,
            );
            match &term.conjugation {
                None => LcTerm::plain(string),
                Some(c) => LcTerm::conjugated(string, c.embedded(target_qubits, pad)),
            }
        })
        .collect();
    Ok(LinearCombination::new(terms))
}

/// Grid adjacency: the sum over axes of identity factors around a
/// single-axis nearest-neighbor line (or ring, when cyclic).
pub fn grid(
    dims: &[u64],
    cyclic: &[bool],
    weights: Option<&[(f64, f64)]>,
) -> Result<LinearCombination> {
    if dims.is_empty() || dims.len() != cyclic.len() {
        return Err(StructuredError::InvalidSpec(
            "grid needs matching nonempty dims and cyclic lists".into(),
        ));
    }
    if let Some(w) = weights {
        if w.len() != dims.len() {
            return Err(StructuredError::InvalidSpec(
                "grid weights must match the axis count".into(),
            ));
        }
    }
    let axis_qubits: Vec<usize> = dims
        .iter()
        .map(|&d| {
            if !d.is_power_of_two() || d < 2 {
                return Err(StructuredError::InvalidSpec(format!(
                    "axis size {d} must be a power of two >= 2"
                )));
            }
            Ok(d.trailing_zeros() as usize)
        })
        .collect::<Result<_>>()?;
    let total_qubits: usize = axis_qubits.iter().sum();

    let mut terms = Vec::new();
    let mut offset = 0usize;
    for (axis, (&m, &wrap)) in dims.iter().zip(cyclic).enumerate() {
        let w = weights.map_or(Complex64::new(1.0, 0.0), |ws| to_complex(ws[axis]));
        let axis_lc = if wrap {
            circulant(m - 1, m, w, CirculantVariant::Recursive)?
        } else {
            toeplitz_diag(m - 1, m, w)?
        };
        let after = total_qubits - offset - axis_qubits[axis];
        for term in axis_lc.terms {
            let mut factors = vec![Factor::I; offset];
            factors.extend(term.string.factors.iter().copied());
            factors.extend(std::iter::repeat(Factor::I).take(after));
            terms.push(LcTerm::plain(crate::opalg::OperatorString::new(
                factors,
                term.string.coefficient,
                term.string.plus_hc,
            )));
        }
        offset += axis_qubits[axis];
    }
    Ok(LinearCombination::new(terms))
}

/// Which decomposition a summand count refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    Lch,
    Lcu,
}

/// Term count produced by actually running the builder.
pub fn summand_count(spec: &StructuredSpec, representation: Representation) -> Result<usize> {
    match (build(spec)?, representation) {
        (Decomposition::Hermitian(lc), Representation::Lch) => Ok(lc.len()),
        (Decomposition::Hermitian(lc), Representation::Lcu) => {
            Ok(crate::synth::lch_to_lcu_all(&lc)
                .map_err(StructuredError::Synth)?
                .terms
                .len())
        }
        (Decomposition::Unitaries(lcu), Representation::Lcu) => Ok(lcu.terms.len()),
        (Decomposition::PermutationCircuit { .. }, Representation::Lcu) => Ok(1),
        (_, Representation::Lch) => Err(StructuredError::InvalidSpec(
            "this decomposition has no Hermitian form".into(),
        )),
    }
}

/// Dense reference constructors built by direct index arithmetic,
/// independent of the string recursions they verify.
pub mod dense {
    use super::*;

    /// Hop-distance m-n adjacency of a line: `w` downward, conj(w) up.
    pub fn toeplitz(n: u64, m: u64, w: Complex64) -> ComplexMatrix {
        let dim = m as usize;
        let hop = (m - n) as usize;
        let mut out = ComplexMatrix::zeros(dim, dim);
        for i in 0..dim.saturating_sub(hop) {
            out[(i + hop, i)] = w;
            out[(i, i + hop)] = w.conj();
        }
        out
    }

    /// Circulant: the same hops wrapping around.
    pub fn circulant(n: u64, m: u64, w: Complex64) -> ComplexMatrix {
        let dim = m as usize;
        let hop = (m - n) as usize;
        let mut out = ComplexMatrix::zeros(dim, dim);
        for i in 0..dim {
            let r = (i + hop) % dim;
            out[(r, i)] += w;
            out[(i, r)] += w.conj();
        }
        out
    }

    /// Anti-diagonal row + col = n - 1.
    pub fn hankel(n: u64, m: u64, w: Complex64) -> ComplexMatrix {
        let dim = m as usize;
        let mut out = ComplexMatrix::zeros(dim, dim);
        let target = n as usize - 1;
        for i in 0..dim {
            if target >= i && target - i < dim {
                out[(i, target - i)] = w;
            }
        }
        out
    }

    /// Anti-circulant indexed from the main anti-diagonal:
    /// row + col = m - 1 - n (mod m).
    pub fn anticirculant(n: u64, m: u64, w: Complex64) -> ComplexMatrix {
        let dim = m as usize;
        let target = (dim + dim - 1 - n as usize) % dim;
        let mut out = ComplexMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                if (i + j) % dim == target {
                    out[(i, j)] = w;
                }
            }
        }
        out
    }

    /// Top-left embedding into a size-s register.
    pub fn corner(inner: &ComplexMatrix, s: u64) -> ComplexMatrix {
        let dim = s as usize;
        let mut out = ComplexMatrix::zeros(dim, dim);
        for i in 0..inner.rows() {
            for j in 0..inner.cols() {
                out[(i, j)] = inner[(i, j)];
            }
        }
        out
    }

    /// Reordered circulant: conj(w) times the n-th power of the input
    /// rotation plus the Hermitian conjugate.
    pub fn circular_permutation(table: &[usize], n: u64, w: Complex64) -> ComplexMatrix {
        let dim = table.len();
        let mut power: Vec<usize> = (0..dim).collect();
        for _ in 0..n {
            power = power.iter().map(|&i| table[i]).collect();
        }
        let mut out = ComplexMatrix::zeros(dim, dim);
        for (i, &v) in power.iter().enumerate() {
            out[(v, i)] += w.conj();
            out[(i, v)] += w;
        }
        out
    }

    /// Permutation matrix |bin pi(i)><bin i|.
    pub fn permutation(table: &[usize]) -> ComplexMatrix {
        let dim = table.len();
        let mut out = ComplexMatrix::zeros(dim, dim);
        for (i, &v) in table.iter().enumerate() {
            out[(v, i)] = Complex64::new(1.0, 0.0);
        }
        out
    }

    /// Grid adjacency as a sum of Kronecker factors.
    pub fn grid(dims: &[u64], cyclic: &[bool], weights: Option<&[(f64, f64)]>) -> ComplexMatrix {
        let total: usize = dims.iter().map(|&d| d as usize).product();
        let mut out = ComplexMatrix::zeros(total, total);
        for axis in 0..dims.len() {
            let w = weights.map_or(Complex64::new(1.0, 0.0), |ws| to_complex(ws[axis]));
            let m = dims[axis] as usize;
            let mut hop = ComplexMatrix::zeros(m, m);
            for i in 0..m {
                if i + 1 < m {
                    hop[(i + 1, i)] += w;
                    hop[(i, i + 1)] += w.conj();
                } else if cyclic[axis] {
                    hop[(0, i)] += w;
                    hop[(i, 0)] += w.conj();
                }
            }
            let before: usize = dims[..axis].iter().map(|&d| d as usize).product();
            let after: usize = dims[axis + 1..].iter().map(|&d| d as usize).product();
            let embedded = crate::densemath::kron(
                &crate::densemath::kron(&ComplexMatrix::identity(before), &hop),
                &ComplexMatrix::identity(after),
            );
            out = out.add(&embedded).expect("uniform dims");
        }
        out
    }

    /// Dense target of any spec.
    pub fn oracle(spec: &StructuredSpec) -> Result<ComplexMatrix> {
        Ok(match spec {
            StructuredSpec::Toeplitz { m, n, weight } => {
                check_index(*n, 1, *m)?;
                toeplitz(*n, *m, to_complex(*weight))
            }
            StructuredSpec::Circulant { m, n, weight, .. } => {
                check_index(*n, 1, *m)?;
                circulant(*n, *m, to_complex(*weight))
            }
            StructuredSpec::Hankel { m, n, weight } => {
                check_index(*n, 1, 2 * *m)?;
                hankel(*n, *m, to_complex(*weight))
            }
            StructuredSpec::Anticirculant { m, n, weight, .. } => {
                check_index(*n + 1, 1, *m + 1)?;
                anticirculant(*n, *m, to_complex(*weight))
            }
            StructuredSpec::CornerEmbed { s, inner } => corner(&oracle(inner)?, *s),
            StructuredSpec::CircularPermutation {
                m: _m,
                n,
                table,
                weight,
            } => circular_permutation(table, *n, to_complex(*weight)),
            StructuredSpec::PermutationTable { table, .. } => permutation(table),
            StructuredSpec::DensityMatrix { amplitudes } => {
                let psi = to_state(amplitudes);
                psi.outer(&psi)
            }
            StructuredSpec::OuterProduct { phi, psi } => to_state(phi).outer(&to_state(psi)),
            StructuredSpec::LineColumn { psi, j, which } => {
                let psi = to_state(psi);
                let ej = StateVector::basis_state(psi.dim(), *j);
                match which {
                    LineColumnKind::Column => psi.outer(&ej),
                    LineColumnKind::Line => ej.outer(&psi),
                }
            }
            StructuredSpec::Grid {
                dims,
                cyclic,
                weights,
            } => grid(dims, cyclic, weights.as_deref()),
        })
    }

    fn check_index(n: u64, lo: u64, hi_exclusive: u64) -> Result<()> {
        if n < lo || n >= hi_exclusive {
            return Err(StructuredError::InvalidSpec(format!(
                "index {n} out of range [{lo}, {hi_exclusive})"
            )));
        }
        Ok(())
    }
}

/// Dense target of a spec (re-export of [`dense::oracle`]).
pub fn dense_oracle(spec: &StructuredSpec) -> Result<ComplexMatrix> {
    dense::oracle(spec)
}

#[cfg(test)]
pub(crate) mod test_specs {
    use super::*;

    /// A broad sample of valid specs with dimension at most `max_m`.
    pub fn all_small_specs(max_m: u64) -> Vec<StructuredSpec> {
        let mut specs = Vec::new();
        let mut m = 2u64;
        while m <= max_m {
            for n in 1..m {
                specs.push(StructuredSpec::Toeplitz {
                    m,
                    n,
                    weight: (1.0, 0.0),
                });
                for variant in [
                    CirculantVariant::Recursive,
                    CirculantVariant::Adder,
                    CirculantVariant::AdderLcu,
                ] {
                    specs.push(StructuredSpec::Circulant {
                        m,
                        n,
                        weight: (1.0, 0.0),
                        variant,
                    });
                }
            }
            for n in 1..=(2 * m - 1) {
                specs.push(StructuredSpec::Hankel {
                    m,
                    n,
                    weight: (1.0, 0.0),
                });
            }
            for n in 0..m {
                for variant in [
                    AntiCirculantVariant::Sum,
                    AntiCirculantVariant::AdderConjugation,
                    AntiCirculantVariant::AntiAdder,
                ] {
                    specs.push(StructuredSpec::Anticirculant {
                        m,
                        n,
                        weight: (1.0, 0.0),
                        variant,
                    });
                }
            }
            m *= 2;
        }
        // corner embeddings
        specs.push(StructuredSpec::CornerEmbed {
            s: 8,
            inner: Box::new(StructuredSpec::Circulant {
                m: 4,
                n: 3,
                weight: (1.0, 0.0),
                variant: CirculantVariant::Recursive,
            }),
        });
        specs.push(StructuredSpec::CornerEmbed {
            s: 16,
            inner: Box::new(StructuredSpec::Toeplitz {
                m: 4,
                n: 1,
                weight: (0.5, 0.5),
            }),
        });
        // permutations
        specs.push(StructuredSpec::CircularPermutation {
            m: 4,
            n: 1,
            table: vec![2, 3, 1, 0],
            weight: (1.0, 0.0),
        });
        specs.push(StructuredSpec::PermutationTable {
            m: 8,
            table: vec![4, 0, 6, 2, 1, 7, 3, 5],
        });
        // gram family
        let s = std::f64::consts::FRAC_1_SQRT_2;
        specs.push(StructuredSpec::DensityMatrix {
            amplitudes: vec![(s, 0.0), (0.0, s)],
        });
        specs.push(StructuredSpec::OuterProduct {
            phi: vec![(s, 0.0), (-s, 0.0)],
            psi: vec![(0.0, s), (s, 0.0)],
        });
        specs.push(StructuredSpec::LineColumn {
            psi: vec![(0.5, 0.0), (0.5, 0.0), (0.5, 0.0), (0.5, 0.0)],
            j: 1,
            which: LineColumnKind::Column,
        });
        specs.push(StructuredSpec::LineColumn {
            psi: vec![(0.5, 0.0), (-0.5, 0.0), (0.5, 0.0), (-0.5, 0.0)],
            j: 2,
            which: LineColumnKind::Line,
        });
        // grids
        specs.push(StructuredSpec::Grid {
            dims: vec![4, 4],
            cyclic: vec![false, false],
            weights: None,
        });
        specs.push(StructuredSpec::Grid {
            dims: vec![2, 2],
            cyclic: vec![true, true],
            weights: Some(vec![(1.0, 0.0), (0.5, 0.0)]),
        });
        specs
    }
}
