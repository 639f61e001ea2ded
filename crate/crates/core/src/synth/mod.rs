//! Query synthesis: degenerated-states reducers, exact Hamiltonian
//! simulation, Trotterization, Hermitian-to-unitary splits, Prep-Sel-Prep
//! block-encoding, qubitization walks, measurement programs, and the
//! modular adder family.

mod adders;
mod encode;
mod measure;
mod reducer;

pub use adders::{adder_ladder, adder_permutation, adder_qft, zadd, zadd_permutation};
pub use encode::{
    block_encode, lch_to_lcu, lch_to_lcu_all, nonhermitian_split, nonhermitian_split_literal,
    pattern_phase, pattern_reflection, prep, qubitize, select, walk_eigenphase_cosines,
    BlockEncoding, LcuCombination, LcuTerm, SplitSide,
};
pub use measure::{measurement_program, MeasureMode, MeasurementProgram};
pub use reducer::{combine_reducers, reducer_from_string, term_reducer, Reducer};

use thiserror::Error;

use crate::circuit::Circuit;
use crate::opalg::{LcTerm, LinearCombination};

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("operator is not a qubitized Hamiltonian or projector ({0})")]
    NotQubitized(String),
    #[error("string is not reducible by a single rotation: {0}")]
    UnsupportedString(String),
    #[error("reducers act on overlapping qubit supports")]
    OverlappingSupports,
    #[error("register sizes do not match: {0} vs {1}")]
    RegisterMismatch(usize, usize),
    #[error("all weights are zero")]
    AllZeroWeights,
    #[error("term {0} is not unitary (defect {1:.3e})")]
    NonUnitaryTerm(usize, f64),
    #[error("block-encoding is not a reflection (defect {0:.3e})")]
    NotReflection(f64),
    #[error("value {0} out of range for modulus {1}")]
    OutOfRange(u64, u64),
    #[error(transparent)]
    Circuit(#[from] crate::circuit::CircuitError),
    #[error(transparent)]
    Opalg(#[from] crate::opalg::OpalgError),
    #[error(transparent)]
    Dense(#[from] crate::densemath::DenseError),
}

pub type Result<T> = std::result::Result<T, SynthError>;

/// Product-formula plan for a linear combination of Hermitians.
#[derive(Debug, Clone, PartialEq)]
pub struct TrotterPlan {
    /// Total evolution time.
    pub t: f64,
    /// Trotter number (repetitions); at least 1.
    pub steps: usize,
    /// 1 for Lie-Trotter, 2 for the symmetric splitting.
    pub order: u8,
    /// Optional permutation of term indices.
    pub term_order: Option<Vec<usize>>,
}

impl TrotterPlan {
    pub fn first_order(t: f64, steps: usize) -> Self {
        Self {
            t,
            steps,
            order: 1,
            term_order: None,
        }
    }

    pub fn second_order(t: f64, steps: usize) -> Self {
        Self {
            t,
            steps,
            order: 2,
            term_order: None,
        }
    }
}

/// Product-formula circuit for `exp(i t sum_j w_j H_j)` built from the
/// exact per-term simulations.
pub fn trotter(lch: &LinearCombination, plan: &TrotterPlan) -> Result<Circuit> {
    assert!(plan.steps >= 1, "trotter number must be at least 1");
    assert!(matches!(plan.order, 1 | 2), "only orders 1 and 2 exist");

    let order: Vec<usize> = match &plan.term_order {
        Some(perm) => {
            assert_eq!(perm.len(), lch.terms.len(), "permutation length mismatch");
            perm.clone()
        }
        None => (0..lch.terms.len()).collect(),
    };

    struct Prepared {
        reducer: Reducer,
        weight: f64,
    }
    let prepared: Vec<Prepared> = order
        .iter()
        .map(|&idx| {
            let term: &LcTerm = &lch.terms[idx];
            Ok(Prepared {
                reducer: term_reducer(term)?,
                weight: term.weight(),
            })
        })
        .collect::<Result<_>>()?;

    let num_qubits = lch.num_qubits();
    let mut circuit = Circuit::new(num_qubits);
    let dt = plan.t / plan.steps as f64;
    for _ in 0..plan.steps {
        match plan.order {
            1 => {
                for p in &prepared {
                    circuit.extend(&p.reducer.hs_circuit(p.weight * dt)?);
                }
            }
            _ => {
                for p in &prepared {
                    circuit.extend(&p.reducer.hs_circuit(p.weight * dt / 2.0)?);
                }
                for p in prepared.iter().rev() {
                    circuit.extend(&p.reducer.hs_circuit(p.weight * dt / 2.0)?);
                }
            }
        }
    }
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densemath::{expm_hermitian, max_abs_diff, spectral_norm};
    use crate::opalg::{Factor, OperatorString};
    use num_complex::Complex64;

    fn x_plus_z() -> LinearCombination {
        LinearCombination::from_strings(vec![
            OperatorString::bare(vec![Factor::X]),
            OperatorString::bare(vec![Factor::Z]),
        ])
    }

    fn defect(lch: &LinearCombination, plan: &TrotterPlan) -> f64 {
        let circuit = trotter(lch, plan).unwrap();
        let target = lch.materialize().unwrap();
        let exact = expm_hermitian(&target, plan.t).unwrap();
        max_abs_diff(&circuit.lower().unwrap(), &exact).unwrap()
    }

    #[test]
    fn single_term_is_exact_for_any_step_count() {
        let lch = LinearCombination::from_strings(vec![OperatorString::with_hc(vec![
            Factor::Sigma,
            Factor::SigmaDagger,
        ])]);
        for steps in [1, 3] {
            let plan = TrotterPlan::first_order(0.9, steps);
            assert!(defect(&lch, &plan) < 1e-12);
        }
    }

    #[test]
    fn second_order_scales_cubically_per_step() {
        let lch = x_plus_z();
        let t = 0.4;
        let e1 = defect(&lch, &TrotterPlan::second_order(t, 4));
        let e2 = defect(&lch, &TrotterPlan::second_order(t, 8));
        // t^3/n^2 scaling: doubling n divides the defect by about four.
        let ratio = e2 / e1;
        assert!(ratio > 0.15 && ratio < 0.35, "ratio {ratio}");
        // and the symmetric splitting beats the first-order one
        let first = defect(&lch, &TrotterPlan::first_order(t, 4));
        assert!(e1 < first);
    }

    #[test]
    fn term_order_permutes_the_sequence() {
        let lch = x_plus_z();
        let forward = TrotterPlan {
            t: 0.3,
            steps: 2,
            order: 1,
            term_order: Some(vec![0, 1]),
        };
        let reversed = TrotterPlan {
            t: 0.3,
            steps: 2,
            order: 1,
            term_order: Some(vec![1, 0]),
        };
        let uf = trotter(&lch, &forward).unwrap().lower().unwrap();
        let ur = trotter(&lch, &reversed).unwrap().lower().unwrap();
        // Non-commuting terms make the two orderings measurably differ,
        // while both stay within the first-order error of the target.
        assert!(max_abs_diff(&uf, &ur).unwrap() > 1e-4);
        let exact = expm_hermitian(&lch.materialize().unwrap(), 0.3).unwrap();
        for u in [&uf, &ur] {
            assert!(max_abs_diff(u, &exact).unwrap() <= 2.0 * 0.3 * 0.3 / 2.0 + 1e-8);
        }
    }

    #[test]
    fn leading_commutator_predicts_the_defect() {
        // err(t) * n / t^2 converges to the commutator-sum norm as t
        // shrinks, with a linearly vanishing remainder.
        let lch = x_plus_z();
        let (xi1, xi1_norm, _) = crate::bounds::trotter_bound(&lch).unwrap();
        assert!((spectral_norm(&xi1).unwrap() - xi1_norm).abs() < 1e-12);
        let steps = 1usize;
        let mut remainders = Vec::new();
        for t in [0.2, 0.1, 0.05] {
            let err = defect(&lch, &TrotterPlan::first_order(t, steps));
            let scaled = err * steps as f64 / (t * t);
            remainders.push((scaled - xi1_norm).abs());
        }
        assert!(remainders[2] < remainders[1] && remainders[1] < remainders[0]);
        assert!(remainders[2] <= 0.1 * xi1_norm);
        // halving t at least halves the remainder (here the pair is
        // symmetric enough that it quarters)
        let ratio = remainders[2] / remainders[1];
        assert!(ratio < 0.6, "ratio {ratio}");
    }

    #[test]
    fn weighted_terms_use_their_weights() {
        let lch = LinearCombination::from_strings(vec![
            OperatorString::new(vec![Factor::X], Complex64::new(0.7, 0.0), false),
            OperatorString::new(vec![Factor::Z], Complex64::new(-1.3, 0.0), false),
        ]);
        let plan = TrotterPlan::first_order(0.2, 64);
        assert!(defect(&lch, &plan) < 1e-3);
    }
}
