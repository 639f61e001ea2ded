//! Measurement circuits for qubitized Hamiltonians: undo the reducer's
//! basis change, read the computational basis, and post-process
//! classically.
//!
//! Single-qubit mode reads the reduct qubit under the flag condition.
//! Parity mode skips the parity-merge ladder (a shallower change of
//! basis) and takes the Hamming-weight parity of all parity qubits
//! instead; the classical rule is heavier, the circuit lighter.

use super::reducer::Reducer;
use super::Result;
use crate::circuit::{Circuit, Gate, GateKind};
use crate::densemath::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureMode {
    SingleQubit,
    Parity,
}

/// A basis-change circuit plus the classical outcome rule mapping each
/// bitstring to a contribution in {+1, -1, 0}.
#[derive(Debug, Clone)]
pub struct MeasurementProgram {
    pub num_qubits: usize,
    /// Applied to the prepared state before computational readout.
    pub circuit: Circuit,
    /// Qubits that must read the given value for a nonzero contribution.
    pub flags: Vec<(usize, bool)>,
    /// Qubits whose bit parity sets the sign (empty for projectors:
    /// contribution is +1 whenever the flags match).
    pub sign_qubits: Vec<usize>,
    /// Optional extra gate on the reduct qubit before readout (identity
    /// when absent); changing it rotates the measured axis for
    /// qubitized-subspace tomography. The four symmetric
    /// informationally-complete settings are `I`, `RY(phi)`,
    /// `RY(phi) . P(2 pi/3)` and `RY(phi) . P(4 pi/3)` with
    /// `cos(phi/2) = 1/sqrt(3)`; only the plain `I` setting is wired
    /// into the builders here.
    pub pre_measurement: Option<GateKind>,
}

impl MeasurementProgram {
    /// Classical rule: 0 unless every flag matches, otherwise the
    /// parity sign of the sign qubits.
    pub fn contribution(&self, outcome: usize) -> i8 {
        let bit = |q: usize| (outcome >> (self.num_qubits - 1 - q)) & 1;
        for &(q, val) in &self.flags {
            if bit(q) != usize::from(val) {
                return 0;
            }
        }
        let parity: usize = self.sign_qubits.iter().map(|&q| bit(q)).sum();
        if parity % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Exact outcome distribution of the program on a prepared state.
    pub fn outcome_probabilities(&self, psi: &StateVector) -> Result<Vec<f64>> {
        let rotated = self.measurement_circuit().apply(psi)?;
        Ok(rotated.amplitudes().iter().map(|a| a.norm_sqr()).collect())
    }

    /// Expectation of the represented Hamiltonian from the exact
    /// outcome probabilities.
    pub fn expectation(&self, psi: &StateVector) -> Result<f64> {
        let probs = self.outcome_probabilities(psi)?;
        Ok(probs
            .iter()
            .enumerate()
            .map(|(outcome, p)| p * f64::from(self.contribution(outcome)))
            .sum())
    }

    fn measurement_circuit(&self) -> Circuit {
        let mut circuit = self.circuit.clone();
        if let (Some(kind), Some(&reduct)) = (self.pre_measurement, self.sign_qubits.first()) {
            circuit.push(Gate::single(kind, reduct));
        }
        circuit
    }
}

/// Builds the measurement program of a reducer's (unit-weight)
/// Hamiltonian.
pub fn measurement_program(reducer: &Reducer, mode: MeasureMode) -> Result<MeasurementProgram> {
    let (circuit, sign_qubits) = match (mode, reducer.reduct_qubit) {
        (MeasureMode::SingleQubit, Some(r)) => (reducer.basis_change.dagger(), vec![r]),
        (MeasureMode::Parity, Some(_)) => (
            reducer.shallow_basis_change.dagger(),
            reducer.parity_qubits.clone(),
        ),
        // Projectors have no sign qubit in either mode.
        (_, None) => (reducer.basis_change.dagger(), Vec::new()),
    };
    Ok(MeasurementProgram {
        num_qubits: reducer.num_qubits,
        circuit,
        flags: reducer.perp_flags.clone(),
        sign_qubits,
        pre_measurement: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densemath::random_state;
    use crate::opalg::{Factor, OperatorString};
    use crate::synth::reducer_from_string;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sigma_pair() -> OperatorString {
        OperatorString::with_hc(vec![Factor::Sigma, Factor::SigmaDagger])
    }

    #[test]
    fn eigenstate_gives_unit_expectation() {
        let r = reducer_from_string(&sigma_pair()).unwrap();
        let program = measurement_program(&r, MeasureMode::SingleQubit).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let lambda = StateVector::from_real(&[0.0, s, s, 0.0]);
        let e = program.expectation(&lambda).unwrap();
        assert!((e - 1.0).abs() < 1e-12);
    }

    #[test]
    fn perp_state_gives_zero() {
        let r = reducer_from_string(&sigma_pair()).unwrap();
        for mode in [MeasureMode::SingleQubit, MeasureMode::Parity] {
            let program = measurement_program(&r, mode).unwrap();
            let perp = StateVector::basis_state(4, 0);
            assert!(program.expectation(&perp).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn balanced_superposition_gives_zero_mean() {
        let r = reducer_from_string(&sigma_pair()).unwrap();
        let program = measurement_program(&r, MeasureMode::SingleQubit).unwrap();
        // (|lambda> + |lambda_perp>)/sqrt2 = |01>
        let psi = StateVector::basis_state(4, 1);
        assert!(program.expectation(&psi).unwrap().abs() < 1e-12);
    }

    #[test]
    fn both_modes_match_oracle_on_random_states() {
        let strings = [
            sigma_pair(),
            OperatorString::bare(vec![Factor::Z, Factor::X]),
            OperatorString::bare(vec![Factor::N, Factor::X]),
            OperatorString::new(
                vec![Factor::Sigma, Factor::Sigma, Factor::M],
                Complex64::from_polar(1.0, 0.4),
                true,
            ),
            OperatorString::bare(vec![Factor::N, Factor::M]),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        for s in &strings {
            let r = reducer_from_string(s).unwrap();
            let h = r.reduced_hamiltonian().unwrap();
            for mode in [MeasureMode::SingleQubit, MeasureMode::Parity] {
                let program = measurement_program(&r, mode).unwrap();
                for _ in 0..100 {
                    let psi = random_state(&mut rng, h.rows());
                    let exact = psi.expectation(&h).re;
                    let measured = program.expectation(&psi).unwrap();
                    assert!(
                        (exact - measured).abs() < 1e-10,
                        "{} mode {mode:?}",
                        s.notation()
                    );
                }
            }
        }
    }

    #[test]
    fn conjugated_terms_measure_correctly_in_both_modes() {
        use crate::circuit::{Circuit, Gate, GateKind};
        use crate::opalg::LcTerm;
        use crate::synth::term_reducer;

        // Wrap a two-qubit string in an entangling change of basis.
        let mut conj = Circuit::new(2);
        conj.push(Gate::single(GateKind::H, 0));
        conj.push(Gate::controlled(
            GateKind::X,
            1,
            vec![crate::circuit::Control::positive(0)],
        ));
        let term = LcTerm::conjugated(
            OperatorString::bare(vec![Factor::Z, Factor::X]),
            conj.clone(),
        );
        let reducer = term_reducer(&term).unwrap();
        let h = term.materialize().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(56);
        for mode in [MeasureMode::SingleQubit, MeasureMode::Parity] {
            let program = measurement_program(&reducer, mode).unwrap();
            for _ in 0..25 {
                let psi = random_state(&mut rng, 4);
                let exact = psi.expectation(&h).re;
                let measured = program.expectation(&psi).unwrap();
                assert!((exact - measured).abs() < 1e-10, "mode {mode:?}");
            }
        }
    }

    #[test]
    fn projector_program_counts_flag_matches() {
        let s = OperatorString::bare(vec![Factor::N, Factor::M]);
        let r = reducer_from_string(&s).unwrap();
        let program = measurement_program(&r, MeasureMode::SingleQubit).unwrap();
        // |10> matches (n=1, m=0): contribution 1; everything else 0.
        assert_eq!(program.contribution(0b10), 1);
        assert_eq!(program.contribution(0b00), 0);
        assert_eq!(program.contribution(0b11), 0);
    }
}
