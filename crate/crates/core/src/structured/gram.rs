//! Gram-type matrices: pure-state density matrices, outer products,
//! and single lines or columns. These decompose as combinations of
//! unitaries only; there is no Hermitian decomposition with unit
//! spectrum behind them.

use num_complex::Complex64;

use super::{Result, StructuredError};
use crate::circuit::{Circuit, Gate, GateKind, MacroGate, MacroKind};
use crate::densemath::StateVector;
use crate::synth::{block_encode, pattern_phase, pattern_reflection, BlockEncoding, LcuCombination, LcuTerm};
use crate::tolerances::TOL_UNITARY;

fn register_size(dim: usize) -> Result<usize> {
    if !dim.is_power_of_two() || dim < 2 {
        return Err(StructuredError::InvalidSpec(format!(
            "state dimension {dim} must be a power of two >= 2"
        )));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Circuit preparing an arbitrary normalized state from |0...0>:
/// magnitude tree of controlled Y rotations followed by one controlled
/// phase per index with a nonzero argument.
pub fn state_prep_circuit(psi: &StateVector) -> Result<Circuit> {
    let qubits = register_size(psi.dim())?;
    psi.check_normalized(TOL_UNITARY)
        .map_err(StructuredError::Dense)?;
    let mut circuit = Circuit::new(qubits);
    let magnitudes: Vec<f64> = psi.amplitudes().iter().map(|a| a.norm()).collect();
    circuit.push_macro(MacroGate {
        kind: MacroKind::StatePrep(magnitudes),
        qubits: (0..qubits).collect(),
    });
    for (index, amp) in psi.amplitudes().iter().enumerate() {
        if amp.norm() == 0.0 {
            continue;
        }
        let theta = amp.arg();
        if theta == 0.0 {
            continue;
        }
        let flags: Vec<(usize, bool)> = (0..qubits)
            .map(|q| (q, (index >> (qubits - 1 - q)) & 1 == 1))
            .collect();
        pattern_phase(&mut circuit, &flags, theta);
    }
    Ok(circuit)
}

/// Two-term unitary split of the rank-one density matrix |psi><psi|:
/// half the identity minus half the reflection about |psi>.
pub fn density_matrix_lcu(psi: &StateVector) -> Result<LcuCombination> {
    let qubits = register_size(psi.dim())?;
    let u_psi = state_prep_circuit(psi)?;
    let zeros: Vec<(usize, bool)> = (0..qubits).map(|q| (q, false)).collect();

    let mut reflection = u_psi.dagger();
    reflection.extend(&pattern_reflection(qubits, &zeros));
    reflection.extend(&u_psi);

    let half = Complex64::new(0.5, 0.0);
    Ok(LcuCombination::new(
        qubits,
        vec![
            LcuTerm {
                coefficient: half,
                circuit: Circuit::new(qubits),
            },
            LcuTerm {
                coefficient: -half,
                circuit: reflection,
            },
        ],
    ))
}

/// Block-encoding of |psi><psi|.
pub fn density_matrix(psi: &StateVector) -> Result<BlockEncoding> {
    block_encode(&density_matrix_lcu(psi)?).map_err(StructuredError::Synth)
}

/// Exact e^{i t |psi><psi|}: the phase gate on |0...0> conjugated by
/// the preparation circuit.
pub fn density_matrix_hs(psi: &StateVector, t: f64) -> Result<Circuit> {
    let qubits = register_size(psi.dim())?;
    let u_psi = state_prep_circuit(psi)?;
    let zeros: Vec<(usize, bool)> = (0..qubits).map(|q| (q, false)).collect();
    let mut circuit = u_psi.dagger();
    pattern_phase(&mut circuit, &zeros, t);
    circuit.extend(&u_psi);
    Ok(circuit)
}

/// Unitary split of |phi><psi| through two preparation circuits.
pub fn outer_product_lcu(phi: &StateVector, psi: &StateVector) -> Result<LcuCombination> {
    if phi.dim() != psi.dim() {
        return Err(StructuredError::Dense(
            crate::densemath::DenseError::DimMismatch(phi.dim(), 1, psi.dim(), 1),
        ));
    }
    let qubits = register_size(psi.dim())?;
    let u_phi = state_prep_circuit(phi)?;
    let u_psi = state_prep_circuit(psi)?;
    let zeros: Vec<(usize, bool)> = (0..qubits).map(|q| (q, false)).collect();

    // |phi><psi| = U_phi |0><0| U_psi^dag = (U_phi U_psi^dag)/2
    //            - (U_phi R_0 U_psi^dag)/2
    let mut plain = u_psi.dagger();
    plain.extend(&u_phi);
    let mut reflected = u_psi.dagger();
    reflected.extend(&pattern_reflection(qubits, &zeros));
    reflected.extend(&u_phi);

    let half = Complex64::new(0.5, 0.0);
    Ok(LcuCombination::new(
        qubits,
        vec![
            LcuTerm {
                coefficient: half,
                circuit: plain,
            },
            LcuTerm {
                coefficient: -half,
                circuit: reflected,
            },
        ],
    ))
}

/// Block-encoding of |phi><psi|.
pub fn outer_product(phi: &StateVector, psi: &StateVector) -> Result<BlockEncoding> {
    block_encode(&outer_product_lcu(phi, psi)?).map_err(StructuredError::Synth)
}

/// The pseudo-covariance |psi*><psi| built from the conjugated
/// preparation circuit rather than a second state.
pub fn pseudo_covariance_lcu(psi: &StateVector) -> Result<LcuCombination> {
    let qubits = register_size(psi.dim())?;
    let u_psi = state_prep_circuit(psi)?;
    let u_phi = u_psi.conjugated();
    let zeros: Vec<(usize, bool)> = (0..qubits).map(|q| (q, false)).collect();

    let mut plain = u_psi.dagger();
    plain.extend(&u_phi);
    let mut reflected = u_psi.dagger();
    reflected.extend(&pattern_reflection(qubits, &zeros));
    reflected.extend(&u_phi);

    let half = Complex64::new(0.5, 0.0);
    Ok(LcuCombination::new(
        qubits,
        vec![
            LcuTerm {
                coefficient: half,
                circuit: plain,
            },
            LcuTerm {
                coefficient: -half,
                circuit: reflected,
            },
        ],
    ))
}

/// Block-encoding of the pseudo-covariance.
pub fn pseudo_covariance(psi: &StateVector) -> Result<BlockEncoding> {
    block_encode(&pseudo_covariance_lcu(psi)?).map_err(StructuredError::Synth)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineColumnKind {
    Line,
    Column,
}

/// Unitary split of a single column |psi><bin j| or line |bin j><psi|.
pub fn line_column_lcu(
    psi: &StateVector,
    j: usize,
    which: LineColumnKind,
) -> Result<LcuCombination> {
    let qubits = register_size(psi.dim())?;
    if j >= psi.dim() {
        return Err(StructuredError::InvalidSpec(format!(
            "index {j} out of range for dimension {}",
            psi.dim()
        )));
    }
    // U_{psi,j} = U_psi . X-offset: maps |bin j> to |psi>.
    let mut u = Circuit::new(qubits);
    for q in 0..qubits {
        if (j >> (qubits - 1 - q)) & 1 == 1 {
            u.push(Gate::single(GateKind::X, q));
        }
    }
    u.extend(&state_prep_circuit(psi)?);
    let j_flags: Vec<(usize, bool)> = (0..qubits)
        .map(|q| (q, (j >> (qubits - 1 - q)) & 1 == 1))
        .collect();
    let reflection_j = pattern_reflection(qubits, &j_flags);

    let half = Complex64::new(0.5, 0.0);
    let (plain, reflected) = match which {
        LineColumnKind::Column => {
            // U (I - R_j)/2
            let mut reflected = reflection_j.clone();
            reflected.extend(&u);
            (u, reflected)
        }
        LineColumnKind::Line => {
            // (I - R_j)/2 U^dag
            let ud = u.dagger();
            let mut reflected = ud.clone();
            reflected.extend(&reflection_j);
            (ud, reflected)
        }
    };
    Ok(LcuCombination::new(
        qubits,
        vec![
            LcuTerm {
                coefficient: half,
                circuit: plain,
            },
            LcuTerm {
                coefficient: -half,
                circuit: reflected,
            },
        ],
    ))
}

/// Block-encoding of a line or column.
pub fn line_column(psi: &StateVector, j: usize, which: LineColumnKind) -> Result<BlockEncoding> {
    block_encode(&line_column_lcu(psi, j, which)?).map_err(StructuredError::Synth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densemath::{expm_hermitian, max_abs_diff, random_state};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn prep_reaches_complex_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for qubits in 1..=3usize {
            let psi = random_state(&mut rng, 1 << qubits);
            let circuit = state_prep_circuit(&psi).unwrap();
            let got = circuit
                .apply(&StateVector::basis_state(1 << qubits, 0))
                .unwrap();
            for (a, b) in got.amplitudes().iter().zip(psi.amplitudes()) {
                assert!((a - b).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn density_block_is_projector() {
        // |+>: block (I + X)/2.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = StateVector::from_real(&[s, s]);
        let be = density_matrix(&plus).unwrap();
        assert!(be.all_reflections);
        let block = be.extract_block().unwrap();
        let expected = plus.outer(&plus);
        assert!(max_abs_diff(&block, &expected).unwrap() <= TOL_UNITARY);

        let mut rng = ChaCha8Rng::seed_from_u64(62);
        let psi = random_state(&mut rng, 8);
        let be = density_matrix(&psi).unwrap();
        let block = be.extract_block().unwrap();
        assert!(max_abs_diff(&block, &psi.outer(&psi)).unwrap() <= TOL_UNITARY);
    }

    #[test]
    fn density_rejects_unnormalized() {
        let raw = StateVector::from_real(&[1.0, 1.0]);
        assert!(density_matrix(&raw).is_err());
    }

    #[test]
    fn density_hs_matches_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        for _ in 0..5 {
            let psi = random_state(&mut rng, 4);
            let t = 0.9;
            let circuit = density_matrix_hs(&psi, t).unwrap();
            let got = circuit.lower().unwrap();
            let expected = expm_hermitian(&psi.outer(&psi), t).unwrap();
            assert!(max_abs_diff(&got, &expected).unwrap() <= TOL_UNITARY);
        }
    }

    #[test]
    fn outer_product_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(64);
        let phi = random_state(&mut rng, 4);
        let psi = random_state(&mut rng, 4);
        let be = outer_product(&phi, &psi).unwrap();
        let block = be.extract_block().unwrap();
        assert!(max_abs_diff(&block, &phi.outer(&psi)).unwrap() <= TOL_UNITARY);

        // phi = psi reduces to the density matrix
        let be2 = outer_product(&psi, &psi).unwrap();
        let block2 = be2.extract_block().unwrap();
        assert!(max_abs_diff(&block2, &psi.outer(&psi)).unwrap() <= TOL_UNITARY);
    }

    #[test]
    fn pseudo_covariance_is_conjugate_outer_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(65);
        let psi = random_state(&mut rng, 8);
        let be = pseudo_covariance(&psi).unwrap();
        let block = be.extract_block().unwrap();
        let expected = psi.conjugate().outer(&psi);
        assert!(max_abs_diff(&block, &expected).unwrap() <= TOL_UNITARY);
    }

    #[test]
    fn line_and_column_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(66);
        let psi = random_state(&mut rng, 4);
        for j in 0..4 {
            let col = line_column(&psi, j, LineColumnKind::Column).unwrap();
            let block = col.extract_block().unwrap();
            let expected = psi.outer(&StateVector::basis_state(4, j));
            assert!(max_abs_diff(&block, &expected).unwrap() <= TOL_UNITARY);

            let line = line_column(&psi, j, LineColumnKind::Line).unwrap();
            let lblock = line.extract_block().unwrap();
            assert!(max_abs_diff(&lblock, &expected.dagger()).unwrap() <= TOL_UNITARY);
        }
    }

    #[test]
    fn uniform_column_through_hadamards() {
        // Uniform psi at j = 0: all entries 1/sqrt(m) in column 0.
        let m = 8;
        let amp = 1.0 / (m as f64).sqrt();
        let uniform = StateVector::from_real(&vec![amp; m]);
        let be = line_column(&uniform, 0, LineColumnKind::Column).unwrap();
        let block = be.extract_block().unwrap();
        for i in 0..m {
            assert!((block[(i, 0)].re - amp).abs() < 1e-10);
            for j in 1..m {
                assert!(block[(i, j)].norm() < 1e-10);
            }
        }
    }

    #[test]
    fn basis_state_column_is_single_entry() {
        let e0 = StateVector::basis_state(4, 0);
        let be = line_column(&e0, 0, LineColumnKind::Column).unwrap();
        let block = be.extract_block().unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == 0 && j == 0 { 1.0 } else { 0.0 };
                assert!((block[(i, j)].re - expected).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn line_column_range_check() {
        let psi = StateVector::basis_state(4, 0);
        assert!(line_column(&psi, 4, LineColumnKind::Line).is_err());
    }
}
