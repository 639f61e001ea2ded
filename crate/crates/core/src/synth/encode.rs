//! From Hermitian terms to unitaries and block-encodings.
//!
//! A qubitized Hamiltonian splits into the difference of two
//! flag-controlled reflections; a projector splits against the
//! identity. The resulting all-reflection combinations block-encode
//! through the Prep-Sel-Prep routine and qubitize into a walk operator
//! whose eigenphase cosines reproduce the encoded spectrum.

use num_complex::Complex64;

use super::reducer::{term_reducer, Reducer};
use super::{Result, SynthError};
use crate::circuit::{Circuit, Control, Gate, GateKind, MacroGate, MacroKind, Op};
use crate::densemath::{hermitian_eig, max_abs_diff, ComplexMatrix, StateVector};
use crate::opalg::{LcTerm, LinearCombination};
use crate::tolerances::{TOL_EIGEN_SNAP, TOL_UNITARY};

/// One unitary summand of a linear combination of unitaries.
#[derive(Debug, Clone, PartialEq)]
pub struct LcuTerm {
    pub coefficient: Complex64,
    pub circuit: Circuit,
}

/// A weighted list of unitary circuits over one register.
#[derive(Debug, Clone, PartialEq)]
pub struct LcuCombination {
    pub num_qubits: usize,
    pub terms: Vec<LcuTerm>,
}

impl LcuCombination {
    pub fn new(num_qubits: usize, terms: Vec<LcuTerm>) -> Self {
        Self { num_qubits, terms }
    }

    pub fn weight_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.norm()).sum()
    }

    /// Dense sum of coefficient-weighted lowered terms.
    pub fn materialize(&self) -> Result<ComplexMatrix> {
        let dim = 1usize << self.num_qubits;
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for term in &self.terms {
            acc = acc
                .add(&term.circuit.lower()?.scale(term.coefficient))
                .expect("uniform dims");
        }
        Ok(acc)
    }

    pub fn extend(&mut self, other: LcuCombination) {
        assert_eq!(self.num_qubits, other.num_qubits);
        self.terms.extend(other.terms);
    }
}

/// Adds gates phasing the flag pattern by e^{i t} (a multi-controlled
/// phase anchored on the last flag). An empty flag set phases the whole
/// space.
pub fn pattern_phase(circuit: &mut Circuit, flags: &[(usize, bool)], t: f64) {
    match flags.split_last() {
        None => circuit.push(Gate::single(GateKind::GlobalPhase(t), 0)),
        Some((&(target, val), rest)) => {
            let controls: Vec<Control> = rest
                .iter()
                .map(|&(q, v)| {
                    if v {
                        Control::positive(q)
                    } else {
                        Control::negative(q)
                    }
                })
                .collect();
            if val {
                circuit.push(Gate::controlled(GateKind::P(t), target, controls));
            } else {
                circuit.push(Gate::controlled(GateKind::X, target, controls.clone()));
                circuit.push(Gate::controlled(GateKind::P(t), target, controls.clone()));
                circuit.push(Gate::controlled(GateKind::X, target, controls));
            }
        }
    }
}

/// Gates for `I - 2|pattern><pattern|` on the flagged qubits: a
/// multi-controlled Z anchored on the last flag, X-conjugated where the
/// pattern wants zero. An empty pattern reflects everything (global -1).
pub fn pattern_reflection(num_qubits: usize, flags: &[(usize, bool)]) -> Circuit {
    let mut circuit = Circuit::new(num_qubits);
    match flags.split_last() {
        None => circuit.push(Gate::single(GateKind::GlobalPhase(std::f64::consts::PI), 0)),
        Some((&(target, val), rest)) => {
            let controls: Vec<Control> = rest
                .iter()
                .map(|&(q, v)| {
                    if v {
                        Control::positive(q)
                    } else {
                        Control::negative(q)
                    }
                })
                .collect();
            if !val {
                circuit.push(Gate::single(GateKind::X, target));
            }
            circuit.push(Gate::controlled(GateKind::Z, target, controls));
            if !val {
                circuit.push(Gate::single(GateKind::X, target));
            }
        }
    }
    circuit
}

/// Splits one Hermitian term into unitaries: a qubitized term becomes
/// half the difference of the flag-controlled Z and its X-conjugate
/// (two reflections); a projector becomes `(I - reflection)/2`.
pub fn lch_to_lcu(term: &LcTerm) -> Result<LcuCombination> {
    let reducer = term_reducer(term)?;
    let weight = term.weight();
    let n = reducer.num_qubits;
    let half = Complex64::new(weight / 2.0, 0.0);

    match reducer.reduct_qubit {
        Some(r) => {
            let u1 = reducer.controlled_in_subspace(GateKind::Z)?;
            // Controlled -Z = controlled (X Z X) under the same flags.
            let mut u2 = reducer.basis_change.dagger();
            let flags = reducer.flag_controls();
            u2.push(Gate::controlled(GateKind::X, r, flags.clone()));
            u2.push(Gate::controlled(GateKind::Z, r, flags.clone()));
            u2.push(Gate::controlled(GateKind::X, r, flags));
            u2.extend(&reducer.basis_change);
            Ok(LcuCombination::new(
                n,
                vec![
                    LcuTerm {
                        coefficient: half,
                        circuit: u1,
                    },
                    LcuTerm {
                        coefficient: -half,
                        circuit: u2,
                    },
                ],
            ))
        }
        None => {
            let mut reflection = reducer.basis_change.dagger();
            reflection.extend(&pattern_reflection(n, &reducer.perp_flags));
            reflection.extend(&reducer.basis_change);
            Ok(LcuCombination::new(
                n,
                vec![
                    LcuTerm {
                        coefficient: half,
                        circuit: Circuit::new(n),
                    },
                    LcuTerm {
                        coefficient: -half,
                        circuit: reflection,
                    },
                ],
            ))
        }
    }
}

/// Concatenated unitary splits of every term in the combination.
pub fn lch_to_lcu_all(lch: &LinearCombination) -> Result<LcuCombination> {
    let mut out = LcuCombination::new(lch.num_qubits(), Vec::new());
    for term in &lch.terms {
        out.extend(lch_to_lcu(term)?);
    }
    Ok(out)
}

/// Which non-Hermitian half of a qubitized Hamiltonian to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitSide {
    /// |lambda><lambda_perp|
    Raise,
    /// |lambda_perp><lambda|
    Lower,
}

/// Unitary decomposition of the state transition between the nonzero
/// eigenspaces. With an empty zero space two terms suffice; otherwise
/// the four-term difference form is emitted, which cancels the zero
/// block exactly.
pub fn nonhermitian_split(reducer: &Reducer, side: SplitSide) -> Result<LcuCombination> {
    let n = reducer.num_qubits;
    let i = Complex64::new(0.0, 1.0);
    let y_sign = match side {
        SplitSide::Raise => i,
        SplitSide::Lower => -i,
    };
    if reducer.perp_flags.is_empty() {
        let x = reducer.controlled_in_subspace(GateKind::X)?;
        let y = reducer.controlled_in_subspace(GateKind::Y)?;
        let half = Complex64::new(0.5, 0.0);
        return Ok(LcuCombination::new(
            n,
            vec![
                LcuTerm {
                    coefficient: half,
                    circuit: x,
                },
                LcuTerm {
                    coefficient: y_sign * half,
                    circuit: y,
                },
            ],
        ));
    }
    let quarter = Complex64::new(0.25, 0.0);
    let mut terms = Vec::new();
    for (kind, sign) in [(GateKind::X, quarter), (GateKind::Y, y_sign * quarter)] {
        terms.push(LcuTerm {
            coefficient: sign,
            circuit: reducer.controlled_in_subspace(kind)?,
        });
        terms.push(LcuTerm {
            coefficient: -sign,
            circuit: controlled_negated(reducer, kind)?,
        });
    }
    Ok(LcuCombination::new(n, terms))
}

/// The literal two-term form regardless of the zero space; with a
/// nonempty zero space it leaves a (1 -+ i)/2 residue there.
pub fn nonhermitian_split_literal(reducer: &Reducer, side: SplitSide) -> Result<LcuCombination> {
    let n = reducer.num_qubits;
    let i = Complex64::new(0.0, 1.0);
    let y_sign = match side {
        SplitSide::Raise => i,
        SplitSide::Lower => -i,
    };
    let half = Complex64::new(0.5, 0.0);
    Ok(LcuCombination::new(
        n,
        vec![
            LcuTerm {
                coefficient: half,
                circuit: reducer.controlled_in_subspace(GateKind::X)?,
            },
            LcuTerm {
                coefficient: y_sign * half,
                circuit: reducer.controlled_in_subspace(GateKind::Y)?,
            },
        ],
    ))
}

/// Flag-controlled `-U` (U conjugated by Z on the reduct qubit).
fn controlled_negated(reducer: &Reducer, kind: GateKind) -> Result<Circuit> {
    let r = reducer
        .reduct_qubit
        .ok_or_else(|| SynthError::NotQubitized("projector reducer".into()))?;
    let flags = reducer.flag_controls();
    let mut circuit = reducer.basis_change.dagger();
    circuit.push(Gate::controlled(GateKind::Z, r, flags.clone()));
    circuit.push(Gate::controlled(kind, r, flags.clone()));
    circuit.push(Gate::controlled(GateKind::Z, r, flags));
    circuit.extend(&reducer.basis_change);
    Ok(circuit)
}

/// State-preparation circuit loading amplitudes proportional to the
/// square roots of the weights onto `|bin 0>`.
pub fn prep(weights: &[f64]) -> Result<Circuit> {
    if weights.iter().all(|&w| w == 0.0) {
        return Err(SynthError::AllZeroWeights);
    }
    let padded_len = weights.len().next_power_of_two().max(2);
    let qubits = padded_len.trailing_zeros() as usize;
    let total: f64 = weights.iter().map(|w| w.abs()).sum();
    let mut amplitudes = vec![0.0; padded_len];
    for (i, w) in weights.iter().enumerate() {
        amplitudes[i] = (w.abs() / total).sqrt();
    }
    let mut circuit = Circuit::new(qubits);
    circuit.push_macro(MacroGate {
        kind: MacroKind::StatePrep(amplitudes),
        qubits: (0..qubits).collect(),
    });
    Ok(circuit)
}

/// Select oracle: applies `unitaries[i]` to the system register when
/// the index register reads `bin i`; unused index values act as the
/// identity.
pub fn select(unitaries: &[Circuit]) -> Result<Circuit> {
    let system = match unitaries.first() {
        Some(u) => u.num_qubits,
        None => return Err(SynthError::AllZeroWeights),
    };
    if unitaries.iter().any(|u| u.num_qubits != system) {
        return Err(SynthError::RegisterMismatch(
            system,
            unitaries.iter().map(|u| u.num_qubits).max().unwrap(),
        ));
    }
    let index_qubits = index_register_size(unitaries.len());
    let mut out = Circuit::new(index_qubits + system);
    for (i, unitary) in unitaries.iter().enumerate() {
        let pattern: Vec<Control> = (0..index_qubits)
            .map(|b| {
                if (i >> (index_qubits - 1 - b)) & 1 == 1 {
                    Control::positive(b)
                } else {
                    Control::negative(b)
                }
            })
            .collect();
        for op in &unitary.expand_macros().ops {
            let Op::Gate(g) = op else { unreachable!() };
            let mut controls = pattern.clone();
            controls.extend(g.controls.iter().map(|c| Control {
                qubit: c.qubit + index_qubits,
                polarity: c.polarity,
            }));
            out.push(Gate {
                kind: g.kind,
                targets: g.targets.iter().map(|&t| t + index_qubits).collect(),
                controls,
            });
        }
    }
    Ok(out)
}

fn index_register_size(count: usize) -> usize {
    count.next_power_of_two().max(2).trailing_zeros() as usize
}

/// A unitary with a designated ancilla block equal to the target matrix
/// over its subnormalization.
#[derive(Debug, Clone)]
pub struct BlockEncoding {
    /// Ancillas first (index register, then the reflection extension
    /// qubit), system last.
    pub circuit: Circuit,
    pub anc_qubits: usize,
    pub system_qubits: usize,
    /// Required ancilla state selecting the block.
    pub anc_state: StateVector,
    /// Sum of the absolute combination coefficients.
    pub subnormalization: f64,
    /// Every select branch squared to the identity.
    pub all_reflections: bool,
}

impl BlockEncoding {
    pub fn total_qubits(&self) -> usize {
        self.anc_qubits + self.system_qubits
    }

    /// `<anc| S |anc>` on the system register. Small encodings go
    /// through the dense unitary; larger ones apply the circuit column
    /// by column.
    pub fn extract_block(&self) -> Result<ComplexMatrix> {
        let sys_dim = 1usize << self.system_qubits;
        let anc_dim = 1usize << self.anc_qubits;
        let anc = self.anc_state.amplitudes();
        let mut block = ComplexMatrix::zeros(sys_dim, sys_dim);
        if self.total_qubits() <= crate::tolerances::MAX_LOWER_QUBITS {
            let u = self.circuit.lower()?;
            for k in 0..anc_dim {
                if anc[k].norm_sqr() == 0.0 {
                    continue;
                }
                for l in 0..anc_dim {
                    if anc[l].norm_sqr() == 0.0 {
                        continue;
                    }
                    let factor = anc[k].conj() * anc[l];
                    for i in 0..sys_dim {
                        for j in 0..sys_dim {
                            block[(i, j)] += factor * u[(k * sys_dim + i, l * sys_dim + j)];
                        }
                    }
                }
            }
        } else {
            for j in 0..sys_dim {
                let mut input = vec![Complex64::new(0.0, 0.0); anc_dim * sys_dim];
                for l in 0..anc_dim {
                    input[l * sys_dim + j] = anc[l];
                }
                let out = self
                    .circuit
                    .apply(&StateVector::from_amplitudes(input))?;
                for i in 0..sys_dim {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for k in 0..anc_dim {
                        acc += anc[k].conj() * out.amplitudes()[k * sys_dim + i];
                    }
                    block[(i, j)] = acc;
                }
            }
        }
        Ok(block)
    }
}

/// Prep-Sel-Prep block-encoding of a combination of unitaries, extended
/// by an X on one extra ancilla so that all-reflection inputs yield a
/// reflection encoding.
pub fn block_encode(lcu: &LcuCombination) -> Result<BlockEncoding> {
    if lcu.terms.is_empty() {
        return Err(SynthError::AllZeroWeights);
    }
    let subnormalization = lcu.weight_sum();
    if subnormalization == 0.0 {
        return Err(SynthError::AllZeroWeights);
    }

    // Fold each coefficient's phase into its unitary as a global phase.
    let mut folded: Vec<Circuit> = Vec::with_capacity(lcu.terms.len());
    let mut all_reflections = true;
    for (idx, term) in lcu.terms.iter().enumerate() {
        let lowered = term.circuit.lower()?;
        let defect = lowered.unitarity_defect();
        if defect > TOL_EIGEN_SNAP {
            return Err(SynthError::NonUnitaryTerm(idx, defect));
        }
        let mut folded_term = Circuit::new(lcu.num_qubits);
        let theta = term.coefficient.arg();
        if theta != 0.0 {
            folded_term.push(Gate::single(GateKind::GlobalPhase(theta), 0));
        }
        folded_term.extend(&term.circuit);
        let phase = Complex64::from_polar(1.0, theta);
        let squared = lowered.scale(phase).matmul(&lowered.scale(phase));
        let dim = 1usize << lcu.num_qubits;
        if max_abs_diff(&squared, &ComplexMatrix::identity(dim))? > TOL_UNITARY {
            all_reflections = false;
        }
        folded.push(folded_term);
    }

    let weights: Vec<f64> = lcu.terms.iter().map(|t| t.coefficient.norm()).collect();
    let index_qubits = index_register_size(weights.len());
    let prep_circuit = prep(&weights)?;
    let sel = select(&folded)?;
    debug_assert_eq!(sel.num_qubits, index_qubits + lcu.num_qubits);

    // Layout: [index register][extension qubit][system].
    let anc_qubits = index_qubits + 1;
    let total = anc_qubits + lcu.num_qubits;
    let ext = index_qubits;
    let mut circuit = Circuit::new(total);
    circuit.label_register("prep", 0, index_qubits);
    circuit.label_register("ext", ext, ext + 1);
    circuit.label_register("system", anc_qubits, total);

    let place_prep = |c: &Circuit, out: &mut Circuit| {
        for op in &c.ops {
            match op {
                Op::Gate(g) => out.push(g.clone()),
                Op::Macro(m) => out.push_macro(m.clone()),
            }
        }
    };
    place_prep(&prep_circuit, &mut circuit);
    for op in &sel.ops {
        let Op::Gate(g) = op else { unreachable!() };
        // Shift system wires past the extension qubit.
        let shift = |q: usize| if q < index_qubits { q } else { q + 1 };
        circuit.push(Gate {
            kind: g.kind,
            targets: g.targets.iter().map(|&t| shift(t)).collect(),
            controls: g
                .controls
                .iter()
                .map(|c| Control {
                    qubit: shift(c.qubit),
                    polarity: c.polarity,
                })
                .collect(),
        });
    }
    place_prep(&prep_circuit.dagger(), &mut circuit);
    circuit.push(Gate::single(GateKind::X, ext));

    // Ancilla state |bin 0>_prep (x) |+>_ext.
    let mut anc = vec![Complex64::new(0.0, 0.0); 1 << anc_qubits];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    anc[0] = Complex64::new(s, 0.0);
    anc[1] = Complex64::new(s, 0.0);

    Ok(BlockEncoding {
        circuit,
        anc_qubits,
        system_qubits: lcu.num_qubits,
        anc_state: StateVector::from_amplitudes(anc),
        subnormalization,
        all_reflections,
    })
}

/// Walk operator: the ancilla reflection about `|bin 0>(x)|+>` composed
/// with a reflection block-encoding. Its eigenphases pair up so that
/// `cos(theta)` runs over the encoded spectrum divided by the
/// subnormalization.
pub fn qubitize(be: &BlockEncoding) -> Result<Circuit> {
    let s = be.circuit.lower()?;
    let dim = s.rows();
    let defect = max_abs_diff(&s.matmul(&s), &ComplexMatrix::identity(dim))?;
    if defect > TOL_UNITARY {
        return Err(SynthError::NotReflection(defect));
    }

    let ext = be.anc_qubits - 1;
    let mut walk = be.circuit.clone();
    // Reflection 2|0...0,+><0...0,+| - I via an H-conjugated pattern
    // reflection and a global sign.
    walk.push(Gate::single(GateKind::H, ext));
    let zeros: Vec<(usize, bool)> = (0..be.anc_qubits).map(|q| (q, false)).collect();
    walk.extend(&pattern_reflection(walk.num_qubits, &zeros));
    walk.push(Gate::single(GateKind::H, ext));
    walk.push(Gate::single(GateKind::GlobalPhase(std::f64::consts::PI), 0));
    Ok(walk)
}

/// Eigenphase cosines of a walk operator: the spectrum of (W + W^dag)/2.
pub fn walk_eigenphase_cosines(walk: &Circuit) -> Result<Vec<f64>> {
    let w = walk.lower()?;
    let sym = w
        .add(&w.dagger())
        .expect("square")
        .scale(Complex64::new(0.5, 0.0));
    let (values, _) = hermitian_eig(&sym)?;
    Ok(values)
}
