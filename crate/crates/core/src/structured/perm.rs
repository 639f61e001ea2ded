//! Permutation synthesis: state-swapping transposition products for
//! circular permutations, and the swap-through-ancilla construction for
//! permutations given by an explicit table.

use num_complex::Complex64;

use super::toeplitz::{circulant, CirculantVariant};
use super::{Result, StructuredError};
use crate::circuit::{Circuit, Control, Gate, GateKind};
use crate::densemath::ComplexMatrix;
use crate::opalg::{LcTerm, LinearCombination};

/// A bijection on [0, m) with its orbit decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationSpec {
    table: Vec<usize>,
    cycles: Vec<Vec<usize>>,
}

impl PermutationSpec {
    pub fn new(table: Vec<usize>) -> Result<Self> {
        let m = table.len();
        let mut seen = vec![false; m];
        for &v in &table {
            if v >= m || seen[v] {
                return Err(StructuredError::NotBijective);
            }
            seen[v] = true;
        }
        let mut visited = vec![false; m];
        let mut cycles = Vec::new();
        for start in 0..m {
            if visited[start] {
                continue;
            }
            let mut cycle = vec![start];
            visited[start] = true;
            let mut next = table[start];
            while next != start {
                visited[next] = true;
                cycle.push(next);
                next = table[next];
            }
            cycles.push(cycle);
        }
        Ok(Self { table, cycles })
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    /// Orbits with their smallest-index representative first.
    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    pub fn is_single_cycle(&self) -> bool {
        self.cycles.len() == 1 && self.cycles[0].len() == self.table.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.table[i]
    }

    pub fn inverse(&self) -> PermutationSpec {
        let mut inv = vec![0usize; self.table.len()];
        for (i, &v) in self.table.iter().enumerate() {
            inv[v] = i;
        }
        PermutationSpec::new(inv).expect("inverse of a bijection")
    }

    /// Number of state-swapping gates the transposition product needs:
    /// the sum over orbits of (period - 1).
    pub fn transposition_count(&self) -> usize {
        self.cycles.iter().map(|c| c.len() - 1).sum()
    }

    /// Dense permutation matrix |bin pi(i)><bin i|.
    pub fn matrix(&self) -> ComplexMatrix {
        let m = self.table.len();
        let mut p = ComplexMatrix::zeros(m, m);
        for (i, &v) in self.table.iter().enumerate() {
            p[(v, i)] = Complex64::new(1.0, 0.0);
        }
        p
    }
}

/// Gates swapping the two computational states `a` and `b` and fixing
/// everything else: a CX fan collapses their difference onto one pivot
/// bit, a fully-controlled X swaps the collapsed pair.
pub fn transposition_circuit(num_qubits: usize, a: usize, b: usize) -> Circuit {
    assert!(a != b, "transposition needs two distinct states");
    let bit = |x: usize, q: usize| (x >> (num_qubits - 1 - q)) & 1;
    let diff = a ^ b;
    let pivot = (0..num_qubits)
        .find(|&q| bit(diff, q) == 1)
        .expect("distinct states differ somewhere");

    let mut circuit = Circuit::new(num_qubits);
    let fan: Vec<usize> = (0..num_qubits)
        .filter(|&q| q != pivot && bit(diff, q) == 1)
        .collect();
    for &q in &fan {
        circuit.push(Gate::controlled(GateKind::X, q, vec![Control::positive(pivot)]));
    }
    // After the fan, a and b agree away from the pivot; pin that pattern.
    let folded = |x: usize| {
        let mut y = x;
        for &q in &fan {
            let p = bit(x, pivot);
            if p == 1 {
                y ^= 1 << (num_qubits - 1 - q);
            }
        }
        y
    };
    let pattern = folded(a);
    let controls: Vec<Control> = (0..num_qubits)
        .filter(|&q| q != pivot)
        .map(|q| {
            if bit(pattern, q) == 1 {
                Control::positive(q)
            } else {
                Control::negative(q)
            }
        })
        .collect();
    circuit.push(Gate::controlled(GateKind::X, pivot, controls));
    for &q in fan.iter().rev() {
        circuit.push(Gate::controlled(GateKind::X, q, vec![Control::positive(pivot)]));
    }
    circuit
}

/// Circuit for an arbitrary permutation as a product of state swaps,
/// one transposition per non-fixed point of each orbit.
pub fn permutation_by_swaps(spec: &PermutationSpec) -> Result<Circuit> {
    let m = spec.len();
    if !m.is_power_of_two() || m < 2 {
        return Err(StructuredError::InvalidSpec(format!(
            "permutation length {m} must be a power of two >= 2"
        )));
    }
    let num_qubits = m.trailing_zeros() as usize;
    let mut circuit = Circuit::new(num_qubits);
    for cycle in spec.cycles() {
        let head = cycle[0];
        for &next in &cycle[1..] {
            circuit.extend(&transposition_circuit(num_qubits, head, next));
        }
    }
    Ok(circuit)
}

/// Reordered circulant: the permutation `p` (a single m-cycle, the
/// directed graph of the rotation) determines a relabeling `pi` through
/// its visiting order from node 0; the Hermitian output is the circulant
/// conjugated by `pi`, the unitary output is the relabeling circuit.
pub fn circular_permutation(
    p: &PermutationSpec,
    n: u64,
    m: u64,
    weight: Complex64,
) -> Result<(Circuit, LinearCombination)> {
    if p.len() as u64 != m {
        return Err(StructuredError::InvalidSpec(format!(
            "permutation length {} does not match m = {m}",
            p.len()
        )));
    }
    if !p.is_single_cycle() {
        return Err(StructuredError::NotSingleCycle);
    }
    let u_pi = relabeling_circuit(p)?;
    let circ = circulant(n, m, weight, CirculantVariant::Recursive)?;
    let hermitian = LinearCombination::new(
        circ.terms
            .into_iter()
            .map(|term| LcTerm::conjugated(term.string, u_pi.clone()))
            .collect(),
    );
    Ok((u_pi, hermitian))
}

/// The relabeling permutation: the node visited at step i+1 of the
/// cycle maps to |bin i|.
pub fn relabeling_spec(p: &PermutationSpec) -> Result<PermutationSpec> {
    if !p.is_single_cycle() {
        return Err(StructuredError::NotSingleCycle);
    }
    let m = p.len();
    let mut pi = vec![0usize; m];
    let mut node = 0usize;
    for step in 0..m {
        node = p.apply(node);
        pi[node] = step;
    }
    PermutationSpec::new(pi)
}

/// State-swap circuit of the relabeling permutation.
pub fn relabeling_circuit(p: &PermutationSpec) -> Result<Circuit> {
    permutation_by_swaps(&relabeling_spec(p)?)
}

/// Permutation from an explicit table on register A, computed through
/// an equal-size ancilla register B: XOR pi(x) into B, swap the
/// registers, XOR the inverse image back out. B starts and ends at
/// |0...0>.
pub fn permutation_from_table(spec: &PermutationSpec) -> Result<Circuit> {
    let m = spec.len();
    if !m.is_power_of_two() || m < 2 {
        return Err(StructuredError::InvalidSpec(format!(
            "permutation length {m} must be a power of two >= 2"
        )));
    }
    let qubits = m.trailing_zeros() as usize;
    let mut circuit = Circuit::new(2 * qubits);
    circuit.label_register("a", 0, qubits);
    circuit.label_register("b", qubits, 2 * qubits);

    let bit = |x: usize, q: usize| (x >> (qubits - 1 - q)) & 1;
    let push_xor = |circuit: &mut Circuit, source: &dyn Fn(usize) -> usize| {
        for x in 0..m {
            let image = source(x);
            if image == 0 {
                continue;
            }
            let controls: Vec<Control> = (0..qubits)
                .map(|q| {
                    if bit(x, q) == 1 {
                        Control::positive(q)
                    } else {
                        Control::negative(q)
                    }
                })
                .collect();
            for q in 0..qubits {
                if bit(image, q) == 1 {
                    circuit.push(Gate::controlled(GateKind::X, qubits + q, controls.clone()));
                }
            }
        }
    };

    push_xor(&mut circuit, &|x| spec.apply(x));
    for q in 0..qubits {
        circuit.push(Gate::swap(q, qubits + q));
    }
    let inverse = spec.inverse();
    push_xor(&mut circuit, &|x| inverse.apply(x));
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densemath::max_abs_diff;
    use crate::tolerances::TOL_UNITARY;

    #[test]
    fn cycles_and_counts() {
        let p = PermutationSpec::new(vec![3, 1, 0, 2]).unwrap();
        assert_eq!(p.cycles().len(), 2);
        assert_eq!(p.transposition_count(), 2);
        assert!(!p.is_single_cycle());

        let single = PermutationSpec::new(vec![2, 3, 1, 0]).unwrap();
        assert!(single.is_single_cycle());

        assert!(matches!(
            PermutationSpec::new(vec![0, 0, 1]),
            Err(StructuredError::NotBijective)
        ));
    }

    #[test]
    fn transposition_swaps_exactly_two_states() {
        for (a, b) in [(0usize, 3usize), (1, 6), (2, 5), (4, 7)] {
            let circuit = transposition_circuit(3, a, b);
            let u = circuit.lower().unwrap();
            for i in 0..8 {
                let expect = if i == a {
                    b
                } else if i == b {
                    a
                } else {
                    i
                };
                assert!(
                    (u[(expect, i)].re - 1.0).abs() < 1e-12,
                    "T({a},{b}) moves {i}"
                );
            }
        }
    }

    #[test]
    fn swap_product_realizes_any_permutation() {
        let tables: [Vec<usize>; 3] = [
            vec![1, 2, 3, 0],
            vec![3, 1, 0, 2],
            vec![4, 0, 6, 2, 1, 7, 3, 5],
        ];
        for table in tables {
            let spec = PermutationSpec::new(table).unwrap();
            let circuit = permutation_by_swaps(&spec).unwrap();
            let got = circuit.lower().unwrap();
            assert!(max_abs_diff(&got, &spec.matrix()).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn identity_permutation_is_empty_circuit() {
        let spec = PermutationSpec::new(vec![0, 1, 2, 3]).unwrap();
        let circuit = permutation_by_swaps(&spec).unwrap();
        assert_eq!(circuit.gate_len(), 0);
    }

    #[test]
    fn table_construction_fixes_ancillas() {
        let tables: [Vec<usize>; 3] = [
            vec![1, 2, 3, 0],           // modular +1
            vec![0, 2, 1, 3],           // swap middle
            vec![0, 4, 2, 6, 1, 5, 3, 7], // bit reversal on 3 qubits
        ];
        for table in tables {
            let m = table.len();
            let qubits = m.trailing_zeros() as usize;
            let spec = PermutationSpec::new(table).unwrap();
            let circuit = permutation_from_table(&spec).unwrap();
            let u = circuit.lower().unwrap();
            // Block with B = |0> in and out must be the permutation; B
            // must come back to zero on every basis input.
            for i in 0..m {
                for j in 0..m {
                    let entry = u[(i * m, j * m)];
                    let expected = if spec.apply(j) == i { 1.0 } else { 0.0 };
                    assert!(
                        (entry.re - expected).abs() < TOL_UNITARY && entry.im.abs() < TOL_UNITARY,
                        "{qubits}-qubit table block ({i},{j})"
                    );
                }
                // rows with B != 0 are unreachable from B = 0 inputs
                for b in 1..m {
                    for j in 0..m {
                        assert!(u[(i * m + b, j * m)].norm() < TOL_UNITARY);
                    }
                }
            }
        }
    }

    #[test]
    fn table_matching_adder() {
        // table = modular +n equals the adder permutation on the A block.
        let n = 3usize;
        let m = 8usize;
        let table: Vec<usize> = (0..m).map(|i| (i + n) % m).collect();
        let spec = PermutationSpec::new(table).unwrap();
        let circuit = permutation_from_table(&spec).unwrap();
        let u = circuit.lower().unwrap();
        let adder = crate::synth::adder_permutation(n as u64, m as u64);
        for i in 0..m {
            for j in 0..m {
                assert!((u[(i * m, j * m)] - adder[(i, j)]).norm() < TOL_UNITARY);
            }
        }
    }

    #[test]
    fn relabeling_identity_for_plain_rotation() {
        // The +1 rotation visits nodes in numerical order, so the
        // relabeling is the shift sending node k+1 to index k.
        let p = PermutationSpec::new(vec![1, 2, 3, 0]).unwrap();
        let pi = relabeling_spec(&p).unwrap();
        assert_eq!(pi.table(), &[3, 0, 1, 2]);
    }

    #[test]
    fn circular_permutation_rejects_broken_cycles() {
        let not_cycle = PermutationSpec::new(vec![3, 1, 0, 2]).unwrap();
        assert!(matches!(
            circular_permutation(&not_cycle, 1, 4, Complex64::new(1.0, 0.0)),
            Err(StructuredError::NotSingleCycle)
        ));
    }
}
