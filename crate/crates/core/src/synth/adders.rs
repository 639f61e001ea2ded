//! The modular adder family: Fourier-basis adders, arithmetic
//! (multi-controlled-X ladder) adders, and the sign-modified adder
//! whose wrap-around entries come with a minus sign.

use super::{Result, SynthError};
use crate::circuit::{Circuit, Control, Gate, GateKind, MacroGate, MacroKind};
use crate::densemath::ComplexMatrix;
use num_complex::Complex64;

fn check_range(n: u64, m: u64) -> Result<usize> {
    if !m.is_power_of_two() || m < 2 {
        return Err(SynthError::OutOfRange(n, m));
    }
    if n >= m {
        return Err(SynthError::OutOfRange(n, m));
    }
    Ok(m.trailing_zeros() as usize)
}

/// Dense permutation |i> -> |(i+n) mod m>; the oracle target for both
/// adder constructions.
pub fn adder_permutation(n: u64, m: u64) -> ComplexMatrix {
    let dim = m as usize;
    let mut p = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        p[((i + n as usize) % dim, i)] = Complex64::new(1.0, 0.0);
    }
    p
}

/// Fourier-basis modular adder: QFT, one phase gate per qubit, inverse
/// QFT.
pub fn adder_qft(n: u64, m: u64) -> Result<Circuit> {
    let qubits = check_range(n, m)?;
    let mut circuit = Circuit::new(qubits);
    circuit.push_macro(MacroGate {
        kind: MacroKind::AdderQft { n, m },
        qubits: (0..qubits).collect(),
    });
    Ok(circuit)
}

/// Arithmetic modular adder: one multi-controlled-X increment ladder
/// per set bit of n.
pub fn adder_ladder(n: u64, m: u64) -> Result<Circuit> {
    let qubits = check_range(n, m)?;
    let mut circuit = Circuit::new(qubits);
    circuit.push_macro(MacroGate {
        kind: MacroKind::AdderLadder { n, m },
        qubits: (0..qubits).collect(),
    });
    Ok(circuit)
}

/// Modified adder: the plain adder permutation with the wrap-around
/// entries negated. Built per power of two as the adder times a
/// multi-controlled sign on the wrapping input block.
pub fn zadd(n: u64, m: u64) -> Result<Circuit> {
    let qubits = check_range(n, m)?;
    let mut circuit = Circuit::new(qubits);
    for exp in 0..qubits {
        if n & (1u64 << exp) == 0 {
            continue;
        }
        // -1 on inputs i >= m - 2^exp: top (qubits - exp) bits all one.
        let cond: Vec<usize> = (0..qubits - exp).collect();
        let (&target, controls_q) = cond.split_last().expect("nonempty condition");
        let controls: Vec<Control> = controls_q.iter().map(|&q| Control::positive(q)).collect();
        circuit.push(Gate::controlled(GateKind::Z, target, controls));
        // then the plain increment by 2^exp
        circuit.push_macro(MacroGate {
            kind: MacroKind::AdderLadder { n: 1u64 << exp, m },
            qubits: (0..qubits).collect(),
        });
    }
    Ok(circuit)
}

/// Dense target of the modified adder: adder permutation with negated
/// wrap entries.
pub fn zadd_permutation(n: u64, m: u64) -> ComplexMatrix {
    let dim = m as usize;
    let nn = n as usize;
    let mut p = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        let value = if i + nn >= dim { -1.0 } else { 1.0 };
        p[((i + nn) % dim, i)] = Complex64::new(value, 0.0);
    }
    p
}
