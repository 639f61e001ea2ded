//! Gate-level circuit IR with macro expansion, dense lowering, and
//! resource counting.
//!
//! The first operation in `ops` acts first on the state, i.e. it is the
//! rightmost factor of the lowered operator product. Controls may be
//! positive (condition on |1>) or negative (condition on |0>) and any
//! number of them is allowed on any gate; multi-controlled gates are
//! lowered directly as block matrices rather than decomposed.

mod text;

pub use text::{export_text, parse_text, ParseError};

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::densemath::ComplexMatrix;
use crate::tolerances::{MAX_LOWER_QUBITS, TOL_ANGLE};

#[derive(Debug, Error, PartialEq)]
pub enum CircuitError {
    #[error("cannot lower {0} qubits densely (limit {MAX_LOWER_QUBITS})")]
    TooManyQubits(usize),
}

pub type Result<T> = std::result::Result<T, CircuitError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarity {
    Positive,
    Negative,
}

/// A control wire: the gate fires when the qubit reads |1> (positive)
/// or |0> (negative).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Control {
    pub qubit: usize,
    pub polarity: Polarity,
}

impl Control {
    pub fn positive(qubit: usize) -> Self {
        Self {
            qubit,
            polarity: Polarity::Positive,
        }
    }

    pub fn negative(qubit: usize) -> Self {
        Self {
            qubit,
            polarity: Polarity::Negative,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    S,
    /// diag(1, e^{i theta})
    P(f64),
    /// exp(-i theta Y / 2)
    Ry(f64),
    /// diag(e^{i theta/2}, e^{-i theta/2})
    Rz(f64),
    Swap,
    /// e^{i theta} on the whole (controlled) subspace; the target qubit
    /// only anchors the gate to a wire.
    GlobalPhase(f64),
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::P(_) => "p",
            GateKind::Ry(_) => "ry",
            GateKind::Rz(_) => "rz",
            GateKind::Swap => "swap",
            GateKind::GlobalPhase(_) => "gphase",
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match self {
            GateKind::P(t) | GateKind::Ry(t) | GateKind::Rz(t) | GateKind::GlobalPhase(t) => {
                Some(*t)
            }
            _ => None,
        }
    }

    /// Inverse gate. S has no dedicated adjoint in the gate set, so it
    /// daggers to P(-pi/2).
    pub fn dagger(&self) -> GateKind {
        match *self {
            GateKind::S => GateKind::P(-std::f64::consts::FRAC_PI_2),
            GateKind::P(t) => GateKind::P(-t),
            GateKind::Ry(t) => GateKind::Ry(-t),
            GateKind::Rz(t) => GateKind::Rz(-t),
            GateKind::GlobalPhase(t) => GateKind::GlobalPhase(-t),
            selfinverse => selfinverse,
        }
    }

    /// 2x2 matrix for single-target kinds; `None` for Swap/GlobalPhase.
    pub fn matrix2(&self) -> Option<[Complex64; 4]> {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Some(match *self {
            GateKind::X => [c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)],
            GateKind::Y => [c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)],
            GateKind::Z => [c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)],
            GateKind::H => [c(s, 0.), c(s, 0.), c(s, 0.), c(-s, 0.)],
            GateKind::S => [c(1., 0.), c(0., 0.), c(0., 0.), c(0., 1.)],
            GateKind::P(t) => [
                c(1., 0.),
                c(0., 0.),
                c(0., 0.),
                Complex64::from_polar(1., t),
            ],
            GateKind::Ry(t) => {
                let (sin, cos) = (t / 2.0).sin_cos();
                [c(cos, 0.), c(-sin, 0.), c(sin, 0.), c(cos, 0.)]
            }
            GateKind::Rz(t) => [
                Complex64::from_polar(1., t / 2.0),
                c(0., 0.),
                c(0., 0.),
                Complex64::from_polar(1., -t / 2.0),
            ],
            GateKind::Swap | GateKind::GlobalPhase(_) => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub controls: Vec<Control>,
}

impl Gate {
    pub fn new(kind: GateKind, targets: Vec<usize>, controls: Vec<Control>) -> Self {
        let expected = if matches!(kind, GateKind::Swap) { 2 } else { 1 };
        assert_eq!(targets.len(), expected, "{} takes {expected} target(s)", kind.name());
        for c in &controls {
            assert!(
                !targets.contains(&c.qubit),
                "control and target wires must be disjoint"
            );
        }
        Self {
            kind,
            targets,
            controls,
        }
    }

    pub fn single(kind: GateKind, target: usize) -> Self {
        Self::new(kind, vec![target], vec![])
    }

    pub fn controlled(kind: GateKind, target: usize, controls: Vec<Control>) -> Self {
        Self::new(kind, vec![target], controls)
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Self::new(GateKind::Swap, vec![a, b], vec![])
    }

    /// Controls evaluated on a basis-state index (qubit 0 = MSB).
    fn controls_satisfied(&self, index: usize, num_qubits: usize) -> bool {
        self.controls.iter().all(|c| {
            let bit = (index >> (num_qubits - 1 - c.qubit)) & 1;
            match c.polarity {
                Polarity::Positive => bit == 1,
                Polarity::Negative => bit == 0,
            }
        })
    }

    pub fn dagger(&self) -> Gate {
        Gate {
            kind: self.kind.dagger(),
            targets: self.targets.clone(),
            controls: self.controls.clone(),
        }
    }
}

/// Composite operations that expand to gate sequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MacroKind {
    /// Discrete Fourier transform on the listed qubits (first is the
    /// most significant).
    Qft,
    InverseQft,
    /// Modular adder |i> -> |(i+n) mod m> via Fourier-basis phases.
    AdderQft { n: u64, m: u64 },
    /// Modular adder via multi-controlled-X increment ladders.
    AdderLadder { n: u64, m: u64 },
    /// Prepares the given nonnegative amplitudes from |0...0> through a
    /// binary tree of controlled Y rotations.
    StatePrep(Vec<f64>),
}

impl MacroKind {
    pub fn name(&self) -> &'static str {
        match self {
            MacroKind::Qft => "qft",
            MacroKind::InverseQft => "iqft",
            MacroKind::AdderQft { .. } => "adder_qft",
            MacroKind::AdderLadder { .. } => "adder_ladder",
            MacroKind::StatePrep(_) => "state_prep",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacroGate {
    pub kind: MacroKind,
    /// Register slice the macro acts on, most significant first.
    pub qubits: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Op {
    Gate(Gate),
    Macro(MacroGate),
}

/// An ordered gate list over an explicit register layout.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Circuit {
    pub num_qubits: usize,
    pub ops: Vec<Op>,
    /// Named register ranges, `name -> (start, end_exclusive)`.
    pub registers: BTreeMap<String, (usize, usize)>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            ops: Vec::new(),
            registers: BTreeMap::new(),
        }
    }

    pub fn label_register(&mut self, name: &str, start: usize, end: usize) {
        assert!(start <= end && end <= self.num_qubits);
        self.registers.insert(name.to_string(), (start, end));
    }

    pub fn push(&mut self, gate: Gate) {
        debug_assert!(self.wires_in_range(&gate));
        self.ops.push(Op::Gate(gate));
    }

    pub fn push_macro(&mut self, mac: MacroGate) {
        debug_assert!(mac.qubits.iter().all(|&q| q < self.num_qubits));
        self.ops.push(Op::Macro(mac));
    }

    pub fn extend(&mut self, other: &Circuit) {
        assert_eq!(self.num_qubits, other.num_qubits);
        self.ops.extend(other.ops.iter().cloned());
    }

    fn wires_in_range(&self, gate: &Gate) -> bool {
        gate.targets.iter().all(|&q| q < self.num_qubits)
            && gate.controls.iter().all(|c| c.qubit < self.num_qubits)
    }

    pub fn gate_len(&self) -> usize {
        self.ops.len()
    }

    pub fn has_macros(&self) -> bool {
        self.ops.iter().any(|op| matches!(op, Op::Macro(_)))
    }

    /// Expands macros one level; nested macros (a QFT inside an adder)
    /// survive for the next round.
    pub fn expand_step(&self) -> Circuit {
        let mut out = Circuit {
            num_qubits: self.num_qubits,
            ops: Vec::new(),
            registers: self.registers.clone(),
        };
        for op in &self.ops {
            match op {
                Op::Gate(g) => out.ops.push(Op::Gate(g.clone())),
                Op::Macro(m) => expand_macro(m, &mut out),
            }
        }
        out
    }

    /// Fully macro-free circuit with identical lowering.
    pub fn expand_macros(&self) -> Circuit {
        let mut c = self.clone();
        while c.has_macros() {
            c = c.expand_step();
        }
        c
    }

    /// Reversed circuit of daggered gates.
    pub fn dagger(&self) -> Circuit {
        let mut out = Circuit {
            num_qubits: self.num_qubits,
            ops: Vec::new(),
            registers: self.registers.clone(),
        };
        for op in self.ops.iter().rev() {
            match op {
                Op::Gate(g) => out.ops.push(Op::Gate(g.dagger())),
                Op::Macro(m) => {
                    let kind = match &m.kind {
                        MacroKind::Qft => MacroKind::InverseQft,
                        MacroKind::InverseQft => MacroKind::Qft,
                        MacroKind::AdderQft { n, m: modulus } => MacroKind::AdderQft {
                            n: (modulus - n) % modulus,
                            m: *modulus,
                        },
                        MacroKind::AdderLadder { n, m: modulus } => MacroKind::AdderLadder {
                            n: (modulus - n) % modulus,
                            m: *modulus,
                        },
                        MacroKind::StatePrep(_) => {
                            // No closed-form inverse macro: expand first.
                            let mut sub = Circuit::new(self.num_qubits);
                            expand_macro(m, &mut sub);
                            for sub_op in sub.dagger().ops {
                                out.ops.push(sub_op);
                            }
                            continue;
                        }
                    };
                    out.ops.push(Op::Macro(MacroGate {
                        kind,
                        qubits: m.qubits.clone(),
                    }));
                }
            }
        }
        out
    }

    /// The same circuit re-addressed into a wider register with all
    /// wires shifted by `offset`.
    pub fn embedded(&self, num_qubits: usize, offset: usize) -> Circuit {
        assert!(offset + self.num_qubits <= num_qubits);
        let mut out = Circuit::new(num_qubits);
        for op in &self.ops {
            match op {
                Op::Gate(g) => out.push(Gate {
                    kind: g.kind,
                    targets: g.targets.iter().map(|&q| q + offset).collect(),
                    controls: g
                        .controls
                        .iter()
                        .map(|c| Control {
                            qubit: c.qubit + offset,
                            polarity: c.polarity,
                        })
                        .collect(),
                }),
                Op::Macro(m) => {
                    let mut m = m.clone();
                    m.qubits.iter_mut().for_each(|q| *q += offset);
                    out.push_macro(m);
                }
            }
        }
        out
    }

    /// Entrywise complex conjugate of the lowered unitary, as a circuit.
    pub fn conjugated(&self) -> Circuit {
        let mut out = Circuit::new(self.num_qubits);
        out.registers = self.registers.clone();
        for op in &self.expand_macros().ops {
            let Op::Gate(g) = op else { unreachable!() };
            match g.kind {
                // Real gates are their own conjugates.
                GateKind::X | GateKind::Z | GateKind::H | GateKind::Swap => out.push(g.clone()),
                GateKind::Ry(_) => out.push(g.clone()),
                GateKind::S => out.push(Gate {
                    kind: GateKind::P(-std::f64::consts::FRAC_PI_2),
                    targets: g.targets.clone(),
                    controls: g.controls.clone(),
                }),
                GateKind::P(t) => out.push(Gate {
                    kind: GateKind::P(-t),
                    targets: g.targets.clone(),
                    controls: g.controls.clone(),
                }),
                GateKind::Rz(t) => out.push(Gate {
                    kind: GateKind::Rz(-t),
                    targets: g.targets.clone(),
                    controls: g.controls.clone(),
                }),
                GateKind::GlobalPhase(t) => out.push(Gate {
                    kind: GateKind::GlobalPhase(-t),
                    targets: g.targets.clone(),
                    controls: g.controls.clone(),
                }),
                // conj(Y) = -Y
                GateKind::Y => {
                    out.push(g.clone());
                    out.push(Gate {
                        kind: GateKind::GlobalPhase(std::f64::consts::PI),
                        targets: g.targets.clone(),
                        controls: g.controls.clone(),
                    });
                }
            }
        }
        out
    }

    /// Dense unitary of the whole circuit.
    pub fn lower(&self) -> Result<ComplexMatrix> {
        if self.num_qubits > MAX_LOWER_QUBITS {
            return Err(CircuitError::TooManyQubits(self.num_qubits));
        }
        let flat = self.expand_macros();
        let dim = 1usize << self.num_qubits;
        let mut u = ComplexMatrix::identity(dim);
        for op in &flat.ops {
            let Op::Gate(gate) = op else { unreachable!() };
            apply_gate_left(&mut u, gate, self.num_qubits);
        }
        Ok(u)
    }

    /// Applies the circuit to a state vector directly, without forming
    /// the dense unitary; linear in the state dimension per gate, so it
    /// scales past the dense-lowering budget.
    pub fn apply(
        &self,
        state: &crate::densemath::StateVector,
    ) -> Result<crate::densemath::StateVector> {
        assert_eq!(state.dim(), 1usize << self.num_qubits, "state dimension");
        let flat = self.expand_macros();
        let mut amps = state.amplitudes().to_vec();
        for op in &flat.ops {
            let Op::Gate(gate) = op else { unreachable!() };
            apply_gate_state(&mut amps, gate, self.num_qubits);
        }
        Ok(crate::densemath::StateVector::from_amplitudes(amps))
    }
}

/// amps <- G amps for one gate.
fn apply_gate_state(amps: &mut [Complex64], gate: &Gate, num_qubits: usize) {
    let dim = amps.len();
    match gate.kind {
        GateKind::Swap => {
            let (a, b) = (gate.targets[0], gate.targets[1]);
            let mask_a = 1usize << (num_qubits - 1 - a);
            let mask_b = 1usize << (num_qubits - 1 - b);
            for idx in 0..dim {
                if idx & mask_a != 0 && idx & mask_b == 0 && gate.controls_satisfied(idx, num_qubits)
                {
                    let partner = (idx & !mask_a) | mask_b;
                    amps.swap(idx, partner);
                }
            }
        }
        GateKind::GlobalPhase(theta) => {
            let phase = Complex64::from_polar(1.0, theta);
            for (idx, amp) in amps.iter_mut().enumerate() {
                if gate.controls_satisfied(idx, num_qubits) {
                    *amp *= phase;
                }
            }
        }
        _ => {
            let g = gate.kind.matrix2().expect("single-target kind");
            let t = gate.targets[0];
            let mask = 1usize << (num_qubits - 1 - t);
            for idx in 0..dim {
                if idx & mask == 0 && gate.controls_satisfied(idx, num_qubits) {
                    let hi = idx | mask;
                    let x0 = amps[idx];
                    let x1 = amps[hi];
                    amps[idx] = g[0] * x0 + g[1] * x1;
                    amps[hi] = g[2] * x0 + g[3] * x1;
                }
            }
        }
    }
}

/// u <- G u where G is the lowered gate.
fn apply_gate_left(u: &mut ComplexMatrix, gate: &Gate, num_qubits: usize) {
    let dim = u.rows();
    match gate.kind {
        GateKind::Swap => {
            let (a, b) = (gate.targets[0], gate.targets[1]);
            let mask_a = 1usize << (num_qubits - 1 - a);
            let mask_b = 1usize << (num_qubits - 1 - b);
            for row in 0..dim {
                // Visit each row pair once: a-bit set, b-bit clear.
                if row & mask_a != 0 && row & mask_b == 0 {
                    let partner = (row & !mask_a) | mask_b;
                    if gate.controls_satisfied(row, num_qubits) {
                        for col in 0..dim {
                            let tmp = u[(row, col)];
                            u[(row, col)] = u[(partner, col)];
                            u[(partner, col)] = tmp;
                        }
                    }
                }
            }
        }
        GateKind::GlobalPhase(theta) => {
            let phase = Complex64::from_polar(1.0, theta);
            for row in 0..dim {
                if gate.controls_satisfied(row, num_qubits) {
                    for col in 0..dim {
                        u[(row, col)] *= phase;
                    }
                }
            }
        }
        _ => {
            let g = gate.kind.matrix2().expect("single-target kind");
            let t = gate.targets[0];
            let mask = 1usize << (num_qubits - 1 - t);
            for row in 0..dim {
                if row & mask == 0 {
                    let r1 = row | mask;
                    if gate.controls_satisfied(row, num_qubits) {
                        for col in 0..dim {
                            let x0 = u[(row, col)];
                            let x1 = u[(r1, col)];
                            u[(row, col)] = g[0] * x0 + g[1] * x1;
                            u[(r1, col)] = g[2] * x0 + g[3] * x1;
                        }
                    }
                }
            }
        }
    }
}

fn expand_macro(mac: &MacroGate, out: &mut Circuit) {
    match &mac.kind {
        MacroKind::Qft => expand_qft(&mac.qubits, out),
        MacroKind::InverseQft => {
            let mut sub = Circuit::new(out.num_qubits);
            expand_qft(&mac.qubits, &mut sub);
            for op in sub.dagger().ops {
                out.ops.push(op);
            }
        }
        MacroKind::AdderQft { n, m } => expand_adder_qft(*n, *m, &mac.qubits, out),
        MacroKind::AdderLadder { n, m } => expand_adder_ladder(*n, *m, &mac.qubits, out),
        MacroKind::StatePrep(amplitudes) => expand_state_prep(amplitudes, &mac.qubits, out),
    }
}

/// Textbook QFT: Hadamard plus controlled-phase ladder, then a swap
/// network to undo the bit reversal. Matches the DFT matrix
/// (1/sqrt(m)) [omega^{jk}] with omega = e^{2 pi i/m}.
fn expand_qft(qubits: &[usize], out: &mut Circuit) {
    let k = qubits.len();
    for (i, &q) in qubits.iter().enumerate() {
        out.ops.push(Op::Gate(Gate::single(GateKind::H, q)));
        for (j, &ctrl) in qubits.iter().enumerate().skip(i + 1) {
            let theta = std::f64::consts::PI / (1u64 << (j - i)) as f64;
            out.ops.push(Op::Gate(Gate::controlled(
                GateKind::P(theta),
                q,
                vec![Control::positive(ctrl)],
            )));
        }
    }
    for i in 0..k / 2 {
        out.ops
            .push(Op::Gate(Gate::swap(qubits[i], qubits[k - 1 - i])));
    }
}

/// QFT-basis adder: QFT, one phase gate per qubit, inverse QFT.
fn expand_adder_qft(n: u64, m: u64, qubits: &[usize], out: &mut Circuit) {
    let big_m = qubits.len();
    assert_eq!(1u64 << big_m, m, "register size must match the modulus");
    out.ops.push(Op::Macro(MacroGate {
        kind: MacroKind::Qft,
        qubits: qubits.to_vec(),
    }));
    for (b, &q) in qubits.iter().enumerate() {
        let weight = 1u64 << (big_m - 1 - b);
        let theta = 2.0 * std::f64::consts::PI * (n as f64) * (weight as f64) / (m as f64);
        let theta = theta.rem_euclid(2.0 * std::f64::consts::PI);
        out.ops.push(Op::Gate(Gate::single(GateKind::P(theta), q)));
    }
    out.ops.push(Op::Macro(MacroGate {
        kind: MacroKind::InverseQft,
        qubits: qubits.to_vec(),
    }));
}

/// Arithmetic adder: one multi-controlled-X increment ladder per set
/// bit of n, composed by additivity of modular addition.
fn expand_adder_ladder(n: u64, m: u64, qubits: &[usize], out: &mut Circuit) {
    let big_m = qubits.len();
    assert_eq!(1u64 << big_m, m, "register size must match the modulus");
    let n = n % m;
    // Low bits first; the ladders commute, any order works.
    for exp in 0..big_m {
        if n & (1u64 << exp) == 0 {
            continue;
        }
        // Increment by 2^exp acts on the top (big_m - exp) qubits.
        let len = big_m - exp;
        for t in 0..len {
            let controls: Vec<Control> = ((t + 1)..len)
                .map(|ctl| Control::positive(qubits[ctl]))
                .collect();
            out.ops.push(Op::Gate(Gate {
                kind: GateKind::X,
                targets: vec![qubits[t]],
                controls,
            }));
        }
    }
}

/// Binary tree of branch-controlled Y rotations realizing the
/// magnitude profile of `amplitudes` from |0...0>.
fn expand_state_prep(amplitudes: &[f64], qubits: &[usize], out: &mut Circuit) {
    let levels = qubits.len();
    assert_eq!(amplitudes.len(), 1 << levels, "amplitude count must be 2^k");
    let total: f64 = amplitudes.iter().map(|a| a * a).sum();
    if total == 0.0 {
        return;
    }
    for level in 0..levels {
        let branch_width = 1usize << (levels - level);
        for prefix in 0..(1usize << level) {
            let lo = prefix * branch_width;
            let mid = lo + branch_width / 2;
            let hi = lo + branch_width;
            let w0: f64 = amplitudes[lo..mid].iter().map(|a| a * a).sum();
            let w1: f64 = amplitudes[mid..hi].iter().map(|a| a * a).sum();
            if w0 + w1 == 0.0 || w1 == 0.0 {
                continue;
            }
            let theta = 2.0 * w1.sqrt().atan2(w0.sqrt());
            let controls: Vec<Control> = (0..level)
                .map(|b| {
                    let bit = (prefix >> (level - 1 - b)) & 1;
                    if bit == 1 {
                        Control::positive(qubits[b])
                    } else {
                        Control::negative(qubits[b])
                    }
                })
                .collect();
            out.ops.push(Op::Gate(Gate {
                kind: GateKind::Ry(theta),
                targets: vec![qubits[level]],
                controls,
            }));
        }
    }
}

/// Gate histogram and rotation statistics.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResourceReport {
    /// Count per operation name; macros count under their own name.
    pub gate_counts: BTreeMap<String, usize>,
    /// P/RY/RZ gates whose angle is not a multiple of pi/2.
    pub arbitrary_rotations: usize,
    /// Histogram of control-set sizes for controlled gates.
    pub control_widths: BTreeMap<usize, usize>,
}

impl ResourceReport {
    pub fn total_gates(&self) -> usize {
        self.gate_counts.values().sum()
    }

    pub fn count(&self, name: &str) -> usize {
        self.gate_counts.get(name).copied().unwrap_or(0)
    }
}

/// Counts the circuit as given; expand first for gate-level totals.
pub fn count_resources(circuit: &Circuit) -> ResourceReport {
    let mut report = ResourceReport::default();
    for op in &circuit.ops {
        match op {
            Op::Gate(g) => {
                *report
                    .gate_counts
                    .entry(g.kind.name().to_string())
                    .or_insert(0) += 1;
                if let Some(theta) = g.kind.angle() {
                    if !matches!(g.kind, GateKind::GlobalPhase(_)) && !is_clifford_angle(theta) {
                        report.arbitrary_rotations += 1;
                    }
                }
                if !g.controls.is_empty() {
                    *report.control_widths.entry(g.controls.len()).or_insert(0) += 1;
                }
            }
            Op::Macro(m) => {
                *report
                    .gate_counts
                    .entry(m.kind.name().to_string())
                    .or_insert(0) += 1;
            }
        }
    }
    report
}

fn is_clifford_angle(theta: f64) -> bool {
    let q = theta / std::f64::consts::FRAC_PI_2;
    (q - q.round()).abs() <= TOL_ANGLE
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densemath::{kron, max_abs_diff, ComplexMatrix, StateVector};
    use crate::tolerances::TOL_UNITARY;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn empty_circuit_lowers_to_identity() {
        let c = Circuit::new(3);
        assert_eq!(c.lower().unwrap(), ComplexMatrix::identity(8));
    }

    #[test]
    fn hadamard_matrix() {
        let mut circ = Circuit::new(1);
        circ.push(Gate::single(GateKind::H, 0));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let expected = ComplexMatrix::from_real(2, 2, &[s, s, s, -s]);
        assert!(max_abs_diff(&circ.lower().unwrap(), &expected).unwrap() < 1e-15);
    }

    #[test]
    fn cx_permutation_big_endian() {
        // Control on qubit 0 (MSB): ones at (0,0),(1,1),(2,3),(3,2).
        let mut circ = Circuit::new(2);
        circ.push(Gate::controlled(
            GateKind::X,
            1,
            vec![Control::positive(0)],
        ));
        let got = circ.lower().unwrap();
        let expected = ComplexMatrix::from_real(
            4,
            4,
            &[
                1.0, 0.0, 0.0, 0.0, //
                0.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 1.0, //
                0.0, 0.0, 1.0, 0.0,
            ],
        );
        assert_eq!(got, expected);
    }

    #[test]
    fn rotation_conventions() {
        // RZ(2t) = diag(e^{it}, e^{-it}); RY(pi/4) Z RY(pi/4)^dag = H.
        let t = 0.7;
        let mut rz = Circuit::new(1);
        rz.push(Gate::single(GateKind::Rz(2.0 * t), 0));
        let u = rz.lower().unwrap();
        assert!((u[(0, 0)] - Complex64::from_polar(1.0, t)).norm() < 1e-15);
        assert!((u[(1, 1)] - Complex64::from_polar(1.0, -t)).norm() < 1e-15);

        let theta = std::f64::consts::FRAC_PI_4;
        let mut conj = Circuit::new(1);
        conj.push(Gate::single(GateKind::Ry(-theta), 0)); // RY(theta)^dag acts first
        conj.push(Gate::single(GateKind::Z, 0));
        conj.push(Gate::single(GateKind::Ry(theta), 0));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = ComplexMatrix::from_real(2, 2, &[s, s, s, -s]);
        assert!(max_abs_diff(&conj.lower().unwrap(), &h).unwrap() < 1e-12);
    }

    #[test]
    fn qft_two_qubits_is_dft_with_omega_i() {
        let mut circ = Circuit::new(2);
        circ.push_macro(MacroGate {
            kind: MacroKind::Qft,
            qubits: vec![0, 1],
        });
        let got = circ.lower().unwrap();
        let mut expected = ComplexMatrix::zeros(4, 4);
        for j in 0..4 {
            for k in 0..4 {
                expected[(j, k)] =
                    Complex64::from_polar(0.5, 2.0 * std::f64::consts::PI * (j * k) as f64 / 4.0);
            }
        }
        assert!(max_abs_diff(&got, &expected).unwrap() < 1e-12);
    }

    #[test]
    fn qft_matches_dft_up_to_six_qubits_and_is_unitary() {
        for k in 1..=6usize {
            let dim = 1 << k;
            let mut circ = Circuit::new(k);
            circ.push_macro(MacroGate {
                kind: MacroKind::Qft,
                qubits: (0..k).collect(),
            });
            let got = circ.lower().unwrap();
            let mut expected = ComplexMatrix::zeros(dim, dim);
            let scale = 1.0 / (dim as f64).sqrt();
            for j in 0..dim {
                for l in 0..dim {
                    expected[(j, l)] = Complex64::from_polar(
                        scale,
                        2.0 * std::f64::consts::PI * ((j * l) % dim) as f64 / dim as f64,
                    );
                }
            }
            assert!(
                max_abs_diff(&got, &expected).unwrap() < 1e-10,
                "qft mismatch at {k} qubits"
            );
            // QFT . QFT^dag = I via the macro dagger path
            let mut inv = Circuit::new(k);
            inv.push_macro(MacroGate {
                kind: MacroKind::InverseQft,
                qubits: (0..k).collect(),
            });
            let prod = inv.lower().unwrap().matmul(&got);
            assert!(max_abs_diff(&prod, &ComplexMatrix::identity(dim)).unwrap() < TOL_UNITARY);
        }
    }

    #[test]
    fn qft_single_qubit_is_hadamard() {
        let mut circ = Circuit::new(1);
        circ.push_macro(MacroGate {
            kind: MacroKind::Qft,
            qubits: vec![0],
        });
        let flat = circ.expand_macros();
        assert_eq!(flat.ops.len(), 1);
        assert!(matches!(
            &flat.ops[0],
            Op::Gate(Gate {
                kind: GateKind::H,
                ..
            })
        ));
    }

    #[test]
    fn state_prep_trivial_and_uniform() {
        let mut circ = Circuit::new(2);
        circ.push_macro(MacroGate {
            kind: MacroKind::StatePrep(vec![1.0, 0.0, 0.0, 0.0]),
            qubits: vec![0, 1],
        });
        assert!(circ.expand_macros().ops.is_empty());

        // weights [1, 1]: one RY(pi/2)
        let mut one = Circuit::new(1);
        one.push_macro(MacroGate {
            kind: MacroKind::StatePrep(vec![
                std::f64::consts::FRAC_1_SQRT_2,
                std::f64::consts::FRAC_1_SQRT_2,
            ]),
            qubits: vec![0],
        });
        let flat = one.expand_macros();
        assert_eq!(flat.ops.len(), 1);
        match &flat.ops[0] {
            Op::Gate(g) => match g.kind {
                GateKind::Ry(theta) => {
                    assert!((theta - std::f64::consts::FRAC_PI_2).abs() < 1e-15)
                }
                _ => panic!("expected RY"),
            },
            _ => panic!("expected gate"),
        }
    }

    #[test]
    fn state_prep_reaches_target_amplitudes() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for k in 1..=4usize {
            let dim = 1 << k;
            let raw: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.0..1.0)).collect();
            let norm: f64 = raw.iter().map(|a| a * a).sum::<f64>().sqrt();
            let amps: Vec<f64> = raw.iter().map(|a| a / norm).collect();
            let mut circ = Circuit::new(k);
            circ.push_macro(MacroGate {
                kind: MacroKind::StatePrep(amps.clone()),
                qubits: (0..k).collect(),
            });
            let state = circ.apply(&StateVector::basis_state(dim, 0)).unwrap();
            for (i, amp) in amps.iter().enumerate() {
                assert!((state.amplitudes()[i].re - amp).abs() < 1e-10);
                assert!(state.amplitudes()[i].im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn negative_control_equals_x_conjugated_positive() {
        let mut neg = Circuit::new(2);
        neg.push(Gate::controlled(
            GateKind::Ry(0.3),
            1,
            vec![Control::negative(0)],
        ));
        let mut pos = Circuit::new(2);
        pos.push(Gate::single(GateKind::X, 0));
        pos.push(Gate::controlled(
            GateKind::Ry(0.3),
            1,
            vec![Control::positive(0)],
        ));
        pos.push(Gate::single(GateKind::X, 0));
        assert!(
            max_abs_diff(&neg.lower().unwrap(), &pos.lower().unwrap()).unwrap()
                <= crate::tolerances::TOL_ALGEBRAIC
        );
    }

    #[test]
    fn global_phase_composes_additively() {
        let mut a = Circuit::new(1);
        a.push(Gate::single(GateKind::GlobalPhase(0.4), 0));
        a.push(Gate::single(GateKind::GlobalPhase(0.6), 0));
        let mut b = Circuit::new(1);
        b.push(Gate::single(GateKind::GlobalPhase(1.0), 0));
        assert!(max_abs_diff(&a.lower().unwrap(), &b.lower().unwrap()).unwrap() < 1e-15);
    }

    #[test]
    fn lowering_is_concatenation_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..10 {
            let full = random_circuit(&mut rng, 3, 12);
            let split = rng.gen_range(0..=full.ops.len());
            let mut head = Circuit::new(3);
            head.ops = full.ops[..split].to_vec();
            let mut tail = Circuit::new(3);
            tail.ops = full.ops[split..].to_vec();
            let lhs = full.lower().unwrap();
            let rhs = tail.lower().unwrap().matmul(&head.lower().unwrap());
            assert!(max_abs_diff(&lhs, &rhs).unwrap() < 1e-12);
        }
    }

    #[test]
    fn swap_with_control() {
        // Controlled swap on (1,2) with control 0 = Fredkin.
        let mut circ = Circuit::new(3);
        circ.push(Gate::new(
            GateKind::Swap,
            vec![1, 2],
            vec![Control::positive(0)],
        ));
        let u = circ.lower().unwrap();
        // |101> (5) <-> |110> (6); |001> (1) untouched.
        assert!((u[(6, 5)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((u[(5, 6)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((u[(1, 1)] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn dagger_inverts_lowering() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for _ in 0..10 {
            let circ = random_circuit(&mut rng, 3, 15);
            let u = circ.lower().unwrap();
            let v = circ.dagger().lower().unwrap();
            let prod = u.matmul(&v);
            assert!(max_abs_diff(&prod, &ComplexMatrix::identity(8)).unwrap() < 1e-10);
        }
    }

    #[test]
    fn too_many_qubits_is_rejected() {
        let circ = Circuit::new(11);
        assert_eq!(circ.lower(), Err(CircuitError::TooManyQubits(11)));
    }

    #[test]
    fn resource_counts() {
        let circ = Circuit::new(2);
        assert_eq!(count_resources(&circ).total_gates(), 0);

        let mut circ = Circuit::new(2);
        circ.push(Gate::single(GateKind::Rz(2.0 * 0.37), 0)); // arbitrary
        circ.push(Gate::single(GateKind::Rz(std::f64::consts::PI), 0)); // Clifford
        circ.push(Gate::controlled(
            GateKind::X,
            1,
            vec![Control::positive(0)],
        ));
        let report = count_resources(&circ);
        assert_eq!(report.arbitrary_rotations, 1);
        assert_eq!(report.count("rz"), 2);
        assert_eq!(report.control_widths.get(&1), Some(&1));
    }

    #[test]
    fn adder_qft_shallow_expansion_counts() {
        // One expansion step: exactly M phase gates plus two QFT calls.
        for m_qubits in 2..=5usize {
            let m = 1u64 << m_qubits;
            let mut circ = Circuit::new(m_qubits);
            circ.push_macro(MacroGate {
                kind: MacroKind::AdderQft { n: 3 % m, m },
                qubits: (0..m_qubits).collect(),
            });
            let shallow = circ.expand_step();
            let report = count_resources(&shallow);
            assert_eq!(report.count("p"), m_qubits);
            assert_eq!(report.count("qft") + report.count("iqft"), 2);
        }
    }

    #[test]
    fn kron_consistency_of_lowering() {
        // A gate on qubit 1 of 2 lowers to I (x) G.
        let mut circ = Circuit::new(2);
        circ.push(Gate::single(GateKind::S, 1));
        let expected = kron(
            &ComplexMatrix::identity(2),
            &ComplexMatrix::from_rows(
                2,
                2,
                vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)],
            ),
        );
        assert!(max_abs_diff(&circ.lower().unwrap(), &expected).unwrap() < 1e-15);
    }

    pub(super) fn random_circuit(rng: &mut ChaCha8Rng, num_qubits: usize, len: usize) -> Circuit {
        let mut circ = Circuit::new(num_qubits);
        for _ in 0..len {
            let target = rng.gen_range(0..num_qubits);
            let kind = match rng.gen_range(0..9) {
                0 => GateKind::X,
                1 => GateKind::Y,
                2 => GateKind::Z,
                3 => GateKind::H,
                4 => GateKind::S,
                5 => GateKind::P(rng.gen_range(-3.0..3.0)),
                6 => GateKind::Ry(rng.gen_range(-3.0..3.0)),
                7 => GateKind::Rz(rng.gen_range(-3.0..3.0)),
                _ => GateKind::GlobalPhase(rng.gen_range(-3.0..3.0)),
            };
            let mut controls = Vec::new();
            for q in 0..num_qubits {
                if q != target && rng.gen_bool(0.25) {
                    controls.push(if rng.gen_bool(0.5) {
                        Control::positive(q)
                    } else {
                        Control::negative(q)
                    });
                }
            }
            circ.push(Gate {
                kind,
                targets: vec![target],
                controls,
            });
        }
        circ
    }
}
