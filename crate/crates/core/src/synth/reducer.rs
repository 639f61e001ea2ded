//! Degenerated-states reducers: the basis change that maps the +1/-1
//! eigenspaces of a qubitized Hamiltonian onto one designated qubit
//! (the reduct qubit), with the zero eigenspace flagged on auxiliary
//! qubits.
//!
//! A reducer stores the circuit `basis_change` whose lowering B
//! satisfies `H = B . lambda . B^dagger`, where `lambda` is the
//! diagonal string with Z on the reduct qubit and n/m projectors on the
//! flag qubits. Construction is factorwise: local rotations map X/Y
//! factors to Z, a CX ladder localizes the ladder-operator flip onto
//! the reduct qubit, and a final CX parity merge folds the remaining
//! Z signs into it. Correctness rests on the conjugation invariant,
//! which the tests check against the dense oracle for every string.

use num_complex::Complex64;

use super::{Result, SynthError};
use crate::circuit::{Circuit, Control, Gate, GateKind, Op};
use crate::densemath::ComplexMatrix;
use crate::opalg::{Factor, LcTerm, OperatorString, SpectralClass};

/// Basis change onto the reduct qubit plus zero-space flags.
#[derive(Debug, Clone, PartialEq)]
pub struct Reducer {
    pub num_qubits: usize,
    /// Lowering equals V^dagger: it maps flagged computational states to
    /// the eigenbasis.
    pub basis_change: Circuit,
    /// `basis_change` without the final parity merge; used by the
    /// shallow measurement circuit.
    pub shallow_basis_change: Circuit,
    /// Qubit carrying the +1/-1 distinction; `None` for projectors,
    /// which only have flags.
    pub reduct_qubit: Option<usize>,
    /// Flag qubits with their required value; any other value marks the
    /// zero eigenspace.
    pub perp_flags: Vec<(usize, bool)>,
    /// Qubits whose combined bit parity carries the sign before the
    /// parity merge (shallow view); includes the reduct qubit.
    pub parity_qubits: Vec<usize>,
    /// Qubits whose value is irrelevant (degeneracy carriers).
    pub spectator_qubits: Vec<usize>,
}

impl Reducer {
    /// The diagonal string `lambda`: Z on the reduct qubit, n/m on the
    /// flags, identity elsewhere.
    pub fn lambda_string(&self) -> OperatorString {
        let mut factors = vec![Factor::I; self.num_qubits];
        if let Some(r) = self.reduct_qubit {
            factors[r] = Factor::Z;
        }
        for &(q, val) in &self.perp_flags {
            factors[q] = if val { Factor::N } else { Factor::M };
        }
        OperatorString::bare(factors)
    }

    /// `B . lambda . B^dagger`: the Hamiltonian this reducer represents.
    pub fn reduced_hamiltonian(&self) -> Result<ComplexMatrix> {
        self.conjugated_with(Factor::Z)
    }

    /// Conjugates the lambda string with `factor` in place of Z on the
    /// reduct qubit. With X or Y this yields the companion qubitized
    /// Hamiltonians sharing the same zero space.
    pub fn conjugated_with(&self, factor: Factor) -> Result<ComplexMatrix> {
        let mut string = self.lambda_string();
        match self.reduct_qubit {
            Some(r) => string.factors[r] = factor,
            None => {
                if factor != Factor::Z {
                    return Err(SynthError::NotQubitized(
                        "projector reducer has no reduct qubit".into(),
                    ));
                }
            }
        }
        let lambda = string.materialize()?;
        let b = self.basis_change.lower()?;
        Ok(b.matmul(&lambda).matmul(&b.dagger()))
    }

    /// Flag controls in circuit polarity convention.
    pub fn flag_controls(&self) -> Vec<Control> {
        self.perp_flags
            .iter()
            .map(|&(q, val)| {
                if val {
                    Control::positive(q)
                } else {
                    Control::negative(q)
                }
            })
            .collect()
    }

    /// All qubits this reducer actively uses (gates, flags, reduct,
    /// parity); spectators by identity are excluded.
    pub fn active_support(&self) -> Vec<usize> {
        let mut support = vec![false; self.num_qubits];
        for op in &self.basis_change.ops {
            if let Op::Gate(g) = op {
                for &t in &g.targets {
                    support[t] = true;
                }
                for c in &g.controls {
                    support[c.qubit] = true;
                }
            }
        }
        if let Some(r) = self.reduct_qubit {
            support[r] = true;
        }
        for &(q, _) in &self.perp_flags {
            support[q] = true;
        }
        for &q in &self.parity_qubits {
            support[q] = true;
        }
        (0..self.num_qubits).filter(|&q| support[q]).collect()
    }

    /// Applies a one-qubit gate on the qubitized subspace: identity on
    /// the zero space, `u` on span{lambda, lambda_perp}.
    pub fn controlled_in_subspace(&self, u: GateKind) -> Result<Circuit> {
        let r = self.reduct_qubit.ok_or_else(|| {
            SynthError::NotQubitized("projector reducer has no qubitized subspace".into())
        })?;
        let mut circuit = self.basis_change.dagger();
        circuit.push(Gate::controlled(u, r, self.flag_controls()));
        circuit.extend(&self.basis_change);
        Ok(circuit)
    }

    /// Exact Hamiltonian simulation `exp(i t H)` of the represented
    /// (unit-weight) Hamiltonian: a flag-controlled RZ(2t) on the reduct
    /// qubit for qubitized terms, a flag-controlled phase for projectors.
    pub fn hs_circuit(&self, t: f64) -> Result<Circuit> {
        match self.reduct_qubit {
            Some(_) => self.controlled_in_subspace(GateKind::Rz(2.0 * t)),
            None => {
                let mut circuit = self.basis_change.dagger();
                super::encode::pattern_phase(&mut circuit, &self.perp_flags, t);
                circuit.extend(&self.basis_change);
                Ok(circuit)
            }
        }
    }

    /// Re-embeds this reducer into a wider register at a qubit offset.
    pub fn embed(&self, num_qubits: usize, offset: usize) -> Reducer {
        Reducer {
            num_qubits,
            basis_change: self.basis_change.embedded(num_qubits, offset),
            shallow_basis_change: self.shallow_basis_change.embedded(num_qubits, offset),
            reduct_qubit: self.reduct_qubit.map(|r| r + offset),
            perp_flags: self
                .perp_flags
                .iter()
                .map(|&(q, v)| (q + offset, v))
                .collect(),
            parity_qubits: self.parity_qubits.iter().map(|&q| q + offset).collect(),
            spectator_qubits: (0..offset)
                .chain(self.spectator_qubits.iter().map(|&q| q + offset))
                .chain(offset + self.num_qubits..num_qubits)
                .collect(),
        }
    }

    /// Wraps the reducer in an extra change of basis `C`, representing
    /// `C^dagger H C`.
    pub fn conjugate_by(&self, conjugation: &Circuit) -> Reducer {
        assert_eq!(conjugation.num_qubits, self.num_qubits);
        let wrap = |basis: &Circuit| {
            let mut out = basis.clone();
            out.extend(&conjugation.dagger());
            out
        };
        Reducer {
            num_qubits: self.num_qubits,
            basis_change: wrap(&self.basis_change),
            shallow_basis_change: wrap(&self.shallow_basis_change),
            reduct_qubit: self.reduct_qubit,
            perp_flags: self.perp_flags.clone(),
            parity_qubits: self.parity_qubits.clone(),
            spectator_qubits: self.spectator_qubits.clone(),
        }
    }
}

/// Spectral class of a unit-weight operator string, decided
/// structurally: a ladder string plus its conjugate squares to a pair
/// of disjoint projectors, so it always has spectrum {-1, 0, 1} and
/// zero trace; a ladder-free string is a signed product of +-1 and 0/1
/// factors.
pub(crate) fn structural_class(unit: &OperatorString) -> Result<SpectralClass> {
    if unit.contains_ladder() {
        // Requires + h.c. (checked by the caller); any coefficient
        // phase only rotates the eigenvectors.
        return Ok(SpectralClass::Qubitized);
    }
    let phase = unit.coefficient;
    if phase.im.abs() > 1e-12 {
        return Err(SynthError::NotQubitized(format!(
            "`{}` has a complex phase and is not Hermitian",
            unit.notation()
        )));
    }
    let has_pauli = unit
        .factors
        .iter()
        .any(|f| matches!(f, Factor::X | Factor::Y | Factor::Z));
    if has_pauli {
        Ok(SpectralClass::Qubitized)
    } else if phase.re > 0.0 {
        Ok(SpectralClass::Projector)
    } else {
        Err(SynthError::NotQubitized(format!(
            "`{}` is a negated projector with spectrum in {{-1, 0}}",
            unit.notation()
        )))
    }
}

/// Builds the reducer of the unit-weight Hamiltonian behind an operator
/// string. The string must classify as qubitized or projector.
pub fn reducer_from_string(s: &OperatorString) -> Result<Reducer> {
    if s.factors.is_empty() {
        return Err(SynthError::Opalg(crate::opalg::OpalgError::EmptyString));
    }
    if s.contains_ladder() && !s.plus_hc {
        return Err(SynthError::UnsupportedString(format!(
            "`{}` needs + h.c. to be Hermitian",
            s.notation()
        )));
    }
    let (weight, unit) = s.normalized();
    if weight == 0.0 {
        return Err(SynthError::NotQubitized("term weight is zero".into()));
    }
    let class = structural_class(&unit)?;
    debug_assert!(matches!(
        class,
        SpectralClass::Qubitized | SpectralClass::Projector
    ));

    let n = unit.factors.len();
    let phase = unit.coefficient;

    let mut ladder_sites: Vec<(usize, bool)> = Vec::new(); // (qubit, raises-from-1)
    let mut z_sites: Vec<usize> = Vec::new();
    let mut flags: Vec<(usize, bool)> = Vec::new();
    let mut spectators: Vec<usize> = Vec::new();

    // Diagonalizer D with D . H . D^dagger = lambda; the stored basis
    // change is its dagger.
    let mut diag = Circuit::new(n);
    for (q, factor) in unit.factors.iter().enumerate() {
        match factor {
            Factor::I => spectators.push(q),
            Factor::X => {
                diag.push(Gate::single(GateKind::H, q));
                z_sites.push(q);
            }
            Factor::Y => {
                // H . S^dagger maps Y to Z.
                diag.push(Gate::single(GateKind::P(-std::f64::consts::FRAC_PI_2), q));
                diag.push(Gate::single(GateKind::H, q));
                z_sites.push(q);
            }
            Factor::Z => z_sites.push(q),
            Factor::N => flags.push((q, true)),
            Factor::M => flags.push((q, false)),
            Factor::Sigma => ladder_sites.push((q, false)),
            Factor::SigmaDagger => ladder_sites.push((q, true)),
        }
    }

    let reduct;
    let parity_qubits;
    let shallow;
    match ladder_sites.split_first() {
        Some((&(r, r_from_one), rest)) => {
            // Localize the multi-site flip onto r; the other ladder
            // sites become flags.
            for &(q, q_from_one) in rest {
                diag.push(Gate::controlled(
                    GateKind::X,
                    q,
                    vec![Control::positive(r)],
                ));
                flags.push((q, q_from_one ^ r_from_one));
            }
            // Rotate the coupling phase away, then map the coupling to Z.
            let theta = phase.arg();
            if theta != 0.0 {
                let angle = if r_from_one { theta } else { -theta };
                diag.push(Gate::single(GateKind::P(angle), r));
            }
            diag.push(Gate::single(GateKind::H, r));
            reduct = Some(r);
            parity_qubits = std::iter::once(r).chain(z_sites.iter().copied()).collect();
            shallow = diag.clone();
            for &z in &z_sites {
                diag.push(Gate::controlled(GateKind::X, r, vec![Control::positive(z)]));
            }
            spectators.extend(z_sites.iter().copied());
        }
        None if !z_sites.is_empty() => {
            let r = z_sites[0];
            reduct = Some(r);
            parity_qubits = z_sites.clone();
            shallow = diag.clone();
            for &z in &z_sites[1..] {
                diag.push(Gate::controlled(GateKind::X, r, vec![Control::positive(z)]));
            }
            if phase.re < 0.0 {
                // -Z on the reduct: conjugate it with X.
                diag.push(Gate::single(GateKind::X, r));
            }
            spectators.extend(z_sites[1..].iter().copied());
        }
        None => {
            // Pure projector: flags only.
            reduct = None;
            parity_qubits = Vec::new();
            shallow = diag.clone();
        }
    }

    Ok(Reducer {
        num_qubits: n,
        basis_change: diag.dagger(),
        shallow_basis_change: shallow.dagger(),
        reduct_qubit: reduct,
        perp_flags: flags,
        parity_qubits,
        spectator_qubits: spectators,
    })
}

/// Reducer of a linear-combination term, including its conjugation
/// circuit when present.
pub fn term_reducer(term: &LcTerm) -> Result<Reducer> {
    let base = reducer_from_string(&term.string)?;
    match &term.conjugation {
        None => Ok(base),
        Some(conjugation) => Ok(base.conjugate_by(conjugation)),
    }
}

/// Merges two reducers over the same register with disjoint active
/// supports into the reducer of the product Hamiltonian: the combined
/// basis change is the tensor of both plus one CX reporting the second
/// reduct's parity onto the first.
pub fn combine_reducers(r1: &Reducer, r2: &Reducer) -> Result<Reducer> {
    if r1.num_qubits != r2.num_qubits {
        return Err(SynthError::RegisterMismatch(r1.num_qubits, r2.num_qubits));
    }
    let support1 = r1.active_support();
    let support2 = r2.active_support();
    if support1.iter().any(|q| support2.contains(q)) {
        return Err(SynthError::OverlappingSupports);
    }

    let num_qubits = r1.num_qubits;
    let mut flags = r1.perp_flags.clone();
    flags.extend(r2.perp_flags.iter().copied());
    let mut parity: Vec<usize> = r1.parity_qubits.clone();
    parity.extend(r2.parity_qubits.iter().copied());

    let mut shallow = Circuit::new(num_qubits);
    shallow.extend(&r2.shallow_basis_change);
    shallow.extend(&r1.shallow_basis_change);

    let mut basis = Circuit::new(num_qubits);
    let reduct = match (r1.reduct_qubit, r2.reduct_qubit) {
        (Some(a), Some(b)) => {
            // Parity merge per the tensor-combination rule.
            basis.push(Gate::controlled(GateKind::X, a, vec![Control::positive(b)]));
            Some(a)
        }
        (Some(a), None) => Some(a),
        (None, Some(b)) => Some(b),
        (None, None) => None,
    };
    basis.extend(&r2.basis_change);
    basis.extend(&r1.basis_change);

    let spectators = (0..num_qubits)
        .filter(|&q| reduct != Some(q) && !flags.iter().any(|&(fq, _)| fq == q))
        .collect();
    Ok(Reducer {
        num_qubits,
        basis_change: basis,
        shallow_basis_change: shallow,
        reduct_qubit: reduct,
        perp_flags: flags,
        parity_qubits: parity,
        spectator_qubits: spectators,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densemath::max_abs_diff;
    use crate::opalg::{classify, xy_variants};
    use crate::tolerances::TOL_UNITARY;

    fn check_invariant(s: &OperatorString) {
        let reducer = reducer_from_string(s).unwrap();
        let got = reducer.reduced_hamiltonian().unwrap();
        let (weight, unit) = s.normalized();
        let expected = unit.materialize().unwrap();
        let dev = max_abs_diff(&got, &expected).unwrap();
        assert!(
            dev <= TOL_UNITARY,
            "reducer invariant fails for {} (dev {dev:.3e})",
            s.notation()
        );
        assert!(weight > 0.0);
        assert!(reducer.basis_change.lower().unwrap().is_unitary(TOL_UNITARY));
    }

    #[test]
    fn trivial_z_reducer() {
        let r = reducer_from_string(&OperatorString::bare(vec![Factor::Z])).unwrap();
        assert_eq!(r.reduct_qubit, Some(0));
        assert!(r.perp_flags.is_empty());
        assert!(r.basis_change.ops.is_empty());
    }

    #[test]
    fn sigma_pair_reducer_is_one_h_one_cx() {
        let s = OperatorString::with_hc(vec![Factor::Sigma, Factor::SigmaDagger]);
        let r = reducer_from_string(&s).unwrap();
        assert_eq!(r.basis_change.gate_len(), 2);
        assert_eq!(r.reduct_qubit, Some(0));
        assert_eq!(r.perp_flags, vec![(1, true)]);
        check_invariant(&s);
    }

    #[test]
    fn zz_reducer_is_cx_ladder() {
        let s = OperatorString::bare(vec![Factor::Z, Factor::Z]);
        let r = reducer_from_string(&s).unwrap();
        assert_eq!(r.basis_change.gate_len(), 1);
        check_invariant(&s);
    }

    #[test]
    fn invariant_exhaustive_up_to_three_factors() {
        // Every string over the eight factors; ladder strings get +h.c.
        for len in 1..=3usize {
            let mut stack = vec![Vec::<Factor>::new()];
            while let Some(prefix) = stack.pop() {
                if prefix.len() == len {
                    let needs_hc = prefix.iter().any(|f| f.is_ladder());
                    let s = OperatorString::new(
                        prefix.clone(),
                        Complex64::new(1.0, 0.0),
                        needs_hc,
                    );
                    let class = classify(&s.normalized().1.materialize().unwrap());
                    if matches!(
                        class.class,
                        SpectralClass::Qubitized | SpectralClass::Projector
                    ) {
                        check_invariant(&s);
                    }
                    continue;
                }
                for f in Factor::ALL {
                    let mut next = prefix.clone();
                    next.push(f);
                    stack.push(next);
                }
            }
        }
    }

    #[test]
    fn structural_class_agrees_with_numeric_classification() {
        // Dual route: the structural rule must reproduce the dense
        // classification on every unit string up to three factors.
        for len in 1..=3usize {
            let mut stack = vec![Vec::<Factor>::new()];
            while let Some(prefix) = stack.pop() {
                if prefix.len() == len {
                    for phase in [
                        Complex64::new(1.0, 0.0),
                        Complex64::new(-1.0, 0.0),
                        Complex64::from_polar(1.0, 0.71),
                    ] {
                        let plus_hc = prefix.iter().any(|f| f.is_ladder());
                        let s = OperatorString::new(prefix.clone(), phase, plus_hc);
                        let (weight, unit) = s.normalized();
                        if weight == 0.0 {
                            continue;
                        }
                        let numeric = classify(&unit.materialize().unwrap()).class;
                        match structural_class(&unit) {
                            Ok(class) => assert_eq!(
                                class,
                                numeric,
                                "structural vs numeric for {}",
                                unit.notation()
                            ),
                            Err(_) => assert!(
                                !matches!(
                                    numeric,
                                    SpectralClass::Qubitized | SpectralClass::Projector
                                ),
                                "structural rejected {} but numeric says {:?}",
                                unit.notation(),
                                numeric
                            ),
                        }
                    }
                    continue;
                }
                for f in Factor::ALL {
                    let mut next = prefix.clone();
                    next.push(f);
                    stack.push(next);
                }
            }
        }
    }

    #[test]
    fn invariant_with_phases_and_signs() {
        let i = Complex64::new(0.0, 1.0);
        let cases = [
            OperatorString::new(vec![Factor::Sigma, Factor::Sigma], i, true),
            OperatorString::new(
                vec![Factor::Sigma, Factor::N],
                Complex64::from_polar(1.0, 0.83),
                true,
            ),
            OperatorString::new(vec![Factor::Z, Factor::X], Complex64::new(-1.0, 0.0), false),
            OperatorString::new(
                vec![Factor::X, Factor::Sigma, Factor::M],
                Complex64::from_polar(2.5, -1.2),
                true,
            ),
            OperatorString::new(vec![Factor::Y, Factor::Y], Complex64::new(-1.0, 0.0), false),
            // h.c. folding on a Pauli string with a complex coefficient
            OperatorString::new(vec![Factor::X, Factor::Z], Complex64::new(0.7, 0.3), true),
        ];
        for s in &cases {
            check_invariant(s);
        }
    }

    #[test]
    fn rejects_non_reducible_inputs() {
        let sigma_no_hc = OperatorString::bare(vec![Factor::Sigma]);
        assert!(matches!(
            reducer_from_string(&sigma_no_hc),
            Err(SynthError::UnsupportedString(_))
        ));
        let negative_projector =
            OperatorString::new(vec![Factor::N], Complex64::new(-1.0, 0.0), false);
        assert!(matches!(
            reducer_from_string(&negative_projector),
            Err(SynthError::NotQubitized(_))
        ));
        let zero = OperatorString::new(vec![Factor::X, Factor::Z], Complex64::new(0.0, 0.5), true);
        assert!(matches!(
            reducer_from_string(&zero),
            Err(SynthError::NotQubitized(_))
        ));
    }

    #[test]
    fn projector_reducer_has_no_reduct() {
        let s = OperatorString::bare(vec![Factor::N, Factor::M]);
        let r = reducer_from_string(&s).unwrap();
        assert_eq!(r.reduct_qubit, None);
        assert_eq!(r.perp_flags, vec![(0, true), (1, false)]);
        let got = r.reduced_hamiltonian().unwrap();
        assert!(max_abs_diff(&got, &s.materialize().unwrap()).unwrap() <= TOL_UNITARY);
    }

    #[test]
    fn xy_variants_of_single_qubit_z() {
        let r = reducer_from_string(&OperatorString::bare(vec![Factor::Z])).unwrap();
        let (x, y) = xy_variants(&r).unwrap();
        assert!(max_abs_diff(&x, &Factor::X.matrix()).unwrap() < 1e-12);
        assert!(max_abs_diff(&y, &Factor::Y.matrix()).unwrap() < 1e-12);
    }

    #[test]
    fn xy_variants_are_qubitized_and_anticommute_on_subspace() {
        let s = OperatorString::bare(vec![Factor::Z, Factor::Z]);
        let r = reducer_from_string(&s).unwrap();
        let h = r.reduced_hamiltonian().unwrap();
        let (x, y) = xy_variants(&r).unwrap();
        assert_eq!(classify(&x).class, SpectralClass::Qubitized);
        assert_eq!(classify(&y).class, SpectralClass::Qubitized);
        // {H, X-form} = 0 and {H, Y-form} = 0 (the zero space is shared,
        // so the anticommutator vanishes globally here).
        for form in [&x, &y] {
            let anti = h
                .matmul(form)
                .add(&form.matmul(&h))
                .unwrap();
            assert!(anti.max_abs() <= 1e-10);
        }
        // Eigenvectors of the X-form span the same +-1 space rotated by 45
        // degrees: X-form maps |lambda> to |lambda_perp> and back.
        let x2 = x.matmul(&x);
        let h2 = h.matmul(&h);
        assert!(max_abs_diff(&x2, &h2).unwrap() <= 1e-10);
    }

    #[test]
    fn combine_matches_tensor_product() {
        let z = reducer_from_string(&OperatorString::bare(vec![Factor::Z])).unwrap();
        let combined = combine_reducers(&z.embed(2, 0), &z.embed(2, 1)).unwrap();
        let got = combined.reduced_hamiltonian().unwrap();
        let expected = OperatorString::bare(vec![Factor::Z, Factor::Z])
            .materialize()
            .unwrap();
        assert!(max_abs_diff(&got, &expected).unwrap() <= TOL_UNITARY);
        // exactly one parity-merge CX
        assert_eq!(combined.basis_change.gate_len(), 1);
    }

    #[test]
    fn combine_x_with_z() {
        let x = reducer_from_string(&OperatorString::with_hc(vec![Factor::Sigma])).unwrap();
        let z = reducer_from_string(&OperatorString::bare(vec![Factor::Z])).unwrap();
        let combined = combine_reducers(&x.embed(2, 0), &z.embed(2, 1)).unwrap();
        let got = combined.reduced_hamiltonian().unwrap();
        let expected = OperatorString::bare(vec![Factor::X, Factor::Z])
            .materialize()
            .unwrap();
        assert!(max_abs_diff(&got, &expected).unwrap() <= TOL_UNITARY);
    }

    #[test]
    fn combine_with_projector_and_associativity() {
        let sigma = reducer_from_string(&OperatorString::with_hc(vec![Factor::Sigma])).unwrap();
        let proj = reducer_from_string(&OperatorString::bare(vec![Factor::N])).unwrap();
        let zred = reducer_from_string(&OperatorString::bare(vec![Factor::Z])).unwrap();

        let a = sigma.embed(3, 0);
        let b = proj.embed(3, 1);
        let c = zred.embed(3, 2);

        let left = combine_reducers(&combine_reducers(&a, &b).unwrap(), &c).unwrap();
        let right = combine_reducers(&a, &combine_reducers(&b, &c).unwrap()).unwrap();
        let hl = left.reduced_hamiltonian().unwrap();
        let hr = right.reduced_hamiltonian().unwrap();
        assert!(max_abs_diff(&hl, &hr).unwrap() <= TOL_UNITARY);

        let expected = OperatorString::bare(vec![Factor::X, Factor::N, Factor::Z])
            .materialize()
            .unwrap();
        assert!(max_abs_diff(&hl, &expected).unwrap() <= TOL_UNITARY);
    }

    #[test]
    fn combine_rejects_overlap() {
        let z = reducer_from_string(&OperatorString::bare(vec![Factor::Z])).unwrap();
        let a = z.embed(2, 0);
        assert!(matches!(
            combine_reducers(&a, &a),
            Err(SynthError::OverlappingSupports)
        ));
    }
}
