//! Diagonal (Toeplitz) and circulant builders.
//!
//! The n-th diagonal block M(n) is built by the two-branch recursion
//!
//! ```text
//! M(n) = I sigma^a M(n - 2^w)  +  sigma sigma'^b M(2^{w+1} - n)'
//! ```
//!
//! with `w = floor(log2 n)`, bases `M(1) = sigma`, `M(2^N) = I^N`, and
//! `'` the factorwise dagger. M(n) materializes to the one-sided shift
//! by `2^{w+1} - n` at size `2^{w+1}`; prefixing sigma factors extends
//! it to the m-node diagonal with hop distance `m - n`. The summand
//! count of M(n) is Stern's diatomic sequence fusc(n).

use num_complex::Complex64;

use super::{Result, StructuredError};
use crate::circuit::Circuit;
use crate::opalg::{Factor, LcTerm, LinearCombination, OperatorString};
use crate::synth::adder_ladder;

/// Stern's diatomic sequence.
pub fn fusc(n: u64) -> u64 {
    match n {
        0 => 0,
        1 => 1,
        even if even % 2 == 0 => fusc(even / 2),
        odd => fusc(odd / 2) + fusc(odd / 2 + 1),
    }
}

/// Qubit count of the M(n) block: M(1) is one qubit, M(2^N) is N
/// qubits, anything else spans floor(log2 n) + 1.
pub(crate) fn block_qubits(n: u64) -> usize {
    if n == 1 {
        1
    } else if n.is_power_of_two() {
        n.trailing_zeros() as usize
    } else {
        (63 - n.leading_zeros() as usize) + 1
    }
}

fn dagger_strings(strings: &[Vec<Factor>]) -> Vec<Vec<Factor>> {
    strings
        .iter()
        .map(|s| s.iter().map(|f| f.dagger()).collect())
        .collect()
}

/// One-sided factor strings of the diagonal block M(n).
pub(crate) fn m_block(n: u64) -> Vec<Vec<Factor>> {
    assert!(n >= 1);
    if n == 1 {
        return vec![vec![Factor::Sigma]];
    }
    if n.is_power_of_two() {
        return vec![vec![Factor::I; n.trailing_zeros() as usize]];
    }
    let w = 63 - n.leading_zeros() as usize;
    let p = n - (1 << w);
    let q = (1 << (w + 1)) - n;
    let alpha = w - block_qubits(p);
    let beta = w - block_qubits(q);

    let mut strings = Vec::new();
    for tail in m_block(p) {
        let mut s = vec![Factor::I];
        s.extend(std::iter::repeat(Factor::Sigma).take(alpha));
        s.extend(tail);
        strings.push(s);
    }
    for tail in dagger_strings(&m_block(q)) {
        let mut s = vec![Factor::Sigma];
        s.extend(std::iter::repeat(Factor::SigmaDagger).take(beta));
        s.extend(tail);
        strings.push(s);
    }
    strings
}

fn check_power_of_two(m: u64) -> Result<usize> {
    if !m.is_power_of_two() || m < 2 {
        return Err(StructuredError::InvalidSpec(format!(
            "node count {m} must be a power of two >= 2"
        )));
    }
    Ok(m.trailing_zeros() as usize)
}

/// Hermitian decomposition of the n-th diagonal of an m-node line: the
/// hop-distance-(m-n) adjacency with weight `w` downward and conj(w)
/// upward. fusc(n) ladder strings, each plus h.c.
pub fn toeplitz_diag(n: u64, m: u64, weight: Complex64) -> Result<LinearCombination> {
    let m_qubits = check_power_of_two(m)?;
    if n == 0 || n >= m {
        return Err(StructuredError::InvalidSpec(format!(
            "diagonal index {n} out of range [1, {m})"
        )));
    }
    let prefix_len = m_qubits - block_qubits(n);
    let strings = m_block(n)
        .into_iter()
        .map(|tail| {
            let mut factors = vec![Factor::Sigma; prefix_len];
            factors.extend(tail);
            OperatorString::new(factors, weight, true)
        })
        .collect();
    Ok(LinearCombination::from_strings(strings))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CirculantVariant {
    /// Two diagonal decompositions summed.
    Recursive,
    /// Partial-shift strings plus their adder conjugation (falls back
    /// to `Recursive` when the hop is not a power of two).
    Adder,
    /// Two-term combination of the adder unitary and its adjoint.
    AdderLcu,
}

/// Hermitian circulant with index n: hops of distance m-n (weight `w`)
/// and n (weight conj(w)), wrapping around.
pub fn circulant(n: u64, m: u64, weight: Complex64, variant: CirculantVariant) -> Result<LinearCombination> {
    check_power_of_two(m)?;
    if n == 0 || n >= m {
        return Err(StructuredError::InvalidSpec(format!(
            "circulant index {n} out of range [1, {m})"
        )));
    }
    match variant {
        CirculantVariant::Recursive => {
            let mut lc = toeplitz_diag(n, m, weight)?;
            let wrap = toeplitz_diag(m - n, m, weight.conj())?;
            lc.terms.extend(wrap.terms);
            Ok(lc)
        }
        CirculantVariant::Adder => {
            if (m - n).is_power_of_two() {
                circulant_adder_hop(m - n, m, weight)
            } else if n.is_power_of_two() {
                circulant_adder_hop(n, m, weight.conj())
            } else if let Some(lc) = circulant_adder_gathered(m - n, m, weight)? {
                Ok(lc)
            } else if let Some(lc) = circulant_adder_gathered(n, m, weight.conj())? {
                Ok(lc)
            } else {
                // Not a gatherable pattern: recursive path.
                circulant(n, m, weight, CirculantVariant::Recursive)
            }
        }
        CirculantVariant::AdderLcu => Err(StructuredError::InvalidSpec(
            "adder_lcu variant builds unitaries; use circulant_adder_lcu".into(),
        )),
    }
}

/// Whether the `Adder` variant has a gatherable pattern for this index
/// (a power-of-two hop, or a hop block strictly inside the register).
pub fn circulant_adder_applies(n: u64, m: u64) -> bool {
    let fits = |hop: u64| {
        let w = 64 - hop.leading_zeros() as u64; // 2^w > hop
        (1u64 << (w + 1)) < m
    };
    (m - n).is_power_of_two() || n.is_power_of_two() || fits(m - n) || fits(n)
}

/// Gathered adder form for an arbitrary hop whose block fits strictly
/// inside the register: the recursion of the seed 2^{w+1} - hop split
/// into a no-carry part, a carry part, and the adder-conjugated carry
/// part. fusc(2^w - hop) + 2 fusc(hop) summands.
fn circulant_adder_gathered(
    hop: u64,
    m: u64,
    weight: Complex64,
) -> Result<Option<LinearCombination>> {
    let m_qubits = check_power_of_two(m)?;
    let w = (64 - hop.leading_zeros()) as usize; // smallest w with 2^w > hop
    if (1u64 << (w + 1)) >= m {
        return Ok(None);
    }
    let p = (1u64 << w) - hop;
    let q = hop;
    let alpha = w - block_qubits(p);
    let beta = w - block_qubits(q);
    let epsilon = m_qubits - 1 - w;

    let mut terms: Vec<LcTerm> = Vec::new();
    // No-carry block: I^{e+1} sigma^a M(p).
    for tail in m_block(p) {
        let mut factors = vec![Factor::I; epsilon + 1];
        factors.extend(std::iter::repeat(Factor::Sigma).take(alpha));
        factors.extend(tail);
        terms.push(LcTerm::plain(OperatorString::new(factors, weight, true)));
    }
    // Carry block and its adder conjugation.
    let conjugation: Circuit = adder_ladder(1 << w, m).map_err(StructuredError::Synth)?;
    for tail in dagger_strings(&m_block(q)) {
        let mut factors = vec![Factor::I; epsilon];
        factors.push(Factor::Sigma);
        factors.extend(std::iter::repeat(Factor::SigmaDagger).take(beta));
        factors.extend(tail);
        let string = OperatorString::new(factors, weight, true);
        terms.push(LcTerm::plain(string.clone()));
        terms.push(LcTerm::conjugated(string, conjugation.clone()));
    }
    Ok(Some(LinearCombination::new(terms)))
}

/// Eq-style gathered form for hop = 2^N: the no-carry partial shift
/// string plus the same string conjugated by the adder.
fn circulant_adder_hop(hop: u64, m: u64, weight: Complex64) -> Result<LinearCombination> {
    let m_qubits = check_power_of_two(m)?;
    debug_assert!(hop.is_power_of_two() && hop < m);
    let n_exp = hop.trailing_zeros() as usize;
    let mut factors = vec![Factor::I; m_qubits - n_exp - 1];
    factors.push(Factor::Sigma);
    factors.extend(std::iter::repeat(Factor::I).take(n_exp));
    let direct = OperatorString::new(factors, weight, true);
    let conjugation: Circuit = adder_ladder(hop, m).map_err(StructuredError::Synth)?;
    Ok(LinearCombination::new(vec![
        LcTerm::plain(direct.clone()),
        LcTerm::conjugated(direct, conjugation),
    ]))
}

/// Two-unitary decomposition of the circulant: conj(w) times the adder
/// plus w times its adjoint.
pub fn circulant_adder_lcu(
    n: u64,
    m: u64,
    weight: Complex64,
) -> Result<crate::synth::LcuCombination> {
    check_power_of_two(m)?;
    if n == 0 || n >= m {
        return Err(StructuredError::InvalidSpec(format!(
            "circulant index {n} out of range [1, {m})"
        )));
    }
    let add = adder_ladder(n, m).map_err(StructuredError::Synth)?;
    let terms = vec![
        crate::synth::LcuTerm {
            coefficient: weight.conj(),
            circuit: add.clone(),
        },
        crate::synth::LcuTerm {
            coefficient: weight,
            circuit: add.dagger(),
        },
    ];
    Ok(crate::synth::LcuCombination::new(
        m.trailing_zeros() as usize,
        terms,
    ))
}
