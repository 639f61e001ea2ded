//! Anti-diagonal (Hankel) and anti-circulant builders.
//!
//! The anti-diagonal block N(n) follows the diagonal recursion with I
//! replaced by X, sigma by m and sigma-dagger by n; its "dagger" is the
//! full-X conjugation, i.e. the factorwise m/n swap. N(n) covers the
//! anti-diagonal row+col = n-1. Anti-circulants are indexed 0-based
//! from the main anti-diagonal: index k holds the entries with
//! row+col = m-1-k (mod m).

use num_complex::Complex64;

use super::toeplitz::block_qubits;
use super::{Result, StructuredError};
use crate::opalg::{Factor, LcTerm, LinearCombination, OperatorString};
use crate::synth::adder_ladder;

fn flip_strings(strings: &[Vec<Factor>]) -> Vec<Vec<Factor>> {
    strings
        .iter()
        .map(|s| {
            s.iter()
                .map(|f| match f {
                    Factor::N => Factor::M,
                    Factor::M => Factor::N,
                    other => *other,
                })
                .collect()
        })
        .collect()
}

/// Factor strings of the anti-diagonal block N(n) over {X, n, m}.
pub(crate) fn n_block(n: u64) -> Vec<Vec<Factor>> {
    assert!(n >= 1);
    if n == 1 {
        return vec![vec![Factor::M]];
    }
    if n.is_power_of_two() {
        return vec![vec![Factor::X; n.trailing_zeros() as usize]];
    }
    let w = 63 - n.leading_zeros() as usize;
    let p = n - (1 << w);
    let q = (1 << (w + 1)) - n;
    let alpha = w - block_qubits(p);
    let beta = w - block_qubits(q);

    let mut strings = Vec::new();
    for tail in n_block(p) {
        let mut s = vec![Factor::X];
        s.extend(std::iter::repeat(Factor::M).take(alpha));
        s.extend(tail);
        strings.push(s);
    }
    for tail in flip_strings(&n_block(q)) {
        let mut s = vec![Factor::M];
        s.extend(std::iter::repeat(Factor::N).take(beta));
        s.extend(tail);
        strings.push(s);
    }
    strings
}

fn check_m(m: u64) -> Result<usize> {
    if !m.is_power_of_two() || m < 2 {
        return Err(StructuredError::InvalidSpec(format!(
            "node count {m} must be a power of two >= 2"
        )));
    }
    Ok(m.trailing_zeros() as usize)
}

/// The n-th anti-diagonal of an m-node register: entries where
/// row + col = n - 1, weight `w`. Above the main anti-diagonal
/// (n > m) the mirrored block is used.
pub fn hankel_antidiag(n: u64, m: u64, weight: Complex64) -> Result<LinearCombination> {
    let m_qubits = check_m(m)?;
    if n == 0 || n > 2 * m - 1 {
        return Err(StructuredError::InvalidSpec(format!(
            "anti-diagonal index {n} out of range [1, {}]",
            2 * m - 1
        )));
    }
    let (inner, mirrored) = if n <= m { (n, false) } else { (2 * m - n, true) };
    let prefix_len = m_qubits - block_qubits(inner);
    let strings = n_block(inner);
    let strings = if mirrored {
        // Full-X conjugation: flip every projector, prefix with n.
        flip_strings(&strings)
            .into_iter()
            .map(|tail| {
                let mut factors = vec![Factor::N; prefix_len];
                factors.extend(tail);
                factors
            })
            .collect::<Vec<_>>()
    } else {
        strings
            .into_iter()
            .map(|tail| {
                let mut factors = vec![Factor::M; prefix_len];
                factors.extend(tail);
                factors
            })
            .collect::<Vec<_>>()
    };
    Ok(LinearCombination::from_strings(
        strings
            .into_iter()
            .map(|factors| OperatorString::new(factors, weight, false))
            .collect(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AntiCirculantVariant {
    /// Sum of the two anti-diagonal blocks.
    Sum,
    /// Adder-conjugated main (or first) anti-circulant.
    AdderConjugation,
    /// Single unitary: full bit complement times the adder.
    AntiAdder,
}

/// Hermitian anti-circulant with 0-based index n from the main
/// anti-diagonal: entries where row + col = m - 1 - n (mod m).
pub fn anticirculant(
    n: u64,
    m: u64,
    weight: Complex64,
    variant: AntiCirculantVariant,
) -> Result<LinearCombination> {
    check_m(m)?;
    if n >= m {
        return Err(StructuredError::InvalidSpec(format!(
            "anti-circulant index {n} out of range [0, {m})"
        )));
    }
    match variant {
        AntiCirculantVariant::Sum => {
            let mut lc = hankel_antidiag(m - n, m, weight)?;
            if n >= 1 {
                lc.terms
                    .extend(hankel_antidiag(2 * m - n, m, weight)?.terms);
            }
            Ok(lc)
        }
        AntiCirculantVariant::AdderConjugation => {
            let (base, shift) = if n % 2 == 0 {
                (anticirculant(0, m, weight, AntiCirculantVariant::Sum)?, n / 2)
            } else {
                (anticirculant(1, m, weight, AntiCirculantVariant::Sum)?, (n - 1) / 2)
            };
            if shift == 0 {
                return Ok(base);
            }
            let conjugation = adder_ladder(shift, m).map_err(StructuredError::Synth)?;
            Ok(LinearCombination::new(
                base.terms
                    .into_iter()
                    .map(|term| LcTerm::conjugated(term.string, conjugation.clone()))
                    .collect(),
            ))
        }
        AntiCirculantVariant::AntiAdder => Err(StructuredError::InvalidSpec(
            "anti_adder variant builds a unitary; use anticirculant_anti_adder".into(),
        )),
    }
}

/// The anti-circulant as a single unitary: the adder followed by the
/// full bit complement. Hermitian, hence a reflection.
pub fn anticirculant_anti_adder(
    n: u64,
    m: u64,
    weight: Complex64,
) -> Result<crate::synth::LcuCombination> {
    let m_qubits = check_m(m)?;
    if n >= m {
        return Err(StructuredError::InvalidSpec(format!(
            "anti-circulant index {n} out of range [0, {m})"
        )));
    }
    let mut circuit = if n == 0 {
        crate::circuit::Circuit::new(m_qubits)
    } else {
        adder_ladder(n, m).map_err(StructuredError::Synth)?
    };
    for q in 0..m_qubits {
        circuit.push(crate::circuit::Gate::single(crate::circuit::GateKind::X, q));
    }
    Ok(crate::synth::LcuCombination::new(
        m_qubits,
        vec![crate::synth::LcuTerm {
            coefficient: weight,
            circuit,
        }],
    ))
}
