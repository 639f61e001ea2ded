//! Symbolic operator algebra: tensor strings over the eight one-qubit
//! factors, linear combinations of them, and spectral classification.
//!
//! A string materializes to `coefficient * (factor_0 (x) factor_1 (x) ...)`,
//! plus the Hermitian conjugate when the `+ h.c.` flag is set. Factor 0
//! is the most significant qubit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::Circuit;
use crate::densemath::{hermitian_eig, kron, ComplexMatrix};
use crate::tolerances::{TOL_EIGEN_SNAP, TOL_UNITARY};

#[derive(Debug, Error, PartialEq)]
pub enum OpalgError {
    #[error("operator string has no factors")]
    EmptyString,
    #[error("cannot parse term notation: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, OpalgError>;

/// One-qubit factor of an operator string.
///
/// `N`, `M`, `Sigma`, `SigmaDagger` are the single-component basis:
/// number operator, hole operator, and the two ladder operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Factor {
    I,
    X,
    Y,
    Z,
    N,
    M,
    Sigma,
    SigmaDagger,
}

impl Factor {
    pub const ALL: [Factor; 8] = [
        Factor::I,
        Factor::X,
        Factor::Y,
        Factor::Z,
        Factor::N,
        Factor::M,
        Factor::Sigma,
        Factor::SigmaDagger,
    ];

    /// The 2x2 matrix of this factor.
    pub fn matrix(self) -> ComplexMatrix {
        let i = |re: f64, im: f64| Complex64::new(re, im);
        let entries = match self {
            Factor::I => [i(1., 0.), i(0., 0.), i(0., 0.), i(1., 0.)],
            Factor::X => [i(0., 0.), i(1., 0.), i(1., 0.), i(0., 0.)],
            Factor::Y => [i(0., 0.), i(0., -1.), i(0., 1.), i(0., 0.)],
            Factor::Z => [i(1., 0.), i(0., 0.), i(0., 0.), i(-1., 0.)],
            Factor::N => [i(0., 0.), i(0., 0.), i(0., 0.), i(1., 0.)],
            Factor::M => [i(1., 0.), i(0., 0.), i(0., 0.), i(0., 0.)],
            Factor::Sigma => [i(0., 0.), i(0., 0.), i(1., 0.), i(0., 0.)],
            Factor::SigmaDagger => [i(0., 0.), i(1., 0.), i(0., 0.), i(0., 0.)],
        };
        ComplexMatrix::from_rows(2, 2, entries.to_vec())
    }

    pub fn dagger(self) -> Factor {
        match self {
            Factor::Sigma => Factor::SigmaDagger,
            Factor::SigmaDagger => Factor::Sigma,
            other => other,
        }
    }

    /// True for the off-diagonal ladder factors.
    pub fn is_ladder(self) -> bool {
        matches!(self, Factor::Sigma | Factor::SigmaDagger)
    }

    /// True for the diagonal projector factors n and m.
    pub fn is_projector(self) -> bool {
        matches!(self, Factor::N | Factor::M)
    }

    pub fn token(self) -> &'static str {
        match self {
            Factor::I => "I",
            Factor::X => "X",
            Factor::Y => "Y",
            Factor::Z => "Z",
            Factor::N => "n",
            Factor::M => "m",
            Factor::Sigma => "s",
            Factor::SigmaDagger => "sd",
        }
    }

    pub fn from_token(token: &str) -> Result<Factor> {
        Ok(match token {
            "I" => Factor::I,
            "X" => Factor::X,
            "Y" => Factor::Y,
            "Z" => Factor::Z,
            "n" => Factor::N,
            "m" => Factor::M,
            "s" => Factor::Sigma,
            "sd" => Factor::SigmaDagger,
            other => return Err(OpalgError::Parse(format!("unknown factor `{other}`"))),
        })
    }
}

/// A weighted tensor product of one-qubit factors, optionally plus its
/// Hermitian conjugate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorString {
    pub factors: Vec<Factor>,
    pub coefficient: Complex64,
    pub plus_hc: bool,
}

impl OperatorString {
    pub fn new(factors: Vec<Factor>, coefficient: Complex64, plus_hc: bool) -> Self {
        Self {
            factors,
            coefficient,
            plus_hc,
        }
    }

    /// Unit-coefficient string without Hermitian conjugate.
    pub fn bare(factors: Vec<Factor>) -> Self {
        Self::new(factors, Complex64::new(1.0, 0.0), false)
    }

    /// Unit-coefficient string plus Hermitian conjugate.
    pub fn with_hc(factors: Vec<Factor>) -> Self {
        Self::new(factors, Complex64::new(1.0, 0.0), true)
    }

    pub fn num_qubits(&self) -> usize {
        self.factors.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.factors.len()
    }

    /// Factorwise dagger with conjugated coefficient. The materialization
    /// of the result is the adjoint of the original's.
    pub fn dagger(&self) -> Self {
        Self {
            factors: self.factors.iter().map(|f| f.dagger()).collect(),
            coefficient: self.coefficient.conj(),
            plus_hc: self.plus_hc,
        }
    }

    pub fn contains_ladder(&self) -> bool {
        self.factors.iter().any(|f| f.is_ladder())
    }

    /// Folds `+ h.c.` into the coefficient when the bare tensor product
    /// is already Hermitian (no ladder factors): `c P + conj(c) P`
    /// becomes `2 Re(c) P`.
    pub fn canonical(&self) -> OperatorString {
        if self.plus_hc && !self.contains_ladder() {
            OperatorString::new(
                self.factors.clone(),
                Complex64::new(2.0 * self.coefficient.re, 0.0),
                false,
            )
        } else {
            self.clone()
        }
    }

    /// Splits the canonical form into a nonnegative weight and a
    /// unit-modulus string such that `weight * unit` materializes
    /// identically; the unit string of a Hermitian term has spectrum
    /// in {-1, 0, 1}.
    pub fn normalized(&self) -> (f64, OperatorString) {
        let canonical = self.canonical();
        let weight = canonical.coefficient.norm();
        let phase = if weight == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            canonical.coefficient / weight
        };
        (
            weight,
            OperatorString::new(canonical.factors, phase, canonical.plus_hc),
        )
    }

    /// Dense materialization: `coefficient * (tensor product)` plus its
    /// adjoint when the h.c. flag is set.
    pub fn materialize(&self) -> Result<ComplexMatrix> {
        if self.factors.is_empty() {
            return Err(OpalgError::EmptyString);
        }
        let mut prod = self.factors[0].matrix();
        for f in &self.factors[1..] {
            prod = kron(&prod, &f.matrix());
        }
        let base = prod.scale(self.coefficient);
        if self.plus_hc {
            Ok(base.add(&base.dagger()).expect("square dims"))
        } else {
            Ok(base)
        }
    }

    /// Term notation such as `1.0 * Z.Z` or `0.5 * s.sd + h.c.`.
    pub fn notation(&self) -> String {
        let coeff = if self.coefficient.im == 0.0 {
            format!("{:?}", self.coefficient.re)
        } else {
            format!("({:?}{:+?}i)", self.coefficient.re, self.coefficient.im)
        };
        let factors: Vec<&str> = self.factors.iter().map(|f| f.token()).collect();
        let hc = if self.plus_hc { " + h.c." } else { "" };
        format!("{coeff} * {}{hc}", factors.join("."))
    }

    /// Parses the output of [`OperatorString::notation`].
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let (body, plus_hc) = match text.strip_suffix("+ h.c.") {
            Some(rest) => (rest.trim_end(), true),
            None => (text, false),
        };
        let (coeff_text, factors_text) = body
            .split_once('*')
            .ok_or_else(|| OpalgError::Parse(format!("missing `*` in `{text}`")))?;
        let coefficient = parse_coefficient(coeff_text.trim())?;
        let factors = factors_text
            .trim()
            .split('.')
            .map(Factor::from_token)
            .collect::<Result<Vec<_>>>()?;
        if factors.is_empty() {
            return Err(OpalgError::EmptyString);
        }
        Ok(Self {
            factors,
            coefficient,
            plus_hc,
        })
    }
}

fn parse_coefficient(text: &str) -> Result<Complex64> {
    let bad = |t: &str| OpalgError::Parse(format!("bad coefficient `{t}`"));
    if let Some(inner) = text.strip_prefix('(').and_then(|t| t.strip_suffix("i)")) {
        // (re+imi) with a forced sign on the imaginary part
        let split = inner[1..]
            .find(['+', '-'])
            .map(|p| p + 1)
            .ok_or_else(|| bad(text))?;
        let re: f64 = inner[..split].parse().map_err(|_| bad(text))?;
        let im: f64 = inner[split..].parse().map_err(|_| bad(text))?;
        Ok(Complex64::new(re, im))
    } else {
        let re: f64 = text.parse().map_err(|_| bad(text))?;
        Ok(Complex64::new(re, 0.0))
    }
}

/// Spectral class of a Hermitian (or general) matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectralClass {
    /// Hermitian, trace zero, eigenvalues in {-1, 0, 1}, at least one nonzero.
    Qubitized,
    /// Hermitian with eigenvalues in {0, 1}.
    Projector,
    /// Unitary but not one of the Hermitian classes above.
    Unitary,
    Other,
}

/// Classification result with the eigenvalues that drove the decision
/// (empty when the input is not Hermitian).
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub class: SpectralClass,
    pub eigenvalues: Vec<f64>,
}

/// Classifies a square matrix by its spectrum.
pub fn classify(h: &ComplexMatrix) -> Classification {
    assert!(h.is_square(), "classification needs a square matrix");
    if h.is_hermitian(TOL_UNITARY) {
        let (values, _) = hermitian_eig(h).expect("hermitian within tolerance");
        let snapped: Vec<Option<i8>> = values
            .iter()
            .map(|&v| {
                [(-1.0, -1i8), (0.0, 0), (1.0, 1)]
                    .iter()
                    .find(|(target, _)| (v - target).abs() <= TOL_EIGEN_SNAP)
                    .map(|&(_, s)| s)
            })
            .collect();
        let trace = h.trace();
        if snapped.iter().all(|s| s.is_some()) {
            let has_nonzero = snapped.iter().any(|s| s != &Some(0));
            let all_nonneg = snapped.iter().all(|s| s != &Some(-1));
            if trace.norm() <= TOL_EIGEN_SNAP * h.rows() as f64 && has_nonzero {
                return Classification {
                    class: SpectralClass::Qubitized,
                    eigenvalues: values,
                };
            }
            if all_nonneg {
                return Classification {
                    class: SpectralClass::Projector,
                    eigenvalues: values,
                };
            }
        }
        let class = if h.is_unitary(TOL_EIGEN_SNAP) {
            SpectralClass::Unitary
        } else {
            SpectralClass::Other
        };
        return Classification {
            class,
            eigenvalues: values,
        };
    }
    let class = if h.is_unitary(TOL_EIGEN_SNAP) {
        SpectralClass::Unitary
    } else {
        SpectralClass::Other
    };
    Classification {
        class,
        eigenvalues: Vec::new(),
    }
}

/// One term of a linear combination: an operator string, optionally
/// conjugated by a change-of-basis circuit (`C^dag . string . C`).
#[derive(Debug, Clone, PartialEq)]
pub struct LcTerm {
    pub string: OperatorString,
    pub conjugation: Option<Circuit>,
}

impl LcTerm {
    pub fn plain(string: OperatorString) -> Self {
        Self {
            string,
            conjugation: None,
        }
    }

    pub fn conjugated(string: OperatorString, conjugation: Circuit) -> Self {
        Self {
            string,
            conjugation: Some(conjugation),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.string.num_qubits()
    }

    /// Dense materialization including the conjugation, if any.
    pub fn materialize(&self) -> Result<ComplexMatrix> {
        let inner = self.string.materialize()?;
        match &self.conjugation {
            None => Ok(inner),
            Some(circuit) => {
                let u = circuit
                    .lower()
                    .expect("conjugation circuit within lowering budget");
                Ok(u.dagger().matmul(&inner).matmul(&u))
            }
        }
    }

    /// Weight and classification of the unit-coefficient term. The
    /// conjugation is unitary, so it does not change the class.
    pub fn classify_unit(&self) -> Classification {
        let (_, unit) = self.string.normalized();
        classify(&unit.materialize().expect("nonempty term"))
    }

    pub fn weight(&self) -> f64 {
        self.string.coefficient.norm()
    }
}

/// A weighted list of operator-string terms.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearCombination {
    pub terms: Vec<LcTerm>,
}

impl LinearCombination {
    pub fn new(terms: Vec<LcTerm>) -> Self {
        Self { terms }
    }

    pub fn from_strings(strings: Vec<OperatorString>) -> Self {
        Self {
            terms: strings.into_iter().map(LcTerm::plain).collect(),
        }
    }

    pub fn push(&mut self, term: LcTerm) {
        self.terms.push(term);
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_qubits(&self) -> usize {
        self.terms.first().map_or(0, LcTerm::num_qubits)
    }

    /// Sum of absolute term weights (the block-encoding subnormalization).
    pub fn weight_sum(&self) -> f64 {
        self.terms.iter().map(LcTerm::weight).sum()
    }

    /// Sum of the materialized terms.
    pub fn materialize(&self) -> Result<ComplexMatrix> {
        let mut terms = self.terms.iter();
        let first = terms.next().ok_or(OpalgError::EmptyString)?;
        let mut acc = first.materialize()?;
        for term in terms {
            acc = acc.add(&term.materialize()?).expect("uniform dims");
        }
        Ok(acc)
    }

    /// Per-term spectral classes of the unit-coefficient terms.
    pub fn classify_terms(&self) -> Vec<SpectralClass> {
        self.terms.iter().map(|t| t.classify_unit().class).collect()
    }
}

/// The X and Y companions of a reduced qubitized Hamiltonian: the same
/// basis change with X (resp. Y) in place of Z on the reduct qubit.
/// Both classify as qubitized and anticommute with the source on its
/// qubitized subspace.
pub fn xy_variants(
    reducer: &crate::synth::Reducer,
) -> crate::synth::Result<(ComplexMatrix, ComplexMatrix)> {
    let x = reducer.conjugated_with(Factor::X)?;
    let y = reducer.conjugated_with(Factor::Y)?;
    Ok((x, y))
}
