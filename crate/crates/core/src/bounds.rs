//! Computable error bounds: exact sampling variances and covariances,
//! their state-free bounds, Monte-Carlo cross-checks of measurement
//! programs, and the first-order Trotter commutator bound.
//!
//! For operators with unit spectrum the variance of a single
//! measurement lies in [0, 1] and every covariance magnitude is at
//! most one, so the combination weights alone bound the sampling error
//! of the full Hamiltonian.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::densemath::{max_abs_diff, spectral_norm, ComplexMatrix, StateVector};
use crate::opalg::LinearCombination;
use crate::synth::MeasurementProgram;
use crate::tolerances::TOL_UNITARY;

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("groups do not partition the {0} term indices")]
    BadPartition(usize),
    #[error("need at least two terms, got {0}")]
    TooFewTerms(usize),
    #[error(transparent)]
    Dense(#[from] crate::densemath::DenseError),
    #[error(transparent)]
    Opalg(#[from] crate::opalg::OpalgError),
    #[error(transparent)]
    Synth(#[from] crate::synth::SynthError),
}

pub type Result<T> = std::result::Result<T, BoundsError>;

/// Shot budget and the grouping of terms measurable under one shared
/// basis change.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotPlan {
    pub total_shots: u64,
    pub groups: Vec<Vec<usize>>,
}

impl ShotPlan {
    /// One group per term.
    pub fn ungrouped(term_count: usize, total_shots: u64) -> Self {
        Self {
            total_shots,
            groups: (0..term_count).map(|i| vec![i]).collect(),
        }
    }

    fn check_partition(&self, term_count: usize) -> Result<()> {
        let mut seen = vec![false; term_count];
        for group in &self.groups {
            for &i in group {
                if i >= term_count || seen[i] {
                    return Err(BoundsError::BadPartition(term_count));
                }
                seen[i] = true;
            }
        }
        if seen.iter().all(|&s| s) {
            Ok(())
        } else {
            Err(BoundsError::BadPartition(term_count))
        }
    }
}

/// Exact mean and variance of one Hermitian observable on a state.
pub fn exact_expectation_variance(h: &ComplexMatrix, psi: &StateVector) -> Result<(f64, f64)> {
    crate::densemath::require_hermitian(h, TOL_UNITARY)?;
    psi.check_normalized(TOL_UNITARY)?;
    let mean = psi.expectation(h).re;
    let h2 = h.matmul(h);
    let second = psi.expectation(&h2).re;
    Ok((mean, second - mean * mean))
}

/// Covariance of two Hermitian observables on a state.
pub fn covariance(
    hi: &ComplexMatrix,
    hj: &ComplexMatrix,
    psi: &StateVector,
) -> Result<Complex64> {
    if hi.rows() != hj.rows() {
        return Err(BoundsError::Dense(crate::densemath::DenseError::DimMismatch(
            hi.rows(),
            hi.cols(),
            hj.rows(),
            hj.cols(),
        )));
    }
    crate::densemath::require_hermitian(hi, TOL_UNITARY)?;
    crate::densemath::require_hermitian(hj, TOL_UNITARY)?;
    psi.check_normalized(TOL_UNITARY)?;
    let joint = psi.expectation(&hi.matmul(hj));
    let mi = psi.expectation(hi).re;
    let mj = psi.expectation(hj).re;
    Ok(joint - Complex64::new(mi * mj, 0.0))
}

/// Per-term statistics in a bounds report.
#[derive(Debug, Clone, Serialize)]
pub struct TermStats {
    pub notation: String,
    pub weight: f64,
    pub exact_mean: Option<f64>,
    pub exact_variance: Option<f64>,
}

/// First-order Trotter commutator summary.
#[derive(Debug, Clone, Serialize)]
pub struct TrotterStats {
    /// Spectral norm of the leading commutator sum.
    pub xi1_norm: f64,
    /// The weight-product bound it must respect.
    pub bound: f64,
}

/// Everything the bounds pipeline can report, JSON-serializable.
#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub terms: Vec<TermStats>,
    /// Sum of absolute weights: the ungrouped variance bound.
    pub weight_sum: f64,
    /// Grouped bound: sum over groups of the squared group weight.
    pub grouped_bound: f64,
    /// Exact grouped variance (needs a state).
    pub exact_grouped_variance: Option<f64>,
    /// Weight-linear combination of per-term variances.
    pub linear_weighted_variance: Option<f64>,
    /// Weight-squared combination (equal-shot estimator).
    pub square_weighted_variance: Option<f64>,
    pub trotter: Option<TrotterStats>,
}

/// Computes the state-free bounds and, when a state is given, the exact
/// grouped variance alongside both weighting conventions for the
/// per-term sum.
pub fn variance_bound(
    lch: &LinearCombination,
    plan: &ShotPlan,
    psi: Option<&StateVector>,
) -> Result<BoundsReport> {
    plan.check_partition(lch.terms.len())?;

    let mut units: Vec<(f64, ComplexMatrix)> = Vec::with_capacity(lch.terms.len());
    for term in &lch.terms {
        let (weight, _) = term.string.normalized();
        let unit = term
            .materialize()?
            .scale(Complex64::new(1.0 / weight, 0.0));
        units.push((weight, unit));
    }

    let weight_sum: f64 = units.iter().map(|(w, _)| w).sum();
    let grouped_bound: f64 = plan
        .groups
        .iter()
        .map(|group| {
            let s: f64 = group.iter().map(|&i| units[i].0).sum();
            s * s
        })
        .sum();

    let mut terms = Vec::with_capacity(units.len());
    let mut exact_grouped = None;
    let mut linear = None;
    let mut square = None;
    if let Some(psi) = psi {
        let mut stats = Vec::new();
        for (term, (weight, unit)) in lch.terms.iter().zip(&units) {
            let (mean, var) = exact_expectation_variance(unit, psi)?;
            stats.push(TermStats {
                notation: term.string.notation(),
                weight: *weight,
                exact_mean: Some(mean),
                exact_variance: Some(var),
            });
        }
        linear = Some(
            stats
                .iter()
                .map(|t| t.weight * t.exact_variance.unwrap())
                .sum(),
        );
        square = Some(
            stats
                .iter()
                .map(|t| t.weight * t.weight * t.exact_variance.unwrap())
                .sum(),
        );
        let mut grouped = 0.0;
        for group in &plan.groups {
            for &i in group {
                for &j in group {
                    let cov = covariance(&units[i].1, &units[j].1, psi)?;
                    grouped += units[i].0 * units[j].0 * cov.re;
                }
            }
        }
        exact_grouped = Some(grouped);
        terms = stats;
    } else {
        for (term, (weight, _)) in lch.terms.iter().zip(&units) {
            terms.push(TermStats {
                notation: term.string.notation(),
                weight: *weight,
                exact_mean: None,
                exact_variance: None,
            });
        }
    }

    Ok(BoundsReport {
        terms,
        weight_sum,
        grouped_bound,
        exact_grouped_variance: exact_grouped,
        linear_weighted_variance: linear,
        square_weighted_variance: square,
        trotter: trotter_bound(lch).ok().map(|(_, xi1_norm, bound)| TrotterStats {
            xi1_norm,
            bound,
        }),
    })
}

/// Samples a measurement program from its exact outcome distribution
/// with a seeded generator; returns the empirical mean and the
/// empirical per-shot variance of the contribution values.
pub fn monte_carlo_check(
    program: &MeasurementProgram,
    psi: &StateVector,
    shots: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    assert!(shots >= 100, "at least 100 shots");
    let probs = program.outcome_probabilities(psi)?;
    // Cumulative distribution for inverse sampling.
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in &probs {
        acc += p;
        cdf.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    for _ in 0..shots {
        let x: f64 = rng.gen_range(0.0..1.0);
        let outcome = cdf.partition_point(|&c| c < x).min(probs.len() - 1);
        let value = f64::from(program.contribution(outcome));
        sum += value;
        sum_sq += value * value;
    }
    let mean = sum / shots as f64;
    let variance = sum_sq / shots as f64 - mean * mean;
    Ok((mean, variance))
}

/// The leading Trotter commutator sum, its spectral norm, and the
/// weight-product bound. Also verifies the pairwise commutator bound
/// along the way.
pub fn trotter_bound(lch: &LinearCombination) -> Result<(ComplexMatrix, f64, f64)> {
    if lch.terms.len() < 2 {
        return Err(BoundsError::TooFewTerms(lch.terms.len()));
    }
    let mats: Vec<(f64, ComplexMatrix)> = lch
        .terms
        .iter()
        .map(|term| {
            let (weight, _) = term.string.normalized();
            Ok((weight, term.materialize()?))
        })
        .collect::<Result<_>>()?;

    let dim = mats[0].1.rows();
    let mut xi1 = ComplexMatrix::zeros(dim, dim);
    let mut bound = 0.0f64;
    for j in 0..mats.len() {
        for k in (j + 1)..mats.len() {
            let commutator = mats[j]
                .1
                .matmul(&mats[k].1)
                .sub(&mats[k].1.matmul(&mats[j].1))?;
            xi1 = xi1.add(&commutator.scale(Complex64::new(0.5, 0.0)))?;
            bound += mats[j].0 * mats[k].0;
        }
    }
    let xi1_norm = spectral_norm(&xi1)?;
    Ok((xi1, xi1_norm, bound))
}

/// Measured product-formula defect against the exact propagator.
pub fn trotter_defect(
    lch: &LinearCombination,
    t: f64,
    steps: usize,
    order: u8,
) -> Result<f64> {
    let plan = crate::synth::TrotterPlan {
        t,
        steps,
        order,
        term_order: None,
    };
    let circuit = crate::synth::trotter(lch, &plan)?;
    let approx = circuit.lower().map_err(crate::synth::SynthError::Circuit)?;
    let target = lch.materialize()?;
    let exact = crate::densemath::expm_hermitian(&target, t)?;
    Ok(max_abs_diff(&approx, &exact)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densemath::random_state;
    use crate::opalg::{Factor, OperatorString};
    use crate::synth::{measurement_program, reducer_from_string, MeasureMode};
    use rand::SeedableRng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn string_lc(strings: Vec<OperatorString>) -> LinearCombination {
        LinearCombination::from_strings(strings)
    }

    #[test]
    fn eigenstate_statistics() {
        let z = Factor::Z.matrix();
        let up = StateVector::basis_state(2, 0);
        let (mean, var) = exact_expectation_variance(&z, &up).unwrap();
        assert!((mean - 1.0).abs() < 1e-12);
        assert!(var.abs() < 1e-12);
    }

    #[test]
    fn balanced_superposition_saturates_variance() {
        let z = Factor::Z.matrix();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = StateVector::from_real(&[s, s]);
        let (mean, var) = exact_expectation_variance(&z, &plus).unwrap();
        assert!(mean.abs() < 1e-12);
        assert!((var - 1.0).abs() < 1e-12);
    }

    #[test]
    fn perp_state_gives_zero_mean_and_variance() {
        let h = OperatorString::with_hc(vec![Factor::Sigma, Factor::SigmaDagger])
            .materialize()
            .unwrap();
        let perp = StateVector::basis_state(4, 0);
        let (mean, var) = exact_expectation_variance(&h, &perp).unwrap();
        assert!(mean.abs() < 1e-12);
        assert!(var.abs() < 1e-12);
    }

    #[test]
    fn covariance_cases() {
        let x = Factor::X.matrix();
        let z = Factor::Z.matrix();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = StateVector::from_real(&[s, s]);

        // hi = hj: the variance.
        let var = covariance(&z, &z, &plus).unwrap();
        assert!((var - c(1.0, 0.0)).norm() < 1e-12);

        // X and Z on |+>: <XZ> - <X><Z> = 0 - 1*0 = 0.
        let cov = covariance(&x, &z, &plus).unwrap();
        assert!(cov.norm() < 1e-12);

        // commuting pair on a shared eigenstate
        let zi = OperatorString::bare(vec![Factor::Z, Factor::I])
            .materialize()
            .unwrap();
        let iz = OperatorString::bare(vec![Factor::I, Factor::Z])
            .materialize()
            .unwrap();
        let e0 = StateVector::basis_state(4, 0);
        assert!(covariance(&zi, &iz, &e0).unwrap().norm() < 1e-12);
    }

    #[test]
    fn inequality_chain_on_random_pairs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(71);
        let strings = [
            OperatorString::bare(vec![Factor::Z, Factor::X]),
            OperatorString::with_hc(vec![Factor::Sigma, Factor::SigmaDagger]),
            OperatorString::with_hc(vec![Factor::Sigma, Factor::Sigma]),
            OperatorString::bare(vec![Factor::X, Factor::N]),
        ];
        for _ in 0..50 {
            let psi = random_state(&mut rng, 4);
            for a in &strings {
                for b in &strings {
                    let ha = a.materialize().unwrap();
                    let hb = b.materialize().unwrap();
                    let (ma, va) = exact_expectation_variance(&ha, &psi).unwrap();
                    let (_, vb) = exact_expectation_variance(&hb, &psi).unwrap();
                    let second = psi.expectation(&ha.matmul(&ha)).re;
                    assert!(ma * ma <= second + 1e-10);
                    assert!(second <= 1.0 + 1e-10);
                    let cov = covariance(&ha, &hb, &psi).unwrap();
                    assert!(cov.norm() <= 1.0 + 1e-10);
                    assert!(cov.norm_sqr() <= va * vb + 1e-10);
                }
            }
        }
    }

    #[test]
    fn variance_bound_trivial_cases() {
        let lch = string_lc(vec![OperatorString::bare(vec![Factor::Z])]);
        let plan = ShotPlan::ungrouped(1, 1000);
        let report = variance_bound(&lch, &plan, None).unwrap();
        assert!((report.weight_sum - 1.0).abs() < 1e-12);
        assert!((report.grouped_bound - 1.0).abs() < 1e-12);

        // two unit terms in one group, eigenstate of both
        let lch = string_lc(vec![
            OperatorString::bare(vec![Factor::Z, Factor::I]),
            OperatorString::bare(vec![Factor::I, Factor::Z]),
        ]);
        let plan = ShotPlan {
            total_shots: 1000,
            groups: vec![vec![0, 1]],
        };
        let e0 = StateVector::basis_state(4, 0);
        let report = variance_bound(&lch, &plan, Some(&e0)).unwrap();
        assert!((report.grouped_bound - 4.0).abs() < 1e-12);
        assert!(report.exact_grouped_variance.unwrap().abs() < 1e-10);
    }

    #[test]
    fn grouped_variance_below_bound_on_random_states() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(72);
        let lch = string_lc(vec![
            OperatorString::new(vec![Factor::Z, Factor::X, Factor::I], c(0.8, 0.0), false),
            OperatorString::new(
                vec![Factor::Sigma, Factor::SigmaDagger, Factor::I],
                c(0.5, 0.0),
                true,
            ),
            OperatorString::new(vec![Factor::I, Factor::N, Factor::X], c(1.2, 0.0), false),
        ]);
        let plan = ShotPlan {
            total_shots: 1000,
            groups: vec![vec![0, 2], vec![1]],
        };
        for _ in 0..50 {
            let psi = random_state(&mut rng, 8);
            let report = variance_bound(&lch, &plan, Some(&psi)).unwrap();
            let exact = report.exact_grouped_variance.unwrap();
            assert!(exact <= report.grouped_bound + 1e-10);
            assert!(report.linear_weighted_variance.unwrap() <= report.weight_sum + 1e-10);
        }
    }

    #[test]
    fn bad_partitions_are_rejected() {
        let lch = string_lc(vec![
            OperatorString::bare(vec![Factor::Z]),
            OperatorString::bare(vec![Factor::X]),
        ]);
        for groups in [vec![vec![0]], vec![vec![0, 0], vec![1]], vec![vec![0, 2]]] {
            let plan = ShotPlan {
                total_shots: 100,
                groups,
            };
            assert!(matches!(
                variance_bound(&lch, &plan, None),
                Err(BoundsError::BadPartition(2))
            ));
        }
    }

    #[test]
    fn monte_carlo_eigenstate_and_determinism() {
        let r = reducer_from_string(&OperatorString::bare(vec![Factor::Z])).unwrap();
        let program = measurement_program(&r, MeasureMode::SingleQubit).unwrap();
        let up = StateVector::basis_state(2, 0);
        let (mean, var) = monte_carlo_check(&program, &up, 1000, 7).unwrap();
        assert!((mean - 1.0).abs() < 1e-12);
        assert!(var.abs() < 1e-12);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = StateVector::from_real(&[s, s]);
        let (m1, v1) = monte_carlo_check(&program, &plus, 100_000, 42).unwrap();
        let (m2, v2) = monte_carlo_check(&program, &plus, 100_000, 42).unwrap();
        assert_eq!(m1, m2);
        assert_eq!(v1, v2);
        assert!(v1 > 0.9 && v1 < 1.1);
        // 6 sigma window around the exact mean 0
        assert!(m1.abs() <= 6.0 * (1.0f64 / 100_000.0).sqrt());
    }

    #[test]
    fn trotter_bound_cases() {
        // commuting terms: zero commutator
        let commuting = string_lc(vec![
            OperatorString::bare(vec![Factor::Z, Factor::I]),
            OperatorString::bare(vec![Factor::I, Factor::Z]),
        ]);
        let (_, norm, bound) = trotter_bound(&commuting).unwrap();
        assert!(norm < 1e-12);
        assert!((bound - 1.0).abs() < 1e-12);

        // X and Z saturate the bound: xi1 = [X, Z]/2 has norm 1
        let xz = string_lc(vec![
            OperatorString::bare(vec![Factor::X]),
            OperatorString::bare(vec![Factor::Z]),
        ]);
        let (_, norm, bound) = trotter_bound(&xz).unwrap();
        assert!((norm - 1.0).abs() < 1e-9);
        assert!((bound - 1.0).abs() < 1e-12);

        let single = string_lc(vec![OperatorString::bare(vec![Factor::Z])]);
        assert!(matches!(
            trotter_bound(&single),
            Err(BoundsError::TooFewTerms(1))
        ));
    }

    #[test]
    fn commutator_norm_bound_random_sweep() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(73);
        use rand::Rng;
        let pool = [
            OperatorString::bare(vec![Factor::Z, Factor::X]),
            OperatorString::with_hc(vec![Factor::Sigma, Factor::N]),
            OperatorString::with_hc(vec![Factor::Sigma, Factor::Sigma]),
            OperatorString::bare(vec![Factor::X, Factor::Z]),
            OperatorString::bare(vec![Factor::N, Factor::X]),
        ];
        for _ in 0..30 {
            let mut strings = Vec::new();
            for _ in 0..3 {
                let mut s = pool[rng.gen_range(0..pool.len())].clone();
                s.coefficient = c(rng.gen_range(0.1..2.0), 0.0);
                strings.push(s);
            }
            let lch = string_lc(strings);
            let (_, norm, bound) = trotter_bound(&lch).unwrap();
            assert!(norm <= bound + 1e-10, "norm {norm} > bound {bound}");
        }
    }

    #[test]
    fn first_order_defect_halves_when_steps_double() {
        let lch = string_lc(vec![
            OperatorString::bare(vec![Factor::X]),
            OperatorString::bare(vec![Factor::Z]),
        ]);
        let t = 0.1;
        let e1 = trotter_defect(&lch, t, 10, 1).unwrap();
        let e2 = trotter_defect(&lch, t, 20, 1).unwrap();
        let ratio = e2 / e1;
        assert!(ratio > 0.4 && ratio < 0.6, "ratio {ratio}");
        // the bound of the leading term covers the measured defect
        let (_, norm, _) = trotter_bound(&lch).unwrap();
        assert!(e1 <= t * t / 10.0 * norm * 2.0 + 1e-8);
    }
}
