use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::moments::build_moment_matched;
use super::partition::{build_partition, sample_weights, verify_spectrum_bounds, SpectrumReport, WeightVector};
use super::reduce::reduction_consistency;
use super::{HardError, MomentMatchedFamily};
use crate::boolfn::{BooleanFunction, Halfspace, PointSet, Polynomial};
use crate::exactlp::Rational;
use crate::par::Execution;
use crate::rapprox::{rplus_bracket, rplus_sign_grid};

/// `sign(1/2 + Σ wᵢxᵢ − 2^{k+1} Σ yⱼ)` on `{0,1}^{2n}`, with every
/// coefficient doubled: `(1, 2w₁, …, 2w_n, −2^{k+2}, …, −2^{k+2})`.
pub fn hard_halfspace(w: &WeightVector) -> Halfspace {
    let mut c = vec![BigInt::one()];
    c.extend(w.weights.iter().map(|&x| BigInt::from(x) << 1));
    let y = -(BigInt::one() << (w.k + 2));
    c.extend(std::iter::repeat_n(y, w.n));
    Halfspace::new(c)
}

pub fn build_hard_halfspace(n: usize, k: u32, seed: u64) -> Halfspace {
    hard_halfspace(&sample_weights(n, k, seed))
}

/// The hard halfspace collapsed by symmetry: one grid coordinate per
/// distinct weight value (counting the `x`-bits carrying it, by increasing
/// value) and a last coordinate counting the `y`-bits.
///
/// This is the block symmetrization of the cube function after sorting
/// the `x`-coordinates by weight, so it has the same `R⁺` at every degree.
pub fn hard_function_symmetrized(w: &WeightVector) -> (BooleanFunction, Vec<u64>) {
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for &x in &w.weights {
        *counts.entry(x).or_default() += 1;
    }
    let values: Vec<u64> = counts.keys().copied().collect();
    let mut sizes: Vec<usize> = counts.values().copied().collect();
    sizes.push(w.n);
    let big = 1i128 << (w.k + 2);
    let f = BooleanFunction::from_fn(PointSet::grid(&sizes), |p| {
        let form: i128 = 1 + values.iter().zip(p).map(|(&v, &a)| 2 * v as i128 * a as i128).sum::<i128>()
            - big * p[values.len()] as i128;
        if form > 0 {
            1
        } else {
            -1
        }
    });
    (f, values)
}

/// Random polynomial in `(x₁, …, x_n, t)` of degree at most `d`, multilinear
/// in `x`, with small integer coefficients and at most `terms` terms.
pub fn random_reduction_polynomial(n: usize, d: u32, terms: usize, rng: &mut impl Rng) -> Polynomial {
    let mut out = Vec::with_capacity(terms);
    for _ in 0..terms {
        let deg = rng.random_range(0..=d);
        let j = rng.random_range(0..=deg);
        let mut e = vec![0u32; n + 1];
        let mut placed = 0;
        while placed < deg - j {
            let i = rng.random_range(0..n);
            if e[i] == 0 {
                e[i] = 1;
                placed += 1;
            }
        }
        e[n] = j;
        let c: i64 = rng.random_range(-5..=5);
        out.push((e, Rational::new(c.into(), rng.random_range(1i64..=4).into())));
    }
    out.iter()
        .fold(Polynomial::zero(n + 1), |acc, (e, c)| &acc + &Polynomial::monomial(e.clone(), c.clone()))
}

/// Tunable constants of a report; the asymptotic ones have no fixed value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportParams {
    /// Spectral order fraction `ε`.
    #[serde(with = "crate::exactlp::rational::serde_rational")]
    pub eps: Rational,
    #[serde(with = "crate::exactlp::rational::serde_rational")]
    pub zeta: Rational,
    pub cutoff: u32,
    /// Bracket degree `d`.
    pub degree: u32,
    #[serde(with = "crate::exactlp::rational::serde_rational")]
    pub tol: Rational,
    /// Random polynomials in the reduction battery.
    pub trials: usize,
    /// Largest `d` tried in the `degthr(f ∧ f)` lower bound.
    pub converse_dmax: u32,
}

impl Default for ReportParams {
    fn default() -> Self {
        Self {
            eps: Rational::new(1.into(), 4.into()),
            zeta: Rational::new(1.into(), 5.into()),
            cutoff: 1,
            degree: 1,
            tol: Rational::new(1.into(), 1024.into()),
            trials: 20,
            converse_dmax: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageOutcome {
    pub passed: bool,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketComparison {
    pub degree: u32,
    #[serde(with = "crate::exactlp::rational::serde_rational")]
    pub hard_lo: Rational,
    #[serde(with = "crate::exactlp::rational::serde_rational")]
    pub hard_hi: Rational,
    #[serde(with = "crate::exactlp::rational::serde_rational")]
    pub grid_lo: Rational,
    #[serde(with = "crate::exactlp::rational::serde_rational")]
    pub grid_hi: Rational,
    /// `hard_lo − (grid_lo − 2·tol)`; negative means a violation.
    #[serde(with = "crate::exactlp::rational::serde_rational")]
    pub margin: Rational,
    /// Whether the inequality is expected (moment matching succeeded with
    /// `cutoff ≥ degree`).
    pub applicable: bool,
}

/// One row of the `degthr(f ∧ f)` lower bound search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConverseRow {
    pub d: u32,
    #[serde(with = "crate::exactlp::rational::serde_rational")]
    pub lo_4d: Rational,
    #[serde(with = "crate::exactlp::rational::serde_rational")]
    pub lo_2d: Rational,
    /// `lo_4d + lo_2d ≥ 1`, which certifies `degthr(f ∧ f) > d`.
    pub certifies: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HardnessReport {
    pub n: usize,
    pub k: u32,
    pub seed: u64,
    pub params: ReportParams,
    pub weights: Vec<u64>,
    pub class_sizes: Vec<usize>,
    pub spectrum: SpectrumReport,
    pub moment_matching: StageOutcome,
    pub reduction: Option<StageOutcome>,
    pub brackets: BracketComparison,
    pub converse: Vec<ConverseRow>,
    /// Certified lower bound on `degthr(f ∧ f)`.
    pub degthr_conjunction_lower: u32,
    /// False only if a deterministic check failed, which would be a bug.
    pub consistent: bool,
}

/// A report with wall-clock stage timings kept apart from the
/// deterministic content.
#[derive(Debug, Clone)]
pub struct HardnessRun {
    pub report: HardnessReport,
    pub family: Option<MomentMatchedFamily>,
    pub timings: Vec<(String, std::time::Duration)>,
}

/// Largest `n` accepted by [`hardness_report`].
pub const MAX_REPORT_DIM: usize = 16;

pub fn hardness_report(
    n: usize,
    k: u32,
    seed: u64,
    params: &ReportParams,
    exec: Execution,
) -> Result<HardnessRun, HardError> {
    if n > MAX_REPORT_DIM {
        return Err(HardError::TooLarge(format!("report dimension {n} exceeds {MAX_REPORT_DIM}")));
    }
    if !params.tol.is_positive() {
        return Err(HardError::Malformed("tolerance must be positive".into()));
    }
    let mut timings = Vec::new();
    let mut clock = Instant::now();
    let mut lap = |name: &str, timings: &mut Vec<(String, std::time::Duration)>| {
        timings.push((name.to_string(), clock.elapsed()));
        clock = Instant::now();
    };

    let w = sample_weights(n, k, seed);
    let partition = build_partition(&w)?;
    lap("partition", &mut timings);
    let spectrum = verify_spectrum_bounds(&partition, &params.eps, &params.zeta, exec)?;
    lap("spectrum", &mut timings);

    let mut consistent = true;
    let (moment_matching, family) = match build_moment_matched(&partition, params.cutoff, exec) {
        Ok(f) => (StageOutcome { passed: true, detail: None }, Some(f)),
        Err(e @ (HardError::HypothesisViolated { .. } | HardError::EmptyClass { .. })) => (
            StageOutcome {
                passed: false,
                detail: Some(e.to_string()),
            },
            None,
        ),
        Err(e) => return Err(e),
    };
    lap("moment_matching", &mut timings);

    let reduction = match &family {
        None => None,
        Some(fam) => {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(u64::MAX);
            let d = params.cutoff.min(k);
            let mut failures = Vec::new();
            for trial in 0..params.trials {
                let poly = random_reduction_polynomial(n, d, 6, &mut rng);
                let check = reduction_consistency(&poly, fam)?;
                if !check.passed() {
                    failures.push(trial);
                }
            }
            consistent &= failures.is_empty();
            Some(StageOutcome {
                passed: failures.is_empty(),
                detail: (!failures.is_empty()).then(|| format!("failed trials {failures:?}")),
            })
        }
    };
    lap("reduction", &mut timings);

    let (f, _) = hard_function_symmetrized(&w);
    let id = format!("hard:{n},{k},{seed}");
    let hard = rplus_bracket(&f, params.degree, &params.tol, &id)?;
    let grid = rplus_sign_grid(1 << k, params.degree, &params.tol)?;
    let two_tol = &params.tol + &params.tol;
    let margin = &hard.lo - (&grid.lo - &two_tol);
    let applicable = family.is_some() && params.cutoff >= params.degree;
    if applicable && margin.is_negative() {
        consistent = false;
    }
    let brackets = BracketComparison {
        degree: params.degree,
        hard_lo: hard.lo,
        hard_hi: hard.hi,
        grid_lo: grid.lo,
        grid_hi: grid.hi,
        margin,
        applicable,
    };
    lap("brackets", &mut timings);

    let mut converse = Vec::new();
    let mut lower = 0;
    for d in 0..=params.converse_dmax {
        let lo_4d = rplus_bracket(&f, 4 * d, &params.tol, &id)?.lo;
        let lo_2d = rplus_bracket(&f, 2 * d, &params.tol, &id)?.lo;
        let certifies = &lo_4d + &lo_2d >= Rational::one();
        if certifies {
            lower = d + 1;
        }
        converse.push(ConverseRow {
            d,
            lo_4d,
            lo_2d,
            certifies,
        });
    }
    lap("converse", &mut timings);

    let report = HardnessReport {
        n,
        k,
        seed,
        params: params.clone(),
        weights: w.weights.clone(),
        class_sizes: partition.classes().iter().map(Vec::len).collect(),
        spectrum,
        moment_matching,
        reduction,
        brackets,
        converse,
        degthr_conjunction_lower: lower,
        consistent,
    };
    Ok(HardnessRun {
        report,
        family,
        timings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{block_symmetrize, halfspace_to_function, Block};

    #[test]
    fn hard_halfspace_signs() {
        let h = build_hard_halfspace(4, 1, 3);
        let f = halfspace_to_function(&h, &PointSet::cube(8)).unwrap();
        assert_eq!(f.value(0), 1);
        assert_eq!(f.value(1 << 4), -1);
        assert_eq!(h.coefficients()[5], BigInt::from(-8));
    }

    #[test]
    fn hard_halfspace_never_vanishes() {
        for n in 1..=10 {
            let h = build_hard_halfspace(n, 2, n as u64);
            assert!(halfspace_to_function(&h, &PointSet::cube(2 * n)).is_ok());
        }
    }

    #[test]
    fn symmetrized_matches_block_symmetrization() {
        let mut w = sample_weights(5, 1, 11);
        w.weights.sort_unstable();
        let cube = halfspace_to_function(&hard_halfspace(&w), &PointSet::cube(10)).unwrap();
        let (grid, values) = hard_function_symmetrized(&w);
        let mut blocks: Vec<Block> = values
            .iter()
            .map(|v| Block::Cube(w.weights.iter().filter(|&&x| x == *v).count()))
            .collect();
        blocks.push(Block::Cube(5));
        assert_eq!(block_symmetrize(&cube, &blocks).unwrap(), grid);
    }

    #[test]
    fn k_zero_report_is_consistent() {
        let params = ReportParams {
            trials: 3,
            converse_dmax: 0,
            ..ReportParams::default()
        };
        let run = hardness_report(6, 0, 1, &params, Execution::Sequential).unwrap();
        assert!(run.report.consistent);
        assert_eq!(run.report.brackets.grid_lo, Rational::from_integer(0.into()));
        assert_eq!(run.report.degthr_conjunction_lower, 1);
    }
}
