use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::HardError;
use crate::boolfn::{BooleanFunction, PointSet};
use crate::exactlp::rational::abs;
use crate::exactlp::{is_strictly_diagonally_dominant, solve_linear_system, Rational, RationalMatrix};

/// Which precondition of the construction failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    /// `Σᵢ |⟨f, χᵢ⟩| < 1/2`.
    CorrelationMass,
    /// `Σ_{j≠i} |⟨χᵢ, χⱼ⟩| ≤ 1/2` for row `index`.
    CrossCorrelation { index: usize },
}

impl std::fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Hypothesis::CorrelationMass => write!(f, "correlation mass"),
            Hypothesis::CrossCorrelation { index } => write!(f, "cross-correlation of row {index}"),
        }
    }
}

/// Data of the construction `μ(x) = c (1 − f(x) Σ αᵢ χᵢ(x))` with `M α = γ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroCorrelationCertificate {
    /// `M_ij = ⟨χᵢ, χⱼ⟩`.
    pub m: RationalMatrix,
    /// `γᵢ = ⟨f, χᵢ⟩`.
    #[serde(with = "crate::exactlp::rational::serde_rational::vec")]
    pub gamma: Vec<Rational>,
    #[serde(with = "crate::exactlp::rational::serde_rational::vec")]
    pub alpha: Vec<Rational>,
    /// The normalizer `c`.
    #[serde(with = "crate::exactlp::rational::serde_rational")]
    pub normalizer: Rational,
    /// `Σ |αᵢ|`, always below 1.
    #[serde(with = "crate::exactlp::rational::serde_rational")]
    pub alpha_l1: Rational,
}

/// Checks both hypotheses, solves `M α = γ`, and fixes the normalizer for a
/// set of `size` points.
pub(crate) fn solve_construction(
    size: usize,
    gamma: Vec<Rational>,
    m: RationalMatrix,
) -> Result<ZeroCorrelationCertificate, HardError> {
    let half = Rational::new(1.into(), 2.into());
    let mass: Rational = gamma.iter().map(abs).sum();
    if mass >= half {
        return Err(HardError::HypothesisViolated {
            class: None,
            hypothesis: Hypothesis::CorrelationMass,
            margin: mass - half,
        });
    }
    for i in 0..m.rows() {
        let off: Rational = (0..m.cols()).filter(|&j| j != i).map(|j| abs(&m[(i, j)])).sum();
        if off > half {
            return Err(HardError::HypothesisViolated {
                class: None,
                hypothesis: Hypothesis::CrossCorrelation { index: i },
                margin: off - &half,
            });
        }
    }
    // Every χᵢ is ±1, so M has unit diagonal and the row bound makes it dominant.
    assert!(is_strictly_diagonally_dominant(&m), "hypotheses imply strict dominance");
    let alpha = solve_linear_system(&m, &gamma).expect("strictly dominant matrices are nonsingular");
    let alpha_l1: Rational = alpha.iter().map(abs).sum();
    assert!(alpha_l1 < Rational::one(), "Σ|α| = {alpha_l1} is not below 1");
    // Σ_x (1 − f Σ αᵢχᵢ) = |X| (1 − α·γ).
    let dot: Rational = alpha.iter().zip(&gamma).map(|(a, g)| a * g).sum();
    let total = Rational::from_integer(size.into()) * (Rational::one() - dot);
    Ok(ZeroCorrelationCertificate {
        m,
        gamma,
        alpha,
        normalizer: total.recip(),
        alpha_l1,
    })
}

/// Distribution on `X` under which `f` is uncorrelated with every `χᵢ`.
///
/// Returns `μ` aligned with the points of `x`.
pub fn zero_correlation_distribution(
    x: &PointSet,
    f: &BooleanFunction,
    chis: &[BooleanFunction],
) -> Result<(Vec<Rational>, ZeroCorrelationCertificate), HardError> {
    if x.is_empty() {
        return Err(HardError::Malformed("empty point set".into()));
    }
    if f.domain() != x || chis.iter().any(|c| c.domain() != x) {
        return Err(HardError::Malformed("functions must be defined on the given point set".into()));
    }
    let size = x.len();
    let fv = f.values();
    let cv: Vec<Vec<i8>> = chis.iter().map(|c| c.values()).collect();
    let inner = |a: &[i8], b: &[i8]| -> Rational {
        let s: i64 = a.iter().zip(b).map(|(&u, &v)| (u * v) as i64).sum();
        Rational::new(s.into(), size.into())
    };
    let gamma: Vec<Rational> = cv.iter().map(|c| inner(&fv, c)).collect();
    let k = chis.len();
    let mut m = RationalMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let v = inner(&cv[i], &cv[j]);
            m[(j, i)] = v.clone();
            m[(i, j)] = v;
        }
    }
    let cert = solve_construction(size, gamma, m)?;
    let mu: Vec<Rational> = (0..size)
        .map(|p| {
            let s: Rational = cert
                .alpha
                .iter()
                .zip(&cv)
                .filter(|(a, _)| !a.is_zero())
                .map(|(a, c)| a * Rational::from_integer(c[p].into()))
                .sum();
            let fs = if fv[p] < 0 { -s } else { s };
            &cert.normalizer * (Rational::one() - fs)
        })
        .collect();
    check_zero_correlation(&mu, f, chis)?;
    Ok((mu, cert))
}

/// `μ ≥ 0`, `Σ μ = 1`, and `Σ_x μ(x) f(x) χᵢ(x) = 0` for every `i`, by
/// direct summation.
pub fn check_zero_correlation(mu: &[Rational], f: &BooleanFunction, chis: &[BooleanFunction]) -> Result<(), HardError> {
    if mu.len() != f.len() {
        return Err(HardError::Certificate("distribution has the wrong length".into()));
    }
    if let Some(i) = mu.iter().position(|m| m.is_negative()) {
        return Err(HardError::Certificate(format!("negative mass at point {i}")));
    }
    if mu.iter().sum::<Rational>() != Rational::one() {
        return Err(HardError::Certificate("masses do not sum to 1".into()));
    }
    for (i, c) in chis.iter().enumerate() {
        let corr: Rational = mu
            .iter()
            .enumerate()
            .filter(|(p, _)| f.value(*p) * c.value(*p) != 0)
            .map(|(p, m)| if f.value(p) == c.value(p) { m.clone() } else { -m })
            .sum();
        if !corr.is_zero() {
            return Err(HardError::Certificate(format!("correlation with character {i} is {corr}")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::parity_char;
    use crate::exactlp::rational::ratio;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn chi(x: &PointSet, t: u64) -> BooleanFunction {
        BooleanFunction::from_fn(x.clone(), |p| {
            let mask = p.iter().enumerate().fold(0u64, |m, (i, &b)| m | ((b as u64) << i));
            parity_char(t, mask)
        })
    }

    #[test]
    fn no_characters_gives_uniform() {
        let x = PointSet::cube(3);
        let f = chi(&x, 1);
        let (mu, cert) = zero_correlation_distribution(&x, &f, &[]).unwrap();
        assert!(mu.iter().all(|m| *m == ratio(1, 8)));
        assert_eq!(cert.alpha_l1, ratio(0, 1));
    }

    #[test]
    fn orthogonal_inputs_give_uniform() {
        let x = PointSet::cube(3);
        let f = chi(&x, 0b001);
        let chis = [chi(&x, 0b010), chi(&x, 0b100)];
        let (mu, cert) = zero_correlation_distribution(&x, &f, &chis).unwrap();
        assert!(cert.alpha.iter().all(Zero::is_zero));
        assert!(mu.iter().all(|m| *m == ratio(1, 8)));
    }

    #[test]
    fn correlated_function_is_rebalanced() {
        // f agrees with χ on 5 of 8 points: γ = 1/4, α = 1/4, c = 2/15,
        // so agreeing points get 1/10 and the other three 1/6.
        let x = PointSet::cube(3);
        let c = chi(&x, 0b001);
        let mut vals = c.values();
        for i in [0, 3, 6] {
            vals[i] = -vals[i];
        }
        let f = BooleanFunction::from_values(x.clone(), &vals).unwrap();
        let (mu, cert) = zero_correlation_distribution(&x, &f, &[c]).unwrap();
        assert_eq!(cert.gamma, vec![ratio(1, 4)]);
        assert_eq!(cert.alpha, vec![ratio(1, 4)]);
        assert_eq!(cert.normalizer, ratio(2, 15));
        for (i, m) in mu.iter().enumerate() {
            let expected = if [0, 3, 6].contains(&i) { ratio(1, 6) } else { ratio(1, 10) };
            assert_eq!(*m, expected);
        }
    }

    #[test]
    fn random_subset_instance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut found = 0;
        for _ in 0..200 {
            let mut pts: Vec<u64> = (0..16).collect();
            for i in (1..16).rev() {
                pts.swap(i, rng.random_range(0..=i));
            }
            let x = PointSet::from_points(
                4,
                pts[..12].iter().map(|&m| (0..4).map(|i| (m >> i & 1) as i64).collect()).collect(),
            )
            .unwrap();
            let f = BooleanFunction::from_fn(x.clone(), |_| if rng.random::<bool>() { 1 } else { -1 });
            let chis = [chi(&x, rng.random_range(1..16)), chi(&x, rng.random_range(1..16))];
            match zero_correlation_distribution(&x, &f, &chis) {
                Ok((mu, _)) => {
                    check_zero_correlation(&mu, &f, &chis).unwrap();
                    found += 1;
                }
                Err(HardError::HypothesisViolated { .. }) => {}
                Err(e) => panic!("{e}"),
            }
        }
        assert!(found > 0);
    }

    #[test]
    fn violated_mass_reports_margin() {
        let x = PointSet::cube(2);
        let f = chi(&x, 1);
        match zero_correlation_distribution(&x, &f, &[chi(&x, 1)]) {
            Err(HardError::HypothesisViolated { hypothesis, margin, .. }) => {
                assert_eq!(hypothesis, Hypothesis::CorrelationMass);
                assert_eq!(margin, ratio(1, 2));
            }
            other => panic!("{other:?}"),
        }
    }
}
