use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::partition::ResidueClassPartition;
use super::zerocorr::{solve_construction, ZeroCorrelationCertificate};
use super::HardError;
use crate::boolfn::parity_char;
use crate::exactlp::rational::common_denominator;
use crate::exactlp::{Rational, RationalMatrix};
use crate::par::{self, Execution};

/// `μ_s` on the class `X_s`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDistribution {
    pub s: u64,
    /// Support points (the members of `X_s`) as cube bitmasks.
    pub points: Vec<u32>,
    #[serde(with = "crate::exactlp::rational::serde_rational::vec")]
    pub weights: Vec<Rational>,
    pub certificate: ZeroCorrelationCertificate,
}

impl ClassDistribution {
    /// `(numerators, denominator)` with `μ(x) = numerators[i] / denominator`.
    pub fn integer_weights(&self) -> (Vec<BigInt>, BigInt) {
        let den = common_denominator(&self.weights);
        let nums = self.weights.iter().map(|w| w.numer() * (&den / w.denom())).collect();
        (nums, den)
    }

    /// `E_μ[Π_{i∈A} xᵢ]` by direct summation.
    pub fn moment(&self, a: u64) -> Rational {
        self.weights
            .iter()
            .zip(&self.points)
            .filter(|(_, &x)| x as u64 & a == a)
            .map(|(w, _)| w)
            .sum()
    }

    /// `μ̂(T) = 2^{−n} Σ_x μ(x) χ_T(x)` by direct summation.
    pub fn fourier_coefficient(&self, n: usize, t: u64) -> Rational {
        let s: Rational = self
            .weights
            .iter()
            .zip(&self.points)
            .map(|(w, &x)| if parity_char(t, x as u64) < 0 { -w } else { w.clone() })
            .sum();
        s / Rational::from_integer(BigInt::one() << n)
    }
}

/// Distributions `μ_s`, one per residue class, whose low-degree moments coincide.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentMatchedFamily {
    pub partition: ResidueClassPartition,
    pub cutoff: u32,
    /// The family `𝒮` of nonempty subsets of size at most `cutoff`, as masks.
    pub family: Vec<u64>,
    pub classes: Vec<ClassDistribution>,
    /// Common values `E_{μ_s}[Π_{i∈A} xᵢ]` for `|A| ≤ cutoff`.
    #[serde(with = "crate::exactlp::rational::serde_rational::sparse")]
    pub moments: Vec<(usize, Rational)>,
}

impl MomentMatchedFamily {
    pub fn n(&self) -> usize {
        self.partition.n()
    }

    pub fn k(&self) -> u32 {
        self.partition.k()
    }

    pub fn class(&self, s: u64) -> &ClassDistribution {
        &self.classes[s as usize]
    }

    /// Common moment of the monomial with variable set `a`, if `|a| ≤ cutoff`.
    pub fn moment(&self, a: u64) -> Option<&Rational> {
        self.moments
            .binary_search_by_key(&(a as usize), |(m, _)| *m)
            .ok()
            .map(|i| &self.moments[i].1)
    }
}

/// Nonempty masks over `n` coordinates with at most `cutoff` bits, by size
/// and then value.
pub fn low_order_family(n: usize, cutoff: u32) -> Vec<u64> {
    let mut v: Vec<u64> = (1..1u64 << n).filter(|t| t.count_ones() <= cutoff).collect();
    v.sort_by_key(|&t| (t.count_ones(), t));
    v
}

fn class_distribution(
    p: &ResidueClassPartition,
    s: u64,
    family: &[u64],
) -> Result<ClassDistribution, HardError> {
    let points = p.class(s).to_vec();
    if points.is_empty() {
        return Err(HardError::EmptyClass { s });
    }
    let size = points.len();
    let sums = p.class_sums(s);
    let corr = |t: u64| Rational::new(sums[t as usize].into(), size.into());
    // ⟨1, χ_S⟩ = W(S)/|X_s| and ⟨χ_S, χ_T⟩ = W(S ⊕ T)/|X_s|.
    let gamma: Vec<Rational> = family.iter().map(|&t| corr(t)).collect();
    let k = family.len();
    let mut m = RationalMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            m[(i, j)] = corr(family[i] ^ family[j]);
        }
    }
    let certificate = solve_construction(size, gamma, m).map_err(|e| match e {
        HardError::HypothesisViolated { hypothesis, margin, .. } => HardError::HypothesisViolated {
            class: Some(s),
            hypothesis,
            margin,
        },
        other => other,
    })?;
    // μ(x) = c (1 − Σ α_S χ_S(x)) over the common denominator of α.
    let l = common_denominator(&certificate.alpha);
    let scaled: Vec<(u64, BigInt)> = family
        .iter()
        .zip(&certificate.alpha)
        .filter(|(_, a)| !a.is_zero())
        .map(|(&t, a)| (t, a.numer() * (&l / a.denom())))
        .collect();
    let unit = &certificate.normalizer / Rational::from_integer(l.clone());
    let weights = points
        .iter()
        .map(|&x| {
            let mut v = l.clone();
            for (t, a) in &scaled {
                if parity_char(*t, x as u64) < 0 {
                    v += a;
                } else {
                    v -= a;
                }
            }
            &unit * Rational::from_integer(v)
        })
        .collect();
    Ok(ClassDistribution {
        s,
        points,
        weights,
        certificate,
    })
}

/// Builds `μ_s` for every class and checks the family exactly.
///
/// Two formulations are checked and must agree: equal moments of every
/// monomial of degree `≤ cutoff` across classes, and equal Fourier
/// coefficients of every order `≤ cutoff` across classes.
pub fn build_moment_matched(
    p: &ResidueClassPartition,
    cutoff: u32,
    exec: Execution,
) -> Result<MomentMatchedFamily, HardError> {
    let n = p.n();
    let family = low_order_family(n, cutoff);
    let classes = par::map_range(exec, 0..p.modulus() as usize, |s| class_distribution(p, s as u64, &family))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;

    for c in &classes {
        if c.weights.iter().any(Signed::is_negative) || c.weights.iter().sum::<Rational>() != Rational::one() {
            return Err(HardError::Certificate(format!("μ_{} is not a distribution", c.s)));
        }
    }
    let mut monomials = vec![0u64];
    monomials.extend(&family);
    let table: Vec<Vec<Rational>> = par::map(exec, &classes, |c| monomials.iter().map(|&a| c.moment(a)).collect());
    let moments_agree = table.iter().all(|row| row == &table[0]);
    let spectra: Vec<Vec<Rational>> = par::map(exec, &classes, |c| {
        monomials.iter().map(|&t| c.fourier_coefficient(n, t)).collect()
    });
    let spectra_agree = spectra.iter().all(|row| row == &spectra[0]);
    let spectra_vanish = spectra
        .iter()
        .all(|row| row[1..].iter().all(Zero::is_zero));
    if moments_agree != spectra_agree {
        return Err(HardError::Certificate(
            "moment and spectral formulations of the matching disagree".into(),
        ));
    }
    if !moments_agree || !spectra_vanish {
        return Err(HardError::Certificate("low-order moments differ across classes".into()));
    }
    let moments = monomials
        .iter()
        .zip(&table[0])
        .map(|(&a, v)| (a as usize, v.clone()))
        .collect::<std::collections::BTreeMap<_, _>>()
        .into_iter()
        .collect();
    Ok(MomentMatchedFamily {
        partition: p.clone(),
        cutoff,
        family,
        classes,
        moments,
    })
}
