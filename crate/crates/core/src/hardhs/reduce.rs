use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::moments::MomentMatchedFamily;
use super::HardError;
use crate::boolfn::Polynomial;
use crate::exactlp::rational::common_denominator;
use crate::exactlp::Rational;

/// The points `s ∈ {1, …, 2^k, −1, …, −2^k}` in that order.
pub fn reduction_range(k: u32) -> Vec<i64> {
    let top = 1i64 << k;
    (1..=top).chain((1..=top).map(|s| -s)).collect()
}

/// `s mod 2^{k+1}` in `[0, 2^{k+1})`.
pub fn residue_of(s: i64, k: u32) -> u64 {
    s.rem_euclid(1i64 << (k + 1)) as u64
}

/// `ℓ(x, s) = 2^{−k−1} (Σ wᵢxᵢ − s)` as a polynomial in `(x₁, …, x_n, s)`.
pub fn linear_form(fam: &MomentMatchedFamily) -> Polynomial {
    let w = fam.partition.weights();
    let n = w.n;
    let scale = Rational::new(BigInt::one(), BigInt::one() << (w.k + 1));
    let mut terms: Vec<(Vec<u32>, Rational)> = w
        .weights
        .iter()
        .enumerate()
        .map(|(i, &wi)| {
            let mut e = vec![0; n + 1];
            e[i] = 1;
            (e, &scale * Rational::from_integer(wi.into()))
        })
        .collect();
    let mut e = vec![0; n + 1];
    e[n] = 1;
    terms.push((e, -scale));
    Polynomial::from_terms(n + 1, terms)
}

/// `Σ wᵢxᵢ − 2^{k+1} t`, which reduces to `P(s) = s`.
pub fn canonical_form(fam: &MomentMatchedFamily) -> Polynomial {
    let w = fam.partition.weights();
    let n = w.n;
    let mut terms: Vec<(Vec<u32>, Rational)> = w
        .weights
        .iter()
        .enumerate()
        .map(|(i, &wi)| {
            let mut e = vec![0; n + 1];
            e[i] = 1;
            (e, Rational::from_integer(wi.into()))
        })
        .collect();
    let mut e = vec![0; n + 1];
    e[n] = 1;
    terms.push((e, -Rational::from_integer(BigInt::one() << (w.k + 1))));
    Polynomial::from_terms(n + 1, terms)
}

fn check_input(poly: &Polynomial, fam: &MomentMatchedFamily) -> Result<(), HardError> {
    if poly.nvars() != fam.n() + 1 {
        return Err(HardError::Malformed(format!(
            "polynomial has {} variables, expected {} (x then t)",
            poly.nvars(),
            fam.n() + 1
        )));
    }
    if poly.degree() > fam.cutoff {
        return Err(HardError::DegreeExceedsCutoff {
            degree: poly.degree(),
            cutoff: fam.cutoff,
        });
    }
    Ok(())
}

/// `E_{μ_s}[p(x, ℓ(x, s))]` by summing over the support of `μ_{s mod 2^{k+1}}`.
pub fn class_expectation(poly: &Polynomial, fam: &MomentMatchedFamily, s: i64) -> Rational {
    let n = fam.n();
    let k = fam.k();
    let class = fam.class(residue_of(s, k));
    let w = &fam.partition.weights().weights;
    let d = poly.degree();
    // 2^{(k+1)d} D p(x, (L − s)/2^{k+1}) is an integer polynomial in (x, L − s).
    let den = common_denominator(poly.terms().values());
    let terms: Vec<(u64, u32, BigInt)> = poly
        .terms()
        .iter()
        .map(|(e, c)| {
            let mask = e[..n]
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .fold(0u64, |m, (i, _)| m | 1 << i);
            let j = e[n];
            let v = (c.numer() * (&den / c.denom())) << ((k + 1) * (d - j)) as usize;
            (mask, j, v)
        })
        .collect();
    let (nums, mu_den) = class.integer_weights();
    let mut total = BigInt::zero();
    let mut powers = vec![BigInt::one(); d as usize + 1];
    for (&x, mu) in class.points.iter().zip(&nums) {
        let x = x as u64;
        let form: i64 = w
            .iter()
            .enumerate()
            .filter(|(i, _)| x >> i & 1 == 1)
            .map(|(_, &wi)| wi as i64)
            .sum::<i64>()
            - s;
        let base = BigInt::from(form);
        for j in 1..powers.len() {
            powers[j] = &powers[j - 1] * &base;
        }
        let value: BigInt = terms
            .iter()
            .filter(|(m, _, _)| x & m == *m)
            .map(|(_, j, v)| v * &powers[*j as usize])
            .sum();
        total += mu * value;
    }
    let scale = (den * mu_den) << ((k + 1) * d) as usize;
    Rational::new(total, scale)
}

/// The univariate `P` with `E_{μ_s}[p(x, ℓ(x, s))] = P(s)` for every `s`
/// in [`reduction_range`].
///
/// `P` comes from substituting `t = ℓ(x, s)`, reducing `xᵢ² = xᵢ`, and
/// replacing each `x`-monomial by its common moment. It is then checked
/// against [`class_expectation`] at every `s`.
pub fn univariate_reduce(poly: &Polynomial, fam: &MomentMatchedFamily) -> Result<Polynomial, HardError> {
    check_input(poly, fam)?;
    let n = fam.n();
    let ell = linear_form(fam);
    let mut powers = vec![Polynomial::constant(n + 1, Rational::one())];
    let mut substituted = Polynomial::zero(n + 1);
    for (e, c) in poly.terms() {
        let j = e[n] as usize;
        while powers.len() <= j {
            let next = &powers[powers.len() - 1] * &ell;
            powers.push(next);
        }
        let mut ex = e.clone();
        ex[n] = 0;
        let term = &Polynomial::monomial(ex, c.clone()) * &powers[j];
        substituted = &substituted + &term;
    }
    let mut binary = vec![true; n + 1];
    binary[n] = false;
    let reduced = substituted.reduce_binary(&binary);
    let mut coeffs = vec![Rational::zero(); poly.degree() as usize + 1];
    for (e, c) in reduced.terms() {
        let mask = e[..n]
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0)
            .fold(0u64, |m, (i, _)| m | 1 << i);
        let moment = fam
            .moment(mask)
            .ok_or_else(|| HardError::Certificate(format!("no common moment for monomial {mask:#x}")))?;
        coeffs[e[n] as usize] += c * moment;
    }
    let p = Polynomial::univariate(&coeffs);
    for s in reduction_range(fam.k()) {
        if p.eval(&[s]) != class_expectation(poly, fam, s) {
            return Err(HardError::ReductionMismatch { s });
        }
    }
    Ok(p)
}

/// Interpolation test: `P` through the first `d + 1` points of the range
/// must match the class expectations at every remaining point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionCheck {
    pub nodes: Vec<i64>,
    pub interpolated: Polynomial,
    pub reduced: Polynomial,
    /// Points where the interpolant misses the expectation.
    pub mismatches: Vec<i64>,
}

impl ReductionCheck {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.interpolated == self.reduced
    }
}

pub fn reduction_consistency(poly: &Polynomial, fam: &MomentMatchedFamily) -> Result<ReductionCheck, HardError> {
    check_input(poly, fam)?;
    let range = reduction_range(fam.k());
    let d = poly.degree() as usize;
    if d + 1 > range.len() {
        return Err(HardError::Malformed(format!(
            "degree {d} needs more than the {} available points",
            range.len()
        )));
    }
    let values: Vec<Rational> = range.iter().map(|&s| class_expectation(poly, fam, s)).collect();
    let nodes = range[..=d].to_vec();
    let pts: Vec<(Rational, Rational)> = nodes
        .iter()
        .zip(&values)
        .map(|(&s, v)| (Rational::from_integer(s.into()), v.clone()))
        .collect();
    let interpolated = Polynomial::interpolate(&pts).map_err(|e| HardError::Malformed(e.to_string()))?;
    let mismatches = range
        .iter()
        .zip(&values)
        .skip(d + 1)
        .filter(|(&s, v)| interpolated.eval(&[s]) != **v)
        .map(|(&s, _)| s)
        .collect();
    let reduced = univariate_reduce(poly, fam)?;
    Ok(ReductionCheck {
        nodes,
        interpolated,
        reduced,
        mismatches,
    })
}
