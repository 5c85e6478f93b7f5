use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{BoolFnError, BooleanFunction, Polynomial, PointSet};
use crate::exactlp::Rational;

/// `sign(c₀ + Σ cᵢxᵢ)` with integer coefficients.
///
/// Half-integer offsets are represented by doubling every coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Halfspace {
    /// `c₀, c₁, …, c_n`.
    #[serde(with = "crate::exactlp::rational::serde_bigint::vec")]
    coefficients: Vec<BigInt>,
}

impl Halfspace {
    /// Panics if `coefficients` is empty (the constant term is mandatory).
    pub fn new(coefficients: Vec<BigInt>) -> Self {
        assert!(!coefficients.is_empty(), "a halfspace needs a constant term");
        Self { coefficients }
    }

    pub fn from_i64(coefficients: &[i64]) -> Self {
        Self::new(coefficients.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    pub fn constant(&self) -> &BigInt {
        &self.coefficients[0]
    }

    pub fn weights(&self) -> &[BigInt] {
        &self.coefficients[1..]
    }

    /// `c₀ + Σ cᵢxᵢ` at an integer point.
    pub fn form_at(&self, p: &[i64]) -> BigInt {
        assert_eq!(p.len(), self.dim());
        let mut acc = self.coefficients[0].clone();
        for (c, &x) in self.weights().iter().zip(p) {
            if x != 0 {
                acc += c * x;
            }
        }
        acc
    }

    pub fn scaled(&self, factor: &BigInt) -> Self {
        Self::new(self.coefficients.iter().map(|c| c * factor).collect())
    }

    /// The linear form as a polynomial.
    pub fn to_polynomial(&self) -> Polynomial {
        let n = self.dim();
        let mut terms = vec![(vec![0; n], Rational::from_integer(self.coefficients[0].clone()))];
        for (i, c) in self.weights().iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            terms.push((e, Rational::from_integer(c.clone())));
        }
        Polynomial::from_terms(n, terms)
    }

    /// Machine-word coefficients, when every partial sum over `domain`
    /// provably fits an `i128`.
    fn small_coefficients(&self, domain: &PointSet) -> Option<Vec<i128>> {
        let bound: i128 = (0..domain.dim())
            .map(|c| {
                domain
                    .coordinate_values(c)
                    .iter()
                    .map(|v| v.unsigned_abs())
                    .max()
                    .unwrap_or(0) as i128
            })
            .max()
            .unwrap_or(0)
            .max(1);
        let coeffs: Vec<i64> = self.coefficients.iter().map(|c| c.to_i64()).collect::<Option<_>>()?;
        let total: i128 = coeffs.iter().map(|c| (*c as i128).abs()).sum::<i128>();
        total.checked_mul(bound)?;
        Some(coeffs.into_iter().map(i128::from).collect())
    }
}

/// Materializes `sign(c₀ + Σ cᵢxᵢ)` on `domain`.
pub fn halfspace_to_function(h: &Halfspace, domain: &PointSet) -> Result<BooleanFunction, BoolFnError> {
    if h.dim() != domain.dim() {
        return Err(BoolFnError::DimensionMismatch {
            expected: domain.dim(),
            found: h.dim(),
        });
    }
    let mut vanishing = None;
    let f = match h.small_coefficients(domain) {
        Some(c) => BooleanFunction::from_fn(domain.clone(), |p| {
            let v: i128 = c[0] + c[1..].iter().zip(p).map(|(a, &x)| a * x as i128).sum::<i128>();
            match v.signum() {
                0 => {
                    vanishing.get_or_insert_with(|| p.to_vec());
                    1
                }
                s => s as i8,
            }
        }),
        None => BooleanFunction::from_fn(domain.clone(), |p| {
            let v = h.form_at(p);
            if v.is_zero() {
                vanishing.get_or_insert_with(|| p.to_vec());
                1
            } else if v.is_positive() {
                1
            } else {
                -1
            }
        }),
    };
    match vanishing {
        Some(point) => Err(BoolFnError::VanishingForm { point }),
        None => Ok(f),
    }
}
