use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::BoolFnError;
use crate::exactlp::rational::format_rational;
use crate::exactlp::{parse_rational, Rational};

/// Exponent vector of a monomial, one entry per variable.
pub type Exponent = Vec<u32>;

/// Sparse polynomial with exact rational coefficients.
///
/// Zero coefficients are never stored, so two polynomials are equal
/// exactly when their term maps are.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PolynomialDoc", into = "PolynomialDoc")]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Exponent, Rational>,
    degree: u32,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
            degree: 0,
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    pub fn variable(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, Rational::one())
    }

    pub fn monomial(exponent: Exponent, coeff: Rational) -> Self {
        let nvars = exponent.len();
        Self::from_terms(nvars, [(exponent, coeff)])
    }

    /// Sums repeated exponents and drops zero coefficients.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponent, Rational)>) -> Self {
        let mut map: BTreeMap<Exponent, Rational> = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent length must equal variable count");
            *map.entry(e).or_insert_with(Rational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        let mut p = Self {
            nvars,
            terms: map,
            degree: 0,
        };
        p.refresh_degree();
        p
    }

    /// Polynomial `Σ coeffs[i] · basis[i]`.
    pub fn from_basis(nvars: usize, basis: &[Exponent], coeffs: &[Rational]) -> Self {
        Self::from_terms(nvars, basis.iter().cloned().zip(coeffs.iter().cloned()))
    }

    fn refresh_degree(&mut self) {
        self.degree = self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0);
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, Rational> {
        &self.terms
    }

    pub fn coeff(&self, e: &[u32]) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, point: &[i64]) -> Rational {
        assert_eq!(point.len(), self.nvars);
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            acc += c * Rational::from_integer(monomial_value(e, point));
        }
        acc
    }

    pub fn eval_rational(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars);
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    m *= num_traits::pow(x.clone(), k as usize);
                }
            }
            acc += m;
        }
        acc
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_terms(self.nvars, self.terms.iter().map(|(e, v)| (e.clone(), v * c)))
    }

    /// Clamps exponents to 1 on the flagged coordinates (`x² = x` on {0,1}).
    pub fn reduce_binary(&self, binary: &[bool]) -> Self {
        assert_eq!(binary.len(), self.nvars);
        Self::from_terms(
            self.nvars,
            self.terms.iter().map(|(e, c)| {
                let r = e
                    .iter()
                    .zip(binary)
                    .map(|(&k, &b)| if b { k.min(1) } else { k })
                    .collect();
                (r, c.clone())
            }),
        )
    }

    /// Multilinear reduction on every coordinate.
    pub fn multilinear(&self) -> Self {
        self.reduce_binary(&vec![true; self.nvars])
    }

    /// Re-indexes into `total` variables, placing variable `i` at `offset + i`.
    pub fn embed(&self, offset: usize, total: usize) -> Self {
        assert!(offset + self.nvars <= total);
        Self::from_terms(
            total,
            self.terms.iter().map(|(e, c)| {
                let mut f = vec![0; total];
                f[offset..offset + self.nvars].copy_from_slice(e);
                (f, c.clone())
            }),
        )
    }

    /// Univariate interpolant through `(x_i, y_i)` with distinct `x_i`,
    /// via Newton divided differences expanded into the monomial basis.
    pub fn interpolate(points: &[(Rational, Rational)]) -> Result<Self, BoolFnError> {
        let n = points.len();
        for i in 0..n {
            for j in 0..i {
                if points[i].0 == points[j].0 {
                    return Err(BoolFnError::Malformed("interpolation nodes must be distinct".into()));
                }
            }
        }
        let mut dd: Vec<Rational> = points.iter().map(|p| p.1.clone()).collect();
        for level in 1..n {
            for i in (level..n).rev() {
                dd[i] = (&dd[i] - &dd[i - 1]) / (&points[i].0 - &points[i - level].0);
            }
        }
        // Horner over the Newton form, coefficients low to high.
        let mut coeffs: Vec<Rational> = vec![];
        for i in (0..n).rev() {
            // coeffs := coeffs * (x - x_i) + dd[i]
            let xi = &points[i].0;
            let mut next = vec![Rational::zero(); coeffs.len() + 1];
            for (j, c) in coeffs.iter().enumerate() {
                next[j + 1] += c;
                next[j] -= c * xi;
            }
            next[0] += &dd[i];
            coeffs = next;
        }
        Ok(Self::univariate(&coeffs))
    }

    /// Univariate polynomial from coefficients, constant term first.
    pub fn univariate(coeffs: &[Rational]) -> Self {
        Self::from_terms(
            1,
            coeffs.iter().enumerate().map(|(j, c)| (vec![j as u32], c.clone())),
        )
    }

    /// Coefficients of a univariate polynomial, constant term first.
    pub fn univariate_coeffs(&self) -> Vec<Rational> {
        assert_eq!(self.nvars, 1);
        let mut out = vec![Rational::zero(); self.degree as usize + 1];
        for (e, c) in &self.terms {
            out[e[0] as usize] = c.clone();
        }
        out
    }
}

/// `Π x_c^{e_c}` at an integer point.
pub fn monomial_value(e: &[u32], point: &[i64]) -> BigInt {
    let mut v = BigInt::one();
    for (&k, &x) in e.iter().zip(point) {
        match (k, x) {
            (0, _) | (_, 1) => {}
            (_, 0) => return BigInt::zero(),
            (1, _) => v *= x,
            _ => v *= num_traits::pow(BigInt::from(x), k as usize),
        }
    }
    v
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars);
        Polynomial::from_terms(
            self.nvars,
            self.terms
                .iter()
                .chain(&rhs.terms)
                .map(|(e, c)| (e.clone(), c.clone())),
        )
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::from_terms(self.nvars, self.terms.iter().map(|(e, c)| (e.clone(), -c)))
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars);
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                let e = a.iter().zip(b).map(|(i, j)| i + j).collect();
                terms.push((e, x * y));
            }
        }
        Polynomial::from_terms(self.nvars, terms)
    }
}

#[derive(Serialize, Deserialize)]
struct PolynomialDoc {
    nvars: usize,
    degree: u32,
    terms: Vec<(Exponent, String)>,
}

impl From<Polynomial> for PolynomialDoc {
    fn from(p: Polynomial) -> Self {
        PolynomialDoc {
            nvars: p.nvars,
            degree: p.degree,
            terms: p.terms.iter().map(|(e, c)| (e.clone(), format_rational(c))).collect(),
        }
    }
}

impl TryFrom<PolynomialDoc> for Polynomial {
    type Error = BoolFnError;
    fn try_from(doc: PolynomialDoc) -> Result<Self, BoolFnError> {
        let mut terms = Vec::with_capacity(doc.terms.len());
        for (e, c) in doc.terms {
            if e.len() != doc.nvars {
                return Err(BoolFnError::DimensionMismatch {
                    expected: doc.nvars,
                    found: e.len(),
                });
            }
            let c = parse_rational(&c).map_err(|e| BoolFnError::Malformed(e.to_string()))?;
            terms.push((e, c));
        }
        let p = Polynomial::from_terms(doc.nvars, terms);
        if p.degree != doc.degree {
            return Err(BoolFnError::Malformed(format!(
                "stated degree {} but terms have degree {}",
                doc.degree, p.degree
            )));
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlp::rational::{int, ratio};

    #[test]
    fn arithmetic_and_degree() {
        let x = Polynomial::variable(2, 0);
        let y = Polynomial::variable(2, 1);
        let p = &(&x + &y) * &(&x - &y);
        assert_eq!(p.degree(), 2);
        assert_eq!(p.eval(&[3, 2]), int(5));
        assert!((&p - &p).is_zero());
    }

    #[test]
    fn multilinear_reduction() {
        let x = Polynomial::variable(1, 0);
        let p = &(&x * &x) * &x;
        assert_eq!(p.multilinear(), x);
    }

    #[test]
    fn interpolation_recovers_cubic() {
        let p = Polynomial::univariate(&[int(1), ratio(-1, 2), int(0), int(3)]);
        let pts: Vec<_> = (-2..2).map(|t| (int(t), p.eval(&[t]))).collect();
        assert_eq!(Polynomial::interpolate(&pts).unwrap(), p);
    }

    #[test]
    fn embed_shifts_variables() {
        let p = Polynomial::variable(1, 0).embed(2, 3);
        assert_eq!(p.eval(&[5, 7, 11]), int(11));
    }

    #[test]
    fn monomial_values() {
        assert_eq!(monomial_value(&[2, 1], &[-3, 2]), BigInt::from(18));
        assert_eq!(monomial_value(&[1, 1], &[0, 5]), BigInt::zero());
    }

    #[test]
    fn json_round_trip() {
        let p = Polynomial::from_terms(2, [(vec![1, 0], ratio(1, 3)), (vec![0, 2], int(-2))]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<Polynomial>(&s).unwrap(), p);
    }
}
