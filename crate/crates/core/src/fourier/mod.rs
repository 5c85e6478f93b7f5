//! Exact Walsh–Hadamard analysis on the cube and correlations on subsets.
//!
//! Functions on `{0,1}^n` are tables indexed by the cube bitmask (bit 0 is
//! coordinate 1), and subsets `S` are bitmasks in the same layout.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::boolfn::{BooleanFunction, PointSet};
use crate::exactlp::rational::{common_denominator, format_rational};
use crate::exactlp::{parse_rational, Rational};

/// Largest cube dimension accepted by [`wht`].
pub const MAX_WHT_DIM: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FourierError {
    #[error("correlation over an empty point set")]
    EmptySet,
    #[error("table has {found} entries, expected 2^{n}")]
    TableSize { n: usize, found: usize },
    #[error("function is not defined on a full cube")]
    NotCube,
    #[error("dimension {0} exceeds the transform limit")]
    TooLarge(usize),
    #[error("point {0:?} lies outside a function's domain")]
    OutsideDomain(Vec<i64>),
    #[error("{0}")]
    Malformed(String),
}

/// Dense table of `f̂(S) = 2^{−n} Σ_x f(x) χ_S(x)` indexed by `S`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SpectrumDoc", into = "SpectrumDoc")]
pub struct FourierSpectrum {
    n: usize,
    coeffs: Vec<Rational>,
}

impl FourierSpectrum {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, s: usize) -> &Rational {
        &self.coeffs[s]
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Nonzero coefficients as `(S, f̂(S))`, by increasing `S`.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    pub fn sum_of_squares(&self) -> Rational {
        self.nonzero().map(|(_, c)| c * c).sum()
    }
}

#[derive(Serialize, Deserialize)]
struct SpectrumDoc {
    n: usize,
    coefficients: Vec<(usize, String)>,
}

impl From<FourierSpectrum> for SpectrumDoc {
    fn from(s: FourierSpectrum) -> Self {
        SpectrumDoc {
            n: s.n,
            coefficients: s.nonzero().map(|(m, c)| (m, format_rational(c))).collect(),
        }
    }
}

impl TryFrom<SpectrumDoc> for FourierSpectrum {
    type Error = FourierError;
    fn try_from(doc: SpectrumDoc) -> Result<Self, FourierError> {
        if doc.n > MAX_WHT_DIM {
            return Err(FourierError::TooLarge(doc.n));
        }
        let mut coeffs = vec![Rational::zero(); 1 << doc.n];
        for (m, c) in doc.coefficients {
            let slot = coeffs
                .get_mut(m)
                .ok_or_else(|| FourierError::Malformed(format!("subset mask {m} out of range")))?;
            *slot = parse_rational(&c).map_err(|e| FourierError::Malformed(e.to_string()))?;
        }
        Ok(FourierSpectrum { n: doc.n, coeffs })
    }
}

/// Unnormalized transform `Σ_x v(x) χ_S(x)` of an integer table, in place.
///
/// Magnitudes grow by at most a factor `2ⁿ`; the caller picks a width that
/// cannot overflow (see [`wht`]).
fn butterfly<T>(v: &mut [T])
where
    T: Clone + for<'a> std::ops::AddAssign<&'a T> + for<'a> std::ops::SubAssign<&'a T>,
{
    let len = v.len();
    let mut h = 1;
    while h < len {
        for block in v.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let sum = {
                    let mut s = a.clone();
                    s += b;
                    s
                };
                // b := a − b, a := a + b
                let mut diff = a.clone();
                diff -= b;
                *a = sum;
                *b = diff;
            }
        }
        h *= 2;
    }
}

/// Integer Walsh–Hadamard sums `Σ_x v(x) χ_S(x)` for every `S`.
pub fn wht_integers(n: usize, values: &[BigInt]) -> Vec<BigInt> {
    assert_eq!(values.len(), 1usize << n);
    let max_bits = values.iter().map(|v| v.bits()).max().unwrap_or(0);
    if max_bits + n as u64 <= 62 {
        let mut v: Vec<i64> = values.iter().map(|x| x.to_i64().expect("fits")).collect();
        butterfly(&mut v);
        v.into_iter().map(BigInt::from).collect()
    } else if max_bits + n as u64 <= 126 {
        let mut v: Vec<i128> = values.iter().map(|x| x.to_i128().expect("fits")).collect();
        butterfly(&mut v);
        v.into_iter().map(BigInt::from).collect()
    } else {
        let mut v = values.to_vec();
        butterfly(&mut v);
        v
    }
}

/// Same as [`wht_integers`] for machine integers with `|v| < 2^{62−n}`.
pub fn wht_i64(values: &[i64]) -> Vec<i64> {
    let mut v = values.to_vec();
    butterfly(&mut v);
    v
}

fn check_table(n: usize, len: usize) -> Result<(), FourierError> {
    if n > MAX_WHT_DIM {
        return Err(FourierError::TooLarge(n));
    }
    if len != 1usize << n {
        return Err(FourierError::TableSize { n, found: len });
    }
    Ok(())
}

/// Fourier spectrum of a rational table on `{0,1}^n` via the exact
/// butterfly over a common denominator.
pub fn wht(n: usize, values: &[Rational]) -> Result<FourierSpectrum, FourierError> {
    check_table(n, values.len())?;
    let l = common_denominator(values);
    let ints: Vec<BigInt> = values.iter().map(|v| v.numer() * (&l / v.denom())).collect();
    let sums = wht_integers(n, &ints);
    let scale = l << n;
    let coeffs = sums
        .into_iter()
        .map(|s| Rational::new(s, scale.clone()))
        .collect();
    Ok(FourierSpectrum { n, coeffs })
}

/// Values `f(x) = Σ_S f̂(S) χ_S(x)`.
pub fn inverse_wht(spectrum: &FourierSpectrum) -> Vec<Rational> {
    let n = spectrum.n;
    let l = common_denominator(&spectrum.coeffs);
    let ints: Vec<BigInt> = spectrum
        .coeffs
        .iter()
        .map(|v| v.numer() * (&l / v.denom()))
        .collect();
    wht_integers(n, &ints)
        .into_iter()
        .map(|s| Rational::new(s, l.clone()))
        .collect()
}

/// ±1 values of a cube function as rationals.
pub fn boolean_table(f: &BooleanFunction) -> Result<Vec<Rational>, FourierError> {
    f.domain().cube_dim().ok_or(FourierError::NotCube)?;
    Ok((0..f.len()).map(|i| Rational::from_integer(f.value(i).into())).collect())
}

pub fn wht_boolean(f: &BooleanFunction) -> Result<FourierSpectrum, FourierError> {
    let n = f.domain().cube_dim().ok_or(FourierError::NotCube)?;
    check_table(n, f.len())?;
    let ints: Vec<BigInt> = (0..f.len()).map(|i| BigInt::from(f.value(i))).collect();
    let scale = BigInt::from(1) << n;
    let coeffs = wht_integers(n, &ints)
        .into_iter()
        .map(|s| Rational::new(s, scale.clone()))
        .collect();
    Ok(FourierSpectrum { n, coeffs })
}

/// `|X′|⁻¹ Σ_{x∈X′} f(x) g(x)`.
pub fn correlation(
    f: impl Fn(&[i64]) -> Rational,
    g: impl Fn(&[i64]) -> Rational,
    subset: &PointSet,
) -> Result<Rational, FourierError> {
    if subset.is_empty() {
        return Err(FourierError::EmptySet);
    }
    let total: Rational = subset.iter().map(|x| f(&x) * g(&x)).sum();
    Ok(total / Rational::from_integer(subset.len().into()))
}

/// Correlation of two Boolean functions over a subset of both domains.
pub fn boolean_correlation(
    f: &BooleanFunction,
    g: &BooleanFunction,
    subset: &PointSet,
) -> Result<Rational, FourierError> {
    if subset.is_empty() {
        return Err(FourierError::EmptySet);
    }
    let mut total: i64 = 0;
    for x in subset.iter() {
        let a = f.at(&x).ok_or_else(|| FourierError::OutsideDomain(x.clone()))?;
        let b = g.at(&x).ok_or_else(|| FourierError::OutsideDomain(x.clone()))?;
        total += (a * b) as i64;
    }
    Ok(Rational::new(total.into(), subset.len().into()))
}

/// `Σ_S f̂(S)² = E_x[f(x)²]`, both sides exact.
pub fn parseval_check(values: &[Rational], spectrum: &FourierSpectrum) -> bool {
    if values.len() != 1usize << spectrum.n {
        return false;
    }
    let mean_sq: Rational =
        values.iter().map(|v| v * v).sum::<Rational>() / Rational::from_integer(values.len().into());
    spectrum.sum_of_squares() == mean_sq
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::parity_char;
    use crate::exactlp::rational::{int, ratio};

    fn chi_table(n: usize, t: usize) -> Vec<Rational> {
        (0..1usize << n).map(|x| int(parity_char(t as u64, x as u64) as i64)).collect()
    }

    #[test]
    fn character_has_indicator_spectrum() {
        let s = wht(4, &chi_table(4, 0b1010)).unwrap();
        for m in 0..16 {
            assert_eq!(s.coeff(m), &if m == 0b1010 { int(1) } else { int(0) });
        }
    }

    #[test]
    fn constant_function() {
        let s = wht(3, &vec![ratio(2, 3); 8]).unwrap();
        assert_eq!(s.coeff(0), &ratio(2, 3));
        assert_eq!(s.nonzero().count(), 1);
    }

    #[test]
    fn inversion_and_parseval() {
        let vals: Vec<Rational> = (0..8).map(|i| ratio(i * i - 3, i + 1)).collect();
        let s = wht(3, &vals).unwrap();
        assert_eq!(inverse_wht(&s), vals);
        assert!(parseval_check(&vals, &s));
        let zero = vec![int(0); 4];
        assert!(parseval_check(&zero, &wht(2, &zero).unwrap()));
    }

    #[test]
    fn correlations() {
        let cube = PointSet::cube(3);
        let chi = |t: u64| move |x: &[i64]| {
            let mask = x.iter().enumerate().fold(0u64, |m, (i, &b)| m | ((b as u64) << i));
            int(parity_char(t, mask) as i64)
        };
        assert_eq!(correlation(chi(5), chi(5), &cube).unwrap(), int(1));
        assert_eq!(correlation(chi(5), chi(3), &cube).unwrap(), int(0));
        let empty = PointSet::from_points(3, vec![]).unwrap();
        assert_eq!(correlation(chi(1), chi(1), &empty), Err(FourierError::EmptySet));
    }

    #[test]
    fn indicator_empty_coefficient_is_density() {
        let vals: Vec<Rational> = (0..16).map(|x| int((x % 3 == 0) as i64)).collect();
        let s = wht(4, &vals).unwrap();
        assert_eq!(s.coeff(0), &ratio(6, 16));
    }

    #[test]
    fn json_omits_zeros() {
        let s = wht(2, &chi_table(2, 1)).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"n":2,"coefficients":[[1,"1/1"]]}"#);
        assert_eq!(serde_json::from_str::<FourierSpectrum>(&text).unwrap(), s);
    }
}
