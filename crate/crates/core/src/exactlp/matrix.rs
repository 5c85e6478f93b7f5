use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{common_denominator, Rational};
use super::LinalgError;

/// Dense row-major matrix of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    #[serde(with = "super::rational::serde_rational::vec")]
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::from_integer(1.into());
        }
        m
    }

    /// Builds a matrix from row-major data, checking the entry count.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(LinalgError::DimensionMismatch {
                    expected: c,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .map(|(a, x)| a * x)
                    .sum()
            })
            .collect())
    }

    /// `vᵀ A` for a vector indexed by rows.
    pub fn left_mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>, LinalgError> {
        if v.len() != self.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.rows,
                found: v.len(),
            });
        }
        let mut out = vec![Rational::zero(); self.cols];
        for (i, y) in v.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                if !a.is_zero() {
                    *o += y * a;
                }
            }
        }
        Ok(out)
    }
}

impl Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

/// `|A_ii| > Σ_{j≠i} |A_ij|` for every row. Non-square input is never dominant.
pub fn is_strictly_diagonally_dominant(a: &RationalMatrix) -> bool {
    if !a.is_square() {
        return false;
    }
    (0..a.rows()).all(|i| {
        let off: Rational = a
            .row(i)
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, x)| x.abs())
            .sum();
        a[(i, i)].abs() > off
    })
}

/// Solves `A x = b` exactly.
///
/// Rows of `[A | b]` are scaled to integers and reduced with the
/// fraction-free (Bareiss) scheme, so every intermediate entry is an integer
/// minor and every division is exact. The pivot for column `k` is the first
/// row at or below `k` with a nonzero entry, which keeps the result
/// independent of any magnitude heuristic.
pub fn solve_linear_system(a: &RationalMatrix, b: &[Rational]) -> Result<Vec<Rational>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    if b.len() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    let w = n + 1;
    let mut m: Vec<BigInt> = Vec::with_capacity(n * w);
    for i in 0..n {
        let row = a.row(i);
        let scale = common_denominator(row.iter().chain(std::iter::once(&b[i])));
        for x in row.iter().chain(std::iter::once(&b[i])) {
            m.push(x.numer() * (&scale / x.denom()));
        }
    }

    let mut prev = BigInt::from(1);
    for k in 0..n {
        let pivot_row = (k..n).find(|&i| !m[i * w + k].is_zero());
        let Some(p) = pivot_row else {
            return Err(LinalgError::SingularMatrix);
        };
        if p != k {
            for j in 0..w {
                m.swap(p * w + j, k * w + j);
            }
        }
        let pivot = m[k * w + k].clone();
        for i in k + 1..n {
            let factor = m[i * w + k].clone();
            for j in k + 1..w {
                let v = (&pivot * &m[i * w + j] - &factor * &m[k * w + j]) / &prev;
                m[i * w + j] = v;
            }
            m[i * w + k] = BigInt::zero();
        }
        prev = pivot;
    }

    let mut x = vec![Rational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = Rational::from_integer(m[i * w + n].clone());
        for j in i + 1..n {
            if !m[i * w + j].is_zero() {
                acc -= &x[j] * &m[i * w + j];
            }
        }
        x[i] = acc / &m[i * w + i];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlp::rational::{int, ratio};

    fn mat(rows: &[&[Rational]]) -> RationalMatrix {
        RationalMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn identity_solve() {
        let x = solve_linear_system(&RationalMatrix::identity(2), &[int(3), ratio(-1, 2)]).unwrap();
        assert_eq!(x, vec![int(3), ratio(-1, 2)]);
    }

    #[test]
    fn two_by_two_solve() {
        let a = mat(&[&[int(2), int(1)], &[int(1), int(2)]]);
        let x = solve_linear_system(&a, &[int(1), int(1)]).unwrap();
        assert_eq!(x, vec![ratio(1, 3), ratio(1, 3)]);
        assert_eq!(a.mul_vec(&x).unwrap(), vec![int(1), int(1)]);
    }

    #[test]
    fn singular_is_reported() {
        let a = mat(&[&[int(1), int(1)], &[int(1), int(1)]]);
        assert_eq!(
            solve_linear_system(&a, &[int(1), int(2)]),
            Err(LinalgError::SingularMatrix)
        );
        assert_eq!(
            solve_linear_system(&a, &[int(0), int(0)]),
            Err(LinalgError::SingularMatrix)
        );
    }

    #[test]
    fn zero_leading_entry_needs_row_swap() {
        let a = mat(&[&[int(0), int(1)], &[int(1), int(0)]]);
        let x = solve_linear_system(&a, &[int(5), int(7)]).unwrap();
        assert_eq!(x, vec![int(7), int(5)]);
    }

    #[test]
    fn non_square_rejected() {
        let a = RationalMatrix::zeros(2, 3);
        assert!(matches!(
            solve_linear_system(&a, &[int(0), int(0)]),
            Err(LinalgError::NotSquare { .. })
        ));
        assert!(!is_strictly_diagonally_dominant(&a));
    }

    #[test]
    fn dominance_examples() {
        assert!(is_strictly_diagonally_dominant(&RationalMatrix::identity(3)));
        let ones = mat(&[&[int(1), int(1)], &[int(1), int(1)]]);
        assert!(!is_strictly_diagonally_dominant(&ones));
        let q = mat(&[&[int(1), ratio(1, 4)], &[ratio(1, 4), int(1)]]);
        assert!(is_strictly_diagonally_dominant(&q));
        let neg = mat(&[&[int(-3), int(2)], &[ratio(-1, 2), ratio(2, 3)]]);
        assert!(is_strictly_diagonally_dominant(&neg));
    }

    #[test]
    fn dimension_mismatch() {
        assert!(RationalMatrix::from_vec(2, 2, vec![int(1)]).is_err());
        assert!(RationalMatrix::from_rows(vec![vec![int(1)], vec![int(1), int(2)]]).is_err());
    }
}
