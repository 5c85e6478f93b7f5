//! Exact LP feasibility with checkable certificates.
//!
//! For `A v ≥ b` with free `v`, the solver runs phase 1 of the simplex
//! method on the Farkas alternative
//!
//! ```text
//!     Aᵀ y = 0,   bᵀ y = 1,   y ≥ 0
//! ```
//!
//! whose basis has only `n + 1` rows (`n` = number of variables), which is
//! the small side for every LP in this crate. If phase 1 drives the
//! artificials to zero, the basic `y` is a Farkas certificate. Otherwise the
//! optimal simplex multipliers `π` satisfy `[A b]ᵀ(−π) ≥ 0` with
//! `π_{n+1} > 0`, and `v = −π_{1..n} / π_{n+1}` is a feasible point.
//!
//! The basis inverse is kept fraction-free: `B⁻¹ = N / D` with `N = adj(B)`
//! and `D = det(B)` integral, so a pivot is one exact integer division per
//! entry. The entering column has the largest reduced cost relative to its
//! ℓ₁ norm, and the leaving row follows the lexicographic ratio test. The
//! lexicographic rule alone rules out cycling, whatever the entering rule,
//! and it stalls far less than Bland's rule on this highly degenerate
//! system.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::guide::float_basis;
use super::matrix::RationalMatrix;
use super::rational::{common_denominator, Rational};
use super::{CertificateError, LinalgError};

/// Constraints `A v ≥ b`, one per row of `A`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearProgram {
    a: RationalMatrix,
    #[serde(with = "super::rational::serde_rational::vec")]
    b: Vec<Rational>,
}

impl LinearProgram {
    pub fn new(a: RationalMatrix, b: Vec<Rational>) -> Result<Self, LinalgError> {
        if a.rows() != b.len() {
            return Err(LinalgError::DimensionMismatch {
                expected: a.rows(),
                found: b.len(),
            });
        }
        Ok(Self { a, b })
    }

    /// Builds an LP from row vectors, all of length `num_vars`.
    pub fn from_rows(
        num_vars: usize,
        rows: Vec<(Vec<Rational>, Rational)>,
    ) -> Result<Self, LinalgError> {
        let m = rows.len();
        let mut data = Vec::with_capacity(m * num_vars);
        let mut b = Vec::with_capacity(m);
        for (row, rhs) in rows {
            if row.len() != num_vars {
                return Err(LinalgError::DimensionMismatch {
                    expected: num_vars,
                    found: row.len(),
                });
            }
            data.extend(row);
            b.push(rhs);
        }
        Self::new(RationalMatrix::from_vec(m, num_vars, data)?, b)
    }

    pub fn a(&self) -> &RationalMatrix {
        &self.a
    }

    pub fn b(&self) -> &[Rational] {
        &self.b
    }

    pub fn num_constraints(&self) -> usize {
        self.a.rows()
    }

    pub fn num_vars(&self) -> usize {
        self.a.cols()
    }
}

/// Result of [`check_feasible`]; both variants carry an exactly checkable witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FeasibilityOutcome {
    Feasible {
        #[serde(with = "super::rational::serde_rational::vec")]
        point: Vec<Rational>,
    },
    /// `y ≥ 0`, `yᵀA = 0`, `yᵀb > 0`.
    Infeasible {
        #[serde(with = "super::rational::serde_rational::vec")]
        certificate: Vec<Rational>,
    },
}

impl FeasibilityOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityOutcome::Feasible { .. })
    }

    pub fn point(&self) -> Option<&[Rational]> {
        match self {
            FeasibilityOutcome::Feasible { point } => Some(point),
            FeasibilityOutcome::Infeasible { .. } => None,
        }
    }

    pub fn certificate(&self) -> Option<&[Rational]> {
        match self {
            FeasibilityOutcome::Infeasible { certificate } => Some(certificate),
            FeasibilityOutcome::Feasible { .. } => None,
        }
    }

    /// Re-checks the embedded witness against `lp` with exact arithmetic.
    pub fn verify(&self, lp: &LinearProgram) -> Result<(), CertificateError> {
        match self {
            FeasibilityOutcome::Feasible { point } => verify_point(lp, point),
            FeasibilityOutcome::Infeasible { certificate } => verify_farkas(lp, certificate),
        }
    }
}

/// Checks `A v ≥ b` row by row.
pub fn verify_point(lp: &LinearProgram, point: &[Rational]) -> Result<(), CertificateError> {
    if point.len() != lp.num_vars() {
        return Err(CertificateError::WrongLength {
            expected: lp.num_vars(),
            found: point.len(),
        });
    }
    for i in 0..lp.num_constraints() {
        let lhs: Rational = lp
            .a
            .row(i)
            .iter()
            .zip(point)
            .filter(|(a, _)| !a.is_zero())
            .map(|(a, v)| a * v)
            .sum();
        if lhs < lp.b[i] {
            return Err(CertificateError::ViolatedConstraint { row: i });
        }
    }
    Ok(())
}

/// Checks `y ≥ 0`, `yᵀA = 0` and `yᵀb > 0`.
pub fn verify_farkas(lp: &LinearProgram, y: &[Rational]) -> Result<(), CertificateError> {
    if y.len() != lp.num_constraints() {
        return Err(CertificateError::WrongLength {
            expected: lp.num_constraints(),
            found: y.len(),
        });
    }
    if let Some(row) = y.iter().position(|v| v.is_negative()) {
        return Err(CertificateError::NegativeMultiplier { row });
    }
    let combo = lp.a.left_mul_vec(y).expect("length checked above");
    if let Some(column) = combo.iter().position(|c| !c.is_zero()) {
        return Err(CertificateError::NonzeroCombination { column });
    }
    let bound: Rational = y
        .iter()
        .zip(&lp.b)
        .filter(|(v, _)| !v.is_zero())
        .map(|(v, b)| v * b)
        .sum();
    if !bound.is_positive() {
        return Err(CertificateError::NonpositiveBound);
    }
    Ok(())
}

/// Decides feasibility of `A v ≥ b` exactly.
///
/// The returned witness has already been re-verified; a failed internal
/// check is a solver bug and panics.
pub fn check_feasible(lp: &LinearProgram) -> FeasibilityOutcome {
    let outcome = solve(lp);
    if let Err(e) = outcome.verify(lp) {
        panic!("exact LP produced an invalid certificate: {e}");
    }
    outcome
}

fn solve(lp: &LinearProgram) -> FeasibilityOutcome {
    let m = lp.num_constraints();
    let n = lp.num_vars();
    if m == 0 {
        return FeasibilityOutcome::Feasible {
            point: vec![Rational::zero(); n],
        };
    }

    // Integer rows: row'_i = scale_i * (A_i | b_i).
    let rows = n + 1;
    let mut scales = Vec::with_capacity(m);
    let mut columns: Vec<Vec<(usize, BigInt)>> = Vec::with_capacity(m);
    for i in 0..m {
        let entries: Vec<&Rational> = lp.a.row(i).iter().chain(std::iter::once(&lp.b[i])).collect();
        let lcm = common_denominator(entries.iter().copied());
        let ints: Vec<BigInt> = entries.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
        let g = ints.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
        let g = if g.is_zero() { BigInt::one() } else { g };
        scales.push(Rational::new(lcm, g.clone()));
        columns.push(
            ints.into_iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(k, v)| (k, v / &g))
                .collect(),
        );
    }

    let mut tableau = float_basis(&columns, rows)
        .and_then(|basis| FractionFreeBasis::from_basis(rows, m, basis, &columns))
        .unwrap_or_else(|| FractionFreeBasis::new(rows, m));
    let norms: Vec<BigInt> = columns.iter().map(|c| c.iter().map(|(_, v)| v.abs()).sum()).collect();
    while let Some(j) = tableau.entering(&columns, &norms) {
        let u = tableau.column(&columns[j]);
        let r = tableau
            .leaving(&u)
            .expect("phase-1 objective is bounded below by zero");
        tableau.pivot(r, j, u);
    }

    let pi = tableau.multipliers();
    if pi[n].is_zero() {
        let mut certificate = vec![Rational::zero(); m];
        for (i, &var) in tableau.basis.iter().enumerate() {
            if var < m {
                let value = Rational::new(tableau.inv[i * rows + rows - 1].clone(), tableau.det.clone());
                certificate[var] = value * &scales[var];
            }
        }
        FeasibilityOutcome::Infeasible { certificate }
    } else {
        let point = (0..n)
            .map(|k| Rational::new(-pi[k].clone(), pi[n].clone()))
            .collect();
        FeasibilityOutcome::Feasible { point }
    }
}

/// Basis of the phase-1 problem `[M | I] (y, a) = e_{n+1}`, with
/// `B⁻¹ = inv / det` stored as integers.
struct FractionFreeBasis {
    rows: usize,
    /// Number of structural (`y`) columns; artificial `i` has index `m + i`.
    m: usize,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    inv: Vec<BigInt>,
    det: BigInt,
    /// Columns of the starting basis `B₀` when it is not the identity. The
    /// perturbation behind the lexicographic rule is `B₀ (ε, ε², …)`, so
    /// ties compare rows of `B⁻¹ B₀`.
    origin: Option<Vec<Vec<(usize, BigInt)>>>,
}

impl FractionFreeBasis {
    fn new(rows: usize, m: usize) -> Self {
        let mut inv = vec![BigInt::zero(); rows * rows];
        for i in 0..rows {
            inv[i * rows + i] = BigInt::one();
        }
        Self {
            rows,
            m,
            basis: (m..m + rows).collect(),
            in_basis: vec![false; m],
            inv,
            det: BigInt::one(),
            origin: None,
        }
    }

    /// Starts from a suggested basis. Returns `None` unless the basis is
    /// nonsingular and its basic solution is nonnegative.
    fn from_basis(rows: usize, m: usize, basis: Vec<usize>, columns: &[Vec<(usize, BigInt)>]) -> Option<Self> {
        let mut seen = vec![false; m + rows];
        if basis.len() != rows || basis.iter().any(|&v| v >= m + rows || std::mem::replace(&mut seen[v], true)) {
            return None;
        }
        let origin: Vec<Vec<(usize, BigInt)>> = basis
            .iter()
            .map(|&v| if v >= m { vec![(v - m, BigInt::one())] } else { columns[v].clone() })
            .collect();
        let (inv, det) = adjugate(rows, &origin)?;
        let last = rows - 1;
        if (0..rows).any(|i| inv[i * rows + last].is_negative() != det.is_negative() && !inv[i * rows + last].is_zero()) {
            return None;
        }
        let mut in_basis = vec![false; m];
        for &v in basis.iter().filter(|&&v| v < m) {
            in_basis[v] = true;
        }
        Some(Self {
            rows,
            m,
            basis,
            in_basis,
            inv,
            det,
            origin: Some(origin),
        })
    }

    /// Entry `k` of the lexicographic key of row `i`: the basic value
    /// first, then the perturbation coefficients.
    fn lex_key(&self, i: usize, k: usize) -> BigInt {
        let rows = self.rows;
        let row = &self.inv[i * rows..(i + 1) * rows];
        match (&self.origin, k) {
            (_, 0) => row[rows - 1].clone(),
            (None, k) => row[k - 1].clone(),
            (Some(cols), k) => cols[k - 1].iter().map(|(r, v)| &row[*r] * v).sum(),
        }
    }

    /// Numerators of `π = c_B B⁻¹` over the common denominator `det`.
    fn multipliers(&self) -> Vec<BigInt> {
        let mut pi = vec![BigInt::zero(); self.rows];
        for (i, &var) in self.basis.iter().enumerate() {
            if var >= self.m {
                for (p, x) in pi.iter_mut().zip(&self.inv[i * self.rows..(i + 1) * self.rows]) {
                    *p += x;
                }
            }
        }
        pi
    }

    /// Column with the most negative reduced cost per unit of its ℓ₁ norm.
    /// Artificials that left the basis never re-enter.
    fn entering(&self, columns: &[Vec<(usize, BigInt)>], norms: &[BigInt]) -> Option<usize> {
        let pi = self.multipliers();
        let det_sign = self.det.sign();
        let mut best: Option<(usize, BigInt)> = None;
        for j in (0..self.m).filter(|&j| !self.in_basis[j]) {
            // reduced cost = -(π·M_j), with π = pi / det
            let dot: BigInt = columns[j]
                .iter()
                .filter(|(k, _)| !pi[*k].is_zero())
                .map(|(k, v)| &pi[*k] * v)
                .sum();
            if dot.sign() == Sign::NoSign || dot.sign() != det_sign {
                continue;
            }
            let dot = dot.abs();
            let better = match &best {
                None => true,
                Some((b, bd)) => &dot * &norms[*b] > bd * &norms[j],
            };
            if better {
                best = Some((j, dot));
            }
        }
        best.map(|(j, _)| j)
    }

    /// Numerators of `B⁻¹ M_j`.
    fn column(&self, col: &[(usize, BigInt)]) -> Vec<BigInt> {
        (0..self.rows)
            .map(|i| {
                col.iter()
                    .map(|(k, v)| &self.inv[i * self.rows + k] * v)
                    .sum()
            })
            .collect()
    }

    /// Minimum-ratio row under the lexicographic rule: ties in `x_i / u_i`
    /// are broken by comparing the rows of `B⁻¹ / u_i` column by column,
    /// which is the ratio test for a symbolically perturbed right-hand side.
    fn leaving(&self, u: &[BigInt]) -> Option<usize> {
        let det_sign = self.det.sign();
        let rows = self.rows;
        let mut best: Option<usize> = None;
        for i in 0..rows {
            if u[i].sign() != det_sign || u[i].is_zero() {
                continue;
            }
            best = match best {
                None => Some(i),
                Some(b) => {
                    // u_i and u_b share a sign, so cross-multiplying keeps the order.
                    let mut pick = b;
                    for k in 0..=rows {
                        let lhs = self.lex_key(i, k) * &u[b];
                        let rhs = self.lex_key(b, k) * &u[i];
                        if lhs != rhs {
                            if lhs < rhs {
                                pick = i;
                            }
                            break;
                        }
                    }
                    Some(pick)
                }
            };
        }
        best
    }

    fn pivot(&mut self, r: usize, entering: usize, u: Vec<BigInt>) {
        let rows = self.rows;
        let ur = u[r].clone();
        let (head, tail) = self.inv.split_at_mut(r * rows);
        let (pivot_row, tail) = tail.split_at_mut(rows);
        let update = |row: &mut [BigInt], ui: &BigInt| {
            for (x, p) in row.iter_mut().zip(pivot_row.iter()) {
                let scaled = &ur * &*x;
                let v = if ui.is_zero() { scaled } else { scaled - ui * p };
                *x = v.div_floor(&self.det);
            }
        };
        for (i, row) in head.chunks_mut(rows).enumerate() {
            update(row, &u[i]);
        }
        for (i, row) in tail.chunks_mut(rows).enumerate() {
            update(row, &u[r + 1 + i]);
        }
        self.det = ur;
        let leaving = self.basis[r];
        if leaving < self.m {
            self.in_basis[leaving] = false;
        }
        self.basis[r] = entering;
        self.in_basis[entering] = true;
    }
}

/// `(adj(B), det(B))` up to a common sign, by fraction-free Gauss–Jordan
/// on `[B | I]`; `B` is given by sparse columns. `None` if singular.
fn adjugate(n: usize, columns: &[Vec<(usize, BigInt)>]) -> Option<(Vec<BigInt>, BigInt)> {
    let w = 2 * n;
    let mut a = vec![BigInt::zero(); n * w];
    for (c, col) in columns.iter().enumerate() {
        for (r, v) in col {
            a[r * w + c] = v.clone();
        }
    }
    for i in 0..n {
        a[i * w + n + i] = BigInt::one();
    }
    let mut prev = BigInt::one();
    for k in 0..n {
        let p = (k..n).find(|&i| !a[i * w + k].is_zero())?;
        if p != k {
            for j in 0..w {
                a.swap(k * w + j, p * w + j);
            }
        }
        let (head, rest) = a.split_at_mut(k * w);
        let (pivot_row, tail) = rest.split_at_mut(w);
        let akk = pivot_row[k].clone();
        let update = |row: &mut [BigInt]| {
            let aik = std::mem::take(&mut row[k]);
            let cross = !aik.is_zero();
            for j in k + 1..w {
                let pj = &pivot_row[j];
                if row[j].is_zero() && (!cross || pj.is_zero()) {
                    continue;
                }
                let mut v = &akk * &row[j];
                if cross && !pj.is_zero() {
                    v -= &aik * pj;
                }
                row[j] = v / &prev;
            }
        };
        head.chunks_mut(w).for_each(update);
        tail.chunks_mut(w).for_each(update);
        prev = akk;
    }
    let inv = (0..n).flat_map(|i| a[i * w + n..(i + 1) * w].to_vec()).collect();
    Some((inv, prev))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlp::rational::{int, ratio};

    fn lp(rows: &[(&[i64], i64)]) -> LinearProgram {
        let n = rows.first().map_or(0, |r| r.0.len());
        LinearProgram::from_rows(
            n,
            rows.iter()
                .map(|(a, b)| (a.iter().map(|&x| int(x)).collect(), int(*b)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn empty_system_is_feasible_at_origin() {
        let p = LinearProgram::new(RationalMatrix::zeros(0, 3), vec![]).unwrap();
        assert_eq!(
            check_feasible(&p),
            FeasibilityOutcome::Feasible {
                point: vec![Rational::zero(); 3]
            }
        );
    }

    #[test]
    fn contradiction_pair() {
        let p = lp(&[(&[1], 1), (&[-1], 0)]);
        let out = check_feasible(&p);
        assert_eq!(
            out,
            FeasibilityOutcome::Infeasible {
                certificate: vec![int(1), int(1)]
            }
        );
    }

    #[test]
    fn simple_feasible_box() {
        let p = lp(&[(&[1, 0], 2), (&[0, 1], -3), (&[-1, -1], -10)]);
        let out = check_feasible(&p);
        assert!(out.is_feasible());
        out.verify(&p).unwrap();
    }

    #[test]
    fn zero_row_with_positive_rhs_is_infeasible() {
        let p = lp(&[(&[0, 0], 1), (&[1, 1], 0)]);
        let out = check_feasible(&p);
        assert!(!out.is_feasible());
    }

    #[test]
    fn rational_rows_are_scaled_back() {
        let a = RationalMatrix::from_rows(vec![
            vec![ratio(1, 3), ratio(2, 7)],
            vec![ratio(-1, 3), ratio(-2, 7)],
        ])
        .unwrap();
        let p = LinearProgram::new(a, vec![ratio(1, 2), ratio(-1, 4)]).unwrap();
        let out = check_feasible(&p);
        let y = out.certificate().expect("infeasible");
        verify_farkas(&p, y).unwrap();
    }

    #[test]
    fn checker_rejects_bad_witnesses() {
        let p = lp(&[(&[1], 1), (&[-1], 0)]);
        assert!(matches!(
            verify_point(&p, &[int(0)]),
            Err(CertificateError::ViolatedConstraint { row: 0 })
        ));
        assert!(matches!(
            verify_farkas(&p, &[int(-1), int(1)]),
            Err(CertificateError::NegativeMultiplier { row: 0 })
        ));
        assert!(matches!(
            verify_farkas(&p, &[int(1), int(2)]),
            Err(CertificateError::NonzeroCombination { column: 0 })
        ));
        let q = lp(&[(&[1], 0), (&[-1], 0)]);
        assert!(matches!(
            verify_farkas(&q, &[int(1), int(1)]),
            Err(CertificateError::NonpositiveBound)
        ));
    }

    #[test]
    fn adjugate_times_matrix_is_det_identity() {
        // Columns of [[0, 2, 1], [3, 1, 0], [1, 0, 4]]; the zero pivot forces a swap.
        let cols: Vec<Vec<(usize, BigInt)>> = vec![
            vec![(1, 3.into()), (2, 1.into())],
            vec![(0, 2.into()), (1, 1.into())],
            vec![(0, 1.into()), (2, 4.into())],
        ];
        let (adj, det) = adjugate(3, &cols).unwrap();
        assert_eq!(det.abs(), BigInt::from(25));
        for (c, col) in cols.iter().enumerate() {
            for i in 0..3 {
                let v: BigInt = col.iter().map(|(r, x)| &adj[i * 3 + r] * x).sum();
                let expect = if i == c { det.clone() } else { BigInt::zero() };
                assert_eq!(v, expect);
            }
        }
        assert!(adjugate(2, &[vec![(0, 1.into())], vec![(0, 2.into())]]).is_none());
    }

    #[test]
    fn degenerate_equalities() {
        // v1 = v2 = v3 written as pairs of inequalities, plus v1 + v2 + v3 ≥ 3.
        let p = lp(&[
            (&[1, -1, 0], 0),
            (&[-1, 1, 0], 0),
            (&[0, 1, -1], 0),
            (&[0, -1, 1], 0),
            (&[1, 1, 1], 3),
        ]);
        let out = check_feasible(&p);
        assert!(out.is_feasible());
        let q = lp(&[
            (&[1, -1, 0], 0),
            (&[-1, 1, 0], 0),
            (&[1, 1, 0], 3),
            (&[-1, 0, 0], 0),
        ]);
        assert!(!check_feasible(&q).is_feasible());
    }
}
