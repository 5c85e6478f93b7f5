//! Threshold degree and threshold density with exact certificates.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::boolfn::{monomial_basis, monomial_value, parity_char, BooleanFunction, Exponent, PointSet, Polynomial};
use crate::exactlp::{check_feasible, verify_farkas, CertificateError, FeasibilityOutcome, LinearProgram, Rational};
use crate::par::{self, Execution};

/// Largest domain accepted by [`threshold_degree`].
pub const MAX_DEGTHR_POINTS: usize = 1 << 14;
/// Largest cube dimension accepted by [`threshold_density`].
pub const MAX_DENSITY_DIM: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SignRepError {
    #[error("domain has {points} points, limit is {limit}")]
    DomainTooLarge { points: usize, limit: usize },
    #[error("function is not defined on a full cube")]
    NotCube,
    #[error("denominator is not positive at {point:?}")]
    NonpositiveDenominator { point: Vec<i64> },
    #[error("polynomials have {found} variables, expected {expected}")]
    VariableCount { expected: usize, found: usize },
    #[error("empty family")]
    EmptyFamily,
    #[error("certificate check failed: {0}")]
    Certificate(String),
}

/// Sparse vector as `(index, value)` pairs with nonzero values.
pub type SparseVector = Vec<(usize, Rational)>;

pub fn to_sparse(v: &[Rational]) -> SparseVector {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub fn to_dense(v: &[(usize, Rational)], len: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); len];
    for (i, x) in v {
        if *i < len {
            out[*i] = x.clone();
        }
    }
    out
}

/// Values of each basis monomial at each domain point, row per point.
pub fn basis_values(domain: &PointSet, basis: &[Exponent]) -> Vec<Vec<BigInt>> {
    let mut buf = vec![0; domain.dim()];
    (0..domain.len())
        .map(|i| {
            domain.write_point(i, &mut buf);
            basis.iter().map(|e| monomial_value(e, &buf)).collect()
        })
        .collect()
}

/// `f(x)·p(x) ≥ 1` over coefficients of `p` in `monomial_basis(X, d)`.
pub fn degree_lp(f: &BooleanFunction, d: u32) -> (LinearProgram, Vec<Exponent>) {
    let basis = monomial_basis(f.domain(), d);
    let values = basis_values(f.domain(), &basis);
    let rows = values
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            let s = f.value(i) as i64;
            (row.into_iter().map(|v| Rational::from_integer(v * s)).collect(), Rational::one())
        })
        .collect();
    let lp = LinearProgram::from_rows(basis.len(), rows).expect("rows match basis");
    (lp, basis)
}

/// Farkas vector proving that no polynomial of the given degree sign-represents `f`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerBound {
    pub degree: u32,
    #[serde(with = "crate::exactlp::rational::serde_rational::sparse")]
    pub farkas: SparseVector,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeCertificate {
    pub function_id: String,
    pub degree: u32,
    /// Satisfies `f(x)·witness(x) ≥ 1` on the whole domain.
    pub witness: Polynomial,
    /// One entry per degree below `degree`, in increasing order.
    pub lower_bounds: Vec<LowerBound>,
}

impl DegreeCertificate {
    /// Re-checks the witness and every Farkas vector; nothing is re-solved.
    pub fn verify(&self, f: &BooleanFunction) -> Result<(), SignRepError> {
        if self.witness.nvars() != f.domain().dim() {
            return Err(SignRepError::VariableCount {
                expected: f.domain().dim(),
                found: self.witness.nvars(),
            });
        }
        if self.witness.degree() > self.degree {
            return Err(SignRepError::Certificate("witness degree exceeds claimed degree".into()));
        }
        check_sign_representation(f, &self.witness)?;
        if self.lower_bounds.len() != self.degree as usize {
            return Err(SignRepError::Certificate("missing lower-degree certificates".into()));
        }
        for (k, lb) in self.lower_bounds.iter().enumerate() {
            if lb.degree as usize != k {
                return Err(SignRepError::Certificate("lower bounds out of order".into()));
            }
            let (lp, _) = degree_lp(f, lb.degree);
            verify_farkas(&lp, &to_dense(&lb.farkas, lp.num_constraints())).map_err(cert_err)?;
        }
        Ok(())
    }
}

fn cert_err(e: CertificateError) -> SignRepError {
    SignRepError::Certificate(e.to_string())
}

/// Checks `f(x)·p(x) ≥ 1` at every point.
pub fn check_sign_representation(f: &BooleanFunction, p: &Polynomial) -> Result<(), SignRepError> {
    let one = Rational::one();
    let mut buf = vec![0; f.domain().dim()];
    for i in 0..f.len() {
        f.domain().write_point(i, &mut buf);
        let v = p.eval(&buf) * Rational::from_integer(f.value(i).into());
        if v < one {
            return Err(SignRepError::Certificate(format!("witness fails at {buf:?}")));
        }
    }
    Ok(())
}

/// Whether `sign p(x) = f(x)` everywhere (no margin required).
pub fn sign_represents(f: &BooleanFunction, p: &Polynomial) -> bool {
    let mut buf = vec![0; f.domain().dim()];
    (0..f.len()).all(|i| {
        f.domain().write_point(i, &mut buf);
        let v = p.eval(&buf);
        if f.value(i) < 0 {
            v.is_negative()
        } else {
            v.is_positive()
        }
    })
}

/// Least `d` with a degree-`d` sign-representation, with certificates both ways.
pub fn threshold_degree(f: &BooleanFunction, function_id: &str) -> Result<DegreeCertificate, SignRepError> {
    if f.len() > MAX_DEGTHR_POINTS {
        return Err(SignRepError::DomainTooLarge {
            points: f.len(),
            limit: MAX_DEGTHR_POINTS,
        });
    }
    let mut lower_bounds = vec![];
    for d in 0.. {
        let (lp, basis) = degree_lp(f, d);
        match check_feasible(&lp) {
            FeasibilityOutcome::Feasible { point } => {
                let witness = Polynomial::from_basis(f.domain().dim(), &basis, &point);
                return Ok(DegreeCertificate {
                    function_id: function_id.to_string(),
                    degree: d,
                    witness,
                    lower_bounds,
                });
            }
            FeasibilityOutcome::Infeasible { certificate } => lower_bounds.push(LowerBound {
                degree: d,
                farkas: to_sparse(&certificate),
            }),
        }
    }
    unreachable!("the full monomial basis interpolates any function")
}

fn require_cube(f: &BooleanFunction) -> Result<usize, SignRepError> {
    f.domain().cube_dim().ok_or(SignRepError::NotCube)
}

/// LP for `f(x)·Σ_S λ_S χ_S(x) ≥ 1` with one variable per subset.
pub fn density_lp(f: &BooleanFunction, family: &[u64]) -> LinearProgram {
    let rows = (0..f.len())
        .map(|x| {
            let s = f.value(x) as i64;
            let row = family
                .iter()
                .map(|&t| Rational::from_integer((s * parity_char(t, x as u64) as i64).into()))
                .collect();
            (row, Rational::one())
        })
        .collect();
    LinearProgram::from_rows(family.len(), rows).expect("rows match family")
}

pub fn density_feasible(f: &BooleanFunction, family: &[u64]) -> Result<FeasibilityOutcome, SignRepError> {
    require_cube(f)?;
    if family.is_empty() {
        return Err(SignRepError::EmptyFamily);
    }
    Ok(check_feasible(&density_lp(f, family)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DensityOutcome {
    Found {
        family: Vec<u64>,
        #[serde(with = "crate::exactlp::rational::serde_rational::vec")]
        lambda: Vec<Rational>,
    },
    ExceedsCap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityResult {
    pub function_id: String,
    pub cap: usize,
    /// Number of infeasible families examined before the answer.
    pub families_rejected: u64,
    pub outcome: DensityOutcome,
}

impl DensityResult {
    pub fn density(&self) -> Option<usize> {
        match &self.outcome {
            DensityOutcome::Found { family, .. } => Some(family.len()),
            DensityOutcome::ExceedsCap => None,
        }
    }
}

/// All `k`-subsets of `0..universe` in lexicographic order.
pub fn combinations(universe: u64, k: usize) -> impl Iterator<Item = Vec<u64>> {
    let mut cur: Option<Vec<u64>> = if k as u64 <= universe {
        Some((0..k as u64).collect())
    } else {
        None
    };
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let c = cur.as_mut().unwrap();
        let mut i = k;
        loop {
            if i == 0 {
                cur = None;
                break;
            }
            i -= 1;
            if c[i] < universe - (k - i) as u64 {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}

const DENSITY_CHUNK: usize = 1024;

/// Smallest family of characters whose combination sign-represents `f`,
/// searching sizes `1..=cap` in lexicographic order.
pub fn threshold_density(
    f: &BooleanFunction,
    function_id: &str,
    cap: usize,
    exec: Execution,
) -> Result<DensityResult, SignRepError> {
    let n = require_cube(f)?;
    if n > MAX_DENSITY_DIM {
        return Err(SignRepError::DomainTooLarge {
            points: f.len(),
            limit: 1 << MAX_DENSITY_DIM,
        });
    }
    let universe = 1u64 << n;
    let mut rejected = 0u64;
    for size in 1..=cap {
        let mut families = combinations(universe, size).peekable();
        while families.peek().is_some() {
            let chunk: Vec<Vec<u64>> = families.by_ref().take(DENSITY_CHUNK).collect();
            let hit = par::find_map_first(exec, &chunk, |fam| {
                match check_feasible(&density_lp(f, fam)) {
                    FeasibilityOutcome::Feasible { point } => Some(point),
                    FeasibilityOutcome::Infeasible { .. } => None,
                }
            });
            match hit {
                Some((i, lambda)) => {
                    rejected += i as u64;
                    return Ok(DensityResult {
                        function_id: function_id.to_string(),
                        cap,
                        families_rejected: rejected,
                        outcome: DensityOutcome::Found {
                            family: chunk[i].clone(),
                            lambda,
                        },
                    });
                }
                None => rejected += chunk.len() as u64,
            }
        }
    }
    Ok(DensityResult {
        function_id: function_id.to_string(),
        cap,
        families_rejected: rejected,
        outcome: DensityOutcome::ExceedsCap,
    })
}

/// `f^KP(x, y, z) = f(sel)` with `selᵢ = xᵢ` when `zᵢ = 0` and `yᵢ` otherwise.
///
/// On `{0,1}^{3n}` the bits are laid out as `x` (bits `0..n`), `y`
/// (`n..2n`), then `z` (`2n..3n`).
pub fn krause_pudlak(f: &BooleanFunction) -> Result<BooleanFunction, SignRepError> {
    let n = require_cube(f)?;
    let mask = (1usize << n) - 1;
    Ok(BooleanFunction::from_index_fn(PointSet::cube(3 * n), |idx| {
        let x = idx & mask;
        let y = (idx >> n) & mask;
        let z = (idx >> (2 * n)) & mask;
        f.value((x & !z) | (y & z))
    }))
}

/// `q₁q₂ + p₁q₂ + p₂q₁` on `X × Y`, after checking `q₁ > 0` on `X` and `q₂ > 0` on `Y`.
pub fn brs_conjunction_polynomial(
    p1: &Polynomial,
    q1: &Polynomial,
    x: &PointSet,
    p2: &Polynomial,
    q2: &Polynomial,
    y: &PointSet,
) -> Result<Polynomial, SignRepError> {
    for (p, q, dom) in [(p1, q1, x), (p2, q2, y)] {
        for poly in [p, q] {
            if poly.nvars() != dom.dim() {
                return Err(SignRepError::VariableCount {
                    expected: dom.dim(),
                    found: poly.nvars(),
                });
            }
        }
        if let Some(point) = dom.iter().find(|pt| !q.eval(pt).is_positive()) {
            return Err(SignRepError::NonpositiveDenominator { point });
        }
    }
    let total = x.dim() + y.dim();
    let (p1, q1) = (p1.embed(0, total), q1.embed(0, total));
    let (p2, q2) = (p2.embed(x.dim(), total), q2.embed(x.dim(), total));
    Ok(&(&(&q1 * &q2) + &(&p1 * &q2)) + &(&p2 * &q1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{conjunction, halfspace_to_function, majority, parity, Halfspace};
    use crate::exactlp::rational::int;

    #[test]
    fn constant_has_degree_zero() {
        let f = BooleanFunction::constant(PointSet::cube(3), 1);
        let c = threshold_degree(&f, "one").unwrap();
        assert_eq!(c.degree, 0);
        c.verify(&f).unwrap();
    }

    #[test]
    fn parity_two_has_degree_two() {
        let f = parity(2);
        let c = threshold_degree(&f, "parity:2").unwrap();
        assert_eq!(c.degree, 2);
        assert_eq!(c.lower_bounds.len(), 2);
        c.verify(&f).unwrap();
        let hand = Polynomial::from_terms(
            2,
            [
                (vec![0, 0], int(1)),
                (vec![1, 0], int(-2)),
                (vec![0, 1], int(-2)),
                (vec![1, 1], int(4)),
            ],
        );
        assert!(sign_represents(&f, &hand));
    }

    #[test]
    fn halfspace_has_degree_one() {
        let f = halfspace_to_function(&Halfspace::from_i64(&[1, 2, -4]), &PointSet::cube(2)).unwrap();
        assert_eq!(threshold_degree(&f, "h").unwrap().degree, 1);
        assert_eq!(threshold_degree(&majority(3), "maj").unwrap().degree, 1);
    }

    #[test]
    fn density_examples() {
        let chi = BooleanFunction::from_index_fn(PointSet::cube(2), |x| parity_char(0b11, x as u64));
        let out = density_feasible(&chi, &[0b11]).unwrap();
        assert!(out.is_feasible());
        assert!(!density_feasible(&chi, &[0b01]).unwrap().is_feasible());
        let and = conjunction(&majority(1), &majority(1));
        assert!(density_feasible(&and, &[0, 1, 2, 3]).unwrap().is_feasible());
        let r = threshold_density(&chi, "chi", 2, Execution::Sequential).unwrap();
        assert_eq!(r.density(), Some(1));
    }

    #[test]
    fn combinations_in_lex_order() {
        let all: Vec<_> = combinations(4, 2).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 1]);
        assert_eq!(all[1], vec![0, 2]);
        assert_eq!(all[5], vec![2, 3]);
        assert_eq!(combinations(3, 4).count(), 0);
        assert_eq!(combinations(3, 0).count(), 1);
    }

    #[test]
    fn kp_selector_planes() {
        let f = BooleanFunction::from_values(PointSet::cube(1), &[1, -1]).unwrap();
        let kp = krause_pudlak(&f).unwrap();
        for idx in 0..8usize {
            let (x, y, z) = (idx & 1, (idx >> 1) & 1, (idx >> 2) & 1);
            let expect = if z == 0 { f.value(x) } else { f.value(y) };
            assert_eq!(kp.value(idx), expect);
        }
    }

    #[test]
    fn brs_zero_error_case() {
        let x = PointSet::cube(1);
        let f = BooleanFunction::from_values(x.clone(), &[1, -1]).unwrap();
        // p/q = 1 − 2x equals f exactly on {0,1}.
        let p = Polynomial::from_terms(1, [(vec![0], int(1)), (vec![1], int(-2))]);
        let q = Polynomial::constant(1, int(1));
        let h = brs_conjunction_polynomial(&p, &q, &x, &p, &q, &x).unwrap();
        assert!(sign_represents(&conjunction(&f, &f), &h));
        assert!(h.degree() <= 2);
        let bad_q = Polynomial::variable(1, 0);
        assert!(matches!(
            brs_conjunction_polynomial(&p, &bad_q, &x, &p, &q, &x),
            Err(SignRepError::NonpositiveDenominator { .. })
        ));
    }
}
