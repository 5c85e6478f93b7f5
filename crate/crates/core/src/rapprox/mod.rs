//! Certified brackets for `R⁺(f, d)`, the least error of a rational
//! approximant `p/q` of degree `d` with `q > 0` on the domain.
//!
//! Every LP normalizes `q ≥ 1`, which loses nothing on a finite domain.
//! Brackets are always re-checked exactly before they are returned: the
//! upper end by evaluating the witness at every point, the lower end by a
//! Farkas vector for the LP at `ε = lo`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::boolfn::{monomial_basis, BooleanFunction, Exponent, PointSet, Polynomial};
use crate::exactlp::rational::{pow2_neg, Fraction};
use crate::exactlp::{check_feasible, verify_farkas, FeasibilityOutcome, LinearProgram, Rational};
use crate::par::{self, Execution};
use crate::signrep::{basis_values, to_dense, to_sparse, SparseVector};

/// Default bisection resolution, `2^-30`.
pub fn default_tolerance() -> Rational {
    pow2_neg(30)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RapproxError {
    #[error("epsilon must satisfy 0 <= eps < 1")]
    EpsilonOutOfRange,
    #[error("tolerance must be positive")]
    NonpositiveTolerance,
    #[error("no degree up to {dmax} reaches the requested error")]
    ExceedsDmax { dmax: u32 },
    #[error("bracket check failed: {0}")]
    Certificate(String),
}

/// The sandwich LP `(1−ε)q ≤ f·p ≤ (1+ε)q`, `q ≥ 1`, over `[p | q]` coefficients.
pub fn rplus_lp(f: &BooleanFunction, basis: &[Exponent], eps: &Rational) -> LinearProgram {
    let values = basis_values(f.domain(), basis);
    let b = basis.len();
    let lower = Rational::one() - eps;
    let upper = Rational::one() + eps;
    let mut rows = Vec::with_capacity(3 * values.len());
    for (i, vals) in values.iter().enumerate() {
        let s = BigInt::from(f.value(i));
        let fp: Vec<Rational> = vals.iter().map(|v| Rational::from_integer(v * &s)).collect();
        let q: Vec<Rational> = vals.iter().map(|v| Rational::from_integer(v.clone())).collect();
        let row = |sp: Rational, sq: &Rational| -> Vec<Rational> {
            fp.iter()
                .map(|v| v * &sp)
                .chain(q.iter().map(|v| v * sq))
                .collect()
        };
        rows.push((row(Rational::one(), &-&lower), Rational::zero()));
        rows.push((row(-Rational::one(), &upper), Rational::zero()));
        let mut norm = vec![Rational::zero(); b];
        norm.extend(q.iter().cloned());
        rows.push((norm, Rational::one()));
    }
    LinearProgram::from_rows(2 * b, rows).expect("rows match basis")
}

/// Exact feasibility of a degree-`d` approximant with error at most `ε`.
pub fn rplus_feasible(f: &BooleanFunction, d: u32, eps: &Rational) -> Result<FeasibilityOutcome, RapproxError> {
    check_eps(eps)?;
    let basis = monomial_basis(f.domain(), d);
    Ok(check_feasible(&rplus_lp(f, &basis, eps)))
}

fn check_eps(eps: &Rational) -> Result<(), RapproxError> {
    if eps.is_negative() || *eps >= Rational::one() {
        return Err(RapproxError::EpsilonOutOfRange);
    }
    Ok(())
}

/// A rational approximant `p/q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalWitness {
    pub p: Polynomial,
    pub q: Polynomial,
}

impl RationalWitness {
    fn from_point(nvars: usize, basis: &[Exponent], point: &[Rational]) -> Self {
        let b = basis.len();
        Self {
            p: Polynomial::from_basis(nvars, basis, &point[..b]),
            q: Polynomial::from_basis(nvars, basis, &point[b..]),
        }
    }

    /// `max_x |f(x) − p(x)/q(x)|`, after checking `q ≥ 1` everywhere.
    pub fn max_error(&self, f: &BooleanFunction) -> Result<Rational, RapproxError> {
        let mut worst = Rational::zero();
        let mut buf = vec![0; f.domain().dim()];
        for i in 0..f.len() {
            f.domain().write_point(i, &mut buf);
            let q = self.q.eval(&buf);
            if q < Rational::one() {
                return Err(RapproxError::Certificate(format!("denominator below 1 at {buf:?}")));
            }
            let err = (Rational::from_integer(f.value(i).into()) - self.p.eval(&buf) / q).abs();
            if err > worst {
                worst = err;
            }
        }
        Ok(worst)
    }
}

/// Certified interval `[lo, hi]` containing `R⁺(f, d)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxBracket {
    pub function_id: String,
    pub degree: u32,
    #[serde(with = "crate::exactlp::rational::serde_rational")]
    pub lo: Rational,
    #[serde(with = "crate::exactlp::rational::serde_rational")]
    pub hi: Rational,
    #[serde(with = "crate::exactlp::rational::serde_rational")]
    pub tolerance: Rational,
    /// Attains error exactly `hi`.
    pub witness: RationalWitness,
    /// Farkas vector for the LP at `ε = lo`; absent only when `lo = hi = 0`.
    #[serde(with = "option_sparse")]
    pub lo_certificate: Option<SparseVector>,
    /// Number of LPs solved.
    pub lp_solves: u32,
}

mod option_sparse {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "crate::exactlp::rational::serde_rational::sparse")] SparseVector);

    pub fn serialize<S: Serializer>(v: &Option<SparseVector>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(|x| Wrap(x.clone())).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<SparseVector>, D::Error> {
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

impl ApproxBracket {
    /// Exact re-check of every bracket invariant against `f`.
    pub fn verify(&self, f: &BooleanFunction) -> Result<(), RapproxError> {
        let fail = |m: &str| Err(RapproxError::Certificate(m.to_string()));
        if self.lo.is_negative() || self.lo > self.hi || self.hi > Rational::one() {
            return fail("bracket endpoints out of order");
        }
        if &self.hi - &self.lo > self.tolerance {
            return fail("bracket wider than tolerance");
        }
        let dim = f.domain().dim();
        if self.witness.p.nvars() != dim || self.witness.q.nvars() != dim {
            return fail("witness has the wrong variable count");
        }
        if self.witness.p.degree() > self.degree || self.witness.q.degree() > self.degree {
            return fail("witness degree exceeds bracket degree");
        }
        if self.witness.max_error(f)? > self.hi {
            return fail("witness error exceeds hi");
        }
        match &self.lo_certificate {
            None if self.hi.is_zero() => Ok(()),
            None => fail("missing lower-end certificate"),
            Some(y) => {
                let basis = monomial_basis(f.domain(), self.degree);
                let lp = rplus_lp(f, &basis, &self.lo);
                verify_farkas(&lp, &to_dense(y, lp.num_constraints()))
                    .map_err(|e| RapproxError::Certificate(e.to_string()))
            }
        }
    }
}

/// Simplest dyadic rational in `[a, b]` (fewest binary digits).
pub fn simplest_dyadic(a: &Rational, b: &Rational) -> Rational {
    assert!(a <= b);
    let mut k = 0u32;
    loop {
        let scale = BigInt::one() << k;
        let lo = a * Rational::from_integer(scale.clone());
        let m = lo.ceil().to_integer();
        let cand = Rational::new(m, scale);
        if &cand <= b {
            return cand;
        }
        k += 1;
    }
}

/// Bisection on `ε ∈ [0, 1]` until `hi − lo ≤ tol`.
///
/// The upper end is always the true maximum error of the best witness
/// seen, so it often drops well below the probe that produced it.
pub fn rplus_bracket(
    f: &BooleanFunction,
    d: u32,
    tol: &Rational,
    function_id: &str,
) -> Result<ApproxBracket, RapproxError> {
    if !tol.is_positive() {
        return Err(RapproxError::NonpositiveTolerance);
    }
    let dim = f.domain().dim();
    let basis = monomial_basis(f.domain(), d);
    let mut solves = 1;
    let zero = Rational::zero();
    let lo_cert = match check_feasible(&rplus_lp(f, &basis, &zero)) {
        FeasibilityOutcome::Feasible { point } => {
            let witness = RationalWitness::from_point(dim, &basis, &point);
            let bracket = ApproxBracket {
                function_id: function_id.to_string(),
                degree: d,
                lo: zero.clone(),
                hi: zero,
                tolerance: tol.clone(),
                witness,
                lo_certificate: None,
                lp_solves: solves,
            };
            bracket.verify(f)?;
            return Ok(bracket);
        }
        FeasibilityOutcome::Infeasible { certificate } => to_sparse(&certificate),
    };
    let mut lo = Rational::zero();
    let mut lo_certificate = lo_cert;
    let mut witness = RationalWitness {
        p: Polynomial::zero(dim),
        q: Polynomial::constant(dim, Rational::one()),
    };
    let mut hi = witness.max_error(f)?;
    while &hi - &lo > *tol {
        let w = &hi - &lo;
        let quarter = &w / Rational::from_integer(4.into());
        let mid = simplest_dyadic(&(&lo + &quarter), &(&hi - &quarter));
        solves += 1;
        match check_feasible(&rplus_lp(f, &basis, &mid)) {
            FeasibilityOutcome::Feasible { point } => {
                witness = RationalWitness::from_point(dim, &basis, &point);
                hi = witness.max_error(f)?;
                debug_assert!(hi <= mid);
            }
            FeasibilityOutcome::Infeasible { certificate } => {
                lo = mid;
                lo_certificate = to_sparse(&certificate);
            }
        }
    }
    let bracket = ApproxBracket {
        function_id: function_id.to_string(),
        degree: d,
        lo,
        hi,
        tolerance: tol.clone(),
        witness,
        lo_certificate: Some(lo_certificate),
        lp_solves: solves,
    };
    bracket.verify(f)?;
    Ok(bracket)
}

/// `sign(x)` on `{±1, …, ±N}` (negative points map to `−1`).
pub fn sign_grid_function(n: usize) -> BooleanFunction {
    BooleanFunction::from_fn(PointSet::sign_grid(n), |x| if x[0] < 0 { -1 } else { 1 })
}

pub fn rplus_sign_grid(n: usize, d: u32, tol: &Rational) -> Result<ApproxBracket, RapproxError> {
    rplus_bracket(&sign_grid_function(n), d, tol, &format!("sign-grid:{n}"))
}

/// Least `d ≤ dmax` admitting an approximant with error at most `ε`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RdegResult {
    pub function_id: String,
    #[serde(with = "crate::exactlp::rational::serde_rational")]
    pub eps: Rational,
    pub degree: u32,
    pub witness: RationalWitness,
    /// Farkas vectors at `ε` for every degree below `degree`. They show
    /// `R⁺(f, d') ≥ ε`, so `degree` is the exact answer unless some lower
    /// degree has its infimum equal to `ε` without attaining it, in which
    /// case it is an upper bound.
    #[serde(with = "sparse_list")]
    pub lower_certificates: Vec<SparseVector>,
}

mod sparse_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "crate::exactlp::rational::serde_rational::sparse")] SparseVector);

    pub fn serialize<S: Serializer>(v: &[SparseVector], s: S) -> Result<S::Ok, S::Error> {
        let w: Vec<Wrap> = v.iter().map(|x| Wrap(x.clone())).collect();
        w.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<SparseVector>, D::Error> {
        Ok(Vec::<Wrap>::deserialize(d)?.into_iter().map(|w| w.0).collect())
    }
}

pub fn rdeg(f: &BooleanFunction, eps: &Rational, dmax: u32, function_id: &str) -> Result<RdegResult, RapproxError> {
    check_eps(eps)?;
    if eps.is_zero() {
        return Err(RapproxError::EpsilonOutOfRange);
    }
    let dim = f.domain().dim();
    let mut lower_certificates = vec![];
    for d in 0..=dmax {
        let basis = monomial_basis(f.domain(), d);
        match check_feasible(&rplus_lp(f, &basis, eps)) {
            FeasibilityOutcome::Feasible { point } => {
                return Ok(RdegResult {
                    function_id: function_id.to_string(),
                    eps: eps.clone(),
                    degree: d,
                    witness: RationalWitness::from_point(dim, &basis, &point),
                    lower_certificates,
                })
            }
            FeasibilityOutcome::Infeasible { certificate } => lower_certificates.push(to_sparse(&certificate)),
        }
    }
    Err(RapproxError::ExceedsDmax { dmax })
}

/// `hi(2d) ≤ hi(d) + 2·tol`, the computable shadow of `R⁺(f,2d) ≤ R⁺(f,d)`.
pub fn rplus_relation_check(f: &BooleanFunction, d: u32, tol: &Rational) -> Result<bool, RapproxError> {
    let a = rplus_bracket(f, d, tol, "")?;
    let b = rplus_bracket(f, 2 * d, tol, "")?;
    Ok(b.hi <= a.hi + tol * Rational::from_integer(2.into()))
}

/// One cell of an `(N, d)` table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridCell {
    pub n: usize,
    pub bracket: ApproxBracket,
}

/// Brackets for sign grids `N ∈ ns`, `d ∈ 0..=dmax`, cells in parallel.
pub fn sign_grid_table(ns: &[usize], dmax: u32, tol: &Rational, exec: Execution) -> Result<Vec<GridCell>, RapproxError> {
    let cells: Vec<(usize, u32)> = ns
        .iter()
        .flat_map(|&n| (0..=dmax).map(move |d| (n, d)))
        .collect();
    par::map(exec, &cells, |&(n, d)| {
        rplus_sign_grid(n, d, tol).map(|bracket| GridCell { n, bracket })
    })
    .into_iter()
    .collect()
}

/// CSV with header `N,d,lo,hi`; rationals as `num/den`.
pub fn grid_table_csv(cells: &[GridCell]) -> String {
    let mut out = String::from("N,d,lo,hi\n");
    for c in cells {
        out.push_str(&format!(
            "{},{},{},{}\n",
            c.n,
            c.bracket.degree,
            Fraction(&c.bracket.lo),
            Fraction(&c.bracket.hi)
        ));
    }
    out
}

/// Smallest power-of-two denominator not exceeding `tol`, as `2^-t`.
pub fn tolerance_exponent(tol: &Rational) -> u32 {
    let mut t = 0;
    while pow2_neg(t) > *tol {
        t += 1;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlp::rational::{int, ratio};

    #[test]
    fn sign_on_two_points_exact() {
        let f = sign_grid_function(1);
        let out = rplus_feasible(&f, 1, &int(0)).unwrap();
        assert!(out.is_feasible());
        let b = rplus_sign_grid(1, 1, &pow2_neg(10)).unwrap();
        assert_eq!(b.hi, int(0));
    }

    #[test]
    fn four_points_degree_one_not_exact() {
        let f = sign_grid_function(2);
        assert!(!rplus_feasible(&f, 1, &int(0)).unwrap().is_feasible());
    }

    #[test]
    fn zero_law_small() {
        assert_eq!(rplus_sign_grid(4, 4, &pow2_neg(10)).unwrap().hi, int(0));
        let b = rplus_sign_grid(4, 2, &pow2_neg(10)).unwrap();
        assert!(b.lo.is_positive());
        b.verify(&sign_grid_function(4)).unwrap();
    }

    #[test]
    fn degree_zero_on_nonconstant_is_one() {
        let b = rplus_sign_grid(2, 0, &pow2_neg(8)).unwrap();
        assert_eq!(b.hi, int(1));
    }

    #[test]
    fn simplest_dyadic_examples() {
        assert_eq!(simplest_dyadic(&ratio(1, 3), &ratio(2, 3)), ratio(1, 2));
        assert_eq!(simplest_dyadic(&ratio(1, 5), &ratio(1, 3)), ratio(1, 4));
        assert_eq!(simplest_dyadic(&int(0), &int(0)), int(0));
    }

    #[test]
    fn rdeg_of_sign_on_two_points() {
        let r = rdeg(&sign_grid_function(1), &ratio(1, 3), 4, "s").unwrap();
        assert_eq!(r.degree, 1);
    }

    #[test]
    fn relation_check_holds() {
        assert!(rplus_relation_check(&sign_grid_function(4), 1, &pow2_neg(10)).unwrap());
    }

    #[test]
    fn tolerance_exponent_rounds_down() {
        assert_eq!(tolerance_exponent(&pow2_neg(20)), 20);
        assert_eq!(tolerance_exponent(&ratio(1, 3)), 2);
    }
}
