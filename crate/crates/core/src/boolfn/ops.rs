use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{BoolFnError, BooleanFunction, Exponent, PointSet, Polynomial};
use crate::exactlp::Rational;

/// `sign(1 + f(x) + g(y))` on the product domain: true iff both are true.
pub fn conjunction(f: &BooleanFunction, g: &BooleanFunction) -> BooleanFunction {
    let domain = f.domain().product(g.domain());
    let nf = f.len();
    BooleanFunction::from_index_fn(domain, |idx| {
        let s = 1 + f.value(idx % nf) as i32 + g.value(idx / nf) as i32;
        if s > 0 {
            1
        } else {
            -1
        }
    })
}

/// `MAJ_n` on the cube: `−1` iff more than half the bits are set.
pub fn majority(n: usize) -> BooleanFunction {
    assert!(n >= 1, "majority needs at least one variable");
    BooleanFunction::from_index_fn(PointSet::cube(n), |x| {
        if 2 * x.count_ones() as usize > n {
            -1
        } else {
            1
        }
    })
}

/// The parity function on `n` bits, i.e. `χ_{[n]}`.
pub fn parity(n: usize) -> BooleanFunction {
    BooleanFunction::from_index_fn(PointSet::cube(n), |x| parity_char(u64::MAX, x as u64))
}

/// `χ_S(x) = (−1)^{Σ_{i∈S} xᵢ}` with `S` and `x` as bitmasks (bit 0 is coordinate 1).
pub fn parity_char(s: u64, x: u64) -> i8 {
    if (s & x).count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Exponent vectors of total degree at most `d`, reduced by the per-coordinate
/// caps of `domain` (see [`PointSet::exponent_caps`]).
///
/// Ordered by total degree, then lexicographically descending, so that
/// `x₁` precedes `x₂`.
pub fn monomial_basis(domain: &PointSet, d: u32) -> Vec<Exponent> {
    let caps = domain.exponent_caps();
    let mut out = vec![];
    let mut cur = vec![0u32; caps.len()];
    fn rec(c: usize, left: u32, caps: &[u32], cur: &mut Vec<u32>, out: &mut Vec<Exponent>) {
        if c == caps.len() {
            out.push(cur.clone());
            return;
        }
        for k in 0..=caps[c].min(left) {
            cur[c] = k;
            rec(c + 1, left - k, caps, cur, out);
        }
        cur[c] = 0;
    }
    rec(0, d, &caps, &mut cur, &mut out);
    out.sort_by(|a, b| {
        let da: u32 = a.iter().sum();
        let db: u32 = b.iter().sum();
        da.cmp(&db).then_with(|| b.cmp(a))
    });
    out
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Univariate `p` with `E_σ[φ(σx)] = p(|x|)` on `{0,1}^n`.
///
/// Averaging a monomial `Π_{i∈T} xᵢ` over all permutations at a point of
/// weight `t` gives `C(t,|T|)/C(n,|T|)`; `p` interpolates these sums at
/// `t = 0,…,n`.
pub fn symmetrize_polynomial(phi: &Polynomial, n: usize) -> Polynomial {
    assert_eq!(phi.nvars(), n, "polynomial must live on n variables");
    let phi = phi.multilinear();
    let mut by_size: BTreeMap<u64, Rational> = BTreeMap::new();
    for (e, c) in phi.terms() {
        let j = e.iter().filter(|&&k| k > 0).count() as u64;
        *by_size.entry(j).or_insert_with(Rational::zero) += c;
    }
    let nodes: Vec<(Rational, Rational)> = (0..=n as u64)
        .map(|t| {
            let v: Rational = by_size
                .iter()
                .map(|(&j, c)| c * Rational::new(binomial(t, j), binomial(n as u64, j)))
                .sum();
            (Rational::from_integer(t.into()), v)
        })
        .collect();
    Polynomial::interpolate(&nodes).expect("grid nodes are distinct")
}

/// One block of coordinates for [`block_symmetrize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Block {
    /// `n` binary coordinates collapsed to their Hamming weight.
    Cube(usize),
    /// A single coordinate carried through unchanged.
    Keep,
}

impl Block {
    fn width(self) -> usize {
        match self {
            Block::Cube(n) => n,
            Block::Keep => 1,
        }
    }
}

/// Maps a point to its block summary (weights for cube blocks, raw values otherwise).
pub fn block_summary(blocks: &[Block], p: &[i64]) -> Vec<i64> {
    let mut out = Vec::with_capacity(blocks.len());
    let mut c = 0;
    for b in blocks {
        let w = b.width();
        out.push(match b {
            Block::Cube(_) => p[c..c + w].iter().sum(),
            Block::Keep => p[c],
        });
        c += w;
    }
    out
}

/// Collapses a block-symmetric function to its grid of block summaries.
///
/// The resulting domain lists summaries with the first coordinate fastest.
pub fn block_symmetrize(f: &BooleanFunction, blocks: &[Block]) -> Result<BooleanFunction, BoolFnError> {
    let dom = f.domain();
    let width: usize = blocks.iter().map(|b| b.width()).sum();
    if width != dom.dim() {
        return Err(BoolFnError::DimensionMismatch {
            expected: dom.dim(),
            found: width,
        });
    }
    let mut c = 0;
    for b in blocks {
        if let Block::Cube(n) = *b {
            for cc in c..c + n {
                if dom.coordinate_values(cc).iter().any(|&v| v != 0 && v != 1) {
                    return Err(BoolFnError::Malformed(format!("coordinate {cc} is not binary")));
                }
            }
        }
        c += b.width();
    }
    // Keyed by the reversed summary so iteration order has the first coordinate fastest.
    let mut seen: BTreeMap<Vec<i64>, (usize, i8)> = BTreeMap::new();
    let mut buf = vec![0; dom.dim()];
    for i in 0..dom.len() {
        dom.write_point(i, &mut buf);
        let mut key = block_summary(blocks, &buf);
        key.reverse();
        let v = f.value(i);
        match seen.get(&key) {
            Some(&(j, w)) if w != v => {
                return Err(BoolFnError::NotBlockSymmetric {
                    first: dom.point(j),
                    second: buf.clone(),
                })
            }
            Some(_) => {}
            None => {
                seen.insert(key, (i, v));
            }
        }
    }
    let mut points = Vec::with_capacity(seen.len());
    let mut values = Vec::with_capacity(seen.len());
    for (mut key, (_, v)) in seen {
        key.reverse();
        points.push(key);
        values.push(v);
    }
    let grid = PointSet::from_points(blocks.len(), points)?;
    BooleanFunction::from_values(grid, &values)
}

/// Decides `Σ_{i≤k} C(n,i) ≤ 2^{n·H(k/n)}` exactly.
///
/// `2^{n·H(k/n)} = nⁿ / (kᵏ (n−k)^{n−k})` (with `0⁰ = 1`), so the comparison
/// is a single integer inequality.
pub fn binary_entropy_bound_check(n: u64, k: u64) -> bool {
    assert!(k <= n, "k must not exceed n");
    let lhs: BigInt = (0..=k).map(|i| binomial(n, i)).sum();
    let pow = |b: u64, e: u64| num_traits::pow(BigInt::from(b), e as usize);
    lhs * pow(k, k) * pow(n - k, n - k) <= pow(n, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlp::rational::{int, ratio};

    #[test]
    fn conjunction_truth_table() {
        let dom = PointSet::from_points(1, vec![vec![0], vec![1]]).unwrap();
        let f = BooleanFunction::from_values(dom.clone(), &[1, -1]).unwrap();
        let g = BooleanFunction::from_values(dom, &[1, -1]).unwrap();
        let h = conjunction(&f, &g);
        assert_eq!(h.values(), vec![1, 1, 1, -1]);
        assert_eq!(h.at(&[1, 1]), Some(-1));
    }

    #[test]
    fn majorities() {
        assert_eq!(majority(1).values(), vec![1, -1]);
        assert_eq!(majority(2).values(), vec![1, 1, 1, -1]);
        let m3 = majority(3);
        for x in 0..8usize {
            assert_eq!(m3.value(x) == -1, x.count_ones() >= 2);
        }
    }

    #[test]
    fn parity_characters() {
        assert_eq!(parity_char(0, 0b111), 1);
        assert_eq!(parity_char(0b1, 0b1), -1);
        assert_eq!(parity_char(0b11, 0b11), 1);
    }

    #[test]
    fn basis_examples() {
        assert_eq!(monomial_basis(&PointSet::cube(2), 1), vec![vec![0, 0], vec![1, 0], vec![0, 1]]);
        assert_eq!(monomial_basis(&PointSet::cube(1), 5), vec![vec![0], vec![1]]);
        let x = PointSet::sign_grid(2);
        assert_eq!(monomial_basis(&x, 2), vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn symmetrize_single_coordinate() {
        let phi = Polynomial::variable(2, 0);
        assert_eq!(symmetrize_polynomial(&phi, 2), Polynomial::univariate(&[int(0), ratio(1, 2)]));
        let c = Polynomial::constant(3, ratio(5, 7));
        assert_eq!(symmetrize_polynomial(&c, 3), Polynomial::constant(1, ratio(5, 7)));
    }

    #[test]
    fn block_symmetrize_examples() {
        let g = block_symmetrize(&majority(3), &[Block::Cube(3)]).unwrap();
        assert_eq!(g.values(), vec![1, 1, -1, -1]);
        assert_eq!(g.domain(), &PointSet::grid(&[3]));
        let p = block_symmetrize(&parity(2), &[Block::Cube(2)]).unwrap();
        assert_eq!(p.values(), vec![1, -1, 1]);
        let bad = BooleanFunction::from_values(PointSet::cube(2), &[1, -1, 1, 1]).unwrap();
        assert!(matches!(
            block_symmetrize(&bad, &[Block::Cube(2)]),
            Err(BoolFnError::NotBlockSymmetric { .. })
        ));
    }

    #[test]
    fn keep_block_passes_through() {
        let dom = PointSet::cube(2).product(&PointSet::grid(&[2]));
        let f = BooleanFunction::from_fn(dom, |p| if p[0] + p[1] > p[2] { -1 } else { 1 });
        let g = block_symmetrize(&f, &[Block::Cube(2), Block::Keep]).unwrap();
        assert_eq!(g.domain(), &PointSet::grid(&[2, 2]));
        for q in g.domain().iter() {
            assert_eq!(g.at(&q).unwrap() == -1, q[0] > q[1]);
        }
    }

    #[test]
    fn entropy_examples() {
        assert!(binary_entropy_bound_check(2, 1));
        assert!(binary_entropy_bound_check(4, 0));
        assert_eq!(binomial(10, 3), BigInt::from(120));
    }
}
