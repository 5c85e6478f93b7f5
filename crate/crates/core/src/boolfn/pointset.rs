use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use super::BoolFnError;

/// Largest cube dimension a [`PointSet`] will materialize.
pub const MAX_CUBE_DIM: usize = 30;

/// Finite ordered set of distinct points in ℤ^m.
///
/// Cube-tagged sets enumerate `{0,1}^n` with point `i` having coordinate
/// `c` equal to bit `c` of `i`. Products list the first factor fastest,
/// which keeps `cube(a) × cube(b)` identical to `cube(a + b)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PointSetDoc", into = "PointSetDoc")]
pub struct PointSet {
    dim: usize,
    repr: Repr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Repr {
    Cube,
    Explicit(Vec<i64>),
}

impl PointSet {
    /// The full cube `{0,1}^n`. Panics above [`MAX_CUBE_DIM`].
    pub fn cube(n: usize) -> Self {
        assert!(n <= MAX_CUBE_DIM, "cube dimension {n} exceeds {MAX_CUBE_DIM}");
        Self {
            dim: n,
            repr: Repr::Cube,
        }
    }

    pub fn from_points(dim: usize, points: Vec<Vec<i64>>) -> Result<Self, BoolFnError> {
        let mut seen = HashSet::with_capacity(points.len());
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.len() != dim {
                return Err(BoolFnError::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            if !seen.insert(p.clone()) {
                return Err(BoolFnError::DuplicatePoint(p));
            }
            coords.extend(p);
        }
        Ok(Self {
            dim,
            repr: Repr::Explicit(coords),
        })
    }

    /// `{0,…,n₁} × ⋯ × {0,…,n_k}`, first coordinate fastest.
    pub fn grid(sizes: &[usize]) -> Self {
        let mut points = vec![vec![]];
        for &size in sizes {
            let mut next = Vec::with_capacity(points.len() * (size + 1));
            for v in 0..=size as i64 {
                for p in &points {
                    let mut q: Vec<i64> = p.clone();
                    q.push(v);
                    next.push(q);
                }
            }
            points = next;
        }
        // Reorder so the first coordinate varies fastest.
        points.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
        Self::from_points(sizes.len(), points).expect("grid points are distinct")
    }

    /// The univariate set `{±1, ±2, …, ±n}` in increasing order.
    pub fn sign_grid(n: usize) -> Self {
        let n = n as i64;
        let points = (-n..=-1).chain(1..=n).map(|v| vec![v]).collect();
        Self::from_points(1, points).expect("distinct")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        match &self.repr {
            Repr::Cube => 1usize << self.dim,
            Repr::Explicit(c) => {
                if self.dim == 0 {
                    // Only the empty point can exist in ℤ^0.
                    c.len().min(1)
                } else {
                    c.len() / self.dim
                }
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `Some(n)` when this set is the cube `{0,1}^n`.
    pub fn cube_dim(&self) -> Option<usize> {
        matches!(self.repr, Repr::Cube).then_some(self.dim)
    }

    pub fn coord(&self, i: usize, c: usize) -> i64 {
        match &self.repr {
            Repr::Cube => ((i >> c) & 1) as i64,
            Repr::Explicit(coords) => coords[i * self.dim + c],
        }
    }

    pub fn point(&self, i: usize) -> Vec<i64> {
        (0..self.dim).map(|c| self.coord(i, c)).collect()
    }

    pub fn write_point(&self, i: usize, out: &mut [i64]) {
        for (c, o) in out.iter_mut().enumerate().take(self.dim) {
            *o = self.coord(i, c);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    pub fn index_of(&self, p: &[i64]) -> Option<usize> {
        if p.len() != self.dim {
            return None;
        }
        match &self.repr {
            Repr::Cube => p.iter().enumerate().try_fold(0usize, |acc, (c, &v)| match v {
                0 => Some(acc),
                1 => Some(acc | (1 << c)),
                _ => None,
            }),
            Repr::Explicit(_) => (0..self.len()).find(|&i| (0..self.dim).all(|c| self.coord(i, c) == p[c])),
        }
    }

    /// Cartesian product; index of `(i, j)` is `i + len(self) * j`.
    pub fn product(&self, other: &PointSet) -> PointSet {
        if let (Some(a), Some(b)) = (self.cube_dim(), other.cube_dim()) {
            return PointSet::cube(a + b);
        }
        let dim = self.dim + other.dim;
        let mut coords = Vec::with_capacity(self.len() * other.len() * dim);
        for j in 0..other.len() {
            for i in 0..self.len() {
                for c in 0..self.dim {
                    coords.push(self.coord(i, c));
                }
                for c in 0..other.dim {
                    coords.push(other.coord(j, c));
                }
            }
        }
        PointSet {
            dim,
            repr: Repr::Explicit(coords),
        }
    }

    /// Distinct values taken by coordinate `c`.
    pub fn coordinate_values(&self, c: usize) -> BTreeSet<i64> {
        match self.repr {
            Repr::Cube if !self.is_empty() => [0, 1].into_iter().collect(),
            _ => (0..self.len()).map(|i| self.coord(i, c)).collect(),
        }
    }

    /// Largest useful exponent per coordinate: a coordinate taking `r`
    /// distinct values satisfies a degree-`r` polynomial identity on this
    /// set, so higher powers reduce to lower ones. Cube coordinates get 1.
    pub fn exponent_caps(&self) -> Vec<u32> {
        (0..self.dim)
            .map(|c| self.coordinate_values(c).len().saturating_sub(1) as u32)
            .collect()
    }

    /// The points at `indices`, as an explicit set.
    pub fn subset(&self, indices: &[usize]) -> PointSet {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            for c in 0..self.dim {
                coords.push(self.coord(i, c));
            }
        }
        PointSet {
            dim: self.dim,
            repr: Repr::Explicit(coords),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PointSetDoc {
    dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cube: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    points: Option<Vec<Vec<i64>>>,
}

impl From<PointSet> for PointSetDoc {
    fn from(p: PointSet) -> Self {
        match p.cube_dim() {
            Some(n) => PointSetDoc {
                dim: n,
                cube: Some(n),
                points: None,
            },
            None => PointSetDoc {
                dim: p.dim,
                cube: None,
                points: Some(p.iter().collect()),
            },
        }
    }
}

impl TryFrom<PointSetDoc> for PointSet {
    type Error = BoolFnError;
    fn try_from(doc: PointSetDoc) -> Result<Self, BoolFnError> {
        match (doc.cube, doc.points) {
            (Some(n), None) if n == doc.dim && n <= MAX_CUBE_DIM => Ok(PointSet::cube(n)),
            (None, Some(points)) => PointSet::from_points(doc.dim, points),
            _ => Err(BoolFnError::Malformed(
                "point set needs either a cube dimension equal to dim or a point list".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_layout() {
        let c = PointSet::cube(3);
        assert_eq!(c.len(), 8);
        assert_eq!(c.point(5), vec![1, 0, 1]);
        assert_eq!(c.index_of(&[1, 0, 1]), Some(5));
        assert_eq!(c.index_of(&[2, 0, 1]), None);
    }

    #[test]
    fn cube_product_is_cube() {
        let p = PointSet::cube(2).product(&PointSet::cube(1));
        assert_eq!(p.cube_dim(), Some(3));
    }

    #[test]
    fn explicit_product_matches_cube_order() {
        let a = PointSet::from_points(1, vec![vec![0], vec![1]]).unwrap();
        let b = PointSet::from_points(1, vec![vec![0], vec![1]]).unwrap();
        let p = a.product(&b);
        let c = PointSet::cube(2);
        for i in 0..4 {
            assert_eq!(p.point(i), c.point(i));
        }
    }

    #[test]
    fn grid_first_coordinate_fastest() {
        let g = PointSet::grid(&[2, 1]);
        assert_eq!(g.len(), 6);
        assert_eq!(g.point(0), vec![0, 0]);
        assert_eq!(g.point(1), vec![1, 0]);
        assert_eq!(g.point(3), vec![0, 1]);
    }

    #[test]
    fn duplicates_rejected() {
        assert!(matches!(
            PointSet::from_points(1, vec![vec![1], vec![1]]),
            Err(BoolFnError::DuplicatePoint(_))
        ));
    }

    #[test]
    fn sign_grid_and_caps() {
        let s = PointSet::sign_grid(2);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![vec![-2], vec![-1], vec![1], vec![2]]);
        assert_eq!(s.exponent_caps(), vec![3]);
        assert_eq!(PointSet::cube(4).exponent_caps(), vec![1; 4]);
    }

    #[test]
    fn json_round_trip() {
        for p in [PointSet::cube(3), PointSet::sign_grid(3), PointSet::grid(&[1, 2])] {
            let s = serde_json::to_string(&p).unwrap();
            let q: PointSet = serde_json::from_str(&s).unwrap();
            assert_eq!(p, q);
        }
    }
}
