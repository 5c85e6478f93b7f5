use serde::{Deserialize, Serialize};

use super::{BoolFnError, PointSet};

/// A ±1-valued function on a finite point set.
///
/// Polarity: `−1` means true and `+1` means false. Internally one bit per
/// point is stored, with a set bit meaning `−1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FunctionDoc", into = "FunctionDoc")]
pub struct BooleanFunction {
    domain: PointSet,
    bits: Vec<u64>,
}

impl BooleanFunction {
    /// Evaluates `f` at every point; `f` must return ±1.
    pub fn from_fn(domain: PointSet, mut f: impl FnMut(&[i64]) -> i8) -> Self {
        let len = domain.len();
        let mut bits = vec![0u64; len.div_ceil(64)];
        let mut buf = vec![0i64; domain.dim()];
        for i in 0..len {
            domain.write_point(i, &mut buf);
            match f(&buf) {
                -1 => bits[i / 64] |= 1 << (i % 64),
                1 => {}
                v => panic!("Boolean function value {v} is not ±1"),
            }
        }
        Self { domain, bits }
    }

    /// Evaluates `f` at every point index; `f` must return ±1.
    pub fn from_index_fn(domain: PointSet, mut f: impl FnMut(usize) -> i8) -> Self {
        let len = domain.len();
        let mut bits = vec![0u64; len.div_ceil(64)];
        for i in 0..len {
            match f(i) {
                -1 => bits[i / 64] |= 1 << (i % 64),
                1 => {}
                v => panic!("Boolean function value {v} is not ±1"),
            }
        }
        Self { domain, bits }
    }

    pub fn from_values(domain: PointSet, values: &[i8]) -> Result<Self, BoolFnError> {
        if values.len() != domain.len() {
            return Err(BoolFnError::DimensionMismatch {
                expected: domain.len(),
                found: values.len(),
            });
        }
        if let Some(&v) = values.iter().find(|v| v.abs() != 1) {
            return Err(BoolFnError::Malformed(format!("value {v} is not ±1")));
        }
        Ok(Self::from_index_fn(domain, |i| values[i]))
    }

    pub fn constant(domain: PointSet, value: i8) -> Self {
        Self::from_index_fn(domain, |_| value)
    }

    pub fn domain(&self) -> &PointSet {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    pub fn value(&self, i: usize) -> i8 {
        if self.is_true(i) {
            -1
        } else {
            1
        }
    }

    /// Whether the value at point `i` is `−1`.
    pub fn is_true(&self, i: usize) -> bool {
        assert!(i < self.len(), "point index {i} out of range");
        (self.bits[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn values(&self) -> Vec<i8> {
        (0..self.len()).map(|i| self.value(i)).collect()
    }

    /// Value at a point given by coordinates, if the point is in the domain.
    pub fn at(&self, p: &[i64]) -> Option<i8> {
        self.domain.index_of(p).map(|i| self.value(i))
    }

    pub fn count_true(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn negate(&self) -> Self {
        Self::from_index_fn(self.domain.clone(), |i| -self.value(i))
    }

    /// The restriction of `self` to the points at `indices`.
    pub fn restrict(&self, indices: &[usize]) -> Self {
        Self::from_index_fn(self.domain.subset(indices), |j| self.value(indices[j]))
    }
}

#[derive(Serialize, Deserialize)]
struct FunctionDoc {
    domain: PointSet,
    values: Vec<i8>,
}

impl From<BooleanFunction> for FunctionDoc {
    fn from(f: BooleanFunction) -> Self {
        FunctionDoc {
            values: f.values(),
            domain: f.domain,
        }
    }
}

impl TryFrom<FunctionDoc> for BooleanFunction {
    type Error = BoolFnError;
    fn try_from(doc: FunctionDoc) -> Result<Self, BoolFnError> {
        BooleanFunction::from_values(doc.domain, &doc.values)
    }
}
