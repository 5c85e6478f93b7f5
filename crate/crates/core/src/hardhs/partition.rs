use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::HardError;
use crate::exactlp::Rational;
use crate::fourier::wht_i64;
use crate::par::{self, Execution};

/// Largest cube dimension a partition will enumerate.
pub const MAX_PARTITION_DIM: usize = 22;
/// Largest `k` for which the `2^{k+1}` classes are materialized.
pub const MAX_PARTITION_K: u32 = 21;
/// Largest `k` accepted by [`sample_weights`].
pub const MAX_WEIGHT_K: u32 = 62;

/// Integer weights `w_i ∈ [0, 2^{k+1})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightVector {
    pub n: usize,
    pub k: u32,
    pub weights: Vec<u64>,
    /// `None` when the weights did not come from [`sample_weights`].
    pub seed: Option<u64>,
}

impl WeightVector {
    pub fn new(k: u32, weights: Vec<u64>) -> Result<Self, HardError> {
        if k > MAX_WEIGHT_K {
            return Err(HardError::TooLarge(format!("k = {k} exceeds {MAX_WEIGHT_K}")));
        }
        if let Some((i, &w)) = weights.iter().enumerate().find(|(_, &w)| w >> (k + 1) != 0) {
            return Err(HardError::Malformed(format!("weight {i} = {w} is not below 2^{}", k + 1)));
        }
        Ok(Self {
            n: weights.len(),
            k,
            weights,
            seed: None,
        })
    }

    pub fn modulus(&self) -> u64 {
        1 << (self.k + 1)
    }

    /// `Σ wᵢxᵢ` for a cube point given as a bitmask.
    pub fn form(&self, x: u64) -> u64 {
        self.weights
            .iter()
            .enumerate()
            .filter(|(i, _)| x >> i & 1 == 1)
            .map(|(_, w)| w)
            .sum()
    }

    pub fn residue(&self, x: u64) -> u64 {
        self.form(x) & (self.modulus() - 1)
    }
}

/// Draws `n` weights of `k + 1` bits each.
///
/// Weight `i` is the low `k + 1` bits of the first 64-bit output of
/// ChaCha20 keyed by `seed_from_u64(seed)` on stream `i`, so each weight
/// depends only on `(seed, i)` and every value in range is equally likely.
/// Panics if `k` exceeds [`MAX_WEIGHT_K`].
pub fn sample_weights(n: usize, k: u32, seed: u64) -> WeightVector {
    assert!(k <= MAX_WEIGHT_K, "k = {k} exceeds {MAX_WEIGHT_K}");
    let mask = (1u64 << (k + 1)) - 1;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let weights = (0..n)
        .map(|i| {
            rng.set_stream(i as u64);
            rng.set_word_pos(0);
            rng.next_u64() & mask
        })
        .collect();
    WeightVector {
        n,
        k,
        weights,
        seed: Some(seed),
    }
}

/// The classes `X_s = {x : Σ wᵢxᵢ ≡ s (mod 2^{k+1})}` of the cube.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueClassPartition {
    weights: WeightVector,
    /// `classes[s]` lists the members of `X_s` as increasing bitmasks.
    classes: Vec<Vec<u32>>,
}

impl ResidueClassPartition {
    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn n(&self) -> usize {
        self.weights.n
    }

    pub fn k(&self) -> u32 {
        self.weights.k
    }

    pub fn modulus(&self) -> u64 {
        self.weights.modulus()
    }

    pub fn classes(&self) -> &[Vec<u32>] {
        &self.classes
    }

    pub fn class(&self, s: u64) -> &[u32] {
        &self.classes[s as usize]
    }

    /// Values of the indicator `f_s` on the whole cube.
    pub fn indicator(&self, s: u64) -> Vec<i64> {
        let mut t = vec![0; 1 << self.n()];
        for &x in self.class(s) {
            t[x as usize] = 1;
        }
        t
    }

    /// `Σ_{x∈X_s} χ_T(x)` for every `T`, that is `2ⁿ f̂_s(T)`.
    pub fn class_sums(&self, s: u64) -> Vec<i64> {
        wht_i64(&self.indicator(s))
    }
}

pub fn build_partition(w: &WeightVector) -> Result<ResidueClassPartition, HardError> {
    if w.n > MAX_PARTITION_DIM {
        return Err(HardError::TooLarge(format!(
            "cube dimension {} exceeds {MAX_PARTITION_DIM}",
            w.n
        )));
    }
    if w.k > MAX_PARTITION_K {
        return Err(HardError::TooLarge(format!("k = {} exceeds {MAX_PARTITION_K}", w.k)));
    }
    let mask = w.modulus() - 1;
    let mut classes = vec![Vec::new(); w.modulus() as usize];
    let mut residue = vec![0u64; 1 << w.n];
    classes[0].push(0);
    for x in 1..residue.len() {
        let low = x.trailing_zeros() as usize;
        let r = (residue[x & (x - 1)] + w.weights[low]) & mask;
        residue[x] = r;
        classes[r as usize].push(x as u32);
    }
    Ok(ResidueClassPartition {
        weights: w.clone(),
        classes,
    })
}

/// Partition for the weights `w_j = Σᵢ 2ⁱ [j ∈ Sᵢ]`, `i = 0, …, k`.
///
/// Coordinates are zero-based.
pub fn partition_from_sets(n: usize, sets: &[Vec<usize>]) -> Result<ResidueClassPartition, HardError> {
    if sets.is_empty() {
        return Err(HardError::Malformed("need at least one set".into()));
    }
    let k = (sets.len() - 1) as u32;
    let mut weights = vec![0u64; n];
    for (i, set) in sets.iter().enumerate() {
        for &j in set {
            if j >= n {
                return Err(HardError::Malformed(format!("coordinate {j} outside 0..{n}")));
            }
            weights[j] |= 1 << i;
        }
    }
    build_partition(&WeightVector::new(k, weights)?)
}

/// Worst deviation found in one class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDeviation {
    pub s: u64,
    /// Subset mask attaining the deviation.
    pub set: u64,
    #[serde(with = "crate::exactlp::rational::serde_rational")]
    pub deviation: Rational,
}

/// Exhaustive check of `|f̂_s(T) − δ_{T,∅}/2^{k+1}| ≤ 2^{−⌈ζn⌉}` over
/// `|T| ≤ ⌊εn⌋`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumReport {
    #[serde(with = "crate::exactlp::rational::serde_rational")]
    pub eps: Rational,
    #[serde(with = "crate::exactlp::rational::serde_rational")]
    pub zeta: Rational,
    /// `⌊εn⌋`.
    pub max_order: usize,
    /// `⌈ζn⌉`; fractional `ζn` is rounded up, which only makes the bound stricter.
    pub exponent: u32,
    pub classes: Vec<ClassDeviation>,
    pub worst: ClassDeviation,
    pub pass: bool,
}

pub fn verify_spectrum_bounds(
    p: &ResidueClassPartition,
    eps: &Rational,
    zeta: &Rational,
    exec: Execution,
) -> Result<SpectrumReport, HardError> {
    if eps.is_negative() || zeta.is_negative() {
        return Err(HardError::Malformed("ε and ζ must be nonnegative".into()));
    }
    let n = p.n();
    let nr = Rational::from_integer(n.into());
    let max_order = (eps * &nr).floor().to_integer().to_usize().unwrap_or(usize::MAX).min(n);
    let exponent = (zeta * &nr)
        .ceil()
        .to_integer()
        .to_u32()
        .ok_or_else(|| HardError::TooLarge("ζn does not fit an exponent".into()))?;
    let sets: Vec<u64> = (0..1u64 << n)
        .filter(|t| t.count_ones() as usize <= max_order)
        .collect();
    let k1 = p.k() + 1;
    // Deviation numerators over the common denominator 2^{n+k+1}.
    let classes = par::map_range(exec, 0..p.modulus() as usize, |s| {
        let s = s as u64;
        if p.class(s).is_empty() {
            return (s, 0, BigInt::one() << n);
        }
        let sums = p.class_sums(s);
        let mut best = (0u64, BigInt::from(-1));
        for &t in &sets {
            let mut v = BigInt::from(sums[t as usize]) << k1;
            if t == 0 {
                v -= BigInt::one() << n;
            }
            let v = v.abs();
            if v > best.1 {
                best = (t, v);
            }
        }
        (s, best.0, best.1)
    });
    let den = BigInt::one() << (n + k1 as usize);
    let classes: Vec<ClassDeviation> = classes
        .into_iter()
        .map(|(s, set, num)| ClassDeviation {
            s,
            set,
            deviation: Rational::new(num, den.clone()),
        })
        .collect();
    let worst = classes
        .iter()
        .fold(None::<&ClassDeviation>, |acc, c| match acc {
            Some(a) if a.deviation >= c.deviation => Some(a),
            _ => Some(c),
        })
        .expect("at least two classes")
        .clone();
    let bound = Rational::new(BigInt::one(), BigInt::one() << exponent as usize);
    Ok(SpectrumReport {
        eps: eps.clone(),
        zeta: zeta.clone(),
        max_order,
        exponent,
        pass: worst.deviation <= bound,
        classes,
        worst,
    })
}

/// `|X_s| = 2ⁿ f̂_s(∅)` for every class.
pub fn class_sizes_match_spectrum(p: &ResidueClassPartition) -> bool {
    (0..p.modulus()).all(|s| p.class_sums(s)[0] == p.class(s).len() as i64)
}

/// Whether the classes are disjoint, cover the cube, and agree pointwise
/// with the defining congruence.
pub fn partition_is_valid(p: &ResidueClassPartition) -> bool {
    let mut seen = vec![false; 1 << p.n()];
    for (s, class) in p.classes().iter().enumerate() {
        for &x in class {
            if seen[x as usize] || p.weights().residue(x as u64) != s as u64 {
                return false;
            }
            seen[x as usize] = true;
        }
    }
    seen.iter().all(|&b| b)
}
