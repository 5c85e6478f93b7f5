//! Floating-point phase 1 used only to pick a starting basis for the exact
//! solver. Nothing computed here is trusted: the exact side re-derives the
//! basis inverse, rejects the basis unless it is primal feasible, and
//! finishes with exact pivots.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 64;

/// Basis (one column index per row, artificial `i` is `m + i`) that the
/// float simplex considers phase-1 optimal, or `None` if it lost track.
pub(super) fn float_basis(columns: &[Vec<(usize, BigInt)>], rows: usize) -> Option<Vec<usize>> {
    let m = columns.len();
    let cols: Vec<Vec<(usize, f64)>> = columns.iter().map(|c| to_float(c)).collect::<Option<_>>()?;
    let norms: Vec<f64> = cols.iter().map(|c| c.iter().map(|(_, v)| v.abs()).sum()).collect();
    let mut basis: Vec<usize> = (m..m + rows).collect();
    let mut in_basis = vec![false; m];
    let mut binv = identity(rows);
    // A small fixed perturbation of the right-hand side `e_last` keeps the
    // float iteration off degenerate vertices, where Dantzig pricing stalls.
    let rhs: Vec<f64> = (0..rows)
        .map(|i| {
            let jitter = ((i as f64 + 1.0) * 0.618_033_988_749_895).fract();
            f64::from(u8::from(i == rows - 1)) + 1e-7 * (1.0 + jitter)
        })
        .collect();
    let mut x = rhs.clone();
    let max_pivots = 50 * (rows + m);
    for it in 0..max_pivots {
        if it > 0 && it % REFACTOR_EVERY == 0 {
            binv = invert(&basis_matrix(&basis, &cols, rows, m), rows)?;
            x = (0..rows)
                .map(|i| binv[i * rows..(i + 1) * rows].iter().zip(&rhs).map(|(a, b)| a * b).sum())
                .collect();
        }
        // π = c_B B⁻¹ with unit cost on artificials.
        let mut pi = vec![0.0; rows];
        for (i, &var) in basis.iter().enumerate() {
            if var >= m {
                for (p, x) in pi.iter_mut().zip(&binv[i * rows..(i + 1) * rows]) {
                    *p += x;
                }
            }
        }
        let mut entering = None;
        let mut best = COST_TOL;
        for j in (0..m).filter(|&j| !in_basis[j]) {
            let dot: f64 = cols[j].iter().map(|&(k, v)| pi[k] * v).sum();
            let score = dot / norms[j];
            if score > best {
                best = score;
                entering = Some(j);
            }
        }
        let Some(j) = entering else {
            return Some(basis);
        };
        let u: Vec<f64> = (0..rows)
            .map(|i| cols[j].iter().map(|&(k, v)| binv[i * rows + k] * v).sum())
            .collect();
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..rows {
            if u[i] <= PIVOT_TOL {
                continue;
            }
            let ratio = x[i].max(0.0) / u[i];
            leave = match leave {
                Some((b, r)) if ratio > r + 1e-12 || (ratio > r - 1e-12 && u[i] <= u[b]) => Some((b, r)),
                _ => Some((i, ratio)),
            };
        }
        let (r, _) = leave?;
        let ur = u[r];
        let pivot_row: Vec<f64> = binv[r * rows..(r + 1) * rows].iter().map(|v| v / ur).collect();
        let xr = x[r] / ur;
        for i in 0..rows {
            x[i] = if i == r { xr } else { x[i] - u[i] * xr };
        }
        for i in 0..rows {
            let row = &mut binv[i * rows..(i + 1) * rows];
            if i == r {
                row.copy_from_slice(&pivot_row);
            } else if u[i] != 0.0 {
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= u[i] * p;
                }
            }
        }
        if basis[r] < m {
            in_basis[basis[r]] = false;
        }
        basis[r] = j;
        in_basis[j] = true;
    }
    Some(basis)
}

/// Column scaled to unit max-norm; a column whose entries do not fit an
/// `f64` gives up on the guide.
fn to_float(col: &[(usize, BigInt)]) -> Option<Vec<(usize, f64)>> {
    let scale = col.iter().map(|(_, v)| v.abs()).max().unwrap_or_else(BigInt::zero);
    if scale.is_zero() {
        return Some(vec![]);
    }
    let s = scale.to_f64().filter(|s| s.is_finite())?;
    col.iter()
        .map(|(k, v)| v.to_f64().filter(|x| x.is_finite()).map(|x| (*k, x / s)))
        .collect()
}

fn identity(n: usize) -> Vec<f64> {
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        a[i * n + i] = 1.0;
    }
    a
}

fn basis_matrix(basis: &[usize], cols: &[Vec<(usize, f64)>], rows: usize, m: usize) -> Vec<f64> {
    let mut b = vec![0.0; rows * rows];
    for (c, &var) in basis.iter().enumerate() {
        if var >= m {
            b[(var - m) * rows + c] = 1.0;
        } else {
            for &(k, v) in &cols[var] {
                b[k * rows + c] = v;
            }
        }
    }
    b
}

/// Gauss–Jordan with partial pivoting; `None` when numerically singular.
fn invert(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut a = a.to_vec();
    let mut inv = identity(n);
    for k in 0..n {
        let p = (k..n).max_by(|&x, &y| a[x * n + k].abs().total_cmp(&a[y * n + k].abs()))?;
        if a[p * n + k].abs() < 1e-12 {
            return None;
        }
        for j in 0..n {
            a.swap(k * n + j, p * n + j);
            inv.swap(k * n + j, p * n + j);
        }
        let d = a[k * n + k];
        for j in 0..n {
            a[k * n + j] /= d;
            inv[k * n + j] /= d;
        }
        for i in (0..n).filter(|&i| i != k) {
            let f = a[i * n + k];
            if f != 0.0 {
                for j in 0..n {
                    a[i * n + j] -= f * a[k * n + j];
                    inv[i * n + j] -= f * inv[k * n + j];
                }
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_permutation_like_matrix() {
        let a = vec![0.0, 2.0, 1.0, 0.0];
        let inv = invert(&a, 2).unwrap();
        assert_eq!(inv, vec![0.0, 1.0, 0.5, 0.0]);
        assert!(invert(&[1.0, 2.0, 2.0, 4.0], 2).is_none());
    }
}
