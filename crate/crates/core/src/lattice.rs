//! Integer lattice utilities: primitivity, saturation and unimodular completion.

use num_integer::Integer;

use crate::exact::gcd_slice;
#[cfg(test)]
use crate::exact::det_i64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("vector {0:?} is not primitive (gcd {1})")]
    NotPrimitive(Vec<i64>, i64),
    #[error("vectors are linearly dependent")]
    Dependent,
    #[error("sublattice spanned by {rows:?} is not saturated (index {index})")]
    NotSaturated { rows: Vec<Vec<i64>>, index: i128 },
    #[error("dimension mismatch: expected vectors of length {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("integer overflow in lattice reduction")]
    Overflow,
}

pub fn is_primitive(v: &[i64]) -> bool {
    gcd_slice(v) == 1
}

/// Column-style Hermite reduction of a `j × n` integer matrix `D`.
///
/// Returns `(L, W)` with `D = [L | 0] · W`, `L` lower triangular `j × j`
/// and `W` unimodular `n × n`.
fn column_reduce(rows: &[Vec<i64>], n: usize) -> Result<(Vec<Vec<i128>>, Vec<Vec<i128>>), LatticeError> {
    let j = rows.len();
    let mut d: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut w: Vec<Vec<i128>> = (0..n).map(|r| (0..n).map(|c| i128::from(r == c)).collect()).collect();
    for i in 0..j {
        if d[i][i] == 0 {
            if let Some(k) = (i + 1..n).find(|&k| d[i][k] != 0) {
                for row in d.iter_mut() {
                    row.swap(i, k);
                }
                w.swap(i, k);
            } else {
                return Err(LatticeError::Dependent);
            }
        }
        for k in i + 1..n {
            let b = d[i][k];
            if b == 0 {
                continue;
            }
            let a = d[i][i];
            let eg = a.extended_gcd(&b);
            let (g, x, y) = (eg.gcd, eg.x, eg.y);
            let (ag, bg) = (a / g, b / g);
            for row in d.iter_mut() {
                let (ci, ck) = (row[i], row[k]);
                row[i] = x.checked_mul(ci).and_then(|p| y.checked_mul(ck).and_then(|q| p.checked_add(q))).ok_or(LatticeError::Overflow)?;
                row[k] = (-bg).checked_mul(ci).and_then(|p| ag.checked_mul(ck).and_then(|q| p.checked_add(q))).ok_or(LatticeError::Overflow)?;
            }
            // inverse operation acts on the rows of W
            for c in 0..n {
                let (ri, rk) = (w[i][c], w[k][c]);
                w[i][c] = ag * ri + bg * rk;
                w[k][c] = -y * ri + x * rk;
            }
        }
        if d[i][i] == 0 {
            return Err(LatticeError::Dependent);
        }
    }
    let l = d.iter().map(|r| r[..j].to_vec()).collect();
    Ok((l, w))
}

fn to_i64_rows(m: &[Vec<i128>]) -> Result<Vec<Vec<i64>>, LatticeError> {
    m.iter()
        .map(|r| r.iter().map(|&x| i64::try_from(x).map_err(|_| LatticeError::Overflow)).collect())
        .collect()
}

/// Basis of the saturation `span_Q(rows) ∩ Zⁿ`, together with a complement that
/// turns it into a unimodular matrix `[complement; basis]`.
pub fn saturation(rows: &[Vec<i64>], n: usize) -> Result<(Vec<Vec<i64>>, Vec<Vec<i64>>), LatticeError> {
    for r in rows {
        if r.len() != n {
            return Err(LatticeError::Dimension { expected: n, got: r.len() });
        }
    }
    let j = rows.len();
    let (_, w) = column_reduce(rows, n)?;
    let w = to_i64_rows(&w)?;
    Ok((w[..j].to_vec(), w[j..].to_vec()))
}

/// Unimodular `n × n` matrix whose last rows are exactly `rows`.
///
/// Fails when a row is not primitive or when the rows do not span a
/// saturated sublattice. The determinant is `±1`.
pub fn unimodular_completion(rows: &[Vec<i64>], n: usize) -> Result<Vec<Vec<i64>>, LatticeError> {
    for r in rows {
        if r.len() != n {
            return Err(LatticeError::Dimension { expected: n, got: r.len() });
        }
        let g = gcd_slice(r);
        if g != 1 {
            return Err(LatticeError::NotPrimitive(r.clone(), g));
        }
    }
    let j = rows.len();
    let (l, w) = column_reduce(rows, n)?;
    let det_l: i128 = (0..j).map(|i| l[i][i]).product();
    if det_l.abs() != 1 {
        return Err(LatticeError::NotSaturated { rows: rows.to_vec(), index: det_l.abs() });
    }
    let w = to_i64_rows(&w)?;
    let mut u: Vec<Vec<i64>> = w[j..].to_vec();
    u.extend(rows.iter().cloned());
    Ok(u)
}

/// Inverse of a unimodular integer matrix (exact, via adjugate-free elimination).
pub fn unimodular_inverse(u: &[Vec<i64>]) -> Vec<Vec<i64>> {
    use crate::exact::{solve, Rational};
    let n = u.len();
    let a: Vec<Vec<Rational>> = u.iter().map(|r| r.iter().map(|&x| Rational::from(x as i128)).collect()).collect();
    let mut cols = Vec::with_capacity(n);
    for c in 0..n {
        let e: Vec<Rational> = (0..n).map(|r| Rational::from(i128::from(r == c))).collect();
        cols.push(solve(&a, &e).expect("unimodular matrix is invertible"));
    }
    (0..n)
        .map(|r| (0..n).map(|c| cols[c][r].to_integer() as i64).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn completion_of_diagonal_normal() {
        let u = unimodular_completion(&[vec![1, 1]], 2).unwrap();
        assert_eq!(u[1], vec![1, 1]);
        assert_eq!(det_i64(&u).abs(), 1);
    }

    #[test]
    fn non_primitive_rejected() {
        assert!(matches!(unimodular_completion(&[vec![2, 0]], 2), Err(LatticeError::NotPrimitive(_, 2))));
    }

    #[test]
    fn non_saturated_pair_rejected() {
        // (1,1) and (1,-1) span an index-2 sublattice of Z^2
        let err = unimodular_completion(&[vec![1, 1], vec![1, -1]], 2).unwrap_err();
        assert!(matches!(err, LatticeError::NotSaturated { index: 2, .. }));
        let (basis, _) = saturation(&[vec![1, 1], vec![1, -1]], 2).unwrap();
        assert_eq!(det_i64(&basis).abs(), 1);
    }

    #[test]
    fn three_dimensional_completion() {
        let rows = vec![vec![1, 2, 3], vec![0, 1, 1]];
        let u = unimodular_completion(&rows, 3).unwrap();
        assert_eq!(det_i64(&u).abs(), 1);
        assert_eq!(&u[1..], &rows[..]);
        let inv = unimodular_inverse(&u);
        for i in 0..3 {
            for j in 0..3 {
                let s: i64 = (0..3).map(|k| u[i][k] * inv[k][j]).sum();
                assert_eq!(s, i64::from(i == j));
            }
        }
    }
}
