//! Small dense linear algebra over [`Real`]. Matrices here are at most a
//! handful of rows wide, so plain row-major storage is enough.

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix");
            data.extend_from_slice(row);
        }
        Self { rows: r, cols: c, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// `a bᵀ`.
    pub fn outer(a: &[T], b: &[T]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| crate::scalar::dot(self.row(i), v)).collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(T::zero(), |acc, k| acc + self[(i, k)] * other[(k, j)])
        })
    }

    pub fn scaled(&self, k: T) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| x * k).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect(),
        }
    }

    pub fn add_assign_scaled(&mut self, other: &Self, k: T) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += k * b;
        }
    }

    pub fn frobenius(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &x| acc.max(x.abs()))
    }

    /// Congruence `Aᵀ self A`.
    pub fn congruence(&self, a: &Self) -> Self {
        a.transpose().mul(self).mul(a)
    }

    /// Symmetrizes in place, `(M + Mᵀ)/2`.
    pub fn symmetrize(&mut self) {
        let n = self.rows;
        for i in 0..n {
            for j in i + 1..n {
                let v = (self[(i, j)] + self[(j, i)]) * T::half();
                self[(i, j)] = v;
                self[(j, i)] = v;
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// LU factorization with partial pivoting; `None` if numerically singular.
    fn lu(&self) -> Option<(Self, Vec<usize>, T)> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = T::one();
        for k in 0..n {
            let (p, pv) = (k..n)
                .map(|i| (i, a[(i, k)].abs()))
                .fold((k, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pv == T::zero() {
                return None;
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                let f = a[(i, k)] / a[(k, k)];
                a[(i, k)] = f;
                for j in k + 1..n {
                    let d = f * a[(k, j)];
                    a[(i, j)] -= d;
                }
            }
        }
        Some((a, perm, sign))
    }

    pub fn det(&self) -> T {
        match self.lu() {
            None => T::zero(),
            Some((a, _, sign)) => (0..self.rows).fold(sign, |acc, i| acc * a[(i, i)]),
        }
    }

    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        let n = self.rows;
        let (a, perm, _) = self.lu()?;
        let mut y: Vec<T> = perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let d = a[(i, k)] * y[k];
                y[i] -= d;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let d = a[(i, k)] * y[k];
                y[i] -= d;
            }
            y[i] /= a[(i, i)];
        }
        if y.iter().all(|v| v.is_finite()) {
            Some(y)
        } else {
            None
        }
    }

    pub fn inverse(&self) -> Option<Self> {
        let n = self.rows;
        let mut inv = Self::zeros(n, n);
        for c in 0..n {
            let e: Vec<T> = (0..n).map(|r| if r == c { T::one() } else { T::zero() }).collect();
            let col = self.solve(&e)?;
            for r in 0..n {
                inv[(r, c)] = col[r];
            }
        }
        Some(inv)
    }

    /// Cholesky factor `L` with `self = L Lᵀ`; `None` unless positive definite.
    pub fn cholesky(&self) -> Option<Self> {
        let n = self.rows;
        let mut l = Self::zeros(n, n);
        for j in 0..n {
            let mut d = self[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > T::zero()) {
                return None;
            }
            let djj = d.sqrt();
            l[(j, j)] = djj;
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / djj;
            }
        }
        Some(l)
    }

    /// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
    /// Eigenvalues are returned in ascending order; eigenvectors are the
    /// columns of the returned matrix.
    pub fn symmetric_eigen(&self) -> (Vec<T>, Self) {
        let n = self.rows;
        let mut a = self.clone();
        a.symmetrize();
        let mut v = Self::identity(n);
        let eps = T::epsilon();
        for _sweep in 0..100 {
            let off: T = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .fold(T::zero(), |acc, (i, j)| acc + a[(i, j)] * a[(i, j)]);
            let scale = a.frobenius();
            if off.sqrt() <= eps * scale || off == T::zero() {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    if apq == T::zero() {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (T::two() * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap_or(std::cmp::Ordering::Equal));
        let vals = order.iter().map(|&i| a[(i, i)]).collect();
        let vecs = Self::from_fn(n, n, |r, c| v[(r, order[c])]);
        (vals, vecs)
    }

    pub fn symmetric_eigenvalues(&self) -> Vec<T> {
        self.symmetric_eigen().0
    }

    /// Sub-block with the given row and column index sets.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }
}

impl<T> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Number of eigenvalues above `rel_threshold · max(λ_max, 1)`.
pub fn numerical_rank<T: Real>(eigenvalues: &[T], rel_threshold: T) -> usize {
    let top = eigenvalues.iter().fold(T::zero(), |m, &x| m.max(x.abs())).max(T::one());
    eigenvalues.iter().filter(|&&x| x > rel_threshold * top).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_recovers_known_spectrum() {
        let m = Mat::<f64>::from_rows(&[vec![2.0, 1.0, 0.0], vec![1.0, 2.0, 0.0], vec![0.0, 0.0, 5.0]]);
        let (vals, vecs) = m.symmetric_eigen();
        let expect = [1.0, 3.0, 5.0];
        for (v, e) in vals.iter().zip(expect) {
            assert!((v - e).abs() < 1e-13);
        }
        for c in 0..3 {
            let col: Vec<f64> = (0..3).map(|r| vecs[(r, c)]).collect();
            let mv = m.mul_vec(&col);
            for r in 0..3 {
                assert!((mv[r] - vals[c] * col[r]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lu_solve_det_inverse() {
        let m = Mat::<f64>::from_rows(&[vec![0.0, 2.0], vec![3.0, 1.0]]);
        assert!((m.det() + 6.0).abs() < 1e-14);
        let x = m.solve(&[2.0, 4.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
        let inv = m.inverse().unwrap();
        let id = m.mul(&inv);
        assert!((id[(0, 0)] - 1.0).abs() < 1e-14 && id[(0, 1)].abs() < 1e-14);
        assert!(Mat::<f64>::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).solve(&[1.0, 1.0]).is_none());
    }

    #[test]
    fn cholesky_detects_indefinite() {
        assert!(Mat::<f64>::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).cholesky().is_some());
        assert!(Mat::<f64>::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).cholesky().is_none());
    }

    #[test]
    fn rank_threshold_is_scale_aware() {
        assert_eq!(numerical_rank(&[0.0, 1e-12, 3.0], 1e-8), 1);
        assert_eq!(numerical_rank(&[1e-9, 2e-9], 1e-8), 0);
        assert_eq!(numerical_rank(&[1e-7f32, 2.0], 1e-8), 2);
    }
}
