//! Polarizations as complex `n`-planes in `ℂ^{2n}` and their chordal
//! distances.
//!
//! In `(x, θ)` coordinates the Kähler polarization with Hessian `G` is the
//! plane `{(a, −iGa) : a ∈ ℂⁿ}`; the real polarization is `{(0, b)}`.

use num_complex::Complex;

use crate::linalg::Mat;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolarizationError {
    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

/// An orthonormal basis of a complex subspace of `ℂ^{2n}`, stored as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace<T> {
    pub ambient: usize,
    pub basis: Vec<Vec<Complex<T>>>,
}

fn cdot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

impl<T: Real> Subspace<T> {
    /// Gram–Schmidt (applied twice) on the spanning vectors; vectors whose
    /// remainder is below `1e-12` of their norm are dropped.
    pub fn from_span(ambient: usize, vectors: &[Vec<Complex<T>>]) -> Self {
        let mut basis: Vec<Vec<Complex<T>>> = Vec::new();
        for v in vectors {
            let n0 = cdot(v, v).re.sqrt();
            let mut w = v.clone();
            for _ in 0..2 {
                for q in &basis {
                    let c = cdot(q, &w);
                    for (wi, qi) in w.iter_mut().zip(q) {
                        *wi = *wi - c * qi;
                    }
                }
            }
            let nw = cdot(&w, &w).re.sqrt();
            if nw > n0 * T::lit(1e-12) && nw > T::zero() {
                basis.push(w.into_iter().map(|z| z / nw).collect());
            }
        }
        Self { ambient, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Orthogonal projector `Σ q q*` as a dense row-major matrix.
    pub fn projector(&self) -> Vec<Complex<T>> {
        let m = self.ambient;
        let mut p = vec![Complex::new(T::zero(), T::zero()); m * m];
        for q in &self.basis {
            for i in 0..m {
                for j in 0..m {
                    p[i * m + j] = p[i * m + j] + q[i] * q[j].conj();
                }
            }
        }
        p
    }

    /// Frobenius norm of the difference of the projectors.
    pub fn distance(&self, other: &Self) -> T {
        let (a, b) = (self.projector(), other.projector());
        a.iter().zip(&b).fold(T::zero(), |s, (x, y)| s + (*x - *y).norm_sqr()).sqrt()
    }
}

/// Kähler polarization at a point of the ray.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizationFrame<T> {
    pub x: Vec<T>,
    pub s: T,
    pub g: Mat<T>,
    pub plane: Subspace<T>,
}

fn zero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

impl<T: Real> PolarizationFrame<T> {
    pub fn new(x: Vec<T>, s: T, g: Mat<T>) -> Result<Self, PolarizationError> {
        if g.cholesky().is_none() {
            return Err(PolarizationError::NotPositiveDefinite);
        }
        let n = g.rows();
        let cols: Vec<Vec<Complex<T>>> = (0..n)
            .map(|k| {
                let mut v = vec![zero(); 2 * n];
                v[k] = Complex::new(T::one(), T::zero());
                for i in 0..n {
                    v[n + i] = Complex::new(T::zero(), -g[(i, k)]);
                }
                v
            })
            .collect();
        Ok(Self { x, s, plane: Subspace::from_span(2 * n, &cols), g })
    }

    pub fn dim(&self) -> usize {
        self.g.rows()
    }
}

/// Real polarization `{(0, b)}` in `ℂ^{2n}`.
pub fn real_plane<T: Real>(n: usize) -> Subspace<T> {
    let cols: Vec<Vec<Complex<T>>> = (0..n)
        .map(|k| {
            let mut v = vec![zero(); 2 * n];
            v[n + k] = Complex::new(T::one(), T::zero());
            v
        })
        .collect();
    Subspace::from_span(2 * n, &cols)
}

pub fn polarization_distance<T: Real>(a: &PolarizationFrame<T>, b: &PolarizationFrame<T>) -> Result<T, PolarizationError> {
    if a.dim() != b.dim() {
        return Err(PolarizationError::Dimension { expected: a.dim(), got: b.dim() });
    }
    Ok(a.plane.distance(&b.plane))
}

pub fn distance_to_real<T: Real>(a: &PolarizationFrame<T>) -> T {
    a.plane.distance(&real_plane(a.dim()))
}

/// Mixed plane spanned by the angular directions `(0, ν_k)` of the given
/// normals and the Kähler directions `(a, −iG₀a)` for `a` tangent to them.
pub fn mixed_limit_plane<T: Real>(g0: &Mat<T>, normals: &[Vec<T>]) -> Subspace<T> {
    let n = g0.rows();
    let mut span: Vec<Vec<Complex<T>>> = Vec::new();
    for nu in normals {
        let mut v = vec![zero(); 2 * n];
        for i in 0..n {
            v[n + i] = Complex::new(nu[i], T::zero());
        }
        span.push(v);
    }
    // tangent directions: orthonormal complement of the normals in ℝⁿ
    let nmat = Mat::from_fn(n, n, |i, j| normals.iter().fold(T::zero(), |a, nu| a + nu[i] * nu[j]));
    let (eig, vecs) = nmat.symmetric_eigen();
    let top = eig.iter().fold(T::zero(), |m, &e| m.max(e));
    for k in 0..n {
        if eig[k] > top * T::lit(1e-12) {
            continue;
        }
        let a: Vec<T> = (0..n).map(|i| vecs[(i, k)]).collect();
        let ga = g0.mul_vec(&a);
        let mut v = vec![zero(); 2 * n];
        for i in 0..n {
            v[i] = Complex::new(a[i], T::zero());
            v[n + i] = Complex::new(T::zero(), -ga[i]);
        }
        span.push(v);
    }
    Subspace::from_span(2 * n, &span)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_closed_form() {
        for g in [0.1f64, 1.0, 7.5, 1e4] {
            let f = PolarizationFrame::new(vec![0.0], 0.0, Mat::from_rows(&[vec![g]])).unwrap();
            let d = distance_to_real(&f);
            assert!((d - 2f64.sqrt() / (1.0 + g * g).sqrt()).abs() < 1e-14);
            assert_eq!(polarization_distance(&f, &f).unwrap(), 0.0);
        }
        assert!(PolarizationFrame::new(vec![0.0], 0.0, Mat::from_rows(&[vec![-1.0]])).is_err());
    }

    #[test]
    fn wall_limit_is_mixed() {
        let g0 = Mat::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.5]]);
        let nu = vec![1.0, 0.0];
        let lim = mixed_limit_plane(&g0, &[nu.clone()]);
        let mut prev = f64::INFINITY;
        for s in [1e2, 1e4, 1e6] {
            let g = g0.add(&Mat::outer(&nu, &nu).scaled(s));
            let d = PolarizationFrame::new(vec![0.0; 2], s, g).unwrap().plane.distance(&lim);
            assert!(d < prev);
            prev = d;
        }
        assert!(prev < 1e-5);
    }
}
