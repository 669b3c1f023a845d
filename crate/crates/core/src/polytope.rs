//! Delzant polytopes given by primitive facet normals and rational offsets.
//!
//! A polytope is `{x : ℓ_j(x) = ⟨x, v_j⟩ − λ_j ≥ 0}`. Vertices are found by
//! intersecting `n`-subsets of facets in exact arithmetic.

use num_traits::{Signed, ToPrimitive, Zero};

use crate::exact::{affine_dim, idot, null_space, rank, solve, to_real, Rational};
use crate::lattice::{self, LatticeError};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet {
    pub normal: Vec<i64>,
    pub offset: Rational,
}

impl Facet {
    pub fn new(normal: Vec<i64>, offset: Rational) -> Self {
        Self { normal, offset }
    }

    pub fn ell_exact(&self, x: &[Rational]) -> Rational {
        idot(&self.normal, x) - self.offset
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolytopeError {
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("facet {index} has normal of length {got}, expected {expected}")]
    NormalLength { index: usize, expected: usize, got: usize },
    #[error("facet {index} normal {normal:?} is not primitive")]
    NotPrimitive { index: usize, normal: Vec<i64> },
    #[error("polytope is empty or not full-dimensional")]
    Empty,
    #[error("polytope is unbounded (recession direction {0:?})")]
    Unbounded(Vec<String>),
    #[error("Delzant condition fails at vertex {vertex:?}: {reason}")]
    NotDelzant { vertex: Vec<String>, reason: String },
    #[error("offsets are {found} but the corrected flag says {expected}")]
    OffsetParity { expected: &'static str, found: String },
}

fn fmt_point(x: &[Rational]) -> Vec<String> {
    x.iter().map(|r| r.to_string()).collect()
}

/// A bounded, full-dimensional rational polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    dim: usize,
    facets: Vec<Facet>,
    vertices: Vec<Vec<Rational>>,
    corrected: bool,
}

impl Polytope {
    /// Builds a Delzant polytope; every invariant is checked.
    pub fn new(dim: usize, facets: Vec<Facet>, corrected: bool) -> Result<Self, PolytopeError> {
        for (i, f) in facets.iter().enumerate() {
            if f.normal.len() == dim && !lattice::is_primitive(&f.normal) {
                return Err(PolytopeError::NotPrimitive { index: i, normal: f.normal.clone() });
            }
        }
        let p = Self::from_halfspaces(dim, facets)?;
        let half = Rational::new(1, 2);
        let all_half = p.facets.iter().all(|f| (f.offset - half).is_integer());
        let all_int = p.facets.iter().all(|f| f.offset.is_integer());
        if corrected && !all_half {
            return Err(PolytopeError::OffsetParity { expected: "in 1/2 + Z", found: "not all half-integers".into() });
        }
        if !corrected && !all_int {
            return Err(PolytopeError::OffsetParity { expected: "integers", found: "non-integral offsets".into() });
        }
        if let Some((v, reason)) = p.delzant_violation() {
            return Err(PolytopeError::NotDelzant { vertex: fmt_point(&v), reason });
        }
        Ok(Self { corrected, ..p })
    }

    /// Builds a bounded polytope from arbitrary integer halfspaces without the
    /// primitivity, parity and Delzant checks. Redundant inequalities are dropped.
    pub fn from_halfspaces(dim: usize, facets: Vec<Facet>) -> Result<Self, PolytopeError> {
        if dim == 0 {
            return Err(PolytopeError::ZeroDimension);
        }
        for (i, f) in facets.iter().enumerate() {
            if f.normal.len() != dim {
                return Err(PolytopeError::NormalLength { index: i, expected: dim, got: f.normal.len() });
            }
        }
        let mut facets = facets;
        // merge duplicated normals, keeping the tighter offset
        let mut merged: Vec<Facet> = Vec::new();
        for f in facets.drain(..) {
            let g = crate::exact::gcd_slice(&f.normal);
            if g == 0 {
                if f.offset > Rational::zero() {
                    return Err(PolytopeError::Empty);
                }
                continue;
            }
            let normal: Vec<i64> = f.normal.iter().map(|x| x / g).collect();
            let offset = f.offset / Rational::from(g as i128);
            match merged.iter_mut().find(|h| h.normal == normal) {
                Some(h) => h.offset = h.offset.max(offset),
                None => merged.push(Facet { normal, offset }),
            }
        }
        let facets = merged;
        if let Some(dir) = recession_direction(dim, &facets) {
            return Err(PolytopeError::Unbounded(fmt_point(&dir)));
        }
        let vertices = enumerate_vertices(dim, &facets);
        if vertices.len() < dim + 1 || affine_dim(&vertices) < dim {
            return Err(PolytopeError::Empty);
        }
        // keep facets that actually support an (n-1)-face
        let facets: Vec<Facet> = facets
            .into_iter()
            .filter(|f| {
                let on: Vec<Vec<Rational>> =
                    vertices.iter().filter(|v| f.ell_exact(v).is_zero()).cloned().collect();
                on.len() >= dim && affine_dim(&on) == dim - 1
            })
            .collect();
        Ok(Self { dim, facets, vertices, corrected: false })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn vertices(&self) -> &[Vec<Rational>] {
        &self.vertices
    }

    pub fn corrected(&self) -> bool {
        self.corrected
    }

    pub fn vertices_real<T: Real>(&self) -> Vec<Vec<T>> {
        self.vertices.iter().map(|v| crate::exact::vec_to_real(v)).collect()
    }

    /// Indices of facets through a vertex.
    pub fn incident_facets(&self, v: &[Rational]) -> Vec<usize> {
        (0..self.facets.len()).filter(|&j| self.facets[j].ell_exact(v).is_zero()).collect()
    }

    /// First vertex where the Delzant condition fails, with a reason.
    pub fn delzant_violation(&self) -> Option<(Vec<Rational>, String)> {
        for v in &self.vertices {
            let inc = self.incident_facets(v);
            if inc.len() != self.dim {
                return Some((v.clone(), format!("{} facets meet (not simple)", inc.len())));
            }
            let m: Vec<Vec<i64>> = inc.iter().map(|&j| self.facets[j].normal.clone()).collect();
            let d = crate::exact::det_i64(&m);
            if d.abs() != 1 {
                return Some((v.clone(), format!("incident normals have determinant {d}")));
            }
        }
        None
    }

    pub fn is_delzant(&self) -> bool {
        self.delzant_violation().is_none()
    }

    pub fn ell_values<T: Real>(&self, x: &[T]) -> Vec<T> {
        self.facets.iter().map(|f| ell(f, x)).collect()
    }

    pub fn contains_exact(&self, x: &[Rational]) -> bool {
        self.facets.iter().all(|f| !f.ell_exact(x).is_negative())
    }

    pub fn contains<T: Real>(&self, x: &[T], tol: T) -> bool {
        self.facets.iter().all(|f| ell(f, x) >= -tol)
    }

    pub fn is_interior<T: Real>(&self, x: &[T]) -> bool {
        self.facets.iter().all(|f| ell(f, x) > T::zero())
    }

    pub fn min_ell<T: Real>(&self, x: &[T]) -> T {
        self.facets.iter().map(|f| ell(f, x)).fold(T::infinity(), T::min)
    }

    /// Axis-aligned bounding box `(lo, hi)` of the vertices.
    pub fn bounding_box(&self) -> (Vec<Rational>, Vec<Rational>) {
        let mut lo = self.vertices[0].clone();
        let mut hi = self.vertices[0].clone();
        for v in &self.vertices[1..] {
            for k in 0..self.dim {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    /// All lattice points, lexicographically sorted.
    pub fn integral_points(&self) -> Vec<Vec<i64>> {
        let (lo, hi) = self.bounding_box();
        let lo: Vec<i64> = lo.iter().map(|r| r.ceil().to_integer() as i64).collect();
        let hi: Vec<i64> = hi.iter().map(|r| r.floor().to_integer() as i64).collect();
        let mut out = Vec::new();
        let mut cur = lo.clone();
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return out;
        }
        loop {
            let q: Vec<Rational> = cur.iter().map(|&c| Rational::from(c as i128)).collect();
            if self.contains_exact(&q) {
                out.push(cur.clone());
            }
            // odometer with the last coordinate fastest gives lexicographic order
            let mut k = self.dim;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                if cur[k] < hi[k] {
                    cur[k] += 1;
                    for c in k + 1..self.dim {
                        cur[c] = lo[c];
                    }
                    break;
                }
            }
        }
    }

    /// Triangulation into simplices given by vertex indices (pulling from the
    /// first vertex of every face).
    pub fn triangulate(&self) -> Vec<Vec<usize>> {
        let all: Vec<usize> = (0..self.vertices.len()).collect();
        self.triangulate_face(&all, self.dim)
    }

    fn triangulate_face(&self, ids: &[usize], d: usize) -> Vec<Vec<usize>> {
        if d == 0 {
            return vec![vec![ids[0]]];
        }
        let apex = ids[0];
        let mut seen: Vec<Vec<usize>> = Vec::new();
        let mut out = Vec::new();
        for f in &self.facets {
            let sub: Vec<usize> =
                ids.iter().copied().filter(|&i| f.ell_exact(&self.vertices[i]).is_zero()).collect();
            if sub.contains(&apex) || sub.len() < d || seen.contains(&sub) {
                continue;
            }
            let pts: Vec<Vec<Rational>> = sub.iter().map(|&i| self.vertices[i].clone()).collect();
            if affine_dim(&pts) != d - 1 {
                continue;
            }
            for mut s in self.triangulate_face(&sub, d - 1) {
                s.insert(0, apex);
                out.push(s);
            }
            seen.push(sub);
        }
        out
    }

    /// Exact volume.
    pub fn volume(&self) -> Rational {
        let n = self.dim;
        let fact: i128 = (1..=n as i128).product();
        self.triangulate()
            .iter()
            .map(|s| {
                let base = &self.vertices[s[0]];
                let m: Vec<Vec<Rational>> = s[1..]
                    .iter()
                    .map(|&i| self.vertices[i].iter().zip(base).map(|(a, b)| a - b).collect())
                    .collect();
                rational_det(&m).abs()
            })
            .fold(Rational::zero(), |a, b| a + b)
            / Rational::from(fact)
    }

    pub fn volume_f64(&self) -> f64 {
        let v = self.volume();
        v.numer().to_f64().unwrap_or(f64::NAN) / v.denom().to_f64().unwrap_or(f64::NAN)
    }

    /// Floating point halfspace description `a·x ≥ b`.
    pub fn region<T: Real>(&self) -> crate::quadrature::Region<T> {
        crate::quadrature::Region::new(
            self.dim,
            self.facets
                .iter()
                .map(|f| (crate::exact::int_vec_to_real(&f.normal), to_real(&f.offset)))
                .collect(),
        )
    }
}

#[inline]
fn ell<T: Real>(f: &Facet, x: &[T]) -> T {
    f.normal.iter().zip(x).fold(T::zero(), |acc, (&v, &xi)| acc + T::lit(v as f64) * xi) - to_real::<T>(&f.offset)
}

pub(crate) fn rational_det(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Rational::from(1);
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                let d = f * a[c][k];
                a[r][k] -= d;
            }
        }
    }
    det
}

fn subsets(d: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, d: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            cur.push(i);
            rec(i + 1, d, k, cur, out);
            cur.pop();
        }
    }
    rec(0, d, k, &mut cur, &mut out);
    out
}

pub(crate) fn k_subsets(d: usize, k: usize) -> Vec<Vec<usize>> {
    subsets(d, k)
}

fn enumerate_vertices(dim: usize, facets: &[Facet]) -> Vec<Vec<Rational>> {
    let mut out: Vec<Vec<Rational>> = Vec::new();
    for s in subsets(facets.len(), dim) {
        let a: Vec<Vec<Rational>> =
            s.iter().map(|&j| facets[j].normal.iter().map(|&x| Rational::from(x as i128)).collect()).collect();
        let b: Vec<Rational> = s.iter().map(|&j| facets[j].offset).collect();
        let Some(x) = solve(&a, &b) else { continue };
        if facets.iter().all(|f| !f.ell_exact(&x).is_negative()) && !out.contains(&x) {
            out.push(x);
        }
    }
    out.sort();
    out
}

/// Vertices of `{x : a·x ≥ b}` for rational rows (equalities may be given as
/// two opposite rows). Brute force over `dim`-subsets.
pub fn rational_vertices(dim: usize, rows: &[(Vec<Rational>, Rational)]) -> Vec<Vec<Rational>> {
    let mut out: Vec<Vec<Rational>> = Vec::new();
    let feasible = |x: &[Rational]| rows.iter().all(|(a, b)| !(crate::exact::rdot(a, x) - b).is_negative());
    for s in subsets(rows.len(), dim) {
        let a: Vec<Vec<Rational>> = s.iter().map(|&j| rows[j].0.clone()).collect();
        let b: Vec<Rational> = s.iter().map(|&j| rows[j].1).collect();
        let Some(x) = solve(&a, &b) else { continue };
        if feasible(&x) && !out.contains(&x) {
            out.push(x);
        }
    }
    out.sort();
    out
}

/// A nonzero `t` with `⟨v_j, t⟩ ≥ 0` for all facets, if the cone is nontrivial.
fn recession_direction(dim: usize, facets: &[Facet]) -> Option<Vec<Rational>> {
    let rows: Vec<Vec<Rational>> =
        facets.iter().map(|f| f.normal.iter().map(|&x| Rational::from(x as i128)).collect()).collect();
    // lineality space
    let lin = null_space(&rows, dim);
    if let Some(t) = lin.into_iter().next() {
        return Some(t);
    }
    for s in subsets(facets.len(), dim - 1) {
        let sub: Vec<Vec<Rational>> = s.iter().map(|&j| rows[j].clone()).collect();
        if rank(&sub) != dim - 1 {
            continue;
        }
        let ns = null_space(&sub, dim);
        let t = &ns[0];
        for sign in [1i128, -1] {
            let cand: Vec<Rational> = t.iter().map(|x| x * Rational::from(sign)).collect();
            if rows.iter().all(|r| !crate::exact::rdot(r, &cand).is_negative()) {
                return Some(cand);
            }
        }
    }
    None
}

/// Lattice-adapted frame of a face: the last `j` rows of `unimodular` are the
/// face normals, so that the face lies in `{x_F^⊥ = c_F}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceFrame {
    pub normals: Vec<Vec<i64>>,
    pub unimodular: Vec<Vec<i64>>,
    pub inverse: Vec<Vec<i64>>,
    pub offsets: Vec<Rational>,
}

impl FaceFrame {
    pub fn new(n: usize, normals: &[Vec<i64>], offsets: &[Rational]) -> Result<Self, LatticeError> {
        if normals.len() != offsets.len() {
            return Err(LatticeError::Dimension { expected: normals.len(), got: offsets.len() });
        }
        let u = lattice::unimodular_completion(normals, n)?;
        let inverse = lattice::unimodular_inverse(&u);
        Ok(Self { normals: normals.to_vec(), unimodular: u, inverse, offsets: offsets.to_vec() })
    }

    pub fn dim(&self) -> usize {
        self.unimodular.len()
    }

    pub fn codim(&self) -> usize {
        self.normals.len()
    }

    pub fn to_frame<T: Real>(&self, x: &[T]) -> Vec<T> {
        self.unimodular
            .iter()
            .map(|r| r.iter().zip(x).fold(T::zero(), |a, (&u, &xi)| a + T::lit(u as f64) * xi))
            .collect()
    }

    pub fn from_frame<T: Real>(&self, u: &[T]) -> Vec<T> {
        self.inverse
            .iter()
            .map(|r| r.iter().zip(u).fold(T::zero(), |a, (&w, &ui)| a + T::lit(w as f64) * ui))
            .collect()
    }

    /// Parallel coordinates `x_F`.
    pub fn parallel<T: Real>(&self, x: &[T]) -> Vec<T> {
        let u = self.to_frame(x);
        u[..self.dim() - self.codim()].to_vec()
    }

    /// Transverse coordinates `x_F^⊥`.
    pub fn transverse<T: Real>(&self, x: &[T]) -> Vec<T> {
        let u = self.to_frame(x);
        u[self.dim() - self.codim()..].to_vec()
    }

    /// `x_F^⊥ − c_F`.
    pub fn transverse_offset<T: Real>(&self, x: &[T]) -> Vec<T> {
        self.transverse(x).into_iter().zip(&self.offsets).map(|(u, c)| u - to_real::<T>(c)).collect()
    }

    /// Direction in `x`-space of the `k`-th transverse frame coordinate.
    pub fn transverse_direction<T: Real>(&self, k: usize) -> Vec<T> {
        let col = self.dim() - self.codim() + k;
        self.inverse.iter().map(|r| T::lit(r[col] as f64)).collect()
    }
}

/// Frame of a face of `p` given by normals and offsets.
pub fn face_frame(p: &Polytope, normals: &[Vec<i64>], offsets: &[Rational]) -> Result<FaceFrame, LatticeError> {
    FaceFrame::new(p.dim(), normals, offsets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i128, q: i128) -> Rational {
        Rational::new(p, q)
    }

    pub(crate) fn segment(n: i64) -> Polytope {
        Polytope::new(1, vec![Facet::new(vec![1], r(0, 1)), Facet::new(vec![-1], r(-n as i128, 1))], false).unwrap()
    }

    #[test]
    fn segment_vertices_and_points() {
        let p = segment(2);
        assert_eq!(p.vertices(), &[vec![r(0, 1)], vec![r(2, 1)]]);
        assert_eq!(p.integral_points(), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(p.ell_values(&[1.0]), vec![1.0, 1.0]);
        assert_eq!(p.ell_values(&[0.0]), vec![0.0, 2.0]);
    }

    #[test]
    fn corrected_segment() {
        let p = Polytope::new(1, vec![Facet::new(vec![1], r(-1, 2)), Facet::new(vec![-1], r(-5, 2))], true).unwrap();
        assert_eq!(p.vertices(), &[vec![r(-1, 2)], vec![r(5, 2)]]);
        assert_eq!(p.integral_points().len(), 3);
        assert!(Polytope::new(1, vec![Facet::new(vec![1], r(-1, 2)), Facet::new(vec![-1], r(-5, 2))], false).is_err());
    }

    #[test]
    fn simplex() {
        let p = Polytope::new(
            2,
            vec![Facet::new(vec![1, 0], r(0, 1)), Facet::new(vec![0, 1], r(0, 1)), Facet::new(vec![-1, -1], r(-3, 1))],
            false,
        )
        .unwrap();
        assert_eq!(p.vertices().len(), 3);
        assert!(p.vertices().contains(&vec![r(3, 1), r(0, 1)]));
        assert_eq!(p.integral_points().len(), 10);
        assert_eq!(p.volume(), r(9, 2));
        assert_eq!(p.ell_values(&[1.0, 1.0]), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            Polytope::new(1, vec![Facet::new(vec![2], r(0, 1)), Facet::new(vec![-1], r(-2, 1))], false),
            Err(PolytopeError::NotPrimitive { .. })
        ));
        assert!(matches!(
            Polytope::new(2, vec![Facet::new(vec![1, 0], r(0, 1)), Facet::new(vec![0, 1], r(0, 1))], false),
            Err(PolytopeError::Unbounded(_))
        ));
        // weighted projective plane: vertex cone with determinant 2
        assert!(matches!(
            Polytope::new(
                2,
                vec![Facet::new(vec![1, 0], r(0, 1)), Facet::new(vec![0, 1], r(0, 1)), Facet::new(vec![-1, -2], r(-2, 1))],
                false
            ),
            Err(PolytopeError::NotDelzant { .. })
        ));
        assert!(matches!(
            Polytope::new(1, vec![Facet::new(vec![1], r(1, 1)), Facet::new(vec![-1], r(0, 1))], false),
            Err(PolytopeError::Empty)
        ));
    }

    #[test]
    fn frames() {
        let p = segment(2);
        let _ = p;
        let f = FaceFrame::new(2, &[vec![1, 0]], &[r(1, 1)]).unwrap();
        assert_eq!(f.unimodular, vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(f.parallel(&[0.3, 0.7]), vec![0.7]);
        assert_eq!(f.transverse(&[0.3, 0.7]), vec![0.3]);
        let g = FaceFrame::new(2, &[vec![1, 1]], &[r(2, 1)]).unwrap();
        assert_eq!(crate::exact::det_i64(&g.unimodular).abs(), 1);
        assert_eq!(g.unimodular[1], vec![1, 1]);
        let x = [0.25, 1.75];
        assert!((g.transverse_offset(&x)[0]).abs() < 1e-15);
        let back = g.from_frame(&g.to_frame(&x));
        assert!((back[0] - x[0]).abs() < 1e-15 && (back[1] - x[1]).abs() < 1e-15);
        assert!(matches!(FaceFrame::new(2, &[vec![2, 0]], &[r(0, 1)]), Err(LatticeError::NotPrimitive(..))));
    }
}
