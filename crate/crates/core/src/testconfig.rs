//! Test-configuration combinatorics of a piecewise-linear convex `f` on a
//! polytope: the non-differentiability locus `W`, the sub-polytopes it cuts
//! out, `ε`-thickenings of its faces, and the polytope `Q` under the graph
//! ceiling `K − f`.

use num_traits::{Signed, Zero};

use crate::exact::{affine_dim, primitive_integer, rank, rdot, to_real, Rational};
use crate::generators::pl::{integer_halfspace, AffinePiece, PLConvex, PLError};
use crate::lattice;
use crate::polytope::{k_subsets, rational_vertices, Facet, FaceFrame, Polytope, PolytopeError};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct SubPolytope {
    /// Index of the affine piece active on it (in the pruned function).
    pub piece: usize,
    pub polytope: Polytope,
    pub delzant: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    /// Pieces that are all equal to `f` on the face.
    pub active: Vec<usize>,
    pub codim: usize,
    pub vertices: Vec<Vec<Rational>>,
    /// Primitive normals spanning the face's normal lattice.
    pub normals: Vec<Vec<i64>>,
    pub offsets: Vec<Rational>,
    pub frame: Option<FaceFrame>,
    pub frame_error: Option<String>,
}

impl Face {
    pub fn centroid<T: Real>(&self) -> Vec<T> {
        let n = self.vertices[0].len();
        let k = T::from_usize_lossy(self.vertices.len());
        (0..n)
            .map(|c| self.vertices.iter().map(|v| to_real::<T>(&v[c])).fold(T::zero(), |a, b| a + b) / k)
            .collect()
    }

    /// Points in the relative interior: the centroid and points pulled from
    /// it toward each vertex by `fraction`.
    pub fn interior_samples<T: Real>(&self, fraction: T) -> Vec<Vec<T>> {
        let c = self.centroid::<T>();
        let mut out = vec![c.clone()];
        if self.vertices.len() > 1 {
            for v in &self.vertices {
                out.push(c.iter().zip(v).map(|(&ci, vi)| ci + fraction * (to_real::<T>(vi) - ci)).collect());
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub pl: PLConvex,
    pub polytope: Polytope,
    pub subpolytopes: Vec<SubPolytope>,
    pub faces: Vec<Face>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TestConfigError {
    #[error(transparent)]
    PL(#[from] PLError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("ceiling K = {k} is below max f = {max}")]
    CeilingTooLow { k: String, max: String },
    #[error("dimension mismatch between f ({f}) and polytope ({p})")]
    Dimension { f: usize, p: usize },
}

fn diff(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Faces of the non-differentiability locus of `f` (pieces pruned first).
pub fn nondiff_locus(f: &PLConvex, p: &Polytope) -> Result<(PLConvex, Vec<Face>), TestConfigError> {
    if f.dim() != p.dim() {
        return Err(TestConfigError::Dimension { f: f.dim(), p: p.dim() });
    }
    let f = f.pruned(p)?;
    let n = p.dim();
    let r = f.pieces().len();
    let mut faces: Vec<Face> = Vec::new();
    // larger tie sets first so that deduplication keeps the maximal set
    for size in (2..=r).rev() {
        for s in k_subsets(r, size) {
            let base = &f.pieces()[s[0]];
            let eq_rows: Vec<Vec<Rational>> = s[1..].iter().map(|&i| diff(&f.pieces()[i].g, &base.g)).collect();
            let codim = rank(&eq_rows);
            if codim == 0 || codim > n {
                continue;
            }
            let mut rows: Vec<(Vec<Rational>, Rational)> =
                p.facets().iter().map(|fc| (fc.normal.iter().map(|&x| Rational::from(x as i128)).collect(), fc.offset)).collect();
            for &i in &s[1..] {
                let pi = &f.pieces()[i];
                let d = diff(&pi.g, &base.g);
                let rhs = base.b - pi.b;
                rows.push((d.clone(), rhs));
                rows.push((d.iter().map(|x| -x).collect(), -rhs));
            }
            for k in (0..r).filter(|k| !s.contains(k)) {
                let pk = &f.pieces()[k];
                rows.push((diff(&base.g, &pk.g), pk.b - base.b));
            }
            let verts = rational_vertices(n, &rows);
            if verts.is_empty() || affine_dim(&verts) != n - codim {
                continue;
            }
            if faces.iter().any(|fc| fc.vertices == verts) {
                continue;
            }
            let (normals, offsets) = face_normals(&f, &s, &eq_rows, &verts[0], n);
            let (frame, frame_error) = match FaceFrame::new(n, &normals, &offsets) {
                Ok(fr) => (Some(fr), None),
                Err(e) => (None, Some(e.to_string())),
            };
            faces.push(Face { active: s.clone(), codim, vertices: verts, normals, offsets, frame, frame_error });
        }
    }
    faces.sort_by(|a, b| a.codim.cmp(&b.codim).then(a.active.cmp(&b.active)));
    Ok((f, faces))
}

/// Primitive normals for a face with tie set `s`: pairwise-difference
/// normals when some `codim` of them form a saturated basis, otherwise a
/// basis of the saturated normal lattice.
fn face_normals(
    f: &PLConvex,
    s: &[usize],
    eq_rows: &[Vec<Rational>],
    point: &[Rational],
    n: usize,
) -> (Vec<Vec<i64>>, Vec<Rational>) {
    let codim = rank(eq_rows);
    let mut cands: Vec<Vec<i64>> = Vec::new();
    for pair in k_subsets(s.len(), 2) {
        let (i, k) = (s[pair[0]], s[pair[1]]);
        if let Some((v, _)) = primitive_integer(&diff(&f.pieces()[k].g, &f.pieces()[i].g)) {
            if !cands.contains(&v) && !cands.contains(&v.iter().map(|x| -x).collect()) {
                cands.push(v);
            }
        }
    }
    let offsets_of = |ns: &[Vec<i64>]| -> Vec<Rational> { ns.iter().map(|v| crate::exact::idot(v, point)).collect() };
    for sub in k_subsets(cands.len(), codim) {
        let ns: Vec<Vec<i64>> = sub.iter().map(|&i| cands[i].clone()).collect();
        if lattice::unimodular_completion(&ns, n).is_ok() {
            let off = offsets_of(&ns);
            return (ns, off);
        }
    }
    let ints: Vec<Vec<i64>> = cands.clone();
    let (basis, _) = lattice::saturation(&ints[..codim.min(ints.len())], n).unwrap_or_else(|_| (ints.clone(), vec![]));
    let off = offsets_of(&basis);
    (basis, off)
}

pub fn decompose(f: &PLConvex, p: &Polytope) -> Result<Decomposition, TestConfigError> {
    let (f, faces) = nondiff_locus(f, p)?;
    let subpolytopes = (0..f.pieces().len())
        .filter_map(|i| {
            f.cell(i, p).map(|poly| {
                let delzant = poly.is_delzant();
                SubPolytope { piece: i, polytope: poly, delzant }
            })
        })
        .collect();
    Ok(Decomposition { pl: f, polytope: p.clone(), subpolytopes, faces })
}

impl Decomposition {
    pub fn faces_of_codim(&self, j: usize) -> impl Iterator<Item = &Face> {
        self.faces.iter().filter(move |f| f.codim == j)
    }

    pub fn max_codim(&self) -> usize {
        self.faces.iter().map(|f| f.codim).max().unwrap_or(0)
    }

    /// Index of the sub-polytope containing `x` in its interior, if any.
    pub fn subpolytope_of<T: Real>(&self, x: &[T]) -> Option<usize> {
        self.subpolytopes.iter().position(|s| s.polytope.is_interior(x))
    }

    /// Whether `x` lies in the slab of `face`: transverse frame coordinates
    /// within `ε` of `c_F`, and the projection onto the face's affine hull
    /// along the frame directions keeps exactly the face's pieces maximal.
    pub fn in_slab<T: Real>(&self, face: &Face, eps: T, x: &[T]) -> bool {
        let Some(frame) = &face.frame else { return false };
        if !self.polytope.contains(x, T::epsilon() * T::lit(64.0)) {
            return false;
        }
        let off = frame.transverse_offset(x);
        if off.iter().any(|d| d.abs() >= eps) {
            return false;
        }
        let mut xp = x.to_vec();
        for (k, d) in off.iter().enumerate() {
            let v = frame.transverse_direction::<T>(k);
            for (xi, vi) in xp.iter_mut().zip(&v) {
                *xi -= *d * *vi;
            }
        }
        let vals = self.pl.piece_values(&xp);
        let top = face.active.iter().map(|&i| vals[i]).fold(T::neg_infinity(), T::max);
        (0..vals.len()).filter(|i| !face.active.contains(i)).all(|i| vals[i] < top)
    }

    /// Membership in `W_ε` and the face of largest codimension whose slab
    /// contains `x`.
    pub fn thickening_membership<T: Real>(&self, eps: T, x: &[T]) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, face) in self.faces.iter().enumerate() {
            if self.in_slab(face, eps, x) && best.map_or(true, |b| self.faces[b].codim < face.codim) {
                best = Some(i);
            }
        }
        best
    }

    pub fn volumes_add_up(&self) -> (Rational, Rational) {
        let total = self.polytope.volume();
        let sum = self.subpolytopes.iter().map(|s| s.polytope.volume()).fold(Rational::zero(), |a, b| a + b);
        (sum, total)
    }

    /// Ceiling pieces `{(x, K − a_j(x)) : x ∈ P_j}` as vertex lists.
    pub fn central_fiber(&self, k: Rational) -> Vec<CeilingPiece> {
        self.subpolytopes
            .iter()
            .map(|s| {
                let piece = &self.pl.pieces()[s.piece];
                let vertices = s
                    .polytope
                    .vertices()
                    .iter()
                    .map(|v| {
                        let mut w = v.clone();
                        w.push(k - piece.eval_exact(v));
                        w
                    })
                    .collect();
                CeilingPiece { piece: s.piece, vertices }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CeilingPiece {
    pub piece: usize,
    pub vertices: Vec<Vec<Rational>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QPolytope {
    pub base: Polytope,
    pub pl: PLConvex,
    pub ceiling: Rational,
    pub polytope: Polytope,
    pub integral: bool,
}

/// `Q = {(x, y) : x ∈ P, 0 ≤ y ≤ K − f(x)}`.
pub fn build_q(f: &PLConvex, p: &Polytope, k: Rational) -> Result<QPolytope, TestConfigError> {
    if f.dim() != p.dim() {
        return Err(TestConfigError::Dimension { f: f.dim(), p: p.dim() });
    }
    let max = f.max_on(p);
    if k < max {
        return Err(TestConfigError::CeilingTooLow { k: k.to_string(), max: max.to_string() });
    }
    let n = p.dim();
    let mut facets: Vec<Facet> = p
        .facets()
        .iter()
        .map(|fc| {
            let mut v = fc.normal.clone();
            v.push(0);
            Facet::new(v, fc.offset)
        })
        .collect();
    let mut up = vec![0i64; n + 1];
    up[n] = 1;
    facets.push(Facet::new(up, Rational::zero()));
    for AffinePiece { g, b } in f.pieces() {
        let mut a: Vec<Rational> = g.iter().map(|x| -x).collect();
        a.push(Rational::from(-1));
        facets.push(integer_halfspace(&a, b - k));
    }
    let polytope = Polytope::from_halfspaces(n + 1, facets)?;
    let integral = polytope.vertices().iter().all(|v| v.iter().all(|c| c.is_integer()));
    Ok(QPolytope { base: p.clone(), pl: f.clone(), ceiling: k, polytope, integral })
}

/// Checks that `f` agrees with the active piece at every vertex of every
/// sub-polytope, in exact arithmetic.
pub fn activity_consistent(d: &Decomposition) -> bool {
    d.subpolytopes.iter().all(|s| {
        let piece = &d.pl.pieces()[s.piece];
        s.polytope.vertices().iter().all(|v| d.pl.eval_exact(v) == piece.eval_exact(v))
    })
}

/// Checks that every facet of a sub-polytope either lies in a facet of `P`
/// or is shared with exactly one other sub-polytope.
pub fn facets_shared(d: &Decomposition) -> bool {
    let on_boundary = |verts: &[Vec<Rational>]| {
        d.polytope.facets().iter().any(|fc| verts.iter().all(|v| fc.ell_exact(v).is_zero()))
    };
    for (i, s) in d.subpolytopes.iter().enumerate() {
        for fc in s.polytope.facets() {
            let verts: Vec<Vec<Rational>> =
                s.polytope.vertices().iter().filter(|v| fc.ell_exact(v).is_zero()).cloned().collect();
            if on_boundary(&verts) {
                continue;
            }
            let sharing = d
                .subpolytopes
                .iter()
                .enumerate()
                .filter(|(k, t)| {
                    *k != i
                        && t.polytope.facets().iter().any(|g| {
                            let tv: Vec<Vec<Rational>> =
                                t.polytope.vertices().iter().filter(|v| g.ell_exact(v).is_zero()).cloned().collect();
                            tv.len() >= d.polytope.dim()
                                && affine_dim(&tv) == d.polytope.dim() - 1
                                && verts.iter().all(|v| g.ell_exact(v).is_zero())
                                && tv.iter().all(|v| fc.ell_exact(v).is_zero())
                        })
                })
                .count();
            if sharing == 0 {
                return false;
            }
        }
    }
    true
}

/// Signed value of `⟨g, x⟩ + b` helper for reports.
pub fn affine_at(piece: &AffinePiece, x: &[Rational]) -> Rational {
    rdot(&piece.g, x) + piece.b
}

#[allow(dead_code)]
fn is_nonneg(r: &Rational) -> bool {
    !r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i128) -> Rational {
        Rational::from(p)
    }

    pub(crate) fn simplex(n: i128) -> Polytope {
        Polytope::new(
            2,
            vec![Facet::new(vec![1, 0], r(0)), Facet::new(vec![0, 1], r(0)), Facet::new(vec![-1, -1], r(-n))],
            false,
        )
        .unwrap()
    }

    fn wall_x1(c: i128) -> PLConvex {
        PLConvex::new(2, vec![AffinePiece::new(vec![r(0), r(0)], r(0)), AffinePiece::new(vec![r(1), r(0)], r(-c))]).unwrap()
    }

    #[test]
    fn single_wall_on_simplex() {
        let d = decompose(&wall_x1(1), &simplex(3)).unwrap();
        assert_eq!(d.subpolytopes.len(), 2);
        assert_eq!(d.faces.len(), 1);
        assert_eq!(d.faces[0].codim, 1);
        let p1 = d.subpolytopes[0].polytope.vertices().to_vec();
        assert_eq!(p1, vec![vec![r(0), r(0)], vec![r(0), r(3)], vec![r(1), r(0)], vec![r(1), r(2)]]);
        let p2 = d.subpolytopes[1].polytope.vertices().to_vec();
        assert_eq!(p2, vec![vec![r(1), r(0)], vec![r(1), r(2)], vec![r(3), r(0)]]);
        let (sum, tot) = d.volumes_add_up();
        assert_eq!(sum, tot);
        assert!(activity_consistent(&d));
        assert!(facets_shared(&d));
    }

    #[test]
    fn two_walls_and_corner() {
        let f = PLConvex::new(
            2,
            vec![
                AffinePiece::new(vec![r(0), r(0)], r(0)),
                AffinePiece::new(vec![r(1), r(0)], r(-1)),
                AffinePiece::new(vec![r(0), r(1)], r(-1)),
            ],
        )
        .unwrap();
        let d = decompose(&f, &simplex(3)).unwrap();
        assert_eq!(d.faces_of_codim(1).count(), 3);
        let corner: Vec<&Face> = d.faces_of_codim(2).collect();
        assert_eq!(corner.len(), 1);
        assert_eq!(corner[0].vertices, vec![vec![r(1), r(1)]]);
        assert_eq!(d.thickening_membership(0.1, &[1.05, 0.95]), Some(3));
        assert_eq!(d.faces[d.thickening_membership(0.1, &[1.05, 0.2]).unwrap()].codim, 1);
        assert_eq!(d.thickening_membership(0.1, &[1.3, 0.2]), None);
    }

    #[test]
    fn affine_function_has_no_walls() {
        let f = PLConvex::new(2, vec![AffinePiece::new(vec![r(1), r(2)], r(0))]).unwrap();
        let d = decompose(&f, &simplex(3)).unwrap();
        assert_eq!(d.subpolytopes.len(), 1);
        assert!(d.faces.is_empty());
    }

    #[test]
    fn q_polytopes() {
        let seg = Polytope::new(1, vec![Facet::new(vec![1], r(0)), Facet::new(vec![-1], r(-2))], false).unwrap();
        let f = PLConvex::new(1, vec![AffinePiece::new(vec![r(0)], r(0)), AffinePiece::new(vec![r(1)], r(-1))]).unwrap();
        let q = build_q(&f, &seg, r(1)).unwrap();
        assert_eq!(q.polytope.vertices(), &[vec![r(0), r(0)], vec![r(0), r(1)], vec![r(1), r(1)], vec![r(2), r(0)]]);
        assert!(q.integral);
        assert!(build_q(&f, &seg, Rational::new(1, 2)).is_err());
        let unit = Polytope::new(1, vec![Facet::new(vec![1], r(0)), Facet::new(vec![-1], r(-1))], false).unwrap();
        let g = PLConvex::new(1, vec![AffinePiece::new(vec![r(0)], r(0)), AffinePiece::new(vec![r(1)], Rational::new(-1, 2))]).unwrap();
        let q = build_q(&g, &unit, r(1)).unwrap();
        assert!(q.polytope.vertices().contains(&vec![Rational::new(1, 2), r(1)]));
        assert!(!q.integral);
    }
}
