//! Rational piecewise-linear convex functions `f = max_i (⟨g_i, x⟩ + b_i)`.

use num_traits::{Signed, Zero};

use crate::exact::{rdot, to_real, vec_to_real, Rational};
use crate::polytope::{Facet, Polytope, PolytopeError};
use crate::scalar::{dot, Real};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffinePiece {
    pub g: Vec<Rational>,
    pub b: Rational,
}

impl AffinePiece {
    pub fn new(g: Vec<Rational>, b: Rational) -> Self {
        Self { g, b }
    }

    pub fn eval_exact(&self, x: &[Rational]) -> Rational {
        rdot(&self.g, x) + self.b
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PLConvex {
    dim: usize,
    pieces: Vec<AffinePiece>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PLError {
    #[error("no affine pieces given")]
    Empty,
    #[error("piece {index} has gradient of length {got}, expected {expected}")]
    Dimension { index: usize, expected: usize, got: usize },
    #[error("no piece is active on a full-dimensional part of the polytope")]
    NothingActive,
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

impl PLConvex {
    pub fn new(dim: usize, pieces: Vec<AffinePiece>) -> Result<Self, PLError> {
        if pieces.is_empty() {
            return Err(PLError::Empty);
        }
        for (i, p) in pieces.iter().enumerate() {
            if p.g.len() != dim {
                return Err(PLError::Dimension { index: i, expected: dim, got: p.g.len() });
            }
        }
        Ok(Self { dim, pieces })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn eval_exact(&self, x: &[Rational]) -> Rational {
        self.pieces.iter().map(|p| p.eval_exact(x)).max().expect("nonempty")
    }

    /// Pieces attaining the maximum at `x`.
    pub fn active_set_exact(&self, x: &[Rational]) -> Vec<usize> {
        let f = self.eval_exact(x);
        (0..self.pieces.len()).filter(|&i| self.pieces[i].eval_exact(x) == f).collect()
    }

    pub fn eval<T: Real>(&self, x: &[T]) -> T {
        self.pieces.iter().map(|p| piece_value(p, x)).fold(T::neg_infinity(), T::max)
    }

    /// `(value, index of a maximizing piece)`.
    pub fn eval_argmax<T: Real>(&self, x: &[T]) -> (T, usize) {
        let mut best = (T::neg_infinity(), 0);
        for (i, p) in self.pieces.iter().enumerate() {
            let v = piece_value(p, x);
            if v > best.0 {
                best = (v, i);
            }
        }
        best
    }

    pub fn piece_values<T: Real>(&self, x: &[T]) -> Vec<T> {
        self.pieces.iter().map(|p| piece_value(p, x)).collect()
    }

    pub fn gradients<T: Real>(&self) -> Vec<Vec<T>> {
        self.pieces.iter().map(|p| vec_to_real(&p.g)).collect()
    }

    pub fn offsets<T: Real>(&self) -> Vec<T> {
        self.pieces.iter().map(|p| to_real(&p.b)).collect()
    }

    /// Halfspaces `a_i ≥ a_k` for all `k ≠ i`, as integer facets.
    pub fn dominance_facets(&self, i: usize) -> Vec<Facet> {
        let pi = &self.pieces[i];
        (0..self.pieces.len())
            .filter(|&k| k != i)
            .map(|k| {
                let pk = &self.pieces[k];
                let diff: Vec<Rational> = pi.g.iter().zip(&pk.g).map(|(a, b)| a - b).collect();
                let rhs = pk.b - pi.b;
                integer_halfspace(&diff, rhs)
            })
            .collect()
    }

    /// Cell `{x ∈ P : a_i(x) ≥ a_k(x) ∀k}` if full-dimensional.
    pub fn cell(&self, i: usize, p: &Polytope) -> Option<Polytope> {
        let mut facets = p.facets().to_vec();
        facets.extend(self.dominance_facets(i));
        Polytope::from_halfspaces(p.dim(), facets).ok()
    }

    /// Drops pieces whose cell in `p` is not full-dimensional.
    pub fn pruned(&self, p: &Polytope) -> Result<Self, PLError> {
        let keep: Vec<AffinePiece> =
            (0..self.pieces.len()).filter(|&i| self.cell(i, p).is_some()).map(|i| self.pieces[i].clone()).collect();
        if keep.is_empty() {
            return Err(PLError::NothingActive);
        }
        // exact duplicates would give empty-interior ties; keep the first
        let mut uniq: Vec<AffinePiece> = Vec::new();
        for k in keep {
            if !uniq.contains(&k) {
                uniq.push(k);
            }
        }
        Ok(Self { dim: self.dim, pieces: uniq })
    }

    /// Maximum over the vertices of `p`; convexity puts the maximum there.
    pub fn max_on(&self, p: &Polytope) -> Rational {
        p.vertices().iter().map(|v| self.eval_exact(v)).max().expect("polytope has vertices")
    }

    /// Largest Euclidean norm of a gradient difference, a Lipschitz bound for
    /// `f` minus any of its pieces.
    pub fn jump_bound<T: Real>(&self) -> T {
        let gs = self.gradients::<T>();
        let mut m = T::zero();
        for a in &gs {
            for b in &gs {
                let d: Vec<T> = a.iter().zip(b).map(|(&x, &y)| x - y).collect();
                m = m.max(crate::scalar::norm2(&d));
            }
        }
        m
    }
}

#[inline]
fn piece_value<T: Real>(p: &AffinePiece, x: &[T]) -> T {
    let g: Vec<T> = vec_to_real(&p.g);
    dot(&g, x) + to_real::<T>(&p.b)
}

/// Integer facet equivalent to `⟨a, x⟩ ≥ rhs` for rational data.
pub fn integer_halfspace(a: &[Rational], rhs: Rational) -> Facet {
    match crate::exact::primitive_integer(a) {
        Some((normal, scale)) => Facet::new(normal, rhs * scale),
        None => Facet::new(vec![0; a.len()], if rhs.is_zero() { rhs } else { rhs.signum() }),
    }
}
