//! Convex generators `ψ` of Mabuchi rays and their first two derivatives.

pub mod bump;
pub mod pl;
pub mod smoothing;
pub mod verify;
pub mod wall;

use crate::lattice::LatticeError;
use crate::linalg::Mat;
use crate::polytope::Polytope;
use crate::scalar::Real;

pub use bump::{build_bump_generator, Bump, BumpChain, BumpSpec};
pub use pl::{AffinePiece, PLConvex, PLError};
pub use smoothing::{build_nice_smoothing, build_strict_smoothing, NiceSmoothing};
pub use verify::{verify_nice_family, ConditionResult, NiceReport, VerifyOptions};
pub use wall::{build_wall_sum, Wall, WallSum};

/// `(ψ, ∇ψ, Hess ψ)` at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet<T> {
    pub value: T,
    pub grad: Vec<T>,
    pub hess: Mat<T>,
}

impl<T: Real> Jet<T> {
    pub fn zero(n: usize) -> Self {
        Self { value: T::zero(), grad: vec![T::zero(); n], hess: Mat::zeros(n, n) }
    }

    pub fn scaled(&self, s: T) -> Self {
        Self { value: self.value * s, grad: self.grad.iter().map(|&g| g * s).collect(), hess: self.hess.scaled(s) }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            value: self.value + other.value,
            grad: self.grad.iter().zip(&other.grad).map(|(&a, &b)| a + b).collect(),
            hess: self.hess.add(&other.hess),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeneratorError {
    #[error("bump {index}: {field} must be positive and finite")]
    NonPositive { index: usize, field: &'static str },
    #[error("bump supports {first} and {second} overlap")]
    Overlap { first: usize, second: usize },
    #[error("bump {index} support does not meet the interior of the polytope")]
    OutsidePolytope { index: usize },
    #[error("bump generators need a 1-dimensional polytope, got dimension {0}")]
    NotOneDimensional(usize),
    #[error("wall {index} is not centred on its offset ({center} vs {offset})")]
    WallCenter { index: usize, center: f64, offset: f64 },
    #[error("wall {index} frame has codimension {codim}, expected 1")]
    WallCodim { index: usize, codim: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("epsilon must be positive and finite, got {0}")]
    Epsilon(f64),
    #[error("epsilon {eps} too large: face neighbourhoods collide ({detail})")]
    EpsilonTooLarge { eps: f64, detail: String },
    #[error("the smooth radial kernel is tabulated for dimensions 1 to 3, got {0}")]
    KernelDimension(usize),
    #[error("the cosine kernel is only C¹ and is not used for smoothings in dimension {0} > 1")]
    CosineInHigherDimension(usize),
    #[error("point lies outside the polytope")]
    OutsidePoint,
    #[error(transparent)]
    Frame(#[from] LatticeError),
    #[error(transparent)]
    PL(#[from] PLError),
}

/// How a generator was built.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorKind {
    Zero,
    Bumps(BumpChain),
    WallSum(WallSum),
    Nice(NiceSmoothing),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    dim: usize,
    kind: GeneratorKind,
}

impl Generator {
    pub fn zero(dim: usize) -> Self {
        Self { dim, kind: GeneratorKind::Zero }
    }

    pub(crate) fn from_kind(dim: usize, kind: GeneratorKind) -> Self {
        Self { dim, kind }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &GeneratorKind {
        &self.kind
    }

    pub fn provenance(&self) -> &'static str {
        match &self.kind {
            GeneratorKind::Zero => "zero",
            GeneratorKind::Bumps(_) => "bumps",
            GeneratorKind::WallSum(_) => "wall-sum",
            GeneratorKind::Nice(n) if n.strict_weight() > 0.0 => "pl-smooth-strict",
            GeneratorKind::Nice(_) => "pl-smooth",
        }
    }

    pub fn jet<T: Real>(&self, x: &[T]) -> Jet<T> {
        assert_eq!(x.len(), self.dim, "point dimension");
        match &self.kind {
            GeneratorKind::Zero => Jet::zero(self.dim),
            GeneratorKind::Bumps(b) => b.jet(x[0]),
            GeneratorKind::WallSum(w) => w.jet(x),
            GeneratorKind::Nice(n) => n.jet(x),
        }
    }

    /// Like [`Generator::jet`] but rejects points outside `p`.
    pub fn eval_checked<T: Real>(&self, p: &Polytope, x: &[T]) -> Result<Jet<T>, GeneratorError> {
        if x.len() != self.dim {
            return Err(GeneratorError::Dimension { expected: self.dim, got: x.len() });
        }
        if !p.contains(x, T::epsilon().sqrt() * T::lit(1e-4)) {
            return Err(GeneratorError::OutsidePoint);
        }
        Ok(self.jet(x))
    }

    pub fn value<T: Real>(&self, x: &[T]) -> T {
        match &self.kind {
            GeneratorKind::Zero => T::zero(),
            GeneratorKind::Bumps(b) => b.value(x[0]),
            GeneratorKind::WallSum(w) => w.value(x),
            GeneratorKind::Nice(n) => n.value(x),
        }
    }

    /// `(ψ, ∇ψ)` without the Hessian.
    pub fn value_grad<T: Real>(&self, x: &[T]) -> (T, Vec<T>) {
        match &self.kind {
            GeneratorKind::Zero => (T::zero(), vec![T::zero(); self.dim]),
            GeneratorKind::Bumps(b) => {
                let (v, d) = b.value_deriv(x[0]);
                (v, vec![d])
            }
            GeneratorKind::WallSum(w) => w.value_grad(x),
            GeneratorKind::Nice(n) => n.value_grad(x),
        }
    }

    /// Hyperplanes `a · x = b` bounding the region where `Hess ψ ≠ 0`; used
    /// as quadrature cuts.
    pub fn support_cuts<T: Real>(&self) -> Vec<(Vec<T>, T)> {
        match &self.kind {
            GeneratorKind::Zero => vec![],
            GeneratorKind::Bumps(b) => b.support_cuts(),
            GeneratorKind::WallSum(w) => w.support_cuts(),
            GeneratorKind::Nice(n) => n.support_cuts(),
        }
    }

    /// Whether `Hess ψ` vanishes identically on a neighbourhood of `x`.
    pub fn locally_affine<T: Real>(&self, x: &[T]) -> bool {
        match &self.kind {
            GeneratorKind::Zero => true,
            GeneratorKind::Bumps(b) => b.locally_affine(x[0]),
            GeneratorKind::WallSum(w) => w.locally_affine(x),
            GeneratorKind::Nice(n) => n.locally_affine(x),
        }
    }
}
