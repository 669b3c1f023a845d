//! Toric Kähler potentials along Mabuchi rays `g_s = g_P + sψ` generated by
//! convex functions whose Hessian has compact support, the limits of
//! monomial-section densities as `s → ∞`, and the piecewise-linear
//! combinatorics of test configurations.
//!
//! Numerical code is generic over [`scalar::Real`] (`f32`, `f64`); polytope
//! and decomposition geometry is exact over [`exact::Rational`].

pub mod exact;
pub mod generators;
pub mod kernel;
pub mod lattice;
pub mod limits;
pub mod linalg;
pub mod polytope;
pub mod potentials;
pub mod quadrature;
pub mod quantization;
pub mod scalar;
pub mod specfile;
pub mod testconfig;

pub use exact::Rational;
pub use kernel::{KernelKind, Profile};
pub use polytope::{face_frame, Facet, FaceFrame, Polytope, PolytopeError};
pub use scalar::Real;

pub type Mat = linalg::Mat<f64>;
pub type Region = quadrature::Region<f64>;
pub type Jet = generators::Jet<f64>;
pub type Tolerance = quadrature::Tolerance<f64>;
pub type SectionDensity<'a> = quantization::SectionDensity<'a, f64>;
pub type PolarizationFrame = limits::PolarizationFrame<f64>;
pub type Subspace = limits::Subspace<f64>;
