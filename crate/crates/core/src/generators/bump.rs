//! One-dimensional generators whose second derivative is a sum of bumps.

use serde::{Deserialize, Serialize};

use super::{Generator, GeneratorError, GeneratorKind, Jet};
use crate::exact::to_real;
use crate::kernel::{KernelKind, Profile};
use crate::linalg::Mat;
use crate::polytope::Polytope;
use crate::scalar::Real;

fn default_kernel() -> KernelKind {
    KernelKind::Cosine
}

/// A bump `ψ'' = (A/α) k((x − m)/α)` with support `[m − α, m + α]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpSpec {
    pub m: f64,
    pub alpha: f64,
    #[serde(rename = "A", alias = "a", alias = "mass")]
    pub mass: f64,
    #[serde(default = "default_kernel")]
    pub kernel: KernelKind,
}

impl BumpSpec {
    pub fn new(m: f64, alpha: f64, mass: f64, kernel: KernelKind) -> Self {
        Self { m, alpha, mass, kernel }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub m: f64,
    pub alpha: f64,
    pub mass: f64,
    pub profile: Profile,
}

impl Bump {
    pub fn from_spec(spec: &BumpSpec) -> Self {
        Self { m: spec.m, alpha: spec.alpha, mass: spec.mass, profile: spec.kernel.into() }
    }

    /// `(ψ, ψ', ψ'')` of this bump's contribution at `x`.
    #[inline]
    pub fn eval<T: Real>(&self, x: T) -> (T, T, T) {
        let alpha = T::lit(self.alpha);
        let a = T::lit(self.mass);
        let t = (x - T::lit(self.m)) / alpha;
        if t >= T::one() {
            // exactly affine past the support
            return (a * (x - T::lit(self.m)), a, T::zero());
        }
        let j = self.profile.eval(t);
        (a * alpha * j.ramp, a * j.cdf, a / alpha * j.density)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.m - self.alpha, self.m + self.alpha)
    }
}

/// Bumps with pairwise disjoint supports, ordered by centre.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpChain {
    bumps: Vec<Bump>,
}

impl BumpChain {
    pub fn new(mut bumps: Vec<Bump>) -> Result<Self, GeneratorError> {
        for (i, b) in bumps.iter().enumerate() {
            if !(b.alpha.is_finite() && b.alpha > 0.0) {
                return Err(GeneratorError::NonPositive { index: i, field: "alpha" });
            }
            if !(b.mass.is_finite() && b.mass > 0.0) {
                return Err(GeneratorError::NonPositive { index: i, field: "A" });
            }
            if !b.m.is_finite() {
                return Err(GeneratorError::NonPositive { index: i, field: "m" });
            }
        }
        let mut order: Vec<usize> = (0..bumps.len()).collect();
        order.sort_by(|&i, &j| bumps[i].m.total_cmp(&bumps[j].m));
        for w in order.windows(2) {
            if bumps[w[0]].support().1 > bumps[w[1]].support().0 {
                return Err(GeneratorError::Overlap { first: w[0].min(w[1]), second: w[0].max(w[1]) });
            }
        }
        bumps.sort_by(|a, b| a.m.total_cmp(&b.m));
        Ok(Self { bumps })
    }

    pub fn bumps(&self) -> &[Bump] {
        &self.bumps
    }

    pub fn jet<T: Real>(&self, x: T) -> Jet<T> {
        let (v, d, h) = self.eval(x);
        Jet { value: v, grad: vec![d], hess: Mat::from_rows(&[vec![h]]) }
    }

    pub fn eval<T: Real>(&self, x: T) -> (T, T, T) {
        let mut out = (T::zero(), T::zero(), T::zero());
        for b in &self.bumps {
            if x <= T::lit(b.m - b.alpha) {
                break;
            }
            let (v, d, h) = b.eval(x);
            out.0 += v;
            out.1 += d;
            out.2 += h;
        }
        out
    }

    pub fn value<T: Real>(&self, x: T) -> T {
        self.eval(x).0
    }

    pub fn value_deriv<T: Real>(&self, x: T) -> (T, T) {
        let (v, d, _) = self.eval(x);
        (v, d)
    }

    pub fn support_cuts<T: Real>(&self) -> Vec<(Vec<T>, T)> {
        let mut cuts = Vec::new();
        for b in &self.bumps {
            for c in [b.m - b.alpha, b.m, b.m + b.alpha] {
                cuts.push((vec![T::one()], T::lit(c)));
            }
        }
        cuts
    }

    pub fn locally_affine<T: Real>(&self, x: T) -> bool {
        let x = x.to_f64_lossy();
        self.bumps.iter().all(|b| x <= b.m - b.alpha || x >= b.m + b.alpha)
    }

    /// Total mass to the left of `x`: the slope of `ψ` on the gap containing `x`.
    pub fn slope_left_of(&self, x: f64) -> f64 {
        self.bumps.iter().filter(|b| b.m + b.alpha <= x).map(|b| b.mass).sum()
    }
}

/// Generator on a segment with `ψ''` the sum of the given bumps.
pub fn build_bump_generator(p: &Polytope, specs: &[BumpSpec]) -> Result<Generator, GeneratorError> {
    if p.dim() != 1 {
        return Err(GeneratorError::NotOneDimensional(p.dim()));
    }
    let xs: Vec<f64> = p.vertices().iter().map(|v| to_real::<f64>(&v[0])).collect();
    let (lo, hi) = (xs.iter().cloned().fold(f64::INFINITY, f64::min), xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    let bumps: Vec<Bump> = specs.iter().map(Bump::from_spec).collect();
    let chain = BumpChain::new(bumps)?;
    for (i, s) in specs.iter().enumerate() {
        if s.m + s.alpha <= lo || s.m - s.alpha >= hi {
            return Err(GeneratorError::OutsidePolytope { index: i });
        }
    }
    let kind = if chain.bumps().is_empty() { GeneratorKind::Zero } else { GeneratorKind::Bumps(chain) };
    Ok(Generator::from_kind(1, kind))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::Facet;
    use crate::Rational;

    fn seg(n: i128) -> Polytope {
        Polytope::new(1, vec![Facet::new(vec![1], Rational::from(0)), Facet::new(vec![-1], Rational::from(-n))], false).unwrap()
    }

    #[test]
    fn single_bump_values() {
        let g = build_bump_generator(&seg(2), &[BumpSpec::new(1.0, 0.25, 1.0, KernelKind::Cosine)]).unwrap();
        assert_eq!(g.value(&[1.5]), 0.5);
        assert!((g.value(&[1.25f64]) - 0.25).abs() < 1e-15);
        assert_eq!(g.value(&[0.5]), 0.0);
        let j = g.jet(&[1.0f64]);
        assert!((j.grad[0] - 0.5).abs() < 1e-15);
        assert!((j.hess[(0, 0)] - 4.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_layouts() {
        let p = seg(2);
        let c = KernelKind::Cosine;
        assert!(matches!(
            build_bump_generator(&p, &[BumpSpec::new(1.0, 0.5, 1.0, c), BumpSpec::new(1.6, 0.2, 1.0, c)]),
            Err(GeneratorError::Overlap { .. })
        ));
        assert!(matches!(build_bump_generator(&p, &[BumpSpec::new(3.0, 0.5, 1.0, c)]), Err(GeneratorError::OutsidePolytope { .. })));
        assert!(matches!(build_bump_generator(&p, &[BumpSpec::new(1.0, 0.0, 1.0, c)]), Err(GeneratorError::NonPositive { .. })));
        // touching supports and supports meeting the boundary are fine
        assert!(build_bump_generator(&p, &[BumpSpec::new(0.5, 0.5, 1.0, c), BumpSpec::new(1.5, 0.5, 1.0, c)]).is_ok());
        assert!(build_bump_generator(&seg(1), &[]).unwrap().kind() == &GeneratorKind::Zero);
    }
}
