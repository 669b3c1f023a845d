//! Symplectic potentials `g_s = g_P + sψ`, the Legendre transform to
//! holomorphic log-coordinates and the Kähler potential.

use num_complex::Complex;

use crate::generators::{Generator, Jet};
use crate::linalg::Mat;
use crate::polytope::Polytope;
use crate::scalar::{dot, norm2, Real};

/// `(g, ∇g, Hess g)` of a symplectic potential.
pub type PotentialJet<T> = Jet<T>;

/// Smallest facet value at which potentials are evaluated.
pub const MIN_ELL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PotentialError {
    #[error("point is not in the interior of the polytope (min ℓ = {min_ell:e})")]
    NotInterior { min_ell: f64 },
    #[error("Newton iteration did not converge: residual {residual:e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },
    #[error("Hessian is not positive definite")]
    NotPositiveDefinite,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

/// A point on the ray: polytope, generator, time `s` and moment coordinate `x`.
#[derive(Debug, Clone, Copy)]
pub struct RayPoint<'a, T> {
    pub polytope: &'a Polytope,
    pub generator: &'a Generator,
    pub s: T,
    pub x: &'a [T],
}

fn check_interior<T: Real>(p: &Polytope, x: &[T]) -> Result<Vec<T>, PotentialError> {
    if x.len() != p.dim() {
        return Err(PotentialError::Dimension { expected: p.dim(), got: x.len() });
    }
    let ell = p.ell_values(x);
    let min = ell.iter().copied().fold(T::infinity(), T::min);
    if !(min >= T::lit(MIN_ELL)) {
        return Err(PotentialError::NotInterior { min_ell: min.to_f64_lossy() });
    }
    Ok(ell)
}

/// Guillemin potential `g_P = Σ ½ ℓ_r log ℓ_r` with its analytic derivatives.
pub fn guillemin_jet<T: Real>(p: &Polytope, x: &[T]) -> Result<PotentialJet<T>, PotentialError> {
    let ell = check_interior(p, x)?;
    let n = p.dim();
    let mut jet = Jet::zero(n);
    for (facet, &l) in p.facets().iter().zip(&ell) {
        let v: Vec<T> = facet.normal.iter().map(|&a| T::lit(a as f64)).collect();
        let lg = l.ln();
        jet.value += T::half() * l * lg;
        for (g, &vi) in jet.grad.iter_mut().zip(&v) {
            *g += T::half() * vi * (lg + T::one());
        }
        jet.hess.add_assign_scaled(&Mat::outer(&v, &v), T::half() / l);
    }
    Ok(jet)
}

/// Jet of `g_s = g_P + sψ`.
pub fn ray_jet<T: Real>(rp: &RayPoint<'_, T>) -> Result<PotentialJet<T>, PotentialError> {
    let base = guillemin_jet(rp.polytope, rp.x)?;
    if rp.s == T::zero() {
        return Ok(base);
    }
    Ok(base.add(&rp.generator.jet(rp.x).scaled(rp.s)))
}

/// `y = ∇g_s(x)`.
pub fn legendre_forward<T: Real>(rp: &RayPoint<'_, T>) -> Result<Vec<T>, PotentialError> {
    let base = guillemin_jet(rp.polytope, rp.x)?;
    if rp.s == T::zero() {
        return Ok(base.grad);
    }
    let (_, dpsi) = rp.generator.value_grad(rp.x);
    Ok(base.grad.iter().zip(&dpsi).map(|(&a, &b)| a + rp.s * b).collect())
}

/// Solves `∇g_s(x) = y` by damped Newton on the strictly convex
/// `g_s(x) − ⟨x, y⟩`, halving steps that leave the interior or fail to
/// decrease it. Returns `x`.
pub fn legendre_inverse<T: Real>(
    p: &Polytope,
    gen: &Generator,
    s: T,
    y: &[T],
    guess: &[T],
) -> Result<Vec<T>, PotentialError> {
    const MAX_ITER: usize = 200;
    let tol = T::lit(1e-10).max(T::epsilon() * T::lit(1e3));
    let phi = |x: &[T]| -> Result<T, PotentialError> {
        let rp = RayPoint { polytope: p, generator: gen, s, x };
        let j = guillemin_jet(p, x)?;
        let psi = if s == T::zero() { T::zero() } else { rp.generator.value(x) };
        Ok(j.value + s * psi - dot(x, y))
    };
    let mut x = guess.to_vec();
    check_interior(p, &x)?;
    let mut residual = T::infinity();
    for it in 0..MAX_ITER {
        let rp = RayPoint { polytope: p, generator: gen, s, x: &x };
        let j = ray_jet(&rp)?;
        let r: Vec<T> = j.grad.iter().zip(y).map(|(&a, &b)| a - b).collect();
        residual = norm2(&r);
        if residual <= tol {
            return Ok(x);
        }
        let step = j.hess.solve(&r).ok_or(PotentialError::NotPositiveDefinite)?;
        // at the round-off floor of ∇g_s the Newton step stops moving x
        if norm2(&step) <= T::epsilon() * T::lit(8.0) * (T::one() + norm2(&x)) {
            return Ok(x);
        }
        let f0 = phi(&x)?;
        let slope = -dot(&r, &step);
        let mut t = T::one();
        let mut accepted = false;
        for _ in 0..80 {
            let xn: Vec<T> = x.iter().zip(&step).map(|(&a, &d)| a - t * d).collect();
            if p.min_ell(&xn) > T::lit(MIN_ELL) {
                if let Ok(fnew) = phi(&xn) {
                    // Armijo with a floor for round-off near the minimum
                    let slack = T::epsilon() * T::lit(64.0) * (T::one() + f0.abs());
                    if fnew <= f0 + T::lit(1e-4) * t * slope + slack {
                        x = xn;
                        accepted = true;
                        break;
                    }
                }
            }
            t = t * T::half();
        }
        if !accepted {
            return Err(PotentialError::NoConvergence { residual: residual.to_f64_lossy(), iterations: it });
        }
    }
    Err(PotentialError::NoConvergence { residual: residual.to_f64_lossy(), iterations: MAX_ITER })
}

/// Kähler potential `h(y) = ⟨x(y), y⟩ − g_s(x(y))`; returns `(h, x(y))`.
pub fn kahler_potential<T: Real>(
    p: &Polytope,
    gen: &Generator,
    s: T,
    y: &[T],
    guess: &[T],
) -> Result<(T, Vec<T>), PotentialError> {
    let x = legendre_inverse(p, gen, s, y, guess)?;
    let g = guillemin_jet(p, &x)?.value + if s == T::zero() { T::zero() } else { s * gen.value(&x) };
    Ok((dot(&x, y) - g, x))
}

/// `log w = y + iθ` componentwise.
pub fn holo_log_coordinate<T: Real>(rp: &RayPoint<'_, T>, theta: &[T]) -> Result<Vec<Complex<T>>, PotentialError> {
    let y = legendre_forward(rp)?;
    if theta.len() != y.len() {
        return Err(PotentialError::Dimension { expected: y.len(), got: theta.len() });
    }
    Ok(y.into_iter().zip(theta).map(|(re, &im)| Complex::new(re, im)).collect())
}

/// `δ(x) = [det G · Π ℓ_r]^{-1}`; `None` when `det G ≤ 0`.
pub fn abreu_delta<T: Real>(p: &Polytope, x: &[T], hess: &Mat<T>) -> Option<T> {
    let ell = p.ell_values(x);
    let prod = ell.iter().fold(T::one(), |a, &b| a * b);
    if hess.cholesky().is_none() {
        return None;
    }
    let det = hess.det();
    (det > T::zero()).then(|| T::one() / (det * prod))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaSample {
    pub x: Vec<f64>,
    pub min_ell: f64,
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetReport {
    pub samples: Vec<DeltaSample>,
    /// Every `δ` exists and is positive.
    pub positive: bool,
    pub min_delta: f64,
    pub max_delta: f64,
}

impl DetReport {
    /// `δ` stays within `[lo, hi]` at every sample.
    pub fn bounded(&self, lo: f64, hi: f64) -> bool {
        self.positive && self.min_delta >= lo && self.max_delta <= hi
    }
}

/// Evaluates `δ` from a Hessian field at the samples; non-positive-definite
/// Hessians are flagged by a missing `δ`.
pub fn det_identity_report(p: &Polytope, samples: &[Vec<f64>], hess: impl Fn(&[f64]) -> Option<Mat<f64>>) -> DetReport {
    let mut out = Vec::with_capacity(samples.len());
    let (mut lo, mut hi, mut positive) = (f64::INFINITY, 0.0f64, true);
    for x in samples {
        let delta = hess(x).and_then(|h| abreu_delta(p, x, &h));
        match delta {
            Some(d) if d.is_finite() && d > 0.0 => {
                lo = lo.min(d);
                hi = hi.max(d);
            }
            _ => positive = false,
        }
        out.push(DeltaSample { x: x.clone(), min_ell: p.min_ell(x), delta });
    }
    DetReport { samples: out, positive, min_delta: lo, max_delta: hi }
}

/// `δ` along the ray `g_s` at the samples.
pub fn det_identity_check(p: &Polytope, gen: &Generator, s: f64, samples: &[Vec<f64>]) -> DetReport {
    det_identity_report(p, samples, |x| ray_jet(&RayPoint { polytope: p, generator: gen, s, x }).ok().map(|j| j.hess))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{build_bump_generator, BumpSpec};
    use crate::kernel::KernelKind;
    use crate::polytope::Facet;
    use crate::Rational;

    fn seg(n: i128) -> Polytope {
        Polytope::new(1, vec![Facet::new(vec![1], Rational::from(0)), Facet::new(vec![-1], Rational::from(-n))], false).unwrap()
    }

    #[test]
    fn guillemin_on_segment() {
        let p = seg(2);
        let j = guillemin_jet(&p, &[1.0]).unwrap();
        assert_eq!(j.value, 0.0);
        assert_eq!(j.grad[0], 0.0);
        assert_eq!(j.hess[(0, 0)], 1.0);
        assert!(guillemin_jet(&p, &[0.0]).is_err());
        assert!(guillemin_jet(&p, &[2.5]).is_err());
    }

    #[test]
    fn newton_inverts_through_bumps() {
        let p = seg(2);
        let g = build_bump_generator(&p, &[BumpSpec::new(1.0, 0.5, 4.0, KernelKind::Cosine)]).unwrap();
        for s in [0.0, 1.0, 100.0, 1e4] {
            for i in 1..20 {
                let x = [0.1 * i as f64];
                let rp = RayPoint { polytope: &p, generator: &g, s, x: &x };
                let y = legendre_forward(&rp).unwrap();
                let back = legendre_inverse(&p, &g, s, &y, &[1.0]).unwrap();
                assert!((back[0] - x[0]).abs() < 1e-9, "s={s} x={} back={}", x[0], back[0]);
            }
        }
    }

    #[test]
    fn non_positive_hessian_is_flagged() {
        let p = seg(2);
        let rep = det_identity_report(&p, &[vec![0.5], vec![1.0]], |x| Some(Mat::from_rows(&[vec![x[0] - 0.75]])));
        assert!(!rep.positive);
        assert!(rep.samples[0].delta.is_none());
        assert!(rep.samples[1].delta.is_some());
    }
}
