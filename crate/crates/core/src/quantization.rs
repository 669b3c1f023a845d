//! Fibre densities of monomial sections along the ray, their `L¹` norms and
//! the coefficient action of the generalized coherent state transform.
//!
//! For a lattice point `m` the section `σ^m_s` has pointwise norm
//! `e^{−h⁰_m(x) − s f_m(x)}` with
//! `h⁰_m = ⟨x − m, ∇g_P⟩ − g_P` and `f_m = ⟨x − m, ∇ψ⟩ − ψ`.
//! All integrals are done in log space, relative to the a priori maximum
//! `s ψ(m) − h⁰_m(m)` of the exponent.

use crate::generators::Generator;
use crate::polytope::Polytope;
use crate::quadrature::{integrate, Region, Tolerance};
use crate::scalar::{dot, Real};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuantizationError {
    #[error("{0:?} is not a lattice point of the polytope")]
    NotLatticePoint(Vec<f64>),
    #[error("point outside the polytope")]
    Outside,
    #[error("quadrature did not reach the requested tolerance (estimated error {error:e})")]
    Quadrature { error: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

/// `f_m(x) = ⟨x − m, ∇ψ(x)⟩ − ψ(x)`.
pub fn f_m<T: Real>(gen: &Generator, m: &[T], x: &[T]) -> T {
    let (psi, grad) = gen.value_grad(x);
    let d: Vec<T> = x.iter().zip(m).map(|(&a, &b)| a - b).collect();
    dot(&d, &grad) - psi
}

/// `Δ_m(x) = ψ(m) + f_m(x) ≥ 0`, vanishing at `x = m`.
pub fn delta_m<T: Real>(gen: &Generator, m: &[T], x: &[T]) -> T {
    gen.value(m) + f_m(gen, m, x)
}

/// `−h⁰_m(x) = Σ ½ [ℓ_r(m) log ℓ_r(x) + ℓ_r(m) − ℓ_r(x)]`, continuous up
/// to the boundary of `P` (with `0 · log 0 = 0`; `−∞` on facets not
/// containing `m`).
pub fn neg_h0_m<T: Real>(p: &Polytope, m: &[T], x: &[T]) -> T {
    let lm = p.ell_values(m);
    let lx = p.ell_values(x);
    let mut acc = T::zero();
    for (&a, &b) in lm.iter().zip(&lx) {
        let b = b.max(T::zero());
        let log_term = if a == T::zero() { T::zero() } else { a * b.ln() };
        acc += T::half() * (log_term + a - b);
    }
    acc
}

/// `h⁰_m(x)` at an interior point.
pub fn h0_m<T: Real>(p: &Polytope, m: &[T], x: &[T]) -> Result<T, QuantizationError> {
    if !p.contains(x, T::zero()) {
        return Err(QuantizationError::Outside);
    }
    Ok(-neg_h0_m(p, m, x))
}

/// Which fibre density to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    /// `e^{−h⁰_m − s f_m}`, the section's own norm.
    Weighted,
    /// `e^{−s f_m}` without the Guillemin factor.
    Bare,
}

/// The density of `σ^m_s` (or its bare variant) with its cached norm.
#[derive(Debug, Clone)]
pub struct SectionDensity<'a, T> {
    pub polytope: &'a Polytope,
    pub generator: &'a Generator,
    pub m: Vec<T>,
    pub s: T,
    pub weight: Weight,
    log_ref: T,
    /// `log ∫_P e^{L − L_ref}`.
    log_mass: T,
    pub quadrature_error: T,
    tol: Tolerance<T>,
}

/// Default quadrature tolerance for densities in dimension `n`.
pub fn default_tolerance<T: Real>(n: usize) -> Tolerance<T> {
    let rel = if n == 1 { T::lit(1e-11) } else { T::lit(1e-9) };
    let mut t = Tolerance::new(rel.max(T::epsilon() * T::lit(100.0)), T::lit(1e-300).max(T::min_positive_value()));
    t.max_panels = if n == 1 { 2000 } else { 400 };
    t
}

impl<'a, T: Real> SectionDensity<'a, T> {
    pub fn new(p: &'a Polytope, gen: &'a Generator, m: &[T], s: T, weight: Weight) -> Result<Self, QuantizationError> {
        Self::with_tolerance(p, gen, m, s, weight, default_tolerance(p.dim()))
    }

    pub fn with_tolerance(
        p: &'a Polytope,
        gen: &'a Generator,
        m: &[T],
        s: T,
        weight: Weight,
        tol: Tolerance<T>,
    ) -> Result<Self, QuantizationError> {
        if m.len() != p.dim() {
            return Err(QuantizationError::Dimension { expected: p.dim(), got: m.len() });
        }
        if !p.contains(m, T::zero()) {
            return Err(QuantizationError::Outside);
        }
        let mut log_ref = if s == T::zero() { T::zero() } else { s * gen.value(m) };
        if weight == Weight::Weighted {
            log_ref += neg_h0_m(p, m, m);
        }
        let mut sd = Self {
            polytope: p,
            generator: gen,
            m: m.to_vec(),
            s,
            weight,
            log_ref,
            log_mass: T::zero(),
            quadrature_error: T::zero(),
            tol,
        };
        let r = sd.integrate_raw(&sd.polytope.region(), |_| vec![T::one()], 1)?;
        sd.log_mass = r.0[0].ln();
        sd.quadrature_error = r.1 / r.0[0];
        Ok(sd)
    }

    /// Log-density `L(x)`.
    pub fn log_density(&self, x: &[T]) -> T {
        let mut l = if self.s == T::zero() { T::zero() } else { -self.s * f_m(self.generator, &self.m, x) };
        if self.weight == Weight::Weighted {
            l += neg_h0_m(self.polytope, &self.m, x);
        }
        l
    }

    /// `log[(2π)ⁿ ∫_P e^{L}]`.
    pub fn log_l1_norm(&self) -> T {
        T::from_usize_lossy(self.polytope.dim()) * T::TAU().ln() + self.log_ref + self.log_mass
    }

    /// Normalized density `e^{L} / ∫ e^{L}`.
    pub fn normalized(&self, x: &[T]) -> T {
        (self.log_density(x) - self.log_ref - self.log_mass).exp()
    }

    /// Quadrature cuts: generator support, coordinate hyperplanes through `m`.
    pub fn cuts(&self) -> Vec<(Vec<T>, T)> {
        let n = self.polytope.dim();
        let mut cuts = self.generator.support_cuts::<T>();
        for l in 0..n {
            let mut e = vec![T::zero(); n];
            e[l] = T::one();
            cuts.push((e, self.m[l]));
        }
        cuts
    }

    /// `(∫_region e^{L − L_ref} τ_k, error)` for `k` integrands at once.
    fn integrate_raw(
        &self,
        region: &Region<T>,
        taus: impl Fn(&[T]) -> Vec<T>,
        k: usize,
    ) -> Result<(Vec<T>, T), QuantizationError> {
        let cuts = self.cuts();
        let r = integrate(
            region,
            &cuts,
            |x| {
                let w = (self.log_density(x) - self.log_ref).exp();
                if w == T::zero() {
                    return vec![T::zero(); k];
                }
                taus(x).into_iter().map(|t| t * w).collect()
            },
            k,
            &self.tol,
        );
        if !r.converged {
            return Err(QuantizationError::Quadrature { error: r.error.to_f64_lossy() });
        }
        Ok((r.value, r.error))
    }

    /// `∫_region ρ τ_k` for the normalized density `ρ`.
    pub fn pair_on(
        &self,
        region: &Region<T>,
        taus: impl Fn(&[T]) -> Vec<T>,
        k: usize,
    ) -> Result<Vec<T>, QuantizationError> {
        let (v, _) = self.integrate_raw(region, taus, k)?;
        let z = self.log_mass.exp();
        Ok(v.into_iter().map(|x| x / z).collect())
    }

    /// `∫_P ρ τ_k`.
    pub fn pair(&self, taus: impl Fn(&[T]) -> Vec<T>, k: usize) -> Result<Vec<T>, QuantizationError> {
        self.pair_on(&self.polytope.region(), taus, k)
    }

    /// `log ∫_region e^{L} τ_k` is not defined for signed `τ`; this returns
    /// `e^{−L_ref}`-scaled raw integrals and the reference `L_ref`.
    pub fn scaled_integrals(
        &self,
        region: &Region<T>,
        taus: impl Fn(&[T]) -> Vec<T>,
        k: usize,
    ) -> Result<(Vec<T>, T), QuantizationError> {
        let (v, _) = self.integrate_raw(region, taus, k)?;
        Ok((v, self.log_ref))
    }

    pub fn log_reference(&self) -> T {
        self.log_ref
    }
}

/// Image of `σ^m_0` under the transform at time `s`: coefficient `e^{−sψ(m)}`
/// times the section `σ^m_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct GcstImage<T> {
    pub m: Vec<i64>,
    pub s: T,
    pub log_coefficient: T,
}

impl<T: Real> GcstImage<T> {
    pub fn coefficient(&self) -> T {
        self.log_coefficient.exp()
    }

    /// `log[e^{−sψ(m)} e^{−h⁰_m(x) − s f_m(x)}]`.
    pub fn log_density(&self, p: &Polytope, gen: &Generator, x: &[T]) -> T {
        let m: Vec<T> = self.m.iter().map(|&v| T::lit(v as f64)).collect();
        let mut l = neg_h0_m(p, &m, x) + self.log_coefficient;
        if self.s != T::zero() {
            l -= self.s * f_m(gen, &m, x);
        }
        l
    }
}

pub fn gcst_image<T: Real>(p: &Polytope, gen: &Generator, m: &[i64], s: T) -> Result<GcstImage<T>, QuantizationError> {
    let mr: Vec<crate::Rational> = m.iter().map(|&v| crate::Rational::from(v as i128)).collect();
    if m.len() != p.dim() || !p.contains_exact(&mr) {
        return Err(QuantizationError::NotLatticePoint(m.iter().map(|&v| v as f64).collect()));
    }
    let mt: Vec<T> = m.iter().map(|&v| T::lit(v as f64)).collect();
    let log_coefficient = if s == T::zero() { T::zero() } else { -s * gen.value(&mt) };
    Ok(GcstImage { m: m.to_vec(), s, log_coefficient })
}

/// Lattice points of `P`, labelling the monomial basis.
pub fn basis_census(p: &Polytope) -> Vec<Vec<i64>> {
    p.integral_points()
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
    fn closed_form_on_segment() {
        let p = seg(3);
        for n in 0..=3 {
            let m = [n as f64];
            for i in 0..=30 {
                let x = [0.1 * i as f64];
                let expect = (x[0].powf(n as f64 / 2.0) * (3.0 - x[0]).powf((3 - n) as f64 / 2.0)).ln();
                let got = neg_h0_m(&p, &m, &x);
                if expect.is_finite() {
                    assert!((got - expect).abs() < 1e-12, "n={n} x={}", x[0]);
                } else {
                    assert_eq!(got, f64::NEG_INFINITY);
                }
            }
        }
        // boundary value N^{N/2} at n = 0, x = 0
        assert!((neg_h0_m(&seg(2), &[0.0], &[0.0]) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn half_disc_area() {
        let p = seg(2);
        let g = Generator::zero(1);
        let sd = SectionDensity::new(&p, &g, &[1.0], 0.0, Weight::Weighted).unwrap();
        let expect = (std::f64::consts::TAU * std::f64::consts::FRAC_PI_2).ln();
        assert!((sd.log_l1_norm() - expect).abs() < 1e-10);
        let one = sd.pair(|_| vec![1.0], 1).unwrap();
        assert!((one[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn census_and_lattice_checks() {
        assert_eq!(basis_census(&seg(4)).len(), 5);
        let g = Generator::zero(1);
        assert!(gcst_image::<f64>(&seg(2), &g, &[3], 1.0).is_err());
        assert_eq!(gcst_image::<f64>(&seg(2), &g, &[1], 0.0).unwrap().coefficient(), 1.0);
    }
}
