//! Lengths in the metric `ds² = dxᵀ G_s dx + dθᵀ G_s⁻¹ dθ`.

use crate::generators::Generator;
use crate::polytope::Polytope;
use crate::potentials::{ray_jet, PotentialError, RayPoint};
use crate::quadrature::{integrate_1d, Tolerance};
use crate::scalar::{dot, Real};

/// Length of the polyline through `(x, θ)` vertices at time `s`; each
/// segment is integrated adaptively with breakpoints where it crosses the
/// generator's support cuts.
pub fn metric_length<T: Real>(
    p: &Polytope,
    gen: &Generator,
    s: T,
    path: &[(Vec<T>, Vec<T>)],
    tol: &Tolerance<T>,
) -> Result<T, PotentialError> {
    let cuts = gen.support_cuts::<T>();
    let mut total = T::zero();
    for w in path.windows(2) {
        let (x0, t0) = &w[0];
        let (x1, t1) = &w[1];
        let dx: Vec<T> = x1.iter().zip(x0).map(|(&a, &b)| a - b).collect();
        let dt: Vec<T> = t1.iter().zip(t0).map(|(&a, &b)| a - b).collect();
        let mut breaks = vec![T::zero(), T::one()];
        for (a, b) in &cuts {
            let den = dot(a, &dx);
            if den != T::zero() {
                let u = (*b - dot(a, x0)) / den;
                if u > T::zero() && u < T::one() {
                    breaks.push(u);
                }
            }
        }
        let mut err = None;
        let r = integrate_1d(
            |u| {
                let x: Vec<T> = x0.iter().zip(&dx).map(|(&a, &d)| a + u * d).collect();
                match ray_jet(&RayPoint { polytope: p, generator: gen, s, x: &x }) {
                    Ok(j) => {
                        let gx = dot(&dx, &j.hess.mul_vec(&dx));
                        let gt = if dt.iter().all(|&v| v == T::zero()) {
                            T::zero()
                        } else {
                            j.hess.solve(&dt).map(|v| dot(&dt, &v)).unwrap_or(T::nan())
                        };
                        vec![(gx + gt).max(T::zero()).sqrt()]
                    }
                    Err(e) => {
                        err.get_or_insert(e);
                        vec![T::zero()]
                    }
                }
            },
            &breaks,
            1,
            tol,
        );
        if let Some(e) = err {
            return Err(e);
        }
        total += r.value[0];
    }
    Ok(total)
}

/// Length `2π √((G_s⁻¹)_{kk})` of the `θ_k` circle over `x`.
pub fn theta_circumference<T: Real>(p: &Polytope, gen: &Generator, s: T, x: &[T], k: usize) -> Result<T, PotentialError> {
    let j = ray_jet(&RayPoint { polytope: p, generator: gen, s, x })?;
    let mut e = vec![T::zero(); x.len()];
    e[k] = T::one();
    let v = j.hess.solve(&e).ok_or(PotentialError::NotPositiveDefinite)?;
    Ok(T::TAU() * v[k].sqrt())
}
