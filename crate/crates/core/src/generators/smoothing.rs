//! Nice smoothings of a piecewise-linear convex `f`: the convolution of `f`
//! with a radial C^∞ mollifier of radius `ρ` proportional to `ε`.
//!
//! The convolution is convex and equals `f` wherever the ball of radius `ρ`
//! misses the non-differentiability locus. Near a wall between two pieces it
//! only depends on the coordinate across the wall, so its Hessian there has
//! rank exactly one; where several walls meet the rank grows to the number of
//! independent gradient differences.
//!
//! Evaluation first collects the pieces that can be maximal inside the ball.
//! One piece: `ψ` is that affine function. Two pieces: closed form through
//! the line marginal of the kernel. More: the integrals are computed over the
//! cells of the ball where each piece is maximal.

use super::pl::PLConvex;
use super::{Generator, GeneratorError, GeneratorKind, Jet};
use crate::exact::to_real;
use crate::kernel::{radial_kernel, radial_mass, KernelKind, Profile};
use crate::linalg::Mat;
use crate::polytope::Polytope;
use crate::quadrature::{integrate, Region, Tolerance};
use crate::scalar::{dot, norm2, Real};
use crate::testconfig::Decomposition;

#[derive(Debug, Clone, PartialEq)]
pub struct NiceSmoothing {
    dim: usize,
    eps: f64,
    rho: f64,
    g: Vec<Vec<f64>>,
    b: Vec<f64>,
    kernel: KernelKind,
    profile: Profile,
    ridges: Vec<(usize, usize)>,
    strict: f64,
    center: Vec<f64>,
}

impl NiceSmoothing {
    pub fn epsilon(&self) -> f64 {
        self.eps
    }

    /// Mollifier radius.
    pub fn radius(&self) -> f64 {
        self.rho
    }

    pub fn kernel(&self) -> KernelKind {
        self.kernel
    }

    /// Weight `η` of the added `η |x − x̄|²` term (zero for nice smoothings).
    pub fn strict_weight(&self) -> f64 {
        self.strict
    }

    fn piece<T: Real>(&self, i: usize, x: &[T]) -> T {
        let g: Vec<T> = self.g[i].iter().map(|&v| T::lit(v)).collect();
        dot(&g, x) + T::lit(self.b[i])
    }

    /// Pieces that may be maximal somewhere in the ball of radius `ρ`
    /// around `x`.
    fn candidates<T: Real>(&self, x: &[T]) -> Vec<usize> {
        let vals: Vec<f64> = (0..self.g.len()).map(|i| self.piece(i, x).to_f64_lossy()).collect();
        let slack = 1e-13 * (1.0 + vals.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        (0..self.g.len())
            .filter(|&i| {
                (0..self.g.len()).all(|k| {
                    let d: Vec<f64> = self.g[i].iter().zip(&self.g[k]).map(|(a, b)| a - b).collect();
                    vals[i] - vals[k] + self.rho * norm2(&d) + slack >= 0.0
                })
            })
            .collect()
    }

    pub fn jet<T: Real>(&self, x: &[T]) -> Jet<T> {
        let c = self.candidates(x);
        let mut j = match c.len() {
            1 => self.affine_jet(c[0], x),
            2 => self.ridge_jet(c[0], c[1], x),
            _ => self.cell_jet(&c, x),
        };
        if self.strict > 0.0 {
            let eta = T::lit(self.strict);
            for (i, (&xi, &ci)) in x.iter().zip(&self.center).enumerate() {
                let d = xi - T::lit(ci);
                j.value += eta * d * d;
                j.grad[i] += T::two() * eta * d;
                j.hess[(i, i)] += T::two() * eta;
            }
        }
        j
    }

    pub fn value<T: Real>(&self, x: &[T]) -> T {
        self.jet(x).value
    }

    pub fn value_grad<T: Real>(&self, x: &[T]) -> (T, Vec<T>) {
        let j = self.jet(x);
        (j.value, j.grad)
    }

    fn affine_jet<T: Real>(&self, i: usize, x: &[T]) -> Jet<T> {
        Jet { value: self.piece(i, x), grad: self.g[i].iter().map(|&v| T::lit(v)).collect(), hess: Mat::zeros(self.dim, self.dim) }
    }

    /// `a_i + ρ |w| Φ(z/ρ)` with `w = g_k − g_i` and `z` the signed distance
    /// to the ridge `a_i = a_k`.
    fn ridge_jet<T: Real>(&self, i: usize, k: usize, x: &[T]) -> Jet<T> {
        let w: Vec<T> = self.g[k].iter().zip(&self.g[i]).map(|(&a, &b)| T::lit(a - b)).collect();
        let nw = norm2(&w);
        let rho = T::lit(self.rho);
        let z = (self.piece(k, x) - self.piece(i, x)) / nw;
        let p = self.profile.eval(z / rho);
        let base = self.affine_jet(i, x);
        let value = base.value + nw * rho * p.ramp;
        let grad = base.grad.iter().zip(&w).map(|(&g, &wi)| g + p.cdf * wi).collect();
        let hess = Mat::outer(&w, &w).scaled(p.density / (rho * nw));
        Jet { value, grad, hess }
    }

    /// Convolution restricted to the cells of the candidate pieces, in the
    /// rescaled variable `z = (x − y)/ρ` on the unit box.
    fn cell_jet<T: Real>(&self, cand: &[usize], x: &[T]) -> Jet<T> {
        let n = self.dim;
        let xf: Vec<f64> = x.iter().map(|v| v.to_f64_lossy()).collect();
        let vals: Vec<f64> = cand.iter().map(|&i| self.piece(i, &xf)).collect();
        let rho = self.rho;
        let mass = match self.profile {
            Profile::Smooth { .. } => radial_mass(n),
            Profile::Cosine => 1.0,
        };
        let profile = self.profile;
        // kernel and its gradient at z
        let kernel = move |z: &[f64]| -> (f64, Vec<f64>) {
            match profile {
                Profile::Cosine => {
                    let j = profile.eval(z[0]);
                    (j.density, vec![j.density_deriv])
                }
                Profile::Smooth { .. } => {
                    let r2: f64 = z.iter().map(|v| v * v).sum();
                    if r2 >= 1.0 {
                        return (0.0, vec![0.0; z.len()]);
                    }
                    let th = radial_kernel(r2) / mass;
                    let d = -th / ((1.0 - r2) * (1.0 - r2));
                    (th, z.iter().map(|&zl| 2.0 * zl * d).collect())
                }
            }
        };
        let tol = Tolerance::new(1e-12, 1e-14);
        let unit = Region::boxed(&vec![-1.0; n], &vec![1.0; n]);
        let cuts: Vec<(Vec<f64>, f64)> = (0..n)
            .map(|l| {
                let mut e = vec![0.0; n];
                e[l] = 1.0;
                (e, 0.0)
            })
            .collect();
        let mut value = 0.0;
        let mut grad = vec![0.0; n];
        let mut hess = Mat::<f64>::zeros(n, n);
        for (ci, &c) in cand.iter().enumerate() {
            let mut region = unit.clone();
            for (ki, &k) in cand.iter().enumerate() {
                if k == c {
                    continue;
                }
                let a: Vec<f64> = self.g[c].iter().zip(&self.g[k]).map(|(p, q)| -rho * (p - q)).collect();
                region = region.with(a, -(vals[ci] - vals[ki]));
            }
            if !region.is_full_dimensional() {
                continue;
            }
            let gc = &self.g[c];
            let r = integrate(
                &region,
                &cuts,
                |z: &[f64]| {
                    let (th, dth) = kernel(z);
                    let y: Vec<f64> = xf.iter().zip(z).map(|(xi, zi)| xi - rho * zi).collect();
                    let mut out = Vec::with_capacity(n + 2);
                    out.push(th);
                    out.push(self.piece(c, &y) * th);
                    out.extend(dth);
                    out
                },
                n + 2,
                &tol,
            );
            value += r.value[1];
            for jj in 0..n {
                grad[jj] += gc[jj] * r.value[0];
                for l in 0..n {
                    hess[(jj, l)] += gc[jj] * r.value[2 + l] / rho;
                }
            }
        }
        hess.symmetrize();
        Jet {
            value: T::lit(value),
            grad: grad.into_iter().map(T::lit).collect(),
            hess: Mat::from_fn(n, n, |i, j| T::lit(hess[(i, j)])),
        }
    }

    pub fn support_cuts<T: Real>(&self) -> Vec<(Vec<T>, T)> {
        let mut cuts = Vec::new();
        for &(i, k) in &self.ridges {
            let w: Vec<f64> = self.g[k].iter().zip(&self.g[i]).map(|(a, b)| a - b).collect();
            let beta = self.b[k] - self.b[i];
            let nw = norm2(&w);
            for off in [-self.rho * nw, 0.0, self.rho * nw] {
                cuts.push((w.iter().map(|&v| T::lit(v)).collect(), T::lit(off - beta)));
            }
        }
        cuts
    }

    pub fn locally_affine<T: Real>(&self, x: &[T]) -> bool {
        self.strict == 0.0 && self.candidates(x).len() == 1
    }
}

fn build(
    f: &PLConvex,
    p: &Polytope,
    decomp: &Decomposition,
    eps: f64,
    kernel: KernelKind,
    strict: f64,
) -> Result<Generator, GeneratorError> {
    let n = p.dim();
    if f.dim() != n {
        return Err(GeneratorError::Dimension { expected: n, got: f.dim() });
    }
    if !(eps.is_finite() && eps > 0.0) {
        return Err(GeneratorError::Epsilon(eps));
    }
    let profile = match kernel {
        KernelKind::Cosine if n > 1 => return Err(GeneratorError::CosineInHigherDimension(n)),
        KernelKind::Cosine => Profile::Cosine,
        KernelKind::Smooth if n > 3 => return Err(GeneratorError::KernelDimension(n)),
        KernelKind::Smooth => Profile::Smooth { dim: n },
    };
    // the decomposition's pieces are pruned and indexed consistently with its faces
    let pl = &decomp.pl;
    let mut max_norm = 0.0f64;
    for face in &decomp.faces {
        for nu in &face.normals {
            let v: Vec<f64> = nu.iter().map(|&a| a as f64).collect();
            max_norm = max_norm.max(norm2(&v));
        }
    }
    let mut rho = if max_norm > 0.0 { eps / max_norm } else { eps };
    if decomp.max_codim() >= 2 {
        rho *= 0.5;
    }
    // distinct vertices of W must stay more than a ball diameter apart
    let verts: Vec<Vec<f64>> = {
        let mut vs: Vec<Vec<crate::Rational>> = decomp.faces.iter().flat_map(|f| f.vertices.iter().cloned()).collect();
        vs.sort();
        vs.dedup();
        vs.iter().map(|v| v.iter().map(to_real::<f64>).collect()).collect()
    };
    for (a, va) in verts.iter().enumerate() {
        for vb in &verts[a + 1..] {
            let d: Vec<f64> = va.iter().zip(vb).map(|(x, y)| x - y).collect();
            if norm2(&d) <= 2.0 * rho {
                return Err(GeneratorError::EpsilonTooLarge {
                    eps,
                    detail: format!("vertices {va:?} and {vb:?} of the locus are {:.3e} apart", norm2(&d)),
                });
            }
        }
    }
    let ridges: Vec<(usize, usize)> = decomp
        .faces
        .iter()
        .filter(|f| f.codim == 1)
        .flat_map(|f| {
            let a = &f.active;
            (0..a.len()).flat_map(move |i| (i + 1..a.len()).map(move |k| (a[i], a[k])))
        })
        .collect();
    let verts_p = p.vertices_real::<f64>();
    let center: Vec<f64> =
        (0..n).map(|c| verts_p.iter().map(|v| v[c]).sum::<f64>() / verts_p.len() as f64).collect();
    let nice = NiceSmoothing {
        dim: n,
        eps,
        rho,
        g: pl.gradients::<f64>(),
        b: pl.offsets::<f64>(),
        kernel,
        profile,
        ridges,
        strict,
        center,
    };
    Ok(Generator::from_kind(n, GeneratorKind::Nice(nice)))
}

/// Nice smoothing `ψ_ε` of `f`.
pub fn build_nice_smoothing(
    f: &PLConvex,
    p: &Polytope,
    decomp: &Decomposition,
    eps: f64,
    kernel: KernelKind,
) -> Result<Generator, GeneratorError> {
    build(f, p, decomp, eps, kernel, 0.0)
}

/// `ψ_ε + η |x − x̄|²` with `x̄` the vertex centroid of `P`: strictly convex
/// everywhere, hence never equal to `f` off `W_ε` and of full Hessian rank
/// on every face.
pub fn build_strict_smoothing(
    f: &PLConvex,
    p: &Polytope,
    decomp: &Decomposition,
    eps: f64,
    kernel: KernelKind,
    eta: f64,
) -> Result<Generator, GeneratorError> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(GeneratorError::Epsilon(eta));
    }
    build(f, p, decomp, eps, kernel, eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::pl::AffinePiece;
    use crate::linalg::numerical_rank;
    use crate::polytope::Facet;
    use crate::testconfig::decompose;
    use crate::Rational;

    fn r(p: i128) -> Rational {
        Rational::from(p)
    }

    fn simplex() -> Polytope {
        Polytope::new(2, vec![Facet::new(vec![1, 0], r(0)), Facet::new(vec![0, 1], r(0)), Facet::new(vec![-1, -1], r(-3))], false)
            .unwrap()
    }

    fn pl(pieces: &[([i128; 2], i128)]) -> PLConvex {
        PLConvex::new(2, pieces.iter().map(|(g, b)| AffinePiece::new(vec![r(g[0]), r(g[1])], r(*b))).collect()).unwrap()
    }

    #[test]
    fn single_wall_is_one_dimensional_mollification() {
        let p = simplex();
        let f = pl(&[([0, 0], 0), ([1, 0], -1)]);
        let d = decompose(&f, &p).unwrap();
        let g = build_nice_smoothing(&f, &p, &d, 0.1, KernelKind::Smooth).unwrap();
        let prof = Profile::Smooth { dim: 2 };
        for &(x1, x2) in &[(0.95, 0.3), (1.0, 1.2), (1.07, 0.1), (0.5, 0.5), (1.5, 1.0)] {
            let j = g.jet(&[x1, x2]);
            let t: f64 = (x1 - 1.0) / 0.1;
            let expect = 0.1 * prof.eval(t).ramp;
            assert!((j.value - expect).abs() < 1e-15, "{x1} {x2}");
            assert_eq!(j.grad[1], 0.0);
            if (x1 - 1.0f64).abs() >= 0.1 {
                assert_eq!(j.value, f.eval(&[x1, x2]));
            }
        }
        let rank = numerical_rank(&g.jet(&[1.02, 0.7]).hess.symmetric_eigenvalues(), 1e-8);
        assert_eq!(rank, 1);
    }

    #[test]
    fn corner_has_full_rank_and_matches_ridge_formula_nearby() {
        let p = simplex();
        let f = pl(&[([0, 0], 0), ([1, 0], -1), ([0, 1], -1)]);
        let d = decompose(&f, &p).unwrap();
        let g = build_nice_smoothing(&f, &p, &d, 0.2, KernelKind::Smooth).unwrap();
        let NiceSmoothing { rho, .. } = match g.kind() {
            GeneratorKind::Nice(n) => n.clone(),
            _ => unreachable!(),
        };
        let j = g.jet(&[1.0, 1.0]);
        assert_eq!(numerical_rank(&j.hess.symmetric_eigenvalues(), 1e-8), 2);
        // convolution of a convex function dominates it
        assert!(j.value >= f.eval(&[1.0, 1.0]));
        // finite differences against the numerical jet
        let h = 2e-5;
        let x = [1.0 + 0.3 * rho, 1.0 - 0.2 * rho];
        let j = g.jet(&x);
        for l in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[l] += h;
            xm[l] -= h;
            let fd = (g.value(&xp) - g.value(&xm)) / (2.0 * h);
            assert!((fd - j.grad[l]).abs() < 1e-6, "grad {l}: {fd} vs {}", j.grad[l]);
            let (gp, gm) = (g.jet(&xp).grad, g.jet(&xm).grad);
            for k in 0..2 {
                let fd2 = (gp[k] - gm[k]) / (2.0 * h);
                assert!((fd2 - j.hess[(k, l)]).abs() < 1e-5 * (1.0 + j.hess.max_abs()), "hess {k}{l}");
            }
        }
    }

    #[test]
    fn too_large_epsilon_is_rejected() {
        let p = simplex();
        let f = pl(&[([0, 0], 0), ([1, 0], -1), ([0, 1], -1)]);
        let d = decompose(&f, &p).unwrap();
        assert!(matches!(build_nice_smoothing(&f, &p, &d, 3.0, KernelKind::Smooth), Err(GeneratorError::EpsilonTooLarge { .. })));
        assert!(matches!(build_nice_smoothing(&f, &p, &d, 0.1, KernelKind::Cosine), Err(GeneratorError::CosineInHigherDimension(2))));
    }
}
