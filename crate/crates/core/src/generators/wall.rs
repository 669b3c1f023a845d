//! Generators `ψ(x) = Σ ψ_i(x̃_i)` summing 1-D bump generators of lattice
//! wall coordinates `x̃_i = ⟨ν_i, x⟩`.

use super::bump::{Bump, BumpSpec};
use super::{Generator, GeneratorError, GeneratorKind, Jet};
use crate::exact::to_real;
use crate::linalg::Mat;
use crate::polytope::{FaceFrame, Polytope};
use crate::scalar::{dot, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct Wall {
    /// Primitive normal, the last row of the wall's unimodular frame.
    pub normal: Vec<i64>,
    pub bump: Bump,
}

impl Wall {
    fn coordinate<T: Real>(&self, x: &[T]) -> T {
        let nu: Vec<T> = self.normal.iter().map(|&v| T::lit(v as f64)).collect();
        dot(&nu, x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WallSum {
    dim: usize,
    walls: Vec<Wall>,
}

impl WallSum {
    pub fn walls(&self) -> &[Wall] {
        &self.walls
    }

    pub fn jet<T: Real>(&self, x: &[T]) -> Jet<T> {
        let n = self.dim;
        let mut out = Jet::zero(n);
        for w in &self.walls {
            let (v, d, h) = w.bump.eval(w.coordinate(x));
            out.value += v;
            for (g, &nu) in out.grad.iter_mut().zip(&w.normal) {
                *g += d * T::lit(nu as f64);
            }
            if h != T::zero() {
                let nu: Vec<T> = w.normal.iter().map(|&v| T::lit(v as f64)).collect();
                out.hess.add_assign_scaled(&Mat::outer(&nu, &nu), h);
            }
        }
        out
    }

    pub fn value<T: Real>(&self, x: &[T]) -> T {
        self.walls.iter().map(|w| w.bump.eval(w.coordinate(x)).0).fold(T::zero(), |a, b| a + b)
    }

    pub fn value_grad<T: Real>(&self, x: &[T]) -> (T, Vec<T>) {
        let j = self.jet(x);
        (j.value, j.grad)
    }

    pub fn support_cuts<T: Real>(&self) -> Vec<(Vec<T>, T)> {
        let mut cuts = Vec::new();
        for w in &self.walls {
            let nu: Vec<T> = w.normal.iter().map(|&v| T::lit(v as f64)).collect();
            for c in [w.bump.m - w.bump.alpha, w.bump.m, w.bump.m + w.bump.alpha] {
                cuts.push((nu.clone(), T::lit(c)));
            }
        }
        cuts
    }

    pub fn locally_affine<T: Real>(&self, x: &[T]) -> bool {
        self.walls.iter().all(|w| {
            let u = w.coordinate(x).to_f64_lossy();
            u <= w.bump.m - w.bump.alpha || u >= w.bump.m + w.bump.alpha
        })
    }
}

/// Wall-sum generator. Each frame must have codimension one; its bump is
/// centred at the frame offset.
pub fn build_wall_sum(p: &Polytope, walls: &[(FaceFrame, BumpSpec)]) -> Result<Generator, GeneratorError> {
    let n = p.dim();
    let mut out = Vec::with_capacity(walls.len());
    for (i, (frame, spec)) in walls.iter().enumerate() {
        if frame.dim() != n {
            return Err(GeneratorError::Dimension { expected: n, got: frame.dim() });
        }
        if frame.codim() != 1 {
            return Err(GeneratorError::WallCodim { index: i, codim: frame.codim() });
        }
        let offset: f64 = to_real(&frame.offsets[0]);
        if (spec.m - offset).abs() > 1e-12 * (1.0 + offset.abs()) {
            return Err(GeneratorError::WallCenter { index: i, center: spec.m, offset });
        }
        if !(spec.alpha.is_finite() && spec.alpha > 0.0) {
            return Err(GeneratorError::NonPositive { index: i, field: "alpha" });
        }
        if !(spec.mass.is_finite() && spec.mass > 0.0) {
            return Err(GeneratorError::NonPositive { index: i, field: "A" });
        }
        let normal = frame.normals[0].clone();
        let mut bump = Bump::from_spec(spec);
        bump.m = offset;
        out.push(Wall { normal, bump });
    }
    let kind = if out.is_empty() { GeneratorKind::Zero } else { GeneratorKind::WallSum(WallSum { dim: n, walls: out }) };
    Ok(Generator::from_kind(n, kind))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::KernelKind;
    use crate::linalg::numerical_rank;
    use crate::polytope::Facet;
    use crate::Rational;

    fn simplex() -> Polytope {
        let r = Rational::from;
        Polytope::new(2, vec![Facet::new(vec![1, 0], r(0)), Facet::new(vec![0, 1], r(0)), Facet::new(vec![-1, -1], r(-3))], false)
            .unwrap()
    }

    fn wall(normal: Vec<i64>, c: i128, alpha: f64) -> (FaceFrame, BumpSpec) {
        let f = FaceFrame::new(2, &[normal], &[Rational::from(c)]).unwrap();
        (f, BumpSpec::new(c as f64, alpha, 1.0, KernelKind::Smooth))
    }

    fn rank(g: &Generator, x: [f64; 2]) -> usize {
        numerical_rank(&g.jet(&x).hess.symmetric_eigenvalues(), 1e-8)
    }

    #[test]
    fn ranks_of_wall_sums() {
        let p = simplex();
        let one = build_wall_sum(&p, &[wall(vec![1, 0], 1, 0.2)]).unwrap();
        assert_eq!(rank(&one, [1.1, 0.5]), 1);
        assert_eq!(rank(&one, [1.3, 0.5]), 0);
        assert_eq!(one.jet(&[2.0, 0.5]).hess.max_abs(), 0.0);
        let two = build_wall_sum(&p, &[wall(vec![1, 0], 1, 0.2), wall(vec![0, 1], 1, 0.2)]).unwrap();
        assert_eq!(rank(&two, [1.05, 0.95]), 2);
        assert_eq!(rank(&two, [1.05, 0.5]), 1);
        assert!(two.locally_affine(&[0.5, 0.5]));
    }

    #[test]
    fn wall_must_be_centred() {
        let p = simplex();
        let (f, mut b) = wall(vec![1, 0], 1, 0.2);
        b.m = 1.5;
        assert!(matches!(build_wall_sum(&p, &[(f, b)]), Err(GeneratorError::WallCenter { .. })));
    }
}
