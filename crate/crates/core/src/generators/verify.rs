//! Sampled checks of the five conditions defining a nice family of
//! smoothings `ψ_ε` of a piecewise-linear convex `f`.

use super::Generator;
use crate::linalg::{numerical_rank, Mat};
use crate::testconfig::Decomposition;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Convexity: smallest Hessian eigenvalue ≥ `−convexity · max(1, |H|)`.
    pub convexity: f64,
    /// Relative tolerance of finite-difference derivative checks.
    pub fd_rel: f64,
    pub fd_step: f64,
    /// `|ψ_ε − f| ≤ outside · (1 + |f|)` off `W_ε`.
    pub outside: f64,
    /// Eigenvalues above `rank_rel · max(largest, 1)` count towards the rank.
    pub rank_rel: f64,
    /// Pull of face samples from the face centroid towards its vertices.
    pub face_fraction: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { convexity: 1e-10, fd_rel: 1e-6, fd_step: 1e-5, outside: 1e-12, rank_rel: 1e-8, face_fraction: 0.4 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionResult {
    pub label: char,
    pub passed: bool,
    /// Worst observed value of the condition's violation measure.
    pub worst: f64,
    pub checked: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NiceReport {
    pub conditions: Vec<ConditionResult>,
}

impl NiceReport {
    pub fn passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn condition(&self, label: char) -> &ConditionResult {
        self.conditions.iter().find(|c| c.label == label).expect("conditions a to e")
    }
}

struct Tracker {
    label: char,
    passed: bool,
    worst: f64,
    checked: usize,
    detail: String,
}

impl Tracker {
    fn new(label: char) -> Self {
        Self { label, passed: true, worst: 0.0, checked: 0, detail: String::new() }
    }

    /// Records a measurement `value` that must not exceed `limit`.
    fn record(&mut self, value: f64, limit: f64, what: impl FnOnce() -> String) {
        self.checked += 1;
        let bad = !(value <= limit);
        if value > self.worst || value.is_nan() {
            self.worst = value;
        }
        if bad && self.passed {
            self.passed = false;
            self.detail = what();
        }
    }

    fn finish(self) -> ConditionResult {
        let detail = if self.passed { format!("{} checks", self.checked) } else { self.detail };
        ConditionResult { label: self.label, passed: self.passed, worst: self.worst, checked: self.checked, detail }
    }
}

fn transverse_block(h: &Mat<f64>, inverse: &[Vec<i64>], codim: usize) -> Mat<f64> {
    let n = h.rows();
    let vinv = Mat::from_fn(n, n, |i, j| inverse[i][j] as f64);
    let hu = h.congruence(&vinv);
    let idx: Vec<usize> = (n - codim..n).collect();
    hu.submatrix(&idx, &idx)
}

/// Checks conditions a)–e) on `family` (pairs `(ε, ψ_ε)`) at `samples` and
/// at interior points of every face of the decomposition.
pub fn verify_nice_family(
    decomp: &Decomposition,
    family: &[(f64, Generator)],
    samples: &[Vec<f64>],
    opts: &VerifyOptions,
) -> NiceReport {
    let mut fam: Vec<&(f64, Generator)> = family.iter().collect();
    fam.sort_by(|a, b| a.0.total_cmp(&b.0));
    let f = &decomp.pl;
    let lip = f.jump_bound::<f64>();
    let n = decomp.polytope.dim();
    let mut a = Tracker::new('a');
    let mut b = Tracker::new('b');
    let mut c = Tracker::new('c');
    let mut d = Tracker::new('d');
    let mut e = Tracker::new('e');
    let face_samples: Vec<(usize, Vec<f64>)> = decomp
        .faces
        .iter()
        .enumerate()
        .flat_map(|(i, face)| face.interior_samples::<f64>(opts.face_fraction).into_iter().map(move |x| (i, x)))
        .collect();
    let all: Vec<&Vec<f64>> = samples.iter().chain(face_samples.iter().map(|(_, x)| x)).collect();

    for &(eps, gen) in &fam {
        let eps = *eps;
        for &x in &all {
            let j = gen.jet(x.as_slice());
            let fx = f.eval(x.as_slice());
            // a) convexity and derivative consistency
            let scale = j.hess.max_abs().max(1.0);
            let min_eig = j.hess.symmetric_eigenvalues()[0];
            a.record(-min_eig / scale, opts.convexity, || format!("ε={eps}: Hessian eigenvalue {min_eig:.3e} at {x:?}"));
            let h = opts.fd_step;
            for l in 0..n {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[l] += h;
                xm[l] -= h;
                let (vp, gp) = gen.value_grad(&xp);
                let (vm, gm) = gen.value_grad(&xm);
                let fd = (vp - vm) / (2.0 * h);
                let err = (fd - j.grad[l]).abs() / j.grad[l].abs().max(1.0);
                a.record(err, opts.fd_rel, || format!("ε={eps}: ∂{l}ψ differs from finite difference by {err:.3e} at {x:?}"));
                for k in 0..n {
                    let fd2 = (gp[k] - gm[k]) / (2.0 * h);
                    let err = (fd2 - j.hess[(k, l)]).abs() / scale;
                    a.record(err, opts.fd_rel, || {
                        format!("ε={eps}: Hessian entry ({k},{l}) differs from finite difference by {err:.3e} at {x:?}")
                    });
                }
            }
            // b) finiteness and the sandwich f ≤ ψ_ε ≤ f + ε·Lip
            let finite = j.value.is_finite() && j.grad.iter().all(|g| g.is_finite()) && j.hess.is_finite();
            b.record(if finite { 0.0 } else { f64::INFINITY }, 0.0, || format!("ε={eps}: non-finite jet at {x:?}"));
            let gap = j.value - fx;
            let tol = 1e-12 * (1.0 + fx.abs());
            b.record(-gap, tol, || format!("ε={eps}: ψ_ε − f = {gap:.3e} < 0 at {x:?}"));
            b.record(gap - eps * lip, tol, || format!("ε={eps}: ψ_ε − f = {gap:.3e} exceeds ε·Lip at {x:?}"));
            // c) equality off W_ε
            if decomp.thickening_membership(eps, x.as_slice()).is_none() && decomp.polytope.contains(x.as_slice(), 1e-12) {
                let err = gap.abs() / (1.0 + fx.abs());
                c.record(err, opts.outside, || format!("ε={eps}: |ψ_ε − f| = {:.3e} off W_ε at {x:?}", gap.abs()));
            }
        }
        // d) rank ≥ j and positive transverse block on faces
        for (fi, x) in &face_samples {
            let face = &decomp.faces[*fi];
            let Some(frame) = &face.frame else {
                d.record(f64::INFINITY, 0.0, || format!("face {fi} has no lattice frame"));
                continue;
            };
            let hmat = gen.jet(x.as_slice()).hess;
            let eig = hmat.symmetric_eigenvalues();
            let rank = numerical_rank(&eig, opts.rank_rel);
            let deficit = face.codim.saturating_sub(rank) as f64;
            d.record(deficit, 0.0, || format!("ε={eps}: rank {rank} < {} at {x:?}", face.codim));
            let block = transverse_block(&hmat, &frame.inverse, face.codim);
            let beig = block.symmetric_eigenvalues();
            let thresh = opts.rank_rel * eig.last().copied().unwrap_or(0.0).max(1.0);
            let short = thresh - beig[0];
            d.record(short, 0.0, || format!("ε={eps}: transverse block eigenvalue {:.3e} at {x:?}", beig[0]));
        }
    }
    // e) exact rank at the smallest ε
    if let Some(&(eps, gen)) = fam.first() {
        for (fi, x) in &face_samples {
            let face = &decomp.faces[*fi];
            let eig = gen.jet(x.as_slice()).hess.symmetric_eigenvalues();
            let rank = numerical_rank(&eig, opts.rank_rel);
            let off = (rank as f64 - face.codim as f64).abs();
            e.record(off, 0.0, || format!("ε={eps}: rank {rank} ≠ {} at {x:?}", face.codim));
        }
    }
    // b) divided differences in ε stay bounded by the Lipschitz constant
    for w in fam.windows(2) {
        let (e0, g0) = (w[0].0, &w[0].1);
        let (e1, g1) = (w[1].0, &w[1].1);
        for &x in &all {
            let dd = (g1.value(x.as_slice()) - g0.value(x.as_slice())) / (e1 - e0);
            b.record(dd.abs() - lip, 1e-9 * (1.0 + lip), || {
                format!("divided difference {dd:.3e} between ε={e0} and ε={e1} exceeds {lip:.3e} at {x:?}")
            });
        }
    }
    if fam.len() < 2 {
        b.record(f64::INFINITY, 0.0, || "smoothness in ε needs at least two members".into());
    }
    NiceReport { conditions: vec![a.finish(), b.finish(), c.finish(), d.finish(), e.finish()] }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::pl::{AffinePiece, PLConvex};
    use crate::generators::{build_nice_smoothing, build_strict_smoothing};
    use crate::kernel::KernelKind;
    use crate::polytope::{Facet, Polytope};
    use crate::testconfig::decompose;
    use crate::Rational;

    fn grid(p: &Polytope, k: usize) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        for i in 0..=k {
            for j in 0..=k {
                let x = vec![3.0 * i as f64 / k as f64, 3.0 * j as f64 / k as f64];
                if p.contains(&x, 0.0) {
                    out.push(x);
                }
            }
        }
        out
    }

    #[test]
    fn wall_family_passes_and_strict_control_fails() {
        let r = Rational::from;
        let p = Polytope::new(2, vec![Facet::new(vec![1, 0], r(0)), Facet::new(vec![0, 1], r(0)), Facet::new(vec![-1, -1], r(-3))], false)
            .unwrap();
        let f = PLConvex::new(2, vec![AffinePiece::new(vec![r(0), r(0)], r(0)), AffinePiece::new(vec![r(1), r(0)], r(-1))]).unwrap();
        let d = decompose(&f, &p).unwrap();
        let samples = grid(&p, 30);
        let fam: Vec<(f64, Generator)> =
            [0.05, 0.1, 0.2].iter().map(|&e| (e, build_nice_smoothing(&f, &p, &d, e, KernelKind::Smooth).unwrap())).collect();
        let rep = verify_nice_family(&d, &fam, &samples, &VerifyOptions::default());
        assert!(rep.passed(), "{rep:#?}");
        let ctl: Vec<(f64, Generator)> = [0.05, 0.1, 0.2]
            .iter()
            .map(|&e| (e, build_strict_smoothing(&f, &p, &d, e, KernelKind::Smooth, 0.1 * e).unwrap()))
            .collect();
        let rep = verify_nice_family(&d, &ctl, &samples, &VerifyOptions::default());
        assert!(!rep.condition('e').passed);
        assert!(!rep.condition('c').passed);
        assert!(rep.condition('a').passed);
    }
}
