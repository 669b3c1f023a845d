//! Adaptive quadrature over convex polytopes.
//!
//! The region is split by user cut hyperplanes into convex cells; each cell
//! is integrated as an iterated integral, one coordinate at a time, with
//! adaptive 15-point Gauss–Kronrod panels. Breakpoints at the projected cell
//! vertices keep every one-dimensional integrand smooth on each panel.
//! Integrands are vector valued so a family of moments shares evaluations.

use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
// 7-point Gauss weights on XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
pub struct Tolerance<T> {
    pub rel: T,
    pub abs: T,
    /// Maximum number of panels per one-dimensional integral.
    pub max_panels: usize,
}

impl<T: Real> Tolerance<T> {
    pub fn new(rel: T, abs: T) -> Self {
        Self { rel, abs, max_panels: 400 }
    }
}

impl<T: Real> Default for Tolerance<T> {
    fn default() -> Self {
        let rel = (T::epsilon() * T::lit(100.0)).max(T::lit(1e-10));
        Self::new(rel, T::lit(1e-300).max(T::min_positive_value()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Integral<T> {
    pub value: Vec<T>,
    pub error: T,
    pub evaluations: usize,
    pub converged: bool,
}

/// Gauss–Kronrod 15 on `[a, b]`; returns the Kronrod estimate and the
/// infinity-norm of the Kronrod–Gauss difference.
fn gk15<T: Real, F: FnMut(T) -> Vec<T>>(f: &mut F, a: T, b: T, k: usize) -> (Vec<T>, T) {
    let c = (a + b) * T::half();
    let h = (b - a) * T::half();
    let mut kr = vec![T::zero(); k];
    let mut ga = vec![T::zero(); k];
    for i in 0..8 {
        let x = T::lit(XGK[i]);
        let wk = T::lit(WGK[i]);
        let gi = if i % 2 == 1 { Some(T::lit(WG[i / 2])) } else { None };
        let pts: &[T] = if i == 7 { &[T::zero()] } else { &[-T::one(), T::one()] };
        for &sgn in pts {
            let v = f(c + sgn * h * x);
            for j in 0..k {
                kr[j] += wk * v[j];
                if let Some(w) = gi {
                    ga[j] += w * v[j];
                }
            }
        }
    }
    let mut err = T::zero();
    for j in 0..k {
        kr[j] *= h;
        ga[j] *= h;
        err = err.max((kr[j] - ga[j]).abs());
    }
    (kr, err)
}

/// Globally adaptive integration of a vector-valued function on `[a, b]`
/// with forced breakpoints.
pub fn integrate_1d<T: Real, F: FnMut(T) -> Vec<T>>(
    mut f: F,
    breaks: &[T],
    k: usize,
    tol: &Tolerance<T>,
) -> Integral<T> {
    let mut pts: Vec<T> = breaks.iter().copied().filter(|x| x.is_finite()).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (*a - *b).abs() <= T::epsilon() * T::lit(8.0) * (T::one() + a.abs()));
    let mut panels: Vec<(T, T, Vec<T>, T)> = Vec::new();
    let mut evals = 0;
    for w in pts.windows(2) {
        if w[1] > w[0] {
            let (v, e) = gk15(&mut f, w[0], w[1], k);
            evals += 15;
            panels.push((w[0], w[1], v, e));
        }
    }
    let total = |p: &[(T, T, Vec<T>, T)]| {
        let mut s = vec![T::zero(); k];
        for (_, _, v, _) in p {
            for j in 0..k {
                s[j] += v[j];
            }
        }
        s
    };
    let mut converged = true;
    loop {
        let err: T = panels.iter().map(|p| p.3).fold(T::zero(), |a, b| a + b);
        let s = total(&panels);
        let scale = s.iter().fold(T::zero(), |m, x| m.max(x.abs()));
        if err <= (tol.rel * scale).max(tol.abs) || panels.is_empty() {
            return Integral { value: s, error: err, evaluations: evals, converged };
        }
        if panels.len() >= tol.max_panels {
            converged = false;
            return Integral { value: s, error: err, evaluations: evals, converged };
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .fold((0, -T::one()), |best, (i, p)| if p.3 > best.1 { (i, p.3) } else { best });
        let (a, b, _, _) = panels.swap_remove(idx);
        let m = (a + b) * T::half();
        if !(m > a && m < b) {
            converged = false;
            let s = total(&panels);
            return Integral { value: s, error: err, evaluations: evals, converged };
        }
        let (v1, e1) = gk15(&mut f, a, m, k);
        let (v2, e2) = gk15(&mut f, m, b, k);
        evals += 30;
        panels.push((a, m, v1, e1));
        panels.push((m, b, v2, e2));
    }
}

/// Convex region `{x : a_i · x ≥ b_i}` in floating point.
#[derive(Debug, Clone, PartialEq)]
pub struct Region<T> {
    pub dim: usize,
    pub halfspaces: Vec<(Vec<T>, T)>,
}

impl<T: Real> Region<T> {
    pub fn new(dim: usize, halfspaces: Vec<(Vec<T>, T)>) -> Self {
        Self { dim, halfspaces }
    }

    /// Axis box `[lo, hi]`.
    pub fn boxed(lo: &[T], hi: &[T]) -> Self {
        let n = lo.len();
        let mut hs = Vec::with_capacity(2 * n);
        for k in 0..n {
            let mut e = vec![T::zero(); n];
            e[k] = T::one();
            hs.push((e.clone(), lo[k]));
            hs.push((e.iter().map(|&x| -x).collect(), -hi[k]));
        }
        Self::new(n, hs)
    }

    pub fn with(&self, a: Vec<T>, b: T) -> Self {
        let mut r = self.clone();
        r.halfspaces.push((a, b));
        r
    }

    fn scale(&self) -> T {
        self.halfspaces.iter().fold(T::one(), |m, (a, b)| {
            m.max(b.abs()).max(a.iter().fold(T::zero(), |s, x| s.max(x.abs())))
        })
    }

    pub fn contains(&self, x: &[T], tol: T) -> bool {
        self.halfspaces.iter().all(|(a, b)| crate::scalar::dot(a, x) - *b >= -tol)
    }

    /// Vertices by brute-force intersection of `dim`-subsets.
    pub fn vertices(&self) -> Vec<Vec<T>> {
        let n = self.dim;
        let tol = T::epsilon().sqrt() * T::lit(1e-3) * self.scale();
        let mut out: Vec<Vec<T>> = Vec::new();
        for s in crate::polytope::k_subsets(self.halfspaces.len(), n) {
            let m = crate::linalg::Mat::from_rows(&s.iter().map(|&i| self.halfspaces[i].0.clone()).collect::<Vec<_>>());
            let rhs: Vec<T> = s.iter().map(|&i| self.halfspaces[i].1).collect();
            let Some(x) = m.solve(&rhs) else { continue };
            if m.det().abs() < T::epsilon() * T::lit(100.0) {
                continue;
            }
            if self.contains(&x, tol) && !out.iter().any(|v| crate::scalar::norm_inf(&sub(v, &x)) <= tol) {
                out.push(x);
            }
        }
        out
    }

    /// Interval of the one-dimensional region.
    fn interval(&self) -> Option<(T, T)> {
        let mut lo = T::neg_infinity();
        let mut hi = T::infinity();
        for (a, b) in &self.halfspaces {
            let c = a[0];
            if c > T::zero() {
                lo = lo.max(*b / c);
            } else if c < T::zero() {
                hi = hi.min(*b / c);
            } else if *b > T::zero() {
                return None;
            }
        }
        (lo < hi && lo.is_finite() && hi.is_finite()).then_some((lo, hi))
    }

    /// Region in the remaining coordinates after fixing `x_0 = t`.
    fn slice(&self, t: T) -> Self {
        Self::new(
            self.dim - 1,
            self.halfspaces.iter().map(|(a, b)| (a[1..].to_vec(), *b - a[0] * t)).collect(),
        )
    }

    /// Whether the region has nonempty interior.
    pub fn is_full_dimensional(&self) -> bool {
        if self.dim == 1 {
            return self.interval().is_some();
        }
        let v = self.vertices();
        if v.len() < self.dim + 1 {
            return false;
        }
        let diffs: Vec<Vec<T>> = v[1..].iter().map(|p| sub(p, &v[0])).collect();
        // Gram matrix rank
        let g = crate::linalg::Mat::from_fn(self.dim, self.dim, |i, j| {
            diffs.iter().fold(T::zero(), |acc, d| acc + d[i] * d[j])
        });
        let ev = g.symmetric_eigenvalues();
        let top = ev.iter().fold(T::zero(), |m, &x| m.max(x));
        ev.iter().all(|&x| x > top * T::epsilon().sqrt() * T::lit(1e-2))
    }
}

fn sub<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

/// Splits `region` into the cells of the arrangement of `cuts`
/// (hyperplanes `a · x = b`), keeping full-dimensional cells only.
pub fn cells<T: Real>(region: &Region<T>, cuts: &[(Vec<T>, T)]) -> Vec<Region<T>> {
    let mut out = vec![region.clone()];
    for (a, b) in cuts {
        let mut next = Vec::new();
        for c in out {
            let up = c.with(a.clone(), *b);
            let down = c.with(a.iter().map(|&x| -x).collect(), -*b);
            let up_ok = up.is_full_dimensional();
            let down_ok = down.is_full_dimensional();
            match (up_ok, down_ok) {
                (true, true) => {
                    next.push(up);
                    next.push(down);
                }
                (true, false) | (false, true) => next.push(c),
                (false, false) => {}
            }
        }
        out = next;
    }
    out
}

fn integrate_cell<T: Real, F: Fn(&[T]) -> Vec<T> + ?Sized>(
    cell: &Region<T>,
    prefix: &mut Vec<T>,
    f: &F,
    k: usize,
    tol: &Tolerance<T>,
) -> Integral<T> {
    if cell.dim == 1 {
        let Some((lo, hi)) = cell.interval() else {
            return Integral { value: vec![T::zero(); k], error: T::zero(), evaluations: 0, converged: true };
        };
        return integrate_1d(
            |t| {
                prefix.push(t);
                let v = f(prefix);
                prefix.pop();
                v
            },
            &[lo, hi],
            k,
            tol,
        );
    }
    let verts = cell.vertices();
    if verts.is_empty() {
        return Integral { value: vec![T::zero(); k], error: T::zero(), evaluations: 0, converged: true };
    }
    let breaks: Vec<T> = verts.iter().map(|v| v[0]).collect();
    let mut converged = true;
    let mut evals = 0;
    let res = integrate_1d(
        |t| {
            prefix.push(t);
            let r = integrate_cell(&cell.slice(t), prefix, f, k, tol);
            prefix.pop();
            converged &= r.converged;
            evals += r.evaluations;
            r.value
        },
        &breaks,
        k,
        tol,
    );
    Integral { value: res.value, error: res.error, evaluations: evals, converged: converged && res.converged }
}

/// `∫_region f` for a vector-valued integrand with `k` components.
pub fn integrate<T: Real, F: Fn(&[T]) -> Vec<T>>(
    region: &Region<T>,
    cuts: &[(Vec<T>, T)],
    f: F,
    k: usize,
    tol: &Tolerance<T>,
) -> Integral<T> {
    let mut value = vec![T::zero(); k];
    let mut error = T::zero();
    let mut evaluations = 0;
    let mut converged = true;
    for cell in cells(region, cuts) {
        let mut prefix = Vec::with_capacity(region.dim);
        let r = integrate_cell(&cell, &mut prefix, &f, k, tol);
        for j in 0..k {
            value[j] += r.value[j];
        }
        error += r.error;
        evaluations += r.evaluations;
        converged &= r.converged;
    }
    Integral { value, error, evaluations, converged }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_is_exact_on_polynomials() {
        let tol = Tolerance::new(1e-14, 0.0);
        let r = integrate_1d(|x: f64| vec![x.powi(20), 1.0], &[0.0, 1.0], 2, &tol);
        assert!((r.value[0] - 1.0 / 21.0).abs() < 1e-15);
        assert!((r.value[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn adapts_to_peaks() {
        let tol = Tolerance::new(1e-12, 0.0);
        let s = 1e5;
        let r = integrate_1d(|x: f64| vec![(-s * (x - 0.3) * (x - 0.3)).exp()], &[0.0, 0.3, 1.0], 1, &tol);
        let exact = (std::f64::consts::PI / s).sqrt();
        assert!(((r.value[0] - exact) / exact).abs() < 1e-11);
    }

    #[test]
    fn triangle_moments() {
        // simplex x,y >= 0, x + y <= 3
        let reg = Region::<f64>::new(
            2,
            vec![(vec![1.0, 0.0], 0.0), (vec![0.0, 1.0], 0.0), (vec![-1.0, -1.0], -3.0)],
        );
        let tol = Tolerance::new(1e-13, 0.0);
        let r = integrate(&reg, &[(vec![1.0, 0.0], 1.0)], |x| vec![1.0, x[0], x[0] * x[1]], 3, &tol);
        assert!((r.value[0] - 4.5).abs() < 1e-12);
        assert!((r.value[1] - 4.5).abs() < 1e-12);
        // ∫∫ xy over the simplex = N^4/24
        assert!((r.value[2] - 81.0 / 24.0).abs() < 1e-12);
    }

    #[test]
    fn cube_volume_3d() {
        let reg = Region::<f64>::boxed(&[0.0, 0.0, 0.0], &[1.0, 2.0, 3.0]);
        let r = integrate(&reg, &[], |x| vec![1.0, x[2]], 2, &Tolerance::new(1e-12, 0.0));
        assert!((r.value[0] - 6.0).abs() < 1e-12);
        assert!((r.value[1] - 9.0).abs() < 1e-12);
    }
}
