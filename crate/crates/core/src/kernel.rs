//! One-dimensional mollifier profiles on `[−1, 1]` and their antiderivatives.
//!
//! For a density `k` with unit mass the profile exposes
//! `K1(t) = ∫_{−1}^t k`, `M1(t) = ∫_{−1}^t τ k(τ) dτ` and the smoothed ramp
//! `Φ(t) = ∫_{−1}^t K1 = t K1(t) − M1(t)`, which equals `max(0, t)` for
//! `|t| ≥ 1` when `k` is even.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::quadrature::{integrate_1d, Tolerance};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelKind {
    /// `cos²(πt/2)`, closed form, only C¹ at the endpoints of its support.
    #[serde(alias = "cosine-squared", alias = "cos2")]
    Cosine,
    /// `exp(−1/(1−t²))`, C^∞.
    #[serde(alias = "exponential-smooth", alias = "exp")]
    Smooth,
}

/// A normalized even density on `[−1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Cosine,
    /// Marginal on a line of the radial kernel `exp(−1/(1−|y|²))` in `dim`
    /// dimensions; `dim = 1` is the plain smooth kernel.
    Smooth { dim: usize },
}

impl From<KernelKind> for Profile {
    fn from(k: KernelKind) -> Self {
        match k {
            KernelKind::Cosine => Profile::Cosine,
            KernelKind::Smooth => Profile::Smooth { dim: 1 },
        }
    }
}

const CELLS: usize = 2048;

struct Table {
    // per node: K1, k, k', M1
    k1: Vec<f64>,
    k: Vec<f64>,
    dk: Vec<f64>,
    m1: Vec<f64>,
    peak: f64,
}

fn theta(r2: f64) -> f64 {
    if r2 >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - r2)).exp()
    }
}

/// Unnormalized marginal density and its derivative.
fn raw_marginal(dim: usize, t: f64) -> (f64, f64) {
    let a2 = 1.0 - t * t;
    if a2 <= 0.0 {
        return (0.0, 0.0);
    }
    let tol = Tolerance::new(1e-13, 1e-300);
    match dim {
        1 => {
            let k = theta(t * t);
            (k, k * (-2.0 * t / (a2 * a2)))
        }
        2 => {
            let a = a2.sqrt();
            let r = integrate_1d(
                |s: f64| {
                    let d = a2 - s * s;
                    if d <= 0.0 {
                        return vec![0.0, 0.0];
                    }
                    let th = (-1.0 / d).exp();
                    vec![th, -2.0 * t * th / (d * d)]
                },
                &[-a, 0.0, a],
                2,
                &tol,
            );
            (r.value[0], r.value[1])
        }
        3 => {
            let at = t.abs();
            let r = integrate_1d(|r: f64| vec![theta(r * r) * r], &[at, 1.0], 1, &tol);
            let tau = std::f64::consts::TAU;
            (tau * r.value[0], -tau * t * theta(t * t))
        }
        _ => panic!("radial kernel marginals are tabulated for dimensions 1 to 3"),
    }
}

fn build_table(dim: usize) -> Table {
    let h = 2.0 / CELLS as f64;
    let nodes: Vec<f64> = (0..=CELLS).map(|i| -1.0 + i as f64 * h).collect();
    let tol = Tolerance { rel: 1e-14, abs: 1e-300, max_panels: 8 };
    let mut k1 = vec![0.0; CELLS + 1];
    let mut m1 = vec![0.0; CELLS + 1];
    for i in 0..CELLS {
        let r = integrate_1d(
            |t: f64| {
                let k = raw_marginal(dim, t).0;
                vec![k, t * k]
            },
            &[nodes[i], nodes[i + 1]],
            2,
            &tol,
        );
        k1[i + 1] = k1[i] + r.value[0];
        m1[i + 1] = m1[i] + r.value[1];
    }
    let z = k1[CELLS];
    let (mut k, mut dk): (Vec<f64>, Vec<f64>) = nodes.iter().map(|&t| raw_marginal(dim, t)).unzip();
    for v in k1.iter_mut().chain(m1.iter_mut()).chain(k.iter_mut()).chain(dk.iter_mut()) {
        *v /= z;
    }
    // exact symmetry: k1(t) + k1(−t) = 1, m1 even with m1(±1) = 0
    for i in 0..=CELLS / 2 {
        let j = CELLS - i;
        let a = 0.5 * (k1[i] + 1.0 - k1[j]);
        k1[i] = a;
        k1[j] = 1.0 - a;
        let b = 0.5 * (m1[i] + m1[j]);
        m1[i] = b;
        m1[j] = b;
    }
    k1[CELLS] = 1.0;
    m1[CELLS] = 0.0;
    let peak = k[CELLS / 2];
    Table { k1, k, dk, m1, peak }
}

fn table(dim: usize) -> &'static Table {
    static TABLES: [OnceLock<Table>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    assert!((1..=3).contains(&dim), "unsupported kernel dimension {dim}");
    TABLES[dim - 1].get_or_init(|| build_table(dim))
}

/// Quintic Hermite interpolation on a cell of width `h`; returns `(p, p', p'')`.
fn quintic(u: f64, h: f64, p0: f64, d0: f64, s0: f64, p1: f64, d1: f64, s1: f64) -> (f64, f64, f64) {
    let c0 = p0;
    let c1 = h * d0;
    let c2 = 0.5 * h * h * s0;
    let a = p1 - (c0 + c1 + c2);
    let b = h * d1 - (c1 + 2.0 * c2);
    let c = h * h * s1 - 2.0 * c2;
    let c3 = 10.0 * a - 4.0 * b + 0.5 * c;
    let c4 = -15.0 * a + 7.0 * b - c;
    let c5 = 6.0 * a - 3.0 * b + 0.5 * c;
    let p = c0 + u * (c1 + u * (c2 + u * (c3 + u * (c4 + u * c5))));
    let dp = c1 + u * (2.0 * c2 + u * (3.0 * c3 + u * (4.0 * c4 + u * 5.0 * c5)));
    let ddp = 2.0 * c2 + u * (6.0 * c3 + u * (12.0 * c4 + u * 20.0 * c5));
    (p, dp / h, ddp / (h * h))
}

/// `(K1, k, k', M1)` at `t ∈ (−1, 1)` from the table.
fn lookup(tab: &Table, t: f64) -> (f64, f64, f64, f64) {
    let h = 2.0 / CELLS as f64;
    let x = (t + 1.0) / h;
    let i = (x.floor() as usize).min(CELLS - 1);
    let u = x - i as f64;
    let (ta, tb) = (-1.0 + i as f64 * h, -1.0 + (i + 1) as f64 * h);
    let (k1, k, dk) = quintic(u, h, tab.k1[i], tab.k[i], tab.dk[i], tab.k1[i + 1], tab.k[i + 1], tab.dk[i + 1]);
    let (m1, _, _) = quintic(
        u,
        h,
        tab.m1[i],
        ta * tab.k[i],
        tab.k[i] + ta * tab.dk[i],
        tab.m1[i + 1],
        tb * tab.k[i + 1],
        tab.k[i + 1] + tb * tab.dk[i + 1],
    );
    (k1, k, dk, m1)
}

/// Values of a profile and its integrals at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileJet<T> {
    pub density: T,
    pub density_deriv: T,
    pub cdf: T,
    pub moment: T,
    pub ramp: T,
}

impl Profile {
    pub fn eval<T: Real>(&self, t: T) -> ProfileJet<T> {
        if t <= -T::one() {
            return ProfileJet { density: T::zero(), density_deriv: T::zero(), cdf: T::zero(), moment: T::zero(), ramp: T::zero() };
        }
        if t >= T::one() {
            return ProfileJet { density: T::zero(), density_deriv: T::zero(), cdf: T::one(), moment: T::zero(), ramp: t };
        }
        match self {
            Profile::Cosine => {
                let pi = T::PI();
                let (s, c) = (pi * t).sin_cos();
                let two_pi = T::two() * pi;
                let density = (T::one() + c) * T::half();
                let density_deriv = -pi * s * T::half();
                let cdf = (t + T::one()) * T::half() + s / two_pi;
                let moment = (t * t - T::one()) / T::lit(4.0) + t * s / two_pi + (c + T::one()) / (two_pi * pi);
                let ramp = (t + T::one()) * (t + T::one()) / T::lit(4.0) - (T::one() + c) / (two_pi * pi);
                ProfileJet { density, density_deriv, cdf, moment, ramp }
            }
            Profile::Smooth { dim } => {
                let tab = table(*dim);
                let tf = t.to_f64_lossy();
                let (k1, k, dk, m1) = lookup(tab, tf);
                let cdf = T::lit(k1);
                let moment = T::lit(m1);
                ProfileJet {
                    density: T::lit(k.max(0.0)),
                    density_deriv: T::lit(dk),
                    cdf,
                    moment,
                    ramp: (t * cdf - moment).max(T::zero()),
                }
            }
        }
    }

    pub fn density<T: Real>(&self, t: T) -> T {
        self.eval(t).density
    }

    pub fn peak(&self) -> f64 {
        match self {
            Profile::Cosine => 1.0,
            Profile::Smooth { dim } => table(*dim).peak,
        }
    }
}

/// Unnormalized radial mollifier `exp(−1/(1−r²))` and its mass in `dim`
/// dimensions (for the unit ball).
pub fn radial_kernel(r2: f64) -> f64 {
    theta(r2)
}

pub fn radial_mass(dim: usize) -> f64 {
    static MASS: [OnceLock<f64>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    *MASS[dim - 1].get_or_init(|| {
        let tol = Tolerance::new(1e-15, 0.0);
        // surface area of the unit sphere in R^dim times ∫ θ(r) r^{dim−1} dr
        let area = match dim {
            1 => 2.0,
            2 => std::f64::consts::TAU,
            _ => 4.0 * std::f64::consts::PI,
        };
        let r = integrate_1d(|r: f64| vec![theta(r * r) * r.powi(dim as i32 - 1)], &[0.0, 1.0], 1, &tol);
        area * r.value[0]
    })
}
