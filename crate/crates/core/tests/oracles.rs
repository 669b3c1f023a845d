//! Numerical results against closed forms computed independently here.

use mabuchi::generators::{build_bump_generator, BumpSpec, Generator};
use mabuchi::potentials::{guillemin_jet, kahler_potential, legendre_forward, RayPoint};
use mabuchi::quantization::{delta_m, Weight};
use mabuchi::{Facet, KernelKind, Polytope, Rational, SectionDensity};
use statrs::function::gamma::ln_gamma;

fn segment(n: i64) -> Polytope {
    Polytope::new(1, vec![Facet::new(vec![1], Rational::from(0)), Facet::new(vec![-1], Rational::from(-n as i128))], false).unwrap()
}

fn simplex(n: i64) -> Polytope {
    let r = Rational::from;
    Polytope::new(
        2,
        vec![Facet::new(vec![1, 0], r(0)), Facet::new(vec![0, 1], r(0)), Facet::new(vec![-1, -1], r(-n as i128))],
        false,
    )
    .unwrap()
}

fn log_norm(p: &Polytope, g: &Generator, m: &[f64], s: f64) -> f64 {
    let sd = SectionDensity::new(p, g, m, s, Weight::Weighted).unwrap();
    sd.log_l1_norm() - p.dim() as f64 * std::f64::consts::TAU.ln()
}

#[test]
fn segment_norms_are_beta_functions() {
    for n in 1..=4i64 {
        let p = segment(n);
        let g = Generator::zero(1);
        for m in 0..=n {
            let (a, b) = (m as f64 / 2.0 + 1.0, (n - m) as f64 / 2.0 + 1.0);
            let oracle = (n as f64 / 2.0 + 1.0) * (n as f64).ln() + ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
            let got = log_norm(&p, &g, &[m as f64], 0.0);
            assert!((got - oracle).abs() < 1e-9, "N={n} m={m}: {got} vs {oracle}");
        }
    }
}

#[test]
fn simplex_norms_are_dirichlet_integrals() {
    // Σ ℓ_r is constant on the simplex, so e^{−h⁰_m} = Π ℓ_r^{ℓ_r(m)/2}
    for n in 1..=3i64 {
        let p = simplex(n);
        let g = Generator::zero(2);
        for pt in p.integral_points() {
            let e = [pt[0] as f64 / 2.0, pt[1] as f64 / 2.0, (n - pt[0] - pt[1]) as f64 / 2.0];
            let total: f64 = e.iter().map(|a| a + 1.0).sum();
            let oracle = (total - 1.0) * (n as f64).ln() + e.iter().map(|a| ln_gamma(a + 1.0)).sum::<f64>() - ln_gamma(total);
            let got = log_norm(&p, &g, &[pt[0] as f64, pt[1] as f64], 0.0);
            assert!((got - oracle).abs() < 1e-8, "N={n} m={pt:?}: {got} vs {oracle}");
        }
    }
}

#[test]
fn bump_centre_norm_follows_laplace() {
    let p = segment(2);
    let (m, alpha, a) = (1.0, 0.5, 4.0);
    let g = build_bump_generator(&p, &[BumpSpec::new(m, alpha, a, KernelKind::Cosine)]).unwrap();
    // ∫ e^{−h⁰ − sΔ} ≈ √(2π / (s ψ''(m))) with ψ''(m) = A/α, relative error O(1/s)
    let mut last = f64::INFINITY;
    for s in [1e3, 1e4, 1e5] {
        let got = log_norm(&p, &g, &[m], s) - s * g.value(&[m]);
        let laplace = 0.5 * (std::f64::consts::TAU / (s * a / alpha)).ln();
        let err = (got - laplace).abs();
        assert!(err < 5.0 / s, "s={s}: {err}");
        assert!(err < last);
        last = err;
    }
}

#[test]
fn guillemin_hessian_matches_differences_of_gradient() {
    let p = simplex(3);
    let h = 1e-6;
    for x in [[0.5f64, 0.5], [1.0, 1.7], [2.5, 0.25]] {
        let j = guillemin_jet(&p, &x).unwrap();
        for k in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[k] += h;
            xm[k] -= h;
            let gp = guillemin_jet(&p, &xp).unwrap().grad;
            let gm = guillemin_jet(&p, &xm).unwrap().grad;
            for i in 0..2 {
                let fd = (gp[i] - gm[i]) / (2.0 * h);
                assert!((fd - j.hess[(i, k)]).abs() < 1e-6 * j.hess[(i, k)].abs().max(1.0));
            }
        }
    }
}

#[test]
fn kahler_potential_gradient_is_moment_coordinate() {
    let p = segment(2);
    let g = build_bump_generator(&p, &[BumpSpec::new(1.0, 0.5, 4.0, KernelKind::Smooth)]).unwrap();
    for s in [0.0, 3.0, 50.0] {
        for x in [0.3f64, 0.9, 1.2, 1.8] {
            let y = legendre_forward(&RayPoint { polytope: &p, generator: &g, s, x: &[x] }).unwrap()[0];
            let h = 1e-5;
            let (hp, _) = kahler_potential(&p, &g, s, &[y + h], &[x]).unwrap();
            let (hm, _) = kahler_potential(&p, &g, s, &[y - h], &[x]).unwrap();
            assert!(((hp - hm) / (2.0 * h) - x).abs() < 1e-7, "s={s} x={x}");
        }
    }
}

#[test]
fn gap_vanishes_exactly_on_the_component_of_m() {
    let p = segment(2);
    let g = build_bump_generator(&p, &[BumpSpec::new(1.0, 0.5, 4.0, KernelKind::Cosine)]).unwrap();
    for i in 0..=50 {
        let x = 0.5 * i as f64 / 50.0;
        assert_eq!(delta_m(&g, &[0.0], &[x]), 0.0);
        assert_eq!(delta_m(&g, &[2.0], &[2.0 - x]), 0.0);
    }
    assert!(delta_m(&g, &[0.0], &[0.75]) > 0.0);
}
