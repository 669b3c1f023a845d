//! Worked examples for potentials, limits and test configurations.

use mabuchi::generators::{build_bump_generator, build_nice_smoothing, AffinePiece, BumpSpec, Generator, PLConvex};
use mabuchi::limits::{component_means, face_delta_diagnostic, separable_battery, TestBattery};
use mabuchi::potentials::{det_identity_check, holo_log_coordinate, legendre_forward, legendre_inverse, ray_jet, RayPoint};
use mabuchi::quadrature::integrate_1d;
use mabuchi::quantization::Weight;
use mabuchi::testconfig::{build_q, decompose};
use mabuchi::{Facet, KernelKind, Polytope, Rational, Region, SectionDensity, Tolerance};

fn r(p: i128, q: i128) -> Rational {
    Rational::new(p, q)
}

fn segment(n: i128) -> Polytope {
    Polytope::new(1, vec![Facet::new(vec![1], r(0, 1)), Facet::new(vec![-1], r(-n, 1))], false).unwrap()
}

fn simplex3() -> Polytope {
    Polytope::new(2, vec![Facet::new(vec![1, 0], r(0, 1)), Facet::new(vec![0, 1], r(0, 1)), Facet::new(vec![-1, -1], r(-3, 1))], false)
        .unwrap()
}

fn wall() -> PLConvex {
    PLConvex::new(2, vec![AffinePiece::new(vec![r(0, 1), r(0, 1)], r(0, 1)), AffinePiece::new(vec![r(1, 1), r(0, 1)], r(-1, 1))]).unwrap()
}

fn bump(kernel: KernelKind) -> (Polytope, Generator) {
    let p = segment(2);
    let g = build_bump_generator(&p, &[BumpSpec::new(1.0, 0.5, 4.0, kernel)]).unwrap();
    (p, g)
}

#[test]
fn abreu_delta_on_segment() {
    let (p, g) = bump(KernelKind::Smooth);
    let near: Vec<Vec<f64>> = [1e-3, 1e-2, 0.3, 1.0, 1.7, 1.99, 1.999].iter().map(|&x| vec![x]).collect();
    let flat = det_identity_check(&p, &Generator::zero(1), 0.0, &near);
    assert!(flat.bounded(1.0 - 1e-12, 1.0 + 1e-12), "{flat:?}");
    let ray = det_identity_check(&p, &g, 100.0, &near);
    assert!(ray.positive && ray.max_delta <= 1.0 + 1e-12 && ray.min_delta > 1e-4);
}

#[test]
fn legendre_transform_basics() {
    let (p, g) = bump(KernelKind::Cosine);
    let y = legendre_forward(&RayPoint { polytope: &p, generator: &Generator::zero(1), s: 0.0, x: &[1.0] }).unwrap();
    assert_eq!(y, vec![0.0]);
    assert!((legendre_inverse(&p, &Generator::zero(1), 0.0f64, &[0.0], &[0.3]).unwrap()[0] - 1.0).abs() < 1e-12);
    let ys: Vec<f64> = (1..400)
        .map(|i| legendre_forward(&RayPoint { polytope: &p, generator: &g, s: 7.0, x: &[i as f64 / 200.0] }).unwrap()[0])
        .collect();
    assert!(ys.windows(2).all(|w| w[1] > w[0]));
    assert!(ys[0] < -2.0);
}

#[test]
fn holomorphic_coordinates_shift_by_constants_off_the_support() {
    let (p, g) = bump(KernelKind::Smooth);
    let s = 25.0;
    let shift = |x: f64| {
        let w0 = holo_log_coordinate(&RayPoint { polytope: &p, generator: &g, s: 0.0, x: &[x] }, &[0.3]).unwrap();
        let ws = holo_log_coordinate(&RayPoint { polytope: &p, generator: &g, s, x: &[x] }, &[0.3]).unwrap();
        assert_eq!(w0[0].im, ws[0].im);
        ws[0].re - w0[0].re
    };
    assert_eq!(shift(0.1), 0.0);
    assert_eq!(shift(0.4), 0.0);
    assert!((shift(1.6) - s * 4.0).abs() < 1e-12);
    assert!((shift(1.95) - s * 4.0).abs() < 1e-12);
    let c = holo_log_coordinate(&RayPoint { polytope: &p, generator: &g, s: 0.0, x: &[1.0] }, &[0.0]).unwrap();
    assert_eq!(c[0].norm(), 0.0);
}

#[test]
fn metric_is_static_off_the_support_up_to_the_boundary() {
    let p = simplex3();
    let f = wall();
    let d = decompose(&f, &p).unwrap();
    let g = build_nice_smoothing(&f, &p, &d, 0.1, KernelKind::Smooth).unwrap();
    for x in [[1e-3, 1.0], [0.5, 1e-3], [2.0, 1.0 - 1e-3], [1.5, 1e-3]] {
        let g0 = ray_jet(&RayPoint { polytope: &p, generator: &g, s: 0.0, x: &x }).unwrap();
        for s in [1.0, 1e3, 1e6] {
            let gs = ray_jet(&RayPoint { polytope: &p, generator: &g, s, x: &x }).unwrap();
            assert_eq!(gs.hess, g0.hess);
        }
    }
}

#[test]
fn normalized_densities_have_unit_mass() {
    let (p, g) = bump(KernelKind::Cosine);
    for (m, s) in [(0.0, 10.0), (1.0, 500.0), (2.0, 3000.0)] {
        for w in [Weight::Weighted, Weight::Bare] {
            let sd = SectionDensity::new(&p, &g, &[m], s, w).unwrap();
            let one = sd.pair(|_| vec![1.0], 1).unwrap()[0];
            assert!((one - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn uniform_limit_targets() {
    let p = segment(2);
    let b = TestBattery::standard(&[1.0], 2.0);
    let comp = Region::boxed(&[0.0], &[0.5]);
    let bare = component_means(&p, &[0.0], Weight::Bare, &comp, &b);
    assert!((bare[0] - 1.0).abs() < 1e-12);
    assert!((bare[1] - 0.25).abs() < 1e-12);
    // e^{−h⁰_0} = 2 − x on [0, 1/2]
    let weighted = component_means(&p, &[0.0], Weight::Weighted, &comp, &b);
    let mean_x = (0.5f64.powi(2) - 0.5f64.powi(3) / 3.0) / (1.0 - 0.125);
    assert!((weighted[1] - mean_x).abs() < 1e-10);
}

#[test]
fn wall_point_targets_are_chord_means() {
    let p = simplex3();
    let f = wall();
    let d = decompose(&f, &p).unwrap();
    let g = build_nice_smoothing(&f, &p, &d, 0.1, KernelKind::Smooth).unwrap();
    let face = d.faces.iter().find(|f| f.codim == 1).unwrap();
    let frame = face.frame.as_ref().unwrap();
    let tests = separable_battery(frame, 3.0);
    let (table, _) = face_delta_diagnostic(&p, &g, &[1.0, 1.0], Weight::Bare, frame, &[4096.0], &tests).unwrap();
    let tol = Tolerance::new(1e-13, 1e-15);
    for (t, target) in tests.iter().zip(&table.targets) {
        let mean = integrate_1d(|u: f64| vec![t.eval(frame, &[1.0, u])], &[0.0, 2.0], 1, &tol).value[0] / 2.0;
        assert!((mean - target).abs() < 1e-10, "{}: {mean} vs {target}", t.name());
    }
    assert!(table.max_errors[0] < 1e-3);
}

#[test]
fn central_fiber_pieces() {
    let p = segment(2);
    let f = PLConvex::new(1, vec![AffinePiece::new(vec![r(0, 1)], r(0, 1)), AffinePiece::new(vec![r(1, 1)], r(-1, 1))]).unwrap();
    let d = decompose(&f, &p).unwrap();
    let fiber = d.central_fiber(r(1, 1));
    assert_eq!(fiber.len(), 2);
    let over_wall: Vec<&Vec<Rational>> = fiber.iter().flat_map(|c| c.vertices.iter()).filter(|v| v[0] == r(1, 1)).collect();
    assert_eq!(over_wall.len(), 2);
    assert_eq!(over_wall[0], over_wall[1]);
    let affine = PLConvex::new(1, vec![AffinePiece::new(vec![r(1, 1)], r(0, 1))]).unwrap();
    assert_eq!(decompose(&affine, &p).unwrap().central_fiber(r(2, 1)).len(), 1);
}

#[test]
fn non_integral_q_is_flagged() {
    let p = segment(1);
    let f = PLConvex::new(1, vec![AffinePiece::new(vec![r(0, 1)], r(0, 1)), AffinePiece::new(vec![r(1, 1)], r(-1, 2))]).unwrap();
    let q = build_q(&f, &p, r(1, 1)).unwrap();
    assert!(!q.integral);
    assert!(q.polytope.vertices().contains(&vec![r(1, 2), r(1, 1)]));
}

#[test]
fn single_precision_agrees_with_double() {
    let (p, g) = bump(KernelKind::Smooth);
    for x in [0.3, 0.8, 1.0, 1.4] {
        let j64 = ray_jet(&RayPoint { polytope: &p, generator: &g, s: 10.0f64, x: &[x] }).unwrap();
        let j32 = ray_jet(&RayPoint { polytope: &p, generator: &g, s: 10.0f32, x: &[x as f32] }).unwrap();
        assert!((j32.hess[(0, 0)] as f64 - j64.hess[(0, 0)]).abs() < 1e-4 * j64.hess[(0, 0)]);
        let y = legendre_forward(&RayPoint { polytope: &p, generator: &g, s: 10.0f32, x: &[x as f32] }).unwrap();
        let back = legendre_inverse(&p, &g, 10.0f32, &y, &[1.0f32]).unwrap();
        assert!((back[0] as f64 - x).abs() < 1e-4);
    }
}
