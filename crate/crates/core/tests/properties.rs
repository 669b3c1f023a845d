//! Invariants over randomly generated inputs.

use mabuchi::generators::{build_bump_generator, AffinePiece, BumpSpec, PLConvex};
use mabuchi::lattice::{unimodular_completion, unimodular_inverse};
use mabuchi::limits::polarization_distance;
use mabuchi::potentials::{legendre_forward, legendre_inverse, ray_jet, RayPoint};
use mabuchi::quantization::{delta_m, f_m};
use mabuchi::testconfig::decompose;
use mabuchi::{Facet, KernelKind, Mat, PolarizationFrame, Polytope, Rational};
use proptest::prelude::*;

fn r(p: i64) -> Rational {
    Rational::from(p as i128)
}

fn rect(a: i64, b: i64) -> Polytope {
    Polytope::new(
        2,
        vec![Facet::new(vec![1, 0], r(0)), Facet::new(vec![0, 1], r(0)), Facet::new(vec![-1, 0], r(-a)), Facet::new(vec![0, -1], r(-b))],
        false,
    )
    .unwrap()
}

fn simplex(n: i64) -> Polytope {
    Polytope::new(2, vec![Facet::new(vec![1, 0], r(0)), Facet::new(vec![0, 1], r(0)), Facet::new(vec![-1, -1], r(-n))], false).unwrap()
}

fn bumps() -> impl Strategy<Value = (f64, f64, f64, bool)> {
    (1.0f64..3.0, 0.1f64..0.9, 0.1f64..10.0, any::<bool>())
}

fn kernel(smooth: bool) -> KernelKind {
    if smooth {
        KernelKind::Smooth
    } else {
        KernelKind::Cosine
    }
}

fn segment4() -> Polytope {
    Polytope::new(1, vec![Facet::new(vec![1], r(0)), Facet::new(vec![-1], r(-4))], false).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn facet_functions_are_affine(a in (-9i64..9, -9i64..9), b in (-9i64..9, -9i64..9), t in 0i64..=8) {
        let p = simplex(3);
        let t = Rational::new(t as i128, 8);
        let pa = [r(a.0), r(a.1)];
        let pb = [r(b.0), r(b.1)];
        let mix = [t * pa[0] + (r(1) - t) * pb[0], t * pa[1] + (r(1) - t) * pb[1]];
        for f in p.facets() {
            prop_assert_eq!(f.ell_exact(&mix), t * f.ell_exact(&pa) + (r(1) - t) * f.ell_exact(&pb));
        }
    }

    #[test]
    fn lattice_points_match_brute_force(a in 1i64..6, b in 1i64..6, n in 1i64..7) {
        let count = |p: &Polytope| (-1..8).flat_map(|i| (-1..8).map(move |j| (i, j))).filter(|&(i, j)| p.contains_exact(&[r(i), r(j)])).count();
        let q = rect(a, b);
        prop_assert_eq!(q.integral_points().len(), count(&q));
        prop_assert_eq!(q.integral_points().len() as i64, (a + 1) * (b + 1));
        let s = simplex(n);
        prop_assert_eq!(s.integral_points().len(), count(&s));
    }

    #[test]
    fn basis_completion_is_unimodular(v in prop::collection::vec(-20i64..20, 3)) {
        prop_assume!(mabuchi::lattice::is_primitive(&v));
        let u = unimodular_completion(&[v.clone()], 3).unwrap();
        let det = mabuchi::exact::det_i64(&u);
        prop_assert_eq!(det.abs(), 1);
        let inv = unimodular_inverse(&u);
        for i in 0..3 {
            for j in 0..3 {
                let e: i64 = (0..3).map(|k| u[i][k] * inv[k][j]).sum();
                prop_assert_eq!(e, i64::from(i == j));
            }
        }
    }

    #[test]
    fn legendre_round_trip((m, alpha, a, smooth) in bumps(), x in 0.05f64..3.95, s in 0.0f64..1e3) {
        let p = segment4();
        let g = build_bump_generator(&p, &[BumpSpec::new(m, alpha, a, kernel(smooth))]).unwrap();
        let y = legendre_forward(&RayPoint { polytope: &p, generator: &g, s, x: &[x] }).unwrap();
        let back = legendre_inverse(&p, &g, s, &y, &[2.0]).unwrap();
        prop_assert!((back[0] - x).abs() < 1e-8, "x={} back={}", x, back[0]);
    }

    #[test]
    fn gap_is_non_negative((m, alpha, a, smooth) in bumps(), mm in 0i64..=4, x in 0.0f64..4.0) {
        // convexity: f_m(x) ≥ −ψ(m)
        let p = segment4();
        let g = build_bump_generator(&p, &[BumpSpec::new(m, alpha, a, kernel(smooth))]).unwrap();
        let mf = mm as f64;
        prop_assert!(f_m(&g, &[mf], &[x]) >= -g.value(&[mf]) - 1e-12 * (1.0 + a));
        prop_assert!(delta_m(&g, &[mf], &[x]) >= -1e-12 * (1.0 + a));
    }

    #[test]
    fn polarization_distance_is_a_metric(
        xs in prop::collection::vec((0.2f64..1.3, 0.2f64..1.3), 3),
        s in prop::collection::vec(0.0f64..100.0, 3),
    ) {
        let p = simplex(3);
        let g = mabuchi::generators::Generator::zero(2);
        let frames: Vec<PolarizationFrame> = xs
            .iter()
            .zip(&s)
            .map(|(&(a, b), &s)| {
                let x = [a, b];
                let j = ray_jet(&RayPoint { polytope: &p, generator: &g, s, x: &x }).unwrap();
                // stretch the metric so the three planes differ
                PolarizationFrame::new(x.to_vec(), s, j.hess.add(&Mat::identity(2).scaled(s))).unwrap()
            })
            .collect();
        let d = |i: usize, j: usize| polarization_distance(&frames[i], &frames[j]).unwrap();
        prop_assert!(d(0, 0) < 1e-14);
        prop_assert!((d(0, 1) - d(1, 0)).abs() < 1e-13);
        prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-13);
        let pr = frames[0].plane.projector();
        let n = 4;
        for i in 0..n {
            for j in 0..n {
                prop_assert!((pr[i * n + j] - pr[j * n + i].conj()).norm() < 1e-13);
                let sq: num_complex::Complex<f64> = (0..n).map(|k| pr[i * n + k] * pr[k * n + j]).sum();
                prop_assert!((sq - pr[i * n + j]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn subpolytope_volumes_add_up(g1 in (-2i64..3, -2i64..3), b1 in -3i64..3, g2 in (-2i64..3, -2i64..3), b2 in -3i64..3) {
        let p = simplex(3);
        let f = PLConvex::new(2, vec![
            AffinePiece::new(vec![r(0), r(0)], r(0)),
            AffinePiece::new(vec![r(g1.0), r(g1.1)], r(b1)),
            AffinePiece::new(vec![r(g2.0), r(g2.1)], r(b2)),
        ]).unwrap();
        let d = decompose(&f, &p).unwrap();
        let (sum, vol) = d.volumes_add_up();
        prop_assert_eq!(sum, vol);
        for s in &d.subpolytopes {
            for v in s.polytope.vertices() {
                prop_assert_eq!(f.eval_exact(v), d.pl.pieces()[s.piece].eval_exact(v));
            }
        }
    }
}
