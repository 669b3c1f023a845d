//! The acceptance criteria as runnable checks. Each check builds its
//! scenario from the shipped description files and reports one line.

use std::time::Instant;

use mabuchi::generators::{verify_nice_family, BumpSpec, Generator, VerifyOptions};
use mabuchi::limits::{
    component_means, decreasing_after, delta_diagnostic, distance_to_real, face_delta_diagnostic, fit, mixed_limit_plane,
    metric_length, pairing_table, polarization_distance, scan_gap, separable_battery, theta_circumference, PolarizationFrame,
    RateModel, TestBattery,
};
use mabuchi::potentials::{guillemin_jet, ray_jet, RayPoint};
use mabuchi::quadrature::{integrate_1d, Region, Tolerance};
use mabuchi::quantization::{f_m, SectionDensity, Weight};
use mabuchi::specfile::{parse_generator, parse_polytope, GeneratorSpec};
use mabuchi::testconfig::{build_q, decompose};
use mabuchi::{KernelKind, Polytope, Rational};

pub const SEGMENT2: &str = include_str!("../../../scenarios/polytopes/segment2.toml");
pub const SEGMENT6: &str = include_str!("../../../scenarios/polytopes/segment6.toml");
pub const CP2: &str = include_str!("../../../scenarios/polytopes/cp2-n3.toml");
pub const BUMP_COSINE: &str = include_str!("../../../scenarios/generators/bump-cosine.toml");
pub const THREE_BUMPS: &str = include_str!("../../../scenarios/generators/three-bumps.toml");
pub const ZERO: &str = include_str!("../../../scenarios/generators/zero.toml");
pub const WALL_SMOOTH: &str = include_str!("../../../scenarios/generators/wall-smooth.toml");
pub const WALL_STRICT: &str = include_str!("../../../scenarios/generators/wall-strict.toml");
pub const FIGURE5: &str = include_str!("../../../scenarios/generators/figure5.toml");

/// Knobs shared by every check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    /// Largest `s` used by the asymptotic checks.
    pub max_s: Option<f64>,
    /// Multiplies every pass tolerance.
    pub tol_scale: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { max_s: None, tol_scale: 1.0 }
    }
}

impl CheckOptions {
    fn grid(&self, s: impl IntoIterator<Item = f64>) -> Vec<f64> {
        s.into_iter().filter(|&v| self.max_s.map_or(true, |m| v <= m)).collect()
    }

    fn tol(&self, t: f64) -> f64 {
        t * self.tol_scale
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    pub budget: f64,
}

impl CheckOutcome {
    pub fn line(&self) -> String {
        format!(
            "{} [{:>2}] {}: {} ({:.2} s of {:.0} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.seconds,
            self.budget
        )
    }
}

struct Verdict {
    passed: bool,
    parts: Vec<String>,
}

impl Verdict {
    fn new() -> Self {
        Self { passed: true, parts: Vec::new() }
    }

    fn require(&mut self, ok: bool, what: String) {
        self.passed &= ok;
        self.parts.push(if ok { what } else { format!("NOT {what}") });
    }

    fn fail(&mut self, what: String) {
        self.passed = false;
        self.parts.push(what);
    }
}

type CheckFn = fn(&CheckOptions) -> Verdict;

const CRITERIA: [(&str, f64, CheckFn); 11] = [
    ("Beta-norm oracle", 1.0, beta_norms),
    ("affine tail of an even bump", 1.0, affine_tail),
    ("f_n on gap components", 1.0, gap_values),
    ("delta convergence at the bump centre", 10.0, delta_convergence),
    ("uniform convergence on gap components", 10.0, uniform_convergence),
    ("gCST limits", 20.0, gcst_limits),
    ("polarization stasis and limits", 10.0, polarization_limits),
    ("higher-dimensional localization", 60.0, localization),
    ("nice-family verification", 30.0, nice_family),
    ("decomposition and Q", 1.0, decomposition),
    ("metric degeneration", 10.0, metric_degeneration),
];

pub fn criterion_count() -> usize {
    CRITERIA.len()
}

/// Runs criterion `id` (1-based).
pub fn run(id: usize, opts: &CheckOptions) -> CheckOutcome {
    let (title, budget, f) = CRITERIA[id - 1];
    let t = Instant::now();
    let mut v = f(opts);
    let seconds = t.elapsed().as_secs_f64();
    if seconds > budget {
        v.fail(format!("runtime {seconds:.1} s over budget"));
    }
    CheckOutcome { id, title, passed: v.passed, detail: v.parts.join("; "), seconds, budget }
}

pub fn run_all(opts: &CheckOptions) -> Vec<CheckOutcome> {
    (1..=CRITERIA.len()).map(|i| run(i, opts)).collect()
}

fn polytope(text: &str) -> Polytope {
    parse_polytope(text).expect("shipped polytope description")
}

fn generator_spec(text: &str) -> GeneratorSpec {
    parse_generator(text).expect("shipped generator description")
}

fn generator(text: &str, p: &Polytope) -> Generator {
    generator_spec(text).build(p).expect("shipped generator builds").generator
}

fn segment(n: i64) -> Polytope {
    polytope(&format!("dim = 1\nnormals = [[1], [-1]]\noffsets = [0, {}]\n", -n))
}

fn doubling(from: f64, to: f64) -> Vec<f64> {
    let mut s = vec![from];
    while *s.last().unwrap() * 2.0 <= to {
        s.push(s.last().unwrap() * 2.0);
    }
    s
}

fn ln_beta(a: f64, b: f64) -> f64 {
    statrs::function::gamma::ln_gamma(a) + statrs::function::gamma::ln_gamma(b) - statrs::function::gamma::ln_gamma(a + b)
}

fn beta_norms(opts: &CheckOptions) -> Verdict {
    let mut v = Verdict::new();
    let mut worst = 0.0f64;
    for n_len in 1..=3i64 {
        let p = segment(n_len);
        let gen = generator(ZERO, &p);
        for n in 0..=n_len {
            let nn = n_len as f64;
            let m = n as f64;
            let sd = match SectionDensity::new(&p, &gen, &[m], 0.0, Weight::Weighted) {
                Ok(sd) => sd,
                Err(e) => {
                    v.fail(format!("N={n_len} n={n}: {e}"));
                    continue;
                }
            };
            let log_int = sd.log_l1_norm() - std::f64::consts::TAU.ln();
            let log_oracle = (nn / 2.0 + 1.0) * nn.ln() + ln_beta(m / 2.0 + 1.0, (nn - m) / 2.0 + 1.0);
            worst = worst.max(((log_int - log_oracle).exp() - 1.0).abs());
        }
    }
    v.require(worst <= opts.tol(1e-8), format!("max relative deviation {worst:.2e} <= 1e-8"));
    v
}

fn affine_tail(opts: &CheckOptions) -> Verdict {
    let mut v = Verdict::new();
    let p = segment(4);
    let (m, alpha, a) = (1.0, 0.5, 2.0);
    for (kernel, tol) in [(KernelKind::Cosine, 1e-10), (KernelKind::Smooth, 1e-8)] {
        let gen = mabuchi::generators::build_bump_generator(&p, &[BumpSpec::new(m, alpha, a, kernel)]).unwrap();
        let mut worst = 0.0f64;
        let mut worst_q = 0.0f64;
        let qtol = Tolerance::new(1e-13, 1e-15);
        for i in 0..200 {
            let x = m + alpha + (4.0 - m - alpha) * i as f64 / 199.0;
            worst = worst.max((gen.value(&[x]) - a * (x - m)).abs());
            // ψ(x) = ∫ (x − t) ψ''(t) dt from the left end of the support
            let r = integrate_1d(|t: f64| vec![(x - t) * gen.jet(&[t]).hess[(0, 0)]], &[m - alpha, m, (m + alpha).min(x)], 1, &qtol);
            worst_q = worst_q.max((r.value[0] - a * (x - m)).abs());
        }
        let name = format!("{kernel:?}").to_lowercase();
        v.require(
            worst.max(worst_q) <= opts.tol(tol),
            format!("{name}: |psi - A(x-m)| {worst:.1e}, from psi'' {worst_q:.1e} <= {tol:.0e}"),
        );
    }
    v
}

fn gap_values(opts: &CheckOptions) -> Verdict {
    let mut v = Verdict::new();
    let p = polytope(SEGMENT6);
    let spec = generator_spec(THREE_BUMPS);
    let gen = spec.build(&p).unwrap().generator;
    let bumps = &spec.bumps;
    // gap components between supports
    let mut edges = vec![0.0];
    for b in bumps {
        edges.push(b.m - b.alpha);
        edges.push(b.m + b.alpha);
    }
    edges.push(6.0);
    let mut worst = 0.0f64;
    let mut count = 0;
    for n in 0..=6 {
        let nf = n as f64;
        for l in 0..=bumps.len() {
            let (lo, hi) = (edges[2 * l], edges[2 * l + 1]);
            let expect: f64 = bumps[..l].iter().map(|b| (b.m - nf) * b.mass).sum();
            for i in 0..100 {
                let x = lo + (hi - lo) * i as f64 / 99.0;
                worst = worst.max((f_m(&gen, &[nf], &[x]) - expect).abs());
                count += 1;
            }
        }
    }
    v.require(worst <= opts.tol(1e-10), format!("{count} points, max |f_n - sum (m_j - n) A_j| {worst:.1e} <= 1e-10"));
    v
}

fn bump_scenario() -> (Polytope, Generator) {
    let p = polytope(SEGMENT2);
    let g = generator(BUMP_COSINE, &p);
    (p, g)
}

fn delta_convergence(opts: &CheckOptions) -> Verdict {
    let mut v = Verdict::new();
    let (p, gen) = bump_scenario();
    let battery = TestBattery::standard(&[1.0], 2.0);
    let s = opts.grid(doubling(32.0, 4096.0));
    match delta_diagnostic(&p, &gen, &[1.0], Weight::Weighted, &s, &battery) {
        Ok((table, f)) => {
            let last = *table.max_errors.last().unwrap();
            v.require(decreasing_after(&table.max_errors, 0, 0.0), "battery error decreasing".into());
            v.require((0.8..=1.2).contains(&f.rate), format!("power exponent {:.3} in [0.8, 1.2]", f.rate));
            v.require(last <= opts.tol(1e-3), format!("error {last:.2e} at s={} <= 1e-3", table.s.last().unwrap()));
        }
        Err(e) => v.fail(format!("quadrature: {e}")),
    }
    v
}

/// Gap component of the bump scenario containing the lattice point `n`.
fn bump_component(n: f64) -> (f64, f64) {
    if n < 1.0 {
        (0.0, 0.5)
    } else {
        (1.5, 2.0)
    }
}

fn uniform_convergence(opts: &CheckOptions) -> Verdict {
    let mut v = Verdict::new();
    let (p, gen) = bump_scenario();
    let battery = TestBattery::standard(&[1.0], 2.0);
    let s = opts.grid(doubling(32.0, 4096.0));
    let scan: Vec<Vec<f64>> = (0..=4000).map(|i| vec![2.0 * i as f64 / 4000.0]).collect();
    for n in [0.0, 2.0] {
        let (lo, hi) = bump_component(n);
        let comp = Region::boxed(&[lo], &[hi]);
        let gap = scan_gap(&gen, &[n], &scan, |x| x[0] >= lo && x[0] <= hi);
        let targets = component_means(&p, &[n], Weight::Weighted, &comp, &battery);
        let table = match pairing_table(&p, &gen, &[n], Weight::Weighted, &s, battery.names(), &|x| battery.eval(x), &targets) {
            Ok(t) => t,
            Err(e) => {
                v.fail(format!("n={n}: quadrature: {e}"));
                continue;
            }
        };
        let f = fit(&table.s, &table.max_errors, RateModel::Exponential);
        let p_fit = fit(&table.s, &table.max_errors, RateModel::Power);
        let last = *table.max_errors.last().unwrap();
        v.require(
            (f.rate - gap).abs() <= 0.15 * gap,
            format!("n={n}: exponential rate {:.3e} within 15% of gap {gap:.3e} (power exponent {:.3})", f.rate, p_fit.rate),
        );
        v.require(last <= opts.tol(1e-8), format!("n={n}: error {last:.2e} at s={} <= 1e-8", table.s.last().unwrap()));
    }
    v
}

fn gcst_limits(opts: &CheckOptions) -> Verdict {
    let mut v = Verdict::new();
    let (p, gen) = bump_scenario();
    let s = opts.grid([4096.0]).last().copied().unwrap_or(1.0);
    let battery = TestBattery::standard(&[1.0], 2.0);
    let k = battery.len();
    let tol = Tolerance::new(1e-12, 1e-300);
    // n = 0 in P1 = [0, 1/2]: density e^{−h⁰_0 − sΔ_0} against e^{−h⁰_0} = 2 − x on P1
    let target = integrate_1d(|x: f64| battery.eval(&[x]).into_iter().map(|t| t * (2.0 - x)).collect(), &[0.0, 0.5], k, &tol);
    match SectionDensity::new(&p, &gen, &[0.0], s, Weight::Weighted) {
        Ok(sd) => {
            let (raw, log_ref) = sd.scaled_integrals(&p.region(), |x| battery.eval(x), k).unwrap();
            let scale = (log_ref - s * gen.value(&[0.0])).exp();
            let err = raw.iter().zip(&target.value).map(|(r, t)| (r * scale - t).abs()).fold(0.0, f64::max);
            v.require(err <= opts.tol(1e-6), format!("n=0: chi_P1 pairing error {err:.2e} at s={s} <= 1e-6"));
        }
        Err(e) => v.fail(format!("n=0: {e}")),
    }
    // n = 1 at the bump centre: Laplace oracle
    match SectionDensity::new(&p, &gen, &[1.0], s, Weight::Weighted) {
        Ok(sd) => {
            let (raw, log_ref) = sd.scaled_integrals(&p.region(), |x| battery.eval(x), k).unwrap();
            let scale = s.sqrt() * (log_ref - s * gen.value(&[1.0])).exp();
            // e^{−h⁰_1(1)} = 1 on [0, 2]; ψ''(1) = A/α for the cosine kernel
            let psi2 = gen.jet(&[1.0]).hess[(0, 0)];
            let lap = (std::f64::consts::TAU / psi2).sqrt();
            let taus = battery.eval(&[1.0]);
            let mut worst = 0.0f64;
            for (r, t) in raw.iter().zip(&taus) {
                worst = worst.max((r * scale - lap * t).abs() / (lap * t.abs()).max(lap));
            }
            v.require(worst <= opts.tol(0.02), format!("n=1: rescaled pairing within {:.2}% of Laplace oracle <= 2%", 100.0 * worst));
        }
        Err(e) => v.fail(format!("n=1: {e}")),
    }
    v
}

fn frame_at(p: &Polytope, gen: &Generator, s: f64, x: &[f64]) -> PolarizationFrame<f64> {
    let j = ray_jet(&RayPoint { polytope: p, generator: gen, s, x }).expect("interior point");
    PolarizationFrame::new(x.to_vec(), s, j.hess).expect("positive definite")
}

fn polarization_limits(opts: &CheckOptions) -> Verdict {
    let mut v = Verdict::new();
    let (seg, bump) = bump_scenario();
    let cp2 = polytope(CP2);
    let wall = generator(WALL_SMOOTH, &cp2);
    // stasis off the supports
    let mut stasis = 0.0f64;
    for (p, g, x) in [(&seg, &bump, vec![0.25]), (&seg, &bump, vec![1.75]), (&cp2, &wall, vec![0.5, 1.0]), (&cp2, &wall, vec![1.5, 0.5])]
    {
        let f0 = frame_at(p, g, 0.0, &x);
        for s in [1.0, 10.0, 100.0] {
            stasis = stasis.max(polarization_distance(&frame_at(p, g, s, &x), &f0).unwrap());
        }
    }
    v.require(stasis == 0.0, format!("distance to s=0 off the supports {stasis:.1e} == 0"));
    // bump point: distance to the real polarization
    let s: Vec<f64> = opts.grid([10.0, 100.0, 1e3, 1e4]);
    let d: Vec<f64> = s.iter().map(|&s| distance_to_real(&frame_at(&seg, &bump, s, &[1.0]))).collect();
    let f = fit(&s, &d, RateModel::Power);
    let c = d.iter().zip(&s).map(|(d, s)| d * s).fold(0.0, f64::max);
    v.require((0.9..=1.1).contains(&f.rate), format!("bump point: distance to real ~ {c:.2}/s, exponent {:.3} in [0.9, 1.1]", f.rate));
    // wall point on CP²: mixed limit plane
    let x = [1.0, 1.0];
    let g0 = guillemin_jet(&cp2, &x).unwrap().hess;
    let limit = mixed_limit_plane(&g0, &[vec![1.0, 0.0]]);
    let s: Vec<f64> = [1e2, 1e4, 1e6, 1e8].to_vec();
    let d: Vec<f64> = s.iter().map(|&s| frame_at(&cp2, &wall, s, &x).plane.distance(&limit)).collect();
    let f = fit(&s, &d, RateModel::Power);
    let last = *d.last().unwrap();
    v.require(
        last <= opts.tol(1e-6) && (0.9..=1.1).contains(&f.rate),
        format!("wall point: distance to mixed limit plane {last:.1e} at s=1e8 <= 1e-6, exponent {:.3}", f.rate),
    );
    v
}

fn localization(opts: &CheckOptions) -> Verdict {
    let mut v = Verdict::new();
    let p = polytope(CP2);
    let spec = generator_spec(WALL_SMOOTH);
    let built = spec.build(&p).unwrap();
    let (gen, (_, decomp)) = (built.generator, built.pl.unwrap());
    let eps = spec.epsilon.unwrap();
    // m = (2, 0): uniform limit on P₂ − W_ε = {x₁ ≥ 1 + ε}
    let m = [2.0, 0.0];
    let comp = p.region::<f64>().with(vec![1.0, 0.0], 1.0 + eps);
    let battery = TestBattery::standard(&[1.5, 1.5], 3.0);
    let s = opts.grid([128.0, 512.0, 2048.0]);
    let scan: Vec<Vec<f64>> = (0..=600)
        .flat_map(|i| (0..=30).map(move |j| vec![3.0 * i as f64 / 600.0, 3.0 * j as f64 / 30.0]))
        .filter(|x| p.contains(x, 0.0))
        .collect();
    let gap = scan_gap(&gen, &m, &scan, |x| x[0] >= 1.0 + eps);
    let targets = component_means(&p, &m, Weight::Weighted, &comp, &battery);
    match pairing_table(&p, &gen, &m, Weight::Weighted, &s, battery.names(), &|x| battery.eval(x), &targets) {
        Ok(t) => {
            let last = *t.max_errors.last().unwrap();
            let pf = fit(&t.s, &t.max_errors, RateModel::Power);
            v.require(
                last <= opts.tol(1e-4),
                format!("m=(2,0): uniform error {last:.2e} at s={} <= 1e-4 (gap {gap:.1e}, power exponent {:.2})", t.s.last().unwrap(), pf.rate),
            );
        }
        Err(e) => v.fail(format!("m=(2,0): quadrature: {e}")),
    }
    // m = (1, 1) on the wall: separable pairing
    let face = decomp.faces.iter().find(|f| f.codim == 1).expect("wall face");
    let frame = face.frame.as_ref().expect("lattice frame");
    let tests = separable_battery(frame, 3.0);
    // the off-wall mass e^{−sψ(m)} must be negligible against 1/s
    let s = opts.grid(doubling(1024.0, 8192.0));
    match face_delta_diagnostic(&p, &gen, &[1.0, 1.0], Weight::Weighted, frame, &s, &tests) {
        Ok((t, f)) => {
            v.require(
                (0.8..=1.2).contains(&f.rate),
                format!("m=(1,1): transverse power exponent {:.3} in [0.8, 1.2] (error {:.1e} at s={})", f.rate, t.max_errors.last().unwrap(), t.s.last().unwrap()),
            );
        }
        Err(e) => v.fail(format!("m=(1,1): quadrature: {e}")),
    }
    v
}

fn cp2_samples(p: &Polytope, k: usize) -> Vec<Vec<f64>> {
    (0..=k)
        .flat_map(|i| (0..=k).map(move |j| vec![3.0 * i as f64 / k as f64, 3.0 * j as f64 / k as f64]))
        .filter(|x| p.contains(x, 0.0))
        .collect()
}

fn family(text: &str, p: &Polytope) -> (mabuchi::testconfig::Decomposition, Vec<(f64, Generator)>) {
    let spec = generator_spec(text);
    let mut d = None;
    let fam = spec
        .widths()
        .into_iter()
        .map(|e| {
            let b = spec.build_at(p, Some(e)).unwrap();
            d = b.pl.map(|x| x.1);
            (e, b.generator)
        })
        .collect();
    (d.unwrap(), fam)
}

fn nice_family(_opts: &CheckOptions) -> Verdict {
    let mut v = Verdict::new();
    let p = polytope(CP2);
    let samples = cp2_samples(&p, 45);
    let (d, fam) = family(WALL_SMOOTH, &p);
    let rep = verify_nice_family(&d, &fam, &samples, &VerifyOptions::default());
    let failed: Vec<String> = rep.conditions.iter().filter(|c| !c.passed).map(|c| format!("{}: {}", c.label, c.detail)).collect();
    v.require(rep.passed(), format!("smoothing family passes a)-e) {failed:?}"));
    let (d, ctl) = family(WALL_STRICT, &p);
    let rep = verify_nice_family(&d, &ctl, &samples, &VerifyOptions::default());
    v.require(!rep.condition('e').passed, format!("strictly convex control fails e) ({})", rep.condition('e').detail));
    v
}

fn decomposition(_opts: &CheckOptions) -> Verdict {
    let mut v = Verdict::new();
    let p = polytope(CP2);
    let f = generator_spec(FIGURE5).pl(2).unwrap();
    match decompose(&f, &p) {
        Ok(d) => {
            let (sum, vol) = d.volumes_add_up();
            v.require(d.subpolytopes.len() == 4, format!("{} sub-polytopes == 4", d.subpolytopes.len()));
            v.require(sum == vol, format!("sum of volumes {sum} == vol(P) {vol}"));
        }
        Err(e) => v.fail(format!("decomposition: {e}")),
    }
    let r = |a: i128| Rational::from(a);
    let seg = polytope(SEGMENT2);
    let f1 = mabuchi::generators::PLConvex::new(
        1,
        vec![mabuchi::generators::AffinePiece::new(vec![r(0)], r(0)), mabuchi::generators::AffinePiece::new(vec![r(1)], r(-1))],
    )
    .unwrap();
    let q = build_q(&f1, &seg, r(1)).unwrap();
    let mut got: Vec<Vec<Rational>> = q.polytope.vertices().to_vec();
    got.sort();
    let mut want: Vec<Vec<Rational>> = [[0, 0], [0, 1], [1, 1], [2, 0]].iter().map(|v| v.iter().map(|&c| r(c)).collect()).collect();
    want.sort();
    v.require(got == want && q.integral, "Q on [0,2] has vertices (0,0),(0,1),(1,1),(2,0)".into());
    let zero = mabuchi::generators::PLConvex::new(2, vec![mabuchi::generators::AffinePiece::new(vec![r(0), r(0)], r(0))]).unwrap();
    let q0 = build_q(&zero, &p, r(2)).unwrap();
    let mut prism: Vec<Vec<Rational>> = p
        .vertices()
        .iter()
        .flat_map(|v| [r(0), r(2)].map(|h| v.iter().cloned().chain([h]).collect::<Vec<_>>()))
        .collect();
    prism.sort();
    let mut got0 = q0.polytope.vertices().to_vec();
    got0.sort();
    v.require(got0 == prism && q0.polytope.volume() == p.volume() * r(2), "f = 0 gives the prism P x [0, K]".into());
    v
}

fn metric_degeneration(opts: &CheckOptions) -> Verdict {
    let mut v = Verdict::new();
    let (p, gen) = bump_scenario();
    let tol = Tolerance::new(1e-12, 1e-14);
    let s = opts.grid([1e2, 1e3, 1e4]);
    let across = [(vec![0.5], vec![0.0]), (vec![1.5], vec![0.0])];
    let lens: Vec<f64> = s.iter().map(|&s| metric_length(&p, &gen, s, &across, &tol).unwrap()).collect();
    let f = fit(&s, &lens, RateModel::Power);
    v.require((f.rate + 0.5).abs() <= 0.05, format!("length across the bump grows as s^{:.3}", -f.rate));
    let mut spread = 0.0f64;
    for path in [[(vec![0.1], vec![0.0]), (vec![0.45], vec![0.0])], [(vec![1.55], vec![0.0]), (vec![1.9], vec![0.0])]] {
        let l: Vec<f64> = s.iter().map(|&s| metric_length(&p, &gen, s, &path, &tol).unwrap()).collect();
        let l0 = metric_length(&p, &gen, 0.0, &path, &tol).unwrap();
        spread = spread.max(l.iter().map(|x| (x - l0).abs()).fold(0.0, f64::max));
    }
    v.require(spread <= opts.tol(1e-10), format!("off-support lengths vary by {spread:.1e} <= 1e-10"));
    let c: Vec<f64> = s.iter().map(|&s| theta_circumference(&p, &gen, s, &[1.0], 0).unwrap()).collect();
    let f = fit(&s, &c, RateModel::Power);
    v.require((f.rate - 0.5).abs() <= 0.05, format!("theta circumference at the centre decays as s^{:.3}", -f.rate));
    v
}
