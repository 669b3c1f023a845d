//! Subcommand implementations. Each returns whether its checks passed;
//! input problems surface as errors.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use mabuchi::generators::{verify_nice_family, Generator, VerifyOptions};
use mabuchi::limits::{metric_length, theta_circumference, TestBattery};
use mabuchi::quadrature::Tolerance;
use mabuchi::quantization::{default_tolerance, gcst_image, SectionDensity, Weight};
use mabuchi::testconfig::{build_q, decompose, Decomposition};
use mabuchi::{Polytope, Rational};

use crate::checks::{run, CheckOptions};
use crate::output::{gnuplot_stub, ints, num, Table};
use crate::scenario::{read_generator, read_polytope, Scenario};

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Copy, Default)]
pub struct Globals {
    pub tol_override: Option<f64>,
    pub max_s: Option<f64>,
    pub seed: Option<u64>,
}

fn tolerance(n: usize, g: &Globals, scenario: Option<f64>) -> Tolerance<f64> {
    let mut t = default_tolerance::<f64>(n);
    if let Some(rel) = g.tol_override.or(scenario) {
        t.rel = rel;
    }
    t
}

fn grid_1d(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    (0..k).map(|i| lo + (hi - lo) * i as f64 / (k.max(2) - 1) as f64).collect()
}

/// Grid points of the bounding box inside `P`, `k` per axis.
fn grid_in(p: &Polytope, k: usize) -> Vec<Vec<f64>> {
    let (lo, hi) = p.bounding_box();
    let axes: Vec<Vec<f64>> = lo
        .iter()
        .zip(&hi)
        .map(|(a, b)| grid_1d(mabuchi::exact::to_real(a), mabuchi::exact::to_real(b), k))
        .collect();
    let mut pts = vec![Vec::new()];
    for axis in &axes {
        pts = pts.into_iter().flat_map(|p: Vec<f64>| axis.iter().map(move |&x| [p.clone(), vec![x]].concat())).collect();
    }
    pts.retain(|x| p.contains(x, 1e-12));
    pts
}

fn standard_battery(p: &Polytope) -> TestBattery {
    let verts = p.vertices_real::<f64>();
    let n = p.dim();
    let c: Vec<f64> = (0..n).map(|i| verts.iter().map(|v| v[i]).sum::<f64>() / verts.len() as f64).collect();
    let (lo, hi) = p.bounding_box();
    let diam = lo.iter().zip(&hi).map(|(a, b)| mabuchi::exact::to_real::<f64>(&(b - a))).fold(0.0, f64::max);
    TestBattery::standard(&c, diam)
}

pub fn profile(polytope: &Path, generator: &Path, samples: usize, out: Option<&Path>) -> Result<bool> {
    let p = read_polytope(polytope)?;
    if p.dim() != 1 {
        bail!("profile needs a one-dimensional polytope");
    }
    let g = read_generator(generator)?.build(&p)?.generator;
    let (lo, hi) = p.bounding_box();
    let mut t = Table::new(&["x", "psi2", "psi1", "psi"]);
    for x in grid_1d(mabuchi::exact::to_real(&lo[0]), mabuchi::exact::to_real(&hi[0]), samples) {
        let j = g.jet(&[x]);
        t.push(vec![num(x), num(j.hess[(0, 0)]), num(j.grad[0]), num(j.value)]);
    }
    emit(&t, out)?;
    if let Some(out) = out {
        gnuplot_stub(&out.with_extension("gp"), out, 1, &[(2, "psi''"), (3, "psi'"), (4, "psi")])?;
    }
    Ok(true)
}

fn emit(t: &Table, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => t.write(path),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&t.to_bytes()?)?;
            Ok(())
        }
    }
}

fn density<'a>(sc: &'a Scenario, m: &[i64], s: f64, tol: Tolerance<f64>) -> Result<SectionDensity<'a, f64>> {
    let mf: Vec<f64> = m.iter().map(|&v| v as f64).collect();
    let w: Weight = sc.file.weight.into();
    Ok(SectionDensity::with_tolerance(&sc.polytope, &sc.generator.generator, &mf, s, w, tol)?)
}

pub fn ray_density(path: &Path, g: &Globals) -> Result<bool> {
    let sc = Scenario::load(path)?;
    let n = sc.polytope.dim();
    let tol = tolerance(n, g, sc.file.tol);
    let samples = if n == 1 { sc.file.samples } else { sc.file.samples.min(81) };
    let xs = grid_in(&sc.polytope, samples);
    let battery = standard_battery(&sc.polytope);
    let jobs: Vec<(Vec<i64>, f64)> =
        sc.points().into_iter().flat_map(|m| sc.s_grid(g.max_s).into_iter().map(move |s| (m.clone(), s))).collect();
    let results: Vec<Result<(Vec<Vec<String>>, Vec<String>)>> = jobs
        .par_iter()
        .map(|(m, s)| {
            let sd = density(&sc, m, *s, tol)?;
            let rows = xs
                .iter()
                .map(|x| {
                    let mut r = vec![ints(m), num(*s)];
                    r.extend(x.iter().map(|&v| num(v)));
                    r.push(num(sd.normalized(x)));
                    r
                })
                .collect();
            let pairs = sd.pair(|x| battery.eval(x), battery.len())?;
            let mut prow = vec![ints(m), num(*s), num(sd.log_l1_norm())];
            prow.extend(pairs.into_iter().map(num));
            Ok((rows, prow))
        })
        .collect();
    let mut header: Vec<String> = vec!["m".into(), "s".into()];
    header.extend((1..=n).map(|i| format!("x{i}")));
    header.push("density".into());
    let mut dens = Table { header, rows: Vec::new() };
    let mut pheader = vec!["m".to_string(), "s".into(), "log_l1_norm".into()];
    pheader.extend(battery.names());
    let mut pair = Table { header: pheader, rows: Vec::new() };
    for r in results {
        let (rows, prow) = r?;
        dens.rows.extend(rows);
        pair.rows.push(prow);
    }
    let dpath = sc.output.join("density.csv");
    dens.write(&dpath)?;
    pair.write(&sc.output.join("pairings.csv"))?;
    if n == 1 {
        gnuplot_stub(&sc.output.join("density.gp"), &dpath, 3, &[(4, "density")])?;
    }
    println!("wrote {} and pairings.csv", dpath.display());
    Ok(true)
}

pub fn gcst(path: &Path, g: &Globals) -> Result<bool> {
    let sc = Scenario::load(path)?;
    let tol = tolerance(sc.polytope.dim(), g, sc.file.tol);
    let jobs: Vec<(Vec<i64>, f64)> =
        sc.points().into_iter().flat_map(|m| sc.s_grid(g.max_s).into_iter().map(move |s| (m.clone(), s))).collect();
    let rows: Vec<Result<Vec<String>>> = jobs
        .par_iter()
        .map(|(m, s)| {
            let img = gcst_image::<f64>(&sc.polytope, &sc.generator.generator, m, *s)?;
            let sd = density(&sc, m, *s, tol)?;
            let log_norm = sd.log_l1_norm();
            Ok(vec![ints(m), num(*s), num(img.log_coefficient), num(log_norm), num(img.log_coefficient + log_norm)])
        })
        .collect();
    let mut t = Table::new(&["m", "s", "log_coefficient", "log_section_norm", "log_image_norm"]);
    for r in rows {
        t.push(r?);
    }
    let out = sc.output.join("gcst.csv");
    t.write(&out)?;
    println!("wrote {}", out.display());
    Ok(true)
}

#[derive(Serialize)]
struct SubReport {
    piece: usize,
    gradient: Vec<String>,
    offset: String,
    delzant: bool,
    volume: String,
    vertices: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct FaceReport {
    codim: usize,
    active: Vec<usize>,
    normals: Vec<Vec<i64>>,
    offsets: Vec<String>,
    frame: Option<Vec<Vec<i64>>>,
    frame_error: Option<String>,
    vertices: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct CeilingReport {
    piece: usize,
    vertices: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct QReport {
    ceiling: String,
    integral: bool,
    volume: String,
    vertices: Vec<Vec<String>>,
    central_fiber: Vec<CeilingReport>,
}

#[derive(Serialize)]
struct DecompositionReport {
    volume: String,
    subpolytope_volume_sum: String,
    subpolytopes: Vec<SubReport>,
    faces: Vec<FaceReport>,
    q: QReport,
}

fn strs(v: &[Rational]) -> Vec<String> {
    v.iter().map(|r| r.to_string()).collect()
}

fn pts(v: &[Vec<Rational>]) -> Vec<Vec<String>> {
    v.iter().map(|p| strs(p)).collect()
}

fn report(d: &Decomposition, k: Rational) -> Result<DecompositionReport> {
    let (sum, vol) = d.volumes_add_up();
    let q = build_q(&d.pl, &d.polytope, k)?;
    Ok(DecompositionReport {
        volume: vol.to_string(),
        subpolytope_volume_sum: sum.to_string(),
        subpolytopes: d
            .subpolytopes
            .iter()
            .map(|s| {
                let piece = &d.pl.pieces()[s.piece];
                SubReport {
                    piece: s.piece,
                    gradient: strs(&piece.g),
                    offset: piece.b.to_string(),
                    delzant: s.delzant,
                    volume: s.polytope.volume().to_string(),
                    vertices: pts(s.polytope.vertices()),
                }
            })
            .collect(),
        faces: d
            .faces
            .iter()
            .map(|f| FaceReport {
                codim: f.codim,
                active: f.active.clone(),
                normals: f.normals.clone(),
                offsets: strs(&f.offsets),
                frame: f.frame.as_ref().map(|fr| fr.unimodular.clone()),
                frame_error: f.frame_error.clone(),
                vertices: pts(&f.vertices),
            })
            .collect(),
        q: QReport {
            ceiling: k.to_string(),
            integral: q.integral,
            volume: q.polytope.volume().to_string(),
            vertices: pts(q.polytope.vertices()),
            central_fiber: d.central_fiber(k).into_iter().map(|c| CeilingReport { piece: c.piece, vertices: pts(&c.vertices) }).collect(),
        },
    })
}

pub fn decompose_cmd(polytope: &Path, generator: &Path, ceiling: Option<&str>, out: Option<&Path>) -> Result<bool> {
    let p = read_polytope(polytope)?;
    let spec = read_generator(generator)?;
    let f = spec.pl(p.dim())?;
    let d = decompose(&f, &p)?;
    let k = match ceiling {
        Some(text) => mabuchi::exact::parse_rational(text).with_context(|| format!("ceiling `{text}`"))?,
        None => f.max_on(&p).ceil(),
    };
    for s in d.subpolytopes.iter().filter(|s| !s.delzant) {
        eprintln!("warning: sub-polytope of piece {} is not Delzant", s.piece);
    }
    let text = toml::to_string(&report(&d, k)?)?;
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    let (sum, vol) = d.volumes_add_up();
    Ok(sum == vol)
}

pub fn smooth(polytope: &Path, generator: &Path, samples: usize, random: usize, out: &Path, g: &Globals) -> Result<bool> {
    let p = read_polytope(polytope)?;
    let spec = read_generator(generator)?;
    let widths = spec.widths();
    if widths.is_empty() {
        bail!("smooth needs a pl-smooth generator with `epsilon`");
    }
    let mut family: Vec<(f64, Generator)> = Vec::new();
    let mut decomp = None;
    for &e in &widths {
        let b = spec.build_at(&p, Some(e))?;
        decomp = b.pl.map(|x| x.1);
        family.push((e, b.generator));
    }
    let decomp = decomp.context("smooth needs a pl-smooth generator")?;
    let mut xs = grid_in(&p, samples);
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed.unwrap_or(0));
    let (lo, hi) = p.bounding_box();
    let (lo, hi): (Vec<f64>, Vec<f64>) =
        (lo.iter().map(mabuchi::exact::to_real).collect(), hi.iter().map(mabuchi::exact::to_real).collect());
    let mut drawn = 0;
    while drawn < random {
        let x: Vec<f64> = lo.iter().zip(&hi).map(|(&a, &b)| rng.gen_range(a..=b)).collect();
        if p.contains(&x, 0.0) {
            xs.push(x);
            drawn += 1;
        }
    }
    let n = p.dim();
    let mut header = vec!["epsilon".to_string()];
    header.extend((1..=n).map(|i| format!("x{i}")));
    header.extend(["f".to_string(), "psi".into()]);
    header.extend((1..=n).map(|i| format!("dpsi{i}")));
    header.extend((1..=n).map(|i| format!("eig{i}")));
    let mut t = Table { header, rows: Vec::new() };
    for (e, gen) in &family {
        for x in &xs {
            let j = gen.jet(x);
            let mut r = vec![num(*e)];
            r.extend(x.iter().map(|&v| num(v)));
            r.push(num(decomp.pl.eval(x)));
            r.push(num(j.value));
            r.extend(j.grad.iter().map(|&v| num(v)));
            r.extend(j.hess.symmetric_eigenvalues().into_iter().map(num));
            t.push(r);
        }
    }
    let path = out.join("smoothing.csv");
    t.write(&path)?;
    let rep = verify_nice_family(&decomp, &family, &xs, &VerifyOptions::default());
    for c in &rep.conditions {
        println!("{} {}) worst {:.3e} over {} checks: {}", if c.passed { "PASS" } else { "FAIL" }, c.label, c.worst, c.checked, c.detail);
    }
    println!("wrote {}", path.display());
    Ok(rep.passed())
}

pub fn metric(path: &Path, from: &[f64], to: &[f64], g: &Globals) -> Result<bool> {
    let sc = Scenario::load(path)?;
    let n = sc.polytope.dim();
    if from.len() != n || to.len() != n {
        bail!("path end points need {n} coordinates");
    }
    if !sc.polytope.is_interior(from) || !sc.polytope.is_interior(to) {
        bail!("path end points must be interior");
    }
    let tol = tolerance(1, g, sc.file.tol);
    let gen = &sc.generator.generator;
    let mut header = vec!["s".to_string(), "length".into()];
    header.extend((1..=n).map(|i| format!("theta{i}_circumference")));
    let mut t = Table { header, rows: Vec::new() };
    let zero = vec![0.0; n];
    let mid: Vec<f64> = from.iter().zip(to).map(|(a, b)| 0.5 * (a + b)).collect();
    for s in sc.s_grid(g.max_s) {
        let len = metric_length(&sc.polytope, gen, s, &[(from.to_vec(), zero.clone()), (to.to_vec(), zero.clone())], &tol)?;
        let mut r = vec![num(s), num(len)];
        for k in 0..n {
            r.push(num(theta_circumference(&sc.polytope, gen, s, &mid, k)?));
        }
        t.push(r);
    }
    let out = sc.output.join("metric.csv");
    t.write(&out)?;
    println!("wrote {}", out.display());
    Ok(true)
}

#[derive(Serialize)]
struct FailureList {
    failed: Vec<String>,
}

/// Runs acceptance criteria `ids` (all when empty) and loads every scenario
/// under `scenarios`.
pub fn verify(ids: &[usize], scenarios: Option<&Path>, g: &Globals) -> Result<bool> {
    let count = crate::checks::criterion_count();
    if let Some(bad) = ids.iter().find(|&&i| i == 0 || i > count) {
        bail!("no criterion {bad}; criteria are 1 to {count}");
    }
    let ids: Vec<usize> = if ids.is_empty() { (1..=count).collect() } else { ids.to_vec() };
    let opts = CheckOptions { max_s: g.max_s, ..CheckOptions::default() };
    let mut failed = Vec::new();
    for i in ids {
        let o = run(i, &opts);
        println!("{}", o.line());
        if !o.passed {
            failed.push(i.to_string());
        }
    }
    if let Some(dir) = scenarios {
        for path in scenario_files(dir)? {
            match Scenario::load(&path) {
                Ok(_) => println!("PASS scenario {}", path.display()),
                Err(e) => {
                    println!("FAIL scenario {}: {e:#}", path.display());
                    failed.push(path.display().to_string());
                }
            }
        }
    }
    println!("{}", serde_json::to_string(&FailureList { failed: failed.clone() })?);
    Ok(failed.is_empty())
}

fn scenario_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "toml"))
        .collect();
    v.sort();
    Ok(v)
}
