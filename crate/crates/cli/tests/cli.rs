use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

fn scen(rel: &str) -> String {
    root().join("scenarios").join(rel).display().to_string()
}

fn workdir(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("mabuchi-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn mabuchi(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mabuchi")).current_dir(dir).args(args).output().unwrap()
}

fn rows(csv: &[u8]) -> Vec<Vec<f64>> {
    let text = std::str::from_utf8(csv).unwrap();
    assert!(!text.contains('\r'));
    text.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

fn profile(dir: &Path, polytope: &str, generator: &str) -> Vec<Vec<f64>> {
    let out = mabuchi(dir, &["profile", "--polytope", &scen(polytope), "--generator", &scen(generator), "--samples", "601"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    rows(&out.stdout)
}

#[test]
fn single_bump_profile_ends_at_the_mass() {
    let d = workdir("profile");
    let r = profile(&d, "polytopes/segment2.toml", "generators/bump-cosine.toml");
    let last = r.last().unwrap();
    assert_eq!(last[2], 4.0);
    assert!(r.iter().all(|row| row[1] >= 0.0));
    assert!(r.windows(2).all(|w| w[1][2] >= w[0][2]));
}

#[test]
fn multi_bump_profile_is_a_staircase() {
    let d = workdir("staircase");
    let r = profile(&d, "polytopes/segment6.toml", "generators/three-bumps.toml");
    // plateaus between supports carry the cumulative masses
    for (x, want) in [(0.25, 0.0), (2.0, 1.0), (4.0, 3.0), (5.75, 3.5)] {
        let row = r.iter().min_by(|a, b| (a[0] - x).abs().total_cmp(&(b[0] - x).abs())).unwrap();
        assert!((row[2] - want).abs() < 1e-12, "psi' at {x}: {}", row[2]);
    }
}

#[test]
fn zero_generator_profile_vanishes() {
    let d = workdir("zero");
    let r = profile(&d, "polytopes/segment2.toml", "generators/zero.toml");
    assert!(r.iter().all(|row| row[1] == 0.0 && row[2] == 0.0 && row[3] == 0.0));
}

#[test]
fn empty_generator_density_is_uniform_and_reproducible() {
    let d = workdir("uniform");
    let out = mabuchi(&d, &["ray-density", &scen("empty-generator.toml")]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let first = std::fs::read(d.join("out/empty-generator/density.csv")).unwrap();
    for row in rows(&first) {
        assert!((row[3] - 0.5).abs() < 1e-12);
    }
    mabuchi(&d, &["ray-density", &scen("empty-generator.toml")]);
    assert_eq!(first, std::fs::read(d.join("out/empty-generator/density.csv")).unwrap());
}

#[test]
fn seeded_smoothing_samples_are_byte_identical() {
    let d = workdir("seed");
    let args = |o: &'static str| {
        vec![
            "smooth".to_string(),
            "--polytope".into(),
            scen("polytopes/cp2-n3.toml"),
            "--generator".into(),
            scen("generators/wall-smooth.toml"),
            "--samples".into(),
            "11".into(),
            "--random".into(),
            "40".into(),
            "--seed".into(),
            "7".into(),
            "-o".into(),
            o.into(),
        ]
    };
    for o in ["a", "b"] {
        let a: Vec<String> = args(o);
        let out = mabuchi(&d, &a.iter().map(String::as_str).collect::<Vec<_>>());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    }
    assert_eq!(std::fs::read(d.join("a/smoothing.csv")).unwrap(), std::fs::read(d.join("b/smoothing.csv")).unwrap());
}

#[test]
fn figure5_decomposes_into_four_pieces() {
    let d = workdir("decompose");
    let out = mabuchi(&d, &["decompose", "--polytope", &scen("polytopes/cp2-n3.toml"), "--generator", &scen("generators/figure5.toml")]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let report: toml::Value = toml::from_str(&text).unwrap();
    assert_eq!(report["subpolytopes"].as_array().unwrap().len(), 4);
    assert_eq!(report["volume"].as_str(), report["subpolytope_volume_sum"].as_str());
    assert_eq!(report["q"]["integral"].as_bool(), Some(true));
}

#[test]
fn exit_codes() {
    let d = workdir("exit");
    assert_eq!(mabuchi(&d, &["gcst", "missing.toml"]).status.code(), Some(2));
    assert_eq!(mabuchi(&d, &["verify", "99"]).status.code(), Some(2));
    let ok = mabuchi(&d, &["verify", "3", "10", "--scenarios", &root().join("scenarios").display().to_string()]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));
    let text = String::from_utf8(ok.stdout).unwrap();
    assert!(text.contains("PASS scenario"));
    assert!(text.trim_end().ends_with(r#"{"failed":[]}"#));
    // the exponential-rate criterion fails on the shipped scenario
    let bad = mabuchi(&d, &["verify", "5", "--max-s", "256"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8(bad.stdout).unwrap().contains(r#"{"failed":["5"]}"#));
}
