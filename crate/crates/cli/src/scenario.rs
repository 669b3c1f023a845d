//! Scenario files tie a polytope, a generator and the sampling parameters
//! of one experiment together.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use mabuchi::specfile::{parse_generator, parse_polytope, BuiltGenerator, GeneratorSpec};
use mabuchi::quantization::Weight;
use mabuchi::Polytope;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum WeightName {
    #[default]
    Weighted,
    Bare,
}

impl From<WeightName> for Weight {
    fn from(w: WeightName) -> Self {
        match w {
            WeightName::Weighted => Weight::Weighted,
            WeightName::Bare => Weight::Bare,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    /// Relative to the scenario file.
    pub polytope: PathBuf,
    pub generator: PathBuf,
    #[serde(default = "default_s")]
    pub s: Vec<f64>,
    /// Lattice points to test; empty means every lattice point.
    #[serde(default)]
    pub points: Vec<Vec<i64>>,
    #[serde(default = "default_battery")]
    pub battery: String,
    #[serde(default)]
    pub weight: WeightName,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    /// Sample count per axis for density and profile files.
    #[serde(default = "default_samples")]
    pub samples: usize,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub max_s: Option<f64>,
}

fn default_s() -> Vec<f64> {
    vec![1.0]
}

fn default_battery() -> String {
    "standard".into()
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

fn default_samples() -> usize {
    201
}

/// A parsed scenario with its polytope and generator built.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub polytope: Polytope,
    pub generator_spec: GeneratorSpec,
    pub generator: BuiltGenerator,
    /// Output directory, relative to the working directory.
    pub output: PathBuf,
}

pub fn read_polytope(path: &Path) -> Result<Polytope> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_polytope(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_generator(path: &Path) -> Result<GeneratorSpec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_generator(&text).with_context(|| format!("parsing {}", path.display()))
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let file: ScenarioFile = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let dir = path.parent().unwrap_or(Path::new("."));
        if file.s.is_empty() || file.s.iter().any(|&s| !(s.is_finite() && s >= 0.0)) {
            bail!("{}: s grid must be non-empty, finite and non-negative", path.display());
        }
        if file.s.windows(2).any(|w| w[1] <= w[0]) {
            bail!("{}: s grid must be increasing", path.display());
        }
        if file.battery != "standard" {
            bail!("{}: unknown battery `{}`", path.display(), file.battery);
        }
        let polytope = read_polytope(&dir.join(&file.polytope))?;
        let generator_spec = read_generator(&dir.join(&file.generator))?;
        let generator = generator_spec.build(&polytope).with_context(|| format!("building generator of {}", file.name))?;
        for m in &file.points {
            let mr: Vec<mabuchi::Rational> = m.iter().map(|&v| mabuchi::Rational::from(v as i128)).collect();
            if m.len() != polytope.dim() || !polytope.contains_exact(&mr) {
                bail!("{}: point {m:?} is not a lattice point of the polytope", path.display());
            }
        }
        let output = file.output.clone();
        Ok(Self { file, polytope, generator_spec, generator, output })
    }

    /// Lattice points to test.
    pub fn points(&self) -> Vec<Vec<i64>> {
        if self.file.points.is_empty() {
            self.polytope.integral_points()
        } else {
            self.file.points.clone()
        }
    }

    /// The `s` grid capped at `max_s`.
    pub fn s_grid(&self, max_s: Option<f64>) -> Vec<f64> {
        let cap = max_s.or(self.file.max_s);
        self.file.s.iter().copied().filter(|&s| cap.map_or(true, |c| s <= c)).collect()
    }
}
