//! Polytope and generator description files (TOML).

use serde::Deserialize;

use crate::exact::{parse_rational, rational_from_f64, Rational};
use crate::generators::pl::{AffinePiece, PLConvex};
use crate::generators::{
    build_bump_generator, build_nice_smoothing, build_strict_smoothing, build_wall_sum, BumpSpec, Generator, GeneratorError,
};
use crate::kernel::KernelKind;
use crate::polytope::{face_frame, Facet, Polytope, PolytopeError};
use crate::testconfig::{decompose, Decomposition, TestConfigError};

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("cannot parse description: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("bad number `{0}`")]
    Number(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    TestConfig(#[from] TestConfigError),
}

/// A number written as `"p/q"`, a decimal string, an integer or a float.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum RationalText {
    Int(i64),
    Float(f64),
    Text(String),
}

impl RationalText {
    pub fn to_rational(&self) -> Result<Rational, SpecError> {
        match self {
            Self::Int(i) => Ok(Rational::from(*i as i128)),
            Self::Float(x) => rational_from_f64(*x).ok_or_else(|| SpecError::Number(x.to_string())),
            Self::Text(t) => parse_rational(t).map_err(|_| SpecError::Number(t.clone())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeSpec {
    pub dim: usize,
    pub normals: Vec<Vec<i64>>,
    pub offsets: Vec<RationalText>,
    #[serde(default)]
    pub corrected: bool,
}

impl PolytopeSpec {
    pub fn build(&self) -> Result<Polytope, SpecError> {
        if self.normals.len() != self.offsets.len() {
            return Err(SpecError::Invalid(format!(
                "{} normals but {} offsets",
                self.normals.len(),
                self.offsets.len()
            )));
        }
        let facets = self
            .normals
            .iter()
            .zip(&self.offsets)
            .map(|(v, l)| Ok(Facet::new(v.clone(), l.to_rational()?)))
            .collect::<Result<Vec<_>, SpecError>>()?;
        Ok(Polytope::new(self.dim, facets, self.corrected)?)
    }
}

pub fn parse_polytope(text: &str) -> Result<Polytope, SpecError> {
    toml::from_str::<PolytopeSpec>(text)?.build()
}

/// A wall `⟨normal, x⟩ = offset` carrying a bump of width `alpha` and mass `A`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WallSpec {
    pub normal: Vec<i64>,
    pub offset: RationalText,
    pub alpha: f64,
    #[serde(rename = "A", alias = "a", alias = "mass")]
    pub mass: f64,
    #[serde(default = "default_kernel")]
    pub kernel: KernelKind,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub g: Vec<RationalText>,
    pub b: RationalText,
}

fn default_kernel() -> KernelKind {
    KernelKind::Smooth
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKindSpec {
    Zero,
    Bumps,
    WallSum,
    PlSmooth,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub kind: GeneratorKindSpec,
    #[serde(default)]
    pub bumps: Vec<BumpSpec>,
    #[serde(default)]
    pub walls: Vec<WallSpec>,
    #[serde(default)]
    pub pieces: Vec<PieceSpec>,
    pub epsilon: Option<f64>,
    /// Further smoothing widths for family checks.
    #[serde(default)]
    pub family: Vec<f64>,
    #[serde(default = "default_kernel")]
    pub kernel: KernelKind,
    /// Weight of the strictly convex term `η |x − x̄|²`; zero gives the nice smoothing.
    #[serde(default)]
    pub strict: f64,
}

/// A built generator; piecewise-linear generators keep `f` and its decomposition.
#[derive(Debug, Clone)]
pub struct BuiltGenerator {
    pub generator: Generator,
    pub pl: Option<(PLConvex, Decomposition)>,
}

impl GeneratorSpec {
    pub fn pl(&self, dim: usize) -> Result<PLConvex, SpecError> {
        let pieces = self
            .pieces
            .iter()
            .map(|pc| {
                let g = pc.g.iter().map(RationalText::to_rational).collect::<Result<Vec<_>, _>>()?;
                Ok(AffinePiece::new(g, pc.b.to_rational()?))
            })
            .collect::<Result<Vec<_>, SpecError>>()?;
        PLConvex::new(dim, pieces).map_err(|e| SpecError::Generator(GeneratorError::PL(e)))
    }

    /// Builds the generator at smoothing width `eps` (ignored unless `pl-smooth`).
    pub fn build_at(&self, p: &Polytope, eps: Option<f64>) -> Result<BuiltGenerator, SpecError> {
        match self.kind {
            GeneratorKindSpec::Zero => Ok(BuiltGenerator { generator: Generator::zero(p.dim()), pl: None }),
            GeneratorKindSpec::Bumps => Ok(BuiltGenerator { generator: build_bump_generator(p, &self.bumps)?, pl: None }),
            GeneratorKindSpec::WallSum => {
                let walls = self
                    .walls
                    .iter()
                    .map(|w| {
                        let off = w.offset.to_rational()?;
                        let frame = face_frame(p, &[w.normal.clone()], &[off])
                            .map_err(|e| SpecError::Invalid(format!("wall frame: {e}")))?;
                        let m = crate::exact::to_real::<f64>(&off);
                        Ok((frame, BumpSpec::new(m, w.alpha, w.mass, w.kernel)))
                    })
                    .collect::<Result<Vec<_>, SpecError>>()?;
                Ok(BuiltGenerator { generator: build_wall_sum(p, &walls)?, pl: None })
            }
            GeneratorKindSpec::PlSmooth => {
                let eps = eps.or(self.epsilon).ok_or_else(|| SpecError::Invalid("pl-smooth needs `epsilon`".into()))?;
                let f = self.pl(p.dim())?;
                let d = decompose(&f, p)?;
                let generator = if self.strict > 0.0 {
                    build_strict_smoothing(&f, p, &d, eps, self.kernel, self.strict * eps)?
                } else {
                    build_nice_smoothing(&f, p, &d, eps, self.kernel)?
                };
                Ok(BuiltGenerator { generator, pl: Some((f, d)) })
            }
        }
    }

    pub fn build(&self, p: &Polytope) -> Result<BuiltGenerator, SpecError> {
        self.build_at(p, None)
    }

    /// Smoothing widths of the family: `epsilon` together with `family`, sorted.
    pub fn widths(&self) -> Vec<f64> {
        let mut w: Vec<f64> = self.epsilon.into_iter().chain(self.family.iter().copied()).collect();
        w.sort_by(f64::total_cmp);
        w.dedup();
        w
    }
}

pub fn parse_generator(text: &str) -> Result<GeneratorSpec, SpecError> {
    Ok(toml::from_str(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_and_smoothing_parse() {
        let p = parse_polytope("dim = 2\nnormals = [[1, 0], [0, 1], [-1, -1]]\noffsets = [0, \"0\", \"-3\"]\n").unwrap();
        assert_eq!(p.integral_points().len(), 10);
        let g = parse_generator(
            "kind = \"pl-smooth\"\nepsilon = 0.1\nfamily = [0.05, 0.2]\n\n[[pieces]]\ng = [0, 0]\nb = 0\n\n[[pieces]]\ng = [1, 0]\nb = -1\n",
        )
        .unwrap();
        assert_eq!(g.widths(), vec![0.05, 0.1, 0.2]);
        let built = g.build(&p).unwrap();
        assert!((built.generator.value(&[2.0f64, 0.5]) - 1.0).abs() < 1e-12);
        assert_eq!(built.pl.unwrap().1.subpolytopes.len(), 2);
    }

    #[test]
    fn bumps_and_walls_parse() {
        let seg = parse_polytope("dim = 1\nnormals = [[1], [-1]]\noffsets = [\"0\", \"-2\"]").unwrap();
        let g = parse_generator("kind = \"bumps\"\n[[bumps]]\nm = 1.0\nalpha = 0.5\nA = 4.0\nkernel = \"cosine\"\n").unwrap();
        assert!((g.build(&seg).unwrap().generator.value(&[2.0f64]) - 4.0).abs() < 1e-15);
        let tri = parse_polytope("dim = 2\nnormals = [[1, 0], [0, 1], [-1, -1]]\noffsets = [0, 0, -3]").unwrap();
        let w = parse_generator("kind = \"wall-sum\"\n[[walls]]\nnormal = [1, 0]\noffset = 1\nalpha = 0.25\nA = 1.0\n").unwrap();
        assert!(w.build(&tri).is_ok());
        assert!(parse_polytope("dim = 1\nnormals = [[1]]\noffsets = [0, 1]").is_err());
        assert!(parse_generator("kind = \"spline\"").is_err());
    }
}
