//! The shipped fleet of named targets.

use std::f64::consts::TAU;

use cxlab::limits::{two_sheet_cloud, FunctionFamily, SequenceMember, VarietySequence};
use cxlab::varieties::{AffineVarietySpec, GraphSpec, ProjectiveVarietySpec};
use cxlab::{Complex64, LabError, PointCloud, Polynomial, Result};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Curve,
    Projective,
    Graph,
    Sequence,
    Family,
    Shape,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Preset {
    pub name: &'static str,
    pub category: Category,
    /// Defining polynomial or formula, in the lab's text format.
    pub definition: &'static str,
    /// Projective form, where the preset has one.
    pub projective: Option<&'static str>,
    pub non_algebraic: bool,
    pub summary: &'static str,
}

const fn preset(
    name: &'static str,
    category: Category,
    definition: &'static str,
    summary: &'static str,
) -> Preset {
    Preset {
        name,
        category,
        definition,
        projective: None,
        non_algebraic: false,
        summary,
    }
}

/// The catalog, sorted by name.
pub const PRESETS: &[Preset] = &[
    preset(
        "alternating_family",
        Category::Family,
        "f_m(z) = 0.5 (-1)^m",
        "bounded constants with two limit points",
    ),
    preset(
        "circle",
        Category::Shape,
        "1000 points on |z| = 1 in C",
        "unit circle",
    ),
    preset(
        "conic",
        Category::Projective,
        "z0*z2 - z1^2",
        "smooth conic in CP^2",
    ),
    preset(
        "degree_growth_sequence",
        Category::Sequence,
        "z1 - z0^n, n = 1..16",
        "volumes grow without bound",
    ),
    preset(
        "disc",
        Category::Shape,
        "300 x 300 grid points of |z| <= 1 in C",
        "unit disc",
    ),
    Preset {
        non_algebraic: true,
        ..preset(
            "exp_graph",
            Category::Graph,
            "w = exp(z)",
            "graph of the exponential, entire but not algebraic",
        )
    },
    preset(
        "fermat_cubic",
        Category::Projective,
        "z0^3 + z1^3 + z2^3",
        "Fermat cubic in CP^2",
    ),
    preset(
        "flattening_sequence",
        Category::Sequence,
        "z1 - z0^2/n, n = 1..64",
        "parabolas flattening onto z1 = 0",
    ),
    preset("identity_graph", Category::Graph, "w = z", "the diagonal"),
    Preset {
        projective: Some("z2"),
        ..preset(
            "line",
            Category::Curve,
            "z1",
            "coordinate line in C^2 and CP^2",
        )
    },
    preset("origin", Category::Shape, "{0} in C", "single point"),
    preset("parabola", Category::Curve, "z1 - z0^2", "parabola in C^2"),
    preset("point", Category::Projective, "z1", "point [1:0] in CP^1"),
    preset(
        "power_family",
        Category::Family,
        "f_m(z) = z^m",
        "powers on the unit disc",
    ),
    preset(
        "segment",
        Category::Shape,
        "10000 midpoints of [0, 1] in C",
        "unit segment",
    ),
    preset(
        "shrinking_family",
        Category::Family,
        "f_m(z) = z/m",
        "lines shrinking to zero",
    ),
    preset(
        "square_graph",
        Category::Graph,
        "w = z^2",
        "graph of the square",
    ),
    preset("three", Category::Shape, "{3} in C", "single point"),
    preset(
        "translation_sequence",
        Category::Sequence,
        "z1 - 1/n, n = 1..64",
        "lines translating onto z1 = 0",
    ),
    preset(
        "two_lines",
        Category::Curve,
        "z0*z1",
        "union of the coordinate axes",
    ),
    preset(
        "two_sheet",
        Category::Shape,
        "w^2 = z over |z - 1| <= 0.2",
        "both sheets of the square root",
    ),
    preset("vertical_line", Category::Curve, "z0", "the line z0 = 0"),
    preset(
        "zero_graph",
        Category::Graph,
        "w = 0",
        "graph of the zero function",
    ),
];

pub fn find(name: &str) -> Result<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name).ok_or_else(|| {
        LabError::input(format!(
            "unknown preset '{name}' (run `cxlab list-presets` for the catalog)"
        ))
    })
}

impl Preset {
    fn wrong(&self, want: &str) -> LabError {
        LabError::input(format!("preset '{}' is not {want}", self.name))
    }

    pub fn affine(&self) -> Result<AffineVarietySpec> {
        match self.category {
            Category::Curve => AffineVarietySpec::parse_hypersurface(self.definition, 2),
            _ => Err(self.wrong("an affine curve")),
        }
    }

    pub fn projective_spec(&self) -> Result<ProjectiveVarietySpec> {
        let text = match self.category {
            Category::Projective => self.definition,
            _ => self
                .projective
                .ok_or_else(|| self.wrong("a projective variety"))?,
        };
        let nvars = if self.name == "point" { 2 } else { 3 };
        ProjectiveVarietySpec::parse_hypersurface(text, nvars)
    }

    pub fn graph(&self) -> Result<GraphSpec> {
        let inf = f64::INFINITY;
        match self.name {
            "zero_graph" => Ok(GraphSpec::new("zero", inf, |_| Complex64::new(0.0, 0.0))?
                .with_derivative(|_| Complex64::new(0.0, 0.0))),
            "identity_graph" => {
                Ok(GraphSpec::new("z", inf, |z| z)?.with_derivative(|_| Complex64::new(1.0, 0.0)))
            }
            "square_graph" => {
                Ok(GraphSpec::new("z^2", inf, |z| z * z)?.with_derivative(|z| 2.0 * z))
            }
            "exp_graph" => Ok(GraphSpec::new("exp(z)", inf, |z: Complex64| z.exp())?
                .with_derivative(|z: Complex64| z.exp())),
            _ => Err(self.wrong("a graph")),
        }
    }

    /// The sequence and its limit candidate, with `last` overriding the
    /// preset's final index.
    pub fn sequence(
        &self,
        last: Option<usize>,
        radius: f64,
    ) -> Result<(VarietySequence, Option<SequenceMember>)> {
        let axis = || -> Result<SequenceMember> {
            Ok(SequenceMember::Variety(AffineVarietySpec::hypersurface(
                Polynomial::parse("z1", Some(2))?,
            )?))
        };
        match self.name {
            "flattening_sequence" => Ok((
                VarietySequence::flattening(last.unwrap_or(64), radius)?,
                Some(axis()?),
            )),
            "translation_sequence" => Ok((
                VarietySequence::translations(last.unwrap_or(64), radius)?,
                Some(axis()?),
            )),
            "degree_growth_sequence" => Ok((
                VarietySequence::degree_growth(last.unwrap_or(16), radius)?,
                None,
            )),
            _ => Err(self.wrong("a sequence")),
        }
    }

    pub fn family(&self) -> Result<FunctionFamily> {
        match self.name {
            "power_family" => Ok(FunctionFamily::powers()),
            "alternating_family" => Ok(FunctionFamily::alternating(Complex64::new(0.5, 0.0))),
            "shrinking_family" => Ok(FunctionFamily::shrinking_lines()),
            _ => Err(self.wrong("a function family")),
        }
    }

    /// The point cloud of a shape preset.
    pub fn shape(&self) -> Result<PointCloud> {
        let c = |re: f64, im: f64| vec![Complex64::new(re, im)];
        let pts: Vec<Vec<Complex64>> = match self.name {
            "origin" => vec![c(0.0, 0.0)],
            "three" => vec![c(3.0, 0.0)],
            "circle" => (0..1000)
                .map(|i| vec![Complex64::from_polar(1.0, TAU * i as f64 / 1000.0)])
                .collect(),
            "segment" => (0..10_000)
                .map(|i| c((i as f64 + 0.5) / 10_000.0, 0.0))
                .collect(),
            "disc" => {
                let m = 300;
                let h = 2.0 / m as f64;
                (0..m * m)
                    .map(|i| {
                        Complex64::new(
                            -1.0 + h * (0.5 + (i % m) as f64),
                            -1.0 + h * (0.5 + (i / m) as f64),
                        )
                    })
                    .filter(|z| z.norm() <= 1.0)
                    .map(|z| vec![z])
                    .collect()
            }
            "two_sheet" => return two_sheet_cloud(Complex64::new(1.0, 0.0), 0.2, 20),
            _ => return Err(self.wrong("a shape")),
        };
        PointCloud::exact(pts, self.definition)
    }

    /// Natural dimension of a shape, used as the default delta.
    pub fn shape_dimension(&self) -> f64 {
        match self.name {
            "origin" | "three" => 0.0,
            "circle" | "segment" => 1.0,
            _ => 2.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_is_sorted_and_unique() {
        assert!(PRESETS.windows(2).all(|w| w[0].name < w[1].name));
    }

    #[test]
    fn every_preset_builds() {
        for p in PRESETS {
            let ok = match p.category {
                Category::Curve => p.affine().is_ok(),
                Category::Projective => p.projective_spec().is_ok(),
                Category::Graph => p.graph().is_ok(),
                Category::Sequence => p.sequence(Some(8), 1.0).is_ok(),
                Category::Family => p.family().is_ok(),
                Category::Shape => p.shape().is_ok(),
            };
            assert!(ok, "{}", p.name);
        }
    }

    #[test]
    fn parabola_and_exp_entries() {
        assert_eq!(find("parabola").unwrap().definition, "z1 - z0^2");
        assert!(find("exp_graph").unwrap().non_algebraic);
        assert!(find("nothing").is_err());
    }
}
