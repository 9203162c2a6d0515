//! Experiment configs: `key = value` lines under `[experiment]`, `[target]`
//! and `[params]` headers, parsed strictly.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Volume,
    Growth,
    Degree,
    Cone,
    Sequence,
    Montel,
    Hausdorff,
    ProperCoords,
    Reconstruct,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Volume => "volume",
            Kind::Growth => "growth",
            Kind::Degree => "degree",
            Kind::Cone => "cone",
            Kind::Sequence => "sequence",
            Kind::Montel => "montel",
            Kind::Hausdorff => "hausdorff",
            Kind::ProperCoords => "proper-coords",
            Kind::Reconstruct => "reconstruct",
        }
    }

    /// Montel extraction is deterministic given its grid; everything else
    /// draws random lines, unitaries or samples somewhere.
    pub fn needs_seed(self) -> bool {
        self != Kind::Montel
    }

    /// Keys of `[params]` that the kind reads.
    pub fn params(self) -> &'static [&'static str] {
        match self {
            Kind::Volume => &[
                "radius",
                "methods",
                "region",
                "grid_radial",
                "grid_angular",
                "budget",
            ],
            Kind::Growth => &[
                "radii",
                "method",
                "region",
                "grid_radial",
                "grid_angular",
                "budget",
            ],
            Kind::Degree => &["budget", "grid_radial", "grid_angular"],
            Kind::Cone => &["budget", "radii", "grid_radial", "grid_angular"],
            Kind::Sequence => &["last", "radius", "budget", "grid_radial", "grid_angular"],
            Kind::Montel => &["first", "last", "eps", "tol", "budget", "cell", "fiber_tol"],
            Kind::Hausdorff => &[
                "delta",
                "ladder_start",
                "ladder_ratio",
                "ladder_levels",
                "compare",
                "lipschitz_scales",
                "variant",
                "normalization",
                "cell",
                "fiber_tol",
                "budget",
            ],
            Kind::ProperCoords => &["k", "radius", "trials", "budget"],
            Kind::Reconstruct => &["sigma", "budget", "degree_bound", "radius"],
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Experiment {
    pub kind: Kind,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    #[default]
    Affine,
    Projective,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Target {
    pub preset: Option<String>,
    pub polynomial: Option<String>,
    pub nvars: Option<usize>,
    pub space: Option<Space>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub radius: Option<f64>,
    pub radii: Option<Vec<f64>>,
    pub method: Option<String>,
    pub methods: Option<Vec<String>>,
    pub region: Option<String>,
    pub grid_radial: Option<usize>,
    pub grid_angular: Option<usize>,
    pub budget: Option<usize>,
    pub k: Option<usize>,
    pub trials: Option<usize>,
    pub first: Option<usize>,
    pub last: Option<usize>,
    pub eps: Option<f64>,
    pub tol: Option<f64>,
    pub cell: Option<f64>,
    pub fiber_tol: Option<f64>,
    pub delta: Option<f64>,
    pub ladder_start: Option<f64>,
    pub ladder_ratio: Option<f64>,
    pub ladder_levels: Option<usize>,
    pub compare: Option<String>,
    pub lipschitz_scales: Option<Vec<f64>>,
    pub variant: Option<String>,
    pub normalization: Option<String>,
    pub sigma: Option<usize>,
    pub degree_bound: Option<usize>,
}

impl Params {
    fn set_keys(&self) -> Vec<&'static str> {
        let v = serde_json::to_value(self).expect("params serialize");
        let obj = v.as_object().expect("params are a table");
        ALL_PARAMS
            .iter()
            .copied()
            .filter(|k| obj.get(*k).is_some_and(|x| !x.is_null()))
            .collect()
    }
}

const ALL_PARAMS: &[&str] = &[
    "radius",
    "radii",
    "method",
    "methods",
    "region",
    "grid_radial",
    "grid_angular",
    "budget",
    "k",
    "trials",
    "first",
    "last",
    "eps",
    "tol",
    "cell",
    "fiber_tol",
    "delta",
    "ladder_start",
    "ladder_ratio",
    "ladder_levels",
    "compare",
    "lipschitz_scales",
    "variant",
    "normalization",
    "sigma",
    "degree_bound",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub target: Target,
    #[serde(default)]
    pub params: Params,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "config line {l}: {}", self.message),
            None => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// 1-based line of `key = ...` inside `[section]`, or of the section header
/// when the key is absent.
fn line_of(text: &str, section: &str, key: Option<&str>) -> Option<usize> {
    let mut current = String::new();
    let mut header = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = name.trim().to_string();
            if current == section {
                header = Some(i + 1);
            }
            continue;
        }
        if current == section {
            if let Some(k) = key {
                if line.split('=').next().map(str::trim) == Some(k) {
                    return Some(i + 1);
                }
            }
        }
    }
    header
}

impl FromStr for ExperimentConfig {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| ConfigError {
            line: e.span().map(|s| text[..s.start].matches('\n').count() + 1),
            message: e.message().to_string(),
        })?;
        let kind = cfg.experiment.kind;
        if kind.needs_seed() && cfg.experiment.seed.is_none() {
            return Err(ConfigError {
                line: line_of(text, "experiment", None),
                message: format!("missing field `seed` in [experiment] (required for kind {kind})"),
            });
        }
        for key in cfg.params.set_keys() {
            if !kind.params().contains(&key) {
                return Err(ConfigError {
                    line: line_of(text, "params", Some(key)),
                    message: format!("parameter `{key}` is not used by kind {kind}"),
                });
            }
        }
        let t = &cfg.target;
        match (&t.preset, &t.polynomial) {
            (Some(_), Some(_)) => {
                return Err(ConfigError {
                    line: line_of(text, "target", Some("polynomial")),
                    message: "give either `preset` or `polynomial` in [target], not both".into(),
                })
            }
            (None, None) => {
                return Err(ConfigError {
                    line: line_of(text, "target", None),
                    message: "missing field `preset` or `polynomial` in [target]".into(),
                })
            }
            (Some(_), None) if t.nvars.is_some() || t.space.is_some() => {
                return Err(ConfigError {
                    line: line_of(
                        text,
                        "target",
                        Some(if t.nvars.is_some() { "nvars" } else { "space" }),
                    ),
                    message: "`nvars` and `space` only apply to `polynomial` targets".into(),
                })
            }
            _ => {}
        }
        Ok(cfg)
    }
}

impl ExperimentConfig {
    pub fn from_path(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            line: None,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        text.parse()
    }
}
