//! Volume estimators: Gram quadrature, Kähler-form pullback, slice counting,
//! Fubini–Study volume, and radial profiles.

mod graph;
mod profile;
mod projective;
mod sheets;
mod slice;

pub use graph::{
    gram_volume_graph, graph_volume_density, wirtinger_minimality_probe, wirtinger_volume_graph,
    GraphVolumeDensity, MinimalityRow, Perturbation,
};
pub use profile::{
    radial_profile, PlotSeries, ProfileOptions, ProfileRegion, RadialProfile, VolumeTarget,
};
pub use projective::{
    fs_area_quadrature, fs_volume_projective, projective_slice_counts, sphere_volume, FS_GRID,
};
pub use sheets::{gram_volume_sheets, wirtinger_volume_sheets, SHEET_GRID};
pub use slice::{
    slice_calibration, slice_volume, slice_volume_affine, Calibration, CALIBRATION_LINES,
    CALIBRATION_SEED,
};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::linalg::hdot;
use crate::poly::Polynomial;
use crate::quadrature::PolarGrid;
use crate::varieties::{AffineVarietySpec, GraphRegion, GraphSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Gram,
    Wirtinger,
    Slice,
    Hopf,
    FubiniStudy,
}

impl std::str::FromStr for Method {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gram" => Ok(Method::Gram),
            "wirtinger" => Ok(Method::Wirtinger),
            "slice" => Ok(Method::Slice),
            "hopf" => Ok(Method::Hopf),
            "fubini_study" => Ok(Method::FubiniStudy),
            _ => Err(LabError::input(format!(
                "unknown volume method '{s}' (expected gram, wirtinger, slice, hopf or fubini_study)"
            ))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Gram => "gram",
            Method::Wirtinger => "wirtinger",
            Method::Slice => "slice",
            Method::Hopf => "hopf",
            Method::FubiniStudy => "fubini_study",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VolumeEstimate {
    pub value: f64,
    pub std_error: f64,
    pub method: Method,
    pub sample_count: usize,
    pub seed: Option<u64>,
    /// Samples skipped as singular or degenerate.
    pub skipped: usize,
    /// More than 1% of samples were skipped.
    pub degraded: bool,
}

impl VolumeEstimate {
    pub(crate) fn new(
        value: f64,
        std_error: f64,
        method: Method,
        sample_count: usize,
        seed: Option<u64>,
    ) -> Self {
        VolumeEstimate {
            value,
            std_error,
            method,
            sample_count,
            seed,
            skipped: 0,
            degraded: false,
        }
    }

    pub(crate) fn with_skipped(mut self, skipped: usize, attempted: usize) -> Self {
        self.skipped = skipped;
        self.degraded = attempted > 0 && skipped as f64 > 0.01 * attempted as f64;
        self
    }
}

/// The flat Kähler form omega(u, v) = -Im <u, v> on C^n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StandardKahlerForm {
    pub n: usize,
}

impl StandardKahlerForm {
    pub fn new(n: usize) -> Self {
        StandardKahlerForm { n }
    }

    pub fn eval(&self, u: &[Complex64], v: &[Complex64]) -> f64 {
        debug_assert!(u.len() == self.n && v.len() == self.n);
        -hdot(u, v).im
    }

    /// The complex structure J: multiplication by i.
    pub fn j(v: &[Complex64]) -> Vec<Complex64> {
        v.iter().map(|c| c * Complex64::i()).collect()
    }
}

/// Area element sqrt(EG - F^2) of the real 2-frame (a, b).
pub(crate) fn real_gram_area(a: &[Complex64], b: &[Complex64]) -> f64 {
    let e: f64 = a.iter().map(|c| c.norm_sqr()).sum();
    let g: f64 = b.iter().map(|c| c.norm_sqr()).sum();
    let f = hdot(a, b).re;
    (e * g - f * f).max(0.0).sqrt()
}

/// If a plane curve is the graph `z_j = g(z_other)`, the graph over the other
/// coordinate. Swapping coordinates is unitary, so volumes are unchanged.
pub fn graph_of_curve(spec: &AffineVarietySpec, domain_radius: f64) -> Option<GraphSpec> {
    if spec.ambient_dim() != 2 {
        return None;
    }
    let (j, g) = spec.graph_form()?;
    let other = 1 - j;
    let terms: Vec<(Vec<u32>, Complex64)> = g
        .monomials()
        .map(|m| (vec![m.exponents[other]], m.coefficient))
        .collect();
    let uni = Polynomial::from_terms(1, terms).ok()?;
    GraphSpec::from_polynomial(format!("{}", spec.polynomial().ok()?), domain_radius, &uni).ok()
}

/// Gram volume of a plane curve inside B(0, R): graph quadrature when the
/// curve is a graph, sheet quadrature otherwise.
pub fn gram_volume_affine(
    spec: &AffineVarietySpec,
    radius: f64,
    grid: &PolarGrid,
    sheet_grid: &PolarGrid,
    seed: u64,
) -> Result<VolumeEstimate> {
    match graph_of_curve(spec, f64::INFINITY) {
        Some(g) => gram_volume_graph(&g, GraphRegion::AmbientBall(radius), grid),
        None => gram_volume_sheets(spec, radius, sheet_grid, seed),
    }
}

/// Kähler-form volume of a plane curve inside B(0, R).
pub fn wirtinger_volume(
    spec: &AffineVarietySpec,
    radius: f64,
    grid: &PolarGrid,
    sheet_grid: &PolarGrid,
    seed: u64,
) -> Result<VolumeEstimate> {
    match graph_of_curve(spec, f64::INFINITY) {
        Some(g) => wirtinger_volume_graph(&g, GraphRegion::AmbientBall(radius), grid),
        None => wirtinger_volume_sheets(spec, radius, sheet_grid, seed),
    }
}
