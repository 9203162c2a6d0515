use std::io::Write;

use serde::Serialize;

use super::{
    gram_volume_affine, gram_volume_graph, graph_of_curve, slice_volume, wirtinger_volume,
    wirtinger_volume_graph, Method, VolumeEstimate, SHEET_GRID,
};
use crate::error::{LabError, Result};
use crate::quadrature::PolarGrid;
use crate::rng::{child_seed, TAG_LADDER};
use crate::varieties::{AffineVarietySpec, GraphRegion, GraphSpec};

/// What a radial profile measures.
#[derive(Clone, Debug)]
pub enum VolumeTarget {
    Affine(AffineVarietySpec),
    Graph(GraphSpec),
}

impl VolumeTarget {
    pub fn label(&self) -> String {
        match self {
            VolumeTarget::Affine(s) => s
                .polynomial()
                .map(|p| p.to_string())
                .unwrap_or_else(|_| "variety".into()),
            VolumeTarget::Graph(g) => g.label().to_string(),
        }
    }

    /// Pure dimension k of the target.
    pub fn pure_dim(&self) -> usize {
        match self {
            VolumeTarget::Affine(s) => s.pure_dim(),
            VolumeTarget::Graph(_) => 1,
        }
    }
}

/// Ball B(0, R) of the ambient space, or the cylinder |base| <= R over a graph.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileRegion {
    #[default]
    Ball,
    Cylinder,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProfileOptions {
    pub method: Method,
    pub region: ProfileRegion,
    /// Grid for graph quadrature.
    pub grid: PolarGrid,
    /// Grid for sheet quadrature of curves that are not graphs.
    pub sheet_grid: PolarGrid,
    /// Lines per radius for slicing.
    pub lines: usize,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions {
            method: Method::Gram,
            region: ProfileRegion::Ball,
            grid: PolarGrid::default(),
            sheet_grid: SHEET_GRID,
            lines: 100_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadialProfile {
    pub label: String,
    pub radii: Vec<f64>,
    pub volumes: Vec<VolumeEstimate>,
}

/// Plot data: x and y arrays with a label.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlotSeries {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl RadialProfile {
    pub fn values(&self) -> Vec<f64> {
        self.volumes.iter().map(|v| v.value).collect()
    }

    /// CSV with header `R,volume,std_error,method`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| LabError::input(format!("writing profile CSV: {e}"));
        out.write_record(["R", "volume", "std_error", "method"])
            .map_err(io)?;
        for (r, v) in self.radii.iter().zip(&self.volumes) {
            out.write_record([
                format!("{r:?}"),
                format!("{:?}", v.value),
                format!("{:?}", v.std_error),
                v.method.to_string(),
            ])
            .map_err(io)?;
        }
        out.flush()
            .map_err(|e| LabError::input(format!("writing profile CSV: {e}")))
    }

    /// log V against log R, skipping empty volumes.
    pub fn plot_series(&self) -> PlotSeries {
        let (x, y) = self
            .radii
            .iter()
            .zip(&self.volumes)
            .filter(|(_, v)| v.value > 0.0)
            .map(|(r, v)| (r.ln(), v.value.ln()))
            .unzip();
        PlotSeries {
            label: self.label.clone(),
            x,
            y,
        }
    }
}

fn mismatch(method: Method, what: &str) -> LabError {
    LabError::input(format!("method '{method}' does not apply to {what}"))
}

fn estimate_at(
    target: &VolumeTarget,
    radius: f64,
    opts: &ProfileOptions,
    seed: u64,
) -> Result<VolumeEstimate> {
    match target {
        VolumeTarget::Graph(g) => {
            let region = match opts.region {
                ProfileRegion::Ball => GraphRegion::AmbientBall(radius),
                ProfileRegion::Cylinder => GraphRegion::BaseDisc(radius),
            };
            match opts.method {
                Method::Gram => gram_volume_graph(g, region, &opts.grid),
                Method::Wirtinger => wirtinger_volume_graph(g, region, &opts.grid),
                m => Err(mismatch(m, "holomorphic graphs")),
            }
        }
        VolumeTarget::Affine(spec) => {
            if opts.region == ProfileRegion::Cylinder {
                let g = graph_of_curve(spec, f64::INFINITY).ok_or_else(|| {
                    LabError::Unsupported("cylinder volumes need a curve in graph form".into())
                })?;
                return estimate_at(&VolumeTarget::Graph(g), radius, opts, seed);
            }
            match opts.method {
                Method::Gram => {
                    gram_volume_affine(spec, radius, &opts.grid, &opts.sheet_grid, seed)
                }
                Method::Wirtinger => {
                    wirtinger_volume(spec, radius, &opts.grid, &opts.sheet_grid, seed)
                }
                Method::Slice => slice_volume(spec, radius, opts.lines, seed),
                m => Err(mismatch(m, "affine varieties")),
            }
        }
    }
}

/// Volumes of the target inside nested regions of the given radii.
///
/// A volume that drops by more than the combined error bars is reported as a
/// numerical error, since nested regions cannot lose volume.
pub fn radial_profile(
    target: &VolumeTarget,
    radii: &[f64],
    opts: &ProfileOptions,
    seed: u64,
) -> Result<RadialProfile> {
    if radii.len() < 4 {
        return Err(LabError::input("a radial profile needs at least 4 radii"));
    }
    if radii[0] <= 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(LabError::input(
            "radii must be positive and strictly ascending",
        ));
    }
    let volumes = radii
        .iter()
        .enumerate()
        .map(|(i, &r)| estimate_at(target, r, opts, child_seed(seed, TAG_LADDER, i as u64)))
        .collect::<Result<Vec<_>>>()?;
    for w in volumes.windows(2) {
        if w[1].value < w[0].value - (w[0].std_error + w[1].std_error) {
            return Err(LabError::numerical(
                format!(
                    "volume decreased along the radius ladder ({} -> {})",
                    w[0].value, w[1].value
                ),
                w[0].value - w[1].value,
            ));
        }
    }
    Ok(RadialProfile {
        label: target.label(),
        radii: radii.to_vec(),
        volumes,
    })
}
