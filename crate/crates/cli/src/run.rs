//! Dispatch of one experiment and the files it leaves behind.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use cxlab::growth::{
    bishop_growth_test, cone_growth_check, cone_of, cone_slice_relation, degree_by_slicing,
    degree_by_volume, reconstruct_fiber_polynomial, FiberSource, ReconstructOptions,
};
use cxlab::hausdorff::{
    box_counting, geometric_ladder, hausdorff_distance, HausdorffConfig, Normalization, Variant,
};
use cxlab::limits::{
    graph_limit_is_function, montel_extract, sequence_limit_check, SequenceBudget, SequenceVerdict,
};
use cxlab::quadrature::PolarGrid;
use cxlab::varieties::{
    find_proper_coordinates, sample_graph_in_region, sample_hypersurface, AffineVarietySpec,
    GraphRegion, ProjectiveVarietySpec,
};
use cxlab::volume::{
    fs_area_quadrature, fs_volume_projective, gram_volume_affine, gram_volume_graph,
    graph_of_curve, radial_profile, slice_volume_affine, wirtinger_volume, wirtinger_volume_graph,
    Method, PlotSeries, ProfileOptions, ProfileRegion, VolumeEstimate, VolumeTarget, FS_GRID,
    SHEET_GRID,
};
use cxlab::{Ball, LabError, PointCloud, Polynomial, Result};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, Kind, Params, Space};
use crate::presets::{self, Category};

/// A data file written next to the reports.
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

pub struct Outcome {
    /// Module payload; identical bytes for identical configs.
    pub results: Value,
    pub artifacts: Vec<Artifact>,
    pub plots: Vec<PlotSeries>,
    /// Set when the experiment ran but could not decide its question.
    pub inconclusive: Option<String>,
}

impl Outcome {
    fn new(results: impl Serialize) -> Self {
        Outcome {
            results: serde_json::to_value(results).expect("results serialize"),
            artifacts: Vec::new(),
            plots: Vec::new(),
            inconclusive: None,
        }
    }
}

/// What the target section resolves to.
enum Resolved {
    Affine(AffineVarietySpec),
    Projective(ProjectiveVarietySpec),
    Preset(&'static presets::Preset),
}

fn resolve(cfg: &ExperimentConfig) -> Result<Resolved> {
    let t = &cfg.target;
    if let Some(name) = &t.preset {
        return Ok(Resolved::Preset(presets::find(name)?));
    }
    let text = t
        .polynomial
        .as_deref()
        .expect("config validation guarantees a target");
    let p = Polynomial::parse(text, t.nvars)?;
    Ok(match t.space.unwrap_or_default() {
        Space::Affine => Resolved::Affine(AffineVarietySpec::hypersurface(p)?),
        Space::Projective => Resolved::Projective(ProjectiveVarietySpec::hypersurface(p)?),
    })
}

fn projective_of(r: &Resolved) -> Result<ProjectiveVarietySpec> {
    match r {
        Resolved::Projective(s) => Ok(s.clone()),
        Resolved::Preset(p) => p.projective_spec(),
        _ => Err(LabError::input("this experiment needs a projective target")),
    }
}

/// A curve or graph target for volume-type experiments.
fn volume_target(r: &Resolved) -> Result<VolumeTarget> {
    match r {
        Resolved::Affine(s) => Ok(VolumeTarget::Affine(s.clone())),
        Resolved::Preset(p) => match p.category {
            Category::Curve => Ok(VolumeTarget::Affine(p.affine()?)),
            Category::Graph => Ok(VolumeTarget::Graph(p.graph()?)),
            _ => Err(LabError::input(format!(
                "preset '{}' is not a curve or graph",
                p.name
            ))),
        },
        Resolved::Projective(_) => Err(LabError::input(
            "this experiment needs an affine curve or graph target",
        )),
    }
}

fn grid(p: &Params, default: PolarGrid) -> Result<PolarGrid> {
    PolarGrid::new(
        p.grid_radial.unwrap_or(default.radial),
        p.grid_angular.unwrap_or(default.angular),
    )
}

fn region(p: &Params) -> Result<ProfileRegion> {
    match p.region.as_deref().unwrap_or("ball") {
        "ball" => Ok(ProfileRegion::Ball),
        "cylinder" => Ok(ProfileRegion::Cylinder),
        other => Err(LabError::input(format!(
            "unknown region '{other}' (expected ball or cylinder)"
        ))),
    }
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| LabError::input(format!("writing CSV: {e}"));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    w.into_inner()
        .map_err(|e| LabError::input(format!("writing CSV: {e}")))
}

fn cloud_bytes(cloud: &PointCloud) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    cloud.write_csv(&mut buf)?;
    Ok(buf)
}

/// Run the experiment without touching the file system.
pub fn execute(cfg: &ExperimentConfig) -> Result<Outcome> {
    let target = resolve(cfg)?;
    let seed = cfg.experiment.seed.unwrap_or(0);
    let p = &cfg.params;
    match cfg.experiment.kind {
        Kind::Volume => run_volume(&target, p, seed),
        Kind::Growth => run_growth(&target, p, seed),
        Kind::Degree => run_degree(&target, p, seed),
        Kind::Cone => run_cone(&target, p, seed),
        Kind::Sequence => run_sequence(&target, p, seed),
        Kind::Montel => run_montel(&target, p),
        Kind::Hausdorff => run_hausdorff(&target, p),
        Kind::ProperCoords => run_proper(&target, p, seed),
        Kind::Reconstruct => run_reconstruct(&target, p, seed),
    }
}

fn run_volume(target: &Resolved, p: &Params, seed: u64) -> Result<Outcome> {
    let radius = p.radius.unwrap_or(1.0);
    let reg = region(p)?;
    let methods: Vec<Method> = p
        .methods
        .clone()
        .unwrap_or_else(|| vec!["gram".into()])
        .iter()
        .map(|m| m.parse())
        .collect::<Result<_>>()?;
    if methods.is_empty() {
        return Err(LabError::input("`methods` must name at least one method"));
    }
    let lines = p.budget.unwrap_or(100_000);
    let projective_only = methods
        .iter()
        .all(|m| matches!(m, Method::Hopf | Method::FubiniStudy));
    let mut estimates: Vec<VolumeEstimate> = Vec::new();
    let label;
    if projective_only {
        let spec = projective_of(target)?;
        label = spec.polynomial()?.to_string();
        for m in &methods {
            estimates.push(match m {
                Method::Hopf => fs_volume_projective(&spec, lines, seed)?,
                _ => fs_area_quadrature(&spec, &grid(p, FS_GRID)?, seed)?,
            });
        }
    } else {
        let vt = volume_target(target)?;
        label = vt.label();
        // Graph form, for cylinders and for exact graph quadrature.
        let graph = match &vt {
            VolumeTarget::Graph(g) => Some(g.clone()),
            VolumeTarget::Affine(s) => graph_of_curve(s, f64::INFINITY),
        };
        let graph_region = match reg {
            ProfileRegion::Ball => GraphRegion::AmbientBall(radius),
            ProfileRegion::Cylinder => GraphRegion::BaseDisc(radius),
        };
        if reg == ProfileRegion::Cylinder && graph.is_none() {
            return Err(LabError::input("cylinder regions need a graph target"));
        }
        let g = grid(p, PolarGrid::default())?;
        let sheets = grid(p, SHEET_GRID)?;
        for m in &methods {
            let est = match (m, &graph, &vt) {
                (Method::Gram, Some(gr), _) => gram_volume_graph(gr, graph_region, &g)?,
                (Method::Wirtinger, Some(gr), _) => wirtinger_volume_graph(gr, graph_region, &g)?,
                (Method::Gram, None, VolumeTarget::Affine(s)) => {
                    gram_volume_affine(s, radius, &g, &sheets, seed)?
                }
                (Method::Wirtinger, None, VolumeTarget::Affine(s)) => {
                    wirtinger_volume(s, radius, &g, &sheets, seed)?
                }
                (Method::Slice, _, VolumeTarget::Affine(s)) if reg == ProfileRegion::Ball => {
                    slice_volume_affine(s, radius, lines, seed)?
                }
                _ => {
                    return Err(LabError::input(format!(
                        "method '{m}' does not apply to target '{label}' in a {reg:?} region"
                    )))
                }
            };
            estimates.push(est);
        }
    }
    let base = estimates[0].value;
    let relative: Vec<f64> = estimates
        .iter()
        .map(|e| (e.value - base).abs() / base.abs())
        .collect();
    Ok(Outcome::new(json!({
        "target": label,
        "radius": radius,
        "region": reg,
        "estimates": estimates,
        "relative_to_first": relative,
    })))
}

fn run_growth(target: &Resolved, p: &Params, seed: u64) -> Result<Outcome> {
    let vt = volume_target(target)?;
    let radii = p.radii.clone().unwrap_or_else(|| vec![1.0, 2.0, 4.0, 8.0]);
    let method: Method = p.method.as_deref().unwrap_or("gram").parse()?;
    let mut opts = ProfileOptions {
        method,
        region: region(p)?,
        ..Default::default()
    };
    opts.grid = grid(p, opts.grid)?;
    if p.grid_radial.is_some() || p.grid_angular.is_some() {
        opts.sheet_grid = opts.grid;
    }
    if let Some(b) = p.budget {
        opts.lines = b;
    }
    let profile = radial_profile(&vt, &radii, &opts, seed)?;
    let verdict = bishop_growth_test(&profile, vt.pure_dim())?;
    let mut csv = Vec::new();
    profile.write_csv(&mut csv)?;
    let mut out = Outcome::new(json!({ "profile": profile, "verdict": verdict }));
    out.plots.push(profile.plot_series());
    out.artifacts.push(Artifact {
        name: "profile.csv".into(),
        bytes: csv,
    });
    Ok(out)
}

fn run_degree(target: &Resolved, p: &Params, seed: u64) -> Result<Outcome> {
    let spec = projective_of(target)?;
    let slicing = degree_by_slicing(&spec, p.budget.unwrap_or(2000), seed)?;
    let volume = degree_by_volume(&spec, &grid(p, FS_GRID)?, seed)?;
    let agree = slicing.degree == volume.degree;
    let mut out = Outcome::new(json!({
        "target": spec.polynomial()?.to_string(),
        "slicing": slicing,
        "volume": volume,
        "agree": agree,
    }));
    if !agree || volume.low_confidence {
        out.inconclusive = Some(format!(
            "slicing gives {} and volume gives {} (raw {:.4})",
            slicing.degree, volume.degree, volume.raw_value
        ));
    }
    Ok(out)
}

fn run_cone(target: &Resolved, p: &Params, seed: u64) -> Result<Outcome> {
    let spec = projective_of(target)?;
    let lines = p.budget.unwrap_or(50_000);
    let radii = p.radii.clone().unwrap_or_else(|| vec![1.0, 2.0, 4.0, 8.0]);
    let relation = cone_slice_relation(&spec, lines, &grid(p, FS_GRID)?, seed)?;
    let growth = cone_growth_check(&cone_of(&spec), &radii, lines, seed)?;
    let rows = growth.radii.iter().zip(&growth.volumes).map(|(r, v)| {
        vec![
            format!("{r:?}"),
            format!("{:?}", v.value),
            format!("{:?}", v.std_error),
        ]
    });
    let csv = csv_bytes(&["R", "volume", "std_error"], rows)?;
    let series = PlotSeries {
        label: format!("cone over {}", spec.polynomial()?),
        x: growth.radii.iter().map(|r| r.ln()).collect(),
        y: growth.volumes.iter().map(|v| v.value.ln()).collect(),
    };
    let mut out = Outcome::new(json!({
        "target": spec.polynomial()?.to_string(),
        "slice_relation": relation,
        "growth": growth,
    }));
    out.plots.push(series);
    out.artifacts.push(Artifact {
        name: "cone_volumes.csv".into(),
        bytes: csv,
    });
    Ok(out)
}

fn run_sequence(target: &Resolved, p: &Params, seed: u64) -> Result<Outcome> {
    let Resolved::Preset(preset) = target else {
        return Err(LabError::input(
            "sequence experiments need a sequence preset",
        ));
    };
    let (seq, candidate) = preset.sequence(p.last, p.radius.unwrap_or(1.0))?;
    let mut budget = SequenceBudget::default();
    if let Some(b) = p.budget {
        budget.cloud_density = b;
    }
    budget.grid = grid(p, budget.grid)?;
    let report = sequence_limit_check(&seq, candidate, &budget, seed)?;
    let rows = report
        .indices
        .iter()
        .zip(&report.volumes)
        .zip(&report.distances)
        .map(|((n, v), d)| {
            vec![
                n.to_string(),
                v.as_ref()
                    .map(|v| format!("{:?}", v.value))
                    .unwrap_or_default(),
                d.map(|d| format!("{d:?}")).unwrap_or_default(),
            ]
        });
    let csv = csv_bytes(&["n", "volume", "distance"], rows)?;
    let (x, y): (Vec<f64>, Vec<f64>) = report
        .indices
        .iter()
        .zip(&report.distances)
        .filter_map(|(n, d)| d.filter(|d| *d > 0.0).map(|d| ((*n as f64).ln(), d.ln())))
        .unzip();
    let volume_series = PlotSeries {
        label: format!("{} volumes", report.label),
        x: report.indices.iter().map(|n| *n as f64).collect(),
        y: report
            .volumes
            .iter()
            .map(|v| v.as_ref().map_or(f64::NAN, |v| v.value))
            .collect(),
    };
    let mut out = Outcome::new(&report);
    out.plots.push(PlotSeries {
        label: format!("{} log distance against log n", report.label),
        x,
        y,
    });
    out.plots.push(volume_series);
    out.artifacts.push(Artifact {
        name: "sequence.csv".into(),
        bytes: csv,
    });
    out.artifacts.push(Artifact {
        name: "limit_cloud.csv".into(),
        bytes: cloud_bytes(&report.limit_cloud)?,
    });
    if report.verdict == SequenceVerdict::Inconclusive {
        out.inconclusive =
            Some("bounded volumes, but the limit could not be confirmed analytic".into());
    }
    Ok(out)
}

fn run_montel(target: &Resolved, p: &Params) -> Result<Outcome> {
    let Resolved::Preset(preset) = target else {
        return Err(LabError::input("montel experiments need a family preset"));
    };
    let fam = preset.family()?;
    let first = p.first.unwrap_or(1);
    let last = p.last.unwrap_or(100);
    if last < first {
        return Err(LabError::input("`last` must not be below `first`"));
    }
    let indices: Vec<usize> = (first..=last).collect();
    let sel = montel_extract(
        &fam,
        &indices,
        p.eps.unwrap_or(0.1),
        p.budget.unwrap_or(8),
        p.tol.unwrap_or(1e-6),
    )?;
    let limit = sel.limit_cloud()?;
    let check =
        graph_limit_is_function(&limit, p.cell.unwrap_or(0.05), p.fiber_tol.unwrap_or(1e-6))?;
    let series = PlotSeries {
        label: format!("{} tail spread", fam.label),
        x: sel.selected.iter().map(|m| *m as f64).collect(),
        y: sel
            .error_ladder
            .iter()
            .map(|e| e.max(f64::MIN_POSITIVE).log10())
            .collect(),
    };
    let mut out =
        Outcome::new(json!({ "family": fam.label, "selection": sel, "limit_is_function": check }));
    out.plots.push(series);
    out.artifacts.push(Artifact {
        name: "limit_samples.csv".into(),
        bytes: cloud_bytes(&limit)?,
    });
    if !sel.tolerance_reached {
        out.inconclusive = Some(format!(
            "tolerance {} not reached; achieved {:.3e}",
            sel.tol, sel.achieved_tol
        ));
    }
    Ok(out)
}

fn run_hausdorff(target: &Resolved, p: &Params) -> Result<Outcome> {
    let Resolved::Preset(preset) = target else {
        return Err(LabError::input("hausdorff experiments need a shape preset"));
    };
    let cloud = preset.shape()?;
    let cfg = HausdorffConfig {
        variant: match p.variant.as_deref().unwrap_or("sum") {
            "sum" => Variant::Sum,
            "max" => Variant::Max,
            other => return Err(LabError::input(format!("unknown variant '{other}'"))),
        },
        normalization: match p.normalization.as_deref().unwrap_or("standard") {
            "standard" => Normalization::Standard,
            "pi_power" => Normalization::PiPower,
            other => return Err(LabError::input(format!("unknown normalization '{other}'"))),
        },
    };
    let delta = p.delta.unwrap_or(preset.shape_dimension());
    let ladder = geometric_ladder(
        p.ladder_start.unwrap_or(0.25),
        p.ladder_ratio.unwrap_or(2.0),
        p.ladder_levels.unwrap_or(5),
    );
    let cover = box_counting(&cloud, delta, &cfg, &ladder)?;
    let mut results = json!({ "shape": preset.name, "points": cloud.len(), "covering": cover });
    if let Some(other) = &p.compare {
        let b = presets::find(other)?.shape()?;
        let max = HausdorffConfig {
            variant: Variant::Max,
            ..cfg
        };
        let sum = HausdorffConfig {
            variant: Variant::Sum,
            ..cfg
        };
        results["distance"] = json!({
            "compare": other,
            "sum": hausdorff_distance(&cloud, &b, &sum)?,
            "max": hausdorff_distance(&cloud, &b, &max)?,
        });
    }
    if let Some(scales) = &p.lipschitz_scales {
        let rows = scales
            .iter()
            .map(|&l| {
                let scaled = cloud.map_points(|z| z.iter().map(|c| c * l).collect());
                let m = box_counting(&scaled, delta, &cfg, &ladder)?.measure;
                Ok(json!({ "lambda": l, "measure": m, "ratio_over_lambda_delta": m / cover.measure / l.powf(delta) }))
            })
            .collect::<Result<Vec<Value>>>()?;
        results["lipschitz"] = Value::Array(rows);
    }
    if let Some(tol) = p.fiber_tol {
        results["limit_is_function"] = serde_json::to_value(graph_limit_is_function(
            &cloud,
            p.cell.unwrap_or(0.05),
            tol,
        )?)
        .expect("check serializes");
    }
    let rows = ladder
        .iter()
        .zip(&cover.counts)
        .map(|(e, c)| vec![format!("{e:?}"), c.to_string()]);
    let mut out = Outcome::new(results);
    out.artifacts.push(Artifact {
        name: "box_counts.csv".into(),
        bytes: csv_bytes(&["eps", "count"], rows)?,
    });
    out.plots.push(PlotSeries {
        label: format!("{} box counts", preset.name),
        x: ladder.iter().map(|e| -e.ln()).collect(),
        y: cover.counts.iter().map(|c| (*c as f64).ln()).collect(),
    });
    Ok(out)
}

fn run_proper(target: &Resolved, p: &Params, seed: u64) -> Result<Outcome> {
    let radius = p.radius.unwrap_or(1.0);
    let cloud = match volume_target(target)? {
        VolumeTarget::Affine(s) => sample_hypersurface(
            &s,
            &Ball::origin(s.ambient_dim(), radius)?,
            p.budget.unwrap_or(2000),
            seed,
        )?,
        VolumeTarget::Graph(g) => {
            sample_graph_in_region(&g, GraphRegion::AmbientBall(radius), p.budget.unwrap_or(30))?
        }
    };
    let found = find_proper_coordinates(
        &cloud,
        p.k.unwrap_or(1),
        radius,
        p.trials.unwrap_or(20),
        seed,
    )?;
    let mut out = Outcome::new(json!({ "sample_size": cloud.len(), "coordinates": found }));
    out.artifacts.push(Artifact {
        name: "sample.csv".into(),
        bytes: cloud_bytes(&cloud)?,
    });
    if !found.proper {
        out.inconclusive = Some(format!(
            "no proper projection among {} candidates",
            found.candidates_tried
        ));
    }
    Ok(out)
}

fn run_reconstruct(target: &Resolved, p: &Params, seed: u64) -> Result<Outcome> {
    let source = match volume_target(target)? {
        VolumeTarget::Affine(s) => FiberSource::Spec(s, None),
        VolumeTarget::Graph(g) => FiberSource::Graph(g),
    };
    let opts = ReconstructOptions {
        sigma: p.sigma,
        nodes: p.budget.unwrap_or(24),
        degree_bound: p.degree_bound,
        base_radius: p.radius.unwrap_or(1.0),
        seed,
    };
    Ok(Outcome::new(reconstruct_fiber_polynomial(&source, &opts)?))
}

#[derive(Serialize)]
struct Versions {
    cxlab: &'static str,
}

#[derive(Serialize)]
struct Report<'a> {
    config: &'a ExperimentConfig,
    results: &'a Value,
    inconclusive: &'a Option<String>,
    wall_time_seconds: f64,
    threads: usize,
    versions: Versions,
}

/// Serialized results payload, the part that must be byte-reproducible.
pub fn results_bytes(out: &Outcome) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(&out.results).expect("results serialize");
    s.push('\n');
    s.into_bytes()
}

/// Run and write `results.json`, `report.json`, `plot.json` and any CSVs
/// into `dir`.
pub fn run(cfg: &ExperimentConfig, dir: &Path) -> std::result::Result<Outcome, RunError> {
    let start = Instant::now();
    let out = execute(cfg).map_err(RunError::Lab)?;
    let elapsed = start.elapsed().as_secs_f64();
    fs::create_dir_all(dir).map_err(|e| RunError::Io(dir.to_path_buf(), e))?;
    let write = |name: &str, bytes: &[u8]| -> std::result::Result<(), RunError> {
        let path = dir.join(name);
        fs::write(&path, bytes).map_err(|e| RunError::Io(path, e))
    };
    write("results.json", &results_bytes(&out))?;
    let report = Report {
        config: cfg,
        results: &out.results,
        inconclusive: &out.inconclusive,
        wall_time_seconds: elapsed,
        threads: rayon::current_num_threads(),
        versions: Versions {
            cxlab: env!("CARGO_PKG_VERSION"),
        },
    };
    write(
        "report.json",
        serde_json::to_string_pretty(&report)
            .expect("report serializes")
            .as_bytes(),
    )?;
    if !out.plots.is_empty() {
        write(
            "plot.json",
            serde_json::to_string_pretty(&out.plots)
                .expect("plots serialize")
                .as_bytes(),
        )?;
    }
    for a in &out.artifacts {
        write(&a.name, &a.bytes)?;
    }
    Ok(out)
}

#[derive(Debug)]
pub enum RunError {
    Lab(LabError),
    Io(PathBuf, std::io::Error),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Lab(e) => write!(f, "{e}"),
            RunError::Io(p, e) => write!(f, "cannot write {}: {e}", p.display()),
        }
    }
}

impl std::error::Error for RunError {}
