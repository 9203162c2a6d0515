//! Bounded-volume sequences of varieties, their Hausdorff limits, and normal
//! families of holomorphic functions.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cloud::{Ball, PointCloud, SourceTag};
use crate::error::{LabError, Result};
use crate::growth::{
    reconstruct_fiber_polynomial, FiberSource, ReconstructOptions, NON_ALGEBRAIC_RESIDUAL,
};
use crate::hausdorff::{box_counting, geometric_ladder, local_convergence_report, HausdorffConfig};
use crate::poly::Polynomial;
use crate::quadrature::PolarGrid;
use crate::rng::{child_seed, TAG_SAMPLE};
use crate::varieties::{
    sample_graph_in_region, sample_hypersurface, AffineVarietySpec, GraphRegion, GraphSpec,
};
use crate::volume::{
    gram_volume_affine, gram_volume_graph, graph_of_curve, sphere_volume, VolumeEstimate,
    SHEET_GRID,
};

/// One member of a sequence: a plane curve or a holomorphic graph.
#[derive(Clone, Debug)]
pub enum SequenceMember {
    Variety(AffineVarietySpec),
    Graph(GraphSpec),
}

impl SequenceMember {
    fn label(&self) -> String {
        match self {
            SequenceMember::Variety(s) => s
                .polynomial()
                .map(|p| p.to_string())
                .unwrap_or_else(|_| "system".into()),
            SequenceMember::Graph(g) => g.label().to_string(),
        }
    }

    /// The member as a graph w = g(z), and whether the coordinates of the
    /// graph are swapped relative to the member's.
    fn as_graph(&self) -> Option<(GraphSpec, bool)> {
        match self {
            SequenceMember::Graph(g) => Some((g.clone(), false)),
            SequenceMember::Variety(s) => {
                let (j, _) = s.graph_form()?;
                Some((graph_of_curve(s, f64::INFINITY)?, j == 0))
            }
        }
    }
}

pub type MemberFn = Arc<dyn Fn(usize) -> Result<SequenceMember> + Send + Sync>;

#[derive(Clone)]
pub struct VarietySequence {
    pub label: String,
    generator: MemberFn,
    pub indices: Vec<usize>,
    /// Compact window K, a ball about the origin of C^2.
    pub window: Ball,
    pub volume_bound: Option<f64>,
}

impl fmt::Debug for VarietySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VarietySequence")
            .field("label", &self.label)
            .field("indices", &self.indices)
            .field("window", &self.window)
            .field("volume_bound", &self.volume_bound)
            .finish()
    }
}

fn plane_curve(terms: Vec<(Vec<u32>, Complex64)>) -> Result<SequenceMember> {
    Ok(SequenceMember::Variety(AffineVarietySpec::hypersurface(
        Polynomial::from_terms(2, terms)?,
    )?))
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl VarietySequence {
    pub fn new(
        label: impl Into<String>,
        indices: impl IntoIterator<Item = usize>,
        window: Ball,
        generator: impl Fn(usize) -> Result<SequenceMember> + Send + Sync + 'static,
    ) -> Self {
        VarietySequence {
            label: label.into(),
            generator: Arc::new(generator),
            indices: indices.into_iter().collect(),
            window,
            volume_bound: None,
        }
    }

    pub fn with_volume_bound(mut self, m: f64) -> Self {
        self.volume_bound = Some(m);
        self
    }

    pub fn member(&self, index: usize) -> Result<SequenceMember> {
        (self.generator)(index)
    }

    /// V(z1 - z0^2 / n), flattening onto the line z1 = 0.
    pub fn flattening(last: usize, radius: f64) -> Result<Self> {
        Ok(Self::new(
            "flattening",
            1..=last,
            Ball::origin(2, radius)?,
            |n| plane_curve(vec![(vec![0, 1], c(1.0)), (vec![2, 0], c(-1.0 / n as f64))]),
        ))
    }

    /// V(z1 - z0^n), whose volume in a fixed window grows without bound.
    pub fn degree_growth(last: usize, radius: f64) -> Result<Self> {
        Ok(Self::new(
            "degree_growth",
            1..=last,
            Ball::origin(2, radius)?,
            |n| plane_curve(vec![(vec![0, 1], c(1.0)), (vec![n as u32, 0], c(-1.0))]),
        ))
    }

    /// V(z1 - 1/n), translating onto z1 = 0.
    pub fn translations(last: usize, radius: f64) -> Result<Self> {
        Ok(Self::new(
            "translations",
            1..=last,
            Ball::origin(2, radius)?,
            |n| plane_curve(vec![(vec![0, 1], c(1.0)), (vec![0, 0], c(-1.0 / n as f64))]),
        ))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SequenceBudget {
    /// Rings of the polar sample grid for graph members.
    pub cloud_density: usize,
    /// Sample count for members that are not graphs.
    pub samples: usize,
    pub grid: PolarGrid,
}

impl Default for SequenceBudget {
    fn default() -> Self {
        SequenceBudget {
            cloud_density: 40,
            samples: 4000,
            grid: PolarGrid {
                radial: 96,
                angular: 128,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SequenceVerdict {
    AnalyticLimit,
    HypothesisViolated,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitProbe {
    pub fit_residual: f64,
    pub polynomial: Option<String>,
    pub analytic: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SequenceReport {
    pub label: String,
    pub indices: Vec<usize>,
    /// Volume inside the window; `None` where the member was excluded.
    pub volumes: Vec<Option<VolumeEstimate>>,
    pub volume_bound: f64,
    pub volume_bound_satisfied: bool,
    pub volumes_monotone: bool,
    pub distances: Vec<Option<f64>>,
    pub distance_tail_slope: Option<f64>,
    pub distances_converge: bool,
    pub limit_label: String,
    pub probe: LimitProbe,
    pub box_ladder: Vec<f64>,
    /// count * eps^(2k+1) along the box ladder.
    pub h_surrogate: Vec<f64>,
    pub h_decreasing: bool,
    pub verdict: SequenceVerdict,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub limit_cloud: PointCloud,
}

struct Sampled {
    volume: VolumeEstimate,
    cloud: PointCloud,
}

fn swap(cloud: PointCloud) -> PointCloud {
    cloud.map_points(|p| vec![p[1], p[0]])
}

/// Volume and cloud of one member. Graph members are measured over the
/// cylinder above the base disc of radius R and sampled inside the ball.
fn sample_member(
    member: &SequenceMember,
    window: &Ball,
    budget: &SequenceBudget,
    seed: u64,
) -> Result<Sampled> {
    let r = window.radius;
    if let Some((g, swapped)) = member.as_graph() {
        let volume = gram_volume_graph(&g, GraphRegion::BaseDisc(r), &budget.grid)?;
        let cloud = sample_graph_in_region(&g, GraphRegion::AmbientBall(r), budget.cloud_density)?;
        let cloud = if swapped { swap(cloud) } else { cloud };
        return Ok(Sampled { volume, cloud });
    }
    let SequenceMember::Variety(spec) = member else {
        unreachable!("graph members are handled above");
    };
    let volume = gram_volume_affine(spec, r, &budget.grid, &SHEET_GRID, seed)?;
    let cloud = sample_hypersurface(spec, window, budget.samples, seed)?;
    Ok(Sampled { volume, cloud })
}

fn probe_limit(candidate: &SequenceMember, cloud: &PointCloud, seed: u64) -> LimitProbe {
    let source = match candidate {
        // Plane curves that are not graphs are probed through their fibers.
        SequenceMember::Variety(s) if s.ambient_dim() == 2 && s.graph_form().is_none() => {
            FiberSource::Spec(s.clone(), None)
        }
        _ => FiberSource::Cloud(cloud.clone()),
    };
    let opts = ReconstructOptions {
        sigma: if matches!(source, FiberSource::Cloud(_)) {
            Some(1)
        } else {
            None
        },
        seed,
        ..Default::default()
    };
    match reconstruct_fiber_polynomial(&source, &opts) {
        Ok(f) => LimitProbe {
            fit_residual: f.fit_residual,
            polynomial: Some(f.text.clone()),
            analytic: f.fit_residual <= NON_ALGEBRAIC_RESIDUAL,
            error: None,
        },
        Err(e) => LimitProbe {
            fit_residual: f64::INFINITY,
            polynomial: None,
            analytic: false,
            error: Some(e.to_string()),
        },
    }
}

/// Check the hypotheses and conclusions of the sequence theorem on a finite
/// sequence: bounded volume in the window, Hausdorff convergence to the
/// candidate limit, an analytic fiber polynomial for the limit, and a
/// vanishing (2k+1)-dimensional box-counting surrogate.
///
/// The candidate defaults to the last member.
pub fn sequence_limit_check(
    seq: &VarietySequence,
    candidate: Option<SequenceMember>,
    budget: &SequenceBudget,
    seed: u64,
) -> Result<SequenceReport> {
    if seq.window.dim() != 2 || seq.window.center.iter().any(|z| z.norm() != 0.0) {
        return Err(LabError::Unsupported(
            "sequence windows are balls about the origin of C^2".into(),
        ));
    }
    if seq.indices.len() < 8 {
        return Err(LabError::input("a sequence check needs at least 8 members"));
    }
    let sampled: Vec<(usize, Result<Sampled>)> = seq
        .indices
        .par_iter()
        .enumerate()
        .map(|(i, &n)| {
            let s = seq.member(n).and_then(|m| {
                sample_member(
                    &m,
                    &seq.window,
                    budget,
                    child_seed(seed, TAG_SAMPLE, i as u64),
                )
            });
            (n, s)
        })
        .collect();
    let mut warnings = Vec::new();
    let mut volumes = Vec::with_capacity(sampled.len());
    let mut clouds = Vec::new();
    let mut usable = 0;
    for (n, s) in sampled {
        match s {
            Ok(s) => {
                volumes.push(Some(s.volume));
                clouds.push(s.cloud);
                usable += 1;
            }
            Err(e) => {
                warnings.push(format!("member {n} excluded: {e}"));
                volumes.push(None);
                clouds.push(PointCloud::exact(
                    Vec::new(),
                    format!("member {n} excluded"),
                )?);
            }
        }
    }
    if usable < 8 {
        return Err(LabError::numerical(
            format!("only {usable} members could be evaluated"),
            0.0,
        ));
    }
    let vals: Vec<(f64, f64)> = volumes
        .iter()
        .flatten()
        .map(|v| (v.value, v.std_error))
        .collect();
    let volume_bound = seq.volume_bound.unwrap_or(vals[0].0);
    let volume_bound_satisfied = vals
        .iter()
        .all(|(v, e)| *v <= volume_bound * (1.0 + 1e-9) + e);
    let volumes_monotone = vals
        .windows(2)
        .all(|w| w[1].0 <= w[0].0 + w[0].1 + w[1].1 + 1e-12 * w[0].0);

    let candidate = match candidate {
        Some(c) => c,
        None => seq.member(*seq.indices.last().unwrap())?,
    };
    let limit_cloud = sample_member(
        &candidate,
        &seq.window,
        budget,
        child_seed(seed, TAG_SAMPLE, u64::MAX),
    )?
    .cloud;
    let report = local_convergence_report(
        &clouds,
        &seq.window,
        &limit_cloud,
        &HausdorffConfig::default(),
    )?;
    let tail = &report.distances[report.distances.len() - 3..];
    let tail_shrinks = tail.iter().all(|d| d.is_some()) && tail.windows(2).all(|w| w[1] <= w[0]);
    let distances_converge =
        report.converged || (tail_shrinks && report.tail_slope.is_some_and(|s| s <= -0.5));

    let probe = probe_limit(&candidate, &limit_cloud, seed);

    let delta = 3.0;
    let box_ladder = geometric_ladder(0.5 * seq.window.radius, 2.0, 6);
    let cover = box_counting(
        &limit_cloud,
        delta,
        &HausdorffConfig::default(),
        &box_ladder,
    )?;
    let h_surrogate: Vec<f64> = cover
        .counts
        .iter()
        .zip(&box_ladder)
        .map(|(c, e)| *c as f64 * e.powf(delta))
        .collect();
    let h_decreasing = h_surrogate.windows(2).all(|w| w[1] < w[0]);

    let verdict = if !volume_bound_satisfied {
        SequenceVerdict::HypothesisViolated
    } else if distances_converge && probe.analytic {
        SequenceVerdict::AnalyticLimit
    } else {
        SequenceVerdict::Inconclusive
    };
    Ok(SequenceReport {
        label: seq.label.clone(),
        indices: seq.indices.clone(),
        volumes,
        volume_bound,
        volume_bound_satisfied,
        volumes_monotone,
        distances: report.distances,
        distance_tail_slope: report.tail_slope,
        distances_converge,
        limit_label: candidate.label(),
        probe,
        box_ladder,
        h_surrogate,
        h_decreasing,
        verdict,
        warnings,
        limit_cloud,
    })
}

pub type FamilyFn = Arc<dyn Fn(usize) -> Result<GraphSpec> + Send + Sync>;

/// Holomorphic functions on the unit disc, indexed by m.
#[derive(Clone)]
pub struct FunctionFamily {
    pub label: String,
    member: FamilyFn,
    /// Sup bound on B(0, 1 - eps), if known in advance.
    pub bound: Option<f64>,
}

impl fmt::Debug for FunctionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionFamily")
            .field("label", &self.label)
            .field("bound", &self.bound)
            .finish()
    }
}

impl FunctionFamily {
    pub fn new(
        label: impl Into<String>,
        member: impl Fn(usize) -> Result<GraphSpec> + Send + Sync + 'static,
    ) -> Self {
        FunctionFamily {
            label: label.into(),
            member: Arc::new(member),
            bound: None,
        }
    }

    pub fn with_bound(mut self, c: f64) -> Self {
        self.bound = Some(c);
        self
    }

    pub fn member(&self, m: usize) -> Result<GraphSpec> {
        (self.member)(m)
    }

    /// f_m(z) = z^m.
    pub fn powers() -> Self {
        Self::new("power_family", |m| {
            let e = m as u32;
            GraphSpec::new(format!("z^{m}"), 1.0, move |z: Complex64| z.powu(e))
        })
        .with_bound(1.0)
    }

    /// f_m(z) = c (-1)^m.
    pub fn alternating(value: Complex64) -> Self {
        Self::new("alternating_constants", move |m| {
            let v = if m % 2 == 0 { value } else { -value };
            GraphSpec::new(format!("{v}"), 1.0, move |_| v)
        })
        .with_bound(value.norm())
    }

    /// f_m(z) = z / m.
    pub fn shrinking_lines() -> Self {
        Self::new("shrinking_lines", |m| {
            let s = 1.0 / m.max(1) as f64;
            GraphSpec::new(format!("z/{m}"), 1.0, move |z| z * s)
        })
        .with_bound(1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CauchyBounds {
    /// C n Vol(S_eps) (1 - eps) / (1 + (1 - eps)^2)^(n + 1), with S_eps the
    /// sphere of radius eps in C^n.
    pub integral_bound: f64,
    /// C / eps, the Cauchy estimate at distance eps from the boundary.
    pub classical_bound: f64,
}

/// Two bounds on first derivatives of functions bounded by C on B(0, 1 - eps)
/// in C^n: the kernel form and the classical Cauchy estimate.
pub fn cauchy_derivative_bound(n: usize, eps: f64, c: f64) -> Result<CauchyBounds> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(LabError::input(format!(
            "eps must lie in (0, 1), got {eps}"
        )));
    }
    if n == 0 || !(c >= 0.0) {
        return Err(LabError::input("need n >= 1 and a non-negative sup bound"));
    }
    let sphere = sphere_volume(2 * n - 1) * eps.powi(2 * n as i32 - 1);
    let q = 1.0 - eps;
    Ok(CauchyBounds {
        integral_bound: c * n as f64 * sphere * q / (1.0 + q * q).powi(n as i32 + 1),
        classical_bound: c / eps,
    })
}

/// Points of the disc of radius `radius`: the centre, then ring a = 1..=rings
/// at radius a * radius / rings with 4a equally spaced points, in that order.
pub fn spiral_grid(radius: f64, rings: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0)];
    for a in 1..=rings {
        let r = radius * a as f64 / rings as f64;
        out.extend((0..4 * a).map(|b| Complex64::from_polar(r, TAU * b as f64 / (4 * a) as f64)));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubsequenceSelection {
    /// Strictly increasing.
    pub selected: Vec<usize>,
    pub grid: Vec<Complex64>,
    /// Mean of the last quarter of the selection at each grid point.
    pub limit_samples: Vec<Complex64>,
    /// Sup over the grid of |f_m - f_m'| over later selected m', for each
    /// selected m.
    pub error_ladder: Vec<f64>,
    pub ladder_monotone: bool,
    pub tol: f64,
    /// Largest pairwise difference of selected members over the grid.
    pub achieved_tol: f64,
    pub tolerance_reached: bool,
    pub family_bound: f64,
    /// Grid mesh h and Lipschitz constant C / eps: the uniform spread on the
    /// whole ball is at most achieved_tol + 2 L h.
    pub mesh: f64,
    pub lipschitz: f64,
    pub uniform_bound: f64,
}

impl SubsequenceSelection {
    /// The limit samples as a cloud of points (z, f(z)).
    pub fn limit_cloud(&self) -> Result<PointCloud> {
        let pts: Vec<Vec<Complex64>> = self
            .grid
            .iter()
            .zip(&self.limit_samples)
            .map(|(z, w)| vec![*z, *w])
            .collect();
        PointCloud::exact(pts, "selected subsequence limit")
    }
}

/// Smallest number of members a refinement may leave.
const MIN_SELECTION: usize = 3;

/// Diagonal extraction of a subsequence converging uniformly on
/// B(0, 1 - 2 eps).
///
/// Grid points are visited in spiral order. At each, the current members are
/// grouped into balls of radius tol / 2 around anchors taken from the latest
/// index down, and the largest group is kept (ties go to the later anchor).
/// A refinement that would leave fewer than three members is skipped, and the
/// selection is then reported as partial.
pub fn montel_extract(
    fam: &FunctionFamily,
    sequence: &[usize],
    eps: f64,
    grid_density: usize,
    tol: f64,
) -> Result<SubsequenceSelection> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(LabError::input(format!(
            "eps must lie in (0, 1/2), got {eps}"
        )));
    }
    if sequence.len() < 50 {
        return Err(LabError::input(
            "montel extraction needs at least 50 indices",
        ));
    }
    if sequence.windows(2).any(|w| w[1] <= w[0]) {
        return Err(LabError::input("indices must be strictly increasing"));
    }
    if grid_density < 2 || !(tol > 0.0) {
        return Err(LabError::input(
            "need grid density >= 2 and a positive tolerance",
        ));
    }
    let members: Vec<GraphSpec> = sequence
        .iter()
        .map(|&m| fam.member(m))
        .collect::<Result<_>>()?;

    // Boundedness on B(0, 1 - eps).
    let outer = spiral_grid(1.0 - eps, grid_density);
    let sups: Vec<f64> = members
        .par_iter()
        .map(|g| {
            outer
                .iter()
                .map(|z| g.eval(*z).map(|w| w.norm()))
                .try_fold(0.0, |a: f64, b| b.map(|b| a.max(b)))
        })
        .collect::<Result<_>>()?;
    let observed = sups.iter().copied().fold(0.0, f64::max);
    let family_bound = match fam.bound {
        Some(c) => {
            if let Some(i) = sups.iter().position(|s| *s > c * (1.0 + 1e-12)) {
                return Err(LabError::input(format!(
                    "member {} reaches {:.6} > bound {c} on B(0, {})",
                    sequence[i],
                    sups[i],
                    1.0 - eps
                )));
            }
            c
        }
        None => observed,
    };

    let grid = spiral_grid(1.0 - 2.0 * eps, grid_density);
    let values: Vec<Vec<Complex64>> = members
        .par_iter()
        .map(|g| grid.iter().map(|z| g.eval(*z)).collect::<Result<_>>())
        .collect::<Result<_>>()?;

    let mut current: Vec<usize> = (0..sequence.len()).collect();
    let mut skipped = false;
    // values is indexed [member][grid point]
    #[allow(clippy::needless_range_loop)]
    for j in 0..grid.len() {
        let mut unassigned: Vec<usize> = current.clone();
        let mut best: Vec<usize> = Vec::new();
        while let Some(&anchor) = unassigned.last() {
            let centre = values[anchor][j];
            let (group, rest): (Vec<usize>, Vec<usize>) = unassigned
                .iter()
                .partition(|&&i| (values[i][j] - centre).norm() <= 0.5 * tol);
            if group.len() > best.len() {
                best = group;
            }
            unassigned = rest;
        }
        if best.len() >= MIN_SELECTION {
            current = best;
        } else {
            skipped = true;
        }
    }

    let selected: Vec<usize> = current.iter().map(|&i| sequence[i]).collect();
    let tail_len = current.len().div_ceil(4);
    let tail = &current[current.len() - tail_len..];
    let limit_samples: Vec<Complex64> = (0..grid.len())
        .map(|j| tail.iter().map(|&i| values[i][j]).sum::<Complex64>() / tail_len as f64)
        .collect();
    // Tail spread: entry a is the largest difference between member a and
    // any later selected member, so the ladder cannot increase.
    let mut error_ladder = vec![0.0f64; current.len()];
    #[allow(clippy::needless_range_loop)]
    for j in 0..grid.len() {
        for (a, &ia) in current.iter().enumerate() {
            for &ib in &current[a + 1..] {
                error_ladder[a] = error_ladder[a].max((values[ia][j] - values[ib][j]).norm());
            }
        }
    }
    for a in (0..error_ladder.len().saturating_sub(1)).rev() {
        error_ladder[a] = error_ladder[a].max(error_ladder[a + 1]);
    }
    let ladder_monotone = error_ladder.windows(2).all(|w| w[1] <= w[0]);
    let achieved_tol = error_ladder.first().copied().unwrap_or(0.0);
    let r = 1.0 - 2.0 * eps;
    let mesh =
        (r / grid_density as f64).max(std::f64::consts::PI * r / (2.0 * grid_density as f64));
    let lipschitz = cauchy_derivative_bound(1, eps, family_bound)?.classical_bound;
    Ok(SubsequenceSelection {
        selected,
        grid,
        limit_samples,
        error_ladder,
        ladder_monotone,
        tol,
        achieved_tol,
        tolerance_reached: !skipped && achieved_tol <= tol,
        family_bound,
        mesh,
        lipschitz,
        uniform_bound: achieved_tol + 2.0 * lipschitz * mesh,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FunctionCheck {
    pub is_function: bool,
    pub worst_fiber_spread: f64,
    pub occupied_cells: usize,
}

/// Does a cloud in C^(k+1) look like a graph over its first k coordinates?
/// Points are bucketed by base cell of side `cell`; the cloud passes when
/// the last coordinate varies by at most `fiber_tol` within every cell.
pub fn graph_limit_is_function(
    cloud: &PointCloud,
    cell: f64,
    fiber_tol: f64,
) -> Result<FunctionCheck> {
    if cloud.is_empty() {
        return Err(LabError::input("every base cell is empty"));
    }
    let n = cloud.dim();
    if n < 2 {
        return Err(LabError::input(
            "a graph cloud needs at least 2 coordinates",
        ));
    }
    if !(cell > 0.0) || !(fiber_tol >= 0.0) {
        return Err(LabError::input(
            "cell size must be positive and fiber tolerance non-negative",
        ));
    }
    let mut cells: HashMap<Vec<i64>, Vec<Complex64>> = HashMap::new();
    for p in cloud.points() {
        let key: Vec<i64> = p[..n - 1]
            .iter()
            .flat_map(|z| [(z.re / cell).floor() as i64, (z.im / cell).floor() as i64])
            .collect();
        cells.entry(key).or_default().push(p[n - 1]);
    }
    let mut worst: f64 = 0.0;
    for fiber in cells.values() {
        for (a, u) in fiber.iter().enumerate() {
            for v in &fiber[a + 1..] {
                worst = worst.max((u - v).norm());
            }
        }
    }
    Ok(FunctionCheck {
        is_function: worst <= fiber_tol,
        worst_fiber_spread: worst,
        occupied_cells: cells.len(),
    })
}

/// Explicit cloud of the two-sheeted curve w^2 = z over base points on a
/// polar grid of the disc |z - centre| <= radius.
pub fn two_sheet_cloud(centre: Complex64, radius: f64, rings: usize) -> Result<PointCloud> {
    let mut pts = Vec::new();
    for z in spiral_grid(radius, rings) {
        let z = z + centre;
        let w = z.sqrt();
        pts.push(vec![z, w]);
        pts.push(vec![z, -w]);
    }
    let n = pts.len();
    PointCloud::new(
        pts,
        vec![0.0; n],
        SourceTag {
            description: "w^2 = z, both sheets".into(),
            tolerance: 0.0,
        },
    )
}
