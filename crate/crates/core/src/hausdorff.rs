//! Hausdorff distance, local set convergence and box-counting measure.

use std::collections::{HashMap, HashSet};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::cloud::{Ball, PointCloud};
use crate::error::{check_dim, LabError, Result};
use crate::fit::{line_fit, median};
use crate::linalg::dist;

/// Above this many point pairs, directed distances switch to bucketing.
pub const BRUTE_FORCE_LIMIT: usize = 1_000_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Sum of the two directed distances.
    #[default]
    Sum,
    /// Maximum of the two directed distances.
    Max,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// 2^-d pi^(d/2) / Gamma(d/2 + 1), matching Lebesgue measure.
    #[default]
    Standard,
    /// pi^d / Gamma(d/2 + 1).
    PiPower,
}

impl Normalization {
    pub fn alpha(self, delta: f64) -> f64 {
        let g = gamma(delta / 2.0 + 1.0);
        match self {
            Normalization::Standard => {
                2f64.powf(-delta) * std::f64::consts::PI.powf(delta / 2.0) / g
            }
            Normalization::PiPower => std::f64::consts::PI.powf(delta) / g,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct HausdorffConfig {
    pub variant: Variant,
    pub normalization: Normalization,
}

fn real_coord(p: &[Complex64], k: usize) -> f64 {
    let z = p[k / 2];
    if k.is_multiple_of(2) {
        z.re
    } else {
        z.im
    }
}

fn brute_directed(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    a.par_iter()
        .map(|p| b.iter().map(|q| dist(p, q)).fold(f64::INFINITY, f64::min))
        .reduce(|| 0.0, f64::max)
}

/// Exact directed distance via a planar grid on the two real coordinates of
/// `b` with the widest spread. Projection never increases distances, so a
/// shell search that stops once the best candidate is within the shell radius
/// finds the true nearest point.
fn bucketed_directed(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    let dims = 2 * b[0].len();
    let mut spans: Vec<(usize, f64, f64)> = (0..dims)
        .map(|k| {
            let (lo, hi) = b
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), q| {
                    let x = real_coord(q, k);
                    (lo.min(x), hi.max(x))
                });
            (k, lo, hi)
        })
        .collect();
    spans.sort_by(|x, y| (y.2 - y.1).total_cmp(&(x.2 - x.1)).then(x.0.cmp(&y.0)));
    let (kx, x0, x1) = spans[0];
    let (ky, y0, y1) = if dims > 1 { spans[1] } else { spans[0] };
    let (wx, wy) = (x1 - x0, y1 - y0);
    let h = if wx > 0.0 {
        (2.0 * wx * wy.max(2.0 * wx / b.len() as f64) / b.len() as f64).sqrt()
    } else {
        1.0
    };
    let cell = |p: &[Complex64]| -> (i64, i64) {
        (
            (real_coord(p, kx) / h).floor() as i64,
            (real_coord(p, ky) / h).floor() as i64,
        )
    };
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, q) in b.iter().enumerate() {
        grid.entry(cell(q)).or_default().push(i);
    }
    let (cx0, cy0) = ((x0 / h).floor() as i64, (y0 / h).floor() as i64);
    let (cx1, cy1) = ((x1 / h).floor() as i64, (y1 / h).floor() as i64);
    let extent = (cx1 - cx0).max(cy1 - cy0) + 2;

    a.par_iter()
        .map(|p| {
            let (ci, cj) = cell(p);
            let s_max = [
                (ci - cx0).abs(),
                (ci - cx1).abs(),
                (cj - cy0).abs(),
                (cj - cy1).abs(),
            ]
            .into_iter()
            .max()
            .unwrap();
            if s_max > 2 * extent {
                // Far outside the grid: shells would be mostly empty.
                return b.iter().map(|q| dist(p, q)).fold(f64::INFINITY, f64::min);
            }
            let mut best = f64::INFINITY;
            let scan = |i: i64, j: i64, best: &mut f64| {
                if let Some(ids) = grid.get(&(i, j)) {
                    for &id in ids {
                        *best = best.min(dist(p, &b[id]));
                    }
                }
            };
            for s in 0..=s_max {
                if s == 0 {
                    scan(ci, cj, &mut best);
                } else {
                    for t in -s..=s {
                        scan(ci + t, cj - s, &mut best);
                        scan(ci + t, cj + s, &mut best);
                    }
                    for t in (-s + 1)..s {
                        scan(ci - s, cj + t, &mut best);
                        scan(ci + s, cj + t, &mut best);
                    }
                }
                if best <= s as f64 * h {
                    break;
                }
            }
            best
        })
        .reduce(|| 0.0, f64::max)
}

/// max over a in A of the distance from a to B.
pub fn directed_distance(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(LabError::EmptyCloud(
            "Hausdorff distance needs nonempty clouds".into(),
        ));
    }
    check_dim(a.dim(), b.dim())?;
    Ok(if a.len().saturating_mul(b.len()) <= BRUTE_FORCE_LIMIT {
        brute_directed(a.points(), b.points())
    } else {
        bucketed_directed(a.points(), b.points())
    })
}

pub fn hausdorff_distance(a: &PointCloud, b: &PointCloud, cfg: &HausdorffConfig) -> Result<f64> {
    let ab = directed_distance(a, b)?;
    let ba = directed_distance(b, a)?;
    Ok(match cfg.variant {
        Variant::Sum => ab + ba,
        Variant::Max => ab.max(ba),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    /// Distance for S_n, n = index + 1; `None` where S_n misses the ball.
    pub distances: Vec<Option<f64>>,
    pub converged: bool,
    /// Slope of log d against log n over the second half of the sequence.
    pub tail_slope: Option<f64>,
}

/// Hausdorff distances from each `S_n ∩ K` to `limit ∩ K`.
///
/// Converged means the last distance is below 0.01 r and the last three are
/// non-increasing.
pub fn local_convergence_report(
    seq: &[PointCloud],
    k: &Ball,
    limit: &PointCloud,
    cfg: &HausdorffConfig,
) -> Result<ConvergenceReport> {
    if seq.len() < 5 {
        return Err(LabError::input(
            "a convergence report needs at least 5 clouds",
        ));
    }
    let lim = limit.intersect(k);
    if lim.is_empty() {
        return Err(LabError::EmptyCloud("limit cloud misses the ball".into()));
    }
    let distances = seq
        .iter()
        .map(|s| {
            let s = s.intersect(k);
            if s.is_empty() {
                Ok(None)
            } else {
                hausdorff_distance(&s, &lim, cfg).map(Some)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let tail = distances.len() / 2;
    let (xs, ys): (Vec<f64>, Vec<f64>) = distances
        .iter()
        .enumerate()
        .skip(tail)
        .filter_map(|(i, d)| {
            d.filter(|d| *d > 0.0)
                .map(|d| (((i + 1) as f64).ln(), d.ln()))
        })
        .unzip();
    let tail_slope = line_fit(&xs, &ys).map(|f| f.slope);
    let last3: Vec<Option<f64>> = distances.iter().rev().take(3).copied().collect();
    let converged = match (last3[0], last3[1], last3[2]) {
        (Some(d3), Some(d2), Some(d1)) => d3 < 0.01 * k.radius && d1 >= d2 && d2 >= d3,
        _ => false,
    };
    Ok(ConvergenceReport {
        distances,
        converged,
        tail_slope,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoveringEstimate {
    pub delta: f64,
    /// Box side lengths, descending.
    pub ladder: Vec<f64>,
    pub counts: Vec<usize>,
    /// alpha_delta times the median over the ladder of count * eps^delta.
    pub measure: f64,
    /// Slope of log count against log(1/eps).
    pub dimension: f64,
    pub fit_residual: f64,
}

/// Number of origin-anchored boxes of side `eps` (on the real coordinates)
/// that meet the cloud.
pub fn occupied_boxes(cloud: &PointCloud, eps: f64) -> usize {
    let dims = 2 * cloud.dim();
    cloud
        .points()
        .iter()
        .map(|p| {
            (0..dims)
                .map(|k| (real_coord(p, k) / eps).floor() as i64)
                .collect::<Vec<i64>>()
        })
        .collect::<HashSet<_>>()
        .len()
}

/// Box-counting surrogate for the delta-dimensional Hausdorff measure.
/// Box counts bound the measure from above, they do not compute it.
pub fn box_counting(
    cloud: &PointCloud,
    delta: f64,
    cfg: &HausdorffConfig,
    ladder: &[f64],
) -> Result<CoveringEstimate> {
    if cloud.is_empty() {
        return Err(LabError::EmptyCloud("box counting needs points".into()));
    }
    if ladder.len() < 4 {
        return Err(LabError::input("box ladder needs at least 4 levels"));
    }
    if ladder.iter().any(|e| !(*e > 0.0) || !e.is_finite())
        || ladder.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(LabError::input(
            "box ladder must be strictly descending and positive",
        ));
    }
    if !(delta >= 0.0) {
        return Err(LabError::input("delta must be non-negative"));
    }
    let counts: Vec<usize> = ladder
        .par_iter()
        .map(|&e| occupied_boxes(cloud, e))
        .collect();
    let scaled: Vec<f64> = counts
        .iter()
        .zip(ladder)
        .map(|(c, e)| *c as f64 * e.powf(delta))
        .collect();
    let xs: Vec<f64> = ladder.iter().map(|e| -e.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|c| (*c as f64).ln()).collect();
    let fit = line_fit(&xs, &ys).ok_or_else(|| LabError::input("degenerate box ladder"))?;
    Ok(CoveringEstimate {
        delta,
        ladder: ladder.to_vec(),
        counts,
        measure: cfg.normalization.alpha(delta) * median(&scaled),
        dimension: fit.slope,
        fit_residual: fit.residual,
    })
}

/// Geometric ladder `start, start/ratio, ...` with `levels` entries.
pub fn geometric_ladder(start: f64, ratio: f64, levels: usize) -> Vec<f64> {
    (0..levels).map(|i| start / ratio.powi(i as i32)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cloud1(zs: &[Complex64]) -> PointCloud {
        PointCloud::exact(zs.iter().map(|z| vec![*z]).collect(), "test").unwrap()
    }

    const MAX: HausdorffConfig = HausdorffConfig {
        variant: Variant::Max,
        normalization: Normalization::Standard,
    };

    #[test]
    fn point_examples() {
        let a = cloud1(&[c(0.0, 0.0)]);
        let b = cloud1(&[c(3.0, 0.0)]);
        assert_eq!(
            hausdorff_distance(&a, &b, &HausdorffConfig::default()).unwrap(),
            6.0
        );
        assert_eq!(hausdorff_distance(&a, &b, &MAX).unwrap(), 3.0);
        assert_eq!(hausdorff_distance(&a, &a, &MAX).unwrap(), 0.0);
    }

    #[test]
    fn circle_to_origin() {
        let circle: Vec<Complex64> = (0..1000)
            .map(|i| Complex64::from_polar(1.0, i as f64 * std::f64::consts::TAU / 1000.0))
            .collect();
        let a = cloud1(&circle);
        let b = cloud1(&[c(0.0, 0.0)]);
        assert!(
            (hausdorff_distance(&a, &b, &HausdorffConfig::default()).unwrap() - 2.0).abs() < 1e-4
        );
        assert!((hausdorff_distance(&a, &b, &MAX).unwrap() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn empty_cloud_errors() {
        let a = cloud1(&[]);
        let b = cloud1(&[c(0.0, 0.0)]);
        assert!(matches!(
            hausdorff_distance(&a, &b, &MAX),
            Err(LabError::EmptyCloud(_))
        ));
    }

    #[test]
    fn bucketing_matches_brute_force() {
        let mut rng = crate::rng::substream(5, 0, 0);
        for n in [1usize, 2, 3] {
            let mut pts = |m: usize, spread: f64| -> Vec<Vec<Complex64>> {
                (0..m)
                    .map(|_| {
                        (0..n)
                            .map(|_| c(spread * rng.random::<f64>(), rng.random::<f64>() - 0.5))
                            .collect()
                    })
                    .collect()
            };
            let a = pts(700, 1.0);
            let b = pts(900, 3.0);
            assert_eq!(bucketed_directed(&a, &b), brute_directed(&a, &b));
            assert_eq!(bucketed_directed(&b, &a), brute_directed(&b, &a));
        }
        let a = vec![vec![c(100.0, 0.0)], vec![c(0.0, 0.0)]];
        let b = vec![vec![c(1.0, 1.0)], vec![c(1.0, 1.0)]];
        assert_eq!(bucketed_directed(&a, &b), brute_directed(&a, &b));
    }

    fn segment(n: usize) -> PointCloud {
        cloud1(
            &(0..n)
                .map(|i| c((i as f64 + 0.5) / n as f64, 0.0))
                .collect::<Vec<_>>(),
        )
    }

    fn disc(m: usize) -> PointCloud {
        let h = 2.0 / m as f64;
        let pts: Vec<Complex64> = (0..m * m)
            .map(|i| {
                c(
                    -1.0 + h * (0.5 + (i % m) as f64),
                    -1.0 + h * (0.5 + (i / m) as f64),
                )
            })
            .filter(|z| z.norm() <= 1.0)
            .collect();
        cloud1(&pts)
    }

    #[test]
    fn segment_and_disc_dimensions() {
        let ladder = geometric_ladder(0.25, 2.0, 5);
        let cfg = HausdorffConfig::default();
        let s = box_counting(&segment(10_000), 1.0, &cfg, &ladder).unwrap();
        assert!((s.dimension - 1.0).abs() <= 0.1, "{s:?}");
        assert!((s.measure - 1.0).abs() <= 0.2, "{s:?}");
        let d = box_counting(&disc(300), 2.0, &cfg, &ladder).unwrap();
        assert!((d.dimension - 2.0).abs() <= 0.1, "{d:?}");
        assert!(d.counts.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn alpha_constants() {
        assert!((Normalization::Standard.alpha(1.0) - 1.0).abs() < 1e-12);
        assert!((Normalization::Standard.alpha(2.0) - std::f64::consts::PI / 4.0).abs() < 1e-12);
        assert!((Normalization::PiPower.alpha(2.0) - std::f64::consts::PI.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn lipschitz_scaling() {
        let ladder = geometric_ladder(0.25, 2.0, 5);
        let cfg = HausdorffConfig::default();
        for (cloud, delta) in [(segment(10_000), 1.0), (disc(300), 2.0)] {
            let base = box_counting(&cloud, delta, &cfg, &ladder).unwrap().measure;
            for lambda in [0.5, 2.0] {
                let scaled = cloud.map_points(|p| p.iter().map(|z| z * lambda).collect());
                let m = box_counting(&scaled, delta, &cfg, &ladder).unwrap().measure;
                let ratio = m / base / f64::powf(lambda, delta);
                assert!(
                    (ratio - 1.0).abs() <= 0.25,
                    "delta {delta} lambda {lambda}: {ratio}"
                );
            }
        }
    }

    #[test]
    fn degenerate_ladders() {
        let cfg = HausdorffConfig::default();
        let s = segment(10);
        assert!(box_counting(&s, 1.0, &cfg, &[0.5, 0.25, 0.125]).is_err());
        assert!(box_counting(&s, 1.0, &cfg, &[0.5, 0.25, 0.25, 0.1]).is_err());
    }

    #[test]
    fn convergence_of_constant_sequence() {
        let lim = disc(20);
        let seq = vec![lim.clone(); 6];
        let r = local_convergence_report(&seq, &Ball::origin(1, 1.0).unwrap(), &lim, &MAX).unwrap();
        assert!(r.distances.iter().all(|d| *d == Some(0.0)));
        assert!(r.converged);
    }

    fn arb_cloud() -> impl Strategy<Value = PointCloud> {
        prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 1..30)
            .prop_map(|v| cloud1(&v.into_iter().map(|(a, b)| c(a, b)).collect::<Vec<_>>()))
    }

    proptest! {
        #[test]
        fn metric_properties(a in arb_cloud(), b in arb_cloud(), c3 in arb_cloud()) {
            let sum = HausdorffConfig::default();
            let ab = hausdorff_distance(&a, &b, &MAX).unwrap();
            prop_assert_eq!(ab, hausdorff_distance(&b, &a, &MAX).unwrap());
            let ps = hausdorff_distance(&a, &b, &sum).unwrap();
            prop_assert!(ab <= ps && ps <= 2.0 * ab);
            let ac = hausdorff_distance(&a, &c3, &MAX).unwrap();
            let cb = hausdorff_distance(&c3, &b, &MAX).unwrap();
            prop_assert!(ab <= ac + cb + 1e-12);
            prop_assert_eq!(hausdorff_distance(&a, &a, &sum).unwrap(), 0.0);
        }
    }
}
