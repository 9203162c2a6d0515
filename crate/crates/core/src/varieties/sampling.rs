use num_complex::Complex64;
use rayon::prelude::*;

use super::{membership_residual, AffineVarietySpec};
use crate::cloud::{Ball, PointCloud, SourceTag};
use crate::error::{check_dim, LabError, Result};
use crate::poly::univariate_roots;
use crate::rng::{substream, uniform_ball, unit_sphere, TAG_SAMPLE};

/// Residual bound met by every sampled point.
pub const SAMPLE_RESIDUAL_TOL: f64 = 1e-9;

const BATCH: usize = 256;

/// Sample a hypersurface inside `region` by intersecting it with random
/// complex lines (anchor uniform in the ball, Haar direction).
///
/// Line `i` uses its own substream of `seed`, and lines are consumed in index
/// order, so the cloud depends only on `(spec, region, count, seed)`.
pub fn sample_hypersurface(
    spec: &AffineVarietySpec,
    region: &Ball,
    count: usize,
    seed: u64,
) -> Result<PointCloud> {
    let p = spec.polynomial()?;
    let n = spec.ambient_dim();
    check_dim(n, region.dim())?;
    if count == 0 {
        return Err(LabError::input("sample count must be at least 1"));
    }
    let max_lines = 100 * count;
    let mut points: Vec<Vec<Complex64>> = Vec::with_capacity(count);
    let mut residuals = Vec::with_capacity(count);
    let mut next_line = 0usize;
    while points.len() < count && next_line < max_lines {
        let end = (next_line + BATCH).min(max_lines);
        let batch: Vec<Vec<(Vec<Complex64>, f64)>> = (next_line..end)
            .into_par_iter()
            .map(|i| {
                let mut rng = substream(seed, TAG_SAMPLE, i as u64);
                let offset = uniform_ball(&mut rng, n, region.radius);
                let anchor: Vec<Complex64> = region
                    .center
                    .iter()
                    .zip(&offset)
                    .map(|(c, o)| c + o)
                    .collect();
                let dir = unit_sphere(&mut rng, n);
                let q = p.restrict_unchecked(&anchor, &dir).trim_relative(1e-12);
                if q.degree() == 0 {
                    return Vec::new();
                }
                let Ok(roots) = univariate_roots(&q) else {
                    return Vec::new();
                };
                roots
                    .into_iter()
                    .filter_map(|t| {
                        let z: Vec<Complex64> =
                            anchor.iter().zip(&dir).map(|(a, d)| a + t * d).collect();
                        if !region.contains(&z) {
                            return None;
                        }
                        let r = membership_residual(spec.system(), &z).ok()?;
                        (r <= SAMPLE_RESIDUAL_TOL).then_some((z, r))
                    })
                    .collect()
            })
            .collect();
        for hits in batch {
            for (z, r) in hits {
                if points.len() < count {
                    points.push(z);
                    residuals.push(r);
                }
            }
        }
        next_line = end;
    }
    if points.is_empty() {
        return Err(LabError::EmptyCloud(format!(
            "no intersections with the variety after {max_lines} lines; it may miss the region"
        )));
    }
    PointCloud::new(
        points,
        residuals,
        SourceTag {
            description: format!("line sample of {} (seed {seed})", spec.polynomial()?),
            tolerance: SAMPLE_RESIDUAL_TOL,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn parabola_sample() {
        let spec = AffineVarietySpec::parse_hypersurface("z1 - z0^2", 2).unwrap();
        let ball = Ball::origin(2, 1.0).unwrap();
        let cloud = sample_hypersurface(&spec, &ball, 1000, 3).unwrap();
        assert!(cloud.len() >= 900);
        for p in cloud.points() {
            assert!((p[1] - p[0] * p[0]).norm() <= 1e-9);
            assert!(spec.membership(p, 1e-8).unwrap().inside);
            assert!(ball.contains(p));
        }
    }

    #[test]
    fn coordinate_line_sample() {
        let spec = AffineVarietySpec::parse_hypersurface("z0", 2).unwrap();
        let cloud = sample_hypersurface(&spec, &Ball::origin(2, 1.0).unwrap(), 200, 1).unwrap();
        assert!(cloud.points().iter().all(|p| p[0].norm() <= 1e-9));
    }

    #[test]
    fn far_ball_is_empty() {
        let spec = AffineVarietySpec::parse_hypersurface("z1 - z0^2", 2).unwrap();
        let ball = Ball::new(vec![c(10.0, 0.0), c(0.0, 0.0)], 0.1).unwrap();
        assert!(matches!(
            sample_hypersurface(&spec, &ball, 50, 1),
            Err(LabError::EmptyCloud(_))
        ));
    }

    #[test]
    fn deterministic_per_seed() {
        let spec = AffineVarietySpec::parse_hypersurface("z0*z1 - 0.1", 2).unwrap();
        let ball = Ball::origin(2, 1.0).unwrap();
        let a = sample_hypersurface(&spec, &ball, 300, 17).unwrap();
        let b = sample_hypersurface(&spec, &ball, 300, 17).unwrap();
        assert_eq!(a, b);
        let c2 = sample_hypersurface(&spec, &ball, 300, 18).unwrap();
        assert_ne!(a.points(), c2.points());
    }
}
