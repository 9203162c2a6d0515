use num_complex::Complex64;
use serde::Serialize;

use super::AffineVarietySpec;
use crate::error::{check_dim, LabError, Result};
use crate::poly::univariate_roots;

/// Roots closer than this (relative) are merged into one point with multiplicity.
const CLUSTER_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberPoint {
    pub point: Vec<Complex64>,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fiber {
    pub points: Vec<FiberPoint>,
}

impl Fiber {
    /// Local sheet count: points counted with multiplicity.
    pub fn sheet_count(&self) -> usize {
        self.points.iter().map(|p| p.multiplicity).sum()
    }

    /// Fiber-coordinate values, each repeated by its multiplicity.
    pub fn values(&self) -> Vec<Complex64> {
        self.points
            .iter()
            .flat_map(|p| std::iter::repeat_n(*p.point.last().unwrap(), p.multiplicity))
            .collect()
    }
}

/// Points of a hypersurface over `base` (the first n - 1 coordinates) with
/// last coordinate of modulus at most `box_radius`.
pub fn fiber_points(
    spec: &AffineVarietySpec,
    base: &[Complex64],
    box_radius: f64,
) -> Result<Fiber> {
    let p = spec.polynomial()?;
    let n = spec.ambient_dim();
    check_dim(n - 1, base.len())?;
    let mut anchor = base.to_vec();
    anchor.push(Complex64::new(0.0, 0.0));
    let mut dir = vec![Complex64::new(0.0, 0.0); n];
    dir[n - 1] = Complex64::new(1.0, 0.0);
    let q = p.restrict_unchecked(&anchor, &dir);
    if q.is_zero() {
        return Err(LabError::input(
            "the whole fiber lies in the variety; the projection is not proper here",
        ));
    }
    if q.degree() == 0 {
        return Ok(Fiber { points: Vec::new() });
    }
    let mut roots = univariate_roots(&q)?;
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for r in roots {
        match clusters
            .iter_mut()
            .find(|(c, m)| (*c / *m as f64 - r).norm() <= CLUSTER_TOL * (1.0 + r.norm()))
        {
            Some((c, m)) => {
                *c += r;
                *m += 1;
            }
            None => clusters.push((r, 1)),
        }
    }
    let points = clusters
        .into_iter()
        .map(|(sum, m)| (sum / m as f64, m))
        .filter(|(w, _)| w.norm() <= box_radius)
        .map(|(w, m)| {
            let mut point = base.to_vec();
            point.push(w);
            FiberPoint {
                point,
                multiplicity: m,
            }
        })
        .collect();
    Ok(Fiber { points })
}
