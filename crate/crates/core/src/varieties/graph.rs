use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cloud::{Ball, PointCloud, SourceTag};
use crate::error::{LabError, Result};
use crate::poly::Polynomial;

pub type HoloFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

const DIFF_STEP: f64 = 1e-6;

/// Graph {(z, f(z)) : |z| < radius} of a holomorphic function of one variable.
#[derive(Clone)]
pub struct GraphSpec {
    label: String,
    f: HoloFn,
    derivative: Option<HoloFn>,
    domain_radius: f64,
}

impl fmt::Debug for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GraphSpec")
            .field("label", &self.label)
            .field("domain_radius", &self.domain_radius)
            .field("analytic_derivative", &self.derivative.is_some())
            .finish()
    }
}

impl GraphSpec {
    /// `domain_radius` may be infinite for entire functions.
    pub fn new(
        label: impl Into<String>,
        domain_radius: f64,
        f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(domain_radius > 0.0) {
            return Err(LabError::input("graph domain radius must be positive"));
        }
        Ok(GraphSpec {
            label: label.into(),
            f: Arc::new(f),
            derivative: None,
            domain_radius,
        })
    }

    pub fn with_derivative(
        mut self,
        df: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        self.derivative = Some(Arc::new(df));
        self
    }

    /// Graph of a polynomial in one variable, with its exact derivative.
    pub fn from_polynomial(
        label: impl Into<String>,
        domain_radius: f64,
        p: &Polynomial,
    ) -> Result<Self> {
        if p.nvars() != 1 {
            return Err(LabError::Dimension {
                expected: 1,
                got: p.nvars(),
            });
        }
        let f = p.clone();
        let df = p.partial(0);
        Ok(
            Self::new(label, domain_radius, move |z| f.eval_unchecked(&[z]))?
                .with_derivative(move |z| df.eval_unchecked(&[z])),
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain_radius(&self) -> f64 {
        self.domain_radius
    }

    pub fn with_domain_radius(&self, r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(LabError::input("graph domain radius must be positive"));
        }
        Ok(GraphSpec {
            domain_radius: r,
            ..self.clone()
        })
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let w = (self.f)(z);
        if w.is_finite() {
            Ok(w)
        } else {
            Err(LabError::numerical(
                format!("graph '{}' is not finite at {z}", self.label),
                f64::INFINITY,
            ))
        }
    }

    /// f'(z): analytic if supplied, otherwise a central difference with step 1e-6.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        let d = match &self.derivative {
            Some(df) => df(z),
            None => {
                let h = DIFF_STEP;
                ((self.f)(z + h) - (self.f)(z - h)) / (2.0 * h)
            }
        };
        if d.is_finite() {
            Ok(d)
        } else {
            Err(LabError::numerical(
                format!("derivative of graph '{}' is not finite at {z}", self.label),
                f64::INFINITY,
            ))
        }
    }
}

/// Part of a graph to integrate or sample over.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum GraphRegion {
    /// The whole domain disc.
    Domain,
    /// Points of the graph inside the ball B(0, R) of C^2.
    AmbientBall(f64),
    /// Points whose base coordinate satisfies |z| <= R (a cylinder).
    BaseDisc(f64),
}

impl GraphRegion {
    pub fn contains(&self, z: Complex64, w: Complex64) -> bool {
        match *self {
            GraphRegion::Domain => true,
            GraphRegion::AmbientBall(r) => z.norm_sqr() + w.norm_sqr() <= r * r,
            GraphRegion::BaseDisc(r) => z.norm() <= r,
        }
    }
}

const RAY_SCAN: usize = 256;

/// Radius at which the ray of angle `theta` leaves the region, searched from
/// the origin: the first crossing found by scanning, refined by bisection.
pub fn ray_extent(g: &GraphSpec, theta: f64, region: GraphRegion) -> Result<f64> {
    let dom = g.domain_radius;
    let limit = match region {
        GraphRegion::Domain => dom,
        GraphRegion::BaseDisc(r) => dom.min(r),
        GraphRegion::AmbientBall(r) => dom.min(r),
    };
    if !limit.is_finite() {
        return Err(LabError::input(format!(
            "graph '{}' has an unbounded domain; choose a bounded region",
            g.label
        )));
    }
    let GraphRegion::AmbientBall(big_r) = region else {
        return Ok(limit);
    };
    let dir = Complex64::from_polar(1.0, theta);
    let inside = |r: f64| -> Result<bool> {
        let z = dir * r;
        Ok(z.norm_sqr() + g.eval(z)?.norm_sqr() <= big_r * big_r)
    };
    if !inside(0.0)? {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = None;
    for i in 1..=RAY_SCAN {
        let r = limit * i as f64 / RAY_SCAN as f64;
        if inside(r)? {
            lo = r;
        } else {
            hi = Some(r);
            break;
        }
    }
    let Some(mut hi) = hi else {
        return Ok(limit);
    };
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if inside(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Points (z, f(z)) on a polar grid of the domain disc: the centre plus
/// `grid_density` rings of `4 * grid_density` points each.
pub fn sample_graph(g: &GraphSpec, grid_density: usize) -> Result<PointCloud> {
    sample_graph_in_region(g, GraphRegion::Domain, grid_density)
}

/// As [`sample_graph`], with rings scaled along each ray to the region's
/// extent so the sample reaches the region boundary.
pub fn sample_graph_in_region(
    g: &GraphSpec,
    region: GraphRegion,
    grid_density: usize,
) -> Result<PointCloud> {
    if grid_density < 2 {
        return Err(LabError::input("grid density must be at least 2"));
    }
    let m = grid_density;
    let na = 4 * m;
    let mut points = Vec::with_capacity(1 + m * na);
    let z0 = Complex64::new(0.0, 0.0);
    let w0 = g.eval(z0)?;
    if region.contains(z0, w0) {
        points.push(vec![z0, w0]);
    }
    for j in 0..na {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / na as f64;
        let ext = ray_extent(g, theta, region)?;
        if ext == 0.0 {
            continue;
        }
        for i in 1..=m {
            let z = Complex64::from_polar(ext * i as f64 / m as f64, theta);
            points.push(vec![z, g.eval(z)?]);
        }
    }
    let n = points.len();
    PointCloud::new(
        points,
        vec![0.0; n],
        SourceTag {
            description: format!("graph '{}' polar grid {m}", g.label),
            tolerance: 0.0,
        },
    )
}

impl GraphRegion {
    pub fn ball(&self) -> Option<Ball> {
        match *self {
            GraphRegion::AmbientBall(r) => Ball::origin(2, r).ok(),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::varieties::AffineVarietySpec;

    #[test]
    fn zero_graph_lies_in_plane() {
        let g = GraphSpec::new("zero", 1.0, |_| Complex64::new(0.0, 0.0)).unwrap();
        let cloud = sample_graph(&g, 8).unwrap();
        assert!(cloud.points().iter().all(|p| p[1].norm() == 0.0));
        assert_eq!(cloud.len(), 1 + 8 * 32);
    }

    #[test]
    fn square_graph_is_on_parabola() {
        let g = GraphSpec::new("square", 1.0, |z| z * z).unwrap();
        let spec = AffineVarietySpec::parse_hypersurface("z1 - z0^2", 2).unwrap();
        for p in sample_graph(&g, 10).unwrap().points() {
            assert!(spec.membership(p, 1e-12).unwrap().residual <= 1e-12);
        }
    }

    #[test]
    fn exp_graph_maximum() {
        let g = GraphSpec::new("exp", 1.0, |z| z.exp()).unwrap();
        let max = sample_graph(&g, 16)
            .unwrap()
            .points()
            .iter()
            .map(|p| p[1].norm())
            .fold(0.0, f64::max);
        assert!((max - std::f64::consts::E).abs() < 1e-12);
    }

    #[test]
    fn grid_density_validated() {
        let g = GraphSpec::new("zero", 1.0, |_| Complex64::new(0.0, 0.0)).unwrap();
        assert!(sample_graph(&g, 1).is_err());
    }

    #[test]
    fn ray_extent_of_parabola_in_unit_ball() {
        let g = GraphSpec::new("square", f64::INFINITY, |z| z * z).unwrap();
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        for k in 0..5 {
            let r = ray_extent(&g, k as f64, GraphRegion::AmbientBall(1.0)).unwrap();
            assert!((r - phi.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_falls_back_to_differences() {
        let g = GraphSpec::new("cube", 1.0, |z| z * z * z).unwrap();
        let z = Complex64::new(0.3, -0.4);
        assert!((g.derivative(z).unwrap() - 3.0 * z * z).norm() < 1e-8);
    }
}
