use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{real_gram_area, Method, StandardKahlerForm, VolumeEstimate};
use crate::error::{LabError, Result};
use crate::quadrature::PolarGrid;
use crate::varieties::{ray_extent, GraphRegion, GraphSpec};

/// Gram density of the graph map next to the closed-form expression
/// 1 - 2 Re f' + |f'|^2, which is reported but never integrated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GraphVolumeDensity {
    pub gram_density: f64,
    pub closed_form_lambda: f64,
}

fn tangent_pair(g: &GraphSpec, z: Complex64) -> Result<([Complex64; 2], [Complex64; 2])> {
    let d = g.derivative(z)?;
    let i = Complex64::i();
    Ok(([Complex64::new(1.0, 0.0), d], [i, i * d]))
}

pub fn graph_volume_density(g: &GraphSpec, z: Complex64) -> Result<GraphVolumeDensity> {
    let (a, b) = tangent_pair(g, z)?;
    let d = a[1];
    Ok(GraphVolumeDensity {
        gram_density: real_gram_area(&a, &b),
        closed_form_lambda: 1.0 - 2.0 * d.re + d.norm_sqr(),
    })
}

/// Integral of `density` over the part of the base disc selected by `region`,
/// Gauss–Legendre along each ray up to its extent, trapezoid in the angle.
fn polar_integral<F>(
    g: &GraphSpec,
    region: GraphRegion,
    grid: &PolarGrid,
    density: F,
) -> Result<f64>
where
    F: Fn(Complex64) -> Result<f64> + Sync,
{
    let rule = grid.radial_rule();
    let rays: Vec<f64> = grid
        .angles()
        .par_iter()
        .map(|&theta| {
            let rho = ray_extent(g, theta, region)?;
            let mut s = 0.0;
            for &(t, w) in &rule {
                let v = density(Complex64::from_polar(rho * t, theta))?;
                if !v.is_finite() {
                    return Err(LabError::numerical(
                        format!("non-finite volume density on graph '{}'", g.label()),
                        f64::INFINITY,
                    ));
                }
                s += w * v;
            }
            Ok(rho * rho * s)
        })
        .collect::<Result<_>>()?;
    Ok(rays.iter().sum::<f64>() * TAU / grid.angular as f64)
}

fn graph_estimate<F>(
    g: &GraphSpec,
    region: GraphRegion,
    grid: &PolarGrid,
    method: Method,
    density: F,
) -> Result<VolumeEstimate>
where
    F: Fn(Complex64) -> Result<f64> + Sync,
{
    let fine = polar_integral(g, region, grid, &density)?;
    let coarse = polar_integral(g, region, &grid.coarsened(), &density)?;
    Ok(VolumeEstimate::new(
        fine,
        (fine - coarse).abs(),
        method,
        grid.radial * grid.angular,
        None,
    ))
}

/// Area of the graph over `region` as the integral of the Gram density of
/// z -> (z, f(z)).
pub fn gram_volume_graph(
    g: &GraphSpec,
    region: GraphRegion,
    grid: &PolarGrid,
) -> Result<VolumeEstimate> {
    graph_estimate(g, region, grid, Method::Gram, |z| {
        let (a, b) = tangent_pair(g, z)?;
        Ok(real_gram_area(&a, &b))
    })
}

/// Area of the graph over `region` as the integral of the pulled-back Kähler
/// form omega(d_x phi, d_y phi).
pub fn wirtinger_volume_graph(
    g: &GraphSpec,
    region: GraphRegion,
    grid: &PolarGrid,
) -> Result<VolumeEstimate> {
    let omega = StandardKahlerForm::new(2);
    graph_estimate(g, region, grid, Method::Wirtinger, |z| {
        let (a, b) = tangent_pair(g, z)?;
        Ok(omega.eval(&a, &b))
    })
}

/// A smooth, not necessarily holomorphic, displacement of the fiber coordinate.
#[derive(Clone)]
pub struct Perturbation {
    pub label: String,
    pub map: Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>,
}

impl std::fmt::Debug for Perturbation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Perturbation({})", self.label)
    }
}

impl Perturbation {
    pub fn new(
        label: impl Into<String>,
        map: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Perturbation {
            label: label.into(),
            map: Arc::new(map),
        }
    }

    /// (1 - |z|^2 / r^2) conj(z): vanishes on |z| = r.
    pub fn antiholomorphic_bump(r: f64) -> Self {
        Self::new("antiholomorphic bump", move |z: Complex64| {
            z.conj() * (1.0 - z.norm_sqr() / (r * r))
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MinimalityRow {
    pub amplitude: f64,
    pub volume: f64,
}

const PROBE_STEP: f64 = 1e-6;

/// Gram volumes of the real surfaces z -> (z, f(z) + a P(z)) over the domain
/// disc. P must vanish on the boundary circle so the boundary is fixed.
pub fn wirtinger_minimality_probe(
    g: &GraphSpec,
    amplitudes: &[f64],
    perturbation: &Perturbation,
    grid: &PolarGrid,
) -> Result<Vec<MinimalityRow>> {
    let r = g.domain_radius();
    if !r.is_finite() {
        return Err(LabError::input("minimality probe needs a bounded domain"));
    }
    let p = &perturbation.map;
    let interior = (0..64)
        .map(|j| p(Complex64::from_polar(0.5 * r, TAU * j as f64 / 64.0)).norm())
        .fold(0.0, f64::max);
    let boundary = (0..256)
        .map(|j| p(Complex64::from_polar(r, TAU * j as f64 / 256.0)).norm())
        .fold(0.0, f64::max);
    if boundary > 1e-9 * (1.0 + interior) {
        return Err(LabError::input(format!(
            "perturbation '{}' does not vanish on the boundary (|P| = {boundary:e})",
            perturbation.label
        )));
    }
    amplitudes
        .iter()
        .map(|&a| {
            let h = PROBE_STEP;
            let density = |z: Complex64| -> Result<f64> {
                let d = g.derivative(z)?;
                let px = (p(z + h) - p(z - h)) / (2.0 * h);
                let py =
                    (p(z + Complex64::new(0.0, h)) - p(z - Complex64::new(0.0, h))) / (2.0 * h);
                let i = Complex64::i();
                let dx = [Complex64::new(1.0, 0.0), d + a * px];
                let dy = [i, i * d + a * py];
                Ok(real_gram_area(&dx, &dy))
            };
            let volume = polar_integral(g, GraphRegion::Domain, grid, density)?;
            Ok(MinimalityRow {
                amplitude: a,
                volume,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn fleet() -> Vec<GraphSpec> {
        vec![
            GraphSpec::new("zero", 1.0, |_| c(0.0, 0.0)).unwrap(),
            GraphSpec::new("identity", 1.0, |z| z).unwrap(),
            GraphSpec::new("square", 1.0, |z| z * z)
                .unwrap()
                .with_derivative(|z| 2.0 * z),
            GraphSpec::new("exp", 1.0, |z: Complex64| z.exp())
                .unwrap()
                .with_derivative(|z: Complex64| z.exp()),
        ]
    }

    /// Radial oracle for f(z) = z^m on the unit disc:
    /// 2 pi int_0^1 (1 + m^2 r^(2m-2)) r dr = pi (1 + m).
    #[test]
    fn monomial_graph_areas() {
        let grid = PolarGrid::default();
        for (m, g) in [(1.0, &fleet()[1]), (2.0, &fleet()[2])] {
            let v = gram_volume_graph(g, GraphRegion::Domain, &grid).unwrap();
            assert!((v.value - PI * (1.0 + m)).abs() < 1e-10, "{v:?}");
        }
        let v = gram_volume_graph(&fleet()[0], GraphRegion::Domain, &grid).unwrap();
        assert!((v.value - PI).abs() < 1e-12);
    }

    #[test]
    fn parabola_in_unit_ball() {
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        let exact = PI * (phi + 2.0 * phi * phi);
        let g = GraphSpec::new("square", f64::INFINITY, |z| z * z).unwrap();
        let v =
            gram_volume_graph(&g, GraphRegion::AmbientBall(1.0), &PolarGrid::default()).unwrap();
        assert!((v.value - exact).abs() / exact < 1e-9, "{v:?}");
        assert!((v.value - 4.3416).abs() < 1e-4);
    }

    #[test]
    fn exp_graph_area() {
        // |e^z|^2 = e^{2x} and the disc integral of e^{ax} is 2 pi I_1(a) / a,
        // with I_1(2) = sum 1 / (k! (k+1)!).
        let i1: f64 = (0..30u32)
            .map(|k| {
                1.0 / ((1..=k).map(f64::from).product::<f64>()
                    * (1..=k + 1).map(f64::from).product::<f64>())
            })
            .sum();
        let exact = PI + PI * i1;
        let v = gram_volume_graph(&fleet()[3], GraphRegion::Domain, &PolarGrid::default()).unwrap();
        assert!(
            (v.value - exact).abs() / exact < 1e-10,
            "{} vs {exact}",
            v.value
        );
    }

    #[test]
    fn wirtinger_equality_on_fleet() {
        let grid = PolarGrid::default();
        for g in fleet() {
            let a = gram_volume_graph(&g, GraphRegion::Domain, &grid).unwrap();
            let b = wirtinger_volume_graph(&g, GraphRegion::Domain, &grid).unwrap();
            assert!((a.value - b.value).abs() / a.value <= 1e-3, "{}", g.label());
            assert_eq!(b.method, Method::Wirtinger);
        }
    }

    #[test]
    fn densities() {
        let id = &fleet()[1];
        let d = graph_volume_density(id, c(0.3, 0.2)).unwrap();
        assert!((d.gram_density - 2.0).abs() < 1e-8);
        assert!(d.closed_form_lambda.abs() < 1e-8);
        let zero = &fleet()[0];
        assert_eq!(
            graph_volume_density(zero, c(0.1, 0.1))
                .unwrap()
                .gram_density,
            1.0
        );
    }

    #[test]
    fn minimality_probe() {
        let zero = &fleet()[0];
        let grid = PolarGrid::new(32, 64).unwrap();
        let rows = wirtinger_minimality_probe(
            zero,
            &[0.0, 0.1, 0.2],
            &Perturbation::antiholomorphic_bump(1.0),
            &grid,
        )
        .unwrap();
        assert!((rows[0].volume - PI).abs() < 1e-9);
        assert!(rows[1].volume > rows[0].volume && rows[2].volume > rows[1].volume);
        let lin = Perturbation::new("linear", |z| z);
        assert!(matches!(
            wirtinger_minimality_probe(zero, &[0.1], &lin, &grid),
            Err(LabError::Input(_))
        ));
        let sq = &fleet()[2];
        let rows =
            wirtinger_minimality_probe(sq, &[0.0], &Perturbation::antiholomorphic_bump(1.0), &grid)
                .unwrap();
        let v = gram_volume_graph(sq, GraphRegion::Domain, &grid).unwrap();
        assert!((rows[0].volume - v.value).abs() < 1e-9);
    }

    #[test]
    fn non_finite_evaluator_is_an_error() {
        let g = GraphSpec::new("nan", 1.0, |_| c(f64::NAN, 0.0)).unwrap();
        assert!(matches!(
            gram_volume_graph(&g, GraphRegion::Domain, &PolarGrid::default()),
            Err(LabError::Numerical { .. })
        ));
    }
}
