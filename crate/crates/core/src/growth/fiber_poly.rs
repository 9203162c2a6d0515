use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::cloud::PointCloud;
use crate::error::{LabError, Result};
use crate::linalg::{least_squares, Unitary};
use crate::poly::{Polynomial, UniPoly};
use crate::rng::{substream, uniform_ball, TAG_NODES};
use crate::varieties::{fiber_points, AffineVarietySpec, GraphSpec};

/// Residual above which the fit is read as evidence against algebraicity.
pub const NON_ALGEBRAIC_RESIDUAL: f64 = 1e-4;
const DEFAULT_GRAPH_DEGREE: usize = 4;

/// Where fiber values come from.
#[derive(Clone, Debug)]
pub enum FiberSource {
    /// A plane curve, optionally in rotated coordinates y = U z.
    Spec(AffineVarietySpec, Option<Unitary>),
    /// A holomorphic graph: one sheet.
    Graph(GraphSpec),
    /// Points (z, w) grouped by their base value z.
    Cloud(PointCloud),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReconstructOptions {
    /// Sheet count; taken from a random fiber when absent.
    pub sigma: Option<usize>,
    /// Number of fitting nodes (half on each of two circles).
    pub nodes: usize,
    /// Degree of the fitted coefficient polynomials; defaults to
    /// sigma * deg(p) for polynomial sources and 4 otherwise.
    pub degree_bound: Option<usize>,
    pub base_radius: f64,
    pub seed: u64,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        ReconstructOptions {
            sigma: None,
            nodes: 24,
            degree_bound: None,
            base_radius: 1.0,
            seed: 0,
        }
    }
}

/// Monic fiber polynomial w^sigma + sum_m eta_m(z) w^m.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberPolynomial {
    pub sigma: usize,
    /// Ascending coefficients of eta_0, ..., eta_(sigma-1) in z.
    pub coefficients: Vec<Vec<Complex64>>,
    /// Degree of each eta_m after dropping negligible coefficients.
    pub fitted_degrees: Vec<usize>,
    pub degree_bound: usize,
    /// Largest coefficient error over held-out nodes.
    pub fit_residual: f64,
    pub non_algebraic: bool,
    /// Whether deg eta_m <= sigma - m holds for every m.
    pub degree_rule_holds: bool,
    pub text: String,
}

impl FiberPolynomial {
    pub fn eta(&self, m: usize) -> UniPoly {
        UniPoly::new(self.coefficients[m].clone())
    }

    /// P(z0, z1) with z0 the base and z1 the fiber coordinate.
    pub fn polynomial(&self) -> Polynomial {
        let mut p = Polynomial::zero(2);
        p.add_term(vec![0, self.sigma as u32], Complex64::new(1.0, 0.0));
        for (m, coeffs) in self.coefficients.iter().enumerate() {
            for (j, c) in coeffs.iter().enumerate() {
                if *c != Complex64::new(0.0, 0.0) {
                    p.add_term(vec![j as u32, m as u32], *c);
                }
            }
        }
        p
    }

    /// max |P| over the given points.
    pub fn max_residual(&self, points: &[Vec<Complex64>]) -> f64 {
        let p = self.polynomial();
        points
            .iter()
            .map(|z| p.eval_unchecked(&z[..2]).norm())
            .fold(0.0, f64::max)
    }
}

struct Node {
    z: Complex64,
    values: Vec<Complex64>,
}

fn circle_nodes(count: usize, radius: f64) -> Vec<Complex64> {
    let outer = count.div_ceil(2);
    let inner = count - outer;
    let mut out: Vec<Complex64> = (0..outer)
        .map(|j| Complex64::from_polar(radius, TAU * j as f64 / outer as f64))
        .collect();
    out.extend((0..inner).map(|j| {
        Complex64::from_polar(0.5 * radius, TAU * (j as f64 + 0.5) / inner.max(1) as f64)
    }));
    out
}

fn held_out_nodes(count: usize, radius: f64, seed: u64) -> Vec<Complex64> {
    (0..count)
        .map(|i| uniform_ball(&mut substream(seed, TAG_NODES, i as u64), 1, radius)[0])
        .collect()
}

fn nodes_from_spec(
    spec: &AffineVarietySpec,
    fit: &[Complex64],
    held: &[Complex64],
    sigma: Option<usize>,
) -> Result<(usize, Vec<Node>, Vec<Node>)> {
    let values = |z: Complex64| -> Result<Vec<Complex64>> {
        Ok(fiber_points(spec, &[z], f64::INFINITY)?.values())
    };
    let sigma = match sigma {
        Some(s) => s,
        None => values(held[0])?.len(),
    };
    let collect = |zs: &[Complex64]| -> Result<Vec<Node>> {
        zs.iter()
            .map(|&z| {
                let v = values(z)?;
                if v.len() != sigma {
                    return Err(LabError::numerical(
                        format!(
                            "fiber over {z} has {} points instead of {sigma}; a branch point or a non-proper projection",
                            v.len()
                        ),
                        (v.len() as f64 - sigma as f64).abs(),
                    ));
                }
                Ok(Node { z, values: v })
            })
            .collect()
    };
    Ok((sigma, collect(fit)?, collect(held)?))
}

/// Group cloud points by base coordinate; every third group is held out.
fn nodes_from_cloud(
    cloud: &PointCloud,
    sigma: Option<usize>,
) -> Result<(usize, Vec<Node>, Vec<Node>)> {
    if cloud.dim() != 2 {
        return Err(LabError::Unsupported(
            "fiber polynomials need points in C^2".into(),
        ));
    }
    let mut pts: Vec<(Complex64, Complex64)> =
        cloud.points().iter().map(|p| (p[0], p[1])).collect();
    pts.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    let mut groups: Vec<Node> = Vec::new();
    for (z, w) in pts {
        match groups
            .iter_mut()
            .find(|g| (g.z - z).norm() <= 1e-9 * (1.0 + z.norm()))
        {
            Some(g) => g.values.push(w),
            None => groups.push(Node { z, values: vec![w] }),
        }
    }
    let sigma = match sigma {
        Some(s) => s,
        None => {
            let mut sizes: Vec<usize> = groups.iter().map(|g| g.values.len()).collect();
            sizes.sort_unstable();
            sizes[sizes.len() / 2]
        }
    };
    let groups: Vec<Node> = groups
        .into_iter()
        .filter(|g| g.values.len() == sigma)
        .collect();
    let (mut fit, mut held) = (Vec::new(), Vec::new());
    for (i, g) in groups.into_iter().enumerate() {
        if i % 3 == 2 {
            held.push(g);
        } else {
            fit.push(g);
        }
    }
    Ok((sigma, fit, held))
}

/// Coefficient m of the monic polynomial with the node's fiber values as roots.
fn symmetric_coefficients(node: &Node) -> Vec<Complex64> {
    UniPoly::from_roots(&node.values).coeffs().to_vec()
}

/// Reconstruct the monic fiber polynomial of a sigma-sheeted covering by
/// fitting the elementary symmetric functions of the fiber values with
/// polynomials in the base variable.
pub fn reconstruct_fiber_polynomial(
    source: &FiberSource,
    opts: &ReconstructOptions,
) -> Result<FiberPolynomial> {
    let rho = opts.base_radius;
    if !(rho > 0.0) {
        return Err(LabError::input("base radius must be positive"));
    }
    if opts.nodes < 4 {
        return Err(LabError::input("need at least 4 fitting nodes"));
    }
    let held_count = (opts.nodes / 2).max(10);
    let fit_z = circle_nodes(opts.nodes, rho);
    let held_z = held_out_nodes(held_count, rho, opts.seed);
    let (sigma, fit, held, default_bound) = match source {
        FiberSource::Spec(spec, u) => {
            if spec.ambient_dim() != 2 {
                return Err(LabError::Unsupported(
                    "fiber polynomials need a plane curve".into(),
                ));
            }
            let spec = match u {
                Some(u) => spec.rotated(u)?,
                None => spec.clone(),
            };
            let (s, f, h) = nodes_from_spec(&spec, &fit_z, &held_z, opts.sigma)?;
            let bound = s * spec.polynomial()?.degree() as usize;
            (s, f, h, bound)
        }
        FiberSource::Graph(g) => {
            if opts.sigma.is_some_and(|s| s != 1) {
                return Err(LabError::input("a graph has exactly one sheet"));
            }
            let node = |z: Complex64| -> Result<Node> {
                Ok(Node {
                    z,
                    values: vec![g.eval(z)?],
                })
            };
            let f = fit_z.iter().map(|&z| node(z)).collect::<Result<_>>()?;
            let h = held_z.iter().map(|&z| node(z)).collect::<Result<_>>()?;
            (1, f, h, DEFAULT_GRAPH_DEGREE)
        }
        FiberSource::Cloud(c) => {
            let (s, f, h) = nodes_from_cloud(c, opts.sigma)?;
            (s, f, h, DEFAULT_GRAPH_DEGREE)
        }
    };
    if sigma == 0 {
        return Err(LabError::input("sheet count must be positive"));
    }
    let degree = opts.degree_bound.unwrap_or(default_bound);
    if fit.len() < degree + 1 || held.is_empty() {
        return Err(LabError::input(format!(
            "{} fitting nodes and {} held-out nodes cannot determine degree {degree}",
            fit.len(),
            held.len()
        )));
    }
    // Vandermonde in z / rho keeps the system well conditioned.
    let scale = fit
        .iter()
        .map(|n| n.z.norm())
        .fold(0.0, f64::max)
        .max(1e-300);
    let a = DMatrix::from_fn(fit.len(), degree + 1, |i, j| {
        (fit[i].z / scale).powu(j as u32)
    });
    let fit_coeffs: Vec<Vec<Complex64>> = fit.iter().map(symmetric_coefficients).collect();
    let held_coeffs: Vec<Vec<Complex64>> = held.iter().map(symmetric_coefficients).collect();
    let mut coefficients = Vec::with_capacity(sigma);
    let mut fitted_degrees = Vec::with_capacity(sigma);
    let mut fit_residual: f64 = 0.0;
    for m in 0..sigma {
        let b = DVector::from_iterator(fit.len(), fit_coeffs.iter().map(|c| c[m]));
        let x = least_squares(&a, &b)?;
        let eta: Vec<Complex64> = x
            .iter()
            .enumerate()
            .map(|(j, c)| c / scale.powi(j as i32))
            .collect();
        let eta_poly = UniPoly::new(eta.clone());
        for (node, c) in held.iter().zip(&held_coeffs) {
            fit_residual = fit_residual.max((eta_poly.eval(node.z) - c[m]).norm());
        }
        let size = eta.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let cleaned: Vec<Complex64> = eta
            .iter()
            .map(|c| {
                if c.norm() <= 1e-9 * (1.0 + size) {
                    Complex64::new(0.0, 0.0)
                } else {
                    *c
                }
            })
            .collect();
        fitted_degrees.push(
            cleaned
                .iter()
                .rposition(|c| *c != Complex64::new(0.0, 0.0))
                .unwrap_or(0),
        );
        coefficients.push(cleaned);
    }
    let degree_rule_holds = fitted_degrees
        .iter()
        .enumerate()
        .all(|(m, d)| *d <= sigma - m);
    let mut out = FiberPolynomial {
        sigma,
        coefficients,
        fitted_degrees,
        degree_bound: degree,
        fit_residual,
        non_algebraic: fit_residual > NON_ALGEBRAIC_RESIDUAL,
        degree_rule_holds,
        text: String::new(),
    };
    out.text = out.polynomial().to_string();
    Ok(out)
}
