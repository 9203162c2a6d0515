//! Deterministic quadrature rules on discs.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Gauss–Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre in the radius times the trapezoid rule in the angle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarGrid {
    pub radial: usize,
    pub angular: usize,
}

impl Default for PolarGrid {
    fn default() -> Self {
        PolarGrid {
            radial: 64,
            angular: 256,
        }
    }
}

impl PolarGrid {
    pub fn new(radial: usize, angular: usize) -> Result<Self> {
        if radial < 2 || angular < 4 {
            return Err(LabError::input(format!(
                "polar grid too coarse ({radial} x {angular})"
            )));
        }
        Ok(PolarGrid { radial, angular })
    }

    /// The grid with half the nodes in each direction, for error estimates.
    pub fn coarsened(&self) -> Self {
        PolarGrid {
            radial: (self.radial / 2).max(2),
            angular: (self.angular / 2).max(4),
        }
    }

    pub fn angles(&self) -> Vec<f64> {
        (0..self.angular)
            .map(|j| 2.0 * std::f64::consts::PI * j as f64 / self.angular as f64)
            .collect()
    }

    /// Radial nodes and weights on [0, 1] for the measure r dr.
    pub fn radial_rule(&self) -> Vec<(f64, f64)> {
        let (x, w) = gauss_legendre(self.radial);
        x.iter()
            .zip(&w)
            .map(|(xi, wi)| {
                let r = 0.5 * (xi + 1.0);
                (r, 0.5 * wi * r)
            })
            .collect()
    }
}
