use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::gamma;

use super::{Method, VolumeEstimate};
use crate::error::{LabError, Result};
use crate::linalg::haar_unitary;
use crate::poly::{univariate_roots, Polynomial};
use crate::rng::{substream, uniform_ball, TAG_CALIBRATION, TAG_SLICE};
use crate::varieties::AffineVarietySpec;

pub const CALIBRATION_LINES: usize = 100_000;
pub const CALIBRATION_SEED: u64 = 0xCA11_B8A7;

/// Empirical slice constant for hypersurfaces in C^n, fixed on the hyperplane
/// {z_n = 0} inside the unit ball.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Calibration {
    pub n: usize,
    pub lines: usize,
    pub seed: u64,
    /// Mean number of hits per line on the hyperplane.
    pub mean_count: f64,
    pub std_error: f64,
    /// Volume per unit mean count at R = 1.
    pub constant: f64,
}

/// Number of points of X ∩ L ∩ B(0, R) on random complex lines L, drawn from
/// the invariant measure on lines meeting the ball: Haar direction d, foot
/// point uniform in the disc of d^⊥ of radius R. `None` marks a line lying in X.
fn line_counts(
    p: &Polynomial,
    radius: f64,
    lines: usize,
    seed: u64,
    tag: u64,
) -> Result<Vec<Option<usize>>> {
    let n = p.nvars();
    let scale = p.max_coefficient() * (1.0 + radius).powi(p.degree() as i32);
    (0..lines)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, tag, i as u64);
            let u = haar_unitary(&mut rng, n);
            let b = uniform_ball(&mut rng, n - 1, radius);
            let d: Vec<Complex64> = (0..n).map(|r| u[(r, 0)]).collect();
            let a: Vec<Complex64> = (0..n)
                .map(|r| (1..n).map(|c| u[(r, c)] * b[c - 1]).sum())
                .collect();
            let a2: f64 = b.iter().map(|c| c.norm_sqr()).sum();
            let q = p.restrict_unchecked(&a, &d);
            if q.max_coefficient() <= 1e-13 * scale {
                return Ok(None);
            }
            let q = q.trim_relative(1e-12);
            if q.degree() == 0 {
                return Ok(Some(0));
            }
            let roots = univariate_roots(&q)?;
            Ok(Some(
                roots
                    .iter()
                    .filter(|t| a2 + t.norm_sqr() <= radius * radius)
                    .count(),
            ))
        })
        .collect()
}

fn mean_and_error(counts: &[usize]) -> (f64, f64) {
    let m = counts.len().max(1) as f64;
    let mean = counts.iter().sum::<usize>() as f64 / m;
    let var = counts
        .iter()
        .map(|c| (*c as f64 - mean).powi(2))
        .sum::<f64>()
        / (m - 1.0).max(1.0);
    (mean, (var / m).sqrt())
}

fn calibrate(n: usize) -> Result<Calibration> {
    let mut e = vec![0u32; n];
    e[n - 1] = 1;
    let plane = Polynomial::from_terms(n, [(e, Complex64::new(1.0, 0.0))])?;
    let counts: Vec<usize> = line_counts(
        &plane,
        1.0,
        CALIBRATION_LINES,
        CALIBRATION_SEED,
        TAG_CALIBRATION,
    )?
    .into_iter()
    .flatten()
    .collect();
    let (mean, se) = mean_and_error(&counts);
    if mean <= 0.0 {
        return Err(LabError::numerical(
            "slice calibration saw no intersections",
            0.0,
        ));
    }
    let k = (n - 1) as f64;
    let plane_volume = std::f64::consts::PI.powf(k) / gamma(k + 1.0);
    Ok(Calibration {
        n,
        lines: CALIBRATION_LINES,
        seed: CALIBRATION_SEED,
        mean_count: mean,
        std_error: se,
        constant: plane_volume / mean,
    })
}

/// The calibration for C^n, computed once per process and cached.
pub fn slice_calibration(n: usize) -> Result<Calibration> {
    if n < 2 {
        return Err(LabError::input(
            "slicing needs ambient dimension at least 2",
        ));
    }
    static CACHE: OnceLock<Mutex<HashMap<usize, Calibration>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = cache.lock().unwrap().get(&n) {
        return Ok(*c);
    }
    let c = calibrate(n)?;
    cache.lock().unwrap().insert(n, c);
    Ok(c)
}

/// Volume of a hypersurface X ⊂ C^n inside B(0, R) from the mean number of
/// intersections with random complex lines.
pub fn slice_volume(
    spec: &AffineVarietySpec,
    radius: f64,
    lines: usize,
    seed: u64,
) -> Result<VolumeEstimate> {
    let p = spec.polynomial()?;
    let n = spec.ambient_dim();
    if !(radius > 0.0) {
        return Err(LabError::input("ball radius must be positive"));
    }
    if lines < 2 {
        return Err(LabError::input("slicing needs at least 2 lines"));
    }
    let cal = slice_calibration(n)?;
    let raw = line_counts(p, radius, lines, seed, TAG_SLICE)?;
    let degenerate = raw.iter().filter(|c| c.is_none()).count();
    let counts: Vec<usize> = raw.into_iter().flatten().collect();
    if counts.is_empty() {
        return Err(LabError::numerical(
            "every slicing line lies in the variety",
            0.0,
        ));
    }
    let (mean, se) = mean_and_error(&counts);
    let k = cal.constant * radius.powi(2 * n as i32 - 2);
    let value = k * mean;
    let rel_cal = cal.std_error / cal.mean_count;
    let std_error = ((k * se).powi(2) + (value * rel_cal).powi(2)).sqrt();
    Ok(
        VolumeEstimate::new(value, std_error, Method::Slice, counts.len(), Some(seed))
            .with_skipped(degenerate, lines),
    )
}

/// Slice volume of a plane curve inside B(0, R).
pub fn slice_volume_affine(
    spec: &AffineVarietySpec,
    radius: f64,
    lines: usize,
    seed: u64,
) -> Result<VolumeEstimate> {
    if spec.ambient_dim() != 2 {
        return Err(LabError::Unsupported(
            "slice_volume_affine handles plane curves; use slice_volume for hypersurfaces in C^n"
                .into(),
        ));
    }
    slice_volume(spec, radius, lines, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec(s: &str, n: usize) -> AffineVarietySpec {
        AffineVarietySpec::parse_hypersurface(s, n).unwrap()
    }

    /// Under the invariant line measure a complex line through the ball meets
    /// a hyperplane through the centre inside the ball with probability 1/n,
    /// so the plane-curve constant is pi / (1/2) = 2 pi.
    #[test]
    fn calibration_constants() {
        let c2 = slice_calibration(2).unwrap();
        assert!((c2.mean_count - 0.5).abs() < 4.0 * c2.std_error, "{c2:?}");
        assert!((c2.constant - 2.0 * PI).abs() / (2.0 * PI) < 0.01);
        let c3 = slice_calibration(3).unwrap();
        assert!(
            (c3.mean_count - 1.0 / 3.0).abs() < 4.0 * c3.std_error,
            "{c3:?}"
        );
    }

    #[test]
    fn calibration_identity() {
        let v =
            slice_volume_affine(&spec("z1", 2), 1.0, CALIBRATION_LINES, CALIBRATION_SEED).unwrap();
        assert!((v.value - PI).abs() < 3.0 * v.std_error + 0.02, "{v:?}");
    }

    #[test]
    fn parabola_and_two_lines() {
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        let exact = PI * (phi + 2.0 * phi * phi);
        let v = slice_volume_affine(&spec("z1 - z0^2", 2), 1.0, 100_000, 11).unwrap();
        assert!((v.value - exact).abs() / exact < 0.05, "{v:?}");
        let v = slice_volume_affine(&spec("z0*z1", 2), 1.0, 100_000, 12).unwrap();
        assert!((v.value - 2.0 * PI).abs() / (2.0 * PI) < 0.05, "{v:?}");
    }

    #[test]
    fn homothety() {
        let base = slice_volume_affine(&spec("z1 - z0^2", 2), 1.0, 50_000, 3).unwrap();
        let big = slice_volume_affine(&spec("z1 - 0.5*z0^2", 2), 2.0, 50_000, 3).unwrap();
        let ratio = big.value / (4.0 * base.value);
        assert!((ratio - 1.0).abs() < 0.03, "{ratio}");
    }

    #[test]
    fn deterministic() {
        let a = slice_volume_affine(&spec("z0^3 - z1^2 + 0.1", 2), 1.5, 5_000, 8).unwrap();
        let b = slice_volume_affine(&spec("z0^3 - z1^2 + 0.1", 2), 1.5, 5_000, 8).unwrap();
        assert_eq!(a, b);
    }
}
