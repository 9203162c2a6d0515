//! Growth classification, cones over projective curves, degree estimates and
//! canonical fiber polynomials.

mod cone;
mod fiber_poly;

pub use cone::{
    cone_growth_check, cone_of, cone_slice_relation, ConeGrowthReport, ConeSliceReport, ConeSpec,
    CONE_LINES,
};
pub use fiber_poly::{
    reconstruct_fiber_polynomial, FiberPolynomial, FiberSource, ReconstructOptions,
    NON_ALGEBRAIC_RESIDUAL,
};

use std::collections::BTreeMap;

use serde::Serialize;

use crate::cloud::PointCloud;
use crate::error::{LabError, Result};
use crate::fit::line_fit;
use crate::linalg::{apply, norm, Unitary};
use crate::quadrature::PolarGrid;
use crate::varieties::ProjectiveVarietySpec;
use crate::volume::{fs_area_quadrature, projective_slice_counts, RadialProfile};

pub const SLOPE_TOL: f64 = 0.15;
pub const BAND_TOL: f64 = 0.2;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthVerdict {
    pub k: usize,
    pub fitted_slope: f64,
    /// Mean of log V - 2k log R.
    pub fitted_log_c: f64,
    /// Largest positive deviation of log V - 2k log R above `fitted_log_c`.
    pub residual: f64,
    /// Slope between the last two radii.
    pub last_slope: f64,
    pub algebraic: bool,
    pub radii_used: Vec<f64>,
    pub slope_tol: f64,
    pub band_tol: f64,
}

/// Polynomial-growth verdict for a radial profile of a k-dimensional set:
/// algebraic when the log-log slope is at most 2k + 0.15 and log V stays
/// within 0.2 above the fitted band 2k log R + log C.
pub fn bishop_growth_test(profile: &RadialProfile, k: usize) -> Result<GrowthVerdict> {
    let radii = &profile.radii;
    let values = profile.values();
    if radii.len() < 4 {
        return Err(LabError::input("growth test needs at least 4 radii"));
    }
    if radii[radii.len() - 1] < 8.0 * radii[0] * (1.0 - 1e-12) {
        return Err(LabError::input("radii must span a factor of at least 8"));
    }
    if k == 0 {
        return Err(LabError::input("growth test needs positive dimension"));
    }
    for (w, e) in values.windows(2).zip(profile.volumes.windows(2)) {
        if w[1] < w[0] - (e[0].std_error + e[1].std_error) {
            return Err(LabError::numerical(
                "radial profile is not monotone",
                w[0] - w[1],
            ));
        }
    }
    if values.iter().any(|v| !(*v > 0.0)) {
        return Err(LabError::numerical("radial profile has empty volumes", 0.0));
    }
    let lr: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let lv: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let fit = line_fit(&lr, &lv).ok_or_else(|| LabError::input("degenerate radius ladder"))?;
    let two_k = 2.0 * k as f64;
    let dev: Vec<f64> = lr.iter().zip(&lv).map(|(r, v)| v - two_k * r).collect();
    let log_c = dev.iter().sum::<f64>() / dev.len() as f64;
    let residual = dev
        .iter()
        .map(|d| d - log_c)
        .fold(f64::NEG_INFINITY, f64::max);
    let m = lr.len();
    let last_slope = (lv[m - 1] - lv[m - 2]) / (lr[m - 1] - lr[m - 2]);
    Ok(GrowthVerdict {
        k,
        fitted_slope: fit.slope,
        fitted_log_c: log_c,
        residual,
        last_slope,
        algebraic: fit.slope <= two_k + SLOPE_TOL && residual <= BAND_TOL,
        radii_used: radii.clone(),
        slope_tol: SLOPE_TOL,
        band_tol: BAND_TOL,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeMethod {
    Slicing,
    VolumeRatio,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeEstimate {
    pub degree: u32,
    pub method: DegreeMethod,
    pub raw_value: f64,
    /// 1 - 2 |raw - degree|, clamped to [0, 1].
    pub confidence: f64,
    /// The raw value is more than 0.25 from its rounding.
    pub low_confidence: bool,
}

fn degree_estimate(raw: f64, degree: u32, method: DegreeMethod) -> DegreeEstimate {
    let gap = (raw - degree as f64).abs();
    DegreeEstimate {
        degree,
        method,
        raw_value: raw,
        confidence: (1.0 - 2.0 * gap).clamp(0.0, 1.0),
        low_confidence: gap > 0.25,
    }
}

/// Round half up, so x.5 goes to x + 1.
fn round_half_up(x: f64) -> u32 {
    (x + 0.5).floor().max(0.0) as u32
}

/// Degree of a projective hypersurface as the modal number of intersection
/// points with random projective lines.
pub fn degree_by_slicing(
    spec: &ProjectiveVarietySpec,
    lines: usize,
    seed: u64,
) -> Result<DegreeEstimate> {
    let p = spec.polynomial()?;
    if lines == 0 {
        return Err(LabError::input("need at least one slicing line"));
    }
    let counts: Vec<usize> = projective_slice_counts(p, lines, seed)?
        .into_iter()
        .flatten()
        .collect();
    if counts.is_empty() {
        return Err(LabError::numerical(
            "every slicing line lies in the variety",
            0.0,
        ));
    }
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    for c in &counts {
        *hist.entry(*c).or_default() += 1;
    }
    // Ties go to the larger count.
    let modal = hist
        .iter()
        .max_by_key(|(c, n)| (**n, **c))
        .map(|(c, _)| *c)
        .unwrap();
    let raw = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
    Ok(degree_estimate(raw, modal as u32, DegreeMethod::Slicing))
}

/// Degree as Fubini–Study volume over the volume pi^k / k! of CP^k.
pub fn degree_by_volume(
    spec: &ProjectiveVarietySpec,
    grid: &PolarGrid,
    seed: u64,
) -> Result<DegreeEstimate> {
    let k = spec.pure_dim();
    let vol = fs_area_quadrature(spec, grid, seed)?;
    let unit = std::f64::consts::PI.powi(k as i32) / (1..=k).product::<usize>() as f64;
    let raw = vol.value / unit;
    Ok(degree_estimate(
        raw,
        round_half_up(raw),
        DegreeMethod::VolumeRatio,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContainmentReport {
    pub contained: bool,
    pub violators: usize,
}

/// Is every rotated point in B(0, R) or in the cone |tail| < C |head|, where
/// head is the first k coordinates?
pub fn cone_containment_test(
    cloud: &PointCloud,
    k: usize,
    c: f64,
    r: f64,
    unitary: &Unitary,
) -> Result<ContainmentReport> {
    if !(c > 0.0) || !(r > 0.0) {
        return Err(LabError::input("cone constant and radius must be positive"));
    }
    let n = cloud.dim();
    if !cloud.is_empty() && (k == 0 || k >= n) {
        return Err(LabError::input(format!(
            "split index {k} must be in 1..{n}"
        )));
    }
    if !cloud.is_empty() && unitary.nrows() != n {
        return Err(LabError::Dimension {
            expected: n,
            got: unitary.nrows(),
        });
    }
    let violators = cloud
        .points()
        .iter()
        .filter(|p| {
            let y = apply(unitary, p);
            !(norm(&y) <= r || norm(&y[k..]) < c * norm(&y[..k]))
        })
        .count();
    Ok(ContainmentReport {
        contained: violators == 0,
        violators,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloud::Ball;
    use crate::linalg::identity;
    use crate::varieties::{sample_graph, sample_hypersurface, AffineVarietySpec, GraphSpec};
    use crate::volume::{VolumeEstimate, FS_GRID};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn profile(radii: &[f64], values: &[f64]) -> RadialProfile {
        RadialProfile {
            label: "test".into(),
            radii: radii.to_vec(),
            volumes: values
                .iter()
                .map(|v| VolumeEstimate {
                    value: *v,
                    std_error: 0.0,
                    method: crate::volume::Method::Gram,
                    sample_count: 1,
                    seed: None,
                    skipped: 0,
                    degraded: false,
                })
                .collect(),
        }
    }

    #[test]
    fn line_profile_is_algebraic() {
        let p = profile(&[1.0, 2.0, 4.0, 8.0], &[PI, 4.0 * PI, 16.0 * PI, 64.0 * PI]);
        let v = bishop_growth_test(&p, 1).unwrap();
        assert!((v.fitted_slope - 2.0).abs() < 1e-12);
        assert!(v.algebraic);
        assert!((v.fitted_log_c - PI.ln()).abs() < 1e-12);
    }

    #[test]
    fn fast_growth_is_not() {
        let p = profile(&[1.0, 2.0, 4.0, 8.0], &[1.0, 8.0, 64.0, 512.0]);
        assert!(!bishop_growth_test(&p, 1).unwrap().algebraic);
    }

    #[test]
    fn growth_preconditions() {
        assert!(
            bishop_growth_test(&profile(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 4.0]), 1).is_err()
        );
        assert!(
            bishop_growth_test(&profile(&[1.0, 2.0, 4.0, 8.0], &[1.0, 3.0, 2.0, 4.0]), 1).is_err()
        );
        assert!(bishop_growth_test(&profile(&[1.0, 2.0, 8.0], &[1.0, 3.0, 4.0]), 1).is_err());
    }

    fn proj(s: &str) -> ProjectiveVarietySpec {
        ProjectiveVarietySpec::parse_hypersurface(s, 3).unwrap()
    }

    #[test]
    fn degree_tables() {
        for (s, d) in [("z2", 1), ("z0*z2 - z1^2", 2), ("z0^3 + z1^3 + z2^3", 3)] {
            let a = degree_by_slicing(&proj(s), 500, 3).unwrap();
            assert_eq!(a.degree, d);
            assert!((a.raw_value - d as f64).abs() < 1e-12);
            let b = degree_by_volume(&proj(s), &FS_GRID, 3).unwrap();
            assert_eq!(b.degree, d, "{b:?}");
            assert!((b.raw_value - d as f64).abs() / d as f64 <= 0.03, "{b:?}");
        }
    }

    #[test]
    fn rounding_ties_go_up() {
        assert_eq!(round_half_up(2.5), 3);
        assert_eq!(round_half_up(2.49), 2);
        let e = degree_estimate(2.4, 2, DegreeMethod::VolumeRatio);
        assert!(e.low_confidence);
    }

    #[test]
    fn containment_examples() {
        let spec = AffineVarietySpec::parse_hypersurface("z1 - z0^2", 2).unwrap();
        let cloud = sample_hypersurface(&spec, &Ball::origin(2, 5.0).unwrap(), 2000, 1).unwrap();
        assert!(
            cone_containment_test(&cloud, 1, 6.0, 1.0, &identity(2))
                .unwrap()
                .contained
        );

        let g = GraphSpec::new("exp", 3.0, |z: Complex64| z.exp()).unwrap();
        let cloud = sample_graph(&g, 30).unwrap();
        let r = cone_containment_test(&cloud, 1, 5.0, 1.0, &identity(2)).unwrap();
        assert!(!r.contained && r.violators > 0);

        let small = sample_hypersurface(&spec, &Ball::origin(2, 0.5).unwrap(), 100, 1).unwrap();
        assert!(
            cone_containment_test(&small, 1, 1e-3, 0.5, &identity(2))
                .unwrap()
                .contained
        );
        assert!(cone_containment_test(&small, 1, 0.0, 0.5, &identity(2)).is_err());
    }
}
