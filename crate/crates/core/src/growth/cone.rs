use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::fit::line_fit;
use crate::linalg::norm;
use crate::poly::PolySystem;
use crate::quadrature::PolarGrid;
use crate::rng::{child_seed, TAG_LADDER};
use crate::varieties::{AffineVarietySpec, Membership, ProjectiveVarietySpec};
use crate::volume::{fs_area_quadrature, fs_volume_projective, slice_volume, VolumeEstimate};

/// Default number of slicing lines per cone estimate.
pub const CONE_LINES: usize = 100_000;

/// The affine cone in C^(n+1) over a projective variety in CP^n.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeSpec {
    projective: ProjectiveVarietySpec,
    affine: AffineVarietySpec,
}

impl ConeSpec {
    /// Cone cut out by a homogeneous system; inhomogeneous input is rejected.
    pub fn from_system(system: PolySystem, projective_dim: usize) -> Result<Self> {
        Ok(cone_of(&ProjectiveVarietySpec::new(
            system,
            projective_dim,
        )?))
    }

    pub fn projective(&self) -> &ProjectiveVarietySpec {
        &self.projective
    }

    /// The same equations read as an affine variety.
    pub fn affine(&self) -> &AffineVarietySpec {
        &self.affine
    }

    pub fn ambient_dim(&self) -> usize {
        self.affine.ambient_dim()
    }

    pub fn pure_dim(&self) -> usize {
        self.affine.pure_dim()
    }

    /// Membership with the point scaled to the unit sphere, so it is the same
    /// for every nonzero multiple of `z`; the vertex belongs to the cone.
    pub fn membership(&self, z: &[Complex64], tol: f64) -> Result<Membership> {
        if norm(z) == 0.0 {
            if z.len() != self.ambient_dim() {
                return Err(LabError::Dimension {
                    expected: self.ambient_dim(),
                    got: z.len(),
                });
            }
            return Ok(Membership {
                inside: true,
                residual: 0.0,
            });
        }
        self.projective.membership(z, tol)
    }
}

pub fn cone_of(spec: &ProjectiveVarietySpec) -> ConeSpec {
    let affine = AffineVarietySpec::new(spec.system().clone(), spec.pure_dim() + 1).expect(
        "a projective variety of dimension k < n gives an affine cone of dimension k + 1 < n + 1",
    );
    ConeSpec {
        projective: spec.clone(),
        affine,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeSliceReport {
    /// Vol(Cone ∩ unit sphere) from slice counts.
    pub a: f64,
    pub a_std_error: f64,
    /// 2 pi times the Fubini–Study volume from direct quadrature.
    pub two_pi_volp: f64,
    pub two_pi_volp_error: f64,
    pub ratio: f64,
}

/// Compare the sphere volume of the cone with 2 pi times the projective volume.
pub fn cone_slice_relation(
    spec: &ProjectiveVarietySpec,
    lines: usize,
    grid: &PolarGrid,
    seed: u64,
) -> Result<ConeSliceReport> {
    let hopf = fs_volume_projective(spec, lines, seed)?;
    let fs = fs_area_quadrature(spec, grid, seed)?;
    if !(fs.value > 0.0) {
        return Err(LabError::numerical(
            "projective volume quadrature returned zero",
            0.0,
        ));
    }
    let a = TAU * hopf.value;
    let two_pi_volp = TAU * fs.value;
    Ok(ConeSliceReport {
        a,
        a_std_error: TAU * hopf.std_error,
        two_pi_volp,
        two_pi_volp_error: TAU * fs.std_error,
        ratio: a / two_pi_volp,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeGrowthReport {
    pub radii: Vec<f64>,
    pub volumes: Vec<VolumeEstimate>,
    pub fitted_exponent: f64,
    pub fitted_constant: f64,
    pub a: f64,
    /// A / (2k + 2), from integrating r^(2k+1) in polar coordinates.
    pub constant_polar: f64,
    /// A / (2k + 1), the alternative constant.
    pub constant_alternative: f64,
    pub relative_error_polar: f64,
    pub relative_error_alternative: f64,
    /// Fewer than three radii: the fit passes through every point.
    pub underdetermined: bool,
}

/// Fit Vol(Cone ∩ B(R)) = c R^e by slicing and compare c with A / (2k + 2)
/// and A / (2k + 1).
pub fn cone_growth_check(
    cone: &ConeSpec,
    radii: &[f64],
    lines: usize,
    seed: u64,
) -> Result<ConeGrowthReport> {
    if radii.len() < 2 {
        return Err(LabError::input("cone growth needs at least 2 radii"));
    }
    if radii[0] <= 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(LabError::input(
            "radii must be positive and strictly ascending",
        ));
    }
    let volumes = radii
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            slice_volume(
                cone.affine(),
                r,
                lines,
                child_seed(seed, TAG_LADDER, i as u64),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    for w in volumes.windows(2) {
        if w[1].value < w[0].value - (w[0].std_error + w[1].std_error) {
            return Err(LabError::numerical(
                "cone volumes are not monotone",
                w[0].value - w[1].value,
            ));
        }
    }
    if volumes.iter().any(|v| !(v.value > 0.0)) {
        return Err(LabError::numerical("cone slice saw no intersections", 0.0));
    }
    let lr: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let lv: Vec<f64> = volumes.iter().map(|v| v.value.ln()).collect();
    let fit = line_fit(&lr, &lv).ok_or_else(|| LabError::input("degenerate radius ladder"))?;
    let a = TAU * fs_volume_projective(cone.projective(), lines, seed)?.value;
    let k = cone.projective().pure_dim() as f64;
    let c = fit.intercept.exp();
    let polar = a / (2.0 * k + 2.0);
    let alternative = a / (2.0 * k + 1.0);
    Ok(ConeGrowthReport {
        radii: radii.to_vec(),
        volumes,
        fitted_exponent: fit.slope,
        fitted_constant: c,
        a,
        constant_polar: polar,
        constant_alternative: alternative,
        relative_error_polar: (c - polar).abs() / polar,
        relative_error_alternative: (c - alternative).abs() / alternative,
        underdetermined: radii.len() < 3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{complex_gaussian, substream};
    use crate::volume::FS_GRID;
    use std::f64::consts::PI;

    fn proj(s: &str, n: usize) -> ProjectiveVarietySpec {
        ProjectiveVarietySpec::parse_hypersurface(s, n).unwrap()
    }

    #[test]
    fn cones_of_examples() {
        let c = cone_of(&proj("z2", 3));
        assert_eq!(c.ambient_dim(), 3);
        assert_eq!(c.pure_dim(), 2);
        let sys = PolySystem::hypersurface(crate::Polynomial::parse("z1 - z0^2", Some(2)).unwrap());
        assert!(matches!(
            ConeSpec::from_system(sys, 0),
            Err(LabError::Input(_))
        ));
    }

    #[test]
    fn cone_membership_is_homothety_invariant() {
        let c = cone_of(&proj("z0*z2 - z1^2", 3));
        let mut rng = substream(3, 0, 0);
        for _ in 0..50 {
            let t = complex_gaussian(&mut rng);
            let z = [t * t, t, Complex64::new(1.0, 0.0)];
            let z = [z[0], z[1], z[2] + 0.01 * complex_gaussian(&mut rng)];
            let lambda = complex_gaussian(&mut rng) * 3.0;
            let scaled: Vec<Complex64> = z.iter().map(|x| x * lambda).collect();
            let a = c.membership(&z, 1e-9).unwrap();
            let b = c.membership(&scaled, 1e-9).unwrap();
            assert!((a.residual - b.residual).abs() <= 1e-12 * (1.0 + a.residual));
            assert_eq!(a.inside, b.inside);
        }
        assert!(
            c.membership(&[Complex64::new(0.0, 0.0); 3], 1e-12)
                .unwrap()
                .inside
        );
    }

    #[test]
    fn hopf_ratios() {
        for (s, n, a) in [
            ("z1", 2, TAU),
            ("z2", 3, 2.0 * PI * PI),
            ("z0*z2 - z1^2", 3, 4.0 * PI * PI),
        ] {
            let r = cone_slice_relation(&proj(s, n), 2000, &FS_GRID, 7).unwrap();
            assert!((r.ratio - 1.0).abs() <= 0.03, "{s}: {r:?}");
            assert!((r.a - a).abs() / a <= 0.03, "{s}: {r:?}");
        }
    }

    #[test]
    fn linear_cone_constant() {
        let r =
            cone_growth_check(&cone_of(&proj("z2", 3)), &[1.0, 2.0, 4.0, 8.0], 50_000, 1).unwrap();
        assert!((r.fitted_exponent - 4.0).abs() <= 0.05, "{r:?}");
        assert!(
            (r.fitted_constant - PI * PI / 2.0).abs() / (PI * PI / 2.0) <= 0.05,
            "{r:?}"
        );
        assert!(r.relative_error_polar <= 0.05);
        assert!(r.relative_error_alternative > 0.2);
        let two = cone_growth_check(&cone_of(&proj("z2", 3)), &[1.0, 2.0], 5_000, 1).unwrap();
        assert!(two.underdetermined);
    }
}
