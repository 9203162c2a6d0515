//! Computable analytic sets: polynomial zero sets and holomorphic graphs.

mod fiber;
mod graph;
mod proper;
mod sampling;

pub use fiber::{fiber_points, Fiber, FiberPoint};
pub use graph::{ray_extent, sample_graph, sample_graph_in_region, GraphRegion, GraphSpec, HoloFn};
pub use proper::{find_proper_coordinates, ProperCoordinates, PROPER_CONE_CONSTANT, PROPER_LADDER};
pub use sampling::{sample_hypersurface, SAMPLE_RESIDUAL_TOL};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{check_dim, LabError, Result};
use crate::linalg::{norm, orthogonal_complement};
use crate::poly::{PolySystem, Polynomial};

/// Zero set of a polynomial system in C^n with claimed pure dimension k.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineVarietySpec {
    system: PolySystem,
    pure_dim: usize,
}

impl AffineVarietySpec {
    pub fn new(system: PolySystem, pure_dim: usize) -> Result<Self> {
        let n = system.nvars();
        if pure_dim >= n {
            return Err(LabError::input(format!(
                "pure dimension {pure_dim} must be below the ambient dimension {n}"
            )));
        }
        if system.polys().len() == 1 && pure_dim != n - 1 {
            return Err(LabError::input("a hypersurface has pure dimension n - 1"));
        }
        if system.polys().iter().any(Polynomial::is_zero) {
            return Err(LabError::input("defining polynomials must be nonzero"));
        }
        Ok(AffineVarietySpec { system, pure_dim })
    }

    pub fn hypersurface(p: Polynomial) -> Result<Self> {
        let n = p.nvars();
        if n < 1 {
            return Err(LabError::input("hypersurface needs at least one variable"));
        }
        Self::new(PolySystem::hypersurface(p), n - 1)
    }

    /// Parse a single defining polynomial in `n` variables.
    pub fn parse_hypersurface(text: &str, n: usize) -> Result<Self> {
        Self::hypersurface(Polynomial::parse(text, Some(n))?)
    }

    pub fn system(&self) -> &PolySystem {
        &self.system
    }

    pub fn ambient_dim(&self) -> usize {
        self.system.nvars()
    }

    pub fn pure_dim(&self) -> usize {
        self.pure_dim
    }

    pub fn is_hypersurface(&self) -> bool {
        self.system.polys().len() == 1
    }

    /// The defining polynomial of a hypersurface.
    pub fn polynomial(&self) -> Result<&Polynomial> {
        if self.is_hypersurface() {
            Ok(&self.system.polys()[0])
        } else {
            Err(LabError::Unsupported(
                "operation needs a hypersurface (one defining polynomial)".into(),
            ))
        }
    }

    /// The same variety in coordinates y = U z, i.e. defined by p(U^H y).
    pub fn rotated(&self, u: &crate::linalg::Unitary) -> Result<Self> {
        let adj = u.adjoint();
        Ok(AffineVarietySpec {
            system: self.system.map(|p| p.compose_linear(&adj))?,
            pure_dim: self.pure_dim,
        })
    }

    /// The image of the variety under z -> lambda z.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if lambda == 0.0 {
            return Err(LabError::input("scale factor must be nonzero"));
        }
        let s = vec![Complex64::new(1.0 / lambda, 0.0); self.ambient_dim()];
        Ok(AffineVarietySpec {
            system: self.system.map(|p| p.scale_variables(&s))?,
            pure_dim: self.pure_dim,
        })
    }

    pub fn membership(&self, z: &[Complex64], tol: f64) -> Result<Membership> {
        membership_of(&self.system, z, tol)
    }

    /// Orthonormal basis of the holomorphic tangent space at a smooth point.
    pub fn tangent_frame(&self, z: &[Complex64]) -> Result<Vec<Vec<Complex64>>> {
        let m = self.membership(z, 1e-8)?;
        if !m.inside {
            return Err(LabError::input(format!(
                "point is not on the variety (residual {:e})",
                m.residual
            )));
        }
        let n = self.ambient_dim();
        let rows: Vec<Vec<Complex64>> = self
            .system
            .polys()
            .iter()
            .map(|p| {
                p.gradient(z)
                    .map(|g| g.into_iter().map(|c| c.conj()).collect())
            })
            .collect::<Result<_>>()?;
        let scale = rows.iter().map(|r| norm(r)).fold(1.0, f64::max);
        let frame = orthogonal_complement(&rows, n, 1e-9 * scale)?;
        if frame.len() != self.pure_dim {
            return Err(LabError::Singular(format!(
                "tangent space has dimension {} instead of {}",
                frame.len(),
                self.pure_dim
            )));
        }
        Ok(frame)
    }

    /// If the hypersurface is `c * z_j - g(other variables)` with `c` a
    /// nonzero constant and `z_j` appearing nowhere else, return `j` and `g / c`.
    pub fn graph_form(&self) -> Option<(usize, Polynomial)> {
        let p = self.polynomial().ok()?;
        let n = p.nvars();
        (0..n).rev().find_map(|j| {
            let mut unit = vec![0u32; n];
            unit[j] = 1;
            let c = p.coefficient(&unit);
            if c == Complex64::new(0.0, 0.0) {
                return None;
            }
            let other_uses = p.monomials().filter(|m| m.exponents[j] > 0).count();
            if other_uses != 1 {
                return None;
            }
            let mut lin = Polynomial::zero(n);
            lin.add_term(unit, c);
            let rest = &lin - p;
            Some((j, rest.scale(1.0 / c)))
        })
    }
}

/// Zero set in CP^n of homogeneous polynomials in n + 1 variables.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectiveVarietySpec {
    system: PolySystem,
    pure_dim: usize,
}

impl ProjectiveVarietySpec {
    pub fn new(system: PolySystem, pure_dim: usize) -> Result<Self> {
        if let Some(p) = system
            .polys()
            .iter()
            .find(|p| !p.is_homogeneous() || p.is_zero())
        {
            return Err(LabError::input(format!(
                "projective varieties need nonzero homogeneous polynomials, got {p}"
            )));
        }
        let n = system.nvars();
        if n < 2 {
            return Err(LabError::input(
                "projective space needs at least two homogeneous coordinates",
            ));
        }
        if pure_dim >= n - 1 {
            return Err(LabError::input(format!(
                "pure dimension {pure_dim} must be below the projective dimension {}",
                n - 1
            )));
        }
        Ok(ProjectiveVarietySpec { system, pure_dim })
    }

    pub fn hypersurface(p: Polynomial) -> Result<Self> {
        let n = p.nvars();
        if n < 2 {
            return Err(LabError::input(
                "projective space needs at least two homogeneous coordinates",
            ));
        }
        Self::new(PolySystem::hypersurface(p), n - 2)
    }

    pub fn parse_hypersurface(text: &str, nvars: usize) -> Result<Self> {
        Self::hypersurface(Polynomial::parse(text, Some(nvars))?)
    }

    pub fn system(&self) -> &PolySystem {
        &self.system
    }

    /// Projective dimension n (the system has n + 1 variables).
    pub fn projective_dim(&self) -> usize {
        self.system.nvars() - 1
    }

    pub fn pure_dim(&self) -> usize {
        self.pure_dim
    }

    pub fn polynomial(&self) -> Result<&Polynomial> {
        if self.system.polys().len() == 1 {
            Ok(&self.system.polys()[0])
        } else {
            Err(LabError::Unsupported(
                "operation needs a projective hypersurface".into(),
            ))
        }
    }

    pub fn rotated(&self, u: &crate::linalg::Unitary) -> Result<Self> {
        let adj = u.adjoint();
        Ok(ProjectiveVarietySpec {
            system: self.system.map(|p| p.compose_linear(&adj))?,
            pure_dim: self.pure_dim,
        })
    }

    /// Membership of the point with homogeneous coordinates `z`; any nonzero
    /// representative is accepted and normalised to the unit sphere.
    pub fn membership(&self, z: &[Complex64], tol: f64) -> Result<Membership> {
        check_dim(self.system.nvars(), z.len())?;
        let nz = norm(z);
        if nz == 0.0 {
            return Err(LabError::input("the zero vector is not a projective point"));
        }
        let unit: Vec<Complex64> = z.iter().map(|c| c / nz).collect();
        membership_of(&self.system, &unit, tol)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Membership {
    pub inside: bool,
    pub residual: f64,
}

/// Gradient-normalised residual max_i |f_i(z)| / (1 + |grad f_i(z)|).
pub fn membership_residual(system: &PolySystem, z: &[Complex64]) -> Result<f64> {
    check_dim(system.nvars(), z.len())?;
    let mut worst: f64 = 0.0;
    for p in system.polys() {
        let v = p.eval(z)?;
        let g = p.gradient(z)?;
        worst = worst.max(v.norm() / (1.0 + norm(&g)));
    }
    Ok(worst)
}

fn membership_of(system: &PolySystem, z: &[Complex64], tol: f64) -> Result<Membership> {
    if !(tol > 0.0) {
        return Err(LabError::input("membership tolerance must be positive"));
    }
    let residual = membership_residual(system, z)?;
    Ok(Membership {
        inside: residual <= tol,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hdot;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn parabola() -> AffineVarietySpec {
        AffineVarietySpec::parse_hypersurface("z1 - z0^2", 2).unwrap()
    }

    #[test]
    fn membership_examples() {
        let m = parabola()
            .membership(&[c(1.0, 0.0), c(1.0, 0.0)], 1e-9)
            .unwrap();
        assert!(m.inside);
        assert_eq!(m.residual, 0.0);
        let m = parabola()
            .membership(&[c(1.0, 0.0), c(1.1, 0.0)], 1e-3)
            .unwrap();
        let expect = 0.1 / (1.0 + 5f64.sqrt());
        assert!((m.residual - expect).abs() < 1e-12);
        assert!((m.residual - 0.0309).abs() < 1e-4);
        assert!(!m.inside);
        let conic = ProjectiveVarietySpec::parse_hypersurface("z0*z2 - z1^2", 3).unwrap();
        let s = 21f64.sqrt();
        let m = conic
            .membership(&[c(1.0 / s, 0.0), c(2.0 / s, 0.0), c(4.0 / s, 0.0)], 1e-9)
            .unwrap();
        assert!(m.inside);
        assert!(parabola().membership(&[c(0.0, 0.0)], 1e-9).is_err());
    }

    #[test]
    fn tangent_frame_examples() {
        let flat = AffineVarietySpec::parse_hypersurface("z1", 2).unwrap();
        let f = flat.tangent_frame(&[c(0.3, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(f.len(), 1);
        assert!((f[0][0].norm() - 1.0).abs() < 1e-12 && f[0][1].norm() < 1e-12);

        let f = parabola()
            .tangent_frame(&[c(1.0, 0.0), c(1.0, 0.0)])
            .unwrap();
        let e = &f[0];
        let target = [c(1.0 / 5f64.sqrt(), 0.0), c(2.0 / 5f64.sqrt(), 0.0)];
        assert!((hdot(e, &target).norm() - 1.0).abs() < 1e-12);

        let cross = AffineVarietySpec::parse_hypersurface("z0*z1", 2).unwrap();
        assert!(matches!(
            cross.tangent_frame(&[c(0.0, 0.0), c(0.0, 0.0)]),
            Err(LabError::Singular(_))
        ));
    }

    #[test]
    fn graph_form_detection() {
        let (j, g) = parabola().graph_form().unwrap();
        assert_eq!(j, 1);
        assert_eq!(g, Polynomial::parse("z0^2", Some(2)).unwrap());
        let line = AffineVarietySpec::parse_hypersurface("z0", 2).unwrap();
        assert_eq!(line.graph_form().unwrap().0, 0);
        let cross = AffineVarietySpec::parse_hypersurface("z0*z1", 2).unwrap();
        assert!(cross.graph_form().is_none());
        let double = AffineVarietySpec::parse_hypersurface("z1^2 - z0", 2).unwrap();
        assert_eq!(double.graph_form().unwrap().0, 0);
    }

    #[test]
    fn projective_requires_homogeneous() {
        assert!(ProjectiveVarietySpec::parse_hypersurface("z1 - z0^2", 3).is_err());
    }
}
