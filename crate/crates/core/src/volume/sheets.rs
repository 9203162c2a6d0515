use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use super::{real_gram_area, Method, StandardKahlerForm, VolumeEstimate};
use crate::error::{LabError, Result};
use crate::linalg::{haar_unitary, hdot};
use crate::poly::univariate_roots;
use crate::quadrature::PolarGrid;
use crate::rng::{substream, TAG_UNITARY};
use crate::varieties::AffineVarietySpec;

/// Default grid for sheet quadrature: midpoint in r^2, trapezoid in angle.
pub const SHEET_GRID: PolarGrid = PolarGrid {
    radial: 256,
    angular: 512,
};

/// Pointwise integrand: receives the point on the curve and the pushforward
/// T = (1, w') of the base coordinate vector; `None` marks a skipped point.
type Integrand<'a> = dyn Fn(&[Complex64], [Complex64; 2]) -> Option<f64> + Sync + 'a;

struct SheetSum {
    value: f64,
    attempted: usize,
    skipped: usize,
}

/// Sum of the integrand over all sheets of the (rotated) curve above a
/// midpoint polar grid of the base disc |z| <= R, restricted to B(0, R).
fn sheet_sum(
    spec: &AffineVarietySpec,
    radius: f64,
    grid: &PolarGrid,
    integrand: &Integrand,
) -> Result<SheetSum> {
    let p = spec.polynomial()?;
    let dp: Vec<_> = (0..2).map(|j| p.partial(j)).collect();
    let weight = PI * radius * radius / (grid.radial * grid.angular) as f64;
    let rows: Vec<(f64, usize, usize)> = (0..grid.radial)
        .into_par_iter()
        .map(|i| {
            let r = radius * ((i as f64 + 0.5) / grid.radial as f64).sqrt();
            let mut acc = (0.0, 0, 0);
            for j in 0..grid.angular {
                let z = Complex64::from_polar(r, TAU * (j as f64 + 0.5) / grid.angular as f64);
                let q = p
                    .restrict_unchecked(
                        &[z, Complex64::new(0.0, 0.0)],
                        &[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
                    )
                    .trim_relative(1e-14);
                if q.degree() == 0 {
                    continue;
                }
                let roots = univariate_roots(&q)?;
                for w in roots {
                    if r * r + w.norm_sqr() > radius * radius {
                        continue;
                    }
                    acc.1 += 1;
                    let pt = [z, w];
                    let pz = dp[0].eval_unchecked(&pt);
                    let pw = dp[1].eval_unchecked(&pt);
                    if pw.norm() <= 1e-9 * (1.0 + pz.norm()) {
                        acc.2 += 1;
                        continue;
                    }
                    match integrand(&pt, [Complex64::new(1.0, 0.0), -pz / pw]) {
                        Some(v) if v.is_finite() => acc.0 += v,
                        _ => acc.2 += 1,
                    }
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    Ok(SheetSum {
        value: weight * rows.iter().map(|r| r.0).sum::<f64>(),
        attempted: rows.iter().map(|r| r.1).sum(),
        skipped: rows.iter().map(|r| r.2).sum(),
    })
}

fn sheet_estimate(
    spec: &AffineVarietySpec,
    radius: f64,
    grid: &PolarGrid,
    seed: u64,
    method: Method,
    integrand: &Integrand,
) -> Result<VolumeEstimate> {
    if spec.ambient_dim() != 2 {
        return Err(LabError::Unsupported(
            "sheet quadrature handles plane curves only".into(),
        ));
    }
    if !(radius > 0.0) {
        return Err(LabError::input("ball radius must be positive"));
    }
    // A generic unitary makes the projection to the first coordinate proper
    // with no vertical components.
    let u = haar_unitary(&mut substream(seed, TAG_UNITARY, 0), 2);
    let rotated = spec.rotated(&u)?;
    let fine = sheet_sum(&rotated, radius, grid, integrand)?;
    let coarse = sheet_sum(&rotated, radius, &grid.coarsened(), integrand)?;
    Ok(VolumeEstimate::new(
        fine.value,
        (fine.value - coarse.value).abs(),
        method,
        grid.radial * grid.angular,
        Some(seed),
    )
    .with_skipped(fine.skipped, fine.attempted))
}

/// Area of a plane curve inside B(0, R) from the Gram density of its local
/// parametrisations over a generic projection.
pub fn gram_volume_sheets(
    spec: &AffineVarietySpec,
    radius: f64,
    grid: &PolarGrid,
    seed: u64,
) -> Result<VolumeEstimate> {
    sheet_estimate(spec, radius, grid, seed, Method::Gram, &|_, t| {
        let i = Complex64::i();
        Some(real_gram_area(&t, &[i * t[0], i * t[1]]))
    })
}

/// Area of a plane curve inside B(0, R) as the integral of omega over unit
/// tangent frames, scaled by the squared length of the base vector.
pub fn wirtinger_volume_sheets(
    spec: &AffineVarietySpec,
    radius: f64,
    grid: &PolarGrid,
    seed: u64,
) -> Result<VolumeEstimate> {
    let u = haar_unitary(&mut substream(seed, TAG_UNITARY, 0), 2);
    let rotated = spec.rotated(&u)?;
    let omega = StandardKahlerForm::new(2);
    sheet_estimate(spec, radius, grid, seed, Method::Wirtinger, &|pt, t| {
        let frame = rotated.tangent_frame(pt).ok()?;
        let e = &frame[0];
        let c = hdot(&t, e);
        let ce: Vec<Complex64> = e.iter().map(|x| c * x).collect();
        Some(omega.eval(&ce, &StandardKahlerForm::j(&ce)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str) -> AffineVarietySpec {
        AffineVarietySpec::parse_hypersurface(s, 2).unwrap()
    }

    #[test]
    fn two_lines_and_a_line() {
        let grid = PolarGrid::new(128, 256).unwrap();
        let v = gram_volume_sheets(&spec("z0*z1"), 1.0, &grid, 4).unwrap();
        assert!((v.value - 2.0 * PI).abs() / (2.0 * PI) < 0.01, "{v:?}");
        let v = gram_volume_sheets(&spec("z1"), 2.0, &grid, 4).unwrap();
        assert!((v.value - 4.0 * PI).abs() / (4.0 * PI) < 0.01, "{v:?}");
        assert!(!v.degraded);
    }

    #[test]
    fn parabola_by_sheets() {
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        let exact = PI * (phi + 2.0 * phi * phi);
        let g = gram_volume_sheets(&spec("z1 - z0^2"), 1.0, &SHEET_GRID, 9).unwrap();
        let w = wirtinger_volume_sheets(&spec("z1 - z0^2"), 1.0, &SHEET_GRID, 9).unwrap();
        assert!((g.value - exact).abs() / exact < 0.01, "{g:?}");
        assert!((w.value - g.value).abs() / g.value < 1e-3, "{w:?} {g:?}");
    }

    #[test]
    fn curves_in_c3_unsupported() {
        let s = AffineVarietySpec::parse_hypersurface("z2", 3).unwrap();
        assert!(matches!(
            gram_volume_sheets(&s, 1.0, &SHEET_GRID, 0),
            Err(LabError::Unsupported(_))
        ));
    }
}
