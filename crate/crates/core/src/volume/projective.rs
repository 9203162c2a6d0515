use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use statrs::function::gamma::gamma;

use super::{Method, VolumeEstimate};
use crate::error::{LabError, Result};
use crate::linalg::haar_unitary;
use crate::poly::{univariate_roots, Polynomial};
use crate::quadrature::PolarGrid;
use crate::rng::{substream, TAG_PROJECTIVE, TAG_UNITARY};
use crate::varieties::ProjectiveVarietySpec;

/// Default grid for the Fubini–Study quadrature (in s = r^2 / (1 + r^2) and angle).
pub const FS_GRID: PolarGrid = PolarGrid {
    radial: 512,
    angular: 512,
};

/// Volume of the unit sphere S^m in R^(m+1).
pub fn sphere_volume(m: usize) -> f64 {
    let h = (m as f64 + 1.0) / 2.0;
    2.0 * PI.powf(h) / gamma(h)
}

/// Number of points, with multiplicity, in which a projective hypersurface
/// meets random projective lines; each line is spanned by two orthonormal
/// columns of a Haar unitary. `None` marks a line inside the hypersurface.
pub fn projective_slice_counts(
    p: &Polynomial,
    lines: usize,
    seed: u64,
) -> Result<Vec<Option<usize>>> {
    if !p.is_homogeneous() || p.is_zero() {
        return Err(LabError::input(
            "projective slicing needs a nonzero homogeneous polynomial",
        ));
    }
    let n = p.nvars();
    let d = p.degree() as usize;
    let scale = p.max_coefficient();
    (0..lines)
        .into_par_iter()
        .map(|i| {
            let u = haar_unitary(&mut substream(seed, TAG_PROJECTIVE, i as u64), n);
            let a: Vec<Complex64> = (0..n).map(|r| u[(r, 1)]).collect();
            let dir: Vec<Complex64> = (0..n).map(|r| u[(r, 0)]).collect();
            let q = p.restrict_unchecked(&a, &dir);
            if q.max_coefficient() <= 1e-13 * scale {
                return Ok(None);
            }
            let q = q.trim_relative(1e-12);
            let finite = if q.degree() == 0 {
                0
            } else {
                univariate_roots(&q)?.len()
            };
            // Roots lost to a dropped leading coefficient sit at the point `dir`.
            Ok(Some(finite + (d - q.degree())))
        })
        .collect()
}

/// Fubini–Study volume of a projective hypersurface from slice counts:
/// A = Vol(S^(2k+1)) times the mean count, normalised by the count on a
/// linear subspace, and Vol^p = A / (2 pi).
pub fn fs_volume_projective(
    spec: &ProjectiveVarietySpec,
    samples: usize,
    seed: u64,
) -> Result<VolumeEstimate> {
    let p = spec.polynomial()?;
    if samples < 2 {
        return Err(LabError::input("need at least 2 slicing planes"));
    }
    let n = p.nvars();
    let k = spec.pure_dim();
    let raw = projective_slice_counts(p, samples, seed)?;
    let degenerate = raw.iter().filter(|c| c.is_none()).count();
    let counts: Vec<f64> = raw.into_iter().flatten().map(|c| c as f64).collect();
    if counts.is_empty() {
        return Err(LabError::numerical(
            "every slicing plane lies in the cone",
            0.0,
        ));
    }
    let mut e = vec![0u32; n];
    e[n - 1] = 1;
    let linear = Polynomial::from_terms(n, [(e, Complex64::new(1.0, 0.0))])?;
    let lin: Vec<f64> = projective_slice_counts(&linear, samples, seed)?
        .into_iter()
        .flatten()
        .map(|c| c as f64)
        .collect();
    let mean = counts.iter().sum::<f64>() / counts.len() as f64;
    let lin_mean = lin.iter().sum::<f64>() / lin.len().max(1) as f64;
    if lin_mean <= 0.0 {
        return Err(LabError::numerical(
            "linear calibration cone saw no intersections",
            0.0,
        ));
    }
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>()
        / (counts.len() as f64 - 1.0).max(1.0);
    let a_const = sphere_volume(2 * k + 1) / lin_mean;
    let value = a_const * mean / TAU;
    let std_error = a_const * (var / counts.len() as f64).sqrt() / TAU;
    Ok(
        VolumeEstimate::new(value, std_error, Method::Hopf, counts.len(), Some(seed))
            .with_skipped(degenerate, samples),
    )
}

/// Fubini–Study area of a projective plane curve by direct quadrature of the
/// metric over the affine chart z0 = 1 (after a seeded generic unitary), or
/// the point count of a zero-dimensional hypersurface in CP^1.
pub fn fs_area_quadrature(
    spec: &ProjectiveVarietySpec,
    grid: &PolarGrid,
    seed: u64,
) -> Result<VolumeEstimate> {
    let p = spec.polynomial()?;
    let u = haar_unitary(&mut substream(seed, TAG_UNITARY, 0), p.nvars());
    let rotated = spec.rotated(&u)?;
    let q = rotated.polynomial()?;
    match p.nvars() {
        2 => {
            let uni = q.dehomogenize(0)?;
            let lost = p.degree() - uni.degree();
            let line =
                uni.restrict_unchecked(&[Complex64::new(0.0, 0.0)], &[Complex64::new(1.0, 0.0)]);
            let finite = if line.degree() == 0 {
                0
            } else {
                univariate_roots(&line)?.len()
            };
            let points = finite + lost as usize;
            Ok(VolumeEstimate::new(
                points as f64,
                0.0,
                Method::FubiniStudy,
                1,
                Some(seed),
            ))
        }
        3 => {
            let chart = q.dehomogenize(0)?;
            let fine = fs_chart_sum(&chart, grid)?;
            let coarse = fs_chart_sum(&chart, &grid.coarsened())?;
            Ok(VolumeEstimate::new(
                fine.0,
                (fine.0 - coarse.0).abs(),
                Method::FubiniStudy,
                grid.radial * grid.angular,
                Some(seed),
            )
            .with_skipped(fine.2, fine.1))
        }
        _ => Err(LabError::Unsupported(
            "Fubini–Study quadrature covers points in CP^1 and curves in CP^2".into(),
        )),
    }
}

/// Sum of the FS area density of the affine curve a(x, w) = 0 over all sheets
/// above the x-plane. With s = r^2 / (1 + r^2) the area element r dr dtheta
/// becomes (1 + r^2)^2 ds dtheta / 2, and s runs over (0, 1).
fn fs_chart_sum(a: &Polynomial, grid: &PolarGrid) -> Result<(f64, usize, usize)> {
    let da: Vec<Polynomial> = (0..2).map(|j| a.partial(j)).collect();
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let rows: Vec<(f64, usize, usize)> = (0..grid.radial)
        .into_par_iter()
        .map(|i| {
            let s = (i as f64 + 0.5) / grid.radial as f64;
            let r2 = s / (1.0 - s);
            let jac = 0.5 * (1.0 + r2).powi(2);
            let mut acc = (0.0, 0, 0);
            for j in 0..grid.angular {
                let x =
                    Complex64::from_polar(r2.sqrt(), TAU * (j as f64 + 0.5) / grid.angular as f64);
                let fib = a
                    .restrict_unchecked(&[x, zero], &[zero, one])
                    .trim_relative(1e-14);
                if fib.degree() == 0 {
                    continue;
                }
                for w in univariate_roots(&fib)? {
                    acc.1 += 1;
                    let pt = [x, w];
                    let ax = da[0].eval_unchecked(&pt);
                    let aw = da[1].eval_unchecked(&pt);
                    if aw.norm() <= 1e-9 * (1.0 + ax.norm()) {
                        acc.2 += 1;
                        continue;
                    }
                    let v = [one, -ax / aw];
                    let x2 = 1.0 + r2 + w.norm_sqr();
                    let v2 = v[0].norm_sqr() + v[1].norm_sqr();
                    let vx = v[0] * x.conj() + v[1] * w.conj();
                    let density = (x2 * v2 - vx.norm_sqr()) / (x2 * x2);
                    if density.is_finite() {
                        acc.0 += density * jac;
                    } else {
                        acc.2 += 1;
                    }
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let weight = TAU / (grid.radial * grid.angular) as f64;
    Ok((
        weight * rows.iter().map(|r| r.0).sum::<f64>(),
        rows.iter().map(|r| r.1).sum(),
        rows.iter().map(|r| r.2).sum(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str, n: usize) -> ProjectiveVarietySpec {
        ProjectiveVarietySpec::parse_hypersurface(s, n).unwrap()
    }

    #[test]
    fn sphere_volumes() {
        assert!((sphere_volume(1) - TAU).abs() < 1e-12);
        assert!((sphere_volume(2) - 4.0 * PI).abs() < 1e-12);
        assert!((sphere_volume(3) - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn slice_counts_equal_degree() {
        for (s, d) in [("z2", 1), ("z0*z2 - z1^2", 2), ("z0^3 + z1^3 + z2^3", 3)] {
            let counts = projective_slice_counts(spec(s, 3).polynomial().unwrap(), 200, 1).unwrap();
            assert!(counts.iter().all(|c| *c == Some(d)), "{s}");
        }
    }

    #[test]
    fn hopf_volumes() {
        let line = fs_volume_projective(&spec("z2", 3), 1000, 2).unwrap();
        assert!((line.value - PI).abs() < 1e-9);
        let point = fs_volume_projective(&spec("z1", 2), 1000, 2).unwrap();
        assert!((point.value - 1.0).abs() < 1e-9);
        let conic = fs_volume_projective(&spec("z0*z2 - z1^2", 3), 1000, 2).unwrap();
        assert!((conic.value - TAU).abs() / TAU < 0.03);
    }

    #[test]
    fn fs_quadrature_of_line_and_conic() {
        let line = fs_area_quadrature(&spec("z2", 3), &FS_GRID, 5).unwrap();
        assert!((line.value - PI).abs() / PI < 1e-3, "{line:?}");
        let conic = fs_area_quadrature(&spec("z0*z2 - z1^2", 3), &FS_GRID, 5).unwrap();
        assert!((conic.value - TAU).abs() / TAU < 0.01, "{conic:?}");
        let point = fs_area_quadrature(&spec("z1", 2), &FS_GRID, 5).unwrap();
        assert_eq!(point.value, 1.0);
    }

    #[test]
    fn fs_quadrature_of_cubic() {
        let cubic = fs_area_quadrature(&spec("z0^3 + z1^3 + z2^3", 3), &FS_GRID, 6).unwrap();
        assert!((cubic.value / PI - 3.0).abs() < 0.09, "{cubic:?}");
    }
}
