use serde::Serialize;

use crate::cloud::PointCloud;
use crate::error::{LabError, Result};
use crate::linalg::{apply, haar_unitary, identity, norm, permutation, Unitary};
use crate::rng::{substream, TAG_UNITARY};

/// Slab widths, as fractions of the ball radius.
pub const PROPER_LADDER: [f64; 3] = [0.3, 0.1, 0.03];
/// Largest admissible cone constant C in |tail| <= C eps.
pub const PROPER_CONE_CONSTANT: f64 = 10.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProperCoordinates {
    /// New coordinates are y = U z.
    #[serde(serialize_with = "serialize_matrix")]
    pub unitary: Unitary,
    pub proper: bool,
    /// Largest |tail coordinates| over the thinnest slab.
    pub fiber_diameter: f64,
    /// Smallest cone constant that works for the accepted unitary.
    pub cone_constant: f64,
    pub candidates_tried: usize,
}

fn serialize_matrix<S: serde::Serializer>(
    m: &Unitary,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect();
    serde::Serialize::serialize(&rows, s)
}

/// Evaluate the properness proxy for one unitary: `(cone constant, fiber diameter)`.
fn properness(cloud: &PointCloud, k: usize, radius: f64, u: &Unitary) -> (f64, f64) {
    let split: Vec<(f64, f64)> = cloud
        .points()
        .iter()
        .map(|p| {
            let y = apply(u, p);
            (norm(&y[..k]), norm(&y[k..]))
        })
        .collect();
    let mut constant: f64 = 0.0;
    let mut diameter = 0.0;
    for frac in PROPER_LADDER {
        let eps = frac * radius;
        let tail = split
            .iter()
            .filter(|(head, _)| *head <= eps)
            .map(|(_, t)| *t)
            .fold(0.0, f64::max);
        constant = constant.max(tail / eps);
        diameter = tail;
    }
    (constant, diameter)
}

/// Search for coordinates in which projection onto the first `k` coordinates
/// looks proper on the sample: over each slab |y_head| <= eps of the ladder,
/// the tail coordinates stay within `C eps` for some C <= 10.
///
/// Candidates are the identity, then cyclic coordinate shifts, then Haar
/// unitaries drawn from `seed`. A sample can only refute properness, so a
/// failed search is reported as `proper = false`, not as an error.
pub fn find_proper_coordinates(
    cloud: &PointCloud,
    k: usize,
    ball_radius: f64,
    trials: usize,
    seed: u64,
) -> Result<ProperCoordinates> {
    if cloud.is_empty() {
        return Err(LabError::EmptyCloud(
            "proper-coordinate search needs points".into(),
        ));
    }
    let n = cloud.dim();
    if k == 0 || k >= n {
        return Err(LabError::input(format!(
            "projection dimension {k} must be in 1..{n}"
        )));
    }
    if !(ball_radius > 0.0) {
        return Err(LabError::input("ball radius must be positive"));
    }
    if cloud
        .points()
        .iter()
        .any(|p| norm(p) > ball_radius * (1.0 + 1e-9))
    {
        return Err(LabError::input("cloud has points outside the stated ball"));
    }
    if trials == 0 {
        return Err(LabError::input("at least one trial is needed"));
    }
    let shifts = (1..n).map(|s| permutation(&(0..n).map(|j| (j + s) % n).collect::<Vec<_>>()));
    let randoms = (0..).map(|t| haar_unitary(&mut substream(seed, TAG_UNITARY, t), n));
    let candidates = std::iter::once(identity(n)).chain(shifts).chain(randoms);
    let mut best: Option<(f64, f64, Unitary)> = None;
    for (i, u) in candidates.take(trials).enumerate() {
        let (constant, diameter) = properness(cloud, k, ball_radius, &u);
        if constant <= PROPER_CONE_CONSTANT {
            return Ok(ProperCoordinates {
                unitary: u,
                proper: true,
                fiber_diameter: diameter,
                cone_constant: constant,
                candidates_tried: i + 1,
            });
        }
        if best.as_ref().map(|b| constant < b.0).unwrap_or(true) {
            best = Some((constant, diameter, u));
        }
    }
    let (constant, diameter, u) = best.expect("at least one trial");
    Ok(ProperCoordinates {
        unitary: u,
        proper: false,
        fiber_diameter: diameter,
        cone_constant: constant,
        candidates_tried: trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloud::Ball;
    use crate::varieties::{sample_hypersurface, AffineVarietySpec};
    use num_complex::Complex64;

    fn sample(text: &str, seed: u64) -> PointCloud {
        let spec = AffineVarietySpec::parse_hypersurface(text, 2).unwrap();
        sample_hypersurface(&spec, &Ball::origin(2, 1.0).unwrap(), 2000, seed).unwrap()
    }

    #[test]
    fn parabola_identity_accepted() {
        let r = find_proper_coordinates(&sample("z1 - z0^2", 1), 1, 1.0, 10, 0).unwrap();
        assert!(r.proper);
        assert_eq!(r.candidates_tried, 1);
        assert_eq!(r.unitary, identity(2));
    }

    #[test]
    fn vertical_line_needs_swap() {
        let cloud = sample("z0", 2);
        let u = identity(2);
        assert!(properness(&cloud, 1, 1.0, &u).0 > PROPER_CONE_CONSTANT);
        let r = find_proper_coordinates(&cloud, 1, 1.0, 10, 0).unwrap();
        assert!(r.proper);
        assert_eq!(r.candidates_tried, 2);
        assert_eq!(r.unitary, permutation(&[1, 0]));
    }

    #[test]
    fn single_origin_point() {
        let cloud = PointCloud::exact(vec![vec![Complex64::new(0.0, 0.0); 3]], "origin").unwrap();
        let r = find_proper_coordinates(&cloud, 2, 1.0, 1, 0).unwrap();
        assert!(r.proper);
        assert_eq!(r.fiber_diameter, 0.0);
    }

    #[test]
    fn exhausted_search_is_reported() {
        let cloud = sample("z0", 2);
        let r = find_proper_coordinates(&cloud, 1, 1.0, 1, 0).unwrap();
        assert!(!r.proper);
    }
}
