//! All roots of a univariate polynomial by Aberth–Ehrlich iteration.

use num_complex::Complex64;

use super::UniPoly;
use crate::error::{LabError, Result};

pub const MAX_ITERATIONS: usize = 200;
const MOVE_TOL: f64 = 1e-13;
const RESIDUAL_TOL: f64 = 1e-8;

/// Every root of `q`, repeated according to multiplicity.
///
/// Degrees one and two are solved in closed form; higher degrees use
/// Aberth–Ehrlich with deterministic starting points on a circle. The
/// iteration stops once no root moves more than `1e-13 (1 + |r|)`. If the cap
/// is hit (typical near multiple roots, where convergence is linear) the
/// result is still accepted when every root meets the residual bound
/// `|q(r)| <= 1e-8 max|c| max(1, |r|)^deg`.
pub fn univariate_roots(q: &UniPoly) -> Result<Vec<Complex64>> {
    if q.is_zero() {
        return Err(LabError::input("root finding on the zero polynomial"));
    }
    let d = q.degree();
    if d == 0 {
        return Err(LabError::input("root finding on a constant polynomial"));
    }
    let lead = q.leading();
    let monic: Vec<Complex64> = q.coeffs().iter().map(|c| c / lead).collect();
    let roots = match d {
        1 => vec![-monic[0]],
        2 => quadratic(monic[1], monic[0]),
        _ => aberth(&monic),
    };
    let roots: Vec<Complex64> = roots.into_iter().map(|r| polish(q, r)).collect();
    let scale = q.max_coefficient();
    let worst = roots
        .iter()
        .map(|r| q.eval(*r).norm() / (scale * r.norm().max(1.0).powi(d as i32)))
        .fold(0.0, f64::max);
    if !(worst <= RESIDUAL_TOL) {
        return Err(LabError::numerical(
            format!("root finder did not converge for degree {d}"),
            worst,
        ));
    }
    Ok(roots)
}

/// Roots of t^2 + b t + c without cancellation.
fn quadratic(b: Complex64, c: Complex64) -> Vec<Complex64> {
    let disc = (b * b - 4.0 * c).sqrt();
    let s = if (b.conj() * disc).re >= 0.0 {
        b + disc
    } else {
        b - disc
    };
    if s.norm() == 0.0 {
        return vec![Complex64::new(0.0, 0.0); 2];
    }
    let r1 = -s / 2.0;
    let r2 = c / r1;
    vec![r1, r2]
}

fn aberth(monic: &[Complex64]) -> Vec<Complex64> {
    let d = monic.len() - 1;
    let p = UniPoly::new(monic.to_vec());
    // Fujiwara-style bound on the root moduli.
    let radius = (0..d)
        .map(|k| monic[k].norm().powf(1.0 / (d - k) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / d as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();
    for _ in 0..MAX_ITERATIONS {
        let mut max_move: f64 = 0.0;
        for i in 0..d {
            let (v, dv) = p.eval_with_derivative(z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / dv;
            let repulsion: Complex64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| {
                    let diff = z[i] - z[j];
                    if diff.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        1.0 / diff
                    }
                })
                .sum();
            let step = ratio / (1.0 - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                max_move = max_move.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if max_move < MOVE_TOL {
            break;
        }
    }
    z
}

/// A couple of guarded Newton steps; a step is kept only if it lowers |q|.
fn polish(q: &UniPoly, mut r: Complex64) -> Complex64 {
    for _ in 0..3 {
        let (v, dv) = q.eval_with_derivative(r);
        if dv.norm() == 0.0 || v.norm() == 0.0 {
            break;
        }
        let cand = r - v / dv;
        if cand.is_finite() && q.eval(cand).norm() < v.norm() {
            r = cand;
        } else {
            break;
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| {
            a.re.partial_cmp(&b.re)
                .unwrap()
                .then(a.im.partial_cmp(&b.im).unwrap())
        });
        v
    }

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn examples() {
        let r = sorted(
            univariate_roots(&UniPoly::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])).unwrap(),
        );
        assert!(close(&r, &[c(0.0, -1.0), c(0.0, 1.0)], 1e-12));
        let r = sorted(
            univariate_roots(&UniPoly::new(vec![c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)])).unwrap(),
        );
        assert!(close(&r, &[c(0.0, 0.0), c(1.0, 0.0)], 1e-12));
        let cube = UniPoly::new(vec![c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let r = sorted(univariate_roots(&cube).unwrap());
        let h = 3f64.sqrt() / 2.0;
        assert!(close(&r, &[c(-0.5, -h), c(-0.5, h), c(1.0, 0.0)], 1e-12));
    }

    #[test]
    fn errors() {
        assert!(univariate_roots(&UniPoly::new(vec![c(0.0, 0.0)])).is_err());
        assert!(univariate_roots(&UniPoly::new(vec![c(2.0, 0.0)])).is_err());
    }

    #[test]
    fn multiple_roots_are_accepted() {
        let q = UniPoly::from_roots(&[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-2.0, 0.5)]);
        let r = univariate_roots(&q).unwrap();
        assert_eq!(r.len(), 4);
        assert_eq!(
            r.iter()
                .filter(|x| (*x - c(1.0, 0.0)).norm() < 1e-4)
                .count(),
            3
        );
    }

    #[test]
    fn deterministic() {
        let q = UniPoly::new((0..9).map(|k| c(k as f64 - 3.0, 0.5 * k as f64)).collect());
        assert_eq!(univariate_roots(&q).unwrap(), univariate_roots(&q).unwrap());
    }

    proptest! {
        #[test]
        fn reconstructs_coefficients(
            roots in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..=8),
            (lr, li) in (0.5f64..2.0, -1.0f64..1.0),
        ) {
            let rs: Vec<Complex64> = roots.iter().map(|&(a, b)| c(a, b)).collect();
            let lead = c(lr, li);
            let q = UniPoly::new(UniPoly::from_roots(&rs).coeffs().iter().map(|x| x * lead).collect());
            let found = univariate_roots(&q).unwrap();
            for r in &found {
                let scale = q.max_coefficient() * r.norm().max(1.0).powi(q.degree() as i32);
                prop_assert!(q.eval(*r).norm() <= 1e-8 * scale);
            }
            let rebuilt = UniPoly::from_roots(&found);
            let max = q.max_coefficient();
            for (a, b) in rebuilt.coeffs().iter().zip(q.coeffs()) {
                prop_assert!((a * lead - b).norm() <= 1e-6 * max);
            }
        }
    }
}
