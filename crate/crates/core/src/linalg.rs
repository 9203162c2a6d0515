//! Small dense complex linear algebra: Hermitian products, Haar unitaries,
//! orthonormal completions and least squares.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{LabError, Result};
use crate::rng::complex_gaussian;

/// Hermitian product <u, v> = sum u_j conj(v_j).
pub fn hdot(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub fn dist(u: &[Complex64], v: &[Complex64]) -> f64 {
    u.iter()
        .zip(v)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Unitary matrix stored row-major as an n x n nalgebra matrix.
pub type Unitary = DMatrix<Complex64>;

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases
/// of R's diagonal folded back into Q.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Unitary {
    let g = DMatrix::from_fn(n, n, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn identity(n: usize) -> Unitary {
    DMatrix::identity(n, n)
}

/// Permutation matrix sending coordinate `j` to position `perm[j]`.
pub fn permutation(perm: &[usize]) -> Unitary {
    let n = perm.len();
    let mut m = DMatrix::zeros(n, n);
    for (j, &p) in perm.iter().enumerate() {
        m[(p, j)] = Complex64::new(1.0, 0.0);
    }
    m
}

pub fn apply(u: &Unitary, z: &[Complex64]) -> Vec<Complex64> {
    let v = u * DVector::from_column_slice(z);
    v.iter().copied().collect()
}

/// Apply the conjugate transpose of `u`.
pub fn apply_adjoint(u: &Unitary, z: &[Complex64]) -> Vec<Complex64> {
    let v = u.adjoint() * DVector::from_column_slice(z);
    v.iter().copied().collect()
}

/// Orthonormal basis of the orthogonal complement of span(rows) in C^n.
///
/// Rows are first orthonormalised; a row whose residual norm falls below
/// `rank_tol` makes the set rank deficient and is reported as an error.
pub fn orthogonal_complement(
    rows: &[Vec<Complex64>],
    n: usize,
    rank_tol: f64,
) -> Result<Vec<Vec<Complex64>>> {
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for row in rows {
        let mut v = row.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = hdot(&v, b);
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let nv = norm(&v);
        if nv <= rank_tol {
            return Err(LabError::Singular(format!(
                "rank-deficient Jacobian (residual row norm {nv:e})"
            )));
        }
        v.iter_mut().for_each(|x| *x /= nv);
        basis.push(v);
    }
    let m = basis.len();
    for j in 0..n {
        if basis.len() == n {
            break;
        }
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[j] = Complex64::new(1.0, 0.0);
        for _ in 0..2 {
            for b in &basis {
                let c = hdot(&v, b);
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let nv = norm(&v);
        if nv > 1e-8 {
            v.iter_mut().for_each(|x| *x /= nv);
            basis.push(v);
        }
    }
    Ok(basis.split_off(m))
}

/// Complex least squares min ||A x - b|| via SVD.
pub fn least_squares(a: &DMatrix<Complex64>, b: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    let svd = a.clone().svd(true, true);
    svd.solve(b, 1e-13)
        .map_err(|e| LabError::numerical(format!("least squares failed: {e}"), f64::NAN))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn haar_is_unitary_and_deterministic() {
        let u1 = haar_unitary(&mut substream(9, 1, 0), 3);
        let u2 = haar_unitary(&mut substream(9, 1, 0), 3);
        assert_eq!(u1, u2);
        let prod = u1.adjoint() * &u1;
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((prod[(i, j)] - Complex64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn complement_of_gradient() {
        let row = vec![Complex64::new(-2.0, 0.0), Complex64::new(1.0, 0.0)];
        let basis = orthogonal_complement(std::slice::from_ref(&row), 2, 1e-10).unwrap();
        assert_eq!(basis.len(), 1);
        // kernel of J z = -2 z1 + z2 is spanned by (1, 2)
        let e = &basis[0];
        let jz = row[0] * e[0] + row[1] * e[1];
        // rows are conjugated by the caller; here the row is real
        assert!(jz.norm() < 1e-12);
        assert!((norm(e) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complement_detects_rank_deficiency() {
        let row = vec![Complex64::new(0.0, 0.0); 2];
        assert!(matches!(
            orthogonal_complement(&[row], 2, 1e-10),
            Err(LabError::Singular(_))
        ));
    }
}
