//! Hermitian eigenvalues by cyclic Jacobi iteration.
//!
//! An n×n Hermitian `H = A + iB` is mapped to the 2n×2n real symmetric
//! matrix `[[A, -B], [B, A]]`, whose spectrum is that of `H` with every
//! eigenvalue doubled. Jacobi sweeps run on the real embedding.

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Off-diagonal Frobenius norm at which sweeps stop.
pub const JACOBI_THRESHOLD: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues of a Hermitian matrix in ascending order.
///
/// Only the Hermitian part `(M + M†)/2` is used.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::InvalidMatrix(format!(
            "eigenvalues need a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let size = 2 * n;
    let mut a = vec![0.0f64; size * size];
    for r in 0..n {
        for c in 0..n {
            let h = (m.get(r, c) + m.get(c, r).conj()) * 0.5;
            a[r * size + c] = h.re;
            a[(r + n) * size + (c + n)] = h.re;
            a[r * size + (c + n)] = -h.im;
            a[(r + n) * size + c] = h.im;
        }
    }
    jacobi_symmetric(&mut a, size);
    let mut diag: Vec<f64> = (0..size).map(|i| a[i * size + i]).collect();
    diag.sort_by(f64::total_cmp);
    Ok(diag.into_iter().step_by(2).collect())
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a[r * n + c] * a[r * n + c];
            }
        }
    }
    s.sqrt()
}

fn jacobi_symmetric(a: &mut [f64], n: usize) {
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(a, n) < JACOBI_THRESHOLD {
            return;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() < f64::MIN_POSITIVE {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // A <- Jᵀ A J with the rotation in the (p, q) plane
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
}

/// True when every eigenvalue of the Hermitian part of `m` exceeds `-tol`,
/// decided by a Cholesky factorization of `m + tol·I`. Cheaper than the full
/// spectrum for large matrices.
pub fn is_positive_semidefinite(m: &ComplexMatrix, tol: f64) -> Result<bool> {
    if !m.is_square() {
        return Err(Error::InvalidMatrix(format!(
            "positivity needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let mut l = vec![num_complex::Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        let mut d = m.get(j, j).re + tol;
        for k in 0..j {
            d -= l[j * n + k].norm_sqr();
        }
        if d <= 0.0 {
            return Ok(false);
        }
        let pivot = d.sqrt();
        l[j * n + j] = pivot.into();
        for i in j + 1..n {
            let mut s = (m.get(i, j) + m.get(j, i).conj()) * 0.5;
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k].conj();
            }
            l[i * n + j] = s / pivot;
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::C64;

    #[test]
    fn pauli_y_spectrum() {
        let y = ComplexMatrix::new(
            2,
            2,
            vec![
                C64::new(0.0, 0.0),
                C64::new(0.0, -1.0),
                C64::new(0.0, 1.0),
                C64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        let ev = hermitian_eigenvalues(&y).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-12);
        assert!((ev[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_is_sorted() {
        let d = ComplexMatrix::from_real(3, 3, &[3.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.5]);
        let ev = hermitian_eigenvalues(&d).unwrap();
        assert_eq!(ev, vec![-1.0, 0.5, 3.0]);
    }

    #[test]
    fn trace_and_determinant_of_2x2() {
        // [[2, 1-i], [1+i, 3]]: trace 5, det 6 - 2 = 4 → eigenvalues 1 and 4
        let h = ComplexMatrix::new(
            2,
            2,
            vec![
                C64::new(2.0, 0.0),
                C64::new(1.0, -1.0),
                C64::new(1.0, 1.0),
                C64::new(3.0, 0.0),
            ],
        )
        .unwrap();
        let ev = hermitian_eigenvalues(&h).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-12);
        assert!((ev[1] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn cholesky_positivity_agrees_with_spectrum() {
        // eigenvalues 1 and 4
        let h = ComplexMatrix::new(
            2,
            2,
            vec![
                C64::new(2.0, 0.0),
                C64::new(1.0, -1.0),
                C64::new(1.0, 1.0),
                C64::new(3.0, 0.0),
            ],
        )
        .unwrap();
        assert!(is_positive_semidefinite(&h, 0.0).unwrap());
        // shifted down by 2: eigenvalues -1 and 2
        let shifted = h.sub(&ComplexMatrix::identity(2).scale_real(2.0));
        assert!(!is_positive_semidefinite(&shifted, 1e-9).unwrap());
        assert!(is_positive_semidefinite(&shifted, 1.0 + 1e-9).unwrap());
        // rank-one projector is PSD only with a tolerance
        let p = ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        assert!(is_positive_semidefinite(&p, 1e-12).unwrap());
    }
}
