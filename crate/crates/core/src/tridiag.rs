//! Real symmetric tridiagonal eigensolver (implicit QL with Wilkinson-style shifts).
//!
//! Used for the charge-basis device Hamiltonian and for Golub-Welsch quadrature
//! rules. Both are small, real and tridiagonal, so a dense solver is not needed.

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 64;

/// Eigenpairs sorted by ascending eigenvalue.
#[derive(Debug, Clone)]
pub struct TridiagonalEigen {
    pub values: Vec<f64>,
    /// `vectors[k]` is the normalized eigenvector belonging to `values[k]`.
    pub vectors: Vec<Vec<f64>>,
}

/// Diagonalize the symmetric tridiagonal matrix with main diagonal `diag` and
/// first off-diagonal `off` (`off[i]` couples rows `i` and `i + 1`).
///
/// Eigenvectors are returned in a fixed real gauge: the component of largest
/// magnitude is positive (the first one wins ties).
pub fn eigh_tridiagonal(diag: &[f64], off: &[f64]) -> Result<TridiagonalEigen> {
    let n = diag.len();
    if n == 0 {
        return Err(Error::InvalidParameter("empty tridiagonal matrix".into()));
    }
    if off.len() + 1 != n {
        return Err(Error::InvalidParameter(format!(
            "off-diagonal length {} does not match dimension {}",
            off.len(),
            n
        )));
    }
    if diag.iter().chain(off).any(|v| !v.is_finite()) {
        return Err(Error::EigenSolver("non-finite matrix entry".into()));
    }

    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    // z[row * n + col], columns are eigenvectors
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(Error::EigenSolver(format!(
                    "no convergence for eigenvalue {l} after {MAX_SWEEPS} sweeps"
                )));
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let zk1 = z[k * n + i + 1];
                    let zk = z[k * n + i];
                    z[k * n + i + 1] = s * zk + c * zk1;
                    z[k * n + i] = c * zk - s * zk1;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));

    let values = order.iter().map(|&k| d[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| {
            let mut v: Vec<f64> = (0..n).map(|row| z[row * n + k]).collect();
            fix_gauge(&mut v);
            v
        })
        .collect();

    Ok(TridiagonalEigen { values, vectors })
}

/// Flip the sign of `v` so that its largest-magnitude entry is positive.
pub(crate) fn fix_gauge(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        // strict comparison with a small slack keeps ties on the first index
        if x.abs() > v[best].abs() * (1.0 + 1e-12) {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn dense(diag: &[f64], off: &[f64]) -> DMatrix<f64> {
        let n = diag.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = diag[i];
        }
        for (i, &o) in off.iter().enumerate() {
            m[(i, i + 1)] = o;
            m[(i + 1, i)] = o;
        }
        m
    }

    #[test]
    fn one_by_one() {
        let eig = eigh_tridiagonal(&[3.5], &[]).unwrap();
        assert_eq!(eig.values, vec![3.5]);
        assert_eq!(eig.vectors, vec![vec![1.0]]);
    }

    #[test]
    fn diagonal_matrix_sorted() {
        let eig = eigh_tridiagonal(&[2.0, -1.0, 0.5], &[0.0, 0.0]).unwrap();
        assert_eq!(eig.values, vec![-1.0, 0.5, 2.0]);
        assert_eq!(eig.vectors[0], vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn matches_dense_solver() {
        let diag: Vec<f64> = (0..9).map(|i| ((i as f64) - 4.3).powi(2)).collect();
        let off = vec![-0.7; 8];
        let eig = eigh_tridiagonal(&diag, &off).unwrap();
        let m = dense(&diag, &off);
        let mut reference: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        reference.sort_by(f64::total_cmp);
        for (a, b) in eig.values.iter().zip(&reference) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        for (k, v) in eig.vectors.iter().enumerate() {
            let x = nalgebra::DVector::from_column_slice(v);
            let resid = &m * &x - &x * eig.values[k];
            assert!(resid.norm() < 1e-12);
            assert!((x.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_mismatched_lengths() {
        assert!(eigh_tridiagonal(&[1.0, 2.0], &[]).is_err());
        assert!(eigh_tridiagonal(&[], &[]).is_err());
    }

    #[test]
    fn gauge_largest_component_positive() {
        let mut v = vec![0.1, -0.9, 0.3];
        fix_gauge(&mut v);
        assert_eq!(v, vec![-0.1, 0.9, -0.3]);
    }
}
