//! Implicit-shift QL iteration for symmetric tridiagonal matrices.
//!
//! [`eigen_first_components`] carries only the first row of the accumulated
//! eigenvector matrix: its squares are the Gauss weights of the spectral
//! measure, so that solve stays `O(n²)` in time and `O(n)` in memory.
//! [`eigen_vectors`] carries every row.

use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// Eigenvalues (ascending) and the first component of each normalized
/// eigenvector of the symmetric tridiagonal matrix `(diag, off)`.
///
/// `off[k]` couples rows `k` and `k + 1`.
pub fn eigen_first_components<T: Real>(diag: &[T], off: &[T]) -> Result<(Vec<T>, Vec<T>)> {
    let (values, mut rows) = ql(diag, off, 1)?;
    Ok((values, rows.pop().unwrap_or_default()))
}

/// Eigenvalues (ascending) and normalized eigenvectors; `vectors[s][i]` is
/// component `i` of the eigenvector for `values[s]`.
pub fn eigen_vectors<T: Real>(diag: &[T], off: &[T]) -> Result<(Vec<T>, Vec<Vec<T>>)> {
    let (values, rows) = ql(diag, off, diag.len())?;
    let vectors = (0..values.len())
        .map(|s| rows.iter().map(|row| row[s]).collect())
        .collect();
    Ok((values, vectors))
}

/// QL iteration accumulating the leading `rows` rows of the eigenvector matrix.
/// Returns sorted eigenvalues and the rows with columns in the same order.
fn ql<T: Real>(diag: &[T], off: &[T], rows: usize) -> Result<(Vec<T>, Vec<Vec<T>>)> {
    let n = diag.len();
    debug_assert_eq!(off.len() + 1, n.max(1));
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(T::zero());
    let rows = rows.min(n);
    let mut z: Vec<Vec<T>> = (0..rows)
        .map(|r| (0..n).map(|k| if k == r { T::one() } else { T::zero() }).collect())
        .collect();
    if n == 0 {
        return Ok((d, z));
    }
    let eps = T::epsilon();

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS_PER_EIGENVALUE {
                return Err(Error::NoConvergence {
                    what: "tridiagonal QL iteration",
                    iterations: sweeps - 1,
                });
            }

            // Wilkinson-type shift from the leading 2×2 block.
            let mut g = (d[l + 1] - d[l]) / (T::two() * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + T::two() * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in z.iter_mut() {
                    let zf = row[i + 1];
                    row[i + 1] = s * row[i] + c * zf;
                    row[i] = c * row[i] - s * zf;
                }
            }
            if deflated {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).expect("eigenvalues are finite"));
    Ok((
        order.iter().map(|&k| d[k]).collect(),
        z.iter().map(|row| order.iter().map(|&k| row[k]).collect()).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_closed_form() {
        // [[1, 2], [2, 1]] has eigenvalues -1, 3 with eigenvectors (1, ∓1)/√2.
        let (vals, first) = eigen_first_components(&[1.0f64, 1.0], &[2.0]).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-14 && (vals[1] - 3.0).abs() < 1e-14);
        assert!((first[0].abs() - 0.5f64.sqrt()).abs() < 1e-14);
        assert!((first[1].abs() - 0.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn full_vectors_are_orthonormal_eigenvectors() {
        let diag = [0.3f64, -1.0, 2.0, 0.5];
        let off = [0.7f64, 1.1, 0.2];
        let (vals, vecs) = eigen_vectors(&diag, &off).unwrap();
        let (vals1, first) = eigen_first_components(&diag, &off).unwrap();
        assert_eq!(vals, vals1);
        for s in 0..4 {
            assert_eq!(vecs[s][0], first[s]);
            for r in 0..4 {
                let dot: f64 = (0..4).map(|i| vecs[s][i] * vecs[r][i]).sum();
                assert!((dot - if r == s { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
            let v = &vecs[s];
            for i in 0..4 {
                let mut jv = diag[i] * v[i];
                if i > 0 {
                    jv += off[i - 1] * v[i - 1];
                }
                if i < 3 {
                    jv += off[i] * v[i + 1];
                }
                assert!((jv - vals[s] * v[i]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn single_site() {
        let (vals, first) = eigen_first_components(&[3.0f64], &[]).unwrap();
        assert_eq!(vals, vec![3.0]);
        assert_eq!(first, vec![1.0]);
    }

    #[test]
    fn handles_already_diagonal_blocks() {
        let (vals, first) = eigen_first_components(&[2.0f64, -1.0, 5.0], &[0.0, 0.0]).unwrap();
        assert_eq!(vals, vec![-1.0, 2.0, 5.0]);
        assert_eq!(first.iter().map(|z| z * z).collect::<Vec<_>>(), vec![0.0, 1.0, 0.0]);
    }
}
